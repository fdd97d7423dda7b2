"""Completely blind no-reference stereoscopic video quality toolkit."""

from .cyclopean import (PatchGrid, ViewWeights, build_cyclopean,
                        compute_weights, partition_patches)
from .disparity import DisparityMap, compute_disparity
from .evaluation import (MetricsReport, correlations, evaluate_scores, f_test,
                         logistic_fit)
from .features import (FeatureMatrix, UGGDParams, extract_features, fit_uggd)
from .pipeline import (PipelineConfig, build_pristine_model, cyclopean_volume,
                       score_video, video_features)
from .quality import (MVGModel, QualityScore, bhattacharyya_cov,
                      bhattacharyya_mean, fit_mvg, load_model, pool_score,
                      save_model)
from .saliency import SaliencyMap, compute_saliency
from .steerable import (Orientation, SteerableKernel, SubbandStack,
                        build_kernel, decompose, make_orientations)
from .subjective import (DmosTable, RatingsTable, compute_dmos, parse_ratings,
                         reject_outlier_subjects)
from .video_io import (FrameSequence, StereoSequence, apply_synthetic_fog,
                       read_yuv420, write_yuv420)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
