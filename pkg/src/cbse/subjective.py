"""Subjective rating processing: panel screening and DMOS computation.

Ratings arrive as delimited text (`subject,video,reference,score`); reference
presentations are rows whose video id equals the reference id. Per subject the
difference scores against the hidden reference are z-normalized, mapped to
[0, 100], and averaged across the panel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SCORE_MIN, SCORE_MAX = 1.0, 5.0
NORMAL_KURTOSIS_RANGE = (2.0, 4.0)
OUTLIER_FRACTION = 0.05
NORMAL_SIGMAS = 2.0
NONNORMAL_SIGMAS = np.sqrt(20.0)


class RatingsFormatError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None
                         else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class RatingsTable:
    """Per-(subject, video) ratings with a reference id for each test video."""

    scores: dict[tuple[str, str], float]
    reference_of: dict[str, str]

    @property
    def subjects(self) -> list[str]:
        return sorted({s for s, _ in self.scores})

    @property
    def test_videos(self) -> list[str]:
        return sorted(v for v, r in self.reference_of.items() if v != r)

    @property
    def videos(self) -> list[str]:
        return sorted(self.reference_of)


@dataclass(frozen=True)
class DmosTable:
    """Final DMOS per test video plus per-subject intermediates."""

    dmos: dict[str, float]
    n_subjects: int
    rejected: tuple[tuple[str, str], ...] = field(default=())
    normalized: dict[tuple[str, str], float] = field(default_factory=dict)


def parse_ratings(path) -> RatingsTable:
    """Read `subject,video,reference,score` rows; header line required."""
    scores: dict[tuple[str, str], float] = {}
    reference_of: dict[str, str] = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != \
            ["subject", "video", "reference", "score"]:
        raise RatingsFormatError("missing `subject,video,reference,score` "
                                 "header", line=1)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [c.strip() for c in line.split(",")]
        if len(parts) != 4:
            raise RatingsFormatError(f"expected 4 fields, got {len(parts)}",
                                     line=lineno)
        subject, video, reference, raw = parts
        try:
            score = float(raw)
        except ValueError:
            raise RatingsFormatError(f"non-numeric score {raw!r}", line=lineno)
        if not SCORE_MIN <= score <= SCORE_MAX:
            raise RatingsFormatError(f"score {score} outside [1, 5]",
                                     line=lineno)
        key = (subject, video)
        if key in scores:
            raise RatingsFormatError(f"duplicate rating for {key}",
                                     line=lineno)
        if video in reference_of and reference_of[video] != reference:
            raise RatingsFormatError(f"conflicting reference for {video}",
                                     line=lineno)
        scores[key] = score
        reference_of[video] = reference
    return RatingsTable(scores=scores, reference_of=reference_of)


def reject_outlier_subjects(table: RatingsTable
                            ) -> tuple[RatingsTable, list[tuple[str, str]]]:
    """Screen the panel: drop subjects with too many out-of-band ratings.

    Per video the across-subject mean and spread set a band of 2 sigma
    (sqrt(20) sigma when the rating distribution is non-normal by the
    kurtosis test); subjects whose out-of-band fraction over all videos
    exceeds 5% are rejected.
    """
    subjects = table.subjects
    if len(subjects) < 3:
        raise ValueError("need at least 3 subjects for screening")
    videos = table.videos
    high = {s: 0 for s in subjects}
    low = {s: 0 for s in subjects}
    counted = {s: 0 for s in subjects}
    for video in videos:
        rated = [(s, table.scores[(s, video)]) for s in subjects
                 if (s, video) in table.scores]
        vals = np.array([v for _, v in rated])
        if vals.size < 2:
            continue
        mean = vals.mean()
        std = vals.std(ddof=1)
        m2 = ((vals - mean) ** 2).mean()
        if m2 > 0:
            kurtosis = ((vals - mean) ** 4).mean() / m2 ** 2
            normal = NORMAL_KURTOSIS_RANGE[0] <= kurtosis <= NORMAL_KURTOSIS_RANGE[1]
        else:
            normal = True
        band = (NORMAL_SIGMAS if normal else NONNORMAL_SIGMAS) * std
        for subject, value in rated:
            counted[subject] += 1
            if value > mean + band:
                high[subject] += 1
            elif value < mean - band:
                low[subject] += 1

    rejected = []
    for subject in subjects:
        if counted[subject] == 0:
            continue
        p, q = high[subject], low[subject]
        fraction = (p + q) / counted[subject]
        if fraction > OUTLIER_FRACTION:
            ratio = abs(p - q) / (p + q)
            rejected.append((subject,
                             f"outlier fraction {fraction:.3f} "
                             f"(high={p}, low={q}, ratio={ratio:.3f})"))
    if not rejected:
        return table, []
    bad = {s for s, _ in rejected}
    kept = {k: v for k, v in table.scores.items() if k[0] not in bad}
    return RatingsTable(scores=kept, reference_of=dict(table.reference_of)), rejected


def compute_dmos(table: RatingsTable) -> DmosTable:
    """Difference scores -> per-subject z-normalization -> [0, 100] -> mean."""
    test_videos = table.test_videos
    if not test_videos:
        raise ValueError("no test videos in ratings table")
    rejected: list[tuple[str, str]] = []
    normalized: dict[tuple[str, str], float] = {}
    per_video: dict[str, list[float]] = {v: [] for v in test_videos}

    for subject in table.subjects:
        deltas = {}
        for video in test_videos:
            ref = table.reference_of[video]
            key, ref_key = (subject, video), (subject, ref)
            if key not in table.scores or ref_key not in table.scores:
                raise ValueError(f"subject {subject} is missing a rating for "
                                 f"{video} or its reference {ref}")
            deltas[video] = table.scores[ref_key] - table.scores[key]
        values = np.array(list(deltas.values()))
        mu = values.mean()
        sigma = values.std(ddof=1) if values.size > 1 else 0.0
        if sigma == 0.0:
            rejected.append((subject, "constant difference scores (sigma=0)"))
            continue
        for video, delta in deltas.items():
            z = np.clip((delta - mu) / sigma, -3.0, 3.0)
            rescaled = (z + 3.0) * 100.0 / 6.0
            normalized[(subject, video)] = rescaled
            per_video[video].append(rescaled)

    if not any(per_video.values()):
        raise ValueError("no usable subjects after sigma screening")
    n_subjects = len(table.subjects) - len(rejected)
    dmos = {v: float(np.mean(vals)) for v, vals in per_video.items()}
    return DmosTable(dmos=dmos, n_subjects=n_subjects,
                     rejected=tuple(rejected), normalized=normalized)


def write_dmos(result: DmosTable, path) -> None:
    with open(path, "w") as fh:
        fh.write("video,dmos,n_subjects\n")
        for video in sorted(result.dmos):
            fh.write(f"{video},{result.dmos[video]:.12g},{result.n_subjects}\n")


def read_dmos(path) -> dict[str, float]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("video,dmos"):
        raise RatingsFormatError("missing `video,dmos,...` header", line=1)
    out = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) < 2:
            raise RatingsFormatError("expected `video,dmos` fields",
                                     line=lineno)
        try:
            out[parts[0].strip()] = float(parts[1])
        except ValueError:
            raise RatingsFormatError(f"non-numeric dmos {parts[1]!r}",
                                     line=lineno)
    return out
