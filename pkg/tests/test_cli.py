import json
import re

import numpy as np
import pytest

from cbse.cli import main
from cbse.video_io import write_yuv420
from conftest import stereo_clip

W, H, T = 240, 128, 10

FAST_CONFIG = {"max_disparity": 4, "ssim_window": 7}


def _write_pair(directory, name, seed):
    stereo = stereo_clip(T, H, W, seed=seed)
    left = directory / f"{name}_left.yuv"
    right = directory / f"{name}_right.yuv"
    write_yuv420(stereo.left, left)
    write_yuv420(stereo.right, right)
    return left, right


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus"
    corpus.mkdir()
    for i, seed in enumerate((11, 22)):
        _write_pair(corpus, f"clip{i}", seed)
    test_left, test_right = _write_pair(root, "probe", 33)
    config = root / "config.json"
    config.write_text(json.dumps(FAST_CONFIG))
    model = root / "model.txt"
    code = main(["fit", "--corpus", str(corpus), "--width", str(W),
                 "--height", str(H), "--out", str(model),
                 "--config", str(config), "--threads", "2"])
    assert code == 0
    return {"root": root, "corpus": corpus, "model": model,
            "config": config, "left": test_left, "right": test_right}


def _score_args(ws, extra=()):
    return ["score", "--left", str(ws["left"]), "--right", str(ws["right"]),
            "--width", str(W), "--height", str(H),
            "--model", str(ws["model"]), "--config", str(ws["config"]),
            *extra]


class TestFit:
    def test_empty_corpus_exit_3(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        code = main(["fit", "--corpus", str(empty), "--width", str(W),
                     "--height", str(H), "--out", str(tmp_path / "m.txt")])
        assert code == 3

    def test_model_written(self, workspace):
        assert workspace["model"].exists()
        header = workspace["model"].read_text().splitlines()[0]
        assert header.startswith("CBSE-MODEL")


class TestScore:
    def test_score_output_format(self, workspace, capsys):
        assert main(_score_args(workspace)) == 0
        out = capsys.readouterr().out
        assert re.fullmatch(
            r"S_mu=\S+ S_sigma=\S+ CBSE=\S+\n", out), out

    def test_truncated_video_exit_2(self, workspace, tmp_path, capsys):
        stub = tmp_path / "short_left.yuv"
        stub.write_bytes(workspace["left"].read_bytes()[:1000])
        code = main(["score", "--left", str(stub),
                     "--right", str(workspace["right"]),
                     "--width", str(W), "--height", str(H),
                     "--model", str(workspace["model"]),
                     "--config", str(workspace["config"])])
        assert code == 2

    def test_config_mismatch_exit_4(self, workspace, tmp_path, capsys):
        other = tmp_path / "other.json"
        other.write_text(json.dumps({**FAST_CONFIG, "support": 11}))
        code = main(_score_args({**workspace, "config": other}))
        assert code == 4

    def test_corrupt_model_exit_4(self, workspace, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a model\n")
        code = main(_score_args({**workspace, "model": bad}))
        assert code == 4

    def test_thread_count_does_not_change_output(self, workspace, capsys):
        outputs = []
        for threads in ("1", "4"):
            assert main(_score_args(workspace,
                                    ["--threads", threads])) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]


class TestDmos:
    def _ratings(self, path):
        rng = np.random.default_rng(7)
        lines = ["subject,video,reference,score"]
        truth = {f"v{j}": 1 + j % 5 for j in range(6)}
        for s in ("s1", "s2", "s3"):
            lines.append(f"{s},ref,ref,5")
            for video, t in truth.items():
                score = float(np.clip(t + rng.normal(0, 0.2), 1, 5))
                lines.append(f"{s},{video},ref,{score:.2f}")
        path.write_text("\n".join(lines) + "\n")

    def test_dmos_ok(self, tmp_path, capsys):
        ratings = tmp_path / "ratings.csv"
        self._ratings(ratings)
        out = tmp_path / "dmos.csv"
        assert main(["dmos", "--ratings", str(ratings),
                     "--out", str(out)]) == 0
        assert "videos=6 subjects=3" in capsys.readouterr().out
        assert out.exists()

    def test_malformed_exit_5(self, tmp_path, capsys):
        ratings = tmp_path / "ratings.csv"
        ratings.write_text("subject,video,reference,score\ns1,v1,ref\n")
        code = main(["dmos", "--ratings", str(ratings),
                     "--out", str(tmp_path / "dmos.csv")])
        assert code == 5


class TestEval:
    def _files(self, tmp_path):
        dmos = tmp_path / "dmos.csv"
        dmos.write_text("video,dmos\n" + "".join(
            f"v{j},{30 + 10 * j}\n" for j in range(6)))
        scores = tmp_path / "scores.csv"
        scores.write_text("video,score\n" + "".join(
            f"v{j},{100 - 9 * j}\n" for j in range(6)))
        return scores, dmos

    def test_eval_ok(self, tmp_path, capsys):
        scores, dmos = self._files(tmp_path)
        assert main(["eval", "--scores", str(scores),
                     "--dmos", str(dmos)]) == 0
        out = capsys.readouterr().out
        assert "LCC=" in out and "SROCC=" in out and "RMSE=" in out

    def test_too_few_common_videos_exit_5(self, tmp_path, capsys):
        dmos = tmp_path / "dmos.csv"
        dmos.write_text("video,dmos\nv0,40\nv1,50\n")
        scores = tmp_path / "scores.csv"
        scores.write_text("video,score\nv0,90\nv1,80\n")
        code = main(["eval", "--scores", str(scores), "--dmos", str(dmos)])
        assert code == 5

    def test_malformed_scores_exit_5(self, tmp_path, capsys):
        _, dmos = self._files(tmp_path)
        scores = tmp_path / "scores.csv"
        scores.write_text("video,score\nv0\n")
        code = main(["eval", "--scores", str(scores), "--dmos", str(dmos)])
        assert code == 5


class TestSelfcheck:
    def test_fog_ladder_passes(self, workspace, capsys):
        code = main(["selfcheck", "--left", str(workspace["left"]),
                     "--right", str(workspace["right"]),
                     "--width", str(W), "--height", str(H),
                     "--model", str(workspace["model"]),
                     "--config", str(workspace["config"]),
                     "--threads", "2"])
        out = capsys.readouterr().out
        assert code == 0, out
        assert "PASS" in out
        assert out.count("t=") == 5
