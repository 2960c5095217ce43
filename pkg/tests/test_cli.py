"""Tests for the lfc command line"""
import json
import logging
import sys

import numpy as np
import pandas as pd
import pytest

from latent_feature_clustering.errors import ConfigurationError
from latent_feature_clustering.harness import save_latents
from latent_feature_clustering.losses import LossReport
from latent_feature_clustering.main import build_parser, main, parse_assignment, setup_logging


def _last_json(text):
    return json.loads(text.strip().splitlines()[-1])


@pytest.fixture
def embedding_csv(tmp_path, two_clusters):
    points, labels = two_clusters
    path = tmp_path / "embedding.csv"
    pd.DataFrame({"index": range(4), "x": points[:, 0], "y": points[:, 1], "label": labels}).to_csv(path, index=False)
    return path


class TestParseAssignment:
    def test_json_values(self):
        assert parse_assignment("latent=64") == ("latent", 64)
        assert parse_assignment("adaptive=true") == ("adaptive", True)
        assert parse_assignment("beta=0.25") == ("beta", 0.25)

    def test_text_values(self):
        assert parse_assignment("lr_scheduler=step") == ("lr_scheduler", "step")
        assert parse_assignment("name=a=b") == ("name", "a=b")

    def test_missing_equals(self):
        with pytest.raises(ConfigurationError, match="KEY=VALUE"):
            parse_assignment("latent")


class TestParser:
    def test_command_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_repeatable_overrides(self):
        args = build_parser().parse_args(["train", "--set", "latent=32", "--set", "aux=clustering"])
        assert args.set == ["latent=32", "aux=clustering"]


def test_generate_data(output_root, tmp_path, capsys):
    code = main(["generate-data", "--dataset", "channels", "--n-samples", "20", "--out", str(tmp_path / "data")])
    assert code == 0
    payload = _last_json(capsys.readouterr().out)
    assert payload["n"] == 20
    assert sum(payload["class_counts"]) == 20
    assert (tmp_path / "data" / "channels-images.idx3-ubyte").exists()


def test_evaluate(output_root, embedding_csv, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert main(["evaluate", "--embedding", str(embedding_csv), "--out", str(report_path)]) == 0
    payload = _last_json(capsys.readouterr().out)
    assert payload["silhouette"] == pytest.approx(0.90025, abs=1e-5)
    assert json.loads(report_path.read_text())["n"] == 4


def test_evaluate_rejects_bad_csv(output_root, tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0,0\n")
    assert main(["evaluate", "--embedding", str(path)]) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ProjectionError"


def test_train_rejects_unknown_key(output_root, capsys):
    assert main(["train", "--set", "depth=3"]) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigurationError"
    assert "depth" in error["message"]


def test_grid_search_needs_a_grid(output_root, capsys):
    assert main(["grid-search"]) == 2
    assert "empty grid" in capsys.readouterr().err


def test_project_latents(output_root, tmp_path, blobs, capsys):
    points, labels = blobs
    latents = save_latents(tmp_path / "latents.npz", points.astype(np.float32), labels)
    code = main(["project", "--latents", str(latents), "--n-neighbors", "5", "--epochs", "30"])
    assert code == 0
    payload = _last_json(capsys.readouterr().out)
    assert payload["embedding"] == str(tmp_path / "embedding.csv")
    assert (tmp_path / "embedding.svg").exists()
    assert len(pd.read_csv(tmp_path / "embedding.csv")) == 100


def test_plot_rerenders_a_run(output_root, tmp_path, embedding_csv, capsys):
    history = [LossReport(l_rec=0.5, total=0.5).to_dict(), LossReport(l_rec=0.4, total=0.4).to_dict()]
    stored = {"config": {"dataset": {"name": "channels"}}, "train_history": history,
              "val_history": history, "silhouette": 0.9}
    (tmp_path / "result.json").write_text(json.dumps(stored))
    assert main(["plot", "--run-dir", str(tmp_path)]) == 0
    written = _last_json(capsys.readouterr().out)["written"]
    assert str(tmp_path / "loss_curves.svg") in written
    assert (tmp_path / "projection.svg").exists()


def test_plot_needs_a_result(output_root, tmp_path, capsys):
    assert main(["plot", "--run-dir", str(tmp_path)]) == 2
    assert "result.json" in capsys.readouterr().err


def test_logs_stream_to_stderr(tmp_path, monkeypatch):
    root = logging.getLogger()
    monkeypatch.setattr(root, "handlers", [])
    monkeypatch.setattr(root, "level", root.level)
    setup_logging(tmp_path)
    try:
        streams = [h.stream for h in root.handlers if type(h) is logging.StreamHandler]
        assert streams == [sys.stderr]
        assert (tmp_path / "logs" / "latent_feature_clustering.log").exists()
    finally:
        for handler in root.handlers:
            handler.close()


def test_stdout_holds_only_the_summary(output_root, embedding_csv, capsys):
    assert main(["evaluate", "--embedding", str(embedding_csv)]) == 0
    assert json.loads(capsys.readouterr().out)["n"] == 4
