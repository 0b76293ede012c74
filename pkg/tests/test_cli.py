import json
import os

import pandas as pd
import pytest

from main import EXIT_OK, EXIT_USAGE, build_parser, cmd_dispatch

FAST = ["--epochs", "2", "--retrain-epochs", "1", "--dim", "8", "--batch-size", "64", "--seed", "3"]


@pytest.fixture(scope="module")
def data_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    assert cmd_dispatch(["gen", "--out-dir", str(out), "--seed", "7"]) == EXIT_OK
    return str(out / "synthetic.tsv")


def read(path):
    with open(path, "rb") as f:
        return f.read()


class TestParser:

    def test_every_key_is_a_flag(self):
        args = build_parser().parse_args(["train", "--lr-w", "0.1", "--dense-adam"])
        assert args.lr_w == "0.1"
        assert args.dense_adam == "true"

    def test_unknown_flag(self, capsys):
        assert cmd_dispatch(["train", "--bogus", "1"]) == EXIT_USAGE

    def test_unknown_command(self, capsys):
        assert cmd_dispatch(["explode"]) == EXIT_USAGE


class TestCommands:

    def test_missing_data_is_usage_error(self, tmp_path):
        assert cmd_dispatch(["train", "--out-dir", str(tmp_path)]) == EXIT_USAGE

    def test_bad_config_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("learningrate = 0.1\n", encoding="utf-8")
        assert cmd_dispatch(["train", "--config", str(cfg), "--out-dir", str(tmp_path)]) == EXIT_USAGE

    def test_gen_writes_pairs(self, data_file):
        with open(data_file, encoding="utf-8") as f:
            assert len(f.read().splitlines()) > 500

    def test_auto_artifacts(self, data_file, tmp_path):
        out = tmp_path / "auto"
        code = cmd_dispatch(["auto", "--data", data_file, "--samplers", "rns;pns", "--out-dir", str(out), *FAST])
        assert code == EXIT_OK
        for name in ("history.jsonl", "alpha.json", "checkpoint.npz", "search_checkpoint.npz",
                     "metrics.json", "run.json", "timing.json"):
            assert (out / name).exists(), name
        alpha = json.loads((out / "alpha.json").read_text())
        assert alpha["samplers"] == ["rns", "pns"]
        assert sum(alpha["alpha_star"]) == pytest.approx(1.0)
        assert len((out / "history.jsonl").read_text().splitlines()) == 2

    def test_auto_is_reproducible(self, data_file, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            args = ["auto", "--data", data_file, "--samplers", "rns;pns", "--out-dir", str(d), *FAST]
            assert cmd_dispatch(args) == EXIT_OK
        for name in ("metrics.json", "alpha.json"):
            assert read(dirs[0] / name) == read(dirs[1] / name)

    def test_search_then_retrain_equals_auto(self, data_file, tmp_path):
        common = ["--data", data_file, "--samplers", "rns;pns", *FAST]
        assert cmd_dispatch(["auto", "--out-dir", str(tmp_path / "auto"), *common]) == EXIT_OK
        assert cmd_dispatch(["search", "--out-dir", str(tmp_path / "s"), *common]) == EXIT_OK
        assert cmd_dispatch([
            "retrain", "--out-dir", str(tmp_path / "r"), "--search-dir", str(tmp_path / "s"), *common,
        ]) == EXIT_OK
        assert read(tmp_path / "auto" / "metrics.json") == read(tmp_path / "r" / "metrics.json")
        assert read(tmp_path / "auto" / "alpha.json") == read(tmp_path / "s" / "alpha.json")

    def test_grid_table(self, data_file, tmp_path):
        out = tmp_path / "grid"
        code = cmd_dispatch([
            "grid", "--data", data_file, "--samplers", "rns;pns;dns:c=5", "--out-dir", str(out), *FAST,
        ])
        assert code == EXIT_OK
        table = pd.read_csv(out / "results.csv")
        assert table["sampler"].tolist() == ["rns", "pns", "dns:c=5", "total"]
        assert table["elapsed_ms"].iloc[-1] == pytest.approx(table["elapsed_ms"].iloc[:3].sum(), rel=1e-9)
        space = json.loads((out / "search_space.json").read_text())
        assert len(space["selected"]) == 3

    def test_train_then_eval(self, data_file, tmp_path):
        train_dir = tmp_path / "train"
        assert cmd_dispatch(["train", "--data", data_file, "--out-dir", str(train_dir), *FAST]) == EXIT_OK
        eval_dir = tmp_path / "eval"
        code = cmd_dispatch([
            "eval", "--data", data_file, "--checkpoint", str(train_dir / "checkpoint.npz"),
            "--out-dir", str(eval_dir), "--seed", "3",
        ])
        assert code == EXIT_OK
        trained = json.loads((train_dir / "metrics.json").read_text())
        evaluated = json.loads((eval_dir / "metrics.json").read_text())
        assert evaluated == trained

    def test_split_dir_round_trip(self, data_file, tmp_path):
        assert cmd_dispatch(["split", "--data", data_file, "--out-dir", str(tmp_path), "--seed", "3"]) == EXIT_OK
        split_dir = tmp_path / "split"
        assert os.path.isdir(split_dir)
        out = tmp_path / "from_split"
        assert cmd_dispatch(["train", "--data", str(split_dir), "--out-dir", str(out), *FAST]) == EXIT_OK
        assert (out / "metrics.json").exists()

    def test_retrain_needs_search_dir(self, data_file, tmp_path):
        assert cmd_dispatch(["retrain", "--data", data_file, "--out-dir", str(tmp_path)]) == EXIT_USAGE
