"""End-to-end tests of the command-line interface and its file contracts."""

import json

import numpy as np
import pytest

import extremal as ex
from extremal.cli import main


def argv_from_config(command, config):
    """Rebuild a flag list from a manifest's resolved configuration."""
    argv = [command]
    for key, value in config.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Shared small artifacts: dataset, trained model, train report."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "d.csv"
    model = root / "m.json"
    assert main(["generate", "--n", "300", "--seed", "3", "--out", str(data)]) == 0
    assert main(["train", "--data", str(data), "--out", str(model),
                 "--seed", "5", "--epochs", "120", "--hidden", "16,16"]) == 0
    return root


class TestGenerate:
    def test_row_count_and_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["generate", "--n", "50", "--seed", "42", "--noise-std", "0.05"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 51  # header + rows

    def test_zero_n_is_usage_error(self, tmp_path, capsys):
        assert main(["generate", "--n", "0", "--out", str(tmp_path / "x.csv")]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["frobnicate"]) == 1


class TestTrain:
    def test_reaches_validation_target(self, tmp_path):
        data = tmp_path / "d.csv"
        model = tmp_path / "m.json"
        assert main(["generate", "--n", "600", "--seed", "3", "--out", str(data)]) == 0
        assert main(["train", "--data", str(data), "--out", str(model),
                     "--seed", "7", "--epochs", "300"]) == 0
        loaded = ex.load_model(model)  # passes all load invariants
        assert loaded.input_dim == 4
        report = json.loads((tmp_path / "m.train.json").read_text())
        assert report["validation_mse"] <= 0.01
        assert len(report["loss_history"]) == 300
        assert report["manifest"]["command"] == "train"

    def test_missing_data_file(self, tmp_path, capsys):
        rc = main(["train", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "m.json")])
        assert rc == 3

    def test_zero_epochs_warns_and_keeps_init(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        model = tmp_path / "m.json"
        main(["generate", "--n", "80", "--seed", "1", "--out", str(data)])
        assert main(["train", "--data", str(data), "--out", str(model),
                     "--seed", "9", "--epochs", "0", "--hidden", "8"]) == 0
        assert "epochs 0" in capsys.readouterr().err
        loaded = ex.load_model(model)
        init = ex.init_network([(8, "tanh"), (1, "identity")], 4, seed=9)
        for la, lb in zip(loaded.layers, init.layers):
            np.testing.assert_array_equal(la.weights, lb.weights)

    def test_divergence_exits_2(self, workdir, capsys):
        rc = main(["train", "--data", str(workdir / "d.csv"), "--out", str(workdir / "div.json"),
                   "--optimizer", "sgd", "--learning-rate", "1e9", "--epochs", "50"])
        assert rc == 2
        assert "epoch" in capsys.readouterr().err


class TestExtremize:
    def test_report_shape(self, workdir):
        out = workdir / "r.json"
        rc = main(["extremize", "--model", str(workdir / "m.json"), "--data", str(workdir / "d.csv"),
                   "--restarts", "3", "--seed", "3", "--max-iters", "2000", "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert len(report["x_hat"]) == 4
        assert isinstance(report["y_hat"], float)
        assert isinstance(report["final_loss"], float)
        assert len(report["restarts"]) == 3
        assert report["manifest"]["config"]["restarts"] == 3

    def test_unknown_constraint_type(self, workdir, capsys):
        bad = workdir / "bad_constraints.json"
        bad.write_text(json.dumps({"terms": [{"type": "wormhole"}]}))
        rc = main(["extremize", "--model", str(workdir / "m.json"), "--data", str(workdir / "d.csv"),
                   "--constraints", str(bad), "--out", str(workdir / "x.json")])
        assert rc == 1
        assert "wormhole" in capsys.readouterr().err

    def test_trajectory_iterations_monotone(self, workdir):
        traj = workdir / "traj.csv"
        rc = main(["extremize", "--model", str(workdir / "m.json"), "--data", str(workdir / "d.csv"),
                   "--seed", "4", "--max-iters", "1500", "--out", str(workdir / "t.json"),
                   "--trajectory", str(traj)])
        assert rc == 0
        lines = traj.read_text().splitlines()
        assert lines[0] == "iter,x0,x1,x2,x3,y,loss"
        iters = [int(line.split(",")[0]) for line in lines[1:]]
        assert iters == sorted(iters) and len(set(iters)) == len(iters)

    def test_constraints_file_from_documented_example(self, workdir):
        doc = {"terms": [
            {"type": "extrapolation", "c": 2, "kappa1": 0.5, "stats": "from_data"},
            {"type": "output_positive_max", "kappa2": 10, "kappa_hat": 1},
        ]}
        path = workdir / "constraints.json"
        path.write_text(json.dumps(doc))
        rc = main(["extremize", "--model", str(workdir / "m.json"), "--data", str(workdir / "d.csv"),
                   "--constraints", str(path), "--max-iters", "1000",
                   "--out", str(workdir / "c.json")])
        assert rc == 0

    def test_default_constraints_need_data(self, workdir, capsys):
        rc = main(["extremize", "--model", str(workdir / "m.json"), "--out", str(workdir / "y.json")])
        assert rc == 1

    def test_rerun_from_manifest_reproduces_output(self, workdir):
        out = workdir / "manifested.json"
        argv = ["extremize", "--model", str(workdir / "m.json"), "--data", str(workdir / "d.csv"),
                "--restarts", "2", "--seed", "11", "--max-iters", "800", "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        config = json.loads(out.read_text())["manifest"]["config"]
        out.unlink()
        assert main(argv_from_config("extremize", config)) == 0
        assert out.read_bytes() == first


class TestReproduce:
    def test_quick_profile_passes(self, tmp_path, capsys):
        table = tmp_path / "table.csv"
        rc = main(["reproduce", "--quick", "--seeds", "1", "--out", str(table)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "all bands pass" in printed
        lines = table.read_text().splitlines()
        assert lines[0] == "quantity,reference,reproduced,band_lo,band_hi,status"
        assert len(lines) == 1 + 14  # mu0..3, sigma0..3, xhat0..3, yhat, yhat_true
        assert all(line.endswith(",pass") for line in lines[1:])


class TestPlot:
    def test_five_files_with_model(self, workdir):
        out_dir = workdir / "plots"
        rc = main(["plot", "--data", str(workdir / "d.csv"), "--model", str(workdir / "m.json"),
                   "--out-dir", str(out_dir)])
        assert rc == 0
        files = sorted(p.name for p in out_dir.iterdir())
        assert files == ["feature_x0.svg", "feature_x1.svg", "feature_x2.svg",
                         "feature_x3.svg", "loss_curve.svg"]

    def test_missing_model_warns_and_plots_data_only(self, workdir, capsys):
        out_dir = workdir / "plots_nomodel"
        rc = main(["plot", "--data", str(workdir / "d.csv"), "--model", str(workdir / "ghost.json"),
                   "--out-dir", str(out_dir)])
        assert rc == 0
        assert "warning" in capsys.readouterr().err
        assert len(list(out_dir.iterdir())) == 4

    def test_deterministic_bytes(self, workdir):
        a, b = workdir / "pa", workdir / "pb"
        for target in (a, b):
            assert main(["plot", "--data", str(workdir / "d.csv"), "--model", str(workdir / "m.json"),
                         "--out-dir", str(target)]) == 0
        for name in ("feature_x0.svg", "loss_curve.svg"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestConfigAndEnv:
    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps({"n": 25, "seed": 9}))
        out = tmp_path / "from_config.csv"
        assert main(["generate", "--config", str(cfg), "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 26
        out2 = tmp_path / "override.csv"
        assert main(["generate", "--config", str(cfg), "--n", "10", "--out", str(out2)]) == 0
        assert len(out2.read_text().splitlines()) == 11

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps({"samples": 25}))
        assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 1

    def test_out_dir_env_prefixes_relative_paths(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EXTREMAL_OUT_DIR", str(tmp_path))
        assert main(["generate", "--n", "10", "--seed", "0", "--out", "env.csv"]) == 0
        assert (tmp_path / "env.csv").exists()
