import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from galspec import storage
from galspec.cli import main
from galspec.galerkin import load_estimate
from galspec.ground_truth import sample_two_moons
from galspec.hermite import HermiteProblem, load_model, save_problem_csv

GAUSS = '{"family":"gauss","sigma":1.0}'


def test_usage_error_exits_one(capsys):
    assert main(["decompose"]) == 1
    assert "error" in capsys.readouterr().err


def test_unknown_command_exits_one():
    assert main(["no-such-command"]) == 1


def test_bad_kernel_json_exits_one(capsys):
    code = main(["decompose", "--data", "sampler:sphere", "--n", "50",
                 "--kernel", "{not json"])
    assert code == 1
    assert "kernel" in capsys.readouterr().err


def test_unknown_sampler_exits_one(capsys):
    code = main(["decompose", "--data", "sampler:torus", "--n", "50",
                 "--kernel", GAUSS])
    assert code == 1
    assert "torus" in capsys.readouterr().err


def test_missing_dataset_exits_one(tmp_path, capsys):
    code = main(["decompose", "--data", str(tmp_path / "nope.csv"),
                 "--kernel", GAUSS])
    assert code == 1
    assert "cannot read" in capsys.readouterr().err


def test_runtime_failure_exits_two(tmp_path, capsys):
    # a valid dataset of identical rows makes the mass matrix singular at
    # epsilon = 0, which is an execution failure rather than a flag error
    path = tmp_path / "flat.csv"
    storage.save_dataset_csv(path, np.zeros((40, 2)))
    code = main(["decompose", "--data", str(path), "--kernel", GAUSS,
                 "--p", "10", "--epsilon", "0"])
    assert code == 2
    assert "runtime error" in capsys.readouterr().err


def test_decompose_prints_and_saves(tmp_path, capsys):
    out = tmp_path / "estimate.bin"
    code = main(["decompose", "--data", "sampler:sphere", "--n", "200",
                 "--d", "3", "--kernel", '{"family":"poly","degree":2}',
                 "--p", "14", "--k", "6", "--seed", "1",
                 "--out", str(out)])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0].startswith("eigenvalues")
    values = [float(tok) for tok in lines[1].split()]
    assert len(values) == 6
    assert values == sorted(values)
    est = load_estimate(out)
    # stdout shows 12 significant digits
    assert_allclose(est.values[:6], values, rtol=1e-10, atol=1e-15)
    assert est.kernel.family == "poly"


def test_decompose_reads_csv_dataset(tmp_path, capsys):
    data = sample_two_moons(80, 0.05, seed=0)
    path = tmp_path / "moons.csv"
    storage.save_dataset_csv(path, data)
    code = main(["decompose", "--data", str(path), "--kernel", GAUSS,
                 "--p", "10", "--k", "4"])
    assert code == 0
    assert "eigenvalues" in capsys.readouterr().out


def test_graph_baseline_with_and_without_alpha(tmp_path, capsys):
    args = ["graph-baseline", "--data", "sampler:sphere", "--n", "100",
            "--kernel", GAUSS, "--p", "10", "--k", "4"]
    assert main(args + ["--alpha", "1.0"]) == 0
    assert main(args) == 0
    out = capsys.readouterr().out
    assert out.count("eigenvalues") == 2
    assert main(args + ["--alpha", "zero"]) == 1


def test_hermite_fit_and_model_output(tmp_path, capsys):
    rng = np.random.default_rng(5)
    data = rng.normal(size=(40, 2))
    problem = HermiteProblem(data=data, values=np.ones(40),
                             gradients=np.zeros((40, 2)))
    problem_path = tmp_path / "problem.csv"
    save_problem_csv(problem_path, problem)
    model_path = tmp_path / "model.json"
    code = main(["hermite", "--data", str(problem_path), "--kernel", GAUSS,
                 "--p", "10", "--out", str(model_path)])
    assert code == 0
    assert "RMSE" in capsys.readouterr().out
    model = load_model(model_path)
    assert model.alpha.shape == (10,)
    assert model.kernel.family == "gauss"


def test_hermite_rejects_bad_problem_file(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n")
    code = main(["hermite", "--data", str(path), "--kernel", GAUSS,
                 "--p", "2"])
    assert code == 1


def test_sweep_quick_flags_to_file(tmp_path):
    out = tmp_path / "records.jsonl"
    code = main(["sweep", "--task", "hermite_demo", "--data",
                 "sampler:gaussian", "--n", "60", "--d", "2", "--k", "3",
                 "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    rows = [json.loads(line) for line in lines]
    assert rows[-1]["kind"] == "summary"
    assert rows[-1]["status"] == "ok"
    # 15 default kernels x 1 default landmark count (only 30 fits n=60)
    assert rows[-1]["n_runs"] == 15


def test_sweep_config_file(tmp_path, capsys):
    config = {"task": "galerkin_sphere", "n": 100, "d": 3, "k": 4,
              "kernel_grid": [{"family": "poly", "degree": 2}],
              "p_grid": [10], "base_seed": 7}
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    code = main(["sweep", "--config", str(config_path)])
    assert code == 0
    captured = capsys.readouterr()
    rows = [json.loads(line) for line in captured.out.strip().split("\n")]
    assert len(rows) == 2
    assert rows[0]["seed"] == 7
    assert "best-over-grid error" in captured.err


def test_sweep_bad_config_exits_one(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"task": "bogus"}')
    assert main(["sweep", "--config", str(config_path)]) == 1


def test_sweep_all_runs_failing_exits_two(tmp_path):
    out = tmp_path / "records.jsonl"
    config = {"task": "graph_sphere", "n": 60, "d": 3, "k": 4,
              "kernel_grid": [{"family": "gauss", "sigma": 1.0}],
              "p_grid": [8], "alpha_grid": [-1.0]}
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    code = main(["sweep", "--config", str(config_path), "--out", str(out)])
    assert code == 2
    rows = [json.loads(line) for line in out.read_text().strip().split("\n")]
    assert rows[0]["status"] == "error"
    assert rows[-1]["status"] == "error"


def test_export_grid_writes_table(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["export-grid", "--data", "sampler:two_moons", "--n", "80",
                 "--noise", "0.05", "--kernel", GAUSS, "--p", "10",
                 "--indices", "0,1", "--resolution", "4",
                 "--grid-min=-1.5,-1.0", "--grid-max", "2.5,1.5",
                 "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "x1,x2,f_0,f_1"
    assert len(lines) == 1 + 16


def test_export_grid_rejects_sphere_data(capsys):
    code = main(["export-grid", "--data", "sampler:sphere", "--n", "50",
                 "--d", "3", "--kernel", GAUSS, "--p", "8"])
    assert code == 1
    assert "planar" in capsys.readouterr().err


def test_export_grid_bad_indices(capsys):
    code = main(["export-grid", "--data", "sampler:two_moons", "--n", "50",
                 "--kernel", GAUSS, "--p", "8", "--indices", "a,b"])
    assert code == 1


def test_time_report_prints_rows(tmp_path, capsys):
    out = tmp_path / "timing.csv"
    code = main(["time-report", "--kernel", GAUSS, "--p", "8",
                 "--n-grid", "60", "--d-grid", "3", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "n=60 d=3 seconds=" in printed
    assert out.read_text().startswith("n,d,seconds")


def test_time_report_bad_grid(capsys):
    assert main(["time-report", "--kernel", GAUSS, "--n-grid", "x"]) == 1
