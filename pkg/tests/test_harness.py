import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from galspec.galerkin import decompose, evaluate_eigenfunction
from galspec.ground_truth import sample_two_moons, sphere_spectrum
from galspec.harness import (ExperimentConfig, ResultRecord,
                             best_per_repetition, default_kernel_grid,
                             default_p_grid, export_eigenfunction_grid,
                             galerkin_error, graph_calibrated_inverses,
                             run_experiment, summarize, time_scaling_report,
                             write_records, write_table)
from galspec.kernels import KernelSpec

GAUSS1 = KernelSpec(family="gauss", sigma=1.0)


def _tiny_config(**overrides):
    kwargs = dict(task="galerkin_sphere", n=120, d=3, k=5,
                  kernel_grid=(KernelSpec(family="poly", degree=2),),
                  p_grid=(12,), base_seed=3)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


def test_config_validation():
    with pytest.raises(ValueError, match="task"):
        ExperimentConfig(task="no_such_task")
    with pytest.raises(ValueError, match="sampler"):
        ExperimentConfig(task="galerkin_sphere", sampler="cube")
    with pytest.raises(ValueError, match="largest p"):
        ExperimentConfig(task="galerkin_sphere", n=10, p_grid=(20,))
    with pytest.raises(ValueError):
        _tiny_config(k=0)
    with pytest.raises(ValueError):
        _tiny_config(repetitions=0)


def test_default_grids():
    assert default_p_grid(1000) == (30, 72, 173, 416, 1000)
    assert default_p_grid(100) == (30, 72)
    assert default_p_grid(10) == (4,)
    kernels = default_kernel_grid()
    assert len(kernels) == 15
    assert sum(k.family == "poly" for k in kernels) == 5
    config = ExperimentConfig(task="galerkin_sphere", n=1000)
    assert config.kernel_grid == kernels
    assert config.p_grid == (30, 72, 173, 416, 1000)
    assert config.alpha_grid == ()
    graph = ExperimentConfig(task="graph_sphere", n=1000)
    assert len(graph.alpha_grid) == 6
    assert graph.alpha_grid[-1] is None


def test_config_json_round_trip():
    config = ExperimentConfig(task="graph_sphere", n=500, d=4, noise=0.1,
                              k=9, repetitions=2, base_seed=11)
    back = ExperimentConfig.from_json(json.loads(json.dumps(config.to_json())))
    assert back == config


def test_single_run_record_stream():
    records = run_experiment(_tiny_config())
    assert len(records) == 2
    run, summary = records
    assert run.kind == "run" and run.status == "ok"
    assert run.run_index == 0 and run.rep == 0 and run.seed == 3
    assert run.p == 12 and run.alpha is None
    assert run.kernel == {"family": "poly", "degree": 2,
                          "offset": 1.0, "scale": 1.0}
    assert run.error is not None and run.error >= 0.0
    assert len(run.eigenvalues) == 5
    assert run.ortho_defect is not None and run.ortho_defect >= 0.0
    assert run.wall_time > 0.0
    assert summary.kind == "summary" and summary.status == "ok"
    assert summary.error == run.error
    assert summary.extra == {"n_runs": 1, "n_failed": 0, "best_run_index": 0}


def test_runs_are_deterministic_given_base_seed():
    config = _tiny_config(kernel_grid=(GAUSS1,
                                       KernelSpec(family="poly", degree=2)),
                          repetitions=2)
    first = run_experiment(config)
    second = run_experiment(config)
    assert [r.seed for r in first[:-1]] == [3, 4, 5, 6]
    assert [r.rep for r in first[:-1]] == [0, 0, 1, 1]
    assert [r.run_index for r in first[:-1]] == [0, 1, 2, 3]
    for a, b in zip(first, second):
        assert a.error == b.error
        assert a.eigenvalues == b.eigenvalues
        assert a.ortho_defect == b.ortho_defect


def test_failed_runs_become_error_records():
    # negative bandwidth passes config validation but fails inside the run
    config = ExperimentConfig(task="graph_sphere", n=60, d=3, k=5,
                              kernel_grid=(GAUSS1,), p_grid=(10,),
                              alpha_grid=(1.0, -1.0))
    records = run_experiment(config)
    assert len(records) == 3
    ok = [r for r in records[:-1] if r.status == "ok"]
    bad = [r for r in records[:-1] if r.status == "error"]
    assert len(ok) == 1 and len(bad) == 1
    assert "ValueError" in bad[0].message
    summary = records[-1]
    assert summary.status == "ok"
    assert summary.extra["n_failed"] == 1
    assert summary.alpha == 1.0


def test_oversized_graph_run_fails_cleanly():
    config = ExperimentConfig(task="graph_sphere", n=20001, d=3, k=5,
                              kernel_grid=(GAUSS1,), p_grid=(10,),
                              alpha_grid=(1.0,))
    records = run_experiment(config)
    assert records[0].status == "error"
    assert "memory" in records[0].message
    assert records[-1].kind == "summary"
    assert records[-1].status == "error"


def test_hermite_task_scores_without_ground_truth():
    config = ExperimentConfig(task="hermite_demo", sampler="gaussian", n=80,
                              d=2, k=3,
                              kernel_grid=(KernelSpec(family="gauss", sigma=2.0),),
                              p_grid=(16,))
    records = run_experiment(config)
    run = records[0]
    assert run.status == "ok"
    assert run.error is not None and run.error >= 0.0
    assert run.eigenvalues == ()
    assert run.ortho_defect is None
    assert "rmse_plain" in run.to_json()
    assert records[-1].status == "ok"


def test_summarize_takes_minimum():
    config = _tiny_config()
    echo = {"task": "x"}

    def rec(idx, err, status="ok"):
        return ResultRecord(kind="run", config=echo, run_index=idx, rep=0,
                            error=err, status=status)

    records = [rec(0, 0.5), rec(1, 0.2), rec(2, 0.9),
               rec(3, 0.01, status="error")]
    summary = summarize(config, records)
    assert summary.error == 0.2
    assert summary.extra["best_run_index"] == 1
    assert summary.extra["n_runs"] == 4
    assert summary.extra["n_failed"] == 1


def test_best_per_repetition():
    echo = {}

    def rec(rep, err):
        return ResultRecord(kind="run", config=echo, rep=rep, error=err)

    records = [rec(0, 0.5), rec(0, 0.3), rec(1, 0.8),
               rec(1, 0.9), rec(2, 0.1),
               ResultRecord(kind="summary", config=echo, error=0.0)]
    assert best_per_repetition(records) == [0.3, 0.8, 0.1]


class _Estimate:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)


def test_galerkin_error_drops_constant_mode():
    truth = sphere_spectrum(3, 5)
    est = _Estimate([1e-12, 2.0, 2.0, 2.0, 6.0, 6.0])
    assert galerkin_error(est, truth, 5) == pytest.approx(0.0, abs=1e-12)


def test_graph_calibration_is_scale_free():
    truth = sphere_spectrum(3, 5)
    scaled = 0.01 * np.array([0.0, 2.0, 2.0, 2.0, 6.0, 6.0])
    inverses = graph_calibrated_inverses(scaled, truth, 5)
    assert_allclose(inverses, [0.5, 0.5, 0.5, 1 / 6, 1 / 6], rtol=1e-12)


def test_graph_calibration_second_pass_repairs_scale():
    # the junk 0.5 mode distorts the first rescale; once it is dropped the
    # second pass pins the surviving sum back to the true value
    truth = sphere_spectrum(3, 3)
    inverses = graph_calibrated_inverses([0.5, 4.0, 4.0, 4.0], truth, 3)
    assert_allclose(inverses, [0.5, 0.5, 0.5], rtol=1e-12)


def test_graph_calibration_empty_spectrum():
    truth = sphere_spectrum(3, 3)
    assert_allclose(graph_calibrated_inverses([0.0, 0.0], truth, 3),
                    np.zeros(3))


def _planar_estimate():
    data = sample_two_moons(60, 0.05, seed=2)
    return decompose(data, GAUSS1, p=10, seed=2)


def test_export_grid_matches_pointwise_evaluation():
    est = _planar_estimate()
    header, table = export_eigenfunction_grid(est, [0, 2], (-1.0, -0.5),
                                              (2.0, 1.0), 3)
    assert header == ["x1", "x2", "f_0", "f_2"]
    assert table.shape == (9, 4)
    assert_allclose(np.unique(table[:, 0]), [-1.0, 0.5, 2.0])
    assert table[0, 0] == table[2, 0]  # first axis varies slowest
    for row in table:
        assert row[2] == pytest.approx(
            evaluate_eigenfunction(est, 0, row[:2]), rel=1e-12, abs=1e-15)
        assert row[3] == pytest.approx(
            evaluate_eigenfunction(est, 2, row[:2]), rel=1e-12, abs=1e-15)


def test_export_grid_single_cell_and_errors():
    est = _planar_estimate()
    header, table = export_eigenfunction_grid(est, [1], (0.0, 0.0),
                                              (1.0, 1.0), 1)
    assert table.shape == (1, 3)
    assert_allclose(table[0, :2], [0.0, 0.0])
    with pytest.raises(ValueError, match="d=2"):
        sphere_est = decompose(np.random.default_rng(0).normal(size=(30, 3)),
                               GAUSS1, p=5, seed=0)
        export_eigenfunction_grid(sphere_est, [0], (0, 0), (1, 1), 2)
    with pytest.raises(ValueError):
        export_eigenfunction_grid(est, [0], (0, 0), (1, 1), 0)


def test_write_records_jsonl(tmp_path):
    records = run_experiment(_tiny_config())
    path = tmp_path / "records.jsonl"
    write_records(path, records, fmt="jsonl")
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 2
    run = json.loads(lines[0])
    assert run["kind"] == "run"
    assert run["kernel"]["family"] == "poly"
    assert len(run["eigenvalues"]) == 5
    summary = json.loads(lines[1])
    assert summary["kind"] == "summary"
    assert summary["n_runs"] == 1


def test_write_records_csv(tmp_path):
    records = run_experiment(_tiny_config())
    path = tmp_path / "records.csv"
    write_records(path, records, fmt="csv")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0][0] == "kind"
    assert rows[1][0] == "run"
    eig_col = rows[0].index("eigenvalues")
    parsed = [float(v) for v in rows[1][eig_col].split(";")]
    assert parsed == pytest.approx(list(records[0].eigenvalues))
    with pytest.raises(ValueError):
        write_records(path, records, fmt="xml")


def test_write_table_round_trip(tmp_path):
    header = ["a", "b"]
    table = np.array([[1.5, -2.25], [0.125, 3.0]])
    path = tmp_path / "table.csv"
    write_table(path, header, table)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == header
    back = np.array([[float(v) for v in row] for row in rows[1:]])
    assert_allclose(back, table, rtol=0)


def test_time_scaling_report_single_cell():
    header, table = time_scaling_report(GAUSS1, 8, [60], [3])
    assert header == ["n", "d", "seconds"]
    assert table.shape == (1, 3)
    assert table[0, 0] == 60 and table[0, 1] == 3
    assert table[0, 2] > 0.0


def test_worker_count_env_override(monkeypatch):
    from galspec.harness import _worker_count
    monkeypatch.setenv("GALERKIN_THREADS", "1")
    assert _worker_count(5) == 1
    monkeypatch.setenv("GALERKIN_THREADS", "4")
    assert _worker_count(2) == 2
    monkeypatch.delenv("GALERKIN_THREADS")
    assert _worker_count(3) >= 1
