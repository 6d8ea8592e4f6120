import numpy as np
import pytest
from numpy.testing import assert_allclose

from galspec import storage


def test_array_container_round_trip(tmp_path):
    path = tmp_path / "blob.bin"
    arrays = {
        "values": np.array([1.0, -2.5, 3.25]),
        "mat": np.arange(12, dtype=float).reshape(3, 4),
        "scalarish": np.array([7.0]),
    }
    storage.save_arrays(path, arrays, meta={"kernel": {"family": "gauss"}, "epsilon": 1e-8})
    loaded, meta = storage.load_arrays(path)
    assert set(loaded) == set(arrays)
    for name in arrays:
        assert loaded[name].dtype == np.float64
        assert_allclose(loaded[name], arrays[name], rtol=0, atol=0)
    assert meta["epsilon"] == 1e-8
    assert meta["kernel"]["family"] == "gauss"


def test_container_rejects_wrong_magic(tmp_path):
    path = tmp_path / "not_a_container.bin"
    path.write_bytes(b"bogus bytes here")
    with pytest.raises(ValueError):
        storage.load_arrays(path)


def test_dataset_csv_round_trip(tmp_path):
    path = tmp_path / "data.csv"
    data = np.random.default_rng(0).normal(size=(5, 3))
    storage.save_dataset_csv(path, data)
    back = storage.load_dataset_csv(path)
    assert_allclose(back, data, rtol=1e-15)


def test_dataset_csv_rejects_non_finite(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\nnan,0.5\n")
    with pytest.raises(ValueError):
        storage.load_dataset_csv(path)


def test_load_dataset_sniffs_format(tmp_path):
    data = np.random.default_rng(1).normal(size=(4, 2))
    csv_path = tmp_path / "d.csv"
    bin_path = tmp_path / "d.bin"
    storage.save_dataset_csv(csv_path, data)
    storage.save_arrays(bin_path, {"points": data})
    assert_allclose(storage.load_dataset(csv_path), data, rtol=1e-15)
    assert_allclose(storage.load_dataset(bin_path), data, rtol=0)


def test_load_dataset_container_needs_points(tmp_path):
    path = tmp_path / "other.bin"
    storage.save_arrays(path, {"something": np.ones((2, 2))})
    with pytest.raises(ValueError):
        storage.load_dataset(path)


def test_json_round_trip(tmp_path):
    path = tmp_path / "obj.json"
    obj = {"a": [1, 2, 3], "b": {"c": None}}
    storage.save_json(path, obj)
    assert storage.load_json(path) == obj
