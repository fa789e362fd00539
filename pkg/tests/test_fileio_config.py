import json

import numpy as np
import pytest

from pathfield.config import DEFAULTS, load_config
from pathfield.errors import ConfigError, MeshFormatError
from pathfield.fileio import (atomic_write, field_to_csv, field_to_json,
                              path_to_csv, path_to_json,
                              points_from_path_file, values_from_field_file)
from pathfield.paths import TracedPath
from pathfield.solvers import ScalarField


@pytest.fixture
def field():
    return ScalarField(np.array([0.5, 0.0, 1.25]), "kl", 1,
                       {"alpha": 0.5}, 1, 1e-12, ("clamped",))


@pytest.fixture
def traced():
    return TracedPath(np.array([[0.0, 0.0], [1.0, 0.5]]),
                      [("vertex", 0), ("edge", 1, 2, 0.25)], 0, 2, "reached")


def test_field_csv_roundtrip(tmp_path, field):
    out = tmp_path / "f.csv"
    atomic_write(out, field_to_csv(field))
    vals = values_from_field_file(out)
    np.testing.assert_allclose(vals, field.values, atol=0)


def test_field_json_roundtrip(tmp_path, field):
    out = tmp_path / "f.json"
    atomic_write(out, field_to_json(field))
    data = json.loads(out.read_text())
    assert data["kind"] == "kl"
    assert data["target"] == 1
    assert data["sign"] == 1
    assert data["precision_flags"] == ["clamped"]
    np.testing.assert_allclose(values_from_field_file(out), field.values)


def test_path_roundtrips(tmp_path, traced):
    csv = tmp_path / "p.csv"
    atomic_write(csv, path_to_csv(traced))
    np.testing.assert_allclose(points_from_path_file(csv), traced.points)

    js = tmp_path / "p.json"
    atomic_write(js, path_to_json(traced))
    data = json.loads(js.read_text())
    assert data["status"] == "reached"
    assert data["locations"][1] == ["edge", 1, 2, 0.25]
    np.testing.assert_allclose(points_from_path_file(js), traced.points)


def test_bad_headers(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n1,2\n")
    with pytest.raises(MeshFormatError):
        values_from_field_file(bad)
    with pytest.raises(MeshFormatError):
        points_from_path_file(bad)


def test_atomic_write_no_leftovers(tmp_path):
    out = tmp_path / "x.txt"
    atomic_write(out, "hello")
    assert out.read_text() == "hello"
    assert list(tmp_path.glob("*.tmp")) == []


class TestConfig:
    def test_defaults(self):
        assert DEFAULTS.dense_budget == 4000
        assert DEFAULTS.step_cap_factor == 50

    def test_parse(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("# comment\ndense_budget = 123\nthreshold=0.05\n"
                       "step-cap-factor = 9\n")
        s = load_config(cfg)
        assert s.dense_budget == 123
        assert s.threshold == 0.05
        assert s.step_cap_factor == 9
        assert s.contour_levels == DEFAULTS.contour_levels

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("bogus=1\n")
        with pytest.raises(ConfigError):
            load_config(cfg)

    def test_bad_value(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("dense_budget=abc\n")
        with pytest.raises(ConfigError):
            load_config(cfg)

    def test_missing_equals(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("dense_budget\n")
        with pytest.raises(ConfigError):
            load_config(cfg)

    def test_replace_ignores_none(self):
        s = DEFAULTS.replace(threshold=None, trials=3)
        assert s.threshold is DEFAULTS.threshold
        assert s.trials == 3
