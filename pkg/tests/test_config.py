import math

import pytest

from afmprobe import ConfigError
from afmprobe.config import config_hash, load_config, parse_config
from afmprobe.datasets import Dataset, write_csv, write_json
from afmprobe.errors import ProbeError

BASE = """
version = 1

[model]
lattice = "square"
J = 1.0
Kz = 0.01
S = 0.5
field_meV = 1.0

[sweep]
waypoints = [[0.0, 0.0], [3.141592653589793, 0.0]]
points = 5

[output]
directory = "out"
formats = ["csv"]
"""


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadConfig:
    def test_valid(self, tmp_path):
        cfg = load_config(write_config(tmp_path, BASE))
        assert cfg.model.J == 1.0
        assert cfg.model.muB_B == 1.0
        assert cfg.sweep.points == (5,)
        assert cfg.output.formats == ("csv",)

    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(write_config(tmp_path, BASE + "\ntypo = 1\n"))

    def test_unknown_section_key(self, tmp_path):
        bad = BASE.replace("J = 1.0", "J = 1.0\nJJ = 2.0")
        with pytest.raises(ConfigError, match="'JJ'"):
            load_config(write_config(tmp_path, bad))

    def test_field_both_units_rejected(self, tmp_path):
        bad = BASE.replace("field_meV = 1.0", "field_meV = 1.0\nfield_T = 1.0")
        with pytest.raises(ConfigError, match="not both"):
            load_config(write_config(tmp_path, bad))

    def test_field_tesla(self, tmp_path):
        cfg = load_config(write_config(
            tmp_path, BASE.replace("field_meV = 1.0", "field_T = 2.5")))
        assert cfg.model.muB_B == pytest.approx(0.1447, abs=1e-12)

    def test_syntax_error(self, tmp_path):
        with pytest.raises(ConfigError, match="TOML syntax"):
            load_config(write_config(tmp_path, "[model\nJ=1"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.toml")

    def test_bad_version(self, tmp_path):
        with pytest.raises(ConfigError, match="version"):
            load_config(write_config(tmp_path, BASE.replace("version = 1",
                                                            "version = 99")))

    def test_waypoint_dimension_mismatch(self, tmp_path):
        bad = BASE.replace("[[0.0, 0.0], [3.141592653589793, 0.0]]",
                           "[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]")
        with pytest.raises(ConfigError, match="components"):
            load_config(write_config(tmp_path, bad))

    def test_points_too_small(self, tmp_path):
        with pytest.raises(ConfigError, match="points"):
            load_config(write_config(tmp_path, BASE.replace("points = 5",
                                                            "points = 1")))


class TestTransmonSection:
    def test_exactly_one_form(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config({"transmon": {"E_C": 0.25, "E_J": 50.0,
                                       "omega_q": 9.75}})
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config({"transmon": {}})

    def test_ec_ej_pair(self):
        with pytest.raises(ConfigError, match="together"):
            parse_config({"transmon": {"E_C": 0.25}})
        cfg = parse_config({"transmon": {"omega_q": 9.75}})
        assert cfg.transmon.omega_q == 9.75


class TestEntanglementSection:
    def test_r_and_delta_grids_exclusive(self):
        with pytest.raises(ConfigError, match="not both"):
            parse_config({"entanglement": {"r_points": 5, "delta_points": 5}})

    def test_bad_pairs(self):
        with pytest.raises(ConfigError, match="pairs"):
            parse_config({"entanglement": {"pairs": [[0, -1]]}})

    def test_delta_grid(self):
        cfg = parse_config({"entanglement": {"delta_min": 0.5,
                                             "delta_max": 2.0,
                                             "delta_points": 7}})
        assert cfg.entanglement.by_delta


class TestInvertSection:
    def test_phi_literal(self):
        cfg = parse_config({"invert": {"lam": 1.0, "omega_q": 5.0,
                                       "omega_c": 4.0, "phi": "pi"}})
        assert cfg.invert.phi == math.pi
        with pytest.raises(ConfigError, match="phi"):
            parse_config({"invert": {"lam": 1.0, "omega_q": 5.0,
                                     "omega_c": 4.0, "phi": "1.0"}})


class TestConfigHash:
    def test_output_directory_not_semantic(self, tmp_path):
        a = load_config(write_config(tmp_path, BASE, "a.toml"))
        moved = BASE.replace('directory = "out"', 'directory = "elsewhere"')
        b = load_config(write_config(tmp_path, moved, "b.toml"))
        assert config_hash(a) == config_hash(b)

    def test_semantic_change_changes_hash(self, tmp_path):
        a = load_config(write_config(tmp_path, BASE, "a.toml"))
        b = load_config(write_config(tmp_path, BASE.replace("J = 1.0", "J = 1.1"),
                                     "b.toml"))
        assert config_hash(a) != config_hash(b)

    def test_log_base_is_semantic(self, tmp_path):
        a = load_config(write_config(tmp_path, BASE, "a.toml"))
        with_bits = BASE.replace('formats = ["csv"]',
                                 'formats = ["csv"]\nlog_base = "2"')
        b = load_config(write_config(tmp_path, with_bits, "b.toml"))
        assert config_hash(a) != config_hash(b)


class TestDataset:
    def sample(self):
        ds = Dataset(schema="t/1", columns=("x", "y", "stable"),
                     units=("1", "meV", "bool"),
                     provenance={"config_hash": "deadbeef0123"})
        ds.append((1.0, 0.1, True))
        ds.append((2.0, float("nan"), False))
        return ds

    def test_round_trip_floats(self, tmp_path):
        ds = self.sample()
        path = write_csv(ds, tmp_path / "t.csv")
        body = [l for l in open(path) if not l.startswith("#")]
        assert body[0].strip() == "x,y,stable"
        assert body[1].strip() == "1.0,0.1,true"
        assert body[2].strip() == "2.0,nan,false"

    def test_json_nan_as_null(self, tmp_path):
        import json

        ds = self.sample()
        path = write_json(ds, tmp_path / "t.json")
        data = json.load(open(path))
        assert data["rows"][1][1] is None
        assert data["provenance"]["config_hash"] == "deadbeef0123"

    def test_nan_on_clean_row_rejected(self, tmp_path):
        ds = self.sample()
        ds.append((float("nan"), 1.0, True))
        with pytest.raises(ProbeError, match="clean row"):
            write_csv(ds, tmp_path / "bad.csv")

    def test_row_width_guard(self):
        ds = self.sample()
        with pytest.raises(ValueError):
            ds.append((1.0,))

    def test_numpy_scalars_normalised(self):
        import numpy as np

        ds = self.sample()
        ds.append((np.float64(3.0), np.float64(0.5), bool(np.True_)))
        assert ds.rows[-1] == (3.0, 0.5, True)
        assert type(ds.rows[-1][0]) is float
