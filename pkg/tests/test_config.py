import numpy as np
import pytest

from sptk.config import parse_config
from sptk.errors import ConfigError, NotHurwitzError


def test_scalar_minimal():
    cfg = parse_config({"system": {"builder": "scalar"}})
    assert cfg.Q1 is None and cfg.simulation is None and cfg.sweep is None


def test_nulls_mean_defaults():
    cfg = parse_config({
        "system": {"builder": "heat1d", "modes": 4, "diffusion": None, "A2": None},
        "certificate": {"Q1": None, "Q2": None},
        "simulation": {"eps": 0.1, "t_final": None, "dt": None, "z0": None, "w0": None},
        "sweep": {"eps_values": [0.1, 0.05, 0.02], "mode": None, "ic_scale": None},
    })
    assert cfg.system.A2.tolist() == [[-2.0]]
    assert cfg.Q1 is None and cfg.simulation.z0 is None
    assert cfg.sweep.mode == "tikhonov_error" and cfg.sweep.ic_scale == 1.0


def test_explicit_system():
    cfg = parse_config({"system": {"builder": "explicit", "A1": [[-1.0]], "B1": [[1.0]],
                                   "C1": [[1.0]], "A2": [[0.5]], "B2": [[1.0]],
                                   "C2": [[1.0]]}})
    np.testing.assert_array_equal(cfg.system.A2, [[0.5]])


@pytest.mark.parametrize("raw", [
    [],
    {},
    {"system": {"builder": "heat1d", "modes": 0}},
    {"system": {"builder": "heat1d", "modes": 4, "input_profile": "saw"}},
    {"system": {"builder": "explicit", "A1": [[-1.0]]}},
    {"system": {"builder": "scalar"}, "certificate": {"Q1": [[1.0, 0.0]]}},
    {"system": {"builder": "scalar"}, "simulation": {"t_final": 1.0}},
    {"system": {"builder": "scalar"}, "simulation": {"eps": -0.1}},
    {"system": {"builder": "scalar"}, "simulation": {"eps": 0.1, "t_final": 1.0, "dt": 2.0}},
    {"system": {"builder": "scalar"}, "simulation": {"eps": 0.1, "z0": [1.0, 2.0]}},
    {"system": {"builder": "scalar"}, "sweep": {"eps_values": [0.1, 0.05]}},
    {"system": {"builder": "scalar"}, "sweep": {"eps_values": [0.1, 0.1, 0.05]}},
    {"system": {"builder": "scalar"}, "sweep": {"eps_values": [0.1, 0.05, 0.02], "mode": "x"}},
    {"system": {"builder": "scalar"}, "sweep": {"eps_values": [0.1, "a", 0.02]}},
])
def test_rejects_malformed(raw):
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_unstable_fast_block():
    with pytest.raises(NotHurwitzError):
        parse_config({"system": {"builder": "explicit", "A1": [[1.0]], "B1": [[1.0]],
                                 "C1": [[1.0]], "A2": [[-1.0]], "B2": [[1.0]],
                                 "C2": [[1.0]]}})
