import math

import pytest

from spinlock import config as cfg


def test_presets():
    fig1 = cfg.preset_config("fig1")
    assert fig1.omega1 == 0.0 and fig1.omega_d == pytest.approx(2 * math.pi * 5000)
    assert fig1.tau_c == 1e-6 and fig1.m0 == 1.0 and fig1.t_end == 0.05
    assert cfg.preset_config("fig2").omega1 == pytest.approx(2 * math.pi * 2000)
    grid = cfg.preset_config("fig3").grid()
    assert [p.omega1 / (2 * math.pi) for p in grid] == pytest.approx([500, 1000, 2000, 4000])
    with pytest.raises(ValueError):
        cfg.preset_config("fig4")


@pytest.mark.parametrize(
    "text,value",
    [("1e-6", 1e-6), ("2000*2pi", 2000 * 2 * math.pi), (" 5 * 2pi ", 10 * math.pi), ("3*2π", 6 * math.pi)],
)
def test_parse_number(text, value):
    assert cfg.parse_number(text) == pytest.approx(value, rel=1e-15)


def test_loads_with_comments():
    text = """
    # locking run
    omega1 = 2000*2pi   # drive
    engine = density
    omega1_grid = 1, 2, 3
    omega0 = none
    """
    values = cfg.loads(text)
    assert values["omega1"] == pytest.approx(4000 * math.pi)
    assert values["engine"] == "density"
    assert values["omega1_grid"] == (1.0, 2.0, 3.0)
    assert values["omega0"] is None


@pytest.mark.parametrize("text", ["omega1 2", "colour = red"])
def test_loads_rejects(text):
    with pytest.raises(ValueError):
        cfg.loads(text)


def test_roundtrip(tmp_path):
    c = cfg.build_config({"preset": "fig3", "engine": "reduced3", "dt": 2e-7, "out": "x.csv"})
    path = tmp_path / "run.cfg"
    cfg.save(c, path)
    assert cfg.load(path) == c
    assert cfg.as_dict(c)["engine"] == "reduced3"


def test_overrides_apply_over_preset():
    c = cfg.build_config({"preset": "fig2", "tau_c": 2e-6})
    assert c.tau_c == 2e-6 and c.omega1 == pytest.approx(2 * math.pi * 2000)


@pytest.mark.parametrize("key,value", [("engine", "euler"), ("method", "bdf"), ("dt", 0.0), ("preset", "x")])
def test_invalid_values(key, value):
    with pytest.raises(ValueError):
        cfg.RunConfig(**{key: value})


PRESET_SNAPSHOT = """\
omega1 = 12566.370614359172
omega_d = 31415.926535897932
tau_c = 1e-06
m0 = 1.0
delta_omega = 0.0
omega0 = none
engine = observable9
method = rk4
t_end = 0.05
dt = 1e-07
rtol = 1e-10
sample_spacing = 1e-05
out = none
preset = fig2
omega1_grid = none
"""


def test_preset_expansion_snapshot():
    assert cfg.dumps(cfg.preset_config("fig2")) == PRESET_SNAPSHOT
    assert cfg.preset_config("fig3") == cfg.preset_config("fig3")
