"""Run configuration: presets, flat key-value files and value parsing.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Frequencies are in rad/s and accept a ``*2pi`` suffix, so ``2000*2pi`` means
``2 pi x 2000`` rad/s.  ``omega1_grid`` is a comma-separated list.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from os import PathLike
from typing import Optional

from .hamiltonians import PhysicalParams
from .integrator import DEFAULT_DT, DEFAULT_RTOL, DEFAULT_SAMPLE_SPACING, ENGINES, METHODS

TWO_PI = 2 * math.pi

DEFAULT_OMEGA_D = TWO_PI * 5000
DEFAULT_TAU_C = 1e-6
DEFAULT_M0 = 1.0
DEFAULT_T_END = 0.05
FIG2_OMEGA1 = TWO_PI * 2000
# brackets the fig2 drive; other grids work equally well
FIG3_OMEGA1_GRID = tuple(TWO_PI * f for f in (500, 1000, 2000, 4000))

PRESETS = ("fig1", "fig2", "fig3")

_FLOAT_KEYS = ("omega1", "omega_d", "tau_c", "m0", "delta_omega", "t_end", "dt", "rtol", "sample_spacing")


@dataclass(frozen=True)
class RunConfig:
    omega1: float = 0.0
    omega_d: float = 0.0
    tau_c: float = DEFAULT_TAU_C
    m0: float = DEFAULT_M0
    delta_omega: float = 0.0
    omega0: Optional[float] = None
    engine: str = "observable9"
    method: str = "rk4"
    t_end: float = DEFAULT_T_END
    dt: float = DEFAULT_DT
    rtol: float = DEFAULT_RTOL
    sample_spacing: float = DEFAULT_SAMPLE_SPACING
    out: Optional[str] = None
    preset: Optional[str] = None
    omega1_grid: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"preset must be one of {PRESETS}, got {self.preset!r}")
        for key in ("t_end", "dt", "rtol", "sample_spacing"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive")

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(
            omega1=self.omega1,
            omega_d=self.omega_d,
            tau_c=self.tau_c,
            m0=self.m0,
            delta_omega=self.delta_omega,
            omega0=self.omega0,
        )

    def grid(self) -> list[PhysicalParams]:
        base = self.params
        if self.omega1_grid is None:
            return [base]
        return [base.replace(omega1=w) for w in self.omega1_grid]


def preset_config(name: str) -> RunConfig:
    """Expand a named preset into a full configuration."""
    common = dict(omega_d=DEFAULT_OMEGA_D, tau_c=DEFAULT_TAU_C, m0=DEFAULT_M0, t_end=DEFAULT_T_END, preset=name)
    if name == "fig1":
        return RunConfig(omega1=0.0, **common)
    if name == "fig2":
        return RunConfig(omega1=FIG2_OMEGA1, **common)
    if name == "fig3":
        return RunConfig(omega1=FIG2_OMEGA1, omega1_grid=FIG3_OMEGA1_GRID, **common)
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")


def parse_number(text: str) -> float:
    """Parse a float, honouring a trailing ``*2pi`` multiplier."""
    s = text.strip().lower().replace(" ", "")
    factor = 1.0
    for suffix in ("*2pi", "*2π"):
        if s.endswith(suffix):
            s, factor = s[: -len(suffix)], TWO_PI
            break
    return float(s) * factor


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _FLOAT_KEYS:
        return parse_number(raw)
    if key == "omega0":
        return None if raw.lower() in ("", "none") else parse_number(raw)
    if key == "omega1_grid":
        if raw.lower() in ("", "none"):
            return None
        return tuple(parse_number(v) for v in raw.split(",") if v.strip())
    if key in ("out", "preset"):
        return None if raw.lower() in ("", "none") else raw
    if key in ("engine", "method"):
        return raw
    raise ValueError(f"unknown config key {key!r}")


def loads(text: str) -> dict:
    """Parse key-value text into a dict of typed overrides."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = _coerce(key, raw)
    return values


def dumps(config: RunConfig) -> str:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            text = "none"
        elif f.name == "omega1_grid":
            text = ", ".join(repr(v) for v in value)
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def build_config(overrides: dict, base: RunConfig | None = None) -> RunConfig:
    """Apply overrides on top of ``base`` (or of the preset named in them)."""
    overrides = dict(overrides)
    if base is None:
        preset = overrides.get("preset")
        base = preset_config(preset) if preset else RunConfig()
    return replace(base, **overrides)


def load(path: str | PathLike, base: RunConfig | None = None) -> RunConfig:
    with open(path) as fh:
        return build_config(loads(fh.read()), base)


def save(config: RunConfig, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(config))


def as_dict(config: RunConfig) -> dict:
    return asdict(config)
