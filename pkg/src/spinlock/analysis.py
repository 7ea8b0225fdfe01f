"""Steady states, locking times and parameter sweeps."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from os import PathLike
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateParams, DuplicateGridPoint, NeverLocks, RankError, SpinlockError
from .hamiltonians import PhysicalParams
from .integrator import (
    DEFAULT_DT,
    DEFAULT_SAMPLE_SPACING,
    InitialCondition,
    Trajectory,
    integrate,
)
from .observable_ode import CoefficientMatrix3, analytic_coefficients9, reduce_to_locked

SOURCES = ("closed_form", "nullspace", "long_time")
RANK_RTOL = 1e-10
LOCK_FRACTION = 0.05

SWEEP_HEADER = (
    "omega1_rad_s",
    "omega_d_rad_s",
    "tau_c_s",
    "mx_ss_closed",
    "mx_ss_numeric",
    "w_ss",
    "lock_time_s",
    "status",
)


@dataclass(frozen=True)
class SteadyState:
    mx_ss: float
    w_ss: float
    mzy_ss: float
    source: str

    def as_array(self) -> np.ndarray:
        return np.array([self.mx_ss, self.w_ss, self.mzy_ss])


def _require_nondegenerate(params: PhysicalParams) -> None:
    if params.omega1 == 0.0 and params.omega_d == 0.0:
        raise DegenerateParams(
            "omega1 = omega_d = 0: nothing relaxes, the steady state is the initial state"
        )


def steady_state_mx(params: PhysicalParams) -> float:
    """Locked magnetization ``m0 omega1^2 / (omega1^2 + 9/16 omega_d^2)``.

    Independent of ``tau_c`` and of the signs of both frequencies.
    """
    _require_nondegenerate(params)
    w1sq, wdsq = params.omega1**2, params.omega_d**2
    return params.m0 * w1sq / (w1sq + 9 / 16 * wdsq)


def steady_state_closed_form(params: PhysicalParams) -> SteadyState:
    """Closed-form steady state of the reduced system.

    On the null direction ``W = 3 omega_d / (8 omega1) Mx``, which written
    over the common denominator stays finite at ``omega1 = 0``.
    """
    _require_nondegenerate(params)
    w1, wd = params.omega1, params.omega_d
    denom = w1**2 + 9 / 16 * wd**2
    return SteadyState(
        mx_ss=params.m0 * w1**2 / denom,
        w_ss=params.m0 * 3 / 8 * wd * w1 / denom,
        mzy_ss=0.0,
        source="closed_form",
    )


def steady_state_nullspace(
    system: CoefficientMatrix3, ic: InitialCondition | None = None
) -> SteadyState:
    """Long-time limit of the 3-variable system from its null space.

    The right null vector ``u`` gives the steady direction and the left null
    vector ``v`` the conserved combination, so the limit from ``x0 =
    (m0, 0, 0)`` is ``u (v . x0) / (v . u)``.  Both come from an SVD with rank
    cutoff ``1e-10`` times the largest singular value.

    Raises
    ------
    RankError
        If the null space is not one-dimensional.
    """
    m0 = ic.m0 if ic is not None else (system.params.m0 if system.params else 1.0)
    x0 = np.array([m0, 0.0, 0.0])
    a = system.matrix
    u_mat, s, vh = np.linalg.svd(a)
    if s[0] == 0.0:
        raise RankError("coefficient matrix is identically zero")
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    if rank != 2:
        raise RankError(f"expected a one-dimensional null space, found dimension {3 - rank}")
    right = vh[-1]
    left = u_mat[:, -1]
    overlap = left @ right
    if abs(overlap) < RANK_RTOL:
        raise RankError("null vectors are orthogonal; the zero eigenvalue is defective")
    x = right * (left @ x0) / overlap
    return SteadyState(mx_ss=float(x[0]), w_ss=float(x[1]), mzy_ss=float(x[2]), source="nullspace")


def steady_state_long_time(
    params: PhysicalParams,
    t_end: float = 0.05,
    engine: str = "observable9",
    **integrate_kwargs,
) -> SteadyState:
    """Final sample of a long integration, reported as a steady state."""
    traj = integrate(engine, params, t_end=t_end, **integrate_kwargs)
    return SteadyState(
        mx_ss=float(traj.column("Mx")[-1]),
        w_ss=float(traj.column("W")[-1]),
        mzy_ss=float(traj.column("Mzy")[-1]),
        source="long_time",
    )


def lock_time(
    traj: Trajectory, fraction: float = LOCK_FRACTION, mx_ss: Optional[float] = None
) -> float:
    """Earliest sample time after which ``|Mx - mx_ss| < fraction * |mx_ss|`` holds for good.

    ``mx_ss`` defaults to :func:`steady_state_mx` of the trajectory's params.

    Raises
    ------
    DegenerateParams
        If the steady value is zero, so no relative band exists.
    NeverLocks
        If the final sample is still outside the band.
    """
    target = steady_state_mx(traj.params) if mx_ss is None else mx_ss
    if target == 0.0:
        raise DegenerateParams("steady-state Mx is zero; lock time is undefined")
    outside = np.abs(traj.column("Mx") - target) >= fraction * abs(target)
    if outside[-1]:
        raise NeverLocks(
            f"Mx not within {fraction:.0%} of {target:.6g} by t = {traj.times[-1]:.6g} s"
        )
    hits = np.flatnonzero(outside)
    return float(traj.times[hits[-1] + 1]) if hits.size else float(traj.times[0])


@dataclass(frozen=True)
class SweepPoint:
    index: int
    params: PhysicalParams
    status: str = "ok"
    mx_ss_closed: float = math.nan
    mx_ss_numeric: float = math.nan
    steady: Optional[SteadyState] = None
    lock_time: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...] = field(repr=False)

    def __len__(self):
        return len(self.points)

    @property
    def lock_times(self) -> np.ndarray:
        return np.array([p.lock_time for p in self.points])

    def to_csv(self, path: str | PathLike) -> None:
        write_sweep_csv(self, path)


def _grid_key(p: PhysicalParams) -> tuple:
    return (p.omega1, p.omega_d, p.tau_c, p.m0, p.delta_omega, p.omega0)


def _sweep_point(index, params, t_end, engine, dt, sample_spacing, fraction) -> SweepPoint:
    values = {}
    try:
        values["mx_ss_closed"] = steady_state_mx(params)
        traj = integrate(engine, params, t_end=t_end, dt=dt, sample_spacing=sample_spacing)
        values["mx_ss_numeric"] = float(traj.column("Mx")[-1])
        values["steady"] = steady_state_nullspace(reduce_to_locked(analytic_coefficients9(params)))
        values["lock_time"] = lock_time(traj, fraction)
    except SpinlockError as exc:
        return SweepPoint(index, params, status=type(exc).__name__, **values)
    return SweepPoint(index, params, **values)


def sweep(
    grid: Sequence[PhysicalParams],
    t_end: float = 0.05,
    engine: str = "observable9",
    dt: float = DEFAULT_DT,
    sample_spacing: float = DEFAULT_SAMPLE_SPACING,
    fraction: float = LOCK_FRACTION,
    workers: int = 1,
) -> SweepResult:
    """Integrate every grid point and collect steady values and lock times.

    Points are independent and may run on ``workers`` threads; results are
    assembled by grid index.  Failures are recorded per point in ``status``
    (the exception class name) and never abort the sweep.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    seen = set()
    for p in grid:
        key = _grid_key(p)
        if key in seen:
            raise DuplicateGridPoint(f"grid point {p} appears more than once")
        seen.add(key)

    def run(i):
        return _sweep_point(i, grid[i], t_end, engine, dt, sample_spacing, fraction)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(zip(range(len(grid)), pool.map(run, range(len(grid)))))
    else:
        results = {i: run(i) for i in range(len(grid))}
    return SweepResult(points=tuple(results[i] for i in range(len(grid))))


def write_sweep_csv(result: SweepResult, path: str | PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for pt in result.points:
            w_ss = pt.steady.w_ss if pt.steady is not None else math.nan
            nums = (
                pt.params.omega1,
                pt.params.omega_d,
                pt.params.tau_c,
                pt.mx_ss_closed,
                pt.mx_ss_numeric,
                w_ss,
                pt.lock_time,
            )
            writer.writerow([f"{v:.17e}" for v in nums] + [pt.status])


def read_sweep_csv(path: str | PathLike) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in SWEEP_HEADER[:-1]:
            row[key] = float(row[key])
    return rows
