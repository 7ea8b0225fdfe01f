"""Self-consistency checks comparing independently derived forms of the model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ClosureViolation, ReductionLeak
from .hamiltonians import PhysicalParams, build_liouvillian
from .integrator import integrate
from .observable_ode import (
    VARIABLES3,
    VARIABLES9,
    CoefficientMatrix3,
    CoefficientMatrix9,
    analytic_coefficients3,
    analytic_coefficients9,
    conserved_weights,
    mismatched_entries,
    project_generator,
    reduce_to_locked,
)

COEFFICIENT_RTOL = 1e-10
ENGINE_ATOL = 1e-8


def random_params(rng: np.random.Generator, limit: float = 0.1) -> PhysicalParams:
    """Random on-resonance params with ``|omega| * tau_c < limit``.

    ``tau_c`` is log-uniform on [1e-7, 1e-5] s; ``omega_d`` gets a random sign.
    """
    tau_c = 10 ** rng.uniform(-7, -5)
    w1 = rng.uniform(1e-3, 1.0) * limit / tau_c
    wd = rng.uniform(1e-3, 1.0) * limit / tau_c * rng.choice([-1.0, 1.0])
    return PhysicalParams(omega1=w1, omega_d=wd, tau_c=tau_c)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _describe(bad, names, params) -> str:
    r, c, got, want = bad[0]
    return (
        f"{len(bad)} entries differ, first ({names[r]} row, {names[c]} col): "
        f"projected {got:.17g} vs closed form {want:.17g} at "
        f"omega1={params.omega1:.6g}, omega_d={params.omega_d:.6g}, tau_c={params.tau_c:.6g}"
    )


def run_checks(
    trials: int = 100,
    seed: int = 0,
    closed_form: Callable[[PhysicalParams], CoefficientMatrix9] = analytic_coefficients9,
    reduced_closed_form: Callable[[PhysicalParams], CoefficientMatrix3] = analytic_coefficients3,
    engine_check: bool = True,
) -> list[CheckResult]:
    """Run the coefficient, conservation and engine-equivalence checks.

    ``closed_form`` and ``reduced_closed_form`` are injectable so that a
    deliberately corrupted matrix can be shown to fail.
    """
    rng = np.random.default_rng(seed)
    failures = {k: "" for k in ("coefficients9", "coefficients3", "closure", "conservation", "conserved_Q")}

    def fail(key, msg):
        if not failures[key]:
            failures[key] = msg

    for _ in range(trials):
        params = random_params(rng)
        expected9 = closed_form(params).matrix
        try:
            projected = project_generator(build_liouvillian(params))
            reduced = reduce_to_locked(projected)
        except (ClosureViolation, ReductionLeak) as exc:
            fail("closure", f"{type(exc).__name__}: {exc}")
            continue
        bad = mismatched_entries(projected.matrix, expected9, COEFFICIENT_RTOL)
        if bad:
            fail("coefficients9", _describe(bad, VARIABLES9, params))
        bad = mismatched_entries(reduced.matrix, reduced_closed_form(params).matrix, COEFFICIENT_RTOL)
        if bad:
            fail("coefficients3", _describe(bad, VARIABLES3, params))

        scale = np.abs(expected9).max()
        mxx = np.abs(expected9[VARIABLES9.index("Mxx")]).max()
        pair = np.abs(expected9[VARIABLES9.index("Mzz")] + expected9[VARIABLES9.index("Myy")]).max()
        if mxx > 1e-12 * scale or pair > 1e-12 * scale:
            fail("conservation", f"Mxx row {mxx:.3e}, Mzz+Myy rows {pair:.3e}")
        leftover = np.abs(conserved_weights(params) @ reduced.matrix).max()
        if leftover > 1e-12 * np.abs(reduced.matrix).max():
            fail("conserved_Q", f"left null vector residue {leftover:.3e}")

    results = [CheckResult(k, not v, v) for k, v in failures.items()]
    if engine_check:
        results.append(engine_equivalence_check())
    return results


def engine_equivalence_check(t_end: float = 1e-3, dt: float = 1e-7) -> CheckResult:
    """Density-matrix and observable engines at the fig2 locking parameters."""
    params = PhysicalParams(omega1=2 * np.pi * 2000, omega_d=2 * np.pi * 5000, tau_c=1e-6)
    a = integrate("density", params, t_end=t_end, dt=dt)
    b = integrate("observable9", params, t_end=t_end, dt=dt)
    diff = float(np.abs(a.values - b.values).max())
    ok = diff <= ENGINE_ATOL
    return CheckResult("engine_equivalence", ok, "" if ok else f"max |diff| = {diff:.3e}")


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        line = f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}"
        if r.detail:
            line += f"  {r.detail}"
        lines.append(line)
    return "\n".join(lines)
