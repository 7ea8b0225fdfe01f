"""
Spin locking under a resonant drive
===================================

A drive along x holds part of the magnetization indefinitely.  The locked
value depends only on the ratio of drive to dipolar strength.
"""

import numpy as np

from spinlock import (
    PhysicalParams,
    analytic_coefficients9,
    integrate,
    reduce_to_locked,
    steady_state_closed_form,
    steady_state_nullspace,
)

TWO_PI = 2 * np.pi
params = PhysicalParams(omega1=TWO_PI * 2000, omega_d=TWO_PI * 5000, tau_c=1e-6)

# The full density-matrix engine and the 9-observable engine agree to roundoff.
rho_run = integrate("density", params, t_end=0.05, dt=1e-7, sample_spacing=1e-5)
obs_run = integrate("observable9", params, t_end=0.05, dt=1e-7, sample_spacing=1e-5)
print(f"max engine difference: {np.abs(rho_run.values - obs_run.values).max():.1e}")

closed = steady_state_closed_form(params)
null = steady_state_nullspace(reduce_to_locked(analytic_coefficients9(params)))
print(f"Mx(50 ms)   = {obs_run.column('Mx')[-1]:.10f}")
print(f"closed form = {closed.mx_ss:.10f}")
print(f"null space  = {null.mx_ss:.10f}")

# The locked state also carries two-spin order W = Mzz - Myy.
print(f"W steady    = {closed.w_ss:.6f}, W(50 ms) = {obs_run.column('W')[-1]:.6f}")

# Q = Mx + 3 omega_d / (2 omega1) W never changes.
q = obs_run.column("Mx") + 3 * params.omega_d / (2 * params.omega1) * obs_run.column("W")
print(f"Q drift     = {np.abs(q - q[0]).max():.1e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    for name in ("Mx", "W", "Mzy"):
        ax.plot(obs_run.times * 1e3, obs_run.column(name), label=name)
    ax.axhline(closed.mx_ss, color="k", lw=0.5, ls="--")
    ax.set_xscale("log")
    ax.set_xlabel("t (ms)")
    ax.legend()
    fig.savefig("spin_locking.png", dpi=120)
except ImportError:
    pass
