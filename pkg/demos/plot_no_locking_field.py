"""
Free decay of a dipolar pair
============================

Without a drive the transverse magnetization created by a 90 degree pulse
decays to zero through the dipolar coupling alone.
"""

import numpy as np

from spinlock import PhysicalParams, integrate, steady_state_detect

TWO_PI = 2 * np.pi
params = PhysicalParams(omega1=0.0, omega_d=TWO_PI * 5000, tau_c=1e-6)

traj = integrate("observable9", params, t_end=0.05, dt=1e-7, sample_spacing=1e-5)

# Mx oscillates into two-spin order Mzy while the second-order term damps both.
mx, mzy = traj.column("Mx"), traj.column("Mzy")
print(f"Mx(50 ms) = {mx[-1]:.3e}")
print(f"max |Mzz|, |Myy| = {np.abs(traj.column('Mzz')).max():.1e}, {np.abs(traj.column('Myy')).max():.1e}")

found = steady_state_detect(traj, window=5e-3)
if found is not None:
    print(f"flat from t = {found[0] * 1e3:.2f} ms")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.plot(traj.times * 1e3, mx, label="Mx")
    ax.plot(traj.times * 1e3, mzy, label="Mzy")
    ax.set_xlabel("t (ms)")
    ax.set_xscale("log")
    ax.legend()
    fig.savefig("no_locking_field.png", dpi=120)
except ImportError:
    pass
