"""
Stronger drives lock faster
===========================

Sweep the drive amplitude and record when Mx first stays within 5% of its
locked value.
"""

import numpy as np

from spinlock import PhysicalParams, sweep

TWO_PI = 2 * np.pi
grid = [PhysicalParams(omega1=TWO_PI * f, omega_d=TWO_PI * 5000, tau_c=1e-6) for f in (500, 1000, 2000, 4000)]

result = sweep(grid, t_end=0.05, dt=1e-7, sample_spacing=1e-6, workers=4)

print(f"{'drive (Hz)':>10} {'Mx locked':>10} {'lock (ms)':>10}")
for pt in result.points:
    print(f"{pt.params.omega1 / TWO_PI:10.0f} {pt.mx_ss_closed:10.4f} {pt.lock_time * 1e3:10.3f}")

# Steady values do not depend on tau_c, but the approach to them does.
slow = sweep([p.replace(tau_c=2e-6) for p in grid], t_end=0.05, dt=1e-7, sample_spacing=1e-6)
print("lock times at tau_c = 2 us (ms):", np.round(slow.lock_times * 1e3, 3))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.plot([p.omega1 / TWO_PI for p in grid], result.lock_times * 1e3, "o-")
    ax.set_xlabel("drive (Hz)")
    ax.set_ylabel("lock time (ms)")
    fig.savefig("lock_time_vs_drive.png", dpi=120)
except ImportError:
    pass
