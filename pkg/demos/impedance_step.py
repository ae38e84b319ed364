"""
Impedance control step response
===============================

A point mass pulled to a target by a spring and damper, with damping swept
from light to heavy.
"""

import numpy as np

from seqplan.executor import EEState, ImpedanceParams, rollout

dt, n = 1e-3, 1500
t = dt * np.arange(1, n + 1)
K, m = 100.0, 1.0
critical = 2 * np.sqrt(K * m)

for ratio in (0.2, 0.5, 1.0, 2.0):
    p = ImpedanceParams(K=K, C=ratio * critical, mass=m)
    xs, vs = rollout(p, EEState((0, 0, 0)), (1, 0, 0), dt, n)
    x = xs[:, 0]
    settle = t[np.flatnonzero(np.abs(x - 1) > 0.02)[-1]] if np.any(np.abs(x - 1) > 0.02) else 0.0
    print(f"C = {ratio:.1f} x critical: peak {x.max():.3f}, 2% settling {settle:.3f} s")

# critical damping against its closed form
xs, _ = rollout(ImpedanceParams(K=K, C=critical, mass=m), EEState((0, 0, 0)), (1, 0, 0), 1e-4, 10_000)
tt = 1e-4 * np.arange(1, 10_001)
exact = 1 - (1 + 10 * tt) * np.exp(-10 * tt)
print("max deviation from closed form:", np.abs(xs[:, 0] - exact).max())
