"""
Evolving the coupled system and measuring slice energies
========================================================

Small localized data at t = 2, a null quadratic form coupling the wave
equation to the Klein-Gordon equation, and the energies of u and v on
the curves F_s split into hyperbolic, transition and flat parts.
"""
import time

import numpy as np

from combfol import ModelParams, RunConfig, high_order_energy, run
from combfol.energy import energy_identity_residual

params = ModelParams(epsilon=1e-3)
config = RunConfig(params=params, dx=0.02)

t0 = time.perf_counter()
record = run(config)
print(f"evolved to t={record.t_end:.3f} on {record.x.size} points in {time.perf_counter() - t0:.2f} s "
      f"(halfwidth {record.halfwidth:.2f}, support {record.support:.2f})")

print("\n  s      EH(u)       EE(u)       EH(v)       EE(v)")
for s in config.s_list:
    eu = high_order_energy(record.u, s, 1, params.gamma, 0.0)
    ev = high_order_energy(record.v, s, 1, params.gamma, params.c)
    print(f"{s:4.1f}  {eu.EH:.4e}  {eu.EE:.4e}  {ev.EH:.4e}  {ev.EE:.4e}")

# both sides of the exterior identity, with the weight dissipation
res = energy_identity_residual(record.u, record.fu, 2.0, 4.0, "Exterior", params.gamma, 0.0)
print(f"\nexterior identity on [2, 4]: lhs {res.lhs:.6e}, rhs {res.rhs:.6e}, "
      f"dissipation {res.dissipation:.3e}, relative residual {res.residual:.2e}")

# the same identity on the interior, where the cone flux enters
res = energy_identity_residual(record.v, record.fv, 2.0, 4.0, "Interior", params.gamma, params.c)
print(f"interior identity on [2, 4]: cone flux {res.cone:.4e}, relative residual {res.residual:.2e}")

peak = np.max(np.abs(record.V), axis=1)
for t in (2.0, 4.0, 6.0, 8.0):
    print(f"sup |v| at t={t:g}: {peak[record.level(t)]:.4e}")
