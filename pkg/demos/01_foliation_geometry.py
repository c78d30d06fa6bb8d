"""
Hyperboloids glued to horizontal planes
=======================================

Each curve F_s follows the hyperbola t = sqrt(s^2 + x^2) inside the
shifted light cone, bends over a unit-width transition band and then
continues flat at height T_flat(s). This script tabulates a few curves,
their Jacobians and the inverse map, and plots them when matplotlib is
available.
"""
import numpy as np

from combfol.foliation import RegionTag, T_flat, T_of, build_chart, cone_radius, dT_ds, flat_radius, s_of

# where each curve changes character
for s in (2.0, 3.0, 5.0):
    print(f"s={s:g}: hyperbolic for |x| <= {cone_radius(s):g}, flat beyond {flat_radius(s):g} "
          f"at height {T_flat(s):.6f}")

# the band height is fixed by one quadrature of the cutoff profile
s = 3.0
x = np.linspace(0.0, flat_radius(s) + 2.0, 9)
print("\n   x        T(3, x)     dT/ds")
for xi, ti, ji in zip(x, T_of(s, x), dT_ds(s, x)):
    print(f"{xi:6.3f}  {ti:11.6f}  {ji:9.6f}")

# (t, x) -> s inverts the foliation everywhere above F_2
rng = np.random.default_rng(0)
s_true = rng.uniform(2.0, 10.0, 1000)
x_rand = rng.uniform(-1.0, 1.0, 1000) * 3.0 * s_true**2
err = np.max(np.abs(s_of(T_of(s_true, x_rand), x_rand) - s_true))
print(f"\nround trip s -> (T, x) -> s, 1000 random points: max error {err:.2e}")

chart = build_chart(2.0, np.round(np.arange(-500, 501) * 0.01, 12))
for tag in RegionTag:
    print(f"{tag.value:>13}: {int(chart.mask(tag).sum())} samples")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    xs = np.linspace(-30.0, 30.0, 2001)
    fig, ax = plt.subplots(figsize=(7, 4))
    for s in (2.0, 3.0, 4.0, 5.0, 6.0):
        ax.plot(xs, T_of(s, xs), lw=1.2, label=f"s={s:g}")
    ax.plot(xs, np.abs(xs) + 1.0, "k--", lw=0.8, label="t = |x| + 1")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_ylim(0, 25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("foliation.png", dpi=120)
    print("\nwrote foliation.png")
