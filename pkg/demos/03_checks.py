"""
Executable checks: Sobolev constants, decay rates and the bootstrap ledger
=========================================================================

The analytic estimates are turned into measurements: corpus-wide Sobolev
ratios, a fitted Klein-Gordon decay exponent and the table of bootstrap
bounds on the default small-data run.
"""
from combfol import RunConfig, run
from combfol.verify.bootstrap import bootstrap_monitor
from combfol.verify.decay import decay_probe, free_kg_record
from combfol.verify.sobolev import sobolev_suite

sob = sobolev_suite()
print("Sobolev ratios over a 50-member corpus (dx, dx/2, ceiling):")
for name, c in sob.constants.items():
    print(f"  {name:>10}: {c:.4f}  {sob.refined[name]:.4f}  {sob.ceilings[name]:.4f}")

fit = decay_probe(free_kg_record(), "interior")[0]
print("\nfree Klein-Gordon:", fit.describe())

config = RunConfig()
record = run(config)
ledger = bootstrap_monitor(record, s_values=config.s_list)
print(f"\nbootstrap: C0 = {ledger.C0:.4g}, C1 = {ledger.C1:.4g}, eps = {ledger.epsilon:g}")
print("  row        s    lhs/bound")
for row in ledger.rows:
    if row.s in (2.0, 4.0):
        print(f"  {row.row:<9} {row.s:3.1f}  {row.lhs / row.bound:.3e}")
print("  violations:", len(ledger.violations))
for name, (exp, err, ceiling) in ledger.fits.items():
    print(f"  {name:<9} growth exponent {exp:+.4f} +- {err:.4f} (claimed at most {ceiling:g})")
