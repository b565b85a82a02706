# Extend a scoring rule to unnormalised forecasts.
#
# A rule on densities extends 0-homogeneously to the positive cone: score
# the normalised forecast.  Its entropy extends 1-homogeneously:
# value~(q) = mass(q) * value(q / mass(q)).  The extension is more than
# bookkeeping: the extended rule is exactly a subgradient of the extended
# entropy, and pairing the two reproduces the Euler identity of homogeneous
# functions.

from entroscore import (
    MeasureSpace,
    canonical_extension_value,
    catalog_entropy,
    extended_subgradient,
    make_psr,
    pair,
    verify_euler,
    zero_homog_extend,
)

space = MeasureSpace([1.0, 1.0])
entropy = catalog_entropy("quadratic", space)
rule = make_psr(entropy)

raw_counts = space.cone([30.0, 10.0])  # e.g. unnormalised model output
print("scoring an unnormalised forecast")
print("  S~(30, 10)      =", zero_homog_extend(rule, raw_counts).values)
print("  S~(3, 1)        =", zero_homog_extend(rule, space.cone([3.0, 1.0])).values)
print("  (scale never matters: both equal S(0.75, 0.25))")

value = canonical_extension_value(entropy, raw_counts)
print("\n1-homogeneous extension")
print(f"  value~(30, 10)  = {value:.6f}")
print(f"  value~(3, 1)    = {canonical_extension_value(entropy, space.cone([3.0, 1.0])):.6f}")

# Euler identity: pairing a cone point against its extended score gives the
# extended entropy back, exactly.
gap = pair(raw_counts, extended_subgradient(entropy, raw_counts)) - value
print(f"\nEuler identity gap at (30, 10): {gap:.3e}")

report = verify_euler(rule, entropy, seed=0, samples=2000)
print(f"sampled Euler check: max relative defect {report.max_defect:.3e}, pass={report.passed}")

# For 1-homogeneous entropies (spherical, pseudospherical) the rule IS the
# subgradient with no correction term, so it is already 0-homogeneous.
spherical = catalog_entropy("spherical", space)
print("\nspherical subgradient at (3, 4):", spherical.subgradient(space.cone([3.0, 4.0])).values)
