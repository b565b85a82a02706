# When does an entropy pin down its scoring rule uniquely?
#
# At a boundary point a convex function has a whole fan of subgradients; in
# the interior it has one.  The simplex has empty interior inside the full
# space, so "interior" is replaced by the quasi-interior: points whose
# two-sided feasible directions see every dual vector (trivial annihilator,
# taken relative to the affine hull).  The probe below verifies candidate
# subgradients by sampled supporting-hyperplane and derivative tests.

import numpy as np

from entroscore import (
    ConvexDomainSpec,
    MeasureSpace,
    annihilator_basis,
    catalog_entropy,
    is_quasi_interior,
    lineality_space,
    subdifferential_probe,
)

space = MeasureSpace([1.0, 1.0])
orthant = ConvexDomainSpec.nonnegative_orthant(space)
entropy = catalog_entropy("quadratic", space)

corner = space.cone([1.0, 0.0])
interior = space.cone([1.0, 1.0])

print("two-sided feasible directions O(q)")
for label, q in (("corner (1,0)", corner), ("interior (1,1)", interior)):
    basis = [b.values for b in lineality_space(orthant, q)]
    print(f"  {label:>15}: dim {len(basis)}, quasi-interior: {is_quasi_interior(orthant, q)}")

print("\nannihilator of span{e1} (dual vectors blind to it):",
      [f.values for f in annihilator_basis([space.cone([1.0, 0.0])])])

# At the corner the subdifferential relative to the orthant is a half-line:
# {(2, t) : t <= 0}.  The probe accepts exactly those candidates and digs up
# a concrete violating point for the others.
candidates = [space.dual([2.0, t]) for t in (-2.0, -1.0, 0.0, 0.1, 1.0)]
result = subdifferential_probe(entropy, orthant, corner, candidates, seed=0)
print("\nprobing candidate subgradients (2, t) at the corner")
for c in result.verified:
    print(f"  t = {c.values[1]:+.1f}: verified")
for r in result.rejected:
    print(f"  t = {r.candidate.values[1]:+.1f}: rejected, witness p = {r.witness.values},"
          f" gap = {r.gap:.2e}")
print("unique subgradient claim at the corner:", result.unique_claim)

result = subdifferential_probe(entropy, orthant, interior, [space.dual([2.0, 2.0])], seed=0)
print("unique subgradient claim at the interior point:", result.unique_claim)

# On the simplex the logarithmic rule's subgradient is unique relative to
# the simplex's affine hull, even though boundary atoms would break it.
simplex = ConvexDomainSpec.simplex(space)
shannon = catalog_entropy("shannon", space)
center = space.density([0.5, 0.5])
result = subdifferential_probe(
    shannon, simplex, center, [space.dual(np.log(center.values) + 1.0)], seed=0
)
print("\nlog rule on the simplex: verified =", len(result.verified),
      "unique (relative to the hull):", result.unique_claim)
