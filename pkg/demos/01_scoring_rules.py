# Build proper scoring rules from convex entropies and score some forecasts.
#
# Every rule here comes from one recipe: take a convex entropy, take its
# subgradient, and tilt it so the expected self-score reproduces the entropy.
# Reporting the truth then maximises the expected score, and the expected
# shortfall of a wrong report is the score divergence.

from entroscore import (
    MeasureSpace,
    catalog_entropy,
    expected_score,
    make_psr,
    score_divergence,
    verify_propriety,
)

space = MeasureSpace([1.0, 1.0, 1.0])
truth = space.density([0.5, 0.3, 0.2])
forecasts = {
    "honest": space.density([0.5, 0.3, 0.2]),
    "hedged": space.density([0.4, 0.35, 0.25]),
    "overconfident": space.density([0.9, 0.05, 0.05]),
}

print("expected score under the true density (higher is better)")
for name in ("quadratic", "spherical", "shannon"):
    rule = make_psr(catalog_entropy(name, space))
    row = {label: expected_score(rule, truth, q) for label, q in forecasts.items()}
    best = max(row, key=row.get)
    print(f"  {name:>10}: " + "  ".join(f"{k}={v:+.4f}" for k, v in row.items()) + f"  -> best: {best}")

# The divergence is the expected penalty for the wrong report; for the
# logarithmic rule it is the Kullback-Leibler divergence.
shannon = make_psr(catalog_entropy("shannon", space))
print("\nKullback-Leibler penalties against the honest forecast")
for label, q in forecasts.items():
    print(f"  D(truth, {label:>13}) = {score_divergence(shannon, truth, q):.6f}")

# Propriety is not an accident of these examples; the sampled check hunts
# for a counterexample pair and reports the worst margin it found.
report = verify_propriety(make_psr(catalog_entropy("quadratic", space)), seed=0, samples=2000)
print(f"\npropriety check: {report.samples} pairs, min margin {report.min_margin:.3e}, "
      f"pass={report.passed}")
