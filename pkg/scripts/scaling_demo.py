#!/usr/bin/env python3
"""Scaling-degree estimates for reference distributions and for the engineered shell operator."""

from emtransfer.scaling import (
    DeltaCombination, Homogeneous, ScalingFamily, cancelling_measure, classify_allowed_singularities,
    degree_lower_bounds, engineered_shell_model, estimate_degree, mass_shell_chart, mass_shell_chart_quadratic,
    operator_evaluator, remark_monotonicity_check, shell_point,
)


def main():
    print("distribution                 estimate  exact")
    for m in (1, 2, 3, 4):
        for l in (0, 1):
            t = DeltaCombination(m, ((l, 1.0),))
            print(f"d^{l} delta in {m} variables      {estimate_degree(t.evaluator()).degree:8.3f}  "
                  f"{t.analytic_degree:5.1f}")
    for a in (-0.5, 0.0, 0.5):
        print(f"|rho|^{a:<5}                  {estimate_degree(Homogeneous(a).evaluator()).degree:8.3f}  {a:5.1f}")

    eng = engineered_shell_model()
    q = shell_point(1.0, (0.0, 0.0, 0.0))
    print("\nengineered shell operator at q =", q.tolist())
    for name, chart in (("p.p - m^2", mass_shell_chart(1.0)), ("quadratic", mass_shell_chart_quadratic(1.0))):
        fam = ScalingFamily(tuple(q), chart, sigma_radius=0.2, window=0.5)
        est = estimate_degree(operator_evaluator(eng.field, fam))
        print(f"  chart {name:10s} degree {est.degree:7.3f} (bound {degree_lower_bounds(1)})")
    fam = ScalingFamily(tuple(q), mass_shell_chart(1.0), sigma_radius=0.2, window=0.5)
    mono = remark_monotonicity_check(eng.field, cancelling_measure(q), fam)
    print(f"  after smearing with a measure vanishing at q: {mono.before.degree:.3f} -> {mono.after.degree:.3f}")

    print("\nallowed singularities (m, l):")
    for kappa in (0.5, 0.9, 1, 1.5, 1.8, 2, 2.5, 3, 3.5):
        items = ", ".join(f"({s.m},{s.l}{',q=0' if s.at_zero else ''})" for s in classify_allowed_singularities(kappa))
        print(f"  kappa = {kappa:<4} {items}")


if __name__ == "__main__":
    main()
