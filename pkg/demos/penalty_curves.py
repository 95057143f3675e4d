"""Walk through the penalty family and its threshold operator.

Samples the partly quadratic penalty phi(x; a), its concave remainder
s(x; a) = phi - |x|, and the firm threshold for a few non-convexity levels,
then writes each sweep to a CSV ready for any plotting tool. The a = 0 row
is the plain l1 / soft-threshold case; larger a bends the penalty flat and
widens the band where the threshold overshoots back to identity.
"""

import os

from elma.penalty import PenaltySpec, emit_curves, write_curves_csv

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    lam = 1.0
    print(f"lam = {lam}; strict convexity of the solve objective needs a < {1.0 / lam}")
    for fraction in (0.0, 0.3, 0.6, 0.9):
        spec = PenaltySpec.firm_fraction(lam, fraction)
        rows = emit_curves(spec, -5.0, 5.0, 0.01)
        path = os.path.join(OUT_DIR, f"curves_a{fraction:.1f}.csv")
        write_curves_csv(rows, path)
        mid = rows[len(rows) // 2 + 150]  # x = 1.5
        print(
            f"a = {spec.a:4.2f}: wrote {path}; at x=1.5 "
            f"phi={mid[1]:.4f} s={mid[2]:.4f} theta={mid[3]:.4f}"
        )
    print("columns: x,phi,s,theta (phi/s empty for families without them)")


if __name__ == "__main__":
    main()
