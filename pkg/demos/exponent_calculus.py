#!/usr/bin/env python3
"""Exact exponent arithmetic for power weights.

Walks the rational calculus end to end for w(x) = |x|^alpha: the
critical pair (r_w, s_w), the admissible A_p / RH_s interval, the
weighted Sobolev exponent chain, the surrogate p bounds, and the
admissible range for a square-function estimate.  Every number is a
Fraction or inf; nothing here is floating point.
"""

from fractions import Fraction

from tentcalc import (
    corollary_ranges,
    ext,
    poisson_upper,
    power_weight_class_interval,
    power_weight_criticals,
    range_W,
    sobolev_exponent,
    surrogate_p_bounds,
)


def main():
    alpha, n = Fraction(1), 2
    print(f"power weight |x|^{alpha} in dimension {n}")

    pair = power_weight_criticals(alpha, n)
    print(f"  critical pair: r_w = {pair.r_w}, s_w = {pair.s_w}")
    ap = power_weight_class_interval(alpha, n, "ap")
    rh = power_weight_class_interval(alpha, n, "rh")
    print(f"  A_p for p in ({ap.lower}, {ap.upper}); "
          f"RH_s for s in ({rh.lower}, {rh.upper})")

    p_minus, p_plus = surrogate_p_bounds(pair, n)
    print(f"  surrogate exponents: p- = {p_minus}, p+ = {p_plus}")

    q = ext(2)
    for big_k in (1, 2):
        s = sobolev_exponent(q, big_k, pair.r_w, n)
        p_up = poisson_upper(q, big_k, pair.r_w, n)
        print(f"  K = {big_k}: Sobolev exponent {s}, Poisson upper bound {p_up}")

    rng = range_W(ext(Fraction(3, 2)), ext(4), pair)
    print(f"  admissible range from (3/2, 4): ({rng.lower}, {rng.upper})")

    for family in ("heat", "poisson"):
        ranges = corollary_ranges("power_weight", {"n": 6, "family": family})
        print(f"  unweighted {family} admissible alpha in n = 6: "
              f"({ranges['alpha_lo']}, {ranges['alpha_hi']})")


if __name__ == "__main__":
    main()
