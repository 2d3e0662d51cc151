"""A tour of the interval layer.

Every quantity in this package is an enclosure [lo, hi] with outward
rounding: whatever the true real value is, it lies between the printed
endpoints.  Run this file to see the basic guarantees in action.
"""

from fractions import Fraction

from kappazero.interval import (
    certainly, from_endpoints, interval, iv_cos, iv_div, iv_exp, iv_log,
    iv_mul, nearest_int_distance, pi_interval, fmt,
)

# Decimal literals are not binary-representable; the constructor returns
# the tightest enclosure at the working precision instead of a rounded lie.
x = interval("0.1")
print("enclosure of 0.1      :", fmt(x, 30))
print("width                 :", float(x.width()))

# Arithmetic keeps the containment contract: 3 * (1/3) must contain 1.
third = iv_div(interval(1), interval(3))
print("3 * (1/3) contains 1  :", iv_mul(interval(3), third).contains(1))

# Transcendental functions are correctly rounded at both endpoints.
print("log 2                 :", fmt(iv_log(interval(2)), 30))
print("exp(1)                :", fmt(iv_exp(interval(1)), 30))
print("pi                    :", fmt(pi_interval(), 30))

# cos over an interval accounts for interior extremes: the enclosure of
# cos([3, 3.3]) reaches exactly -1 because pi lies inside.
print("cos([3, 3.3])         :", fmt(iv_cos(from_endpoints(3, "3.3")), 10))

# Distance to the nearest integer, the norm used throughout the pipeline.
print("||0.25||              :", fmt(nearest_int_distance(interval("0.25")), 6))
print("||[0.4, 0.6]||        :", fmt(nearest_int_distance(from_endpoints("0.4", "0.6")), 6))

# Comparisons are only ever "certified" or "not certified": a False from
# certainly() never means the relation is false, only that the enclosures
# overlap too much to decide.
a, b = from_endpoints(1, 2), from_endpoints(3, 4)
print("[1,2] < [3,4]         :", certainly(a, "lt", b))
print("[1,3] < [2,4]         :", certainly(from_endpoints(1, 3), "lt",
                                           from_endpoints(2, 4)))

# Exact rationals can be checked for membership without any rounding.
ln2 = iv_log(interval(2))
approx = Fraction("0.6931471805599453")
print("crude ln2 inside?     :", ln2.contains(approx), "(16 digits are not enough)")
