"""Reduction of f(x) = (ax+b)/(x^2+cx+d) with a double fixed point.

The fixed points of the four-parameter map are the roots of the cubic
x^3 + c*x^2 + (d-a)*x - b. When that cubic has a (necessarily rational)
double root x2, shifting by h(t) = t + x2 conjugates f to

    (h^-1 o f o h)(t) = (-x2*t^2 + B*t) / (t^2 + D*t + B),

with B = x2^2 + c*x2 + d and D = 2*x2 + c. When x2 = 0 this collapses to
the two-parameter canonical form a*t/(t^2 + c*t + a); otherwise it is the
three-parameter family, which this package labels but does not analyze.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dynamics import CanonicalMap
from .errors import PoleHitError, UnsupportedCaseError
from .padic import _coerce_fraction, is_prime

__all__ = ["GeneralMap", "ConjugationResult", "find_double_root", "conjugate", "verify_conjugacy"]


# -- tiny exact polynomial helpers (coefficients low to high) ---------------

def _poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def _poly_mod(num, den):
    num = _poly_trim(num)
    den = _poly_trim(den)
    while len(num) >= len(den) > 0:
        factor = num[-1] / den[-1]
        shift = len(num) - len(den)
        for i, c in enumerate(den):
            num[i + shift] -= factor * c
        num = _poly_trim(num)
    return num


def _poly_gcd(a, b):
    """Monic gcd over the rationals."""
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        a, b = b, _poly_mod(a, b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


@dataclass(frozen=True)
class GeneralMap:
    """f(x) = (a*x + b)/(x^2 + c*x + d) over Q_p, with a != 0."""

    p: int
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        for name in "abcd":
            object.__setattr__(self, name, _coerce_fraction(getattr(self, name)))
        if self.a == 0:
            raise ValueError("parameter a must be nonzero")

    def fixed_point_cubic(self):
        """Coefficients (low to high) of x^3 + c*x^2 + (d-a)*x - b."""
        return [-self.b, self.d - self.a, self.c, Fraction(1)]

    def eval(self, x) -> Fraction:
        x = _coerce_fraction(x)
        den = x * x + self.c * x + self.d
        if den == 0:
            raise PoleHitError(x)
        return (self.a * x + self.b) / den


def _cubic_root_profile(m: GeneralMap):
    """("double", x1, x2) | ("triple", x) | ("distinct", None)."""
    cubic = m.fixed_point_cubic()
    g = _poly_gcd(cubic, _poly_deriv(cubic))
    if len(g) == 1:
        return ("distinct", None, None)
    if len(g) == 3:
        return ("triple", -g[1] / 2, None)
    x2 = -g[0]
    x1 = -m.c - 2 * x2
    assert _poly_eval(cubic, x1) == 0 and _poly_eval(cubic, x2) == 0
    if x1 == x2:
        return ("triple", x2, None)
    return ("double", x1, x2)


def find_double_root(m: GeneralMap) -> Optional[tuple[Fraction, Fraction]]:
    """The (simple, double) roots of the fixed-point cubic, or None.

    Found by an exact gcd of the cubic with its derivative over Q; a double
    root of a rational cubic is automatically rational. None signals either
    three distinct fixed points or a triple fixed point.
    """
    kind, x1, x2 = _cubic_root_profile(m)
    if kind != "double":
        return None
    return x1, x2


@dataclass(frozen=True)
class ConjugationResult:
    """Outcome of shifting the double fixed point to the origin."""

    x1: Fraction
    x2: Fraction
    B: Fraction
    D: Fraction
    family: str  # "two-parameter" when x2 == 0, else "three-parameter"
    canonical: Optional[CanonicalMap]

    def conjugated_numerator(self):
        """Coefficients (low to high) of -x2*t^2 + B*t."""
        return [Fraction(0), self.B, -self.x2]

    def conjugated_denominator(self):
        """Coefficients (low to high) of t^2 + D*t + B."""
        return [self.B, self.D, Fraction(1)]


def conjugate(m: GeneralMap) -> ConjugationResult:
    """Shift the double fixed point x2 to 0 and report the conjugated map.

    Raises UnsupportedCaseError when there is no double fixed point. When
    x2 = 0 the result carries the canonical two-parameter map (then B = d = a
    and D = c, which is asserted); when x2 != 0 only B, D and the family
    label are returned.
    """
    kind, x1, x2 = _cubic_root_profile(m)
    if kind == "distinct":
        raise UnsupportedCaseError(
            "fixed-point cubic is squarefree: three distinct fixed points",
            label="three-distinct-fixed-points",
        )
    if kind == "triple":
        raise UnsupportedCaseError(
            "fixed-point cubic has a triple root: single fixed point of multiplicity three",
            label="triple-fixed-point",
        )
    # Vieta identities for (x - x1)(x - x2)^2
    assert x1 + 2 * x2 == -m.c
    assert x2 * x2 + 2 * x1 * x2 == m.d - m.a
    assert x1 * x2 * x2 == m.b
    B = x2 * x2 + m.c * x2 + m.d
    D = 2 * x2 + m.c
    if x2 == 0:
        assert B == m.d == m.a and D == m.c
        canonical = CanonicalMap(m.p, B, D)
        return ConjugationResult(x1, x2, B, D, "two-parameter", canonical)
    return ConjugationResult(x1, x2, B, D, "three-parameter", None)


def verify_conjugacy(m: GeneralMap, result: ConjugationResult, ts) -> int:
    """Check h^-1(f(h(t))) == (-x2*t^2 + B*t)/(t^2 + D*t + B) at sample points.

    Returns the number of points actually compared (poles are skipped).
    Raises AssertionError on any mismatch.
    """
    checked = 0
    num = result.conjugated_numerator()
    den = result.conjugated_denominator()
    for t in ts:
        t = _coerce_fraction(t)
        d = _poly_eval(den, t)
        if d == 0:
            continue
        try:
            lhs = m.eval(t + result.x2) - result.x2
        except PoleHitError:
            continue
        rhs = _poly_eval(num, t) / d
        assert lhs == rhs, f"conjugacy identity fails at t={t}: {lhs} != {rhs}"
        checked += 1
    return checked
