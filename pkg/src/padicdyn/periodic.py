"""2- and 3-periodic orbits of f(x) = a*x/(x^2 + c*x + a).

The 2-periodic points are the roots of x^2 + 2c*x + 2a (exactly one orbit,
{-c +- sqrt(c^2 - 2a)}, when that square root exists in Q_p). The
3-periodic points are the roots of a degree-6 polynomial P; requiring the
parameter a itself to be 3-periodic yields the one-parameter family
a = h(q), c = q*h(q) - 1 with h(q) = (3q^2+2q)/(6q^3+11q^2+6q+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .dynamics import CanonicalMap, SphereSpec, sphere_units
from .ergodicity import rho
from .errors import InconsistentParametersError, PoleHitError, VerificationError
from .padic import (
    INFINITY,
    TruncatedPadic,
    Valuation,
    _coerce_fraction,
    _fraction_valuation,
    hensel_sqrt,
    is_square,
    rational_sqrt,
)

__all__ = [
    "PeriodicOrbit",
    "StructureReport",
    "ThreePeriodicResult",
    "h_of_q",
    "p6_coefficients",
    "p6_eval",
    "q_sweep",
    "three_periodic_from_q",
    "three_periodic_sphere_condition",
    "two_periodic",
    "verify_orbit_structure",
]

Point = Union[Fraction, TruncatedPadic]


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple[Point, ...]
    # |(f^n)'(y0)|_p = p**(-multiplier_norm_exponent); INFINITY when the
    # chain-rule product vanishes (a superattracting cycle)
    multiplier_norm_exponent: Valuation
    exact: bool
    containment_ball_exponent: Optional[int] = None


def _cycle_multiplier_valuation(m: CanonicalMap, points) -> Valuation:
    """Valuation of the chain-rule product of f' along the cycle."""
    prod = Fraction(1)
    for y in points:
        prod *= m.derivative(y)
    return _fraction_valuation(prod, m.p)


def two_periodic(m: CanonicalMap, precision: int = 32) -> Optional[PeriodicOrbit]:
    """The unique 2-periodic orbit {-c + s, -c - s} with s^2 = c^2 - 2a.

    Exact rationals when c^2 - 2a is a perfect rational square; otherwise a
    truncated Hensel root at the requested precision. Returns None when
    c^2 - 2a is not a square in Q_p or is zero (then -c +- s collapses onto
    the fixed point x2, not a 2-cycle).
    """
    disc = m.c * m.c - 2 * m.a
    if disc == 0:
        return None
    s = rational_sqrt(disc) if disc > 0 else None
    if s is not None:
        t1, t2 = -m.c + s, -m.c - s
        try:
            assert m.eval(t1) == t2 and m.eval(t2) == t1
        except PoleHitError as exc:
            raise VerificationError(
                f"2-periodic candidate {exc.point} is a pole; orbit invalid"
            ) from exc
        return PeriodicOrbit(2, (t1, t2), _cycle_multiplier_valuation(m, (t1, t2)), True)
    if not is_square(disc, m.p):
        return None
    s = hensel_sqrt(disc, precision, m.p)
    t1 = s - m.c
    t2 = -s - m.c
    f_t1 = m.eval_truncated(t1)
    f_t2 = m.eval_truncated(t2)
    if not (f_t1.approx_equal(t2) and f_t2.approx_equal(t1)):
        raise VerificationError(
            f"truncated 2-cycle verification failed at precision {precision}"
        )
    # chain-rule multiplier: f'(t1)*f'(t2) in truncated arithmetic
    prod = _derivative_truncated(m, t1) * _derivative_truncated(m, t2)
    mult_val = INFINITY if prod.is_zero else prod.valuation
    return PeriodicOrbit(2, (t1, t2), mult_val, False)


def _derivative_truncated(m: CanonicalMap, t: TruncatedPadic) -> TruncatedPadic:
    den = t * t + t * m.c + m.a
    return (m.a - t * t) * m.a / (den * den)


def h_of_q(q: Fraction) -> Fraction:
    """h(q) = (3q^2 + 2q) / (6q^3 + 11q^2 + 6q + 1)."""
    den = 6 * q**3 + 11 * q**2 + 6 * q + 1
    if den == 0:
        raise ValueError(f"h(q) is undefined at q = {q} (denominator vanishes)")
    return (3 * q**2 + 2 * q) / den


_EXCLUDED_Q = (Fraction(0), Fraction(-1), Fraction(-2, 3))


@dataclass(frozen=True)
class ThreePeriodicResult:
    q: Fraction
    h: Fraction
    map: CanonicalMap
    orbit: PeriodicOrbit


def three_periodic_from_q(p: int, q) -> ThreePeriodicResult:
    """Build the map with a = h(q), c = q*h(q) - 1 and its 3-cycle {a, f(a), f^2(a)}.

    q must avoid {0, -1, -2/3} (where the construction degenerates) and the
    poles of h. The orbit is verified exactly: f^3(a) = a, f(a) != a, and
    P(a) = 0 for the degree-6 polynomial of 3-periodic points.
    """
    q = _coerce_fraction(q)
    if q in _EXCLUDED_Q:
        raise ValueError(f"q = {q} is excluded (construction degenerates)")
    a = h_of_q(q)
    c = q * a - 1
    m = CanonicalMap(p, a, c)
    try:
        y1 = m.eval(a)
        y2 = m.eval(y1)
        back = m.eval(y2)
    except PoleHitError as exc:
        raise VerificationError(
            f"3-periodic candidate hits a pole at {exc.point}"
        ) from exc
    assert back == a, f"f^3(a) != a for q = {q}"
    assert y1 != a, f"a is a fixed point for q = {q}"
    assert p6_eval(m, a) == 0
    orbit = PeriodicOrbit(3, (a, y1, y2), _cycle_multiplier_valuation(m, (a, y1, y2)), True)
    return ThreePeriodicResult(q, a, m, orbit)


def p6_coefficients(m: CanonicalMap) -> tuple[Fraction, ...]:
    """Coefficients (low to high) of the 3-periodic-point polynomial

    P(x) = x^6 + 6c x^5 + (11c^2+6a) x^4 + (6c^3+20ac) x^3
           + (15ac^2+9a^2) x^2 + 12a^2 c x + 3a^3.
    """
    a, c = m.a, m.c
    return (
        3 * a**3,
        12 * a**2 * c,
        15 * a * c**2 + 9 * a**2,
        6 * c**3 + 20 * a * c,
        11 * c**2 + 6 * a,
        6 * c,
        Fraction(1),
    )


def p6_eval(m: CanonicalMap, x) -> Fraction:
    """Exact value of P(x); P(x) = 0 iff x is a 3-periodic (non-fixed) candidate."""
    x = _coerce_fraction(x)
    acc = Fraction(0)
    for coeff in reversed(p6_coefficients(m)):
        acc = acc * x + coeff
    return acc


def three_periodic_sphere_condition(
    m: CanonicalMap, center: str, radius_exponent: int
) -> bool:
    """Whether the family parameter a lands on S_r(x_i).

    center "x1": |a|_p = r, i.e. |h(q)|_p = r.
    center "x2": |a - x2|_p = |a + c|_p = r, i.e. |h(q)(q+1) - 1|_p = r.
    """
    if center == "x1":
        return _fraction_valuation(m.a, m.p) == -radius_exponent
    if center == "x2":
        return _fraction_valuation(m.a + m.c, m.p) == -radius_exponent
    raise ValueError("center must be 'x1' or 'x2'")


@dataclass(frozen=True)
class StructureReport:
    sphere: SphereSpec
    rho_exponent: int
    containment_ok: bool
    multiplier_norm_exponent: Valuation
    ball_mapping_checked: int


def verify_orbit_structure(
    m: CanonicalMap,
    orbit: PeriodicOrbit,
    sphere: SphereSpec,
    samples: int = 8,
    seed: Optional[int] = None,
) -> StructureReport:
    """Structural checks for a periodic orbit lying on an invariant sphere.

    (1) every orbit point lies in the ball V_rho(r)(y0);
    (2) the cycle multiplier has norm exactly 1 (indifferent);
    (3) spheres around consecutive orbit points map into each other:
        f(S_rho'(y_k)) inside S_rho'(y_(k+1)) for rho' = rho(r)/p, sampled.

    Raises VerificationError (with the counterexample) if any check fails;
    the orbit must genuinely lie on the given invariant sphere.
    """
    center = m.center_point(sphere.center)
    for y in orbit.points:
        y = _as_fraction_point(y)
        if _fraction_valuation(y - center, m.p) != -sphere.radius_exponent:
            raise VerificationError(
                f"orbit point {y} is not on the sphere", counterexample=y
            )
    rho_exp = rho(m, sphere)
    y0 = _as_fraction_point(orbit.points[0])
    for y in orbit.points[1:]:
        y = _as_fraction_point(y)
        if -_fraction_valuation(y - y0, m.p) > rho_exp:
            raise VerificationError(
                f"orbit point {y} escapes V_(p^{rho_exp})(y0)", counterexample=y
            )
    mult = orbit.multiplier_norm_exponent
    if mult != 0:
        raise VerificationError(
            f"on-sphere periodic orbit must be indifferent; got exponent {mult}"
        )
    # sphere-to-sphere mapping around consecutive points, one level inside rho:
    # isometry + f(y_k) = y_(k+1) force |f(x) - y_(k+1)| = |x - y_k| exactly
    rho_inner = rho_exp - 1
    checked = 0
    pts = orbit.points + (orbit.points[0],)
    units = sphere_units(m.p, samples, seed)
    for k in range(len(orbit.points)):
        yk = _as_fraction_point(pts[k])
        yk1 = _as_fraction_point(pts[k + 1])
        for u in units:
            x = yk + u * Fraction(m.p) ** -rho_inner
            diff = m.eval(x) - yk1
            image_dist = None if diff == 0 else -_fraction_valuation(diff, m.p)
            if image_dist != rho_inner:
                raise VerificationError(
                    f"f(S_(p^{rho_inner})({yk})) leaves S_(p^{rho_inner})({yk1})",
                    counterexample=x,
                )
            checked += 1
    return StructureReport(sphere, rho_exp, True, mult, checked)


def _as_fraction_point(y: Point) -> Fraction:
    if isinstance(y, TruncatedPadic):
        return y.to_rational_representative()
    return y


@dataclass(frozen=True)
class QSweepRecord:
    q: Fraction
    a: Fraction
    c: Fraction
    on_x1_sphere_exponent: Optional[int]  # |a|_p as exponent when that sphere is invariant
    on_x2_sphere_exponent: Optional[int]


def q_sweep(p: int, max_height: int = 6) -> list[QSweepRecord]:
    """Scan height-bounded rationals q and record which 3-periodic family
    parameters land on invariant spheres of their own map.

    Height bound: |numerator| <= max_height and denominator <= max_height.
    Deterministic order (by denominator, then numerator).
    """
    out = []
    for den in range(1, max_height + 1):
        for num in range(-max_height, max_height + 1):
            if num == 0:
                continue
            q = Fraction(num, den)
            if q.denominator != den:  # not in lowest terms; already visited
                continue
            if q in _EXCLUDED_Q or 6 * q**3 + 11 * q**2 + 6 * q + 1 == 0:
                continue
            try:
                res = three_periodic_from_q(p, q)
            except (VerificationError, ValueError):
                continue
            m = res.map
            try:
                inv = m.invariant_spheres()
            except InconsistentParametersError:
                continue
            x1_exp = None
            e1 = -_fraction_valuation(m.a, p)
            if isinstance(e1, int) and e1 < inv.x1_exponent_bound:
                x1_exp = e1
            x2_exp = None
            e2_val = _fraction_valuation(m.a + m.c, p)
            if e2_val is not INFINITY and inv.x2_exponent_bound is not None:
                if -e2_val < inv.x2_exponent_bound:
                    x2_exp = -e2_val
            out.append(QSweepRecord(q, res.h, m.c, x1_exp, x2_exp))
    return out
