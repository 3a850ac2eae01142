"""Dynamics of the canonical map f(x) = a*x/(x^2 + c*x + a) over Q_p.

The two fixed points are x1 = 0 and x2 = -c. All structure is governed by
the norms of the denominator's roots ("poles") xh1, xh2:

    alpha = min(|xh1|_p, |xh2|_p),  beta = max(|xh1|_p, |xh2|_p),

computed exactly, without square roots, from the Newton polygon of
x^2 + c*x + a. Radii and norms are handled as integer exponents of p
throughout; there is no floating point anywhere in this module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional

from .errors import (
    DegenerateMapError,
    InconsistentParametersError,
    PoleHitError,
    PrecisionError,
)
from .padic import (
    INFINITY,
    TruncatedPadic,
    Valuation,
    _coerce_fraction,
    _fraction_valuation,
    hensel_sqrt,
    is_prime,
    is_square,
    rational_sqrt,
)

__all__ = [
    "CanonicalMap",
    "Classification",
    "FixedPointReport",
    "InvariantSpheres",
    "NormImagePrediction",
    "OrbitResult",
    "PolePair",
    "Region",
    "SphereSpec",
    "alpha_beta",
    "classify",
    "eval_f",
    "invariant_spheres",
    "norm_image_profile",
    "orbit",
    "sphere_points",
    "sphere_units",
]

CenterKind = Literal["x1", "x2"]


@dataclass(frozen=True)
class SphereSpec:
    """A sphere S_r(x_i) with radius r = p**radius_exponent."""

    center: CenterKind
    radius_exponent: int

    def __post_init__(self):
        if self.center not in ("x1", "x2"):
            raise ValueError("center must be 'x1' or 'x2'")


@dataclass(frozen=True)
class Region:
    """An open ball U_r(center) attached to a fixed point."""

    kind: Literal["siegel_disk", "basin", "repelling_ball"]
    center: Fraction
    radius_exponent: int  # r = p**radius_exponent


@dataclass(frozen=True)
class FixedPointReport:
    point: Fraction
    multiplier: Fraction
    # |f'(x0)|_p = p**(-multiplier_norm_exponent); INFINITY when f'(x0) = 0
    multiplier_norm_exponent: Valuation
    kind: Literal["attracting", "indifferent", "repelling"]
    region: Region
    case: int
    superattracting: bool = False


@dataclass(frozen=True)
class Classification:
    case: int
    x1: FixedPointReport
    x2: FixedPointReport


@dataclass(frozen=True)
class PolePair:
    """Roots of x^2 + c*x + a: exact when the discriminant is a rational
    square, truncated Hensel lifts when it is only a p-adic square, absent
    from Q_p otherwise."""

    kind: Literal["rational", "truncated", "absent"]
    values: tuple


@dataclass(frozen=True)
class InvariantSpheres:
    """S_r(x_i) is invariant iff radius_exponent < the recorded bound
    (None: no invariant sphere around that point)."""

    x1_exponent_bound: int
    x2_exponent_bound: Optional[int]


class CanonicalMap:
    """f(x) = a*x/(x^2 + c*x + a) with a*c != 0 over Q_p."""

    __slots__ = ("p", "a", "c", "_ab")

    def __init__(self, p: int, a, c):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        a = _coerce_fraction(a)
        c = _coerce_fraction(c)
        if a == 0:
            raise DegenerateMapError("a must be nonzero")
        if c == 0:
            raise DegenerateMapError("c must be nonzero")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "_ab", None)

    def __setattr__(self, name, value):
        raise AttributeError("CanonicalMap is immutable")

    def __repr__(self):
        return f"CanonicalMap(p={self.p}, a={self.a}, c={self.c})"

    def __eq__(self, other):
        if not isinstance(other, CanonicalMap):
            return NotImplemented
        return (self.p, self.a, self.c) == (other.p, other.a, other.c)

    def __hash__(self):
        return hash((self.p, self.a, self.c))

    # -- basic data ----------------------------------------------------------

    @property
    def x1(self) -> Fraction:
        return Fraction(0)

    @property
    def x2(self) -> Fraction:
        return -self.c

    @property
    def discriminant(self) -> Fraction:
        return self.c * self.c - 4 * self.a

    def val(self, x) -> Valuation:
        return _fraction_valuation(_coerce_fraction(x), self.p)

    def discriminant_is_square(self) -> bool:
        d = self.discriminant
        return True if d == 0 else is_square(d, self.p)

    def poles(self, precision: int = 24) -> PolePair:
        d = self.discriminant
        s = rational_sqrt(d) if d >= 0 else None
        if s is not None:
            return PolePair("rational", ((-self.c + s) / 2, (-self.c - s) / 2))
        if not is_square(d, self.p):
            return PolePair("absent", ())
        sq = hensel_sqrt(d, precision, self.p)
        half = Fraction(1, 2)
        return PolePair("truncated", ((sq - self.c) * half, (-sq - self.c) * half))

    # -- evaluation ----------------------------------------------------------

    def eval(self, x) -> Fraction:
        """Exact value of f(x); raises PoleHitError on the denominator's roots."""
        x = _coerce_fraction(x)
        den = x * x + self.c * x + self.a
        if den == 0:
            raise PoleHitError(x)
        return self.a * x / den

    def eval_truncated(self, t: TruncatedPadic) -> TruncatedPadic:
        den = t * t + t * self.c + self.a
        num = t * self.a
        return num / den

    def derivative(self, x) -> Fraction:
        """f'(x) = a*(a - x^2)/(x^2 + c*x + a)^2, exact."""
        x = _coerce_fraction(x)
        den = x * x + self.c * x + self.a
        if den == 0:
            raise PoleHitError(x)
        return self.a * (self.a - x * x) / (den * den)

    def multiplier_x2(self) -> Fraction:
        """f'(-c) = 1 - c^2/a."""
        return 1 - self.c * self.c / self.a

    def center_point(self, center: CenterKind) -> Fraction:
        return self.x1 if center == "x1" else self.x2

    # -- pole norms ------------------------------------------------------------

    def alpha_beta(self) -> tuple[int, int]:
        """(v_alpha, v_beta) with alpha = p**(-v_alpha), beta = p**(-v_beta).

        Newton polygon of x^2 + c*x + a: when 2*v(c) < v(a) the root
        valuations are v(c) and v(a) - v(c); otherwise both equal v(a)/2,
        and v(a) must then be even for the roots to have norms in p**Z.
        Cross-checked against |a|_p = alpha*beta and the |c|_p relations.
        """
        cached = self._ab
        if cached is not None:
            return cached
        va = _fraction_valuation(self.a, self.p)
        vc = _fraction_valuation(self.c, self.p)
        if 2 * vc < va:
            v_beta = vc
            v_alpha = va - vc
        else:
            if va % 2 != 0:
                raise InconsistentParametersError(
                    f"v(a) = {va} is odd with 2*v(c) >= v(a): pole norms are not "
                    f"integer powers of {self.p} (roots of x^2+cx+a lie outside Q_p)"
                )
            v_alpha = v_beta = va // 2
        # alpha <= beta, |a| = alpha*beta, and the |c| constraints
        assert v_alpha >= v_beta and v_alpha + v_beta == va
        assert (vc >= v_alpha) if v_alpha == v_beta else (vc == v_beta)
        object.__setattr__(self, "_ab", (v_alpha, v_beta))
        return v_alpha, v_beta

    # -- classification --------------------------------------------------------

    def classify(self) -> Classification:
        """Type and local structure of both fixed points.

        x1 = 0 is always indifferent (f'(0) = 1) with maximal Siegel disk
        U_alpha(0): case 1. The five-way case index records the regime of
        x2 = -c determined by comparing |c|, alpha, beta and |a - c^2|:

          2: |c| <  alpha = beta            -> indifferent, shares x1's disk
          3: |c| = alpha = beta, |a-c^2| = alpha^2
                                            -> indifferent, disjoint disk U_alpha(x2)
          4: |c| = alpha = beta, |a-c^2| < alpha^2
                                            -> attracting, basin U_alpha(x2)
          5: alpha < beta                   -> repelling on U_beta(x2),
                                               |f'(x2)| = beta/alpha
        """
        v_alpha, v_beta = self.alpha_beta()
        p = self.p
        mult = self.multiplier_x2()
        mv = _fraction_valuation(mult, p)
        x1_report = FixedPointReport(
            point=self.x1,
            multiplier=Fraction(1),
            multiplier_norm_exponent=0,
            kind="indifferent",
            region=Region("siegel_disk", self.x1, -v_alpha),
            case=1,
        )
        vc = _fraction_valuation(self.c, p)
        if v_alpha > v_beta:
            case = 5
            assert mv == v_beta - v_alpha < 0
            x2_report = FixedPointReport(
                point=self.x2,
                multiplier=mult,
                multiplier_norm_exponent=mv,
                kind="repelling",
                region=Region("repelling_ball", self.x2, -v_beta),
                case=5,
            )
        elif vc > v_alpha:
            case = 2
            assert mv == 0
            x2_report = FixedPointReport(
                point=self.x2,
                multiplier=mult,
                multiplier_norm_exponent=mv,
                kind="indifferent",
                region=Region("siegel_disk", self.x1, -v_alpha),
                case=2,
            )
        else:
            # |c| = alpha = beta; split on |a - c^2| vs alpha^2
            gap = self.a - self.c * self.c
            gv = _fraction_valuation(gap, p)
            assert gv >= 2 * v_alpha
            if gv == 2 * v_alpha:
                case = 3
                assert mv == 0
                x2_report = FixedPointReport(
                    point=self.x2,
                    multiplier=mult,
                    multiplier_norm_exponent=mv,
                    kind="indifferent",
                    region=Region("siegel_disk", self.x2, -v_alpha),
                    case=3,
                )
            else:
                case = 4
                assert mv > 0  # INFINITY when a = c^2 (superattracting)
                x2_report = FixedPointReport(
                    point=self.x2,
                    multiplier=mult,
                    multiplier_norm_exponent=mv,
                    kind="attracting",
                    region=Region("basin", self.x2, -v_alpha),
                    case=4,
                    superattracting=(mult == 0),
                )
        return Classification(case, x1_report, x2_report)

    def invariant_spheres(self) -> InvariantSpheres:
        """Exponent bounds below which S_r(x_i) is invariant.

        S_r(x1) is invariant iff r < alpha. S_r(x2) is invariant iff the
        map is in case 2 or 3 and r < alpha; in cases 4 and 5 no sphere
        around x2 is invariant.
        """
        v_alpha, _ = self.alpha_beta()
        case = self.classify().case
        bound = -v_alpha
        return InvariantSpheres(bound, bound if case in (2, 3) else None)

    def sphere_is_invariant(self, sphere: SphereSpec) -> bool:
        inv = self.invariant_spheres()
        if sphere.center == "x1":
            return sphere.radius_exponent < inv.x1_exponent_bound
        if inv.x2_exponent_bound is None:
            return False
        return sphere.radius_exponent < inv.x2_exponent_bound


# Module-level wrappers mirroring the class methods.

def eval_f(m: CanonicalMap, x) -> Fraction:
    return m.eval(x)


def alpha_beta(m: CanonicalMap) -> tuple[int, int]:
    return m.alpha_beta()


def classify(m: CanonicalMap) -> Classification:
    return m.classify()


def invariant_spheres(m: CanonicalMap) -> InvariantSpheres:
    return m.invariant_spheres()


# -- sphere sampling ---------------------------------------------------------


def sphere_units(p: int, count: int, seed: Optional[int] = None) -> list[Fraction]:
    """Deterministic p-adic units of small height; seeded random mode optional.

    Default: the first ``count`` positive integers coprime to p. With a
    seed: random fractions n/m with p coprime to both n and m.
    """
    if seed is None:
        out, k = [], 1
        while len(out) < count:
            if k % p:
                out.append(Fraction(k))
            k += 1
        return out
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 10**6) * rng.choice((1, -1))
        m_ = rng.randint(1, 10**6)
        if n % p and m_ % p:
            out.append(Fraction(n, m_))
    return out


def sphere_points(
    m: CanonicalMap, sphere: SphereSpec, count: int = 32, seed: Optional[int] = None
) -> list[Fraction]:
    """Points center + u * p**(-e) on S_{p**e}(x_i), u running over units.

    (|x - center|_p = p**e means v(x - center) = -e.)
    """
    center = m.center_point(sphere.center)
    scale = Fraction(m.p) ** -sphere.radius_exponent
    return [center + u * scale for u in sphere_units(m.p, count, seed)]


# -- orbits -------------------------------------------------------------------


@dataclass(frozen=True)
class PoleHitRecord:
    step: int
    point: Fraction


@dataclass(frozen=True)
class OrbitResult:
    """Iterates of f with per-step distance exponents to both fixed points.

    distance exponents: E with |x_k - x_i|_p = p**E; the string "-inf"
    stands for a difference that is zero (exact mode) or indistinguishable
    from zero at working precision (truncated mode).
    """

    mode: Literal["exact", "truncated"]
    points: tuple
    dist_x1_exponents: tuple
    dist_x2_exponents: tuple
    pole_hit: Optional[PoleHitRecord]

    @property
    def steps_completed(self) -> int:
        return len(self.points) - 1


def _distance_exponent_exact(x: Fraction, center: Fraction, p: int):
    v = _fraction_valuation(x - center, p)
    return "-inf" if v is INFINITY else -v


def _distance_exponent_truncated(t: TruncatedPadic, center: Fraction):
    diff = t - center
    if diff.is_zero:
        return "-inf"
    return -diff.valuation


def orbit(
    m: CanonicalMap,
    x0,
    steps: int,
    mode: Literal["auto", "exact", "truncated"] = "auto",
    precision: int = 64,
) -> OrbitResult:
    """Iterate f from x0 for ``steps`` steps, recording exact norm profiles.

    Exact mode keeps full rationals; their bit-size roughly doubles per step
    (degree-2 map), so it is restricted to short orbits. Truncated mode
    iterates in fixed-precision p-adic arithmetic: every recorded distance
    exponent is still exact (precision tracking is sound and indeterminate
    results raise PrecisionError rather than guessing).

    An iterate landing on a pole stops the orbit with a PoleHitRecord; the
    partial orbit is returned.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if mode == "auto":
        mode = "exact" if steps <= 24 else "truncated"
    x0 = _coerce_fraction(x0)
    centers = (m.x1, m.x2)
    if mode == "exact":
        points = [x0]
        d1 = [_distance_exponent_exact(x0, centers[0], m.p)]
        d2 = [_distance_exponent_exact(x0, centers[1], m.p)]
        pole = None
        x = x0
        for k in range(steps):
            try:
                x = m.eval(x)
            except PoleHitError:
                pole = PoleHitRecord(k, x)
                break
            points.append(x)
            d1.append(_distance_exponent_exact(x, centers[0], m.p))
            d2.append(_distance_exponent_exact(x, centers[1], m.p))
        return OrbitResult("exact", tuple(points), tuple(d1), tuple(d2), pole)
    if precision < 4:
        raise ValueError("truncated orbit needs precision >= 4")
    t = TruncatedPadic.from_rational(x0, m.p, precision)
    points = [t]
    d1 = [_distance_exponent_truncated(t, centers[0])]
    d2 = [_distance_exponent_truncated(t, centers[1])]
    pole = None
    for k in range(steps):
        try:
            t = m.eval_truncated(t)
        except PrecisionError as exc:
            raise PrecisionError(
                f"orbit step {k + 1} became indeterminate at precision {precision}; "
                f"rerun with a higher precision ({exc})"
            ) from exc
        points.append(t)
        d1.append(_distance_exponent_truncated(t, centers[0]))
        d2.append(_distance_exponent_truncated(t, centers[1]))
    return OrbitResult("truncated", tuple(points), tuple(d1), tuple(d2), pole)


# -- image norm profile --------------------------------------------------------


@dataclass(frozen=True)
class NormImagePrediction:
    """|f(x)|_p for x on S_r(0): exact value or a lower bound, as p-exponents."""

    kind: Literal["exact", "lower_bound"]
    exponent: int


def norm_image_profile(m: CanonicalMap, radius_exponent: int) -> NormImagePrediction:
    """Predicted |f(x)|_p on the sphere |x|_p = p**radius_exponent.

    Three regimes: below alpha the norm is preserved; between alpha and
    beta only the lower bound alpha holds (the exact value depends on the
    point); above beta the norm is |a|_p / r.
    """
    v_alpha, v_beta = m.alpha_beta()
    e = radius_exponent
    if e < -v_alpha:
        return NormImagePrediction("exact", e)
    if e > -v_beta:
        va = _fraction_valuation(m.a, m.p)
        return NormImagePrediction("exact", -va - e)
    return NormImagePrediction("lower_bound", -v_alpha)


def validate_norm_image(
    m: CanonicalMap,
    radius_exponent: int,
    count: int = 32,
    seed: Optional[int] = None,
) -> int:
    """Check the profile prediction on sampled points of S_r(0).

    Returns the number of points checked (pole hits are skipped).
    """
    pred = norm_image_profile(m, radius_exponent)
    pts = sphere_points(m, SphereSpec("x1", radius_exponent), count, seed)
    checked = 0
    for x in pts:
        try:
            y = m.eval(x)
        except PoleHitError:
            continue
        v = _fraction_valuation(y, m.p)
        exp = None if v is INFINITY else -v
        if pred.kind == "exact":
            assert exp == pred.exponent, f"|f({x})| = p^{exp}, predicted p^{pred.exponent}"
        else:
            assert exp is not None and exp >= pred.exponent, (
                f"|f({x})| = p^{exp} below bound p^{pred.exponent}"
            )
        checked += 1
    return checked
