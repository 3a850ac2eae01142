"""Ergodicity of f(x) = a*x/(x^2+c*x+a) on its invariant spheres.

On every invariant sphere f is an isometry moving each point by the same
distance rho(r). Three independent deciders are provided and cross-checked:

  * ergodicity_theorem: exponent comparisons (never ergodic for p >= 3;
    for p = 2 the sphere S_r(0) is ergodic iff |c|_2 = beta and r = alpha/2);
  * mod4_criterion: the odd/even coefficient-sum test mod 4 applied to the
    map rescaled to the unit sphere of Q_2;
  * residue_cycle_oracle: brute-force cycle structure of the induced
    permutations of residue balls, level by level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dynamics import CanonicalMap, SphereSpec, sphere_points
from .errors import NotApplicableError, PoleHitError, VerificationError
from .padic import _fraction_valuation, _unit_residue

__all__ = [
    "ErgodicityVerdict",
    "HaarMeasureContext",
    "IsometryReport",
    "Mod4Sums",
    "Mod4Verdict",
    "OracleLevel",
    "OracleResult",
    "RescaledMap",
    "decide_ergodicity",
    "displacement_table",
    "ergodicity_theorem",
    "haar_measure",
    "isometry_check",
    "minimal_invariant_ball",
    "mod4_criterion",
    "residue_cycle_oracle",
    "rescale_to_unit",
    "rho",
    "verify_rho",
]


def _require_invariant(m: CanonicalMap, sphere: SphereSpec):
    if not m.sphere_is_invariant(sphere):
        bound = m.invariant_spheres()
        limit = bound.x1_exponent_bound if sphere.center == "x1" else bound.x2_exponent_bound
        if limit is None:
            detail = f"no sphere around {sphere.center} is invariant for this map"
        else:
            detail = f"requires radius exponent < {limit}"
        raise NotApplicableError(
            f"S_(p^{sphere.radius_exponent})({sphere.center}) is not invariant: {detail}"
        )


# -- displacement -------------------------------------------------------------


def rho(m: CanonicalMap, sphere: SphereSpec) -> int:
    """Exponent of the common displacement |f(x)-x|_p on an invariant sphere.

    For spheres around x1 = 0 (radius r = p**e, r != |c|):
        r < |c|:  rho = r^2 |c| / (alpha*beta)
        r > |c|:  rho = r^3 / (alpha*beta)
    Around x2: in the |c| = alpha = beta regime rho = r. In the
    |c| < alpha = beta regime the sphere coincides with S_r(0) when
    r > |c| (same formula); when r < |c| every point has |x| = |c| and
    rho = r |c|^2 / (alpha*beta). r = |c| is excluded: the displacement is
    then point-dependent (see displacement_table).
    """
    _require_invariant(m, sphere)
    v_alpha, v_beta = m.alpha_beta()
    vc = _fraction_valuation(m.c, m.p)
    e = sphere.radius_exponent
    if sphere.center == "x1" or m.classify().case == 2:
        if e == -vc:
            raise NotApplicableError(
                f"rho is undefined on the sphere of radius |c| = p^{-vc}; "
                "the displacement varies with the point (use displacement_table)"
            )
        if e < -vc:
            base = 2 * e - vc if sphere.center == "x1" else e - 2 * vc
            return base + v_alpha + v_beta
        return 3 * e + v_alpha + v_beta
    # x2-centered, |c| = alpha = beta regime
    return e


def displacement_table(
    m: CanonicalMap, sphere: SphereSpec, count: int = 32, seed: Optional[int] = None
) -> list[tuple[Fraction, int]]:
    """Per-point displacement exponents (x, E) with |f(x)-x|_p = p**E."""
    _require_invariant(m, sphere)
    out = []
    for x in sphere_points(m, sphere, count, seed):
        v = _fraction_valuation(m.eval(x) - x, m.p)
        out.append((x, -v))
    return out


def verify_rho(
    m: CanonicalMap, sphere: SphereSpec, count: int = 32, seed: Optional[int] = None
) -> int:
    """Assert |f(x)-x|_p = p**rho(r) on sampled points; returns sample count."""
    expected = rho(m, sphere)
    for x, got in displacement_table(m, sphere, count, seed):
        if got != expected:
            raise VerificationError(
                f"displacement mismatch at x={x}: p^{got} != p^{expected}",
                counterexample=x,
            )
    return count


# -- isometry ------------------------------------------------------------------


@dataclass(frozen=True)
class IsometryReport:
    sphere: SphereSpec
    pairs_checked: int
    factor_valuation: int  # common v(a - x*y) observed on all sampled pairs


def isometry_check(
    m: CanonicalMap, sphere: SphereSpec, count: int = 32, seed: Optional[int] = None
) -> IsometryReport:
    """Verify |f(x)-f(y)|_p = |x-y|_p exactly on all sampled pairs.

    Also checks the numerator factor of the distance-ratio identity:
    v(a - x*y) = v(a) for every sampled pair (so the ratio of norms is 1).
    Raises VerificationError with a counterexample on any violation.
    """
    _require_invariant(m, sphere)
    pts = sphere_points(m, sphere, count, seed)
    images = [m.eval(x) for x in pts]
    va = _fraction_valuation(m.a, m.p)
    pairs = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            x, y = pts[i], pts[j]
            lhs = _fraction_valuation(images[i] - images[j], m.p)
            rhs = _fraction_valuation(x - y, m.p)
            if lhs != rhs:
                raise VerificationError(
                    f"isometry violated for x={x}, y={y}: v={lhs} != {rhs}",
                    counterexample=(x, y),
                )
            vf = _fraction_valuation(m.a - x * y, m.p)
            if vf != va:
                raise VerificationError(
                    f"numerator factor |a - xy| != |a| for x={x}, y={y}",
                    counterexample=(x, y),
                )
            pairs += 1
    return IsometryReport(sphere, pairs, va)


# -- residue-ball permutations ---------------------------------------------------


def _ball_permutation(m: CanonicalMap, sphere: SphereSpec, level: int) -> dict[int, int]:
    """The permutation f induces on radius-r*p^-level balls of the sphere.

    Balls are indexed by unit residues u mod p**level; the ball of index u
    is V_(r*p^-level)(center + u*p^e). Well-definedness is checked with a
    second representative per ball; the image map is verified to be a
    bijection. Any failure raises VerificationError.
    """
    p, e = m.p, sphere.radius_exponent
    center = m.center_point(sphere.center)
    scale = Fraction(p) ** -e  # v(scale) = -e, so |u*scale| = p**e
    mod = p ** level
    perm: dict[int, int] = {}
    for u in range(1, mod):
        if u % p == 0:
            continue
        image = None
        for rep in (u, u + mod):
            try:
                y = m.eval(center + rep * scale)
            except PoleHitError as exc:  # impossible on an invariant sphere
                raise AssertionError(f"pole on invariant sphere at u={rep}") from exc
            w = (y - center) / scale
            if _fraction_valuation(w, p) != 0:
                raise VerificationError(
                    f"image left the sphere at ball u={u}", counterexample=rep
                )
            idx = _unit_residue(w, p, mod)
            if image is None:
                image = idx
            elif image != idx:
                raise VerificationError(
                    f"induced ball map not well defined at u={u}: {image} != {idx}",
                    counterexample=u,
                )
        perm[u] = image
    if sorted(perm.values()) != sorted(perm.keys()):
        raise VerificationError("induced ball map is not a permutation")
    return perm


def _cycle_lengths(perm: dict[int, int]) -> list[int]:
    seen: set[int] = set()
    lengths = []
    for start in perm:
        if start in seen:
            continue
        n, u = 0, start
        while u not in seen:
            seen.add(u)
            u = perm[u]
            n += 1
        lengths.append(n)
    return sorted(lengths, reverse=True)


@dataclass(frozen=True)
class OracleLevel:
    level: int
    ball_count: int
    cycle_count: int
    cycle_lengths: tuple[int, ...]


@dataclass(frozen=True)
class OracleResult:
    sphere: SphereSpec
    depth: int
    levels: tuple[OracleLevel, ...]
    ergodic: bool  # single cycle at every inspected level

    def to_csv(self) -> str:
        rows = ["level,ball_count,cycle_count,cycle_lengths"]
        for lv in self.levels:
            rows.append(
                f"{lv.level},{lv.ball_count},{lv.cycle_count},"
                f"{';'.join(map(str, lv.cycle_lengths))}"
            )
        return "\n".join(rows) + "\n"


def residue_cycle_oracle(
    m: CanonicalMap, sphere: SphereSpec, depth: Optional[int] = None
) -> OracleResult:
    """Brute-force cycle structure of the induced ball permutations.

    For each level k = 1..depth the sphere splits into (p-1)*p^(k-1) balls
    of radius r*p^-k; f permutes them (checked). The system is ergodic iff
    the permutation is a single cycle at every level.
    """
    _require_invariant(m, sphere)
    if depth is None:
        depth = 8 if m.p == 2 else 5
    if depth < 2:
        raise ValueError("oracle depth must be >= 2")
    levels = []
    for k in range(1, depth + 1):
        perm = _ball_permutation(m, sphere, k)
        lengths = _cycle_lengths(perm)
        levels.append(OracleLevel(k, len(perm), len(lengths), tuple(lengths)))
    return OracleResult(
        sphere, depth, tuple(levels), all(lv.cycle_count == 1 for lv in levels)
    )


def minimal_invariant_ball(
    m: CanonicalMap, sphere: SphereSpec, verify_with_oracle: bool = False
) -> int:
    """Radius exponent of the minimal invariant ball of f on the sphere.

    Every ball of radius rho(r) maps into itself (isometry with constant
    displacement); no smaller ball does. Oracle mode verifies both facts on
    the induced residue permutations: identity at the rho(r) level, no fixed
    ball one level finer.
    """
    rho_exp = rho(m, sphere)
    if verify_with_oracle:
        e = sphere.radius_exponent
        level_at_rho = e - rho_exp
        if level_at_rho >= 1:
            perm = _ball_permutation(m, sphere, level_at_rho)
            if any(u != w for u, w in perm.items()):
                raise VerificationError(
                    f"a ball of radius p^{rho_exp} is not invariant"
                )
        finer = _ball_permutation(m, sphere, level_at_rho + 1)
        if any(u == w for u, w in finer.items()):
            raise VerificationError(
                f"a ball of radius p^{rho_exp - 1} is fixed; rho is not minimal"
            )
    return rho_exp


# -- Haar measure ---------------------------------------------------------------


@dataclass(frozen=True)
class HaarMeasureContext:
    """Normalized Haar measure on a sphere S_r(x_i).

    A ball V_rho(s) inside the sphere has measure p*rho/((p-1)*r), an exact
    rational; the whole sphere has measure 1.
    """

    p: int
    sphere: SphereSpec

    def measure(self, ball_radius_exponent: int) -> Fraction:
        d, e = ball_radius_exponent, self.sphere.radius_exponent
        if d >= e:
            raise ValueError(
                f"ball radius p^{d} is not strictly inside the sphere radius p^{e}"
            )
        return Fraction(self.p) ** (d - e + 1) / (self.p - 1)

    def ball_count(self, ball_radius_exponent: int) -> int:
        d, e = ball_radius_exponent, self.sphere.radius_exponent
        if d >= e:
            raise ValueError("ball radius must be strictly below the sphere radius")
        return (self.p - 1) * self.p ** (e - d - 1)


def haar_measure(ctx: HaarMeasureContext, ball_radius_exponent: int) -> Fraction:
    return ctx.measure(ball_radius_exponent)


# -- theorem-based decision --------------------------------------------------------


@dataclass(frozen=True)
class ErgodicityVerdict:
    sphere: SphereSpec
    verdict: str  # "ergodic" | "notErgodic"
    reason: str   # "pGe3Rule" | "radiusRule" | "mod4Case k" | "oracle"
    oracle_agreement: Optional[bool] = None


def ergodicity_theorem(m: CanonicalMap, sphere: SphereSpec) -> ErgodicityVerdict:
    """Decide ergodicity on an invariant sphere by exponent comparisons.

    p >= 3: never ergodic. p = 2 around x2: never ergodic (the displacement
    equals the radius there). p = 2 around x1: ergodic iff |c|_2 = beta and
    r = alpha/2.
    """
    _require_invariant(m, sphere)
    if m.p >= 3:
        return ErgodicityVerdict(sphere, "notErgodic", "pGe3Rule")
    if sphere.center == "x2":
        return ErgodicityVerdict(sphere, "notErgodic", "radiusRule")
    v_alpha, v_beta = m.alpha_beta()
    vc = _fraction_valuation(m.c, 2)
    ergodic = (vc == v_beta) and (sphere.radius_exponent == -v_alpha - 1)
    return ErgodicityVerdict(sphere, "ergodic" if ergodic else "notErgodic", "radiusRule")


# -- rescaling to the unit sphere (p = 2) -------------------------------------------


@dataclass(frozen=True)
class RescaledMap:
    """t / (t2*t^2 + t1*t + 1): the map conjugated onto the unit sphere of Q_2.

    With r = 2**l the conjugacy is x = g(t) = 2^-l * t, so
    t1 = 2^-l * c/a and t2 = 2^-2l / a. On an invariant radius both
    coefficients are 2-adic integers with |t2|_2 <= 1/4 and |t1|_2 <= 1/2.
    """

    radius_exponent: int
    numerator: tuple[Fraction, ...]    # (0, 1)
    denominator: tuple[Fraction, ...]  # (1, t1, t2)

    def eval(self, t: Fraction) -> Fraction:
        c0, c1, c2 = self.denominator
        den = c0 + c1 * t + c2 * t * t
        if den == 0:
            raise PoleHitError(t)
        return t / den


def rescale_to_unit(m: CanonicalMap, radius_exponent: int) -> RescaledMap:
    """Conjugate f on S_(2^l)(0) onto the unit sphere S_1(0) of Q_2."""
    if m.p != 2:
        raise NotApplicableError("rescaling to the unit sphere is a p = 2 construction")
    l = radius_exponent
    two = Fraction(2)
    t1 = two ** (-l) * m.c / m.a
    t2 = two ** (-2 * l) / m.a
    if not (_fraction_valuation(t2, 2) >= 2 and _fraction_valuation(t1, 2) >= 1):
        raise NotApplicableError(
            f"coefficient bounds fail (|t^2 coeff| <= 1/4, |t coeff| <= 1/2): "
            f"radius 2^{l} is not an invariant radius"
        )
    return RescaledMap(l, (Fraction(0), Fraction(1)), (Fraction(1), t1, t2))


def verify_rescaled(m: CanonicalMap, radius_exponent: int, ts) -> int:
    """Check g^-1(f(g(t))) == rescaled(t) at sample unit points; returns count.

    g(t) = 2**(-l) * t maps the unit sphere onto S_(2^l)(0).
    """
    rm = rescale_to_unit(m, radius_exponent)
    g_factor = Fraction(2) ** (-radius_exponent)
    checked = 0
    for t in ts:
        t = Fraction(t)
        lhs = m.eval(t * g_factor) / g_factor
        assert lhs == rm.eval(t), f"rescaled identity fails at t={t}"
        checked += 1
    return checked


# -- mod-4 coefficient-sum criterion -------------------------------------------------


@dataclass(frozen=True)
class Mod4Sums:
    """Odd/even-index coefficient sums of numerator and denominator."""

    A1: Fraction
    A2: Fraction
    B1: Fraction
    B2: Fraction

    def residues(self) -> tuple[int, int, int, int]:
        return tuple(_mod4(x) for x in (self.A1, self.A2, self.B1, self.B2))


@dataclass(frozen=True)
class Mod4Verdict:
    ergodic: bool
    case: Optional[int]  # 1..5, None when no case matches
    sums: Mod4Sums


def _mod4(x: Fraction) -> int:
    if _fraction_valuation(x, 2) < 0:
        raise ValueError(f"{x} is not a 2-adic integer")
    return x.numerator * pow(x.denominator % 4, -1, 4) % 4


_MOD4_CASES = {
    1: (1, 2, 0, 1),
    2: (3, 2, 0, 3),
    3: (1, 0, 2, 1),
    4: (3, 0, 2, 3),
}

_SELF_MAP_SAMPLES = (1, 3, 5, -1, -3, 7)


def _coefficient_sums(coeffs) -> tuple[Fraction, Fraction]:
    odd = sum((c for i, c in enumerate(coeffs) if i % 2 == 1), Fraction(0))
    even = sum((c for i, c in enumerate(coeffs) if i % 2 == 0), Fraction(0))
    return odd, even


def mod4_criterion(num_coeffs, den_coeffs) -> Mod4Verdict:
    """Ergodicity test for a rational self-map of the odd units of Z_2.

    Coefficients must be 2-adic integers and the map must send 1 + 2*Z_2 to
    itself (spot-checked on sample points). With A1/A2 the odd/even-index
    coefficient sums of the numerator and B1/B2 of the denominator, the map
    is ergodic iff (A1,A2,B1,B2) mod 4 matches one of four patterns, or one
    of them with numerator and denominator interchanged (reported as case 5).
    """
    num = [Fraction(c) for c in num_coeffs]
    den = [Fraction(c) for c in den_coeffs]
    for c in num + den:
        if _fraction_valuation(c, 2) < 0:
            raise ValueError(f"coefficient {c} is not a 2-adic integer")

    def poly(coeffs, t):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    for t in _SELF_MAP_SAMPLES:
        nt, dt = poly(num, Fraction(t)), poly(den, Fraction(t))
        if _fraction_valuation(nt, 2) != 0 or _fraction_valuation(dt, 2) != 0:
            raise ValueError(
                f"map does not preserve the odd units: value at t={t} is not a unit"
            )

    A1, A2 = _coefficient_sums(num)
    B1, B2 = _coefficient_sums(den)
    assert A1 + A2 == poly(num, Fraction(1)) and B1 + B2 == poly(den, Fraction(1))
    sums = Mod4Sums(A1, A2, B1, B2)
    residues = sums.residues()
    for k, pattern in _MOD4_CASES.items():
        if residues == pattern:
            return Mod4Verdict(True, k, sums)
    swapped = (residues[2], residues[3], residues[0], residues[1])
    for pattern in _MOD4_CASES.values():
        if swapped == pattern:
            return Mod4Verdict(True, 5, sums)
    return Mod4Verdict(False, None, sums)


# -- combined decision ----------------------------------------------------------------


@dataclass(frozen=True)
class ErgodicityDecision:
    theorem: ErgodicityVerdict
    mod4: Optional[Mod4Verdict]  # only for p = 2, center x1
    oracle: OracleResult
    verdict: str

    @property
    def agreement(self) -> bool:
        return True  # constructed only after all deciders agreed


def decide_ergodicity(
    m: CanonicalMap, sphere: SphereSpec, depth: Optional[int] = None
) -> ErgodicityDecision:
    """Run every applicable decider and fail loudly unless they all agree."""
    thm = ergodicity_theorem(m, sphere)
    oracle = residue_cycle_oracle(m, sphere, depth)
    verdicts = {thm.verdict, "ergodic" if oracle.ergodic else "notErgodic"}
    mod4 = None
    if m.p == 2 and sphere.center == "x1":
        rm = rescale_to_unit(m, sphere.radius_exponent)
        mod4 = mod4_criterion(rm.numerator, rm.denominator)
        verdicts.add("ergodic" if mod4.ergodic else "notErgodic")
    if len(verdicts) != 1:
        raise VerificationError(
            f"ergodicity deciders disagree on {sphere}: theorem={thm.verdict}, "
            f"oracle={'ergodic' if oracle.ergodic else 'notErgodic'}, "
            f"mod4={None if mod4 is None else mod4.ergodic}"
        )
    final = ErgodicityVerdict(sphere, thm.verdict, thm.reason, oracle_agreement=True)
    return ErgodicityDecision(final, mod4, oracle, thm.verdict)
