from fractions import Fraction

import pytest

from padicdyn import CanonicalMap, NotApplicableError, SphereSpec
from padicdyn.ergodicity import (
    HaarMeasureContext,
    decide_ergodicity,
    displacement_table,
    ergodicity_theorem,
    haar_measure,
    isometry_check,
    minimal_invariant_ball,
    mod4_criterion,
    rescale_to_unit,
    residue_cycle_oracle,
    rho,
    verify_rescaled,
    verify_rho,
)

M2 = CanonicalMap(2, 2, 1)     # alpha = 1/2, beta = 1, the ergodic workhorse
CASE2 = CanonicalMap(5, -1, 5)
CASE3 = CanonicalMap(5, 3, 1)
CASE4 = CanonicalMap(3, -2, 1)


# -- rho -------------------------------------------------------------------------


def test_rho_p2_example():
    # r = 1/4 < |c| = 1: rho = r^2 |c| / (alpha beta) = (1/16)/(1/2) = 1/8
    assert rho(M2, SphereSpec("x1", -2)) == -3


def test_rho_case3_x2_sphere_is_radius():
    for e in (-1, -2, -3):
        assert rho(CASE3, SphereSpec("x2", e)) == e


def test_rho_matches_sampled_displacement():
    spheres = [
        (M2, SphereSpec("x1", -2)),
        (M2, SphereSpec("x1", -4)),
        (CASE3, SphereSpec("x1", -1)),
        (CASE3, SphereSpec("x2", -2)),
        (CASE4, SphereSpec("x1", -2)),
        (CASE2, SphereSpec("x1", -2)),   # r < |c|
        (CASE2, SphereSpec("x2", -2)),   # r < |c|, derived branch
    ]
    for m, sph in spheres:
        assert verify_rho(m, sph, count=32) == 32


def test_rho_excluded_at_radius_equal_c_norm():
    # case-2 map: |c|_5 = 1/5; the sphere of that exact radius is excluded
    with pytest.raises(NotApplicableError):
        rho(CASE2, SphereSpec("x1", -1))
    with pytest.raises(NotApplicableError):
        rho(CASE2, SphereSpec("x2", -1))
    # per-point table still available there
    table = displacement_table(CASE2, SphereSpec("x1", -1), count=24)
    assert len(table) == 24


def test_rho_requires_invariant_sphere():
    with pytest.raises(NotApplicableError):
        rho(M2, SphereSpec("x1", -1))  # r = alpha is not invariant
    with pytest.raises(NotApplicableError):
        rho(CASE4, SphereSpec("x2", -1))  # case 4: nothing invariant around x2


# -- isometry -----------------------------------------------------------------------


def test_isometry_on_worked_spheres():
    for m, sph in [
        (M2, SphereSpec("x1", -2)),
        (M2, SphereSpec("x1", -3)),
        (CASE2, SphereSpec("x1", -2)),
        (CASE3, SphereSpec("x2", -1)),
        (CASE4, SphereSpec("x1", -1)),
    ]:
        rep = isometry_check(m, sph, count=16)
        assert rep.pairs_checked == 120


def test_isometry_includes_seeded_mode():
    rep = isometry_check(M2, SphereSpec("x1", -2), count=12, seed=99)
    assert rep.pairs_checked == 66


# -- minimal invariant ball -----------------------------------------------------------


def test_minimal_invariant_ball_with_oracle():
    assert minimal_invariant_ball(M2, SphereSpec("x1", -2), verify_with_oracle=True) == -3
    # case-3 sphere: the minimal ball is the whole-radius level
    assert minimal_invariant_ball(CASE3, SphereSpec("x2", -1), verify_with_oracle=True) == -1
    # p = 3 sphere with rho two levels inside the radius
    assert minimal_invariant_ball(CASE4, SphereSpec("x1", -1), verify_with_oracle=True) == -2


# -- theorem ---------------------------------------------------------------------------


def test_theorem_p2_center_x1():
    assert ergodicity_theorem(M2, SphereSpec("x1", -2)).verdict == "ergodic"
    assert ergodicity_theorem(M2, SphereSpec("x1", -3)).verdict == "notErgodic"


def test_theorem_p_ge_3_rule():
    v = ergodicity_theorem(CASE4, SphereSpec("x1", -1))
    assert v.verdict == "notErgodic" and v.reason == "pGe3Rule"


def test_theorem_p2_center_x2_rule():
    m = CanonicalMap(2, 1, 4)  # case 2 at p = 2: x2-centered spheres exist
    v = ergodicity_theorem(m, SphereSpec("x2", -1))
    assert v.verdict == "notErgodic" and v.reason == "radiusRule"


def test_theorem_requires_invariance():
    with pytest.raises(NotApplicableError):
        ergodicity_theorem(M2, SphereSpec("x1", 0))


# -- rescaling and the mod-4 criterion ---------------------------------------------------


def test_rescale_coefficients_and_bounds():
    rm = rescale_to_unit(M2, -2)
    assert rm.numerator == (0, 1)
    assert rm.denominator == (1, 2, 8)
    # numerator sums are fixed: A1 = 1, A2 = 0
    assert sum(rm.numerator[1::2]) == 1 and sum(rm.numerator[0::2]) == 0


def test_rescale_rejects_non_invariant_radius():
    with pytest.raises(NotApplicableError):
        rescale_to_unit(M2, -1)
    with pytest.raises(NotApplicableError):
        rescale_to_unit(CASE3, -1)  # p != 2


def test_rescaled_identity_on_unit_samples():
    for e in (-2, -3, -4):
        assert verify_rescaled(M2, e, [Fraction(k) for k in (1, 3, 5, 7, -1, -3)]) == 6


def test_mod4_identity_map_is_not_ergodic():
    v = mod4_criterion([0, 1], [1])
    assert not v.ergodic and v.case is None
    assert (v.sums.A1, v.sums.A2, v.sums.B1, v.sums.B2) == (1, 0, 0, 1)


def test_mod4_on_rescaled_maps():
    rm = rescale_to_unit(M2, -2)
    v = mod4_criterion(rm.numerator, rm.denominator)
    assert v.ergodic and v.case == 3
    assert v.sums.B1 == 2 and v.sums.B2 == 9
    rm = rescale_to_unit(M2, -3)
    v = mod4_criterion(rm.numerator, rm.denominator)
    assert not v.ergodic


def test_mod4_swapped_case_detected():
    # swap numerator and denominator of an ergodic case-3 instance
    rm = rescale_to_unit(M2, -2)
    v = mod4_criterion(rm.denominator, rm.numerator)
    assert v.ergodic and v.case == 5


def test_mod4_rejects_bad_inputs():
    with pytest.raises(ValueError):
        mod4_criterion([0, Fraction(1, 2)], [1])  # not a 2-adic integer
    with pytest.raises(ValueError):
        mod4_criterion([0, 2], [1])  # 2t does not preserve the odd units


# -- residue cycle oracle ------------------------------------------------------------------


def test_oracle_single_cycle_structure_when_ergodic():
    res = residue_cycle_oracle(M2, SphereSpec("x1", -2), depth=8)
    assert res.ergodic
    for lv in res.levels:
        assert lv.ball_count == 2 ** (lv.level - 1)
        assert lv.cycle_count == 1
        assert lv.cycle_lengths == (lv.ball_count,)


def test_oracle_detects_non_ergodicity():
    res = residue_cycle_oracle(M2, SphereSpec("x1", -3), depth=8)
    assert not res.ergodic
    assert any(lv.cycle_count >= 2 for lv in res.levels)


def test_oracle_p3_multiple_cycles():
    res = residue_cycle_oracle(CASE4, SphereSpec("x1", -1), depth=5)
    assert not res.ergodic
    assert all(lv.ball_count == 2 * 3 ** (lv.level - 1) for lv in res.levels)


def test_oracle_csv_format():
    res = residue_cycle_oracle(M2, SphereSpec("x1", -2), depth=3)
    lines = res.to_csv().strip().splitlines()
    assert lines[0] == "level,ball_count,cycle_count,cycle_lengths"
    assert lines[1] == "1,1,1,1"
    assert lines[2] == "2,2,1,2"
    assert lines[3] == "3,4,1,4"


def test_oracle_validates_arguments():
    with pytest.raises(ValueError):
        residue_cycle_oracle(M2, SphereSpec("x1", -2), depth=1)
    with pytest.raises(NotApplicableError):
        residue_cycle_oracle(M2, SphereSpec("x1", 3))


# -- Haar measure -----------------------------------------------------------------------


def test_haar_measure_examples():
    # in Q_2 the sphere S_r(0) is a single ball of radius r/2
    ctx = HaarMeasureContext(2, SphereSpec("x1", -2))
    assert haar_measure(ctx, -3) == 1
    # p=3, r=1, ball radius 1/3: half the sphere
    ctx = HaarMeasureContext(3, SphereSpec("x1", 0))
    assert haar_measure(ctx, -1) == Fraction(1, 2)


def test_haar_measure_agrees_with_residue_counting():
    # S_1(0) in Q_3: units mod 9 are {1,2,4,5,7,8}; V_{1/3}(1) keeps {1,4,7}
    units = [u for u in range(1, 9) if u % 3]
    hit = [u for u in units if (u - 1) % 3 == 0]
    ctx = HaarMeasureContext(3, SphereSpec("x1", 0))
    assert haar_measure(ctx, -1) == Fraction(len(hit), len(units))


def test_haar_measure_normalization():
    for p, e, d in [(2, -2, -5), (3, 0, -2), (5, -1, -3)]:
        ctx = HaarMeasureContext(p, SphereSpec("x1", e))
        assert ctx.ball_count(d) * ctx.measure(d) == 1


def test_haar_measure_containment_errors():
    ctx = HaarMeasureContext(3, SphereSpec("x1", 0))
    with pytest.raises(ValueError):
        ctx.measure(0)
    with pytest.raises(ValueError):
        ctx.measure(1)


# -- combined agreement ---------------------------------------------------------------------


def test_triple_agreement_p2():
    for e in range(-2, -7, -1):
        d = decide_ergodicity(M2, SphereSpec("x1", e))
        assert d.verdict == ("ergodic" if e == -2 else "notErgodic")
        if e == -2:
            assert d.mod4.case == 3 and d.oracle.ergodic


def test_agreement_on_x2_spheres():
    d = decide_ergodicity(CASE3, SphereSpec("x2", -1))
    assert d.verdict == "notErgodic" and d.mod4 is None
    m = CanonicalMap(2, 1, 4)
    d = decide_ergodicity(m, SphereSpec("x2", -1))
    assert d.verdict == "notErgodic"


def test_radius_twice_displacement_iff_ergodic_p2():
    # on every invariant x1-centered sphere of a p = 2 map, the theorem
    # verdict is "ergodic" exactly when r = 2 rho(r)
    import random

    from padicdyn import InconsistentParametersError
    from padicdyn.padic import _fraction_valuation

    rng = random.Random(1212)
    tried = 0
    seen_ergodic = 0
    while tried < 200:
        a = Fraction(rng.randint(-30, 30), rng.randint(1, 15))
        c = Fraction(rng.randint(-30, 30), rng.randint(1, 15))
        if a == 0 or c == 0:
            continue
        m = CanonicalMap(2, a, c)
        try:
            bound = m.invariant_spheres().x1_exponent_bound
        except InconsistentParametersError:
            continue
        tried += 1
        vc = _fraction_valuation(c, 2)
        for e in range(bound - 1, bound - 4, -1):
            if e == -vc:
                continue
            sphere = SphereSpec("x1", e)
            verdict = ergodicity_theorem(m, sphere).verdict
            assert (e == rho(m, sphere) + 1) == (verdict == "ergodic")
            seen_ergodic += verdict == "ergodic"
    assert seen_ergodic > 0


def test_measure_preservation_via_permutation():
    # the oracle's well-definedness + bijectivity checks passing means each
    # level is a permutation of equal-measure balls: preimages preserve measure
    res = residue_cycle_oracle(CASE3, SphereSpec("x2", -1), depth=3)
    ctx = HaarMeasureContext(5, SphereSpec("x2", -1))
    for lv in res.levels:
        mu = ctx.measure(-1 - lv.level)
        assert lv.ball_count * mu == 1
