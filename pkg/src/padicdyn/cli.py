"""Command-line front end: analyze / orbit / ergodic / periodic / conjugate.

All analysis lives in the library modules; this module only parses
arguments, composes module operations and serializes reports. JSON output
is deterministic (sorted keys, exact rational strings and integer
exponents, no floats, no timestamp unless --timestamp is passed).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .conjugation import GeneralMap, conjugate, verify_conjugacy
from .dynamics import CanonicalMap, SphereSpec, orbit
from .errors import (
    InconsistentParametersError,
    NotApplicableError,
    PrecisionError,
    UnsupportedCaseError,
)
from .ergodicity import (
    decide_ergodicity,
    isometry_check,
    minimal_invariant_ball,
    rho,
    verify_rho,
)
from .padic import INFINITY, TruncatedPadic, parse_rational
from .periodic import three_periodic_from_q, two_periodic, verify_orbit_structure

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNSUPPORTED = 2


def _frac(x: Fraction) -> str:
    return str(x)


def _exp(v):
    """Serialize a p-exponent / valuation: int, or "inf" / "-inf" markers."""
    if v is INFINITY:
        return "inf"
    return v


def _point(x) -> str:
    if isinstance(x, TruncatedPadic):
        return str(x)
    return _frac(x)


def _region_dict(region):
    return {
        "kind": region.kind,
        "center": _frac(region.center),
        "radius_exponent": region.radius_exponent,
        "open": True,
    }


def _fixed_point_dict(report):
    return {
        "point": _frac(report.point),
        "kind": report.kind,
        "case": report.case,
        "multiplier": _frac(report.multiplier),
        "multiplier_norm_exponent": _exp(report.multiplier_norm_exponent),
        "superattracting": report.superattracting,
        "region": _region_dict(report.region),
    }


def _map_dict(m: CanonicalMap):
    v_alpha, v_beta = m.alpha_beta()
    poles = m.poles()
    return {
        "p": m.p,
        "a": _frac(m.a),
        "c": _frac(m.c),
        "fixed_points": {"x1": "0", "x2": _frac(m.x2)},
        "alpha_norm_exponent": -v_alpha,
        "beta_norm_exponent": -v_beta,
        "discriminant": _frac(m.discriminant),
        "discriminant_is_square_in_qp": m.discriminant_is_square(),
        "poles": {"kind": poles.kind, "values": [_point(x) for x in poles.values]},
    }


def _analyze_report(m: CanonicalMap, input_echo, conjugation_block=None):
    cls = m.classify()
    inv = m.invariant_spheres()
    report = {
        "command": "analyze",
        "input": input_echo,
        "map": _map_dict(m),
        "classification": {
            "case": cls.case,
            "x1": _fixed_point_dict(cls.x1),
            "x2": _fixed_point_dict(cls.x2),
        },
        "invariant_spheres": {
            "x1": {"radius_exponent_bound_exclusive": inv.x1_exponent_bound},
            "x2": (
                None
                if inv.x2_exponent_bound is None
                else {"radius_exponent_bound_exclusive": inv.x2_exponent_bound}
            ),
        },
        "version": __version__,
    }
    if conjugation_block is not None:
        report["conjugation"] = conjugation_block
    return report


def _conjugation_dict(m: GeneralMap, result):
    return {
        "fixed_point_cubic": [_frac(c) for c in m.fixed_point_cubic()],
        "x1": _frac(result.x1),
        "x2": _frac(result.x2),
        "B": _frac(result.B),
        "D": _frac(result.D),
        "family": result.family,
        "canonical": (
            None
            if result.canonical is None
            else {
                "p": result.canonical.p,
                "a": _frac(result.canonical.a),
                "c": _frac(result.canonical.c),
            }
        ),
    }


def _emit(args, report, human_lines) -> None:
    if args.timestamp:
        report = dict(report)
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    if args.json:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        for line in human_lines:
            print(line)


# -- subcommand handlers ------------------------------------------------------


def _cmd_analyze(args) -> int:
    four_param = args.b is not None or args.d is not None
    if four_param:
        if args.b is None or args.d is None:
            raise ValueError("four-parameter input needs all of --a --b --c --d")
        gm = GeneralMap(args.p, args.a, args.b, args.c, args.d)
        result = conjugate(gm)
        if result.canonical is None:
            raise UnsupportedCaseError(
                "double fixed point is not at the origin (three-parameter family); "
                "no analysis available",
                label="three-parameter",
            )
        m = result.canonical
        input_echo = {
            "p": args.p,
            "a": _frac(gm.a),
            "b": _frac(gm.b),
            "c": _frac(gm.c),
            "d": _frac(gm.d),
        }
        conj_block = _conjugation_dict(gm, result)
    else:
        m = CanonicalMap(args.p, args.a, args.c)
        input_echo = {"p": args.p, "a": _frac(m.a), "c": _frac(m.c)}
        conj_block = None
    report = _analyze_report(m, input_echo, conj_block)
    cls = m.classify()
    lines = [
        f"f(x) = {m.a}*x / (x^2 + {m.c}*x + {m.a}) over Q_{m.p}",
        f"alpha = {m.p}^{report['map']['alpha_norm_exponent']}, "
        f"beta = {m.p}^{report['map']['beta_norm_exponent']}",
        f"case {cls.case}: x1 = 0 is {cls.x1.kind}; x2 = {m.x2} is {cls.x2.kind}",
        f"x2 multiplier = {cls.x2.multiplier}, "
        f"|f'(x2)|_{m.p} = {m.p}^-({_exp(cls.x2.multiplier_norm_exponent)})",
        f"x1 region: {cls.x1.region.kind} U_({m.p}^{cls.x1.region.radius_exponent})({cls.x1.region.center})",
        f"x2 region: {cls.x2.region.kind} U_({m.p}^{cls.x2.region.radius_exponent})({cls.x2.region.center})",
    ]
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_orbit(args) -> int:
    m = CanonicalMap(args.p, args.a, args.c)
    result = orbit(m, args.x0, args.steps, mode=args.mode, precision=args.precision)
    report = {
        "command": "orbit",
        "input": {
            "p": args.p,
            "a": _frac(m.a),
            "c": _frac(m.c),
            "x0": _frac(parse_rational(args.x0) if isinstance(args.x0, str) else args.x0),
            "steps": args.steps,
        },
        "mode": result.mode,
        "points": [_point(x) for x in result.points],
        "distance_exponents": {
            "x1": list(result.dist_x1_exponents),
            "x2": list(result.dist_x2_exponents),
        },
        "pole_hit": (
            None
            if result.pole_hit is None
            else {"step": result.pole_hit.step, "point": _frac(result.pole_hit.point)}
        ),
        "version": __version__,
    }
    lines = [f"orbit mode: {result.mode}, steps completed: {result.steps_completed}"]
    for k, (e1, e2) in enumerate(zip(result.dist_x1_exponents, result.dist_x2_exponents)):
        lines.append(f"step {k}: |x - x1| = p^{e1}, |x - x2| = p^{e2}")
    if result.pole_hit is not None:
        lines.append(f"pole hit at step {result.pole_hit.step}: {result.pole_hit.point}")
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_ergodic(args) -> int:
    m = CanonicalMap(args.p, args.a, args.c)
    sphere = SphereSpec(args.center, args.radius_exp)
    decision = decide_ergodicity(m, sphere, depth=args.oracle_depth)
    try:
        rho_exp = rho(m, sphere)
        verify_rho(m, sphere, count=args.samples, seed=args.seed)
        displacement = {
            "rho_exponent": rho_exp,
            "samples_checked": args.samples,
            "matches_samples": True,
        }
        ball_exp = minimal_invariant_ball(m, sphere)
    except NotApplicableError:
        displacement = {
            "rho_exponent": None,
            "note": "radius equals |c|_p; displacement is point-dependent",
        }
        ball_exp = None
    iso = isometry_check(m, sphere, count=args.samples, seed=args.seed)
    report = {
        "command": "ergodic",
        "input": {
            "p": args.p,
            "a": _frac(m.a),
            "c": _frac(m.c),
            "center": args.center,
            "radius_exponent": args.radius_exp,
            "oracle_depth": decision.oracle.depth,
            "samples": args.samples,
            "seed": args.seed,
        },
        "sphere": {
            "center": sphere.center,
            "center_point": _frac(m.center_point(sphere.center)),
            "radius_exponent": sphere.radius_exponent,
        },
        "theorem": {"verdict": decision.theorem.verdict, "reason": decision.theorem.reason},
        "mod4": (
            None
            if decision.mod4 is None
            else {
                "ergodic": decision.mod4.ergodic,
                "case": decision.mod4.case,
                "sums": {
                    "A1": _frac(decision.mod4.sums.A1),
                    "A2": _frac(decision.mod4.sums.A2),
                    "B1": _frac(decision.mod4.sums.B1),
                    "B2": _frac(decision.mod4.sums.B2),
                    "residues_mod4": list(decision.mod4.sums.residues()),
                },
            }
        ),
        "oracle": {
            "depth": decision.oracle.depth,
            "ergodic": decision.oracle.ergodic,
            "levels": [
                {
                    "level": lv.level,
                    "ball_count": lv.ball_count,
                    "cycle_count": lv.cycle_count,
                    "cycle_lengths": list(lv.cycle_lengths),
                }
                for lv in decision.oracle.levels
            ],
        },
        "agreement": True,
        "displacement": displacement,
        "minimal_invariant_ball_exponent": ball_exp,
        "isometry": {"pairs_checked": iso.pairs_checked, "ok": True},
        "verdict": decision.verdict,
        "version": __version__,
    }
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(decision.oracle.to_csv())
    lines = [
        f"sphere S_({m.p}^{sphere.radius_exponent})({sphere.center}): {decision.verdict}",
        f"theorem: {decision.theorem.verdict} ({decision.theorem.reason})",
        f"oracle (depth {decision.oracle.depth}): "
        f"{'ergodic' if decision.oracle.ergodic else 'notErgodic'}",
    ]
    if decision.mod4 is not None:
        lines.append(
            f"mod-4 criterion: {'ergodic' if decision.mod4.ergodic else 'notErgodic'}"
            + (f" (case {decision.mod4.case})" if decision.mod4.case else "")
        )
    lines.append("all deciders agree")
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_periodic(args) -> int:
    if args.q is not None:
        res = three_periodic_from_q(args.p, args.q)
        m = res.map
        inv = m.invariant_spheres()
        x1_exp = -_val(m, m.a)          # a lies on S_(p^x1_exp)(0)
        x2_exp = _neg_val_or_none(m, m.a + m.c)
        report = {
            "command": "periodic",
            "kind": "three_periodic",
            "input": {"p": args.p, "q": _frac(res.q)},
            "h_q": _frac(res.h),
            "map": {"p": m.p, "a": _frac(m.a), "c": _frac(m.c)},
            "points": [_point(x) for x in res.orbit.points],
            "multiplier_norm_exponent": _exp(res.orbit.multiplier_norm_exponent),
            "p6_at_a": "0",
            "sphere_conditions": {
                "x1_radius_exponent": x1_exp,
                "x1_sphere_invariant": x1_exp < inv.x1_exponent_bound,
                "x2_radius_exponent": x2_exp,
                "x2_sphere_invariant": (
                    inv.x2_exponent_bound is not None
                    and x2_exp is not None
                    and x2_exp < inv.x2_exponent_bound
                ),
            },
            "version": __version__,
        }
        lines = [
            f"3-periodic family: q = {res.q}, a = h(q) = {res.h}, c = {m.c}",
            f"orbit: {' -> '.join(_point(x) for x in res.orbit.points)} -> {res.orbit.points[0]}",
            f"multiplier norm exponent: {_exp(res.orbit.multiplier_norm_exponent)}",
        ]
        _emit(args, report, lines)
        return EXIT_OK
    if args.a is None or args.c is None:
        raise ValueError("periodic needs either --q or both --a and --c")
    m = CanonicalMap(args.p, args.a, args.c)
    orb = two_periodic(m, precision=args.precision)
    if orb is None:
        report = {
            "command": "periodic",
            "kind": "two_periodic",
            "input": {"p": args.p, "a": _frac(m.a), "c": _frac(m.c)},
            "exists": False,
            "reason": "c^2 - 2a is not a nonzero square in Q_p",
            "version": __version__,
        }
        _emit(args, report, ["no 2-periodic orbit: c^2 - 2a is not a nonzero square"])
        return EXIT_OK
    structure = None
    sphere_block = None
    if orb.exact:
        dist_val = _val(m, orb.points[0] - m.x2)
        sphere = SphereSpec("x2", -dist_val)
        if m.sphere_is_invariant(sphere):
            sr = verify_orbit_structure(m, orb, sphere, samples=args.samples, seed=args.seed)
            sphere_block = {"center": "x2", "radius_exponent": sphere.radius_exponent}
            structure = {
                "rho_exponent": sr.rho_exponent,
                "containment_ok": sr.containment_ok,
                "multiplier_norm_exponent": _exp(sr.multiplier_norm_exponent),
                "ball_mapping_checked": sr.ball_mapping_checked,
            }
    report = {
        "command": "periodic",
        "kind": "two_periodic",
        "input": {"p": args.p, "a": _frac(m.a), "c": _frac(m.c)},
        "exists": True,
        "exact": orb.exact,
        "points": [_point(x) for x in orb.points],
        "multiplier_norm_exponent": _exp(orb.multiplier_norm_exponent),
        "on_invariant_sphere": sphere_block,
        "structure": structure,
        "version": __version__,
    }
    lines = [
        f"2-periodic orbit: {{{', '.join(_point(x) for x in orb.points)}}}"
        + ("" if orb.exact else " (truncated)"),
        f"multiplier norm exponent: {_exp(orb.multiplier_norm_exponent)}",
    ]
    _emit(args, report, lines)
    return EXIT_OK


def _val(m: CanonicalMap, x):
    v = m.val(x)
    if v is INFINITY:
        raise ValueError("unexpected zero value")
    return v


def _neg_val_or_none(m: CanonicalMap, x):
    v = m.val(x)
    return None if v is INFINITY else -v


def _cmd_conjugate(args) -> int:
    gm = GeneralMap(args.p, args.a, args.b, args.c, args.d)
    result = conjugate(gm)
    ts = [Fraction(k, 7) for k in range(1, 21)]
    checked = verify_conjugacy(gm, result, ts)
    report = {
        "command": "conjugate",
        "input": {
            "p": args.p,
            "a": _frac(gm.a),
            "b": _frac(gm.b),
            "c": _frac(gm.c),
            "d": _frac(gm.d),
        },
        **_conjugation_dict(gm, result),
        "conjugacy_samples_checked": checked,
        "version": __version__,
    }
    lines = [
        f"fixed-point cubic roots: x1 = {result.x1} (simple), x2 = {result.x2} (double)",
        f"conjugated map: (-({result.x2})t^2 + {result.B}t) / (t^2 + {result.D}t + {result.B})",
        f"family: {result.family}",
    ]
    if result.canonical is not None:
        lines.append(
            f"canonical form: a = {result.canonical.a}, c = {result.canonical.c}"
        )
    _emit(args, report, lines)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


class _CliArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliArgumentError(message)


def _rational(text: str) -> Fraction:
    return parse_rational(text)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=None, help="seed for sampled checks")
    common.add_argument("--samples", type=int, default=32, help="sample count for checks")
    common.add_argument(
        "--timestamp", action="store_true", help="include a generation timestamp"
    )

    parser = _Parser(prog="padicdyn", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    pa = sub.add_parser("analyze", parents=[common], help="classify fixed points")
    pa.add_argument("--p", type=int, required=True)
    pa.add_argument("--a", type=_rational, required=True)
    pa.add_argument("--b", type=_rational, default=None)
    pa.add_argument("--c", type=_rational, required=True)
    pa.add_argument("--d", type=_rational, default=None)
    pa.set_defaults(func=_cmd_analyze)

    po = sub.add_parser("orbit", parents=[common], help="iterate f and profile norms")
    po.add_argument("--p", type=int, required=True)
    po.add_argument("--a", type=_rational, required=True)
    po.add_argument("--c", type=_rational, required=True)
    po.add_argument("--x0", type=_rational, required=True)
    po.add_argument("--steps", type=int, required=True)
    po.add_argument("--mode", choices=("auto", "exact", "truncated"), default="auto")
    po.add_argument("--precision", type=int, default=64)
    po.set_defaults(func=_cmd_orbit)

    pe = sub.add_parser("ergodic", parents=[common], help="decide ergodicity on a sphere")
    pe.add_argument("--p", type=int, required=True)
    pe.add_argument("--a", type=_rational, required=True)
    pe.add_argument("--c", type=_rational, required=True)
    pe.add_argument("--radius-exp", type=int, required=True, dest="radius_exp")
    pe.add_argument("--center", choices=("x1", "x2"), default="x1")
    pe.add_argument("--oracle-depth", type=int, default=None, dest="oracle_depth")
    pe.add_argument("--csv", default=None, help="write the oracle cycle table to a file")
    pe.set_defaults(func=_cmd_ergodic)

    pp = sub.add_parser("periodic", parents=[common], help="construct periodic orbits")
    pp.add_argument("--p", type=int, required=True)
    pp.add_argument("--a", type=_rational, default=None)
    pp.add_argument("--c", type=_rational, default=None)
    pp.add_argument("--q", type=_rational, default=None)
    pp.add_argument("--precision", type=int, default=32)
    pp.set_defaults(func=_cmd_periodic)

    pc = sub.add_parser("conjugate", parents=[common], help="reduce a four-parameter map")
    pc.add_argument("--p", type=int, required=True)
    pc.add_argument("--a", type=_rational, required=True)
    pc.add_argument("--b", type=_rational, required=True)
    pc.add_argument("--c", type=_rational, required=True)
    pc.add_argument("--d", type=_rational, required=True)
    pc.set_defaults(func=_cmd_conjugate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (UnsupportedCaseError, InconsistentParametersError, NotApplicableError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except PrecisionError as exc:
        print(f"precision: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
