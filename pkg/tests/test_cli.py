import json
from pathlib import Path

import pytest

from padicdyn.cli import main

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_COMMANDS = {
    "analyze_case4.json": ["analyze", "--p", "3", "--a", "-2", "--c", "1"],
    "analyze_case2.json": ["analyze", "--p", "5", "--a", "-1", "--c", "5"],
    "ergodic_p2_ergodic.json": ["ergodic", "--p", "2", "--a", "2", "--c", "1", "--radius-exp", "-2"],
    "ergodic_p3_notergodic.json": ["ergodic", "--p", "3", "--a", "-2", "--c", "1", "--radius-exp", "-1"],
    "periodic_two_cycle.json": ["periodic", "--p", "7", "--a", "4", "--c", "3"],
    "conjugate_double_root.json": ["conjugate", "--p", "3", "--a", "1", "--b", "0", "--c", "-1", "--d", "1"],
}


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,argv", sorted(GOLDEN_COMMANDS.items()))
def test_golden_json_byte_identical(capsys, name, argv):
    code, out, _ = run_cli(capsys, argv + ["--json"])
    assert code == 0
    assert out.encode() == (GOLDEN / name).read_bytes()


@pytest.mark.parametrize("name,argv", sorted(GOLDEN_COMMANDS.items()))
def test_json_deterministic_across_runs(capsys, name, argv):
    code1, out1, _ = run_cli(capsys, argv + ["--json"])
    code2, out2, _ = run_cli(capsys, argv + ["--json"])
    assert code1 == code2 == 0 and out1 == out2


def _assert_no_floats(node):
    if isinstance(node, float):
        raise AssertionError(f"float leaked into JSON: {node}")
    if isinstance(node, dict):
        for v in node.values():
            _assert_no_floats(v)
    elif isinstance(node, list):
        for v in node:
            _assert_no_floats(v)


@pytest.mark.parametrize("name,argv", sorted(GOLDEN_COMMANDS.items()))
def test_json_round_trips_without_floats(capsys, name, argv):
    _, out, _ = run_cli(capsys, argv + ["--json"])
    doc = json.loads(out)
    _assert_no_floats(doc)
    assert json.loads(json.dumps(doc)) == doc
    assert doc["version"]


def test_exit_invalid_input(capsys):
    code, _, err = run_cli(capsys, ["analyze", "--p", "7", "--a", "0", "--c", "1"])
    assert code == 1 and "nonzero" in err
    code, _, _ = run_cli(capsys, ["analyze", "--p", "8", "--a", "1", "--c", "1"])
    assert code == 1
    code, _, _ = run_cli(capsys, ["analyze", "--p", "3", "--a", "1.5", "--c", "1"])
    assert code == 1
    code, _, _ = run_cli(capsys, ["analyze", "--p", "3"])
    assert code == 1


def test_exit_unsupported_regimes(capsys):
    # three distinct fixed points
    code, _, err = run_cli(
        capsys, ["conjugate", "--p", "5", "--a", "1", "--b", "0", "--c", "0", "--d", "0"]
    )
    assert code == 2 and "distinct" in err
    # x2 != 0 branch of analyze
    code, _, err = run_cli(
        capsys, ["analyze", "--p", "5", "--a", "1", "--b", "4", "--c", "-5", "--d", "9"]
    )
    assert code == 2
    # non-invariant radius echoes the invariance bound
    code, _, err = run_cli(
        capsys, ["ergodic", "--p", "2", "--a", "2", "--c", "1", "--radius-exp", "-1"]
    )
    assert code == 2 and "radius exponent < -1" in err
    # pole norms outside p**Z (odd v(a) with 2v(c) >= v(a))
    code, _, err = run_cli(capsys, ["analyze", "--p", "3", "--a", "3", "--c", "3"])
    assert code == 2


def test_analyze_four_parameter_routing(capsys):
    code, out, _ = run_cli(
        capsys,
        ["analyze", "--p", "3", "--a", "1", "--b", "0", "--c", "-1", "--d", "1", "--json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["conjugation"]["x2"] == "0"
    assert doc["classification"]["case"] == 4  # a = c^2: superattracting
    assert doc["classification"]["x2"]["superattracting"] is True
    assert doc["classification"]["x2"]["multiplier_norm_exponent"] == "inf"


def test_periodic_three_cycle_command(capsys):
    code, out, _ = run_cli(capsys, ["periodic", "--p", "5", "--q", "1", "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "three_periodic"
    assert doc["h_q"] == "5/24" and doc["map"]["c"] == "-19/24"
    assert doc["points"][0] == "5/24" and len(doc["points"]) == 3
    assert doc["p6_at_a"] == "0"


def test_periodic_none_case(capsys):
    code, out, _ = run_cli(capsys, ["periodic", "--p", "5", "--a", "3", "--c", "1", "--json"])
    assert code == 0
    assert json.loads(out)["exists"] is False


def test_orbit_command_profiles(capsys):
    code, out, _ = run_cli(
        capsys,
        ["orbit", "--p", "3", "--a", "-2", "--c", "1", "--x0", "5", "--steps", "8", "--json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "exact"
    d2 = doc["distance_exponents"]["x2"]
    assert d2[0] == -1 and all(b <= a - 1 for a, b in zip(d2, d2[1:]))


def test_orbit_pole_hit(capsys):
    code, out, _ = run_cli(
        capsys,
        ["orbit", "--p", "3", "--a", "-2", "--c", "1", "--x0", "1", "--steps", "4", "--json"],
    )
    assert code == 0
    assert json.loads(out)["pole_hit"] == {"step": 0, "point": "1"}


def test_ergodic_csv_emission(capsys, tmp_path):
    target = tmp_path / "cycles.csv"
    code, _, _ = run_cli(
        capsys,
        ["ergodic", "--p", "2", "--a", "2", "--c", "1", "--radius-exp", "-2", "--csv", str(target)],
    )
    assert code == 0
    lines = target.read_text().strip().splitlines()
    assert lines[0] == "level,ball_count,cycle_count,cycle_lengths"
    assert len(lines) == 9  # header + depth 8


def test_human_output_mentions_case(capsys):
    code, out, _ = run_cli(capsys, ["analyze", "--p", "3", "--a", "-2", "--c", "1"])
    assert code == 0 and "case 4" in out


def test_x2_centered_ergodic_command(capsys):
    code, out, _ = run_cli(
        capsys,
        ["ergodic", "--p", "5", "--a", "3", "--c", "1", "--radius-exp", "-1",
         "--center", "x2", "--json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "notErgodic"
    assert doc["displacement"]["rho_exponent"] == -1


def test_ergodic_at_excluded_displacement_radius(capsys):
    # radius exactly |c|_2: verdict still decided, displacement reported as
    # point-dependent (rho has no single value there)
    code, out, _ = run_cli(
        capsys,
        ["ergodic", "--p", "2", "--a", "1", "--c", "4", "--radius-exp", "-2", "--json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "notErgodic"
    assert doc["displacement"]["rho_exponent"] is None
    assert doc["minimal_invariant_ball_exponent"] is None
