import json
import math

import pytest
from click.testing import CliRunner

from qubitjm.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return _run


@pytest.fixture
def pair_file(tmp_path):
    def _make(a, b, name="pair.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"A": {"x": a[0], "m": list(a[1])}, "B": {"x": b[0], "m": list(b[1])}}))
        return path

    return _make


def test_check_fig_a_pair(run, pair_file):
    res = run("check", pair_file((-0.1, (0.8, 0, 0)), (0.3, (0, 0.5, 0))))
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["agree"] is True
    assert {v["decision"] for v in doc["verdicts"].values()} == {"JointlyMeasurable"}
    assert set(doc["derived"]) == {"F_x", "F_y", "gamma", "R", "alpha", "beta", "s"}


def test_check_sharp_orthogonal(run, pair_file):
    res = run("check", pair_file((0, (1, 0, 0)), (0, (0, 1, 0))))
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert {v["decision"] for v in doc["verdicts"].values()} == {"NotJointlyMeasurable"}


def test_check_parallel_emits_strings_for_nan(run, pair_file):
    res = run("check", pair_file((0, (0.5, 0, 0)), (0, (0.3, 0, 0))))
    doc = json.loads(res.output)
    assert doc["derived"]["R"] == "nan"
    assert doc["verdicts"]["thm2"]["margin"] == "inf"


@pytest.mark.parametrize("text", ['{"A":', '{"A":{"x":0,"m":[1,0]},"B":{"x":0,"m":[0,0,0]}}',
                                  '{"A":{"x":0.5,"m":[0.6,0,0]},"B":{"x":0,"m":[0,0,0]}}', '[]'])
def test_malformed_input(run, tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert run("check", p).exit_code == 1
    assert run("construct", p).exit_code == 1
    assert run("check", tmp_path / "missing.json").exit_code == 1


def test_construct_cases(run, pair_file):
    res = run("construct", pair_file((0, (0.7, 0, 0)), (0, (0, 0.7, 0))))
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["case"] == "ThmThreeA"
    assert doc["effects"]["+1+1"]["c0"] == pytest.approx(0.25)
    assert doc["verification"]["passed"] is True
    res = run("construct", pair_file((0, (0.7, 0, 0)), (0, (0.5, 0, 0))))
    assert json.loads(res.output)["case"] == "ProductS0"
    assert run("construct", pair_file((0, (1, 0, 0)), (0, (0, 1, 0)))).exit_code == 2


def _csv(text):
    lines = text.strip().split("\n")
    return lines[0], [tuple(float(v) for v in row.split(",")) for row in lines[1:] if "=" not in row]


def test_boundary_fig_a(run):
    res = run("boundary", "--x", -0.1, "--m", 0.8, "--y", 0.3, "--angles", 360)
    assert res.exit_code == 0
    header, rows = _csv(res.output)
    assert header == "theta,n_max" and len(rows) == 360
    n = [r[1] for r in rows]
    # grid minimum sits just above the true minimum n_c = 0.5423532...
    assert 0.542354 - 1e-6 <= min(n) <= 0.542354 + 1e-5
    assert max(n) == pytest.approx(0.7, abs=1e-12)
    srh = run("boundary", "--x", -0.1, "--m", 0.8, "--y", 0.3, "--angles", 360, "--criterion", "srh")
    assert max(abs(a[1] - b[1]) for a, b in zip(rows, _csv(srh.output)[1])) <= 1e-6


def test_boundary_output_is_stable(run):
    args = ("boundary", "--x", 0.1, "--m", 0.5, "--y", -0.2, "--angles", 25)
    first, second = run(*args), run(*args)
    assert first.output == second.output
    assert "\r" not in first.output


def test_boundary_near_sharp_partner(run):
    _, rows = _csv(run("boundary", "--x", -0.1, "--m", 0.8, "--y", 0.999, "--angles", 9).output)
    assert all(r[1] == pytest.approx(0.001, abs=1e-12) for r in rows)


@pytest.mark.parametrize("args", [
    ("boundary", "--x", 0.5, "--m", 0.8, "--y", 0.1),
    ("boundary", "--x", 0.0, "--m", 0.5, "--y", 0.1, "--angles", 1),
    ("boundary", "--x", "abc", "--m", 0.5, "--y", 0.1),
    ("tradeoff", "--x", 0, "--y", 0, "--costheta", 2),
    ("tradeoff", "--x", 0, "--y", 0),
    ("fuzz", "--samples", 0),
    ("identities", "--samples", -1),
])
def test_invalid_parameters(run, args):
    assert run(*args).exit_code == 1


def test_tradeoff_output(run):
    res = run("tradeoff", "--x", -0.1, "--y", 0.2, "--costheta", 0.3, "--points", 31)
    assert res.exit_code == 0
    lines = res.output.strip().split("\n")
    assert lines[0] == "m,n_max" and lines[-1].startswith("m0=")
    m0 = float(lines[-1][3:])
    _, rows = _csv(res.output)
    assert rows[0][0] == 0 and rows[-1][0] == pytest.approx(0.9)
    tail = [n for m, n in rows if m > m0]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))


def test_tradeoff_unbiased(run):
    _, rows = _csv(run("tradeoff", "--x", 0, "--y", 0, "--costheta", 0, "--points", 11).output)
    for m, n in rows:
        assert n == pytest.approx(math.sqrt(max(1 - m * m, 0.0)), abs=1e-11)


def test_fuzz_command(run):
    args = ("fuzz", "--samples", 1500, "--seed", 3, "--oracle-samples", 40)
    first, second = run(*args), run(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    doc = json.loads(first.output)
    assert doc["disagreement_count"] == 0 and doc["oracle_agree"] == 40


def test_identities_command(run):
    res = run("identities", "--samples", 500, "--seed", 2)
    assert res.exit_code == 0
    lines = res.output.strip().split("\n")
    assert lines[0] == "identity,max_residual,pass"
    assert any(l.startswith("s2R_product,") for l in lines)
    assert any(l.startswith("bs_mixed_sign,") for l in lines)
    assert run("identities", "--samples", 50, "--threshold", 0).exit_code == 3


def test_simulate(run, pair_file):
    p = pair_file((0, (0.7, 0, 0)), (0, (0, 0.7, 0)))
    res = run("simulate", p, "--n", 200000, "--seed", 4)
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert sum(doc["counts"].values()) == 200000
    assert doc["max_abs_z"] <= 5
    assert run("simulate", p, "--n", 200000, "--seed", 4).output == res.output
    polar = json.loads(run("simulate", p, "--state", "1,0,0", "--n", 100000).output)
    assert polar["frequencies"]["A+"] == pytest.approx(0.85, abs=0.01)


def test_simulate_errors(run, pair_file):
    assert run("simulate", pair_file((0, (1, 0, 0)), (0, (0, 1, 0)))).exit_code == 2
    p = pair_file((0, (0.7, 0, 0)), (0, (0, 0.7, 0)))
    assert run("simulate", p, "--state", "1,1,0").exit_code == 1
    assert run("simulate", p, "--state", "a,b").exit_code == 1
