import json
from io import StringIO
from pathlib import Path

import pytest

from twistconj.cli import run
from twistconj.presentations import parse_presentation

DATA = Path(__file__).resolve().parent.parent / "data"


def cli(*argv):
    out, err = StringIO(), StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv):
    code, out, err = cli(*argv, "--format", "structured")
    assert code == 0, err
    return json.loads(out)


# -- documented examples ---------------------------------------------------------

def test_reidemeister_of_negation_on_z():
    code, out, _ = cli("reidemeister", "--group", DATA / "z.ab", "--aut", DATA / "neg.aut")
    assert code == 0 and out.strip() == "R(phi) = 2"


def test_burnside_on_s3():
    code, out, _ = cli("verify-burnside", "--group", DATA / "s3.cayley", "--aut", DATA / "inner01.aut")
    assert code == 0 and out.strip() == "R=3 S=3 OK"


def test_snf_text_and_golden_structured():
    code, out, _ = cli("snf", DATA / "m.txt")
    assert code == 0 and out.splitlines()[0] == "D = diag(2, 4)"
    assert "U" in out and "V" in out
    assert structured("snf", DATA / "m.txt") == {
        "command": "snf",
        "U": [[1, 0], [3, -1]],
        "D": [[2, 0], [0, 4]],
        "V": [[1, -2], [0, 1]],
        "diagonal": [2, 4],
    }


def test_golden_twisted_classes_structured():
    assert structured("twisted-classes", "--group", DATA / "s3.cayley",
                      "--aut", DATA / "inner01.aut") == {
        "command": "twisted-classes",
        "reidemeister": 3,
        "classes": [
            {"representative": "e", "members": ["e", "(012)", "(021)"]},
            {"representative": "(01)", "members": ["(01)"]},
            {"representative": "(12)", "members": ["(12)", "(02)"]},
        ],
    }


def test_other_reidemeister_numbers():
    assert structured("reidemeister", "--group", DATA / "z2cat.ab")["reidemeister"] == 1
    assert structured("reidemeister", "--group", DATA / "z.ab")["infinite"] is True
    # Z/2 + Z/6 with (1, 5): coker(phi - id) = Z/2 + Z/2
    assert structured("reidemeister", "--group", DATA / "z4z6.ab")["reidemeister"] == 4
    assert structured("reidemeister", "--group", DATA / "s4.perm")["reidemeister"] == 5


def test_structured_output_is_deterministic():
    argv = ("decide", "--group", DATA / "dinf.pc", "--x", "b", "--y", "b a", "--format", "structured")
    assert cli(*argv) == cli(*argv)


def test_info_text():
    code, out, _ = cli("info", "--group", DATA / "s3.cayley")
    assert code == 0
    assert "order: 6" in out and "conjugacy classes: 3" in out


# -- decide, separate, verify ---------------------------------------------------------

def test_decide_and_verify_round_trip(tmp_path):
    for y, verdict in (("a^3", "conjugate"), ("a^2", "not conjugate")):
        code, out, _ = cli("decide", "--group", DATA / "zneg.pc", "--x", "a", "--y", y)
        assert code == 0
        cert = tmp_path / f"{verdict.replace(' ', '_')}.cert"
        cert.write_text(out)
        code, vout, _ = cli("verify-cert", "--group", DATA / "zneg.pc", "--x", "a", "--y", y, cert)
        assert code == 0 and vout.strip() == "OK"
        assert structured("decide", "--group", DATA / "zneg.pc", "--x", "a", "--y", y)["verdict"] == verdict


def test_invalid_certificate_exits_1(tmp_path):
    cert = tmp_path / "bad.cert"
    cert.write_text("witness a^2\n")
    code, out, _ = cli("verify-cert", "--group", DATA / "zneg.pc", "--x", "a", "--y", "a^3", cert)
    assert code == 1 and out.startswith("INVALID")


def test_budget_exhaustion_saves_resumable_state(tmp_path):
    state = tmp_path / "state.json"
    argv = ("decide", "--group", DATA / "dinf.pc", "--x", "b a^-1", "--y", "b a^5",
            "--budget", "200", "--state", state)
    code, out, _ = cli(*argv)
    assert code == 1 and "budget exceeded" in out and state.exists()
    first = json.loads(state.read_text())
    assert first["a"]["steps"] == first["b"]["steps"] == 200
    code, _, _ = cli(*argv)
    assert code == 1
    assert json.loads(state.read_text())["a"]["steps"] == 400


def test_parallel_flag_gives_same_certificate():
    argv = ("decide", "--group", DATA / "dinf.pc", "--x", "b a", "--y", "b a^3")
    assert cli(*argv) == cli(*argv, "--parallel")


def test_separate_all_classes():
    d = structured("separate", "--group", DATA / "s3.cayley", "--aut", DATA / "inner01.aut")
    assert d["quotient_order"] == 6 and len(d["images"]) == 6
    d = structured("separate", "--group", DATA / "z.ab", "--aut", DATA / "neg.aut", "--x", "1", "--y", "2")
    assert d["verdict"] == "not conjugate" and d["moduli"] == [2]
    d = structured("separate", "--group", DATA / "dinf.pc", "--x", "a", "--y", "a^2")
    assert d["verdict"] == "not conjugate" and d["degree"] == 2


def test_gamma_output_reparses():
    code, out, _ = cli("gamma", "--group", DATA / "dinf.pc")
    assert code == 0
    P = parse_presentation(out)
    assert P.generators == ("t", "b", "a")
    code, out, _ = cli("gamma", "--group", DATA / "free2.fp")
    assert parse_presentation(out).ngens == 3


def test_figures_are_written(tmp_path):
    png = tmp_path / "classes.png"
    code, _, _ = cli("twisted-classes", "--group", DATA / "s4.perm", "--figure", png)
    assert code == 0 and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    png2 = tmp_path / "burnside.png"
    code, out, _ = cli("verify-burnside", "--group", DATA / "s3.cayley", "--all", "--figure", png2)
    assert code == 0 and png2.stat().st_size > 0
    assert out.count("OK") == 6


# -- errors -------------------------------------------------------------------------

@pytest.mark.parametrize("text,where", [
    ("kind pc\ngen a order inf\ngen b order 2\nconj b ^ a = c\n", ":4:"),
    ("kind cayley\norder 2\n0 1\n1 x\n", ":4:"),
    ("kind abelian\nrank one\n", ":2:"),
])
def test_input_errors_carry_positions(tmp_path, text, where):
    f = tmp_path / "g.txt"
    f.write_text(text)
    code, _, err = cli("info", "--group", f)
    assert code == 2
    assert f"{f}{where}" in err


def test_usage_errors_exit_2():
    assert cli("twisted-classes", "--group", DATA / "dinf.pc")[0] == 2
    assert cli("decide", "--group", DATA / "z.pc", "--x", "q", "--y", "a")[0] == 2
    assert cli("decide", "--group", DATA / "z.pc", "--x", "a", "--y", "a", "--budget", "0")[0] == 2
    assert cli("reidemeister", "--group", DATA / "nonexistent.ab")[0] == 2
    assert cli()[0] == 2


def test_relators_without_heuristic_exit_2(tmp_path):
    f = tmp_path / "t.fp"
    f.write_text("kind fp\ngens a b\nrel a b a^-1 b^-1\n")
    code, _, err = cli("decide", "--group", f, "--x", "a", "--y", "b")
    assert code == 2 and "undecidable" in err
