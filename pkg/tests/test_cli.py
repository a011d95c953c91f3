import io
import json
import subprocess
import sys

import pytest

from spherefields.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, FORMAT_ENV, SCHEMA_VERSION, run
from spherefields.generators import generate
from spherefields.vector_field import format_field, parse_field

ROTATION = "dim 3; P1 = -x2; P2 = x1; P3 = 0"


def call(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
    try:
        code = run(list(argv), out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def call_json(*argv, stdin=None):
    code, out, err = call("--format", "json", *argv, stdin=stdin)
    return code, json.loads(out), err


# examples -------------------------------------------------------------------

def test_check_tangent_rotation():
    code, doc, _ = call_json("check-tangent", ROTATION)
    assert code == EXIT_OK
    assert doc["result"]["certificate"]["cofactor"] == "0"
    code, text, _ = call("check-tangent", ROTATION)
    assert "cofactor K = 0" in text


def test_selftest_cubic_kernel():
    code, text, _ = call("selftest", "cubic-kernel-s3")
    assert code == EXIT_OK and "kernel dimension 0" in text


def test_meridians_generated_family():
    fld = generate("thm14_3", {"m": 3}).field
    code, doc, _ = call_json("meridians", format_field(fld))
    assert code == EXIT_OK
    assert len(doc["result"]["finding"]["hyperplanes"]) == 3


# exit codes -----------------------------------------------------------------

@pytest.mark.parametrize("argv,expected", [
    (["check-tangent", "dim 3; P1 = 1; P2 = 0; P3 = 0"], EXIT_NEGATIVE),
    (["decompose", "dim 3; P1 = x1; P2 = 0; P3 = 0"], EXIT_NEGATIVE),
    (["sphere-check", ROTATION, "--a", "1,0,0"], EXIT_NEGATIVE),
    (["sphere-check", ROTATION, "--a", "0,0,1", "--b", "1/2"], EXIT_OK),
    (["hamiltonian", "dim 4; P1 = x3; P2 = 0; P3 = -x1; P4 = 0"], EXIT_NEGATIVE),
    (["hamiltonian", "dim 4; P1 = x2; P2 = -x1; P3 = x4; P4 = -x3"], EXIT_OK),
    (["hamiltonian", "dim 4; P1 = x2; P2 = -x1; P3 = x4; P4 = -x3", "--H", "x1*x2"], EXIT_NEGATIVE),
    (["integrals", ROTATION, "--G", "x3"], EXIT_OK),
    (["integrals", ROTATION, "--G", "x1"], EXIT_NEGATIVE),
    (["integrals", ROTATION, "--G", "x3", "--G", "x3^2"], EXIT_NEGATIVE),
    (["meridians", ROTATION], EXIT_OK),
    (["parallels", ROTATION], EXIT_OK),
    (["extactic", ROTATION, "--kind", "parallel"], EXIT_OK),
    (["project", ROTATION], EXIT_OK),
    (["decompose", ROTATION, "--layered"], EXIT_OK),
    (["generate", "--family", "thm15_parallels", "--params", '{"m": 3}'], EXIT_OK),
    # input errors
    (["check-tangent", "dim 3; P1 = -x2 +; P2 = x1; P3 = 0"], EXIT_INPUT),
    (["check-tangent", "P1 = 1/2*x1^2"], EXIT_INPUT),
    (["hamiltonian", ROTATION], EXIT_INPUT),
    (["project", "dim 3; P1 = 1; P2 = 0; P3 = 0"], EXIT_INPUT),
    (["sphere-check", ROTATION, "--a", "1,0"], EXIT_INPUT),
    (["sphere-check", ROTATION, "--a", "0,0,1", "--b", "2"], EXIT_INPUT),
    (["meridians", ROTATION, "--candidates", "[[1, 0, 1]]"], EXIT_INPUT),
    (["meridians", ROTATION, "--candidates", "[[1, 0"], EXIT_INPUT),
    (["generate", "--family", "thm15_parallels", "--params", '{"ks": ["1"]}'], EXIT_INPUT),
    (["generate", "--family", "thm15_parallels", "--params", "[1]"], EXIT_INPUT),
    (["generate", "--family", "nope"], EXIT_INPUT),
    (["frobnicate"], EXIT_INPUT),
    ([], EXIT_INPUT),
])
def test_exit_codes(argv, expected):
    assert call(*argv)[0] == expected


def test_project_requires_tangent():
    # tangency is a precondition of the projection, not a verdict
    code, doc, _ = call_json("project", "dim 3; P1 = 1; P2 = 0; P3 = 0")
    assert code == EXIT_INPUT and doc["error"]["type"] == "NotTangent"


# input handling -------------------------------------------------------------

def test_parse_error_position():
    code, doc, err = call_json("check-tangent", "dim 3; P1 = -x2 + *x1; P2 = x1; P3 = 0")
    assert code == EXIT_INPUT
    assert doc["error"]["type"] == "ParseError"
    assert (doc["error"]["line"], doc["error"]["column"]) == (1, 19)
    assert "line 1, column 19" in err


def test_parse_error_multiline_file(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("dim 3\nP1 = -x2\nP2 = x1 ^\nP3 = 0\n")
    code, doc, _ = call_json("check-tangent", str(path))
    assert code == EXIT_INPUT and doc["error"]["line"] == 3


def test_file_and_stdin(tmp_path):
    path = tmp_path / "rot.txt"
    path.write_text("dim 3\nP3 = 0\nP1 = -x2\nP2 = x1\n")
    a = call_json("check-tangent", str(path))
    b = call_json("check-tangent", "-", stdin=ROTATION)
    c = call_json("check-tangent", '{"dim": 3, "components": ["-x2", "x1", "0"]}')
    assert a == b == c


def test_field_variants_equal():
    assert parse_field(ROTATION) == parse_field("dim 3\n P2=x1 ; P1 = - x2;P3=0")


def test_missing_file_treated_as_inline():
    code, _, err = call("check-tangent", "no/such/file.txt")
    assert code == EXIT_INPUT and "ParseError" in err


def test_format_env(monkeypatch):
    monkeypatch.setenv(FORMAT_ENV, "json")
    code, out, _ = call("check-tangent", ROTATION)
    assert json.loads(out)["command"] == "check-tangent"
    monkeypatch.setenv(FORMAT_ENV, "yaml")
    assert not call("check-tangent", ROTATION)[1].startswith("{")


# reports --------------------------------------------------------------------

def test_json_envelope():
    code, doc, _ = call_json("parallels", ROTATION)
    assert doc["schemaVersion"] == SCHEMA_VERSION
    assert doc["input"] == {"dim": 3, "components": ["-x2", "x1", "0"]}
    assert doc["verdict"] == "ok"


def test_deterministic_output():
    args = ("generate", "--family", "random", "--params", '{"n": 3, "m": 3}', "--seed", "11")
    assert call("--format", "json", *args)[1] == call("--format", "json", *args)[1]
    fld = generate("thm14_4", {"m": 3}).field
    first = call("--format", "json", "extactic", format_field(fld))[1]
    assert first == call("--format", "json", "extactic", format_field(fld))[1]


def test_verdicts_carry_certificates():
    _, doc, _ = call_json("sphere-check", ROTATION, "--a", "0,0,1", "--b", "1/2")
    assert doc["result"]["certificate"]["cofactor"] is not None
    _, doc, _ = call_json("integrals", ROTATION, "--G", "x3")
    assert doc["result"]["certificate"]["jacobianRank"] == 1
    _, doc, _ = call_json("hamiltonian", "dim 4; P1 = x2; P2 = -x1; P3 = x4; P4 = -x3")
    assert doc["result"]["report"]["H"] == "-1/2*x1^2 - 1/2*x2^2 - 1/2*x3^2 - 1/2*x4^2"


def test_project_output():
    code, doc, _ = call_json("project", ROTATION)
    assert doc["result"]["projected"]["components"] == ["-2*u2", "2*u1"]
    assert doc["result"]["projected"]["radialIdentity"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spherefields", "check-tangent", ROTATION],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "tangent: yes" in proc.stdout
