import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from wellpoised.cli import RunConfig, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    return json.loads(resources.files("wellpoised").joinpath(f"schemas/{name}.schema.json").read_text())


def ok(name, *argv):
    code, out, err = call(name, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    return doc


def test_defaults():
    cfg = RunConfig()
    assert (cfg.precision_bits, cfg.rel_tol, cfg.mc_samples, cfg.mc_seed, cfg.mc_chunks, cfg.quad_nodes) == (
        128,
        1e-20,
        10**6,
        42,
        16,
        64,
    )


def test_series_two_zeta3():
    doc = ok("series", "--h", "2,1,1,1,1,1")
    assert doc["converged"] is True
    assert doc["value"].startswith("2.4041138063")
    assert doc["config"]["precision_bits"] == 128 and "tool_version" in doc


def test_verify_elementary():
    doc = ok("verify", "--h", "5,1,1,1", "--k", "1")
    assert doc["pass"] is True
    assert float(doc["lhs"]) == pytest.approx(1 / 3, rel=1e-12)
    assert float(doc["rhs"]) == pytest.approx(1 / 3, rel=1e-9)


def test_phi():
    doc = ok("phi", "--n", "5")
    assert (doc["Phi_n"], doc["D_n"]) == ("3", "60")
    assert doc["log_phi_over_n"] == pytest.approx(0.2197224577)


def test_zetaform_exact():
    doc = ok("zetaform", "--k", "3", "--n", "1")
    assert doc["form"] == {"q0": "-12", "zeta": {"3": "10"}}


def test_zetaform_from_h():
    doc = ok("zetaform", "--h", "2,1,1,1,1")
    assert doc["form"] == {"q0": "0", "zeta": {"2": "1"}}


def test_inclusion():
    doc = ok("inclusion", "--k", "5", "--n", "1")
    assert doc["pass"] is True


def test_group():
    assert ok("group", "--k", "2")["order"] == 24
    assert ok("group", "--k", "2", "--c")["order"] == 120


def test_integral_quad_and_mc():
    doc = ok("integral", "--a", "1,1,1", "--b", "2,2")
    assert float(doc["value"]) == pytest.approx(1.6449340668, rel=1e-9)
    doc = ok("integral", "--a", "1,1,1", "--b", "2,2", "--method", "mc", "--mc-samples", "100000")
    assert abs(doc["estimate"] - 1.6449340668) < 5 * doc["stderr"]


def test_s_integral():
    doc = ok("s-integral", "--a", "1", "--b", "2", "--c", "1", "--r", "1", "--z", "0.5", "--mc-samples", "200000")
    assert abs(doc["estimate"] - 1.3862943611) < 5 * doc["stderr"]


def test_barnes():
    doc = ok("barnes", "--a", "1,1", "--b", "2", "--z", "-1", "--t0", "0.5", "--tol", "1e-15")
    for key in ("euler", "barnes", "gauss_2f1"):
        assert float(doc[key]) == pytest.approx(0.6931471805599453, rel=1e-9)


def test_contour_recursion_command():
    doc = ok("lemma3", "--a", "1,1,1", "--b", "2,2")
    assert float(doc["lhs"]) == pytest.approx(1.6449340668, rel=1e-8)
    assert float(doc["rhs"]) == pytest.approx(1.6449340668, rel=1e-8)


def test_deterministic_output():
    argv = ("integral", "--a", "1.2,0.8,1.1", "--b", "2.3,2.0", "--method", "mc", "--mc-samples", "50000", "--mc-seed", "9")
    assert call(*argv)[1] == call(*argv)[1]


def test_out_file(tmp_path):
    path = tmp_path / "phi.json"
    code, out, _ = call("phi", "--n", "10", "--out", str(path))
    assert code == 0 and path.read_text() == out
    assert json.loads(out)["config"]["output_path"] == str(path)


@pytest.mark.parametrize(
    "argv",
    [("bogus",), ("series",), ("series", "--h", "1,1", "--nope"), ("phi", "--n", "x"), ()],
)
def test_usage_errors_exit_64(argv):
    code, out, err = call(*argv)
    assert code == 64 and out == "" and err


@pytest.mark.parametrize(
    "argv",
    [
        ("series", "--h", "1,1"),
        ("verify", "--h", "1,1,1,1", "--k", "1"),
        ("integral", "--a", "1,1", "--b", "0.5"),
        ("group", "--k", "5", "--c"),
        ("zetaform", "--k", "2", "--n", "2", "--r-mult", "2"),
        ("series", "--h", "2,1,1", "--prec", "16"),
    ],
)
def test_invalid_input_exit_1(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == "" and "invalid input" in err


def test_convergence_failure_exit_2():
    code, _, err = call("series", "--h", "1,1,1,1,1")
    assert code == 2 and "convergence" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wellpoised", "phi", "--n", "6"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["D_n"] == "60"
