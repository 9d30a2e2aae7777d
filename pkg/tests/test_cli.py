import json

import pytest

from src.core.commands import parse_params
from src.special.errors import ParameterError


def test_gauss_legendre_two_points(run_cli):
    code, out, _ = run_cli("gauss", "--family", "legendre", "--n", "2")
    assert code == 0
    assert out["schema_version"] == "1"
    assert out["command"] == "gauss"
    assert out["params"]["family"] == "legendre"
    assert "handler" not in out["params"]
    assert out["results"]["nodes"] == pytest.approx([-0.5773502691896258, 0.5773502691896258])
    assert out["results"]["weights"] == pytest.approx([1.0, 1.0])
    assert out["results"]["exactness"] == 3
    assert all(check["passed"] for check in out["checks"])


def test_gauss_with_family_params(run_cli):
    code, out, _ = run_cli("gauss", "--family", "jacobi", "--n", "4", "--params", "alpha=0.5,beta=1.5")
    assert code == 0
    assert out["results"]["measure"]["params"] == {"alpha": 0.5, "beta": 1.5}


def test_gauss_csv(run_cli):
    code, text, _ = run_cli("gauss", "--family", "hermite", "--n", "3", "--format", "csv", raw=True)
    assert code == 0
    assert text.endswith("\n") and not text.endswith("\n\n")
    lines = text.splitlines()
    assert "exactness,5" in lines
    assert "nodes,weights" in lines
    assert lines[-1].startswith("check,exactness,True")


def test_kronrod(run_cli):
    code, out, _ = run_cli("kronrod", "--n", "7")
    assert code == 0
    assert len(out["results"]["nodes"]) == 15
    assert out["results"]["exactness"] >= 22


def test_zeros(run_cli):
    code, out, _ = run_cli("zeros", "--family", "hermite", "--n", "2")
    assert code == 0
    assert out["results"]["zeros"] == pytest.approx([-0.7071067811865476, 0.7071067811865476])


@pytest.mark.parametrize("argv", [
    ("verify", "markov-stieltjes", "--family", "legendre", "--n", "30"),
    ("verify", "nested-sums"),
    ("verify", "gap-bounds", "--family", "hermite"),
    ("verify", "posse", "--jobs", "2"),
    ("verify", "contraction"),
    ("verify", "pade"),
    ("verify", "interlacing", "--n", "5", "10", "20"),
    ("verify", "sw-moments"),
    ("verify", "expansion-bound"),
    ("verify", "second-kind"),
    ("verify", "zero-distribution"),
    ("verify", "elliptic-cf", "--k", "0.5"),
    ("verify", "elliptic-cf"),
])
def test_verify_suites_pass(run_cli, argv):
    code, out, _ = run_cli(*argv)
    assert code == 0
    assert out["results"]["failed"] == 0
    assert out["results"]["checks"] == len(out["checks"]) > 0


def test_markov_stieltjes_reports_every_node(run_cli):
    _, out, _ = run_cli("verify", "markov-stieltjes", "--n", "30")
    assert len(out["checks"]) == 30
    assert all(check["slack"] > 0 for check in out["checks"])


def test_zero_tolerance_fails_check(run_cli):
    code, out, _ = run_cli("verify", "contraction", "--tolerance", "0")
    assert code == 1
    assert not any(check["passed"] for check in out["checks"])


def test_verify_parallel_keeps_case_order(run_cli):
    _, serial, _ = run_cli("verify", "interlacing", "--n", "4", "6", "8")
    _, parallel, _ = run_cli("verify", "interlacing", "--n", "4", "6", "8", "--jobs", "3")
    assert [c["name"] for c in serial["checks"]] == [c["name"] for c in parallel["checks"]]


def test_moments_check_factorials(run_cli, tmp_path):
    path = tmp_path / "moments.json"
    path.write_text(json.dumps({"kind": "stieltjes", "moments": [1, 1, 2, 6, 24]}))
    code, out, _ = run_cli("moments", "check", "--file", str(path))
    assert code == 0
    assert out["results"]["hankel"].startswith("positive_definite")
    assert out["results"]["recurrence"]["b"] == pytest.approx([1.0, 3.0])
    assert out["results"]["recurrence"]["a"] == pytest.approx([1.0, 2.0])


def test_moments_check_shifted_failure(run_cli, tmp_path):
    path = tmp_path / "moments.json"
    path.write_text(json.dumps({"moments": [1.7724538509055159, 0, 0.886226925452758, 0,
                                            1.329340388179137]}))
    code, out, _ = run_cli("moments", "check", "--file", str(path), "--kind", "stieltjes")
    assert code == 1
    assert out["results"]["shifted"].startswith("failed_at(1)")


def test_moments_check_hausdorff(run_cli, tmp_path):
    path = tmp_path / "moments.json"
    path.write_text(json.dumps({"kind": "hausdorff", "moments": [1, 2, 4, 8, 16]}))
    code, out, _ = run_cli("moments", "check", "--file", str(path))
    assert code == 1
    failed = {check["name"] for check in out["checks"] if not check["passed"]}
    assert "complete-monotonicity" in failed


def test_moments_check_rejects_bad_documents(run_cli, tmp_path):
    path = tmp_path / "moments.json"
    path.write_text(json.dumps({"moments": [1, 0, 1], "unexpected": True}))
    code, _, err = run_cli("moments", "check", "--file", str(path))
    assert code == 1
    assert err.startswith("Error:")
    code, _, err = run_cli("moments", "check", "--file", str(tmp_path / "missing.json"))
    assert code == 1


def test_electro_jacobi(run_cli):
    code, out, _ = run_cli("electro", "--n", "5", "--p", "0.75", "--q", "1.25")
    assert code == 0
    assert out["results"]["multiplier"] is None
    assert len(out["results"]["positions"]) == 5


@pytest.mark.parametrize("constraint", ["centroid:2", "inertia:1"])
def test_electro_constrained(run_cli, constraint):
    code, out, _ = run_cli("electro", "--n", "4", "--constraint", constraint)
    assert code == 0
    assert out["results"]["boundary_active"] is True


def test_electro_bad_constraint(run_cli):
    code, _, err = run_cli("electro", "--n", "4", "--constraint", "volume:3")
    assert code == 1
    assert "constraint" in err


def test_asymptotic_legendre(run_cli):
    code, out, _ = run_cli("asymptotic", "legendre", "--n", "50", "--theta", "1.0", "--m", "2")
    assert code == 0
    assert out["results"]["error"] < out["results"]["bound"]


@pytest.mark.parametrize("action", ["k", "fn", "laplace", "cf"])
def test_elliptic_actions(run_cli, action):
    code, out, _ = run_cli("elliptic", action, "--k", "0.5")
    assert code == 0
    assert out["command"] == f"elliptic {action}"


def test_elliptic_k_reports_convention(run_cli):
    _, out, _ = run_cli("elliptic", "k", "--k", "0.5")
    assert out["results"]["K"] == pytest.approx(1.685750354812596)
    assert out["results"]["convention"] == "standard"


def test_elliptic_bad_modulus(run_cli):
    code, _, err = run_cli("elliptic", "k", "--k", "1.5")
    assert code == 1
    assert "modulus" in err


def test_selberg(run_cli):
    code, out, _ = run_cli("selberg", "--n", "1", "--x", "1", "--y", "1", "--z", "7")
    assert code == 0
    assert out["results"]["value"] == 1.0
    assert out["checks"] == []


@pytest.mark.parametrize("method", ["equilibrium", "search"])
def test_fekete(run_cli, method):
    code, out, _ = run_cli("fekete", "--n", "4", "--method", method)
    assert code == 0
    assert out["results"]["points"][0] == pytest.approx(-1.0)


@pytest.mark.parametrize("argv", [
    ("gauss", "--family", "legendre"),
    ("gauss", "--family", "bessel", "--n", "2"),
    ("gauss", "--family", "legendre", "--n", "0"),
    ("verify", "nonsense"),
    ("zeros", "--family", "legendre", "--n", "3", "--unknown"),
])
def test_usage_errors_exit_two(run_cli, argv):
    code, _, _ = run_cli(*argv, raw=True)
    assert code == 2


def test_bad_family_params_exit_one(run_cli):
    code, _, err = run_cli("gauss", "--family", "legendre", "--n", "2", "--params", "alpha=1")
    assert code == 1
    assert err.startswith("Error:")


def test_parse_params():
    assert parse_params("alpha=0.5, beta = 2") == {"alpha": "0.5", "beta": "2"}
    assert parse_params(None) == {}
    with pytest.raises(ParameterError):
        parse_params("alpha")


def test_sw_moments_suite_covers_lambda_grid(run_cli):
    code, out, _ = run_cli("verify", "sw-moments")
    assert code == 0
    names = [check["name"] for check in out["checks"]]
    assert len(names) == 5 * 9
    assert "sw-moments lambda=-1.0 k=8" in names
