import json

import pytest

from milnork.cli import main, parse_algebra_file
from milnork.errors import MilnorkError


@pytest.fixture()
def t3_spec(tmp_path):
    path = tmp_path / "t3.spec"
    path.write_text("variables: t\nrelations: t^3\n")
    return str(path)


@pytest.fixture()
def q_spec(tmp_path):
    path = tmp_path / "q.spec"
    path.write_text("variables:\nrelations:\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_parse_algebra_file_keys():
    spec = parse_algebra_file("variables: t, sigma\nrelations: t^2\nsigma: sigma\norder: 3\n")
    assert spec.variables == ("t", "sigma")
    assert "sigma^3" in spec.relations
    assert spec.distinguished == "sigma"
    with pytest.raises(MilnorkError):
        parse_algebra_file("variables: t\norder: 2\n")
    with pytest.raises(MilnorkError):
        parse_algebra_file("bad line")


def test_omega_command(capsys, t3_spec):
    code, out = run(capsys, "omega", "--algebra", t3_spec, "--p", "1", "--format", "record")
    assert code == 0
    assert "omega.dim=2" in out


def test_omega_rejects_negative_p(capsys, t3_spec):
    code, _ = run(capsys, "omega", "--algebra", t3_spec, "--p", "-1")
    assert code == 2


def test_usage_error_exit_2(capsys):
    assert main(["omega"]) == 2
    assert main(["no-such-command"]) == 2


def test_missing_file_exit_2(capsys):
    code, _ = run(capsys, "omega", "--algebra", "/nonexistent.spec", "--p", "1")
    assert code == 2


def test_bad_algebra_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.spec"
    bad.write_text("variables: x\nrelations: x^2 - x\n")
    code, _ = run(capsys, "algebra-info", "--algebra", str(bad))
    assert code == 2


def test_algebra_info(capsys, t3_spec):
    code, out = run(capsys, "algebra-info", "--algebra", t3_spec, "--format", "record")
    assert code == 0
    assert "algebra.dimension=3" in out
    assert "algebra.basis=1;t;t^2" in out


def test_decomposition_command(capsys, t3_spec):
    code, out = run(capsys, "decomposition", "--algebra", t3_spec, "--n", "2", "--p", "2",
                    "--format", "record")
    assert code == 0
    assert "decomposition.verdict=corrected" in out


def test_phi_and_theorem2(capsys, t3_spec):
    code, out = run(capsys, "phi", "--algebra", t3_spec, "--n", "1", "--p", "2",
                    "--format", "record")
    assert code == 0
    assert "phi.count=" in out
    code, out = run(capsys, "theorem2", "--algebra", t3_spec, "--n", "1", "--p", "2",
                    "--format", "record")
    assert code == 0
    assert "span.spans=true" in out


def test_tangent_span(capsys, t3_spec):
    code, out = run(capsys, "tangent-span", "--algebra", t3_spec, "--p", "2",
                    "--format", "record")
    assert code == 0
    assert "span.spans=true" in out


def test_certify_commands(capsys, q_spec, tmp_path):
    code, out = run(capsys, "certify-eq7", "--algebra", q_spec, "--c", "2", "--n", "1",
                    "--format", "record")
    assert code == 0
    assert "certificate.valid=true" in out
    assert "crosscheck.all_agree=true" in out

    saved = tmp_path / "cert.json"
    code, out = run(capsys, "certify-eq8", "--algebra", q_spec, "--c", "1", "--n", "1",
                    "--format", "record", "--save", str(saved))
    assert code == 0
    assert "crosscheck.final_zero=true" in out

    # round trip through the serializer, then check the loaded certificate
    code, out = run(capsys, "certify-eq8", "--load", str(saved), "--format", "record")
    assert code == 0
    assert "certificate.valid=true" in out


def test_certify_needs_args(capsys, q_spec):
    code, _ = run(capsys, "certify-eq7", "--algebra", q_spec)
    assert code == 2


def test_certify_precision_override(capsys, q_spec):
    code, out = run(capsys, "certify-eq7", "--algebra", q_spec, "--c", "2", "--n", "1",
                    "--precision", "12", "--format", "record")
    assert code == 0 and "crosscheck.precision=12" in out
    code, _ = run(capsys, "certify-eq7", "--algebra", q_spec, "--c", "2", "--n", "1",
                  "--precision", "3")
    assert code == 2  # too small to represent the atoms


def test_certify_non_unit_c_exit_2(capsys, tmp_path):
    spec = tmp_path / "t2.spec"
    spec.write_text("variables: t\nrelations: t^2\n")
    code, _ = run(capsys, "certify-eq7", "--algebra", str(spec), "--c", "t", "--n", "1")
    assert code == 2


def test_certify_rejects_corrupted_file(capsys, q_spec, tmp_path):
    saved = tmp_path / "cert.json"
    assert run(capsys, "certify-eq8", "--algebra", q_spec, "--c", "1", "--n", "1",
               "--save", str(saved))[0] == 0
    doc = json.loads(saved.read_text())
    for step in doc["steps"]:
        if step["rule"] == "entry_identity":
            step["payload"]["atoms"][0][0] += " + 1"
            break
    saved.write_text(json.dumps(doc))
    code, out = run(capsys, "certify-eq8", "--load", str(saved), "--format", "record")
    assert code == 1
    assert "certificate.valid=false" in out


def test_tau_command(capsys, tmp_path):
    spec = tmp_path / "b.spec"
    spec.write_text("variables: t, sigma\nrelations: t^2, sigma^3, t*sigma\nsigma: sigma\n")
    code, out = run(capsys, "tau", "--algebra", str(spec), "--n", "2", "--format", "record")
    assert code == 0
    assert "tau.surjective=true" in out
    assert "tau.compatible=true" in out


def test_tower_command(capsys, tmp_path):
    tower = tmp_path / "t.tower"
    tower.write_text("dims: 2, 2, 2\nmap 0: 1, 0; 0, 1\nmap 1: 1, 0; 0, 1\n")
    code, out = run(capsys, "tower", "--tower", str(tower), "--format", "record")
    assert code == 0
    assert "limit.dim=2" in out
    assert "limit.stabilized=true" in out


def test_output_file(capsys, t3_spec, tmp_path):
    target = tmp_path / "report.txt"
    code, out = run(capsys, "omega", "--algebra", t3_spec, "--p", "1",
                    "--format", "record", "--output", str(target))
    assert code == 0 and out == ""
    assert "omega.dim=2" in target.read_text()


def test_suite_towers_deterministic(capsys):
    code1, out1 = run(capsys, "suite", "towers", "--format", "record")
    code2, out2 = run(capsys, "suite", "towers", "--format", "record")
    assert code1 == code2 == 0
    assert out1 == out2
    assert "summary.failed=0" in out1
