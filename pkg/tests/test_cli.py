import json

import numpy as np
import pytest

from radlie import cli
from radlie.lab import suites
from radlie.lab.report import TrialOutcome


def _pairs(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, complex)]


@pytest.fixture
def write(tmp_path):
    def _write(ambient_dim, gens, lie_basis=None, raw=None):
        data = raw if raw is not None else {
            "ambient_dim": ambient_dim,
            "generators": [{"name": k, "matrix": _pairs(v)} for k, v in gens.items()],
        }
        if lie_basis is not None:
            data["lie_basis"] = lie_basis
        path = tmp_path / "alg.json"
        path.write_text(json.dumps(data))
        return str(path)
    return _write


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


E12 = np.array([[0, 1], [0, 0]], complex)
I2 = np.eye(2, dtype=complex)


def test_analyze_nilpotent_generator(write, capsys):
    path = write(2, {"e12": E12})
    code, out, _ = run(capsys, "analyze", path, "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["dim"] == 2 and data["radical_dim"] == 1 and data["center_dim"] == 2
    assert data["nilpotent"] == {"e12": True}


def test_analyze_text_output(write, capsys):
    code, out, _ = run(capsys, "analyze", write(2, {"e12": E12}))
    assert code == 0 and "dim A = 2" in out and "e12: nilpotent" in out


def test_malformed_row_exits_2(write, capsys):
    raw = {"ambient_dim": 2, "generators": [{"name": "a", "matrix": [[[0, 0], [1, 0]], [[0, 0]]]}]}
    code, _, err = run(capsys, "analyze", write(2, {}, raw=raw))
    assert code == 2 and "row 1" in err


@pytest.mark.parametrize("raw", [
    [],
    {"ambient_dim": 0, "generators": []},
    {"ambient_dim": 2, "generators": {}},
    {"ambient_dim": 1, "generators": [{"name": "a", "matrix": [[[1, "x"]]]}]},
    {"ambient_dim": 1, "generators": [{"name": "a", "matrix": [[[1, 0]]]},
                                      {"name": "a", "matrix": [[[1, 0]]]}]},
    {"ambient_dim": 1, "generators": [], "lie_basis": ["ghost"]},
])
def test_bad_inputs_exit_2(write, capsys, raw):
    assert run(capsys, "analyze", write(1, {}, raw=raw))[0] == 2


def test_missing_file_and_bad_json(tmp_path, capsys):
    assert run(capsys, "analyze", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "analyze", str(bad))[0] == 2


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["analyze"])
    assert exc.value.code == 2


def test_funcalc_exp_text_digits(write, capsys):
    path = write(2, {"a": np.diag([0, 1])})
    code, out, _ = run(capsys, "funcalc", path, "--element", "a", "--fn", "exp")
    assert code == 0 and "2.718281828459" in out


def test_funcalc_json_matches_expm(write, capsys):
    from scipy.linalg import expm
    a = np.array([[1, 2], [0.5j, -1]], complex)
    path = write(2, {"a": a})
    code, out, _ = run(capsys, "funcalc", path, "--element", "a", "--fn", "exp", "--format",
                       "json")
    res = np.array([[complex(*z) for z in row] for row in json.loads(out)["result"]])
    assert code == 0 and np.allclose(res, expm(a), rtol=1e-10)


def test_funcalc_poly_and_log(write, capsys):
    path = write(2, {"e": E12, "u": I2 + E12})
    code, out, _ = run(capsys, "funcalc", path, "--element", "e", "--fn", "poly",
                       "--coeffs", "0,0,1", "--format", "json")
    assert code == 0
    assert np.allclose(np.array(json.loads(out)["result"]), 0)
    code, out, _ = run(capsys, "funcalc", path, "--element", "u", "--fn", "log", "--format",
                       "json")
    res = np.array([[complex(*z) for z in row] for row in json.loads(out)["result"]])
    assert code == 0 and np.allclose(res, E12)


def test_funcalc_inverse(write, capsys):
    a = np.array([[2, 1], [0, -3]], complex)
    path = write(2, {"a": a, "e": E12})
    code, out, _ = run(capsys, "funcalc", path, "--element", "a", "--fn", "inv", "--format",
                       "json")
    res = np.array([[complex(*z) for z in row] for row in json.loads(out)["result"]])
    assert code == 0 and np.allclose(res @ a, np.eye(2))
    code, _, err = run(capsys, "funcalc", path, "--element", "e", "--fn", "inv")
    assert code == 3 and "spectrum" in err


def test_funcalc_poly_needs_coeffs(write, capsys):
    path = write(2, {"e": E12})
    assert run(capsys, "funcalc", path, "--element", "e", "--fn", "poly")[0] == 2
    assert run(capsys, "funcalc", path, "--element", "zz", "--fn", "exp")[0] == 2


def test_spectrum_radius(write, capsys):
    path = write(2, {"d": np.diag([3, -4])})
    code, out, _ = run(capsys, "spectrum", path, "--element", "d", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["spectral_radius"] == pytest.approx(4.0)
    assert sorted(v[0] for v in data["eigenvalues"]) == pytest.approx([-4.0, 3.0])


def test_cartan_of_borel(write, capsys):
    e11, e22 = np.diag([1, 0]), np.diag([0, 1])
    path = write(2, {"e11": e11, "e22": e22, "e12": E12}, lie_basis=["e11", "e22", "e12"])
    code, out, _ = run(capsys, "cartan", path, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["cartan_dim"] == 2 and len(data["roots"]) == 1
    assert data["fitting_plus_dim"] == 1


def test_cartan_without_lie_basis(write, capsys):
    assert run(capsys, "cartan", write(2, {"e": E12}))[0] == 2


def test_sylvester_spectrum_and_resolvent(write, capsys):
    path = write(2, {"a1": np.diag([1, 2]), "a2": np.diag([-1, 0]), "i": I2})
    code, out, _ = run(capsys, "sylvester", path, "--a1", "a1", "--a2", "a2", "--format", "json")
    assert code == 0
    assert sorted(v[0] for v in json.loads(out)["spectrum"]) == pytest.approx([1, 2, 2, 3])
    path = write(2, {"i": I2})
    code, out, _ = run(capsys, "sylvester", path, "--a1", "i", "--a2", "i", "--lambda", "10",
                       "--rhs", "i", "--format", "json")
    data = json.loads(out)
    sol = np.array([[complex(*z) for z in row] for row in data["solution"]])
    assert code == 0 and np.allclose(sol, 0.1 * I2) and data["residual"] < 1e-12


def test_sylvester_lambda_without_rhs(write, capsys):
    path = write(2, {"i": I2})
    assert run(capsys, "sylvester", path, "--a1", "i", "--a2", "i", "--lambda", "3")[0] == 2


def test_verify_rejects_zero_trials(capsys):
    assert run(capsys, "verify", "--suite", "lemma27", "--trials", "0")[0] == 2


def test_verify_json_round_trip(tmp_path, capsys):
    out_file = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "--suite", "prop26", "--trials", "3", "--seed", "5",
                       "--jobs", "1", "--format", "json", "--output", str(out_file))
    assert code == 0
    data = json.loads(out)
    assert data == json.loads(out_file.read_text())
    assert data["suite"] == "prop26" and data["trials"] == 3 and data["failures"] == []


def test_verify_seed_from_environment(monkeypatch, capsys):
    args = ("verify", "--suite", "lemma27", "--trials", "2", "--jobs", "1", "--format", "json",
            "--no-timing")
    monkeypatch.setenv("RADLIE_SEED", "17")
    from_env = run(capsys, *args)[1]
    monkeypatch.delenv("RADLIE_SEED")
    explicit = run(capsys, *args, "--seed", "17")[1]
    other = run(capsys, *args, "--seed", "18")[1]
    assert from_env == explicit
    assert from_env != other or "max_residual\": 0.0" in from_env


def test_verify_bad_environment_seed(monkeypatch, capsys):
    monkeypatch.setenv("RADLIE_SEED", "abc")
    assert run(capsys, "verify", "--suite", "lemma27", "--trials", "1")[0] == 2


def _failing(spec, rng):
    return TrialOutcome(False, residual=1.0, witness={"note": "forced"})


def _crashing(spec, rng):
    raise np.linalg.LinAlgError("forced")


def test_verify_violation_exits_1_and_records_seed(monkeypatch, capsys):
    sid, _ = suites.SUITES["lemma27"]
    monkeypatch.setitem(suites.SUITES, "lemma27", (sid, _failing))
    code, out, _ = run(capsys, "verify", "--suite", "lemma27", "--trials", "2", "--seed", "9",
                       "--jobs", "1", "--format", "json")
    data = json.loads(out)
    assert code == 1 and len(data["failures"]) == 2
    assert {f["trial"] for f in data["failures"]} == {0, 1}
    assert all(f["seed"] == 9 for f in data["failures"])


def test_verify_numerical_error_exits_3(monkeypatch, capsys):
    sid, _ = suites.SUITES["lemma27"]
    monkeypatch.setitem(suites.SUITES, "lemma27", (sid, _crashing))
    code, out, _ = run(capsys, "verify", "--suite", "lemma27", "--trials", "2", "--jobs", "1",
                       "--format", "json")
    assert code == 3 and len(json.loads(out)["numerical_errors"]) == 2
