"""Acceptance criteria, each run at its stated scale and tolerance.

Every test records one PASS/FAIL line. Pytest shows the lines in an
"acceptance criteria" section of its summary. Running this file directly
prints them as each criterion finishes.
"""

import contextlib
import io
import json
import tempfile
import time
from pathlib import Path

import pytest

from radlie import cli
from radlie.lab import InstanceSpec, run_suite

SEED = 42
RESULTS: list[str] = []


def _record(number: int, label: str, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {label}: {detail}"
    RESULTS.append(line)
    return line


def _report(number, label, ok, detail):
    print(_record(number, label, ok, detail))
    return ok


def _suite(name, trials, **kw):
    spec = InstanceSpec(trials=trials, seed=SEED, **kw)
    start = time.perf_counter()
    rep = run_suite(name, spec)
    return rep, time.perf_counter() - start


def _describe(rep, seconds):
    return (f"{rep.trials} trials, {len(rep.failures)} failures, "
            f"{len(rep.numerical_errors)} numerical errors, "
            f"{rep.hypothesis_not_met} skipped, max residual {rep.max_residual:.2e}, "
            f"{seconds:.1f}s")


@pytest.mark.slow
def test_acc01_bracket_ideal_in_radical():
    rep, secs = _suite("t43", 200, ambient_n=6, lie_dim=5)
    mixed = sum(v for k, v in rep.observations.items() if k.startswith("family_mixed"))
    ok = rep.passed and secs < 120 and mixed > 0
    assert _report(1, "[j,g] in rad A(g) in Q_A", ok,
                   _describe(rep, secs) + f", mixed-family instances {mixed}"), rep.to_json()


@pytest.mark.slow
def test_acc02_sylvester_spectrum_and_resolvent():
    rep, secs = _suite("rosenblum", 100, ambient_n=8)
    assert _report(2, "Sylvester spectrum and contour resolvent", rep.passed,
                   _describe(rep, secs)), rep.to_json()


@pytest.mark.slow
def test_acc03_ad_eigenvector_nilpotent():
    rep, secs = _suite("cor34", 100)
    ok = rep.passed and rep.hypothesis_not_met == 0
    assert _report(3, "ad-eigenvector power vanishes", ok, _describe(rep, secs)), \
        rep.to_json()


@pytest.mark.slow
def test_acc04_commutator_quasinilpotent():
    rep, secs = _suite("ks", 100)
    ident = rep.observations.get("max_identity_residual", 0.0)
    ok = rep.passed and ident < 1e-6
    assert _report(4, "commuting commutator is quasi-nilpotent", ok,
                   _describe(rep, secs) + f", conjugation identity {ident:.1e}"), rep.to_json()


@pytest.mark.slow
def test_acc05_radical_oracle():
    rep, secs = _suite("radical-oracle", 50)
    assert _report(5, "trace-form radical equals definitional radical", rep.passed,
                   _describe(rep, secs)), rep.to_json()


@pytest.mark.slow
def test_acc06_quotient_spectrum():
    rep, secs = _suite("quotient-spectrum", 50)
    assert _report(6, "spectra survive the quotient by the radical", rep.passed,
                   _describe(rep, secs)), rep.to_json()


@pytest.mark.slow
def test_acc07_functional_calculus():
    rep, secs = _suite("funcalc", 100, ambient_n=16)
    assert _report(7, "contour functional calculus", rep.passed,
                   _describe(rep, secs)), rep.to_json()


@pytest.mark.slow
def test_acc08_structural_lemmas():
    parts, ok = [], True
    for name in ("lemma27", "prop26", "lemma32", "radii"):
        rep, secs = _suite(name, 100)
        ok = ok and rep.passed
        parts.append(f"{name} {len(rep.failures)}/{rep.trials} failed")
        if name == "lemma27":
            worst_m = max(int(k[2:]) for k in rep.observations if k.startswith("m="))
            ok = ok and worst_m <= 6
            parts.append(f"largest m {worst_m}")
        if name == "prop26":
            checks = rep.observations.get("nest_checks", 0)
            ok = ok and checks > 0
            parts.append(f"{checks} nest equivalence checks")
    assert _report(8, "nilpotency, vanishing degree, centre and radius lemmas", ok,
                   ", ".join(parts))


@pytest.mark.slow
def test_acc09_unbounded_exponential():
    rep, secs = _suite("unbounded-exp", 50)
    ratio = rep.observations.get("min_growth_ratio", 0.0)
    ok = rep.passed and ratio >= 1.0
    assert _report(9, "exp of nilpotents grows, Exp/Log round-trip", ok,
                   _describe(rep, secs) + f", min growth / floor {ratio:.3g}"), rep.to_json()


@pytest.mark.slow
def test_acc10_deterministic_verify_all():
    outs, times, codes = [], [], []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            path = Path(tmp) / f"run{k}.json"
            argv = ["verify", "--suite", "all", "--seed", str(SEED), "--format", "json",
                    "--no-timing", "--output", str(path)]
            start = time.perf_counter()
            # the report is read back from the file
            with contextlib.redirect_stdout(io.StringIO()):
                codes.append(cli.main(argv))
            times.append(time.perf_counter() - start)
            outs.append(path.read_text())
    same = outs[0] == outs[1]
    suites = len(json.loads(outs[0]))
    ok = same and max(times) < 300 and codes == [0, 0]
    assert _report(10, "verify-all is deterministic", ok,
                   f"{suites} suites, identical={same}, exit codes {codes}, "
                   f"runs {times[0]:.0f}s / {times[1]:.0f}s")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_acc")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
