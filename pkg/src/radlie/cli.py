"""Command-line entry point.

Exit codes: 0 success, 1 a theorem check found a violation, 2 bad usage or
input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import numeric as nk
from .algebra import center, generate_algebra, is_nilpotent, radical
from .errors import DimensionError, NumericalFailure, PreconditionError
from .lab import InstanceSpec, SUITE_NAMES, run_suite
from .lab.suites import default_jobs
from .lie import cartan_subalgebra, make_lie_subalgebra, root_decomposition
from .numeric import TolerancePolicy
from .spectral import INV, auto_contour, exp_matrix, holo_calc, horner_matrix, log_unipotent, spectrum
from .sylvester import SylvesterOperator, dense_resolve, rosenblum_resolve, sylvester_spectrum

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
# twelve digits after the leading one, e.g. 2.718281828459
DIGITS = 13
# text output drops parts below this fraction of the largest entry
NOISE = 1e-14


class InputError(ValueError):
    """Malformed or inconsistent input file or flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input files
# ---------------------------------------------------------------------------

@dataclass
class AlgebraFile:
    ambient_dim: int
    generators: dict[str, np.ndarray]
    lie_basis: list[np.ndarray] | None = None

    def element(self, name: str) -> np.ndarray:
        if name not in self.generators:
            raise InputError(f"no generator named {name!r}")
        return self.generators[name]


def parse_matrix(raw, n: int, label: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != n:
        raise InputError(f"{label}: expected {n} rows")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"{label}: row {i} must have {n} entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                               for v in entry)):
                raise InputError(f"{label}: entry ({i}, {j}) must be a [re, im] pair")
            out[i, j] = complex(entry[0], entry[1])
    if not np.all(np.isfinite(out)):
        raise InputError(f"{label}: entries must be finite")
    return out


def parse_algebra_file(data) -> AlgebraFile:
    if not isinstance(data, dict):
        raise InputError("top level must be an object")
    n = data.get("ambient_dim")
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= nk.MAX_N:
        raise InputError(f"ambient_dim must be an integer in [1, {nk.MAX_N}]")
    gens_raw = data.get("generators")
    if not isinstance(gens_raw, list):
        raise InputError("generators must be a list")
    gens: dict[str, np.ndarray] = {}
    for k, g in enumerate(gens_raw):
        if not isinstance(g, dict) or not isinstance(g.get("name"), str):
            raise InputError(f"generator {k} needs a string name")
        name = g["name"]
        if name in gens:
            raise InputError(f"duplicate generator name {name!r}")
        gens[name] = parse_matrix(g.get("matrix"), n, f"generator {name!r}")
    lie = None
    if data.get("lie_basis") is not None:
        if not isinstance(data["lie_basis"], list):
            raise InputError("lie_basis must be a list")
        lie = []
        for k, item in enumerate(data["lie_basis"]):
            if isinstance(item, str):
                if item not in gens:
                    raise InputError(f"lie_basis refers to unknown generator {item!r}")
                lie.append(gens[item])
            else:
                lie.append(parse_matrix(item, n, f"lie_basis[{k}]"))
    return AlgebraFile(n, gens, lie)


def load_algebra_file(path: str) -> AlgebraFile:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return parse_algebra_file(data)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _num(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.{DIGITS}g}"
    return f"{z.real:.{DIGITS}g}{z.imag:+.{DIGITS}g}j"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_json(m: np.ndarray) -> list:
    return [[_pair(v) for v in row] for row in np.asarray(m)]


def _denoise(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    cut = NOISE * max(1.0, float(np.abs(m).max(initial=0.0)))
    re, im = m.real.copy(), m.imag.copy()
    re[np.abs(re) <= cut] = 0.0
    im[np.abs(im) <= cut] = 0.0
    return re + 1j * im


def matrix_text(m: np.ndarray) -> str:
    rows = [[_num(v) for v in row] for row in _denoise(m)]
    width = max((len(s) for row in rows for s in row), default=0)
    return "\n".join("  ".join(s.rjust(width) for s in row) for row in rows)


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _tolerance(t: float) -> TolerancePolicy:
    # --tol is the residual threshold; rank and spectral tolerances track it
    return TolerancePolicy(rank_tol=t / 10, spec_tol=t * 10, residual_tol=t)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    af = load_algebra_file(args.file)
    tol = _tolerance(args.tol)
    gens = list(af.generators.values())
    A = generate_algebra(gens, af.ambient_dim, tol)
    rad = radical(A, tol)
    cen = center(A, tol)
    flags = {name: bool(is_nilpotent(m, tol)) for name, m in af.generators.items()}
    payload = {
        "ambient_dim": af.ambient_dim,
        "dim": A.dim,
        "radical_dim": int(rad.shape[0]),
        "radical_basis": [matrix_json(b) for b in rad],
        "center_dim": int(cen.shape[0]),
        "nilpotent": flags,
    }
    lines = [f"dim A = {A.dim}", f"dim rad A = {rad.shape[0]}", f"dim Z(A) = {cen.shape[0]}"]
    for k, b in enumerate(rad):
        lines += [f"radical basis [{k}]:", matrix_text(b)]
    lines += [f"{name}: {'nilpotent' if f else 'not nilpotent'}" for name, f in flags.items()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _funcalc(a: np.ndarray, fn: str, coeffs, tol: TolerancePolicy) -> np.ndarray:
    if fn == "exp":
        return exp_matrix(a, cross_check=True, tol=tol)
    if fn == "poly":
        return horner_matrix(coeffs, a)
    if fn == "log":
        return log_unipotent(a, tol)
    # inv
    vals = nk.eigenvalues(a)
    if vals.size and float(np.abs(vals).min()) <= tol.spec_tol * nk.scale_of(a):
        raise PreconditionError("0 is in the spectrum; the element is not invertible")
    contour = auto_contour(a)
    if INV.admits(contour):
        return holo_calc(INV, a, contour, tol)
    # no single circle around the spectrum misses 0
    return np.linalg.solve(a, np.eye(a.shape[0]))


def _parse_coeffs(raw: str | None) -> list[complex]:
    if raw is None:
        raise InputError("--fn poly needs --coeffs")
    try:
        coeffs = [complex(c.strip().replace(" ", "")) for c in raw.split(",") if c.strip()]
    except ValueError as exc:
        raise InputError(f"bad --coeffs: {exc}") from exc
    if not coeffs:
        raise InputError("--coeffs is empty")
    return coeffs


def cmd_funcalc(args) -> int:
    af = load_algebra_file(args.file)
    a = af.element(args.element)
    coeffs = _parse_coeffs(args.coeffs) if args.fn == "poly" else None
    tol = _tolerance(args.tol)
    fa = _funcalc(a, args.fn, coeffs, tol)
    payload = {"element": args.element, "fn": args.fn, "result": matrix_json(fa)}
    _emit(args, payload, matrix_text(fa))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    af = load_algebra_file(args.file)
    a = af.element(args.element)
    rep = spectrum(a, _tolerance(args.tol))
    vals = sorted(rep.eigenvalues, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    payload = {"element": args.element, "eigenvalues": [_pair(v) for v in vals],
               "spectral_radius": rep.spectral_radius,
               "clusters": [{"value": _pair(c.mean), "multiplicity": c.multiplicity}
                            for c in rep.clusters]}
    text = "\n".join([f"eigenvalues: {', '.join(_num(v) for v in vals)}",
                      f"spectral radius: {rep.spectral_radius:.{DIGITS}g}"])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_cartan(args) -> int:
    af = load_algebra_file(args.file)
    if not af.lie_basis:
        raise InputError("cartan needs a lie_basis in the input file")
    tol = _tolerance(args.tol)
    g = make_lie_subalgebra(af.lie_basis, af.ambient_dim, tol)
    h = cartan_subalgebra(g, seed=args.seed, tol=tol)
    dec = root_decomposition(g, h, seed=args.seed, tol=tol)
    payload = {
        "lie_dim": g.dim,
        "cartan_dim": h.dim,
        "cartan_basis": [matrix_json(b) for b in h.basis],
        "roots": [{"values": [_pair(v) for v in r.values], "dim": int(r.basis.shape[0]),
                   "basis": [matrix_json(b) for b in r.basis]} for r in dec.roots],
        "fitting_null_dim": h.dim,
        "fitting_plus_dim": int(dec.fitting_plus.shape[0]),
    }
    lines = [f"dim g = {g.dim}", f"dim h = {h.dim}", f"roots: {len(dec.roots)}"]
    for k, r in enumerate(dec.roots):
        vals = ", ".join(_num(v) for v in r.values)
        lines.append(f"  root {k}: values on h basis ({vals}), dim {r.basis.shape[0]}")
    lines.append(f"Fitting dims: h {h.dim}, g+ {dec.fitting_plus.shape[0]}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _parse_complex(raw: str, flag: str) -> complex:
    try:
        return complex(raw.replace(" ", ""))
    except ValueError as exc:
        raise InputError(f"bad {flag}: {raw!r}") from exc


def cmd_sylvester(args) -> int:
    af = load_algebra_file(args.file)
    op = SylvesterOperator(af.element(args.a1), af.element(args.a2))
    tol = _tolerance(args.tol)
    spec = sorted(sylvester_spectrum(op), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    payload: dict = {"a1": args.a1, "a2": args.a2, "spectrum": [_pair(v) for v in spec]}
    lines = [f"spectrum: {', '.join(_num(v) for v in spec)}"]
    if (args.lam is None) != (args.rhs is None):
        raise InputError("--lambda and --rhs must be given together")
    if args.lam is not None:
        lam = _parse_complex(args.lam, "--lambda")
        y = af.element(args.rhs)
        x = rosenblum_resolve(op, lam, y, tol)
        resid = float(np.linalg.norm(lam * x - op(x) - y) / max(1.0, np.linalg.norm(y)))
        oracle = float(np.linalg.norm(x - dense_resolve(op, lam, y))
                       / max(1.0, np.linalg.norm(x)))
        payload.update({"lambda": _pair(lam), "solution": matrix_json(x), "residual": resid,
                        "dense_gap": oracle})
        lines += [f"solution of lambda x - (a1 x - x a2) = {args.rhs}:", matrix_text(x),
                  f"residual: {resid:.3e}", f"dense oracle gap: {oracle:.3e}"]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("RADLIE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"RADLIE_SEED must be an integer, got {env!r}") from exc


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    if args.jobs is not None and args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    try:
        spec = InstanceSpec(ambient_n=args.dim, lie_dim=args.max_lie_dim, trials=args.trials,
                            seed=_resolve_seed(args.seed), tol=_tolerance(args.tol))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    jobs = default_jobs() if args.jobs is None else args.jobs
    reports = [run_suite(name, spec, jobs) for name in names]
    dicts = [r.to_dict(include_elapsed=not args.no_timing) for r in reports]
    if args.format == "json":
        body = dicts[0] if len(dicts) == 1 else dicts
        text = json.dumps(body, sort_keys=True, indent=2)
    else:
        text = "\n".join(r.summary_line() if not args.no_timing
                         else r.summary_line().rsplit(" elapsed_ms=", 1)[0] for r in reports)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    if any(r.failures for r in reports):
        return EXIT_VIOLATION
    if any(r.numerical_errors for r in reports):
        return EXIT_NUMERICAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from exc
    if not (np.isfinite(value) and 0 < value < 1e-1):
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 0.1)")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="radlie", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, with_file=True):
        if with_file:
            sp.add_argument("file", help="algebra file (JSON)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--tol", type=_positive_float, default=1e-8,
                        help="residual tolerance (default 1e-8)")

    sp = sub.add_parser("analyze", help="dimension, radical, center and nilpotency")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("funcalc", help="evaluate exp, log, inv or a polynomial at an element")
    common(sp)
    sp.add_argument("--element", required=True)
    sp.add_argument("--fn", required=True, choices=("exp", "log", "inv", "poly"))
    sp.add_argument("--coeffs", help="c0,c1,... for --fn poly (complex allowed, e.g. 1+2j)")
    sp.set_defaults(func=cmd_funcalc)

    sp = sub.add_parser("spectrum", help="eigenvalues and spectral radius of an element")
    common(sp)
    sp.add_argument("--element", required=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("cartan", help="Cartan subalgebra and roots of the lie_basis algebra")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_cartan)

    sp = sub.add_parser("sylvester", help="spectrum and resolvent of x -> a1 x - x a2")
    common(sp)
    sp.add_argument("--a1", required=True)
    sp.add_argument("--a2", required=True)
    sp.add_argument("--lambda", dest="lam", help="spectral parameter, e.g. 10 or 1+2j")
    sp.add_argument("--rhs", help="generator name of the right-hand side y")
    sp.set_defaults(func=cmd_sylvester)

    sp = sub.add_parser("verify", help="run seeded verification suites")
    common(sp, with_file=False)
    sp.add_argument("--suite", required=True, choices=SUITE_NAMES + ("all",))
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--dim", type=int, default=6)
    sp.add_argument("--max-lie-dim", type=int, default=5)
    sp.add_argument("--seed", type=int, default=None, help="default: $RADLIE_SEED, else 0")
    sp.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPUs)")
    sp.add_argument("--output", help="also write the report to this file")
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed_ms")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DimensionError) as exc:
        print(f"radlie: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, PreconditionError, np.linalg.LinAlgError) as exc:
        print(f"radlie: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
