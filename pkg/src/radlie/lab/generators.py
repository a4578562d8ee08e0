"""Seeded random instances for the verification suites.

Every generator takes an :class:`InstanceSpec` and a ``numpy`` Generator and
is deterministic in both. Instances are built in a canonical (triangular or
block) frame and then conjugated by a well-conditioned matrix P.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import numeric as nk
from ..algebra import FiniteAlgebra, generate_algebra
from ..errors import DimensionError, PreconditionError
from ..lie import LieSubalgebra, bracket_span, ideal_residual, make_lie_subalgebra, solvable_radical
from ..numeric import DEFAULT_TOL, TolerancePolicy

MAX_RETRIES = 60
DEFAULT_COND = 10.0

FAMILIES = ("solvable", "nilpotent", "mixed-levi", "commuting-pair", "ks-triple")


@dataclass(frozen=True)
class InstanceSpec:
    ambient_n: int = 6
    lie_dim: int = 5
    trials: int = 100
    seed: int = 0
    tol: TolerancePolicy = DEFAULT_TOL
    family: str | None = None
    cond: float = DEFAULT_COND

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 1 <= self.ambient_n <= nk.MAX_N:
            raise ValueError(f"ambient_n must be in [1, {nk.MAX_N}]")
        if self.lie_dim < 1:
            raise ValueError("lie_dim must be at least 1")
        if self.family is not None and self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not 1 <= self.cond <= 100:
            raise ValueError("conjugator condition number must lie in [1, 100]")


def unit(i: int, j: int, n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1
    return m


def complex_normal(rng: np.random.Generator, shape=()) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_normal(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class Conjugator:
    p: np.ndarray
    p_inv: np.ndarray

    def __call__(self, m: np.ndarray) -> np.ndarray:
        return self.p @ m @ self.p_inv

    @property
    def cond(self) -> float:
        return float(np.linalg.cond(self.p))


def conjugator(rng: np.random.Generator, n: int, cond: float = DEFAULT_COND) -> Conjugator:
    """P = U diag(s) V^* with singular values in [1, cond]."""
    u = random_unitary(rng, n)
    v = random_unitary(rng, n)
    s = np.exp(rng.uniform(0.0, np.log(cond), n))
    if n > 1:
        s[0], s[-1] = 1.0, cond
    s = s if cond > 1 else np.ones(n)
    return Conjugator(u @ np.diag(s) @ v.conj().T, v @ np.diag(1 / s) @ u.conj().T)


def identity_conjugator(n: int) -> Conjugator:
    return Conjugator(np.eye(n, dtype=complex), np.eye(n, dtype=complex))


def _conj_lie(g: LieSubalgebra, P: Conjugator, tol: TolerancePolicy) -> LieSubalgebra:
    mats = np.stack([P(x) for x in g.basis]) if g.dim else g.basis
    return LieSubalgebra.from_basis(nk.span_basis(mats, tol, scale=1.0), tol) if g.dim else g


def _conj_span(basis: np.ndarray, P: Conjugator, tol: TolerancePolicy) -> np.ndarray:
    if basis.shape[0] == 0:
        return basis
    return nk.span_basis(np.stack([P(x) for x in basis]), tol, scale=1.0)


def _integer_diag(rng: np.random.Generator, n: int) -> np.ndarray:
    # small integer patterns make coincident diagonal entries (and central
    # nilpotents) common; a random complex factor keeps the values generic
    levels = rng.integers(-2, 3, n).astype(complex)
    if not np.any(levels):
        levels[rng.integers(n)] = 1
    return np.diag(levels * complex_normal(rng))


def _sparse_upper(rng: np.random.Generator, n: int, entries: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    iu, ju = np.triu_indices(n, 1)
    if iu.size == 0:
        return m
    picks = rng.choice(iu.size, size=min(entries, iu.size), replace=False)
    m[iu[picks], ju[picks]] = complex_normal(rng, picks.size) + 0.5
    return m


# ---------------------------------------------------------------------------
# Lie algebra families
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolvableInstance:
    g: LieSubalgebra
    j: np.ndarray
    P: Conjugator
    j_kind: str
    family: str = "solvable"
    info: dict = field(default_factory=dict)


def _triangular_closure(rng: np.random.Generator, n: int, cap: int, nilpotent: bool,
                        corner: bool) -> LieSubalgebra | None:
    gens = []
    count = int(rng.integers(1, 4))
    for _ in range(count):
        kind = "upper" if nilpotent else rng.choice(["diag", "upper", "mixed"])
        if kind == "diag":
            gens.append(_integer_diag(rng, n))
        elif kind == "upper":
            gens.append(_sparse_upper(rng, n, int(rng.integers(1, 3))))
        else:
            gens.append(_integer_diag(rng, n) + _sparse_upper(rng, n, 1))
    if corner and n > 1:
        gens.append(unit(0, n - 1, n))
    try:
        t = make_lie_subalgebra(gens, n, max_dim=cap)
    except DimensionError:
        return None
    return t if t.dim else None


def gen_solvable_instance(spec: InstanceSpec, rng: np.random.Generator,
                          P: Conjugator | None = None) -> SolvableInstance:
    """Triangular Lie algebra t, conjugated to g = P t P^-1, with an ideal j.

    j is drawn uniformly from {g, [g, g], C*corner + [g, g]}; the corner
    option puts P E_1n P^-1 into g first.
    """
    n, tol = spec.ambient_n, spec.tol
    for _ in range(MAX_RETRIES):
        j_kind = ("whole", "derived", "corner")[int(rng.integers(3))]
        if spec.lie_dim == 1:
            j_kind = "whole"
        corner = j_kind == "corner" and n > 1
        t = _triangular_closure(rng, n, spec.lie_dim, nilpotent=False, corner=corner)
        if t is None:
            continue
        conj = P if P is not None else conjugator(rng, n, spec.cond)
        g = _conj_lie(t, conj, tol)
        derived = bracket_span(g.basis, g.basis, tol)
        if j_kind == "whole" or (j_kind == "corner" and n == 1):
            j = g.basis
        elif j_kind == "derived":
            j = derived
        else:
            corner_elem = conj(unit(0, n - 1, n))
            j = nk.span_basis(nk.concat(corner_elem[None], derived), tol, scale=1.0)
        if ideal_residual(g, j) > tol.residual_tol * conj.cond:
            continue
        return SolvableInstance(g, j, conj, j_kind, "solvable", {"t_dim": t.dim})
    raise PreconditionError("could not draw a solvable instance within the retry budget")


def gen_nilpotent_instance(spec: InstanceSpec, rng: np.random.Generator) -> SolvableInstance:
    """Conjugated closure of sparse strictly upper-triangular generators."""
    n, tol = spec.ambient_n, spec.tol
    for _ in range(MAX_RETRIES):
        t = _triangular_closure(rng, n, spec.lie_dim, nilpotent=True, corner=False)
        if t is None:
            continue
        conj = conjugator(rng, n, spec.cond)
        g = _conj_lie(t, conj, tol)
        return SolvableInstance(g, g.basis, conj, "whole", "nilpotent", {"t_dim": t.dim})
    # n = 1 or an unlucky budget: the zero algebra is not useful, use E_1n
    if n < 2:
        raise PreconditionError("nilpotent instances need n >= 2")
    conj = conjugator(rng, n, spec.cond)
    g = _conj_lie(make_lie_subalgebra([unit(0, n - 1, n)]), conj, tol)
    return SolvableInstance(g, g.basis, conj, "whole", "nilpotent", {"t_dim": 1})


def _sl2_rep(dim: int) -> list[np.ndarray]:
    """e, f, h of the irreducible sl2 representation of the given dimension."""
    d = dim
    e = np.zeros((d, d), dtype=complex)
    f = np.zeros((d, d), dtype=complex)
    h = np.diag([d - 1 - 2 * k for k in range(d)]).astype(complex)
    for k in range(d - 1):
        c = np.sqrt((k + 1) * (d - 1 - k))
        e[k, k + 1] = c
        f[k + 1, k] = c
    return [e, f, h]


def _embed(block: np.ndarray, offset: int, n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    k = block.shape[0]
    m[offset:offset + k, offset:offset + k] = block
    return m


def gen_mixed_instance(spec: InstanceSpec, rng: np.random.Generator) -> SolvableInstance:
    """sl2 joined with a solvable part, conjugated; j is the solvable radical.

    Variants: block-diagonal sl2 (2- or 3-dim irreducible) plus a
    triangular block, sl2 plus scalars, and the affine algebra sl2 + C^2.
    Falls back to the solvable family when n < 4 or the Lie dimension cap
    leaves no room for a radical.
    """
    n, tol = spec.ambient_n, spec.tol
    if n < 4 or spec.lie_dim < 4:
        inst = gen_solvable_instance(spec, rng)
        return SolvableInstance(inst.g, solvable_radical(inst.g, tol).basis, inst.P, "radical",
                                "solvable", inst.info)
    for _ in range(MAX_RETRIES):
        variant = ("block", "scalar", "affine")[int(rng.integers(3))]
        if variant == "affine" and spec.lie_dim < 5:
            variant = "scalar"
        if variant == "block":
            rep = 3 if (n >= 5 and rng.random() < 0.5) else 2
            gens = [_embed(x, 0, n) for x in _sl2_rep(rep)]
            rest = n - rep
            room = spec.lie_dim - 3
            tri = _triangular_closure(rng, rest, room, nilpotent=False, corner=False) if rest else None
            if tri is None:
                continue
            gens += [_embed(x, rep, n) for x in tri.basis]
        elif variant == "scalar":
            gens = [_embed(x, 0, n) for x in _sl2_rep(2)] + [np.eye(n, dtype=complex)]
        else:
            gens = [_embed(x, 0, n) for x in _sl2_rep(2)] + [unit(0, 2, n), unit(1, 2, n)]
        try:
            t = make_lie_subalgebra(gens, n, max_dim=spec.lie_dim)
        except DimensionError:
            continue
        conj = conjugator(rng, n, spec.cond)
        g = _conj_lie(t, conj, tol)
        r = solvable_radical(g, tol)
        if r.dim == 0:
            continue
        return SolvableInstance(g, r.basis, conj, "radical", "mixed-levi", {"variant": variant})
    raise PreconditionError("could not draw a mixed instance within the retry budget")


def borel(n: int) -> LieSubalgebra:
    """Upper-triangular matrices in M_n."""
    return make_lie_subalgebra([unit(i, j, n) for i in range(n) for j in range(i, n)], n)


# ---------------------------------------------------------------------------
# element families
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KSTriple:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    degenerate: bool


def gen_ks_triple(spec: InstanceSpec, rng: np.random.Generator,
                  P: Conjugator | None = None) -> KSTriple:
    """Heisenberg triple with commuting diagonal padding, conjugated.

    a = P(alpha E12 + Da)P^-1, b = P(beta E23 + gamma E13 + Db)P^-1, where
    Da, Db are diagonal on the remaining coordinates plus scalar shifts;
    then c = [a, b] = alpha beta P E13 P^-1. alpha*beta = 0 is the
    degenerate commuting case.
    """
    n, tol = spec.ambient_n, spec.tol
    if n < 3:
        raise PreconditionError("triples need n >= 3")
    conj = P if P is not None else conjugator(rng, n, spec.cond)
    idx = np.sort(rng.choice(n, 3, replace=False))
    i, j, k = (int(x) for x in idx)
    others = [x for x in range(n) if x not in (i, j, k)]
    degenerate = rng.random() < 0.05
    alpha = 0.0 if degenerate else rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())
    beta = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())
    gamma = 0.5 * complex_normal(rng)
    a = alpha * unit(i, j, n) + 0.5 * complex_normal(rng) * np.eye(n)
    b = beta * unit(j, k, n) + gamma * unit(i, k, n) + 0.5 * complex_normal(rng) * np.eye(n)
    for x in others:
        a[x, x] += 0.5 * complex_normal(rng)
        b[x, x] += 0.5 * complex_normal(rng)
    A, B = conj(a), conj(b)
    C = nk.commutator(A, B)
    scale = max(1.0, nk.opnorm(A) * nk.opnorm(B))
    if max(np.linalg.norm(nk.commutator(A, C)), np.linalg.norm(nk.commutator(B, C))) \
            >= tol.residual_tol * scale:
        raise PreconditionError("generated triple violates [a,c] = [b,c] = 0")
    return KSTriple(A, B, C, degenerate)


def canonical_ks_triple(n: int = 3) -> KSTriple:
    return KSTriple(unit(0, 1, n), unit(1, 2, n), unit(0, 2, n), False)


@dataclass(frozen=True, eq=False)
class AdEigenInstance:
    a: np.ndarray
    b: np.ndarray
    lam: complex
    m: int
    levels: tuple[int, ...]


def gen_ad_eigen_instance(spec: InstanceSpec, rng: np.random.Generator) -> AdEigenInstance:
    """(a, b, lam, m) with (ad a - lam)^m b = 0 by construction.

    a = P(D + N)P^-1 with D = diag(c + lam * level) and N nilpotent inside
    each level block; b = P B P^-1 with B supported on positions that raise
    the level by one. Then ad D acts on B as lam and ad N nilpotently, so m
    is the nilpotency index of ad N on B, measured in the canonical frame.
    """
    n = max(spec.ambient_n, 2)
    conj = conjugator(rng, n, min(spec.cond, 4.0))
    lam = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())
    shift = rng.uniform(0.0, 1.0) * np.exp(2j * np.pi * rng.random())
    n_levels = int(rng.integers(2, min(n, 4) + 1))
    levels = np.sort(np.concatenate([np.arange(n_levels), rng.integers(0, n_levels, n - n_levels)]))
    rng.shuffle(levels)
    d = np.diag(shift + lam * levels)
    nil = np.zeros((n, n), dtype=complex)
    if rng.random() < 0.5:
        for p in range(n):
            for q in range(p + 1, n):
                if levels[p] == levels[q] and rng.random() < 0.5:
                    nil[p, q] = 0.5 * complex_normal(rng)
    bmat = np.zeros((n, n), dtype=complex)
    for p in range(n):
        for q in range(n):
            if levels[p] == levels[q] + 1 and rng.random() < 0.7:
                bmat[p, q] = complex_normal(rng)
    if not np.any(bmat):
        p = int(np.flatnonzero(levels == 1)[0])
        q = int(np.flatnonzero(levels == 0)[0])
        bmat[p, q] = 1.0
    a0 = d + nil
    m, x = 0, bmat.copy()
    while np.linalg.norm(x) > 1e-13 * np.linalg.norm(bmat):
        x = nk.commutator(a0, x) - lam * x
        m += 1
        if m > 2 * n:
            raise PreconditionError("constructed instance is not an ad-eigenvector")
    b = conj(bmat)
    b = b / nk.opnorm(b)
    return AdEigenInstance(conj(a0), b, complex(lam), max(m, 1), tuple(int(v) for v in levels))


def gen_dense_pair(spec: InstanceSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = int(rng.integers(1, max(spec.ambient_n, 1) + 1))
    a1 = complex_normal(rng, (n, n)) / np.sqrt(n) + complex_normal(rng)
    a2 = complex_normal(rng, (n, n)) / np.sqrt(n) + complex_normal(rng)
    return a1, a2


def gen_nilpotent_matrix(spec: InstanceSpec, rng: np.random.Generator) -> np.ndarray:
    """Nonzero nilpotent P N P^-1 normalised to unit spectral norm."""
    n = max(spec.ambient_n, 2)
    conj = conjugator(rng, n, spec.cond)
    while True:
        N = np.triu(complex_normal(rng, (n, n)), 1) * (rng.random((n, n)) < 0.6)
        if np.any(N):
            break
    x = conj(N)
    return x / nk.opnorm(x)


# ---------------------------------------------------------------------------
# associative algebra families
# ---------------------------------------------------------------------------

def _jordan_like(rng: np.random.Generator, n: int) -> np.ndarray:
    """Block-triangular matrix with a few repeated eigenvalues."""
    values = complex_normal(rng, int(rng.integers(1, n + 1))) * 2
    diag = values[rng.integers(0, values.size, n)]
    m = np.diag(diag)
    for p in range(n - 1):
        if diag[p] == diag[p + 1] and rng.random() < 0.7:
            m[p, p + 1] = 1.0
    return m


def gen_algebra(spec: InstanceSpec, rng: np.random.Generator,
                max_dim: int | None = None) -> tuple[FiniteAlgebra, str]:
    """Random unital subalgebra of M_n from one of several canonical shapes."""
    n, tol = spec.ambient_n, spec.tol
    for _ in range(MAX_RETRIES):
        kind = ("triangular", "block", "polynomial", "commutative")[int(rng.integers(4))]
        if kind == "triangular":
            gens = [_integer_diag(rng, n) + _sparse_upper(rng, n, int(rng.integers(1, 3)))
                    for _ in range(int(rng.integers(1, 3)))]
        elif kind == "block":
            k = int(rng.integers(1, min(n, 3) + 1))
            gens = [_embed(unit(p, q, k), 0, n) for p in range(k) for q in range(k)]
            if n > k:
                gens.append(_embed(_jordan_like(rng, n - k), k, n))
                if rng.random() < 0.5:
                    gens.append(_sparse_upper(rng, n, 1))
        elif kind == "polynomial":
            gens = [_jordan_like(rng, n)]
        else:
            x = _jordan_like(rng, n)
            gens = [x, x @ x + complex_normal(rng) * x]
            blocks = np.zeros(n, dtype=complex)
            # scalars on runs of equal diagonal entries commute with x
            run_value = complex_normal(rng)
            for p in range(n):
                if p and x[p - 1, p] == 0:
                    run_value = complex_normal(rng)
                blocks[p] = run_value
            gens.append(np.diag(blocks))
        conj = conjugator(rng, n, spec.cond)
        A = generate_algebra([conj(g) for g in gens], n, tol)
        if max_dim is not None and A.dim > max_dim:
            continue
        return A, kind
    raise PreconditionError("could not draw an algebra within the retry budget")


def gen_commutative_algebra(spec: InstanceSpec, rng: np.random.Generator) -> tuple[FiniteAlgebra, str]:
    """Algebra generated by one matrix, or by a commuting triangular pair."""
    n, tol = spec.ambient_n, spec.tol
    conj = conjugator(rng, n, spec.cond)
    x = _jordan_like(rng, n)
    if rng.random() < 0.5:
        return generate_algebra([conj(x)], n, tol), "single"
    scal = np.zeros(n, dtype=complex)
    value = complex_normal(rng)
    for p in range(n):
        if p and x[p - 1, p] == 0:
            value = complex_normal(rng)
        scal[p] = value
    y = np.diag(scal) + 0.3 * (x - np.diag(np.diag(x))) @ (x - np.diag(np.diag(x)))
    return generate_algebra([conj(x), conj(y)], n, tol), "pair"


def gen_small_algebra(spec: InstanceSpec, rng: np.random.Generator, n: int = 4,
                      max_dim: int = 4) -> tuple[FiniteAlgebra, str]:
    """Generated algebra of dimension <= max_dim inside M_n."""
    small = InstanceSpec(ambient_n=n, lie_dim=spec.lie_dim, trials=1, seed=spec.seed,
                         tol=spec.tol, cond=spec.cond)
    for _ in range(MAX_RETRIES):
        kind = ("polynomial", "triangular", "corner")[int(rng.integers(3))]
        conj = conjugator(rng, n, spec.cond)
        if kind == "polynomial":
            gens = [_jordan_like(rng, n)]
        elif kind == "triangular":
            gens = [_sparse_upper(rng, n, 1) + _integer_diag(rng, n) * (rng.random() < 0.5)]
        else:
            p, q = sorted(rng.choice(n, 2, replace=False))
            gens = [unit(p, p, n), unit(p, q, n)]
        A = generate_algebra([conj(g) for g in gens], n, small.tol)
        if A.dim <= max_dim:
            return A, kind
    raise PreconditionError("could not draw a small algebra within the retry budget")


@dataclass(frozen=True, eq=False)
class SemisimpleInstance:
    g: LieSubalgebra
    j: np.ndarray
    variant: str


def gen_semisimple_commuting(spec: InstanceSpec, rng: np.random.Generator) -> SemisimpleInstance:
    """Instances aimed at rad A(g) = 0 with ad g nilpotent on j.

    Mostly commuting diagonalizable families (A(g) is a product of copies
    of C); sometimes gl_k with j its centre. A small share uses j = [g, g]
    in gl_k, where the ad-nilpotency hypothesis fails on purpose.
    """
    n, tol = spec.ambient_n, spec.tol
    conj = conjugator(rng, n, spec.cond)
    u = rng.random()
    if u < 0.7 or n < 2:
        count = int(rng.integers(1, min(spec.lie_dim, n) + 1))
        mats = [conj(np.diag(complex_normal(rng, n))) for _ in range(count)]
        g = make_lie_subalgebra(mats, n)
        pick = int(rng.integers(1, g.dim + 1))
        j = nk.span_basis(np.stack([g.random_element(rng) for _ in range(pick)]), tol, scale=1.0)
        return SemisimpleInstance(g, j, "diagonal")
    k = 2 if spec.lie_dim < 9 or n < 3 else int(rng.integers(2, 4))
    gens = [_embed(unit(p, q, k), 0, n) for p in range(k) for q in range(k)]
    gens.append(np.eye(n, dtype=complex))
    g = make_lie_subalgebra([conj(x) for x in gens], n, max_dim=max(spec.lie_dim, k * k + 1))
    if u < 0.9:
        j = nk.span_basis(np.eye(n, dtype=complex)[None], tol, scale=1.0)
        return SemisimpleInstance(g, j, "gl-centre")
    return SemisimpleInstance(g, bracket_span(g.basis, g.basis, tol), "gl-derived")
