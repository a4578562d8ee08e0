"""Unital associative subalgebras of M_n(C) and their abstract quotients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numeric as nk
from .errors import DimensionError, PreconditionError
from .numeric import DEFAULT_TOL, TolerancePolicy


@dataclass(frozen=True, eq=False)
class AbstractAlgebra:
    """Algebra given only by structure constants: e_i e_j = sum_k c[i,j,k] e_k."""

    dim: int
    structure_constants: np.ndarray
    unit_coords: np.ndarray

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def left_regular(self, a: np.ndarray) -> np.ndarray:
        """Matrix of y -> a y in the basis e_0..e_{dim-1}."""
        return np.einsum("i,ijk->kj", np.asarray(a, dtype=complex), self.structure_constants)

    def regular_matrices(self) -> np.ndarray:
        # L[i] is the left-regular matrix of e_i
        return np.transpose(self.structure_constants, (0, 2, 1))

    def associativity_residual(self) -> float:
        c = self.structure_constants
        left = np.einsum("ijk,klm->ijlm", c, c)
        right = np.einsum("jlk,ikm->ijlm", c, c)
        return float(np.abs(left - right).max()) if self.dim else 0.0

    def unit_residual(self) -> float:
        if not self.dim:
            return 0.0
        eye = np.eye(self.dim)
        lu = self.left_regular(self.unit_coords)
        ru = np.einsum("j,ijk->ki", self.unit_coords, self.structure_constants)
        return float(max(np.abs(lu - eye).max(), np.abs(ru - eye).max()))


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A unital subalgebra of M_n(C) with a Frobenius-orthonormal basis."""

    ambient_n: int
    basis: np.ndarray
    unit_coords: np.ndarray
    structure_constants: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def from_basis(cls, basis: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL,
                   check: bool = True) -> "FiniteAlgebra":
        n = basis.shape[-1]
        prods = np.einsum("iab,jbc->ijac", basis, basis)
        consts = np.einsum("kac,ijac->ijk", basis.conj(), prods)
        unit = nk.coordinates(basis, np.eye(n))
        alg = cls(n, basis, unit, consts)
        if check:
            recon = np.einsum("ijk,kab->ijab", consts, basis)
            resid = float(np.abs(recon - prods).max()) if basis.shape[0] else 0.0
            scale = max(1.0, float(np.abs(prods).max())) if basis.shape[0] else 1.0
            if resid > tol.residual_tol * scale:
                raise PreconditionError(f"basis is not closed under products (residual {resid:.3g})")
            if nk.projection_residual(basis, np.eye(n)) > tol.residual_tol * np.sqrt(n):
                raise PreconditionError("identity is not in the span")
        return alg

    def coords(self, x: np.ndarray) -> np.ndarray:
        return nk.coordinates(self.basis, x)

    def element(self, coords: np.ndarray) -> np.ndarray:
        return nk.combine(self.basis, coords)

    def contains(self, x: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return nk.is_member(self.basis, x, tol)

    def abstract(self) -> AbstractAlgebra:
        return AbstractAlgebra(self.dim, self.structure_constants, self.unit_coords)

    def left_regular(self, x: np.ndarray) -> np.ndarray:
        """L_x on A in the orthonormal basis (x given as a matrix)."""
        return self.abstract().left_regular(self.coords(x))

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return nk.random_combination(self.basis, rng)


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """q: A -> A/I, expressed through an orthonormal complement basis."""

    complement: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return nk.coordinates(self.complement, x)

    def matrix(self, source: FiniteAlgebra) -> np.ndarray:
        """dim(A/I) x dim(A) matrix of q in the basis of ``source``."""
        return np.stack([self(b) for b in source.basis], axis=1)


def generate_algebra(generators: Sequence[np.ndarray], n: int | None = None,
                     tol: TolerancePolicy = DEFAULT_TOL) -> FiniteAlgebra:
    """Smallest unital subalgebra of M_n containing ``generators``."""
    gens = [nk.as_matrix(g) for g in generators]
    if n is None:
        if not gens:
            raise DimensionError("ambient size is required when there are no generators")
        n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise DimensionError(f"generator of shape {g.shape} in M_{n}")
    basis = nk.span_basis([np.eye(n, dtype=complex)] + gens, tol)
    while True:
        prods = np.einsum("iab,jbc->ijac", basis, basis).reshape(-1, n, n)
        grown = nk.span_basis(np.concatenate([basis, prods]), tol)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return FiniteAlgebra.from_basis(basis, tol)


def subalgebra(alg_basis: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> FiniteAlgebra:
    return FiniteAlgebra.from_basis(nk.span_basis(alg_basis, tol), tol)


def center(A: FiniteAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of {a in A : ab = ba for all b in A}."""
    k, n = A.dim, A.ambient_n
    prods = np.einsum("iab,jbc->ijac", A.basis, A.basis)
    comm = prods - np.transpose(prods, (1, 0, 2, 3))
    system = np.transpose(comm, (1, 2, 3, 0)).reshape(-1, k)
    null = nk.nullspace(system, tol, scale=1.0)
    return nk.span_basis(np.tensordot(null.T, A.basis, axes=([1], [0])), tol, scale=1.0) \
        if null.shape[1] else nk.empty_basis(n)


def _trace_gram(mats: np.ndarray) -> np.ndarray:
    return np.einsum("iab,jba->ij", mats, mats)


def radical(A: FiniteAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Jacobson radical as the kernel of the trace form tr(xy) on A.

    Over C a faithfully represented finite-dimensional algebra has
    rad A = {x : tr(xy) = 0 for all y in A}.
    """
    gram = _trace_gram(A.basis)
    null = nk.nullspace(gram, tol, strict=True)
    if null.shape[1] == 0:
        return nk.empty_basis(A.ambient_n)
    return nk.span_basis(np.tensordot(null.T, A.basis, axes=([1], [0])), tol, scale=1.0)


def abstract_radical(Q: AbstractAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Radical of an abstract algebra (rows are coordinate vectors)."""
    if Q.dim == 0:
        return np.zeros((0, 0), dtype=complex)
    gram = _trace_gram(Q.regular_matrices())
    return nk.nullspace(gram, tol, strict=True).T


def is_ideal(A: FiniteAlgebra, ideal: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Largest residual of b r, r b (b in A, r in ideal) off the ideal."""
    worst = 0.0
    for r in ideal:
        worst = max(worst, nk.projection_residual(A.basis, r))
        for b in A.basis:
            worst = max(worst, nk.projection_residual(ideal, b @ r),
                        nk.projection_residual(ideal, r @ b))
    return worst


def quotient_by_ideal(A: FiniteAlgebra, ideal: np.ndarray,
                      tol: TolerancePolicy = DEFAULT_TOL) -> tuple[AbstractAlgebra, QuotientMap]:
    """Structure constants of A / ideal on the Frobenius-orthogonal complement."""
    resid = is_ideal(A, ideal, tol)
    if resid > tol.residual_tol * 10:
        raise PreconditionError(f"not a two-sided ideal of A (residual {resid:.3g})")
    comp = nk.orthogonal_complement(ideal, A.basis, tol)
    q = QuotientMap(comp)
    prods = np.einsum("iab,jbc->ijac", comp, comp)
    consts = np.einsum("kac,ijac->ijk", comp.conj(), prods)
    unit = q(np.eye(A.ambient_n))
    return AbstractAlgebra(comp.shape[0], consts, unit), q


def abstract_spectrum(a_coords: np.ndarray, Q: AbstractAlgebra) -> np.ndarray:
    """sigma_Q(a) as the eigenvalues of the left-regular matrix L_a."""
    return nk.eigenvalues(Q.left_regular(a_coords))


def is_nilpotent(a, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> bool:
    """a^n = 0 relative to ||a||^n, and every eigenvalue cluster sits at 0.

    The power test alone accepts matrices whose eigenvalues are merely
    small against ||a||, hence the spectral confirmation. With ``scale``,
    matrices below ``residual_tol * scale`` in norm count as zero.
    """
    arr = nk.as_matrix(a)
    norm = nk.opnorm(arr)
    if norm == 0 or (scale is not None and norm <= tol.residual_tol * scale):
        return True
    if not nk.is_nilpotent_power(arr, tol.residual_tol):
        return False
    return nk.spectral_radius(arr, tol) <= tol.spec_tol * nk.scale_of(arr)


def nilpotency_residual(a: np.ndarray) -> float:
    s = nk.opnorm(a)
    if s == 0:
        return 0.0
    return float(np.linalg.norm(nk.mpow(a / s, a.shape[0])))


def is_quasinilpotent(a, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Every eigenvalue (cluster) is within spec_tol*max(1,||a||) of 0."""
    arr = nk.as_matrix(a)
    return nk.spectral_radius(arr, tol) <= tol.spec_tol * nk.scale_of(arr)


def centralizer(A: FiniteAlgebra, of: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of {a in A : [a, s] = 0 for every s in ``of``}."""
    k = A.dim
    if of.shape[0] == 0:
        return A.basis.copy()
    comm = np.stack([[nk.commutator(b, s) for s in of] for b in A.basis])
    system = np.transpose(comm, (1, 2, 3, 0)).reshape(-1, k)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(A.ambient_n)
    return nk.span_basis(np.tensordot(null.T, A.basis, axes=([1], [0])), tol, scale=1.0)


def extend_to_maximal_commutative(A: FiniteAlgebra, x: np.ndarray,
                                  tol: TolerancePolicy = DEFAULT_TOL) -> FiniteAlgebra:
    """Greedy maximal commutative subalgebra of A containing x."""
    x = nk.as_matrix(x)
    if not A.contains(x, tol):
        raise PreconditionError("x is not an element of A")
    S = generate_algebra([x], A.ambient_n, tol)
    while True:
        cent = centralizer(A, S.basis, tol)
        if cent.shape[0] <= S.dim:
            return S
        extra = next((c for c in cent if not nk.is_member(S.basis, c, tol)), None)
        if extra is None:
            return S
        S = generate_algebra(list(S.basis) + [extra], A.ambient_n, tol)


def trace_nilpotent_part(space: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """{x in span(space) : tr(xy) = 0 for all y in the algebra it generates}.

    When the space is simultaneously triangularizable (commutative, or a
    solvable Lie algebra of matrices) this is exactly the set of nilpotent
    elements of the space, which is then a linear subspace.
    """
    if space.shape[0] == 0:
        return space
    n = space.shape[-1]
    gen = generate_algebra(list(space), n, tol)
    system = np.einsum("jab,iba->ji", gen.basis, space)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(n)
    return nk.span_basis(np.tensordot(null.T, space, axes=([1], [0])), tol, scale=1.0)


# ---------------------------------------------------------------------------
# definitional radical oracle
# ---------------------------------------------------------------------------

def radical_witness(A: FiniteAlgebra, x: np.ndarray, probes: np.ndarray,
                    tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray | None:
    """Return b in A with 1 - b x singular, or None if none is found.

    Each probe b is rescaled by 1/mu for every nonzero eigenvalue mu of b x,
    which covers the whole line C b. None therefore means 1 - b x is
    invertible for every multiple of every probe.
    """
    n = A.ambient_n
    eye = np.eye(n)
    for b in probes:
        bx = b @ x
        scale = nk.scale_of(bx)
        for c in nk.spectral_clusters(bx, tol):
            if abs(c.mean) > tol.spec_tol * scale:
                witness = b / c.mean
                smin = np.linalg.svd(eye - witness @ x, compute_uv=False)[-1]
                if smin <= 1e-6 * nk.scale_of(witness @ x):
                    return witness
    return None


def definitional_radical(A: FiniteAlgebra, rng: np.random.Generator, n_random: int = 200,
                         tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Radical from the invertibility definition, plus the probes used.

    If 1 - t b x is invertible for all t then det(1 - t b x) has no zeros,
    so it is constant and its linear coefficient -tr(b x) vanishes. The
    candidate subspace is cut out by these conditions over the probes
    (the basis and ``n_random`` random elements); every candidate basis
    vector must then pass :func:`radical_witness` with no witness found.
    """
    probes = np.concatenate([A.basis, np.stack([A.random_element(rng) for _ in range(n_random)])])
    system = np.einsum("sab,iba->si", probes, A.basis)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        cand = nk.empty_basis(A.ambient_n)
    else:
        cand = nk.span_basis(np.tensordot(null.T, A.basis, axes=([1], [0])), tol, scale=1.0)
    kept = [x for x in cand if radical_witness(A, x, probes, tol) is None]
    if len(kept) != cand.shape[0]:
        cand = nk.span_basis(kept, tol, scale=1.0) if kept else nk.empty_basis(A.ambient_n)
    return cand, probes
