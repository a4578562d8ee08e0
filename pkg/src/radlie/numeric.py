"""Dense complex linear algebra at desk scale.

Matrices are plain ``numpy`` complex arrays. A *matrix subspace* (a subspace
of M_n) is stored as a stacked array of shape ``(k, n, n)`` whose slices are
orthonormal for the Frobenius inner product; a *vector subspace* of C^n is an
``(n, k)`` array with orthonormal columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import pdist

from .errors import DimensionError, NumericalFailure

MAX_N = 64

# Perturbed Jordan blocks of size k spread eigenvalues by about delta**(1/k);
# delta bounds the backward error of a similarity-transformed input.
_DEFECT_DELTA = 1e-12
_DEFECT_FACTOR = 2.0
# backward error below which two eigenvalue groups count as one
_SEPARATION_DELTA = 1e-10
_PATH_POINTS = 17


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds for rank, spectral and residual decisions."""

    rank_tol: float = 1e-9
    spec_tol: float = 1e-7
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "spec_tol", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.rank_tol >= 1:
            raise ValueError("rank_tol must be < 1")

    def as_dict(self) -> dict:
        return {"rank_tol": self.rank_tol, "spec_tol": self.spec_tol,
                "residual_tol": self.residual_tol}


DEFAULT_TOL = TolerancePolicy()


def as_matrix(m, *, square: bool = True, max_n: int | None = MAX_N) -> np.ndarray:
    """Validate ``m`` and return it as a complex 2-d array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if max_n is not None and arr.shape[0] > max_n:
        raise DimensionError(f"matrix size {arr.shape[0]} exceeds the cap {max_n}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix has non-finite entries")
    return arr


def opnorm(m: np.ndarray) -> float:
    """Spectral norm; 0 for empty input."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def scale_of(m: np.ndarray) -> float:
    return max(1.0, opnorm(m))


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def mpow(m: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(m, k)


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------

def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of ``m`` with algebraic multiplicity.

    LAPACK's Hessenberg reduction followed by shifted QR; backward stable.
    """
    arr = as_matrix(m)
    if arr.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(arr).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc


@dataclass(frozen=True)
class EigenCluster:
    mean: complex
    multiplicity: int
    members: tuple[int, ...]


def _merge_radius(k: int, scale: float, tol: TolerancePolicy, max_block: int) -> float:
    block = max(1, min(k, max_block))
    defect = _DEFECT_FACTOR * _DEFECT_DELTA ** (1.0 / block) if block > 1 else 0.0
    return max(tol.spec_tol, defect) * scale


def _reorder_top(t: np.ndarray, z: np.ndarray, members) -> np.ndarray:
    select = np.zeros(t.shape[0], dtype=np.int32)
    select[list(members)] = 1
    ts, *_rest, info = sla.lapack.ztrsen(select, t, z, job="N")
    if info != 0:
        raise NumericalFailure(f"Schur reordering failed (info={info})")
    return ts


def _groups_inseparable(t: np.ndarray, z: np.ndarray, left: list[int], right: list[int],
                        scale: float) -> bool:
    """Whether a tiny backward error can make two eigenvalue groups meet.

    Two groups merge under perturbations of size eps exactly when their
    eps-pseudospectral components connect. The largest smallest singular
    value of (w - T) along the segment joining the group means bounds the
    eps needed. A perturbed Jordan block split in two needs roundoff;
    genuinely distinct eigenvalues need far more.
    """
    vals = np.diag(t)
    k = len(left) + len(right)
    block = _reorder_top(t, z, list(left) + list(right))[:k, :k]
    a, b = vals[list(left)].mean(), vals[list(right)].mean()
    eye = np.eye(k)
    worst = 0.0
    for w in a + (b - a) * np.linspace(0.0, 1.0, _PATH_POINTS):
        worst = max(worst, float(np.linalg.svd(w * eye - block, compute_uv=False)[-1]))
    return worst <= _SEPARATION_DELTA * scale


def cluster_eigenvalues(values: Sequence[complex], scale: float = 1.0,
                        tol: TolerancePolicy = DEFAULT_TOL,
                        max_block: int | None = None,
                        schur: tuple[np.ndarray, np.ndarray] | None = None) -> list[EigenCluster]:
    """Group computed eigenvalues that represent one true eigenvalue.

    A complete-linkage dendrogram is cut top-down. A node is kept whole when
    its diameter is within ``spec_tol * scale``, or when it is within the
    spread a perturbed Jordan block of that size produces (size capped by
    ``max_block``). When the Schur pair ``(t, z)`` with ``values == diag(t)``
    is supplied, the second case also needs the two halves of the node to
    be inseparable under a backward error of relative size 1e-10. The cluster mean is a well-conditioned estimate even
    when the members individually are not.
    """
    vals = np.asarray(values, dtype=complex).ravel()
    count = vals.size
    if count == 0:
        return []
    if max_block is None:
        max_block = count
    if count == 1:
        return [EigenCluster(complex(vals[0]), 1, (0,))]
    points = np.column_stack([vals.real, vals.imag])
    root = to_tree(linkage(pdist(points), method="complete"))
    groups = []
    stack = [root]
    while stack:
        node = stack.pop()
        # for complete linkage the merge height is the node's diameter
        if node.is_leaf() or node.dist <= tol.spec_tol * scale:
            groups.append(sorted(node.pre_order()))
            continue
        if node.dist <= _merge_radius(node.count, scale, tol, max_block):
            members = sorted(node.pre_order())
            if schur is None or _groups_inseparable(
                    schur[0], schur[1], node.get_left().pre_order(),
                    node.get_right().pre_order(), scale):
                groups.append(members)
                continue
        stack.extend([node.get_right(), node.get_left()])
    clusters = [EigenCluster(complex(vals[g].mean()), len(g), tuple(g)) for g in groups]
    clusters.sort(key=lambda c: c.members[0])
    return clusters


def _schur(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return sla.schur(arr, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Schur decomposition failed: {exc}") from exc


def spectral_clusters(m, tol: TolerancePolicy = DEFAULT_TOL,
                      max_block: int | None = None,
                      scale: float | None = None) -> list[EigenCluster]:
    """Eigenvalue clusters of ``m``; members index the Schur diagonal."""
    arr = as_matrix(m)
    if arr.shape[0] == 0:
        return []
    t, z = _schur(arr)
    scale = scale_of(arr) if scale is None else scale
    return cluster_eigenvalues(np.diag(t), scale, tol, max_block, schur=(t, z))


def spectral_radius(m, tol: TolerancePolicy = DEFAULT_TOL,
                    max_block: int | None = None) -> float:
    """max |lambda| over cluster means; exact zero for the empty matrix."""
    clusters = spectral_clusters(m, tol, max_block)
    if not clusters:
        return 0.0
    return max(abs(c.mean) for c in clusters)


def spectrum_set_distance(xs: Sequence[complex], ys: Sequence[complex]) -> float:
    """Hausdorff distance between two finite point sets."""
    xs = np.asarray(xs, dtype=complex).ravel()
    ys = np.asarray(ys, dtype=complex).ravel()
    if xs.size == 0 and ys.size == 0:
        return 0.0
    if xs.size == 0 or ys.size == 0:
        return float("inf")
    d = np.abs(xs[:, None] - ys[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def multiset_distance(xs: Sequence[complex], ys: Sequence[complex]) -> float:
    """Largest displacement of the optimal one-to-one matching."""
    xs = np.asarray(xs, dtype=complex).ravel()
    ys = np.asarray(ys, dtype=complex).ravel()
    if xs.size != ys.size:
        return float("inf")
    if xs.size == 0:
        return 0.0
    d = np.abs(xs[:, None] - ys[None, :])
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].max())


def cluster_means(m, tol: TolerancePolicy = DEFAULT_TOL,
                  max_block: int | None = None) -> np.ndarray:
    return np.array([c.mean for c in spectral_clusters(m, tol, max_block)], dtype=complex)


# --------------------------------------------------------------------------
# rank decisions and subspaces
# --------------------------------------------------------------------------

def _cutoff(s: np.ndarray, tol: TolerancePolicy, scale: float | None) -> float:
    top = float(s[0]) if s.size else 0.0
    ref = top if scale is None else max(top, scale)
    return tol.rank_tol * ref


def _check_ambiguous(s: np.ndarray, cutoff: float):
    if cutoff <= 0:
        return
    near = (s > cutoff / 10) & (s <= cutoff * 10)
    if np.any(near):
        raise NumericalFailure(
            "rank decision is ambiguous: singular values "
            f"{s[near].tolist()} lie within a factor 10 of the cutoff {cutoff:.3g}")


def numerical_rank(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL,
                   scale: float | None = None) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > _cutoff(s, tol, scale)))


def nullspace(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL,
              scale: float | None = None, strict: bool = False) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``m``.

    Rank is decided by singular values relative to the largest one, or to
    ``scale`` when that is larger. ``strict`` raises when the spectrum of
    singular values straddles the cutoff.
    """
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    cutoff = _cutoff(s, tol, scale)
    if strict:
        _check_ambiguous(s, cutoff)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def span_basis(vectors, tol: TolerancePolicy = DEFAULT_TOL,
               scale: float | None = None) -> np.ndarray:
    """Frobenius-orthonormal basis of the span of same-shape matrices."""
    stack = _stack(vectors)
    if stack.shape[0] == 0:
        return stack
    shape = stack.shape[1:]
    flat = stack.reshape(stack.shape[0], -1)
    u, s, vh = np.linalg.svd(flat, full_matrices=False)
    rank = int(np.sum(s > _cutoff(s, tol, scale))) if s.size else 0
    return vh[:rank].reshape((rank,) + shape)


def _stack(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        arr = vectors.astype(complex, copy=False)
        if arr.ndim == 2:
            arr = arr[None]
        return arr
    vectors = list(vectors)
    if not vectors:
        return np.zeros((0, 0, 0), dtype=complex)
    arr = np.stack([np.asarray(v, dtype=complex) for v in vectors])
    if arr.ndim == 2:
        arr = arr[None]
    return arr


def empty_basis(n: int) -> np.ndarray:
    return np.zeros((0, n, n), dtype=complex)


def concat(*bases: np.ndarray) -> np.ndarray:
    parts = [b for b in bases if b.shape[0]]
    if not parts:
        return bases[0][:0]
    return np.concatenate(parts, axis=0)


def coordinates(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Frobenius inner products <b_i, x> (coordinates if x is in the span)."""
    if basis.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return np.tensordot(basis.conj(), x, axes=([1, 2], [-2, -1]))


def combine(basis: np.ndarray, coords: np.ndarray) -> np.ndarray:
    return np.tensordot(coords, basis, axes=([-1], [0]))


def project(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
    if basis.shape[0] == 0:
        return np.zeros_like(x)
    return combine(basis, coordinates(basis, x))


def projection_residual(basis: np.ndarray, x: np.ndarray) -> float:
    """Frobenius norm of the component of ``x`` orthogonal to the span."""
    return float(np.linalg.norm(x - project(basis, x)))


def is_member(basis: np.ndarray, x: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return projection_residual(basis, x) < tol.residual_tol * max(1.0, float(np.linalg.norm(x)))


def subspace_residual(u: np.ndarray, v: np.ndarray) -> float:
    """Largest residual of u's (orthonormal) basis projected onto span v."""
    if u.shape[0] == 0:
        return 0.0
    return max(projection_residual(v, x) for x in u)


def mutual_residual(u: np.ndarray, v: np.ndarray) -> float:
    """Symmetric subspace distance; also infinite on dimension mismatch."""
    if u.shape[0] != v.shape[0]:
        return float("inf")
    return max(subspace_residual(u, v), subspace_residual(v, u))


def orthogonal_complement(sub: np.ndarray, ambient: np.ndarray,
                          tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of the orthogonal complement of ``sub`` inside span ``ambient``."""
    if sub.shape[0] == 0:
        return ambient.copy()
    remainder = np.stack([x - project(sub, x) for x in ambient])
    return span_basis(remainder, tol, scale=1.0)


def intersection(u: np.ndarray, v: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of span u ∩ span v (both orthonormal bases)."""
    if u.shape[0] == 0 or v.shape[0] == 0:
        return u[:0]
    # x = sum a_i u_i in span v  <=>  (I - P_v) U a = 0
    resid = np.stack([x - project(v, x) for x in u]).reshape(u.shape[0], -1).T
    null = nullspace(resid, tol, scale=1.0)
    if null.shape[1] == 0:
        return u[:0]
    return span_basis(np.tensordot(null.T, u, axes=([1], [0])), tol, scale=1.0)


def random_combination(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    k = basis.shape[0]
    c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return combine(basis, c / np.sqrt(2 * max(k, 1)))


# --------------------------------------------------------------------------
# invariant subspaces of a single operator
# --------------------------------------------------------------------------

def schur_invariant_subspace(m: np.ndarray, select: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the invariant subspace for the selected eigenvalues.

    ``select`` indexes the diagonal of the complex Schur form returned by
    ``scipy.linalg.schur``; reordering uses LAPACK ``ztrsen``.
    """
    t, z = sla.schur(m, output="complex")
    k = int(np.sum(select))
    if k == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    ts, qs, *_rest, info = sla.lapack.ztrsen(select.astype(np.int32), t, z, job="N")
    if info != 0:
        raise NumericalFailure(f"Schur reordering failed (info={info})")
    return qs[:, :k]


def generalized_eigenspace(m, lam: complex, tol: TolerancePolicy = DEFAULT_TOL,
                           max_block: int | None = None) -> np.ndarray:
    """Basis (columns) of Ker((m - lam I)^n).

    Eigenvalues are grouped by :func:`cluster_eigenvalues`; the clusters
    whose mean is within ``spec_tol * max(1, ||m||)`` of ``lam`` are
    selected and their invariant subspace is returned.
    """
    arr = as_matrix(m)
    n = arr.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    t, z = _schur(arr)
    diag = np.diag(t)
    scale = scale_of(arr)
    clusters = cluster_eigenvalues(diag, scale, tol, max_block, schur=(t, z))
    select = np.zeros(n, dtype=bool)
    for c in clusters:
        if abs(c.mean - lam) <= tol.spec_tol * scale:
            select[list(c.members)] = True
    k = int(select.sum())
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    ts, qs, *_rest, info = sla.lapack.ztrsen(select.astype(np.int32), t, z, job="N")
    if info != 0:
        raise NumericalFailure(f"Schur reordering failed (info={info})")
    return qs[:, :k]


def generalized_eigenspaces(m, tol: TolerancePolicy = DEFAULT_TOL,
                            max_block: int | None = None) -> list[tuple[complex, np.ndarray]]:
    """All generalized eigenspaces as (cluster mean, basis) pairs."""
    arr = as_matrix(m)
    n = arr.shape[0]
    if n == 0:
        return []
    t, z = _schur(arr)
    clusters = cluster_eigenvalues(np.diag(t), scale_of(arr), tol, max_block, schur=(t, z))
    out = []
    for c in clusters:
        select = np.zeros(n, dtype=bool)
        select[list(c.members)] = True
        ts, qs, *_rest, info = sla.lapack.ztrsen(select.astype(np.int32), t, z, job="N")
        if info != 0:
            raise NumericalFailure(f"Schur reordering failed (info={info})")
        out.append((c.mean, qs[:, :c.multiplicity]))
    return out


def is_nilpotent_power(m: np.ndarray, tol: float, index: int | None = None,
                       scale: float | None = None) -> bool:
    """m**index vanishes relative to ||m||**index.

    With ``scale`` given, a matrix whose norm is below ``tol * scale`` counts
    as zero; rounding noise is not nilpotent in shape.
    """
    n = m.shape[0]
    if n == 0:
        return True
    index = n if index is None else index
    s = opnorm(m)
    if s == 0 or (scale is not None and s <= tol * scale):
        return True
    return float(np.linalg.norm(mpow(m / s, index))) <= tol


def identity_like(x: Iterable) -> np.ndarray:
    arr = np.asarray(x)
    return np.eye(arr.shape[-1], dtype=complex)
