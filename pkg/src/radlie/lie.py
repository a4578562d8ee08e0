"""Lie subalgebras of M_n(C): closure, series, radical, Cartan and root data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numeric as nk
from .algebra import generate_algebra, is_nilpotent, trace_nilpotent_part
from .errors import DimensionError, NumericalFailure, PreconditionError
from .numeric import DEFAULT_TOL, TolerancePolicy

MAX_LIE_DIM = 64
CARTAN_RETRIES = 10
G0_SAMPLES = 20


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class LieSubalgebra:
    """Bracket-closed subspace with [x_i, x_j] = sum_k c[i,j,k] x_k."""

    ambient_n: int
    basis: np.ndarray
    structure_constants: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def from_basis(cls, basis: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL,
                   check: bool = True) -> "LieSubalgebra":
        n = basis.shape[-1]
        k = basis.shape[0]
        if k > MAX_LIE_DIM:
            raise DimensionError(f"Lie algebra dimension {k} exceeds {MAX_LIE_DIM}")
        prods = np.einsum("iab,jbc->ijac", basis, basis)
        brackets = prods - np.transpose(prods, (1, 0, 2, 3))
        consts = np.einsum("kac,ijac->ijk", basis.conj(), brackets)
        if check and k:
            recon = np.einsum("ijk,kab->ijab", consts, basis)
            resid = float(np.abs(recon - brackets).max())
            if resid > tol.residual_tol * max(1.0, float(np.abs(brackets).max())):
                raise PreconditionError(f"span is not closed under brackets (residual {resid:.3g})")
        return cls(n, basis, consts)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return nk.coordinates(self.basis, x)

    def element(self, coords: np.ndarray) -> np.ndarray:
        return nk.combine(self.basis, coords)

    def contains(self, x: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return nk.is_member(self.basis, x, tol)

    def ad_matrices(self) -> np.ndarray:
        """ad(x_i) on g: column j holds the coordinates of [x_i, x_j]."""
        return np.transpose(self.structure_constants, (0, 2, 1))

    def ad(self, x: np.ndarray) -> np.ndarray:
        return np.tensordot(self.coords(x), self.ad_matrices(), axes=([0], [0]))

    def killing_form(self) -> np.ndarray:
        ads = self.ad_matrices()
        return np.einsum("iab,jba->ij", ads, ads)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return nk.random_combination(self.basis, rng)


def _brackets(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    if xs.shape[0] == 0 or ys.shape[0] == 0:
        return np.zeros((0,) + xs.shape[1:], dtype=complex)
    prods = np.einsum("iab,jbc->ijac", xs, ys)
    rprods = np.einsum("jab,ibc->ijac", ys, xs)
    n = xs.shape[-1]
    return (prods - rprods).reshape(-1, n, n)


def bracket_span(xs: np.ndarray, ys: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of span{[x, y]}."""
    n = xs.shape[-1]
    br = _brackets(xs, ys)
    if br.shape[0] == 0:
        return nk.empty_basis(n)
    return nk.span_basis(br, tol, scale=1.0)


def make_lie_subalgebra(spanning: Sequence[np.ndarray], n: int | None = None,
                        tol: TolerancePolicy = DEFAULT_TOL,
                        max_dim: int = MAX_LIE_DIM) -> LieSubalgebra:
    """Close a span under the commutator bracket."""
    mats = [nk.as_matrix(x) for x in spanning]
    if n is None:
        if not mats:
            raise DimensionError("ambient size is required for an empty spanning set")
        n = mats[0].shape[0]
    for x in mats:
        if x.shape != (n, n):
            raise DimensionError(f"element of shape {x.shape} in M_{n}")
    basis = nk.span_basis(mats, tol, scale=1.0) if mats else nk.empty_basis(n)
    while True:
        if basis.shape[0] > max_dim:
            raise DimensionError(f"bracket closure exceeds dimension {max_dim}")
        grown = nk.span_basis(nk.concat(basis, _brackets(basis, basis)), tol, scale=1.0) \
            if basis.shape[0] else basis
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return LieSubalgebra.from_basis(basis, tol)


def _sub(g: LieSubalgebra, basis: np.ndarray, tol: TolerancePolicy) -> LieSubalgebra:
    if basis.shape[0] == 0:
        return LieSubalgebra(g.ambient_n, nk.empty_basis(g.ambient_n), np.zeros((0, 0, 0), complex))
    return LieSubalgebra.from_basis(basis, tol, check=False)


def derived_algebra(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> LieSubalgebra:
    return _sub(g, bracket_span(g.basis, g.basis, tol), tol)


def derived_series(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> list[LieSubalgebra]:
    """g, [g,g], [[g,g],[g,g]], ... up to the first repeated dimension."""
    series = [g]
    while series[-1].dim:
        nxt = derived_algebra(series[-1], tol)
        if nxt.dim == series[-1].dim:
            break
        series.append(nxt)
    return series


def is_solvable(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return derived_series(g, tol)[-1].dim == 0


def lower_central_series(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> list[LieSubalgebra]:
    series = [g]
    while series[-1].dim:
        nxt = _sub(g, bracket_span(g.basis, series[-1].basis, tol), tol)
        if nxt.dim == series[-1].dim:
            break
        series.append(nxt)
    return series


def is_nilpotent_lie(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return lower_central_series(g, tol)[-1].dim == 0


def ideal_residual(g: LieSubalgebra, sub: np.ndarray) -> float:
    """Largest distance of [x, s] (x in g, s in sub) from span sub, plus sub's distance from g."""
    worst = nk.subspace_residual(sub, g.basis)
    for s in sub:
        for x in g.basis:
            worst = max(worst, nk.projection_residual(sub, nk.commutator(x, s)))
    return worst


def center_lie(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of {z in g : [z, g] = 0}."""
    if g.dim == 0:
        return g.basis
    # ad(z) = sum_i z_i ad(x_i) must vanish
    system = np.transpose(g.ad_matrices(), (1, 2, 0)).reshape(-1, g.dim)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(g.ambient_n)
    return nk.span_basis(np.tensordot(null.T, g.basis, axes=([1], [0])), tol, scale=1.0)


def normalizer(g: LieSubalgebra, h: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of {x in g : [x, h] in h}."""
    if h.shape[0] == 0:
        return g.basis
    rows = []
    for x in g.basis:
        rows.append(np.stack([b - nk.project(h, b) for b in (nk.commutator(x, y) for y in h)]).ravel())
    system = np.stack(rows, axis=1)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(g.ambient_n)
    return nk.span_basis(np.tensordot(null.T, g.basis, axes=([1], [0])), tol, scale=1.0)


def quotient_killing_form(g: LieSubalgebra, ideal: np.ndarray) -> np.ndarray:
    """Killing form of g/ideal on the orthogonal complement of the ideal."""
    comp = nk.orthogonal_complement(ideal, g.basis)
    if comp.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    br = _brackets(comp, comp).reshape(comp.shape[0], comp.shape[0], g.ambient_n, g.ambient_n)
    consts = np.einsum("kac,ijac->ijk", comp.conj(), br)
    ads = np.transpose(consts, (0, 2, 1))
    return np.einsum("iab,jba->ij", ads, ads)


def solvable_radical(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> LieSubalgebra:
    """Largest solvable ideal, as the Killing-orthogonal of [g, g].

    The result is checked to be a solvable ideal with g/r carrying a
    nondegenerate Killing form; NumericalFailure otherwise.
    """
    if g.dim == 0:
        return g
    kil = g.killing_form()
    der = bracket_span(g.basis, g.basis, tol)
    if der.shape[0] == 0:
        return g
    dc = np.stack([g.coords(d) for d in der])
    system = (kil @ dc.T).T
    null = nk.nullspace(system, tol, scale=max(1.0, nk.opnorm(kil)))
    if null.shape[1] == 0:
        rad_basis = nk.empty_basis(g.ambient_n)
    else:
        rad_basis = nk.span_basis(np.tensordot(null.T, g.basis, axes=([1], [0])), tol, scale=1.0)
    r = _sub(g, rad_basis, tol)
    resid = ideal_residual(g, r.basis)
    if resid > 10 * tol.residual_tol:
        raise NumericalFailure(f"computed radical is not an ideal (residual {resid:.3g})")
    if r.dim and not is_solvable(r, tol):
        raise NumericalFailure("computed radical is not solvable")
    qk = quotient_killing_form(g, r.basis)
    if qk.shape[0]:
        s = np.linalg.svd(qk, compute_uv=False)
        if s[-1] <= tol.rank_tol * max(1.0, s[0]):
            raise NumericalFailure("Killing form of g/r is degenerate")
    return r


def _fitting_null(g: LieSubalgebra, h0: np.ndarray, tol: TolerancePolicy) -> np.ndarray:
    ad = g.ad(h0)
    cols = nk.generalized_eigenspace(ad, 0.0, tol, max_block=g.dim)
    if cols.shape[1] == 0:
        return nk.empty_basis(g.ambient_n)
    return nk.span_basis(np.tensordot(cols.T, g.basis, axes=([1], [0])), tol, scale=1.0)


def cartan_subalgebra(g: LieSubalgebra, seed=None, tol: TolerancePolicy = DEFAULT_TOL,
                      retries: int = CARTAN_RETRIES) -> LieSubalgebra:
    """Fitting null component of ad(h0) for a random (hence regular) h0.

    A draw is accepted once the result is nilpotent and self-normalizing.
    """
    rng = _rng(seed)
    if g.dim == 0:
        return g
    for _ in range(retries):
        h0 = g.random_element(rng)
        hb = _fitting_null(g, h0, tol)
        if hb.shape[0] == 0:
            continue
        try:
            h = LieSubalgebra.from_basis(hb, tol)
        except PreconditionError:
            continue
        if not is_nilpotent_lie(h, tol):
            continue
        if normalizer(g, hb, tol).shape[0] != hb.shape[0]:
            continue
        return h
    raise NumericalFailure(f"no Cartan subalgebra found in {retries} draws")


@dataclass(frozen=True, eq=False)
class RootSpace:
    values: np.ndarray
    basis: np.ndarray


@dataclass(frozen=True, eq=False)
class CartanDecomposition:
    cartan: LieSubalgebra
    roots: list[RootSpace]
    fitting_plus: np.ndarray
    ad_nilpotent_part: np.ndarray | None
    ad_nilpotent_directions: tuple[int, ...] = ()
    ad_nilpotent_samples: int = 0
    g0_is_subspace: bool = False
    g0_ideal_residual: float = float("nan")
    root_residual: float = 0.0
    notes: dict = field(default_factory=dict)


def _ad_nilpotent(ad: np.ndarray, tol: TolerancePolicy) -> bool:
    return is_nilpotent(ad, tol, scale=1.0)


def ad_nilpotent_subspace(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """{x in g : ad x nilpotent} for solvable g.

    ad(g) is then triangularizable, so ad x is nilpotent iff tr(ad x . y) = 0
    for every y in the associative algebra generated by ad(g).
    """
    if g.dim == 0:
        return g.basis
    ads = g.ad_matrices()
    gen = generate_algebra(list(ads), g.dim, tol)
    system = np.einsum("jab,iba->ji", gen.basis, ads)
    null = nk.nullspace(system, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(g.ambient_n)
    return nk.span_basis(np.tensordot(null.T, g.basis, axes=([1], [0])), tol, scale=1.0)


def root_decomposition(g: LieSubalgebra, h: LieSubalgebra, seed=None,
                       tol: TolerancePolicy = DEFAULT_TOL) -> CartanDecomposition:
    """Generalized weight spaces of ad(h) on g.

    The spaces are the generalized eigenspaces of ad(h*) for a random
    h* in h. Each root is recorded by its values on h's basis, read off
    as tr(ad h_i restricted to g^alpha) / dim g^alpha.
    """
    rng = _rng(seed)
    k = g.dim
    basis_h = h.basis
    ads_h = np.stack([g.ad(x) for x in basis_h]) if h.dim else np.zeros((0, k, k), complex)
    last_error = None
    for _ in range(CARTAN_RETRIES):
        hstar = h.random_element(rng) if h.dim else np.zeros((g.ambient_n,) * 2, complex)
        spaces = nk.generalized_eigenspaces(g.ad(hstar), tol, max_block=k) if k else []
        scale = max(1.0, max((nk.opnorm(a) for a in ads_h), default=1.0))
        zero_dim = 0
        roots: list[tuple[np.ndarray, np.ndarray]] = []
        worst = 0.0
        for mean, cols in spaces:
            d = cols.shape[1]
            restricted = np.einsum("ad,iab,be->ide", cols.conj(), ads_h, cols)
            values = np.trace(restricted, axis1=1, axis2=2) / d
            for r_i, v_i in zip(restricted, values):
                shifted = (r_i - v_i * np.eye(d)) / scale
                worst = max(worst, float(np.linalg.norm(nk.mpow(shifted, d))))
            # invariance: ad h_i maps the space into itself
            for a in ads_h:
                img = a @ cols
                worst = max(worst, float(np.linalg.norm(img - cols @ (cols.conj().T @ img))) / scale)
            if np.all(np.abs(values) <= tol.spec_tol * scale) and abs(mean) <= tol.spec_tol * scale:
                zero_dim += d
                continue
            roots.append((values, cols))
        if zero_dim != h.dim or worst > tol.residual_tol * 10:
            last_error = (f"weight decomposition mismatch: null part {zero_dim} vs dim h {h.dim}, "
                          f"residual {worst:.3g}")
            continue
        break
    else:
        raise NumericalFailure(last_error or "root decomposition failed")

    # identify roots whose value vectors agree
    merged: list[tuple[np.ndarray, list[np.ndarray]]] = []
    for values, cols in roots:
        for entry in merged:
            if np.all(np.abs(entry[0] - values) < tol.spec_tol * scale):
                entry[1].append(cols)
                break
        else:
            merged.append((values, [cols]))
    root_spaces = []
    for values, parts in merged:
        cols = np.concatenate(parts, axis=1)
        mats = np.tensordot(cols.T, g.basis, axes=([1], [0]))
        root_spaces.append(RootSpace(values, nk.span_basis(mats, tol, scale=1.0)))
    plus = nk.concat(nk.empty_basis(g.ambient_n), *[r.basis for r in root_spaces])
    plus = nk.span_basis(plus, tol, scale=1.0) if plus.shape[0] else plus
    if h.dim + plus.shape[0] != g.dim:
        raise NumericalFailure(f"dim h + dim g+ = {h.dim} + {plus.shape[0]} != dim g = {g.dim}")

    directions = tuple(i for i, a in enumerate(g.ad_matrices()) if _ad_nilpotent(a, tol))
    samples = sum(_ad_nilpotent(g.ad(g.random_element(rng)), tol) for _ in range(G0_SAMPLES))
    if is_solvable(g, tol):
        g0 = ad_nilpotent_subspace(g, tol)
        g0_resid = ideal_residual(g, g0)
        return CartanDecomposition(h, root_spaces, plus, g0, directions, samples, True,
                                   g0_resid, worst)
    return CartanDecomposition(h, root_spaces, plus, None, directions, samples, False,
                               float("nan"), worst)


@dataclass(frozen=True, eq=False)
class NestQuotients:
    """Flag X_k = Ker(Y^k) with the induced actions on X_k / X_{k-1}."""

    dims: tuple[int, ...]
    complements: list[np.ndarray]
    rho: list[np.ndarray]
    invariance_residual: float

    def apply(self, x: np.ndarray) -> list[np.ndarray]:
        return [w.conj().T @ x @ w for w in self.complements]

    def image_dims(self, tol: TolerancePolicy = DEFAULT_TOL) -> list[int]:
        out = []
        for r in self.rho:
            if r.shape[1] == 0:
                out.append(0)
                continue
            flat = r.reshape(r.shape[0], -1)
            out.append(nk.numerical_rank(flat, tol, scale=1.0) if flat.size else 0)
        return out


def nest_quotients(g: LieSubalgebra, y, tol: TolerancePolicy = DEFAULT_TOL) -> NestQuotients:
    """Quotient representations of g along the kernel flag of a central nilpotent Y."""
    y = nk.as_matrix(y)
    n = g.ambient_n
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0:
        raise PreconditionError("Y must be nonzero")
    if not g.contains(y, tol):
        raise PreconditionError("Y is not an element of g")
    comm = max((float(np.linalg.norm(nk.commutator(y, x))) for x in g.basis), default=0.0)
    if comm >= tol.residual_tol * max(1.0, norm_y):
        raise PreconditionError(f"Y is not central in g (||[Y, g]|| = {comm:.3g})")
    if not is_nilpotent(y, tol):
        raise PreconditionError("Y is not nilpotent")
    flags = [np.zeros((n, 0), dtype=complex)]
    complements = []
    scale = nk.scale_of(y)
    while flags[-1].shape[1] < n:
        prev = flags[-1]
        # X_k = {v : Y v in X_{k-1}}
        proj_out = np.eye(n) - prev @ prev.conj().T
        nxt = nk.nullspace(proj_out @ y, tol, scale=scale)
        if nxt.shape[1] <= prev.shape[1]:
            raise NumericalFailure("kernel flag of Y stalled before reaching C^n")
        w = nxt - prev @ (prev.conj().T @ nxt)
        u, s, _ = np.linalg.svd(w, full_matrices=False)
        complements.append(u[:, : nxt.shape[1] - prev.shape[1]])
        flags.append(nxt)
    worst = 0.0
    for x in g.basis:
        for f in flags[1:]:
            img = x @ f
            worst = max(worst, float(np.linalg.norm(img - f @ (f.conj().T @ img))))
    if worst > 10 * tol.residual_tol * max((nk.scale_of(x) for x in g.basis), default=1.0):
        raise NumericalFailure(f"kernel flag is not g-invariant (residual {worst:.3g})")
    rho = [np.stack([w.conj().T @ x @ w for x in g.basis]) if g.dim
           else np.zeros((0, w.shape[1], w.shape[1]), complex) for w in complements]
    return NestQuotients(tuple(f.shape[1] for f in flags), complements, rho, worst)


def minimal_vanishing_degree(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Smallest m with x_1 ... x_m = 0 for all x_i in g.

    The span P_k of all k-fold products is built as span(P_{k-1} . g);
    m is the first k with P_k = 0.
    """
    n = g.ambient_n
    if g.dim == 0:
        return 1
    for x in g.basis:
        if not is_nilpotent(x, tol):
            raise PreconditionError("g has a basis element that is not nilpotent")
    if trace_nilpotent_part(g.basis, tol).shape[0] != g.dim:
        raise PreconditionError("g contains elements that are not nilpotent")
    level = g.basis
    for m in range(2, n + 2):
        prods = np.einsum("iab,jbc->ijac", level, g.basis).reshape(-1, n, n)
        if float(np.abs(prods).max()) < tol.residual_tol:
            return m
        level = nk.span_basis(prods, tol, scale=1.0)
        if level.shape[0] == 0:
            return m
    raise NumericalFailure("products of g did not vanish within n factors")


def restricted_ad(a, j: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Matrix of x -> [a, x] on j; precondition error if j is not ad(a)-invariant."""
    a = nk.as_matrix(a)
    images = [nk.commutator(a, x) for x in j.basis]
    for img in images:
        if not nk.is_member(j.basis, img, tol):
            raise PreconditionError("j is not invariant under ad a")
    if not images:
        return np.zeros((0, 0), dtype=complex)
    return np.stack([j.coords(img) for img in images], axis=1)


def is_ad_nilpotent_on(a, j: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    a = nk.as_matrix(a)
    return is_nilpotent(restricted_ad(a, j, tol), tol, scale=nk.scale_of(a))


def nilpotent_elements(g: LieSubalgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """N ∩ g for a triangularizable (e.g. solvable) g."""
    return trace_nilpotent_part(g.basis, tol)
