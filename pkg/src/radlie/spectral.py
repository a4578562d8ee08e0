"""Spectra, spectral radii and the holomorphic functional calculus.

f(a) is evaluated as the Cauchy integral (1/2 pi i) ∮ f(z) (z - a)^{-1} dz
over a counter-clockwise circle, discretised by the trapezoidal rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from . import numeric as nk
from .algebra import is_nilpotent
from .errors import ContourError, NumericalFailure, PreconditionError
from .numeric import DEFAULT_TOL, TolerancePolicy

MARGIN = 0.5
MIN_RADIUS = 1e-3
START_NODES = 64
MAX_NODES = 4096


@dataclass(frozen=True)
class Contour:
    center: complex
    radius: float
    nodes: int = START_NODES

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two and at least 16")

    def points(self, nodes: int | None = None, offset: bool = False) -> np.ndarray:
        nodes = self.nodes if nodes is None else nodes
        theta = 2 * np.pi * (np.arange(nodes) + (0.5 if offset else 0.0)) / nodes
        return self.center + self.radius * np.exp(1j * theta)

    def encloses(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    clusters: list = field(default_factory=list)


@dataclass(frozen=True)
class HoloFunction:
    """Evaluable function with a predicate for contours it is analytic on."""

    name: str
    fn: Callable[[complex], complex]
    admits: Callable[[Contour], bool] = lambda contour: True

    def __call__(self, z):
        return self.fn(z)


def _avoids_origin(contour: Contour) -> bool:
    return abs(contour.center) > contour.radius


def _avoids_branch_cut(contour: Contour) -> bool:
    # closed disk must miss (-inf, 0]
    c, r = contour.center, contour.radius
    if c.real > 0:
        return abs(c.imag) > r or c.real > r
    return abs(c.imag) > r


EXP = HoloFunction("exp", np.exp)
INV = HoloFunction("inv", lambda z: 1.0 / z, _avoids_origin)
LOG = HoloFunction("log", np.log, _avoids_branch_cut)


def polynomial(coeffs: Sequence[complex]) -> HoloFunction:
    """c0 + c1 z + c2 z^2 + ... evaluated by Horner's rule."""
    cs = [complex(c) for c in coeffs]

    def horner(z):
        acc = np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    return HoloFunction(f"poly{tuple(cs)}", horner)


def horner_matrix(coeffs: Sequence[complex], a: np.ndarray) -> np.ndarray:
    eye = np.eye(a.shape[0], dtype=complex)
    acc = np.zeros_like(eye)
    for c in reversed(list(coeffs)):
        acc = acc @ a + complex(c) * eye
    return acc


def spectrum(a, tol: TolerancePolicy = DEFAULT_TOL) -> SpectrumReport:
    arr = nk.as_matrix(a)
    vals = nk.eigenvalues(arr)
    clusters = nk.spectral_clusters(arr, tol)
    radius = max((abs(c.mean) for c in clusters), default=0.0)
    return SpectrumReport(vals, float(radius), clusters)


def _circle_through(p: complex, q: complex, r: complex | None = None):
    if r is None:
        return (p + q) / 2, abs(p - q) / 2
    # circumcircle; collinear triples fall back to the widest pair
    d = 2 * ((p.real * (q.imag - r.imag) + q.real * (r.imag - p.imag)
              + r.real * (p.imag - q.imag)))
    if abs(d) < 1e-300:
        pairs = [(p, q), (p, r), (q, r)]
        return _circle_through(*max(pairs, key=lambda pq: abs(pq[0] - pq[1])))
    sp, sq, sr = abs(p) ** 2, abs(q) ** 2, abs(r) ** 2
    ux = (sp * (q.imag - r.imag) + sq * (r.imag - p.imag) + sr * (p.imag - q.imag)) / d
    uy = (sp * (r.real - q.real) + sq * (p.real - r.real) + sr * (q.real - p.real)) / d
    c = complex(ux, uy)
    return c, abs(p - c)


def enclosing_circle(points) -> tuple[complex, float]:
    """Smallest circle containing every point (incremental Welzl construction)."""
    pts = [complex(z) for z in np.ravel(points)]
    if not pts:
        return 0j, 0.0
    slack = 1e-12 * max(1.0, max(abs(z) for z in pts))

    def inside(z, c, r):
        return abs(z - c) <= r + slack

    c, r = pts[0], 0.0
    for i, p in enumerate(pts):
        if inside(p, c, r):
            continue
        c, r = p, 0.0
        for j in range(i):
            q = pts[j]
            if inside(q, c, r):
                continue
            c, r = _circle_through(p, q)
            for k in range(j):
                if not inside(pts[k], c, r):
                    c, r = _circle_through(p, q, pts[k])
    return c, float(max(abs(z - c) for z in pts))


def auto_contour(a, margin: float = MARGIN) -> Contour:
    """Circle around the smallest disc holding the spectrum, widened by ``margin``.

    Centring on the enclosing disc rather than the eigenvalue mean keeps an
    outlying eigenvalue from inflating the radius, which matters for fast
    growing f such as exp where the rounding floor scales with max |f| on
    the contour.
    """
    center, extent = enclosing_circle(nk.eigenvalues(nk.as_matrix(a)))
    return Contour(center, max(extent * (1 + margin), MIN_RADIUS), START_NODES)


def _node_sum(f, a: np.ndarray, contour: Contour, nodes: int, offset: bool) -> np.ndarray:
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    total = np.zeros((n, n), dtype=complex)
    for z in contour.points(nodes, offset):
        # fixed summation order keeps results reproducible
        total += f(z) * (z - contour.center) * np.linalg.solve(z * eye - a, eye)
    return total


def holo_calc(f, a, contour: Contour | None = None,
              tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """f(a) by trapezoidal quadrature of the Cauchy integral.

    The node count doubles (reusing previous nodes) until two successive
    estimates agree to ``residual_tol * max(1, ||f(a)||)``.
    """
    arr = nk.as_matrix(a)
    contour = auto_contour(arr) if contour is None else contour
    if isinstance(f, HoloFunction) and not f.admits(contour):
        raise ContourError(f"{f.name} is not analytic on and inside the contour")
    vals = nk.eigenvalues(arr)
    gap = tol.spec_tol * nk.scale_of(arr)
    for lam in vals:
        dist = abs(lam - contour.center)
        if abs(dist - contour.radius) <= gap:
            raise ContourError(f"eigenvalue {lam} lies on the contour")
        if dist > contour.radius:
            raise ContourError(f"eigenvalue {lam} lies outside the contour")
    nodes = contour.nodes
    total = _node_sum(f, arr, contour, nodes, offset=False)
    estimate = total / nodes
    while nodes < MAX_NODES:
        # midpoints of the current grid are the extra nodes of the doubled one
        total = total + _node_sum(f, arr, contour, nodes, offset=True)
        nodes *= 2
        refined = total / nodes
        if np.linalg.norm(refined - estimate) < tol.residual_tol * max(1.0, np.linalg.norm(refined)):
            return refined
        estimate = refined
    raise NumericalFailure(f"contour quadrature did not converge with {MAX_NODES} nodes")


def exp_matrix(a, cross_check: bool = False, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Matrix exponential by scaling and squaring.

    With ``cross_check`` the contour integral is evaluated too and the two
    must agree to ``residual_tol`` relative to ||e^a||.
    """
    arr = nk.as_matrix(a)
    result = sla.expm(arr)
    if cross_check:
        other = holo_calc(EXP, arr, tol=tol)
        gap = np.linalg.norm(other - result)
        if gap > tol.residual_tol * max(1.0, np.linalg.norm(result)):
            raise NumericalFailure(f"exp routes disagree by {gap:.3g}")
    return result


def log_unipotent(u, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Log of a unipotent u via the terminating series sum (-1)^{k+1} (u-1)^k / k."""
    arr = nk.as_matrix(u)
    n = arr.shape[0]
    x = arr - np.eye(n)
    if not is_nilpotent(x, tol):
        raise PreconditionError("log_unipotent needs u - 1 nilpotent")
    total = np.zeros_like(x)
    term = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        term = term @ x
        total += ((-1) ** (k + 1) / k) * term
    return total


@dataclass(frozen=True)
class SubmultiplicativityResult:
    holds: bool
    product_slack: float
    sum_slack: float


def submultiplicativity_check(a, b, tol: TolerancePolicy = DEFAULT_TOL) -> SubmultiplicativityResult:
    """r(ab) <= r(a) r(b) and r(a+b) <= r(a) + r(b) for commuting a, b.

    Slacks are right side minus left side; negative means violated.
    """
    a = nk.as_matrix(a)
    b = nk.as_matrix(b)
    comm = np.linalg.norm(nk.commutator(a, b))
    if comm >= tol.residual_tol * max(1.0, nk.opnorm(a) * nk.opnorm(b)):
        raise PreconditionError(f"a and b do not commute (||[a,b]|| = {comm:.3g})")
    ra, rb = nk.spectral_radius(a, tol), nk.spectral_radius(b, tol)
    prod_slack = ra * rb - nk.spectral_radius(a @ b, tol)
    sum_slack = ra + rb - nk.spectral_radius(a + b, tol)
    allow = tol.spec_tol * max(1.0, nk.opnorm(a) * nk.opnorm(b), nk.opnorm(a) + nk.opnorm(b))
    return SubmultiplicativityResult(bool(prod_slack >= -allow and sum_slack >= -allow),
                                     float(prod_slack), float(sum_slack))


def spectral_mapping_gap(f, a: np.ndarray, fa: np.ndarray) -> float:
    """Multiset distance between sigma(f(a)) and f(sigma(a))."""
    mapped = np.array([f(z) for z in nk.eigenvalues(a)], dtype=complex)
    return nk.multiset_distance(nk.eigenvalues(fa), mapped)
