"""The Sylvester operator x -> a1 x - x a2 and its contour-integral resolvent.

Matrices act on row-major vectorisations, so vec(A X B) = kron(A, B^T) vec(X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import numeric as nk
from .errors import ContourError, DimensionError, NumericalFailure, PreconditionError, ResolventError
from .numeric import DEFAULT_TOL, TolerancePolicy

MAX_SPECTRUM_N = 16
SEPARATION_MARGIN = 0.05
START_NODES = 64
MAX_NODES = 4096


@dataclass(frozen=True, eq=False)
class SylvesterOperator:
    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self):
        a1 = nk.as_matrix(self.a1)
        a2 = nk.as_matrix(self.a2)
        if a1.shape != a2.shape:
            raise DimensionError(f"a1 is {a1.shape} but a2 is {a2.shape}")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)

    @classmethod
    def ad(cls, a) -> "SylvesterOperator":
        return cls(a, a)

    @property
    def n(self) -> int:
        return self.a1.shape[0]

    @cached_property
    def matrix_form(self) -> np.ndarray:
        eye = np.eye(self.n)
        return np.kron(self.a1, eye) - np.kron(eye, self.a2.T)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.a1 @ x - x @ self.a2

    def scale(self) -> float:
        return max(1.0, nk.opnorm(self.a1) + nk.opnorm(self.a2))


def difference_set(op: SylvesterOperator) -> np.ndarray:
    """All differences lambda_i - mu_j of eigenvalues of a1 and a2."""
    l1 = nk.eigenvalues(op.a1)
    l2 = nk.eigenvalues(op.a2)
    return (l1[:, None] - l2[None, :]).ravel()


def sylvester_spectrum(op: SylvesterOperator) -> np.ndarray:
    """Eigenvalues of the n^2 x n^2 matrix of the operator."""
    if op.n > MAX_SPECTRUM_N:
        raise DimensionError(f"n = {op.n} exceeds {MAX_SPECTRUM_N} for the dense eigenproblem")
    return nk.eigenvalues(op.matrix_form) if op.n else np.zeros(0, dtype=complex)


def spectrum_inclusion_residual(op: SylvesterOperator) -> float:
    """Largest distance from an eigenvalue of the operator to the difference set."""
    spec = sylvester_spectrum(op)
    diffs = difference_set(op)
    if spec.size == 0:
        return 0.0
    return float(np.abs(spec[:, None] - diffs[None, :]).min(axis=1).max())


@dataclass(frozen=True)
class SeparatingCircle:
    center: complex
    radius: float
    inner: float
    outer: float


def separating_circle(op: SylvesterOperator, lam: complex,
                      margin: float = SEPARATION_MARGIN) -> SeparatingCircle:
    """Circle around sigma(a2) whose lam-translate keeps sigma(a1) outside.

    With c the centroid of sigma(a2), the circle |z - c| = rho works iff
    max|mu - c| < rho < min|lambda_1 - lam - c|. The radius is the geometric
    mean of the two bounds, which balances the quadrature error from both
    sides.
    """
    l1 = nk.eigenvalues(op.a1)
    l2 = nk.eigenvalues(op.a2)
    c = complex(l2.mean())
    inner = float(np.abs(l2 - c).max())
    outer = float(np.abs(l1 - lam - c).min())
    if not outer > inner * (1 + margin) or outer <= 0:
        raise ContourError(
            f"no circle around sigma(a2) separates it from sigma(a1) - lambda "
            f"(inner {inner:.3g}, outer {outer:.3g})")
    if inner <= 1e-12 * outer:
        radius = outer / 2
    else:
        radius = math.sqrt(inner * outer)
    return SeparatingCircle(c, radius, inner, outer)


def _check_resolvent(op: SylvesterOperator, lam: complex, tol: TolerancePolicy):
    diffs = difference_set(op)
    if diffs.size and float(np.abs(diffs - lam).min()) <= 2 * tol.spec_tol * op.scale():
        raise ResolventError(f"lambda = {lam} is in the spectrum of the Sylvester operator")


def _quadrature(op: SylvesterOperator, lam: complex, circle: SeparatingCircle,
                term, tol: TolerancePolicy):
    """Doubling trapezoidal rule for (1/2 pi i) ∮ term(R1(lam+z), R2(z)) dz."""
    n = op.n
    eye = np.eye(n, dtype=complex)

    def node_sum(nodes, offset):
        theta = 2 * np.pi * (np.arange(nodes) + (0.5 if offset else 0.0)) / nodes
        total = None
        for w in circle.center + circle.radius * np.exp(1j * theta):
            r1 = np.linalg.solve((lam + w) * eye - op.a1, eye)
            r2 = np.linalg.solve(w * eye - op.a2, eye)
            part = (w - circle.center) * term(r1, r2)
            total = part if total is None else total + part
        return total

    nodes = START_NODES
    total = node_sum(nodes, False)
    estimate = total / nodes
    while nodes < MAX_NODES:
        total = total + node_sum(nodes, True)
        nodes *= 2
        refined = total / nodes
        if np.linalg.norm(refined - estimate) < tol.residual_tol * max(1.0, np.linalg.norm(refined)):
            return refined
        estimate = refined
    raise NumericalFailure(f"resolvent quadrature did not converge with {MAX_NODES} nodes")


def rosenblum_resolve(op: SylvesterOperator, lam: complex, y,
                      tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Solve lam x - (a1 x - x a2) = y by the Cauchy-integral inverse.

    x = (1/2 pi i) ∮ ((lam + z) - a1)^{-1} y (z - a2)^{-1} dz over a circle
    enclosing sigma(a2) whose translate by lam excludes sigma(a1).
    """
    y = nk.as_matrix(y)
    if y.shape != (op.n, op.n):
        raise DimensionError(f"right-hand side of shape {y.shape} for n = {op.n}")
    lam = complex(lam)
    _check_resolvent(op, lam, tol)
    circle = separating_circle(op, lam)
    return _quadrature(op, lam, circle, lambda r1, r2: r1 @ y @ r2, tol)


def rosenblum_operator(op: SylvesterOperator, lam: complex,
                       tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """The n^2 x n^2 matrix of the contour-integral inverse T."""
    lam = complex(lam)
    _check_resolvent(op, lam, tol)
    circle = separating_circle(op, lam)
    return _quadrature(op, lam, circle, lambda r1, r2: np.kron(r1, r2.T), tol)


def dense_resolve(op: SylvesterOperator, lam: complex, y) -> np.ndarray:
    """Oracle: solve (lam I - M) vec(x) = vec(y) directly."""
    y = nk.as_matrix(y)
    n = op.n
    system = complex(lam) * np.eye(n * n) - op.matrix_form
    return np.linalg.solve(system, y.reshape(-1)).reshape(n, n)


def resolvent_identity_residuals(op: SylvesterOperator, lam: complex,
                                 tol: TolerancePolicy = DEFAULT_TOL) -> tuple[float, float]:
    """||T(lam - M) - I|| and ||(lam - M)T - I|| in the operator 2-norm."""
    t = rosenblum_operator(op, lam, tol)
    shifted = complex(lam) * np.eye(op.n ** 2) - op.matrix_form
    eye = np.eye(op.n ** 2)
    return nk.opnorm(t @ shifted - eye), nk.opnorm(shifted @ t - eye)


def nilpotency_bound(a, lam: complex, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Smallest integer N > 2 r(a) / |lam|."""
    if lam == 0:
        raise PreconditionError("lambda must be nonzero")
    ratio = 2 * nk.spectral_radius(nk.as_matrix(a), tol) / abs(lam)
    # an exact integer ratio computed with rounding error must not drop N by one
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-9 * max(1.0, ratio):
        ratio = float(nearest)
    return int(math.floor(ratio)) + 1


@dataclass(frozen=True)
class AdEigenResult:
    hypothesis_met: bool
    hypothesis_residual: float
    bound: int
    residual: float
    passed: bool


def ad_power_residual(a: np.ndarray, b: np.ndarray, lam: complex, m: int) -> float:
    """||(ad a - lam)^m b||."""
    x = b
    for _ in range(m):
        x = nk.commutator(a, x) - lam * x
    return float(np.linalg.norm(x))


def check_ad_eigvector_nilpotent(a, b, lam: complex, m: int,
                                 tol: TolerancePolicy = DEFAULT_TOL) -> AdEigenResult:
    """Check b^N = 0 given (ad a - lam)^m b = 0, N from :func:`nilpotency_bound`.

    The hypothesis is tested first; when it fails the result says so
    instead of asserting anything about b.
    """
    a = nk.as_matrix(a)
    b = nk.as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError("a and b must have the same shape")
    norm_b = float(np.linalg.norm(b))
    bound = nilpotency_bound(a, lam, tol)
    if norm_b == 0:
        return AdEigenResult(True, 0.0, bound, 0.0, True)
    hyp = ad_power_residual(a, b, lam, m)
    if not hyp < tol.residual_tol * norm_b:
        return AdEigenResult(False, hyp, bound, float("nan"), False)
    resid = float(np.linalg.norm(nk.mpow(b / norm_b, bound)))
    return AdEigenResult(True, hyp, bound, resid, resid < tol.residual_tol)
