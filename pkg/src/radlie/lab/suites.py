"""One verifier per structural result, plus the seeded suite runner.

Each trial function receives the suite's :class:`InstanceSpec` and a
dedicated Generator seeded from (seed, suite id, trial index), builds an
instance, checks the hypotheses and then the conclusion.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from .. import numeric as nk
from ..algebra import (abstract_radical, center, definitional_radical, generate_algebra,
                       is_nilpotent, is_quasinilpotent, nilpotency_residual, quotient_by_ideal,
                       radical, radical_witness, trace_nilpotent_part)
from ..errors import NumericalFailure, PreconditionError
from ..lie import (LieSubalgebra, cartan_subalgebra, center_lie, ideal_residual, is_ad_nilpotent_on,
                   minimal_vanishing_degree, nest_quotients, nilpotent_elements,
                   root_decomposition)
from ..spectral import EXP, exp_matrix, holo_calc, horner_matrix, log_unipotent, polynomial
from ..spectral import submultiplicativity_check
from ..sylvester import (SylvesterOperator, check_ad_eigvector_nilpotent, dense_resolve,
                         difference_set, resolvent_identity_residuals, rosenblum_resolve,
                         spectrum_inclusion_residual, sylvester_spectrum)
from . import generators as gen
from .generators import InstanceSpec
from .report import TrialOutcome, VerificationReport

RANDOM_SAMPLES = 50
QUOTIENT_SAMPLES = 20
KS_TIMES = (1.0, 2.5)
KS_IDENTITY_TOL = 1e-6
ROSENBLUM_TOL = 1e-7
ROSENBLUM_LAMBDAS = 3
POLY_TOL = 1e-9
ROUNDTRIP_TOL = 1e-9
GROWTH_T = 1e3
# ||b^N|| must beat residual_tol by two orders (1e-10 at the defaults)
COR34_FACTOR = 1e-2


def _fam(spec: InstanceSpec, default: str) -> str:
    return spec.family or default


def _solvable_or_mixed(spec: InstanceSpec, rng: np.random.Generator):
    family = spec.family
    if family is None:
        family = ("solvable", "mixed-levi", "nilpotent")[int(rng.choice(3, p=[0.45, 0.45, 0.1]))]
    if family == "mixed-levi":
        return gen.gen_mixed_instance(spec, rng)
    if family == "nilpotent":
        return gen.gen_nilpotent_instance(spec, rng)
    return gen.gen_solvable_instance(spec, rng)


def _cluster_set(m: np.ndarray, scale: float, tol, max_block: int | None) -> np.ndarray:
    return np.array([c.mean for c in nk.spectral_clusters(m, tol, max_block, scale)],
                    dtype=complex)


def _cluster_multiset(m: np.ndarray, tol, max_block: int | None = None) -> np.ndarray:
    clusters = nk.spectral_clusters(m, tol, max_block)
    return np.concatenate([np.full(c.multiplicity, c.mean) for c in clusters]) if clusters \
        else np.zeros(0, dtype=complex)


# ---------------------------------------------------------------------------
# Lie-theoretic suites
# ---------------------------------------------------------------------------

def trial_t43(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """[j, g] lies in rad A(g), and rad A(g) consists of nilpotents."""
    tol = spec.tol
    inst = _solvable_or_mixed(spec, rng)
    g, j = inst.g, inst.j
    A = generate_algebra(list(g.basis), g.ambient_n, tol)
    rad = radical(A, tol)
    worst, where = 0.0, None
    for a, x in enumerate(j):
        for b, y in enumerate(g.basis):
            br = nk.commutator(x, y)
            r = nk.projection_residual(rad, br) / max(1.0, float(np.linalg.norm(br)))
            if r > worst:
                worst, where = r, (a, b)
    nil = max((nilpotency_residual(r) for r in rad), default=0.0)
    quasi = all(is_quasinilpotent(r, tol) for r in rad)
    residual = max(worst, nil)
    return TrialOutcome(
        passed=worst < tol.residual_tol and nil < tol.residual_tol and quasi,
        residual=residual,
        witness={"family": inst.family, "j_kind": inst.j_kind, "n": g.ambient_n,
                 "dim_g": g.dim, "dim_j": int(j.shape[0]), "dim_A": A.dim,
                 "dim_rad": int(rad.shape[0]), "worst_pair": where,
                 "bracket_residual": worst, "nilpotency_residual": nil},
        observations={"family_" + inst.family: 1, "nontrivial_j": int(j.shape[0] > 0)})


def trial_prop42(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """N ∩ j is an ideal of g and lies in rad A(g)."""
    tol = spec.tol
    inst = gen.gen_nilpotent_instance(spec, rng) if _fam(spec, "") == "nilpotent" \
        else gen.gen_solvable_instance(spec, rng)
    g, j = inst.g, inst.j
    nj = trace_nilpotent_part(j, tol) if j.shape[0] else j
    mismatches = 0
    for _ in range(RANDOM_SAMPLES):
        x = nk.random_combination(j, rng) if j.shape[0] else np.zeros((g.ambient_n,) * 2)
        if is_nilpotent(x, tol) != nk.is_member(nj, x, tol):
            mismatches += 1
        if nj.shape[0]:
            y = nk.random_combination(nj, rng)
            if not is_nilpotent(y, tol):
                mismatches += 1
    ideal = ideal_residual(g, nj)
    A = generate_algebra(list(g.basis), g.ambient_n, tol)
    rad = radical(A, tol)
    contained = nk.subspace_residual(nj, rad)
    residual = max(ideal, contained)
    return TrialOutcome(
        passed=mismatches == 0 and residual < tol.residual_tol,
        residual=residual,
        witness={"family": inst.family, "j_kind": inst.j_kind, "n": g.ambient_n,
                 "dim_g": g.dim, "dim_j": int(j.shape[0]), "dim_nj": int(nj.shape[0]),
                 "ideal_residual": ideal, "containment_residual": contained,
                 "sample_mismatches": mismatches},
        observations={"nonzero_nj": int(nj.shape[0] > 0)})


def trial_prop26(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """N ∩ g is an ideal; Fitting chain; nilpotency via the kernel flag of Y."""
    tol = spec.tol
    family = spec.family or ("solvable" if rng.random() < 0.7 else "nilpotent")
    inst = gen.gen_nilpotent_instance(spec, rng) if family == "nilpotent" \
        else gen.gen_solvable_instance(spec, rng)
    g = inst.g
    h = cartan_subalgebra(g, rng, tol)
    dec = root_decomposition(g, h, rng, tol)
    base = {"family": inst.family, "n": g.ambient_n, "dim_g": g.dim, "dim_h": h.dim,
            "roots": len(dec.roots)}
    for root in dec.roots:
        if trace_nilpotent_part(root.basis, tol).shape[0] != root.basis.shape[0]:
            return TrialOutcome(False, hypothesis_met=False, witness=base)
    ng = nilpotent_elements(g, tol)
    ideal = ideal_residual(g, ng)
    plus_in_n = nk.subspace_residual(dec.fitting_plus, ng)
    n_in_g0 = nk.subspace_residual(ng, dec.ad_nilpotent_part)
    fitting_ok = h.dim + dec.fitting_plus.shape[0] == g.dim
    residual = max(ideal, plus_in_n, n_in_g0)
    nest_checked, nest_mismatch = 0, 0
    central = trace_nilpotent_part(center_lie(g, tol), tol)
    if central.shape[0]:
        nq = nest_quotients(g, central[0], tol)
        samples = list(g.basis)
        samples += [g.random_element(rng) for _ in range(RANDOM_SAMPLES)]
        if ng.shape[0]:
            samples += [nk.random_combination(ng, rng) for _ in range(RANDOM_SAMPLES // 2)]
        for x in samples:
            lhs = is_nilpotent(x, tol)
            rhs = all(is_nilpotent(block, tol, scale=nk.scale_of(x))
                      for block in nq.apply(x))
            nest_checked += 1
            nest_mismatch += int(lhs != rhs)
        base["nest_dims"] = list(nq.dims)
    base.update({"dim_ng": int(ng.shape[0]), "ideal_residual": ideal,
                 "plus_in_n": plus_in_n, "n_in_g0": n_in_g0, "nest_mismatches": nest_mismatch})
    return TrialOutcome(
        passed=residual < tol.residual_tol and fitting_ok and nest_mismatch == 0,
        residual=residual, witness=base,
        observations={"nest_checks": nest_checked, "nest_instances": int(nest_checked > 0)})


def trial_lemma27(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """Products of m elements of a nilpotent g vanish, with m <= n."""
    tol = spec.tol
    inst = gen.gen_nilpotent_instance(spec, rng)
    g = inst.g
    n = g.ambient_n
    m = minimal_vanishing_degree(g, tol)
    worst = 0.0
    for _ in range(2 * RANDOM_SAMPLES):
        prod = np.eye(n, dtype=complex)
        for _ in range(m):
            x = g.random_element(rng)
            prod = prod @ (x / np.linalg.norm(x))
        worst = max(worst, float(np.linalg.norm(prod)))
    return TrialOutcome(
        passed=m <= n and worst < tol.residual_tol,
        residual=worst,
        witness={"family": inst.family, "n": n, "dim_g": g.dim, "m": m},
        observations={f"m={m}": 1})


def trial_lemma41(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """rad A(g) = 0 and ad g nilpotent on j force [g, j] = 0."""
    tol = spec.tol
    inst = gen.gen_semisimple_commuting(spec, rng)
    g, j = inst.g, inst.j
    A = generate_algebra(list(g.basis), g.ambient_n, tol)
    rad = radical(A, tol)
    witness = {"variant": inst.variant, "n": g.ambient_n, "dim_g": g.dim,
               "dim_j": int(j.shape[0]), "dim_rad": int(rad.shape[0])}
    if rad.shape[0]:
        return TrialOutcome(False, hypothesis_met=False, witness=witness)
    jl = LieSubalgebra.from_basis(j, tol, check=False)
    try:
        if not all(is_ad_nilpotent_on(a, jl, tol) for a in g.basis):
            return TrialOutcome(False, hypothesis_met=False, witness=witness)
    except PreconditionError:
        return TrialOutcome(False, hypothesis_met=False, witness=witness)
    worst = max(float(np.linalg.norm(nk.commutator(x, y))) for x in g.basis for y in j)
    return TrialOutcome(passed=worst < tol.residual_tol, residual=worst, witness=witness,
                        observations={"variant_" + inst.variant: 1})


# ---------------------------------------------------------------------------
# element-level suites
# ---------------------------------------------------------------------------

def trial_ks(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """c = [a, b] commuting with a and b is quasi-nilpotent."""
    tol = spec.tol
    spec3 = spec if spec.ambient_n >= 3 else InstanceSpec(3, spec.lie_dim, spec.trials,
                                                          spec.seed, spec.tol, None, spec.cond)
    t = gen.gen_ks_triple(spec3, rng)
    n = t.a.shape[0]
    rc = nk.spectral_radius(t.c, tol, max_block=n)
    ident = 0.0
    spec_gap = 0.0
    sb = _cluster_multiset(t.b, tol, n)
    for s in KS_TIMES:
        lhs = exp_matrix(s * t.a) @ t.b @ exp_matrix(-s * t.a)
        rhs = t.b + s * t.c
        ident = max(ident, float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(rhs))))
        spec_gap = max(spec_gap, nk.multiset_distance(sb, _cluster_multiset(rhs, tol, n)))
    residual = max(rc, spec_gap)
    return TrialOutcome(
        passed=rc < tol.spec_tol and ident < KS_IDENTITY_TOL and spec_gap < tol.spec_tol,
        residual=residual,
        witness={"n": n, "degenerate": t.degenerate, "r_c": rc, "identity_residual": ident,
                 "spectrum_gap": spec_gap},
        observations={"degenerate": int(t.degenerate), "max_identity_residual": ident})


def _separated_lambda(op: SylvesterOperator, rng: np.random.Generator) -> complex:
    l1 = nk.eigenvalues(op.a1)
    l2 = nk.eigenvalues(op.a2)
    c1, c2 = l1.mean(), l2.mean()
    rho1 = float(np.abs(l1 - c1).max())
    rho2 = float(np.abs(l2 - c2).max())
    radius = (rho1 + rho2) * (1.2 + rng.random()) + 0.1
    return complex(c1 - c2 + radius * np.exp(2j * np.pi * rng.random()))


def trial_rosenblum(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """Spectrum inclusion and the contour-integral inverse of lambda - Delta."""
    tol = spec.tol
    a1, a2 = gen.gen_dense_pair(spec, rng)
    if rng.random() < 0.1:
        a2 = a1.copy()
    op = SylvesterOperator(a1, a2)
    incl = spectrum_inclusion_residual(op)
    spec_d = sylvester_spectrum(op)
    equal = nk.spectrum_set_distance(spec_d, difference_set(op)) < tol.spec_tol
    worst_rel, worst_id, worst_eq = 0.0, 0.0, 0.0
    for _ in range(ROSENBLUM_LAMBDAS):
        lam = _separated_lambda(op, rng)
        y = gen.complex_normal(rng, (op.n, op.n))
        x = rosenblum_resolve(op, lam, y, tol)
        xd = dense_resolve(op, lam, y)
        worst_rel = max(worst_rel, float(np.linalg.norm(x - xd)) / float(np.linalg.norm(xd)))
        eq = lam * x - op(x) - y
        worst_eq = max(worst_eq, float(np.linalg.norm(eq)) / max(1.0, float(np.linalg.norm(y))))
        worst_id = max(worst_id, *resolvent_identity_residuals(op, lam, tol))
    residual = max(worst_rel, worst_id, worst_eq)
    return TrialOutcome(
        passed=incl < tol.spec_tol and residual < ROSENBLUM_TOL,
        residual=max(residual, incl),
        witness={"n": op.n, "inclusion_residual": incl, "oracle_relative": worst_rel,
                 "identity_residual": worst_id, "equation_residual": worst_eq},
        observations={"set_equality": int(equal)})


def trial_cor34(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """(ad a - lambda)^m b = 0 implies b^N = 0 for N > 2 r(a) / |lambda|."""
    tol = spec.tol
    inst = gen.gen_ad_eigen_instance(spec, rng)
    res = check_ad_eigvector_nilpotent(inst.a, inst.b, inst.lam, inst.m, tol)
    witness = {"n": inst.a.shape[0], "lambda": inst.lam, "m": inst.m, "N": res.bound,
               "levels": list(inst.levels), "hypothesis_residual": res.hypothesis_residual}
    if not res.hypothesis_met:
        return TrialOutcome(False, hypothesis_met=False, witness=witness)
    threshold = COR34_FACTOR * tol.residual_tol
    return TrialOutcome(passed=res.residual < threshold, residual=res.residual, witness=witness,
                        observations={f"m={inst.m}": 1})


def trial_unbounded_exp(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """exp(t x) is unbounded for nilpotent x != 0; Exp and Log are inverse."""
    x = gen.gen_nilpotent_matrix(spec, rng)
    n = x.shape[0]
    growth = float(np.linalg.norm(exp_matrix(GROWTH_T * x)))
    floor = 10 * np.sqrt(n)
    worst = 0.0
    for _ in range(3):
        s = 2 * gen.complex_normal(rng)
        u = exp_matrix(s * x)
        log_u = log_unipotent(u, spec.tol)
        worst = max(worst, float(np.linalg.norm(log_u - s * x)) / max(1.0, float(np.linalg.norm(s * x))))
        back = exp_matrix(log_u)
        worst = max(worst, float(np.linalg.norm(back - u)) / max(1.0, float(np.linalg.norm(u))))
    return TrialOutcome(
        passed=growth >= floor and worst < ROUNDTRIP_TOL,
        residual=worst,
        witness={"n": n, "growth": growth, "floor": floor, "roundtrip_residual": worst},
        observations={"min_growth_ratio": growth / floor})


def trial_funcalc(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """Contour quadrature against Horner, scaling-and-squaring and spectral mapping."""
    tol = spec.tol
    n = int(rng.integers(1, min(16, max(spec.ambient_n, 1)) + 1))
    a = gen.complex_normal(rng, (n, n)) / np.sqrt(n) + 0.5 * gen.complex_normal(rng)
    degree = int(rng.integers(0, 6))
    coeffs = gen.complex_normal(rng, degree + 1)
    direct = horner_matrix(coeffs, a)
    via = holo_calc(polynomial(coeffs), a, tol=tol)
    poly_rel = float(np.linalg.norm(via - direct)) / max(1.0, float(np.linalg.norm(direct)))
    ident = holo_calc(polynomial([0, 1]), a, tol=tol)
    ident_rel = float(np.linalg.norm(ident - a)) / max(1.0, float(np.linalg.norm(a)))
    ea = holo_calc(EXP, a, tol=tol)
    ref = exp_matrix(a)
    exp_rel = float(np.linalg.norm(ea - ref)) / max(1.0, float(np.linalg.norm(ref)))
    mapping = nk.multiset_distance(nk.eigenvalues(ea), np.exp(nk.eigenvalues(a)))
    map_tol = tol.spec_tol * nk.scale_of(ea)
    return TrialOutcome(
        passed=(poly_rel < POLY_TOL and ident_rel < POLY_TOL and exp_rel < tol.residual_tol
                and mapping < map_tol),
        residual=max(poly_rel, ident_rel, exp_rel),
        witness={"n": n, "degree": degree, "poly_relative": poly_rel,
                 "identity_relative": ident_rel, "exp_relative": exp_rel,
                 "mapping_distance": mapping},
        observations={})


# ---------------------------------------------------------------------------
# associative suites
# ---------------------------------------------------------------------------

def trial_lemma32(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """Central quasi-nilpotents lie in the radical."""
    tol = spec.tol
    A, kind = gen.gen_algebra(spec, rng)
    Z = center(A, tol)
    zq = trace_nilpotent_part(Z, tol)
    mismatches = 0
    for _ in range(RANDOM_SAMPLES):
        z = nk.random_combination(Z, rng)
        if is_quasinilpotent(z, tol) != nk.is_member(zq, z, tol):
            mismatches += 1
        if zq.shape[0] and not is_quasinilpotent(nk.random_combination(zq, rng), tol):
            mismatches += 1
    rad = radical(A, tol)
    contained = nk.subspace_residual(zq, rad)
    return TrialOutcome(
        passed=mismatches == 0 and contained < tol.residual_tol,
        residual=contained,
        witness={"kind": kind, "n": A.ambient_n, "dim_A": A.dim, "dim_Z": int(Z.shape[0]),
                 "dim_ZQ": int(zq.shape[0]), "dim_rad": int(rad.shape[0]),
                 "sample_mismatches": mismatches},
        observations={"nonzero_ZQ": int(zq.shape[0] > 0)})


def trial_quotient_spectrum(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """sigma of q(a) in A/rad A equals sigma_A(a) and the matrix spectrum."""
    tol = spec.tol
    A, kind = gen.gen_algebra(spec, rng)
    n = A.ambient_n
    rad = radical(A, tol)
    Q, q = quotient_by_ideal(A, rad, tol)
    rad_q = abstract_radical(Q, tol)
    abstract_A = A.abstract()
    worst = 0.0
    elements = list(A.basis) + [A.random_element(rng) for _ in range(QUOTIENT_SAMPLES)]
    for a in elements:
        scale = nk.scale_of(a)
        s_mat = _cluster_set(a, scale, tol, n)
        la = abstract_A.left_regular(A.coords(a))
        s_abs = _cluster_set(la, scale, tol, n)
        lq = Q.left_regular(q(a))
        s_quo = _cluster_set(lq, scale, tol, n)
        gap = max(nk.spectrum_set_distance(s_mat, s_abs),
                  nk.spectrum_set_distance(s_abs, s_quo)) / scale
        worst = max(worst, gap)
    return TrialOutcome(
        passed=worst < tol.spec_tol and rad_q.shape[0] == 0,
        residual=worst,
        witness={"kind": kind, "n": n, "dim_A": A.dim, "dim_rad": int(rad.shape[0]),
                 "dim_rad_quotient": int(rad_q.shape[0])},
        observations={"nontrivial_radical": int(rad.shape[0] > 0)})


def character_null_space(A, rng: np.random.Generator, tol) -> np.ndarray:
    """Q_A of a commutative A from its characters.

    A generic z in A splits C^n into generalized eigenspaces V_i that every
    element preserves and on which each element has a single eigenvalue
    chi_i(a) = tr(a|V_i) / dim V_i. Q_A is the common kernel of the chi_i.
    """
    z = A.random_element(rng)
    spaces = nk.generalized_eigenspaces(z, tol, max_block=A.ambient_n)
    chars = np.array([[np.trace(v.conj().T @ b @ v) / v.shape[1] for b in A.basis]
                      for _, v in spaces])
    null = nk.nullspace(chars, tol, scale=1.0)
    if null.shape[1] == 0:
        return nk.empty_basis(A.ambient_n)
    return nk.span_basis(np.tensordot(null.T, A.basis, axes=([1], [0])), tol, scale=1.0)


def trial_radii(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """r is submultiplicative and subadditive, and rad A = Q_A, on commutative A."""
    tol = spec.tol
    A, kind = gen.gen_commutative_algebra(spec, rng)
    worst_slack = 0.0
    held = True
    for _ in range(RANDOM_SAMPLES):
        a, b = A.random_element(rng), A.random_element(rng)
        res = submultiplicativity_check(a, b, tol)
        held &= res.holds
        worst_slack = min(worst_slack, res.product_slack, res.sum_slack)
    rad = radical(A, tol)
    qa = character_null_space(A, rng, tol)
    gap = nk.mutual_residual(rad, qa)
    return TrialOutcome(
        passed=held and gap < tol.residual_tol,
        residual=gap,
        witness={"kind": kind, "n": A.ambient_n, "dim_A": A.dim, "dim_rad": int(rad.shape[0]),
                 "dim_Q": int(qa.shape[0]), "min_slack": worst_slack},
        observations={"min_slack": worst_slack})


def trial_radical_oracle(spec: InstanceSpec, rng: np.random.Generator) -> TrialOutcome:
    """Trace-form radical equals the invertibility definition (dim A <= 4, M_4)."""
    tol = spec.tol
    A, kind = gen.gen_small_algebra(spec, rng)
    rad = radical(A, tol)
    cand, probes = definitional_radical(A, rng, tol=tol)
    gap = nk.mutual_residual(rad, cand)
    outside = nk.orthogonal_complement(cand, A.basis, tol)
    missing = sum(radical_witness(A, x, probes, tol) is None for x in outside)
    return TrialOutcome(
        passed=gap < tol.residual_tol and missing == 0,
        residual=gap,
        witness={"kind": kind, "dim_A": A.dim, "dim_rad": int(rad.shape[0]),
                 "dim_definitional": int(cand.shape[0]), "complement_without_witness": missing},
        observations={"nontrivial_radical": int(rad.shape[0] > 0)})


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

TrialFn = Callable[[InstanceSpec, np.random.Generator], TrialOutcome]

SUITES: dict[str, tuple[int, TrialFn]] = {
    "t43": (1, trial_t43),
    "prop42": (2, trial_prop42),
    "prop26": (3, trial_prop26),
    "lemma27": (4, trial_lemma27),
    "lemma32": (5, trial_lemma32),
    "lemma41": (6, trial_lemma41),
    "ks": (7, trial_ks),
    "rosenblum": (8, trial_rosenblum),
    "cor34": (9, trial_cor34),
    "quotient-spectrum": (10, trial_quotient_spectrum),
    "radii": (11, trial_radii),
    "unbounded-exp": (12, trial_unbounded_exp),
    "radical-oracle": (13, trial_radical_oracle),
    "funcalc": (14, trial_funcalc),
}

SUITE_NAMES = tuple(SUITES)


def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, SUITES[suite][0], trial])


def run_trial(suite: str, spec: InstanceSpec, trial: int) -> TrialOutcome:
    fn = SUITES[suite][1]
    rng = trial_rng(spec.seed, suite, trial)
    try:
        return fn(spec, rng)
    except (NumericalFailure, PreconditionError, np.linalg.LinAlgError) as exc:
        return TrialOutcome(False, float("nan"), error=f"{type(exc).__name__}: {exc}")


def _run_chunk(args):
    suite, spec, trials = args
    return [run_trial(suite, spec, t) for t in trials]


def _merge_observations(total: dict, new: dict):
    for key, value in new.items():
        if key.startswith("min_"):
            total[key] = min(total.get(key, value), value)
        elif key.startswith("max_"):
            total[key] = max(total.get(key, value), value)
        else:
            total[key] = total.get(key, 0) + value


def run_suite(suite: str, spec: InstanceSpec, jobs: int = 1) -> VerificationReport:
    """Run ``spec.trials`` seeded trials of one suite."""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    start = time.perf_counter()
    indices = list(range(spec.trials))
    if jobs > 1 and spec.trials > 1:
        chunks = [indices[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, [(suite, spec, c) for c in chunks]))
        by_index = {}
        for chunk, outs in zip(chunks, parts):
            by_index.update(zip(chunk, outs))
        outcomes = [by_index[t] for t in indices]
    else:
        outcomes = [run_trial(suite, spec, t) for t in indices]
    failures, errors = [], []
    observations: dict = {}
    max_residual = 0.0
    hyp = 0
    for t, out in enumerate(outcomes):
        if out.error is not None:
            errors.append({"trial": t, "seed": spec.seed, "error": out.error})
            continue
        if not out.hypothesis_met:
            hyp += 1
            continue
        if np.isfinite(out.residual):
            max_residual = max(max_residual, float(out.residual))
        _merge_observations(observations, out.observations)
        if not out.passed:
            failures.append({"trial": t, "seed": spec.seed, "residual": float(out.residual),
                             "witness": out.witness})
    elapsed = (time.perf_counter() - start) * 1e3
    return VerificationReport(
        suite=suite, trials=spec.trials, failures=failures, max_residual=max_residual,
        hypothesis_not_met=hyp, tolerances=spec.tol.as_dict(), elapsed_ms=round(elapsed, 3),
        numerical_errors=errors, observations=dict(sorted(observations.items())))


def run_suites(names, spec: InstanceSpec, jobs: int = 1) -> list[VerificationReport]:
    return [run_suite(name, spec, jobs) for name in names]


def default_jobs() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)
