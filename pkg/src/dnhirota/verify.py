"""Verification suites driven by ``dnhirota verify``.

Each check returns a :class:`CheckResult` holding the largest residual it
saw; a check passes when that residual is at most the run tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    affine_cartan_matrix,
    anti_transpose,
    bracket,
    build_involution_matrix,
    grading_element,
    killing_form,
    sigma,
    weyl_generators,
)
from .exponents import ZERO, ZERO_PRIME, exponent_labels, negate_label, negate_tag, root
from .heisenberg import (
    HierarchyCoefficients,
    beta_closed,
    beta_extract,
    coxeter,
    cyclic_element,
    dual_bases,
    eta,
    g_closed,
    g_extract,
    g_sum_target,
    heisenberg_basis,
    hierarchy_coefficients,
    root_matrix,
)
from .hirota import (
    Generator,
    context,
    exp_linear_tau,
    one_soliton_tau,
    gm_residual,
    kw_lhs,
    orbit_infinitesimal_check,
    random_tau,
)
from .series import TruncatedSeries


@dataclass
class CheckResult:
    name: str
    residual: float
    passed: bool = False
    elapsed: float = 0.0
    detail: str = ""
    gating: bool = True


@dataclass
class VerificationReport:
    config: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def to_dict(self, timings: bool = False) -> dict:
        rows = []
        for c in self.checks:
            d = asdict(c)
            if not timings:
                d.pop("elapsed")
            rows.append(d)
        return {"config": self.config, "passed": self.passed, "checks": rows}


# ------------------------------------------------------------------ matrix algebra


def weyl_residual(n: int) -> float:
    ws = weyl_generators(n)
    worst = 0.0
    for i in range(n + 1):
        for j in range(n + 1):
            target = ws.h[i] if i == j else 0
            worst = max(worst, float(np.max(np.abs(bracket(ws.e[i], ws.f[j]) - target))))
        worst = max(worst, abs(killing_form(ws.e[i], ws.f[i]) - 1))
    return worst


def membership_residual(n: int) -> float:
    ws = weyl_generators(n)
    S = build_involution_matrix(n)
    return max(float(np.max(np.abs(m + S @ anti_transpose(m) @ S))) for m in ws.e + ws.f + ws.h)


def cartan_residual(n: int) -> float:
    ws = weyl_generators(n)
    C = affine_cartan_matrix(n)
    worst = 0.0
    for i in range(n + 1):
        for j in range(n + 1):
            worst = max(worst, float(np.max(np.abs(bracket(ws.h[i], ws.e[j]) - C[i, j] * ws.e[j]))))
    return worst


def grading_residual(n: int) -> float:
    ws = weyl_generators(n)
    rho = grading_element(n).rho_vee
    worst = 0.0
    for i in range(1, n + 1):
        worst = max(worst, float(np.max(np.abs(bracket(rho, ws.e[i]) - ws.e[i]))))
        worst = max(worst, float(np.max(np.abs(bracket(rho, ws.f[i]) + ws.f[i]))))
    return worst


def killing_invariance_residual(n: int, rng: np.random.Generator, samples: int = 20) -> float:
    worst = 0.0
    dim = 2 * n
    for _ in range(samples):
        A, B, C = (
            sigma(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) for _ in range(3)
        )
        val = killing_form(bracket(A, B), C) + killing_form(B, bracket(A, C))
        scale = max(1.0, float(np.max(np.abs(A)) * np.max(np.abs(B)) * np.max(np.abs(C))) * dim)
        worst = max(worst, abs(val) / scale)
    return worst


# ------------------------------------------------------------------ heisenberg


def heisenberg_pairing_residual(n: int) -> float:
    T = heisenberg_basis(n)
    h = coxeter(n)
    worst = 0.0
    labels = exponent_labels(n)
    for a in labels:
        for b in labels:
            worst = max(worst, float(np.max(np.abs(bracket(T[a], T[b])))))
            target = (n - 1) if b == negate_label(n, a) else 0
            worst = max(worst, abs(killing_form(T[a], T[b]) - target))
        worst = max(worst, abs(2 * killing_form(T[a], T[negate_label(n, a)]) - h))
    return worst


def eigenvector_residual(n: int) -> float:
    h = coxeter(n)
    L = cyclic_element(n)
    T = heisenberg_basis(n)
    worst = 0.0
    for s in range(h):
        v = eta(n, root(s))
        w = np.exp(2j * np.pi * s / h)
        worst = max(worst, float(np.max(np.abs(L @ v - w * v))))
        for lab, M in T.items():
            if not lab.primed:
                worst = max(worst, float(np.max(np.abs(M @ v - w**lab.value * v))))
    Tp = next(M for lab, M in T.items() if lab.primed)
    s = math.sqrt(n - 1)
    for tag, sign in ((ZERO, (-1) ** (n - 1)), (ZERO_PRIME, (-1) ** n)):
        v = eta(n, tag)
        worst = max(worst, float(np.max(np.abs(L @ v))))
        worst = max(worst, float(np.max(np.abs(Tp @ v - sign * s * v))))
    return worst


def root_pairing_residual(n: int) -> float:
    from .algebra import cyclic_component

    h = coxeter(n)
    one, minus_one = root(0), root(h // 2)

    def A0(a, b):
        return cyclic_component(root_matrix(n, a, b), 0)

    worst = 0.0
    for r in range(1, n - 1):
        for s in range(1, n - 1):
            val = killing_form(A0(one, root(r)), A0(minus_one, negate_tag(n, root(s))))
            worst = max(worst, abs(val - (-h if r == s else 0)))
        for a in (ZERO, ZERO_PRIME):
            worst = max(worst, abs(killing_form(A0(one, root(r)), A0(minus_one, a))))
    for a in (ZERO, ZERO_PRIME):
        for b in (ZERO, ZERO_PRIME):
            worst = max(worst, abs(killing_form(A0(one, a), A0(minus_one, b)) - 2 * (a != b)))
    return worst


def duality_residual(n: int) -> float:
    b = dual_bases(n)
    h = b.h
    worst = 0.0
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            for m in range(h):
                worst = max(worst, abs(killing_form(b.X[r][m], b.Y[s][(-m) % h]) - (r == s)))
    return worst


def grading_commutator_residual(n: int, coeffs: HierarchyCoefficients) -> float:
    """``[sqrt2 T_j, X_m] = beta X_{m+j}`` and ``[sqrt2 T_j, Y_{-m}] = -beta Y_{-m+j}``."""
    b = dual_bases(n)
    h = b.h
    T = heisenberg_basis(n)
    worst = 0.0
    for lab in exponent_labels(n):
        S = math.sqrt(2) * T[lab]
        j = lab.value
        for r in range(1, n + 1):
            beta = coeffs.beta_of(r, lab)
            for m in range(h):
                lhs = bracket(S, b.X[r][m])
                worst = max(worst, float(np.max(np.abs(lhs - beta * b.X[r][(m + j) % h]))))
                lhs = bracket(S, b.Y[r][(-m) % h])
                worst = max(worst, float(np.max(np.abs(lhs + beta * b.Y[r][(-m + j) % h]))))
    return worst


# ------------------------------------------------------------------ coefficients


def beta_discrepancy(n: int, coeffs: HierarchyCoefficients | None = None) -> float:
    coeffs = coeffs or hierarchy_coefficients(n)
    return max(
        abs(coeffs.beta[(r, lab)] - beta_closed(n, r, lab))
        for r in range(1, n + 1)
        for lab in exponent_labels(n)
    )


def g_discrepancy(n: int, coeffs: HierarchyCoefficients | None = None) -> float:
    coeffs = coeffs or hierarchy_coefficients(n)
    return max(abs(coeffs.g[r] - g_closed(n, r)) for r in range(1, n + 1))


def g_sum_residual(n: int, coeffs: HierarchyCoefficients | None = None) -> float:
    coeffs = coeffs or hierarchy_coefficients(n)
    return abs(sum(coeffs.g.values()) - g_sum_target(n))


def fresh_beta_discrepancy(n: int) -> float:
    """Re-extract every beta from the matrices (no cache) and compare to the closed form."""
    bases = dual_bases(n)
    return max(
        abs(beta_extract(r, lab, bases) - beta_closed(n, r, lab))
        for r in range(1, n + 1)
        for lab in exponent_labels(n)
    )


def fresh_g_discrepancy(n: int) -> float:
    bases = dual_bases(n)
    return max(abs(g_extract(r, bases) - g_closed(n, r)) for r in range(1, n + 1))


# ------------------------------------------------------------------ tau functions


def evaluator_equivalence(
    n: int,
    N: int,
    rng: np.random.Generator,
    pairs: int = 20,
    kw_coeffs: HierarchyCoefficients | None = None,
    gm_coeffs: HierarchyCoefficients | None = None,
) -> float:
    """Largest |kw_lhs - gm_residual| coefficient, normalized by max(1, |kw_lhs|).

    By default the Schur route uses the matrix-extracted coefficients and
    the residue route the closed forms, so the comparison also exercises
    the coefficient cross-check.
    """
    kw_coeffs = kw_coeffs or hierarchy_coefficients(n, "extract")
    gm_coeffs = gm_coeffs or hierarchy_coefficients(n, "closed")
    worst = 0.0
    for _ in range(pairs):
        a = random_tau(n, N, rng)
        b = random_tau(n, N, rng)
        k = kw_lhs(a, b, kw_coeffs)
        g = gm_residual(a, b, gm_coeffs)
        worst = max(worst, float(np.max(np.abs(k.coeffs - g.coeffs))) / max(1.0, k.max_abs()))
    return worst


def vacuum_residual(n: int, N: int, coeffs: HierarchyCoefficients) -> float:
    one = TruncatedSeries.one(context(n, N).t_space)
    return gm_residual(one, one, coeffs).max_abs()


def exp_orbit_residual(
    n: int, N: int, coeffs: HierarchyCoefficients, rng: np.random.Generator, samples: int = 3
) -> float:
    ctx = context(n, N)
    small = [e for e in ctx.exponents if e.value(ctx.h) <= 3]
    worst = 0.0
    for _ in range(samples):
        c = {
            e: 0.5 * rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform(0, 1)) for e in small
        }
        tau = exp_linear_tau(n, N, c)
        worst = max(worst, gm_residual(tau, tau, coeffs).max_abs() / max(1.0, tau.max_abs() ** 2))
    return worst


def one_soliton_residual(
    n: int, N: int, coeffs: HierarchyCoefficients, rng: np.random.Generator
) -> tuple[float, str]:
    """Exploratory: residual of ``1 + a exp(sum beta_{r,j} t_j z^j)`` for each r."""
    worst, where = 0.0, ""
    for r in range(1, n + 1):
        z = 0.5 * rng.uniform(0.2, 1) * np.exp(2j * np.pi * rng.uniform(0, 1))
        a = complex(*rng.uniform(-1, 1, 2))
        tau = one_soliton_tau(coeffs, N, r, z, a)
        val = gm_residual(tau, tau, coeffs).max_abs() / max(1.0, tau.max_abs() ** 2)
        if val >= worst:
            worst, where = val, f"r={r}"
    return worst, where


def orbit_generators(n: int, N: int, max_h_weight: int = 5, max_m: int = 2) -> list[Generator]:
    ctx = context(n, N)
    gens = [Generator("H-", e) for e in ctx.exponents if e.value(ctx.h) <= max_h_weight]
    gens += [Generator("H+", e) for e in ctx.exponents if e.value(ctx.h) <= max_h_weight]
    for r in range(1, n + 1):
        for m in range(-max_m, max_m + 1):
            gens.append(Generator("X", r=r, m=m))
            gens.append(Generator("Y", r=r, m=m))
    return gens


def infinitesimal_orbit_residual(n: int, N: int, coeffs: HierarchyCoefficients) -> tuple[float, str]:
    worst, where = 0.0, ""
    for gen in orbit_generators(n, N):
        rep = orbit_infinitesimal_check(gen, 2, coeffs, N)
        val = max(rep["order1"], rep["order2"]) / rep["scale"]
        if val >= worst:
            worst, where = val, str(gen)
    return worst, where


# ------------------------------------------------------------------ driver


def _timed(name: str, fn: Callable[[], float | tuple], tol: float) -> CheckResult:
    start = time.perf_counter()
    out = fn()
    detail = ""
    if isinstance(out, tuple):
        out, detail = out
    res = CheckResult(name, float(out), elapsed=time.perf_counter() - start, detail=detail)
    res.passed = bool(res.residual <= tol)
    return res


def run_verification(
    n: int,
    degree: int = 8,
    tolerance: float = 1e-8,
    seed: int = 42,
    inject_beta_error: float = 0.0,
    pairs: int = 20,
) -> VerificationReport:
    """Run every suite in order and collect the results."""
    rng = np.random.default_rng(seed)
    extracted = hierarchy_coefficients(n, "extract")
    if inject_beta_error:
        extracted = extracted.perturbed(inject_beta_error)
    closed = hierarchy_coefficients(n, "closed")
    cfg = {"n": n, "degree": degree, "tolerance": tolerance, "seed": seed}
    if inject_beta_error:
        cfg["inject_beta_error"] = inject_beta_error
    report = VerificationReport(config=cfg)
    tol = tolerance
    plan = [
        # matrix-algebra suite
        ("weyl_relations", lambda: weyl_residual(n)),
        ("membership", lambda: membership_residual(n)),
        ("affine_cartan_matrix", lambda: cartan_residual(n)),
        ("grading_element", lambda: grading_residual(n)),
        ("killing_invariance", lambda: killing_invariance_residual(n, rng)),
        # heisenberg suite
        ("heisenberg_pairing", lambda: heisenberg_pairing_residual(n)),
        ("eigenvectors", lambda: eigenvector_residual(n)),
        ("root_matrix_pairings", lambda: root_pairing_residual(n)),
        ("dual_basis_duality", lambda: duality_residual(n)),
        ("commutator_grading", lambda: grading_commutator_residual(n, extracted)),
        # coefficient cross-check
        ("beta_extract_vs_closed", lambda: beta_discrepancy(n, extracted)),
        ("g_extract_vs_closed", lambda: g_discrepancy(n, extracted)),
        ("g_sum_identity", lambda: g_sum_residual(n, extracted)),
        # evaluators and tau functions
        (
            "evaluator_equivalence",
            lambda: evaluator_equivalence(n, degree, rng, pairs, extracted, closed),
        ),
        ("vacuum_solution", lambda: vacuum_residual(n, degree, closed)),
        ("heisenberg_orbit", lambda: exp_orbit_residual(n, degree, closed, rng)),
        ("infinitesimal_orbit", lambda: infinitesimal_orbit_residual(n, degree, extracted)),
    ]
    for name, fn in plan:
        report.checks.append(_timed(name, fn, tol))
    # reported but not part of the pass/fail decision
    soliton = _timed("one_soliton (exploratory)", lambda: one_soliton_residual(n, degree, closed, rng), tol)
    soliton.gating = False
    report.checks.append(soliton)
    return report
