"""Hirota bilinear equations of the D_n^(1) Kac-Wakimoto hierarchy.

Everything acts on polynomials in the Fock-space times ``t_j`` truncated at
a weighted degree ``N``.  The bilinear kernel

    F(t, y) = tau1(t + y) tau2(t - y)

turns a Hirota polynomial ``P(D) exp(sum y_j D_j) tau1 . tau2`` into
``P(d/dy) F``.  Two evaluators are provided:

* :func:`kw_lhs` expands the operator with elementary Schur polynomials;
* :func:`gm_residual` evaluates the residue form, realizing
  ``exp(-sum b_j z^-j d/dy_j)`` as a shift of ``y`` by a Laurent polynomial
  in ``z`` and extracting the ``z^0`` coefficient.

They differ by ``(nh(h+1)/12 - sum_r g_r) F``, which vanishes for the
D_n coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import UnknownGeneratorError, WindowOverflowError
from .exponents import Exponent, positive_exponents
from .heisenberg import HierarchyCoefficients, g_sum_target
from .series import (
    U,
    LaurentBlock,
    Space,
    TruncatedSeries,
    Variable,
    exp_series,
    exponent_variable,
    make_space,
    mul_truncated,
)

CoeffMap = Union[Mapping, Callable[[Exponent], complex]]


@dataclass(frozen=True)
class Context:
    """Variables and spaces for rank ``n`` at truncation ``N``."""

    n: int
    N: int
    exponents: tuple = field(repr=False)

    @property
    def h(self) -> int:
        return 2 * self.n - 2

    def var(self, family: str, e: Exponent) -> Variable:
        return exponent_variable(family, e, self.h)

    def vars(self, family: str) -> tuple[Variable, ...]:
        return tuple(self.var(family, e) for e in self.exponents)

    def space(self, *families: str) -> Space:
        variables: list[Variable] = []
        for fam in families:
            variables.extend([U] if fam == "u" else self.vars(fam))
        return make_space(tuple(variables), self.N)

    @property
    def t_space(self) -> Space:
        return self.space("t")

    @property
    def ty_space(self) -> Space:
        return self.space("t", "y")

    def exponent_of(self, var: Variable) -> Exponent:
        return self._by_name()[var.name]

    def _by_name(self) -> dict:
        return {e.name(self.h): e for e in self.exponents}


@lru_cache(maxsize=None)
def context(n: int, N: int) -> Context:
    return Context(n, N, tuple(positive_exponents(n, N)))


def context_of(series: TruncatedSeries, n: int) -> Context:
    return context(n, series.space.N)


def _coeff(coeffs: CoeffMap, e: Exponent) -> complex:
    if callable(coeffs):
        return coeffs(e)
    if e in coeffs:
        return coeffs[e]
    return coeffs.get(e.label, 0)


# ---------------------------------------------------------------- basics


def shift_substitute(tau: TruncatedSeries, sign: int, n: int, target: Space | None = None):
    """``tau(t + sign*y)`` as a series in ``(t, y)``."""
    ctx = context_of(tau, n)
    target = target or ctx.ty_space
    images = {
        ctx.var("t", e): TruncatedSeries.var(target, ctx.var("t", e))
        + TruncatedSeries.var(target, ctx.var("y", e), sign)
        for e in ctx.exponents
    }
    return tau.substitute(images, target)


def schur_expand(coeffs: CoeffMap, space: Space, family: str, m_max: int, n: int):
    """``[S_0, ..., S_m_max]`` with ``exp(sum_j c_j v_j z^j) = sum_m S_m z^m``.

    ``coeffs`` maps an :class:`Exponent` (or its label) to the factor ``c_j``;
    the sum runs over all exponents with a variable of ``family`` in ``space``.
    """
    if m_max > space.N:
        raise ValueError(f"m_max={m_max} exceeds truncation {space.N}")
    ctx = context(n, space.N)
    arg = TruncatedSeries.zero(space)
    for e in ctx.exponents:
        v = ctx.var(family, e)
        if space.has(v):
            arg = arg + TruncatedSeries.var(space, v, _coeff(coeffs, e))
    full = exp_series(arg)
    deg = full.family_degrees(family)
    return [TruncatedSeries(space, np.where(deg == m, full.coeffs, 0)) for m in range(m_max + 1)]


def bilinear_pair(tau1: TruncatedSeries, tau2: TruncatedSeries, n: int, target: Space | None = None):
    """``F(t, y) = tau1(t + y) tau2(t - y)``."""
    return mul_truncated(
        shift_substitute(tau1, +1, n, target), shift_substitute(tau2, -1, n, target)
    )


def _y_derivatives(F: TruncatedSeries, ctx: Context) -> dict[tuple, TruncatedSeries]:
    """All ``d^alpha F / dy^alpha`` for y-multi-indices of weight <= N, keyed by exponent tuple."""
    ys = ctx.vars("y")
    ymono = ctx.space("y").monomials
    out: dict[tuple, TruncatedSeries] = {tuple([0] * len(ys)): F}
    for row in ymono[1:]:
        row = tuple(int(x) for x in row)
        k = next(i for i, x in enumerate(row) if x)
        parent = list(row)
        parent[k] -= 1
        out[row] = out[tuple(parent)].derivative(ys[k])
    return out


def hirota_apply(dmono: Sequence[Exponent], tau1: TruncatedSeries, tau2: TruncatedSeries, n: int):
    """``D_{j1} ... D_{jk} tau1 . tau2`` for the multiset ``dmono``."""
    ctx = context_of(tau1, n)
    F = bilinear_pair(tau1, tau2, n)
    for e in dmono:
        F = F.derivative(ctx.var("y", e))
    return F.set_zero("y", ctx.t_space)


# ---------------------------------------------------------------- evaluators


def _schur_y(coeffs: HierarchyCoefficients, r: int, ctx: Context, space: Space):
    return schur_expand(lambda e: 2 * coeffs.beta_of(r, e.label), space, "y", ctx.N, ctx.n)


def _dual_factor(coeffs: HierarchyCoefficients, r: int, h: int) -> Callable[[Exponent], complex]:
    return lambda e: coeffs.beta_neg(r, e.label) / e.value(h)


def kw_lhs(tau1: TruncatedSeries, tau2: TruncatedSeries, coeffs: HierarchyCoefficients):
    """Left side of the Hirota equations, expanded through Schur polynomials.

    ``(-2h sum_j j y_j d_{y_j} + sum_r g_r sum_{m>=1} S_m(2 beta y) S_m(-beta' d_y / j)) F``
    with derivatives applied before multiplication by y.
    """
    n = coeffs.n
    ctx = context_of(tau1, n)
    space = ctx.ty_space
    F = bilinear_pair(tau1, tau2, n)
    h = ctx.h

    euler = TruncatedSeries.zero(space)
    for e in ctx.exponents:
        y = ctx.var("y", e)
        euler = euler + TruncatedSeries.var(space, y, e.value(h)) * F.derivative(y)
    out = -2 * h * euler

    dF = _y_derivatives(F, ctx)
    aspace = ctx.space("y")  # symbol space: a^alpha stands for d^alpha/dy^alpha
    for r in range(1, n + 1):
        Sy = _schur_y(coeffs, r, ctx, space)
        neg = _dual_factor(coeffs, r, h)
        Sd = schur_expand(lambda e: -neg(e), aspace, "y", ctx.N, n)
        acc = TruncatedSeries.zero(space)
        for m in range(1, ctx.N + 1):
            op = np.zeros(space.size, dtype=complex)
            for i, c in Sd[m].terms():
                op += c * dF[tuple(int(x) for x in aspace.monomials[i])].coeffs
            acc = acc + Sy[m] * TruncatedSeries(space, op)
        out = out + coeffs.g[r] * acc
    return out.pruned()


def _shifted_pair(tau1, tau2, ctx: Context, b: Callable[[Exponent], complex]):
    """``tau1(t + y - xi) tau2(t - y + xi)`` in (t, y, u) with ``xi_j = b_j u^j``."""
    space = ctx.space("t", "y", "u")

    def images(sign):
        out = {}
        for e in ctx.exponents:
            t, y = ctx.var("t", e), ctx.var("y", e)
            xi = TruncatedSeries.monomial(space, {U: e.value(ctx.h)}, b(e))
            out[t] = TruncatedSeries.var(space, t) + sign * (TruncatedSeries.var(space, y) - xi)
        return out

    return mul_truncated(tau1.substitute(images(+1), space), tau2.substitute(images(-1), space))


def _check_window(ctx: Context, window: int | None) -> int:
    window = ctx.N if window is None else window
    if window < ctx.N:
        raise WindowOverflowError(f"truncation N={ctx.N} needs a z-window of at least {ctx.N}")
    return window


def gm_residual(
    tau1: TruncatedSeries,
    tau2: TruncatedSeries,
    coeffs: HierarchyCoefficients,
    window: int | None = None,
):
    """Residue form minus its right-hand side; zero iff the equations hold mod degree N.

    ``res_z z^-1 sum_r g_r exp(sum 2 beta y_j z^j) tau1(t+y-xi) tau2(t-y+xi)
    - (2h sum j y_j d_{y_j} + nh(h+1)/12) F``.
    """
    n = coeffs.n
    ctx = context_of(tau1, n)
    window = _check_window(ctx, window)
    space = ctx.ty_space
    h = ctx.h
    lhs = TruncatedSeries.zero(space)
    for r in range(1, n + 1):
        Sy = _schur_y(coeffs, r, ctx, space)
        front = LaurentBlock(space, window, {m: s for m, s in enumerate(Sy) if s.nnz()})
        G = _shifted_pair(tau1, tau2, ctx, _dual_factor(coeffs, r, h))
        back = LaurentBlock.from_u_series(G, space, window)
        # res z^-1 P(z) is the z^0 coefficient of P
        lhs = lhs + coeffs.g[r] * front.mul(back, clip=True).coefficient(0)
    F = bilinear_pair(tau1, tau2, n)
    rhs = 2 * h * F.euler("y") + g_sum_target(n) * F
    return (lhs - rhs).pruned()


# ---------------------------------------------------------------- Fock space


def vertex_apply(
    r: int,
    tau: TruncatedSeries,
    coeffs: HierarchyCoefficients,
    sign: int = 1,
    window: int | None = None,
) -> LaurentBlock:
    """``X^(r)(sign*t; z) tau`` as a Laurent block in z over the t-space.

    ``X(t;z) = exp(sum beta_j t_j z^j) exp(-sum beta_{-j} / (j z^j) d/dt_j)``;
    the derivative factor is applied first, as the shift
    ``t_j -> t_j - sign * beta_{-j} / j * z^-j``.
    """
    n = coeffs.n
    ctx = context_of(tau, n)
    window = _check_window(ctx, window)
    h = ctx.h
    tspace = ctx.t_space
    tu = ctx.space("t", "u")
    images = {}
    for e in ctx.exponents:
        t = ctx.var("t", e)
        shift = sign * coeffs.beta_neg(r, e.label) / e.value(h)
        images[t] = TruncatedSeries.var(tu, t) - TruncatedSeries.monomial(tu, {U: e.value(h)}, shift)
    shifted = LaurentBlock.from_u_series(tau.embed(tspace).substitute(images, tu), tspace, window)
    S = schur_expand(lambda e: sign * coeffs.beta_of(r, e.label), tspace, "t", ctx.N, n)
    front = LaurentBlock(tspace, window, {m: s for m, s in enumerate(S) if s.nnz()})
    return front.mul(shifted)


@dataclass(frozen=True)
class Generator:
    """Descriptor of an affine algebra element acting on the Fock space.

    kind: ``"c"``, ``"H+"`` (H_j), ``"H-"`` (H_{-j}), ``"X"`` (X^(r)_m),
    ``"Y"`` (Y^(r)_{-m}) or ``"d0"``.
    """

    kind: str
    exponent: Exponent | None = None
    r: int = 0
    m: int = 0

    def __str__(self) -> str:
        if self.kind in ("H+", "H-"):
            sgn = "" if self.kind == "H+" else "-"
            return f"H_{sgn}{self.exponent.label}@{self.exponent.level}"
        if self.kind == "X":
            return f"X^({self.r})_{self.m}"
        if self.kind == "Y":
            return f"Y^({self.r})_{-self.m}"
        return self.kind


def algebra_action(gen: Generator, tau: TruncatedSeries, coeffs: HierarchyCoefficients):
    """Image of ``tau`` under the basic representation of ``gen``."""
    n = coeffs.n
    ctx = context_of(tau, n)
    h = ctx.h
    if gen.kind == "c":
        return tau
    if gen.kind == "H+":
        return tau.derivative(ctx.var("t", gen.exponent))
    if gen.kind == "H-":
        t = ctx.var("t", gen.exponent)
        return TruncatedSeries.var(tau.space, t, gen.exponent.value(h)) * tau
    if gen.kind == "d0":
        return -tau.euler("t")
    if gen.kind in ("X", "Y"):
        if coeffs.rho_x is None:
            raise ValueError("vertex representation needs (rho|X_0), (rho|Y_0); use extracted coefficients")
        if gen.kind == "X":
            block = vertex_apply(gen.r, tau, coeffs, +1)
            return (-coeffs.rho_x[gen.r] / h) * block.coefficient(-gen.m)
        block = vertex_apply(gen.r, tau, coeffs, -1)
        return (-coeffs.rho_y[gen.r] / h) * block.coefficient(gen.m)
    raise UnknownGeneratorError(f"unknown generator kind {gen.kind!r}")


def _residual_scale(*series: TruncatedSeries) -> float:
    return max([1.0] + [s.max_abs() for s in series])


def orbit_infinitesimal_check(
    gen: Generator,
    order: int,
    coeffs: HierarchyCoefficients,
    N: int,
    evaluator: Callable = gm_residual,
) -> dict:
    """Derivatives in eps of ``R(exp(eps v) 1, exp(eps v) 1)`` at eps = 0.

    Returns ``{"order1": max|coef|, "order2": ..., "scale": ...}``; every
    entry should vanish for a point of the group orbit.
    """
    if gen.kind in ("d0", "c"):
        raise ValueError("d0 and c act diagonally on the vacuum; nothing to check")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    ctx = context(coeffs.n, N)
    one = TruncatedSeries.one(ctx.t_space)
    v1 = algebra_action(gen, one, coeffs)
    report = {}
    first = evaluator(v1, one, coeffs) + evaluator(one, v1, coeffs)
    report["order1"] = first.max_abs()
    scale = _residual_scale(v1)
    if order == 2:
        v2 = algebra_action(gen, v1, coeffs)
        second = evaluator(v2, one, coeffs) + 2 * evaluator(v1, v1, coeffs) + evaluator(one, v2, coeffs)
        report["order2"] = second.max_abs()
        scale = max(scale, _residual_scale(v2), v1.max_abs() ** 2)
    report["scale"] = scale
    return report


# ---------------------------------------------------------------- equations


@dataclass(frozen=True)
class HierarchyEquation:
    """``sum_D coeff * D-monomial`` multiplying one y-monomial of the generating function."""

    y_monomial: tuple  # sorted Exponents, repeated by multiplicity
    d_polynomial: dict  # sorted Exponent tuple -> complex
    trivial: bool

    def order_parts(self) -> tuple[dict, dict]:
        even = {k: c for k, c in self.d_polynomial.items() if len(k) % 2 == 0}
        odd = {k: c for k, c in self.d_polynomial.items() if len(k) % 2 == 1}
        return even, odd


def _multiset(space: Space, row, ctx: Context, family: str) -> tuple:
    out = []
    for v, e in zip(space.variables, row):
        if v.family == family and e:
            out.extend([ctx.exponent_of(v)] * int(e))
    return tuple(sorted(out, key=lambda x: (x.value(ctx.h), x.label.primed)))


def equations_emit(coeffs: HierarchyCoefficients, max_y_degree: int, tol: float = 1e-12):
    """Expand the generating operator and collect the D-polynomial of each y-monomial.

    D_j are commuting symbols of weight j.  Each y-monomial of degree ``d``
    pairs with D-monomials of the same degree, so a joint truncation at
    ``2 * max_y_degree`` is exact.
    """
    n = coeffs.n
    Y = int(max_y_degree)
    ctx = context(n, Y)
    h = ctx.h
    variables = ctx.vars("y") + ctx.vars("D")
    space = make_space(variables, 2 * Y)
    gen = TruncatedSeries.zero(space)
    for e in ctx.exponents:
        gen = gen + TruncatedSeries.monomial(space, {ctx.var("y", e): 1, ctx.var("D", e): 1})
    shift = exp_series(gen)

    op = -2 * h * _weighted_yd(space, ctx)
    for r in range(1, n + 1):
        Sy = schur_expand(lambda e: 2 * coeffs.beta_of(r, e.label), space, "y", Y, n)
        neg = _dual_factor(coeffs, r, h)
        Sd = schur_expand(lambda e: -neg(e), space, "D", Y, n)
        acc = TruncatedSeries.zero(space)
        for m in range(1, Y + 1):
            acc = acc + Sy[m] * Sd[m]
        op = op + coeffs.g[r] * acc
    full = op * shift

    ydeg = full.family_degrees("y")
    ycols = [k for k, v in enumerate(space.variables) if v.family == "y"]
    scale = max(1.0, full.max_abs())
    records: dict[tuple, dict] = {}
    ymonos = ctx.space("y").monomials  # graded order
    ykeys = [tuple(int(x) for x in row) for row in ymonos if row @ ctx.space("y").weights <= Y]
    for key in ykeys:
        records[key] = {}
    for i, c in full.terms():
        if ydeg[i] > Y or abs(c) <= tol * scale:
            continue
        row = space.monomials[i]
        key = tuple(int(x) for x in row[ycols])
        records[key][_multiset(space, row, ctx, "D")] = c
    ysp = ctx.space("y")
    out = []
    for key in ykeys:
        dpoly = dict(sorted(records[key].items(), key=lambda kv: _dkey(kv[0], h)))
        ymono = _multiset(ysp, key, ctx, "y")
        even = [c for k, c in dpoly.items() if len(k) % 2 == 0]
        out.append(HierarchyEquation(ymono, dpoly, trivial=not even))
    return out


def _weighted_yd(space: Space, ctx: Context) -> TruncatedSeries:
    s = TruncatedSeries.zero(space)
    for e in ctx.exponents:
        s = s + TruncatedSeries.monomial(
            space, {ctx.var("y", e): 1, ctx.var("D", e): 1}, e.value(ctx.h)
        )
    return s


def _dkey(mono: tuple, h: int):
    return (sum(e.value(h) for e in mono), [(-e.value(h), e.label.primed) for e in mono])


def apply_equation(eq: HierarchyEquation, tau1: TruncatedSeries, tau2: TruncatedSeries, n: int):
    """Evaluate ``P(D) tau1 . tau2`` for the equation's D-polynomial."""
    ctx = context_of(tau1, n)
    out = TruncatedSeries.zero(ctx.t_space)
    for mono, c in eq.d_polynomial.items():
        out = out + c * hirota_apply(mono, tau1, tau2, n)
    return out


def y_coefficient(series: TruncatedSeries, y_monomial: Sequence[Exponent], n: int):
    """Coefficient of a y-monomial of a (t, y) series, as a t-series."""
    ctx = context_of(series, n)
    want = {}
    for e in y_monomial:
        v = ctx.var("y", e)
        want[v] = want.get(v, 0) + 1
    sp = series.space
    mask = np.ones(sp.size, dtype=bool)
    for k, v in enumerate(sp.variables):
        if v.family == "y":
            mask &= sp.monomials[:, k] == want.get(v, 0)
    tsp = ctx.t_space
    tcols = [k for k, v in enumerate(sp.variables) if v.family == "t"]
    rows = np.zeros((int(mask.sum()), len(tsp.variables)), dtype=np.int64)
    rows[:, [tsp.var_index(sp.variables[k]) for k in tcols]] = sp.monomials[mask][:, tcols]
    out = np.zeros(tsp.size, dtype=complex)
    out[tsp.lookup(rows)] = series.coeffs[mask]
    return TruncatedSeries(tsp, out)


# ---------------------------------------------------------------- tau helpers


def random_tau(n: int, N: int, rng: np.random.Generator, max_degree: int | None = None):
    """Random polynomial with coefficients uniform in [-1, 1] + i[-1, 1]."""
    sp = context(n, N).t_space
    c = rng.uniform(-1, 1, sp.size) + 1j * rng.uniform(-1, 1, sp.size)
    if max_degree is not None:
        c[sp.degrees > max_degree] = 0
    return TruncatedSeries(sp, c)


def exp_linear_tau(n: int, N: int, c: Mapping[Exponent, complex]) -> TruncatedSeries:
    """Truncation of ``exp(sum_j c_j t_j)``."""
    ctx = context(n, N)
    arg = TruncatedSeries.zero(ctx.t_space)
    for e, val in c.items():
        arg = arg + TruncatedSeries.var(ctx.t_space, ctx.var("t", e), val)
    return exp_series(arg)


def one_soliton_tau(coeffs: HierarchyCoefficients, N: int, r: int, z: complex, a: complex):
    """``1 + a exp(sum_j beta_{r,j} t_j z^j)``, truncated at ``N``."""
    ctx = context(coeffs.n, N)
    c = {e: coeffs.beta_of(r, e.label) * z ** e.value(ctx.h) for e in ctx.exponents}
    return TruncatedSeries.one(ctx.t_space) + a * exp_linear_tau(coeffs.n, N, c)


__all__ = [
    "Context",
    "Generator",
    "HierarchyEquation",
    "algebra_action",
    "apply_equation",
    "bilinear_pair",
    "context",
    "equations_emit",
    "exp_linear_tau",
    "gm_residual",
    "hirota_apply",
    "kw_lhs",
    "one_soliton_tau",
    "orbit_infinitesimal_check",
    "random_tau",
    "schur_expand",
    "shift_substitute",
    "vertex_apply",
    "y_coefficient",
]
