"""Principal Heisenberg subalgebra of D_n and the Kac-Wakimoto coefficients.

Builds the cyclic element, the commuting basis ``T_j``, the common
eigenvectors ``eta``, the root matrices ``A_(alpha, beta)`` and the pair of
dual bases from which ``beta_{r,j}`` and ``g_r`` are read off.  Both the
extracted values and the closed forms are exposed so that callers can
cross-check them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .algebra import (
    DEFAULT_EPSILON,
    bracket,
    check_rank,
    coroot_coefficient_sum,
    cyclic_component,
    sigma,
    unit,
    weyl_generators,
)
from .errors import InvalidTagError, ProportionalityError
from .exponents import (
    ZERO,
    ZERO_PRIME,
    EigenvalueTag,
    ExponentLabel,
    exponent_labels,
    negate_label,
    negate_tag,
    root,
    validate_label,
)


def coxeter(n: int) -> int:
    return 2 * n - 2


def omega(n: int) -> complex:
    return cmath.exp(2j * math.pi / coxeter(n))


def omega_power(n: int, k: int) -> complex:
    # reduce first so large k does not accumulate phase error
    h = coxeter(n)
    return cmath.exp(2j * math.pi * (k % h) / h)


def kappa(n: int) -> complex:
    return 1.0 + 0j if n % 2 == 0 else 1j


def _frozen(A: np.ndarray) -> np.ndarray:
    A.setflags(write=False)
    return A


@lru_cache(maxsize=None)
def _cyclic_element(n: int) -> np.ndarray:
    return _frozen(sum(weyl_generators(n).e))


def cyclic_element(n: int) -> np.ndarray:
    """``Lambda = e_0 + e_1 + ... + e_n``."""
    check_rank(n)
    return _cyclic_element(int(n))


@lru_cache(maxsize=None)
def _heisenberg_basis(n: int) -> dict:
    L = cyclic_element(n)
    basis = {}
    for label in exponent_labels(n):
        if not label.primed:
            basis[label] = _frozen(np.linalg.matrix_power(L, label.value))
    E = lambda i, j: unit(n, i, j)  # noqa: E731
    tail = E(2 * n, n + 1) - 0.5 * E(2 * n, n) - 0.5 * E(1, n + 1) + 0.25 * E(1, n)
    head = E(n, 1) - 0.5 * E(n + 1, 1) - 0.5 * E(n, 2 * n) + 0.25 * E(n + 1, 2 * n)
    Tp = math.sqrt(n - 1) * kappa(n) * (head + (-1) ** n * tail)
    basis[ExponentLabel(n - 1, True)] = _frozen(Tp)
    return basis


def heisenberg_basis(n: int) -> dict[ExponentLabel, np.ndarray]:
    """Basis ``T_j`` of the centralizer of Lambda, keyed by exponent label."""
    check_rank(n)
    return dict(_heisenberg_basis(int(n)))


def tag_value(n: int, tag: EigenvalueTag) -> complex:
    return omega_power(n, tag.s) if tag.kind == "root" else 0j


def eta(n: int, tag: EigenvalueTag) -> np.ndarray:
    """Eigenvector of Lambda for ``tag``, exactly as tabulated for the realization."""
    check_rank(n)
    h = coxeter(n)
    dim = 2 * n
    if tag.kind == "root":
        if not 0 <= tag.s < h:
            raise InvalidTagError(f"root index {tag.s} outside 0..{h - 1}")
        w = omega_power(n, tag.s)
        first = [0.5] + [w ** (-k) for k in range(1, n)]
        second = [0.5 * w ** (n - 1)] + [w**k for k in range(n - 2, -1, -1)]
        return np.array(first + second, dtype=complex)
    psi = np.eye(dim, dtype=complex)
    common = -0.5 * psi[0] + psi[dim - 1]
    kernel = (psi[n - 1] - 0.5 * psi[n]) / kappa(n)
    if tag.kind == "zero":
        return common + kernel
    return common - kernel


def all_tags(n: int) -> list[EigenvalueTag]:
    return [root(s) for s in range(coxeter(n))] + [ZERO, ZERO_PRIME]


def root_matrix(n: int, alpha: EigenvalueTag, beta: EigenvalueTag) -> np.ndarray:
    """``A_(alpha, beta) = sigma(eta_alpha eta_{-beta}^T)`` with the anti-transpose."""
    col = eta(n, alpha)
    row = eta(n, negate_tag(n, beta))[::-1]
    return sigma(np.outer(col, row))


@dataclass(frozen=True)
class DualBases:
    """Cyclic components ``X[r][m]``, ``Y[r][m]`` for ``r = 1..n``, ``m = 0..h-1``.

    ``x_scale``/``y_scale`` record the table's normalization prefactors
    (times any rescaling applied afterwards).
    """

    n: int
    X: dict = field(repr=False)
    Y: dict = field(repr=False)
    x_scale: dict
    y_scale: dict

    @property
    def h(self) -> int:
        return coxeter(self.n)

    def rescaled(self, factors: dict) -> "DualBases":
        """Replace X^(r) by c_r X^(r) and Y^(r) by Y^(r) / c_r."""
        X = {r: [c * M for M in self.X[r]] for r, c in ((r, factors.get(r, 1)) for r in self.X)}
        Y = {r: [M / factors.get(r, 1) for M in self.Y[r]] for r in self.Y}
        xs = {r: s * factors.get(r, 1) for r, s in self.x_scale.items()}
        ys = {r: s / factors.get(r, 1) for r, s in self.y_scale.items()}
        return replace(self, X=X, Y=Y, x_scale=xs, y_scale=ys)


def _table_entries(n: int, r: int):
    """(scale, alpha, beta) for X~^(r) and Y~^(r)."""
    h = coxeter(n)
    one, minus_one = root(0), root(h // 2)
    if r <= n - 2:
        s = 1 / math.sqrt(h)
        return (s, one, root(r)), (-s, minus_one, negate_tag(n, root(r)))
    s = 1 / math.sqrt(2)
    if r == n - 1:
        return (s, one, ZERO), (s, minus_one, ZERO_PRIME)
    return (s, one, ZERO_PRIME), (s, minus_one, ZERO)


@lru_cache(maxsize=None)
def _dual_bases(n: int) -> DualBases:
    h = coxeter(n)
    X, Y, xs, ys = {}, {}, {}, {}
    for r in range(1, n + 1):
        (sx, ax, bx), (sy, ay, by) = _table_entries(n, r)
        Ax = root_matrix(n, ax, bx)
        Ay = root_matrix(n, ay, by)
        X[r] = [_frozen(sx * cyclic_component(Ax, m)) for m in range(h)]
        Y[r] = [_frozen(sy * cyclic_component(Ay, m)) for m in range(h)]
        xs[r], ys[r] = sx, sy
    return DualBases(n=n, X=X, Y=Y, x_scale=xs, y_scale=ys)


def dual_bases(n: int) -> DualBases:
    check_rank(n)
    return _dual_bases(int(n))


def _ratio(C: np.ndarray, target: np.ndarray, epsilon: float, what: str) -> complex:
    k = int(np.argmax(np.abs(target)))
    denom = target.flat[k]
    if abs(denom) < epsilon:
        raise ProportionalityError(f"{what}: target matrix vanishes")
    c = complex(C.flat[k] / denom)
    scale = max(1.0, float(np.max(np.abs(C))), float(np.max(np.abs(target))))
    resid = float(np.max(np.abs(C - c * target)))
    if resid > epsilon * scale:
        raise ProportionalityError(f"{what}: commutator is not proportional (residual {resid:.3e})")
    return c


def beta_extract(
    r: int, label: ExponentLabel, bases: DualBases, epsilon: float = DEFAULT_EPSILON
) -> complex:
    """Read ``beta_{r,label}`` off ``[sqrt2 T_label, X~^(r)_0] = beta X~^(r)_label``.

    The Y relation ``[sqrt2 T_label, Y~^(r)_0] = -beta Y~^(r)_label`` is checked too.
    """
    n = bases.n
    validate_label(n, label)
    T = math.sqrt(2) * heisenberg_basis(n)[label]
    m = label.value % bases.h
    what = f"beta[r={r}, {label}]"
    bx = _ratio(bracket(T, bases.X[r][0]), bases.X[r][m], epsilon, what)
    by = _ratio(bracket(T, bases.Y[r][0]), bases.Y[r][m], epsilon, what + " (Y)")
    if abs(bx + by) > epsilon * max(1.0, abs(bx)):
        raise ProportionalityError(f"{what}: X gives {bx}, Y gives {-by}")
    return bx


def beta_closed(n: int, r: int, label: ExponentLabel) -> complex:
    if label.primed:
        return math.sqrt(2 * n - 2) * ((r == n - 1) - (r == n)) + 0j
    if r <= n - 2:
        return math.sqrt(2) * (1 + omega_power(n, r * label.value))
    return math.sqrt(2) + 0j


def g_extract(r: int, bases: DualBases) -> complex:
    """``g_r = (rho|X^(r)_0)(rho|Y^(r)_0)`` from the diagonal parts of the 0-components."""
    return coroot_coefficient_sum(bases.X[r][0]) * coroot_coefficient_sum(bases.Y[r][0])


def g_closed(n: int, r: int) -> complex:
    if r <= n - 2:
        c = omega_power(n, r) + omega_power(n, -r)
        return (n - 1) / 2 * (2 - c) / (2 + c)
    return (n - 1) ** 2 / 2 + 0j


def g_sum_target(n: int) -> float:
    h = coxeter(n)
    return n * h * (h + 1) / 12


@dataclass(frozen=True)
class HierarchyCoefficients:
    """The data the bilinear equations depend on.

    ``beta`` is keyed by ``(r, label)``; ``g`` by ``r``.  ``rho_x``/``rho_y``
    hold ``(rho|X^(r)_0)`` and ``(rho|Y^(r)_0)`` when the coefficients came
    from the matrices; they are needed only for the vertex representation.
    """

    n: int
    beta: dict
    g: dict
    kappa: complex
    rho_x: dict | None = None
    rho_y: dict | None = None
    source: str = "extract"

    @property
    def h(self) -> int:
        return coxeter(self.n)

    def beta_of(self, r: int, label: ExponentLabel) -> complex:
        return self.beta[(r, label)]

    def beta_neg(self, r: int, label: ExponentLabel) -> complex:
        return self.beta[(r, negate_label(self.n, label))]

    def perturbed(self, delta: complex, r: int = 1, label: ExponentLabel | None = None):
        """Copy with a single beta shifted by ``delta`` (fault injection)."""
        label = label or ExponentLabel(1)
        beta = dict(self.beta)
        beta[(r, label)] += delta
        return replace(self, beta=beta, source=self.source + "+perturbed")


@lru_cache(maxsize=None)
def _extracted(n: int) -> HierarchyCoefficients:
    bases = dual_bases(n)
    beta = {
        (r, label): beta_extract(r, label, bases)
        for r in range(1, n + 1)
        for label in exponent_labels(n)
    }
    rho_x = {r: coroot_coefficient_sum(bases.X[r][0]) for r in range(1, n + 1)}
    rho_y = {r: coroot_coefficient_sum(bases.Y[r][0]) for r in range(1, n + 1)}
    g = {r: rho_x[r] * rho_y[r] for r in range(1, n + 1)}
    return HierarchyCoefficients(n, beta, g, kappa(n), rho_x, rho_y, "extract")


def hierarchy_coefficients(n: int, method: str = "extract") -> HierarchyCoefficients:
    """Coefficients from the matrix construction (``"extract"``) or the closed forms."""
    check_rank(n)
    if method == "extract":
        return _extracted(int(n))
    if method == "closed":
        beta = {
            (r, label): beta_closed(n, r, label)
            for r in range(1, n + 1)
            for label in exponent_labels(n)
        }
        g = {r: g_closed(n, r) for r in range(1, n + 1)}
        ext = _extracted(int(n))
        # the closed forms fix only the product g_r; keep the matrix split for the vertex operators
        return HierarchyCoefficients(n, beta, g, kappa(n), ext.rho_x, ext.rho_y, "closed")
    raise ValueError(f"unknown method {method!r}")


def clear_caches() -> None:
    """Forget every cached matrix (used to time cold construction)."""
    from . import algebra

    for fn in (
        algebra._weyl_generators,
        algebra._grading_element,
        algebra._degree_table,
        _cyclic_element,
        _heisenberg_basis,
        _dual_bases,
        _extracted,
    ):
        fn.cache_clear()
