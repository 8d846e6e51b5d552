"""Matrix realization of the simple Lie algebra of type D_n.

Elements are dense ``2n x 2n`` complex numpy arrays.  Every public helper
that names a matrix entry uses 1-based ``(row, col)`` indices, the same
convention as the matrix units ``e_{i,j}``; the conversion to 0-based
storage happens in :func:`unit` and :func:`entry` only.

The algebra is ``{A : A = -S A^T S}`` where ``A^T`` is the transpose along
the anti-diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ComponentRangeError,
    DimensionMismatchError,
    RankTooSmallError,
    SingularSystemError,
)

DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True)
class AlgebraConfig:
    n: int
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        check_rank(self.n)
        if not (0 < self.epsilon < 1e-6):
            raise ValueError(f"epsilon must lie in (0, 1e-6), got {self.epsilon}")

    @property
    def h(self) -> int:
        return 2 * self.n - 2

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class WeylSystem:
    """Chevalley-type generators ``e_i, f_i, h_i`` for ``i = 0..n``."""

    n: int
    e: tuple
    f: tuple
    h: tuple


@dataclass(frozen=True)
class GradingElement:
    rho_vee: np.ndarray = field(repr=False)
    d_entries: np.ndarray


def check_rank(n: int) -> None:
    if int(n) != n or n < 3:
        raise RankTooSmallError(f"rank n must be an integer >= 3, got {n!r}")


def unit(n: int, i: int, j: int) -> np.ndarray:
    """The matrix unit e_{i,j} (1-based) of size 2n."""
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def entry(A: np.ndarray, i: int, j: int) -> complex:
    return A[i - 1, j - 1]


def _rank_of(A: np.ndarray) -> int:
    dim = A.shape[0]
    if A.ndim != 2 or A.shape[1] != dim or dim % 2:
        raise DimensionMismatchError(f"expected an even square matrix, got shape {A.shape}")
    return dim // 2


def build_involution_matrix(n: int) -> np.ndarray:
    check_rank(n)
    S = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(1, n + 1):
        sign = (-1) ** (i - 1)
        S += sign * (unit(n, i, i) + unit(n, 2 * n + 1 - i, 2 * n + 1 - i))
    return S


def anti_transpose(A: np.ndarray) -> np.ndarray:
    """Transpose along the anti-diagonal: result[i, j] = A[2n+1-j, 2n+1-i]."""
    return A[::-1, ::-1].T.copy()


def sigma(A: np.ndarray) -> np.ndarray:
    """Project an arbitrary matrix into the algebra, ``A - S A^T S``."""
    S = build_involution_matrix(_rank_of(A))
    return A - S @ anti_transpose(A) @ S


def membership_check(A: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2 or A.shape[0] < 6:
        return False
    S = build_involution_matrix(A.shape[0] // 2)
    return float(np.max(np.abs(A + S @ anti_transpose(A) @ S))) <= epsilon


def killing_form(A: np.ndarray, B: np.ndarray) -> complex:
    """Normalized invariant form ``tr(AB) / 2``."""
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch {A.shape} vs {B.shape}")
    # tr(AB) without forming the product
    return complex(np.sum(A * B.T) / 2)


def bracket(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


@lru_cache(maxsize=None)
def _weyl_generators(n: int) -> WeylSystem:
    check_rank(n)
    N2 = 2 * n

    def E(i, j):
        return unit(n, i, j)

    e = [None] * (n + 1)
    f = [None] * (n + 1)
    hh = [None] * (n + 1)
    for i in range(1, n):
        e[i] = E(i + 1, i) + E(N2 + 1 - i, N2 - i)
        f[i] = E(i, i + 1) + E(N2 - i, N2 + 1 - i)
        hh[i] = -E(i, i) + E(i + 1, i + 1) - E(N2 - i, N2 - i) + E(N2 + 1 - i, N2 + 1 - i)
    e[n] = 0.5 * (E(n + 1, n - 1) + E(n + 2, n))
    f[n] = 2.0 * (E(n - 1, n + 1) + E(n, n + 2))
    hh[n] = -E(n - 1, n - 1) - E(n, n) + E(n + 1, n + 1) + E(n + 2, n + 2)
    e[0] = 0.5 * (E(1, N2 - 1) + E(2, N2))
    f[0] = 2.0 * (E(N2 - 1, 1) + E(N2, 2))
    hh[0] = E(1, 1) + E(2, 2) - E(N2 - 1, N2 - 1) - E(N2, N2)
    for m in e + f + hh:
        m.setflags(write=False)
    return WeylSystem(n=n, e=tuple(e), f=tuple(f), h=tuple(hh))


def weyl_generators(n: int) -> WeylSystem:
    """Generators e_i, f_i, h_i (i = 0..n) in the 2n-dimensional realization.

    ``e_0, f_0`` close the affine Dynkin diagram; the factors 1/2 and 2 on
    ``e_n, f_n, e_0, f_0`` make ``(e_i | f_i) = 1`` for every i.
    """
    return _weyl_generators(int(n))


def affine_cartan_matrix(n: int) -> np.ndarray:
    """Extended Cartan matrix of D_n^(1), nodes ordered 0..n.

    Built from the Dynkin diagram alone: node 2 carries node 0 and node 1,
    node n-2 branches to n-1 and n, and 2..n-2 form a chain.
    """
    check_rank(n)
    edges = {(i, i + 1) for i in range(1, n - 1)}
    edges.add((n - 2, n))
    edges.add((0, 2))
    if n == 3:
        # D_3^(1) = A_3^(1) is a 4-cycle: the affine node also meets node 3
        edges.add((0, 3))
    C = 2 * np.eye(n + 1)
    for a, b in edges:
        C[a, b] = C[b, a] = -1
    return C


@lru_cache(maxsize=None)
def _grading_element(n: int) -> GradingElement:
    check_rank(n)
    dim = 2 * n
    ws = weyl_generators(n)
    rows, rhs = [], []
    # [D, e_{a,b}] = (d_a - d_b) e_{a,b}: every nonzero entry of e_i gives d_a - d_b = 1
    for i in range(1, n + 1):
        for a, b in zip(*np.nonzero(ws.e[i])):
            row = np.zeros(dim)
            row[a] += 1.0
            row[b] -= 1.0
            rows.append(row)
            rhs.append(1.0)
    for i in range(1, n + 1):
        row = np.zeros(dim)
        row[i - 1] = 1.0
        row[dim - i] = 1.0
        rows.append(row)
        rhs.append(0.0)
    M = np.array(rows)
    b = np.array(rhs)
    if np.linalg.matrix_rank(M) < dim:
        raise SingularSystemError(f"grading constraints for n={n} do not determine rho_vee")
    d, *_ = np.linalg.lstsq(M, b, rcond=None)
    if np.max(np.abs(M @ d - b)) > 1e-10:
        raise SingularSystemError(f"grading constraints for n={n} are inconsistent")
    d = np.round(d, 12) + 0.0
    d.setflags(write=False)
    rho = np.diag(d).astype(complex)
    rho.setflags(write=False)
    return GradingElement(rho_vee=rho, d_entries=d)


def grading_element(n: int) -> GradingElement:
    """Diagonal ``rho_vee`` with ``[rho_vee, e_i] = e_i`` for ``i = 1..n``.

    Solved from the entry-difference constraints of the e_i together with
    the antisymmetry ``d_i = -d_{2n+1-i}`` forced by algebra membership.
    """
    return _grading_element(int(n))


@lru_cache(maxsize=None)
def _degree_table(n: int) -> np.ndarray:
    d = grading_element(n).d_entries
    D = np.rint(d[:, None] - d[None, :]).astype(int)
    D.setflags(write=False)
    return D


def degree_table(n: int) -> np.ndarray:
    """Integer principal degree ``d_a - d_b`` of each matrix position (0-based array)."""
    return _degree_table(int(n))


def principal_component(A: np.ndarray, j: int) -> np.ndarray:
    """Homogeneous component of principal degree ``j`` (``-h <= j <= h``)."""
    n = _rank_of(A)
    h = 2 * n - 2
    if not (-h <= j <= h):
        raise ComponentRangeError(f"degree {j} outside [-{h}, {h}]")
    return np.where(degree_table(n) == j, A, 0)


def cyclic_mask(n: int, m: int) -> np.ndarray:
    h = 2 * n - 2
    return (degree_table(n) - m) % h == 0


def cyclic_component(A: np.ndarray, m: int) -> np.ndarray:
    """Component of ``A`` in the Z/hZ-graded piece of residue ``m``."""
    return np.where(cyclic_mask(_rank_of(A), m), A, 0)


def coroot_coefficient_sum(A: np.ndarray) -> complex:
    """Sum of the coefficients ``a_i`` in ``diag(A) = sum a_i h_i``.

    Only the diagonal is read: ``-sum_{i<n} (n - i) b_i``.
    """
    n = _rank_of(A)
    b = np.diag(A)
    return complex(-sum((n - i) * b[i - 1] for i in range(1, n)))
