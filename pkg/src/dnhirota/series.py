"""Truncated multivariate power series in weighted variables.

A :class:`Space` fixes a finite tuple of variables, each with a positive
integer weight, and a bound ``N`` on the total weighted degree.  All
monomials of degree ``<= N`` are enumerated once, ordered by degree and
then lexicographically, so a series is a dense complex vector over that
list.  Products drop everything above ``N``.

Variable families used across the package:

``t``  Fock-space times ``t_j``, one per positive exponent ``j``
``y``  shift variables of the bilinear identities
``D``  formal Hirota symbols
``a``  auxiliary symbols (Schur polynomials in generic arguments)
``u``  a single weight-1 variable standing for ``1/z``
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import TruncationMismatchError, WindowOverflowError
from .exponents import Exponent, positive_exponents

PRUNE_RTOL = 1e-14


@dataclass(frozen=True, order=True)
class Variable:
    family: str
    name: str
    weight: int

    def __str__(self) -> str:
        return f"{self.family}{self.name}"


def exponent_variable(family: str, exponent: Exponent, h: int) -> Variable:
    return Variable(family, exponent.name(h), exponent.value(h))


class Space:
    """Graded monomial basis for a fixed variable tuple and truncation ``N``."""

    def __init__(self, variables: tuple[Variable, ...], N: int):
        if N < 0:
            raise ValueError("truncation must be nonnegative")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variables")
        self.variables = tuple(variables)
        self.N = int(N)
        self.weights = np.array([v.weight for v in self.variables], dtype=np.int64)
        self._pos = {v: i for i, v in enumerate(self.variables)}
        self._radix = np.array([self.N // w + 1 for w in self.weights], dtype=np.int64)
        place = np.ones(len(self.variables), dtype=np.int64)
        for i in range(len(self.variables) - 2, -1, -1):
            place[i] = place[i + 1] * self._radix[i + 1]
        self._place = place
        self.monomials = self._enumerate()
        self.monomials.setflags(write=False)
        self.degrees = self.monomials @ self.weights if len(self.variables) else np.zeros(1, np.int64)
        self.size = len(self.monomials)
        keys = self.monomials @ self._place if len(self.variables) else np.zeros(1, np.int64)
        self._key_order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._key_order]
        self._keys = keys
        # count_le[d] = number of monomials of degree <= d
        self.count_le = np.searchsorted(self.degrees, np.arange(self.N + 1), side="right")

    def __repr__(self) -> str:
        names = ", ".join(map(str, self.variables))
        return f"Space([{names}], N={self.N}, size={self.size})"

    def _enumerate(self) -> np.ndarray:
        V = len(self.variables)
        rows: list[tuple[int, ...]] = []

        def rec(i, budget, prefix):
            if i == V:
                rows.append(tuple(prefix))
                return
            w = int(self.weights[i])
            for e in range(budget // w + 1):
                prefix.append(e)
                rec(i + 1, budget - e * w, prefix)
                prefix.pop()

        rec(0, self.N, [])
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), V)
        deg = arr @ self.weights if V else np.zeros(len(rows), np.int64)
        # graded, then lexicographic with the first variable most significant (descending)
        order = np.lexsort(tuple((-arr[:, i]) for i in range(V - 1, -1, -1)) + (deg,))
        return arr[order]

    def var_index(self, var: Variable) -> int:
        try:
            return self._pos[var]
        except KeyError:
            raise KeyError(f"{var} is not a variable of {self!r}") from None

    def has(self, var: Variable) -> bool:
        return var in self._pos

    def family(self, family: str) -> list[Variable]:
        return [v for v in self.variables if v.family == family]

    def lookup(self, exps: np.ndarray) -> np.ndarray:
        """Indices of the monomials with the given exponent rows (must exist)."""
        keys = np.asarray(exps, dtype=np.int64) @ self._place
        pos = np.searchsorted(self._sorted_keys, keys)
        return self._key_order[pos]

    def index_of(self, exps: Mapping[Variable, int]) -> int:
        row = np.zeros(len(self.variables), dtype=np.int64)
        for v, e in exps.items():
            row[self.var_index(v)] = e
        if row @ self.weights > self.N:
            raise IndexError("monomial exceeds truncation")
        return int(self.lookup(row[None, :])[0])

    @cached_property
    def mul_table(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR table: row i lists the product index of monomial i with each b-monomial
        j < row_ptr[i+1] - row_ptr[i]."""
        lengths = self.count_le[self.N - self.degrees]
        row_ptr = np.zeros(self.size + 1, dtype=np.int64)
        np.cumsum(lengths, out=row_ptr[1:])
        ia = np.repeat(np.arange(self.size), lengths)
        jb = np.arange(row_ptr[-1]) - np.repeat(row_ptr[:-1], lengths)
        keys = self._keys[ia] + self._keys[jb]
        cols = self._key_order[np.searchsorted(self._sorted_keys, keys)]
        return row_ptr, np.ascontiguousarray(cols, dtype=np.int64)

    @lru_cache(maxsize=None)
    def derivative_map(self, var: Variable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        i = self.var_index(var)
        src = np.flatnonzero(self.monomials[:, i] > 0)
        shifted = self.monomials[src].copy()
        factor = shifted[:, i].astype(complex)
        shifted[:, i] -= 1
        dst = self.lookup(shifted)
        return src, dst, factor

    def subspace_map(self, other: "Space") -> tuple[np.ndarray, np.ndarray]:
        """Pairs (i_self, i_other) for monomials of ``self`` that exist in ``other``.

        Monomials using variables absent from ``other``, or of degree above
        ``other.N``, are dropped.
        """
        cols = []
        keep = np.ones(self.size, dtype=bool)
        for k, v in enumerate(self.variables):
            if other.has(v):
                cols.append(other.var_index(v))
            else:
                keep &= self.monomials[:, k] == 0
                cols.append(-1)
        keep &= self.degrees <= other.N
        src = np.flatnonzero(keep)
        rows = np.zeros((len(src), len(other.variables)), dtype=np.int64)
        for k, c in enumerate(cols):
            if c >= 0:
                rows[:, c] = self.monomials[src, k]
        return src, other.lookup(rows)

    def monomial_str(self, i: int) -> str:
        parts = []
        for v, e in zip(self.variables, self.monomials[i]):
            if e == 1:
                parts.append(str(v))
            elif e > 1:
                parts.append(f"{v}^{e}")
        return "*".join(parts) or "1"


@lru_cache(maxsize=256)
def make_space(variables: tuple[Variable, ...], N: int) -> Space:
    return Space(variables, N)


def exponent_variables(n: int, N: int, family: str) -> tuple[Variable, ...]:
    h = 2 * n - 2
    return tuple(exponent_variable(family, e, h) for e in positive_exponents(n, N))


U = Variable("u", "", 1)


def series_space(n: int, N: int, families: Iterable[str] = ("t",)) -> Space:
    """Space over the exponent variables of the given families (``"u"`` adds 1/z)."""
    variables: list[Variable] = []
    for fam in families:
        if fam == "u":
            variables.append(U)
        else:
            variables.extend(exponent_variables(n, N, fam))
    return make_space(tuple(variables), N)


class TruncatedSeries:
    """Dense coefficient vector over a :class:`Space`.  Treated as immutable."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: Space, coeffs=None):
        self.space = space
        if coeffs is None:
            coeffs = np.zeros(space.size, dtype=complex)
        else:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != (space.size,):
                raise TruncationMismatchError(
                    f"coefficient vector of shape {coeffs.shape} does not fit {space!r}"
                )
        self.coeffs = coeffs

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, space: Space) -> "TruncatedSeries":
        return cls(space)

    @classmethod
    def constant(cls, space: Space, c: complex) -> "TruncatedSeries":
        s = cls(space)
        s.coeffs[0] = c
        return s

    @classmethod
    def one(cls, space: Space) -> "TruncatedSeries":
        return cls.constant(space, 1.0)

    @classmethod
    def monomial(cls, space: Space, exps: Mapping[Variable, int], c: complex = 1.0):
        s = cls(space)
        w = sum(v.weight * e for v, e in exps.items())
        if w <= space.N:
            s.coeffs[space.index_of(exps)] = c
        return s

    @classmethod
    def var(cls, space: Space, var: Variable, c: complex = 1.0) -> "TruncatedSeries":
        return cls.monomial(space, {var: 1}, c)

    @classmethod
    def from_terms(cls, space: Space, terms: Mapping[tuple, complex]) -> "TruncatedSeries":
        """Build from ``{((var, exp), ...): coeff}``; terms above the truncation are dropped."""
        s = cls(space)
        for mono, c in terms.items():
            exps = dict(mono)
            if sum(v.weight * e for v, e in exps.items()) <= space.N:
                s.coeffs[space.index_of(exps)] += c
        return s

    # arithmetic -------------------------------------------------------
    def _check(self, other: "TruncatedSeries") -> None:
        if other.space is not self.space:
            raise TruncationMismatchError(f"{self.space!r} vs {other.space!r}")

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return TruncatedSeries(self.space, self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[0] += other
        return TruncatedSeries(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.space, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul_truncated(self, other)
        return TruncatedSeries(self.space, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return TruncatedSeries(self.space, self.coeffs / c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = TruncatedSeries.one(self.space)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # inspection -------------------------------------------------------
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.space.size else 0.0

    def nnz(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(self.space.degrees[nz].max()) if nz.size else -1

    def coefficient(self, exps: Mapping[Variable, int]) -> complex:
        try:
            return complex(self.coeffs[self.space.index_of(exps)])
        except IndexError:
            return 0j

    def terms(self, tol: float = 0.0):
        """Yield ``(monomial_index, coeff)`` for nonzero coefficients in basis order."""
        for i in np.flatnonzero(np.abs(self.coeffs) > tol):
            yield int(i), complex(self.coeffs[i])

    def evaluate(self, values: Mapping[Variable, complex]) -> complex:
        """Numeric value with the given variables substituted (missing ones are 0)."""
        x = np.array([values.get(v, 0) for v in self.space.variables], dtype=complex)
        mono = np.prod(x[None, :] ** self.space.monomials, axis=1) if len(x) else np.ones(1)
        return complex(self.coeffs @ mono)

    def allclose(self, other: "TruncatedSeries", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)

    def __repr__(self) -> str:
        shown = [f"({c:.6g})*{self.space.monomial_str(i)}" for i, c in self.terms()][:12]
        more = " + ..." if self.nnz() > 12 else ""
        return "TruncatedSeries(" + (" + ".join(shown) or "0") + more + ")"

    # operations -------------------------------------------------------
    def pruned(self, rtol: float = PRUNE_RTOL) -> "TruncatedSeries":
        m = self.max_abs()
        out = self.coeffs.copy()
        out[np.abs(out) < rtol * m] = 0
        return TruncatedSeries(self.space, out)

    def truncate(self, degree: int) -> "TruncatedSeries":
        """Drop every monomial of weighted degree above ``degree`` (same space)."""
        out = self.coeffs.copy()
        out[self.space.degrees > degree] = 0
        return TruncatedSeries(self.space, out)

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        out = np.where(self.space.degrees == degree, self.coeffs, 0)
        return TruncatedSeries(self.space, out)

    def derivative(self, var: Variable) -> "TruncatedSeries":
        src, dst, factor = self.space.derivative_map(var)
        out = np.zeros(self.space.size, dtype=complex)
        kernels.scatter_scaled(src, dst, factor, self.coeffs, out)
        return TruncatedSeries(self.space, out)

    def family_degrees(self, family: str) -> np.ndarray:
        cols = [k for k, v in enumerate(self.space.variables) if v.family == family]
        if not cols:
            return np.zeros(self.space.size, dtype=np.int64)
        return self.space.monomials[:, cols] @ self.space.weights[cols]

    def euler(self, family: str) -> "TruncatedSeries":
        """``sum_j weight(j) v_j d/dv_j`` over one variable family."""
        return TruncatedSeries(self.space, self.coeffs * self.family_degrees(family))

    def embed(self, target: Space) -> "TruncatedSeries":
        """Re-express in ``target``; monomials not representable there are dropped."""
        if target is self.space:
            return self
        src, dst = self.space.subspace_map(target)
        out = np.zeros(target.size, dtype=complex)
        out[dst] = self.coeffs[src]
        return TruncatedSeries(target, out)

    def set_zero(self, family: str, target: Space | None = None) -> "TruncatedSeries":
        """Set every variable of ``family`` to zero and move to a space without them."""
        if target is None:
            keep = tuple(v for v in self.space.variables if v.family != family)
            target = make_space(keep, self.space.N)
        return self.embed(target)

    def split(self, var: Variable, rest: Space | None = None) -> dict[int, "TruncatedSeries"]:
        """Coefficients of powers of ``var`` as series in the remaining variables."""
        k = self.space.var_index(var)
        if rest is None:
            keep = tuple(v for v in self.space.variables if v != var)
            rest = make_space(keep, self.space.N)
        powers = self.space.monomials[:, k]
        reduced = np.delete(self.space.monomials, k, axis=1)
        cols = [rest.var_index(v) for v in self.space.variables if v != var]
        out: dict[int, TruncatedSeries] = {}
        for p in np.unique(powers[self.coeffs != 0]):
            sel = np.flatnonzero((powers == p) & (self.coeffs != 0))
            rows = np.zeros((len(sel), len(rest.variables)), dtype=np.int64)
            rows[:, cols] = reduced[sel]
            vec = np.zeros(rest.size, dtype=complex)
            vec[rest.lookup(rows)] = self.coeffs[sel]
            out[int(p)] = TruncatedSeries(rest, vec)
        return out

    def substitute(self, images: Mapping[Variable, "TruncatedSeries"], target: Space):
        """Replace each variable by a series in ``target``; unmapped variables map to themselves."""
        powers: dict[Variable, list[TruncatedSeries]] = {}
        out = TruncatedSeries(target)
        maxexp = self.space.monomials.max(axis=0) if self.space.size else []
        for k, v in enumerate(self.space.variables):
            img = images.get(v)
            if img is None:
                img = TruncatedSeries.var(target, v)
            plist = [TruncatedSeries.one(target)]
            for _ in range(int(maxexp[k])):
                plist.append(plist[-1] * img)
            powers[v] = plist
        acc = np.zeros(target.size, dtype=complex)
        for i in np.flatnonzero(self.coeffs):
            term = None
            for k, e in enumerate(self.space.monomials[i]):
                if e:
                    p = powers[self.space.variables[k]][int(e)]
                    term = p if term is None else term * p
            if term is None:
                acc[0] += self.coeffs[i]
            else:
                acc += self.coeffs[i] * term.coeffs
        out.coeffs = acc
        return out


def mul_truncated(a: TruncatedSeries, b: TruncatedSeries, prune: bool = True) -> TruncatedSeries:
    """Product with every monomial above the truncation bound dropped."""
    if a.space is not b.space:
        raise TruncationMismatchError(f"cannot multiply {a.space!r} by {b.space!r}")
    space = a.space
    row_ptr, cols = space.mul_table
    # the kernel skips zero rows of its first operand
    if a.nnz() > b.nnz():
        a, b = b, a
    out = np.zeros(space.size, dtype=complex)
    kernels.mul_csr(a.coeffs, b.coeffs, row_ptr, cols, out)
    res = TruncatedSeries(space, out)
    return res.pruned() if prune else res


def exp_series(x: TruncatedSeries) -> TruncatedSeries:
    """``exp(x)`` for ``x`` without constant term, truncated."""
    if abs(x.coeffs[0]) != 0:
        raise ValueError("exp_series needs a series with zero constant term")
    out = TruncatedSeries.one(x.space)
    term = TruncatedSeries.one(x.space)
    # x has order >= 1, so x^k vanishes for k > N
    for k in range(1, x.space.N + 1):
        term = term * x / k
        if term.nnz() == 0:
            break
        out = out + term
    return out


class LaurentBlock:
    """Finite Laurent polynomial in ``z`` with truncated-series coefficients.

    Degrees are confined to ``[-window, window]``; anything produced outside
    that range raises :class:`WindowOverflowError` unless ``clip`` is asked for.
    """

    def __init__(self, space: Space, window: int, terms: Mapping[int, TruncatedSeries] | None = None):
        self.space = space
        self.window = int(window)
        self.terms: dict[int, TruncatedSeries] = {}
        for d, s in (terms or {}).items():
            self[d] = s

    def __setitem__(self, d: int, s: TruncatedSeries) -> None:
        if abs(d) > self.window:
            raise WindowOverflowError(f"z-degree {d} outside window [-{self.window}, {self.window}]")
        if s.space is not self.space:
            raise TruncationMismatchError("Laurent coefficient in the wrong space")
        self.terms[int(d)] = s

    def __getitem__(self, d: int) -> TruncatedSeries:
        return self.terms.get(int(d)) or TruncatedSeries.zero(self.space)

    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def __add__(self, other: "LaurentBlock") -> "LaurentBlock":
        out = LaurentBlock(self.space, max(self.window, other.window), self.terms)
        for d, s in other.terms.items():
            out[d] = out[d] + s
        return out

    def scale(self, c: complex) -> "LaurentBlock":
        return LaurentBlock(self.space, self.window, {d: s * c for d, s in self.terms.items()})

    def mul(self, other: "LaurentBlock", clip: bool = False) -> "LaurentBlock":
        out = LaurentBlock(self.space, self.window)
        acc: dict[int, np.ndarray] = {}
        for d1, s1 in self.terms.items():
            for d2, s2 in other.terms.items():
                d = d1 + d2
                if abs(d) > self.window:
                    if clip:
                        continue
                    raise WindowOverflowError(f"product degree {d} outside window")
                p = mul_truncated(s1, s2, prune=False)
                if d in acc:
                    acc[d] += p.coeffs
                else:
                    acc[d] = p.coeffs.copy()
        for d in sorted(acc):
            out[d] = TruncatedSeries(self.space, acc[d]).pruned()
        return out

    def coefficient(self, d: int) -> TruncatedSeries:
        return self[d]

    def residue(self) -> TruncatedSeries:
        """``res_{z=0}``: the coefficient of ``z^-1``."""
        return self[-1]

    @classmethod
    def from_u_series(cls, s: TruncatedSeries, rest: Space, window: int) -> "LaurentBlock":
        """Read a series in ``(rest, u)`` with ``u = 1/z`` as a block of nonpositive z-degrees."""
        parts = s.split(U, rest)
        return cls(rest, window, {-p: part for p, part in parts.items()})
