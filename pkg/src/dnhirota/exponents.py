"""Exponent labels, affine exponents and eigenvalue tags for D_n^(1)."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import check_rank
from .errors import InvalidTagError


@dataclass(frozen=True, order=True)
class ExponentLabel:
    """A residue class in the exponent set ``I = {1, 3, ..., 2n-3} U {(n-1)'}``."""

    value: int
    primed: bool = False

    def __str__(self) -> str:
        return f"{self.value}p" if self.primed else str(self.value)

    @classmethod
    def parse(cls, text: str) -> "ExponentLabel":
        text = text.strip()
        if text.endswith(("p", "'")):
            return cls(int(text[:-1]), True)
        return cls(int(text))


def exponent_labels(n: int) -> list[ExponentLabel]:
    """The n labels, ordered by value with the primed label after its unprimed twin."""
    check_rank(n)
    labels = [ExponentLabel(v) for v in range(1, 2 * n - 2, 2)]
    labels.append(ExponentLabel(n - 1, True))
    return sorted(labels)


def validate_label(n: int, label: ExponentLabel) -> None:
    h = 2 * n - 2
    if label.primed:
        ok = label.value == n - 1
    else:
        ok = 0 < label.value < h and label.value % 2 == 1
    if not ok:
        raise InvalidTagError(f"{label} is not an exponent label of D_{n}")


def negate_label(n: int, label: ExponentLabel) -> ExponentLabel:
    """Label of ``-j`` reduced mod h.  The primed label is its own negative."""
    if label.primed:
        return label
    return ExponentLabel(2 * n - 2 - label.value)


@dataclass(frozen=True, order=True)
class Exponent:
    """A positive affine exponent ``label.value + level * h``."""

    label: ExponentLabel
    level: int = 0

    def value(self, h: int) -> int:
        return self.label.value + self.level * h

    def name(self, h: int) -> str:
        v = self.value(h)
        return f"{v}p" if self.label.primed else str(v)


def positive_exponents(n: int, max_value: int) -> list[Exponent]:
    """All ``j in E_+`` with numeric value at most ``max_value``, sorted by value."""
    h = 2 * n - 2
    out = []
    for label in exponent_labels(n):
        k = 0
        while label.value + k * h <= max_value:
            out.append(Exponent(label, k))
            k += 1
    out.sort(key=lambda e: (e.value(h), e.label.primed))
    return out


@dataclass(frozen=True)
class EigenvalueTag:
    """Eigenvalue of the cyclic element: ``omega**s`` for kind 'root', or one of the two zeros."""

    kind: str
    s: int = 0

    def __post_init__(self):
        if self.kind not in ("root", "zero", "zero_prime"):
            raise InvalidTagError(f"unknown eigenvalue kind {self.kind!r}")
        if self.kind != "root" and self.s != 0:
            raise InvalidTagError("zero tags carry no exponent")

    def __str__(self) -> str:
        if self.kind == "root":
            return f"w^{self.s}"
        return "0" if self.kind == "zero" else "0'"


ZERO = EigenvalueTag("zero")
ZERO_PRIME = EigenvalueTag("zero_prime")


def root(s: int) -> EigenvalueTag:
    return EigenvalueTag("root", s)


def negate_tag(n: int, tag: EigenvalueTag) -> EigenvalueTag:
    if tag.kind != "root":
        return tag
    h = 2 * n - 2
    return root((tag.s + h // 2) % h)
