"""Canonical finite sets and the rank/unrank encodings used everywhere.

Every finite type is an initial segment ``{0, ..., n-1}`` of the naturals.
Dependent sums are encoded branch-major: element ``(b, o)`` of
``sum_b Fin(arities[b])`` has rank ``arities[0] + ... + arities[b-1] + o``.
Dependent products are encoded mixed-radix with digit 0 most significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import IndexOutOfRange, ShapeMismatch


@dataclass(frozen=True)
class FinSet:
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"negative size {self.size}")

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x) -> bool:
        return isinstance(x, int) and 0 <= x < self.size


@dataclass(frozen=True)
class Table:
    """A total function on ``Fin(len(values))``.

    ``bounds`` is either a single codomain size or one bound per entry
    (for dependent functions).
    """

    values: tuple[int, ...]
    bounds: int | tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not isinstance(self.bounds, int):
            object.__setattr__(self, "bounds", tuple(self.bounds))
            if len(self.bounds) != len(self.values):
                raise ShapeMismatch("one bound per entry required")
        for i, v in enumerate(self.values):
            if not 0 <= v < self.bound(i):
                raise IndexOutOfRange(f"entry {i} = {v} outside Fin({self.bound(i)})")

    def bound(self, i: int) -> int:
        return self.bounds if isinstance(self.bounds, int) else self.bounds[i]

    @property
    def domain(self) -> FinSet:
        return FinSet(len(self.values))

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def then(self, other: "Table") -> "Table":
        """Composite ``other . self``."""
        if isinstance(self.bounds, int) and self.bounds != len(other):
            raise ShapeMismatch("codomain does not match next domain")
        return Table(tuple(other[v] for v in self.values), other.bounds)


@dataclass(frozen=True)
class Bijection:
    forward: Table
    backward: Table

    def __post_init__(self):
        if len(self.forward) != len(self.backward):
            raise ShapeMismatch("bijection sides have different sizes")
        for i, v in enumerate(self.forward):
            if self.backward[v] != i:
                raise ValueError("backward is not a left inverse of forward")
        for j, v in enumerate(self.backward):
            if self.forward[v] != j:
                raise ValueError("backward is not a right inverse of forward")

    @classmethod
    def from_table(cls, f: Table | Sequence[int]) -> "Bijection":
        f = f if isinstance(f, Table) else Table(tuple(f), len(f))
        return cls(f, Table(invert(f.values), len(f)))


def _check_index(index: int, total: int) -> None:
    if not 0 <= index < total:
        raise IndexOutOfRange(f"index {index} outside Fin({total})")


def unrank_sigma(arities: Sequence[int], index: int) -> tuple[int, int]:
    """Split ``index`` into ``(branch, offset)`` under the branch-major order."""
    if index < 0:
        raise IndexOutOfRange(f"negative index {index}")
    for branch, n in enumerate(arities):
        if index < n:
            return branch, index
        index -= n
    raise IndexOutOfRange(f"index exceeds total {sum(arities)}")


def rank_sigma(arities: Sequence[int], branch: int, offset: int) -> int:
    if not 0 <= branch < len(arities):
        raise IndexOutOfRange(f"branch {branch} outside Fin({len(arities)})")
    _check_index(offset, arities[branch])
    return sum(arities[:branch]) + offset


def unrank_pi(bases: Sequence[int], index: int) -> tuple[int, ...]:
    """Mixed-radix digits of ``index``, most significant first."""
    total = 1
    for b in bases:
        total *= b
    _check_index(index, total)
    digits = [0] * len(bases)
    for i in range(len(bases) - 1, -1, -1):
        index, digits[i] = divmod(index, bases[i])
    return tuple(digits)


def rank_pi(bases: Sequence[int], digits: Sequence[int]) -> int:
    if len(bases) != len(digits):
        raise IndexOutOfRange(f"{len(digits)} digits for {len(bases)} bases")
    index = 0
    for b, t in zip(bases, digits):
        if not 0 <= t < b:
            raise IndexOutOfRange(f"digit {t} outside Fin({b})")
        index = index * b + t
    return index


def product(bases: Sequence[int]) -> int:
    total = 1
    for b in bases:
        total *= b
    return total


def is_bijection(f: Table | Sequence[int], domain: FinSet | int, codomain: FinSet | int) -> bool:
    n = domain.size if isinstance(domain, FinSet) else domain
    m = codomain.size if isinstance(codomain, FinSet) else codomain
    values = f.values if isinstance(f, Table) else tuple(f)
    if len(values) != n:
        raise ShapeMismatch(f"table has {len(values)} entries, domain has {n}")
    if n != m:
        return False
    return all(0 <= v < m for v in values) and len(set(values)) == n


def invert(values: Sequence[int]) -> tuple[int, ...]:
    """Inverse of a permutation of ``range(len(values))``."""
    inv = [-1] * len(values)
    for i, v in enumerate(values):
        if not 0 <= v < len(values) or inv[v] != -1:
            raise ValueError("not a bijection")
        inv[v] = i
    return tuple(inv)
