"""The composition product ◃, the tensor ⊗, and their structure maps.

Positions of ``p ◃ q`` are pairs ``(a, γ)`` with ``γ`` a tuple of
``p.arity(a)`` positions of ``q``; they are ranked outer-major, with ``γ``
read as a mixed-radix numeral (first entry most significant).  Directions
at ``(a, γ)`` are pairs ``(b, d)`` with ``d`` a direction of ``q`` at
``γ[b]``, ranked branch-major.

Positions of ``p ⊗ q`` are pairs ``(a, c)`` ranked ``a * q.npos + c``, and
directions ``(b, d)`` ranked ``b * q.arity(c) + d``.
"""

from __future__ import annotations

from bisect import bisect_right
from functools import lru_cache
from itertools import accumulate
from typing import Sequence

from .errors import IndexOutOfRange
from .finset import rank_pi, unrank_pi
from .poly import Chart, Lens, Poly, Y, _Derived, check_positions


class Composite(_Derived):
    """``outer ◃ inner``, with arities computed position by position."""

    def __init__(self, outer: Poly, inner: Poly):
        super().__init__()
        self.outer = outer
        self.inner = inner
        self._offsets: list[int] | None = None
        self.decode = lru_cache(maxsize=1 << 14)(self._decode)
        self.dir_offsets = lru_cache(maxsize=1 << 14)(self._dir_offsets)

    def _make_key(self):
        return ("◃", self.outer.key, self.inner.key)

    def _prefix(self) -> list[int]:
        if self._offsets is None:
            check_positions(self.outer.npos, "outer factor of ◃")
            m = self.inner.npos
            self._offsets = [0, *accumulate(m ** self.outer.arity(a) for a in range(self.outer.npos))]
        return self._offsets

    @property
    def npos(self) -> int:
        return self._prefix()[-1]

    def encode(self, a: int, gamma: Sequence[int]) -> int:
        return self._prefix()[a] + rank_pi([self.inner.npos] * self.outer.arity(a), gamma)

    def _decode(self, i: int) -> tuple[int, tuple[int, ...]]:
        offsets = self._prefix()
        if not 0 <= i < offsets[-1]:
            raise IndexOutOfRange(f"position {i} outside Fin({offsets[-1]})")
        a = bisect_right(offsets, i) - 1
        return a, unrank_pi([self.inner.npos] * self.outer.arity(a), i - offsets[a])

    def _dir_offsets(self, i: int) -> tuple[int, ...]:
        """Offsets of each branch ``b`` in the direction ranking at ``i``; last entry is the arity."""
        _, gamma = self.decode(i)
        return (0, *accumulate(self.inner.arity(c) for c in gamma))

    def arity(self, i: int) -> int:
        return self.dir_offsets(i)[-1]

    def split_dir(self, i: int, e: int) -> tuple[int, int]:
        offs = self.dir_offsets(i)
        if not 0 <= e < offs[-1]:
            raise IndexOutOfRange(f"direction {e} outside Fin({offs[-1]})")
        b = bisect_right(offs, e) - 1
        return b, e - offs[b]

    def describe(self, i: int):
        a, gamma = self.decode(i)
        return [self.outer.describe(a), [self.inner.describe(c) for c in gamma]]

    def __repr__(self):
        return f"({self.outer!r} ◃ {self.inner!r})"


class Tensor(_Derived):
    """``left ⊗ right``."""

    def __init__(self, left: Poly, right: Poly):
        super().__init__()
        self.left = left
        self.right = right

    def _make_key(self):
        return ("⊗", self.left.key, self.right.key)

    @property
    def npos(self) -> int:
        return self.left.npos * self.right.npos

    def encode(self, a: int, c: int) -> int:
        if not (0 <= a < self.left.npos and 0 <= c < self.right.npos):
            raise IndexOutOfRange(f"({a}, {c}) outside {self!r}")
        return a * self.right.npos + c

    def decode(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.npos:
            raise IndexOutOfRange(f"position {i} outside Fin({self.npos})")
        return divmod(i, self.right.npos)

    def arity(self, i: int) -> int:
        a, c = self.decode(i)
        return self.left.arity(a) * self.right.arity(c)

    def describe(self, i: int):
        a, c = self.decode(i)
        return [self.left.describe(a), self.right.describe(c)]

    def __repr__(self):
        return f"({self.left!r} ⊗ {self.right!r})"


def unit_y() -> Poly:
    return Y


def compose_poly(p: Poly, q: Poly) -> Composite:
    out = Composite(p, q)
    check_positions(out.npos, "p ◃ q")
    return out


def tensor(p: Poly, q: Poly) -> Tensor:
    out = Tensor(p, q)
    check_positions(out.npos, "p ⊗ q")
    return out


def lens_compose_prod(f: Lens, g: Lens) -> Lens:
    """``f ◃◃ g : p ◃ r -> q ◃ s``."""
    src = Composite(f.source, g.source)
    tgt = Composite(f.target, g.target)

    def view(i: int):
        a, gamma = src.decode(i)
        fa, fb = f.view(a)
        offs = src.dir_offsets(i)
        inner, back = [], []
        for b in fb:
            c = gamma[b]
            gc, gb = g.view(c)
            inner.append(gc)
            base = offs[b]
            back.extend(base + x for x in gb)
        return tgt.encode(fa, inner), tuple(back)

    return Lens(src, tgt, view)


def assoc(p: Poly, q: Poly, r: Poly) -> Lens:
    """``(p ◃ q) ◃ r -> p ◃ (q ◃ r)``."""
    pq = Composite(p, q)
    src = Composite(pq, r)
    qr = Composite(q, r)
    tgt = Composite(p, qr)

    def view(i: int):
        x, delta = src.decode(i)
        a, gamma = pq.decode(x)
        pq_offs = pq.dir_offsets(x)
        src_offs = src.dir_offsets(i)
        inner, back = [], []
        for b, c in enumerate(gamma):
            row = delta[pq_offs[b]:pq_offs[b + 1]]
            inner.append(qr.encode(c, row))
            # direction (b, (d, z)) of the target comes from ((b, d), z)
            for d, e in enumerate(row):
                start = src_offs[pq_offs[b] + d]
                back.extend(start + z for z in range(r.arity(e)))
        return tgt.encode(a, inner), tuple(back)

    return Lens(src, tgt, view)


def assoc_inv(p: Poly, q: Poly, r: Poly) -> Lens:
    """``p ◃ (q ◃ r) -> (p ◃ q) ◃ r``."""
    qr = Composite(q, r)
    src = Composite(p, qr)
    pq = Composite(p, q)
    tgt = Composite(pq, r)

    def view(i: int):
        a, gamma = src.decode(i)
        src_offs = src.dir_offsets(i)
        heads, delta, back = [], [], []
        pairs = [qr.decode(x) for x in gamma]
        for c, eps in pairs:
            heads.append(c)
            delta.extend(eps)
        for b, (c, eps) in enumerate(pairs):
            inner_offs = qr.dir_offsets(gamma[b])
            for d, e in enumerate(eps):
                # direction ((b, d), z) of the target comes from (b, (d, z))
                back.extend(src_offs[b] + inner_offs[d] + z for z in range(r.arity(e)))
        x = pq.encode(a, heads)
        return tgt.encode(x, delta), tuple(back)

    return Lens(src, tgt, view)


def unitl(p: Poly) -> Lens:
    """``𝕪 ◃ p -> p``."""
    src = Composite(Y, p)

    def view(i: int):
        _, (a,) = src.decode(i)
        return a, tuple(range(p.arity(a)))

    return Lens(src, p, view, memo=None)


def unitl_inv(p: Poly) -> Lens:
    tgt = Composite(Y, p)
    return Lens(p, tgt, lambda a: (tgt.encode(0, (a,)), tuple(range(p.arity(a)))), memo=None)


def unitr(p: Poly) -> Lens:
    """``p ◃ 𝕪 -> p``."""
    src = Composite(p, Y)

    def view(i: int):
        a, _ = src.decode(i)
        return a, tuple(range(p.arity(a)))

    return Lens(src, p, view, memo=None)


def unitr_inv(p: Poly) -> Lens:
    tgt = Composite(p, Y)
    return Lens(p, tgt, lambda a: (tgt.encode(a, (0,) * p.arity(a)), tuple(range(p.arity(a)))), memo=None)


def tensor_lens(f: Lens, g: Lens) -> Lens:
    """``f ⊗ g``: positions and directions act componentwise."""
    src = Tensor(f.source, g.source)
    tgt = Tensor(f.target, g.target)

    def view(i: int):
        a, c = src.decode(i)
        fa, fb = f.view(a)
        gc, gb = g.view(c)
        width = g.source.arity(c)
        return tgt.encode(fa, gc), tuple(b * width + d for b in fb for d in gb)

    return Lens(src, tgt, view)


def indep(p: Poly, q: Poly) -> Lens:
    """``p ⊗ q -> p ◃ q`` sending ``(a, c)`` to ``(a, const c)``."""
    src = Tensor(p, q)
    tgt = Composite(p, q)

    def view(i: int):
        a, c = src.decode(i)
        n, m = p.arity(a), q.arity(c)
        j = tgt.encode(a, (c,) * n)
        offs = tgt.dir_offsets(j)
        back = [0] * (n * m)
        for b in range(n):
            for d in range(m):
                back[offs[b] + d] = b * m + d
        return j, tuple(back)

    return Lens(src, tgt, view)


def proj1_chart(p: Poly, q: Poly) -> Chart:
    """``p ◃ q ↛ p``: keep the outer position and the branch of each direction."""
    src = Composite(p, q)

    def view(i: int):
        a, _ = src.decode(i)
        offs = src.dir_offsets(i)
        return a, tuple(b for b in range(len(offs) - 1) for _ in range(offs[b + 1] - offs[b]))

    return Chart(src, p, view)


def proj2_tensor_chart(p: Poly, q: Poly) -> Chart:
    """``p ⊗ q ↛ q``."""
    src = Tensor(p, q)

    def view(i: int):
        a, c = src.decode(i)
        m = q.arity(c)
        return c, tuple(d for _ in range(p.arity(a)) for d in range(m))

    return Chart(src, q, view)


def composite_extension_card(p: Poly, q: Poly, x: int) -> int:
    """``|p(q(X))|`` computed without forming ``p ◃ q``."""
    inner = sum(x**n for n in q.arities)
    return sum(inner**n for n in p.arities)
