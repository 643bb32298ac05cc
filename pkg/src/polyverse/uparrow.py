"""The twisted-arrow action ``p ⇈[q][f] r`` and its structure maps.

A position of ``p ⇈[q][f] r`` is a pair ``(a, ε)`` with ``ε`` a tuple of
``p.arity(a)`` positions of ``r``, ranked exactly like ``p ◃ r``.  A
direction at ``(a, ε)`` is a tuple ``t`` indexed by the directions ``d`` of
``q`` at ``f a``, with ``t[d]`` a direction of ``r`` at ``ε[f♯ a d]``;
directions are ranked as mixed-radix numerals, ``d = 0`` most significant.

Plain ``p ⇈ r`` is the case ``q = p``, ``f = id``.

If ``f`` is undefined at ``a`` (a truncated universe) then every position
over ``a`` has no arity and raises :class:`CapExceeded`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import PreconditionFailed
from .finset import product, rank_pi, unrank_pi
from .monoidal import Composite, lens_compose_prod
from .poly import Lens, Poly, Y, _Derived, check_positions, comp_lens, eq_lens, id_lens, require_same


class UpGen(_Derived):
    """``base ⇈[mid][along] fiber``."""

    def __init__(self, base: Poly, mid: Poly, along: Lens, fiber: Poly):
        super().__init__()
        require_same(along.source, base, "source of the ⇈ lens")
        require_same(along.target, mid, "target of the ⇈ lens")
        self.base = base
        self.mid = mid
        self.along = along
        self.fiber = fiber
        self._shape = Composite(base, fiber)
        self.decode = self._shape.decode
        self.encode = self._shape.encode
        self.bases = lru_cache(maxsize=1 << 14)(self._bases)

    def _make_key(self):
        return ("⇈", self.base.key, self.mid.key, self.along.key, self.fiber.key)

    @property
    def npos(self) -> int:
        return self._shape.npos

    def _bases(self, i: int) -> tuple[int, ...]:
        a, eps = self.decode(i)
        _, back = self.along.view(a)
        return tuple(self.fiber.arity(eps[b]) for b in back)

    def arity(self, i: int) -> int:
        return product(self.bases(i))

    def unrank_dir(self, i: int, e: int) -> tuple[int, ...]:
        return unrank_pi(self.bases(i), e)

    def rank_dir(self, i: int, t) -> int:
        return rank_pi(self.bases(i), t)

    def describe(self, i: int):
        a, eps = self.decode(i)
        return [self.base.describe(a), [self.fiber.describe(c) for c in eps]]

    def __repr__(self):
        return f"({self.base!r} ⇈ {self.fiber!r})"


def up_gen(p: Poly, q: Poly, f: Lens, r: Poly) -> UpGen:
    out = UpGen(p, q, f, r)
    check_positions(out.npos, "p ⇈ r")
    return out


def up(p: Poly, r: Poly) -> UpGen:
    return up_gen(p, p, id_lens(p), r)


def _lazy_up(p: Poly, r: Poly) -> UpGen:
    return UpGen(p, p, id_lens(p), r)


def up_gen_lens(f: Lens, f2: Lens, g: Lens, h: Lens, k: Lens, check: bool = True) -> Lens:
    """``⇈[]Lens``: ``p ⇈[q][f] r -> p' ⇈[q'][f2] r'``.

    ``g : p -> p'``, ``h : q' -> q`` and ``k : r -> r'`` must satisfy
    ``f == g ; f2 ; h``, which is checked unless ``check`` is false.
    """
    require_same(g.source, f.source, "g source")
    require_same(g.target, f2.source, "g target")
    require_same(h.source, f2.target, "h source")
    require_same(h.target, f.target, "h target")
    if check:
        witness = eq_lens(f, comp_lens(g, comp_lens(f2, h)))
        if not witness:
            raise PreconditionFailed(f"f differs from g ; f' ; h at {witness.first_violation}")
    src = UpGen(f.source, f.target, f, k.source)
    tgt = UpGen(f2.source, f2.target, f2, k.target)

    def view(i: int):
        a, gamma = src.decode(i)
        ga, gb = g.view(a)
        eps = tuple(k.fwd(gamma[x]) for x in gb)
        j = tgt.encode(ga, eps)
        _, fb = f.view(a)
        f2a, _ = f2.view(ga)
        _, hb = h.view(f2a)
        # source digit at x reads target digit hb[x] through k♯ at γ(f♯ a x)
        ks = [k.view(gamma[fb[x]])[1] for x in range(len(fb))]
        src_bases = src.bases(i)
        back = []
        for big_f in itertools.product(*(range(n) for n in tgt.bases(j))):
            back.append(rank_pi(src_bases, [ks[x][big_f[hb[x]]] for x in range(len(fb))]))
        return j, tuple(back)

    return Lens(src, tgt, view)


def up_lens(f: Lens, f_inv: Lens, g: Lens) -> Lens:
    """``⇈Lens``: ``p ⇈ q -> r ⇈ s`` from ``f : p -> r`` with left inverse ``f_inv`` and ``g : q -> s``."""
    return up_gen_lens(id_lens(f.source), id_lens(f.target), f, f_inv, g)


def up_unit_src(p: Poly) -> Lens:
    """``𝕪 ⇈ p -> p``."""
    src = _lazy_up(Y, p)

    def view(i: int):
        _, (c,) = src.decode(i)
        # the one-digit tuple (e,) has rank e
        return c, tuple(rank_pi(src.bases(i), (e,)) for e in range(p.arity(c)))

    return Lens(src, p, view)


def up_unit_src_inv(p: Poly) -> Lens:
    tgt = _lazy_up(Y, p)

    def view(c: int):
        j = tgt.encode(0, (c,))
        return j, tuple(tgt.unrank_dir(j, e)[0] for e in range(tgt.arity(j)))

    return Lens(p, tgt, view)


def up_to_unit(p: Poly, q: Poly | None = None, f: Lens | None = None) -> Lens:
    """``p ⇈[q][f] 𝕪 -> 𝕪``, the unique such lens."""
    if q is None:
        q, f = p, id_lens(p)
    src = UpGen(p, q, f, Y)

    def view(i: int):
        src.bases(i)
        return 0, (0,)

    return Lens(src, Y, view)


def up_curry(p: Poly, q: Poly, r: Poly, s: Poly, t: Poly, f: Lens, g: Lens) -> Lens:
    """``⇈[]Curry``: ``(p ◃ r) ⇈[q ◃ s][f ◃◃ g] t -> p ⇈[q][f] (r ⇈[s][g] t)``."""
    fg = lens_compose_prod(f, g)
    pr = fg.source
    src = UpGen(pr, fg.target, fg, t)
    inner = UpGen(r, s, g, t)
    tgt = UpGen(p, q, f, inner)

    def view(i: int):
        x, kk = src.decode(i)
        a, hh = pr.decode(x)
        offs = pr.dir_offsets(x)
        heads = tuple(inner.encode(hh[b], kk[offs[b]:offs[b + 1]]) for b in range(len(hh)))
        j = tgt.encode(a, heads)
        _, fb = f.view(a)
        src_bases = src.bases(i)
        back = []
        for outer in itertools.product(*(range(n) for n in tgt.bases(j))):
            # Ϝ (b, d) = Ϝ b d
            flat = []
            for x_, e in enumerate(outer):
                flat.extend(inner.unrank_dir(heads[fb[x_]], e))
            back.append(rank_pi(src_bases, flat))
        return j, tuple(back)

    return Lens(src, tgt, view)


def up_curry_simple(p: Poly, q: Poly, r: Poly) -> Lens:
    """``⇈Curry``: ``(p ◃ q) ⇈ r -> p ⇈ (q ⇈ r)``."""
    return up_curry(p, p, q, q, r, id_lens(p), id_lens(q))


def up_uncurry_simple(p: Poly, q: Poly, r: Poly) -> Lens:
    """Inverse of :func:`up_curry_simple`."""
    pq = Composite(p, q)
    inner = _lazy_up(q, r)
    src = _lazy_up(p, inner)
    tgt = _lazy_up(pq, r)

    def view(i: int):
        a, heads = src.decode(i)
        pairs = [inner.decode(c) for c in heads]
        x = pq.encode(a, [c for c, _ in pairs])
        j = tgt.encode(x, [e for _, eps in pairs for e in eps])
        tgt_bases = tgt.bases(j)
        widths = [len(inner.bases(c)) for c in heads]
        back = []
        for flat in itertools.product(*(range(n) for n in tgt_bases)):
            digits, pos = [], 0
            for b, w in enumerate(widths):
                digits.append(inner.rank_dir(heads[b], flat[pos:pos + w]))
                pos += w
            back.append(rank_pi(src.bases(i), digits))
        return j, tuple(back)

    return Lens(src, tgt, view)


def up_distr(p: Poly, q: Poly, r: Poly, s: Poly, t: Poly, f: Lens, g: Lens) -> Lens:
    """``⇈[]Distr``: ``p ⇈[r][f ; g] (s ◃ t) -> (p ⇈[q][f] s) ◃ (q ⇈[r][g] t)``."""
    st = Composite(s, t)
    fg = comp_lens(f, g)
    src = UpGen(p, r, fg, st)
    left = UpGen(p, q, f, s)
    right = UpGen(q, r, g, t)
    tgt = Composite(left, right)

    def view(i: int):
        a, h = src.decode(i)
        pairs = [st.decode(c) for c in h]
        first = left.encode(a, [c for c, _ in pairs])
        fa, fb = f.view(a)
        seconds = []
        for k1 in itertools.product(*(range(n) for n in left.bases(first))):
            seconds.append(right.encode(fa, [pairs[fb[x]][1][k1[x]] for x in range(len(fb))]))
        j = tgt.encode(first, seconds)
        _, gb = g.view(fa)
        src_bases = src.bases(i)
        back = []
        # target direction (k1, k2) goes to d ↦ (k1 (g♯ (f a) d), k2 d)
        for branch, k1 in enumerate(itertools.product(*(range(n) for n in left.bases(first)))):
            sec = seconds[branch]
            for k2 in itertools.product(*(range(n) for n in right.bases(sec))):
                digits = []
                for d in range(len(gb)):
                    x = gb[d]
                    c = h[fb[x]]
                    digits.append(st.dir_offsets(c)[k1[x]] + k2[d])
                back.append(rank_pi(src_bases, digits))
        return j, tuple(back)

    return Lens(src, tgt, view)


def up_distr_simple(p: Poly, q: Poly, r: Poly) -> Lens:
    """``⇈Distr``: ``p ⇈ (q ◃ r) -> (p ⇈ q) ◃ (p ⇈ r)``."""
    return up_distr(p, p, p, q, r, id_lens(p), id_lens(p))
