"""Distributors ``p ◃ q -> r ◃ s``, the ∇ construction, and jump structures.

A :class:`Distributor` is a lens whose source and target are both
:class:`~polyverse.monoidal.Composite`.  Equality comes in two flavours
that are never mixed: :func:`eq_distributor` compares encodings strictly,
while :func:`eq_distributor_upto_iso` identifies codes with equipotent
decodes and allows any reordering of the directions they carry.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import CapExceeded, SearchExhausted, ShapeMismatch
from .monoidal import (
    Composite,
    Tensor,
    assoc,
    assoc_inv,
    indep,
    lens_compose_prod,
    proj1_chart,
    proj2_tensor_chart,
    unitl,
    unitl_inv,
    unitr,
    unitr_inv,
)
from .poly import (
    Lens,
    Poly,
    check_positions,
    comp_all,
    comp_lens,
    eq_lens,
    id_lens,
    is_cartesian,
    lens_to_json,
    poly_from_json,
    poly_to_json,
    require_same,
    square_violation,
)
from .uparrow import UpGen, up_curry, up_distr, up_gen_lens

PERMUTATION_FIBER_BOUND = 6


@dataclass(frozen=True, eq=False)
class Distributor:
    lens: Lens

    def __post_init__(self):
        if not isinstance(self.lens.source, Composite) or not isinstance(self.lens.target, Composite):
            raise ShapeMismatch("a distributor runs between two ◃-composites")

    @property
    def source(self) -> Composite:
        return self.lens.source

    @property
    def target(self) -> Composite:
        return self.lens.target

    def view(self, i: int):
        return self.lens.view(i)

    def __repr__(self):
        return f"Distributor({self.source!r} -> {self.target!r})"


def _as_lens(d: Distributor | Lens) -> Lens:
    return d.lens if isinstance(d, Distributor) else d


def nabla(j: Lens) -> Distributor:
    """``∇ j : p ◃ r -> s ◃ q`` for ``j : p ⇈[q][f] r -> s``."""
    up = j.source
    if not isinstance(up, UpGen):
        raise ShapeMismatch("∇ needs a lens out of a ⇈-polynomial")
    p, q, f, r, s = up.base, up.mid, up.along, up.fiber, j.target
    src = Composite(p, r)
    tgt = Composite(s, q)

    def view(i: int):
        a, _ = src.decode(i)
        jp, jb = j.view(i)
        fa, fb = f.view(a)
        offs = src.dir_offsets(i)
        back = []
        for e in jb:
            t = up.unrank_dir(i, e)
            # (d', d) goes to (f♯ a d, j♯ (a, h) d' d)
            back.extend(offs[fb[d]] + t[d] for d in range(len(fb)))
        return tgt.encode(jp, (fa,) * s.arity(jp)), tuple(back)

    return Distributor(Lens(src, tgt, view))


@dataclass(frozen=True)
class DistEqWitness:
    equal: bool
    violation: dict | None = None
    checked: int = 0
    skipped: int = 0

    def __bool__(self):
        return self.equal


def _outputs(d1: Lens, d2: Lens, positions, skip_undefined: bool):
    """Yield ``(i, view1, view2)``; one-sided undefinedness is reported as a view of ``None``."""
    for i in positions:
        try:
            v1 = d1.view(i)
        except CapExceeded:
            v1 = None
        try:
            v2 = d2.view(i)
        except CapExceeded:
            v2 = None
        if v1 is None and v2 is None:
            yield i, None, None
        elif skip_undefined and (v1 is None or v2 is None):
            yield i, None, None
        else:
            yield i, v1, v2


def _violation(src: Composite, i: int, component: str, **extra) -> dict:
    return {"position": i, "input": src.describe(i), "component": component, **extra}


def _prepare(n1, n2, positions):
    d1, d2 = _as_lens(n1), _as_lens(n2)
    require_same(d1.source, d2.source, "distributor sources")
    require_same(d1.target, d2.target, "distributor targets")
    if not isinstance(d1.target, Composite):
        raise ShapeMismatch("distributor target must be a ◃-composite")
    if positions is None:
        check_positions(d1.source.npos, "distributor source")
        positions = range(d1.source.npos)
    return d1, d2, positions


def eq_distributor(
    n1: Distributor | Lens,
    n2: Distributor | Lens,
    positions: Iterable[int] | None = None,
    skip_undefined: bool = False,
) -> DistEqWitness:
    """Strict layered equality: outer codes, then inner choices, then backward tables."""
    d1, d2, positions = _prepare(n1, n2, positions)
    tgt = d1.target
    checked = skipped = 0
    for i, v1, v2 in _outputs(d1, d2, positions, skip_undefined):
        if v1 is None and v2 is None:
            skipped += 1
            continue
        if v1 is None or v2 is None:
            return DistEqWitness(False, _violation(d1.source, i, "defined"), checked, skipped)
        checked += 1
        x1, g1 = tgt.decode(v1[0])
        x2, g2 = tgt.decode(v2[0])
        if x1 != x2:
            return DistEqWitness(False, _violation(d1.source, i, "first", left=x1, right=x2), checked, skipped)
        if g1 != g2:
            b = next(k for k in range(len(g1)) if g1[k] != g2[k])
            return DistEqWitness(False, _violation(d1.source, i, "second", branch=b), checked, skipped)
        for e, (y1, y2) in enumerate(zip(v1[1], v2[1])):
            if y1 != y2:
                return DistEqWitness(
                    False,
                    _violation(d1.source, i, "backward", direction=tgt.split_dir(v1[0], e), left=y1, right=y2),
                    checked,
                    skipped,
                )
    return DistEqWitness(True, None, checked, skipped)


def _fibers(tgt: Composite, v) -> list[tuple[int, tuple[int, ...]]]:
    """Per outer direction ``d'``: (arity of the inner code, backward row)."""
    j, back = v
    _, gamma = tgt.decode(j)
    offs = tgt.dir_offsets(j)
    return [(tgt.inner.arity(gamma[k]), tuple(back[offs[k]:offs[k + 1]])) for k in range(len(gamma))]


def _rows_match_by_search(row1, row2) -> bool:
    if len(row1) != len(row2):
        return False
    if len(row1) > PERMUTATION_FIBER_BOUND:
        raise SearchExhausted(f"inner fiber of size {len(row1)}", PERMUTATION_FIBER_BOUND)
    return any(all(row1[d] == row2[t[d]] for d in range(len(row1))) for t in itertools.permutations(range(len(row1))))


def _fibers_match_by_search(f1, f2) -> bool:
    if len(f1) > PERMUTATION_FIBER_BOUND:
        raise SearchExhausted(f"outer fiber of size {len(f1)}", PERMUTATION_FIBER_BOUND)
    for sigma in itertools.permutations(range(len(f1))):
        if all(f1[k][0] == f2[sigma[k]][0] and _rows_match_by_search(f1[k][1], f2[sigma[k]][1]) for k in range(len(f1))):
            return True
    return False


def _signature(fibers) -> Counter:
    return Counter((n, tuple(sorted(row))) for n, row in fibers)


def eq_distributor_upto_iso(
    n1: Distributor | Lens,
    n2: Distributor | Lens,
    positions: Iterable[int] | None = None,
    skip_undefined: bool = False,
    method: str = "signature",
) -> DistEqWitness:
    """Equality after identifying equipotent codes and reordering their directions.

    At each input the outer codes must have the same arity, and there must
    be a bijection of outer directions, together with bijections of the
    matched inner directions, carrying one backward table onto the other.
    ``method="signature"`` decides this by comparing multisets of
    per-direction signatures; ``method="search"`` enumerates permutations
    and raises :class:`SearchExhausted` above fibers of size six.
    """
    if method not in ("signature", "search"):
        raise ValueError(f"unknown method {method!r}")
    d1, d2, positions = _prepare(n1, n2, positions)
    tgt = d1.target
    checked = skipped = 0
    for i, v1, v2 in _outputs(d1, d2, positions, skip_undefined):
        if v1 is None and v2 is None:
            skipped += 1
            continue
        if v1 is None or v2 is None:
            return DistEqWitness(False, _violation(d1.source, i, "defined"), checked, skipped)
        checked += 1
        x1, _ = tgt.decode(v1[0])
        x2, _ = tgt.decode(v2[0])
        if tgt.outer.arity(x1) != tgt.outer.arity(x2):
            return DistEqWitness(False, _violation(d1.source, i, "first", left=x1, right=x2), checked, skipped)
        f1, f2 = _fibers(tgt, v1), _fibers(tgt, v2)
        if method == "signature":
            same = _signature(f1) == _signature(f2)
        else:
            same = _fibers_match_by_search(f1, f2)
        if not same:
            return DistEqWitness(False, _violation(d1.source, i, "fibers"), checked, skipped)
    return DistEqWitness(True, None, checked, skipped)


def distr_lens(g: Lens, h: Lens, k: Lens, l: Lens, j: Distributor | Lens) -> Distributor:
    """``(g ◃◃ k) ; j ; (l ◃◃ h) : p' ◃ r' -> s' ◃ q'``."""
    return Distributor(comp_all(lens_compose_prod(g, k), _as_lens(j), lens_compose_prod(l, h)))


def distr_comp1(h: Distributor | Lens, k: Distributor | Lens) -> Distributor:
    """``p ◃ (s ◃ u) -> (t ◃ v) ◃ r`` from ``h : p ◃ s -> t ◃ q`` and ``k : q ◃ u -> v ◃ r``."""
    h, k = _as_lens(h), _as_lens(k)
    p, s = h.source.outer, h.source.inner
    t, q = h.target.outer, h.target.inner
    u = k.source.inner
    v, r = k.target.outer, k.target.inner
    require_same(k.source.outer, q, "middle factor")
    return Distributor(
        comp_all(
            assoc_inv(p, s, u),
            lens_compose_prod(h, id_lens(u)),
            assoc(t, q, u),
            lens_compose_prod(id_lens(t), k),
            assoc_inv(t, v, r),
        )
    )


def distr_comp2(h: Distributor | Lens, k: Distributor | Lens) -> Distributor:
    """``(p ◃ r) ◃ t -> v ◃ (q ◃ s)`` from ``h : r ◃ t -> u ◃ s`` and ``k : p ◃ u -> v ◃ q``."""
    h, k = _as_lens(h), _as_lens(k)
    r, t = h.source.outer, h.source.inner
    u, s = h.target.outer, h.target.inner
    p = k.source.outer
    v, q = k.target.outer, k.target.inner
    require_same(k.source.inner, u, "middle factor")
    return Distributor(
        comp_all(
            assoc(p, r, t),
            lens_compose_prod(id_lens(p), h),
            assoc_inv(p, u, s),
            lens_compose_prod(k, id_lens(s)),
            assoc(v, q, s),
        )
    )


def distr_id1(p: Poly) -> Distributor:
    """``p ◃ 𝕪 -> 𝕪 ◃ p``."""
    return Distributor(comp_lens(unitr(p), unitl_inv(p)))


def distr_id2(p: Poly) -> Distributor:
    """``𝕪 ◃ p -> p ◃ 𝕪``."""
    return Distributor(comp_lens(unitl(p), unitr_inv(p)))


def distr_law_candidate(u, pi: Lens | None = None) -> Distributor:
    """``∇ π : u ◃ u -> u ◃ u``, the would-be distributive law of Π over Σ."""
    pi = u.pi if pi is None else pi
    require_same(pi.target, u.poly, "target of π")
    return nabla(pi)


# ∇ transports the ⇈-side constructions to distributor constructions; these
# build the ⇈ side so the two can be compared.


def nabla_lens_side(g: Lens, h: Lens, k: Lens, l: Lens, j: Lens) -> Lens:
    """The ⇈-lens whose ∇ equals ``distr_lens(g, h, k, l, ∇ j)``."""
    f = j.source.along
    return comp_all(up_gen_lens(comp_all(g, f, h), f, g, h, k), j, l)


def nabla_comp1_side(h: Lens, k: Lens) -> Lens:
    """The ⇈-lens whose ∇ equals ``distr_comp1(∇ h, ∇ k)``."""
    uh, uk = h.source, k.source
    distr = up_distr(uh.base, uh.mid, uk.mid, uh.fiber, uk.fiber, uh.along, uk.along)
    return comp_lens(distr, lens_compose_prod(h, k))


def nabla_comp2_side(h: Lens, k: Lens) -> Lens:
    """The ⇈-lens whose ∇ equals ``distr_comp2(∇ h, ∇ k)``."""
    uh, uk = h.source, k.source
    f, g = uk.along, uh.along
    curry = up_curry(uk.base, uk.mid, uh.base, uh.mid, uh.fiber, f, g)
    return comp_all(curry, up_gen_lens(f, f, id_lens(f.source), id_lens(f.target), h), k)


@dataclass(frozen=True)
class JumpStructure:
    phi: Lens
    factored: Lens | None
    square_ok: bool
    reconstructed: Lens | None = None
    nabla_matches: bool = False
    obstruction: Any = None

    @property
    def ok(self) -> bool:
        return self.factored is not None and self.square_ok and self.nabla_matches

    def __bool__(self):
        return self.ok


def factor_through_indep(d: Distributor | Lens, phi: Lens) -> tuple[Lens | None, Any]:
    """The lens ``∇' : p ◃ q -> r ⊗ s`` with ``∇' ; indep = ∇``, or the first obstruction.

    Where the outer code has no directions the inner choice is empty and
    any ``c`` would do; the square then forces ``c = φ a``.  Positions where
    ``∇`` is undefined stay undefined.
    """
    d = _as_lens(d)
    src, tgt = d.source, d.target
    r, s = tgt.outer, tgt.inner
    ten = Tensor(r, s)
    ind = indep(r, s)
    check_positions(src.npos, "distributor source")
    table_f, table_b = [], []
    for i in range(src.npos):
        try:
            x_code, back = d.view(i)
        except CapExceeded:
            table_f.append(None)
            table_b.append(None)
            continue
        x, gamma = tgt.decode(x_code)
        if gamma and any(c != gamma[0] for c in gamma):
            return None, {"position": i, "input": src.describe(i), "reason": "non-constant second component"}
        a, _ = src.decode(i)
        c = gamma[0] if gamma else phi.fwd(a)
        t = ten.encode(x, c)
        ind_back = ind.view(t)[1]
        # ∇♯ = ∇'♯ ∘ indep♯, and indep♯ is a bijection
        out = [0] * len(ind_back)
        for e, y in enumerate(ind_back):
            out[y] = back[e]
        table_f.append(t)
        table_b.append(tuple(out))
    factored = Lens.from_tables(src, ten, table_f, table_b, validate=False)
    if not eq_lens(comp_lens(factored, ind), d):
        return None, {"reason": "factorization does not recompose"}
    return factored, None


def reconstruct_up_lens(d: Distributor | Lens, phi: Lens) -> Lens:
    """``j : p ⇈[s][φ] q -> r`` read off from ``∇``."""
    d = _as_lens(d)
    src, tgt = d.source, d.target
    p, q, r = src.outer, src.inner, tgt.outer
    up = UpGen(p, tgt.inner, phi, q)
    table_f, table_b = [], []
    for i in range(src.npos):
        try:
            x_code, back = d.view(i)
        except CapExceeded:
            table_f.append(None)
            table_b.append(None)
            continue
        x, _ = tgt.decode(x_code)
        offs = tgt.dir_offsets(x_code)
        rows = []
        for k in range(r.arity(x)):
            digits = [src.split_dir(i, back[offs[k] + dd])[1] for dd in range(offs[k + 1] - offs[k])]
            rows.append(up.rank_dir(i, digits))
        table_f.append(x)
        table_b.append(tuple(rows))
    return Lens.from_tables(up, r, table_f, table_b)


def verify_jump_structure(d: Distributor | Lens, phi: Lens) -> JumpStructure:
    """Check that ``∇`` factors through ``indep`` with a commuting square over ``φ``."""
    lens = _as_lens(d)
    p, q = lens.source.outer, lens.source.inner
    r, s = lens.target.outer, lens.target.inner
    require_same(phi.source, p, "source of φ")
    require_same(phi.target, s, "target of φ")
    factored, obstruction = factor_through_indep(lens, phi)
    if factored is None:
        return JumpStructure(phi, None, False, obstruction=obstruction)
    bad = square_violation(factored, phi, proj1_chart(p, q), proj2_tensor_chart(r, s))
    if bad is not None:
        return JumpStructure(phi, factored, False, obstruction={"square": bad})
    j = reconstruct_up_lens(lens, phi)
    matches = eq_distributor(nabla(j), lens)
    return JumpStructure(
        phi,
        factored,
        True,
        reconstructed=j,
        nabla_matches=matches.equal,
        obstruction=None if matches else matches.violation,
    )


def search_jump_structure(d: Distributor | Lens, bound: int = 10_000) -> tuple[Lens, JumpStructure] | None:
    """Find ``φ`` making ``∇`` a jump structure, least candidate first.

    Constraints forced by ``∇`` are read off directly; only entries that
    ``∇`` leaves free are enumerated, at most ``bound`` combinations.
    """
    lens = _as_lens(d)
    src, tgt = lens.source, lens.target
    p, s = src.outer, tgt.inner
    check_positions(src.npos, "distributor source")
    fwd: list[set[int]] = [set() for _ in range(p.npos)]
    bwd: list[dict[int, set[int]]] = [dict() for _ in range(p.npos)]
    for i in range(src.npos):
        a, _ = src.decode(i)
        try:
            x_code, back = lens.view(i)
        except CapExceeded:
            continue
        _, gamma = tgt.decode(x_code)
        if gamma:
            fwd[a].add(gamma[0])
        offs = tgt.dir_offsets(x_code)
        for k in range(len(gamma)):
            for dd in range(offs[k + 1] - offs[k]):
                bwd[a].setdefault(dd, set()).add(src.split_dir(i, back[offs[k] + dd])[0])
    per_position = []
    for a in range(p.npos):
        if len(fwd[a]) > 1 or any(len(v) > 1 for v in bwd[a].values()):
            return None
        codes = sorted(fwd[a]) if fwd[a] else range(s.npos)
        options = []
        for c in codes:
            ranges = [sorted(bwd[a][dd]) if dd in bwd[a] else range(p.arity(a)) for dd in range(s.arity(c))]
            options.extend((c, back) for back in itertools.product(*ranges))
        per_position.append(options)
    total = 1
    for opts in per_position:
        total *= len(opts)
    if total > bound:
        raise SearchExhausted(f"{total} candidate φ", bound)
    for choice in itertools.product(*per_position):
        phi = Lens.from_tables(p, s, [c for c, _ in choice], [b for _, b in choice])
        js = verify_jump_structure(lens, phi)
        if js:
            return phi, js
    return None


def distributor_to_json(d: Distributor | Lens) -> dict:
    lens = _as_lens(d)
    out = lens_to_json(lens)
    out["factors"] = {
        "p": poly_to_json(lens.source.outer),
        "q": poly_to_json(lens.source.inner),
        "r": poly_to_json(lens.target.outer),
        "s": poly_to_json(lens.target.inner),
    }
    return out


def distributor_from_json(obj: dict) -> Distributor:
    fac = obj["factors"]
    src = Composite(poly_from_json(fac["p"]), poly_from_json(fac["q"]))
    tgt = Composite(poly_from_json(fac["r"]), poly_from_json(fac["s"]))
    for name, poly in (("source", src), ("target", tgt)):
        if name in obj and tuple(obj[name]["arities"]) != poly.arities:
            raise ShapeMismatch(f"{name} arities disagree with the factors")
    return Distributor(Lens.from_tables(src, tgt, obj["forward"], obj["backward"]))


def is_cartesian_jump(js: JumpStructure) -> bool:
    return js.ok and is_cartesian(js.reconstructed).cartesian
