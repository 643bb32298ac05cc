import itertools
import json

import pytest
from hypothesis import assume, given, strategies as st

from polyverse.errors import CapExceeded, PositionOverflow, ShapeMismatch
from polyverse.poly import (
    Chart,
    Lens,
    Poly,
    Y,
    apply_lens_extension,
    chart_from_json,
    chart_square_commutes,
    chart_to_json,
    comp_all,
    comp_chart,
    comp_lens,
    eq_lens,
    extension_card,
    extension_enum,
    id_chart,
    id_lens,
    is_cartesian,
    iter_lenses,
    lens_from_json,
    lens_to_json,
    patch_lens,
    poly_from_json,
    poly_to_json,
    position_bound,
    square_violation,
    swap_backward,
)

from category_check import check_category_laws
from oracles import SMALL, extension

polys = st.lists(st.integers(0, 2), min_size=0, max_size=3).map(Poly)


@st.composite
def lenses(draw):
    p, q = draw(polys), draw(polys)
    fw, bw = [], []
    for a in range(p.npos):
        # a position with no directions can only map to one with none
        targets = [c for c in range(q.npos) if p.arity(a) or not q.arity(c)]
        assume(targets)
        c = draw(st.sampled_from(targets))
        fw.append(c)
        bw.append(tuple(draw(st.integers(0, p.arity(a) - 1)) for _ in range(q.arity(c))))
    return Lens.from_tables(p, q, fw, bw)


def test_mk_poly_examples():
    assert Y.arities == (1,) and Y.npos == 1
    maybe = Poly([0, 1])
    assert extension_card(maybe, 5) == 6
    assert Poly([0, 1, 2, 3]).arities == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        Poly([1, -1])


def test_id_lens_examples():
    f = id_lens(Poly([2]))
    assert f.forward == (0,) and f.backward == ((0, 1),)
    empty = id_lens(Poly([]))
    assert empty.forward == () and empty.backward == ()


def test_comp_identities():
    p = Poly([2, 0])
    assert eq_lens(comp_lens(id_lens(p), id_lens(p)), id_lens(p))


def test_comp_rejects_mismatched_endpoints():
    with pytest.raises(ShapeMismatch):
        comp_lens(id_lens(Poly([1])), id_lens(Poly([2])))


def test_eq_lens_examples():
    p = Poly([2])
    assert eq_lens(id_lens(p), id_lens(p))
    swap = Lens.from_tables(p, p, [0], [[1, 0]])
    w = eq_lens(id_lens(p), swap)
    assert not w and w.first_violation == (0, 0)
    with pytest.raises(ShapeMismatch):
        eq_lens(id_lens(p), id_lens(Poly([1])))


def test_is_cartesian_examples():
    assert is_cartesian(id_lens(Poly([2, 3, 0])))
    bang = Lens.from_tables(Poly([2]), Y, [0], [[0]])
    w = is_cartesian(bang)
    assert not w and w.position == 0


def test_extension_examples():
    assert extension_card(Poly([0, 2]), 3) == 10
    for x in range(3):
        assert extension_card(Y, x) == x
    assert extension_card(Poly([0, 1, 2, 3]), 2) == 15


def test_apply_lens_extension_examples():
    bang = Lens.from_tables(Poly([2]), Y, [0], [[0]])
    for i, j in itertools.product(range(3), repeat=2):
        assert apply_lens_extension(bang, 3, (0, (i, j))) == (0, (i,))
    ident = id_lens(Poly([0, 2]))
    for elem in extension_enum(Poly([0, 2]), 2):
        assert apply_lens_extension(ident, 2, elem) == elem
    with pytest.raises(ShapeMismatch):
        apply_lens_extension(bang, 2, (0, (0, 5)))


def test_category_laws_exhaustive():
    rep = check_category_laws()
    assert rep.ok, rep.failures[:5]
    assert rep.lenses == 633 and rep.triples > 4_000_000


def test_iter_lenses_counts():
    # |Lens(p, q)| = Π_a Σ_c arity(a)^arity(c)
    for p, q in itertools.product(SMALL, repeat=2):
        expected = 1
        for a in p.arities:
            expected *= sum(a**c for c in q.arities)
        assert sum(1 for _ in iter_lenses(p, q)) == expected


def test_cartesian_closed_under_comp():
    for p, q, r in itertools.product(SMALL[:7], repeat=3):
        cart_pq = [f for f in iter_lenses(p, q) if is_cartesian(f)]
        cart_qr = [g for g in iter_lenses(q, r) if is_cartesian(g)]
        for f in cart_pq:
            for g in cart_qr:
                assert is_cartesian(comp_lens(f, g))


def test_extension_card_matches_enumeration():
    for arities in itertools.product(range(4), repeat=3):
        p = Poly(arities)
        for x in range(4):
            listed = list(extension_enum(p, x))
            assert listed == extension(arities, x)
            assert extension_card(p, x) == len(listed)


def test_extension_of_composite_lens():
    for p, q, r in itertools.product(SMALL[:7], repeat=3):
        for f in iter_lenses(p, q):
            for g in iter_lenses(q, r):
                fg = comp_lens(f, g)
                for elem in extension_enum(p, 2):
                    step = apply_lens_extension(f, 2, elem)
                    assert apply_lens_extension(fg, 2, elem) == apply_lens_extension(g, 2, step)


def test_extension_naturality():
    # relabel the carrier with every function s: Fin x -> Fin y
    for p, q in itertools.product(SMALL, repeat=2):
        for f in iter_lenses(p, q):
            for x, y in itertools.product(range(3), repeat=2):
                for s in itertools.product(range(y), repeat=x):
                    for a, h in extension_enum(p, x):
                        b, k = apply_lens_extension(f, x, (a, h))
                        assert apply_lens_extension(f, y, (a, tuple(s[v] for v in h))) == (b, tuple(s[v] for v in k))


def test_identity_square_commutes():
    for p, q in itertools.product(SMALL[:7], repeat=2):
        for f in iter_lenses(p, q):
            assert chart_square_commutes(f, f, id_chart(p), id_chart(q))


def _charts(p, q):
    per = []
    for a in range(p.npos):
        per.append([(c, d) for c in range(q.npos) for d in itertools.product(range(q.arity(c)), repeat=p.arity(a))])
    for choice in itertools.product(*per):
        yield Chart.from_tables(p, q, [c for c, _ in choice], [d for _, d in choice])


def test_square_mutation_detected():
    p = Poly([2])
    f = Lens.from_tables(p, p, [0], [[1, 0]])
    left = right = Chart.from_tables(p, p, [0], [[1, 0]])
    assert chart_square_commutes(f, f, left, right)
    broken = Chart.from_tables(p, p, [0], [[0, 0]])
    assert square_violation(f, f, broken, right) == ("direction", 0, 1)
    assert not chart_square_commutes(f, f, left, broken)


def test_square_brute_force():
    # compare the predicate with a direct reading of both diagrams
    p, q = Poly([1, 2]), Poly([2])
    for top in iter_lenses(p, q):
        for bottom in iter_lenses(p, q):
            for left in _charts(p, p):
                right = id_chart(q)
                ok = True
                for a in range(p.npos):
                    if right.on_pos[top.forward[a]] != bottom.forward[left.on_pos[a]]:
                        ok = False
                        continue
                    for d in range(q.arity(top.forward[a])):
                        lhs = left.on_dir[a][top.backward[a][d]]
                        rhs = bottom.backward[left.on_pos[a]][right.on_dir[top.forward[a]][d]]
                        ok &= lhs == rhs
                assert chart_square_commutes(top, bottom, left, right) == ok


def test_comp_chart_is_unital():
    p, q = Poly([1, 2]), Poly([2, 0])
    for c in _charts(p, q):
        assert comp_chart(id_chart(p), c).on_dir == c.on_dir
        assert comp_chart(c, id_chart(q)).on_pos == c.on_pos


def test_chart_rejects_bad_tables():
    with pytest.raises(Exception):
        Chart.from_tables(Poly([2]), Poly([1]), [0], [[0, 1]])


def test_lens_rejects_bad_tables():
    with pytest.raises(Exception):
        Lens.from_tables(Poly([1]), Poly([2]), [0], [[0, 1]])
    with pytest.raises(Exception):
        Lens.from_tables(Poly([1]), Poly([2]), [1], [[0, 0]])


def test_partial_lens():
    p = Poly([1, 1])
    f = Lens.from_tables(p, Y, [0, None], [[0], None])
    assert f.defined(0) and not f.defined(1)
    with pytest.raises(CapExceeded):
        f.view(1)
    assert is_cartesian(f)
    assert not eq_lens(f, Lens.from_tables(p, Y, [0, 0], [[0], [0]]))
    assert eq_lens(f, f.tabulate())


def test_patch_and_swap():
    p = Poly([2])
    f = swap_backward(id_lens(p), 0, 0, 1)
    assert f.backward == ((1, 0),)
    g = patch_lens(f, 0, back=[0, 1])
    assert eq_lens(g, id_lens(p))
    assert eq_lens(comp_all(f, f), id_lens(p))


def test_position_bound():
    with position_bound(10):
        with pytest.raises(PositionOverflow):
            id_lens(Poly([1] * 11)).forward


def test_json_round_trip():
    for p, q in itertools.product(SMALL[:7], repeat=2):
        assert poly_from_json(json.loads(json.dumps(poly_to_json(p)))) == p
        for f in iter_lenses(p, q):
            obj = json.loads(json.dumps(lens_to_json(f)))
            assert set(obj) >= {"forward", "backward"}
            assert eq_lens(lens_from_json(obj), f)
        for c in _charts(p, q):
            obj = json.loads(json.dumps(chart_to_json(c)))
            back = chart_from_json(obj)
            assert back.on_pos == c.on_pos and back.on_dir == c.on_dir


@given(lenses())
def test_unit_law_random(f):
    assert eq_lens(comp_lens(id_lens(f.source), f), f)
    assert eq_lens(comp_lens(f, id_lens(f.target)), f)
