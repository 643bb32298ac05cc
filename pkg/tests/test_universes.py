import itertools

import pytest

from polyverse.errors import CapExceeded, PreconditionFailed, ShapeMismatch
from polyverse.finset import is_bijection, rank_pi, rank_sigma
from polyverse.poly import Lens, Poly, extension_card, is_cartesian
from polyverse.universes import (
    PartialFn,
    check_weak_univalence,
    from_kleisli,
    kleisli_compose,
    kleisli_via_monad,
    mk_ufin,
    mk_uprop,
    to_kleisli,
)

from oracles import compose_partial, partial_functions
from probes import univalence_probe


def test_ufin_shape():
    u = mk_ufin(3)
    assert u.poly.arities == (0, 1, 2, 3)
    assert [len(u.decode(c)) for c in range(4)] == [0, 1, 2, 3]
    assert u.eta.view(0) == (1, (0,)) and len(u.decode(u.eta.fwd(0))) == 1
    with pytest.raises(ValueError):
        mk_ufin(0)


def test_sigma_and_pi_examples():
    u = mk_ufin(3)
    assert u.sigma.fwd(u.uu.encode(2, (1, 2))) == 3
    with pytest.raises(CapExceeded) as err:
        u.sigma.view(u.uu.encode(2, (2, 2)))
    assert err.value.position == u.uu.encode(2, (2, 2))
    big = mk_ufin(12)
    i = big.upuu.encode(2, (3, 4))
    assert big.pi.fwd(i) == 12
    assert big.upuu.unrank_dir(i, big.pi.bwd(i, 5)) == (1, 1)


def test_sigma_pi_cartesian_where_defined():
    for cap in (1, 2, 3, 4):
        u = mk_ufin(cap)
        assert is_cartesian(u.eta)
        assert is_cartesian(u.sigma)
        domain = [i for i in range(u.upuu.npos) if u.pi.defined(i)]
        assert is_cartesian(u.pi, domain)


def test_sigma_backward_is_pairing():
    # direction k of Fin(Σ γ) is the pair (b, o) with rank_sigma(γ, b, o) = k
    u = mk_ufin(4)
    for i in u.sigma_domain():
        n, gamma = u.uu.decode(i)
        back = u.sigma.view(i)[1]
        pairs = [u.uu.split_dir(i, e) for e in back]
        assert [rank_sigma(gamma, b, o) for b, o in pairs] == list(range(sum(gamma)))


def test_pi_backward_is_application():
    u = mk_ufin(4)
    for i in range(u.upuu.npos):
        if not u.pi.defined(i):
            continue
        n, gamma = u.upuu.decode(i)
        back = u.pi.view(i)[1]
        tuples = [u.upuu.unrank_dir(i, e) for e in back]
        assert [rank_pi(gamma, t) for t in tuples] == list(range(len(back)))
        assert is_bijection(back, len(back), u.upuu.arity(i))


def test_uprop():
    u = mk_uprop()
    assert u.poly.arities == (0, 1)
    for x in range(5):
        assert extension_card(u.poly, x) == 1 + x
    assert u.sigma.fwd(u.uu.encode(1, (0,))) == 0
    assert u.sigma.fwd(u.uu.encode(1, (1,))) == 1
    assert u.pi.fwd(u.upuu.encode(0, ())) == 1
    assert all(u.sigma.defined(i) for i in range(u.uu.npos))
    assert all(u.pi.defined(i) for i in range(u.upuu.npos))


def test_partial_fn():
    f = PartialFn([None, 2], 3)
    assert f.domain == 2 and not f.defined(0) and f(1) == 2
    with pytest.raises(ShapeMismatch):
        PartialFn([3], 3)
    with pytest.raises(ShapeMismatch):
        kleisli_compose(PartialFn([0], 1), PartialFn([0, 0], 1))


def test_kleisli_examples():
    u = mk_uprop()
    f = PartialFn([1, 2, 0], 3)
    g = PartialFn([2, 0, 1], 3)
    assert kleisli_compose(f, g).values == (0, 1, 2)
    nowhere = PartialFn([None] * 3, 3)
    assert kleisli_compose(nowhere, g).values == (None,) * 3
    assert kleisli_via_monad(u, nowhere, g).values == (None,) * 3
    assert to_kleisli(u, f, 1) == (1, (2,)) and to_kleisli(u, nowhere, 0) == (0, ())
    assert from_kleisli((1, (2,))) == 2 and from_kleisli((0, ())) is None


def test_kleisli_exhaustive():
    u = mk_uprop()
    pairs = 0
    for a, b, c in itertools.product(range(4), repeat=3):
        for fv in partial_functions(a, b):
            for gv in partial_functions(b, c):
                f, g = PartialFn(fv, b), PartialFn(gv, c)
                expected = compose_partial(fv, gv)
                assert kleisli_compose(f, g).values == expected
                assert kleisli_via_monad(u, f, g).values == expected
                pairs += 1
    assert pairs > 4096


def test_kleisli_total_subset_at_three():
    u = mk_uprop()
    total = [t for t in partial_functions(3, 3) if None not in t]
    assert len(total) ** 2 == 729
    for fv, gv in itertools.product(total, repeat=2):
        got = kleisli_via_monad(u, PartialFn(fv, 3), PartialFn(gv, 3)).values
        assert got == tuple(gv[v] for v in fv)


def test_univalence_examples():
    u = mk_ufin(4)
    p = Poly([2])
    f = Lens.from_tables(p, u.poly, [2], [[0, 1]])
    g = Lens.from_tables(p, u.poly, [2], [[1, 0]])
    rep = check_weak_univalence(u, p, f, g)
    assert rep.forward_equal and not rep.full_eq_lens and rep.discrepancy == (0, 0)
    assert check_weak_univalence(u, p, f, f).full_eq_lens
    bad = Lens.from_tables(p, u.poly, [1], [[0]])
    with pytest.raises(PreconditionFailed):
        check_weak_univalence(u, p, f, bad)


def test_univalence_probe():
    pairs, forward_failures, full_failures = univalence_probe()
    assert pairs > 0 and forward_failures == 0 and full_failures > 0
