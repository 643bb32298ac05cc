"""Concrete polynomial universes and their monad structure.

``mk_ufin(cap)`` is the skeletal universe of finite sets ``Fin 0 .. Fin cap``:
its extension is lists of length at most ``cap``, ``σ`` adds sizes and ``π``
multiplies them.  ``mk_uprop()`` is the universe of the two decidable truth
values, whose extension is ``Maybe``.

Under the lexicographic encodings a direction of ``u ◃ u`` at ``(n, γ)``
already *is* its rank in ``Fin(Σ γ)``, and a direction of ``u ⇈ u`` at
``(n, γ)`` already is its rank in ``Fin(Π γ)``, so both backward maps are
identities on ranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import CapExceeded, PreconditionFailed, ShapeMismatch
from .finset import FinSet
from .monoidal import Composite
from .poly import Lens, Poly, Y, apply_lens_extension, eq_lens, is_cartesian, require_same
from .uparrow import UpGen, _lazy_up


@dataclass(frozen=True, eq=False)
class UniversePoly:
    name: str
    poly: Poly
    cap: int
    eta: Lens
    sigma: Lens
    pi: Lens
    uu: Composite = field(repr=False)
    upuu: UpGen = field(repr=False)

    def decode(self, code: int) -> FinSet:
        return FinSet(self.poly.arity(code))

    def with_sigma(self, sigma: Lens) -> "UniversePoly":
        return replace(self, name=self.name + "*", sigma=sigma)

    def with_pi(self, pi: Lens) -> "UniversePoly":
        return replace(self, name=self.name + "*", pi=pi)

    def sigma_domain(self) -> tuple[int, ...]:
        """Positions of ``u ◃ u`` where ``σ`` is defined, in rank order."""
        return tuple(i for i in range(self.uu.npos) if self.sigma.defined(i))


def _arith_universe(name: str, cap: int) -> UniversePoly:
    u = Poly(range(cap + 1))
    uu = Composite(u, u)
    upuu = _lazy_up(u, u)

    def eta_view(_):
        return 1, (0,)

    def sigma_view(i):
        _, gamma = uu.decode(i)
        total = sum(gamma)
        if total > cap:
            raise CapExceeded(i, total, cap)
        return total, tuple(range(total))

    def pi_view(i):
        _, gamma = upuu.decode(i)
        total = math.prod(gamma)
        if total > cap:
            raise CapExceeded(i, total, cap)
        return total, tuple(range(total))

    return UniversePoly(
        name=name,
        poly=u,
        cap=cap,
        eta=Lens(Y, u, eta_view, memo=None),
        sigma=Lens(uu, u, sigma_view),
        pi=Lens(upuu, u, pi_view),
        uu=uu,
        upuu=upuu,
    )


def mk_ufin(cap: int) -> UniversePoly:
    if cap < 1:
        raise ValueError("cap must be at least 1")
    return _arith_universe(f"ufin({cap})", cap)


def mk_uprop() -> UniversePoly:
    """Codes 0 (false, empty) and 1 (true, a point); σ is conjunction, π is implication, both total."""
    return _arith_universe("uprop", 1)


@dataclass(frozen=True)
class PartialFn:
    """A partial map ``Fin(len(values)) ⇀ Fin(codomain)``; ``None`` marks undefined points."""

    values: tuple[int | None, ...]
    codomain: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        for v in self.values:
            if v is not None and not 0 <= v < self.codomain:
                raise ShapeMismatch(f"value {v} outside Fin({self.codomain})")

    @property
    def domain(self) -> int:
        return len(self.values)

    def defined(self, a: int) -> bool:
        return self.values[a] is not None

    def __call__(self, a: int) -> int | None:
        return self.values[a]


def kleisli_compose(f: PartialFn, g: PartialFn) -> PartialFn:
    if f.codomain != g.domain:
        raise ShapeMismatch(f"cannot compose Fin({f.domain}) ⇀ Fin({f.codomain}) with Fin({g.domain}) ⇀ ...")
    return PartialFn(tuple(None if v is None else g(v) for v in f.values), g.codomain)


def to_kleisli(u: UniversePoly, f: PartialFn, a: int) -> tuple[int, tuple[int, ...]]:
    """``f(a)`` as an element of the extension of ``u`` at ``Fin(f.codomain)``."""
    v = f(a)
    if v is None:
        return 0, ()
    # η at Fin(codomain): the element (tt, v) of 𝕪(B) goes to a code with one direction
    return apply_lens_extension(u.eta, f.codomain, (0, (v,)))


def from_kleisli(elem: tuple[int, Sequence[int]]) -> int | None:
    code, h = elem
    if code == 0:
        return None
    if len(h) != 1:
        raise ShapeMismatch(f"{elem!r} is not in the image of a partial function")
    return h[0]


def kleisli_via_monad(u: UniversePoly, f: PartialFn, g: PartialFn) -> PartialFn:
    """Kleisli composite computed as ``μ ∘ M(g) ∘ f`` with ``μ`` the extension of ``σ``."""
    if f.codomain != g.domain:
        raise ShapeMismatch("codomain/domain mismatch")
    out = []
    for a in range(f.domain):
        code, h = to_kleisli(u, f, a)
        inner = [to_kleisli(u, g, b) for b in h]
        pos = u.uu.encode(code, [c for c, _ in inner])
        flat = tuple(x for _, hh in inner for x in hh)
        out.append(from_kleisli(apply_lens_extension(u.sigma, g.codomain, (pos, flat))))
    return PartialFn(tuple(out), g.codomain)


@dataclass(frozen=True)
class UnivalenceReport:
    forward_equal: bool
    full_eq_lens: bool
    discrepancy: tuple[int, int | None] | None = None


def check_weak_univalence(u: UniversePoly, p: Poly, f: Lens, g: Lens) -> UnivalenceReport:
    """Probe uniqueness of classifying maps ``p -> u`` for two Cartesian lenses."""
    for name, lens in (("f", f), ("g", g)):
        require_same(lens.source, p, f"source of {name}")
        require_same(lens.target, u.poly, f"target of {name}")
        if not is_cartesian(lens):
            raise PreconditionFailed(f"{name} is not Cartesian")
    forward_equal = tuple(f.forward) == tuple(g.forward)
    witness = eq_lens(f, g)
    return UnivalenceReport(forward_equal, witness.equal, witness.first_violation)
