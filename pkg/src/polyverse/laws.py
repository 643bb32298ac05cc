"""Monad and distributive-law diagrams on a polynomial universe.

Every diagram side is assembled from the generic constructors in
:mod:`polyverse.monoidal`, :mod:`polyverse.uparrow` and
:mod:`polyverse.distributor`; nothing here is specific to a universe.

Inputs are visited in increasing rank order, so the first violation found
is the least one.  Inputs where either side is undefined (a composite code
exceeds the cap) are skipped and counted.  For sources containing a
``u ◃ u`` factor that is later fed to ``σ``, that factor only ranges over
positions where ``σ`` is defined: everywhere else the ``σ``-side is
undefined, so nothing is lost.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .distributor import (
    DistEqWitness,
    distr_comp1,
    distr_comp2,
    distr_id1,
    distr_id2,
    distr_law_candidate,
    distr_lens,
    eq_distributor,
    eq_distributor_upto_iso,
    nabla,
)
from .errors import CapExceeded
from .monoidal import Composite, assoc, lens_compose_prod, unitl, unitr
from .poly import Lens, Y, comp_all, comp_lens, id_lens
from .uparrow import up_curry_simple, up_distr_simple, up_gen_lens, up_lens, up_to_unit, up_unit_src
from .universes import UniversePoly

MONAD_LAWS = ("M1L", "M1R", "M2")
DISTRIBUTIVE_LAWS = ("DL1", "DL2", "DL3", "DL4")
ALL_LAWS = MONAD_LAWS + DISTRIBUTIVE_LAWS
MODES = ("strict", "upto_iso")


@dataclass
class LawReport:
    law: str
    mode: str
    status: str
    counterexample: dict | None = None
    checked: int = 0
    skipped: int = field(default=0, compare=False)

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "mode": self.mode,
            "status": self.status,
            "counterexample": self.counterexample,
            "checked": self.checked,
        }

    @property
    def holds(self) -> bool:
        return self.status == "holds"


@dataclass
class Diagram:
    """Two parallel sides and the inputs on which to compare them."""

    law: str
    left: Lens
    right: Lens
    positions: Callable[[], Iterable[int]]
    distributive: bool


def _id(p):
    return id_lens(p)


def _monad_diagram(u: UniversePoly, law: str) -> Diagram:
    U, eta, sigma = u.poly, u.eta, u.sigma
    if law == "M1L":
        left = unitl(U)
        right = comp_lens(lens_compose_prod(eta, _id(U)), sigma)
        return Diagram(law, left, right, lambda: range(left.source.npos), False)
    if law == "M1R":
        left = unitr(U)
        right = comp_lens(lens_compose_prod(_id(U), eta), sigma)
        return Diagram(law, left, right, lambda: range(left.source.npos), False)
    if law == "M2":
        left = comp_all(assoc(U, U, U), lens_compose_prod(_id(U), sigma), sigma)
        right = comp_lens(lens_compose_prod(sigma, _id(U)), sigma)
        src = left.source
        return Diagram(law, left, right, lambda: _outer_restricted(src, u.sigma_domain()), False)
    raise ValueError(f"unknown monad law {law!r}")


def _outer_restricted(src: Composite, outer_domain) -> Iterator[int]:
    """Positions of ``src`` whose outer component lies in ``outer_domain``, by rank."""
    m = src.inner.npos
    for x in outer_domain:
        for gamma in itertools.product(range(m), repeat=src.outer.arity(x)):
            yield src.encode(x, gamma)


def _inner_restricted(src: Composite, inner_domain) -> Iterator[int]:
    """Positions of ``src`` whose inner choices all lie in ``inner_domain``, by rank."""
    for a in range(src.outer.npos):
        for gamma in itertools.product(inner_domain, repeat=src.outer.arity(a)):
            yield src.encode(a, gamma)


def _distributive_diagram(u: UniversePoly, law: str) -> Diagram:
    U, eta, sigma = u.poly, u.eta, u.sigma
    uu = u.uu
    nab = distr_law_candidate(u)
    iU = _id(U)
    if law == "DL1":
        left = distr_lens(iU, iU, _id(uu), sigma, distr_comp1(nab, nab))
        right = distr_lens(iU, iU, sigma, iU, nab)
        src = left.source
        return Diagram(law, left.lens, right.lens, lambda: _inner_restricted(src, u.sigma_domain()), True)
    if law == "DL2":
        left = distr_lens(_id(uu), sigma, iU, iU, distr_comp2(nab, nab))
        right = distr_lens(sigma, iU, iU, iU, nab)
        src = left.source
        return Diagram(law, left.lens, right.lens, lambda: _outer_restricted(src, u.sigma_domain()), True)
    if law == "DL3":
        left = distr_lens(iU, iU, _id(Y), eta, distr_id1(U))
        right = distr_lens(iU, iU, eta, iU, nab)
        return Diagram(law, left.lens, right.lens, lambda: range(left.source.npos), True)
    if law == "DL4":
        left = distr_lens(_id(Y), eta, iU, iU, distr_id2(U))
        right = distr_lens(eta, iU, iU, iU, nab)
        return Diagram(law, left.lens, right.lens, lambda: range(left.source.npos), True)
    raise ValueError(f"unknown distributive law {law!r}")


def diagram(u: UniversePoly, law: str) -> Diagram:
    if law in MONAD_LAWS:
        return _monad_diagram(u, law)
    return _distributive_diagram(u, law)


def full_positions(d: Diagram) -> range:
    """Every source position, without the σ-domain restriction."""
    return range(d.left.source.npos)


def eq_lens_upto_iso(f: Lens, g: Lens, positions: Iterable[int], skip_undefined: bool = True) -> DistEqWitness:
    """Lenses into a universe, identifying equipotent codes and reordering directions."""
    checked = skipped = 0
    for i in positions:
        v1, v2 = _try(f, i), _try(g, i)
        if v1 is None or v2 is None:
            if v1 is v2 or skip_undefined:
                skipped += 1
                continue
            return DistEqWitness(False, {"position": i, "input": f.source.describe(i), "component": "defined"}, checked, skipped)
        checked += 1
        if f.target.arity(v1[0]) != g.target.arity(v2[0]):
            return DistEqWitness(False, {"position": i, "input": f.source.describe(i), "component": "first"}, checked, skipped)
        if Counter(v1[1]) != Counter(v2[1]):
            return DistEqWitness(False, {"position": i, "input": f.source.describe(i), "component": "fibers"}, checked, skipped)
    return DistEqWitness(True, None, checked, skipped)


def eq_lens_strict(f: Lens, g: Lens, positions: Iterable[int], skip_undefined: bool = True) -> DistEqWitness:
    checked = skipped = 0
    for i in positions:
        v1, v2 = _try(f, i), _try(g, i)
        if v1 is None or v2 is None:
            if v1 is v2 or skip_undefined:
                skipped += 1
                continue
            return DistEqWitness(False, {"position": i, "input": f.source.describe(i), "component": "defined"}, checked, skipped)
        checked += 1
        if v1[0] != v2[0]:
            return DistEqWitness(
                False,
                {"position": i, "input": f.source.describe(i), "component": "first", "left": v1[0], "right": v2[0]},
                checked,
                skipped,
            )
        for d, (x, y) in enumerate(zip(v1[1], v2[1])):
            if x != y:
                return DistEqWitness(
                    False,
                    {"position": i, "input": f.source.describe(i), "component": "backward", "direction": d, "left": x, "right": y},
                    checked,
                    skipped,
                )
    return DistEqWitness(True, None, checked, skipped)


def _try(f: Lens, i: int):
    try:
        return f.view(i)
    except CapExceeded:
        return None


def compare(d: Diagram, mode: str, positions: Iterable[int] | None = None) -> DistEqWitness:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    positions = d.positions() if positions is None else positions
    if d.distributive:
        check = eq_distributor if mode == "strict" else eq_distributor_upto_iso
        return check(d.left, d.right, positions=positions, skip_undefined=True)
    check = eq_lens_strict if mode == "strict" else eq_lens_upto_iso
    return check(d.left, d.right, positions)


def check_law(u: UniversePoly, law: str, mode: str = "strict") -> LawReport:
    if law not in ALL_LAWS:
        raise ValueError(f"unknown law {law!r}")
    witness = compare(diagram(u, law), mode)
    if witness.equal:
        status = "cap_exceeded" if witness.checked == 0 and witness.skipped > 0 else "holds"
    else:
        status = "fails"
    return LawReport(law, mode, status, witness.violation, witness.checked, witness.skipped)


def check_M1(u: UniversePoly, mode: str = "strict") -> tuple[LawReport, LawReport]:
    return check_law(u, "M1L", mode), check_law(u, "M1R", mode)


def check_M2(u: UniversePoly, mode: str = "strict") -> LawReport:
    return check_law(u, "M2", mode)


def check_DL(u: UniversePoly, k: int, mode: str = "strict") -> LawReport:
    return check_law(u, f"DL{k}", mode)


def reverify(u: UniversePoly, law: str, mode: str, counterexample: dict) -> bool:
    """Rebuild both sides from scratch and confirm they disagree at the recorded input."""
    fresh = diagram(u, law)
    i = counterexample["position"]
    if fresh.left.source.describe(i) != counterexample["input"]:
        return False
    return not compare(fresh, mode, positions=[i]).equal


def search_law_counterexample(u: UniversePoly, law: str, mode: str = "strict") -> dict | None:
    """Least violating input in rank order, re-checked before it is returned."""
    report = check_law(u, law, mode)
    if report.status != "fails":
        return None
    if not reverify(u, law, mode, report.counterexample):
        raise AssertionError(f"counterexample for {law} did not re-verify")
    return report.counterexample


def induced_sides(u: UniversePoly, law: str) -> tuple[Lens, Lens]:
    """The ⇈-side lenses whose ∇ images are the two sides of a distributive-law diagram."""
    U, eta, sigma, pi = u.poly, u.eta, u.sigma, u.pi
    iU, iY, iuu = _id(U), _id(Y), _id(u.uu)
    if law == "DL1":
        left = comp_all(up_distr_simple(U, U, U), lens_compose_prod(pi, pi), sigma)
        right = comp_lens(up_gen_lens(iU, iU, iU, iU, sigma), pi)
    elif law == "DL2":
        left = comp_all(
            up_gen_lens(sigma, iuu, iuu, sigma, iU),
            up_curry_simple(U, U, U),
            up_lens(iU, iU, pi),
            pi,
        )
        right = comp_lens(up_gen_lens(sigma, iU, sigma, iU, iU), pi)
    elif law == "DL3":
        left = comp_lens(up_to_unit(U), eta)
        right = comp_lens(up_lens(iU, iU, eta), pi)
    elif law == "DL4":
        left = comp_lens(up_gen_lens(eta, iY, iY, eta, iU), up_unit_src(U))
        right = comp_lens(up_gen_lens(eta, iU, eta, iU, iU), pi)
    else:
        raise ValueError(f"no induced diagram for {law!r}")
    return left, right


def check_induced(u: UniversePoly, law: str) -> tuple[DistEqWitness, DistEqWitness]:
    """∇ of each induced side against the corresponding diagram side, strictly."""
    d = diagram(u, law)
    jl, jr = induced_sides(u, law)
    positions = list(d.positions())
    return (
        eq_distributor(nabla(jl), d.left, positions=positions),
        eq_distributor(nabla(jr), d.right, positions=positions),
    )
