"""Polynomials, lenses and charts over canonical finite sets.

A polynomial is a vector of arities: position ``i`` stands for the
representable ``y^arities[i]``.  Composite constructions (``p ◃ q``,
``p ⊗ q``, ``p ⇈ q``) subclass :class:`Poly` and compute arities on demand,
so they can be far larger than anything that could be tabulated.

Lenses and charts are evaluated one source position at a time through
``view(a)``, which returns the target position together with the
direction table at ``a``.  Tables can be materialized with ``forward`` /
``backward`` (or ``on_pos`` / ``on_dir``) when the source is small enough.
"""

from __future__ import annotations

import itertools
import os
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import CapExceeded, IndexOutOfRange, PositionOverflow, ShapeMismatch
from .finset import is_bijection

DEFAULT_MAX_POSITIONS = 10**6
_bound_override: int | None = None


def max_positions() -> int:
    if _bound_override is not None:
        return _bound_override
    env = os.environ.get("POLYVERSE_MAX_POSITIONS")
    return int(env) if env else DEFAULT_MAX_POSITIONS


@contextmanager
def position_bound(n: int):
    """Temporarily override the materialization bound."""
    global _bound_override
    old, _bound_override = _bound_override, n
    try:
        yield
    finally:
        _bound_override = old


def check_positions(count: int, what: str = "polynomial") -> None:
    bound = max_positions()
    if count > bound:
        raise PositionOverflow(count, bound, what)


class Poly:
    """``sum_i y^arities[i]`` with canonical finite positions and directions."""

    def __init__(self, arities: Iterable[int]):
        arities = tuple(int(a) for a in arities)
        if any(a < 0 for a in arities):
            raise ValueError(f"negative arity in {arities}")
        self._arities = arities

    @property
    def npos(self) -> int:
        return len(self._arities)

    def arity(self, i: int) -> int:
        if not 0 <= i < len(self._arities):
            raise IndexOutOfRange(f"position {i} outside Fin({len(self._arities)})")
        return self._arities[i]

    @property
    def arities(self) -> tuple[int, ...]:
        return self._arities

    @property
    def key(self) -> tuple:
        return ("poly", self._arities)

    def describe(self, i: int) -> Any:
        return i

    def positions(self) -> range:
        return range(self.npos)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return same_shape(self, other)

    def __hash__(self):
        return hash(self.npos)

    def __repr__(self):
        return f"Poly({list(self._arities)})"


class _Derived(Poly):
    """Base for composite polynomials whose arities are computed lazily."""

    def __init__(self):
        self._flat: tuple[int, ...] | None = None
        self._key: tuple | None = None

    @property
    def arities(self) -> tuple[int, ...]:
        if self._flat is None:
            check_positions(self.npos, type(self).__name__)
            self._flat = tuple(self.arity(i) for i in range(self.npos))
        return self._flat

    def _make_key(self) -> tuple:
        raise NotImplementedError

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = self._make_key()
        return self._key


Y = Poly([1])


def same_shape(p: Poly, q: Poly) -> bool:
    if p is q:
        return True
    if p.npos != q.npos:
        return False
    if p.key == q.key:
        return True
    return p.arities == q.arities


def require_same(p: Poly, q: Poly, what: str = "polynomials") -> None:
    if not same_shape(p, q):
        raise ShapeMismatch(f"{what} differ: {p!r} vs {q!r}")


View = tuple[int, tuple[int, ...]]


class Lens:
    """A natural transformation ``source -> target``.

    ``view(a)`` returns ``(f a, back)`` where ``back[d]`` is the source
    direction at ``a`` that target direction ``d`` at ``f a`` pulls back
    to.  A view may raise :class:`CapExceeded` where the lens is
    undefined (truncated universes).
    """

    def __init__(self, source: Poly, target: Poly, view: Callable[[int], View], memo: int | None = 4096):
        self.source = source
        self.target = target
        self._view = lru_cache(maxsize=memo)(view) if memo else view
        self._tables: tuple[tuple, tuple] | None = None
        self._key: tuple | None = None

    @classmethod
    def from_tables(
        cls,
        source: Poly,
        target: Poly,
        forward: Sequence[int | None],
        backward: Sequence[Sequence[int] | None],
        validate: bool = True,
    ) -> "Lens":
        forward = tuple(forward)
        backward = tuple(None if b is None else tuple(b) for b in backward)
        if validate:
            _validate_tables(source, target, forward, backward, covariant=False)

        def view(a: int) -> View:
            if not 0 <= a < len(forward):
                raise IndexOutOfRange(f"position {a} outside Fin({len(forward)})")
            fa = forward[a]
            if fa is None:
                raise CapExceeded(a)
            return fa, backward[a]

        lens = cls(source, target, view, memo=None)
        lens._tables = (forward, backward)
        return lens

    def view(self, a: int) -> View:
        return self._view(a)

    def fwd(self, a: int) -> int:
        return self._view(a)[0]

    def bwd(self, a: int, d: int) -> int:
        return self._view(a)[1][d]

    def defined(self, a: int) -> bool:
        try:
            self._view(a)
        except CapExceeded:
            return False
        return True

    def _tabulate(self) -> tuple[tuple, tuple]:
        if self._tables is None:
            check_positions(self.source.npos, "lens source")
            fw, bw = [], []
            for a in range(self.source.npos):
                try:
                    fa, back = self._view(a)
                except CapExceeded:
                    fw.append(None)
                    bw.append(None)
                else:
                    fw.append(fa)
                    bw.append(tuple(back))
            self._tables = (tuple(fw), tuple(bw))
        return self._tables

    @property
    def forward(self) -> tuple[int | None, ...]:
        return self._tabulate()[0]

    @property
    def backward(self) -> tuple[tuple[int, ...] | None, ...]:
        return self._tabulate()[1]

    def tabulate(self) -> "Lens":
        """Table-backed copy; cheap to query repeatedly."""
        fw, bw = self._tabulate()
        return Lens.from_tables(self.source, self.target, fw, bw, validate=False)

    def validate(self) -> "Lens":
        _validate_tables(self.source, self.target, self.forward, self.backward, covariant=False)
        return self

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = ("lens", self.source.key, self.target.key) + self._tabulate()
        return self._key

    def __repr__(self):
        return f"Lens({self.source!r} -> {self.target!r})"


class Chart:
    """A commuting square of display maps: positions and directions both map forward.

    ``view(a)`` returns ``(f a, on_dir)`` with ``on_dir[b]`` the target
    direction at ``f a`` hit by source direction ``b``.
    """

    def __init__(self, source: Poly, target: Poly, view: Callable[[int], View], memo: int | None = 4096):
        self.source = source
        self.target = target
        self._view = lru_cache(maxsize=memo)(view) if memo else view
        self._tables: tuple[tuple, tuple] | None = None

    @classmethod
    def from_tables(cls, source: Poly, target: Poly, on_pos, on_dir, validate: bool = True) -> "Chart":
        on_pos = tuple(on_pos)
        on_dir = tuple(tuple(t) for t in on_dir)
        if validate:
            _validate_tables(source, target, on_pos, on_dir, covariant=True)
        chart = cls(source, target, lambda a: (on_pos[a], on_dir[a]), memo=None)
        chart._tables = (on_pos, on_dir)
        return chart

    def view(self, a: int) -> View:
        return self._view(a)

    def _tabulate(self):
        if self._tables is None:
            check_positions(self.source.npos, "chart source")
            views = [self._view(a) for a in range(self.source.npos)]
            self._tables = (tuple(v[0] for v in views), tuple(tuple(v[1]) for v in views))
        return self._tables

    @property
    def on_pos(self) -> tuple[int, ...]:
        return self._tabulate()[0]

    @property
    def on_dir(self) -> tuple[tuple[int, ...], ...]:
        return self._tabulate()[1]

    def __repr__(self):
        return f"Chart({self.source!r} -> {self.target!r})"


def _validate_tables(source, target, first, second, covariant: bool) -> None:
    if len(first) != source.npos or len(second) != source.npos:
        raise ShapeMismatch(f"tables cover {len(first)} positions, source has {source.npos}")
    for a, fa in enumerate(first):
        if fa is None:
            if second[a] is not None:
                raise ShapeMismatch(f"undefined position {a} carries a direction table")
            continue
        if not 0 <= fa < target.npos:
            raise IndexOutOfRange(f"position {a} maps to {fa}, outside Fin({target.npos})")
        table = second[a]
        if covariant:
            dom, cod = source.arity(a), target.arity(fa)
        else:
            dom, cod = target.arity(fa), source.arity(a)
        if table is None or len(table) != dom:
            raise ShapeMismatch(f"direction table at {a} must have {dom} entries")
        for d, v in enumerate(table):
            if not 0 <= v < cod:
                raise IndexOutOfRange(f"direction table at {a}: entry {d} = {v} outside Fin({cod})")


def id_lens(p: Poly) -> Lens:
    return Lens(p, p, lambda a: (a, tuple(range(p.arity(a)))), memo=None)


def comp_lens(f: Lens, g: Lens) -> Lens:
    """Diagrammatic composite: first ``f``, then ``g``."""
    require_same(f.target, g.source, "composable lens endpoints")

    def view(a: int) -> View:
        b, fb = f.view(a)
        c, gb = g.view(b)
        return c, tuple(fb[d] for d in gb)

    return Lens(f.source, g.target, view)


def comp_all(*lenses: Lens) -> Lens:
    out = lenses[0]
    for lens in lenses[1:]:
        out = comp_lens(out, lens)
    return out


def patch_lens(lens: Lens, a: int, fwd: int | None = None, back: Sequence[int] | None = None) -> Lens:
    """Copy of ``lens`` with its view at position ``a`` replaced (fault injection)."""

    def view(x: int) -> View:
        if x != a:
            return lens.view(x)
        fa, fb = lens.view(x)
        return (fa if fwd is None else fwd), (tuple(fb) if back is None else tuple(back))

    return Lens(lens.source, lens.target, view)


def swap_backward(lens: Lens, a: int, d1: int, d2: int) -> Lens:
    back = list(lens.view(a)[1])
    back[d1], back[d2] = back[d2], back[d1]
    return patch_lens(lens, a, back=back)


@dataclass(frozen=True)
class LensEqWitness:
    equal: bool
    first_violation: tuple[int, int | None] | None = None

    def __bool__(self):
        return self.equal


def eq_lens(f: Lens, g: Lens) -> LensEqWitness:
    """Pointwise equality of forward maps, then of backward tables.

    Positions where both lenses are undefined count as agreeing.
    """
    require_same(f.source, g.source, "lens sources")
    require_same(f.target, g.target, "lens targets")
    for a in range(f.source.npos):
        fv = _try_view(f, a)
        gv = _try_view(g, a)
        if fv is None or gv is None:
            if fv is not gv:
                return LensEqWitness(False, (a, None))
            continue
        if fv[0] != gv[0]:
            return LensEqWitness(False, (a, None))
        for d, (x, y) in enumerate(zip(fv[1], gv[1])):
            if x != y:
                return LensEqWitness(False, (a, d))
    return LensEqWitness(True)


def _try_view(lens, a):
    try:
        return lens.view(a)
    except CapExceeded:
        return None


@dataclass(frozen=True)
class CartesianWitness:
    cartesian: bool
    position: int | None = None

    def __bool__(self):
        return self.cartesian


def is_cartesian(f: Lens, positions: Iterable[int] | None = None) -> CartesianWitness:
    """Every defined backward map is a bijection."""
    if positions is None:
        check_positions(f.source.npos, "lens source")
        positions = range(f.source.npos)
    for a in positions:
        v = _try_view(f, a)
        if v is None:
            continue
        if not is_bijection(v[1], len(v[1]), f.source.arity(a)):
            return CartesianWitness(False, a)
    return CartesianWitness(True)


def iter_lenses(p: Poly, q: Poly) -> Iterator[Lens]:
    """Every lens ``p -> q``, forward-major lexicographic order."""
    per_position = []
    for a in range(p.npos):
        options = []
        for c in range(q.npos):
            for back in itertools.product(range(p.arity(a)), repeat=q.arity(c)):
                options.append((c, back))
        per_position.append(options)
    for choice in itertools.product(*per_position):
        yield Lens.from_tables(p, q, [c for c, _ in choice], [b for _, b in choice], validate=False)


def id_chart(p: Poly) -> Chart:
    return Chart(p, p, lambda a: (a, tuple(range(p.arity(a)))), memo=None)


def comp_chart(f: Chart, g: Chart) -> Chart:
    require_same(f.target, g.source, "composable chart endpoints")

    def view(a: int) -> View:
        b, fd = f.view(a)
        c, gd = g.view(b)
        return c, tuple(gd[x] for x in fd)

    return Chart(f.source, g.target, view)


def square_violation(top: Lens, bottom: Lens, left: Chart, right: Chart) -> tuple | None:
    """First failure of the lens/chart square, or ``None`` when it commutes.

    Positions where the top lens is undefined are skipped.  Lenses run horizontally (``top: P -> Q``, ``bottom: P' -> Q'``), charts
    vertically (``left: P -> P'``, ``right: Q -> Q'``).
    """
    require_same(top.source, left.source, "square corner P")
    require_same(top.target, right.source, "square corner Q")
    require_same(left.target, bottom.source, "square corner P'")
    require_same(right.target, bottom.target, "square corner Q'")
    for a in range(top.source.npos):
        v = _try_view(top, a)
        if v is None:
            continue
        qa, top_back = v
        pa2, left_dir = left.view(a)
        q2, right_dir = right.view(qa)
        q2_, bottom_back = bottom.view(pa2)
        if q2 != q2_:
            return ("position", a)
        for d in range(len(top_back)):
            if left_dir[top_back[d]] != bottom_back[right_dir[d]]:
                return ("direction", a, d)
    return None


def chart_square_commutes(top: Lens, bottom: Lens, left: Chart, right: Chart) -> bool:
    return square_violation(top, bottom, left, right) is None


def extension_card(p: Poly, x: int) -> int:
    """``|p(X)|`` for ``|X| = x``."""
    return sum(x**n for n in p.arities)


def extension_enum(p: Poly, x: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    for a in range(p.npos):
        for h in itertools.product(range(x), repeat=p.arity(a)):
            yield a, h


def apply_lens_extension(f: Lens, x: int, elem: tuple[int, Sequence[int]]) -> tuple[int, tuple[int, ...]]:
    """The component at ``X = Fin(x)`` of the natural transformation ``f`` denotes."""
    a, h = elem
    if len(h) != f.source.arity(a) or any(not 0 <= v < x for v in h):
        raise ShapeMismatch(f"{elem!r} is not an element of the extension at {x}")
    fa, back = f.view(a)
    return fa, tuple(h[b] for b in back)


def poly_to_json(p: Poly) -> dict:
    return {"arities": list(p.arities)}


def poly_from_json(obj) -> Poly:
    if isinstance(obj, list):
        return Poly(obj)
    return Poly(obj["arities"])


def lens_to_json(f: Lens) -> dict:
    return {
        "source": poly_to_json(f.source),
        "target": poly_to_json(f.target),
        "forward": list(f.forward),
        "backward": [None if b is None else list(b) for b in f.backward],
    }


def lens_from_json(obj: dict, source: Poly | None = None, target: Poly | None = None) -> Lens:
    source = source if source is not None else poly_from_json(obj["source"])
    target = target if target is not None else poly_from_json(obj["target"])
    return Lens.from_tables(source, target, obj["forward"], obj["backward"])


def chart_to_json(f: Chart) -> dict:
    return {
        "source": poly_to_json(f.source),
        "target": poly_to_json(f.target),
        "on_pos": list(f.on_pos),
        "on_dir": [list(t) for t in f.on_dir],
    }


def chart_from_json(obj: dict, source: Poly | None = None, target: Poly | None = None) -> Chart:
    source = source if source is not None else poly_from_json(obj["source"])
    target = target if target is not None else poly_from_json(obj["target"])
    return Chart.from_tables(source, target, obj["on_pos"], obj["on_dir"])
