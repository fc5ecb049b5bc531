"""Equivariant geometric modules over the line and their morphisms.

A module is stored by its ranks at orbit representatives; a morphism by its
blocks leaving those representatives.  Everything else (all translates, the
reflected copy for the dihedral group) is implied by equivariance and produced
on demand inside a bounded ``Window``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .rings import (
    DIHEDRAL, LAURENT, QQ, DihedralElem, LaurentPoly, RingMatrix, to_scalar,
)

Q = Fraction


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


# --------------------------------------------------------------------------
# Points and groups


@dataclass(frozen=True, order=True)
class Point:
    copy: int
    x: Fraction
    t: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "x", to_scalar(self.x))
        object.__setattr__(self, "t", to_scalar(self.t))
        if self.copy not in (0, 1):
            raise ValueError("copy index must be 0 or 1")
        if self.t < 1:
            raise ValueError(f"height {self.t} is below 1")

    def moved(self, x=None, t=None, copy=None) -> Point:
        return Point(self.copy if copy is None else copy,
                     self.x if x is None else x, self.t if t is None else t)

    def to_json(self) -> dict:
        return {"copy": self.copy, "x": str(self.x), "t": str(self.t)}

    @classmethod
    def from_json(cls, d: Mapping) -> Point:
        return cls(int(d.get("copy", 0)), to_scalar(d["x"]), to_scalar(d.get("t", "1")))

    def __str__(self):
        c = f"{self.copy}:" if self.copy else ""
        return f"({c}{self.x}, {self.t})"


def pt(x, t=1, copy=0) -> Point:
    return Point(copy, to_scalar(x), to_scalar(t))


class GroupDesc:
    """Base protocol for the acting group; subclasses are singletons."""

    tag = ""
    ring = None

    identity = 0

    def act(self, g, p: Point) -> Point:
        raise NotImplementedError

    def canon(self, p: Point):
        """Return (g, rep) with p == act(g, rep) and rep in the fundamental domain."""
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def ring_element(self, g):
        raise NotImplementedError

    def elements_near(self, p: Point, w: Window) -> Iterator:
        """Group elements g with act(g, p) inside the x/copy range of ``w``."""
        raise NotImplementedError

    def is_rep(self, p: Point) -> bool:
        return self.canon(p)[1] == p

    def __repr__(self):
        return self.tag


class _Cyclic(GroupDesc):
    tag = "InfiniteCyclic"
    ring = LAURENT
    identity = 0

    def act(self, g, p):
        return Point(0, p.x + g, p.t) if g else p

    def canon(self, p):
        if p.copy:
            raise ValueError("the cyclic group acts on a single copy")
        k = math.floor(p.x)
        return k, (Point(0, p.x - k, p.t) if k else p)

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def ring_element(self, g):
        return LaurentPoly({g: 1})

    def elements_near(self, p, w):
        if w.copy not in (None, 0):
            return
        for k in range(math.floor(w.x0 - p.x), math.ceil(w.x1 - p.x) + 1):
            if w.x0 <= p.x + k <= w.x1:
                yield k


class _Dihedral(GroupDesc):
    tag = "InfiniteDihedral"
    ring = DIHEDRAL
    identity = (0, 0)

    def act(self, g, p):
        m, n = g
        if n:
            return Point(1 - p.copy, m - p.x, p.t)
        return Point(p.copy, p.x + m, p.t) if m else p

    def canon(self, p):
        if p.copy == 0:
            k = math.floor(p.x)
            return (k, 0), (Point(0, p.x - k, p.t) if k else p)
        m = math.ceil(p.x)
        return (m, 1), Point(0, m - p.x, p.t)

    def mul(self, g, h):
        m, n = g
        m2, n2 = h
        return (m + (-m2 if n else m2), n ^ n2)

    def inv(self, g):
        m, n = g
        return (m, 1) if n else (-m, 0)

    def ring_element(self, g):
        return DihedralElem({g: 1})

    def elements_near(self, p, w):
        for target_copy in (0, 1):
            if w.copy is not None and w.copy != target_copy:
                continue
            flip = target_copy ^ p.copy
            sign = -1 if flip else 1
            # act((m, flip), p).x == m + sign * p.x
            base = sign * p.x
            for m in range(math.floor(w.x0 - base), math.ceil(w.x1 - base) + 1):
                if w.x0 <= m + base <= w.x1:
                    yield (m, flip)


class _Trivial(GroupDesc):
    tag = "Trivial"
    ring = None
    identity = 0

    def act(self, g, p):
        return p

    def canon(self, p):
        return 0, p

    def mul(self, g, h):
        return 0

    def inv(self, g):
        return 0

    def ring_element(self, g):
        raise ValueError("the trivial group has no group ring here")

    def elements_near(self, p, w):
        if w.contains_x(p):
            yield 0


CYCLIC = _Cyclic()
DIHEDRAL_GROUP = _Dihedral()
TRIVIAL = _Trivial()
GROUPS = {g.tag: g for g in (CYCLIC, DIHEDRAL_GROUP, TRIVIAL)}


def group_from_tag(tag: str) -> GroupDesc:
    try:
        return GROUPS[tag]
    except KeyError:
        raise ValueError(f"unknown group {tag!r}") from None


# --------------------------------------------------------------------------
# Windows and subspaces


@dataclass(frozen=True)
class Window:
    x0: Fraction
    x1: Fraction
    t0: Fraction = Fraction(1)
    t1: Fraction = Fraction(10)
    copy: int | None = None

    def __post_init__(self):
        for name in ("x0", "x1", "t0", "t1"):
            v = getattr(self, name)
            if v is None:
                raise ValueError("windows must be bounded")
            object.__setattr__(self, name, to_scalar(v))
        if self.x0 > self.x1 or self.t0 > self.t1:
            raise ValueError("window bounds are reversed")

    def contains_x(self, p: Point) -> bool:
        return (self.copy is None or p.copy == self.copy) and self.x0 <= p.x <= self.x1

    def contains(self, p: Point) -> bool:
        return self.contains_x(p) and self.t0 <= p.t <= self.t1

    @classmethod
    def parse(cls, text: str, copy: int | None = None) -> Window:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("window needs four values x0,x1,t0,t1")
        return cls(*(to_scalar(p) for p in parts), copy=copy)


@dataclass(frozen=True)
class Interval:
    lo: Fraction | None = None
    hi: Fraction | None = None
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", to_scalar(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", to_scalar(self.hi))
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError("interval endpoints out of order")

    def __contains__(self, v) -> bool:
        if self.lo is not None and (v < self.lo or (v == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (v > self.hi or (v == self.hi and not self.hi_closed)):
            return False
        return True

    def to_json(self):
        return {"lo": None if self.lo is None else str(self.lo),
                "hi": None if self.hi is None else str(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


def closed(lo, hi) -> Interval:
    return Interval(lo, hi, True, True)


def half_open(lo, hi) -> Interval:
    return Interval(lo, hi, True, False)


EVERYWHERE = Interval()


@dataclass(frozen=True)
class Box:
    x: Interval = EVERYWHERE
    t: Interval = EVERYWHERE
    copy: int | None = None

    def contains(self, p: Point) -> bool:
        return (self.copy is None or self.copy == p.copy) and p.x in self.x and p.t in self.t


@dataclass(frozen=True)
class SubspaceSpec:
    """A finite union of boxes, optionally closed under the group action.

    With ``periodic`` set, a point belongs to the subspace when some group
    translate of it lies in a box.  ``complement`` flips membership.
    """

    boxes: tuple[Box, ...] = ()
    periodic: bool = False
    group: GroupDesc = CYCLIC
    complement: bool = False

    def contains(self, p: Point) -> bool:
        return self._base(p) != self.complement

    __contains__ = contains

    def _base(self, p: Point) -> bool:
        if not self.periodic:
            return any(b.contains(p) for b in self.boxes)
        return any(self._box_hit(b, p) for b in self.boxes)

    def _box_hit(self, b: Box, p: Point) -> bool:
        if p.t not in b.t:
            return False
        g = self.group
        if g is TRIVIAL:
            return b.contains(p)
        if b.x.lo is None or b.x.hi is None:
            if g is CYCLIC:
                return b.copy in (None, 0) and p.copy == 0
            return True
        lo, hi = b.x.lo, b.x.hi
        w = Window(lo, hi, p.t, p.t, b.copy)
        return any(b.contains(g.act(e, p)) for e in g.elements_near(p, w))

    def invert(self) -> SubspaceSpec:
        return SubspaceSpec(self.boxes, self.periodic, self.group, not self.complement)

    @classmethod
    def everything(cls, group: GroupDesc = CYCLIC) -> SubspaceSpec:
        return cls((Box(),), periodic=True, group=group)

    @classmethod
    def nothing(cls, group: GroupDesc = CYCLIC) -> SubspaceSpec:
        return cls((), periodic=True, group=group)

    def is_invariant_for(self, group: GroupDesc) -> bool:
        if group is TRIVIAL:
            return True
        if not self.periodic:
            return not self.boxes
        return self.group is group

    def to_json(self) -> dict:
        return {
            "periodic": self.periodic, "group": self.group.tag, "complement": self.complement,
            "boxes": [{"copy": b.copy, "x": b.x.to_json(), "t": b.t.to_json()} for b in self.boxes],
        }


# --------------------------------------------------------------------------
# Modules


class GeoModule:
    """Ranks at orbit representatives of an equivariant geometric module."""

    __slots__ = ("group", "_ranks", "_points", "_offsets", "_hash")

    def __init__(self, group: GroupDesc, orbit_data: Mapping[Point, int] | Iterable = ()):
        self.group = group
        items = orbit_data.items() if isinstance(orbit_data, Mapping) else orbit_data
        ranks: dict[Point, int] = {}
        for p, r in items:
            if not isinstance(r, int) or r <= 0:
                raise ValueError(f"rank at {p} must be a positive integer")
            if not group.is_rep(p):
                raise ValueError(f"{p} is not in the fundamental domain of {group.tag}")
            if p in ranks:
                raise ValueError(f"duplicate representative {p}")
            ranks[p] = r
        self._points = tuple(sorted(ranks))
        self._ranks = ranks
        self._offsets = None
        self._hash = None

    @classmethod
    def from_points(cls, group: GroupDesc, points: Iterable[tuple[Point, int]]) -> GeoModule:
        """Build from arbitrary points, moving each to its representative and summing."""
        acc: dict[Point, int] = {}
        for p, r in points:
            _, rep = group.canon(p)
            acc[rep] = acc.get(rep, 0) + r
        return cls(group, acc)

    @property
    def points(self) -> tuple[Point, ...]:
        return self._points

    @property
    def orbit_data(self) -> dict[Point, int]:
        return dict(self._ranks)

    def rank(self, p: Point) -> int:
        _, rep = self.group.canon(p)
        return self._ranks.get(rep, 0)

    def __contains__(self, p: Point) -> bool:
        return self.rank(p) > 0

    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def offsets(self) -> dict[Point, int]:
        if self._offsets is None:
            off, acc = {}, 0
            for p in self._points:
                off[p] = acc
                acc += self._ranks[p]
            self._offsets = off
        return self._offsets

    def is_empty(self) -> bool:
        return not self._points

    def __eq__(self, other):
        return isinstance(other, GeoModule) and self.group is other.group and \
            self._ranks == other._ranks

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group.tag, tuple((p, self._ranks[p]) for p in self._points)))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{p}:{self._ranks[p]}" for p in self._points)
        return f"GeoModule({self.group.tag}, {{{body}}})"

    def direct_sum(self, other: GeoModule) -> GeoModule:
        if other.group is not self.group:
            raise ValueError("modules over different groups")
        return GeoModule.from_points(self.group, list(self._ranks.items()) + list(other._ranks.items()))

    def to_json(self) -> dict:
        return {"group": self.group.tag,
                "orbit_data": [dict(p.to_json(), rank=self._ranks[p]) for p in self._points]}

    @classmethod
    def from_json(cls, d: Mapping) -> GeoModule:
        group = group_from_tag(d["group"])
        return cls(group, {Point.from_json(e): int(e["rank"]) for e in d["orbit_data"]})


def materialize(A: GeoModule, w: Window) -> list[tuple[Point, int]]:
    """All points of the module inside ``w`` with their ranks, sorted."""
    out = []
    for p in A.points:
        if not (w.t0 <= p.t <= w.t1):
            continue
        for g in A.group.elements_near(p, w):
            q = A.group.act(g, p)
            if w.contains(q):
                out.append((q, A.rank(p)))
    return sorted(out)


def grid_module(n: int, rank: int = 1, group: GroupDesc = CYCLIC, t=1) -> GeoModule:
    """Rank ``rank`` at each point i/n of the unit interval (copy 0)."""
    return GeoModule(group, {Point(0, Q(i, n), to_scalar(t)): rank for i in range(n)})


# --------------------------------------------------------------------------
# Morphisms


def _scalar_zero(rows: int, cols: int) -> RingMatrix:
    return RingMatrix.zeros(QQ, rows, cols)


class GeoMorphism:
    """Equivariant morphism stored as blocks leaving orbit representatives.

    ``blocks[(a, q)]`` is the scalar matrix from the representative ``a`` of the
    source to the point ``q`` of the target, of shape rank(q) x rank(a).
    """

    __slots__ = ("source", "target", "blocks", "_hash")

    def __init__(self, source: GeoModule, target: GeoModule,
                 blocks: Mapping[tuple[Point, Point], RingMatrix] | Iterable = (),
                 *, canonical: bool = False):
        if source.group is not target.group:
            raise ValueError("source and target live over different groups")
        self.source = source
        self.target = target
        group = source.group
        items = blocks.items() if isinstance(blocks, Mapping) else blocks
        acc: dict[tuple[Point, Point], RingMatrix] = {}
        for (p, q), m in items:
            if not canonical:
                g, a = group.canon(p)
                if p != a:
                    q = group.act(group.inv(g), q)
                p = a
                ra, rq = source.rank(p), target.rank(q)
                if ra == 0:
                    raise ValueError(f"block source {p} is not in the source support")
                if rq == 0:
                    raise ValueError(f"block target {q} is not in the target support")
                if m.shape != (rq, ra):
                    raise ValueError(f"block {p}->{q} has shape {m.shape}, expected {(rq, ra)}")
            key = (p, q)
            acc[key] = acc[key] + m if key in acc else m
        self.blocks = {k: v for k, v in acc.items() if not v.is_zero()}
        self._hash = None

    @property
    def group(self) -> GroupDesc:
        return self.source.group

    @classmethod
    def identity(cls, A: GeoModule) -> GeoMorphism:
        return cls(A, A, {(p, p): RingMatrix.identity(QQ, A.rank(p)) for p in A.points},
                   canonical=True)

    @classmethod
    def zero(cls, A: GeoModule, B: GeoModule | None = None) -> GeoMorphism:
        return cls(A, A if B is None else B, {}, canonical=True)

    def is_endo(self) -> bool:
        return self.source == self.target

    def __eq__(self, other):
        if not isinstance(other, GeoMorphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and \
            self.blocks == other.blocks

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.source, self.target, frozenset(self.blocks.items())))
        return self._hash

    def __repr__(self):
        return f"GeoMorphism({len(self.blocks)} blocks over {self.group.tag})"

    def __add__(self, other: GeoMorphism) -> GeoMorphism:
        _same_hom(self, other)
        merged = dict(self.blocks)
        for k, v in other.blocks.items():
            merged[k] = merged[k] + v if k in merged else v
        return GeoMorphism(self.source, self.target, merged, canonical=True)

    def __neg__(self) -> GeoMorphism:
        return GeoMorphism(self.source, self.target, {k: -v for k, v in self.blocks.items()},
                           canonical=True)

    def __sub__(self, other: GeoMorphism) -> GeoMorphism:
        return self + (-other)

    def scale(self, c) -> GeoMorphism:
        c = to_scalar(c)
        return GeoMorphism(self.source, self.target,
                           {k: v.scale(c) for k, v in self.blocks.items()}, canonical=True)

    def __matmul__(self, other: GeoMorphism) -> GeoMorphism:
        return compose(self, other)

    def blocks_from(self) -> dict[Point, list[tuple[Point, RingMatrix]]]:
        out: dict[Point, list] = {}
        for (a, q), m in self.blocks.items():
            out.setdefault(a, []).append((q, m))
        return out

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "blocks": [{"from": a.to_json(), "to": q.to_json(), "matrix": m.to_json()}
                       for (a, q), m in sorted(self.blocks.items(), key=lambda kv: kv[0])],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> GeoMorphism:
        src = GeoModule.from_json(d["source"])
        tgt = GeoModule.from_json(d["target"])
        blocks = []
        for b in d["blocks"]:
            p, q = Point.from_json(b["from"]), Point.from_json(b["to"])
            blocks.append(((p, q), RingMatrix(QQ, [[to_scalar(v) for v in r] for r in b["matrix"]],
                                              rows=len(b["matrix"]),
                                              cols=src.rank(p))))
        return cls(src, tgt, blocks)


def _same_hom(f: GeoMorphism, g: GeoMorphism):
    if f.source != g.source or f.target != g.target:
        raise ValueError("morphisms have different source or target")


def compose(g: GeoMorphism, f: GeoMorphism) -> GeoMorphism:
    """g after f."""
    if g.source != f.target:
        raise ValueError("composition needs source(g) == target(f)")
    group = f.group
    g_from = g.blocks_from()
    acc: dict[tuple[Point, Point], RingMatrix] = {}
    for (a, p), F in f.blocks.items():
        h, b = group.canon(p)
        for q, G in g_from.get(b, ()):
            key = (a, group.act(h, q))
            prod = G * F
            acc[key] = acc[key] + prod if key in acc else prod
    return GeoMorphism(f.source, g.target, acc, canonical=True)


def direct_sum_morphism(f: GeoMorphism, g: GeoMorphism) -> GeoMorphism:
    """f + g on modules with disjoint supports."""
    for A, B in ((f.source, g.source), (f.target, g.target)):
        if set(A.points) & set(B.points):
            raise ValueError("direct sum of morphisms needs disjoint supports")
    blocks = dict(f.blocks)
    blocks.update(g.blocks)
    return GeoMorphism(f.source.direct_sum(g.source), f.target.direct_sum(g.target), blocks,
                       canonical=True)


def materialize_blocks(f: GeoMorphism, w: Window) -> list[tuple[Point, Point, RingMatrix]]:
    """Every translate of a stored block whose source lies in ``w``."""
    group = f.group
    out = []
    for (a, q), m in f.blocks.items():
        if not (w.t0 <= a.t <= w.t1):
            continue
        for g in group.elements_near(a, w):
            p = group.act(g, a)
            if w.contains(p):
                out.append((p, group.act(g, q), m))
    out.sort(key=lambda e: (e[0], e[1]))
    return out


def to_window(f: GeoMorphism, w: Window) -> GeoMorphism:
    """The finite morphism of blocks with both endpoints in ``w``, over the trivial group."""
    src = GeoModule(TRIVIAL, dict(materialize(f.source, w)))
    tgt = GeoModule(TRIVIAL, dict(materialize(f.target, w)))
    blocks = {(p, q): m for p, q, m in materialize_blocks(f, w) if w.contains(q)}
    return GeoMorphism(src, tgt, blocks, canonical=True)


# --------------------------------------------------------------------------
# Sizes


@dataclass(frozen=True)
class Sizes:
    size: Fraction
    hsize: Fraction
    vsize: Fraction

    def to_json(self) -> dict:
        return {"size": str(self.size), "hsize": str(self.hsize), "vsize": str(self.vsize)}


def sizes(f: GeoMorphism) -> Sizes:
    """Horizontal distance is measured after projecting both copies to the line."""
    h = Fraction(0)
    v = Fraction(0)
    for (a, q) in f.blocks:
        h = max(h, abs(a.x - q.x))
        v = max(v, abs(a.t - q.t))
    return Sizes(h, h, v)


# --------------------------------------------------------------------------
# Restriction calculus


def _check_spec(f: GeoMorphism, *specs: SubspaceSpec):
    for s in specs:
        if not s.is_invariant_for(f.group):
            raise ValueError("subspace is not invariant under the group; restrict a window "
                             "morphism (to_window) instead")


def restrict_block(f: GeoMorphism, Y: SubspaceSpec, Z: SubspaceSpec) -> GeoMorphism:
    """Keep the blocks with source in Y and target in Z."""
    _check_spec(f, Y, Z)
    return GeoMorphism(f.source, f.target,
                       {k: m for k, m in f.blocks.items() if k[0] in Y and k[1] in Z},
                       canonical=True)


def _window_blocks(f: GeoMorphism, w: Window | None):
    if w is None:
        return [(a, q, m) for (a, q), m in f.blocks.items()]
    return [(p, q, m) for p, q, m in materialize_blocks(f, w) if w.contains(q)]


def _window_points(A: GeoModule, w: Window | None):
    if w is None:
        return list(A.points)
    return [p for p, _ in materialize(A, w)]


def zero_on_violations(f: GeoMorphism, Y: SubspaceSpec, w: Window | None = None):
    if w is None:
        _check_spec(f, Y)
    return [(p, q, m) for p, q, m in _window_blocks(f, w) if p in Y or q in Y]


def is_zero_on(f: GeoMorphism, Y: SubspaceSpec, w: Window | None = None) -> bool:
    """Every block with source or target in Y vanishes (inside ``w`` if given)."""
    return not zero_on_violations(f, Y, w)


def identity_on_violations(f: GeoMorphism, Y: SubspaceSpec, w: Window | None = None):
    if not f.is_endo():
        raise ValueError("identity check needs an endomorphism")
    if w is None:
        _check_spec(f, Y)
    bad = []
    seen_diag = set()
    for p, q, m in _window_blocks(f, w):
        if p == q:
            if p in Y:
                seen_diag.add(p)
                if not m.is_identity():
                    bad.append((p, q, m))
        elif p in Y or q in Y:
            bad.append((p, q, m))
    for p in _window_points(f.source, w):
        if p in Y and p not in seen_diag:
            bad.append((p, p, RingMatrix.zeros(QQ, f.source.rank(p), f.source.rank(p))))
    return bad


def is_identity_on(f: GeoMorphism, Y: SubspaceSpec, w: Window | None = None) -> bool:
    """Y to Y blocks are the identity and nothing enters or leaves Y."""
    return not identity_on_violations(f, Y, w)


# --------------------------------------------------------------------------
# Matrices and the section on the 1/n grid


def _entry_ring(group: GroupDesc):
    if group.ring is None:
        raise ValueError("matrix translation needs an infinite group")
    return group.ring


def u_functor(f: GeoMorphism) -> RingMatrix:
    """Group-ring matrix with rows indexed by target, columns by source representatives."""
    group = f.group
    ring = _entry_ring(group)
    for p in f.source.points + f.target.points:
        if p.t != 1:
            raise ValueError("matrix translation needs every height equal to 1")
    src_off, tgt_off = f.source.offsets(), f.target.offsets()
    acc: dict[tuple[int, int], object] = {}
    for (a, q), m in f.blocks.items():
        g, c = group.canon(q)
        elem = group.ring_element(g)
        r0, c0 = tgt_off[c], src_off[a]
        for (i, j), v in m.nonzero().items():
            key = (r0 + i, c0 + j)
            term = elem * v
            acc[key] = acc[key] + term if key in acc else term
    return RingMatrix.from_entries(ring, f.target.total_rank(), f.source.total_rank(), acc)


def _split_entry(v):
    """Yield (group element, coefficient) for a Laurent or dihedral entry."""
    if isinstance(v, LaurentPoly):
        return v.terms, CYCLIC
    if isinstance(v, DihedralElem):
        return v.terms, DIHEDRAL_GROUP
    raise TypeError(f"entry {v!r} is not a group-ring element")


def v_functor(A: RingMatrix, n: int) -> GeoMorphism:
    """Place A on the 1/n grid: basis index b sits at grid point b // rank."""
    if n < 1:
        raise ValueError("grid size must be positive")
    if A.rows != A.cols or A.rows % n:
        raise ValueError(f"{A.rows}x{A.cols} matrix does not fit a {n}-point grid")
    group = DIHEDRAL_GROUP if A.ring == DIHEDRAL else CYCLIC
    if A.ring not in (LAURENT, DIHEDRAL):
        A = A.map(lambda v: v, LAURENT)
    rank = A.rows // n
    M = grid_module(n, rank, group)
    grid = [Point(0, Q(i, n)) for i in range(n)]
    entries: dict[tuple[Point, Point], dict] = {}
    for (i, j), v in A.nonzero().items():
        terms, _ = _split_entry(v)
        src = grid[j // rank]
        for g, c in terms:
            key = (src, group.act(g, grid[i // rank]))
            entries.setdefault(key, {})[(i % rank, j % rank)] = c
    blocks = {k: RingMatrix.from_entries(QQ, rank, rank, e) for k, e in entries.items()}
    return GeoMorphism(M, M, blocks, canonical=True)


def matrix_to_morphism(M: RingMatrix, source: GeoModule, target: GeoModule) -> GeoMorphism:
    """Inverse of u_functor for modules whose representatives all sit at height 1."""
    group = source.group
    if M.shape != (target.total_rank(), source.total_rank()):
        raise ValueError("matrix does not match the module ranks")
    rows = [(c, i) for c in target.points for i in range(target.rank(c))]
    cols = [(a, j) for a in source.points for j in range(source.rank(a))]
    entries: dict[tuple[Point, Point], dict] = {}
    for (r, s), v in M.nonzero().items():
        (c, i), (a, j) = rows[r], cols[s]
        terms, g_of = _split_entry(v)
        if g_of is not group:
            raise ValueError("matrix entries do not match the module group")
        for g, coeff in terms:
            entries.setdefault((a, group.act(g, c)), {})[(i, j)] = coeff
    blocks = {k: RingMatrix.from_entries(QQ, target.rank(k[1]), source.rank(k[0]), e)
              for k, e in entries.items()}
    return GeoMorphism(source, target, blocks, canonical=True)


def d_matrix(k: int, n: int) -> RingMatrix:
    """Entry (i, j) is |k + (i - j)/n|, the distance contributed by t^k at (i, j)."""
    if n < 1:
        raise ValueError("n must be positive")
    return RingMatrix(QQ, [[abs(k + Q(i - j, n)) for j in range(n)] for i in range(n)])


def matrix_size_breakdown(A: RingMatrix, n: int) -> dict[int, Fraction]:
    if A.rows != A.cols or A.rows != n:
        raise ValueError(f"expected an {n}x{n} matrix, got {A.rows}x{A.cols}")
    out: dict[int, Fraction] = {}
    cache: dict[int, RingMatrix] = {}
    for (i, j), v in A.nonzero().items():
        for k in (v.exponents() if isinstance(v, LaurentPoly) else [0]):
            D = cache.setdefault(k, d_matrix(k, n))
            out[k] = max(out.get(k, Fraction(0)), D[i, j])
    return dict(sorted(out.items()))


def matrix_size(A: RingMatrix, n: int) -> Fraction:
    """Largest D^k_n entry over the nonzero coefficient positions of each t^k part."""
    if A.ring != LAURENT:
        A = A.map(lambda v: v, LAURENT)
    return max(matrix_size_breakdown(A, n).values(), default=Fraction(0))


# --------------------------------------------------------------------------
# Shifts and equivariance


def shift_point(p: Point, offset) -> Point:
    # copy 1 is the reflected line, so the shift there runs the other way
    return Point(p.copy, p.x + (-offset if p.copy else offset), p.t)


def shift(obj, offset):
    """Translate all x-coordinates by ``offset``; works on modules and morphisms."""
    offset = to_scalar(offset)
    if isinstance(obj, GeoModule):
        return GeoModule.from_points(obj.group, [(shift_point(p, offset), r)
                                                 for p, r in obj.orbit_data.items()])
    if isinstance(obj, GeoMorphism):
        if offset == 0:
            return obj
        src, tgt = shift(obj.source, offset), shift(obj.target, offset)
        return GeoMorphism(src, tgt, [((shift_point(a, offset), shift_point(q, offset)), m)
                                      for (a, q), m in obj.blocks.items()])
    raise TypeError(f"cannot shift {type(obj).__name__}")


def equal_within(f: GeoMorphism, g: GeoMorphism, w: Window, source_only: bool = False):
    """Blocks of f and g that differ inside ``w`` (source in w, and target too unless
    ``source_only``).  Returns the list of (source, target, f-block, g-block)."""
    def pick(h):
        return {(p, q): m for p, q, m in materialize_blocks(h, w)
                if source_only or w.contains(q)}
    bf, bg = pick(f), pick(g)
    out = []
    for key in sorted(set(bf) | set(bg)):
        a, b = bf.get(key), bg.get(key)
        if a != b:
            out.append((key[0], key[1], a, b))
    return out


def check_equivariance(f: GeoMorphism, w: Window, group: GroupDesc | None = None) -> bool:
    """Compare every pair of window blocks related by a group element.

    For stored-equivariant morphisms the window is materialized first; for
    window morphisms over the trivial group, pass the group to test against.
    """
    group = group or f.group
    if group is TRIVIAL:
        return True
    if f.group is not TRIVIAL and f.group is not group:
        raise ValueError("morphism is stored over a different group")
    local = f if f.group is TRIVIAL else to_window(f, w)
    blocks = {(p, q): m for (p, q), m in local.blocks.items() if w.contains(p) and w.contains(q)}
    pts = set(local.source.points) | set(local.target.points)
    for (p, q), m in blocks.items():
        for g in group.elements_near(p, w):
            gp, gq = group.act(g, p), group.act(g, q)
            if not (w.contains(gp) and w.contains(gq)):
                continue
            if gp not in pts or gq not in pts:
                return False
            other = blocks.get((gp, gq))
            if other is None or other != m:
                return False
    return True


__all__ = [
    "Point", "pt", "GroupDesc", "CYCLIC", "DIHEDRAL_GROUP", "TRIVIAL", "group_from_tag",
    "Window", "Interval", "Box", "SubspaceSpec", "closed", "half_open", "EVERYWHERE",
    "GeoModule", "GeoMorphism", "materialize", "grid_module", "compose", "direct_sum_morphism",
    "materialize_blocks", "to_window", "Sizes", "sizes", "restrict_block", "is_zero_on",
    "is_identity_on", "zero_on_violations", "identity_on_violations", "u_functor", "v_functor",
    "d_matrix", "matrix_size", "matrix_size_breakdown", "shift", "shift_point",
    "check_equivariance", "equal_within", "matrix_to_morphism", "PreconditionError",
]
