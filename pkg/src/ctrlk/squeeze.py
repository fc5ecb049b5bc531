"""Squeezing: raise a module to height tau_n and contract it by 1/n.

Layer n sends (x, t) to (f_n(x), t + tau_n - 1), where f_n contracts each
translate of the unit interval I = (a, a + 1) linearly onto a 1/n-wide interval
about its midpoint.  The reflected copy of the dihedral resolution uses the
mirrored interval family (left ends -a - 1 + k) so that layers stay equivariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .geo import (
    TRIVIAL, Box, GeoModule, GeoMorphism, Interval, Point, PreconditionError, SubspaceSpec,
    Window, closed, compose, equal_within, half_open, identity_on_violations, is_identity_on,
)
from .rings import QQ, RingMatrix, to_scalar


@dataclass(frozen=True)
class IntervalSpec:
    """The open unit interval (a, a + 1)."""

    a: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", to_scalar(self.a))

    def left(self, copy: int = 0) -> Fraction:
        return self.a if copy == 0 else -self.a - 1

    def index(self, x, copy: int = 0) -> int:
        """Which translate [left + k, left + k + 1) contains x."""
        return math.floor(x - self.left(copy))

    def on_boundary(self, x, copy: int = 0) -> bool:
        return (x - self.left(copy)).denominator == 1

    def contains(self, x, copy: int = 0) -> bool:
        """x in the open interval I itself (no translates)."""
        lo = self.left(copy)
        return lo < x < lo + 1

    def midpoint_interval(self) -> IntervalSpec:
        """(a + 1/2, a + 3/2), the interval the vanishing construction restricts to."""
        return IntervalSpec(self.a + Fraction(1, 2))

    def __str__(self):
        return f"({self.a}, {self.a + 1})"


@dataclass(frozen=True)
class LayerSchedule:
    """Heights tau_1 = 1 < tau_2 < ...; ``values`` fixes a prefix, ``step`` the rest."""

    step: Fraction = Fraction(1)
    values: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "step", to_scalar(self.step))
        object.__setattr__(self, "values", tuple(to_scalar(v) for v in self.values))
        if self.step <= 0:
            raise ValueError("schedule step must be positive")
        if self.values:
            if self.values[0] != 1:
                raise ValueError("tau_1 must equal 1")
            if any(b <= a for a, b in zip(self.values, self.values[1:])):
                raise ValueError("schedule must be strictly increasing")

    def tau(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError("layers are numbered from 1")
        if n <= len(self.values):
            return self.values[n - 1]
        if self.values:
            return self.values[-1] + self.step * (n - len(self.values))
        return 1 + self.step * (n - 1)

    def prefix(self, n: int) -> list[Fraction]:
        return [self.tau(k) for k in range(1, n + 1)]

    def layer_of_height(self, t, limit: int) -> int:
        """Largest n <= limit with tau_n <= t."""
        n = 1
        while n < limit and self.tau(n + 1) <= t:
            n += 1
        return n

    def to_json(self) -> dict:
        return {"step": str(self.step), "values": [str(v) for v in self.values]}


DEFAULT_SCHEDULE = LayerSchedule()


# --------------------------------------------------------------------------
# The contraction maps


def f_apply(I: IntervalSpec, n: int, x, copy: int = 0) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    x = to_scalar(x)
    if copy:
        return -f_apply(I, n, -x, 0)
    k = math.floor(x - I.a)
    base = I.a + k
    return base + Fraction(1, 2) - Fraction(1, 2 * n) + (x - base) / n


def f_invert(I: IntervalSpec, n: int, y, copy: int = 0) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    y = to_scalar(y)
    if copy:
        return -f_invert(I, n, -y, 0)
    k = math.floor(y - I.a)
    lo = I.a + k + Fraction(1, 2) - Fraction(1, 2 * n)
    if not (lo <= y < lo + Fraction(1, n)):
        raise ValueError(f"{y} is not in the image of f_{n}")
    return I.a + k + n * (y - lo)


def squeeze_point(p: Point, I: IntervalSpec, sched: LayerSchedule, n: int) -> Point:
    return Point(p.copy, f_apply(I, n, p.x, p.copy), p.t + sched.tau(n) - 1)


# --------------------------------------------------------------------------
# Restriction to I


def module_avoids_boundary(A: GeoModule, I: IntervalSpec) -> bool:
    if A.group is TRIVIAL:
        return all(I.contains(p.x, p.copy) for p in A.points)
    return not any(I.on_boundary(p.x, p.copy) for p in A.points)


def _crosses(I: IntervalSpec, group, p: Point, q: Point) -> bool:
    if group is TRIVIAL:
        return not (I.contains(p.x, p.copy) and I.contains(q.x, q.copy))
    if I.on_boundary(p.x, p.copy) or I.on_boundary(q.x, q.copy):
        return True
    return any(I.index(p.x, c) != I.index(q.x, c) for c in {p.copy, q.copy})


def restricts_to_interval(f, I: IntervalSpec) -> bool:
    """Supports avoid the translates of the boundary and no block crosses one."""
    if isinstance(f, GeoModule):
        return module_avoids_boundary(f, I)
    if not (module_avoids_boundary(f.source, I) and module_avoids_boundary(f.target, I)):
        return False
    return not any(_crosses(I, f.group, a, q) for (a, q) in f.blocks)


def clip(f: GeoMorphism, I: IntervalSpec) -> GeoMorphism:
    """Drop every block whose endpoints lie in different translates of I."""
    return GeoMorphism(f.source, f.target,
                       {k: m for k, m in f.blocks.items() if not _crosses(I, f.group, *k)},
                       canonical=True)


# --------------------------------------------------------------------------
# Layers


def squeeze_module(A: GeoModule, I: IntervalSpec, sched: LayerSchedule, n: int) -> GeoModule:
    if not module_avoids_boundary(A, I):
        raise PreconditionError(f"module meets the boundary of {I}")
    return GeoModule.from_points(A.group, [(squeeze_point(p, I, sched, n), r)
                                           for p, r in A.orbit_data.items()])


def squeeze_layer(x, I: IntervalSpec, sched: LayerSchedule = DEFAULT_SCHEDULE, n: int = 1):
    """The n-th layer S_n applied to a module or a morphism."""
    if isinstance(x, GeoModule):
        return squeeze_module(x, I, sched, n)
    if not restricts_to_interval(x, I):
        raise PreconditionError(f"morphism does not restrict to {I}")
    src = squeeze_module(x.source, I, sched, n)
    tgt = src if x.target == x.source else squeeze_module(x.target, I, sched, n)
    blocks = [((squeeze_point(a, I, sched, n), squeeze_point(q, I, sched, n)), m)
              for (a, q), m in x.blocks.items()]
    return GeoMorphism(src, tgt, blocks)


def layer_relabel(A: GeoModule, I: IntervalSpec, sched: LayerSchedule, i: int, j: int,
                  scalar=1) -> GeoMorphism:
    """Identity blocks S_i(A)_(f_i x, t + tau_i - 1) -> S_j(A)_(f_j x, t + tau_j - 1).

    Layer index 0 stands for A itself (placed like layer 1).
    """
    li, lj = max(i, 1), max(j, 1)
    src = squeeze_module(A, I, sched, li)
    tgt = squeeze_module(A, I, sched, lj)
    c = to_scalar(scalar)
    blocks = [((squeeze_point(p, I, sched, li), squeeze_point(p, I, sched, lj)),
               RingMatrix.identity(QQ, r).scale(c)) for p, r in A.orbit_data.items()]
    return GeoMorphism(src, tgt, blocks)


# --------------------------------------------------------------------------
# Block matrices over layers


@dataclass(frozen=True)
class LayerMatrix:
    """A morphism between direct sums of layer modules, keyed (target layer, source layer)."""

    domain: Mapping[int, GeoModule]
    codomain: Mapping[int, GeoModule]
    blocks: Mapping[tuple[int, int], GeoMorphism] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), f in self.blocks.items():
            if j not in self.domain or i not in self.codomain:
                raise ValueError(f"block ({i},{j}) outside the layer range")
            if f.source != self.domain[j] or f.target != self.codomain[i]:
                raise ValueError(f"block ({i},{j}) has mismatched modules")
            if f.blocks:
                clean[(i, j)] = f
        object.__setattr__(self, "blocks", clean)

    @classmethod
    def identity(cls, layers: Mapping[int, GeoModule]) -> LayerMatrix:
        return cls(dict(layers), dict(layers),
                   {(n, n): GeoMorphism.identity(A) for n, A in layers.items()})

    @classmethod
    def diagonal(cls, maps: Mapping[int, GeoMorphism]) -> LayerMatrix:
        return cls({n: f.source for n, f in maps.items()}, {n: f.target for n, f in maps.items()},
                   {(n, n): f for n, f in maps.items()})

    def __matmul__(self, other: LayerMatrix) -> LayerMatrix:
        """self after other."""
        if dict(self.domain) != dict(other.codomain):
            raise ValueError("layer matrices do not compose")
        by_src: dict[int, list] = {}
        for (k, j), f in other.blocks.items():
            by_src.setdefault(k, []).append((j, f))
        acc: dict[tuple[int, int], GeoMorphism] = {}
        for (i, k), g in self.blocks.items():
            for j, f in by_src.get(k, ()):
                h = compose(g, f)
                acc[(i, j)] = acc[(i, j)] + h if (i, j) in acc else h
        return LayerMatrix(dict(other.domain), dict(self.codomain), acc)

    def __add__(self, other: LayerMatrix) -> LayerMatrix:
        acc = dict(self.blocks)
        for k, f in other.blocks.items():
            acc[k] = acc[k] + f if k in acc else f
        return LayerMatrix(dict(self.domain), dict(self.codomain), acc)

    def __neg__(self) -> LayerMatrix:
        return LayerMatrix(dict(self.domain), dict(self.codomain),
                           {k: -f for k, f in self.blocks.items()})

    def __sub__(self, other: LayerMatrix) -> LayerMatrix:
        return self + (-other)

    def block(self, i: int, j: int) -> GeoMorphism:
        f = self.blocks.get((i, j))
        return f if f is not None else GeoMorphism.zero(self.domain[j], self.codomain[i])

    def flatten(self) -> GeoMorphism:
        """One morphism on the merged modules; coinciding points stack ranks by layer."""
        src, src_off = merge_layers(self.domain)
        tgt, tgt_off = merge_layers(self.codomain)
        group = src.group
        acc: dict[tuple[Point, Point], dict] = {}
        for (i, j), f in self.blocks.items():
            for (a, q), m in f.blocks.items():
                _, c = group.canon(q)
                r0, c0 = tgt_off[(i, c)], src_off[(j, a)]
                e = acc.setdefault((a, q), {})
                for (r, s), v in m.nonzero().items():
                    key = (r0 + r, c0 + s)
                    e[key] = e[key] + v if key in e else v
        blocks = {}
        for (a, q), e in acc.items():
            blocks[(a, q)] = RingMatrix.from_entries(QQ, tgt.rank(q), src.rank(a), e)
        return GeoMorphism(src, tgt, blocks, canonical=True)


def merge_layers(layers: Mapping[int, GeoModule]):
    """Merged module plus the row offset of (layer, representative) inside its point."""
    groups = {A.group for A in layers.values()}
    if len(groups) > 1:
        raise ValueError("layers over different groups")
    group = groups.pop() if groups else TRIVIAL
    ranks: dict[Point, int] = {}
    offsets: dict[tuple[int, Point], int] = {}
    for n in sorted(layers):
        for p, r in layers[n].orbit_data.items():
            offsets[(n, p)] = ranks.get(p, 0)
            ranks[p] = ranks.get(p, 0) + r
    return GeoModule(group, ranks), offsets


# --------------------------------------------------------------------------
# The squeezed stack


@dataclass(frozen=True)
class SqueezedStack:
    base: object
    interval: IntervalSpec
    schedule: LayerSchedule
    layers: tuple

    @property
    def N(self) -> int:
        return len(self.layers)

    def layer(self, n: int):
        return self.layers[n - 1]

    def modules(self) -> dict[int, GeoModule]:
        if isinstance(self.base, GeoModule):
            return {n: A for n, A in enumerate(self.layers, 1)}
        return {n: f.source for n, f in enumerate(self.layers, 1)}

    def as_layer_matrix(self) -> LayerMatrix:
        if isinstance(self.base, GeoModule):
            return LayerMatrix.identity(self.modules())
        return LayerMatrix.diagonal({n: f for n, f in enumerate(self.layers, 1)})

    def module(self) -> GeoModule:
        return merge_layers(self.modules())[0]

    def flatten(self) -> GeoMorphism:
        return self.as_layer_matrix().flatten()


def squeeze_total(x, I: IntervalSpec, sched: LayerSchedule = DEFAULT_SCHEDULE,
                  N: int = 1) -> SqueezedStack:
    if N < 1:
        raise ValueError("need at least one layer")
    layers = tuple(squeeze_layer(x, I, sched, n) for n in range(1, N + 1))
    return SqueezedStack(x, I, sched, layers)


def _base_module(stack_or_module) -> GeoModule:
    if isinstance(stack_or_module, GeoModule):
        return stack_or_module
    base = stack_or_module.base
    return base if isinstance(base, GeoModule) else base.source


def layer_iso(stack: SqueezedStack, i: int, j: int) -> GeoMorphism:
    """The relabeling isomorphism S_i(A) -> S_j(A)."""
    for k in (i, j):
        if not 1 <= k <= stack.N:
            raise IndexError(f"layer {k} outside the truncation 1..{stack.N}")
    return layer_relabel(_base_module(stack), stack.interval, stack.schedule, i, j)


def flasque_layers(A: GeoModule, I: IntervalSpec, N: int,
                   sched: LayerSchedule = DEFAULT_SCHEDULE):
    """Layered forms of S(A) + A -> S(A) and its inverse; layer 0 is the extra copy of A."""
    layers = {n: squeeze_module(A, I, sched, n) for n in range(1, N + 1)}
    dom = {0: A, **layers}
    fwd = {(1, 0): layer_relabel(A, I, sched, 0, 1)}
    bwd = {(0, 1): layer_relabel(A, I, sched, 1, 0)}
    for n in range(1, N):
        fwd[(n + 1, n)] = layer_relabel(A, I, sched, n, n + 1)
        bwd[(n, n + 1)] = layer_relabel(A, I, sched, n + 1, n)
    return LayerMatrix(dom, layers, fwd), LayerMatrix(layers, dom, bwd)


def flasque_iso(A: GeoModule, I: IntervalSpec, N: int,
                sched: LayerSchedule = DEFAULT_SCHEDULE) -> tuple[GeoMorphism, GeoMorphism]:
    fwd, bwd = flasque_layers(A, I, N, sched)
    return fwd.flatten(), bwd.flatten()


def flasque_check(A: GeoModule, I: IntervalSpec, N: int, w: Window,
                  sched: LayerSchedule = DEFAULT_SCHEDULE) -> bool:
    """Both composites are the identity on blocks inside ``w``."""
    fwd, bwd = flasque_layers(A, I, N, sched)
    one = (fwd @ bwd).flatten()
    two = (bwd @ fwd).flatten()
    return not equal_within(one, GeoMorphism.identity(one.source), w) and \
        not equal_within(two, GeoMorphism.identity(two.source), w)


# --------------------------------------------------------------------------
# The subspaces U and V


def subspace_U(I: IntervalSpec, group=None) -> SubspaceSpec:
    from .geo import CYCLIC
    a = I.a
    box = Box(closed(a + Fraction(1, 3), a + Fraction(2, 3)), Interval(1, None), 0)
    return SubspaceSpec((box,), periodic=True, group=group or CYCLIC)


def subspace_V(I: IntervalSpec, sched: LayerSchedule = DEFAULT_SCHEDULE, N: int = 8,
               group=None) -> SubspaceSpec:
    """Boxes about a + 1/2 of half-width 1/(6n) over [tau_n, tau_(n+1)); the N-th is unbounded."""
    from .geo import CYCLIC
    mid = I.a + Fraction(1, 2)
    boxes = []
    for n in range(1, N + 1):
        r = Fraction(1, 6 * n)
        t = half_open(sched.tau(n), sched.tau(n + 1)) if n < N else Interval(sched.tau(n), None)
        boxes.append(Box(closed(mid - r, mid + r), t, 0))
    return SubspaceSpec(tuple(boxes), periodic=True, group=group or CYCLIC)


def lemma_identity_check(gamma: GeoMorphism, I: IntervalSpec,
                         sched: LayerSchedule = DEFAULT_SCHEDULE, N: int = 8,
                         w: Window | None = None) -> bool:
    """Whether S_n(gamma) is the identity on V for all n <= N, given gamma is on U."""
    U = subspace_U(I, gamma.group if gamma.group is not TRIVIAL else None)
    V = subspace_V(I, sched, N, gamma.group if gamma.group is not TRIVIAL else None)
    bad = identity_on_violations(gamma, U, w)
    if bad:
        p, q, _ = bad[0]
        raise PreconditionError(f"endomorphism is not the identity on U (block {p} -> {q})")
    return all(is_identity_on(squeeze_layer(gamma, I, sched, n), V, w) for n in range(1, N + 1))


__all__ = [
    "IntervalSpec", "LayerSchedule", "DEFAULT_SCHEDULE", "f_apply", "f_invert", "squeeze_point",
    "restricts_to_interval", "clip", "squeeze_module", "squeeze_layer", "layer_relabel",
    "LayerMatrix", "merge_layers", "SqueezedStack", "squeeze_total", "layer_iso",
    "flasque_layers", "flasque_iso", "flasque_check", "subspace_U", "subspace_V",
    "lemma_identity_check", "module_avoids_boundary",
]
