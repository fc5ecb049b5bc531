"""Trading a small automorphism for one that restricts to (a + 1/2, a + 3/2).

Given alpha with hsize(alpha^{+-1}) < 1/30, build the elementary products
eta on S_odd + S_even and mu on S_even + S_odd+, set beta = eta (alpha + mu),
and check beta against its closed-form column description.  All work happens
on a stack truncated to N layers; only the window below tau_(N-1) is asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .geo import (
    CYCLIC, DIHEDRAL_GROUP, TRIVIAL, GeoModule, GeoMorphism, Point, PreconditionError, Window,
    compose, equal_within, identity_on_violations, materialize_blocks, matrix_to_morphism,
    shift, sizes, u_functor,
)
from .rings import monomial_inverse
from .squeeze import (
    IntervalSpec, LayerMatrix, LayerSchedule, clip, layer_relabel, restricts_to_interval,
    squeeze_layer, squeeze_module, subspace_V, _crosses,
)

SMALL = Fraction(1, 30)
DEFAULT_SEARCH_BOUND = 64


# --------------------------------------------------------------------------
# Inputs


def invert_if_monomial(alpha: GeoMorphism) -> GeoMorphism:
    """Exact inverse when U(alpha) is a monomial matrix; otherwise the caller must supply one."""
    try:
        M = u_functor(alpha)
        inv = matrix_to_morphism(monomial_inverse(M), alpha.target, alpha.source)
    except ValueError as exc:
        raise PreconditionError(f"no inverse supplied and none computable: {exc}") from None
    if compose(inv, alpha) != GeoMorphism.identity(alpha.source):
        raise PreconditionError("monomial inverse candidate failed to invert")
    return inv


def preshift_offset(alpha: GeoMorphism, I: IntervalSpec = IntervalSpec()) -> Fraction:
    """1/(4 L) with L the lcm of support denominators relative to I, halved for the
    dihedral group until the cross-copy blocks stay small."""
    dens = [(p.x - I.a).denominator for p in alpha.source.points + alpha.target.points]
    L = math.lcm(*dens) if dens else 1
    off = Fraction(1, 4 * L)
    if alpha.group is DIHEDRAL_GROUP:
        base = sizes(alpha).hsize
        while off and sizes(shift(alpha, off)).hsize >= SMALL and base < SMALL:
            off /= 2
            if off < Fraction(1, 1 << 40):
                break
    return off


def needs_shift(alpha: GeoMorphism, I: IntervalSpec) -> bool:
    half = I.midpoint_interval()
    mods = (alpha.source, alpha.target)
    return any(I.on_boundary(p.x, p.copy) or half.on_boundary(p.x, p.copy)
               for A in mods for p in A.points)


def preshift(alpha: GeoMorphism, alpha_inv: GeoMorphism, I: IntervalSpec = IntervalSpec(),
             offset=None):
    off = preshift_offset(alpha, I) if offset is None else Fraction(offset)
    return shift(alpha, off), shift(alpha_inv, off), off


def _check_inputs(alpha: GeoMorphism, alpha_inv: GeoMorphism, I: IntervalSpec):
    if not alpha.is_endo():
        raise PreconditionError("alpha must be an endomorphism")
    if alpha.group is TRIVIAL:
        raise PreconditionError("the vanishing construction needs an equivariant automorphism")
    h, hi = sizes(alpha).hsize, sizes(alpha_inv).hsize
    if h >= SMALL or hi >= SMALL:
        raise PreconditionError(f"hsize(alpha) = {h}, hsize(alpha^-1) = {hi}; both must be < 1/30")
    one = GeoMorphism.identity(alpha.source)
    if compose(alpha, alpha_inv) != one or compose(alpha_inv, alpha) != one:
        raise PreconditionError("supplied inverse does not invert alpha")
    if needs_shift(alpha, I):
        raise PreconditionError("support meets integers or half-integers relative to the "
                                "interval; pre-shift alpha first")


# --------------------------------------------------------------------------
# Schedule


def _violates(f: GeoMorphism, floor_height, bound) -> bool:
    for (a, q) in f.blocks:
        if a.t >= floor_height and q.t >= floor_height and abs(a.x - q.x) > bound:
            return True
    return False


def schedule_condition_holds(alpha: GeoMorphism, alpha_inv: GeoMorphism, K, N: int,
                             sched: LayerSchedule, I: IntervalSpec = IntervalSpec()) -> bool:
    bars = [clip(alpha, I), clip(alpha_inv, I)]
    squeezed = {}
    for n in range(1, N + 1):
        floor_height = sched.tau(n) - 5 * Fraction(K)
        bound = Fraction(1, 30 * n)
        if _violates(alpha, floor_height, bound) or _violates(alpha_inv, floor_height, bound):
            return False
        for j in range(2, n):
            for k, b in enumerate(bars):
                if (j, k) not in squeezed:
                    squeezed[(j, k)] = squeeze_layer(b, I, sched, j)
                if _violates(squeezed[(j, k)], floor_height, bound):
                    return False
    return True


def select_schedule(alpha: GeoMorphism, K=0, N: int = 12, alpha_inv: GeoMorphism | None = None,
                    I: IntervalSpec = IntervalSpec(),
                    search_bound: int = DEFAULT_SEARCH_BOUND) -> LayerSchedule:
    """First tau_n = 1 + c (n - 1), c = 1, 2, ..., meeting the layer condition up to N."""
    if alpha_inv is None:
        alpha_inv = invert_if_monomial(alpha) if alpha.blocks else alpha
    K = Fraction(K)
    if K < max(sizes(alpha).vsize, sizes(alpha_inv).vsize):
        raise PreconditionError("K must bound the vertical size of alpha and its inverse")
    for c in range(1, search_bound + 1):
        sched = LayerSchedule(step=c)
        if schedule_condition_holds(alpha, alpha_inv, K, N, sched, I):
            return sched
    raise PreconditionError(f"no schedule with step <= {search_bound} satisfies the condition")


# --------------------------------------------------------------------------
# eta and mu


@dataclass(frozen=True)
class BlockElementary:
    """id + X where X maps one summand into the other, so X o X = 0."""

    label: str
    X: LayerMatrix

    def matrix(self) -> LayerMatrix:
        return LayerMatrix.identity(self.X.domain) + self.X

    def inverse(self) -> LayerMatrix:
        return LayerMatrix.identity(self.X.domain) - self.X

    def is_nilpotent(self) -> bool:
        return not (self.X @ self.X).blocks


@dataclass(frozen=True)
class BlockWitness:
    factors: tuple[BlockElementary, ...]

    def product(self) -> LayerMatrix:
        out = self.factors[0].matrix()
        for f in self.factors[1:]:
            out = out @ f.matrix()
        return out

    def inverse(self) -> LayerMatrix:
        out = self.factors[-1].inverse()
        for f in reversed(self.factors[:-1]):
            out = out @ f.inverse()
        return out

    def __len__(self):
        return len(self.factors)


@dataclass(frozen=True)
class EtaMu:
    eta: LayerMatrix
    mu: LayerMatrix
    eta_inv: LayerMatrix
    mu_inv: LayerMatrix
    eta_witness: BlockWitness
    mu_witness: BlockWitness
    layers: dict
    bars: tuple  # (clip(alpha), clip(alpha^-1))


class _Ctx:
    """Shared per-run data: layer modules, relabelings and squeezed clipped maps."""

    def __init__(self, alpha, alpha_inv, I, sched, N):
        self.alpha, self.alpha_inv = alpha, alpha_inv
        self.I, self.sched, self.N = I, sched, N
        self.A = alpha.source
        self.layers = {n: squeeze_module(self.A, I, sched, n) for n in range(1, N + 1)}
        self.a_bar = clip(alpha, I)
        self.b_bar = clip(alpha_inv, I)
        self._psi = {}
        self._sq = {}

    def psi(self, i, j) -> GeoMorphism:
        if (i, j) not in self._psi:
            self._psi[(i, j)] = layer_relabel(self.A, self.I, self.sched, i, j)
        return self._psi[(i, j)]

    def S(self, f: GeoMorphism, n: int, key) -> GeoMorphism:
        if (key, n) not in self._sq:
            self._sq[(key, n)] = squeeze_layer(f, self.I, self.sched, n)
        return self._sq[(key, n)]

    def lm(self, blocks) -> LayerMatrix:
        return LayerMatrix(self.layers, self.layers, blocks)


def _pair_factors(ctx: _Ctx, pairs, left_name, right_name) -> tuple[BlockElementary, ...]:
    """The six factors for a splitting whose summands are paired layer by layer.

    ``pairs`` lists (p, q) with p in the first summand and q = its partner in the
    second; psi sends layer p to layer q.
    """
    a, b = ctx.a_bar, ctx.b_bar
    upper = ctx.lm({(p, q): ctx.psi(q, p) for p, q in pairs})
    lower = ctx.lm({(q, p): -ctx.psi(p, q) for p, q in pairs})
    low_b = ctx.lm({(q, p): compose(ctx.psi(p, q), ctx.S(b, p, "b")) for p, q in pairs})
    up_a = ctx.lm({(p, q): -compose(ctx.psi(q, p), ctx.S(a, q, "a")) for p, q in pairs})
    return (
        BlockElementary(f"[1, psi^-1] on {left_name}+{right_name}", upper),
        BlockElementary("[1, 0; -psi, 1]", lower),
        BlockElementary("[1, psi^-1]", upper),
        BlockElementary("[1, 0; psi S(bar alpha^-1), 1]", low_b),
        BlockElementary("[1, -psi^-1 S(bar alpha)]", up_a),
        BlockElementary("[1, 0; psi S(bar alpha^-1), 1]", low_b),
    )


def _eta_pairs(N):
    return [(p, p + 1) for p in range(1, N, 2)]


def _mu_pairs(N):
    return [(p, p + 1) for p in range(2, N, 2)]


def _build(ctx: _Ctx) -> EtaMu:
    eta_w = BlockWitness(_pair_factors(ctx, _eta_pairs(ctx.N), "odd", "even"))
    mu_w = BlockWitness(_pair_factors(ctx, _mu_pairs(ctx.N), "even", "odd+"))
    return EtaMu(eta_w.product(), mu_w.product(), eta_w.inverse(), mu_w.inverse(),
                 eta_w, mu_w, ctx.layers, (ctx.a_bar, ctx.b_bar))


def build_eta_mu(alpha: GeoMorphism, alpha_inv: GeoMorphism, I: IntervalSpec = IntervalSpec(),
                 sched: LayerSchedule | None = None, N: int = 12) -> EtaMu:
    _check_inputs(alpha, alpha_inv, I)
    sched = sched or LayerSchedule()
    return _build(_Ctx(alpha, alpha_inv, I, sched, N))


def _alpha_layer(ctx: _Ctx) -> LayerMatrix:
    blocks = {(n, n): GeoMorphism.identity(ctx.layers[n]) for n in range(2, ctx.N + 1)}
    blocks[(1, 1)] = GeoMorphism(ctx.layers[1], ctx.layers[1], ctx.alpha.blocks, canonical=True)
    return ctx.lm(blocks)


def _beta_product(ctx: _Ctx, em: EtaMu) -> LayerMatrix:
    return em.eta @ (_alpha_layer(ctx) @ em.mu)


def build_beta_product(alpha, alpha_inv, I: IntervalSpec = IntervalSpec(),
                       sched: LayerSchedule | None = None, N: int = 12) -> LayerMatrix:
    """beta = eta o (alpha + mu) by explicit composition."""
    _check_inputs(alpha, alpha_inv, I)
    ctx = _Ctx(alpha, alpha_inv, I, sched or LayerSchedule(), N)
    return _beta_product(ctx, _build(ctx))


def _chain(*fs: GeoMorphism) -> GeoMorphism:
    """fs[0] o fs[1] o ... o fs[-1]."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = compose(f, out)
    return out


def _beta_closed(ctx: _Ctx) -> LayerMatrix:
    a, b, alpha = ctx.a_bar, ctx.b_bar, ctx.alpha
    N = ctx.N
    one = GeoMorphism.identity(ctx.A)

    # base-level words in the clipped maps; each is squeezed layer by layer
    def words(x, y):
        xy = compose(x, y)
        xyx = compose(x, compose(y, x))
        yxy = compose(y, compose(x, y))
        xyxy = compose(xy, xy)
        yxyxy = compose(y, compose(x, yxy))
        return {
            "gamma": -yxy.scale(3) + y.scale(2) + yxyxy,
            "delta": xy.scale(2) - xyxy,
            "kappa": one - xy.scale(2) + xyxy,
            "rho": -xyx + x,
        }
    plain = words(a, b)
    tilde = words(b, a)

    blocks: dict[tuple[int, int], GeoMorphism] = {}

    def put(i, j, f):
        if 1 <= i <= N:
            blocks[(i, j)] = f

    L1 = ctx.layers[1]
    as_l1 = lambda f: GeoMorphism(L1, L1, f.blocks, canonical=True)  # noqa: E731
    b_alpha = compose(b, alpha)
    put(1, 1, as_l1(b_alpha.scale(2) - _chain(b, a, b, alpha)))
    if N >= 2:
        put(2, 1, compose(ctx.psi(1, 2), as_l1(-alpha + _chain(a, b, alpha))))

    for j in range(2, N + 1):
        if j % 2 == 0:
            g = ctx.S(plain["gamma"], j, "gamma")
            put(j - 1, j, compose(ctx.psi(j, j - 1), g))
            put(j, j, ctx.S(plain["delta"], j, "delta"))
            if j + 1 <= N:
                put(j + 1, j, -compose(ctx.psi(j, j + 1), g))
            if j + 2 <= N:
                put(j + 2, j, compose(ctx.psi(j, j + 2), ctx.S(plain["kappa"], j, "kappa")))
        else:
            r = ctx.S(plain["rho"], j, "rho")
            put(j - 2, j, compose(ctx.psi(j, j - 2), ctx.S(tilde["kappa"], j, "kappa~")))
            put(j - 1, j, compose(ctx.psi(j, j - 1), r))
            put(j, j, ctx.S(tilde["delta"], j, "delta~"))
            if j + 1 <= N:
                put(j + 1, j, -compose(ctx.psi(j, j + 1), r))
    return ctx.lm(blocks)


def build_beta_closed(alpha, alpha_inv, I: IntervalSpec = IntervalSpec(),
                      sched: LayerSchedule | None = None, N: int = 12) -> LayerMatrix:
    """beta assembled column by column from its closed-form entries."""
    _check_inputs(alpha, alpha_inv, I)
    return _beta_closed(_Ctx(alpha, alpha_inv, I, sched or LayerSchedule(), N))


# --------------------------------------------------------------------------
# Verification


@dataclass
class VanishReport:
    input_hsize: Fraction
    inverse_hsize: Fraction
    schedule: list
    N: int
    window: Window
    interval: IntervalSpec
    shift: Fraction = Fraction(0)
    flags: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)
    beta_is_identity: bool = False

    @property
    def ok(self) -> bool:
        return bool(self.flags) and all(self.flags.values())

    def to_json(self) -> dict:
        def blk(p, q, m):
            return {"from": p.to_json(), "to": q.to_json(),
                    "matrix": None if m is None else m.to_json()}
        return {
            "input_hsize": str(self.input_hsize),
            "inverse_hsize": str(self.inverse_hsize),
            "interval": str(self.interval.a),
            "shift": str(self.shift),
            "schedule": [str(v) for v in self.schedule],
            "N": self.N,
            "window": {k: str(getattr(self.window, k)) for k in ("x0", "x1", "t0", "t1")},
            "flags": dict(self.flags),
            "beta_is_identity": self.beta_is_identity,
            "counterexamples": {k: [blk(*e) for e in v[:20]] for k, v in self.counterexamples.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> VanishReport:
        from .rings import to_scalar
        w = d["window"]
        return cls(to_scalar(d["input_hsize"]), to_scalar(d["inverse_hsize"]),
                   [to_scalar(v) for v in d["schedule"]], int(d["N"]),
                   Window(*(to_scalar(w[k]) for k in ("x0", "x1", "t0", "t1"))),
                   IntervalSpec(to_scalar(d["interval"])), to_scalar(d["shift"]),
                   dict(d["flags"]), {}, bool(d.get("beta_is_identity", False)))

    def summary_lines(self) -> list[str]:
        lines = [f"hsize(alpha) = {self.input_hsize}", f"hsize(alpha^-1) = {self.inverse_hsize}",
                 f"layers N = {self.N}", f"shift = {self.shift}"]
        lines += [f"{k}: {'true' if v else 'false'}" for k, v in self.flags.items()]
        return lines


def layers_needed(sched: LayerSchedule, t_max) -> int:
    """Smallest N with t_max < tau_(N-1)."""
    N = 2
    while sched.tau(N - 1) <= t_max:
        N += 1
    return N


def default_window(I: IntervalSpec, t_max=10) -> Window:
    return Window(I.a - 1, I.a + 2, 1, t_max)


def verify_vanishing(alpha: GeoMorphism, alpha_inv: GeoMorphism | None = None,
                     I: IntervalSpec = IntervalSpec(), sched: LayerSchedule | None = None,
                     N: int | None = None, w: Window | None = None,
                     shift_applied=Fraction(0)) -> VanishReport:
    if alpha_inv is None:
        alpha_inv = invert_if_monomial(alpha)
    _check_inputs(alpha, alpha_inv, I)
    w = w or default_window(I)
    K = max(sizes(alpha).vsize, sizes(alpha_inv).vsize)
    if sched is None:
        sched = select_schedule(alpha, K, layers_needed(LayerSchedule(), w.t1), alpha_inv, I)
    need = layers_needed(sched, w.t1)
    if N is None:
        N = need
    elif N < need:
        raise ValueError(f"window top {w.t1} needs at least {need} layers (got {N})")

    ctx = _Ctx(alpha, alpha_inv, I, sched, N)
    em = _build(ctx)
    prod = _beta_product(ctx, em).flatten()
    closed_form = _beta_closed(ctx).flatten()

    report = VanishReport(sizes(alpha).hsize, sizes(alpha_inv).hsize, sched.prefix(N), N, w, I,
                          Fraction(shift_applied))

    diff = equal_within(prod, closed_form, w, source_only=True)
    report.flags["beta_matches_closed_form"] = not diff
    report.counterexamples["beta_matches_closed_form"] = [(p, q, m) for p, q, m, _ in diff]

    half = I.midpoint_interval()
    crossing = [(p, q, m) for p, q, m in materialize_blocks(prod, w)
                if w.contains(q) and _crosses(half, prod.group, p, q)]
    report.flags["beta_restricts"] = not crossing and restricts_to_interval(prod.source, half)
    report.counterexamples["beta_restricts"] = crossing

    V = subspace_V(I, sched, N, prod.group)
    bad_v = identity_on_violations(prod, V, w)
    report.flags["beta_identity_on_V"] = not bad_v
    report.counterexamples["beta_identity_on_V"] = bad_v

    ident = LayerMatrix.identity(ctx.layers)
    inverses_ok = all(not (x @ y - ident).blocks for x, y in (
        (em.eta, em.eta_inv), (em.eta_inv, em.eta), (em.mu, em.mu_inv), (em.mu_inv, em.mu)))
    nilpotent = all(f.is_nilpotent() for f in em.eta_witness.factors + em.mu_witness.factors)
    report.flags["eta_mu_invertible"] = inverses_ok and nilpotent

    report.beta_is_identity = not equal_within(prod, GeoMorphism.identity(prod.source), w,
                                               source_only=True)
    return report


def run_vanishing(alpha: GeoMorphism, alpha_inv: GeoMorphism | None = None,
                  I: IntervalSpec = IntervalSpec(), N: int | None = None,
                  w: Window | None = None) -> VanishReport:
    """Pre-shift when needed, then verify; the applied offset is recorded in the report."""
    if alpha_inv is None:
        alpha_inv = invert_if_monomial(alpha)
    off = Fraction(0)
    if needs_shift(alpha, I):
        alpha, alpha_inv, off = preshift(alpha, alpha_inv, I)
    return verify_vanishing(alpha, alpha_inv, I, None, N, w, off)


__all__ = [
    "SMALL", "invert_if_monomial", "preshift_offset", "preshift", "needs_shift",
    "select_schedule", "schedule_condition_holds", "BlockElementary", "BlockWitness", "EtaMu",
    "build_eta_mu", "build_beta_product", "build_beta_closed", "VanishReport",
    "verify_vanishing", "run_vanishing", "layers_needed", "default_window",
]
