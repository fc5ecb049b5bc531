import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from ctrlk.acceptance import INTERVALS, random_identity_on_U, random_window_module, random_window_morphism
from ctrlk.geo import (
    CYCLIC, DIHEDRAL_GROUP, TRIVIAL, GeoModule, GeoMorphism, Point, PreconditionError, Window,
    check_equivariance, compose, pt, shift, sizes,
)
from ctrlk.reps import xi_morphism
from ctrlk.rings import QQ, RingMatrix
from ctrlk.squeeze import (
    DEFAULT_SCHEDULE, IntervalSpec, LayerMatrix, LayerSchedule, clip, f_apply, f_invert,
    flasque_check, flasque_iso, flasque_layers, lemma_identity_check, layer_iso,
    restricts_to_interval, squeeze_layer, squeeze_point, squeeze_total, subspace_U, subspace_V,
)

Q = Fraction
I0 = IntervalSpec(0)
ONE = RingMatrix(QQ, [[1]])
intervals = st.sampled_from(INTERVALS)
xs = st.fractions(min_value=-4, max_value=4, max_denominator=24)


def endpoint_interpolation(a, n, x):
    """f_n on the closed translate [a+k, a+k+1] as the segment joining the images
    of its two ends."""
    k = math.floor(x - a)
    lam = x - a - k
    mid = a + k + Q(1, 2)
    left, right = mid - Q(1, 2 * n), mid + Q(1, 2 * n)
    return (1 - lam) * left + lam * right


# -- f_n -------------------------------------------------------------------


def test_f_examples():
    for x in (Q(-7, 3), Q(0), Q(1, 8), Q(5, 2)):
        assert f_apply(I0, 1, x) == x
    assert f_apply(I0, 2, Q(1, 2)) == Q(1, 2)
    assert f_apply(I0, 2, Q(1, 8)) == Q(5, 16)


@given(intervals, st.integers(1, 12), xs)
def test_f_matches_endpoint_interpolation(I, n, x):
    assert f_apply(I, n, x) == endpoint_interpolation(I.a, n, x)


@given(intervals, st.integers(1, 12), xs)
def test_f_periodic_and_invertible(I, n, x):
    assert f_apply(I, n, x + 1) == f_apply(I, n, x) + 1
    assert f_invert(I, n, f_apply(I, n, x)) == x
    assert f_invert(I, n, f_apply(I, n, x, 1), 1) == x


def test_f_invert_outside_image():
    with pytest.raises(ValueError):
        f_invert(I0, 4, Q(1, 10))


@given(intervals, st.integers(1, 8), xs, st.integers(-3, 3), st.integers(0, 1))
def test_squeeze_commutes_with_dihedral_action(I, n, x, m, s):
    p = Point(0, x, 2)
    assume(not I.on_boundary(x))
    g = (m, s)
    lhs = squeeze_point(DIHEDRAL_GROUP.act(g, p), I, DEFAULT_SCHEDULE, n)
    rhs = DIHEDRAL_GROUP.act(g, squeeze_point(p, I, DEFAULT_SCHEDULE, n))
    assert lhs == rhs


# -- schedules -------------------------------------------------------------


def test_schedule_defaults_and_validation():
    assert DEFAULT_SCHEDULE.prefix(4) == [1, 2, 3, 4]
    s = LayerSchedule(step=2, values=(1, Q(3, 2)))
    assert s.prefix(4) == [1, Q(3, 2), Q(7, 2), Q(11, 2)]
    assert s.layer_of_height(4, 10) == 3
    with pytest.raises(ValueError):
        LayerSchedule(values=(2, 3))
    with pytest.raises(ValueError):
        LayerSchedule(values=(1, 1))
    with pytest.raises(ValueError):
        LayerSchedule(step=0)


# -- restriction to I and clipping ----------------------------------------


def test_restricts_examples():
    A = GeoModule(CYCLIC, {pt(Q(1, 3)): 1})
    assert restricts_to_interval(GeoMorphism.identity(A), I0)
    P = GeoModule(CYCLIC, {pt(Q(1, 2)): 1})
    gamma = GeoMorphism(P, P, {(pt(Q(1, 2)), pt(Q(3, 2))): ONE})
    assert not restricts_to_interval(gamma, I0)
    assert clip(gamma, I0) == GeoMorphism.zero(P)


def test_boundary_support_rejected():
    P = GeoModule(CYCLIC, {pt(0): 1})
    assert not restricts_to_interval(P, I0)
    assert not restricts_to_interval(GeoMorphism.identity(P), I0)
    with pytest.raises(PreconditionError):
        squeeze_layer(P, I0, DEFAULT_SCHEDULE, 2)


def test_clip_shifted_xi():
    n = 5
    f = shift(xi_morphism(n), Q(1, 2 * n))
    c = clip(f, I0)
    assert restricts_to_interval(c, I0)
    dropped = set(f.blocks) - set(c.blocks)
    assert len(dropped) == 1
    (p, q), = dropped
    assert math.floor(p.x) != math.floor(q.x)
    assert sizes(c).hsize <= sizes(f).hsize


@given(st.integers(2, 12), st.sampled_from([CYCLIC, DIHEDRAL_GROUP]), intervals)
def test_clip_idempotent(n, group, I):
    f = shift(xi_morphism(n, group), I.a + Q(1, 4 * n))
    c = clip(f, I)
    assert clip(c, I) == c
    assert restricts_to_interval(c, I)
    assert (clip(f, I) == f) == restricts_to_interval(f, I)


# -- layers ----------------------------------------------------------------


def test_layer_examples():
    A = GeoModule(CYCLIC, {pt(Q(1, 3)): 2})
    assert squeeze_layer(A, I0, DEFAULT_SCHEDULE, 1) == A
    mid = GeoModule(CYCLIC, {pt(Q(1, 2)): 1})
    assert squeeze_layer(mid, I0, DEFAULT_SCHEDULE, 3).points == (pt(Q(1, 2), 3),)
    f = clip(shift(xi_morphism(4), Q(1, 16)), I0)
    for n in (1, 2, 5):
        assert sizes(squeeze_layer(f, I0, DEFAULT_SCHEDULE, n)).hsize == sizes(f).hsize / n


def test_squeeze_total_examples():
    mid = GeoModule(CYCLIC, {pt(Q(1, 2)): 1})
    assert squeeze_total(mid, I0, N=1).layers == (mid,)
    stack = squeeze_total(mid, I0, N=3)
    assert stack.module().points == (pt(Q(1, 2), 1), pt(Q(1, 2), 2), pt(Q(1, 2), 3))
    ident = squeeze_total(GeoMorphism.identity(mid), I0, N=4)
    assert ident.flatten() == GeoMorphism.identity(ident.module())


def _window_case(seed):
    rng = random.Random(seed)
    I = rng.choice(INTERVALS)
    A = random_window_module(rng, I)
    return rng, I, A


@given(st.integers(0, 10 ** 6), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_layer_functorial(seed, n):
    rng, I, A = _window_case(seed)
    f, g = random_window_morphism(rng, A, A), random_window_morphism(rng, A, A)
    S = lambda h: squeeze_layer(h, I, DEFAULT_SCHEDULE, n)  # noqa: E731
    assert S(compose(g, f)) == compose(S(g), S(f))
    assert S(GeoMorphism.identity(A)) == GeoMorphism.identity(S(A))
    assert sizes(S(f)).hsize * n == sizes(f).hsize


@given(st.integers(0, 10 ** 6), st.integers(1, 8))
@settings(max_examples=30, deadline=None)
def test_height_and_image_law(seed, n):
    _, I, A = _window_case(seed)
    SA = squeeze_layer(A, I, DEFAULT_SCHEDULE, n)
    for p in SA.points:
        assert p.t >= DEFAULT_SCHEDULE.tau(n)
        k = math.floor(p.x - I.a)
        mid = I.a + k + Q(1, 2)
        assert mid - Q(1, 2 * n) < p.x < mid + Q(1, 2 * n)


def test_equivariant_layers_stay_equivariant():
    f = clip(shift(xi_morphism(6, DIHEDRAL_GROUP), Q(1, 24)), I0)
    Sf = squeeze_layer(f, I0, DEFAULT_SCHEDULE, 3)
    assert check_equivariance(Sf, Window(-2, 2, 1, 4))


def test_layer_iso_examples():
    mid = GeoModule(CYCLIC, {pt(Q(1, 2)): 1})
    stack = squeeze_total(mid, I0, N=4)
    assert layer_iso(stack, 3, 3) == GeoMorphism.identity(stack.layer(3))
    assert layer_iso(stack, 1, 2).blocks == {(pt(Q(1, 2), 1), pt(Q(1, 2), 2)): ONE}
    assert compose(layer_iso(stack, 2, 4), layer_iso(stack, 1, 2)) == layer_iso(stack, 1, 4)
    with pytest.raises(IndexError):
        layer_iso(stack, 1, 5)


@given(st.integers(0, 10 ** 6), st.integers(1, 6))
@settings(max_examples=30, deadline=None)
def test_layer_iso_conjugates_layers(seed, n):
    rng, I, A = _window_case(seed)
    f = random_window_morphism(rng, A, A)
    stack = squeeze_total(f, I, N=n + 1)
    odd, even = stack.layer(n), stack.layer(n + 1)
    psi = layer_iso(stack, n, n + 1)
    back = layer_iso(stack, n + 1, n)
    assert compose(back, compose(even, psi)) == odd


# -- flasqueness -----------------------------------------------------------


def test_flasque_examples():
    empty = GeoModule(CYCLIC, {})
    fwd, bwd = flasque_iso(empty, I0, 4)
    assert not fwd.blocks and not bwd.blocks
    mid = GeoModule(TRIVIAL, {pt(Q(1, 2)): 1})
    fl, _ = flasque_layers(mid, I0, 4)
    assert sorted(fl.blocks) == [(1, 0), (2, 1), (3, 2), (4, 3)]
    assert fl.block(1, 0).blocks == {(pt(Q(1, 2), 1), pt(Q(1, 2), 1)): ONE}
    assert flasque_check(mid, I0, 4, Window(0, 1, 1, Q(7, 2)))


def test_flasque_fails_at_truncation_edge():
    mid = GeoModule(TRIVIAL, {pt(Q(1, 2)): 1})
    assert not flasque_check(mid, I0, 4, Window(0, 1, 1, 4))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_flasque_random(seed):
    _, I, A = _window_case(seed)
    assert flasque_check(A, I, 8, Window(I.a, I.a + 1, 1, Q(8) - Q(1, 100)))


def test_layer_matrix_checks_shapes():
    A = GeoModule(TRIVIAL, {pt(Q(1, 2)): 1})
    B = GeoModule(TRIVIAL, {pt(Q(1, 3)): 1})
    with pytest.raises(ValueError):
        LayerMatrix({1: A}, {1: A}, {(1, 1): GeoMorphism.identity(B)})
    with pytest.raises(ValueError):
        LayerMatrix({1: A}, {1: A}, {(2, 1): GeoMorphism.identity(A)})


# -- the U/V lemma ---------------------------------------------------------


def test_subspace_examples():
    U = subspace_U(I0)
    assert pt(Q(1, 3), 50) in U and pt(Q(2, 3)) in U and pt(Q(3, 10)) not in U
    assert pt(Q(4, 3), 2) in U
    V = subspace_V(I0, DEFAULT_SCHEDULE, 5)
    assert pt(Q(1, 2) + Q(1, 12), 2) in V and pt(Q(1, 2) - Q(1, 12), Q(5, 2)) in V
    assert pt(Q(1, 2) + Q(1, 12), 3) not in V
    assert pt(Q(1, 2) + Q(1, 11), 2) not in V
    assert pt(Q(1, 2), 1000) in V


@given(intervals, st.fractions(min_value=-2, max_value=2, max_denominator=60),
       st.fractions(min_value=1, max_value=12, max_denominator=4))
def test_V_inside_U(I, x, t):
    p = pt(x, t)
    if p in subspace_V(I, DEFAULT_SCHEDULE, 8):
        assert p in subspace_U(I)


def test_lemma_identity_examples():
    A = GeoModule(TRIVIAL, {pt(Q(1, 2)): 1, pt(Q(1, 10)): 2})
    assert lemma_identity_check(GeoMorphism.identity(A), I0, DEFAULT_SCHEDULE, 5)
    noisy = GeoMorphism(A, A, {(pt(Q(1, 2)), pt(Q(1, 2))): ONE,
                               (pt(Q(1, 10)), pt(Q(1, 10))): RingMatrix(QQ, [[2, 1], [0, 3]])},
                        canonical=True)
    assert lemma_identity_check(noisy, I0, DEFAULT_SCHEDULE, 5)
    broken = GeoMorphism(A, A, {(pt(Q(1, 10)), pt(Q(1, 2))): RingMatrix(QQ, [[1, 1]])},
                         canonical=True)
    with pytest.raises(PreconditionError):
        lemma_identity_check(broken, I0, DEFAULT_SCHEDULE, 5)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_lemma_identity_random(seed):
    rng = random.Random(seed)
    I = rng.choice(INTERVALS)
    gamma = random_identity_on_U(rng, I)
    assert lemma_identity_check(gamma, I, DEFAULT_SCHEDULE, 8)
