import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctrlk.acceptance import (
    random_invertible, random_laurent_matrix, random_subspace, random_window_module,
    random_window_morphism, x_partition,
)
from ctrlk.geo import (
    CYCLIC, DIHEDRAL_GROUP, TRIVIAL, Box, GeoModule, GeoMorphism, Interval, Point,
    SubspaceSpec, Window, check_equivariance, closed, compose, d_matrix, grid_module,
    is_identity_on, is_zero_on, materialize, matrix_size, matrix_size_breakdown,
    matrix_to_morphism, pt, restrict_block, shift, sizes, to_window, u_functor, v_functor,
)
from ctrlk.reps import s_morphism, xi_morphism
from ctrlk.rings import (
    DIHEDRAL, LAURENT, QQ, T, DihedralElem, LaurentPoly, RingMatrix, block_diag, laurent_matrix,
    scalar_matrix,
)
from ctrlk.squeeze import IntervalSpec

from oracles import grid_matrix_size, scan_sizes, translated_points

Q = Fraction
ONE = RingMatrix(QQ, [[1]])
P = GeoModule(CYCLIC, {pt(0): 1})
gamma = GeoMorphism(P, P, {(pt(0), pt(1)): ONE})


def seeds():
    return st.integers(0, 10 ** 6)


# -- modules and materialization -------------------------------------------


def test_materialize_integers():
    got = [p.x for p, _ in materialize(P, Window(-2, 2, 1, 1))]
    assert got == [-2, -1, 0, 1, 2]


def test_materialize_empty():
    assert materialize(GeoModule(CYCLIC, {}), Window(-5, 5, 1, 9)) == []


def test_materialize_dihedral_both_copies():
    A = GeoModule(DIHEDRAL_GROUP, {pt(0): 1})
    got = [(p.copy, p.x) for p, _ in materialize(A, Window(0, 1, 1, 1))]
    assert got == [(0, 0), (0, 1), (1, 0), (1, 1)]


@given(st.sampled_from([CYCLIC, DIHEDRAL_GROUP]),
       st.lists(st.tuples(st.integers(0, 11), st.integers(1, 3)), min_size=1, max_size=4,
                unique_by=lambda e: e[0]))
def test_materialize_matches_explicit_translates(group, data):
    A = GeoModule(group, {pt(Q(i, 12), t): 1 for i, t in data})
    w = Window(-2, 2, 1, 3)
    got = {(p.copy, p.x, p.t) for p, _ in materialize(A, w)}
    want = {e for e in translated_points(A, radius=4) if -2 <= e[1] <= 2}
    assert got == want


def test_module_rejects_non_representatives():
    with pytest.raises(ValueError):
        GeoModule(CYCLIC, {pt(1): 1})
    with pytest.raises(ValueError):
        GeoModule(DIHEDRAL_GROUP, {pt(Q(1, 2), copy=1): 1})
    with pytest.raises(ValueError):
        GeoModule(CYCLIC, {pt(0): 0})


def test_point_height_at_least_one():
    with pytest.raises(ValueError):
        Point(0, 0, Q(1, 2))


def test_from_points_canonicalizes():
    A = GeoModule.from_points(CYCLIC, [(pt(Q(7, 3)), 1), (pt(Q(1, 3)), 2)])
    assert A.orbit_data == {pt(Q(1, 3)): 3}


def test_module_json_round_trip():
    A = GeoModule(DIHEDRAL_GROUP, {pt(Q(1, 4), 2): 3, pt(0): 1})
    assert GeoModule.from_json(A.to_json()) == A


# -- morphisms -------------------------------------------------------------


def test_compose_examples():
    xi = xi_morphism(4)
    assert compose(GeoMorphism.identity(xi.source), xi) == xi
    assert compose(gamma, gamma) == GeoMorphism(P, P, {(pt(0), pt(2)): ONE})
    assert compose(xi_morphism(2), xi_morphism(2, inverse=True)) == \
        GeoMorphism.identity(grid_module(2))


def test_compose_mismatch():
    with pytest.raises(ValueError):
        compose(xi_morphism(2), xi_morphism(3))


def test_block_shape_checked():
    with pytest.raises(ValueError):
        GeoMorphism(P, P, {(pt(0), pt(1)): RingMatrix(QQ, [[1, 2]])})
    with pytest.raises(ValueError):
        GeoMorphism(P, P, {(pt(0), pt(Q(1, 2))): ONE})


def test_morphism_json_round_trip():
    f = xi_morphism(5)
    assert GeoMorphism.from_json(f.to_json()) == f


# -- restriction calculus ---------------------------------------------------


def test_restrict_examples():
    f = xi_morphism(3)
    everything, nothing = SubspaceSpec.everything(), SubspaceSpec.nothing()
    assert restrict_block(f, everything, everything) == f
    assert restrict_block(f, nothing, everything) == GeoMorphism.zero(f.source)
    Y = SubspaceSpec((Box(closed(0, Q(1, 2))),), periodic=True)
    assert restrict_block(gamma, Y, Y) == GeoMorphism(P, P, {(pt(0), pt(1)): ONE})
    Y2 = SubspaceSpec((Box(Interval(0, Q(1, 2), False, True)),), periodic=True)
    assert restrict_block(gamma, Y2, Y2) == GeoMorphism.zero(P)


def test_restrict_rejects_non_invariant_spec():
    Y = SubspaceSpec((Box(closed(0, 1)),), periodic=False)
    with pytest.raises(ValueError):
        restrict_block(gamma, Y, Y)


def test_identity_and_zero_predicates():
    Y = SubspaceSpec.everything()
    assert is_identity_on(GeoMorphism.identity(P), Y)
    assert is_zero_on(GeoMorphism.zero(P), Y)
    assert not is_identity_on(gamma, Y)
    with pytest.raises(ValueError):
        is_identity_on(GeoMorphism.zero(P, grid_module(2)), Y)


def test_identity_on_needs_diagonal_blocks():
    A = GeoModule(TRIVIAL, {pt(Q(1, 2)): 1})
    Y = SubspaceSpec((Box(),), group=TRIVIAL)
    assert not is_identity_on(GeoMorphism.zero(A), Y)


def _random_setting(seed):
    rng = random.Random(seed)
    I = IntervalSpec(0)
    A, B, C = (random_window_module(rng, I) for _ in range(3))
    return rng, A, B, C


@given(seeds())
@settings(max_examples=40, deadline=None)
def test_restriction_additive(seed):
    rng, A, B, _ = _random_setting(seed)
    f1, f2 = random_window_morphism(rng, A, B), random_window_morphism(rng, A, B)
    Y, Z = random_subspace(rng), random_subspace(rng)
    assert restrict_block(f1 + f2, Y, Z) == restrict_block(f1, Y, Z) + restrict_block(f2, Y, Z)


@given(seeds())
@settings(max_examples=40, deadline=None)
def test_restriction_composition_decomposes(seed):
    rng, A, B, C = _random_setting(seed)
    f, g = random_window_morphism(rng, A, B), random_window_morphism(rng, B, C)
    Y, Z = random_subspace(rng), random_subspace(rng)
    parts = x_partition(sorted({Q(rng.randint(1, 11), 12) for _ in range(3)}))
    total = GeoMorphism.zero(A, C)
    for X in parts:
        total = total + compose(restrict_block(g, X, Z), restrict_block(f, Y, X))
    assert total == restrict_block(compose(g, f), Y, Z)


@given(seeds())
@settings(max_examples=40, deadline=None)
def test_identity_and_zero_composition(seed):
    rng, A, B, _ = _random_setting(seed)
    Y, Z = random_subspace(rng), random_subspace(rng)
    e = random_window_morphism(rng, A, A)
    off_Y = restrict_block(e, Y.invert(), Y.invert())
    diag = GeoMorphism(A, A, {(p, p): RingMatrix.identity(QQ, A.rank(p))
                              for p in A.points if p in Y}, canonical=True)
    h = random_window_morphism(rng, A, B)
    assert is_identity_on(off_Y + diag, Y)
    assert restrict_block(compose(h, off_Y + diag), Y, Z) == restrict_block(h, Y, Z)
    assert is_zero_on(off_Y, Y)
    assert restrict_block(compose(h, off_Y), Y, Z) == GeoMorphism.zero(A, B)


# -- sizes -----------------------------------------------------------------


def test_size_examples():
    assert sizes(gamma).size == 1
    for n in (2, 3, 7):
        assert sizes(xi_morphism(n)).size == Q(1, n)
    assert sizes(s_morphism()).size == 0
    assert sizes(GeoMorphism.zero(P)) == sizes(GeoMorphism.zero(grid_module(3)))
    assert sizes(GeoMorphism.zero(P)).vsize == 0


@given(seeds(), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_sizes_match_translate_scan(seed, n):
    A = random_laurent_matrix(random.Random(seed), n)
    f = v_functor(A, n)
    h, v = scan_sizes(f)
    assert sizes(f).hsize == h and sizes(f).vsize == v


@given(seeds())
@settings(max_examples=40, deadline=None)
def test_size_subadditive(seed):
    rng, A, B, C = _random_setting(seed)
    f, g = random_window_morphism(rng, A, B), random_window_morphism(rng, B, C)
    gf = sizes(compose(g, f))
    assert gf.size <= sizes(g).size + sizes(f).size
    assert gf.vsize <= sizes(g).vsize + sizes(f).vsize


# -- the matrix functors ---------------------------------------------------


def test_u_functor_examples():
    assert u_functor(gamma) == laurent_matrix([[T]])
    assert u_functor(GeoMorphism.identity(grid_module(3))).is_identity()
    assert u_functor(s_morphism()) == RingMatrix(DIHEDRAL, [[DihedralElem.s()]])
    assert u_functor(xi_morphism(3)) == laurent_matrix([[0, 0, T], [1, 0, 0], [0, 1, 0]])


def test_u_functor_needs_height_one():
    A = GeoModule(CYCLIC, {pt(0, 2): 1})
    with pytest.raises(ValueError):
        u_functor(GeoMorphism.identity(A))


def test_v_functor_examples():
    assert v_functor(laurent_matrix([[T]]), 1) == gamma
    assert v_functor(RingMatrix.identity(LAURENT, 4), 4) == GeoMorphism.identity(grid_module(4))
    assert v_functor(u_functor(xi_morphism(3)), 3) == xi_morphism(3)
    with pytest.raises(ValueError):
        v_functor(RingMatrix.identity(LAURENT, 3), 2)


@given(seeds(), st.integers(1, 6))
@settings(max_examples=50, deadline=None)
def test_functor_round_trips(seed, n):
    A = random_laurent_matrix(random.Random(seed), n)
    f = v_functor(A, n)
    assert u_functor(f) == A
    assert v_functor(u_functor(f), n) == f


def test_v_functor_with_rank():
    B = block_diag(laurent_matrix([[1, T], [0, 1]]), RingMatrix.identity(LAURENT, 2))
    f = v_functor(B, 2)
    assert f.source.rank(pt(0)) == 2
    assert u_functor(f) == B


def test_u_functor_dihedral_anti_multiplicative():
    assert u_functor(compose(s_morphism(), s_morphism())).is_identity()
    r = u_functor(xi_morphism(1, DIHEDRAL_GROUP))
    s = u_functor(s_morphism())
    # composition order flips under the dihedral translation
    assert u_functor(compose(s_morphism(), xi_morphism(1, DIHEDRAL_GROUP))) == r * s
    assert r * s != s * r


def test_matrix_to_morphism_inverts_u():
    f = xi_morphism(4)
    assert matrix_to_morphism(u_functor(f), f.source, f.target) == f


def test_d_matrix_examples():
    assert d_matrix(0, 2) == scalar_matrix([[0, Q(1, 2)], [Q(1, 2), 0]])
    assert d_matrix(2, 3).row(0) == (2, Q(5, 3), Q(4, 3))
    assert d_matrix(-1, 2) == d_matrix(1, 2).transpose()


@given(st.integers(-5, 5), st.integers(1, 7))
def test_d_matrix_transpose_law(k, n):
    assert d_matrix(-k, n) == d_matrix(k, n).transpose()


def test_matrix_size_examples():
    assert matrix_size(laurent_matrix([[T]]), 1) == 1
    assert matrix_size(RingMatrix.identity(LAURENT, 4), 4) == 0
    assert matrix_size(u_functor(xi_morphism(3)), 3) == Q(1, 3)
    assert matrix_size_breakdown(u_functor(xi_morphism(3)), 3) == {0: Q(1, 3), 1: Q(1, 3)}
    with pytest.raises(ValueError):
        matrix_size(RingMatrix.identity(LAURENT, 3), 2)


@given(seeds(), st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_matrix_size_agrees_with_geometry(seed, n):
    A = random_laurent_matrix(random.Random(seed), n)
    assert matrix_size(A, n) == sizes(v_functor(A, n)).size == grid_matrix_size(A, n)


@given(seeds(), st.integers(1, 4), st.integers(0, 4))
@settings(max_examples=40, deadline=None)
def test_stabilization_scaling(seed, n, m):
    B = random_invertible(random.Random(seed), n)
    big = block_diag(B, RingMatrix.identity(QQ, m)) if m else B
    assert matrix_size(big, n + m) == Q(n, n + m) * matrix_size(B, n)


# -- shifts and equivariance -----------------------------------------------


def test_shift_examples():
    assert shift(P, Q(1, 7)).points == (pt(Q(1, 7)),)
    xi = xi_morphism(3)
    assert sizes(shift(xi, Q(1, 7))) == sizes(xi)
    assert shift(xi, 0) is xi


@given(st.fractions(min_value=-3, max_value=3, max_denominator=12))
def test_shift_preserves_composition(offset):
    f, g = xi_morphism(3), xi_morphism(3, inverse=True)
    assert compose(shift(g, offset), shift(f, offset)) == shift(compose(g, f), offset)


def test_dihedral_shift_runs_backwards_on_copy_one():
    A = GeoModule(DIHEDRAL_GROUP, {pt(0): 1})
    B = shift(A, Q(1, 7))
    w = Window(-1, 1, 1, 1)
    xs = {(p.copy, p.x) for p, _ in materialize(B, w)}
    assert (0, Q(1, 7)) in xs and (1, Q(-1, 7)) in xs


def test_equivariance_examples():
    w = Window(-2, 2, 1, 2)
    assert check_equivariance(xi_morphism(3), w)
    assert check_equivariance(s_morphism(), w)
    local = to_window(xi_morphism(3), w)
    key = next(iter(local.blocks))
    bent = GeoMorphism(local.source, local.target,
                       {**local.blocks, key: local.blocks[key].scale(2)},
                       canonical=True)
    assert check_equivariance(local, w, CYCLIC)
    assert not check_equivariance(bent, w, CYCLIC)
