from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctrlk.geo import (
    CYCLIC, DIHEDRAL_GROUP, GeoModule, GeoMorphism, PreconditionError, Window, compose,
    is_identity_on, pt, sizes,
)
from ctrlk.reps import r_rep, squeeze_class, xi_rep
from ctrlk.rings import QQ, RingMatrix
from ctrlk.squeeze import IntervalSpec, LayerMatrix, LayerSchedule, clip, subspace_U
from ctrlk.vanish import (
    VanishReport, build_beta_closed, build_beta_product, build_eta_mu,
    invert_if_monomial, layers_needed, needs_shift, preshift, preshift_offset, run_vanishing,
    select_schedule, verify_vanishing,
)

Q = Fraction
I0 = IntervalSpec(0)


def shifted_xi(n, group=CYCLIC, I=I0):
    b = xi_rep(n) if group is CYCLIC else r_rep(n)
    return preshift(b.forward, b.inverse, I)[:2]


def small_identity():
    A = GeoModule(CYCLIC, {pt(Q(4 * i + 1, 20)): 1 for i in range(5)})
    return GeoMorphism.identity(A)


# -- inputs ----------------------------------------------------------------


def test_preshift_offset_for_xi31():
    b = xi_rep(31)
    assert preshift_offset(b.forward) == Q(1, 124)
    a, ai = shifted_xi(31)
    assert not needs_shift(a, I0)
    assert sizes(a) == sizes(b.forward)


def test_dihedral_preshift_keeps_size_small():
    a, ai = shifted_xi(31, DIHEDRAL_GROUP)
    assert sizes(a).hsize < Q(1, 30) and sizes(ai).hsize < Q(1, 30)
    assert not needs_shift(a, I0)


def test_invert_if_monomial():
    b = xi_rep(7)
    assert invert_if_monomial(b.forward) == b.inverse
    A = GeoModule(CYCLIC, {pt(Q(1, 3)): 2})
    nonmono = GeoMorphism(A, A, {(pt(Q(1, 3)), pt(Q(1, 3))): RingMatrix(QQ, [[1, 1], [0, 1]])})
    with pytest.raises(PreconditionError):
        invert_if_monomial(nonmono)


# -- schedules -------------------------------------------------------------


def test_select_schedule_examples():
    a, ai = shifted_xi(31)
    assert select_schedule(a, 0, 12, ai).prefix(5) == [1, 2, 3, 4, 5]
    zero = GeoMorphism.zero(small_identity().source)
    assert select_schedule(zero, 0, 12, zero).step == 1


def test_select_schedule_gives_up():
    lo, hi = pt(Q(1, 4), 1), pt(Q(1, 4) + Q(1, 31), 21)
    A = GeoModule(CYCLIC, {lo: 1, hi: 1})
    f = GeoMorphism(A, A, {(lo, hi): RingMatrix(QQ, [[1]])})
    with pytest.raises(PreconditionError):
        select_schedule(f, 20, 12, f, search_bound=8)
    with pytest.raises(PreconditionError):
        select_schedule(f, 0, 12, f)


def test_layers_needed():
    assert layers_needed(LayerSchedule(), 10) == 12
    assert layers_needed(LayerSchedule(step=2), 4) == 4


# -- eta, mu and beta ------------------------------------------------------


@pytest.fixture(scope="module")
def xi31_small():
    a, ai = shifted_xi(31)
    return a, ai, LayerSchedule(), 6


def test_eta_mu_structure(xi31_small):
    a, ai, sched, N = xi31_small
    em = build_eta_mu(a, ai, I0, sched, N)
    assert len(em.eta_witness) == 6 and len(em.mu_witness) == 6
    assert all(f.is_nilpotent() for f in em.eta_witness.factors + em.mu_witness.factors)
    ident = LayerMatrix.identity(em.layers)
    assert not (em.eta @ em.eta_inv - ident).blocks
    assert not (em.mu_inv @ em.mu - ident).blocks
    assert not (em.eta_witness.product() - em.eta).blocks


def test_beta_product_matches_closed_form(xi31_small):
    a, ai, sched, N = xi31_small
    prod = build_beta_product(a, ai, I0, sched, N)
    closed = build_beta_closed(a, ai, I0, sched, N)
    for j in range(1, N - 1):
        for i in range(1, N + 1):
            assert prod.block(i, j) == closed.block(i, j), (i, j)


def test_closed_form_row_pattern(xi31_small):
    a, ai, sched, N = xi31_small
    closed = build_beta_closed(a, ai, I0, sched, N)
    for (i, j) in closed.blocks:
        if j == 1:
            assert i in (1, 2)
        elif j % 2 == 0:
            assert i in (j - 1, j, j + 1, j + 2)
        else:
            assert i in (j - 2, j - 1, j, j + 1)


def test_identity_gives_identity_beta():
    one = small_identity()
    for build in (build_beta_product, build_beta_closed):
        beta = build(one, one, I0, LayerSchedule(), 6)
        assert beta.flatten() == GeoMorphism.identity(beta.flatten().source)


def test_clipped_products_identity_on_U():
    a, ai = shifted_xi(31)
    ab, aib = clip(a, I0), clip(ai, I0)
    U = subspace_U(I0)
    assert is_identity_on(compose(ab, aib), U)
    assert is_identity_on(compose(aib, ab), U)


# -- verification ----------------------------------------------------------


def test_verify_xi31_all_flags():
    a, ai = shifted_xi(31)
    rep = verify_vanishing(a, ai, I0, None, None, Window(-1, 2, 1, 6))
    assert rep.ok, rep.flags
    assert set(rep.flags) == {"beta_matches_closed_form", "beta_restricts",
                              "beta_identity_on_V", "eta_mu_invertible"}
    assert not rep.beta_is_identity


def test_verify_dihedral_xi():
    a, ai = shifted_xi(33, DIHEDRAL_GROUP)
    rep = verify_vanishing(a, ai, I0, None, None, Window(-1, 2, 1, 5))
    assert rep.ok, rep.flags


def test_verify_identity():
    one = small_identity()
    rep = verify_vanishing(one, one, I0, None, None, Window(-1, 2, 1, 6))
    assert rep.ok and rep.beta_is_identity


def test_verify_rejects_large_input():
    b = xi_rep(2)
    with pytest.raises(PreconditionError):
        verify_vanishing(b.forward, b.inverse)


def test_verify_rejects_unshifted_input():
    b = xi_rep(31)
    with pytest.raises(PreconditionError):
        verify_vanishing(b.forward, b.inverse)


def test_verify_rejects_wrong_inverse():
    a, _ = shifted_xi(31)
    with pytest.raises(PreconditionError):
        verify_vanishing(a, a)


def test_verify_rejects_short_stack():
    a, ai = shifted_xi(31)
    with pytest.raises(ValueError):
        verify_vanishing(a, ai, I0, None, 6, Window(-1, 2, 1, 10))


def test_truncation_edge_is_visible():
    # past tau_(N-1) the truncated product loses the closed form
    a, ai = shifted_xi(31)
    N = 6
    prod = build_beta_product(a, ai, I0, LayerSchedule(), N)
    closed = build_beta_closed(a, ai, I0, LayerSchedule(), N)
    assert any(prod.block(i, N) != closed.block(i, N) for i in range(1, N + 1))


def test_run_vanishing_shifts_and_records():
    b = xi_rep(31)
    rep = run_vanishing(b.forward, b.inverse, I0, None, Window(-1, 2, 1, 5))
    assert rep.ok and rep.shift == Q(1, 124)


def test_report_json_round_trip():
    one = small_identity()
    rep = verify_vanishing(one, one, I0, None, None, Window(-1, 2, 1, 4))
    back = VanishReport.from_json(rep.to_json())
    assert back.flags == rep.flags and back.N == rep.N and back.window == rep.window
    assert back.to_json()["schedule"] == rep.to_json()["schedule"]


@given(st.integers(31, 40), st.sampled_from([CYCLIC, DIHEDRAL_GROUP]),
       st.sampled_from([IntervalSpec(0), IntervalSpec(Q(1, 3))]))
@settings(max_examples=6, deadline=None)
def test_admissible_inputs_pass(n, group, I):
    a, ai = shifted_xi(n, group, I)
    rep = verify_vanishing(a, ai, I, None, None, Window(I.a - 1, I.a + 2, 1, 4))
    assert rep.ok, rep.flags


def test_class_squeezer_output_passes():
    b = squeeze_class(1, RingMatrix(QQ, [[1, 1], [0, 1]]), Q(1, 31))
    rep = run_vanishing(b.forward, b.inverse, I0, None, Window(-1, 2, 1, 4))
    assert rep.ok, rep.flags
