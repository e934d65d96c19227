from fractions import Fraction

import pytest

from hermsiegel.decomp import (
    FlatPair,
    _pden_sum_full,
    _pden_sum_horizontal,
    diff_identity_check,
    flat_coset_grid,
    fourier_pden_perp,
    in_support_N,
    m_of_flat,
    norm_class_reps,
    pden_horizontal,
    pden_horizontal_reference,
    pden_vertical,
    pden_x,
    support_bound_check,
)
from hermsiegel.errors import EvenValuation, PreconditionViolated
from hermsiegel.lattice import flat_from_invariants


def perp_scaled(F, Lf, w, vx):
    v0 = int(Lf.space.vector_val(w))
    assert (vx - v0) % 2 == 0, "valuation not reachable on the perpendicular line"
    return tuple(F.elem(Fraction(F.p) ** ((vx - v0) // 2)) * c for c in w)


def test_pden_values(F3):
    Lf, w = flat_from_invariants(F3, (0,), "nonsplit")
    fp = FlatPair(Lf, perp_scaled(F3, Lf, w, 1))
    assert pden_x(fp) == 1
    assert pden_horizontal(fp) == 1
    assert pden_vertical(fp) == 0


def test_pden_nonintegral_vanishes(F3):
    Lf, w = flat_from_invariants(F3, (0,), "nonsplit")
    fp = FlatPair(Lf, perp_scaled(F3, Lf, w, -1))
    assert pden_x(fp) == 0
    assert pden_horizontal(fp) == 0
    assert pden_vertical(fp) == 0


def test_pden_rank1_flat_cancellation(F3):
    # flat <p^3> in dimension 2: perpendicular unit vector gives the lattice
    # <1> + <p^3>, whose derived density equals that of <p^3>
    Lf, w = flat_from_invariants(F3, (3,), "nonsplit")
    fp = FlatPair(Lf, perp_scaled(F3, Lf, w, 0))
    assert pden_x(fp) == 2


def test_even_valuation_gate(F3):
    Lf, w = flat_from_invariants(F3, (0,), "split")
    fp = FlatPair(Lf, perp_scaled(F3, Lf, w, 2))
    with pytest.raises(EvenValuation):
        pden_x(fp)
    with pytest.raises(EvenValuation):
        pden_vertical(fp)


def test_fast_horizontal_matches_reference(F3, rng):
    for invs, kind in [((0,), "nonsplit"), ((1,), "nonsplit"), ((1, 1), "nonsplit"), ((1, 2), "split"), ((0, 1, 2), "nonsplit")]:
        Lf, w = flat_from_invariants(F3, invs, kind)
        for j in (0, 1, 2):
            x = tuple(F3.elem(Fraction(3) ** j) * c for c in w)
            fp = FlatPair(Lf, x)
            assert _pden_sum_horizontal(fp, 10**8) == pden_horizontal_reference(fp)
            xt = tuple(x[k] + Lf.dual().column(0)[k] for k in range(len(x)))
            fp2 = FlatPair(Lf, xt)
            assert _pden_sum_horizontal(fp2, 10**8) == pden_horizontal_reference(fp2)


def test_translation_invariance(F3, rng):
    Lf, w = flat_from_invariants(F3, (1, 1), "nonsplit")
    x = perp_scaled(F3, Lf, w, 1)
    base_full = _pden_sum_full(FlatPair(Lf, x), 10**8)
    base_h = _pden_sum_horizontal(FlatPair(Lf, x), 10**8)
    for _ in range(5):
        lam = tuple(
            sum((F3.elem(rng.randint(-5, 5), rng.randint(-5, 5)) * Lf.basis[i][j] for j in range(Lf.rank)), start=F3.zero)
            for i in range(Lf.dim)
        )
        xt = tuple(a + b for a, b in zip(x, lam))
        assert _pden_sum_full(FlatPair(Lf, xt), 10**8) == base_full
        assert _pden_sum_horizontal(FlatPair(Lf, xt), 10**8) == base_h


def test_support_set(F3):
    Lf, w = flat_from_invariants(F3, (1, 1), "nonsplit")
    assert in_support_N(FlatPair(Lf, Lf.column(0)))
    assert not in_support_N(FlatPair(Lf, perp_scaled(F3, Lf, w, -1)))
    # functions vanish outside the support
    for vx in (-1, -3):
        fp = FlatPair(Lf, perp_scaled(F3, Lf, w, vx))
        assert _pden_sum_full(fp, 10**8) == 0
        assert _pden_sum_horizontal(fp, 10**8) == 0


def test_m_of_flat_parity(F3):
    for invs, kind in [((1, 1), "nonsplit"), ((1, 2), "split"), ((0, 2), "split")]:
        Lf, _ = flat_from_invariants(F3, invs, kind)
        aux = m_of_flat(Lf)
        assert aux.e_max == max(invs)
        assert aux.u_val in (aux.e_max, aux.e_max + 1)
        assert aux.m_of_flat.contains_lattice(Lf)


def test_support_bound_equivalence(F3):
    Lf, w = flat_from_invariants(F3, (1, 2), "nonsplit")
    grid = flat_coset_grid(Lf, w, [-1, 0, 1, 2])
    for x in grid[:160]:
        assert support_bound_check(FlatPair(Lf, x))
    # defining vector and flat vectors are inside
    aux = m_of_flat(Lf)
    u = aux.m_of_flat.column(aux.m_of_flat.rank - 1)
    assert support_bound_check(FlatPair(Lf, u))


def test_diff_identities(F3):
    for invs, kind in [((0,), "split"), ((1,), "nonsplit"), ((0, 2), "split"), ((1, 1), "split"), ((1, 2), "nonsplit")]:
        Lf, w = flat_from_invariants(F3, invs, kind)
        v0 = int(Lf.space.vector_val(w))
        e = max(invs)
        vx = e + 1 if (e + 1 - v0) % 2 == 0 else e + 2
        fp = FlatPair(Lf, perp_scaled(F3, Lf, w, vx))
        assert diff_identity_check(fp) == (True, True)


def test_diff_precondition(F3):
    Lf, w = flat_from_invariants(F3, (2,), "split")
    with pytest.raises(PreconditionViolated):
        diff_identity_check(FlatPair(Lf, perp_scaled(F3, Lf, w, 0)))


def test_vertical_stability(F3):
    # vertical part is stable under shrinking x once val(x) >= e_max + 2
    Lf, w = flat_from_invariants(F3, (1, 1), "nonsplit")
    v_hi = 5  # e_max + 4, odd parity line
    x = perp_scaled(F3, Lf, w, v_hi)
    x2 = perp_scaled(F3, Lf, w, v_hi - 2)
    assert pden_vertical(FlatPair(Lf, x)) == pden_vertical(FlatPair(Lf, x2))


def test_vanishing_theorem(F3):
    for invs, kind in [((0,), "split"), ((1,), "nonsplit"), ((0, 1), "nonsplit"), ((2, 2), "split"), ((1, 2), "split"), ((0, 1, 2), "nonsplit")]:
        Lf, w = flat_from_invariants(F3, invs, kind)
        v0 = int(Lf.space.vector_val(w))
        vx = -2 if v0 % 2 == 0 else -1
        hf, hh = fourier_pden_perp(FlatPair(Lf, perp_scaled(F3, Lf, w, vx)))
        assert hf == hh


def test_fourier_selfdual_flat(F3):
    # for a self-dual flat both transforms reduce to the single term
    Lf, w = flat_from_invariants(F3, (0, 0), "split")
    fp = FlatPair(Lf, perp_scaled(F3, Lf, w, -2))
    hf, hh = fourier_pden_perp(fp)
    assert hf == hh
    q = 3
    pref = Fraction(q) ** (-2) / (1 - Fraction(1, q * q))
    assert hh == pref * 1


def test_fourier_perp_preconditions(F3):
    Lf, w = flat_from_invariants(F3, (1,), "nonsplit")
    with pytest.raises(PreconditionViolated):
        fourier_pden_perp(FlatPair(Lf, perp_scaled(F3, Lf, w, 2)))


def test_norm_class_reps_sizes(F3):
    # one zero class plus unit-norm classes at each level
    reps = norm_class_reps(F3, 2)
    assert len(reps) == 1 + 6 + 2
    vals = sorted({(F3.elem(0) + r).valuation() for r in reps if not r.is_zero()})
    assert vals == [0, 1]


def test_grid_compression_consistency(F3):
    # compressed and full grids give the same value multisets for an
    # isometry-invariant quantity
    Lf, w = flat_from_invariants(F3, (1,), "nonsplit")
    gridc = flat_coset_grid(Lf, w, [1], compress=True)
    gridf = flat_coset_grid(Lf, w, [1], compress=False)
    valsc = {pden_x(FlatPair(Lf, x)) for x in gridc}
    valsf = {pden_x(FlatPair(Lf, x)) for x in gridf}
    assert valsc == valsf
