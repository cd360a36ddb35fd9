from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fundmod.fieldarray import FieldArray
from fundmod.fundament import (
    adjacency_action_on_chi, check_chi_actions, closure_check, combination_array,
    dual_eigen_action_check, dual_eigen_index, p_vector, q_eigen_action_check,
    q_norm_formula, q_vector, transition_matrix, zeta_table,
)
from fundmod.scheme import CycleScheme
from fundmod.tensorops import A, A_star, TensorVector, apply, inner_product, one_tensor_cubed

from conftest import BOTH, module_for, scheme_for


def brute_q(scheme, h, i, j):
    """|X| sum_x E_h x (x) E_i x (x) E_j x by explicit loops over complex entries."""
    n = scheme.n
    E = [e.to_complex() for e in scheme.bose_mesner.E]
    out = np.zeros((n, n, n), dtype=complex)
    for x in range(n):
        out += np.einsum("a,b,c->abc", E[h][:, x], E[i][:, x], E[j][:, x])
    return n * out


# --- P vectors -----------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 5, 8])
def test_p000_is_the_diagonal(n):
    s = CycleScheme.from_order(n)
    assert set(p_vector(s, 0, 0, 0).vector.entries()) == {(x, x, x) for x in range(n)}


def test_p111_vanishes_on_four_cycle():
    s = CycleScheme.from_order(4)
    assert p_vector(s, 1, 1, 1).vector.is_zero()
    assert s.p[1, 1, 1] == 0


def test_nonzero_p_count_four_cycle():
    assert len(module_for(2, "even").p_labels) == 10


@pytest.mark.parametrize("D, parity", [(2, "odd"), (3, "even")])
def test_chi_equals_p_of_its_profile(D, parity):
    fm = module_for(D, parity)
    for orb in fm.orbits:
        assert fm.chi_vector(orb.representative) == p_vector(fm.scheme, *orb.profile).vector


# --- Q vectors -----------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 5, 6])
def test_q000_is_scaled_all_ones(n):
    s = CycleScheme.from_order(n)
    assert q_vector(s, 0, 0, 0).vector == one_tensor_cubed(s).scale(Fraction(1, n))


def test_q012_vanishes_on_five_cycle():
    s = CycleScheme.from_order(5)
    assert q_vector(s, 0, 1, 2).vector.is_zero()


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_q_matches_explicit_loops(n):
    s = CycleScheme.from_order(n)
    fm = module_for(s.D, s.parity)
    for lab in fm.q_labels:
        got = fm.q_vector(lab).values.to_complex()
        assert np.abs(got - brute_q(s, *lab)).max() < 1e-9


@pytest.mark.parametrize("D, parity", [(2, "even"), (2, "odd"), (3, "odd")])
def test_q_eigen_action(D, parity):
    fm = module_for(D, parity)
    theta = fm.scheme.spectral.theta
    for lab in fm.q_labels:
        q = fm.q_vector(lab)
        assert apply(A(1), q) == q.scale(theta[lab[0]])
    assert q_eigen_action_check(fm)


@pytest.mark.parametrize("D, parity", [(2, "even"), (2, "odd"), (3, "even"), (4, "odd")])
def test_q_norms_follow_the_multiplicity_formula(D, parity):
    fm = module_for(D, parity)
    for lab, norm in zip(fm.q_labels, fm.q_norms.scalars()):
        assert norm == q_norm_formula(fm.scheme, lab)
        q = fm.q_vector(lab)
        assert inner_product(q, q) == norm


# --- dimension -----------------------------------------------------------------

@pytest.mark.parametrize("D, parity, dim", [(2, "even", 10), (2, "odd", 13), (3, "even", 20)])
def test_dimension_examples(D, parity, dim):
    fm = module_for(D, parity)
    assert fm.dimension == len(fm.p_labels) == len(fm.q_labels) == dim


# --- generator actions ---------------------------------------------------------

def test_dual_adjacency_on_axis_orbits():
    fm = module_for(2, "odd")
    ts = fm.scheme.spectral.theta_star
    for x in range(3):
        chi = fm.chi_vector((x, 0, 0))
        assert apply(A_star(2), chi) == chi.scale(ts[x])


def test_slot3_case_formula_example():
    assert dual_eigen_index(CycleScheme.from_order(5), (4, 1, 0), 3) == 2


@pytest.mark.parametrize("D", [2, 3, 4])
@pytest.mark.parametrize("parity", BOTH)
def test_slot1_index_is_y(D, parity):
    s = scheme_for(D, parity)
    fm = module_for(D, parity)
    for rep in fm.chi_basis:
        if rep[1] >= 1:
            assert dual_eigen_index(s, rep, 1) == rep[1]
    assert all(dual_eigen_action_check(fm).values())


@pytest.mark.parametrize("rep, slot, expected", [
    ((0, 0, 0), 1, {(1, 0, 0): 1}),
    ((0, 0, 0), 2, {(0, 1, 0): 1}),
    ((0, 0, 0), 3, {(1, 1, 0): 1}),
    ((0, 1, 0), 1, {(4, 1, 0): 1, (1, 1, 0): 1}),
    ((0, 1, 0), 2, {(0, 0, 0): 2, (0, 2, 0): 1}),
    ((0, 1, 0), 3, {(1, 0, 0): 1, (1, 2, 0): 1}),
])
def test_odd_five_cycle_worked_example(rep, slot, expected):
    fm = module_for(2, "odd")
    table = fm.orbits
    direct = apply(A(slot), fm.chi_vector(rep))
    combo = sum((fm.chi_vector(r).scale(c) for r, c in expected.items()),
                TensorVector.zero(fm.scheme))
    assert direct == combo
    assert adjacency_action_on_chi(table, rep, slot) == {r: Fraction(c) for r, c in expected.items()}


@pytest.mark.parametrize("D", [2, 3, 4])
@pytest.mark.parametrize("parity", BOTH)
@pytest.mark.parametrize("backend", ["exact", "float"])
def test_structural_actions_and_closure(D, parity, backend):
    fm = module_for(D, parity, backend)
    assert check_chi_actions(fm.orbits)["ok"]
    assert closure_check(fm)


@given(st.sampled_from([(2, "even"), (2, "odd"), (3, "even"), (3, "odd")]), st.data())
def test_random_combinations_stay_in_lambda(case, data):
    fm = module_for(*case)
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=fm.dimension,
                                max_size=fm.dimension))
    v = fm.expand(FieldArray.from_ints(fm.scheme.field, np.array(coeffs)))
    for slot in (1, 2, 3):
        for op in (A(slot), A_star(slot)):
            assert fm.in_span(apply(op, TensorVector(fm.scheme, v)).values)


def test_combination_array_uses_rational_weights():
    fm = module_for(2, "odd")
    arr = combination_array(fm.orbits, {(0, 0, 0): Fraction(1, 2)})
    assert arr[0, 0, 0] == Fraction(1, 2) and arr[0, 0, 1] == 0


# --- zeta table and transition matrix ------------------------------------------------

@pytest.mark.parametrize("n", range(4, 12))
def test_zeta_table(n):
    s = CycleScheme.from_order(n)
    zt = zeta_table(s)
    for x in range(n):
        assert zt(x, 0) == 1
        for k in range(s.D + 1):
            assert zt(x, k) == zt(n - x, k)
    if n == 4:
        assert [zt(x, 2) for x in range(4)] == [1, -1, 1, -1]


def test_q000_coefficients_are_one_over_n():
    fm = module_for(2, "odd")
    tm = transition_matrix(fm)
    assert all(c == Fraction(1, 5) for c in tm.coeffs[0].scalars())
    assert tm.coeffs.shape == (13, 13)


def test_rebuilding_q220_on_four_cycle():
    fm = module_for(2, "even")
    tm = transition_matrix(fm)
    row = tm.coeffs[tm.q_labels.index((2, 2, 0))]
    rebuilt = sum((fm.p_vector(lab).scale(c) for lab, c in zip(tm.p_labels, row.scalars())),
                  TensorVector.zero(fm.scheme))
    assert np.abs(rebuilt.values.to_complex() - brute_q(fm.scheme, 2, 2, 0)).max() < 1e-12
    assert rebuilt == q_vector(fm.scheme, 2, 2, 0).vector


@pytest.mark.parametrize("D", [2, 3])
@pytest.mark.parametrize("parity", BOTH)
def test_transition_inverse(D, parity):
    tm = transition_matrix(module_for(D, parity))
    ident = FieldArray.eye(tm.coeffs.field, len(tm.q_labels))
    assert (tm.coeffs @ tm.inverse).equals(ident)
    rows = list(tm.csv_rows())
    assert rows[0] == ["q_h", "q_i", "q_j", "p_r", "p_s", "p_t", "value"]
    assert len(rows) == 1 + len(tm.q_labels) ** 2


def test_corner_targets_get_weight_two_on_four_cycle():
    table = module_for(2, "even").orbits
    for orb in table:
        if orb.size == 8:
            for slot in (1, 2, 3):
                for target, c in adjacency_action_on_chi(table, orb.representative, slot).items():
                    assert c == (2 if table[target].size == 4 else 1)
