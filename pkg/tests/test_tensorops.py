import numpy as np
import pytest
from hypothesis import given, strategies as st

import fundmod.tensorops as tops
from fundmod.errors import RelationFailure
from fundmod.fieldarray import FieldArray
from fundmod.fundament import p_vector
from fundmod.orbits import enumerate_orbits
from fundmod.scheme import CycleScheme
from fundmod.tensorops import (
    A, A_star, E, E_star, SlotOperator, TensorVector, apply, apply_word, evaluate_polynomial,
    inner_product, kernels, norm_squared, one_tensor_cubed, relation_polynomials,
    slot_identities, unit_batch, verify_s3_relations,
)

LETTERS = ["A1", "A2", "A3", "S1", "S2", "S3"]


def op_of(letter, scheme):
    kind = A if letter[0] == "A" else A_star
    return kind(int(letter[1]), scheme)


def kron_matrix(scheme, letter):
    """Dense n^3 x n^3 matrix of one letter, built with np.kron (complex)."""
    n = scheme.n
    slot = int(letter[1])
    I = np.eye(n)
    if letter[0] == "A":
        M = scheme.bose_mesner.A[1].to_complex()
        factors = [M if r == slot else I for r in (1, 2, 3)]
        return np.kron(np.kron(factors[0], factors[1]), factors[2])
    th = np.array([scheme.field.to_complex(t) for t in scheme.spectral.theta_star])
    t = scheme.distance_table
    idx = np.arange(n)
    x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
    a, b = {1: (y, z), 2: (x, z), 3: (x, y)}[slot]
    return np.diag(th[t[a, b]].ravel())


# --- vectors ----------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 5])
def test_all_ones_tensor(n):
    s = CycleScheme.from_order(n)
    one = one_tensor_cubed(s)
    assert len(one) == n ** 3
    assert all(v == 1 for v in one.entries().values())
    assert inner_product(one, one) == n ** 3


def test_unit_vector_validation():
    s = CycleScheme.from_order(4)
    with pytest.raises(ValueError):
        TensorVector.unit(s, (0, 4, 0))
    with pytest.raises(ValueError):
        TensorVector.unit(s, (0, 1))


def test_sparse_view_is_lexicographic():
    s = CycleScheme.from_order(5)
    v = TensorVector.from_entries(s, {(3, 0, 1): 2, (0, 4, 4): 1, (0, 4, 1): -1})
    assert list(v.entries()) == [(0, 4, 1), (0, 4, 4), (3, 0, 1)]
    assert [e["triple"] for e in v.to_json()] == [[0, 4, 1], [0, 4, 4], [3, 0, 1]]


def test_scheme_mismatch_refused():
    u = one_tensor_cubed(CycleScheme.from_order(4))
    v = one_tensor_cubed(CycleScheme.from_order(5))
    with pytest.raises(ValueError):
        u + v
    with pytest.raises(ValueError):
        apply(A(1, CycleScheme.from_order(5)), u)


def test_operator_validation():
    with pytest.raises(ValueError):
        SlotOperator("adjacency", 4)
    with pytest.raises(ValueError):
        SlotOperator("idempotent", 1)
    with pytest.raises(ValueError):
        apply(E_star(3, 1), one_tensor_cubed(CycleScheme.from_order(4)))


def test_inner_products_of_units_and_p_vectors():
    s = CycleScheme.from_order(5)
    u, w = TensorVector.unit(s, (1, 2, 3)), TensorVector.unit(s, (1, 2, 4))
    assert inner_product(u, u) == 1 and inner_product(u, w) == 0
    p011, p101 = p_vector(s, 0, 1, 1).vector, p_vector(s, 1, 0, 1).vector
    assert inner_product(p011, p101) == 0
    assert norm_squared(p011) == len(p011)


# --- operator examples --------------------------------------------------------

def test_dual_adjacency_on_unit_vector():
    s = CycleScheme.from_order(5)
    u = TensorVector.unit(s, (0, 1, 2))
    assert apply(A_star(1), u) == u.scale(s.spectral.theta_star[1])


@pytest.mark.parametrize("n", [4, 5, 7])
def test_dual_idempotent_keeps_diagonal_pairs(n):
    s = CycleScheme.from_order(n)
    out = apply(E_star(0, 3), one_tensor_cubed(s))
    assert set(out.entries()) == {(x, x, z) for x in range(n) for z in range(n)}
    assert all(v == 1 for v in out.entries().values())


def test_adjacency_on_unit_vector():
    s = CycleScheme.from_order(4)
    out = apply(A(2), TensorVector.unit(s, (0, 0, 0)))
    assert out == TensorVector.unit(s, (0, 1, 0)) + TensorVector.unit(s, (0, 3, 0))


def test_apply_word_is_right_to_left():
    s = CycleScheme.from_order(5)
    u = TensorVector.unit(s, (0, 0, 0))
    assert apply_word([E_star(1, 1), A(2)], u) == apply(E_star(1, 1), apply(A(2), u))
    assert apply_word([A(2), E_star(1, 1)], u).is_zero()


@given(st.integers(4, 7), st.lists(st.sampled_from(LETTERS), min_size=1, max_size=4),
       st.integers(0, 2**32 - 1))
def test_kernels_agree_with_kronecker_matrices(n, word, seed):
    s = CycleScheme.from_order(n)
    rng = np.random.default_rng(seed)
    ints = rng.integers(-3, 4, size=(n, n, n))
    v = TensorVector.from_ints(s, ints)
    out = apply_word([op_of(w, s) for w in word], v).values.to_complex().ravel()
    ref = ints.ravel().astype(complex)
    for w in reversed(word):
        ref = kron_matrix(s, w) @ ref
    assert np.abs(out - ref).max() < 1e-8 * (1 + np.abs(ref).max())


@pytest.mark.parametrize("n", range(4, 10))
def test_slot_identities(n):
    s = CycleScheme.from_order(n)
    rng = np.random.default_rng(n)
    batch = FieldArray.from_ints(s.field, rng.integers(-2, 3, size=(2, n, n, n)))
    assert all(slot_identities(s, batch).values())


def test_random_words_agree_across_backends():
    """Random words on random vectors, exact against float, >= 10^4 entries."""
    rng = np.random.default_rng(99)
    checked = 0
    for n in (4, 5, 6, 7, 8, 9):
        ex, fl = CycleScheme.from_order(n), CycleScheme.from_order(n, "float")
        for _ in range(6):
            ints = rng.integers(-3, 4, size=(n, n, n))
            word = [str(w) for w in rng.choice(LETTERS, size=int(rng.integers(1, 6)))]
            a = apply_word([op_of(w, ex) for w in word], TensorVector.from_ints(ex, ints))
            b = apply_word([op_of(w, fl) for w in word], TensorVector.from_ints(fl, ints))
            diff = np.abs(a.values.to_complex() - b.values.to_complex())
            assert diff.max() < 1e-9 * (1 + np.abs(b.values.to_complex()).max())
            checked += diff.size
    assert checked >= 10_000


# --- relations ---------------------------------------------------------------

def test_relation_family_is_complete():
    rels = relation_polynomials(CycleScheme.from_order(6))
    assert len(rels) == 21
    assert sum(name.startswith("[") for name in rels) == 9
    assert sum(name.startswith("TD") for name in rels) == 12


@pytest.mark.parametrize("backend", ["exact", "float"])
def test_relations_on_full_space_n4(backend):
    rep = verify_s3_relations(CycleScheme.from_order(4, backend))
    assert rep.ok and rep.vectors == 64 and rep.relations == 21


def test_relations_on_lambda_n5():
    s = CycleScheme.from_order(5)
    rep = verify_s3_relations(s, enumerate_orbits(s).chi_batch)
    assert rep.ok and rep.vectors == 13


@given(st.integers(4, 9), st.data())
def test_commutator_of_a1_and_dual_a1_kills_units(n, data):
    s = CycleScheme.from_order(n)
    t = tuple(data.draw(st.integers(0, n - 1)) for _ in range(3))
    u = TensorVector.unit(s, t)
    lhs = apply(A(1), apply(A_star(1), u)) - apply(A_star(1), apply(A(1), u))
    assert lhs.is_zero()


def test_non_relation_is_detected(monkeypatch):
    s = CycleScheme.from_order(5)
    one = s.field.one
    bogus = {"[A1,A2*]": {("A1", "S2"): one, ("S2", "A1"): -one}}
    assert not evaluate_polynomial(bogus["[A1,A2*]"], unit_batch(s, 0, 125), kernels(s)).is_zero()
    monkeypatch.setattr(tops, "relation_polynomials", lambda scheme: bogus)
    rep = verify_s3_relations(s, raise_on_failure=False)
    assert not rep.ok and rep.failures[0]["relation"] == "[A1,A2*]"
    with pytest.raises(RelationFailure):
        verify_s3_relations(s)
