import numpy as np
import pytest

import fundmod.verify as verify
from fundmod.errors import ConjectureViolation
from fundmod.verify import (
    check_e0_bases, check_projector_vanishing, fourier_coefficients, full_report,
    starred_image_nonzero, terwilliger_dimension, unstarred_image_nonzero,
)

from conftest import BOTH, module_for, scheme_for


def test_starred_projector_kills_lambda_when_p_vanishes():
    fm = module_for(2, "even")
    assert fm.scheme.p[1, 1, 1] == 0
    assert starred_image_nonzero(fm)[(1, 1, 1)] is False


@pytest.mark.parametrize("D", [2, 3])
@pytest.mark.parametrize("parity", BOTH)
def test_unstarred_image_of_0ii_is_spanned_by_q(D, parity):
    fm = module_for(D, parity)
    nz = unstarred_image_nonzero(fm)
    for i in range(D + 1):
        assert nz[(0, i, i)]
        assert not fm.scheme.q[0, i, i].is_zero()


@pytest.mark.parametrize("D", [2, 3])
@pytest.mark.parametrize("parity", BOTH)
@pytest.mark.parametrize("backend", ["exact", "float"])
def test_fourier_shortcut_matches_direct_projectors(D, parity, backend):
    fm = module_for(D, parity, backend)
    assert unstarred_image_nonzero(fm, "fourier") == unstarred_image_nonzero(fm, "direct")


def test_fourier_coefficients_of_all_ones_tensor():
    s = scheme_for(2, "odd")
    fm = module_for(2, "odd")
    total = fm.expand(verify.FieldArray.from_ints(s.field, np.ones(fm.dimension, dtype=np.int64)))
    hat = fourier_coefficients(s, total.reshape(1, 5, 5, 5))
    mask = hat.nonzero_mask()[0]
    assert mask[0, 0, 0] and mask.sum() == 1
    assert hat[0, 0, 0, 0] == 125


@pytest.mark.parametrize("D", [2, 3, 4])
@pytest.mark.parametrize("parity", BOTH)
def test_projector_vanishing_statements(D, parity):
    starred, plain = check_projector_vanishing(module_for(D, parity))
    assert starred.ok and plain.ok
    assert len(starred.records) == len(plain.records) == (D + 1) ** 3


def test_e0_image_dimensions():
    rep = check_e0_bases(module_for(2, "even"))
    first = rep.records[0]
    assert first["statement"].startswith("P family spans E*_0^(1)")
    assert first["image_rank"] == 3
    odd = check_e0_bases(module_for(2, "odd"))
    q3 = [r for r in odd.records if r["statement"] == "Q family spans E_0^(3) Lambda"]
    assert q3[0]["image_rank"] == q3[0]["family_rank"] == 3


@pytest.mark.parametrize("D", [2, 3, 4])
@pytest.mark.parametrize("parity", BOTH)
@pytest.mark.parametrize("backend", ["exact", "float"])
def test_e0_basis_statements(D, parity, backend):
    rep = check_e0_bases(module_for(D, parity, backend))
    assert rep.ok and len(rep.records) == 6


def test_violation_is_reported(monkeypatch):
    fm = module_for(2, "odd")
    real = starred_image_nonzero(fm)
    flipped = dict(real)
    flipped[(0, 0, 0)] = not flipped[(0, 0, 0)]
    monkeypatch.setattr(verify, "starred_image_nonzero", lambda fm: flipped)
    starred, _ = check_projector_vanishing(fm, raise_on_failure=False)
    assert not starred.ok and starred.failures()[0]["label"] == [0, 0, 0]
    with pytest.raises(ConjectureViolation):
        check_projector_vanishing(fm)


@pytest.mark.parametrize("D, parity, dim", [(2, "even", 10), (2, "odd", 13)])
def test_terwilliger_dimension_examples(D, parity, dim):
    closure = terwilliger_dimension(scheme_for(D, parity))
    assert closure.dimension == dim and closure.ok


@pytest.mark.parametrize("D, parity, dim", [(2, "even", 10), (2, "odd", 13)])
def test_full_report_small(D, parity, dim):
    rep = full_report(D, parity, "exact")
    assert rep["ok"] and rep["dim_lambda"] == dim and rep["failures"] == []
    assert rep["counts"] == {"orbits": dim, "nonzero_p": dim, "nonzero_q": dim}
    assert set(rep) >= {"n", "D", "parity", "backend", "dim_lambda", "dim_terwilliger",
                        "relations_ok", "conjecture_12_2_ok", "conjecture_12_3_ok",
                        "counts", "failures"}


def test_full_report_records_stage_failures(monkeypatch):
    def broken(fm):
        raise ConjectureViolation("injected")
    monkeypatch.setattr(verify, "check_e0_bases", broken)
    rep = full_report(2, "even")
    assert not rep["ok"]
    assert rep["conjecture_12_3_ok"] is False
    assert rep["failures"][0]["stage"] == "e0_bases"


@pytest.mark.parametrize("D", [2, 3])
@pytest.mark.parametrize("parity", BOTH)
def test_starred_support_shortcut_matches_literal_projectors(D, parity):
    fm = module_for(D, parity)
    kern = verify.kernels(fm.scheme)
    chi = fm.orbits.chi_batch
    literal = {}
    for h, i, j in verify.labels_cube(D):
        v = kern.dual_idempotent(kern.dual_idempotent(
            kern.dual_idempotent(chi, 3, j), 2, i), 1, h)
        literal[(h, i, j)] = not v.is_zero()
    assert starred_image_nonzero(fm) == literal


@pytest.mark.parametrize("D", [7, 8])
@pytest.mark.parametrize("parity", BOTH)
def test_projector_vanishing_large_diameters(D, parity):
    starred, plain = check_projector_vanishing(module_for(D, parity))
    assert starred.ok and plain.ok
