"""Conjecture checks on Lambda, the Terwilliger closure and the aggregate report."""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConjectureViolation, ConsistencyError
from .fieldarray import FieldArray, stack
from .fundament import (
    FundamentalModule,
    build_fundamental,
    check_chi_actions,
    closure_check,
    dual_eigen_action_check,
    labels_cube,
    q_eigen_action_check,
    transition_matrix,
    zeta_table,
)
from .linalg import SpanBuilder
from .orbits import enumerate_orbits, expected_orbit_count, phi_degeneracy_check
from .scheme import (
    CycleScheme,
    krein_identities,
    q_polynomial_check,
    spectrum_report,
)
from .tensorops import kernels, verify_s3_relations


@dataclass
class ConjectureReport:
    name: str
    records: list = dc_field(default_factory=list)
    backend: str = "exact"
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.records)

    def failures(self):
        return [r for r in self.records if not r["ok"]]

    def to_json(self, timing: bool = False):
        out = {"name": self.name, "ok": self.ok, "backend": self.backend,
               "checked": len(self.records), "failures": self.failures()}
        if timing:
            out["elapsed"] = self.elapsed
        return out


# ---------------------------------------------------------------------------
# triple projectors on Lambda
# ---------------------------------------------------------------------------

def fourier_matrix(scheme: CycleScheme) -> FieldArray:
    """F[m, x] = zeta^(-m x); row m of F v is the coefficient of mode m."""
    f, n = scheme.field, scheme.n
    idx = np.arange(n)
    roots = FieldArray.from_scalars(f, [f.root_power(k) for k in range(n)])
    return roots.take((-np.outer(idx, idx)) % n, axis=0)


def fourier_coefficients(scheme: CycleScheme, batch: FieldArray) -> FieldArray:
    kern = kernels(scheme)
    F = fourier_matrix(scheme)
    for slot in (1, 2, 3):
        batch = kern.matrix_on_slot(F, batch, slot)
    return batch


def _modes(scheme, k):
    return sorted({k % scheme.n, (-k) % scheme.n})


def unstarred_image_nonzero(fm: FundamentalModule, method: str = "fourier") -> dict:
    """label -> whether E_h^(1) E_i^(2) E_j^(3) is nonzero on the chi basis.

    ``fourier``: E_k is the projector onto the Fourier modes +-k, so the image
    of v vanishes iff the 3-d Fourier coefficients of v on those modes vanish.
    ``direct``: apply the three slot projectors to every chi vector.
    """
    scheme = fm.scheme
    D = scheme.D
    chi = fm.orbits.chi_batch
    out = {}
    if method == "fourier":
        nz = fourier_coefficients(scheme, chi).nonzero_mask().any(axis=0)  # (m1, m2, m3)
        for h, i, j in labels_cube(D):
            block = nz[np.ix_(_modes(scheme, h), _modes(scheme, i), _modes(scheme, j))]
            out[(h, i, j)] = bool(block.any())
        return out
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    kern = kernels(scheme)
    for h in range(D + 1):
        a = kern.idempotent(chi, 1, h)
        for i in range(D + 1):
            b = kern.idempotent(a, 2, i)
            for j in range(D + 1):
                out[(h, i, j)] = not kern.idempotent(b, 3, j).is_zero()
    return out


def starred_image_nonzero(fm: FundamentalModule) -> dict:
    scheme = fm.scheme
    D = scheme.D
    kern = kernels(scheme)
    chi = fm.orbits.chi_batch
    out = {}
    # E*_j^(3) is a 0/1 mask, so the last factor only needs the support of b
    last = [(kern.opposite_dist[3] == j) for j in range(D + 1)]
    for h in range(D + 1):
        a = kern.dual_idempotent(chi, 1, h)
        for i in range(D + 1):
            b = kern.dual_idempotent(a, 2, i)
            support = b.nonzero_mask().reshape(b.shape[0], -1).any(axis=0)
            for j in range(D + 1):
                out[(h, i, j)] = bool((support & last[j]).any())
    return out


def check_projector_vanishing(fm: FundamentalModule, method: str = "fourier",
                              raise_on_failure: bool = True) -> tuple:
    """Both vanishing statements: the starred triple projector kills Lambda iff
    p^h_ij = 0, the unstarred one iff q^h_ij = 0.  Returns two reports."""
    scheme = fm.scheme
    f = scheme.field
    start = time.perf_counter()
    starred = ConjectureReport("starred_projector_vanishing", backend=scheme.backend)
    for lab, nonzero in starred_image_nonzero(fm).items():
        starred.records.append({"label": list(lab), "image_nonzero": nonzero,
                                "p_nonzero": bool(scheme.p[lab] != 0),
                                "ok": nonzero == bool(scheme.p[lab] != 0)})
    starred.elapsed = time.perf_counter() - start
    start = time.perf_counter()
    plain = ConjectureReport("projector_vanishing", backend=scheme.backend)
    for lab, nonzero in unstarred_image_nonzero(fm, method).items():
        qnz = not f.is_zero(scheme.q[lab])
        plain.records.append({"label": list(lab), "image_nonzero": nonzero,
                              "q_nonzero": qnz, "ok": nonzero == qnz})
    plain.elapsed = time.perf_counter() - start
    for rep in (starred, plain):
        if raise_on_failure and not rep.ok:
            raise ConjectureViolation(f"{rep.name}: counterexample {rep.failures()[0]}")
    return starred, plain


def _family_labels(slot, D):
    if slot == 1:
        return [(0, i, i) for i in range(D + 1)]
    if slot == 2:
        return [(i, 0, i) for i in range(D + 1)]
    return [(i, i, 0) for i in range(D + 1)]


def _same_span(fm, image_coords: FieldArray, family_coords: FieldArray):
    """(rank of image, rank of family, family inside image, image inside family)."""
    f = fm.scheme.field
    length = image_coords.shape[1]
    img = SpanBuilder(f, length)
    for b in range(image_coords.shape[0]):
        img.add(image_coords[b])
    fam = SpanBuilder(f, length)
    for b in range(family_coords.shape[0]):
        fam.add(family_coords[b])
    fam_in_img = all(img.contains(family_coords[b]) for b in range(family_coords.shape[0]))
    img_in_fam = all(fam.contains(image_coords[b]) for b in range(image_coords.shape[0]))
    return img.rank, fam.rank, fam_in_img, img_in_fam


def check_e0_bases(fm: FundamentalModule, raise_on_failure: bool = True) -> ConjectureReport:
    """The six statements: {P_0ii}, {P_i0i}, {P_ii0} are bases of E*_0^(r) Lambda
    and {Q_0ii}, {Q_i0i}, {Q_ii0} of E_0^(r) Lambda, r = 1, 2, 3."""
    scheme = fm.scheme
    D = scheme.D
    kern = kernels(scheme)
    chi = fm.orbits.chi_batch
    start = time.perf_counter()
    rep = ConjectureReport("e0_bases", backend=scheme.backend)
    p_coords = FieldArray.eye(scheme.field, fm.dimension)       # P basis = chi basis
    for starred in (True, False):
        for slot in (1, 2, 3):
            if starred:
                image = kern.dual_idempotent(chi, slot, 0)
            else:
                image = kern.idempotent(chi, slot, 0)
            invariant = fm.in_span(image)
            coords = fm.chi_coordinates(image)
            labels = _family_labels(slot, D)
            if starred:
                fam = stack([p_coords[fm.orbits.by_profile[lab]] for lab in labels])
            else:
                fam = stack([fm.q_coords[fm.q_labels.index(lab)] for lab in labels])
            r_img, r_fam, f_in, i_in = _same_span(fm, coords, fam)
            ok = invariant and r_img == r_fam == D + 1 and f_in and i_in
            rep.records.append({
                "statement": f"{'P' if starred else 'Q'} family spans "
                             f"{'E*' if starred else 'E'}_0^({slot}) Lambda",
                "family": [list(lab) for lab in labels], "image_rank": r_img,
                "family_rank": r_fam, "ok": bool(ok)})
    rep.elapsed = time.perf_counter() - start
    if raise_on_failure and not rep.ok:
        raise ConjectureViolation(f"E0 basis statement fails: {rep.failures()[0]}")
    return rep


# ---------------------------------------------------------------------------
# Terwilliger algebra
# ---------------------------------------------------------------------------

@dataclass
class AlgebraClosure:
    basis: list
    dimension: int
    expected: int
    residual_ok: bool

    @property
    def ok(self):
        return self.residual_ok and self.dimension == self.expected


def terwilliger_dimension(scheme: CycleScheme, check_closure: bool = True) -> AlgebraClosure:
    """Close span{I, A_1, A*_1} under left and right multiplication by A_1
    and A*_1 and return the stable basis."""
    f, n = scheme.field, scheme.n
    A1 = scheme.bose_mesner.A[1]
    S1 = scheme.dual.matrix(scheme.dual.A_star[1])
    span = SpanBuilder(f, n * n)
    basis = []
    queue = [FieldArray.eye(f, n), A1, S1]
    while queue:
        M = queue.pop(0)
        if span.add(M.reshape(n * n)):
            basis.append(M)
            if len(basis) > n * n:
                raise ConsistencyError("closure exceeded n^2 dimensions")
            queue.extend([A1 @ M, M @ A1, S1 @ M, M @ S1])
    ok = True
    if check_closure:
        for M in basis:
            for P in (A1 @ M, M @ A1, S1 @ M, M @ S1):
                if not span.contains(P.reshape(n * n)):
                    ok = False
    expected = expected_orbit_count(scheme.D, scheme.parity)
    return AlgebraClosure(basis, len(basis), expected, ok)


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

def full_report(D: int, parity: str, backend: str = "exact", max_relation_space: int = 512,
                relations_on_lambda: bool = True, timing: bool = False) -> dict:
    """Run every stage and collect one JSON-ready report.

    A stage that raises is recorded under ``failures`` with its name; later
    stages that depend on it are skipped.
    """
    scheme = CycleScheme(D, parity, backend)
    n = scheme.n
    failures = []
    stages = {}
    times = {}

    def run(name, fn):
        t0 = time.perf_counter()
        try:
            value = fn()
            stages[name] = True
            return value
        except Exception as exc:  # recorded, reported, and reflected in the exit code
            stages[name] = False
            failures.append({"stage": name, "error": f"{type(exc).__name__}: {exc}",
                             "trace": traceback.format_exc(limit=3).splitlines()[-1]})
            return None
        finally:
            times[name] = round(time.perf_counter() - t0, 4)

    spectrum = run("scheme", lambda: _scheme_stage(scheme))
    orbits = run("orbits", lambda: _orbit_stage(scheme)) if spectrum else None
    fm = run("fundamental", lambda: build_fundamental(scheme, orbits)) if orbits else None
    if fm is not None:
        run("transition", lambda: transition_matrix(fm, zeta_table(scheme)))
        run("actions", lambda: (dual_eigen_action_check(fm), q_eigen_action_check(fm),
                                check_chi_actions(fm.orbits), closure_check(fm)))
    relations_ok = None
    if spectrum:
        rel_checks = []
        if n ** 3 <= max_relation_space:
            rel_checks.append(run("relations_full", lambda: verify_s3_relations(scheme)))
        if fm is not None and relations_on_lambda:
            rel_checks.append(run("relations_lambda", lambda: verify_s3_relations(
                scheme, fm.orbits.chi_batch)))
        relations_ok = bool(rel_checks) and all(r is not None and r.ok for r in rel_checks)
    c122 = c123 = None
    if fm is not None:
        vanish = run("projector_vanishing", lambda: check_projector_vanishing(fm))
        c122 = vanish is not None and all(r.ok for r in vanish)
        e0 = run("e0_bases", lambda: check_e0_bases(fm))
        c123 = e0 is not None and e0.ok
    closure = run("terwilliger", lambda: terwilliger_dimension(scheme)) if spectrum else None
    dim_t = closure.dimension if closure else None
    if closure is not None and not closure.ok:
        failures.append({"stage": "terwilliger",
                         "error": f"closure dimension {closure.dimension}, expected "
                                  f"{closure.expected}"})
    if fm is not None and closure is not None and closure.dimension != fm.dimension:
        failures.append({"stage": "terwilliger",
                         "error": f"closure dimension {closure.dimension} != dim Lambda"})
    counts = None
    if fm is not None:
        counts = {"orbits": len(fm.orbits), "nonzero_p": len(fm.p_labels),
                  "nonzero_q": len(fm.q_labels)}
        if len(set(counts.values()) | {expected_orbit_count(D, parity)}) != 1:
            failures.append({"stage": "dimension", "error": f"counts differ: {counts}"})
    report = {
        "n": n, "D": D, "parity": parity, "backend": backend,
        "dim_lambda": fm.dimension if fm is not None else None,
        "dim_terwilliger": dim_t,
        "relations_ok": relations_ok,
        "conjecture_12_2_ok": c122,
        "conjecture_12_3_ok": c123,
        "counts": counts,
        "stages": stages,
        "spectrum": spectrum,
        "failures": failures,
    }
    report["ok"] = not failures and all(stages.values())
    if timing:
        report["timing"] = times
    return report


def _scheme_stage(scheme: CycleScheme) -> dict:
    tri = scheme.tridiagonal
    ki = krein_identities(scheme, scheme.q)
    if not all(ki.values()):
        raise ConsistencyError(f"Krein identities failed: {ki}")
    if not q_polynomial_check(scheme.tensors):
        raise ConsistencyError("the q tensor is not tridiagonal in the natural ordering")
    del tri
    return spectrum_report(scheme)


def _orbit_stage(scheme: CycleScheme):
    table = enumerate_orbits(scheme)
    phi_degeneracy_check(table)
    return table
