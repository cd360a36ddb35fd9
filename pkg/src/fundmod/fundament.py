"""The fundamental module Lambda and its three bases.

* chi basis: characteristic vectors of the dihedral orbits on X^3;
* P basis: indicator vectors of the nonzero distance-profile classes;
* Q basis: ``Q_{h,i,j} = |X| sum_x E_h x (x) E_i x (x) E_j x``, nonzero ones.

Q vectors are dihedral-invariant, so each is stored by its coordinates in the
chi basis (the entry at each orbit representative); full arrays are rebuilt on
demand one ``h`` at a time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ConsistencyError
from .exactfield import to_json
from .fieldarray import FieldArray, scale_rational, segment_sum, stack
from .orbits import OrbitTable, canonicalize, enumerate_orbits, neighbour_triples
from .scheme import CycleScheme
from .tensorops import A, A_star, TensorVector, kernels, one_tensor_cubed


def labels_cube(D: int) -> list:
    return [(h, i, j) for h in range(D + 1) for i in range(D + 1) for j in range(D + 1)]


def profile_codes(scheme: CycleScheme) -> np.ndarray:
    """Flat array over all triples of the code h*(D+1)^2 + i*(D+1) + j of the
    distance profile (h, i, j)."""
    n, D = scheme.n, scheme.D
    t = scheme.distance_table
    idx = np.arange(n)
    x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
    k = D + 1
    return ((t[y, z] * k + t[x, z]) * k + t[x, y]).ravel()


# ---------------------------------------------------------------------------
# P vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabeledTensorVector:
    label: tuple
    kind: str
    vector: TensorVector


def p_vector(scheme: CycleScheme, h: int, i: int, j: int) -> LabeledTensorVector:
    """P_{h,i,j} by triple enumeration, checked against the projector form
    E*_h^(1) E*_i^(2) E*_j^(3) applied to the all-ones tensor."""
    D, n = scheme.D, scheme.n
    for c in (h, i, j):
        if not 0 <= c <= D:
            raise ValueError(f"label index {c} out of range 0..{D}")
    k = D + 1
    direct = (profile_codes(scheme) == (h * k + i) * k + j).astype(np.int64)
    vec = TensorVector.from_ints(scheme, direct.reshape(n, n, n))
    kern = kernels(scheme)
    proj = one_tensor_cubed(scheme).values
    for slot, idx in ((3, j), (2, i), (1, h)):
        proj = kern.dual_idempotent(proj, slot, idx)
    if not proj.equals(vec.values):
        raise ConsistencyError(f"P{(h, i, j)}: enumeration and projector forms differ")
    if vec.is_zero() != (scheme.p[h, i, j] == 0):
        raise ConsistencyError(f"P{(h, i, j)} vanishing disagrees with p^h_ij")
    return LabeledTensorVector((h, i, j), "P", vec)


# ---------------------------------------------------------------------------
# Q vectors
# ---------------------------------------------------------------------------

def _q_direct_for_h(scheme: CycleScheme, h: int) -> FieldArray:
    """All Q_{h,i,j} for fixed h from the defining sum; shape (D+1, D+1, n, n, n)."""
    n, D = scheme.n, scheme.D
    k = D + 1
    E = scheme.bose_mesner.E
    es = stack(E)                                           # (i, b, x)
    eh = E[h].reshape(1, n, 1, n)                           # (., a, ., x)
    t = eh * es.reshape(k, 1, n, n)                         # (i, a, b, x)
    ejt = stack([e.T for e in E], axis=1).reshape(n, k * n)  # (x, (j, c))
    prod = t.reshape(k * n * n, n) @ ejt                    # ((i,a,b), (j,c))
    prod = prod.reshape(k, n, n, k, n).transpose(0, 3, 1, 2, 4)
    return FieldArray(prod.field, np.ascontiguousarray(prod.num), prod.den).scale(n)


def _q_projected_for_h(scheme: CycleScheme, h: int) -> FieldArray:
    """All Q_{h,i,j} for fixed h as |X| E_h^(1) E_i^(2) E_j^(3) P_{0,0,0}."""
    n, D = scheme.n, scheme.D
    kern = kernels(scheme)
    diag = np.zeros((n, n, n), dtype=np.int64)
    diag[np.arange(n), np.arange(n), np.arange(n)] = 1
    v = kern.idempotent(FieldArray.from_ints(scheme.field, diag), 1, h)
    second = stack([kern.idempotent(v, 2, i) for i in range(D + 1)])
    third = stack([kern.idempotent(second, 3, j) for j in range(D + 1)], axis=1)
    return third.scale(n)


def q_vector(scheme: CycleScheme, h: int, i: int, j: int) -> LabeledTensorVector:
    """Q_{h,i,j} by its defining sum, checked against the projector form."""
    D = scheme.D
    for c in (h, i, j):
        if not 0 <= c <= D:
            raise ValueError(f"label index {c} out of range 0..{D}")
    n = scheme.n
    E = scheme.bose_mesner.E
    # sum_x E_h[a,x] E_i[b,x] E_j[c,x]
    t = E[h].reshape(n, 1, n) * E[i].reshape(1, n, n)
    direct = (t.reshape(n * n, n) @ E[j].T).reshape(n, n, n).scale(n)
    kern = kernels(scheme)
    diag = np.zeros((n, n, n), dtype=np.int64)
    diag[np.arange(n), np.arange(n), np.arange(n)] = 1
    proj = FieldArray.from_ints(scheme.field, diag)
    for slot, idx in ((3, j), (2, i), (1, h)):
        proj = kern.idempotent(proj, slot, idx)
    if not proj.scale(n).equals(direct):
        raise ConsistencyError(f"Q{(h, i, j)}: defining sum and projector forms differ")
    vec = TensorVector(scheme, direct)
    if vec.is_zero() != scheme.field.is_zero(scheme.q[h, i, j]):
        raise ConsistencyError(f"Q{(h, i, j)} vanishing disagrees with q^h_ij")
    return LabeledTensorVector((h, i, j), "Q", vec)


# ---------------------------------------------------------------------------
# the module
# ---------------------------------------------------------------------------

class FundamentalModule:
    """Lambda with its chi, P and Q bases.

    Orderings: chi by representative, P and Q labels lexicographic.
    """

    def __init__(self, scheme, orbits, p_labels, p_sizes, q_labels, q_coords):
        self.scheme = scheme
        self.orbits = orbits
        self.p_labels = p_labels          # nonzero P labels
        self.p_sizes = p_sizes            # support sizes, aligned with p_labels
        self.q_labels = q_labels          # nonzero Q labels
        self.q_coords = q_coords          # FieldArray (len(q_labels), orbits)
        self.p_to_orbit = [orbits.by_profile[lab] for lab in p_labels]

    @property
    def dimension(self) -> int:
        return len(self.orbits)

    @property
    def chi_basis(self):
        return [o.representative for o in self.orbits]

    @cached_property
    def _order(self):
        labels = self.orbits.labels
        order = np.argsort(labels, kind="stable")
        counts = np.bincount(labels, minlength=len(self.orbits))
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        return order, starts

    def chi_vector(self, rep) -> TensorVector:
        return self.orbits.chi(rep)

    def p_vector(self, label) -> TensorVector:
        return self.orbits.chi(self.orbits.orbits[self.orbits.by_profile[tuple(label)]]
                               .representative)

    def expand(self, coords: FieldArray) -> FieldArray:
        """Full arrays from chi coordinates; coords shape (..., orbits)."""
        n = self.scheme.n
        lead = coords.shape[:-1]
        num = np.take(coords.num, self.orbits.labels, axis=coords.ndim - 1)
        return FieldArray(coords.field, num.reshape(lead + (n, n, n) + (num.shape[-1],)),
                          coords.den)

    def q_vector(self, label) -> TensorVector:
        k = self.q_labels.index(tuple(label))
        return TensorVector(self.scheme, self.expand(self.q_coords[k:k + 1]).reshape(
            (self.scheme.n,) * 3))

    def chi_coordinates(self, arr: FieldArray) -> FieldArray:
        """Entries at orbit representatives; shape (..., orbits)."""
        n = self.scheme.n
        flat = [(x * n + y) * n + z for x, y, z in self.chi_basis]
        lead = arr.shape[:-3]
        num = arr.num.reshape(lead + (n ** 3, arr.num.shape[-1]))
        return FieldArray(arr.field, np.take(num, flat, axis=len(lead)), arr.den)

    def in_span(self, arr: FieldArray) -> bool:
        """True iff every vector of the batch is dihedral-invariant, i.e. lies
        in the span of the chi basis."""
        return self.expand(self.chi_coordinates(arr)).equals(arr)

    @cached_property
    def q_norms(self) -> FieldArray:
        """||Q||^2 from chi coordinates."""
        sq = self.q_coords.conj() * self.q_coords
        return scale_rational(sq, [o.size for o in self.orbits]).sum(axis=1)

    def gram_q(self) -> FieldArray:
        c = self.q_coords
        weighted = scale_rational(c.conj(), [o.size for o in self.orbits])
        return weighted @ c.T

    def to_json(self):
        f = self.scheme.field
        return {
            "n": self.scheme.n, "D": self.scheme.D, "parity": self.scheme.parity,
            "dimension": self.dimension,
            "chi_basis": [{"representative": list(o.representative), "size": o.size,
                           "profile": list(o.profile)} for o in self.orbits],
            "p_basis": [{"label": list(lab), "norm_squared": s}
                        for lab, s in zip(self.p_labels, self.p_sizes)],
            "q_basis": [{"label": list(lab), "norm_squared": to_json(v)}
                        for lab, v in zip(self.q_labels, self.q_norms.scalars())],
            "counts": {"orbits": self.dimension, "nonzero_p": len(self.p_labels),
                       "nonzero_q": len(self.q_labels)},
            "backend": "exact" if f.exact else "float",
        }


def build_fundamental(scheme: CycleScheme, orbits: OrbitTable | None = None) -> FundamentalModule:
    orbits = orbits or enumerate_orbits(scheme)
    n, D = scheme.n, scheme.D
    k = D + 1
    f = scheme.field
    codes = profile_codes(scheme)
    # P basis: profile classes, which coincide with orbits
    counts = np.bincount(codes, minlength=k ** 3)
    p_labels = [lab for lab in labels_cube(D) if counts[(lab[0] * k + lab[1]) * k + lab[2]]]
    p_sizes = [int(counts[(h * k + i) * k + j]) for h, i, j in p_labels]
    orbit_codes = np.array([(o.profile[0] * k + o.profile[1]) * k + o.profile[2]
                            for o in orbits])
    if not np.array_equal(orbit_codes[orbits.labels], codes):
        raise ConsistencyError("chi basis and P basis do not correspond")
    if sorted(p_labels) != sorted(o.profile for o in orbits):
        raise ConsistencyError("nonzero P labels differ from orbit profiles")
    for lab, s in zip(p_labels, p_sizes):
        if orbits.orbits[orbits.by_profile[lab]].size != s:
            raise ConsistencyError(f"P{lab} support differs from its orbit")
    nonzero_p = {lab for lab in labels_cube(D) if scheme.p[lab] != 0}
    if nonzero_p != set(p_labels):
        raise ConsistencyError("P vanishing pattern disagrees with p^h_ij")

    # Q basis: defining sum vs projector form, h by h
    fm = FundamentalModule(scheme, orbits, p_labels, p_sizes, [], None)
    q_labels, rows = [], []
    for h in range(k):
        direct = _q_direct_for_h(scheme, h)
        if not direct.equals(_q_projected_for_h(scheme, h)):
            raise ConsistencyError(f"Q_({h},.,.): defining sum and projector forms differ")
        coords = fm.chi_coordinates(direct)                 # (i, j, orbits)
        if not fm.expand(coords).equals(direct):
            raise ConsistencyError(f"Q_({h},.,.) is not dihedral-invariant")
        nonzero = coords.nonzero_mask().any(axis=-1)
        for i in range(k):
            for j in range(k):
                if nonzero[i, j] == f.is_zero(scheme.q[h, i, j]):
                    raise ConsistencyError(f"Q{(h, i, j)} vanishing disagrees with q^h_ij")
                if nonzero[i, j]:
                    q_labels.append((h, i, j))
                    rows.append(coords[i, j:j + 1])
    q_coords = FieldArray.concatenate(rows, axis=0)
    fm = FundamentalModule(scheme, orbits, p_labels, p_sizes, q_labels, q_coords)

    dim = len(orbits)
    if not (len(p_labels) == len(q_labels) == dim):
        raise ConsistencyError(f"basis sizes differ: chi {dim}, P {len(p_labels)}, "
                               f"Q {len(q_labels)}")
    gram = fm.gram_q()
    off = gram.nonzero_mask() & ~np.eye(dim, dtype=bool)
    if off.any():
        raise ConsistencyError("distinct Q vectors are not orthogonal")
    if gram.nonzero_mask().diagonal().sum() != dim:
        raise ConsistencyError("a Q basis vector has zero norm")
    return fm


def q_norm_formula(scheme: CycleScheme, label):
    """|X| m_h q^h_ij, where m_h = trace E_h is the multiplicity."""
    h, i, j = label
    m = scheme.bose_mesner.E[h].trace()
    return scheme.q[h, i, j] * m * scheme.n


# ---------------------------------------------------------------------------
# generator actions on the chi basis
# ---------------------------------------------------------------------------

def dual_eigen_index(scheme: CycleScheme, rep, slot: int) -> int:
    """Eigenvalue index of A*^(slot) on chi of the orbit of (x, y, 0), by the
    case formulas."""
    x, y, _ = rep
    n, D = scheme.n, scheme.D
    if y == 0:
        return 0 if slot == 1 else x
    if slot == 1:
        return y
    if slot == 2:
        return x if x <= D else n - x
    return abs(x - y) if x <= D else min(x - y, n - x + y)


def dual_eigen_action_check(fm: FundamentalModule) -> dict:
    scheme = fm.scheme
    kern = kernels(scheme)
    theta_star = scheme.spectral.theta_star
    chi = fm.orbits.chi_batch
    report = {"p_eigen": True, "case_formulas": True}
    for slot in (1, 2, 3):
        applied = kern.dual_adjacency(chi, slot)
        idx = [o.profile[slot - 1] for o in fm.orbits]
        for b, o in enumerate(fm.orbits):
            if dual_eigen_index(scheme, o.representative, slot) != idx[b]:
                report["case_formulas"] = False
                raise ConsistencyError(f"case formula fails at {o.representative}, "
                                       f"slot {slot}")
        expected = stack([chi[b].scale(theta_star[idx[b]]) for b in range(len(idx))])
        if not applied.equals(expected):
            report["p_eigen"] = False
            raise ConsistencyError(f"A*^({slot}) is not diagonal on the P basis")
    return report


def q_eigen_action_check(fm: FundamentalModule) -> bool:
    """A^(r) Q_{h,i,j} = theta_{label[r]} Q_{h,i,j}, checked in chi coordinates."""
    scheme = fm.scheme
    kern = kernels(scheme)
    theta = scheme.spectral.theta
    full = fm.expand(fm.q_coords)
    for slot in (1, 2, 3):
        applied = fm.chi_coordinates(kern.adjacency(full, slot))
        expected = stack([fm.q_coords[b].scale(theta[lab[slot - 1]])
                          for b, lab in enumerate(fm.q_labels)])
        if not applied.equals(expected):
            raise ConsistencyError(f"A^({slot}) is not diagonal on the Q basis")
    return True


def adjacency_action_on_chi(table: OrbitTable, rep, slot: int) -> dict:
    """Structural value of A^(slot) chi_Omega as {representative: coefficient}.

    Size-n orbits go to the single orbit of either neighbour; size-2n orbits
    to both neighbours' orbits with weight 2n / |target|.
    """
    scheme = table.scheme
    n = scheme.n
    orb = table[rep]
    lo, hi = (canonicalize(scheme, t) for t in neighbour_triples(scheme, tuple(rep), slot))
    if orb.size == n:
        if lo != hi:
            raise ConsistencyError(f"corner {rep}: neighbours land in different orbits")
        return {lo: Fraction(1)}
    out = {}
    for t in (lo, hi):
        out[t] = out.get(t, Fraction(0)) + Fraction(2 * n, table[t].size)
    return out


def combination_array(table: OrbitTable, combo: dict) -> FieldArray:
    """Dense (n, n, n) array of a formal chi combination."""
    scheme = table.scheme
    n = scheme.n
    coeff = [Fraction(0)] * len(table)
    for rep, c in combo.items():
        coeff[table.position[rep]] += c
    L = math.lcm(*(c.denominator for c in coeff))
    ints = np.array([int(c * L) for c in coeff], dtype=np.int64)[table.labels]
    return FieldArray.from_ints(scheme.field, ints.reshape(n, n, n), L)


def check_chi_actions(table: OrbitTable) -> dict:
    """Structural combinations against direct application, every orbit and slot."""
    scheme = table.scheme
    kern = kernels(scheme)
    checked = 0
    for slot in (1, 2, 3):
        direct = kern.adjacency(table.chi_batch, slot)
        for b, orb in enumerate(table):
            combo = adjacency_action_on_chi(table, orb.representative, slot)
            if not direct[b].equals(combination_array(table, combo)):
                raise ConsistencyError(f"A^({slot}) on chi{orb.representative}: structural "
                                       f"form {combo} differs from direct application")
            checked += 1
    return {"checked": checked, "ok": True}


def closure_check(fm: FundamentalModule) -> bool:
    """Each generator maps every chi vector back into span(chi)."""
    kern = kernels(fm.scheme)
    chi = fm.orbits.chi_batch
    for slot in (1, 2, 3):
        for op in (A(slot), A_star(slot)):
            out = kern.apply(op, chi)
            if not fm.in_span(out):
                raise ConsistencyError(f"{op} leaves the span of the chi basis")
    return True


# ---------------------------------------------------------------------------
# zeta table and the transition matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaTable:
    scheme: CycleScheme
    values: FieldArray   # (n, D+1): zeta_a(x, k)

    def __call__(self, x, k):
        return self.values[x % self.scheme.n, k]


def zeta_table(scheme: CycleScheme) -> ZetaTable:
    n, D = scheme.n, scheme.D
    f = scheme.field
    rows = []
    for x in range(n):
        row = []
        for k in range(D + 1):
            if k == 0:
                row.append(f.one)
            elif scheme.even and k == D:
                row.append(f.root_power(x * D))
            else:
                row.append(f.root_power(x * k) + f.root_power(-x * k))
        rows.append(row)
    values = FieldArray.from_scalars(f, rows)
    mirror = values.take((-np.arange(n)) % n, axis=0)
    if not mirror.equals(values):
        raise ConsistencyError("zeta_a(x, k) != zeta_a(n - x, k)")
    # E_k applied to vertex 0 is |X|^-1 sum_x zeta_a(x, k) x
    cols = stack([e[:, 0] for e in scheme.bose_mesner.E], axis=1)
    if not cols.equals(values.scale(Fraction(1, n))):
        raise ConsistencyError("E_k (vertex 0) differs from the zeta table")
    return ZetaTable(scheme, values)


@dataclass
class TransitionMatrix:
    q_labels: list
    p_labels: list
    coeffs: FieldArray     # rows Q labels, columns P labels
    inverse: FieldArray    # rows P labels, columns Q labels

    def csv_rows(self):
        yield ["q_h", "q_i", "q_j", "p_r", "p_s", "p_t", "value"]
        for a, ql in enumerate(self.q_labels):
            row = self.coeffs[a].scalars()
            for b, pl in enumerate(self.p_labels):
                yield [*ql, *pl, json.dumps(to_json(row[b]), separators=(",", ":"))]


def _orbit_zeta_sums(fm: FundamentalModule, zt: ZetaTable, h: int) -> FieldArray:
    """sum over each orbit of zeta(u,h) zeta(w,i) zeta(z,j); shape (i, j, orbits)."""
    scheme = fm.scheme
    n, D = scheme.n, scheme.D
    k = D + 1
    order, starts = fm._order
    idx = np.arange(n)
    u, w, z = (a.ravel() for a in np.meshgrid(idx, idx, idx, indexing="ij"))
    Z = zt.values
    zu = Z[:, h].take(u)                                 # (t,)
    zw = Z.take(w, axis=0).T                             # (i, t)
    zz = Z.take(z, axis=0).T                             # (j, t)
    out = []
    for i in range(k):
        part = (zu * zw[i]).reshape(1, -1) * zz          # (j, t)
        out.append(segment_sum(part, order, starts, axis=1))
    return stack(out)


def transition_matrix(fm: FundamentalModule, zt: ZetaTable | None = None) -> TransitionMatrix:
    """Coefficients of each nonzero Q in the P basis by the closed formula.

    Verified by rebuilding every Q entry-exactly from the P basis and by the
    inner-product identity with ||P||^2 equal to the support size; the inverse
    is formed from the orthogonality of both bases and checked on both sides.
    """
    scheme = fm.scheme
    zt = zt or zeta_table(scheme)
    n, D = scheme.n, scheme.D
    k = D + 1
    f = scheme.field
    sizes = [o.size for o in fm.orbits]
    order, starts = fm._order
    q_pos = {lab: a for a, lab in enumerate(fm.q_labels)}
    rows = [None] * len(fm.q_labels)
    for h in range(k):
        sums = _orbit_zeta_sums(fm, zt, h)                       # (i, j, orbits)
        coef = scale_rational(sums, [Fraction(1, n * s) for s in sizes])
        direct = _q_direct_for_h(scheme, h)                       # (i, j, n, n, n)
        if not fm.expand(coef).equals(direct):
            raise ConsistencyError(f"closed-form coefficients fail to rebuild Q_({h},.,.)")
        # |X| <Q, P> against |Omega|^-1 (sum zeta zeta zeta) ||P||^2
        flat = direct.conj().reshape(k, k, n ** 3)
        inner = segment_sum(flat, order, starts, axis=2).scale(n)
        support = [int(c) for c in np.diff(np.append(starts, n ** 3))]
        rhs = scale_rational(sums, [Fraction(p, s) for p, s in zip(support, sizes)])
        if not inner.equals(rhs):
            raise ConsistencyError(f"inner-product identity fails for h={h}")
        for i in range(k):
            for j in range(k):
                if (h, i, j) in q_pos:
                    rows[q_pos[(h, i, j)]] = coef[i, j:j + 1]
                elif not coef[i, j:j + 1].is_zero():
                    raise ConsistencyError(f"coefficients of the zero vector Q{(h, i, j)}")
    by_orbit = FieldArray.concatenate(rows, axis=0)
    if not by_orbit.equals(fm.q_coords):
        raise ConsistencyError("closed-form coefficients differ from Q read at representatives")
    coeffs = by_orbit.take(fm.p_to_orbit, axis=1)
    # inverse: d[b, a] = conj(c[a, b]) ||P_b||^2 / ||Q_a||^2
    inv_norms = [f.inverse(v) for v in fm.q_norms.scalars()]
    inverse = scale_rational(coeffs.conj().T, fm.p_sizes, axis=0)
    inverse = stack([inverse[:, a].scale(inv_norms[a]) for a in range(len(inv_norms))],
                    axis=1)
    ident = FieldArray.eye(f, len(fm.q_labels))
    if not ((coeffs @ inverse).equals(ident) and (inverse @ coeffs).equals(ident)):
        raise ConsistencyError("transition matrix times its inverse is not the identity")
    return TransitionMatrix(list(fm.q_labels), list(fm.p_labels), coeffs, inverse)
