"""The cycle graph and its association-scheme data.

Vertices are ``0..n-1`` with ``x ~ x +- 1 (mod n)``; ``n = 2D`` for the even
cycle and ``n = 2D + 1`` for the odd one.  Everything is computed over the
scheme's field (exact cyclotomic or complex float) and every constructor
re-checks the standard identities of the Bose-Mesner and dual Bose-Mesner
algebras before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ConsistencyError, DistanceRegularityError
from .exactfield import get_field, to_json
from .fieldarray import FieldArray, stack

PARITIES = ("even", "odd")


@dataclass(frozen=True)
class CycleScheme:
    D: int
    parity: str
    backend: str = "exact"

    def __post_init__(self):
        if not isinstance(self.D, (int, np.integer)) or self.D < 2:
            raise ValueError(f"diameter must be an integer >= 2, got {self.D!r}")
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")

    @classmethod
    def from_order(cls, n: int, backend: str = "exact"):
        return cls(n // 2, "even" if n % 2 == 0 else "odd", backend)

    @property
    def n(self) -> int:
        return 2 * self.D if self.parity == "even" else 2 * self.D + 1

    @property
    def even(self) -> bool:
        return self.parity == "even"

    base_vertex = 0

    @property
    def field(self):
        return get_field(self.backend, self.n)

    def with_backend(self, backend: str) -> CycleScheme:
        return CycleScheme(self.D, self.parity, backend)

    def distance(self, x: int, y: int) -> int:
        return distance(self, x, y)

    @cached_property
    def distance_table(self) -> np.ndarray:
        idx = np.arange(self.n)
        diff = np.abs(idx[:, None] - idx[None, :])
        table = np.minimum(diff, self.n - diff)
        table.setflags(write=False)
        return table

    def same(self, a, b) -> bool:
        """Scalar equality on the scheme's backend (exact or 1e-9)."""
        return self.field.is_zero(self.field(a) - self.field(b))

    # derived tables, built lazily and cached -------------------------------
    @cached_property
    def p(self) -> np.ndarray:
        return intersection_numbers(self)

    @cached_property
    def bose_mesner(self) -> BoseMesnerBasis:
        return build_bose_mesner(self)

    @cached_property
    def q(self) -> FieldArray:
        return krein_numbers(self, self.bose_mesner)

    @property
    def tensors(self) -> SchemeTensors:
        return SchemeTensors(self.p, self.q)

    @cached_property
    def dual(self) -> DualBasis:
        return build_dual(self, self.bose_mesner)

    @cached_property
    def spectral(self) -> SpectralData:
        return spectral_data(self)

    @cached_property
    def tridiagonal(self) -> TridiagonalScalars:
        return tridiagonal_scalars(self.spectral)


def distance(scheme: CycleScheme, x: int, y: int) -> int:
    n = scheme.n
    for v in (x, y):
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} out of range for a cycle on {n} vertices")
    d = abs(x - y)
    return min(d, n - d)


def _roots(field, n) -> FieldArray:
    return FieldArray.from_scalars(field, [field.root_power(k) for k in range(n)])


def _fail(kind: str, results: dict):
    bad = [k for k, ok in results.items() if not ok]
    if bad:
        raise ConsistencyError(f"{kind} identities failed: {', '.join(bad)}")


# ---------------------------------------------------------------------------
# intersection numbers
# ---------------------------------------------------------------------------

def _count_profile(table, x, y, D):
    counts = np.zeros((D + 1, D + 1), dtype=np.int64)
    for z in range(table.shape[0]):
        counts[table[x, z], table[z, y]] += 1
    return counts


def intersection_numbers(scheme: CycleScheme) -> np.ndarray:
    """p[h, i, j] = #{z : d(x, z) = i, d(z, y) = j} for any d(x, y) = h.

    Counted by enumeration at (0, h) and recounted at (1, 1 - h).
    """
    D, n = scheme.D, scheme.n
    table = scheme.distance_table
    p = np.zeros((D + 1, D + 1, D + 1), dtype=np.int64)
    for h in range(D + 1):
        first = _count_profile(table, 0, h, D)
        second = _count_profile(table, 1, (1 - h) % n, D)
        if not np.array_equal(first, second):
            raise DistanceRegularityError(
                f"intersection numbers at distance {h} depend on the vertex pair")
        p[h] = first
    p.setflags(write=False)
    return p


# ---------------------------------------------------------------------------
# Bose-Mesner algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoseMesnerBasis:
    A: tuple  # distance matrices A_0..A_D
    E: tuple  # primitive idempotents E_0..E_D

    @property
    def J(self):
        return sum(self.A[1:], self.A[0])


def idempotent_matrices(scheme: CycleScheme) -> list:
    """Closed-form primitive idempotents, in the natural Q-polynomial order."""
    field, n, D = scheme.field, scheme.n, scheme.D
    roots = _roots(field, n)
    idx = np.arange(n)
    diff = (idx[:, None] - idx[None, :]) % n
    inv_n = Fraction(1, n)
    mats = [FieldArray.from_ints(field, np.ones((n, n), dtype=np.int64), n)]
    for j in range(1, D + 1):
        plus = roots.take((diff * j) % n, axis=0)
        if scheme.even and j == D:
            # zeta^{(x-y)D} = (-1)^{x-y}
            mats.append(plus.scale(inv_n))
        else:
            minus = roots.take((-diff * j) % n, axis=0)
            mats.append((plus + minus).scale(inv_n))
    return mats


def bose_mesner_identities(scheme, bm: BoseMesnerBasis, p) -> dict:
    field, n, D = scheme.field, scheme.n, scheme.D
    A = bm.A
    ones = FieldArray.from_ints(field, np.ones((n, n), dtype=np.int64))
    res = {
        "A0_identity": A[0].equals(FieldArray.eye(field, n)),
        "sum_is_all_ones": bm.J.equals(ones),
        "symmetric": all(a.equals(a.T) for a in A),
        "real": all(a.equals(a.conj()) for a in A),
    }
    astack = stack(A).reshape(D + 1, n * n)
    ok = True
    for i in range(D + 1):
        for j in range(D + 1):
            coeffs = FieldArray.from_ints(field, p[:, i, j].reshape(1, D + 1))
            rhs = (coeffs @ astack).reshape(n, n)
            ok &= (A[i] @ A[j]).equals(rhs)
    res["products_expand"] = ok
    return res


def idempotent_identities(scheme, bm: BoseMesnerBasis) -> dict:
    field, n, D = scheme.field, scheme.n, scheme.D
    E = bm.E
    ones = FieldArray.from_ints(field, np.ones((n, n), dtype=np.int64), n)
    c5 = True
    for i in range(D + 1):
        for j in range(i, D + 1):
            prod = E[i] @ E[j]
            c5 &= prod.equals(E[i]) if i == j else prod.is_zero()
    return {
        "E0_is_J_over_n": E[0].equals(ones),
        "sum_is_identity": sum(E[1:], E[0]).equals(FieldArray.eye(field, n)),
        "real": all(e.equals(e.conj()) for e in E),
        "symmetric": all(e.equals(e.T) for e in E),
        # E_j E_i = (E_i E_j)^T, so i <= j covers every pair
        "orthogonal_projectors": c5,
    }


def build_bose_mesner(scheme: CycleScheme) -> BoseMesnerBasis:
    field, D = scheme.field, scheme.D
    table = scheme.distance_table
    A = tuple(FieldArray.from_ints(field, (table == i).astype(np.int64))
              for i in range(D + 1))
    bm = BoseMesnerBasis(A, tuple(idempotent_matrices(scheme)))
    _fail("Bose-Mesner", bose_mesner_identities(scheme, bm, scheme.p))
    _fail("idempotent", idempotent_identities(scheme, bm))
    return bm


# ---------------------------------------------------------------------------
# Krein parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeTensors:
    p: np.ndarray        # p[h, i, j], integers
    q: FieldArray        # q[h, i, j], field scalars


def krein_numbers(scheme: CycleScheme, bm: BoseMesnerBasis) -> FieldArray:
    """q[h, i, j] from E_i o E_j = |X|^-1 sum_h q[h, i, j] E_h.

    Extracted with the trace pairing (the E_h are trace-orthogonal), then the
    expansion is rebuilt and compared with the entry-wise product.
    """
    field, n, D = scheme.field, scheme.n, scheme.D
    E = bm.E
    k = D + 1
    schur = stack([E[i] * E[j] for i in range(k) for j in range(k)])
    schur_flat = schur.reshape(k * k, n * n)
    e_flat = stack(E).reshape(k, n * n)
    # trace(S E_h) = sum_ab S[a,b] E_h[b,a]; E_h is symmetric
    pair = e_flat @ schur_flat.T  # (h, ij)
    mult = [E[h].trace() for h in range(k)]
    rows = []
    for h in range(k):
        m = mult[h]
        m = m.as_rational() if field.exact else m
        rows.append(pair[h].scale(Fraction(n) / m if field.exact else n / m))
    q = stack(rows).reshape(k, k, k)
    # residual: |X|^-1 sum_h q[h,i,j] E_h must reproduce E_i o E_j
    coeffs = q.reshape(k, k * k).T  # (ij, h)
    rebuilt = (coeffs @ e_flat).scale(Fraction(1, n))
    if not rebuilt.equals(schur_flat):
        raise ConsistencyError("Krein expansion does not reproduce E_i o E_j")
    return q


def krein_identities(scheme: CycleScheme, q: FieldArray) -> dict:
    field, D = scheme.field, scheme.D
    k = D + 1
    zero = field.is_zero
    vals = q.to_list()
    d1 = all(scheme.same(vals[h][0][j], int(h == j)) for h in range(k) for j in range(k))
    d2 = all(scheme.same(vals[h][i][0], int(h == i)) for h in range(k) for i in range(k))
    d3 = all((not zero(vals[0][i][j])) == (i == j) for i in range(k) for j in range(k))
    flat = q.to_complex().ravel()
    real = q.equals(q.conj())
    nonneg = bool(np.all(flat.real > -1e-9))
    return {"q_h0j_delta": d1, "q_hi0_delta": d2, "q_0ij_nonzero_iff_equal": d3, "real": real, "nonnegative": nonneg}


def q_polynomial_check(tensors: SchemeTensors) -> bool:
    """True iff q[h,1,j] = 0 exactly when |h - j| != 1 (h != j)."""
    q = tensors.q
    k = q.shape[0]
    zero = q.field.is_zero
    for h in range(k):
        for j in range(k):
            if h != j and zero(q[h, 1, j]) != (abs(h - j) != 1):
                return False
    return True


# ---------------------------------------------------------------------------
# dual Bose-Mesner algebra (base vertex 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualBasis:
    E_star: tuple  # diagonals of E*_0..E*_D, each a length-n FieldArray
    A_star: tuple  # diagonals of A*_0..A*_D

    @staticmethod
    def matrix(diagonal: FieldArray) -> FieldArray:
        n = diagonal.shape[0]
        num = np.zeros((n, n) + diagonal.num.shape[1:], dtype=diagonal.num.dtype)
        num[np.arange(n), np.arange(n)] = diagonal.num
        return FieldArray(diagonal.field, num, diagonal.den)


def dual_identities(scheme, dual: DualBasis, q: FieldArray) -> dict:
    field, n, D = scheme.field, scheme.n, scheme.D
    k = D + 1
    Es, As = dual.E_star, dual.A_star
    one = FieldArray.from_ints(field, np.ones(n, dtype=np.int64))
    e4 = all((Es[i] * Es[j]).equals(Es[i]) if i == j else (Es[i] * Es[j]).is_zero()
             for i in range(k) for j in range(k))
    a_stack = stack(As)  # (h, y)
    f4 = True
    for i in range(k):
        for j in range(k):
            rhs = q[:, i, j].reshape(1, k) @ a_stack
            f4 &= (As[i] * As[j]).equals(rhs.reshape(n))
    return {
        "dual_sum_is_identity": sum(Es[1:], Es[0]).equals(one),
        "dual_real": all(e.equals(e.conj()) for e in Es),
        # diagonal matrices are symmetric by construction
        "dual_symmetric": True,
        "dual_orthogonal_projectors": e4,
        "A0_star_identity": As[0].equals(one),
        "A_star_sum": sum(As[1:], As[0]).equals(Es[0].scale(n)),
        "A_star_symmetric": True,
        "A_star_products_expand": f4,
    }


def build_dual(scheme: CycleScheme, bm: BoseMesnerBasis) -> DualBasis:
    field, n, D = scheme.field, scheme.n, scheme.D
    x = scheme.base_vertex
    row = scheme.distance_table[x]
    E_star = tuple(FieldArray.from_ints(field, (row == i).astype(np.int64))
                   for i in range(D + 1))
    # (A*_i)_{yy} = |X| (E_i)_{xy}
    A_star = tuple(bm.E[i][x].scale(n) for i in range(D + 1))
    dual = DualBasis(E_star, A_star)
    _fail("dual Bose-Mesner", dual_identities(scheme, dual, scheme.q))
    return dual


# ---------------------------------------------------------------------------
# eigenvalues and the tridiagonal scalars
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralData:
    n: int
    D: int
    field: object
    theta: tuple
    theta_star: tuple
    eigenvectors: FieldArray  # row j = sum_x zeta^{xj} x (unnormalised)

    def eigenspace_modes(self, j: int) -> tuple:
        """Fourier modes k whose eigenvectors span the theta_j eigenspace."""
        return tuple(sorted({j % self.n, (-j) % self.n}))


def spectral_data(scheme: CycleScheme) -> SpectralData:
    field, n, D = scheme.field, scheme.n, scheme.D
    bm, dual = scheme.bose_mesner, scheme.dual
    A1, E = bm.A[1], bm.E
    theta = []
    for i in range(D + 1):
        ae = A1 @ E[i]
        e00 = E[i][0, 0]
        e00 = e00.as_rational() if field.exact else e00
        theta.append(ae[0, 0] / e00)
    if not sum((E[i].scale(theta[i]) for i in range(1, D + 1)),
               E[0].scale(theta[0])).equals(A1):
        raise ConsistencyError("A_1 != sum theta_i E_i")
    theta_star = [dual.A_star[1][i] for i in range(D + 1)]  # d(0, i) = i
    rebuilt = sum((dual.E_star[i].scale(theta_star[i]) for i in range(1, D + 1)),
                  dual.E_star[0].scale(theta_star[0]))
    if not rebuilt.equals(dual.A_star[1]):
        raise ConsistencyError("A*_1 != sum theta*_i E*_i")
    for i in range(D + 1):
        closed = field.root_power(i) + field.root_power(-i)
        if not (scheme.same(theta[i], closed) and scheme.same(theta_star[i], closed)):
            raise ConsistencyError(f"eigenvalue {i} differs from zeta^i + zeta^-i")
    for seq in (theta, theta_star):
        for i in range(D + 1):
            for j in range(i):
                if scheme.same(seq[i], seq[j]):
                    raise ConsistencyError("eigenvalues are not mutually distinct")
    idx = np.arange(n)
    roots = _roots(field, n)
    vecs = roots.take((idx[:, None] * idx[None, :]) % n, axis=0)
    return SpectralData(n, D, field, tuple(theta), tuple(theta_star), vecs)


@dataclass(frozen=True)
class TridiagonalScalars:
    beta: object
    gamma: object
    gamma_star: object
    rho: object
    rho_star: object

    def as_tuple(self):
        return (self.beta, self.gamma, self.gamma_star, self.rho, self.rho_star)


def tridiagonal_scalars(spec: SpectralData) -> TridiagonalScalars:
    """beta, gamma, gamma*, rho, rho* from the two eigenvalue sequences.

    Every defining expression is evaluated at every admissible index and
    compared, and the result is compared with the closed forms in zeta.
    """
    field, D = spec.field, spec.D
    th, ts = spec.theta, spec.theta_star
    zeta = field.root_power(1)
    zinv = field.root_power(-1)

    def same(a, b):
        return field.is_zero(a - b)

    if D >= 3:
        beta = (th[0] - th[3]) / (th[1] - th[2]) - 1
    else:
        beta = zeta + zinv
    for seq in (th, ts):
        for i in range(2, D):
            if not same((beta + 1) * (seq[i - 1] - seq[i]), seq[i - 2] - seq[i + 1]):
                raise ConsistencyError(f"beta + 1 ratio fails at i={i}")

    def gamma_of(seq, i):
        return seq[i - 1] - beta * seq[i] + seq[i + 1]

    gamma, gamma_star = gamma_of(th, 1), gamma_of(ts, 1)
    for i in range(1, D):
        if not (same(gamma_of(th, i), gamma) and same(gamma_of(ts, i), gamma_star)):
            raise ConsistencyError(f"gamma expression differs at i={i}")

    def rho_of(seq, g, i):
        a, b = seq[i - 1], seq[i]
        return a * a - beta * a * b + b * b - g * (a + b)

    rho, rho_star = rho_of(th, gamma, 1), rho_of(ts, gamma_star, 1)
    for i in range(1, D + 1):
        if not (same(rho_of(th, gamma, i), rho) and same(rho_of(ts, gamma_star, i), rho_star)):
            raise ConsistencyError(f"rho expression differs at i={i}")

    closed_rho = -((zeta - zinv) * (zeta - zinv))
    checks = (same(beta, zeta + zinv), field.is_zero(gamma), field.is_zero(gamma_star),
              same(rho, closed_rho), same(rho_star, closed_rho))
    if not all(checks):
        raise ConsistencyError("tridiagonal scalars differ from their closed forms")
    return TridiagonalScalars(beta, gamma, gamma_star, rho, rho_star)


def spectrum_report(scheme: CycleScheme) -> dict:
    spec, tri = scheme.spectral, scheme.tridiagonal
    return {
        "n": scheme.n,
        "D": scheme.D,
        "parity": scheme.parity,
        "theta": [to_json(t) for t in spec.theta],
        "theta_star": [to_json(t) for t in spec.theta_star],
        "beta": to_json(tri.beta),
        "gamma": to_json(tri.gamma),
        "gamma_star": to_json(tri.gamma_star),
        "rho": to_json(tri.rho),
        "rho_star": to_json(tri.rho_star),
    }
