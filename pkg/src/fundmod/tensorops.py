"""Vectors of V (x) V (x) V and the slot-wise generator actions.

A tensor vector is held densely as a field array of shape ``(n, n, n)``; the
entry at ``(x, y, z)`` is the coefficient of ``x (x) y (x) z``.  The sparse
view (nonzero triples only, lexicographic order) is what gets iterated and
serialised.  Operators also act on batches of shape ``(B, n, n, n)``, which is
how the relation checks run over many basis vectors at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import RelationFailure
from .exactfield import _add_int, _matmul_int, to_json
from .fieldarray import FieldArray
from .scheme import CycleScheme

KINDS = ("adjacency", "dual_adjacency", "idempotent", "dual_idempotent")

# the pair of coordinates whose distance drives the dual maps in each slot
OPPOSITE = {1: (1, 2), 2: (0, 2), 3: (0, 1)}


@dataclass(frozen=True)
class SlotOperator:
    kind: str
    slot: int
    index: int | None = None
    scheme: CycleScheme | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.slot not in (1, 2, 3):
            raise ValueError(f"slot must be 1, 2 or 3, got {self.slot!r}")
        if self.kind in ("idempotent", "dual_idempotent") and self.index is None:
            raise ValueError(f"{self.kind} needs an index")

    def __str__(self):
        name = {"adjacency": "A", "dual_adjacency": "A*",
                "idempotent": "E", "dual_idempotent": "E*"}[self.kind]
        sub = "" if self.index is None else f"_{self.index}"
        return f"{name}{sub}^({self.slot})"


def A(slot, scheme=None):
    return SlotOperator("adjacency", slot, None, scheme)


def A_star(slot, scheme=None):
    return SlotOperator("dual_adjacency", slot, None, scheme)


def E(index, slot, scheme=None):
    return SlotOperator("idempotent", slot, index, scheme)


def E_star(index, slot, scheme=None):
    return SlotOperator("dual_idempotent", slot, index, scheme)


# ---------------------------------------------------------------------------
# tensor vectors
# ---------------------------------------------------------------------------

class TensorVector:
    __slots__ = ("scheme", "values")

    def __init__(self, scheme: CycleScheme, values: FieldArray):
        n = scheme.n
        if values.shape != (n, n, n):
            raise ValueError(f"expected shape {(n, n, n)}, got {values.shape}")
        self.scheme = scheme
        self.values = values

    @classmethod
    def zero(cls, scheme):
        return cls(scheme, FieldArray.zeros(scheme.field, (scheme.n,) * 3))

    @classmethod
    def from_ints(cls, scheme, ints, den=1):
        return cls(scheme, FieldArray.from_ints(scheme.field, ints, den))

    @classmethod
    def unit(cls, scheme, triple):
        n = scheme.n
        _check_triple(triple, n)
        arr = np.zeros((n, n, n), dtype=np.int64)
        arr[tuple(triple)] = 1
        return cls.from_ints(scheme, arr)

    @classmethod
    def from_entries(cls, scheme, entries: dict):
        n = scheme.n
        for t in entries:
            _check_triple(t, n)
        keys = list(entries)
        flat = [0] * n ** 3
        for t in keys:
            flat[(t[0] * n + t[1]) * n + t[2]] = entries[t]
        return cls(scheme, FieldArray.from_scalars(scheme.field, flat, (n, n, n)))

    # sparse view -----------------------------------------------------------
    def support(self) -> np.ndarray:
        """Nonzero triples as an (m, 3) array in lexicographic order."""
        return np.argwhere(self.values.nonzero_mask())

    def entries(self) -> dict:
        return {tuple(int(c) for c in t): self.values[tuple(t)] for t in self.support()}

    def __len__(self):
        return int(self.values.nonzero_mask().sum())

    def to_json(self):
        return [{"triple": list(t), "value": to_json(v)} for t, v in self.entries().items()]

    # arithmetic ------------------------------------------------------------
    def _same(self, other):
        if other.scheme != self.scheme:
            raise ValueError(f"scheme mismatch: {self.scheme} vs {other.scheme}")

    def __add__(self, other):
        self._same(other)
        return TensorVector(self.scheme, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return TensorVector(self.scheme, self.values - other.values)

    def __neg__(self):
        return TensorVector(self.scheme, -self.values)

    def scale(self, s):
        return TensorVector(self.scheme, self.values.scale(s))

    def is_zero(self):
        return self.values.is_zero()

    def equals(self, other):
        self._same(other)
        return self.values.equals(other.values)

    def __eq__(self, other):
        return isinstance(other, TensorVector) and other.scheme == self.scheme \
            and self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"TensorVector(n={self.scheme.n}, nnz={len(self)})"


def _check_triple(t, n):
    if len(t) != 3 or not all(0 <= int(c) < n for c in t):
        raise ValueError(f"triple {tuple(t)} out of range for n={n}")


def one_tensor_cubed(scheme) -> TensorVector:
    n = scheme.n
    return TensorVector.from_ints(scheme, np.ones((n, n, n), dtype=np.int64))


def inner_product(u: TensorVector, v: TensorVector):
    """sum conj(u) v, conjugate-linear in ``u``."""
    u._same(v)
    return (u.values.conj() * v.values).sum()


def norm_squared(v: TensorVector):
    return inner_product(v, v)


# ---------------------------------------------------------------------------
# slot-operator kernels
# ---------------------------------------------------------------------------

class SlotKernels:
    """Per-scheme tables for applying slot operators to (..., n, n, n) arrays."""

    def __init__(self, scheme: CycleScheme):
        self.scheme = scheme
        self.field = f = scheme.field
        n, D = scheme.n, scheme.D
        dist = scheme.distance_table
        idx = np.arange(n)
        x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
        self.opposite_dist = {
            1: dist[y, z].ravel(),
            2: dist[x, z].ravel(),
            3: dist[x, y].ravel(),
        }
        self.level_index = {r: [np.flatnonzero(d == i) for i in range(D + 1)]
                            for r, d in self.opposite_dist.items()}
        theta_star = scheme.spectral.theta_star
        if f.exact:
            mats = [f.mul_matrix(t) for t in theta_star]
            self.theta_den = math.lcm(*(d for _, d in mats))
            self.theta_mats = [m * (self.theta_den // d) for m, d in mats]
        else:
            self.theta_values = np.array(theta_star, dtype=np.complex128)
        self.E = scheme.bose_mesner.E

    def _flat(self, arr: FieldArray):
        n = self.scheme.n
        lead = arr.shape[:-3]
        return arr.num.reshape(lead + (n ** 3, self.field.width)), lead

    def adjacency(self, arr: FieldArray, slot: int) -> FieldArray:
        axis = arr.ndim - 4 + slot
        num = arr.num
        out = _add_int(np.roll(num, 1, axis=axis), np.roll(num, -1, axis=axis))
        return FieldArray(self.field, out, arr.den)

    def dual_adjacency(self, arr: FieldArray, slot: int) -> FieldArray:
        flat, lead = self._flat(arr)
        if not self.field.exact:
            out = flat * self.theta_values[self.opposite_dist[slot]][:, None]
            return FieldArray(self.field, out.reshape(arr.num.shape), 1, normalize=False)
        parts = []
        for i, where in enumerate(self.level_index[slot]):
            if where.size:
                parts.append((where, _matmul_int(flat[..., where, :], self.theta_mats[i])))
        dtype = object if any(p.dtype == object for _, p in parts) else np.int64
        out = np.zeros(flat.shape, dtype=dtype)
        for where, p in parts:
            out[..., where, :] = p
        return FieldArray(self.field, out.reshape(arr.num.shape), arr.den * self.theta_den)

    def dual_idempotent(self, arr: FieldArray, slot: int, i: int) -> FieldArray:
        flat, _ = self._flat(arr)
        keep = (self.opposite_dist[slot] == i)[:, None]
        return FieldArray(self.field, (flat * keep).reshape(arr.num.shape), arr.den)

    def idempotent(self, arr: FieldArray, slot: int, i: int) -> FieldArray:
        return self.matrix_on_slot(self.E[i], arr, slot)

    def matrix_on_slot(self, M: FieldArray, arr: FieldArray, slot: int) -> FieldArray:
        """Apply the n x n matrix ``M`` to one tensor factor."""
        n = self.scheme.n
        axis = arr.ndim - 4 + slot
        moved = np.moveaxis(arr.num, axis, 0)
        rest = moved.shape[1:-1]
        front = FieldArray(self.field, moved.reshape((n, -1, self.field.width)),
                           arr.den, normalize=False)
        prod = M @ front
        back = np.moveaxis(prod.num.reshape((n,) + rest + (self.field.width,)), 0, axis)
        return FieldArray(self.field, np.ascontiguousarray(back), prod.den)

    def apply(self, op: SlotOperator, arr: FieldArray) -> FieldArray:
        if op.kind == "adjacency":
            return self.adjacency(arr, op.slot)
        if op.kind == "dual_adjacency":
            return self.dual_adjacency(arr, op.slot)
        if op.kind == "dual_idempotent":
            return self.dual_idempotent(arr, op.slot, op.index)
        return self.idempotent(arr, op.slot, op.index)


@lru_cache(maxsize=32)
def kernels(scheme: CycleScheme) -> SlotKernels:
    return SlotKernels(scheme)


def apply(op: SlotOperator, v):
    """Apply a slot operator to a TensorVector or to a batch array."""
    if isinstance(v, TensorVector):
        if op.scheme is not None and op.scheme != v.scheme:
            raise ValueError(f"scheme mismatch: operator on {op.scheme}, vector on {v.scheme}")
        if op.index is not None and not 0 <= op.index <= v.scheme.D:
            raise ValueError(f"index {op.index} out of range 0..{v.scheme.D}")
        return TensorVector(v.scheme, kernels(v.scheme).apply(op, v.values))
    if op.scheme is None:
        raise ValueError("applying to a raw array needs an operator bound to a scheme")
    return kernels(op.scheme).apply(op, v)


def apply_word(ops, v):
    """Apply ``ops[0] ops[1] ... ops[-1]`` to ``v`` (rightmost first)."""
    for op in reversed(ops):
        v = apply(op, v)
    return v


def unit_batch(scheme, start: int, stop: int) -> FieldArray:
    """Unit vectors number start..stop-1 (lexicographic triple order)."""
    n = scheme.n
    count = stop - start
    arr = np.zeros((count, n ** 3), dtype=np.int64)
    arr[np.arange(count), np.arange(start, stop)] = 1
    return FieldArray.from_ints(scheme.field, arr.reshape(count, n, n, n))


def stack_vectors(vectors) -> FieldArray:
    from .fieldarray import stack
    return stack([v.values for v in vectors])


# ---------------------------------------------------------------------------
# the S3-symmetric tridiagonal relations
# ---------------------------------------------------------------------------

def _poly_add(p, q, field):
    out = dict(p)
    for w, c in q.items():
        out[w] = out[w] + c if w in out else c
    return {w: c for w, c in out.items() if not field.is_zero(c)}


def _poly_scale(p, s, field):
    return {w: c * s for w, c in p.items() if not field.is_zero(c * s)}


def _poly_mul(p, q, field):
    out = {}
    for w1, c1 in p.items():
        for w2, c2 in q.items():
            out = _poly_add(out, {w1 + w2: c1 * c2}, field)
    return out


def _commutator(p, q, field):
    return _poly_add(_poly_mul(p, q, field),
                     _poly_scale(_poly_mul(q, p, field), -1, field), field)


def relation_polynomials(scheme: CycleScheme) -> dict:
    """Every defining relation as a noncommutative polynomial in the letters
    A1, A2, A3 (adjacency) and S1, S2, S3 (dual adjacency).

    Returns name -> {word: coefficient}; 9 commutation relations plus two
    tridiagonal relations for each of the 6 ordered pairs of distinct slots.
    """
    f = scheme.field
    tri = scheme.tridiagonal
    one = f.one

    def g(letter):
        return {(letter,): one}

    rels = {}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i < j:
                rels[f"[A{i},A{j}]"] = _commutator(g(f"A{i}"), g(f"A{j}"), f)
                rels[f"[A{i}*,A{j}*]"] = _commutator(g(f"S{i}"), g(f"S{j}"), f)
        rels[f"[A{i},A{i}*]"] = _commutator(g(f"A{i}"), g(f"S{i}"), f)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            a, b = g(f"A{i}"), g(f"S{j}")
            rels[f"TD(A{i},A{j}*)"] = _commutator(a, _tridiagonal_inner(
                a, b, tri.beta, tri.gamma, tri.rho, f), f)
            rels[f"TD*(A{j}*,A{i})"] = _commutator(b, _tridiagonal_inner(
                b, a, tri.beta, tri.gamma_star, tri.rho_star, f), f)
    return rels


def _tridiagonal_inner(a, b, beta, gamma, rho, f):
    """a^2 b - beta a b a + b a^2 - gamma (a b + b a) - rho b"""
    m = lambda *ps: _reduce_mul(ps, f)  # noqa: E731
    terms = [m(a, a, b), _poly_scale(m(a, b, a), -beta, f), m(b, a, a),
             _poly_scale(_poly_add(m(a, b), m(b, a), f), -gamma, f),
             _poly_scale(b, -rho, f)]
    out = {}
    for t in terms:
        out = _poly_add(out, t, f)
    return out


def _reduce_mul(ps, f):
    out = ps[0]
    for p in ps[1:]:
        out = _poly_mul(out, p, f)
    return out


_LETTERS = {f"A{r}": A(r) for r in (1, 2, 3)} | {f"S{r}": A_star(r) for r in (1, 2, 3)}


def evaluate_polynomial(poly: dict, batch: FieldArray, kern: SlotKernels) -> FieldArray:
    """Sum of coefficient * word(batch), words applied right to left.

    Shared suffixes are evaluated once.
    """
    memo = {(): batch}

    def word_value(word):
        if word in memo:
            return memo[word]
        tail = word_value(word[1:])
        val = kern.apply(_LETTERS[word[0]], tail)
        memo[word] = val
        return val

    total = None
    for word in sorted(poly, key=lambda w: (len(w), w)):
        term = word_value(word).scale(poly[word])
        total = term if total is None else total + term
    memo.clear()  # word_value closes over itself; do not wait for the cycle collector
    if total is None:
        return FieldArray.zeros(kern.field, batch.shape)
    return total


@dataclass
class RelationReport:
    relations: int
    vectors: int
    max_residual: float
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"relations": self.relations, "vectors": self.vectors,
                "max_residual": self.max_residual, "ok": self.ok,
                "failures": self.failures}


def _chunks(total, size):
    for start in range(0, total, size):
        yield start, min(total, start + size)


def verify_s3_relations(scheme: CycleScheme, domain="full", chunk_entries: int = 1 << 19,
                        raise_on_failure: bool = True, tol: float = 1e-9) -> RelationReport:
    """Apply every defining relation to every vector of ``domain``.

    ``domain`` is ``"full"`` (all n^3 unit vectors), a list of TensorVectors,
    or a batch array of shape (B, n, n, n).  On the exact backend any nonzero
    residual is a failure; on the float backend residuals above ``tol`` are.
    """
    kern = kernels(scheme)
    n, f = scheme.n, scheme.field
    if isinstance(domain, str):
        if domain != "full":
            raise ValueError(f"unknown domain {domain!r}")
        count = n ** 3
        fetch = lambda s, e: unit_batch(scheme, s, e)  # noqa: E731
    else:
        batch = domain if isinstance(domain, FieldArray) else stack_vectors(domain)
        count = batch.shape[0]
        fetch = lambda s, e: FieldArray(f, batch.num[s:e], batch.den)  # noqa: E731
    size = max(1, chunk_entries // (n ** 3 * f.width))
    rels = relation_polynomials(scheme)
    worst = 0.0
    failures = []
    for start, stop in _chunks(count, size):
        vecs = fetch(start, stop)
        for name, poly in rels.items():
            res = evaluate_polynomial(poly, vecs, kern)
            if f.exact:
                bad = res.nonzero_mask().reshape(stop - start, -1).any(axis=1)
                if bad.any():
                    worst = max(worst, float(np.abs(res.to_complex()).max()))
            else:
                mags = np.abs(res.to_complex()).reshape(stop - start, -1).max(axis=1)
                worst = max(worst, float(mags.max()))
                bad = mags > tol
            for b in np.flatnonzero(bad):
                failures.append({"relation": name, "vector": int(start + b)})
                if raise_on_failure:
                    raise RelationFailure(f"relation {name} fails on basis vector "
                                          f"{start + b}", relation=name,
                                          vector=int(start + b))
    return RelationReport(len(rels), count, worst, failures)


# ---------------------------------------------------------------------------
# single-slot operator identities
# ---------------------------------------------------------------------------

def slot_identities(scheme: CycleScheme, batch: FieldArray) -> dict:
    """Check the single-slot identities for A^(r), E_i^(r) and their duals.

    Each identity is tested by applying both sides to every vector of
    ``batch``; the result maps identity name -> bool.
    """
    kern = kernels(scheme)
    f, D = scheme.field, scheme.D
    spec = scheme.spectral
    out = {}
    for starred in (False, True):
        tag = "dual_" if starred else ""
        th = spec.theta_star if starred else spec.theta
        adj = (lambda v, r: kern.dual_adjacency(v, r)) if starred else kern.adjacency
        proj = kern.dual_idempotent if starred else kern.idempotent
        ok = {k: True for k in ("expansion", "projectors", "eigen", "resolution", "interpolation")}
        for r in (1, 2, 3):
            P = [proj(batch, r, i) for i in range(D + 1)]
            av = adj(batch, r)
            # A = sum theta_i E_i
            ok["expansion"] &= sum((P[i].scale(th[i]) for i in range(1, D + 1)),
                           P[0].scale(th[0])).equals(av)
            # identity = sum E_i
            ok["resolution"] &= sum(P[1:], P[0]).equals(batch)
            for i in range(D + 1):
                for j in range(D + 1):
                    pij = proj(P[j], r, i)
                    ok["projectors"] &= pij.equals(P[i]) if i == j else pij.is_zero()
                # A E_i = theta_i E_i = E_i A
                lhs = adj(P[i], r)
                ok["eigen"] &= lhs.equals(P[i].scale(th[i])) and proj(av, r, i).equals(lhs)
                # E_i = prod_{j != i} (A - theta_j) / (theta_i - theta_j)
                v = batch
                for j in range(D + 1):
                    if j != i:
                        c = th[i] - th[j]
                        c = c.inverse() if f.exact else 1 / c
                        v = (adj(v, r) - v.scale(th[j])).scale(c)
                ok["interpolation"] &= v.equals(P[i])
        out.update({f"{tag}{k}": bool(val) for k, val in ok.items()})
    return out
