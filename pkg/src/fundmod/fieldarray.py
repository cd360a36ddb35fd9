"""Dense arrays of field elements.

A ``FieldArray`` of shape ``S`` stores a numpy array ``num`` of shape
``S + (w,)`` and one integer denominator ``den``; entry ``idx`` is the field
element with coefficient row ``num[idx] / den`` (``w`` = phi(n) on the exact
backend, 1 on the float backend).  Exact arrays are kept in lowest terms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .exactfield import (
    _INT_LIMIT,
    _add_int,
    _matmul_int,
    _maxabs,
    _scale_int,
    _shrink,
    _widen,
)


class FieldArray:
    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=1, normalize=True):
        self.field = field
        if normalize:
            num, den = field.normalize(num, den)
        self.num = num
        self.den = den

    # construction ----------------------------------------------------------
    @classmethod
    def zeros(cls, field, shape):
        shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
        return cls(field, np.zeros(shape + (field.width,), dtype=field.dtype), 1,
                   normalize=False)

    @classmethod
    def from_ints(cls, field, ints, den=1):
        ints = np.asarray(ints)
        num = np.zeros(ints.shape + (field.width,), dtype=field.dtype)
        num[..., 0] = ints
        return cls(field, num, den)

    @classmethod
    def from_scalars(cls, field, values, shape=None):
        arr = np.empty(0, dtype=object)
        if shape is None:
            arr = np.array(values, dtype=object)
            shape = arr.shape
            flat = list(arr.ravel())
        else:
            flat = list(values)
        num, den = field.encode(flat)
        return cls(field, num.reshape(tuple(shape) + (field.width,)), den)

    @classmethod
    def eye(cls, field, n):
        return cls.from_ints(field, np.eye(n, dtype=np.int64))

    @classmethod
    def concatenate(cls, arrays, axis=0):
        arrays = list(arrays)
        field = arrays[0].field
        den = math.lcm(*(a.den for a in arrays))
        nums = [_scale_int(a.num, den // a.den) for a in arrays]
        if any(x.dtype == object for x in nums):
            nums = [_widen(x) for x in nums]
        return cls(field, np.concatenate(nums, axis=axis), den)

    # shape -----------------------------------------------------------------
    @property
    def shape(self):
        return self.num.shape[:-1]

    @property
    def ndim(self):
        return self.num.ndim - 1

    def __len__(self):
        return self.num.shape[0]

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return FieldArray(self.field, self.num.reshape(shape + (self.field.width,)),
                          self.den, normalize=False)

    def transpose(self, *axes):
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return FieldArray(self.field, self.num.transpose(axes + (self.ndim,)),
                          self.den, normalize=False)

    @property
    def T(self):
        return self.transpose()

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        sub = self.num[idx + (slice(None),)]
        if sub.ndim == 1:
            return self.field.decode(sub, self.den)
        return FieldArray(self.field, sub, self.den)

    def take(self, indices, axis=0):
        return FieldArray(self.field, np.take(self.num, indices, axis=axis), self.den)

    def compress(self, mask, axis=0):
        return FieldArray(self.field, np.compress(mask, self.num, axis=axis), self.den)

    # conversion ------------------------------------------------------------
    def to_list(self):
        """Nested Python lists of scalars."""
        flat = [self.field.decode(r, self.den)
                for r in self.num.reshape(-1, self.field.width)]
        if not self.shape:
            return flat[0]
        arr = np.empty(len(flat), dtype=object)
        arr[:] = flat
        return arr.reshape(self.shape).tolist()

    def scalars(self):
        return [self.field.decode(r, self.den)
                for r in self.num.reshape(-1, self.field.width)]

    def to_complex(self):
        f = self.field
        if not f.exact:
            return self.num[..., 0].astype(np.complex128)
        zeta = np.exp(2j * np.pi * np.arange(f.width) / f.n)
        return (self.num.astype(np.float64) @ zeta) / self.den

    # predicates ------------------------------------------------------------
    def nonzero_mask(self):
        return ~self.field.zero_rows(self.num)

    def is_zero(self) -> bool:
        return not self.nonzero_mask().any()

    def equals(self, other) -> bool:
        if self.shape != other.shape:
            return False
        if self.field.exact:
            return self.den == other.den and np.array_equal(self.num, other.num)
        return (self - other).is_zero()

    # arithmetic ------------------------------------------------------------
    def _check(self, other):
        if other.field is not self.field and (
                other.field.exact != self.field.exact or other.field.n != self.field.n):
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other):
        if not isinstance(other, FieldArray):
            return NotImplemented
        self._check(other)
        den = math.lcm(self.den, other.den) if self.field.exact else 1
        a = _scale_int(self.num, den // self.den)
        b = _scale_int(other.num, den // other.den)
        return FieldArray(self.field, _add_int(a, b), den)

    def __neg__(self):
        return FieldArray(self.field, -self.num, self.den, normalize=False)

    def __sub__(self, other):
        if not isinstance(other, FieldArray):
            return NotImplemented
        return self + (-other)

    def scale(self, s):
        m, d = self.field.mul_matrix(s)
        return FieldArray(self.field, _matmul_int(self.num, m), self.den * d)

    def __mul__(self, other):
        if isinstance(other, FieldArray):
            return self.hadamard(other)
        return self.scale(other)

    __rmul__ = __mul__

    def hadamard(self, other):
        """Entry-wise product with numpy broadcasting."""
        self._check(other)
        f = self.field
        if not f.exact:
            return FieldArray(f, self.num * other.num, 1, normalize=False)
        a, b = self.num, other.num
        w = f.width
        if a.dtype != object and b.dtype != object and \
                _maxabs(a) * _maxabs(b) < _INT_LIMIT:
            outer = a[..., :, None] * b[..., None, :]
        else:
            outer = _widen(a)[..., :, None] * _widen(b)[..., None, :]
        shape = outer.shape[:-2]
        flat = outer.reshape(shape + (w * w,))
        out = _matmul_int(flat, f.structure.reshape(w * w, w))
        return FieldArray(f, out, self.den * other.den)

    def __matmul__(self, other):
        """Matrix product for 2-d @ 2-d or 2-d @ 1-d arrays."""
        self._check(other)
        f = self.field
        vec = other.ndim == 1
        b = other if not vec else other.reshape(other.shape[0], 1)
        if self.ndim != 2 or b.ndim != 2 or self.shape[1] != b.shape[0]:
            raise ValueError(f"bad matmul shapes {self.shape} @ {other.shape}")
        m, k = self.shape
        nn = b.shape[1]
        if not f.exact:
            out = (self.num[..., 0] @ b.num[..., 0])[..., None]
            res = FieldArray(f, out, 1, normalize=False)
        else:
            w = f.width
            # AT[i,k,q,r] = sum_p A[i,k,p] T[p,q,r]
            at = _matmul_int(self.num, f.structure.reshape(w, w * w))
            at = at.reshape(m, k, w, w).transpose(0, 3, 1, 2).reshape(m * w, k * w)
            bb = b.num.transpose(0, 2, 1).reshape(k * w, nn)
            out = _matmul_int(at, bb)  # rows (i, r), columns j
            out = out.reshape(m, w, nn).transpose(0, 2, 1)
            res = FieldArray(f, np.ascontiguousarray(out), self.den * b.den)
        return res.reshape(m) if vec else res

    def conj(self):
        return FieldArray(self.field, self.field.conj_rows(self.num), self.den)

    def sum(self, axis=None):
        if axis is None:
            axis = tuple(range(self.ndim))
        num = self.num
        if num.dtype == np.int64 and num.size and \
                _maxabs(num) * max(num.size, 1) >= _INT_LIMIT:
            num = _widen(num)
        out = FieldArray(self.field, _shrink(num.sum(axis=axis)), self.den)
        return out[()] if out.ndim == 0 else out

    def trace(self):
        idx = np.arange(min(self.shape))
        return FieldArray(self.field, self.num[idx, idx], self.den).sum()

    def __repr__(self):
        return f"FieldArray({self.field}, shape={self.shape}, den={self.den})"


def stack(arrays, axis=0):
    arrays = list(arrays)
    field = arrays[0].field
    den = reduce(math.lcm, (a.den for a in arrays), 1)
    nums = [_scale_int(a.num, den // a.den) for a in arrays]
    if any(x.dtype == object for x in nums):
        nums = [_widen(x) for x in nums]
    return FieldArray(field, np.stack(nums, axis=axis), den)


def scale_rational(arr: FieldArray, factors, axis: int = -1) -> FieldArray:
    """Multiply position k along ``axis`` by the rational ``factors[k]``."""
    f = arr.field
    axis = axis % arr.ndim
    shape = [1] * (arr.ndim + 1)
    shape[axis] = len(factors)
    if not f.exact:
        vals = np.array([float(c) for c in factors], dtype=np.float64).reshape(shape)
        return FieldArray(f, arr.num * vals, 1, normalize=False)
    fracs = [Fraction(c) for c in factors]
    L = reduce(math.lcm, (q.denominator for q in fracs), 1)
    ints = [q.numerator * (L // q.denominator) for q in fracs]
    big = max((abs(i) for i in ints), default=0)
    mult = np.array(ints, dtype=object if big >= _INT_LIMIT else np.int64).reshape(shape)
    num = arr.num
    if num.dtype == object or mult.dtype == object or _maxabs(num) * big >= _INT_LIMIT:
        num, mult = _widen(num), _widen(mult)
    return FieldArray(f, num * mult, arr.den * L)


def segment_sum(arr: FieldArray, order, starts, axis: int = -1) -> FieldArray:
    """Sums over consecutive groups of ``arr`` along ``axis`` after reordering
    by ``order``; group g covers ``order[starts[g]:starts[g+1]]``."""
    axis = axis % arr.ndim
    num = np.take(arr.num, order, axis=axis)
    if num.dtype != object and num.dtype != np.complex128 and \
            _maxabs(num) * max(num.shape[axis], 1) >= _INT_LIMIT:
        num = _widen(num)
    out = np.add.reduceat(num, starts, axis=axis)
    return FieldArray(arr.field, _shrink(out), arr.den)
