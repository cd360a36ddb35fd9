"""Arithmetic in the cyclotomic field Q(zeta_n).

Two interchangeable backends share one scalar contract:

* ``CyclotomicField(n)`` -- exact.  Elements are ``CycloNum`` values, stored
  as integer numerators over a common positive denominator, reduced modulo
  the n-th cyclotomic polynomial.  The representation is canonical, so
  equality of values is equality of coefficient tuples.
* ``ComplexField(n)`` -- floating.  Elements are plain Python ``complex``
  numbers and ``is_zero`` uses an absolute tolerance of 1e-9.

Both backends also expose a small vectorised kernel (``width``,
``structure``, ``mul_matrix`` ...) used by :class:`FieldArray`, which stores
an array of field elements as a numpy array of coefficient rows.
"""

from __future__ import annotations

import cmath
import functools
import math
from fractions import Fraction
from numbers import Rational

import numpy as np

FLOAT_TOL = 1e-9

# int64 arithmetic is used while every intermediate provably fits; larger
# values fall back to Python integers (object dtype).
_INT_LIMIT = 2**62
# Integer products below this bound are computed exactly by float64 BLAS.
_BLAS_LIMIT = 2**52


class BackendMismatchError(TypeError):
    """Raised when exact and floating scalars are mixed."""


class OrderMismatchError(ValueError):
    """Raised when elements of Q(zeta_n) for different n are mixed."""


# ---------------------------------------------------------------------------
# integer polynomials
# ---------------------------------------------------------------------------

def _divmod_monic(num, den):
    """Divide integer polynomial ``num`` by monic ``den`` (low-to-high lists)."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1]
        if c:
            q[k] = c
            for i, d in enumerate(den):
                num[k + i] -= c * d
    rem = num[: len(den) - 1]
    return q, rem


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first.

    Phi_n is obtained by dividing x^n - 1 by Phi_d for every proper
    divisor d of n.
    """
    if n < 1:
        raise ValueError(f"cyclotomic order must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _divmod_monic(poly, cyclotomic_polynomial(d))
            assert not any(rem), "cyclotomic division left a remainder"
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational number: {x!r}")


# ---------------------------------------------------------------------------
# exact backend
# ---------------------------------------------------------------------------

class CyclotomicField:
    """Q(zeta_n) realised as Q[x]/Phi_n(x), with x standing for zeta_n."""

    exact = True
    name = "exact"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"cyclotomic order must be positive, got {n}")
        self.n = n
        self.modulus = cyclotomic_polynomial(n)
        self.degree = len(self.modulus) - 1
        w = self.width = self.degree
        # powers[k] = canonical coefficients of x^k, 0 <= k < max(n, 2w - 1)
        top = max(n, 2 * w - 1)
        powers = np.zeros((top, w), dtype=np.int64)
        row = [0] * w
        row[0] = 1
        for k in range(top):
            powers[k] = row
            # multiply by x and reduce with the monic modulus
            lead = row[-1]
            row = [0] + row[:-1]
            if lead:
                row = [r - lead * m for r, m in zip(row, self.modulus[:-1])]
        self._powers = powers
        self._power_rows = [tuple(int(v) for v in powers[k]) for k in range(top)]
        pq = (np.arange(w)[:, None] + np.arange(w)[None, :])
        self.structure = powers[pq]  # (w, w, w): x^p x^q = sum_r T[p,q,r] x^r
        self.conj_matrix = powers[(-np.arange(w)) % n]
        self._zeta = cmath.exp(2j * math.pi / n)
        self.zero = CycloNum(self, (0,) * w, 1)
        self.one = CycloNum(self, (1,) + (0,) * (w - 1), 1)
        self.dtype = np.int64

    def __repr__(self):
        return f"CyclotomicField({self.n})"

    def __reduce__(self):
        return (cyclotomic_field, (self.n,))

    # scalar constructors -------------------------------------------------
    def __call__(self, x) -> CycloNum:
        return self.coerce(x)

    def coerce(self, x) -> CycloNum:
        if isinstance(x, CycloNum):
            if x.field.n != self.n:
                raise OrderMismatchError(
                    f"element of Q(zeta_{x.field.n}) used in Q(zeta_{self.n})")
            return x
        if isinstance(x, (complex, float)):
            raise BackendMismatchError(
                f"floating value {x!r} given to the exact backend")
        q = _as_fraction(x)
        return CycloNum._make(self, (q.numerator,) + (0,) * (self.width - 1),
                              q.denominator)

    def element(self, coeffs) -> CycloNum:
        """Element sum_k coeffs[k] zeta^k; any length, reduced mod Phi_n."""
        fr = [_as_fraction(c) for c in coeffs]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        acc = [0] * self.width
        for k, f in enumerate(fr):
            c = f.numerator * (den // f.denominator)
            if c:
                acc = [a + c * p for a, p in zip(acc, self._power_row(k))]
        return CycloNum._make(self, tuple(acc), den)

    def root_power(self, k: int) -> CycloNum:
        return CycloNum(self, self._power_rows[k % self.n], 1)

    def _power_row(self, k):
        return self._power_rows[k % self.n]

    # scalar helpers shared with ComplexField -------------------------------
    @staticmethod
    def is_zero(a) -> bool:
        return a.is_zero()

    @staticmethod
    def conj(a):
        return a.conj()

    @staticmethod
    def to_complex(a) -> complex:
        return a.to_complex()

    def to_json(self, a):
        return a.to_json()

    def from_json(self, obj) -> CycloNum:
        if obj.get("order") != self.n:
            raise OrderMismatchError(f"serialised order {obj.get('order')} != {self.n}")
        return self.element(obj["coeffs"])

    # vector kernel -------------------------------------------------------
    def encode(self, values):
        """Coefficient rows and common denominator for a flat list of scalars."""
        vals = [self.coerce(v) for v in values]
        den = math.lcm(*(v._den for v in vals)) if vals else 1
        rows = [[c * (den // v._den) for c in v._num] for v in vals]
        return _int_array(rows, (len(vals), self.width)), den

    def decode(self, row, den) -> CycloNum:
        return CycloNum._make(self, tuple(int(c) for c in row), int(den))

    def mul_matrix(self, a):
        """(M, d) with coeffs(v * a) = coeffs(v) @ M / d."""
        a = self.coerce(a)
        num = np.array(a._num, dtype=object if _too_big(a._num) else np.int64)
        m = np.tensordot(num, self.structure, axes=([0], [1]))
        return _shrink(m), a._den

    def zero_rows(self, num):
        return ~np.any(num != 0, axis=-1)

    def conj_rows(self, num):
        return _matmul_int(num, self.conj_matrix)

    def inverse(self, a):
        return self.coerce(a).inverse()

    def normalize(self, num, den):
        if den == 1:
            return _shrink(num), 1
        g = _gcd_all(num, den)
        if g > 1:
            num = num // g
            den //= g
        return _shrink(num), den


@functools.lru_cache(maxsize=None)
def cyclotomic_field(n: int) -> CyclotomicField:
    return CyclotomicField(n)


class CycloNum:
    """An element of Q(zeta_n): sum_k (num[k] / den) zeta_n^k, k < phi(n)."""

    __slots__ = ("field", "_num", "_den")

    def __init__(self, field: CyclotomicField, num: tuple, den: int):
        self.field = field
        self._num = num
        self._den = den

    @classmethod
    def _make(cls, field, num, den):
        if den < 0:
            num, den = tuple(-c for c in num), -den
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        g = math.gcd(den, *num)
        if g > 1:
            num, den = tuple(c // g for c in num), den // g
        elif not any(num):
            den = 1
        return cls(field, tuple(num), den)

    @property
    def order(self) -> int:
        return self.field.n

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    def _other(self, other):
        if isinstance(other, CycloNum):
            if other.field is not self.field and other.field.n != self.field.n:
                raise OrderMismatchError(
                    f"cannot combine Q(zeta_{self.order}) with Q(zeta_{other.order})")
            return other
        if isinstance(other, (complex, float)):
            raise BackendMismatchError(
                f"cannot combine exact scalar with floating value {other!r}")
        if isinstance(other, (int, Rational)):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if self._den == other._den:
            num = tuple(a + b for a, b in zip(self._num, other._num))
            return CycloNum._make(self.field, num, self._den)
        da, db = self._den, other._den
        num = tuple(a * db + b * da for a, b in zip(self._num, other._num))
        return CycloNum._make(self.field, num, da * db)

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.field, tuple(-c for c in self._num), self._den)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        w = self.field.width
        a, b = self._num, other._num
        prod = [0] * (2 * w - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        res = prod[:w]
        rows = self.field._power_rows
        for k in range(w, 2 * w - 1):
            c = prod[k]
            if c:
                res = [r + c * p for r, p in zip(res, rows[k])]
        return CycloNum._make(self.field, tuple(res), self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = self.field.one
        for _ in range(abs(k)):
            result = result * base
        return result

    def galois(self, k: int) -> CycloNum:
        """Image under the automorphism zeta -> zeta^k (gcd(k, n) = 1)."""
        if math.gcd(k, self.order) != 1:
            raise ValueError(f"{k} is not a unit mod {self.order}")
        return self.field.element(
            [Fraction(c, self._den) for c in self._spread(k)])

    def _spread(self, k):
        n = self.order
        out = [0] * n
        for p, c in enumerate(self._num):
            out[(p * k) % n] += c
        return out

    def inverse(self) -> CycloNum:
        """Multiplicative inverse as (product of other conjugates) / norm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_n)")
        if not any(self._num[1:]):
            return self.field.coerce(Fraction(self._den, self._num[0]))
        rest = self.field.one
        for k in range(2, self.order):
            if math.gcd(k, self.order) == 1:
                rest = rest * self.galois(k)
        norm = (self * rest).as_rational()
        return rest * (1 / norm)

    def conj(self) -> CycloNum:
        rows = self.field._power_rows
        n = self.order
        res = [0] * self.field.width
        for p, c in enumerate(self._num):
            if c:
                res = [r + c * t for r, t in zip(res, rows[(-p) % n])]
        return CycloNum(self.field, tuple(res), self._den)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    def to_complex(self) -> complex:
        z = self.field._zeta
        return sum(c * z**k for k, c in enumerate(self._num)) / self._den

    def to_json(self):
        return {"order": self.order,
                "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    def __eq__(self, other):
        if isinstance(other, CycloNum):
            return (self.order == other.order and self._den == other._den
                    and self._num == other._num)
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.as_rational() == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self._num[0], self._den))
        return hash((self.order, self._num, self._den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*z^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"CycloNum[{self.order}]({body})"


# ---------------------------------------------------------------------------
# floating backend
# ---------------------------------------------------------------------------

class ComplexField:
    """Complex double stand-in for Q(zeta_n) with the same interface."""

    exact = False
    name = "float"
    width = 1
    dtype = np.complex128

    def __init__(self, n: int, tol: float = FLOAT_TOL):
        if n < 1:
            raise ValueError(f"cyclotomic order must be positive, got {n}")
        self.n = n
        self.tol = tol
        self.structure = np.ones((1, 1, 1), dtype=np.complex128)
        self.zero = 0j
        self.one = 1 + 0j

    def __repr__(self):
        return f"ComplexField({self.n})"

    def __reduce__(self):
        return (complex_field, (self.n,))

    def __call__(self, x) -> complex:
        return self.coerce(x)

    def coerce(self, x) -> complex:
        if isinstance(x, CycloNum):
            raise BackendMismatchError(
                "exact cyclotomic scalar given to the float backend")
        if isinstance(x, (int, Rational)):
            return complex(float(x))
        return complex(x)

    def root_power(self, k: int) -> complex:
        k %= self.n
        theta = 2 * math.pi * k / self.n
        return complex(math.cos(theta), math.sin(theta))

    def element(self, coeffs) -> complex:
        return sum((float(_as_fraction(c)) * self.root_power(k)
                    for k, c in enumerate(coeffs)), 0j)

    def is_zero(self, a) -> bool:
        return abs(a) < self.tol

    @staticmethod
    def conj(a):
        return complex(a).conjugate()

    @staticmethod
    def to_complex(a) -> complex:
        return complex(a)

    @staticmethod
    def to_json(a):
        a = complex(a)
        return [a.real, a.imag]

    @staticmethod
    def from_json(obj) -> complex:
        return complex(obj[0], obj[1])

    def encode(self, values):
        arr = np.array([self.coerce(v) for v in values], dtype=np.complex128)
        return arr.reshape(-1, 1), 1

    @staticmethod
    def decode(row, den) -> complex:
        return complex(row[0])

    def mul_matrix(self, a):
        return np.array([[self.coerce(a)]], dtype=np.complex128), 1

    def zero_rows(self, num):
        return np.abs(num[..., 0]) < self.tol

    @staticmethod
    def conj_rows(num):
        return np.conj(num)

    def inverse(self, a):
        return 1 / self.coerce(a)

    @staticmethod
    def normalize(num, den):
        if den != 1:
            num = np.asarray(num, dtype=np.complex128) / den
        return num, 1


@functools.lru_cache(maxsize=None)
def complex_field(n: int) -> ComplexField:
    return ComplexField(n)


def get_field(backend: str, n: int):
    """Field object for ``backend`` in {"exact", "float"}."""
    if backend == "exact":
        return cyclotomic_field(n)
    if backend == "float":
        return complex_field(n)
    raise ValueError(f"unknown backend {backend!r}")


def root_power(n: int, k: int, backend: str = "exact"):
    return get_field(backend, n).root_power(k)


# dispatching helpers for code that holds bare scalars -----------------------

def is_zero(a, tol: float = FLOAT_TOL) -> bool:
    if isinstance(a, CycloNum):
        return a.is_zero()
    if isinstance(a, (int, Rational)):
        return a == 0
    return abs(a) < tol


def conj(a):
    if isinstance(a, CycloNum):
        return a.conj()
    if isinstance(a, (int, Rational)):
        return a
    return complex(a).conjugate()


def to_complex(a) -> complex:
    if isinstance(a, CycloNum):
        return a.to_complex()
    if isinstance(a, (int, Rational)):
        return complex(float(a))
    return complex(a)


def to_json(a):
    if isinstance(a, CycloNum):
        return a.to_json()
    if isinstance(a, (int, Rational)):
        q = Fraction(a)
        return {"order": 1, "coeffs": [f"{q.numerator}/{q.denominator}"]}
    a = complex(a)
    return [a.real, a.imag]


# ---------------------------------------------------------------------------
# integer array helpers
# ---------------------------------------------------------------------------

def _too_big(values) -> bool:
    return any(abs(v) >= _INT_LIMIT for v in values)


def _int_array(rows, shape):
    flat = [c for r in rows for c in r]
    dtype = object if _too_big(flat) else np.int64
    return np.array(flat, dtype=dtype).reshape(shape)


def _maxabs(a) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return max(int(a.max()), -int(a.min()))


def _shrink(a):
    if a.dtype == object and _maxabs(a) < _INT_LIMIT:
        return a.astype(np.int64)
    return a


def _widen(a):
    return a if a.dtype == object else a.astype(object)


def _gcd_all(num, den) -> int:
    if num.size == 0:
        return den
    if num.dtype == object:
        return math.gcd(den, *(int(v) for v in num.flat))
    return math.gcd(int(np.gcd.reduce(num.ravel())), den)


def _matmul_int(a, m):
    """a @ m for integer arrays (contracting a's last axis), overflow-safe."""
    if a.dtype == np.complex128:
        return a @ m
    bound = _maxabs(a) * (int(np.abs(m).sum(axis=0).max()) if m.size else 0)
    if a.dtype != object and m.dtype != object:
        if bound < _BLAS_LIMIT:
            out = a.astype(np.float64) @ m.astype(np.float64)
            return np.rint(out).astype(np.int64)
        if bound < _INT_LIMIT:
            return a @ m
    return _shrink(_widen(a) @ _widen(m))


def _scale_int(a, c: int):
    if a.dtype == np.complex128:
        return a * c
    if c == 1:
        return a
    if a.dtype != object and _maxabs(a) * abs(c) < _INT_LIMIT:
        return a * c
    return _widen(a) * c


def _add_int(a, b):
    if a.dtype == np.complex128 or b.dtype == np.complex128:
        return a + b
    if a.dtype != object and b.dtype != object and \
            _maxabs(a) + _maxabs(b) < _INT_LIMIT:
        return a + b
    return _shrink(_widen(a) + _widen(b))
