"""Incremental span and rank over the scheme field.

Exact backend: row echelon form with pivots scaled to 1 (the pivot inverse is
taken in the cyclotomic field).  Float backend: modified Gram-Schmidt with a
second orthogonalisation pass; a residual whose norm falls below ``tol``
relative to the input norm counts as dependent.
"""

from __future__ import annotations

import numpy as np

from .fieldarray import FieldArray

RANK_TOL = 1e-7


class SpanBuilder:
    """Grows a basis of span(v_1, v_2, ...) one vector at a time."""

    def __init__(self, field, length: int, tol: float = RANK_TOL):
        self.field = field
        self.length = length
        self.tol = tol
        self._rows = []      # exact: (pivot, FieldArray row); float: unit vectors
        self._pivots = set()

    def __len__(self):
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: FieldArray) -> FieldArray:
        """Residual of ``v`` after removing its component in the span."""
        if not self.field.exact:
            return FieldArray(self.field, self._residual(v.to_complex())[:, None], 1,
                              normalize=False)
        for pivot, row in self._rows:
            c = v[pivot]
            if not c.is_zero():
                v = v - row.scale(c)
        return v

    def _residual(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=np.complex128)
        for _ in range(2):
            for u in self._rows:
                x = x - u * np.vdot(u, x)
        return x

    def contains(self, v: FieldArray) -> bool:
        if not self.field.exact:
            x = v.to_complex()
            norm = np.linalg.norm(x)
            return norm == 0 or np.linalg.norm(self._residual(x)) <= self.tol * norm
        return self.reduce(v).is_zero()

    def add(self, v: FieldArray) -> bool:
        """Adjoin ``v``; returns True iff it was independent of the span."""
        if v.shape != (self.length,):
            raise ValueError(f"expected a vector of length {self.length}, got {v.shape}")
        if not self.field.exact:
            x = v.to_complex()
            norm = np.linalg.norm(x)
            if norm == 0:
                return False
            r = self._residual(x)
            rn = np.linalg.norm(r)
            if rn <= self.tol * norm:
                return False
            self._rows.append(r / rn)
            return True
        r = self.reduce(v)
        nz = np.flatnonzero(r.nonzero_mask())
        if nz.size == 0:
            return False
        pivot = int(nz[0])
        row = r.scale(r[pivot].inverse())
        # keep earlier rows clear of the new pivot column
        self._rows = [(p, w - row.scale(w[pivot])) if not w[pivot].is_zero() else (p, w)
                      for p, w in self._rows]
        self._rows.append((pivot, row))
        self._pivots.add(pivot)
        return True

    def extend(self, vectors) -> list:
        return [self.add(v) for v in vectors]


def rank(vectors, field=None, tol: float = RANK_TOL) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    field = field or vectors[0].field
    span = SpanBuilder(field, vectors[0].shape[0], tol)
    span.extend(vectors)
    return span.rank

