"""Dihedral symmetry of the cycle acting on vertex triples.

Orbits of the full dihedral group on X^3 are indexed by canonical triples
``(x, y, 0)``; ``canonicalize`` maps any triple to its representative by
rotating the third coordinate to 0 and reflecting when that lands outside the
index set.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import ConsistencyError
from .fieldarray import FieldArray
from .scheme import CycleScheme
from .tensorops import TensorVector


@dataclass(frozen=True)
class DihedralElement:
    """x -> shift + x (rotation) or x -> shift - x (reflection), mod n."""

    n: int
    shift: int = 0
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "shift", self.shift % self.n)

    def __call__(self, x):
        return (self.shift - x) % self.n if self.reflect else (self.shift + x) % self.n

    def compose(self, other: DihedralElement) -> DihedralElement:
        """self after other."""
        if self.n != other.n:
            raise ValueError("cannot compose elements of different dihedral groups")
        if not self.reflect:
            return DihedralElement(self.n, self.shift + other.shift, other.reflect)
        return DihedralElement(self.n, self.shift - other.shift, not other.reflect)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self) -> DihedralElement:
        if self.reflect:
            return self
        return DihedralElement(self.n, -self.shift, False)

    @classmethod
    def identity(cls, n):
        return cls(n)


def group_elements(n: int, rotations_only: bool = False) -> list:
    rots = [DihedralElement(n, s) for s in range(n)]
    if rotations_only:
        return rots
    return rots + [DihedralElement(n, s, True) for s in range(n)]


def act(g: DihedralElement, triple) -> tuple:
    return tuple(int(g(c)) for c in triple)


def profile(scheme: CycleScheme, triple) -> tuple:
    """(d(y, z), d(x, z), d(x, y))."""
    x, y, z = triple
    t = scheme.distance_table
    return (int(t[y, z]), int(t[x, z]), int(t[x, y]))


def in_index_set(scheme: CycleScheme, triple) -> bool:
    x, y, z = (int(c) for c in triple)
    n, D = scheme.n, scheme.D
    if z != 0 or not (0 <= x < n and 0 <= y < n):
        return False
    if scheme.even:
        return (x <= D and y in (0, D)) or 1 <= y <= D - 1
    return (y == 0 and x <= D) or 1 <= y <= D


def index_set(scheme: CycleScheme) -> list:
    """Canonical representatives in lexicographic order."""
    n = scheme.n
    return [(x, y, 0) for x in range(n) for y in range(n)
            if in_index_set(scheme, (x, y, 0))]


def canonicalize(scheme: CycleScheme, triple) -> tuple:
    n = scheme.n
    x, y, z = (int(c) for c in triple)
    for c in (x, y, z):
        if not 0 <= c < n:
            raise ValueError(f"triple {triple} out of range for n={n}")
    rotated = ((x - z) % n, (y - z) % n, 0)
    if in_index_set(scheme, rotated):
        return rotated
    reflected = ((n - rotated[0]) % n, (n - rotated[1]) % n, 0)
    if not in_index_set(scheme, reflected):
        raise ConsistencyError(f"no representative found for {triple}")
    return reflected


def _canonical_codes(scheme: CycleScheme) -> np.ndarray:
    """Vectorised canonicalize over all n^3 triples; returns x*n + y codes."""
    n, D = scheme.n, scheme.D
    idx = np.arange(n)
    x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
    rx, ry = (x - z) % n, (y - z) % n

    def member(a, b):
        if scheme.even:
            return ((a <= D) & ((b == 0) | (b == D))) | ((b >= 1) & (b <= D - 1))
        return ((b == 0) & (a <= D)) | ((b >= 1) & (b <= D))

    keep = member(rx, ry)
    fx, fy = np.where(keep, rx, (n - rx) % n), np.where(keep, ry, (n - ry) % n)
    if not member(fx, fy).all():
        raise ConsistencyError("vectorised canonicalisation left the index set")
    return (fx * n + fy).ravel()


@dataclass(frozen=True)
class Orbit:
    representative: tuple
    size: int
    profile: tuple
    members: tuple = dc_field(repr=False)

    def to_json(self):
        return {"representative": list(self.representative), "size": self.size,
                "profile": list(self.profile)}


class OrbitTable:
    def __init__(self, scheme: CycleScheme, orbits: list, labels: np.ndarray):
        self.scheme = scheme
        self.orbits = orbits
        self.labels = labels  # orbit position of each flat triple index
        self.position = {o.representative: k for k, o in enumerate(orbits)}
        self.by_profile = {o.profile: k for k, o in enumerate(orbits)}

    def __len__(self):
        return len(self.orbits)

    def __iter__(self):
        return iter(self.orbits)

    def __getitem__(self, rep) -> Orbit:
        return self.orbits[self.position[tuple(rep)]]

    def orbit_of(self, triple) -> Orbit:
        return self[canonicalize(self.scheme, triple)]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([o.size for o in self.orbits])

    def chi(self, rep) -> TensorVector:
        return chi(self.scheme, self[rep])

    @cached_property
    def chi_batch(self) -> FieldArray:
        """All characteristic vectors, shape (orbits, n, n, n), in table order."""
        n = self.scheme.n
        ind = (self.labels[None, :] == np.arange(len(self))[:, None]).astype(np.int64)
        return FieldArray.from_ints(self.scheme.field, ind.reshape(len(self), n, n, n))

    def to_json(self):
        return [o.to_json() for o in self.orbits]


def chi(scheme: CycleScheme, orbit: Orbit) -> TensorVector:
    n = scheme.n
    arr = np.zeros((n, n, n), dtype=np.int64)
    arr[tuple(np.array(orbit.members).T)] = 1
    return TensorVector.from_ints(scheme, arr)


def expected_orbit_count(D: int, parity: str) -> int:
    return 2 * D * D + 2 if parity == "even" else 2 * D * D + 2 * D + 1


def expected_orbit_size(scheme: CycleScheme, rep) -> int:
    x, y, _ = rep
    n, D = scheme.n, scheme.D
    if scheme.even:
        return n if x in (0, D) and y in (0, D) else 2 * n
    return n if x == 0 and y == 0 else 2 * n


def burnside_count(n: int) -> int:
    """Orbit count on X^3 as the average number of fixed triples."""
    total = 0
    for g in group_elements(n):
        fixed = sum(1 for v in range(n) if g(v) == v)
        total += fixed ** 3
    if total % (2 * n):
        raise ConsistencyError("Burnside average is not an integer")
    return total // (2 * n)


def enumerate_orbits(scheme: CycleScheme) -> OrbitTable:
    n = scheme.n
    reps = index_set(scheme)
    codes = _canonical_codes(scheme)
    pos = {x * n + y: k for k, (x, y, _) in enumerate(reps)}
    lookup = np.full(n * n, -1, dtype=np.int64)
    for code, k in pos.items():
        lookup[code] = k
    labels = lookup[codes]
    if (labels < 0).any():
        raise ConsistencyError("a triple was mapped outside the index set")
    counts = np.bincount(labels, minlength=len(reps))
    flat_order = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(counts)])
    group = group_elements(n)
    orbits = []
    for k, rep in enumerate(reps):
        flat = flat_order[bounds[k]:bounds[k + 1]]
        members = tuple((int(f // (n * n)), int(f // n % n), int(f % n)) for f in flat)
        direct = {act(g, rep) for g in group}
        if direct != set(members):
            raise ConsistencyError(f"orbit of {rep} differs from its group expansion")
        size = len(members)
        if size != expected_orbit_size(scheme, rep):
            raise ConsistencyError(f"orbit of {rep} has unexpected size {size}")
        profs = {profile(scheme, m) for m in members}
        if len(profs) != 1:
            raise ConsistencyError(f"orbit of {rep} mixes distance profiles")
        orbits.append(Orbit(rep, size, profs.pop(), members))
    count = len(orbits)
    if sum(o.size for o in orbits) != n ** 3:
        raise ConsistencyError("orbit sizes do not sum to n^3")
    if count != expected_orbit_count(scheme.D, scheme.parity):
        raise ConsistencyError(f"found {count} orbits, expected "
                               f"{expected_orbit_count(scheme.D, scheme.parity)}")
    if count != burnside_count(n):
        raise ConsistencyError("orbit count disagrees with the Burnside recount")
    if len({o.profile for o in orbits}) != count:
        raise ConsistencyError("two orbits share a distance profile")
    return OrbitTable(scheme, orbits, labels)


def distance_profile_count(scheme: CycleScheme) -> int:
    t = scheme.distance_table
    n = scheme.n
    idx = np.arange(n)
    x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
    codes = (t[y, z] * (n + 1) + t[x, z]) * (n + 1) + t[x, y]
    return int(np.unique(codes).size)


def neighbour_triples(scheme: CycleScheme, rep, slot: int) -> tuple:
    """The two triples reached from ``rep`` by moving coordinate ``slot`` by -1 and +1."""
    n = scheme.n
    lo, hi = list(rep), list(rep)
    lo[slot - 1] = (lo[slot - 1] - 1) % n
    hi[slot - 1] = (hi[slot - 1] + 1) % n
    return tuple(lo), tuple(hi)


def phi_degeneracy_check(table: OrbitTable) -> dict:
    """For each representative, the three neighbour identities under phi hold
    exactly when the orbit has size n and all fail when it has size 2n."""
    scheme = table.scheme
    n = scheme.n
    report = {}
    for orb in table:
        rep = orb.representative
        holds = []
        for slot in (1, 2, 3):
            lo, hi = neighbour_triples(scheme, rep, slot)
            holds.append(canonicalize(scheme, lo) == canonicalize(scheme, hi))
        ok = all(holds) if orb.size == n else not any(holds)
        report[rep] = {"size": orb.size, "identities": holds, "ok": ok}
        if not ok:
            raise ConsistencyError(f"neighbour identities at {rep}: {holds}, size {orb.size}")
    return report
