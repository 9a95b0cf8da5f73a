"""Fusion rings: validation, dimensions, subrings, gradings, isomorphisms.

A fusion ring is a based ring with nonnegative integer structure constants
N[a, b, c] (the multiplicity of c in a*b), a distinguished unit label 0 and
a duality involution.  Structure constants are held in a read-only numpy
integer tensor so that the axiom checks reduce to array identities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cyclo import Cyclotomic

__all__ = [
    "FusionRing",
    "GradedDecomposition",
    "InvertibleGroup",
    "ValidationReport",
    "abelian_group_ring",
    "adjoint_subring",
    "cyclic_group_ring",
    "dihedral_rep_ring",
    "fp_dims",
    "gn_grading",
    "integral_subring",
    "invertibles",
    "is_generalized_ty",
    "ring_isomorphisms",
    "subring_closure",
    "universal_grading",
    "validate",
]

RANK_CAP = 64


class FusionRingError(ValueError):
    """A structural problem with a fusion ring."""


class FusionRing:
    """Based ring data: rank, duality involution, structure constants."""

    __slots__ = ("N", "dual", "names", "exact_dims", "_rows", "_validated")

    def __init__(self, coeffs, dual, names=None, exact_dims=None):
        arr = np.array(coeffs, dtype=np.int64)
        arr.setflags(write=False)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise FusionRingError("structure constants must form a cube")
        rank = arr.shape[0]
        if rank > RANK_CAP:
            raise FusionRingError(f"rank {rank} exceeds the cap of {RANK_CAP}")
        if (arr < 0).any():
            raise FusionRingError("structure constants must be nonnegative")
        dual = tuple(int(d) for d in dual)
        if sorted(dual) != list(range(rank)):
            raise FusionRingError("dual must be a permutation of the labels")
        self.N = arr
        self.dual = dual
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(rank))
        if len(self.names) != rank:
            raise FusionRingError("one name per label required")
        self.exact_dims = tuple(exact_dims) if exact_dims is not None else None
        self._rows = None
        self._validated = None

    @property
    def rank(self) -> int:
        return self.N.shape[0]

    def product(self, a: int, b: int) -> dict[int, int]:
        """Constituents of a*b with multiplicities."""
        row = self.N[a, b]
        return {c: int(row[c]) for c in np.nonzero(row)[0]}

    def label(self, name) -> int:
        if isinstance(name, int):
            return name
        return self.names.index(name)

    def __repr__(self):
        return f"FusionRing(rank={self.rank}, names={self.names})"


@dataclass
class ValidationReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def validate(ring: FusionRing) -> ValidationReport:
    """Check unit, duality, Frobenius symmetry and associativity axioms."""
    if ring._validated is not None:
        return ring._validated
    N, dual, r = ring.N, list(ring.dual), ring.rank
    rep = ValidationReport()
    eye = np.eye(r, dtype=np.int64)

    if not (N[0] == eye).all():
        rep.failures.append("unit law fails on the left: N[0,b,c] != delta(b,c)")
    if not (N[:, 0, :] == eye).all():
        rep.failures.append("unit law fails on the right: N[a,0,c] != delta(a,c)")

    if dual[0] != 0:
        rep.failures.append("dual of the unit is not the unit")
    if [dual[dual[a]] for a in range(r)] != list(range(r)):
        rep.failures.append("duality is not an involution")
    want = eye[dual]  # want[a, b] = delta(b, a*)
    if not (N[:, :, 0] == want).all():
        bad = np.argwhere(N[:, :, 0] != want)
        a, b = bad[0]
        rep.failures.append(f"duality law fails at N[{a},{b},0]")

    frob1 = N[dual][:, dual][:, :, dual].transpose(1, 0, 2)  # N[b*,a*,c*]
    if not (N == frob1).all():
        bad = np.argwhere(N != frob1)[0]
        rep.failures.append(
            "Frobenius symmetry N[a,b,c] = N[b*,a*,c*] fails at "
            f"({bad[0]},{bad[1]},{bad[2]})"
        )
    frob2 = N[dual].transpose(0, 2, 1)  # N[a*,c,b]
    if not (N == frob2).all():
        bad = np.argwhere(N != frob2)[0]
        rep.failures.append(
            "Frobenius symmetry N[a,b,c] = N[a*,c,b] fails at "
            f"({bad[0]},{bad[1]},{bad[2]})"
        )

    # associativity, chunked over the first label to bound memory
    for a in range(r):
        left = np.einsum("be,ecd->bcd", N[a], N)
        right = np.einsum("bcf,fd->bcd", N, N[a])
        if not (left == right).all():
            b, c, d = np.argwhere(left != right)[0]
            rep.failures.append(
                f"associativity fails at (a,b,c,d)=({a},{b},{c},{d})"
            )
            break

    ring._validated = rep
    return rep


def _require_valid(ring: FusionRing) -> None:
    rep = validate(ring)
    if not rep.ok:
        raise FusionRingError("invalid fusion ring: " + "; ".join(rep.failures))


# ----------------------------------------------------------------------------
# dimensions

def fp_dims(ring: FusionRing, tol: float = 1e-9, max_iter: int = 20000):
    """Largest eigenvalue of each fusion matrix, as floats.

    Uses the exact dimensions when the ring carries them; otherwise power
    iteration on N[a] + 1 (the shift keeps permutation matrices from cycling).
    """
    _require_valid(ring)
    if ring.exact_dims is not None:
        return [complex(d).real for d in ring.exact_dims]
    out = []
    for a in range(ring.rank):
        M = ring.N[a].astype(float) + np.eye(ring.rank)
        v = np.ones(ring.rank)
        lo, hi = 0.0, float("inf")
        for _ in range(max_iter):
            w = M @ v
            ratios = w / v
            lo, hi = ratios.min(), ratios.max()
            v = w / np.linalg.norm(w)
            if hi - lo < tol:
                break
        out.append((lo + hi) / 2 - 1.0)
    return out


def _integer_dims(ring: FusionRing):
    """Per-label integer dimension, or None where the dimension is irrational."""
    if ring.exact_dims is not None:
        return [
            d.rational_value().numerator if d.is_integer else None
            for d in ring.exact_dims
        ]
    dims = fp_dims(ring)
    out = []
    for d in dims:
        k = round(d)
        out.append(k if abs(d - k) < 1e-6 else None)
    return out


def _squared_dims(ring: FusionRing):
    """Per-label d^2 as an exact integer (weakly integral rings only)."""
    if ring.exact_dims is not None:
        sq = []
        for d in ring.exact_dims:
            d2 = d * d
            if not d2.is_integer:
                raise FusionRingError("ring is not weakly integral")
            sq.append(d2.integer_value())
        return sq
    sq = []
    for d in fp_dims(ring):
        k = round(d * d)
        if abs(d * d - k) > 1e-6:
            raise FusionRingError("ring is not weakly integral")
        sq.append(k)
    return sq


# ----------------------------------------------------------------------------
# invertibles

@dataclass(frozen=True, eq=False)
class InvertibleGroup:
    labels: tuple[int, ...]
    table: dict

    @property
    def order(self) -> int:
        return len(self.labels)

    def multiply(self, a: int, b: int) -> int:
        return self.table[a, b]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x, a]
            k += 1
        return k

    def invariants(self) -> tuple[int, ...]:
        """Invariant factors of the (abelian) group of invertibles."""
        orders = sorted(self.element_order(a) for a in self.labels)
        return _abelian_invariants(len(self.labels), orders)


def invertibles(ring: FusionRing) -> InvertibleGroup:
    """The group of labels whose fusion matrix is a permutation matrix."""
    _require_valid(ring)
    labels = []
    for a in range(ring.rank):
        M = ring.N[a]
        if ((M.sum(axis=0) == 1).all() and (M.sum(axis=1) == 1).all()
                and M.max() == 1):
            labels.append(a)
    table = {}
    lset = set(labels)
    for a in labels:
        for b in labels:
            c = int(np.nonzero(ring.N[a, b])[0][0])
            if c not in lset:
                raise FusionRingError("invertibles are not closed")
            table[a, b] = c
    # identity label 0 is always invertible and must come first
    labels = sorted(labels)
    return InvertibleGroup(tuple(labels), table)


def _candidate_abelian_groups(order: int):
    """All abelian groups of the given order, as tuples of cyclic orders."""
    factors = {}
    m = order
    d = 2
    while d * d <= m:
        while m % d == 0:
            factors[d] = factors.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        factors[m] = factors.get(m, 0) + 1

    def partitions(n):
        if n == 0:
            yield ()
            return
        for first in range(n, 0, -1):
            for rest in partitions(n - first):
                if not rest or rest[0] <= first:
                    yield (first,) + rest

    per_prime = []
    for p, e in factors.items():
        per_prime.append([(p, part) for part in partitions(e)])
    for combo in itertools.product(*per_prime):
        moduli = []
        for p, part in combo:
            moduli.extend(p ** k for k in part)
        yield tuple(sorted(moduli))


def _order_statistics(moduli: tuple[int, ...]):
    orders = []
    for xs in itertools.product(*[range(m) for m in moduli]):
        o = 1
        for m, x in zip(moduli, xs):
            o = math.lcm(o, m // math.gcd(m, x))
        orders.append(o)
    return sorted(orders)


def _abelian_invariants(order: int, order_stats: list[int]) -> tuple[int, ...]:
    for moduli in _candidate_abelian_groups(order):
        if _order_statistics(moduli) == order_stats:
            return _to_invariant_factors(moduli)
    raise FusionRingError("group is not abelian")


def _to_invariant_factors(moduli: tuple[int, ...]) -> tuple[int, ...]:
    """Rewrite a product of cyclic groups as invariant factors d1 | d2 | ..."""
    by_prime: dict[int, list[int]] = {}
    for m in moduli:
        if m == 1:
            continue
        p = _smallest_prime(m)
        by_prime.setdefault(p, []).append(m)
    for p in by_prime:
        by_prime[p].sort(reverse=True)
    depth = max((len(v) for v in by_prime.values()), default=0)
    out = []
    for i in range(depth):
        f = 1
        for p, powers in by_prime.items():
            if i < len(powers):
                f *= powers[i]
        out.append(f)
    return tuple(sorted(out)) if out else (1,)


def _smallest_prime(m: int) -> int:
    d = 2
    while d * d <= m:
        if m % d == 0:
            return d
        d += 1
    return m


# ----------------------------------------------------------------------------
# subrings

def subring_closure(ring: FusionRing, seed) -> tuple[int, ...]:
    """Smallest label set containing the seed, the unit, duals and products."""
    _require_valid(ring)
    current = {0} | {ring.label(s) for s in seed}
    while True:
        new = set(current)
        for a in current:
            new.add(ring.dual[a])
        for a in current:
            for b in current:
                new.update(int(c) for c in np.nonzero(ring.N[a, b])[0])
        if new == current:
            return tuple(sorted(current))
        current = new


def adjoint_subring(ring: FusionRing) -> tuple[int, ...]:
    """Closure of all constituents of a * a-dual."""
    _require_valid(ring)
    seed = set()
    for a in range(ring.rank):
        seed.update(int(c) for c in np.nonzero(ring.N[a, ring.dual[a]])[0])
    return subring_closure(ring, seed)


def integral_subring(ring: FusionRing) -> tuple[int, ...]:
    """Labels of integer dimension; verified to be closed."""
    dims = _integer_dims(ring)
    labels = tuple(a for a in range(ring.rank) if dims[a] is not None)
    if subring_closure(ring, labels) != labels:
        raise FusionRingError(
            "integral labels are not closed under fusion; dimensions inconsistent"
        )
    return labels


# ----------------------------------------------------------------------------
# gradings

@dataclass(frozen=True)
class GradedDecomposition:
    group: tuple[int, ...]            # invariant factors
    component: tuple[int, ...]        # label -> component index
    components: tuple[tuple[int, ...], ...]
    table: tuple[tuple[int, ...], ...]
    values: tuple[int, ...] | None = None   # square-free tags, for GN gradings

    @property
    def order(self) -> int:
        return len(self.components)


class GradingError(ValueError):
    pass


def universal_grading(ring: FusionRing) -> GradedDecomposition:
    """Finest faithful group grading, computed by cosets of the adjoint subring."""
    _require_valid(ring)
    adj = set(adjoint_subring(ring))
    adj_list = sorted(adj)
    fibers = []
    comp_of = [None] * ring.rank
    for x in range(ring.rank):
        if comp_of[x] is not None:
            continue
        mask = ring.N[x][adj_list].any(axis=0)
        fiber = frozenset(int(y) for y in np.nonzero(mask)[0])
        for y in fiber:
            if comp_of[y] is not None and y not in fiber:
                raise GradingError("adjoint cosets do not partition the labels")
        fibers.append(fiber)
        for y in fiber:
            comp_of[y] = len(fibers) - 1
    if frozenset(adj) not in fibers:
        raise GradingError("trivial component differs from the adjoint subring")
    # put the trivial component first, order the rest by least label
    order = sorted(range(len(fibers)), key=lambda i: (fibers[i] != frozenset(adj), min(fibers[i])))
    relabel = {old: new for new, old in enumerate(order)}
    fibers = [fibers[i] for i in order]
    comp_of = [relabel[c] for c in comp_of]

    k = len(fibers)
    table = [[None] * k for _ in range(k)]
    for a in range(ring.rank):
        for b in range(ring.rank):
            cs = np.nonzero(ring.N[a, b])[0]
            if len(cs) == 0:
                continue
            targets = {comp_of[int(c)] for c in cs}
            if len(targets) != 1:
                raise GradingError(
                    f"product of labels {a},{b} straddles several components"
                )
            t = targets.pop()
            i, j = comp_of[a], comp_of[b]
            if table[i][j] is None:
                table[i][j] = t
            elif table[i][j] != t:
                raise GradingError("component product is not well defined")
    for i in range(k):
        for j in range(k):
            if table[i][j] is None:
                raise GradingError("component product is not everywhere defined")
            if table[i][j] != table[j][i]:
                raise GradingError("component product is not commutative")
    for i in range(k):
        if sorted(table[i]) != list(range(k)):
            raise GradingError("component products do not form a group")
    orders = sorted(_table_element_order(table, i) for i in range(k))
    group = _abelian_invariants(k, orders)
    return GradedDecomposition(
        group=group,
        component=tuple(comp_of),
        components=tuple(tuple(sorted(f)) for f in fibers),
        table=tuple(tuple(row) for row in table),
    )


def _table_element_order(table, i: int) -> int:
    k, x = 1, i
    while x != 0:
        x = table[x][i]
        k += 1
    return k


def _squarefree_part(n: int) -> int:
    out = 1
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e % 2:
            out *= d
        d += 1
    return out * n


def gn_grading(ring: FusionRing) -> GradedDecomposition:
    """Grading by the square-free parts of the squared dimensions."""
    sq = _squared_dims(ring)
    tags = [_squarefree_part(s) for s in sq]
    values = sorted(set(tags))
    if values[0] != 1:
        raise GradingError("unit label must have integral dimension")
    index = {v: i for i, v in enumerate(values)}
    comp_of = [index[t] for t in tags]
    components = [tuple(a for a in range(ring.rank) if comp_of[a] == i)
                  for i in range(len(values))]
    if set(components[0]) != set(integral_subring(ring)):
        raise GradingError("trivial GN component differs from the integral subring")
    k = len(values)
    if k & (k - 1):
        raise GradingError("GN component count is not a power of two")
    table = [[index[_squarefree_part(values[i] * values[j])] for j in range(k)]
             for i in range(k)]
    for i in range(k):
        if sorted(table[i]) != list(range(k)):
            raise GradingError("square-free tags are not closed under products")
    for a in range(ring.rank):
        for b in range(ring.rank):
            for c in np.nonzero(ring.N[a, b])[0]:
                if comp_of[int(c)] != table[comp_of[a]][comp_of[b]]:
                    raise GradingError(
                        f"tensor compatibility fails at ({a},{b},{int(c)})"
                    )
    group = tuple([2] * (k.bit_length() - 1)) if k > 1 else (1,)
    return GradedDecomposition(
        group=group,
        component=tuple(comp_of),
        components=tuple(components),
        table=tuple(tuple(row) for row in table),
        values=tuple(values),
    )


# ----------------------------------------------------------------------------
# isomorphisms

def _dim_classes(ring: FusionRing) -> list[int]:
    """Cluster labels by dimension, robust to float fuzz."""
    dims = fp_dims(ring)
    order = sorted(range(ring.rank), key=lambda a: dims[a])
    cls = [0] * ring.rank
    current = 0
    for prev, a in zip(order, order[1:]):
        if dims[a] - dims[prev] > 1e-6:
            current += 1
        cls[a] = current
    return cls


def _signature(ring: FusionRing, dimcls: list[int], a: int):
    return (
        dimcls[a],
        ring.dual[a] == a,
        int(ring.N[a, a, a]),
        int(ring.N[a, a, 0]),
        tuple(sorted(ring.N[a].flatten().tolist())),
    )


def ring_isomorphisms(a: FusionRing, b: FusionRing) -> list[tuple[int, ...]]:
    """All unit-preserving, duality- and fusion-preserving label bijections."""
    _require_valid(a)
    _require_valid(b)
    if a.rank != b.rank:
        return []
    r = a.rank
    dca, dcb = _dim_classes(a), _dim_classes(b)
    siga = [_signature(a, dca, i) for i in range(r)]
    sigb = [_signature(b, dcb, i) for i in range(r)]
    if sorted(siga) != sorted(sigb):
        return []
    candidates = [
        [j for j in range(r) if sigb[j] == siga[i]] for i in range(r)
    ]
    if not all(candidates):
        return []
    # assign in order of fewest candidates; label 0 always first
    order = sorted(range(r), key=lambda i: (i != 0, len(candidates[i]), i))
    image = [None] * r
    used = [False] * r
    found: list[tuple[int, ...]] = []

    def compatible(i: int, j: int) -> bool:
        di = a.dual[i]
        if image[di] is not None and image[di] != b.dual[j]:
            return False
        for x in range(r):
            jx = image[x]
            if jx is None:
                continue
            if a.N[i, x, 0] != b.N[j, jx, 0] or a.N[x, i, 0] != b.N[jx, j, 0]:
                return False
            for y in range(r):
                jy = image[y]
                if jy is None:
                    continue
                if (a.N[i, x, y] != b.N[j, jx, jy]
                        or a.N[x, i, y] != b.N[jx, j, jy]
                        or a.N[x, y, i] != b.N[jx, jy, j]):
                    return False
        return True

    def extend(pos: int):
        if pos == r:
            perm = tuple(image)
            if _is_ring_iso(a, b, perm):
                found.append(perm)
            return
        i = order[pos]
        for j in candidates[i]:
            if not used[j] and compatible(i, j):
                image[i] = j
                used[j] = True
                extend(pos + 1)
                image[i] = None
                used[j] = False

    extend(0)
    return sorted(found)


def _is_ring_iso(a: FusionRing, b: FusionRing, perm) -> bool:
    p = list(perm)
    if p[0] != 0:
        return False
    if any(b.dual[p[i]] != p[a.dual[i]] for i in range(a.rank)):
        return False
    return (a.N == b.N[np.ix_(p, p, p)]).all()


def is_generalized_ty(ring: FusionRing) -> bool:
    """True iff products of non-invertible simples are sums of invertibles."""
    inv = set(invertibles(ring).labels)
    others = [a for a in range(ring.rank) if a not in inv]
    for a in others:
        for b in others:
            for c in np.nonzero(ring.N[a, b])[0]:
                if int(c) not in inv:
                    return False
    return True


# ----------------------------------------------------------------------------
# stock rings

def abelian_group_ring(moduli, names=None) -> FusionRing:
    """Group ring of a product of cyclic groups."""
    moduli = tuple(int(m) for m in moduli)
    elements = list(itertools.product(*[range(m) for m in moduli]))
    index = {e: i for i, e in enumerate(elements)}
    r = len(elements)
    N = np.zeros((r, r, r), dtype=np.int64)
    for x in elements:
        for y in elements:
            z = tuple((a + b) % m for a, b, m in zip(x, y, moduli))
            N[index[x], index[y], index[z]] = 1
    dual = [index[tuple((-a) % m for a, m in zip(x, moduli))] for x in elements]
    if names is None:
        if len(moduli) == 1:
            names = [str(x[0]) for x in elements]
        else:
            names = ["(" + ",".join(map(str, x)) + ")" for x in elements]
    dims = [Cyclotomic(1)] * r
    return FusionRing(N, dual, names, exact_dims=dims)


def cyclic_group_ring(n: int) -> FusionRing:
    return abelian_group_ring((n,))


@lru_cache(maxsize=None)
def dihedral_rep_ring(m: int) -> FusionRing:
    """Character ring of the dihedral group of order 2m, m odd.

    Labels: 0 the trivial character, 1 the sign character, then the
    (m-1)/2 two-dimensional characters rho_1 .. rho_(m-1)/2.
    """
    if m < 1 or m % 2 == 0:
        raise ValueError("m must be an odd positive integer")
    half = (m - 1) // 2
    r = 2 + half
    names = ["1", "sgn"] + [f"rho{k}" for k in range(1, half + 1)]
    N = np.zeros((r, r, r), dtype=np.int64)

    def rho(k: int) -> int:
        # fold the index into 1..(m-1)/2; rho_0 means 1 + sgn
        k = k % m
        return min(k, m - k)

    N[0, :, :] = np.eye(r, dtype=np.int64)
    N[:, 0, :] = np.eye(r, dtype=np.int64)
    N[1, 1, 0] = 1
    for k in range(1, half + 1):
        N[1, 1 + k, 1 + k] = 1
        N[1 + k, 1, 1 + k] = 1
    for j in range(1, half + 1):
        for k in range(1, half + 1):
            out: dict[int, int] = {}
            for t in (rho(j + k), rho(j - k)):
                if t == 0:
                    out[0] = out.get(0, 0) + 1
                    out[1] = out.get(1, 0) + 1
                else:
                    out[1 + t] = out.get(1 + t, 0) + 1
            for c, v in out.items():
                N[1 + j, 1 + k, c] = v
    dual = list(range(r))
    dims = [Cyclotomic(1), Cyclotomic(1)] + [Cyclotomic(2)] * half
    ring = FusionRing(N, dual, names, exact_dims=dims)
    _require_valid(ring)
    return ring
