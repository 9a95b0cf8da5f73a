"""Modular and premodular data: S/T matrices over exact cyclotomics.

The S-matrix is symmetric with first row the dimensions; T is the diagonal
of twists.  All verification is exact: the balancing relation, Verlinde
integrality and the unitarity identity S * conj(S) = D * Id are checked in
the cyclotomic field, floats appear only in positivity tests and optional
numeric cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fusion as _fusion
from .cyclo import (
    Cyclotomic,
    lcm_conductor,
    raw_embed,
    raw_is_zero,
    raw_mac,
    raw_mul,
    raw_to_cyclotomic,
)

__all__ = [
    "DataError",
    "DataReport",
    "ModularData",
    "SubcategorySpan",
    "centralizer",
    "classify_invertible",
    "deligne_product",
    "equivalent_data",
    "is_modular",
    "is_symmetric",
    "muger_center",
    "restrict",
    "s_unitarity_exact",
    "tannakian_rank2",
    "verify_premodular",
    "verlinde_ring",
]


class DataError(ValueError):
    """Structurally broken or inconsistent modular data."""


def _as_entry(v) -> Cyclotomic:
    return v if isinstance(v, Cyclotomic) else Cyclotomic(v)


class ModularData:
    """S-matrix, twists and duality for a (pre)modular category."""

    __slots__ = (
        "S", "T", "dual", "names", "extra",
        "_fusion", "_ring", "_raw", "_center", "_gdim", "_report",
    )

    def __init__(self, S, T, dual, names=None, fusion=None):
        S = tuple(tuple(_as_entry(e) for e in row) for row in S)
        T = tuple(_as_entry(t) for t in T)
        r = len(T)
        if r > _fusion.RANK_CAP:
            raise DataError(f"rank {r} exceeds the cap of {_fusion.RANK_CAP}")
        if len(S) != r or any(len(row) != r for row in S):
            raise DataError("S must be a square matrix matching T")
        dual = tuple(int(d) for d in dual)
        if sorted(dual) != list(range(r)):
            raise DataError("dual must be a permutation of the labels")
        self.S = S
        self.T = T
        self.dual = dual
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(r))
        if len(self.names) != r:
            raise DataError("one name per label required")
        self._fusion = None if fusion is None else np.array(fusion, dtype=np.int64)
        self.extra = {}
        self._ring = None
        self._raw = None
        self._center = None
        self._gdim = None
        self._report = None

    @property
    def rank(self) -> int:
        return len(self.T)

    @property
    def dims(self) -> tuple[Cyclotomic, ...]:
        return self.S[0]

    def global_dim(self) -> Cyclotomic:
        if self._gdim is None:
            total = Cyclotomic(0)
            for d in self.dims:
                total = total + d * d
            self._gdim = total
        return self._gdim

    def fusion_ring(self) -> _fusion.FusionRing:
        """The attached fusion tensor if present, else the Verlinde ring."""
        if self._ring is None:
            if self._fusion is not None:
                ring = _fusion.FusionRing(
                    self._fusion, self.dual, self.names, exact_dims=self.dims
                )
                rep = _fusion.validate(ring)
                if not rep.ok:
                    raise DataError(
                        "attached fusion tensor is invalid: "
                        + "; ".join(rep.failures)
                    )
                self._ring = ring
            else:
                self._ring = verlinde_ring(self)
        return self._ring

    def label(self, name) -> int:
        if isinstance(name, int):
            return name
        return self.names.index(name)

    def complex_s_matrix(self) -> np.ndarray:
        return np.array([[complex(e) for e in row] for row in self.S])

    def __repr__(self):
        return f"ModularData(rank={self.rank}, names={self.names})"


@dataclass
class DataReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


# ----------------------------------------------------------------------------
# shared raw-coefficient tables

def _raw_context(md: ModularData):
    if md._raw is None:
        entries = [e for row in md.S for e in row]
        entries.extend(md.T)
        L = lcm_conductor(entries)
        rawS = [[raw_embed(e, L) for e in row] for row in md.S]
        rawT = [raw_embed(t, L) for t in md.T]
        md._raw = (L, rawS, rawT)
    return md._raw


def _raw_conj(raw: dict, n: int) -> dict:
    return {(n - k) % n: v for k, v in raw.items()}


# ----------------------------------------------------------------------------
# verification

def verify_premodular(md: ModularData, fail_fast: bool = False) -> DataReport:
    """Exact check of symmetry, duality, twists and the balancing relation."""
    if md._report is not None and not fail_fast:
        return md._report
    rep = DataReport()
    fail = rep.failures.append
    r = md.rank
    names = md.names

    def bail() -> bool:
        return fail_fast and rep.failures

    # involution sanity
    if md.dual[0] != 0:
        fail("dual of the unit is not the unit")
    if any(md.dual[md.dual[a]] != a for a in range(r)):
        fail("duality is not an involution")
    if bail():
        return rep

    # S symmetric, first row positive, conj(S[a][b]) = S[a][b*]
    for a in range(r):
        for b in range(a, r):
            if md.S[a][b] != md.S[b][a]:
                fail(f"S is not symmetric at ({names[a]}, {names[b]})")
                if bail():
                    return rep
    for a in range(r):
        z = complex(md.dims[a])
        if not (z.real > 0 and abs(z.imag) <= 1e-9 * (1 + abs(z.real))):
            fail(f"dimension of {names[a]} is not a positive real")
    if md.dims[0] != 1:
        fail("dimension of the unit is not 1")
    if bail():
        return rep
    for a in range(r):
        for b in range(r):
            if md.S[a][b].conjugate() != md.S[a][md.dual[b]]:
                fail(f"conj(S) != S-dual at ({names[a]}, {names[b]})")
                if bail():
                    return rep

    # twists
    if md.T[0] != 1:
        fail("twist of the unit is not 1")
    for a in range(r):
        if md.T[a].order_of_unity() is None:
            fail(f"twist of {names[a]} is not a root of unity")
        if md.T[md.dual[a]] != md.T[a]:
            fail(f"twist of {names[a]} differs from its dual")
    if bail():
        return rep

    # balancing needs the fusion coefficients
    try:
        ring = md.fusion_ring()
    except (DataError, _fusion.FusionRingError) as exc:
        fail(f"fusion coefficients unavailable: {exc}")
        md._report = None
        return rep

    L, rawS, rawT = _raw_context(md)
    rawDT = []
    for c in range(r):
        rawDT.append(raw_mul(raw_embed(md.dims[c], L), rawT[c], L))
    N = ring.N
    dual = md.dual
    for a in range(r):
        for b in range(a, r):
            acc = raw_mul(raw_mul(rawT[a], rawT[b], L), rawS[a][b], L)
            row = N[dual[a], b]
            for c in np.nonzero(row)[0]:
                mult = int(row[c])
                for k, v in rawDT[int(c)].items():
                    s = acc.get(k, 0) - mult * v
                    if s:
                        acc[k] = s
                    elif k in acc:
                        del acc[k]
            if not raw_is_zero(L, acc):
                fail(f"balancing fails at ({names[a]}, {names[b]})")
                if bail():
                    return rep
    if not fail_fast or rep.ok:
        md._report = rep
    return rep


def s_unitarity_exact(md: ModularData) -> bool:
    """Exact check that S * conj(S) equals the global dimension times Id."""
    L, rawS, _ = _raw_context(md)
    r = md.rank
    D = raw_embed(md.global_dim(), L)
    conj = [[_raw_conj(rawS[a][x], L) for x in range(r)] for a in range(r)]
    for a in range(r):
        for b in range(a, r):
            acc: dict[int, object] = {}
            for x in range(r):
                if rawS[a][x] and conj[b][x]:
                    raw_mac(acc, rawS[a][x], conj[b][x], L)
            if a == b:
                for k, v in D.items():
                    s = acc.get(k, 0) - v
                    if s:
                        acc[k] = s
                    elif k in acc:
                        del acc[k]
            if not raw_is_zero(L, acc):
                return False
    return True


# ----------------------------------------------------------------------------
# Verlinde ring

def verlinde_ring(md: ModularData) -> _fusion.FusionRing:
    """Fusion coefficients recovered from S; exact, with integrality checks."""
    if md._ring is not None and md._fusion is None:
        return md._ring
    if not is_modular(md):
        raise DataError("S-matrix is degenerate; the Verlinde sum needs modular data")
    L, rawS, _ = _raw_context(md)
    r = md.rank
    dims = md.dims
    D = md.global_dim()
    inv_d = [raw_embed(d.inverse(), L) for d in dims]
    conjS = [[_raw_conj(rawS[c][x], L) for x in range(r)] for c in range(r)]
    Sd = [[raw_mul(rawS[b][x], inv_d[x], L) if rawS[b][x] else {}
           for x in range(r)] for b in range(r)]
    N = np.zeros((r, r, r), dtype=np.int64)
    for a in range(r):
        rowa = rawS[a]
        for b in range(a, r):
            P = [raw_mul(rowa[x], Sd[b][x], L) if rowa[x] and Sd[b][x] else {}
                 for x in range(r)]
            for c in range(r):
                acc: dict[int, object] = {}
                for x in range(r):
                    if P[x] and conjS[c][x]:
                        raw_mac(acc, P[x], conjS[c][x], L)
                val = raw_to_cyclotomic(L, acc) / D
                if not val.is_integer:
                    raise DataError(
                        f"Verlinde sum is not an integer at "
                        f"({md.names[a]}, {md.names[b]}, {md.names[c]}): {val}"
                    )
                k = val.integer_value()
                if k < 0:
                    raise DataError(
                        f"negative Verlinde coefficient at "
                        f"({md.names[a]}, {md.names[b]}, {md.names[c]})"
                    )
                N[a, b, c] = N[b, a, c] = k
    ring = _fusion.FusionRing(N, md.dual, md.names, exact_dims=dims)
    rep = _fusion.validate(ring)
    if not rep.ok:
        raise DataError("Verlinde ring fails validation: " + "; ".join(rep.failures))
    if md._fusion is None:
        md._ring = ring
    return ring


# ----------------------------------------------------------------------------
# centralizers and the center

@dataclass(frozen=True, eq=False)
class SubcategorySpan:
    parent: ModularData
    labels: tuple[int, ...]

    def __post_init__(self):
        labs = set(self.labels)
        if 0 not in labs:
            raise DataError("a span must contain the unit")
        if any(self.parent.dual[a] not in labs for a in labs):
            raise DataError("span is not closed under duality")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def dim(self) -> Cyclotomic:
        total = Cyclotomic(0)
        for a in self.labels:
            d = self.parent.dims[a]
            total = total + d * d
        return total

    def data(self) -> ModularData:
        return restrict(self.parent, self.labels)


def span(md: ModularData, labels) -> SubcategorySpan:
    """Close a label set under duality and fusion inside the parent."""
    ring = md.fusion_ring()
    closed = _fusion.subring_closure(ring, [md.label(x) for x in labels])
    return SubcategorySpan(md, closed)


def centralizer(md: ModularData, labels) -> SubcategorySpan:
    """Labels x with S[x][y] = d_x d_y for every y in the given set."""
    if isinstance(labels, SubcategorySpan):
        labels = labels.labels
    labels = [md.label(x) for x in labels]
    out = []
    for x in range(md.rank):
        dx = md.dims[x]
        if all(md.S[x][y] == dx * md.dims[y] for y in labels):
            out.append(x)
    return SubcategorySpan(md, tuple(out))


def muger_center(md: ModularData) -> SubcategorySpan:
    if md._center is None:
        md._center = centralizer(md, range(md.rank))
    return md._center


def is_modular(md: ModularData) -> bool:
    return muger_center(md).labels == (0,)


def is_symmetric(md: ModularData) -> bool:
    return muger_center(md).labels == tuple(range(md.rank))


# ----------------------------------------------------------------------------
# invertible objects

_I = None


def _plus_minus_i():
    global _I
    if _I is None:
        from .cyclo import zeta
        _I = (zeta(4), zeta(4) ** 3)
    return _I


def classify_invertible(md: ModularData, a) -> str:
    """Sort a self-inverse invertible into boson / fermion / semion / other."""
    a = md.label(a)
    if md.dims[a] != 1:
        raise DataError(f"{md.names[a]} is not invertible")
    if md.dual[a] != a:
        raise DataError(f"{md.names[a]} is not self-inverse")
    ring = md.fusion_ring()
    if ring.N[a, a, 0] != 1 or ring.N[a, a].sum() != 1:
        raise DataError(f"{md.names[a]} squared is not the unit")
    i, minus_i = _plus_minus_i()
    theta = md.T[a]
    if theta == 1:
        return "boson"
    if theta == -1:
        return "fermion"
    if theta == i or theta == minus_i:
        return "semion"
    return "other"


def tannakian_rank2(md: ModularData, a) -> bool:
    """True iff the rank-2 span of a self-inverse invertible is Tannakian."""
    return classify_invertible(md, a) == "boson"


# ----------------------------------------------------------------------------
# products, restriction, equivalence

def deligne_product(a: ModularData, b: ModularData) -> ModularData:
    """External tensor product: Kronecker S, pointwise T."""
    ra, rb = a.rank, b.rank
    S = [
        [a.S[i][k] * b.S[j][l] for k in range(ra) for l in range(rb)]
        for i in range(ra) for j in range(rb)
    ]
    T = [a.T[i] * b.T[j] for i in range(ra) for j in range(rb)]
    dual = [a.dual[i] * rb + b.dual[j] for i in range(ra) for j in range(rb)]
    names = [f"{a.names[i]}|{b.names[j]}" for i in range(ra) for j in range(rb)]
    fus = None
    try:
        fus = np.einsum(
            "ikm,jln->ijklmn", a.fusion_ring().N, b.fusion_ring().N
        ).reshape(ra * rb, ra * rb, ra * rb)
    except DataError:
        pass
    return ModularData(S, T, dual, names, fusion=fus)


def restrict(md: ModularData, labels) -> ModularData:
    """The data of a fusion-closed label set, fusion inherited from the parent."""
    labels = tuple(sorted(md.label(x) for x in labels))
    pos = {lab: i for i, lab in enumerate(labels)}
    ring = md.fusion_ring()
    sub = ring.N[np.ix_(labels, labels, labels)]
    for i, x in enumerate(labels):
        for j, y in enumerate(labels):
            if sub[i, j].sum() != ring.N[x, y].sum():
                raise DataError("label set is not closed under fusion")
    S = [[md.S[x][y] for y in labels] for x in labels]
    T = [md.T[x] for x in labels]
    dual = [pos[md.dual[x]] for x in labels]
    names = [md.names[x] for x in labels]
    return ModularData(S, T, dual, names, fusion=sub)


def _st_bijections(S1, T1, dual1, S2, T2, dual2, find_all=False):
    """Unit-fixing bijections carrying (S1, T1) to (S2, T2) entrywise."""
    r = len(T1)
    if len(T2) != r:
        return []

    def keys(S, T):
        return [
            (hash(T[i]), hash(S[0][i]), tuple(sorted(hash(e) for e in S[i])))
            for i in range(r)
        ]

    k1, k2 = keys(S1, T1), keys(S2, T2)
    if sorted(k1) != sorted(k2):
        return []
    candidates = [[j for j in range(r) if k2[j] == k1[i]] for i in range(r)]
    if not all(candidates):
        return []
    if 0 not in candidates[0]:
        return []
    order = sorted(range(r), key=lambda i: (i != 0, len(candidates[i]), i))
    image = [None] * r
    used = [False] * r
    found = []

    def ok(i, j):
        if T1[i] != T2[j]:
            return False
        d1 = dual1[i]
        if image[d1] is not None and image[d1] != dual2[j]:
            return False
        if S1[i][i] != S2[j][j]:
            return False
        for x in range(r):
            jx = image[x]
            if jx is not None and S1[i][x] != S2[j][jx]:
                return False
        return True

    def extend(pos):
        if pos == r:
            found.append(tuple(image))
            return not find_all
        i = order[pos]
        for j in (candidates[i] if i != 0 else [0]):
            if not used[j] and ok(i, j):
                image[i] = j
                used[j] = True
                if extend(pos + 1):
                    return True
                image[i] = None
                used[j] = False
        return False

    extend(0)
    return found


def equivalent_data(a: ModularData, b: ModularData):
    """A unit-fixing bijection matching S and T entrywise, or None."""
    res = _st_bijections(a.S, a.T, a.dual, b.S, b.T, b.dual)
    return res[0] if res else None
