"""Constructors for the concrete families: pointed data from quadratic
forms on finite abelian groups, Ising data, and the rank N+7 orthogonal
level-2 family for odd N built from its explicit S/T block matrices.

Every constructor validates its output exactly before returning it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fusion as _fusion
from . import moddata as _moddata
from .cyclo import Cyclotomic, gauss_g, root_of_unity, sqrt_int, zeta

__all__ = [
    "MetaplecticLabels",
    "MetricGroup",
    "cyclic_forms",
    "cyclic_metric_group",
    "ising",
    "metaplectic_data",
    "metaplectic_ring",
    "metric_group",
    "pointed_data",
    "z2z2_premodular_family",
]


# ----------------------------------------------------------------------------
# metric groups

class MetricGroup:
    """A finite abelian group with a quadratic form valued in roots of unity.

    The form is stored as integer exponents over a common order R, so that
    q(x) = zeta_R^exp(x); the associated bicharacter b(x, y) =
    q(x+y)/(q(x)q(y)) is then integer arithmetic mod R.
    """

    __slots__ = ("moduli", "order", "exponents", "elements", "_index",
                 "nondegenerate")

    def __init__(self, moduli, order, exponents):
        self.moduli = tuple(int(m) for m in moduli)
        self.order = int(order)
        self.elements = list(itertools.product(*[range(m) for m in self.moduli]))
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.exponents = tuple(int(e) % self.order for e in exponents)
        if len(self.exponents) != len(self.elements):
            raise ValueError("one exponent per group element required")
        self._validate()

    # -- group structure ------------------------------------------------

    def index(self, x) -> int:
        return self._index[tuple(x)]

    def add(self, x, y):
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x):
        return tuple((-a) % m for a, m in zip(x, self.moduli))

    def b_exponent(self, x, y) -> int:
        qs = self.exponents
        return (qs[self.index(self.add(x, y))]
                - qs[self.index(x)] - qs[self.index(y)]) % self.order

    def q_of(self, x) -> Cyclotomic:
        return root_of_unity(self.exponents[self.index(x)], self.order)

    def b_of(self, x, y) -> Cyclotomic:
        return root_of_unity(self.b_exponent(x, y), self.order)

    def _validate(self):
        els = self.elements
        R = self.order
        qs = self.exponents
        if qs[self.index(tuple(0 for _ in self.moduli))] != 0:
            raise ValueError("the form must send 0 to 1")
        for x in els:
            if qs[self.index(self.neg(x))] != qs[self.index(x)]:
                raise ValueError(f"the form is not even at {x}")
        # bicharacter property, checked on generator increments
        gens = []
        for i, m in enumerate(self.moduli):
            g = tuple(1 if j == i else 0 for j in range(len(self.moduli)))
            if m > 1:
                gens.append(g)
        for g in gens:
            for x in els:
                for y in els:
                    lhs = self.b_exponent(self.add(x, g), y)
                    rhs = (self.b_exponent(x, y) + self.b_exponent(g, y)) % R
                    if lhs != rhs:
                        raise ValueError(
                            "the associated pairing is not a bicharacter"
                        )
        self.nondegenerate = all(
            any(self.b_exponent(x, y) for y in els)
            for x in els if any(x)
        )

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return (f"MetricGroup(moduli={self.moduli}, order={self.order}, "
                f"nondegenerate={self.nondegenerate})")


def metric_group(moduli, q_exponents, order) -> MetricGroup:
    return MetricGroup(moduli, order, q_exponents)


def cyclic_metric_group(n: int, a: int = 1) -> MetricGroup:
    """Z_n (n odd) with the form q(j) = e^(2 pi i a j^2 / n)."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be odd; even orders need a product form")
    if math.gcd(a, n) != 1:
        raise ValueError("the form parameter must be coprime to n")
    exps = [(a * j * j) % n for j in range(n)]
    return MetricGroup((n,), n, exps)


def _semion_factor(sign: int) -> MetricGroup:
    # Z_2 with q(1) = +i or -i
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return MetricGroup((2,), 4, [0, 1 if sign == 1 else 3])


def _product_group(g1: MetricGroup, g2: MetricGroup) -> MetricGroup:
    moduli = g1.moduli + g2.moduli
    R = math.lcm(g1.order, g2.order)
    f1, f2 = R // g1.order, R // g2.order
    exps = []
    for x in itertools.product(*[range(m) for m in moduli]):
        x1, x2 = x[: len(g1.moduli)], x[len(g1.moduli):]
        exps.append((g1.exponents[g1.index(x1)] * f1
                     + g2.exponents[g2.index(x2)] * f2) % R)
    return MetricGroup(moduli, R, exps)


def cyclic_forms(n: int) -> list[MetricGroup]:
    """All nondegenerate quadratic forms on Z_n, for n odd or n = 2 mod 4."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n % 4 == 0:
        raise ValueError("forms on Z_n with 4 | n are not supported")
    if n == 1:
        return [MetricGroup((1,), 1, [0])]
    if n % 2 == 1:
        return [cyclic_metric_group(n, a) for a in range(1, n)
                if math.gcd(a, n) == 1]
    m = n // 2
    if m == 1:
        return [_semion_factor(+1), _semion_factor(-1)]
    out = []
    for a in range(1, m):
        if math.gcd(a, m) != 1:
            continue
        for sign in (+1, -1):
            out.append(_product_group(_semion_factor(sign),
                                      cyclic_metric_group(m, a)))
    return out


# ----------------------------------------------------------------------------
# pointed data

def pointed_data(mg: MetricGroup, check: bool = True) -> _moddata.ModularData:
    """Pointed data of a metric group: twists q, S-matrix the inverse pairing.

    The balancing relation forces S[x][y] = q(x-y)/(q(x)q(y)), i.e. the
    complex conjugate of the pairing b.  Nondegenerate forms give modular
    data; degenerate forms give premodular data with a bigger center.
    """
    els = mg.elements
    r = len(els)
    R = mg.order
    S = [[root_of_unity(-mg.b_exponent(x, y), R) for y in els] for x in els]
    T = [mg.q_of(x) for x in els]
    dual = [mg.index(mg.neg(x)) for x in els]
    if len(mg.moduli) == 1:
        names = [str(x[0]) for x in els]
    else:
        names = ["(" + ",".join(map(str, x)) + ")" for x in els]
    fus = np.zeros((r, r, r), dtype=np.int64)
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            fus[i, j, mg.index(mg.add(x, y))] = 1
    md = _moddata.ModularData(S, T, dual, names, fusion=fus)
    if check:
        rep = _moddata.verify_premodular(md)
        if not rep.ok:
            raise _moddata.DataError(
                "pointed data failed verification: " + "; ".join(rep.failures)
            )
        if _moddata.is_modular(md) != mg.nondegenerate:
            raise _moddata.DataError(
                "modularity disagrees with nondegeneracy of the form"
            )
    return md


# ----------------------------------------------------------------------------
# Ising data

@lru_cache(maxsize=None)
def ising(nu: int) -> _moddata.ModularData:
    """Rank 3 data with dims (1, 1, sqrt 2) and sigma-twist e^(2 pi i nu/16)."""
    if nu % 2 == 0:
        raise ValueError("the twist parameter must be odd")
    s2 = sqrt_int(2)
    one = Cyclotomic(1)
    S = [
        [one, one, s2],
        [one, one, -s2],
        [s2, -s2, Cyclotomic(0)],
    ]
    T = [one, Cyclotomic(-1), root_of_unity(nu, 16)]
    md = _moddata.ModularData(S, T, (0, 1, 2), ("1", "psi", "sigma"))
    rep = _moddata.verify_premodular(md)
    assert rep.ok, rep.failures
    assert _moddata.is_modular(md)
    return md


# ----------------------------------------------------------------------------
# the orthogonal level-2 family, odd N, rank N+7

@dataclass(frozen=True)
class MetaplecticLabels:
    """Role map for the N+7 labels: unit, the Z_4 of invertibles g^k, the
    two-dimensional objects X_a (adjoint) and Y_a, and the four sqrt(N)
    objects V_1..V_4."""

    N: int
    unit: int
    g2: int
    g: int
    g3: int
    Y: tuple[int, ...]
    X: tuple[int, ...]
    V: tuple[int, ...]

    @property
    def adjoint(self) -> tuple[int, ...]:
        return tuple(sorted((self.unit, self.g2) + self.X))

    @property
    def integral(self) -> tuple[int, ...]:
        return tuple(sorted((self.unit, self.g2, self.g, self.g3)
                            + self.X + self.Y))

    @property
    def pointed(self) -> tuple[int, ...]:
        return tuple(sorted((self.unit, self.g2, self.g, self.g3)))


def _build_metaplectic(N: int, interleave: str, beta_swapped: bool):
    """Assemble the explicit S/T blocks for odd N > 1.

    interleave picks which of the two-dimensional families sits at the odd
    display positions; beta_swapped transposes the two off-diagonal values
    of the spinor block.  Exactly one combination satisfies balancing; the
    constructor probes and keeps it.
    """
    r = N + 7
    half = (N - 1) // 2
    one = Cyclotomic(1)
    sN = sqrt_int(N)
    iN = root_of_unity(N, 4)            # i^N
    theta_eps = root_of_unity(2 * N - 1, 16)
    G = gauss_g(N)
    alpha = G.conjugate() * theta_eps * theta_eps
    beta = root_of_unity(2 * N - 1, 4) * theta_eps * theta_eps * G
    if beta_swapped:
        beta = beta.conjugate()
    alpha_bar, beta_bar = alpha.conjugate(), beta.conjugate()

    # roles at display positions a = 1..N-1
    names = ["1", "g2", "g", "g3"]
    Y, X = [], []
    for a in range(1, N):
        k = (a + 1) // 2
        first_is_y = interleave == "YX"
        odd = a % 2 == 1
        if odd == first_is_y:
            Y.append(3 + a)
            names.append(f"Y{k}")
        else:
            X.append(3 + a)
            names.append(f"X{a // 2 if not odd else k}")
    names += ["V1", "V2", "V3", "V4"]
    vs = [N + 3, N + 4, N + 5, N + 6]

    S = [[Cyclotomic(0)] * r for _ in range(r)]
    # invertible block
    for i in range(4):
        for j in range(4):
            S[i][j] = -one if (i >= 2 and j >= 2) else one
    # invertibles x two-dimensionals
    for a in range(1, N):
        col = 3 + a
        for i in (0, 1):
            S[i][col] = S[col][i] = Cyclotomic(2)
        v = Cyclotomic(2 if a % 2 == 0 else -2)
        for i in (2, 3):
            S[i][col] = S[col][i] = v
    # invertibles x spinors
    c_rows = [
        [one, one, one, one],
        [-one, -one, -one, -one],
        [-iN, iN, -iN, iN],
        [iN, -iN, iN, -iN],
    ]
    for i in range(4):
        for j in range(4):
            val = c_rows[i][j] * sN
            S[i][vs[j]] = S[vs[j]][i] = val
    # two-dimensional block: 4cos(pi a b / N)
    for a in range(1, N):
        for b in range(a, N):
            val = 2 * (root_of_unity(a * b, 2 * N)
                       + root_of_unity(-a * b, 2 * N))
            S[3 + a][3 + b] = S[3 + b][3 + a] = val
    # spinor block
    e_rows = [
        [alpha_bar, alpha, beta, beta_bar],
        [alpha, alpha_bar, beta_bar, beta],
        [beta, beta_bar, alpha_bar, alpha],
        [beta_bar, beta, alpha, alpha_bar],
    ]
    for i in range(4):
        for j in range(4):
            S[vs[i]][vs[j]] = e_rows[i][j]

    T = [one, one, iN, iN]
    for a in range(1, N):
        T.append(root_of_unity(2 * N * a - a * a, 4 * N))
    T += [theta_eps, theta_eps, -theta_eps, -theta_eps]

    dual = list(range(r))
    dual[2], dual[3] = 3, 2
    dual[vs[0]], dual[vs[1]] = vs[1], vs[0]
    dual[vs[2]], dual[vs[3]] = vs[3], vs[2]

    md = _moddata.ModularData(S, T, dual, names)
    half_k = lambda a: (a + 1) // 2
    labels = MetaplecticLabels(
        N=N, unit=0, g2=1, g=2, g3=3,
        Y=tuple(Y), X=tuple(X), V=tuple(vs),
    )
    return md, labels


def _degenerate_metaplectic():
    """N = 1: pointed Z_8 data with twists e^(j^2 pi i / 8), relabelled."""
    mg = MetricGroup((8,), 16, [(j * j) % 16 for j in range(8)])
    base = pointed_data(mg)
    order = [0, 4, 2, 6, 1, 7, 3, 5]
    pos = {lab: i for i, lab in enumerate(order)}
    S = [[base.S[x][y] for y in order] for x in order]
    T = [base.T[x] for x in order]
    dual = [pos[base.dual[x]] for x in order]
    names = ["1", "g2", "g", "g3", "V1", "V2", "V3", "V4"]
    fus = base.fusion_ring().N[np.ix_(order, order, order)]
    md = _moddata.ModularData(S, T, dual, names, fusion=fus)
    labels = MetaplecticLabels(N=1, unit=0, g2=1, g=2, g3=3,
                               Y=(), X=(), V=(4, 5, 6, 7))
    return md, labels


@lru_cache(maxsize=None)
def _metaplectic(N: int):
    if N < 1 or N % 2 == 0:
        raise ValueError("N must be an odd positive integer")
    if N == 1:
        md, labels = _degenerate_metaplectic()
        rep = _moddata.verify_premodular(md)
        assert rep.ok and _moddata.is_modular(md)
        return md, labels
    attempts = []
    for interleave in ("YX", "XY"):
        for beta_swapped in (True, False):
            attempts.append((interleave, beta_swapped))
    for interleave, beta_swapped in attempts:
        md, labels = _build_metaplectic(N, interleave, beta_swapped)
        rep = _moddata.verify_premodular(md, fail_fast=True)
        if rep.ok and _moddata.is_modular(md):
            md.extra["variant"] = (interleave, beta_swapped)
            return md, labels
    raise AssertionError(
        f"no reading of the S/T blocks is consistent for N={N}"
    )


def metaplectic_data(N: int) -> _moddata.ModularData:
    """Modular data of rank N+7 and dimension 8N, for odd N."""
    return _metaplectic(N)[0]


def metaplectic_labels(N: int) -> MetaplecticLabels:
    return _metaplectic(N)[1]


def _check_product(ring, a, b, expected):
    got = ring.product(a, b)
    if got != expected:
        raise AssertionError(
            f"fusion rule mismatch at {ring.names[a]} x {ring.names[b]}: "
            f"got { {ring.names[c]: m for c, m in got.items()} }"
        )


def _assert_metaplectic_rules(ring, lab: MetaplecticLabels):
    """The full published fusion-rule list for the rank N+7 family."""
    N = lab.N
    g, g2, g3, unit = lab.g, lab.g2, lab.g3, lab.unit
    V = lab.V
    if N == 1:
        _check_product(ring, V[0], V[0], {g: 1})
    else:
        X = {a + 1: lab.X[a] for a in range(len(lab.X))}
        Y = {a + 1: lab.Y[a] for a in range(len(lab.Y))}
        half = (N - 1) // 2
        for a in range(1, half + 1):
            _check_product(ring, g, X[a], {Y[(N + 1) // 2 - a]: 1})
            _check_product(ring, g2, X[a], {X[a]: 1})
            _check_product(ring, g2, Y[a], {Y[a]: 1})
            m = min(2 * a, N - 2 * a)
            _check_product(ring, X[a], X[a], {unit: 1, g2: 1, X[m]: 1})
            for b in range(1, half + 1):
                if a == b:
                    continue
                lo, hi = min(a + b, N - a - b), abs(a - b)
                _check_product(ring, X[a], X[b], {X[lo]: 1, X[hi]: 1})
        _check_product(ring, V[0], V[0],
                       {g: 1, **{Y[a]: 1 for a in range(1, half + 1)}})
    _check_product(ring, g, V[0], {V[2]: 1})
    _check_product(ring, g, V[2], {V[3]: 1})
    _check_product(ring, g, V[1], {V[0]: 1})
    _check_product(ring, g, V[3], {V[1]: 1})
    for v in V:
        _check_product(ring, g3, v, {ring.dual[v]: 1})
    assert ring.dual[V[0]] == V[1] and ring.dual[V[2]] == V[3]


@lru_cache(maxsize=None)
def metaplectic_ring(N: int) -> _fusion.FusionRing:
    """Verlinde ring of the rank N+7 data, with every fusion rule asserted."""
    md = metaplectic_data(N)
    ring = _moddata.verlinde_ring(md) if md._fusion is None else md.fusion_ring()
    _assert_metaplectic_rules(ring, metaplectic_labels(N))
    return ring


# ----------------------------------------------------------------------------
# the exhaustive rank-4 premodular family on Z_2 x Z_2

def z2z2_premodular_family() -> list[_moddata.ModularData]:
    """All premodular data on the group ring of Z_2 x Z_2: every quadratic
    form with values in 4th roots of unity, S built from balancing."""
    out = []
    for qa, qb, qc in itertools.product(range(4), repeat=3):
        try:
            mg = MetricGroup((2, 2), 4, [0, qa, qb, qc])
        except ValueError:
            continue
        out.append(pointed_data(mg))
    return out
