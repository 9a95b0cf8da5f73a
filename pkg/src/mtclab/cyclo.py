"""Exact arithmetic in cyclotomic fields Q(zeta_n).

An element is stored on the integral power basis 1, z, ..., z^(phi(n)-1)
of Q(zeta_n), reduced modulo the n-th cyclotomic polynomial and then
pushed down to the smallest cyclotomic field that contains it (with the
usual convention that a conductor is never congruent to 2 mod 4).  Two
elements are equal iff their stored forms are identical, so equality is
exact, decidable and independent of how a value was produced.

The numeric embedding is fixed once and for all by zeta_n -> exp(2*pi*i/n).
It is used for positivity checks and diagnostics only, never for equality.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a hard dep, Fraction works too
    _Q = Fraction

__all__ = [
    "Cyclotomic",
    "ConductorError",
    "conductor_cap",
    "gauss_g",
    "jacobi",
    "order_of_unity",
    "rational",
    "root_of_unity",
    "set_conductor_cap",
    "sqrt_int",
    "to_complex",
    "zeta",
]

_ZERO = _Q(0)
_ONE = _Q(1)

_conductor_cap = 1920


class ConductorError(ValueError):
    """An operation would leave the supported tower of cyclotomic fields."""


def conductor_cap() -> int:
    return _conductor_cap


def set_conductor_cap(n: int) -> None:
    global _conductor_cap
    if n < 1:
        raise ValueError("conductor cap must be positive")
    _conductor_cap = n


# ----------------------------------------------------------------------------
# small number theory

@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    val = n
    for p in _prime_factors(n):
        val = val // p * (p - 1)
    return val


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n; 0 iff gcd(a, n) > 1."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive lower argument")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ----------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables

def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic; division of integer polynomials is exact here
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c:
            out[k - dn] = c
            for j, dj in enumerate(den):
                num[k - dn + j] -= c * dj
    return out


@lru_cache(maxsize=None)
def _cyclo_poly(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, low degree first."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n):
        if d < n:
            poly = _poly_div_exact(poly, _cyclo_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[dict[int, int], ...]:
    """Rewrites of zeta_n^k on the power basis, for phi(n) <= k < n."""
    phi = _phi(n)
    poly = _cyclo_poly(n)
    base = {j: -poly[j] for j in range(phi) if poly[j]}
    rows = [base]
    for _ in range(phi + 1, n):
        prev = rows[-1]
        nxt: dict[int, int] = {}
        for j, v in prev.items():
            if j + 1 == phi:
                for jj, vv in base.items():
                    nxt[jj] = nxt.get(jj, 0) + v * vv
            else:
                nxt[j + 1] = nxt.get(j + 1, 0) + v
        rows.append({j: v for j, v in nxt.items() if v})
    return tuple(rows)


def _reduce_raw(n: int, raw: dict[int, object]) -> dict[int, object]:
    """Reduce exponents mod the cyclotomic polynomial; strips zeros."""
    phi = _phi(n)
    rows = None
    out: dict[int, object] = {}
    for k, v in raw.items():
        if not v:
            continue
        if k < phi:
            s = out.get(k, _ZERO) + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        else:
            if rows is None:
                rows = _reduction_rows(n)
            for j, c in rows[k - phi].items():
                s = out.get(j, _ZERO) + v * c
                if s:
                    out[j] = s
                elif j in out:
                    del out[j]
    return out


# ----------------------------------------------------------------------------
# conductor normalisation

def _fold_2mod4(n: int, raw: dict[int, object]) -> tuple[int, dict[int, object]]:
    # Q(zeta_2m) = Q(zeta_m) for odd m, via zeta_2m = -zeta_m^((m+1)/2)
    m = n // 2
    h = (m + 1) // 2
    out: dict[int, object] = {}
    for k, v in raw.items():
        if k & 1:
            v = -v
        e = (k * h) % m
        s = out.get(e, _ZERO) + v
        if s:
            out[e] = s
        elif e in out:
            del out[e]
    return m, out


@lru_cache(maxsize=None)
def _descent_map(n: int, m: int):
    """Echelonised basis of Q(zeta_m) inside Q(zeta_n); m | n, m ≢ 2 mod 4."""
    phi_n, phi_m = _phi(n), _phi(m)
    step = n // m
    echelon = []
    for t in range(phi_m):
        e = step * t
        vec = [_ZERO] * phi_n
        if e < phi_n:
            vec[e] = _ONE
        else:
            for j, c in _reduction_rows(n)[e - phi_n].items():
                vec[j] = _Q(c)
        combo = [_ZERO] * phi_m
        combo[t] = _ONE
        for p, rvec, rcombo in echelon:
            f = vec[p]
            if f:
                f = f / rvec[p]
                for j, rv in enumerate(rvec):
                    if rv:
                        vec[j] -= f * rv
                for j, rc in enumerate(rcombo):
                    if rc:
                        combo[j] -= f * rc
        pivot = next(j for j, v in enumerate(vec) if v)
        echelon.append((pivot, vec, combo))
    return tuple(echelon)


def _try_descend(n: int, m: int, coeffs: dict[int, object]):
    """Coordinates of the element in Q(zeta_m), or None if it does not fit."""
    phi_n, phi_m = _phi(n), _phi(m)
    vec = [_ZERO] * phi_n
    for k, v in coeffs.items():
        vec[k] = v
    combo = [_ZERO] * phi_m
    for p, rvec, rcombo in _descent_map(n, m):
        f = vec[p]
        if f:
            f = f / rvec[p]
            for j, rv in enumerate(rvec):
                if rv:
                    vec[j] -= f * rv
            for j, rc in enumerate(rcombo):
                if rc:
                    combo[j] += f * rc
    if any(vec):
        return None
    return {j: c for j, c in enumerate(combo) if c}


def _canonical(n: int, raw: dict[int, object]) -> tuple[int, dict[int, object]]:
    """Full canonical form: reduce, normalise the conductor, descend."""
    if n % 4 == 2:
        n, raw = _fold_2mod4(n, raw)
    coeffs = _reduce_raw(n, raw)
    while n > 1:
        if not coeffs:
            return 1, {}
        if set(coeffs) == {0}:
            return 1, coeffs
        for p in _prime_factors(n):
            m = n // p
            if m % 4 == 2:
                m //= 2
            if m <= 1:
                continue
            sol = _try_descend(n, m, coeffs)
            if sol is not None:
                n, coeffs = m, sol
                break
        else:
            break
    return n, coeffs


# ----------------------------------------------------------------------------
# the element type

def _coerce_q(v) -> _Q:
    if isinstance(v, (int, Fraction)) or type(v) is _Q:
        return _Q(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


@lru_cache(maxsize=None)
def _unit_roots(n: int) -> tuple[complex, ...]:
    return tuple(cmath.exp(2j * cmath.pi * k / n) for k in range(n))


class Cyclotomic:
    """An exact element of some Q(zeta_n), in canonical form."""

    __slots__ = ("_n", "_c", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Cyclotomic):
            self._n, self._c = value._n, value._c
        else:
            v = _coerce_q(value)
            self._n, self._c = 1, ({0: v} if v else {})
        self._hash = None

    @classmethod
    def _new(cls, n: int, raw: dict[int, object]) -> "Cyclotomic":
        self = object.__new__(cls)
        self._n, self._c = _canonical(n, raw)
        self._hash = None
        return self

    @classmethod
    def from_pairs(cls, conductor: int, pairs) -> "Cyclotomic":
        """Build from (exponent, numerator, denominator) triples."""
        if conductor < 1:
            raise ValueError("conductor must be positive")
        if conductor > _conductor_cap:
            raise ConductorError(f"conductor {conductor} exceeds cap {_conductor_cap}")
        raw: dict[int, object] = {}
        for exp, num, den in pairs:
            if den == 0:
                raise ValueError("zero denominator")
            e = int(exp) % conductor
            raw[e] = raw.get(e, _ZERO) + _Q(int(num), int(den))
        return cls._new(conductor, raw)

    # -- structure ----------------------------------------------------------

    @property
    def conductor(self) -> int:
        return self._n

    def as_pairs(self) -> list[tuple[int, int, int]]:
        """Canonical (exponent, numerator, denominator) triples."""
        out = []
        for k in sorted(self._c):
            v = self._c[k]
            out.append((k, int(v.numerator), int(v.denominator)))
        return out

    @property
    def is_rational(self) -> bool:
        return self._n == 1

    @property
    def is_integer(self) -> bool:
        return self._n == 1 and (not self._c or self._c[0].denominator == 1)

    def rational_value(self) -> Fraction:
        if self._n != 1:
            raise ValueError("not a rational number")
        v = self._c.get(0, _ZERO)
        return Fraction(int(v.numerator), int(v.denominator))

    def integer_value(self) -> int:
        v = self.rational_value()
        if v.denominator != 1:
            raise ValueError("not an integer")
        return v.numerator

    # -- arithmetic ---------------------------------------------------------

    def _join(self, other: "Cyclotomic") -> int:
        n1, n2 = self._n, other._n
        L = n1 * n2 // math.gcd(n1, n2)
        if L > _conductor_cap:
            raise ConductorError(
                f"conductor {L} exceeds cap {_conductor_cap}; "
                "raise it with set_conductor_cap()"
            )
        return L

    def _lift_raw(self, L: int) -> dict[int, object]:
        f = L // self._n
        if f == 1:
            return self._c
        return {k * f: v for k, v in self._c.items()}

    def __add__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return other
        if self._n == other._n:
            raw = dict(self._c)
            for k, v in other._c.items():
                s = raw.get(k, _ZERO) + v
                if s:
                    raw[k] = s
                elif k in raw:
                    del raw[k]
            return Cyclotomic._new(self._n, raw)
        L = self._join(other)
        raw = self._lift_raw(L)
        raw = dict(raw)
        for k, v in other._lift_raw(L).items():
            s = raw.get(k, _ZERO) + v
            if s:
                raw[k] = s
            elif k in raw:
                del raw[k]
        return Cyclotomic._new(L, raw)

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(Cyclotomic)
        out._n = self._n
        out._c = {k: -v for k, v in self._c.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return other
        if other._n == 1:
            v = other._c.get(0, _ZERO)
            return self._scale(v)
        if self._n == 1:
            return other._scale(self._c.get(0, _ZERO))
        L = self._join(other)
        a, b = self._lift_raw(L), other._lift_raw(L)
        if len(a) > len(b):
            a, b = b, a
        raw: dict[int, object] = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                e = k1 + k2
                if e >= L:
                    e -= L
                s = raw.get(e, _ZERO) + v1 * v2
                if s:
                    raw[e] = s
                elif e in raw:
                    del raw[e]
        return Cyclotomic._new(L, raw)

    __rmul__ = __mul__

    def _scale(self, v) -> "Cyclotomic":
        if not v:
            return Cyclotomic(0)
        out = object.__new__(Cyclotomic)
        out._n = self._n
        out._c = {k: c * v for k, c in self._c.items()}
        out._hash = None
        return out

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse of a nonzero element, via extended Euclid."""
        if not self._c:
            raise ZeroDivisionError("inverse of zero")
        if self._n == 1:
            return Cyclotomic(_ONE / self._c[0])
        n, phi = self._n, _phi(self._n)

        def trim(p):
            while p and not p[-1]:
                p.pop()
            return p

        def polydiv(a, b):
            a = list(a)
            q = [_ZERO] * max(1, len(a) - len(b) + 1)
            inv_lead = _ONE / b[-1]
            while len(trim(a)) >= len(b):
                a = trim(a)
                c = a[-1] * inv_lead
                d = len(a) - len(b)
                q[d] += c
                for j, bc in enumerate(b):
                    a[d + j] -= c * bc
                a = trim(a)
            return q, a

        r0 = [_Q(c) for c in _cyclo_poly(n)]
        r1 = [_ZERO] * phi
        for k, v in self._c.items():
            r1[k] = v
        r1 = trim(r1)
        s0, s1 = [], [_ONE]
        while True:
            q, r = polydiv(r0, r1)
            if not trim(list(r)):
                break
            # s = s0 - q*s1
            s = list(s0) + [_ZERO] * max(0, len(q) + len(s1) - 1 - len(s0))
            for i, qc in enumerate(q):
                if qc:
                    for j, sc in enumerate(s1):
                        if sc:
                            s[i + j] -= qc * sc
            r0, r1, s0, s1 = r1, trim(r), s1, trim(s)
        if len(r1) != 1:
            raise ZeroDivisionError("element is a zero divisor (should not happen)")
        lead = r1[0]
        raw = {k: v / lead for k, v in enumerate(s1) if v}
        return Cyclotomic._new(n, raw)

    def __truediv__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return other
        if other._n == 1:
            v = other._c.get(0, _ZERO)
            if not v:
                raise ZeroDivisionError("division by zero")
            return self._scale(_ONE / v)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation, zeta_n -> zeta_n^(n-1)."""
        if self._n == 1:
            return self
        n = self._n
        raw = {(n - k) % n: v for k, v in self._c.items()}
        out = object.__new__(Cyclotomic)
        out._n = n
        out._c = _reduce_raw(n, raw)  # conjugation preserves the conductor
        out._hash = None
        return out

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other):
        other = _as_cyclo(other)
        if other is NotImplemented:
            return NotImplemented
        return self._n == other._n and self._c == other._c

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._c.items())))
        return self._hash

    def __bool__(self):
        return bool(self._c)

    # -- numerics and display -----------------------------------------------

    def __complex__(self) -> complex:
        roots = _unit_roots(self._n)
        return sum((float(v) * roots[k] for k, v in self._c.items()), 0j)

    def order_of_unity(self):
        """Multiplicative order if this is a root of unity, else None."""
        if self._n == 1:
            v = self._c.get(0, _ZERO)
            if v == 1:
                return 1
            if v == -1:
                return 2
            return None
        if self * self.conjugate() != 1:
            return None
        bound = self._n if self._n % 2 == 0 else 2 * self._n
        acc = self
        for k in range(1, bound + 1):
            if acc == 1:
                return k
            acc = acc * self
        return None  # pragma: no cover - unreachable for unit-modulus elements

    def __repr__(self):
        return f"Cyclotomic({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c):
            v = self._c[k]
            if k == 0:
                parts.append(str(v))
            else:
                head = f"z{self._n}" if k == 1 else f"z{self._n}^{k}"
                if v == 1:
                    parts.append(head)
                elif v == -1:
                    parts.append(f"-{head}")
                else:
                    parts.append(f"{v}*{head}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def _as_cyclo(v):
    if isinstance(v, Cyclotomic):
        return v
    if isinstance(v, (int, Fraction)) or type(v) is _Q:
        return Cyclotomic(v)
    return NotImplemented


# ----------------------------------------------------------------------------
# constructors

def rational(v) -> Cyclotomic:
    return Cyclotomic(v)


def root_of_unity(num: int, den: int) -> Cyclotomic:
    """e^(2*pi*i*num/den) as an exact element."""
    if den < 1:
        raise ValueError("denominator must be a positive integer")
    num %= den
    g = math.gcd(num, den)
    order, exp = den // g, num // g
    if order > _conductor_cap:
        raise ConductorError(f"order {order} exceeds conductor cap {_conductor_cap}")
    return Cyclotomic._new(order, {exp: _ONE})


def zeta(n: int) -> Cyclotomic:
    return root_of_unity(1, n)


def _sqrt_prime(p: int) -> Cyclotomic:
    if p == 2:
        return zeta(8) - zeta(8) ** 3
    # quadratic Gauss sum: sum_j (j/p) zeta_p^j equals sqrt(p) or i*sqrt(p)
    raw = {j: _Q(jacobi(j, p)) for j in range(1, p)}
    g = Cyclotomic._new(p, raw)
    if p % 4 == 1:
        return g
    return root_of_unity(3, 4) * g  # divide by i


def sqrt_int(n: int) -> Cyclotomic:
    """The positive square root of a positive integer, exactly."""
    if n < 1:
        raise ValueError("argument must be a positive integer")
    square, free = 1, 1
    for p in _prime_factors(n):
        e = 0
        m = n
        while m % p == 0:
            m //= p
            e += 1
        square *= p ** (e // 2)
        if e % 2:
            free *= p
    out = Cyclotomic(square)
    for p in _prime_factors(free):
        out = out * _sqrt_prime(p)
    assert complex(out).real > 0, "square root landed on the wrong branch"
    return out


def gauss_g(n: int) -> Cyclotomic:
    """(-1/n)*sqrt(n) for n = 1 mod 4, i*(-1/n)*sqrt(n) for n = 3 mod 4."""
    if n < 1 or n % 2 == 0:
        raise ValueError("argument must be an odd positive integer")
    out = jacobi(-1, n) * sqrt_int(n)
    if n % 4 == 3:
        out = zeta(4) * out
    return out


def to_complex(x: Cyclotomic) -> complex:
    return complex(x)


def order_of_unity(x: Cyclotomic):
    return x.order_of_unity()


# ----------------------------------------------------------------------------
# raw-coefficient helpers
#
# Hot loops (Verlinde sums, balancing checks) work on plain exponent->rational
# dicts at one shared conductor, folding exponents mod n and reducing against
# the cyclotomic polynomial only once per accumulated sum.  This is exact; it
# merely postpones canonicalisation.

def raw_embed(x: Cyclotomic, n: int) -> dict[int, object]:
    f = n // x._n
    if n % x._n:
        raise ValueError("target conductor must be a multiple")
    return {k * f % n: v for k, v in x._c.items()}


def raw_mul(a: dict, b: dict, n: int) -> dict[int, object]:
    if len(a) > len(b):
        a, b = b, a
    out: dict[int, object] = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            e = k1 + k2
            if e >= n:
                e -= n
            s = out.get(e, _ZERO) + v1 * v2
            if s:
                out[e] = s
            elif e in out:
                del out[e]
    return out


def raw_mac(acc: dict, a: dict, b: dict, n: int) -> None:
    """acc += a*b, in place, exponents mod n, no reduction."""
    if len(a) > len(b):
        a, b = b, a
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            e = k1 + k2
            if e >= n:
                e -= n
            s = acc.get(e, _ZERO) + v1 * v2
            if s:
                acc[e] = s
            elif e in acc:
                del acc[e]


def raw_to_cyclotomic(n: int, raw: dict) -> Cyclotomic:
    return Cyclotomic._new(n, raw)


def raw_is_zero(n: int, raw: dict) -> bool:
    return not _reduce_raw(n, raw)


def lcm_conductor(values) -> int:
    n = 1
    for x in values:
        n = n * x.conductor // math.gcd(n, x.conductor)
    if n > _conductor_cap:
        raise ConductorError(f"conductor {n} exceeds cap {_conductor_cap}")
    return n
