"""Exact arithmetic in cyclotomic fields Q(z), z = exp(2*pi*i/order).

Elements are stored as an integer numerator vector over the power basis
1, z, ..., z^(phi-1) together with a positive common denominator.
"""
from __future__ import annotations

import cmath
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "CycNum",
    "cyclotomic_poly",
    "cyc_from_power",
    "cyc_from_int",
    "cyc_add",
    "cyc_mul",
    "cyc_neg",
    "cyc_inv",
    "cyc_to_float",
]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    # x^n - 1 divided by Phi_d for all proper divisors d
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    a = a[:]
    out = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(out) - 1, -1, -1):
        c, rem = divmod(a[i + len(b) - 1], lead)
        assert rem == 0
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    assert not any(a[: len(b) - 1])
    return out


class _Field:
    """Per-order reduction tables."""

    def __init__(self, order: int):
        self.order = order
        phi = cyclotomic_poly(order)
        self.deg = len(phi) - 1
        d = self.deg
        # red[i] = x^i mod Phi as an integer vector, for 0 <= i < max(order, 2d)
        top = max(order, 2 * d)
        red: list[tuple[int, ...]] = []
        cur = [0] * d
        cur[0] = 1
        for i in range(top):
            if i < d:
                v = [0] * d
                v[i] = 1
                red.append(tuple(v))
                continue
            if i == d:
                cur = [-c for c in phi[:d]]
            else:
                # multiply previous by x and reduce
                prev = list(red[-1])
                hi = prev[-1]
                cur = [0] + prev[:-1]
                if hi:
                    for j in range(d):
                        cur[j] -= hi * phi[j]
            red.append(tuple(cur))
        self.red = red
        self.roots = [cmath.exp(2j * math.pi * i / order) for i in range(d)]


_fields: dict[int, _Field] = {}
_fields_lock = threading.Lock()


def _field(order: int) -> _Field:
    f = _fields.get(order)
    if f is None:
        with _fields_lock:
            f = _fields.get(order)
            if f is None:
                f = _Field(order)
                _fields[order] = f
    return f


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num = [-c for c in num]
        den = -den
    g = den
    for c in num:
        if c:
            g = math.gcd(g, c)
            if g == 1:
                break
    if not any(num):
        return tuple(0 for _ in num), 1
    if g != 1:
        num = [c // g for c in num]
        den //= g
    return tuple(num), den


class CycNum:
    """Immutable element of Q(z) with z a primitive order-th root of unity."""

    __slots__ = ("order", "num", "den", "_hash")

    def __init__(self, order: int, num: Sequence[int], den: int = 1, *, _raw: bool = False):
        self.order = order
        if _raw:
            self.num = tuple(num)
            self.den = den
        else:
            d = _field(order).deg
            if len(num) != d:
                raise ValueError(f"expected {d} coefficients, got {len(num)}")
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            self.num, self.den = _normalize(list(num), den)
        self._hash = None

    # construction helpers
    @classmethod
    def from_coeffs(cls, order: int, coeffs: Iterable) -> "CycNum":
        fr = [Fraction(c) for c in coeffs]
        d = _field(order).deg
        if len(fr) > d:
            # reduce higher powers
            acc = cls.zero(order)
            for i, c in enumerate(fr):
                if c:
                    acc = acc + cyc_from_power(i, order) * cls.rational(order, c)
            return acc
        fr += [Fraction(0)] * (d - len(fr))
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(order, [int(c * den) for c in fr], den)

    @classmethod
    def zero(cls, order: int) -> "CycNum":
        return cls(order, (0,) * _field(order).deg, 1, _raw=True)

    @classmethod
    def one(cls, order: int) -> "CycNum":
        return cls.rational(order, 1)

    @classmethod
    def rational(cls, order: int, value) -> "CycNum":
        value = Fraction(value)
        d = _field(order).deg
        num = [0] * d
        num[0] = value.numerator
        return cls(order, num, value.denominator)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def degree(self) -> int:
        return len(self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(self.num[0], self.den)

    def _check(self, other: "CycNum") -> None:
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def _coerce(self, other) -> "CycNum":
        if isinstance(other, CycNum):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.rational(self.order, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycNum(self.order, [a + b for a, b in zip(self.num, other.num)], self.den)
        return CycNum(
            self.order,
            [a * other.den + b * self.den for a, b in zip(self.num, other.num)],
            self.den * other.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.order, [-a for a in self.num], self.den, _raw=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.num, other.num
        d = len(a)
        if not any(a) or not any(b):
            return CycNum.zero(self.order)
        if other.is_rational():
            c = b[0]
            return CycNum(self.order, [x * c for x in a], self.den * other.den)
        if self.is_rational():
            c = a[0]
            return CycNum(self.order, [x * c for x in b], self.den * other.den)
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:d]
        red = _field(self.order).red
        for i in range(d, 2 * d - 1):
            c = prod[i]
            if c:
                for j, rj in enumerate(red[i]):
                    if rj:
                        out[j] += c * rj
        return CycNum(self.order, out, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycNum.rational(self.order, 1 / self.rational_value())
        return _inverse(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNum.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.order == other.order and self.den == other.den and self.num == other.num
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def conjugate(self) -> "CycNum":
        """Galois automorphism z -> z^-1 (complex conjugation)."""
        acc = [Fraction(0)] * len(self.num)
        red = _field(self.order).red
        n = self.order
        for i, c in enumerate(self.num):
            if c:
                for j, rj in enumerate(red[(-i) % n]):
                    if rj:
                        acc[j] += c * rj
        return CycNum(self.order, [int(x) for x in acc], self.den)

    def galois(self, s: int) -> "CycNum":
        """Automorphism z -> z^s, s coprime to the order."""
        if math.gcd(s, self.order) != 1:
            raise ValueError("exponent not coprime to order")
        red = _field(self.order).red
        out = [0] * len(self.num)
        for i, c in enumerate(self.num):
            if c:
                for j, rj in enumerate(red[(i * s) % self.order]):
                    if rj:
                        out[j] += c * rj
        return CycNum(self.order, out, self.den)

    def to_complex(self) -> complex:
        roots = _field(self.order).roots
        return sum(c * z for c, z in zip(self.num, roots) if c) / self.den + 0j

    def lift(self, order: int) -> "CycNum":
        """Embed into Q(w) with w^(order/self.order) = z."""
        if order % self.order:
            raise ValueError("target order must be a multiple")
        m = order // self.order
        acc = CycNum.zero(order)
        for i, c in enumerate(self.num):
            if c:
                acc = acc + cyc_from_power(i * m, order) * c
        return acc * Fraction(1, self.den)

    def __repr__(self):
        return f"CycNum({self.order}, {self})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if i == 0:
                body = cs
            else:
                mon = "z" if i == 1 else f"z^{i}"
                body = f"{cs}*{mon}"
            terms.append(body)
        if not terms:
            return "0"
        s = terms[0]
        for t in terms[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNum":
        return cls.from_coeffs(int(obj["order"]), [Fraction(s) for s in obj["coeffs"]])


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = a[:]
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return q, _poly_trim(a[: len(b) - 1])


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _inverse(x: CycNum) -> CycNum:
    # extended Euclid in Q[t] against Phi_order
    phi = [Fraction(c) for c in cyclotomic_poly(x.order)]
    r0, r1 = phi, _poly_trim([Fraction(c, x.den) for c in x.num])
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1:
            raise ArithmeticError("non-invertible element (should not happen in a field)")
    c = r1[0]
    coeffs = [v / c for v in s1]
    return CycNum.from_coeffs(x.order, coeffs)


@lru_cache(maxsize=4096)
def cyc_from_power(e: int, order: int) -> CycNum:
    """z^e in canonical form; e may be negative."""
    f = _field(order)
    return CycNum(order, f.red[e % order], 1, _raw=True)


def cyc_from_int(n, order: int) -> CycNum:
    return CycNum.rational(order, n)


def cyc_add(a: CycNum, b: CycNum) -> CycNum:
    return a + b


def cyc_mul(a: CycNum, b: CycNum) -> CycNum:
    return a * b


def cyc_neg(a: CycNum) -> CycNum:
    return -a


def cyc_inv(a: CycNum) -> CycNum:
    return a.inverse()


def cyc_to_float(a: CycNum) -> tuple[float, float]:
    z = a.to_complex()
    return (z.real, z.imag)
