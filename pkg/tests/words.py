"""Small link diagrams and float formulas shared by the tests."""
from __future__ import annotations

import cmath
import math

from qtqft.blocks import parse_morse_word


def word(k: int, body: str):
    return parse_morse_word(f"qtqft-format 1\nlevel {k}\n{body}")


def unknot(k: int, a: int):
    return word(k, f"cup({a})\ncap({a})")


def braid2(k: int, a: int, b: int, m: int, sign: str = "+"):
    """Closure of the 2-strand braid sigma^m; colors a, b (equal when m is odd)."""
    body = f"cup\nbirth(2,1,{a})\nbirth(4,2,{b})\n" + f"X{sign}(4,1)\n" * m + "death(4,2)\ndeath(2,1)\ncap"
    return word(k, body)


def kink(k: int, a: int, sign: str = "+"):
    return word(k, f"cup\nbirth(2,1,{a})\nX{sign}(2,1)\ndeath(2,1)\ncap")


def framed_unknot_text(k: int, p: int) -> str:
    return f"qtqft-format 1\nlevel {k}\ncup\nbirth(2,1,1)\ndeath(2,1)\ncap\nframings {p}\n"


# closed forms in floating point

def f_qdim(k: int, a: int) -> float:
    r = k + 2
    return math.sin(math.pi * (a + 1) / r) / math.sin(math.pi / r)


def f_S(k: int, a: int, b: int) -> float:
    r = k + 2
    return math.sqrt(2 / r) * math.sin(math.pi * (a + 1) * (b + 1) / r)


def f_twist(k: int, a: int) -> complex:
    return cmath.exp(2j * math.pi * a * (a + 2) / (4 * (k + 2)))


def f_D(k: int) -> float:
    return 1 / f_S(k, 0, 0)


def f_lens(k: int, p: int) -> complex:
    """Invariant of the p-framed unknot surgery, S^3 -> 1, from Gauss sums."""
    kappa = cmath.exp(2j * math.pi * 3 * k / (8 * (k + 2)))
    s = sum(f_S(k, 0, b) ** 2 * f_twist(k, b) ** p for b in range(k + 1))
    sign = (p > 0) - (p < 0)
    return f_D(k) * s * kappa ** (-sign)
