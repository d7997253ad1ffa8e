"""Truncated U_q(sl2) fusion data at level k.

Labels are twice-spin integers 0..k.  All values live in Q(xi) with xi a
primitive 8r-th root of unity, r = k + 2, so that q = xi^4.  The extra
factor of two over the 4r-th roots is what makes the global dimension D
(and hence the normalized S matrix) exact for every level.

F-moves are stored in a vertex gauge in which every entry is cyclotomic;
the unitary 6j symbols are only available squared (see ``sixj_squared``).
"""
from __future__ import annotations

import threading
from functools import lru_cache
from itertools import product

from .cyclo import CycNum, cyc_from_power

__all__ = [
    "FusionData",
    "IdentityFailure",
    "build_fusion_data",
    "identity_suites",
]


class IdentityFailure(AssertionError):
    """Raised when an identity check fails; ``labels`` names the culprit tuple."""

    def __init__(self, name: str, labels: tuple, detail: str = ""):
        self.name = name
        self.labels = labels
        super().__init__(f"{name} failed at {labels} {detail}".rstrip())


class FusionData:
    """Immutable tables for level k.  Build with :func:`build_fusion_data`."""

    def __init__(self, k: int):
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"level must be an integer >= 1, got {k!r}")
        self.k = k
        self.r = k + 2
        self.order = 8 * self.r
        self.labels = tuple(range(k + 1))
        self.zero = CycNum.zero(self.order)
        self.one = CycNum.one(self.order)
        self.q = self.xi(4)
        self.i = self.xi(2 * self.r)
        qq = self.q - self.q.inverse()
        self._qq_inv = qq.inverse()
        r = self.r
        self._qints = [self._qint_raw(n) for n in range(2 * r)]
        self._qfact = [self.one]
        for n in range(1, 2 * r + 2):
            self._qfact.append(self._qfact[-1] * self.qint(n))
        self._qdim = tuple(self.qint(a + 1) for a in self.labels)
        self._qdim_inv = tuple(d.inverse() for d in self._qdim)
        self._twist = tuple(self.xi(2 * a * (a + 2)) for a in self.labels)
        self._lock = threading.Lock()
        self._fcache: dict = {}
        self._ficache: dict = {}
        self._fusion = {
            (a, b): tuple(c for c in self.labels if self.admissible(a, b, c))
            for a in self.labels
            for b in self.labels
        }
        d2 = sum((d * d for d in self._qdim), self.zero)
        self.D2 = d2
        # Gauss sum p_+ = D exp(2 pi i c / 8) with c = 3k/r; exp(2 pi i c/8) = xi^(3k)
        self.p_plus = sum((self._qdim[a] ** 2 * self._twist[a] for a in self.labels), self.zero)
        self.p_minus = self.p_plus.conjugate()
        self.kappa = self.xi(3 * k)
        self.D = self.p_plus * self.xi(-3 * k)
        self.S_tilde = tuple(
            tuple(
                sum(
                    (self._twist[c] * self._qdim[c] for c in self._fusion[(a, b)]),
                    self.zero,
                )
                * (self._twist[a] * self._twist[b]).inverse()
                for b in self.labels
            )
            for a in self.labels
        )
        D_inv = self.D.inverse()
        self.S = tuple(tuple(x * D_inv for x in row) for row in self.S_tilde)
        self.T = tuple(
            tuple(self._twist[a] if a == b else self.zero for b in self.labels) for a in self.labels
        )
        self._verify_build()

    # scalars

    def xi(self, e: int) -> CycNum:
        """Power of the primitive 8r-th root xi = exp(2 pi i / 8r)."""
        return cyc_from_power(e, self.order)

    def _qint_raw(self, n: int) -> CycNum:
        return (self.xi(4 * n) - self.xi(-4 * n)) * self._qq_inv

    def qint(self, n: int) -> CycNum:
        if 0 <= n < len(self._qints):
            return self._qints[n]
        return self._qint_raw(n)

    def qfact(self, n: int) -> CycNum:
        if n < 0:
            raise ValueError("negative q-factorial")
        while n >= len(self._qfact):
            self._qfact.append(self._qfact[-1] * self.qint(len(self._qfact)))
        return self._qfact[n]

    def check_label(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a <= self.k:
            raise ValueError(f"label {a!r} is not physical at level {self.k}")
        return a

    def qdim(self, a: int) -> CycNum:
        return self._qdim[self.check_label(a)]

    def qdim_inv(self, a: int) -> CycNum:
        return self._qdim_inv[self.check_label(a)]

    def twist(self, a: int) -> CycNum:
        """v_a = q^(2j(j+1)), j = a/2."""
        return self._twist[self.check_label(a)]

    def twist_sqrt(self, a: int) -> CycNum:
        return self.xi(self.check_label(a) * (a + 2))

    def casimir(self, a: int):
        """Quadratic casimir C_a = 2j(j+1) as a Fraction."""
        from fractions import Fraction

        return Fraction(self.check_label(a) * (a + 2), 2)

    # fusion

    def admissible(self, a: int, b: int, c: int) -> bool:
        k = self.k
        if not (0 <= a <= k and 0 <= b <= k and 0 <= c <= k):
            return False
        return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c <= 2 * k

    def N(self, a: int, b: int, c: int) -> int:
        return 1 if self.admissible(a, b, c) else 0

    def fuse(self, a: int, b: int) -> tuple[int, ...]:
        return self._fusion[(a, b)]

    # braiding

    def _check_triple(self, a, b, c):
        if not self.admissible(a, b, c):
            raise ValueError(f"inadmissible triple {(a, b, c)} at level {self.k}")

    def lam(self, a: int, b: int, c: int) -> CycNum:
        """lambda_abc = v_a v_b / v_c."""
        self._check_triple(a, b, c)
        return self.xi(2 * (a * (a + 2) + b * (b + 2) - c * (c + 2)))

    def lam_sqrt(self, a: int, b: int, c: int, sign: int = 1) -> CycNum:
        """lambda_abc^(sign/2), built from twist_sqrt."""
        self._check_triple(a, b, c)
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return self.xi(sign * (a * (a + 2) + b * (b + 2) - c * (c + 2)))

    def eps(self, a: int, b: int, c: int) -> int:
        """Fusion sign (-1)^(j_a + j_b - j_c)."""
        return -1 if ((a + b - c) // 2) % 2 else 1

    def braid_eigenvalue(self, a: int, b: int, c: int, sign: int = 1) -> CycNum:
        """Eigenvalue of (P R)^sign on channel c of a (x) b."""
        val = self.lam_sqrt(a, b, c, -sign)
        return -val if self.eps(a, b, c) < 0 else val

    # recoupling

    def delta2(self, a: int, b: int, c: int) -> CycNum:
        """Triangle coefficient Delta(a,b,c)^2 (twice-spin arguments)."""
        x, y, z = (a + b - c) // 2, (a - b + c) // 2, (-a + b + c) // 2
        den = self.qfact((a + b + c) // 2 + 1)
        if den.is_zero():
            raise ArithmeticError(f"vanishing q-factorial for triple {(a, b, c)}")
        return self.qfact(x) * self.qfact(y) * self.qfact(z) * den.inverse()

    def racah_sum(self, a, b, e, c, d, f) -> CycNum:
        """Single-sum part of the quantum Racah-Wigner symbol {a b e; c d f}."""
        alphas = ((a + b + e) // 2, (a + d + f) // 2, (c + b + f) // 2, (c + d + e) // 2)
        betas = ((a + b + c + d) // 2, (a + c + e + f) // 2, (b + d + e + f) // 2)
        total = self.zero
        for z in range(max(alphas), min(betas) + 1):
            den = self.one
            for al in alphas:
                den = den * self.qfact(z - al)
            for be in betas:
                den = den * self.qfact(be - z)
            if den.is_zero():
                raise ArithmeticError(f"vanishing q-factorial in 6j {(a, b, e, c, d, f)}")
            term = self.qfact(z + 1) * den.inverse()
            total = total - term if z % 2 else total + term
        return total

    def _fmove_ok(self, a, b, c, d, e, f) -> bool:
        return (
            self.admissible(a, b, e)
            and self.admissible(e, c, d)
            and self.admissible(b, c, f)
            and self.admissible(a, f, d)
        )

    def fmove(self, a: int, b: int, c: int, d: int, e: int, f: int) -> CycNum:
        """F^{abc}_d[e,f]: ((a b)_e c)_d -> (a (b c)_f)_d on splitting trees."""
        key = (a, b, c, d, e, f)
        v = self._fcache.get(key)
        if v is not None:
            return v
        if not self._fmove_ok(*key):
            v = self.zero
        else:
            v = self.qint(f + 1) * self.delta2(b, c, f) * self.delta2(a, f, d) * self.racah_sum(a, b, e, c, d, f)
            if ((a + b + c + d) // 2) % 2:
                v = -v
        with self._lock:
            self._fcache[key] = v
        return v

    def fmove_inv(self, a: int, b: int, c: int, d: int, f: int, e: int) -> CycNum:
        """(F^{abc}_d)^{-1}[f,e]."""
        key = (a, b, c, d, f, e)
        v = self._ficache.get(key)
        if v is not None:
            return v
        if not self._fmove_ok(a, b, c, d, e, f):
            v = self.zero
        else:
            v = self.qint(e + 1) * self.delta2(a, b, e) * self.delta2(e, c, d) * self.racah_sum(a, b, e, c, d, f)
            if ((a + b + c + d) // 2) % 2:
                v = -v
        with self._lock:
            self._ficache[key] = v
        return v

    def sixj(self, a: int, b: int, c: int, d: int, e: int, f: int) -> CycNum:
        """Gauge-fixed 6j symbol; equal to :meth:`fmove`."""
        return self.fmove(a, b, c, d, e, f)

    def sixj_squared(self, a: int, b: int, c: int, d: int, e: int, f: int) -> CycNum:
        """Square of the unitary 6j symbol F^{abc}_d[e,f] (gauge invariant)."""
        return self.fmove(a, b, c, d, e, f) * self.fmove_inv(a, b, c, d, f, e)

    # modular data

    def modular_data(self):
        return self.S, self.T

    def _verify_build(self) -> None:
        if self._qdim[0] != self.one or self._twist[0] != self.one:
            raise IdentityFailure("unit", (0,))
        for a in self.labels:
            if self._qdim[a].is_zero():
                raise IdentityFailure("qdim nonzero", (a,))
        if self.D * self.D != self.D2:
            raise IdentityFailure("D^2 = sum d^2", (self.k,))
        if self.D.to_complex().real <= 0:
            raise IdentityFailure("D positive", (self.k,))
        n = len(self.labels)
        S = self.S
        for a in range(n):
            for b in range(n):
                ss = sum((S[a][c] * S[c][b] for c in range(n)), self.zero)
                if ss != (self.one if a == b else self.zero):
                    raise IdentityFailure("S^2 = 1", (a, b))


_build_lock = threading.Lock()


@lru_cache(maxsize=None)
def _build(k: int) -> FusionData:
    return FusionData(k)


def build_fusion_data(k: int) -> FusionData:
    """Fully populated fusion tables at level k (cached)."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"level must be an integer >= 1, got {k!r}")
    with _build_lock:
        return _build(k)


# identity suites


def check_pentagon(fd: FusionData) -> int:
    L = fd.labels
    count = 0
    for a, b, c, d in product(L, repeat=4):
        for f in fd.fuse(a, b):
            for g in fd.fuse(f, c):
                for e in fd.fuse(g, d):
                    for l in fd.fuse(c, d):
                        for k in fd.fuse(b, l):
                            if not fd.admissible(a, k, e):
                                continue
                            lhs = fd.fmove(f, c, d, e, g, l) * fd.fmove(a, b, l, e, f, k)
                            rhs = fd.zero
                            for h in fd.fuse(b, c):
                                t = fd.fmove(a, b, c, g, f, h)
                                if t.is_zero():
                                    continue
                                rhs = rhs + t * fd.fmove(a, h, d, e, g, k) * fd.fmove(b, c, d, k, h, l)
                            if lhs != rhs:
                                raise IdentityFailure("pentagon", (a, b, c, d, e, f, g, k, l))
                            count += 1
    return count


def check_orthogonality(fd: FusionData) -> int:
    L = fd.labels
    count = 0
    for a, b, c, d in product(L, repeat=4):
        es = [e for e in L if fd.admissible(a, b, e) and fd.admissible(e, c, d)]
        fs = [f for f in L if fd.admissible(b, c, f) and fd.admissible(a, f, d)]
        for e in es:
            for e2 in es:
                s = sum((fd.fmove(a, b, c, d, e, f) * fd.fmove_inv(a, b, c, d, f, e2) for f in fs), fd.zero)
                if s != (fd.one if e == e2 else fd.zero):
                    raise IdentityFailure("6j orthogonality", (a, b, c, d, e, e2))
                count += 1
            # unitary rows have unit norm
            s = sum((fd.sixj_squared(a, b, c, d, e, f) for f in fs), fd.zero)
            if s != fd.one:
                raise IdentityFailure("6j unitarity", (a, b, c, d, e))
            count += 1
    return count


def check_character(fd: FusionData) -> int:
    count = 0
    for a in fd.labels:
        for b in fd.labels:
            rhs = sum((fd.qdim(c) for c in fd.fuse(a, b)), fd.zero)
            if fd.qdim(a) * fd.qdim(b) != rhs:
                raise IdentityFailure("character", (a, b))
            count += 1
    return count


def check_projector(fd: FusionData) -> int:
    count = 0
    for c in fd.labels:
        lhs = fd.zero
        for a in fd.labels:
            for b in fd.labels:
                if fd.admissible(a, b, c):
                    lhs = lhs + fd.qdim(a) * fd.qdim(b)
        if lhs != fd.D2 * fd.qdim(c):
            raise IdentityFailure("projector", (c,))
        count += 1
    return count


def check_s_unitarity(fd: FusionData) -> int:
    S = fd.S
    n = len(fd.labels)
    Sbar = [[x.conjugate() for x in row] for row in S]
    count = 0
    for a in range(n):
        if any(S[a][b] != S[b][a] for b in range(n)):
            raise IdentityFailure("S symmetric", (a,))
        for b in range(n):
            s = sum((S[a][c] * Sbar[b][c] for c in range(n)), fd.zero)
            if s != (fd.one if a == b else fd.zero):
                raise IdentityFailure("S unitarity", (a, b))
            count += 1
    return count


def check_verlinde(fd: FusionData) -> int:
    S = fd.S
    count = 0
    for a in fd.labels:
        for d in fd.labels:
            eig = S[a][d] * S[0][d].inverse()
            for b in fd.labels:
                lhs = sum((S[c][d] for c in fd.fuse(a, b)), fd.zero)
                if lhs != eig * S[b][d]:
                    raise IdentityFailure("Verlinde", (a, b, d))
                count += 1
    return count


def check_braiding(fd: FusionData) -> int:
    count = 0
    for a in fd.labels:
        for b in fd.labels:
            for c in fd.fuse(a, b):
                x = fd.lam_sqrt(a, b, c, 1)
                if fd.eps(a, b, c) < 0:
                    x = -x
                if x * x != fd.lam(a, b, c):
                    raise IdentityFailure("twist/braiding", (a, b, c))
                count += 1
    return count


def check_hexagon(fd: FusionData) -> int:
    count = 0
    for sign in (1, -1):
        R = lambda a, b, c: fd.braid_eigenvalue(a, b, c, sign)
        for a, b, c, d, e, g in product(fd.labels, repeat=6):
            if not (fd._fmove_ok(a, c, b, d, e, g) and fd.admissible(c, g, d)):
                continue
            lhs = R(c, a, e) * fd.fmove(a, c, b, d, e, g) * R(c, b, g)
            rhs = fd.zero
            for f in fd.fuse(a, b):
                if fd.admissible(f, c, d):
                    rhs = rhs + fd.fmove(c, a, b, d, e, f) * R(c, f, d) * fd.fmove(a, b, c, d, f, g)
            if lhs != rhs:
                raise IdentityFailure("hexagon", (a, b, c, d, e, g, sign))
            count += 1
    return count


SUITES = (
    ("pentagon", check_pentagon),
    ("orthogonality", check_orthogonality),
    ("character", check_character),
    ("projector", check_projector),
    ("s-unitarity", check_s_unitarity),
    ("verlinde", check_verlinde),
    ("braiding", check_braiding),
    ("hexagon", check_hexagon),
)


def identity_suites(fd: FusionData):
    """Yield (name, number of checks); raises IdentityFailure on the first failure."""
    for name, fn in SUITES:
        yield name, fn(fd)
