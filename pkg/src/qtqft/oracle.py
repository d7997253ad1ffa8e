"""Brute-force cross-checks: explicit U_q(sl2) matrices and the Kauffman bracket.

Nothing here uses 6j symbols; values are computed from representation
matrices or from state sums over crossing smoothings.  Only for tests and
the developer CLI.
"""
from __future__ import annotations

from .blocks import MorseWord, Trace, trace_word
from .cyclo import CycNum
from .fusion import FusionData, build_fusion_data

MAX_SPIN2 = 3  # twice-spin cap for representation matrices
MAX_CROSSINGS = 12

Matrix = list  # list of rows of CycNum


def _zeros(fd, n, m):
    return [[fd.zero] * m for _ in range(n)]


def matmul(fd: FusionData, A: Matrix, B: Matrix) -> Matrix:
    n, m, p = len(A), len(B), len(B[0])
    out = _zeros(fd, n, p)
    for i in range(n):
        row = A[i]
        for t in range(m):
            x = row[t]
            if x:
                Bt = B[t]
                for j in range(p):
                    if Bt[j]:
                        out[i][j] = out[i][j] + x * Bt[j]
    return out


def kron(fd: FusionData, A: Matrix, B: Matrix) -> Matrix:
    n, m = len(B), len(B[0])
    out = _zeros(fd, len(A) * n, len(A[0]) * m)
    for i, row in enumerate(A):
        for j, x in enumerate(row):
            if x:
                for k in range(n):
                    for l in range(m):
                        if B[k][l]:
                            out[i * n + k][j * m + l] = x * B[k][l]
    return out


def madd(A: Matrix, B: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def identity(fd: FusionData, n: int) -> Matrix:
    return [[fd.one if i == j else fd.zero for j in range(n)] for i in range(n)]


def _check_spin(fd: FusionData, a: int) -> None:
    fd.check_label(a)
    if a > MAX_SPIN2:
        raise ValueError(f"oracle supports spins up to 3/2, got twice-spin {a}")
    # divided powers of E and F need [n]! != 0 for n <= a
    if fd.qfact(a).is_zero():
        raise ArithmeticError(f"vanishing q-factorial for spin {a}/2 at level {fd.k}")


def rep_matrices(fd: FusionData, a: int) -> tuple[Matrix, Matrix, Matrix]:
    """E, F, K on the spin-a/2 module; basis e_i has K-weight q^(a-2i)."""
    _check_spin(fd, a)
    n = a + 1
    E, F, K = _zeros(fd, n, n), _zeros(fd, n, n), _zeros(fd, n, n)
    for i in range(n):
        K[i][i] = fd.xi(4 * (a - 2 * i))
        if i > 0:
            E[i - 1][i] = fd.qint(a - i + 1)
        if i < a:
            F[i + 1][i] = fd.qint(i + 1)
    return E, F, K


def check_relations(fd: FusionData, a: int) -> bool:
    E, F, K = rep_matrices(fd, a)
    n = a + 1
    Kinv = [[K[i][j].inverse() if K[i][j] else fd.zero for j in range(n)] for i in range(n)]
    q2 = fd.q * fd.q
    KEK = matmul(fd, matmul(fd, K, E), Kinv)
    KFK = matmul(fd, matmul(fd, K, F), Kinv)
    ok = all(KEK[i][j] == q2 * E[i][j] for i in range(n) for j in range(n))
    ok &= all(KFK[i][j] == q2.inverse() * F[i][j] for i in range(n) for j in range(n))
    EF, FE = matmul(fd, E, F), matmul(fd, F, E)
    c = (fd.q - fd.q.inverse()).inverse()
    ok &= all(EF[i][j] - FE[i][j] == (K[i][j] - Kinv[i][j]) * c for i in range(n) for j in range(n))
    return ok


def coproduct(fd: FusionData, a: int, b: int) -> tuple[Matrix, Matrix, Matrix]:
    """Delta(E) = E x K + 1 x E, Delta(F) = F x 1 + K^-1 x F, Delta(K) = K x K."""
    Ea, Fa, Ka = rep_matrices(fd, a)
    Eb, Fb, Kb = rep_matrices(fd, b)
    Kainv = [[x.inverse() if x else fd.zero for x in row] for row in Ka]
    Ia, Ib = identity(fd, a + 1), identity(fd, b + 1)
    dE = madd(kron(fd, Ea, Kb), kron(fd, Ia, Eb))
    dF = madd(kron(fd, Fa, Ib), kron(fd, Kainv, Fb))
    dK = kron(fd, Ka, Kb)
    return dE, dF, dK


def r_matrix(fd: FusionData, a: int, b: int) -> Matrix:
    """R = q^(H x H / 2) sum_n q^(n(n-1)/2) (q - q^-1)^n / [n]! E^n x F^n on V_a x V_b."""
    Ea, _, _ = rep_matrices(fd, a)
    _, Fb, _ = rep_matrices(fd, b)
    na, nb = a + 1, b + 1
    total = _zeros(fd, na * nb, na * nb)
    En, Fn = identity(fd, na), identity(fd, nb)
    qq = fd.q - fd.q.inverse()
    for n in range(min(a, b) + 1):
        if n:
            En, Fn = matmul(fd, Ea, En), matmul(fd, Fb, Fn)
        coef = fd.xi(2 * n * (n - 1)) * qq**n * fd.qfact(n).inverse()
        term = kron(fd, En, Fn)
        total = madd(total, [[x * coef for x in row] for row in term])
    # Cartan part: q^(m_i m_j / 2) = xi^(2 m_i m_j)
    out = _zeros(fd, na * nb, na * nb)
    for row in range(na * nb):
        i, j = divmod(row, nb)
        ph = fd.xi(2 * (a - 2 * i) * (b - 2 * j))
        for col in range(na * nb):
            if total[row][col]:
                out[row][col] = ph * total[row][col]
    return out


def braid_matrix(fd: FusionData, a: int, b: int) -> Matrix:
    """P o R : V_a x V_b -> V_b x V_a."""
    R = r_matrix(fd, a, b)
    na, nb = a + 1, b + 1
    out = _zeros(fd, na * nb, na * nb)
    for row in range(na * nb):
        i, j = divmod(row, nb)
        out[j * na + i] = R[row]
    return out


def nullspace(fd: FusionData, A: Matrix, ncols: int) -> list[list[CycNum]]:
    """Basis of {x : A x = 0} by Gaussian elimination."""
    rows = [r[:] for r in A if any(r)]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [fd.zero] * ncols
        v[fcol] = fd.one
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fcol]
        basis.append(v)
    return basis


def highest_weight_vector(fd: FusionData, a: int, b: int, c: int) -> list[CycNum]:
    """Highest-weight vector of channel c in V_a x V_b, coefficient 1 on e_0 x (.)."""
    if not fd.admissible(a, b, c):
        raise ValueError(f"inadmissible triple {(a, b, c)}")
    dE, _, _ = coproduct(fd, a, b)
    nb = b + 1
    idx = [r for r in range((a + 1) * nb) if (a - 2 * (r // nb)) + (b - 2 * (r % nb)) == c]
    sub = [[dE[row][col] for col in idx] for row in range(len(dE))]
    ker = nullspace(fd, sub, len(idx))
    if len(ker) != 1:
        raise ArithmeticError(f"highest-weight space of {(a, b, c)} has dimension {len(ker)}")
    v = ker[0]
    lead = next(x for x in v if x)
    v = [x * lead.inverse() for x in v]
    full = [fd.zero] * ((a + 1) * nb)
    for r, x in zip(idx, v):
        full[r] = x
    return full


def cg_coefficients(fd: FusionData, a: int, b: int, c: int) -> Matrix:
    """Intertwiner V_c -> V_a x V_b as a ((a+1)(b+1)) x (c+1) matrix."""
    top = highest_weight_vector(fd, a, b, c)
    _, dF, _ = coproduct(fd, a, b)
    cols = [top]
    for i in range(c):
        v = cols[-1]
        w = [sum((dF[r][s] * v[s] for s in range(len(v)) if v[s] and dF[r][s]), fd.zero) for r in range(len(v))]
        # F e_i = [i+1] e_{i+1} on V_c
        inv = fd.qint(i + 1).inverse()
        cols.append([x * inv for x in w])
    return [[cols[j][r] for j in range(c + 1)] for r in range(len(top))]


def _apply(M: Matrix, v: list, fd) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), fd.zero) for row in M]


def _pr_ratio(fd: FusionData, a: int, b: int, c: int) -> CycNum:
    v = highest_weight_vector(fd, a, b, c)
    u = highest_weight_vector(fd, b, a, c)
    w = _apply(braid_matrix(fd, a, b), v, fd)
    i = next(j for j, x in enumerate(u) if x)
    mu = w[i] * u[i].inverse()
    for x, y in zip(w, u):
        if x != mu * y:
            raise ArithmeticError(f"P R does not map channel {c} of {(a, b)} onto channel {c} of {(b, a)}")
    return mu


def _root_of_unity_sqrt(fd: FusionData, x: CycNum) -> CycNum:
    for e in range(fd.order):
        z = fd.xi(e)
        if z * z == x:
            return z
    raise ArithmeticError("not a square of a root of unity")


def braid_eigen(fd: FusionData, a: int, b: int) -> dict[int, CycNum]:
    """Eigenvalue of P R on each channel c of V_a x V_b.

    For a = b this is the honest eigenvalue.  For a != b the two highest-weight
    vectors are first rephased by q^((a(c-a) - b(c-b))/2), undoing the
    asymmetry of the coproduct, and the eigenvalue is the unit-modulus square
    root of the monodromy whose ratio to the rephased map is positive.
    """
    _check_spin(fd, a)
    _check_spin(fd, b)
    out = {}
    for c in fd.fuse(a, b):
        mu = _pr_ratio(fd, a, b, c)
        if a == b:
            out[c] = mu
            continue
        mono = mu * _pr_ratio(fd, b, a, c)
        s = _root_of_unity_sqrt(fd, mono)
        rephased = mu * fd.xi(2 * (a * (c - a) - b * (c - b)))
        picks = []
        for cand in (s, -s):
            ratio = rephased * cand.inverse()
            if ratio == ratio.conjugate() and ratio.to_complex().real > 0:
                picks.append(cand)
        if len(picks) != 1:
            raise ArithmeticError(f"no unique balanced eigenvalue for {(a, b, c)}")
        out[c] = picks[0]
    return out


def monodromy(fd: FusionData, a: int, b: int, c: int) -> CycNum:
    """Gauge-invariant (P R)_{ba} (P R)_{ab} on channel c."""
    return _pr_ratio(fd, a, b, c) * _pr_ratio(fd, b, a, c)


# Kauffman bracket


def kauffman_bracket(w: MorseWord, fd: FusionData | None = None, trace: Trace | None = None) -> CycNum:
    """<L> with A = q^(1/2), loop value -A^2 - A^-2 and <unknot> = loop value."""
    if fd is None:
        fd = build_fusion_data(w.level)
    tr = trace if trace is not None else trace_word(w)
    if not tr.closed:
        raise ValueError("open diagram")
    base_pairs: list[tuple[int, int]] = []
    xs: list[tuple[str, tuple, tuple]] = []
    segs: set[int] = set()
    for op in tr.ops:
        if op.kind in ("birth",):
            base_pairs.append(op.segs_out)
        elif op.kind == "death":
            base_pairs.append(op.segs_in)
        elif op.kind == "coupon":
            raise ValueError("coupons are not supported by the bracket")
        elif op.kind in ("X+", "X-"):
            xs.append((op.kind, op.segs_in, op.segs_out))
        segs.update(op.segs_in)
        segs.update(op.segs_out)
        if op.kind == "birth" and tr.comp_color[tr.seg_comp[op.segs_out[0]]] != 1:
            raise ValueError("bracket needs every strand colored 1 (spin 1/2)")
    if len(xs) > MAX_CROSSINGS:
        raise ValueError(f"more than {MAX_CROSSINGS} crossings")
    A = fd.xi(2)
    Ainv = A.inverse()
    delta = -(A * A) - Ainv * Ainv
    seg_list = sorted(segs)
    total = fd.zero
    for mask in range(1 << len(xs)):
        parent = {s: s for s in seg_list}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for s1, s2 in base_pairs:
            union(s1, s2)
        na = 0
        for bit, (kind, (li, ri), (lo, ro)) in enumerate(xs):
            use_a = not (mask >> bit) & 1
            vertical = use_a if kind == "X+" else not use_a
            if vertical:
                union(li, lo)
                union(ri, ro)
            else:
                union(li, ri)
                union(lo, ro)
            na += use_a
        loops = len({find(s) for s in seg_list})
        nb = len(xs) - na
        total = total + A ** (na - nb) * delta**loops
    return total


def rt_spin_half(w: MorseWord, fd: FusionData | None = None) -> CycNum:
    """Blackboard-framed spin-1/2 invariant (-1)^(c + w) <L>."""
    if fd is None:
        fd = build_fusion_data(w.level)
    tr = trace_word(w)
    val = kauffman_bracket(w, fd, tr)
    wr = sum(x.writhe for x in tr.crossings)
    return -val if (tr.n_components + wr) % 2 else val
