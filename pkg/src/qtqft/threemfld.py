"""3-manifold invariants from surgery links, Heegaard words and triangulations.

All invariants are normalized so that S^3 gives 1 and S^2 x S^1 gives D.
"""
from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .blocks import (
    OMEGA,
    Block,
    MorseWord,
    MorseWordError,
    Trace,
    evaluate_word,
    sphere_norm,
    trace_word,
)
from .cyclo import CycNum
from .fusion import FusionData, build_fusion_data

__all__ = [
    "FramedSurgeryLink",
    "HeegaardDiagram",
    "SimplicialComplex3",
    "signature",
    "surgery_invariant",
    "surgery_sums",
    "heegaard_invariant",
    "modular_value",
    "twist_link",
    "parse_heegaard",
    "parse_surgery",
    "parse_triangulation",
    "canonical_thickening",
    "triangulation_invariant",
    "singer_move_check",
    "SingerMove",
    "modular_to_twists",
    "reduce_twists",
    "reverse_component",
    "Thickening",
]


# linear algebra over Q

def signature(M: Sequence[Sequence[int]]) -> int:
    """Signature of a symmetric integer matrix (exact congruence diagonalization)."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    for i in range(n):
        for j in range(n):
            if A[i][j] != A[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    idx = list(range(n))
    while idx:
        p = next((i for i in idx if A[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in idx for j in idx if i < j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes a nonzero diagonal entry (or use i - j)
            s = 1 if A[i][i] + 2 * A[i][j] + A[j][j] != 0 else -1
            for t in range(n):
                A[i][t] += s * A[j][t]
            for t in range(n):
                A[t][i] += s * A[t][j]
            p = i
        d = A[p][p]
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(p)
        for i in idx:
            if A[i][p] != 0:
                f = A[i][p] / d
                for t in range(n):
                    A[i][t] -= f * A[p][t]
                for t in range(n):
                    A[t][i] -= f * A[t][p]
    return pos - neg


# surgery

@dataclass
class FramedSurgeryLink:
    word: MorseWord
    framings: tuple[int, ...]

    def __post_init__(self):
        tr = trace_word(self.word)
        if not tr.closed:
            raise MorseWordError("surgery link has an open component")
        if len(self.framings) != tr.n_components:
            raise MorseWordError(
                f"{tr.n_components} components but {len(self.framings)} framings"
            )
        self.trace = tr

    @property
    def n_components(self) -> int:
        return self.trace.n_components

    def linking_matrix(self) -> list[list[int]]:
        return self.trace.linking_matrix(self.framings)

    def mirror(self) -> "FramedSurgeryLink":
        return FramedSurgeryLink(self.word.mirror(), tuple(-f for f in self.framings))


def _threads() -> int:
    env = os.environ.get("QTQFT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def surgery_sums(L: FramedSurgeryLink, fd: FusionData, threads: int | None = None) -> CycNum:
    """F(L) = sum over colorings of prod [d_c] times the framed RT value."""
    tr = L.trace
    n = tr.n_components
    if n == 0:
        return fd.one
    corr = [r - tr.writhe(i) for i, r in enumerate(L.framings)]
    colors = [OMEGA] * n
    norm = sphere_norm(fd, tr)
    nthreads = _threads() if threads is None else threads

    def part(c):
        return evaluate_word(L.word, fd, trace=tr, comp_colors=colors, framing_corr=corr, restrict={0: c})

    if nthreads <= 1:
        parts = [part(c) for c in fd.labels]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            parts = list(ex.map(part, fd.labels))
    total = fd.zero
    for v in parts:  # fixed order keeps the reduction deterministic
        total = total + v
    return total * norm


def surgery_invariant(L: FramedSurgeryLink, fd: FusionData | None = None, threads: int | None = None) -> CycNum:
    """D^-n kappa^-sigma F(L); S^3 -> 1, S^2 x S^1 -> D."""
    if fd is None:
        fd = build_fusion_data(L.word.level)
    n = L.n_components
    sig = signature(L.linking_matrix()) if n else 0
    F = surgery_sums(L, fd, threads)
    return F * fd.D.inverse() ** n * fd.kappa ** (-sig)


def parse_surgery(text: str) -> FramedSurgeryLink:
    from .blocks import parse_morse_word

    w = parse_morse_word(text)
    if w.framings is None:
        raise MorseWordError("missing 'framings' line")
    return FramedSurgeryLink(w, w.framings)


# genus-1 modular words

_TOKEN = re.compile(r"(S|T)(?:\^(-?\d+))?$")


def _parse_modular(tokens: Sequence[str]) -> list[tuple[str, int]]:
    out = []
    for t in tokens:
        m = _TOKEN.match(t)
        if not m:
            raise ValueError(f"bad modular generator {t!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) else 1))
    return out


def _modular_normal_form(word: list[tuple[str, int]]) -> list[int] | None:
    """T-exponents between consecutive S's; None if there is no S at all."""
    nS = sum(e for g, e in word if g == "S")
    # S^2 acts trivially on the 00 entry (self-dual labels), S^-1 = S
    seq: list = []
    for g, e in word:
        if g == "S":
            seq.extend(["S"] * abs(e))
        else:
            seq.append(e)
    s_pos = [i for i, x in enumerate(seq) if x == "S"]
    if not s_pos:
        return None
    exps = []
    acc = 0
    started = False
    for x in seq:
        if x == "S":
            if started:
                exps.append(acc)
            started = True
            acc = 0
        elif started:
            acc += x
    return exps


def modular_value(fd: FusionData, tokens: Sequence[str]) -> CycNum:
    """Genus-1 value D rho(w)_00 kappa^-sigma with rho(S) = S, rho(T) = diag(v)."""
    word = _parse_modular(tokens)
    exps = _modular_normal_form(word)
    if exps is None:
        return fd.D
    # rho(w)_00 for w = S T^a1 S ... T^am S (outer T powers act trivially on 0)
    S = fd.S
    L = fd.labels
    vec = [S[0][b] for b in L]
    for a in exps:
        vec = [vec[b] * fd.twist(b) ** a for b in L]
        vec = [sum((vec[b] * S[b][c] for b in L), fd.zero) for c in L]
    rho00 = vec[0]
    m = len(exps)
    if m == 0:
        return fd.D * rho00
    Q = [[0] * m for _ in range(m)]
    for i, a in enumerate(exps):
        Q[i][i] = a
        if i + 1 < m:
            Q[i][i + 1] = Q[i + 1][i] = 1
    return fd.D * rho00 * fd.kappa ** (-signature(Q))


# standard surface curves and the polygon sweep

Point = tuple  # (x, y, z) Fractions


def _F(x) -> Fraction:
    return Fraction(x)


def standard_curve(kind: str, i: int, h: Fraction, genus: int) -> list[Point]:
    """Curve on the boundary of the thickened planar region, pushed out by h.

    The region is [-3, 4g-1] x [-3, 3] minus unit squares centred at (4i, 0);
    the surface is its boundary after thickening to z in [-1, 1].
      a_i  meridian of the bar below hole i
      b_i  square around hole i on the top face
      c_i  meridian of the bar between holes i and i+1
      e_i  loop around holes i and i+1 on the top face
    """
    h = _F(h)
    one = _F(1)
    if kind == "a":
        if not 0 <= i < genus:
            raise ValueError(f"no curve a{i + 1} at genus {genus}")
        x = _F(4 * i)
        return [(x, -one + h, one + h), (x, -3 - h, one + h), (x, -3 - h, -one - h), (x, -one + h, -one - h)]
    if kind == "b":
        if not 0 <= i < genus:
            raise ValueError(f"no curve b{i + 1} at genus {genus}")
        r = Fraction(3, 2) + h
        cx = _F(4 * i)
        z = one + h
        return [(cx - r, -r, z), (cx + r, -r, z), (cx + r, r, z), (cx - r, r, z)]
    if kind == "c":
        if not 0 <= i < genus - 1:
            raise ValueError(f"no curve c{i + 1} at genus {genus}")
        x0, x1 = _F(4 * i + 1) - h, _F(4 * i + 3) + h
        y = _F(0)
        return [(x0, y, one + h), (x1, y, one + h), (x1, y, -one - h), (x0, y, -one - h)]
    if kind == "e":
        if not 0 <= i < genus - 1:
            raise ValueError(f"no curve e{i + 1} at genus {genus}")
        r = Fraction(3, 2) + h
        z = one + h
        return [(4 * i - r, -r, z), (4 * i + 4 + r, -r, z), (4 * i + 4 + r, r, z), (4 * i - r, r, z)]
    raise ValueError(f"unknown curve kind {kind!r}")


_SHEARS = [
    (Fraction(1, 7), Fraction(2, 11), Fraction(3, 13)),
    (Fraction(2, 9), Fraction(1, 5), Fraction(1, 17)),
    (Fraction(3, 19), Fraction(4, 23), Fraction(2, 29)),
    (Fraction(5, 31), Fraction(3, 37), Fraction(4, 41)),
]


class _Degenerate(Exception):
    pass


def _project(pts, shear):
    al, be, ga = shear
    return [(x + al * z + ga * y, y + be * z, z) for x, y, z in pts]


def _seg_cross(p1, p2, q1, q2):
    """Proper crossing of segments in the (t, p) plane; returns (t, zp, zq, dp, dq)."""
    (t1, s1, z1), (t2, s2, z2) = p1, p2
    (u1, r1, w1), (u2, r2, w2) = q1, q2
    dx1, dy1 = t2 - t1, s2 - s1
    dx2, dy2 = u2 - u1, r2 - r1
    den = dx1 * dy2 - dy1 * dx2
    if den == 0:
        # parallel; collinear overlap is degenerate
        if (u1 - t1) * dy1 - (r1 - s1) * dx1 == 0:
            lo1, hi1 = sorted((t1, t2))
            lo2, hi2 = sorted((u1, u2))
            if max(lo1, lo2) <= min(hi1, hi2):
                raise _Degenerate
        return None
    a = ((u1 - t1) * dy2 - (r1 - s1) * dx2) / den
    b = ((u1 - t1) * dy1 - (r1 - s1) * dx1) / den
    if a < 0 or a > 1 or b < 0 or b > 1:
        return None
    if a in (0, 1) or b in (0, 1):
        raise _Degenerate
    t = t1 + a * dx1
    return t, z1 + a * (z2 - z1), w1 + b * (w2 - w1), (dx1, dy1), (dx2, dy2)


def linking_number(P: list[Point], Q: list[Point]) -> int:
    """Linking number of two disjoint closed polygons."""
    for shear in _SHEARS:
        try:
            return _linking(P, Q, shear)
        except _Degenerate:
            continue
    raise ValueError("could not find a generic projection")


def _linking(P, Q, shear) -> int:
    A, B = _project(P, shear), _project(Q, shear)
    total = 0
    for i in range(len(A)):
        p1, p2 = A[i], A[(i + 1) % len(A)]
        for j in range(len(B)):
            q1, q2 = B[j], B[(j + 1) % len(B)]
            x = _seg_cross(p1, p2, q1, q2)
            if x is None:
                continue
            _, zp, zq, dp, dq = x
            if zp == zq:
                raise _Degenerate
            over, under = (dp, dq) if zp > zq else (dq, dp)
            cr = over[0] * under[1] - over[1] * under[0]
            total += 1 if cr > 0 else -1
    if total % 2:
        raise _Degenerate
    return total // 2


def polygons_to_word(
    polys: Sequence[list[Point]], level: int, colors: Sequence[int] | None = None
) -> tuple[MorseWord, list[int]]:
    """Sweep closed polygons in R^3 into a closed Morse word on one sphere.

    Also returns, for each component of the word, the index of its polygon.
    """
    for shear in _SHEARS:
        try:
            return _sweep(polys, level, colors, shear)
        except _Degenerate:
            continue
    raise ValueError("could not find a generic projection")


def _sweep(polys, level, colors, shear):
    proj = [_project(P, shear) for P in polys]
    edges = []  # (comp, index, start point, end point) with start/end in polygon order
    for c, P in enumerate(proj):
        for i in range(len(P)):
            edges.append((c, i, P[i], P[(i + 1) % len(P)]))
    # vertex times must be distinct and no edge may be parallel to the sweep line
    times = [v[0] for P in proj for v in P]
    if len(set(times)) != len(times):
        raise _Degenerate
    for _, _, a, b in edges:
        if a[0] == b[0]:
            raise _Degenerate
    events = []  # (t, kind, data)
    for c, P in enumerate(proj):
        n = len(P)
        for i in range(n):
            prev_e = (c, (i - 1) % n)
            next_e = (c, i)
            events.append((P[i][0], 0, (c, i, prev_e, next_e)))
    for e1, e2 in combinations(edges, 2):
        if e1[0] == e2[0] and (abs(e1[1] - e2[1]) in (1, len(proj[e1[0]]) - 1)):
            continue  # adjacent edges of one polygon meet only at their vertex
        x = _seg_cross(e1[2], e1[3], e2[2], e2[3])
        if x is None:
            continue
        t, z1, z2, _, _ = x
        if z1 == z2:
            raise _Degenerate
        events.append((t, 1, ((e1[0], e1[1]), (e2[0], e2[1]), z1, z2)))
    events.sort(key=lambda e: e[0])
    ts = [e[0] for e in events]
    if len(set(ts)) != len(ts):
        raise _Degenerate
    edge_pts = {(c, i): (a, b) for c, i, a, b in edges}

    def p_at(e, t):
        a, b = edge_pts[e]
        lo, hi = (a, b) if a[0] < b[0] else (b, a)
        return lo[1] + (hi[1] - lo[1]) * (t - lo[0]) / (hi[0] - lo[0])

    def slope(e):
        a, b = edge_pts[e]
        return (b[1] - a[1]) / (b[0] - a[0])

    if colors is None:
        colors = [1] * len(polys)
    active: list = []
    first_seen: list[int] = []
    slices: list[list[Block]] = [[Block("cup")]]
    for t, kind, data in events:
        if kind == 0:
            c, i, e_prev, e_next = data
            v = proj[c][i]
            other_prev = edge_pts[e_prev][0]  # start of the previous edge
            other_next = edge_pts[e_next][1]
            prev_later = other_prev[0] > t
            next_later = other_next[0] > t
            if prev_later and next_later:
                k = sum(1 for e in active if p_at(e, t) < v[1])
                pair = sorted([e_prev, e_next], key=slope)
                active[k:k] = pair
                if c not in first_seen:
                    first_seen.append(c)
                slices.append([Block("birth", (len(active), k + 1, colors[c], 0))])
            elif not prev_later and not next_later:
                k1, k2 = active.index(e_prev), active.index(e_next)
                if abs(k1 - k2) != 1:
                    raise _Degenerate
                k = min(k1, k2)
                slices.append([Block("death", (len(active), k + 1))])
                del active[k : k + 2]
            else:
                old, new = (e_prev, e_next) if next_later else (e_next, e_prev)
                active[active.index(old)] = new
        else:
            e1, e2, z1, z2 = data
            k1, k2 = active.index(e1), active.index(e2)
            if abs(k1 - k2) != 1:
                raise _Degenerate
            k = min(k1, k2)
            left_z = z1 if k1 == k else z2
            right_z = z2 if k1 == k else z1
            # with position horizontal and time vertical, the viewer sits at z = -infinity
            over_left = left_z < right_z
            slices.append([Block("X+" if over_left else "X-", (len(active), k + 1))])
            active[k], active[k + 1] = active[k + 1], active[k]
    if active:
        raise _Degenerate
    slices.append([Block("cap")])
    return MorseWord(level, slices), first_seen


# Heegaard diagrams

@dataclass
class HeegaardDiagram:
    """genus 1: ``word`` holds modular generators; genus >= 2: Dehn twists.

    A twist is (kind, index, exponent) with kind in a/b/c/e and 0-based index.
    """

    genus: int
    word: list = field(default_factory=list)
    modular: bool = False

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be >= 1")


_TWIST = re.compile(r"twist\(([abce])(\d+)\)(?:\^(-?\d+))?$")


def parse_twists(tokens: Sequence[str]) -> list[tuple[str, int, int]]:
    out = []
    for t in tokens:
        m = _TWIST.match(t)
        if not m:
            raise ValueError(f"bad twist {t!r}")
        idx = int(m.group(2))
        if idx < 1:
            raise ValueError(f"curve indices start at 1: {t!r}")
        e = int(m.group(3)) if m.group(3) else 1
        if e:
            out.append((m.group(1), idx - 1, e))
    return out


def parse_heegaard(text: str) -> tuple[int, HeegaardDiagram]:
    level = None
    genus = None
    tokens: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "qtqft-format":
            if rest.strip() != "1":
                raise MorseWordError(f"unsupported format version {rest.strip()!r}", lineno, 1)
        elif head == "level":
            level = int(rest)
        elif head == "genus":
            genus = int(rest)
        elif head == "word":
            tokens.extend(rest.split())
        else:
            raise MorseWordError(f"unknown directive {head!r}", lineno, 1)
    if level is None:
        raise MorseWordError("missing 'level' header", 1, 1)
    if genus is None:
        raise MorseWordError("missing 'genus' line", 1, 1)
    try:
        modular = bool(tokens) and all(_TOKEN.match(t) for t in tokens)
        if modular or (genus == 1 and not tokens):
            if genus != 1:
                raise ValueError("modular words are only defined at genus 1")
            _parse_modular(tokens)
            return level, HeegaardDiagram(1, list(tokens), modular=True)
        return level, HeegaardDiagram(genus, parse_twists(tokens))
    except ValueError as e:
        raise MorseWordError(str(e)) from None


# twist word -> surgery link; sign conventions fixed by genus-1 coherence
TWIST_FRAMING_SIGN = -1  # framing = surface framing + sign * exponent sign


def twist_link(
    genus: int,
    twists: Sequence[tuple[str, int, int]],
    level: int,
    extra: Sequence[tuple[str, int]] = (),
) -> FramedSurgeryLink:
    """Surgery link of a product of Dehn twists on the standard genus-g surface.

    Twist j is pushed off to height h_j (increasing along the word) and framed
    by its surface framing shifted by -1 per positive twist.  ``extra`` curves
    keep their surface framing and are pushed off below every twist, so they
    link the twist curves that pass over them.
    """
    items = [(kind, i, None) for kind, i in extra]
    for kind, i, e in twists:
        for _ in range(abs(e)):
            items.append((kind, i, 1 if e > 0 else -1))
    if not items:
        return FramedSurgeryLink(MorseWord(level, []), ())
    step = Fraction(1, 4 * (len(items) + 1))
    polys = []
    framings = []
    for j, (kind, i, s) in enumerate(items):
        h = step * (2 * j + 1)
        P = standard_curve(kind, i, h, genus)
        sf = linking_number(P, standard_curve(kind, i, h + step / 2, genus))
        polys.append(P)
        framings.append(sf if s is None else sf + TWIST_FRAMING_SIGN * s)
    w, order = polygons_to_word(polys, level, [0] * len(polys))
    return FramedSurgeryLink(w, tuple(framings[p] for p in order))


def heegaard_invariant(d: HeegaardDiagram, fd: FusionData, threads: int | None = None) -> CycNum:
    if d.modular:
        return modular_value(fd, d.word)
    L = twist_link(d.genus, d.word, fd.k)
    return surgery_invariant(L, fd, threads)


def reduce_twists(twists: Sequence[tuple[str, int, int]]) -> list[tuple[str, int, int]]:
    """Merge neighbouring twists along the same curve and drop trivial ones."""
    out: list[tuple[str, int, int]] = []
    for kind, i, e in twists:
        if out and out[-1][:2] == (kind, i):
            e += out.pop()[2]
        if e:
            out.append((kind, i, e))
    return out


def modular_to_twists(tokens: Sequence[str]) -> list[tuple[str, int, int]]:
    """Twist word on the first handle describing the same manifold as a modular word.

    Under tau_a -> T and tau_b -> L^-1 (L lower unitriangular) the modular word w
    is the twist product followed by S, and S^-1 = tau_a tau_b tau_a.
    """
    s_fwd = [("a", 0, -1), ("b", 0, -1), ("a", 0, -1)]
    s_inv = [("a", 0, 1), ("b", 0, 1), ("a", 0, 1)]
    out: list[tuple[str, int, int]] = []
    for g, e in _parse_modular(tokens):
        if g == "T":
            out.append(("a", 0, e))
        else:
            out.extend((s_fwd if e > 0 else s_inv) * abs(e))
    return reduce_twists(out + s_inv)


@dataclass(frozen=True)
class SingerMove:
    """kind: 'inversion' (reverse surgery component ``index``), 'composition'
    (replace y1, y2 by y1#y2, y2 with y-curves inserted as 0-framed Kirby-colored
    curves) or 'stabilization' (add a handle)."""

    kind: str
    index: int = 0


def reverse_component(w: MorseWord, tr: Trace, c: int) -> MorseWord:
    """Same link with component c traversed backwards."""
    opi = tr.comp_first_birth[c]
    op = tr.ops[opi]
    up = tr.seg_orient[op.segs_out[0]]
    slices = [list(sl) for sl in w.slices]
    for sl in slices:
        for j, b in enumerate(sl):
            if b is op.block:
                n, k, a = b.args[:3]
                sl[j] = Block("birth", (n, k, a, -up), b.line, b.col, b.same)
                return MorseWord(w.level, slices, w.palette, w.framings)
    raise RuntimeError("birth block not found")


def singer_move_check(
    d: HeegaardDiagram, move: SingerMove, fd: FusionData, threads: int | None = None
) -> tuple[CycNum, CycNum]:
    """(invariant before, invariant after) for an elementary move on d."""
    if move.kind == "stabilization":
        before = heegaard_invariant(d, fd, threads)
        if d.modular:
            after_word = modular_to_twists(d.word)
            genus = 2
        else:
            genus = d.genus + 1
            after_word = [("a", genus - 1, 1)] + list(d.word)
        L = twist_link(genus, after_word, fd.k)
        return before, surgery_invariant(L, fd, threads)
    twists = modular_to_twists(d.word) if d.modular else list(d.word)
    if move.kind == "inversion":
        L = twist_link(d.genus, twists, fd.k)
        n = L.n_components
        if not 0 <= move.index < n:
            raise ValueError(f"no component {move.index} (link has {n})")
        w2 = reverse_component(L.word, L.trace, move.index)
        L2 = FramedSurgeryLink(w2, L.framings)
        return surgery_invariant(L, fd, threads), surgery_invariant(L2, fd, threads)
    if move.kind == "composition":
        if d.genus < 2:
            raise ValueError("composition needs genus >= 2")
        i = move.index
        if not 0 <= i < d.genus - 1:
            raise ValueError(f"no neighbouring handles {i + 1}, {i + 2}")
        L1 = twist_link(d.genus, twists, fd.k, extra=[("b", i), ("b", i + 1)])
        L2 = twist_link(d.genus, twists, fd.k, extra=[("e", i), ("b", i + 1)])
        return surgery_invariant(L1, fd, threads), surgery_invariant(L2, fd, threads)
    raise ValueError(f"unknown Singer move {move.kind!r}")


# triangulations

@dataclass
class SimplicialComplex3:
    """Closed orientable simplicial 3-manifold given by its tetrahedra."""

    tets: list[tuple[int, ...]]
    lines: list[int] = field(default_factory=list)  # source line of each tetrahedron
    level: int | None = None  # optional level carried by the input file

    def __post_init__(self):
        self.tets = [tuple(t) for t in self.tets]
        if not self.lines:
            self.lines = [0] * len(self.tets)
        self._validate()

    def _err(self, msg: str, i: int) -> MorseWordError:
        return MorseWordError(f"tetrahedron {self.tets[i]}: {msg}", self.lines[i], 1)

    def _validate(self):
        if not self.tets:
            raise MorseWordError("empty complex")
        seen = {}
        for i, t in enumerate(self.tets):
            if len(t) != 4 or len(set(t)) != 4:
                raise self._err("needs four distinct vertices", i)
            key = frozenset(t)
            if key in seen:
                raise self._err(f"repeats tetrahedron on line {self.lines[seen[key]]}", i)
            seen[key] = i
        faces: dict[frozenset, list[int]] = {}
        for i, t in enumerate(self.tets):
            for f in combinations(sorted(t), 3):
                faces.setdefault(frozenset(f), []).append(i)
        for f, ts in faces.items():
            if len(ts) == 1:
                raise self._err(f"face {tuple(sorted(f))} is free; the complex is not closed", ts[0])
            if len(ts) > 2:
                raise self._err(
                    f"face {tuple(sorted(f))} lies in {len(ts)} tetrahedra; dual graph is not tetravalent", ts[0]
                )
        # connectedness of the dual graph
        adj = {i: set() for i in range(len(self.tets))}
        for ts in faces.values():
            adj[ts[0]].add(ts[1])
            adj[ts[1]].add(ts[0])
        stack, reach = [0], {0}
        while stack:
            for j in adj[stack.pop()]:
                if j not in reach:
                    reach.add(j)
                    stack.append(j)
        if len(reach) != len(self.tets):
            bad = min(set(range(len(self.tets))) - reach)
            raise self._err("complex is not connected", bad)
        # vertex links must be 2-spheres
        for v in self.vertices:
            link = [tuple(x for x in t if x != v) for t in self.tets if v in t]
            lv = {x for tri in link for x in tri}
            le = {frozenset(p) for tri in link for p in combinations(tri, 2)}
            if len(lv) - len(le) + len(link) != 2:
                i = next(i for i, t in enumerate(self.tets) if v in t)
                raise self._err(f"link of vertex {v} is not a sphere", i)
        # coherent orientation: each shared face induces opposite orientations
        orient = {0: 1}
        stack = [0]
        while stack:
            i = stack.pop()
            for f in combinations(self.tets[i], 3):
                ts = faces[frozenset(f)]
                j = ts[0] if ts[1] == i else ts[1]
                want = -orient[i] * _face_sign(self.tets[i], f) * _face_sign(self.tets[j], f)
                if j in orient:
                    if orient[j] != want:
                        raise self._err("complex is not orientable", j)
                else:
                    orient[j] = want
                    stack.append(j)
        self.orientation = [orient[i] for i in range(len(self.tets))]
        self.faces = faces

    @property
    def vertices(self) -> list[int]:
        return sorted({v for t in self.tets for v in t})

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted({p for t in self.tets for p in combinations(sorted(t), 2)})

    @property
    def triangles(self) -> list[tuple[int, int, int]]:
        return sorted(tuple(sorted(f)) for f in self.faces)


def _face_sign(t: tuple, f: tuple) -> int:
    """Sign of the induced boundary orientation of face f (listed as in t) on t."""
    missing = next(i for i, v in enumerate(t) if v not in f)
    rest = [v for v in t if v in f]
    sign = -1 if missing % 2 else 1
    # parity of the permutation taking rest to f
    perm = [rest.index(v) for v in f]
    inv = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
    return sign * (-1 if inv % 2 else 1)


def parse_triangulation(text: str) -> SimplicialComplex3:
    tets, lines = [], []
    level = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "qtqft-format":
            if rest.strip() != "1":
                raise MorseWordError(f"unsupported format version {rest.strip()!r}", lineno, 1)
        elif head == "level":
            try:
                level = int(rest)
            except ValueError:
                raise MorseWordError(f"bad level {rest!r}", lineno, len(head) + 2) from None
        elif head == "tet":
            parts = rest.split()
            try:
                tets.append(tuple(int(p) for p in parts))
            except ValueError:
                raise MorseWordError(f"bad vertex id in {rest!r}", lineno, len(head) + 2) from None
            if len(parts) != 4:
                raise MorseWordError(f"tet needs 4 vertices, got {len(parts)}", lineno, len(head) + 2)
            lines.append(lineno)
        else:
            raise MorseWordError(f"unknown directive {head!r}", lineno, 1)
    return SimplicialComplex3(tets, lines, level)


@dataclass
class Thickening:
    """Heegaard surface of a triangulation: boundary of a neighbourhood of the 1-skeleton.

    Cells of the surface: one vertex per (edge, triangle) incidence, one edge per
    arc of a triangle meridian or a tetrahedron corner arc, one hexagon per
    (vertex, tetrahedron) corner.  ``meridians_dual`` lists, for each triangle,
    the surface vertices on its meridian circle (the curves bounding discs in the
    dual handlebody); ``meridians_primal`` does the same for each edge of K.
    """

    genus: int
    n_vertices: int
    n_edges: int
    n_faces: int
    meridians_dual: dict
    meridians_primal: dict

    @property
    def euler(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces


def canonical_thickening(K: SimplicialComplex3) -> Thickening:
    V, E, F, T = len(K.vertices), len(K.edges), len(K.faces), len(K.tets)
    g_dual = 1 + F - T
    g_primal = 1 + E - V
    if g_dual != g_primal:
        raise AssertionError(f"handlebody genera differ: {g_primal} vs {g_dual}")
    J = [(e, f) for f in K.triangles for e in combinations(f, 2)]
    arcs_meridian = 3 * F
    arcs_corner = 6 * T
    corners = 4 * T
    thick = Thickening(
        genus=g_primal,
        n_vertices=len(J),
        n_edges=arcs_meridian + arcs_corner,
        n_faces=corners,
        meridians_dual={f: [(e, f) for e in combinations(f, 2)] for f in K.triangles},
        meridians_primal={e: [(e, f) for f in K.triangles if set(e) <= set(f)] for e in K.edges},
    )
    if thick.euler != 2 - 2 * thick.genus:
        raise AssertionError(f"Euler characteristic {thick.euler} != 2 - 2*{thick.genus}")
    return thick


def triangulation_invariant(K: SimplicialComplex3, fd: FusionData) -> CycNum:
    """Turaev-Viro state sum, normalized so that S^3 -> 1 (equals |Z|^2 with Z(S^3) = 1)."""
    canonical_thickening(K)
    edges = K.edges
    eidx = {e: i for i, e in enumerate(edges)}
    tris = K.triangles
    tri_edges = [tuple(eidx[p] for p in combinations(f, 2)) for f in tris]
    tet_edges = []
    for t in K.tets:
        v = sorted(t)
        c = lambda i, j: eidx[(v[i], v[j])]
        tet_edges.append((c(0, 1), c(1, 2), c(0, 2), c(2, 3), c(0, 3), c(1, 3)))
    # order edges so that constraints close early
    order = []
    for f in tri_edges:
        for x in f:
            if x not in order:
                order.append(x)
    pos = {x: i for i, x in enumerate(order)}
    tri_at = [[] for _ in order]
    for f in tri_edges:
        tri_at[max(pos[x] for x in f)].append(f)
    tet_at = [[] for _ in order]
    for te in tet_edges:
        tet_at[max(pos[x] for x in te)].append(te)
    labels = fd.labels
    dim = [-fd.qdim(a) if a % 2 else fd.qdim(a) for a in labels]
    # tetrahedral symbol carries i^(-sum of twice-spins)
    phase = [fd.i ** (-n) for n in range(4)]
    col = [0] * len(edges)
    total = [fd.zero]

    def rec(i, w):
        if i == len(order):
            total[0] = total[0] + w
            return
        x = order[i]
        for a in labels:
            col[x] = a
            if not all(fd.admissible(col[f[0]], col[f[1]], col[f[2]]) for f in tri_at[i]):
                continue
            w2 = w * dim[a]
            for f in tri_at[i]:
                w2 = w2 * fd.delta2(col[f[0]], col[f[1]], col[f[2]])
            for te in tet_at[i]:
                cs = [col[y] for y in te]
                w2 = w2 * fd.racah_sum(*cs) * phase[sum(cs) % 4]
            rec(i + 1, w2)

    rec(0, fd.one)
    return total[0] * fd.D2.inverse() ** (len(K.vertices) - 1)
