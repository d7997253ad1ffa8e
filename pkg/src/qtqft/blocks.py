"""Striped-surface engine: colored links on surfaces as words of elementary blocks.

A word is read bottom to top.  At every time the cut is a disjoint union of
circles; each circle carries the strands piercing it.  A boundary state on a
circle with strands a_1..a_n is a chain of region colors
(b_0, b_1, ..., b_n = b_0) with admissible(b_{i-1}, a_i, b_i).  On the sphere
``evaluate_closed`` returns D^2 times the Reshetikhin-Turaev value of the
blackboard-framed link.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cyclo import CycNum
from .fusion import FusionData, build_fusion_data

__all__ = [
    "Block",
    "MorseWord",
    "MorseWordError",
    "Trace",
    "BlockTensor",
    "parse_morse_word",
    "trace_word",
    "enumerate_states",
    "block_tensor",
    "glue",
    "identity_tensor",
    "evaluate_closed",
    "evaluate_word",
    "link_invariant",
    "surface_word",
    "surface_z",
    "surface_z_closed",
    "qym_weight",
    "heat_kernel_z",
]

OMEGA = "omega"


class MorseWordError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg = msg
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)


@dataclass(frozen=True)
class Block:
    """One elementary block.

    kinds and args:
      cup ()                  new empty circle
      cap ()                  close an empty circle
      tri+ (n, m)             merge two circles
      tri- (n, m)             split a circle after its n-th strand
      free (n,)               identity
      X+ / X- (n, k)          strand k passes over / under strand k+1
      birth (n, k, a, o)      new strands k, k+1 of color a (n counted after); o in {+1,-1,0}
      death (n, k)            strands k, k+1 annihilate (n counted before)
      coupon (n, k)           zero-channel projector on strands k, k+1
    """

    kind: str
    args: tuple = ()
    line: int = 0
    col: int = 0
    same: bool = False  # acts on the circle produced by the previous block

    def text(self) -> str:
        if self.kind in ("cup", "cap"):
            return self.kind
        if self.kind == "birth":
            n, k, a, o = self.args
            tail = "" if o == 0 else (",+" if o > 0 else ",-")
            return f"birth({n},{k},{a}{tail})"
        return f"{self.kind}({','.join(str(x) for x in self.args)})"


@dataclass
class MorseWord:
    level: int
    slices: list[list[Block]]
    palette: tuple[int, ...] = ()
    framings: tuple[int, ...] | None = None

    def to_text(self) -> str:
        lines = ["qtqft-format 1", f"level {self.level}"]
        if self.palette:
            lines.append("colors " + ",".join(str(c) for c in self.palette))
        for sl in self.slices:
            toks: list[str] = []
            for b in sl:
                if not b.same:
                    toks.append(b.text())
                elif b.kind == "birth":
                    toks[-1] = f"cup({b.args[2]})"
                else:
                    toks[-1] = f"cap({b.args[0]})"
            lines.append(" ".join(toks))
        if self.framings is not None:
            lines.append("framings " + ",".join(str(f) for f in self.framings))
        return "\n".join(lines) + "\n"

    def mirror(self) -> "MorseWord":
        """Swap every crossing; framings are negated."""
        swap = {"X+": "X-", "X-": "X+"}
        slices = [[Block(swap.get(b.kind, b.kind), b.args, b.line, b.col, b.same) for b in sl] for sl in self.slices]
        fr = None if self.framings is None else tuple(-f for f in self.framings)
        return MorseWord(self.level, slices, self.palette, fr)


# parsing

_BLOCK_RE = re.compile(r"(cup|cap|tri[+-]|free|X[+-]|birth|death|coupon)(?:\(([^)]*)\))?$")


def _parse_int(s: str, line: int, col: int, what: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise MorseWordError(f"bad {what} {s!r}", line, col) from None


def _parse_block(tok: str, line: int, col: int, palette: tuple[int, ...]) -> list[Block]:
    m = _BLOCK_RE.match(tok)
    if not m:
        raise MorseWordError(f"unknown block {tok!r}", line, col)
    kind, argtext = m.group(1), m.group(2)
    raw = [] if argtext is None or argtext.strip() == "" else [s.strip() for s in argtext.split(",")]

    def color(s: str) -> int:
        c = _parse_int(s, line, col, "color")
        if palette and c not in palette:
            raise MorseWordError(f"unknown color {c} (palette {','.join(map(str, palette))})", line, col)
        return c

    if kind in ("cup", "cap"):
        if not raw:
            return [Block(kind, (), line, col)]
        if len(raw) != 1:
            raise MorseWordError(f"{kind} takes at most one color", line, col)
        a = color(raw[0])
        if kind == "cup":
            return [Block("cup", (), line, col), Block("birth", (2, 1, a, 0), line, col, True)]
        return [Block("death", (2, 1), line, col), Block("cap", (a,), line, col, True)]
    if kind == "free":
        if len(raw) != 1:
            raise MorseWordError("free takes one argument", line, col)
        return [Block(kind, (_parse_int(raw[0], line, col, "count"),), line, col)]
    if kind == "birth":
        if len(raw) not in (3, 4):
            raise MorseWordError("birth takes (n,k,a[,+|-])", line, col)
        n = _parse_int(raw[0], line, col, "count")
        k = _parse_int(raw[1], line, col, "position")
        a = color(raw[2])
        o = 0
        if len(raw) == 4:
            if raw[3] not in ("+", "-"):
                raise MorseWordError(f"bad orientation {raw[3]!r}", line, col)
            o = 1 if raw[3] == "+" else -1
        return [Block(kind, (n, k, a, o), line, col)]
    if len(raw) != 2:
        raise MorseWordError(f"{kind} takes two arguments", line, col)
    return [Block(kind, (_parse_int(raw[0], line, col, "count"), _parse_int(raw[1], line, col, "position")), line, col)]


def parse_morse_word(text: str, *, validate: bool = True) -> MorseWord:
    """Parse the line-based word format; errors carry line and column."""
    level = None
    palette: tuple[int, ...] = ()
    framings = None
    slices: list[list[Block]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        head, _, rest = line.strip().partition(" ")
        if head == "qtqft-format":
            if rest.strip() != "1":
                raise MorseWordError(f"unsupported format version {rest.strip()!r}", lineno, col0)
            continue
        if head == "level":
            level = _parse_int(rest.strip(), lineno, col0 + 6, "level")
            continue
        if head == "colors":
            palette = tuple(_parse_int(s.strip(), lineno, col0 + 7, "color") for s in rest.split(",") if s.strip())
            continue
        if head in ("framings", "framing"):
            vals = tuple(_parse_int(s.strip(), lineno, col0 + len(head) + 1, "framing") for s in rest.split(",") if s.strip())
            framings = (framings or ()) + vals
            continue
        sl: list[Block] = []
        for m in re.finditer(r"\S+", line):
            sl.extend(_parse_block(m.group(0), lineno, m.start() + 1, palette))
        slices.append(sl)
    if level is None:
        raise MorseWordError("missing 'level' header", 1, 1)
    if level < 1:
        raise MorseWordError(f"level must be >= 1, got {level}", 1, 1)
    for sl in slices:
        for b in sl:
            if b.kind == "birth" and b.args[2] > level:
                raise MorseWordError(f"color {b.args[2]} exceeds level {level}", b.line, b.col)
    w = MorseWord(level, slices, palette, framings)
    if validate:
        trace_word(w)
    return w


# topology of a word

@dataclass
class Op:
    kind: str
    pos: int
    args: tuple
    block: Block
    segs_in: tuple = ()
    segs_out: tuple = ()
    layout_after: tuple = ()


@dataclass
class Crossing:
    op_index: int
    sign: int  # +1 for X+, -1 for X-
    comp_over: int
    comp_under: int
    writhe: int  # oriented sign


@dataclass
class Trace:
    ops: list[Op]
    seg_comp: dict[int, int]
    seg_orient: dict[int, int]
    comp_color: list[int]
    comp_first_birth: list[int]
    comp_last_op: list[int]
    crossings: list[Crossing]
    closed: bool
    euler: int = 0
    surfaces: int = 0

    @property
    def genus(self) -> int:
        """Total genus of the swept closed surface."""
        return self.surfaces - self.euler // 2

    @property
    def n_components(self) -> int:
        return len(self.comp_color)

    def writhe(self, c: int) -> int:
        return sum(x.writhe for x in self.crossings if x.comp_over == c and x.comp_under == c)

    def linking_matrix(self, framings: Sequence[int] | None = None) -> list[list[int]]:
        n = self.n_components
        twice = [[0] * n for _ in range(n)]
        for x in self.crossings:
            if x.comp_over != x.comp_under:
                twice[x.comp_over][x.comp_under] += x.writhe
                twice[x.comp_under][x.comp_over] += x.writhe
        M = [[twice[i][j] // 2 for j in range(n)] for i in range(n)]
        for i in range(n):
            M[i][i] = framings[i] if framings is not None else self.writhe(i)
        return M


class _UF:
    def __init__(self):
        self.p: dict[int, int] = {}

    def add(self, x):
        self.p.setdefault(x, x)

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.p[rb] = ra
            else:
                self.p[ra] = rb


def trace_word(w: MorseWord) -> Trace:
    """Validate a word and compute its strand topology.

    Segments are strand pieces between events; components, orientations,
    crossing signs and colors are derived here and shared by every evaluator.
    """
    circles: list[list[int]] = []
    cids: list[int] = []
    suf = _UF()
    ncirc = 0
    euler = 0
    seg_color: dict[int, int] = {}
    ops: list[Op] = []
    uf = _UF()
    nseg = 0
    seg_bottom: dict[int, tuple] = {}
    seg_top: dict[int, tuple] = {}
    births: list[tuple[int, int, int, int]] = []  # (op index, s1, s2, orientation hint)
    crossing_raw: list[tuple[int, int, int, int]] = []  # (op, sign, over seg, under seg)

    def new_seg(color):
        nonlocal nseg
        nseg += 1
        seg_color[nseg] = color
        uf.add(nseg)
        return nseg

    def need(pos, b, n):
        if not circles:
            raise MorseWordError("no open strands", b.line, b.col)
        if pos >= len(circles):
            raise MorseWordError(f"no circle left for {b.text()}", b.line, b.col)
        have = len(circles[pos])
        if have != n:
            raise MorseWordError(f"strand count {have} ≠ {n}", b.line, b.col)

    for sl in w.slices:
        pos = 0
        for b in sl:
            kind, args = b.kind, b.args
            if b.same:
                pos -= 1
            op = Op(kind, pos, args, b)
            if kind == "cup":
                circles.insert(pos, [])
                ncirc += 1
                suf.add(ncirc)
                cids.insert(pos, ncirc)
                euler += 1
                pos += 1
            elif kind == "cap":
                if not circles or pos >= len(circles):
                    raise MorseWordError("no circle to cap", b.line, b.col)
                if circles[pos]:
                    raise MorseWordError(f"strand count {len(circles[pos])} ≠ 0", b.line, b.col)
                del circles[pos]
                del cids[pos]
                euler += 1
            elif kind == "free":
                need(pos, b, args[0])
                pos += 1
            elif kind == "tri+":
                n, m = args
                need(pos, b, n)
                if pos + 1 >= len(circles):
                    raise MorseWordError("tri+ needs two circles", b.line, b.col)
                if len(circles[pos + 1]) != m:
                    raise MorseWordError(f"strand count {len(circles[pos + 1])} ≠ {m}", b.line, b.col)
                circles[pos : pos + 2] = [circles[pos] + circles[pos + 1]]
                suf.union(cids[pos], cids[pos + 1])
                del cids[pos + 1]
                euler -= 1
                pos += 1
            elif kind == "tri-":
                n, m = args
                if n < 0 or m < 0:
                    raise MorseWordError("negative strand count", b.line, b.col)
                need(pos, b, n + m)
                c = circles[pos]
                circles[pos : pos + 1] = [c[:n], c[n:]]
                ncirc += 1
                suf.add(ncirc)
                suf.union(cids[pos], ncirc)
                cids.insert(pos + 1, ncirc)
                euler -= 1
                pos += 2
            elif kind in ("X+", "X-"):
                n, k = args
                need(pos, b, n)
                if not 1 <= k < n:
                    raise MorseWordError(f"crossing position {k} out of range 1..{n - 1}", b.line, b.col)
                c = circles[pos]
                l_in, r_in = c[k - 1], c[k]
                l_out, r_out = new_seg(seg_color[r_in]), new_seg(seg_color[l_in])
                uf.union(l_in, r_out)
                uf.union(r_in, l_out)
                seg_top[l_in] = ("x", r_out)
                seg_top[r_in] = ("x", l_out)
                seg_bottom[r_out] = ("x", l_in)
                seg_bottom[l_out] = ("x", r_in)
                c[k - 1], c[k] = l_out, r_out
                op.segs_in, op.segs_out = (l_in, r_in), (l_out, r_out)
                over, under = (l_in, r_in) if kind == "X+" else (r_in, l_in)
                crossing_raw.append((len(ops), 1 if kind == "X+" else -1, over, under))
                pos += 1
            elif kind == "birth":
                n, k, a, o = args
                if a < 0 or a > w.level:
                    raise MorseWordError(f"color {a} not physical at level {w.level}", b.line, b.col)
                if not circles or pos >= len(circles):
                    raise MorseWordError("no open strands", b.line, b.col)
                have = len(circles[pos])
                if have != n - 2:
                    raise MorseWordError(f"strand count {have} ≠ {n - 2}", b.line, b.col)
                if not 1 <= k <= n - 1:
                    raise MorseWordError(f"birth position {k} out of range 1..{n - 1}", b.line, b.col)
                s1, s2 = new_seg(a), new_seg(a)
                uf.union(s1, s2)
                seg_bottom[s1] = ("b", s2)
                seg_bottom[s2] = ("b", s1)
                circles[pos][k - 1 : k - 1] = [s1, s2]
                op.segs_out = (s1, s2)
                births.append((len(ops), s1, s2, o))
                pos += 1
            elif kind in ("death", "coupon"):
                n, k = args
                need(pos, b, n)
                if not 1 <= k < n:
                    raise MorseWordError(f"{kind} position {k} out of range 1..{n - 1}", b.line, b.col)
                c = circles[pos]
                s1, s2 = c[k - 1], c[k]
                if seg_color[s1] != seg_color[s2]:
                    raise MorseWordError(
                        f"{kind} joins colors {seg_color[s1]} and {seg_color[s2]}", b.line, b.col
                    )
                uf.union(s1, s2)
                seg_top[s1] = ("d", s2)
                seg_top[s2] = ("d", s1)
                op.segs_in = (s1, s2)
                if kind == "death":
                    del c[k - 1 : k + 1]
                else:
                    t1, t2 = new_seg(seg_color[s1]), new_seg(seg_color[s1])
                    uf.union(t1, t2)
                    uf.union(s1, t1)
                    seg_bottom[t1] = ("b", t2)
                    seg_bottom[t2] = ("b", t1)
                    c[k - 1], c[k] = t1, t2
                    op.segs_out = (t1, t2)
                    births.append((len(ops), t1, t2, 0))
                pos += 1
            else:
                raise MorseWordError(f"unknown block {kind}", b.line, b.col)
            op.layout_after = tuple(tuple(c) for c in circles)
            ops.append(op)

    # components numbered by first birth
    root_comp: dict[int, int] = {}
    comp_color: list[int] = []
    comp_first: list[int] = []
    for opi, s1, s2, o in births:
        r = uf.find(s1)
        if r not in root_comp:
            root_comp[r] = len(comp_color)
            comp_color.append(seg_color[s1])
            comp_first.append(opi)
        elif comp_color[root_comp[r]] != seg_color[s1]:
            b = ops[opi].block
            raise MorseWordError(
                f"component color mismatch: {seg_color[s1]} vs {comp_color[root_comp[r]]}", b.line, b.col
            )
    seg_comp = {s: root_comp[uf.find(s)] for s in seg_color}

    # orientation by walking each component from its first birth
    seg_orient: dict[int, int] = {}
    for opi, s1, s2, o in births:
        if s1 in seg_orient:
            if o and seg_orient[s1] != o:
                b = ops[opi].block
                raise MorseWordError("orientation conflicts with component", b.line, b.col)
            continue
        start = s1
        d = 1 if o >= 0 else -1
        s = start
        while True:
            if s in seg_orient:
                break
            seg_orient[s] = d
            end = seg_top.get(s) if d > 0 else seg_bottom.get(s)
            if end is None:
                break  # open end
            tag, nxt = end
            if tag == "x":
                s = nxt
            else:
                s, d = nxt, -d

    comp_last = [0] * len(comp_color)
    for i, op in enumerate(ops):
        for s in op.segs_in + op.segs_out:
            comp_last[seg_comp[s]] = i

    crossings = []
    for opi, sign, over, under in crossing_raw:
        wr = sign * seg_orient.get(over, 1) * seg_orient.get(under, 1)
        crossings.append(Crossing(opi, sign, seg_comp[over], seg_comp[under], wr))

    return Trace(
        ops=ops,
        seg_comp=seg_comp,
        seg_orient=seg_orient,
        comp_color=comp_color,
        comp_first_birth=comp_first,
        comp_last_op=comp_last,
        crossings=crossings,
        closed=not circles,
        euler=euler,
        surfaces=len({suf.find(c) for c in suf.p}),
    )


# boundary states

def enumerate_states(fd: FusionData, colors: Sequence[int]) -> list[tuple[int, ...]]:
    """All admissible region chains (b_0..b_n), b_n = b_0, in lexicographic order."""
    n = len(colors)
    out: list[tuple[int, ...]] = []

    def rec(chain):
        i = len(chain)
        if i == n + 1:
            if chain[-1] == chain[0]:
                out.append(tuple(chain))
            return
        a = colors[i - 1]
        for b in fd.fuse(chain[-1], a):
            chain.append(b)
            rec(chain)
            chain.pop()

    for b0 in fd.labels:
        if n == 0:
            out.append((b0,))
        else:
            rec([b0])
    return out


# local block amplitudes on a single circle; each returns {new chain: amp}

def _crossing_amp(fd: FusionData, x, b, c, y, e, sign):
    out = {}
    for f in fd.labels:
        if not (fd.admissible(x, c, f) and fd.admissible(f, b, y)):
            continue
        s = fd.zero
        for g in fd.fuse(b, c):
            if not fd.admissible(x, g, y):
                continue
            s = s + fd.fmove(x, b, c, y, e, g) * fd.braid_eigenvalue(b, c, g, sign) * fd.fmove_inv(x, c, b, y, g, f)
        if s:
            out[f] = s
    return out


def _kappa(fd: FusionData, a: int) -> int:
    return -1 if a % 2 else 1


class _Local:
    """Memoized local amplitudes for one FusionData."""

    def __init__(self, fd: FusionData):
        self.fd = fd
        self.cross: dict = {}

    def crossing(self, x, b, c, y, e, sign):
        key = (x, b, c, y, e, sign)
        v = self.cross.get(key)
        if v is None:
            v = _crossing_amp(self.fd, x, b, c, y, e, sign)
            self.cross[key] = v
        return v


def _apply_circle_op(fd: FusionData, loc: _Local, kind: str, args: tuple, colors: tuple, chain: tuple, extra=None):
    """Apply a single-circle block; yields (new_colors, new_chain, amp)."""
    if kind == "free":
        yield colors, chain, fd.one
        return
    if kind in ("X+", "X-"):
        n, k = args
        x, e, y = chain[k - 1], chain[k], chain[k + 1]
        b, c = colors[k - 1], colors[k]
        sign = 1 if kind == "X+" else -1
        ncol = colors[: k - 1] + (c, b) + colors[k + 1 :]
        for f, amp in loc.crossing(x, b, c, y, e, sign).items():
            yield ncol, chain[:k] + (f,) + chain[k + 1 :], amp
        return
    if kind == "birth":
        n, k, a = args[:3]
        up = extra
        x = chain[k - 1]
        ncol = colors[: k - 1] + (a, a) + colors[k - 1 :]
        coef = 1 if up else _kappa(fd, a)
        for f in fd.fuse(x, a):
            amp = fd.fmove_inv(x, a, a, x, 0, f)
            if coef < 0:
                amp = -amp
            yield ncol, chain[:k] + (f, x) + chain[k:], amp
        return
    if kind == "death":
        n, k = args
        up = extra
        x, f, y = chain[k - 1], chain[k], chain[k + 1]
        if x != y:
            return
        a = colors[k - 1]
        amp = fd.fmove(x, a, a, x, f, 0) * fd.qdim(a)
        if not up and _kappa(fd, a) < 0:
            amp = -amp
        yield colors[: k - 1] + colors[k + 1 :], chain[:k] + chain[k + 2 :], amp
        return
    if kind == "coupon":
        n, k = args
        x, e, y = chain[k - 1], chain[k], chain[k + 1]
        if x != y:
            return
        a = colors[k - 1]
        left = fd.fmove(x, a, a, x, e, 0)
        if not left:
            return
        for f in fd.fuse(x, a):
            amp = left * fd.fmove_inv(x, a, a, x, 0, f)
            if amp:
                yield colors, chain[:k] + (f,) + chain[k + 1 :], amp
        return
    raise ValueError(f"not a single-circle block: {kind}")


# block tensors

@dataclass
class BlockTensor:
    """Sparse linear map between boundary-state spaces.

    States are tuples of circles, each circle a (colors, chain) pair.
    """

    in_states: list
    out_states: list
    amps: dict = field(default_factory=dict)

    def matrix_entry(self, i, o) -> CycNum | None:
        return self.amps.get((i, o))

    def __eq__(self, other):
        if not isinstance(other, BlockTensor):
            return NotImplemented
        return (
            self.in_states == other.in_states
            and self.out_states == other.out_states
            and {k: v for k, v in self.amps.items() if v} == {k: v for k, v in other.amps.items() if v}
        )


def _circle_space(fd, colors):
    return [((tuple(colors), ch),) for ch in enumerate_states(fd, colors)]


def block_tensor(
    fd: FusionData,
    block: Block,
    colors: Sequence[int] | Sequence[Sequence[int]] = (),
    orientation: Sequence[int] | None = None,
) -> BlockTensor:
    """Tensor of one block.

    ``colors`` lists the strand colors of the input circle (for tri+ a pair of
    color lists).  ``orientation`` gives the up/down flag per strand after a
    birth or before a death (defaults to the left strand pointing up).
    """
    kind, args = block.kind, block.args
    if kind == "cup":
        ins = [()]
        outs = _circle_space(fd, ())
        amps = {((), o): fd.qdim(o[0][1][0]) for o in outs}
        return BlockTensor(ins, outs, amps)
    if kind == "cap":
        ins = _circle_space(fd, ())
        amps = {(i, ()): fd.qdim(i[0][1][0]) for i in ins}
        return BlockTensor(ins, [()], amps)
    if kind == "tri+":
        ca, cb = (tuple(c) for c in colors)
        if (len(ca), len(cb)) != tuple(args):
            raise ValueError("color lists do not match tri+ arity")
        ins = [
            ((ca, x), (cb, y))
            for x in enumerate_states(fd, ca)
            for y in enumerate_states(fd, cb)
        ]
        outs = _circle_space(fd, ca + cb)
        amps = {}
        for i in ins:
            (_, x), (_, y) = i
            if x[-1] == y[0]:
                amps[(i, ((ca + cb, x[:-1] + y),))] = fd.qdim_inv(x[0])
        return BlockTensor(ins, outs, amps)
    colors = tuple(colors)
    if kind == "tri-":
        n, m = args
        if len(colors) != n + m:
            raise ValueError("color list does not match tri- arity")
        ins = _circle_space(fd, colors)
        ca, cb = colors[:n], colors[n:]
        outs = [((ca, x), (cb, y)) for x in enumerate_states(fd, ca) for y in enumerate_states(fd, cb)]
        amps = {}
        for i in ins:
            ch = i[0][1]
            if ch[n] == ch[0]:
                amps[(i, ((ca, ch[: n + 1]), (cb, ch[n:])))] = fd.qdim_inv(ch[0])
        return BlockTensor(ins, outs, amps)
    loc = _Local(fd)
    extra = None
    if kind == "birth":
        n, k, a = args[:3]
        if len(colors) != n - 2:
            raise ValueError("color list does not match birth arity")
        o = args[3] if len(args) > 3 else 0
        extra = o >= 0 if orientation is None else orientation[k - 1] > 0
        out_colors = colors[: k - 1] + (a, a) + colors[k - 1 :]
    elif kind == "death":
        n, k = args
        if len(colors) != n:
            raise ValueError("color list does not match death arity")
        extra = True if orientation is None else orientation[k - 1] > 0
        out_colors = colors[: k - 1] + colors[k + 1 :]
    elif kind in ("X+", "X-"):
        n, k = args
        out_colors = colors[: k - 1] + (colors[k], colors[k - 1]) + colors[k + 1 :]
    else:
        out_colors = colors
    if kind != "birth" and len(colors) != args[0]:
        raise ValueError("color list does not match block arity")
    ins = _circle_space(fd, colors)
    outs = _circle_space(fd, out_colors)
    amps = {}
    for i in ins:
        c, ch = i[0]
        for nc, nch, amp in _apply_circle_op(fd, loc, kind, args, c, ch, extra):
            key = (i, ((nc, nch),))
            amps[key] = amps.get(key, fd.zero) + amp
    return BlockTensor(ins, outs, amps)


def glue(t1: BlockTensor, t2: BlockTensor) -> BlockTensor:
    """Composite map: first t1, then t2."""
    if t1.out_states != t2.in_states:
        raise ValueError("state spaces do not match")
    zero = None
    by_in: dict = {}
    for (i, o), v in t2.amps.items():
        by_in.setdefault(i, []).append((o, v))
    amps: dict = {}
    for (i, m), v in t1.amps.items():
        for o, w in by_in.get(m, ()):
            key = (i, o)
            p = v * w
            amps[key] = amps[key] + p if key in amps else p
    return BlockTensor(t1.in_states, t2.out_states, {k: v for k, v in amps.items() if v})


def identity_tensor(fd: FusionData, colors: Sequence[int]) -> BlockTensor:
    return block_tensor(fd, Block("free", (len(colors),)), colors)


# whole-word evaluation

def _framing_weights(fd: FusionData, c: int, corr: int) -> CycNum:
    return fd.qdim(c) * fd.twist(c) ** corr


def evaluate_word(
    w: MorseWord,
    fd: FusionData | None = None,
    *,
    trace: Trace | None = None,
    comp_colors: Sequence | None = None,
    framing_corr: Sequence[int] | None = None,
    restrict: dict | None = None,
) -> CycNum:
    """Sweep a closed word.

    comp_colors[i] is a fixed twice-spin color or ``"omega"``; an omega
    component is summed over all labels c with weight [d_c] v_c^framing_corr[i].
    ``restrict`` pins omega components to given colors (used to split sums).
    """
    if fd is None:
        fd = build_fusion_data(w.level)
    if fd.k != w.level:
        raise ValueError(f"word level {w.level} does not match fusion level {fd.k}")
    tr = trace if trace is not None else trace_word(w)
    if not tr.closed:
        raise MorseWordError("word is not closed")
    ncomp = tr.n_components
    cc = list(tr.comp_color) if comp_colors is None else list(comp_colors)
    corr = list(framing_corr) if framing_corr is not None else [0] * ncomp
    restrict = restrict or {}
    loc = _Local(fd)
    seg_comp, seg_orient = tr.seg_comp, tr.seg_orient
    first_birth = {op: c for c, op in enumerate(tr.comp_first_birth)}
    last_op = {}
    for c, op in enumerate(tr.comp_last_op):
        last_op.setdefault(op, []).append(c)

    # state key: (live component colors, circles); circle = (colors, chain)
    init_cc = tuple(None for _ in range(ncomp))
    states: dict = {(init_cc, ()): fd.one}
    for opi, op in enumerate(tr.ops):
        kind, pos, args = op.kind, op.pos, op.args
        new: dict = {}

        def put(key, amp):
            if key in new:
                new[key] = new[key] + amp
            else:
                new[key] = amp

        if kind == "cup":
            for (ccs, circ), amp in states.items():
                for b in fd.labels:
                    put((ccs, circ[:pos] + (((), (b,)),) + circ[pos:]), amp * fd.qdim(b))
        elif kind == "cap":
            for (ccs, circ), amp in states.items():
                b = circ[pos][1][0]
                put((ccs, circ[:pos] + circ[pos + 1 :]), amp * fd.qdim(b))
        elif kind == "tri+":
            for (ccs, circ), amp in states.items():
                (ca, x), (cb, y) = circ[pos], circ[pos + 1]
                if x[-1] != y[0]:
                    continue
                put((ccs, circ[:pos] + ((ca + cb, x[:-1] + y),) + circ[pos + 2 :]), amp * fd.qdim_inv(x[0]))
        elif kind == "tri-":
            n = args[0]
            for (ccs, circ), amp in states.items():
                c, ch = circ[pos]
                if ch[n] != ch[0]:
                    continue
                parts = ((c[:n], ch[: n + 1]), (c[n:], ch[n:]))
                put((ccs, circ[:pos] + parts + circ[pos + 1 :]), amp * fd.qdim_inv(ch[0]))
        elif kind == "birth":
            n, k, a = args[:3]
            s1 = op.segs_out[0]
            comp = seg_comp[s1]
            up = seg_orient.get(s1, 1) > 0
            is_first = first_birth.get(opi) == comp
            for (ccs, circ), amp in states.items():
                if is_first:
                    choice = cc[comp]
                    if choice == OMEGA:
                        choices = [restrict[comp]] if comp in restrict else list(fd.labels)
                        weighted = [(c, _framing_weights(fd, c, corr[comp])) for c in choices]
                    else:
                        weighted = [(choice, fd.twist(choice) ** corr[comp] if corr[comp] else None)]
                else:
                    weighted = [(ccs[comp], None)]
                colors, chain = circ[pos]
                for col, wgt in weighted:
                    nccs = ccs[:comp] + (col,) + ccs[comp + 1 :] if is_first else ccs
                    base = amp if wgt is None else amp * wgt
                    for nc, nch, a_amp in _apply_circle_op(
                        fd, loc, "birth", (n, k, col), colors, chain, up
                    ):
                        put((nccs, circ[:pos] + ((nc, nch),) + circ[pos + 1 :]), base * a_amp)
        else:
            extra = None
            if kind == "death":
                extra = seg_orient.get(op.segs_in[0], 1) > 0
            for (ccs, circ), amp in states.items():
                colors, chain = circ[pos]
                for nc, nch, a_amp in _apply_circle_op(fd, loc, kind, args, colors, chain, extra):
                    put((ccs, circ[:pos] + ((nc, nch),) + circ[pos + 1 :]), amp * a_amp)
        if opi in last_op:
            dead = last_op[opi]
            merged: dict = {}
            for (ccs, circ), amp in new.items():
                l = list(ccs)
                for c in dead:
                    l[c] = None
                key = (tuple(l), circ)
                merged[key] = merged[key] + amp if key in merged else amp
            new = merged
        states = {k: v for k, v in new.items() if v}
    total = fd.zero
    for v in states.values():
        total = total + v
    return total


def evaluate_closed(w: MorseWord, fd: FusionData | None = None) -> CycNum:
    """Correlation value of a closed word with its own colors."""
    return evaluate_word(w, fd)


def link_invariant(w: MorseWord, fd: FusionData | None = None, trace: Trace | None = None) -> CycNum:
    """Blackboard-framed RT invariant of a link drawn on spheres.

    A word sweeping several spheres describes the split union of its pieces.
    """
    if fd is None:
        fd = build_fusion_data(w.level)
    tr = trace if trace is not None else trace_word(w)
    return evaluate_word(w, fd, trace=tr) * sphere_norm(fd, tr)


def sphere_norm(fd: FusionData, tr: Trace) -> CycNum:
    """1 / D^chi, after checking every swept surface is a sphere."""
    if tr.genus != 0:
        raise MorseWordError(f"link must be drawn on spheres (total genus {tr.genus})")
    return fd.D2.inverse() ** tr.surfaces


def surface_word(genus: int, level: int) -> MorseWord:
    """Empty closed surface of the given genus."""
    if genus < 0:
        raise ValueError("genus must be non-negative")
    slices = [[Block("cup")]]
    for _ in range(genus):
        slices.append([Block("tri-", (0, 0))])
        slices.append([Block("tri+", (0, 0))])
    slices.append([Block("cap")])
    return MorseWord(level, slices)


def surface_z(genus: int, fd: FusionData) -> CycNum:
    """Block-pipeline partition function of the closed genus-g surface."""
    return evaluate_word(surface_word(genus, fd.k), fd)


def surface_z_closed(genus: int, fd: FusionData) -> CycNum:
    """Sum over labels of [d_a]^(2-2g)."""
    e = 2 - 2 * genus
    return sum((fd.qdim(a) ** e for a in fd.labels), fd.zero)


def qym_weight(fd: FusionData, a: int, area, beta) -> float:
    """[d_a] exp(-area C_a / (2 beta)) as a float."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return fd.qdim(a).to_complex().real * math.exp(-float(area) * float(fd.casimir(a)) / (2 * float(beta)))


def heat_kernel_z(fd: FusionData, genus: int, area, beta) -> float:
    """Z_beta of the genus-g surface of total area ``area``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    total = 0.0
    for a in fd.labels:
        d = fd.qdim(a).to_complex().real
        total += d ** (2 - 2 * genus) * math.exp(-float(area) * float(fd.casimir(a)) / (2 * float(beta)))
    return total
