"""Command-line front end.

Colors are twice-spin integers everywhere (0, 1, ..., k).  Results are JSON
with sorted keys; exact values use the CycNum encoding
``{"order": N, "coeffs": ["p/q", ...]}`` in powers of exp(2 pi i / N).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import blocks, fusion, oracle, threemfld
from .blocks import MorseWordError
from .cyclo import CycNum
from .fusion import IdentityFailure, build_fusion_data

MAX_LEVEL = 16


class CliError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(msg)
        self.msg = msg
        self.line = line
        self.col = col


def _f(x: float) -> float:
    x = float(f"{x:.12g}")
    return 0.0 if abs(x) < 1e-12 else x


def cyc_out(v: CycNum) -> dict:
    z = v.to_complex()
    return {"exact": v.to_json(), "float": [_f(z.real), _f(z.imag)], "text": str(v)}


def _level(args, fallback: int | None = None) -> int:
    k = args.level if getattr(args, "level", None) is not None else fallback
    if k is None:
        raise CliError("level not given (use --level or a 'level' line)")
    if not 1 <= k <= MAX_LEVEL:
        raise CliError(f"level {k} out of range 1..{MAX_LEVEL}")
    return k


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such file: {path}")
    return p.read_text()


def cmd_fusion(args) -> dict:
    fd = build_fusion_data(_level(args))
    L = fd.labels
    return {
        "level": fd.k,
        "labels": list(L),
        "qdim": {str(a): cyc_out(fd.qdim(a)) for a in L},
        "twist": {str(a): cyc_out(fd.twist(a)) for a in L},
        "D2": cyc_out(fd.D2),
        "D": cyc_out(fd.D),
        "kappa": cyc_out(fd.kappa),
        "N": {f"{a},{b}": [c for c in L if fd.N(a, b, c)] for a in L for b in L},
        "S": [[cyc_out(fd.S[a][b]) for b in L] for a in L],
    }


def cmd_link(args) -> dict:
    w = blocks.parse_morse_word(_read(args.file))
    k = _level(args, w.level)
    if k != w.level:
        w = blocks.MorseWord(k, w.slices, w.palette, w.framings)
        blocks.trace_word(w)  # colors must stay physical at the new level
    fd = build_fusion_data(k)
    return {"level": k, **cyc_out(blocks.link_invariant(w, fd))}


def cmd_surface(args) -> dict:
    fd = build_fusion_data(_level(args))
    g = args.genus
    if g < 0:
        raise CliError("genus must be non-negative")
    out = {"level": fd.k, "genus": g, **cyc_out(blocks.surface_z(g, fd))}
    if args.beta is not None:
        if args.beta <= 0 or args.area <= 0:
            raise CliError("beta and area must be positive")
        out["beta"] = _f(args.beta)
        out["area"] = _f(args.area)
        out["z_beta"] = _f(blocks.heat_kernel_z(fd, g, args.area, args.beta))
    return out


def cmd_heegaard(args) -> dict:
    level, d = threemfld.parse_heegaard(_read(args.file))
    fd = build_fusion_data(_level(args, level))
    out = {"level": fd.k, "genus": d.genus, **cyc_out(threemfld.heegaard_invariant(d, fd))}
    return out


def cmd_surgery(args) -> dict:
    L = threemfld.parse_surgery(_read(args.file))
    fd = build_fusion_data(_level(args, L.word.level))
    if fd.k != L.word.level:
        L = threemfld.FramedSurgeryLink(blocks.MorseWord(fd.k, L.word.slices, L.word.palette, L.framings), L.framings)
    out = {
        "level": fd.k,
        "components": L.n_components,
        "signature": threemfld.signature(L.linking_matrix()) if L.n_components else 0,
        **cyc_out(threemfld.surgery_invariant(L, fd)),
    }
    return out


def cmd_triangulation(args) -> dict:
    K = threemfld.parse_triangulation(_read(args.file))
    fd = build_fusion_data(_level(args, K.level))
    th = threemfld.canonical_thickening(K)
    return {
        "level": fd.k,
        "genus": th.genus,
        "euler": th.euler,
        "counts": {"vertices": len(K.vertices), "edges": len(K.edges), "triangles": len(K.faces), "tetrahedra": len(K.tets)},
        **cyc_out(threemfld.triangulation_invariant(K, fd)),
    }


def cmd_verify(args, out) -> int:
    fd = build_fusion_data(_level(args))
    try:
        for name, n in fusion.identity_suites(fd):
            print(f"{name}: PASS ({n} checks)", file=out)
    except IdentityFailure as e:
        print(f"{e.name}: FAIL at {e.labels}", file=out)
        return 1
    return 0


def cmd_oracle(args) -> dict:
    fd = build_fusion_data(_level(args))
    top = min(3, fd.k)
    rows = []
    ok = True
    for a in range(top + 1):
        for b in range(top + 1):
            eig = oracle.braid_eigen(fd, a, b)
            for c in sorted(eig):
                agree = eig[c] == fd.braid_eigenvalue(a, b, c)
                ok = ok and agree
                rows.append({"a": a, "b": b, "c": c, "agree": agree, **cyc_out(eig[c])})
    return {"level": fd.k, "all_agree": ok, "channels": rows}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtqft", description="Exact quantum-group TQFT computations.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def lev(sp, required=False):
        sp.add_argument("--level", type=int, required=required, help="level k (colors are 0..k)")
        sp.add_argument("--timing", action="store_true", help="add wall-clock runtime to the output")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    f = sub.add_parser("fusion", help="fusion tables")
    f.add_argument("action", choices=("dump",))
    lev(f, True)
    s = sub.add_parser("link-invariant", help="RT invariant of a MorseWord link")
    s.add_argument("file")
    lev(s)
    s = sub.add_parser("surface-z", help="partition function of a closed surface")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--beta", type=float)
    s.add_argument("--area", type=float, default=1.0)
    lev(s, True)
    for name, help_ in (
        ("heegaard-invariant", "invariant of a Heegaard word"),
        ("surgery-invariant", "invariant of a framed surgery link"),
        ("triangulation-invariant", "invariant of a triangulated 3-manifold"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        lev(s)
    s = sub.add_parser("verify", help="run the identity suites")
    lev(s, True)
    s = sub.add_parser("oracle", help="compare braiding with the matrix oracle")
    lev(s, True)
    return p


_DISPATCH = {
    "fusion": cmd_fusion,
    "link-invariant": cmd_link,
    "surface-z": cmd_surface,
    "heegaard-invariant": cmd_heegaard,
    "surgery-invariant": cmd_surgery,
    "triangulation-invariant": cmd_triangulation,
    "oracle": cmd_oracle,
}


def _text(obj, indent: str = "") -> str:
    lines = []
    for key in sorted(obj):
        v = obj[key]
        if isinstance(v, dict) and "exact" in v:
            re, im = v["float"]
            lines.append(f"{indent}{key}: {v['text']}  ~ {re:.12g}{im:+.12g}i")
        elif key == "exact":
            continue
        elif isinstance(v, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_text(v, indent + "  "))
        else:
            lines.append(f"{indent}{key}: {v}")
    return "\n".join(lines)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        if args.cmd == "verify":
            return cmd_verify(args, out)
        result = _DISPATCH[args.cmd](args)
    except MorseWordError as e:
        json.dump({"error": e.msg, "line": e.line, "column": e.col}, err, sort_keys=True)
        err.write("\n")
        return 2
    except (CliError, ValueError, ArithmeticError) as e:
        payload = {"error": getattr(e, "msg", str(e))}
        json.dump(payload, err, sort_keys=True)
        err.write("\n")
        return 2
    if args.timing:
        result["runtime"] = round(time.perf_counter() - t0, 6)
    if args.format == "text":
        out.write(_text(result) + "\n")
    else:
        out.write(json.dumps(result, sort_keys=True) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
