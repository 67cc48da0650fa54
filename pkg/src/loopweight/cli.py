"""Command-line front end.

Modules are named by descriptors such as ``EFL(ell=2,a=a0)``,
``RECT(ell=2,k=2,a=a0)`` or ``FUSE(EFL(ell=1,a=a0),EFL(ell=1,a=a0),ratio=q^-2)``.
``--window lo..hi`` is a window of tableau entries; the generators acting are
x^{+-}_i for nodes lo <= i <= hi-1, the nodes whose strings stay inside it.
"""
from __future__ import annotations

import argparse
import ast
import json
import re
import sys
from dataclasses import dataclass, field

from . import __version__
from .crystal import extremal_orbit
from .monomial import QCharacter, fold, qchar_row
from .representations import (
    EFLModule,
    FusionUndefined,
    LinComb,
    column_module,
    efl_module,
    fundamental_minus,
    fundamental_plus,
    fuse_many,
    mode_apply,
    phi_mode_apply,
    rect_module,
    truncate,
    vector_rep,
)
from .scalar import SpectralParam, register_symbol
from . import verify as V

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNDEFINED = 0, 1, 2, 3

SUITES = ("relations", "thin", "integrable", "extremal", "connected", "qchar", "folded",
          "fusion-poles", "crystal-iso", "column-iso", "two-construction")
NEEDS_MODULE = {"relations", "thin", "integrable", "extremal", "connected", "qchar"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    window: tuple[int, int] = (-2, 3)
    modes: int = 2
    depth: int = 4
    fmt: str = "text"
    out: str | None = None
    params: list = field(default_factory=list)

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise UsageError("window must satisfy lo <= hi")
        if self.modes < 0:
            raise UsageError("--modes must be >= 0")
        if self.fmt not in ("json", "text"):
            raise UsageError("--format must be json or text")

    @property
    def nodes(self) -> tuple[int, int]:
        lo, hi = self.window
        return (lo, max(lo, hi - 1))


# ---------------------------------------------------------------------------
# descriptors


_MODULES = {
    "FUNDP": (("ell", "a"), lambda ell, a: fundamental_plus(ell, a)),
    "FUNDM": (("s", "a"), lambda s, a: fundamental_minus(s, a)),
    "VEC": (("a",), lambda a: vector_rep(a)),
    "EFL": (("ell", "a"), lambda ell, a: efl_module(ell, a)),
    "COL": (("k", "a"), lambda k, a: column_module(k, a)),
    "RECT": (("ell", "k", "a"), lambda ell, k, a: rect_module(ell, k, a)),
}


def _fresh_symbol(text: str) -> str:
    # fresh relative to the descriptor, so repeated parses reuse the same slot
    used = set(re.findall(r"[A-Za-z_]\w*", text))
    k = 1
    while f"g{k}" in used:
        k += 1
    return f"g{k}"


def _with_param(desc_node, text: str, param: SpectralParam):
    """Rebuild a leaf descriptor with its spectral parameter replaced."""
    name = desc_node.func.id
    names, make = _MODULES[name]
    args = _leaf_args(desc_node, text, names)
    args["a"] = param
    return make(**args)


def _segment(text: str, node) -> str:
    seg = ast.get_source_segment(text, node)
    if seg is None:
        raise UsageError("cannot read descriptor argument")
    return seg.strip()


def _leaf_args(node, text: str, names) -> dict:
    if len(node.args) > len(names):
        raise UsageError(f"{node.func.id} takes {len(names)} arguments")
    raw = {n: _segment(text, a) for n, a in zip(names, node.args)}
    for kw in node.keywords:
        if kw.arg not in names or kw.arg in raw:
            raise UsageError(f"unexpected argument {kw.arg!r} to {node.func.id}")
        raw[kw.arg] = _segment(text, kw.value)
    if "s" in names and "s" not in raw:
        raw["s"] = "0"
    missing = [n for n in names if n not in raw]
    if missing:
        raise UsageError(f"{node.func.id} is missing {', '.join(missing)}")
    out = {}
    for n, v in raw.items():
        if n == "a":
            out[n] = SpectralParam.parse(v)
        else:
            try:
                out[n] = int(v)
            except ValueError:
                raise UsageError(f"{n} must be an integer, got {v!r}") from None
    return out


def _build(node, text: str):
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name):
        raise UsageError("expected NAME(...)")
    name = node.func.id
    if name in _MODULES:
        names, make = _MODULES[name]
        args = _leaf_args(node, text, names)
        if "ell" in args and args["ell"] < 1 or "k" in args and args["k"] < 1:
            raise UsageError("shape parameters must be positive")
        return make(**args)
    if name == "FUSE":
        if len(node.args) < 2:
            raise UsageError("FUSE needs at least two modules")
        ratio = None
        for kw in node.keywords:
            if kw.arg != "ratio":
                raise UsageError(f"unexpected argument {kw.arg!r} to FUSE")
            ratio = _segment(text, kw.value).replace(" ", "")
        parts = [_build(a, text) for a in node.args]
        if ratio is not None:
            if len(parts) != 2:
                raise UsageError("ratio= needs exactly two modules")
            second = node.args[1]
            if not (isinstance(second, ast.Call) and second.func.id in _MODULES):
                raise UsageError("ratio= needs a plain second module")
            a = parts[0].a if hasattr(parts[0], "a") else None
            if a is None:
                raise UsageError("ratio= needs a plain first module")
            if ratio == "generic":
                b = SpectralParam(_fresh_symbol(text))
            else:
                m = re.fullmatch(r"q\^\(?(-?\d+)\)?|q", ratio)
                if not m:
                    raise UsageError(f"ratio must be q^d or generic, got {ratio!r}")
                d = int(m.group(1)) if m.group(1) is not None else 1
                b = a.shift(-d)
            parts[1] = _with_param(second, text, b)
        return fuse_many(parts)
    raise UsageError(f"unknown module {name!r}")


def parse_descriptor(text: str):
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"bad descriptor {text!r}: {exc.msg}") from None
    try:
        return _build(tree.body, text.strip())
    except (ValueError, TypeError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad descriptor {text!r}: {exc}") from None


def parse_window(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _norm(s: str) -> str:
    return s.replace(" x ", " ⊗ ").replace(" ", "")


def find_vector(M, text: str, window: tuple[int, int]):
    """The basis vector whose text (with or without @param) is ``text``."""
    nums = [int(x) for x in re.findall(r"-?\d+", re.sub(r"q\^-?\d+|[a-z]\w*", "", text))]
    lo = min(nums + [window[0]]) - 1
    hi = max(nums + [window[1]]) + 1
    want = _norm(text)
    for v in M.basis_enum((lo, hi)):
        cands = {_norm(str(v)), _norm(str(M.crystal_label(v)))}
        if hasattr(v, "tableau"):
            cands.add(_norm(str(v.tableau)))
        if hasattr(v, "factors"):
            cands.add(_norm(" ⊗ ".join(str(getattr(f, "tableau", f)) for f in v.factors)))
        if want in cands:
            return v
    raise UsageError(f"unknown vector {text!r} for {M}")


def parse_generator(text: str):
    m = re.fullmatch(r"(x\+|x-|phi):(-?\d+):([+-]?\d+)", text.strip())
    if not m:
        raise UsageError(f"generator must be x+:i:r, x-:i:r or phi:i:+-m, got {text!r}")
    kind, i, r = m.group(1), int(m.group(2)), m.group(3)
    if kind == "phi":
        if r[0] not in "+-":
            raise UsageError("phi modes need an explicit sign: phi:i:+m or phi:i:-m")
        return kind, i, (1 if r[0] == "+" else -1), int(r[1:])
    return kind, i, (1 if kind == "x+" else -1), int(r)


# ---------------------------------------------------------------------------
# output


def _emit(cfg: RunConfig, payload, text: str):
    body = json.dumps(payload, indent=2, ensure_ascii=False) if cfg.fmt == "json" else text
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    print(body)


def cmd_qchar(desc: str, cfg: RunConfig) -> int:
    M = parse_descriptor(desc)
    tr = truncate(M, cfg.nodes)
    chi = V.truncated_qchar(M, tr)
    payload = {"descriptor": str(M), "window": list(cfg.window), "terms": chi.size(), "qcharacter": chi.to_json()}
    _emit(cfg, payload, str(chi))
    return EXIT_PASS


def cmd_act(desc: str, gen: str, vec: str, cfg: RunConfig) -> int:
    M = parse_descriptor(desc)
    kind, i, sign, r = parse_generator(gen)
    v = find_vector(M, vec, cfg.window)
    if kind == "phi":
        res = phi_mode_apply(M, i, sign, r, v)
    else:
        res = mode_apply(M, sign, i, r, v)
    payload = {"descriptor": str(M), "generator": gen, "vector": str(v), "result": res.to_json()}
    _emit(cfg, payload, str(res))
    return EXIT_PASS


def _load_qchar(path: str):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    terms = obj["qcharacter"] if isinstance(obj, dict) else obj
    window = tuple(obj["window"]) if isinstance(obj, dict) and "window" in obj else None
    return QCharacter.from_json(terms), window


def _qchar_source(args, cfg):
    if args.qchar:
        chi, win = _load_qchar(args.qchar)
        if win is not None and args.window is None:
            cfg.window = win
        return chi
    if not args.descriptor:
        raise UsageError("give a module descriptor or --qchar FILE")
    M = parse_descriptor(args.descriptor)
    return V.truncated_qchar(M, truncate(M, cfg.nodes))


def cmd_fold(args, cfg: RunConfig) -> int:
    if args.n is None or args.n < 2:
        raise UsageError("--n must be >= 2")
    chi = _qchar_source(args, cfg)
    folded = fold(chi, args.n)
    payload = {"n": args.n, "window": list(cfg.window), "terms": folded.size(),
               "multiplicity_free": folded.multiplicity_free(), "qcharacter": folded.to_json()}
    _emit(cfg, payload, str(folded))
    return EXIT_PASS


def cmd_orbit(args, cfg: RunConfig) -> int:
    M = parse_descriptor(args.descriptor)
    v = find_vector(M, args.vector, cfg.window) if args.vector else M.generator()
    orbit, cert = extremal_orbit(M.crystal_label(v), cfg.nodes, cfg.depth)
    elems = sorted(str(t) for t in orbit)
    payload = {"descriptor": str(M), "start": str(M.crystal_label(v)), "certificate": cert, "orbit": elems}
    _emit(cfg, payload, "\n".join(elems))
    return EXIT_PASS if cert["ok"] else EXIT_FAIL


def _drange(text: str | None, ell: int) -> tuple[int, int]:
    if text is None:
        return (-2 * ell - 2, 2 * ell + 2)
    return parse_window(text)


def run_suite(suite: str, args, cfg: RunConfig) -> V.Certificate:
    if suite in NEEDS_MODULE:
        if not args.descriptor:
            raise UsageError(f"verify {suite} needs a module descriptor")
        M = parse_descriptor(args.descriptor)
        nodes = cfg.nodes
        if suite == "extremal":
            v = find_vector(M, args.vector, cfg.window) if args.vector else M.generator()
            return V.check_extremal(M, v, nodes, cfg.depth)
        tr = truncate(M, nodes, enumerate_basis=args.all_vectors)
        if suite == "relations":
            return V.check_relations(M, nodes, cfg.modes, trunc=tr)
        if suite == "thin":
            return V.check_thin(M, nodes, tr)
        if suite == "integrable":
            return V.check_integrable(M, nodes, tr)
        if suite == "connected":
            return V.check_connected(M, nodes, tr)
        if isinstance(M, EFLModule):
            ref = qchar_row(M.L, M.a, cfg.window[0], cfg.nodes[1] + 1)
        else:
            ref = V.formula_qchar(M, tr)
        return V.check_qchar(M, nodes, ref, tr)
    if suite == "folded":
        if args.n is None or args.n < 2:
            raise UsageError("--n must be >= 2")
        chi = _qchar_source(args, cfg)
        return V.check_folded(chi, args.n, cfg.nodes)
    ell = args.ell
    if ell is None or ell < 1:
        raise UsageError(f"verify {suite} needs --ell >= 1")
    if suite == "fusion-poles":
        return V.check_fusion_poles(ell, _drange(args.drange, ell))
    if suite == "crystal-iso":
        return V.check_crystal_iso(ell, cfg.nodes)
    if suite == "column-iso":
        return V.check_column_iso(ell, cfg.nodes, cfg.modes)
    if suite == "two-construction":
        return V.check_two_construction(ell, cfg.nodes, cfg.modes)
    raise UsageError(f"unknown suite {suite!r}")


def _summary(cert: V.Certificate) -> str:
    lines = [f"{'PASS' if cert.ok else 'FAIL'} {cert.name} {json.dumps(cert.params, ensure_ascii=False, default=str)}"]
    d = cert.details
    for key in ("instances", "certificates", "components", "max_string_length", "orbit_size", "terms",
                "distinct_monomials", "comparisons", "folded_terms"):
        if key in d:
            lines.append(f"  {key}: {json.dumps(d[key], ensure_ascii=False, default=str)}")
    if "scan" in d:
        for row in d["scan"]:
            lines.append(f"  d={row['d']}: {'defined' if row['defined'] else 'undefined'}")
    for w in cert.witnesses[:5]:
        lines.append(f"  witness: {json.dumps(w, ensure_ascii=False, default=str)}")
    return "\n".join(lines)


def cmd_verify(args, cfg: RunConfig) -> int:
    cert = run_suite(args.suite, args, cfg)
    _emit(cfg, cert.to_json(), _summary(cert))
    undefined = cert.details.get("undefined")
    if undefined:
        print(f"error: fusion undefined: {json.dumps(undefined[0], ensure_ascii=False)}", file=sys.stderr)
        return EXIT_UNDEFINED
    return EXIT_PASS if cert.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=parse_window, default=None, help="entry window lo..hi")
    common.add_argument("--modes", type=int, default=2, help="mode bound R")
    common.add_argument("--depth", type=int, default=4, help="reflection depth for orbits")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="text")
    common.add_argument("--out", default=None, help="also write the JSON report here")
    common.add_argument("--param", action="append", default=[], help="declare a base symbol (repeatable)")

    p = argparse.ArgumentParser(prog="loopweight", description="Exact loop-weight module computations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("qchar", parents=[common], help="q-character of a truncated module")
    q.add_argument("descriptor")

    a = sub.add_parser("act", parents=[common], help="apply one generator to a basis vector")
    a.add_argument("descriptor")
    a.add_argument("generator", help="x+:i:r, x-:i:r or phi:i:+-m")
    a.add_argument("vector")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("descriptor", nargs="?")
    v.add_argument("--vector", default=None)
    v.add_argument("--all-vectors", action="store_true",
                   help="use every basis vector in the window, not only those reached from the generator")
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--ell", type=int, default=None)
    v.add_argument("--drange", default=None, help="lo..hi for fusion-poles")
    v.add_argument("--qchar", default=None, help="JSON q-character file (from qchar --format json)")

    f = sub.add_parser("fold", parents=[common], help="fold a q-character onto the toroidal domain")
    f.add_argument("descriptor", nargs="?")
    f.add_argument("--n", type=int, default=None)
    f.add_argument("--qchar", default=None)

    o = sub.add_parser("orbit", parents=[common], help="crystal-level extremal Weyl orbit")
    o.add_argument("descriptor")
    o.add_argument("--vector", default=None)
    return p


def _glue_values(argv: list[str]) -> list[str]:
    # "--window -1..3" would otherwise read as an unknown option
    out = []
    k = 0
    while k < len(argv):
        a = argv[k]
        if a in ("--window", "--drange") and k + 1 < len(argv):
            out.append(f"{a}={argv[k + 1]}")
            k += 2
            continue
        out.append(a)
        k += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        for name in args.param:
            try:
                register_symbol(name)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        cfg = RunConfig(window=args.window or (-2, 3), modes=args.modes, depth=args.depth, fmt=args.fmt,
                        out=args.out, params=list(args.param))
        if args.command == "qchar":
            return cmd_qchar(args.descriptor, cfg)
        if args.command == "act":
            return cmd_act(args.descriptor, args.generator, args.vector, cfg)
        if args.command == "verify":
            return cmd_verify(args, cfg)
        if args.command == "fold":
            return cmd_fold(args, cfg)
        if args.command == "orbit":
            return cmd_orbit(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FusionUndefined as exc:
        print(f"error: fusion undefined: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
