"""chirality-lab command line.

Exit codes: 0 success, 1 a verify check failed, 2 bad input (q, matrix or
word text, group membership), 3 a size or scan cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .conjugacy import decide
from .errors import (BadCharacteristic, ChiralityLabError, NonPrimeCharacteristic, NotInAmbientGroup, ParseError,
                     SizeCapExceeded, WitnessSearchExhausted)
from .ffield import field_of_order, prime_power, quadratic_extension
from .g2 import chirality_verdict
from .isolated import enumerate_isolated
from .matrix import parse_matrix
from .wordmap import chirality_search, group_by_name, parse_word, word_image

SCHEMA = "v1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


@dataclass
class RunConfig:
    seed: int = 0
    enum_cap: int = 10 ** 7
    scan_cap: int = 10 ** 6
    parallelism: int = 0
    output: str = "json"
    timing: bool = True

    def __post_init__(self):
        if self.enum_cap <= 0 or self.scan_cap <= 0:
            raise ValueError("caps must be positive")
        if self.parallelism < 0:
            raise ValueError("parallelism must be >= 0")


def _config(args) -> RunConfig:
    seed = args.seed
    env = os.environ.get("CHIRALITY_LAB_SEED")
    if env is not None:
        seed = int(env)
    return RunConfig(seed, args.enum_cap, args.scan_cap, args.parallel, args.output, not args.no_timing)


def _check_q(q):
    pp = prime_power(q)
    if pp is None:
        raise NonPrimeCharacteristic(f"q = {q} is not a prime power")
    if pp[0] in (2, 3):
        raise BadCharacteristic(f"q = {q} has characteristic {pp[0]}; need char not in {{2, 3}}")
    return pp


def _envelope(cfg: RunConfig, command: str, body: dict, started: float) -> dict:
    out = {"schema": SCHEMA, "tool": "chirality-lab", "version": __version__, "command": command,
           "config": {k: v for k, v in asdict(cfg).items() if k != "timing"}}
    out.update(body)
    if cfg.timing:
        out["timing"] = {"seconds": round(time.perf_counter() - started, 3)}
    return out


def _emit(cfg: RunConfig, payload: dict, text: str, rows=None):
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif cfg.output == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        print(text)


# -- commands -------------------------------------------------------------------------------

def cmd_analyze(args, cfg):
    t0 = time.perf_counter()
    _check_q(args.q)
    kw = {"seed": cfg.seed, "scan_cap": cfg.scan_cap}
    v = chirality_verdict(args.q, census=True, **kw)
    reports = {g: enumerate_isolated(args.q, g, **kw) for g in ("SL3", "SU3")}
    record = {"q": args.q,
              "chirality": dict(v.to_dict(), basis="criterion-only; witness certified isolated"),
              "isolated": {g: r.to_dict() for g, r in reports.items()}}
    payload = _envelope(cfg, "analyze", {"records": [record]}, t0)
    lines = [f"q = {args.q}: chiral={str(v.chiral).lower()}"
             + (" case1" if v.case1 else "") + (" case2" if v.case2 else "")
             + f" witness_source={v.witness_source}"]
    for g, r in reports.items():
        lines.append(f"  {g}: theorem_verdict={r.theorem_verdict.verdict} "
                     f"isolated classes found={r.class_count_isolated}")
        for c in r.isolated_classes():
            lines.append(f"    {c.label}: {c.rep}")
    if v.census_agrees is False:
        lines.append("  note: the isolated-class census disagrees with the congruence criterion at this q")
    rows = [["q", "group", "label", "alpha", "rep", "is_isolated", "same_as"]]
    for g, r in reports.items():
        rows += [[args.q, g, c.label, str(c.alpha), str(c.rep), c.is_isolated, c.same_as or ""] for c in r.classes]
    _emit(cfg, payload, "\n".join(lines), rows)
    return EXIT_OK


def cmd_verify(args, cfg):
    from .verify import run_suite
    t0 = time.perf_counter()
    results = run_suite(args.suite, args.qmax)
    passed = all(r.passed for r in results)
    payload = _envelope(cfg, "verify", {"suite": args.suite, "qmax": args.qmax, "passed": passed,
                                        "checks": [r.to_dict(cfg.timing) for r in results]}, t0)
    rows = [["key", "title", "passed"]] + [[r.key, r.title, r.passed] for r in results]
    _emit(cfg, payload, "\n".join(r.line() for r in results), rows)
    return EXIT_OK if passed else EXIT_FAIL


def _group_field(group, q):
    if group in ("sl3", "su3"):
        _check_q(q)
    return field_of_order(q) if group in ("sl3", "gl3") else quadratic_extension(q)


def cmd_conjugate(args, cfg):
    t0 = time.perf_counter()
    group = args.group.lower()
    if group not in ("sl3", "su3", "gl3", "u3"):
        raise ParseError(f"conjugate supports sl3, su3, gl3, u3; got {args.group}", 0)
    F = _group_field(group, args.q)
    A = parse_matrix(args.a, F)
    B = parse_matrix(args.b, F)
    kw = {}
    if group in ("sl3", "su3"):
        kw = {"seed": cfg.seed, "scan_cap": cfg.scan_cap}
    elif group == "u3":
        kw = {"scan_cap": cfg.scan_cap}
    dec = decide(A, B, group[:-1].upper(), **kw)
    payload = _envelope(cfg, "conjugate", {"decision": dec.to_dict(), "a": str(A), "b": str(B)}, t0)
    text = f"{dec.verdict} ({dec.method})"
    if dec.witness is not None:
        text += f"\nwitness: {dec.witness}"
    if dec.norm_data is not None:
        nd = dec.norm_data
        text += f"\nN_A: generator {nd.generator}, index {nd.index} in {nd.ambient}; connecting det {dec.connecting_det}"
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_isolated(args, cfg):
    t0 = time.perf_counter()
    _check_q(args.q)
    group = args.group.upper()
    if group not in ("SL3", "SU3"):
        raise ParseError(f"isolated supports sl3 and su3; got {args.group}", 0)
    mode = args.mode or "criterion"
    r = enumerate_isolated(args.q, group, mode=mode, seed=cfg.seed, scan_cap=cfg.scan_cap)
    payload = _envelope(cfg, "isolated", {"report": r.to_dict()}, t0)
    lines = [f"{group}({args.q}): theorem_verdict={r.theorem_verdict.verdict}, "
             f"isolated classes={r.class_count_isolated}"]
    for c in r.classes:
        tag = "isolated" if c.is_isolated else "not isolated"
        same = f" (same class as {c.same_as})" if c.same_as else ""
        lines.append(f"  {c.label}: {c.rep}  {tag}{same}")
    if r.oracle is not None:
        lines.append(f"  oracle: {r.oracle['isolated_count']} isolated of {r.oracle['class_count']} classes, "
                     f"agrees={r.oracle.get('agrees')}")
    rows = [["label", "alpha", "rep", "is_isolated", "same_as"]]
    rows += [[c.label, str(c.alpha), str(c.rep), c.is_isolated, c.same_as or ""] for c in r.classes]
    _emit(cfg, payload, "\n".join(lines), rows)
    return EXIT_OK


def cmd_word(args, cfg):
    t0 = time.perf_counter()
    if args.w is None:
        raise ParseError("--w is required", 0)
    w = parse_word(args.w)
    G = group_by_name(args.group, args.q)
    mode = args.mode or "exhaustive"
    rep = word_image(w, G, mode=mode, seed=cfg.seed, count=args.count, cap=cfg.enum_cap,
                     parallelism=cfg.parallelism)
    body = {"image": rep.to_dict(G)}
    text = f"w = {w} on {G.name}: |image| = {len(rep.elements)}, symmetric={rep.symmetric}"
    if args.search_length:
        res = chirality_search(G, args.search_length, max(w.arity, 1), cap=cfg.enum_cap)
        body["search"] = res.to_dict()
        text += f"\nsearch: {res.verdict} after {res.words_tried} words"
    payload = _envelope(cfg, "word", body, t0)
    text += "\n" + " ".join(G.labels[i] for i in rep.elements)
    rows = [["element"]] + [[G.labels[i]] for i in rep.elements]
    _emit(cfg, payload, text, rows)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--enum-cap", type=int, default=10 ** 7)
    common.add_argument("--scan-cap", type=int, default=10 ** 6)
    common.add_argument("--parallel", type=int, default=0, help="worker processes (0 = sequential)")
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--no-timing", action="store_true", help="omit timing fields for byte-stable output")

    p = argparse.ArgumentParser(prog="chirality-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="G2 chirality verdict and isolated classes for one q")
    a.add_argument("--q", type=int, required=True)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", parents=[common], help="run acceptance checks")
    v.add_argument("--suite", choices=("theorems", "oracle", "wordmap", "all"), default="theorems")
    v.add_argument("--qmax", type=int, default=31)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("conjugate", parents=[common], help="decide conjugacy of two matrices")
    c.add_argument("--group", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--a", required=True, help='matrix text, rows split by ";" e.g. "2,2,0;0,2,1;0,0,2"')
    c.add_argument("--b", required=True)
    c.set_defaults(func=cmd_conjugate)

    i = sub.add_parser("isolated", parents=[common], help="census of isolated classes")
    i.add_argument("--group", required=True)
    i.add_argument("--q", type=int, required=True)
    i.add_argument("--mode", choices=("criterion", "oracle"))
    i.set_defaults(func=cmd_isolated)

    w = sub.add_parser("word", parents=[common], help="word image on a small group")
    w.add_argument("--group", required=True, help="s3, s4, a4, c<n>, sl2, sl3, su3")
    w.add_argument("--q", type=int)
    w.add_argument("--w")
    w.add_argument("--mode", choices=("exhaustive", "sampled"))
    w.add_argument("--count", type=int, default=10000)
    w.add_argument("--search-length", type=int, default=0, help="also search for a chirality witness")
    w.set_defaults(func=cmd_word)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SizeCapExceeded, WitnessSearchExhausted) as exc:
        print(f"error: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (NonPrimeCharacteristic, BadCharacteristic, NotInAmbientGroup, ChiralityLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
