"""Command-line entry point.

Law checks emit one JSON object per line.  Exit status: 0 when every
selected law holds, 1 when one fails, 2 on usage or I/O errors, 3 when a
cap, position bound or search bound was hit.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from typing import Sequence

from .distributor import distr_law_candidate
from .errors import CapExceeded, PolyError, PositionOverflow, SearchExhausted
from .laws import ALL_LAWS, DISTRIBUTIVE_LAWS, MODES, LawReport, check_law, compare, diagram, reverify
from .monoidal import compose_poly, tensor
from .poly import Poly, apply_lens_extension, extension_card, poly_to_json
from .universes import PartialFn, kleisli_compose, kleisli_via_monad, mk_ufin, mk_uprop
from .uparrow import up

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parse_poly(text: str) -> Poly:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not JSON: {text!r}") from exc
    if isinstance(value, dict):
        value = value.get("arities")
    if not isinstance(value, list) or not all(isinstance(a, int) and a >= 0 for a in value):
        raise UsageError(f"expected a list of non-negative arities, got {text!r}")
    return Poly(value)


def _universe(name: str, cap: int):
    if cap < 1:
        raise UsageError("--cap must be at least 1")
    return mk_uprop() if name == "uprop" else mk_ufin(cap)


def _laws(text: str | None) -> list[str]:
    if not text:
        return list(ALL_LAWS)
    laws = [s.strip().upper() for s in text.split(",") if s.strip()]
    if "M1" in laws:
        i = laws.index("M1")
        laws[i:i + 1] = ["M1L", "M1R"]
    unknown = [law for law in laws if law not in ALL_LAWS]
    if unknown:
        raise UsageError(f"unknown laws: {', '.join(unknown)}")
    return sorted(set(laws), key=ALL_LAWS.index)


def _modes(text: str) -> list[str]:
    return list(MODES) if text == "both" else [text]


def _default_cap(law: str) -> int:
    return 3 if law in DISTRIBUTIVE_LAWS else 4


def _sampled_report(u, law: str, mode: str, sample: int, seed: int) -> LawReport:
    d = diagram(u, law)
    domain = list(d.positions())
    chosen = sorted(random.Random(seed).sample(domain, min(sample, len(domain))))
    witness = compare(d, mode, positions=chosen)
    status = "holds" if witness.equal else "fails"
    if witness.equal and witness.checked == 0 and witness.skipped > 0:
        status = "cap_exceeded"
    return LawReport(law, mode, status, witness.violation, witness.checked, witness.skipped)


def _emit(out, obj) -> None:
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _exit_for(reports: Sequence[LawReport]) -> int:
    if any(r.status == "fails" for r in reports):
        return EXIT_FAIL
    if any(r.status == "cap_exceeded" for r in reports):
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_check_laws(args, out) -> int:
    reports = []
    for law in _laws(args.laws):
        cap = args.cap if args.cap is not None else _default_cap(law)
        u = _universe(args.universe, cap)
        for mode in _modes(args.mode):
            if args.sample:
                report = _sampled_report(u, law, mode, args.sample, args.seed)
            else:
                report = check_law(u, law, mode)
            reports.append(report)
            _emit(out, report.to_json())
    if args.human:
        held = sum(r.status == "holds" for r in reports)
        failed = [f"{r.law}/{r.mode}" for r in reports if r.status == "fails"]
        line = f"{held}/{len(reports)} hold"
        if failed:
            line += "; failing: " + ", ".join(failed)
        print(line, file=sys.stderr)
    return _exit_for(reports)


def cmd_find_counterexample(args, out) -> int:
    law = _laws(args.law)
    if len(law) != 1:
        raise UsageError("--law takes exactly one law")
    law = law[0]
    cap = args.cap if args.cap is not None else _default_cap(law)
    u = _universe(args.universe, cap)
    report = check_law(u, law, args.mode)
    found = report.counterexample if report.status == "fails" else None
    verified = found is not None and reverify(u, law, args.mode, found)
    _emit(out, {"law": law, "mode": args.mode, "counterexample": found, "reverified": verified})
    if found is not None:
        return EXIT_FAIL
    return EXIT_EXHAUSTED if report.status == "cap_exceeded" else EXIT_OK


def cmd_eval(args, out) -> int:
    p = _parse_poly(args.poly)
    if args.at < 0:
        raise UsageError("--at must be non-negative")
    out.write(f"{extension_card(p, args.at)}\n")
    return EXIT_OK


def cmd_compose(args, out) -> int:
    p, q = _parse_poly(args.left), _parse_poly(args.right)
    op = {"compose": compose_poly, "tensor": tensor, "up": up}[args.op]
    _emit(out, poly_to_json(op(p, q)))
    return EXIT_OK


def _all_partial(n: int, m: int):
    for values in itertools.product([None, *range(m)], repeat=n):
        yield PartialFn(values, m)


def cmd_demo_partiality(args, out) -> int:
    u = mk_uprop()
    n = args.size
    pairs = mismatches = 0
    for f in _all_partial(n, n):
        for g in _all_partial(n, n):
            pairs += 1
            if kleisli_compose(f, g) != kleisli_via_monad(u, f, g):
                mismatches += 1
    f = PartialFn(tuple(None if a % 2 else (a + 1) % n for a in range(n)), n)
    g = PartialFn(tuple((b * 2) % n if b else None for b in range(n)), n)
    _emit(out, {"f": list(f.values), "g": list(g.values), "composite": list(kleisli_via_monad(u, f, g).values)})
    _emit(out, {"size": n, "pairs": pairs, "mismatches": mismatches})
    return EXIT_OK if mismatches == 0 else EXIT_FAIL


def cmd_demo_list(args, out) -> int:
    try:
        rows = json.loads(args.input)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--input is not JSON: {exc}") from exc
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise UsageError("--input must be a list of lists")
    u = mk_ufin(args.cap)
    symbols = sorted({json.dumps(x) for row in rows for x in row})
    index = {s: i for i, s in enumerate(symbols)}
    nab = distr_law_candidate(u).lens
    pos = u.uu.encode(len(rows), [len(r) for r in rows])
    h = tuple(index[json.dumps(x)] for row in rows for x in row)
    j, h2 = apply_lens_extension(nab, len(symbols), (pos, h))
    count, _ = nab.target.decode(j)
    width = len(rows)
    product = [[json.loads(symbols[h2[k * width + d]]) for d in range(width)] for k in range(count)]
    _emit(out, {"input": rows, "product": product})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyverse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def universe_flags(p):
        p.add_argument("--universe", choices=["ufin", "uprop"], default="ufin")
        p.add_argument("--cap", type=int, default=None, help="truncation cap (default 4 for monad laws, 3 for DL laws)")

    p = sub.add_parser("check-laws", help="check monad and distributive-law diagrams")
    universe_flags(p)
    p.add_argument("--mode", choices=["strict", "upto_iso", "both"], default="strict")
    p.add_argument("--laws", default=None, help="comma-separated subset of " + ",".join(ALL_LAWS))
    p.add_argument("--sample", type=int, default=0, help="check only this many inputs, drawn with --seed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--human", action="store_true", help="print a summary line to stderr")
    p.add_argument("--output", default=None, help="write reports here instead of stdout")
    p.set_defaults(func=cmd_check_laws)

    p = sub.add_parser("find-counterexample", help="least violating input of one law")
    universe_flags(p)
    p.add_argument("--law", required=True)
    p.add_argument("--mode", choices=list(MODES), default="strict")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_find_counterexample)

    p = sub.add_parser("eval", help="cardinality of p(X) for |X| = n")
    p.add_argument("--poly", required=True)
    p.add_argument("--at", type=int, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compose", help="arities of a product of two polynomials")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--op", choices=["compose", "tensor", "up"], default="compose")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("demo-partiality", help="Kleisli composition through the truth-value universe")
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_demo_partiality)

    p = sub.add_parser("demo-list", help="list-of-lists product through the finite-set universe")
    p.add_argument("--input", default='[["a", "b"], ["c"]]')
    p.add_argument("--cap", type=int, default=3)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_demo_list)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as out:
                return args.func(args, out)
        return args.func(args, sys.stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, PositionOverflow, SearchExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except PolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
