"""Command-line entry point.  Exit codes: 0 success, 1 violation / UNSAT / counterexample, 2 usage or budget error."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import address, cft, dyadic, layers, pattern, render, turing

OK, FOUND, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _choices(text: Optional[str]) -> tuple[int, ...]:
    if not text:
        return ()
    if set(text) - {"0", "1"}:
        raise UsageError("--choices takes a string of 0/1 bits")
    return tuple(int(c) for c in text)


def _rc(args) -> Optional[cft.RowConstraint]:
    if args.halfplane is None:
        if args.boundary is not None:
            raise UsageError("--boundary needs --halfplane")
        return None
    return cft.RowConstraint(args.halfplane, args.boundary if args.boundary is not None else 0)


def _load_pattern(path: str) -> pattern.Pattern:
    p, _ = pattern.Pattern.from_patch(pattern.parse_patch(_read(path)))
    return p


# ------------------------------------------------------------------ verbs


def cmd_normalize(args) -> int:
    word = address.parse_word(args.word)
    a = address.normalize(word, address.ORIGIN, _choices(args.choices))
    if a is None:
        print("invalid")
        return FOUND
    print(a)
    return OK


def cmd_support(args) -> int:
    base = address.parse_address(args.base)
    fn = address.support_un if args.kind == "un" else address.support_ln
    s = fn(args.n, base, _choices(args.choices))
    if args.count:
        print(len(s))
    else:
        for a in s:
            print(a)
    return OK


def cmd_check(args) -> int:
    rules = cft.parse_rules(_read(args.rules))
    patch = pattern.parse_patch(_read(args.patch))
    if patch.alphabet.symbols != rules.alphabet.symbols:
        patch = pattern.Patch(rules.alphabet, patch.cells, patch.partial)
    found = 0
    for idx, g in cft.check(patch, rules):
        kind = "forbidden" if idx < len(rules.forbidden) else "allowed-family"
        print(f"{kind} rule {idx} violated at {g}")
        found += 1
    rc = _rc(args)
    if rc is not None:
        for a in cft.enforce_half_plane(patch, rc):
            print(f"half-plane violated at {a}")
            found += 1
    if not found:
        print("clean")
    return FOUND if found else OK


def cmd_solve(args) -> int:
    rules = cft.parse_rules(_read(args.rules))
    window = pattern.Window.parse(args.window)
    seed = pattern.parse_patch(_read(args.seed)) if args.seed else None
    if seed is not None:
        seed = pattern.Patch(rules.alphabet, seed.cells)
    rc = _rc(args)
    if args.count:
        n = cft.count_solutions(window, rules, rc, seed, args.node_limit)
        print(n)
        return OK if n else FOUND
    sol = cft.solve(window, rules, rc, seed, args.node_limit)
    if sol is None:
        print("unsat")
        return FOUND
    sys.stdout.write(pattern.serialize_patch(sol))
    return OK


def cmd_encode(args) -> int:
    patch = pattern.parse_patch(_read(args.patch))
    dp = dyadic.phi(patch)
    sys.stdout.write(pattern.serialize_patch(dyadic.product_patch(dp)))
    return OK


def cmd_split(args) -> int:
    p = _load_pattern(args.pattern)
    for lp in dyadic.split(p, args.kmax):
        print(pattern.serialize_linear(lp))
    return OK


def cmd_verify(args) -> int:
    report = dyadic.verify_prop(args.prop, args.n, args.trials, args.seed)
    for line in report.lines():
        print(line)
    return OK if report.holds else FOUND


def cmd_tm(args) -> int:
    if args.tm_cmd == "mex":
        sys.stdout.write(turing.format_machine(turing.machine_ex()))
        return OK
    tm = turing.parse_machine(_read(args.machine))
    if args.tm_cmd == "run":
        try:
            d = turing.run(tm, args.input, args.steps)
        except turing.MachineStuck as exc:
            print(f"stuck: {exc}")
            return FOUND
        print(d.text(args.width))
        last = d.rows[-1]
        print("tape: " + " ".join(turing.tape_symbols(dict(last.tape), tm.blank)))
        return OK
    cm = turing.compile_to_rules(tm)
    if args.seed_width:
        sys.stdout.write(pattern.serialize_patch(cm.seed_row(args.seed_width)))
    else:
        sys.stdout.write(cft.serialize_rules(cm.rules))
    return OK


def _enumerator(path: str) -> cft.ListEnumerator:
    rules = cft.parse_rules(_read(path))
    return cft.ListEnumerator(rules.alphabet, list(rules.forbidden))


def cmd_layers(args) -> int:
    enum = _enumerator(args.forbidden)
    if args.layers_cmd == "build":
        x = pattern.parse_patch(_read(args.patch))
        hp = args.halfplane or x.alphabet.halfplane
        if hp is None:
            raise UsageError("the first layer needs a half-plane symbol (--halfplane)")
        sched = layers.parse_schedule(_read(args.schedule)) if args.schedule else layers.ZoneSchedule()
        rc = cft.RowConstraint(hp, args.boundary if args.boundary is not None else x.levels()[0])
        try:
            flp = layers.build_layers(x, rc, sched, enum, args.budget)
        except layers.ScheduleError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return USAGE
        sys.stdout.write(layers.serialize_layers(flp))
        return OK
    flp = layers.parse_layers(_read(args.layers))
    report = layers.check_layers(flp, enum, args.budget)
    for line in report.lines():
        print(line)
    if report.clean and not report.qf:
        print("clean")
    return OK if report.clean and not report.qf else FOUND


def cmd_render(args) -> int:
    text = _read(args.patch)
    is_layered = any(line.strip().startswith("layer:") for line in text.splitlines())
    obj = layers.parse_layers(text) if is_layered else pattern.parse_patch(text)
    opts = render.RenderOptions(show_labels=args.labels)
    svg = render.render_svg(obj, opts)
    if args.out == "-":
        sys.stdout.write(svg)
    else:
        Path(args.out).write_text(svg, encoding="utf-8")
    return OK


# ------------------------------------------------------------------ parser


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--halfplane", help="half-plane symbol")
    p.add_argument("--boundary", type=int, help="rows at or above this level carry the half-plane symbol")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="horotile", description=__doc__)
    ap.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; work is single-threaded")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("normalize", help="tile reached by a word over a A b B")
    p.add_argument("word")
    p.add_argument("--choices", help="alignment bits for rows above the origin, e.g. 0110")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("support", help="list the tiles of U_n or L_n")
    p.add_argument("kind", choices=("un", "ln"))
    p.add_argument("n", type=int)
    p.add_argument("--base", default="(0,0)")
    p.add_argument("--choices")
    p.add_argument("--count", action="store_true", help="print only the number of tiles")
    p.set_defaults(fn=cmd_support)

    p = sub.add_parser("check", help="report rule violations in a patch")
    p.add_argument("--rules", required=True)
    p.add_argument("--patch", required=True)
    _solver_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("solve", help="colour a window under a rule set")
    p.add_argument("--rules", required=True)
    p.add_argument("--window", required=True, help="top:bottom:left:right")
    p.add_argument("--seed", help="patch of fixed cells")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--count", action="store_true", help="count all solutions instead")
    _solver_flags(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("encode", help="dyadic two-track encoding of a patch")
    p.add_argument("--patch", required=True)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("split", help="linear patterns carrying a pattern's cells")
    p.add_argument("--pattern", required=True)
    p.add_argument("--kmax", type=int, default=1)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("verify", help="randomized check of a transport property")
    p.add_argument("--prop", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("tm", help="Turing machines")
    tsub = p.add_subparsers(dest="tm_cmd", required=True)
    q = tsub.add_parser("run")
    q.add_argument("--machine", required=True)
    q.add_argument("--steps", type=int, required=True)
    q.add_argument("--input", default="")
    q.add_argument("--width", type=int, default=None)
    q = tsub.add_parser("compile")
    q.add_argument("--machine", required=True)
    q.add_argument("--seed-width", type=int, default=0, help="print the seed row of this width instead of the rules")
    tsub.add_parser("mex", help="print the built-in example machine")
    p.set_defaults(fn=cmd_tm)

    p = sub.add_parser("layers", help="four-layer construction")
    lsub = p.add_subparsers(dest="layers_cmd", required=True)
    q = lsub.add_parser("build")
    q.add_argument("--patch", required=True)
    q.add_argument("--forbidden", required=True, help="rules file whose forbidden patterns are enumerated")
    q.add_argument("--schedule")
    q.add_argument("--budget", type=int, default=100)
    _solver_flags(q)
    q = lsub.add_parser("check")
    q.add_argument("--layers", required=True)
    q.add_argument("--forbidden", required=True)
    q.add_argument("--budget", type=int, default=100)
    p.set_defaults(fn=cmd_layers)

    p = sub.add_parser("render", help="schematic SVG of a patch or layered patch")
    p.add_argument("--patch", required=True)
    p.add_argument("--out", required=True, help="output file, or - for standard output")
    p.add_argument("--labels", action="store_true")
    p.set_defaults(fn=cmd_render)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except (UsageError, pattern.FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except cft.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return USAGE
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
