"""Command-line front end.

Exit codes: 0 success (verdict holds, suite passed), 1 verdict fails or
suite has failures, 2 usage, parse or config errors, 3 I/O errors,
4 unknown element.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from . import catalog, graphs, numbers, suites, sweep
from .engine import proportion_holds
from .enumeration import Bounds, FragmentSpec, build_index
from .structures import StructureError, UnknownElement, load_structures
from .syntax import FormulaError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_UNKNOWN = 0, 1, 2, 3, 4

DEFAULTS = {
    "bounds-atoms": "2",
    "bounds-depth": "2",
    "bounds-quantifiers": "1",
    "quantifier-kinds": "exists,forall",
    "allow-constants": "true",
    "element-parameters": "false",
    "fragment": "cformula",
    "json": "false",
    "seed": str(suites.SuiteConfig().seed),
    "trials": "",
}
FRAGMENTS = ("cformula", "equational", "path")
# names accepted in a [bounds] section
BOUNDS_KEYS = {
    "max-atoms": "bounds-atoms", "atoms": "bounds-atoms",
    "max-term-depth": "bounds-depth", "depth": "bounds-depth",
    "max-quantifiers": "bounds-quantifiers", "quantifiers": "bounds-quantifiers",
}


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------


def read_config(path) -> dict:
    """``key = value`` lines with the long flag names as keys; a section
    header is optional."""
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[apfol]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"config {path}: {exc}") from None
    out = {}
    for section in parser.sections():
        for key, value in parser[section].items():
            key = key.replace("_", "-")
            if section == "bounds":
                key = BOUNDS_KEYS.get(key, key)
            if key not in DEFAULTS:
                raise UsageError(f"config {path}: unknown key {key!r}")
            out[key] = value
    return out


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            merged[key] = str(value)
    return merged


def _int(settings, key, minimum=0) -> int:
    try:
        value = int(settings[key])
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {settings[key]!r}") from None
    if value < minimum:
        raise UsageError(f"{key} must be at least {minimum}")
    return value


def _bool(settings, key) -> bool:
    value = settings[key].strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"{key} must be a boolean, got {settings[key]!r}")


def bounds_from(settings) -> Bounds:
    kinds = tuple(k.strip() for k in settings["quantifier-kinds"].split(",") if k.strip())
    if not set(kinds) <= {"exists", "forall"}:
        raise UsageError("quantifier-kinds must be a comma list of exists, forall")
    try:
        return Bounds(_int(settings, "bounds-atoms", 1), _int(settings, "bounds-depth"),
                      _int(settings, "bounds-quantifiers"), kinds,
                      allow_constants=_bool(settings, "allow-constants"),
                      element_parameters=_bool(settings, "element-parameters"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def fragment_from(settings) -> str:
    kind = settings["fragment"]
    if kind not in FRAGMENTS:
        raise UsageError(f"fragment must be one of {', '.join(FRAGMENTS)}")
    return kind


# -- output ------------------------------------------------------------------


def emit(settings, data: dict, text: str) -> None:
    if _bool(settings, "json"):
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _verdict_text(verdict, title: str) -> str:
    data = verdict.to_json()
    lines = [f"{title}: {'holds' if verdict.holds else 'fails'} ({data['mode']})"]
    for arrow in data["arrows"]:
        mark = "+" if arrow["holds"] else "-"
        lines.append(f"  {mark} {arrow['arrow']}  [{arrow['mode']}]")
        shared = arrow["shared"]
        if isinstance(shared, list):
            lines += [f"      shared: {f}" for f in shared]
        elif shared is not None:
            lines.append(f"      shared lengths: {_wls_text(shared)}")
        block = arrow.get("blocking")
        if block:
            witness = block.get("formula", block.get("length"))
            target = "no shared justification" if block["dPrime"] is None else f"d' = {block['dPrime']}"
            lines.append(f"      blocked: {target}, witness {witness}")
    return "\n".join(lines)


def _wls_text(js: dict) -> str:
    return str(graphs.WalkLengthSet(js["zero"], _inf(js["minEven"]), _inf(js["minOdd"])))


def _inf(v):
    return graphs.INF if v is None else v


# -- file helpers ------------------------------------------------------------


def _pick(path, name, other):
    found = load_structures(path)
    if not found:
        raise StructureError(f"{path}: no structures")
    A = found[name] if name else next(iter(found.values()))
    return A, (found[other] if other else A)


def _pick_safe(path, name, other):
    try:
        return _pick(path, name, other)
    except KeyError as exc:
        raise UsageError(f"no structure named {exc.args[0]!r} in {path}") from None


def _fragment_spec(settings) -> FragmentSpec:
    return FragmentSpec(fragment_from(settings), bounds_from(settings))


# -- commands ----------------------------------------------------------------


def cmd_check(args, settings) -> int:
    A, B = _pick_safe(args.file, args.structure, args.other)
    kind = fragment_from(settings)
    if kind == "path":
        verdict = graphs.path_proportion_holds(graphs.UndirectedGraph.from_structure(A),
                                               graphs.UndirectedGraph.from_structure(B), *args.elements)
    else:
        for e in args.elements[:2]:
            A.index(e)
        for e in args.elements[2:]:
            B.index(e)
        verdict = proportion_holds(A, B, *args.elements, _fragment_spec(settings))
    a, b, c, d = args.elements
    emit(settings, verdict.to_json(), _verdict_text(verdict, f"{a}:{b}::{c}:{d}"))
    return EXIT_OK if verdict.holds else EXIT_FAIL


def _pairs(bits: int, S) -> list[str]:
    n = S.size
    return [f"({S.universe[p % n]},{S.universe[p // n]})" for p in range(n * n) if bits >> p & 1]


def cmd_justify(args, settings) -> int:
    A, B = _pick_safe(args.file, args.structure, args.other)
    kind = fragment_from(settings)
    a, b = args.elements
    if kind == "path":
        G = graphs.UndirectedGraph.from_structure(A)
        H = graphs.UndirectedGraph.from_structure(B)
        lengths = graphs.walk_length_set(G, a, b)
        trivial = graphs.path_trivial_set(G, H)
        data = {"arrow": f"{a}-{b}", "lengths": lengths.to_json(), "trivial": trivial.to_json()}
        emit(settings, data, f"{a} - {b}: walk lengths {lengths}\ntrivial:\n  {trivial}")
        return EXIT_OK
    idx = build_index(A, B, _fragment_spec(settings))
    bits = idx.type_bits("A", a, b)
    rows, trivial = [], []
    for i in range(len(idx)):
        if bits >> i & 1:
            (rows if idx.nontrivial >> i & 1 else trivial).append(i)
    data = {
        "arrow": f"{a}->{b}",
        "bounds": {"fragment": idx.fragment.kind, **idx.fragment.bounds.as_dict()},
        "justifications": [{"formula": idx.text(i), "extension": _pairs(idx.ext_a[i], A)} for i in rows],
        "trivial": [idx.text(i) for i in trivial],
    }
    lines = [f"{a} -> {b} ({idx.fragment.label()}): {len(rows)} non-trivial"]
    lines += [f"  {idx.text(i)}    {{{', '.join(_pairs(idx.ext_a[i], A))}}}" for i in rows]
    lines.append("trivial:")
    lines += [f"  {idx.text(i)}" for i in trivial]
    emit(settings, data, "\n".join(lines))
    return EXIT_OK


def cmd_suite(args, settings) -> int:
    trials = settings["trials"]
    cfg = suites.SuiteConfig(seed=_int(settings, "seed"), bounds=bounds_from(settings),
                             trials=int(trials) if trials.strip() else None)
    if args.name not in suites.SUITES:
        raise UsageError(f"unknown suite {args.name!r}; choose from {', '.join(suites.SUITES)}")
    report = suites.run_suite(args.name, cfg)
    emit(settings, report.to_json(), report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def _graphs_from(args):
    A, B = _pick_safe(args.file, args.structure, args.other)
    return graphs.UndirectedGraph.from_structure(A), graphs.UndirectedGraph.from_structure(B)


def cmd_graph_check(args, settings) -> int:
    G, H = _graphs_from(args)
    decide = graphs.path_proportion_four_arrows if args.four_arrows else graphs.path_proportion_holds
    verdict = decide(G, H, *args.elements)
    a, b, c, d = args.elements
    emit(settings, verdict.to_json(), _verdict_text(verdict, f"{a}:{b}::{c}:{d}"))
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_graph_type(args, settings) -> int:
    G, _ = _graphs_from(args)
    a, b = args.elements
    s = graphs.walk_length_set(G, a, b)
    emit(settings, {"pair": [a, b], "lengths": s.to_json()}, f"{a} - {b}: {s}")
    return EXIT_OK


def _naturals(values) -> list[int]:
    try:
        out = [int(v) for v in values]
    except ValueError:
        raise UsageError("arguments must be natural numbers") from None
    if any(v < 0 for v in out):
        raise UsageError("arguments must be natural numbers")
    return out


def cmd_nat_s(args, settings) -> int:
    a, b, c, d = _naturals(args.elements)
    arrows = numbers.e_proportion_verdict(a, b, c, d)
    holds = all(v.holds for v in arrows)
    data = {"holds": holds, "closedForm": numbers.e_proportion(a, b, c, d),
            "arrows": [v.to_json() for v in arrows]}
    lines = [f"(N,S) {a}:{b}::{c}:{d}: {'holds' if holds else 'fails'}"]
    for v in arrows:
        js = v.to_json()
        family = ", ".join(js["shared"]["family"]) + ", ..." if js["shared"] else "none"
        lines.append(f"  {'+' if v.holds else '-'} {js['arrow']}  shared: {family}")
    emit(settings, data, "\n".join(lines))
    return EXIT_OK if holds else EXIT_FAIL


def cmd_ray_check(args, settings) -> int:
    a, b, c, d = _naturals(args.elements)
    verdict = graphs.gn_proportion_machinery(a, b, c, d)
    data = verdict.to_json() | {"closedForm": graphs.gn_proportion(a, b, c, d)}
    emit(settings, data, _verdict_text(verdict, f"G_N {a}:{b}::{c}:{d}"))
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_ray_target(args, settings) -> int:
    a, b = _naturals([args.a, args.b])
    A, _ = _pick_safe(args.file, args.structure, None)
    H = graphs.UndirectedGraph.from_structure(A)
    verdict = graphs.gn_target_proportion(a, b, H, args.c, args.d)
    data = verdict.to_json() | {
        "walkOfLength": graphs.gn_target_rhs(a, b, H, args.c, args.d),
        "shortestOfParity": graphs.gn_target_closed_form(a, b, H, args.c, args.d),
    }
    emit(settings, data, _verdict_text(verdict, f"(G_N, H) {a}:{b}::{args.c}:{args.d}"))
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_sweep(args, settings) -> int:
    entries = [catalog.find(n) for n in args.entries] if args.entries else list(catalog.GENERAL)
    result = sweep.sweep(entries)
    data = {name: {"minimal": (sweep.minimal_bounds(rows).as_dict() if sweep.minimal_bounds(rows) else None),
                   "rows": [{"bounds": r.bounds.as_dict(), "claims": list(r.per_claim)} for r in rows]}
            for name, rows in result.items()}
    emit(settings, data, sweep.format_sweep(result))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("global options")
    g.add_argument("--bounds-atoms", type=int, metavar="N")
    g.add_argument("--bounds-depth", type=int, metavar="N")
    g.add_argument("--bounds-quantifiers", type=int, metavar="N")
    g.add_argument("--quantifier-kinds", metavar="KINDS", help="comma list of exists, forall")
    g.add_argument("--allow-constants", metavar="BOOL")
    g.add_argument("--element-parameters", action="store_const", const="true",
                   help="allow @element constants (only when both structures coincide)")
    g.add_argument("--fragment", choices=FRAGMENTS)
    g.add_argument("--json", action="store_const", const="true")
    g.add_argument("--seed", type=int)
    g.add_argument("--trials", type=int)
    g.add_argument("--config", metavar="FILE", help="key = value file mirroring the long flags")

    parser = argparse.ArgumentParser(prog="apfol", parents=[common],
                                     description="Analogical proportions in first-order structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def structure_args(p, n_elements, names):
        p.add_argument("file")
        p.add_argument("elements", nargs=n_elements, metavar=names)
        p.add_argument("--structure", "-A", help="structure for the left pair (default: first in file)")
        p.add_argument("--other", "-B", help="structure for the right pair (default: same as left)")

    p = sub.add_parser("check", parents=[common], help="decide a:b::c:d in a structure file")
    structure_args(p, 4, "ELEM")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("justify", parents=[common], help="list the justifications of a -> b")
    structure_args(p, 2, "ELEM")
    p.set_defaults(run=cmd_justify)

    p = sub.add_parser("suite", parents=[common], help="run a property suite")
    p.add_argument("name", help=", ".join(suites.SUITES))
    p.set_defaults(run=cmd_suite)

    p = sub.add_parser("graph", parents=[common], help="path-justification commands")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    q = gsub.add_parser("check", parents=[common], help="decide a:b::c:d over walk lengths")
    structure_args(q, 4, "ELEM")
    q.add_argument("--four-arrows", action="store_true", help="decide all four arrows")
    q.set_defaults(run=cmd_graph_check)
    q = gsub.add_parser("type", parents=[common], help="walk-length set of a pair")
    structure_args(q, 2, "ELEM")
    q.set_defaults(run=cmd_graph_type)

    p = sub.add_parser("nat-s", parents=[common], help="equational proportions in (N, S)")
    nsub = p.add_subparsers(dest="nat_command", required=True)
    q = nsub.add_parser("check", parents=[common])
    q.add_argument("elements", nargs=4, metavar="N")
    q.set_defaults(run=cmd_nat_s)

    p = sub.add_parser("ray", parents=[common], help="path proportions in the ray graph G_N")
    rsub = p.add_subparsers(dest="ray_command", required=True)
    q = rsub.add_parser("check", parents=[common])
    q.add_argument("elements", nargs=4, metavar="N")
    q.set_defaults(run=cmd_ray_check)

    p = sub.add_parser("ray-target", parents=[common], help="a:b::c:d between G_N and a graph file")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("file")
    p.add_argument("c")
    p.add_argument("d")
    p.add_argument("--structure", "-A")
    p.set_defaults(run=cmd_ray_target)

    p = sub.add_parser("sweep", parents=[common], help="bounds sweep over the catalog")
    p.add_argument("entries", nargs="*", help="catalog entry names (default: all c-formula entries)")
    p.set_defaults(run=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        settings = _settings(args)
        return args.run(args, settings)
    except UsageError as exc:
        print(f"apfol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownElement as exc:
        print(f"apfol: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (StructureError, FormulaError) as exc:
        print(f"apfol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"apfol: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
