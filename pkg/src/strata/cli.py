"""Command-line entry point: ``strata {check,cover,enumerate,cohomology,families}``.

Exit codes: 0 admissible/success, 1 excluded/contradiction, 2 input error.
``--format json`` emits a versioned report with top-level keys ``schema``,
``tool``, ``version``, ``command``, ``verdict``, ``certificate`` and ``tables``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .cohomology import SCENARIOS, CaseScenario, SpecError, load_scenario, run_case, solve
from .covers import CoverError, iterate_covers
from .enumeration import Bounds, sweep
from .families import FAMILIES, match_families
from .graph import GraphError, LabeledGraph, format_graph, format_weight, parse_graph, profile
from .rules import COVER_DEPTH, DEFAULT_ORDER, KnotError, PreconditionError, check

SCHEMA = "strata-report/1"
EXIT_OK, EXIT_EXCLUDED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read_graph(path: str) -> LabeledGraph:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _report(command: dict, verdict: str, certificate=None, tables: dict | None = None) -> dict:
    return {"schema": SCHEMA, "tool": "strata", "version": __version__, "command": command,
            "verdict": verdict, "certificate": certificate, "tables": tables or {}}


def _emit(args, report: dict, human: str) -> None:
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(human)


def _parse_knots(specs: Sequence[str]) -> dict[tuple[str, ...], str]:
    out = {}
    for s in specs or ():
        ids, sep, name = s.partition("=")
        if not sep or not ids or not name:
            raise InputError(f"--knot expects <edge-ids>=unknot|trefoil, got {s!r}")
        out[tuple(sorted(x for x in ids.split(",") if x))] = name
    return out


def _graph_table(g: LabeledGraph) -> list[list]:
    return [[e.id, e.u, e.v, format_weight(e.weight)] for e in g.edges] + \
           [[c.id, "-", "-", format_weight(c.weight)] for c in g.circles]


# --------------------------------------------------------------------------- commands


def cmd_check(args) -> int:
    g = _read_graph(args.file)
    knots = _parse_knots(args.knot)
    order = tuple(args.order.split(",")) if args.order else DEFAULT_ORDER
    try:
        v = check(g, knots or None, order=order, cover_depth=args.cover_depth)
    except (PreconditionError, KnotError, ValueError) as exc:
        raise InputError(str(exc)) from None
    p = profile(g)
    command = {"name": "check", "file": args.file, "knots": {",".join(k): n for k, n in sorted(knots.items())},
               "cover_depth": args.cover_depth, "order": list(order)}
    counts = {"V": p.V, "E": p.E, "C": p.C, "b0": p.b0}
    if v.admissible:
        models = {vid: m.describe() for vid, m in sorted(v.models.items())}
        report = _report(command, "admissible", None, {"models": models, "profile": counts})
        human = "verdict: admissible\n\n" + _table(["vertex", "model"], sorted(models.items()))
        _emit(args, report, human)
        return EXIT_OK
    cert = v.certificate.to_dict()
    report = _report(command, "excluded", cert, {"profile": counts})
    human = (f"verdict: excluded by {v.certificate.rule}\n"
             f"certificate: {v.certificate.to_json()}")
    _emit(args, report, human)
    return EXIT_EXCLUDED


def cmd_cover(args) -> int:
    g = _read_graph(args.file)
    if len(args.cycle) != len(args.k):
        raise InputError("give one --k per --cycle")
    plan = [([x for x in c.split(",") if x], k) for c, k in zip(args.cycle, args.k)]
    try:
        tr = iterate_covers(g, plan)
    except CoverError as exc:
        raise InputError(str(exc)) from None
    steps = [{"cycle": list(s.cycle.key), "k": s.k, "small": c.total,
              "V": len(s.result.vertices), "E": len(s.result.edges), "circles": len(s.result.circles)}
             for s, c in zip(tr.steps, tr.counts)]
    command = {"name": "cover", "file": args.file, "plan": [[ids, k] for ids, k in plan]}
    verdict = "excluded" if any(c.total > 3 for c in tr.counts) else "admissible"
    report = _report(command, verdict, None,
                     {"steps": steps, "result": format_graph(tr.final).splitlines(),
                      "small_points": sorted(tr.final_small)})
    human = (_table(["step", "cycle", "k", "small", "V", "E"],
                    [[i + 1, ",".join(s["cycle"]), s["k"], s["small"], s["V"], s["E"]]
                     for i, s in enumerate(steps)])
             + "\n\n" + format_graph(tr.final))
    _emit(args, report, human)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    try:
        bounds = Bounds(args.max_vertices, args.max_edges, args.max_weight, args.max_cycles)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    res = sweep(bounds, args.threads, args.cover_depth)
    fam = match_families(res.admissible, max_weight=bounds.max_weight,
                         max_vertices=bounds.max_vertices, max_edges=bounds.max_edges)
    rows = []
    for g, found in fam.matches:
        ids = sorted({fid for fid, _ in found})
        rows.append([format_graph(g).replace("\n", "; "), ",".join(map(str, ids)) or "UNMATCHED"])
    command = {"name": "enumerate", "bounds": vars(bounds), "cover_depth": args.cover_depth}
    tables = {"checked": res.checked, "admissible": len(res.admissible),
              "excluded_by_rule": dict(sorted(res.excluded_by_rule.items())),
              "family_hits": {str(k): v for k, v in sorted(fam.hits.items())},
              "empty_families": list(fam.empty_families),
              "graphs": [{"graph": r[0], "families": r[1]} for r in rows]}
    verdict = "complete" if fam.ok else "incomplete"
    report = _report(command, verdict, None, tables)
    human = "\n".join([
        f"checked {res.checked} candidates, {len(res.admissible)} admissible",
        _table(["rule", "excluded"], sorted(res.excluded_by_rule.items())),
        "",
        _table(["family", "graphs"], sorted(fam.hits.items())),
        f"empty families: {list(fam.empty_families) or 'none'}",
        f"UNMATCHED graphs: {len(fam.unmatched)}",
    ])
    if args.list:
        human += "\n\n" + _table(["graph", "families"], rows)
    _emit(args, report, human)
    return EXIT_OK


def cmd_cohomology(args) -> int:
    target = args.case
    if target in SCENARIOS:
        scenario: CaseScenario | object = SCENARIOS[target]
    else:
        try:
            scenario = load_scenario(Path(target).read_text())
        except OSError:
            raise InputError(f"unknown case {target!r}; known: {', '.join(SCENARIOS)}") from None
        except SpecError as exc:
            raise InputError(f"{target}: {exc}") from None
    command = {"name": "cohomology", "case": target}
    if isinstance(scenario, CaseScenario):
        try:
            res = run_case(scenario)
        except SpecError as exc:
            raise InputError(str(exc)) from None
        d = res.to_dict()
        report = _report(command, res.verdict, None, {"solutions": d["solutions"]})
        rows = []
        for sol in d["solutions"]:
            pats = "; ".join(
                p["pattern"] + (f" [{p['hypothesis']}]" if p["hypothesis"] else "")
                + (f" -> N={','.join(p['reduced_patterns'])}" if p["via"] == "gysin" else "")
                for p in sol["patterns"]) or "-"
            rows.append(["(" + ",".join(map(str, sol["betti"])) + ")", pats])
        human = f"case {scenario.id} (dim {scenario.dim}): {res.verdict}"
        if rows:
            human += "\n\n" + _table(["betti", "patterns"], rows)
        _emit(args, report, human)
        return EXIT_EXCLUDED if res.verdict == "contradiction" else EXIT_OK
    try:
        sols = solve(scenario)
    except SpecError as exc:
        raise InputError(str(exc)) from None
    table = [{"values": dict(sorted(s.values.items())), "dims": list(s.dims(scenario))} for s in sols]
    verdict = "solved" if sols else "contradiction"
    report = _report(command, verdict, None, {"solutions": table})
    human = f"{len(sols)} solution(s)"
    if sols:
        names = list(scenario.variables)
        human += "\n\n" + _table(names, [[s.values.get(n, "") for n in names] for s in sols])
    _emit(args, report, human)
    return EXIT_OK if sols else EXIT_EXCLUDED


def cmd_families(args) -> int:
    if not args.files:
        rows = [[f.id, f.describe().split(": ", 1)[1]] for f in FAMILIES]
        report = _report({"name": "families", "files": []}, "listed", None,
                         {"families": [{"id": f.id, "pattern": r[1]} for f, r in zip(FAMILIES, rows)]})
        _emit(args, report, _table(["id", "pattern"], rows))
        return EXIT_OK
    graphs = [_read_graph(p) for p in args.files]
    bound = max([args.max_weight] + [int(e.weight) for g in graphs for e in g.edges])
    rep = match_families(graphs, max_weight=bound)
    rows = []
    for path, (g, found) in zip(args.files, rep.matches):
        rows.append([path, ",".join(str(fid) for fid in sorted({f for f, _ in found})) or "UNMATCHED"])
    report = _report({"name": "families", "files": list(args.files)},
                     "matched" if not rep.unmatched else "unmatched", None,
                     {"matches": [{"file": r[0], "families": r[1]} for r in rows]})
    _emit(args, report, _table(["file", "families"], rows))
    return EXIT_EXCLUDED if rep.unmatched else EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strata", description="Labeled singular graph classification tools.")
    p.add_argument("--version", action="version", version=f"strata {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("human", "json"), default="human")

    c = sub.add_parser("check", help="decide admissibility of a graph file")
    c.add_argument("file")
    c.add_argument("--knot", action="append", metavar="IDS=KNOT",
                   help="knot type of the cycle with these edge ids (unknot|trefoil)")
    c.add_argument("--cover-depth", type=int, default=COVER_DEPTH)
    c.add_argument("--order", help="comma-separated rule order, e.g. R1,R2,R3,R4,R5,R6,R7")
    fmt(c)
    c.set_defaults(fn=cmd_check)

    cv = sub.add_parser("cover", help="build iterated branched covers")
    cv.add_argument("file")
    cv.add_argument("--cycle", action="append", required=True, help="comma-separated edge ids")
    cv.add_argument("--k", action="append", type=int, required=True)
    fmt(cv)
    cv.set_defaults(fn=cmd_cover)

    e = sub.add_parser("enumerate", help="enumerate admissible graphs within bounds")
    d = Bounds()
    e.add_argument("--max-vertices", type=int, default=d.max_vertices)
    e.add_argument("--max-edges", type=int, default=d.max_edges)
    e.add_argument("--max-weight", type=int, default=d.max_weight)
    e.add_argument("--max-cycles", type=int, default=d.max_cycles)
    e.add_argument("--threads", type=int, default=None, help="worker processes (default: STRATA_THREADS or CPUs)")
    e.add_argument("--cover-depth", type=int, default=COVER_DEPTH)
    e.add_argument("--list", action="store_true", help="also list every admissible graph")
    fmt(e)
    e.set_defaults(fn=cmd_enumerate)

    h = sub.add_parser("cohomology", help="run a cohomology case or scenario file")
    h.add_argument("case", help=f"one of {', '.join(SCENARIOS)} or a JSON scenario file")
    fmt(h)
    h.set_defaults(fn=cmd_cohomology)

    f = sub.add_parser("families", help="match graph files to the families, or list them")
    f.add_argument("files", nargs="*")
    f.add_argument("--max-weight", type=int, default=7)
    fmt(f)
    f.set_defaults(fn=cmd_families)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
