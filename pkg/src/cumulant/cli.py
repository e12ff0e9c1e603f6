"""Command-line entry point: ``cumulant <subcommand> ...``.

Exit status is 0 on success, 2 for invalid input and 3 when a move or node
budget is exhausted. ``CUMULANT_BUDGET`` overrides the budgets.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .core import BudgetExceeded, DimensionError, GroundedPosition, HeapPosition, IllegalActionError, TiePolicy, step
from .rulesets import (
    GameDocument,
    UnknownPresetError,
    ValidationError,
    parse_game_document,
)

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


def _budget() -> int | None:
    raw = os.environ.get("CUMULANT_BUDGET")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError:
        raise ValidationError([f"CUMULANT_BUDGET: not an integer: {raw!r}"]) from None
    if val <= 0:
        raise ValidationError(["CUMULANT_BUDGET: must be positive"])
    return val


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError([f"{path}: no such file"]) from None
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})"]) from None


def _load_game(path: str) -> GameDocument:
    return parse_game_document(_load_json(path))


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ValidationError([f"expected comma-separated integers, got {text!r}"]) from None


def _num(v):
    return int(v) if isinstance(v, float) and v.is_integer() else v


def _vec(v) -> str:
    return " ".join(str(_num(x)) for x in v)


def _emit(obj: Any, fmt: str, out, rows: list[list] | None = None, header: list[str] | None = None, text: str | None = None):
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        if rows is None:
            raise ValidationError(["--format: csv is not available for this command"])
        w = csv.writer(out, lineterminator="\n")
        if header:
            w.writerow(header)
        w.writerows(rows)
    else:
        out.write(text if text is not None else json.dumps(obj, sort_keys=True) + "\n")


# --- subcommands -------------------------------------------------------------------


def cmd_outcome(args, out) -> int:
    from .outcome import recursive_outcome, subtraction_outcome

    if args.file:
        doc = _load_game(args.file)
        game = doc.game(_budget())
        omap = recursive_outcome(game, doc.initial_heaps)
        rows = []
        for h in sorted(omap.matrices):
            for p, row in enumerate(omap.matrices[h], 1):
                rows.append([" ".join(map(str, h)), p] + [_num(v) for v in row])
        header = ["heaps", "previous"] + [f"o{i}" for i in range(1, game.n + 1)]
        obj = {"columns": header, "rows": rows}
        text = "".join(f"{r[0]} | prev {r[1]} | {_vec(r[2:])}\n" for r in rows)
        _emit(obj, args.format, out, rows, header, text)
        return EXIT_OK
    if not args.sets:
        raise ValidationError(["--sets: required without --file"])
    sets = [_ints(s) for s in args.sets]
    if args.preset != "fixed":
        raise UnknownPresetError(f"unknown preset {args.preset!r}")
    kind = "symmetric" if len(sets) == 1 else "partizan"
    if len(sets) > 2:
        raise ValidationError(["--sets: at most two sets"])
    table = subtraction_outcome(f"{args.variant}_{kind}", sets, args.max_heap, args.tie)
    header = ["heap"] + [c.replace("@", "_prev") for c in table.columns()]
    rows = table.to_rows()
    text = "".join(" ".join(str(v) for v in r) + "\n" for r in [header] + rows)
    _emit(table.to_json(), args.format, out, rows, header, text)
    return EXIT_OK


def cmd_pspe(args, out) -> int:
    from .efg import pspe

    doc = _load_game(args.file)
    game = doc.game(_budget())
    g0 = doc.start()
    res = pspe(game, g0)
    heaps = [list(p.heaps) for p in res.positions]
    obj = {"value": [_num(v) for v in res.value], "line": [list(a) for a in res.line], "heaps": heaps}
    text = f"value: {_vec(res.value)}\nline: {' '.join('(' + ','.join(map(str, a)) + ')' for a in res.line)}\nheaps: {' -> '.join(' '.join(map(str, h)) for h in heaps)}\n"
    rows = [[k, " ".join(map(str, a)), " ".join(map(str, heaps[k + 1]))] for k, a in enumerate(res.line)]
    _emit(obj, args.format, out, rows, ["move", "action", "heaps"], text)
    return EXIT_OK


def _script_moves(path: str) -> list[tuple[int | None, tuple[int, ...]]]:
    raw = _load_json(path)
    moves = raw.get("moves") if isinstance(raw, dict) else raw
    if not isinstance(moves, list):
        raise ValidationError(["$.moves: expected list"])
    out = []
    for k, m in enumerate(moves):
        if isinstance(m, dict) and isinstance(m.get("action"), list):
            out.append((m.get("player"), tuple(m["action"])))
        elif isinstance(m, list):
            out.append((None, tuple(m)))
        else:
            raise ValidationError([f"$.moves[{k}].action: expected list of integers"])
    return out


def cmd_play(args, out) -> int:
    doc = _load_game(args.file)
    game = doc.game(_budget())
    g = doc.start()
    lines = [f"start: {g.position}, player {game.current_player(g)} to move"]
    rows = []
    for k, (who, a) in enumerate(_script_moves(args.script), 1):
        cur = game.current_player(g)
        if who is not None and who != cur:
            raise ValidationError([f"$.moves[{k - 1}].player: expected {cur}, script says {who}"])
        try:
            g = step(game, g, a)
        except IllegalActionError as exc:
            raise ValidationError([f"$.moves[{k - 1}].action: {exc}"]) from None
        lines.append(f"{k}. player {cur}: {list(a)} -> {g.position}")
        rows.append([k, cur, " ".join(map(str, a)), " ".join(map(str, g.heaps))])
    terminal = game.is_terminal(g)
    u = game.terminal_utility(g) if terminal else None
    lines.append(f"player {game.current_player(g)} {'is stuck' if terminal else 'to move'}")
    if terminal:
        lines.append(f"utilities: {_vec(u)}")
    obj = {
        "moves": [{"player": r[1], "action": [int(t) for t in r[2].split()]} for r in rows],
        "heaps": list(g.heaps),
        "cumulation": [[_num(v) for v in r] for r in g.cumulation],
        "terminal": terminal,
        "utilities": None if u is None else [_num(v) for v in u],
    }
    _emit(obj, args.format, out, rows, ["move", "player", "action", "heaps"], "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_convert(args, out) -> int:
    from .efg import cg_to_efg, efg_from_json, efg_to_cg_cyclic, efg_to_cg_preorder, efg_to_json

    raw = _load_json(args.file)
    kind = raw.get("kind") if isinstance(raw, dict) else None
    if kind == "efg":
        efg = efg_from_json(raw)
        conv = efg_to_cg_preorder(efg) if args.method == "preorder" else efg_to_cg_cyclic(efg)
        obj = conv.document.to_json()
    else:
        doc = parse_game_document(raw)
        game = doc.game(_budget())
        obj = efg_to_json(cg_to_efg(game, doc.start(), node_budget=_budget()))
    _emit(obj, "json" if args.format != "text" else "text", out, text=json.dumps(obj, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_sum(args, out) -> int:
    from .algebra import disjunctive_sum
    from .efg import pspe

    if len(args.file) < 2:
        raise ValidationError(["--file: give at least two components"])
    docs = [_load_game(f) for f in args.file]
    budget = _budget()
    s = disjunctive_sum(*[(d.game(budget), HeapPosition(d.initial_heaps, d.initial_cumulation)) for d in docs])
    prev = args.previous or docs[0].previous_player
    res = pspe(s.game, s.ground(prev))
    obj = {
        "heaps": list(s.position.heaps),
        "offsets": list(s.offsets),
        "previous_player": prev,
        "value": [_num(v) for v in res.value],
        "line": [list(a) for a in res.line],
    }
    text = f"heaps: {_vec(s.position.heaps)}\nvalue: {_vec(res.value)}\nline: {' '.join(str(list(a)) for a in res.line)}\n"
    _emit(obj, args.format, out, [[_num(v) for v in res.value]], [f"u{i}" for i in range(1, s.game.n + 1)], text)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    from .algebra import compare_refute, single_heap_family

    if len(args.file) != 2:
        raise ValidationError(["--file: give exactly two games"])
    g, h = (_load_game(f) for f in args.file)
    budget = _budget()
    gg, hg = g.game(budget), h.game(budget)
    G = (gg, HeapPosition(g.initial_heaps, g.initial_cumulation))
    H = (hg, HeapPosition(h.initial_heaps, h.initial_cumulation))
    cert = compare_refute(G, H, args.player or 1, lambda: single_heap_family(gg, args.max_x))
    obj = cert.to_json()
    _emit(obj, args.format, out, text=f"{cert.verdict} ({cert.method}), checked {cert.checked}, witness {obj['witness']}, start {cert.start}\n")
    return EXIT_OK


def cmd_np(args, out) -> int:
    from .algebra import PartizanPosition, compare_refute, np_line, np_outcome_classes, negate

    left = _ints(args.left)
    right = _ints(args.right) if args.right else left
    if args.ge:
        gx, hx = _ints(args.ge)
        G = PartizanPosition.of(gx, left, right)
        H = PartizanPosition.of(hx, left, right)
        cert = compare_refute(G, H)
        sum_ = [G, negate(H)]
        obj = cert.to_json()
        obj["left_first"] = [list(m) for m in np_line(sum_, "L")]
        obj["right_first"] = [list(m) for m in np_line(sum_, "R")]
        text = f"{cert.verdict} ({cert.method})\nleft first: {obj['left_first']}\nright first: {obj['right_first']}\n"
        _emit(obj, args.format, out, text=text)
        return EXIT_OK
    t = np_outcome_classes(left, right, args.max_heap)
    rows = t.to_rows()
    header = ["heap", "class", "left_first_wins", "right_first_wins"]
    obj = {"left": list(t.left), "right": list(t.right), "columns": header, "rows": rows}
    text = " ".join(t.classes) + "\n"
    _emit(obj, args.format, out, rows, header, text)
    return EXIT_OK


def cmd_lab(args, out) -> int:
    from .lab import critical_set_scan, greedy_report, pareto_scan
    from .rulesets import UtilitySpec, build_game, fixed

    if args.study == "census":
        ties = ["antagonistic", "friendly"] if args.tie == "both" else [args.tie]
        bounds = list(_ints(args.sweep)) if args.sweep else [args.heap_bound]
        rows, obj = [], {}
        for tie in ties:
            ck = f"{args.checkpoint}.{tie}.json" if args.checkpoint else None
            rep = critical_set_scan(args.max_value, (2, 3), args.heap_bound, tie, args.workers, ck)
            obj[tie] = rep.to_json()
            obj[tie]["sweep"] = rep.sweep(bounds)
            rows.extend([tie, b, c] for b, c in rep.sweep(bounds))
        text = "".join(f"{r[0]} bound {r[1]}: {r[2]} critical sets\n" for r in rows)
        _emit(obj, args.format, out, rows, ["tie_policy", "heap_bound", "count"], text)
        return EXIT_OK
    if args.study == "pareto":
        S = _ints(args.sets)
        game = build_game(fixed(S), UtilitySpec("identity", args.tie if args.tie != "both" else "antagonistic"), 2, 1, _budget() or 10**6)
        rep = pareto_scan(game, GroundedPosition(HeapPosition.start((args.heap,), 2), 2))
        obj = rep.to_json()
        text = f"pspe: {_vec(rep.pspe_value)}\nefficient: {rep.efficient}\n"
        if rep.witness:
            text += f"witness: {_vec(rep.witness)} via {' '.join(str(-a[0]) for a in rep.witness_line)}\n"
        rows = [[_vec(u)] for u in rep.dominating]
        _emit(obj, args.format, out, rows, ["dominating"], text)
        return EXIT_OK
    rep = greedy_report(args.max_value, (2, 3), args.heap_bound)
    rows = [[" ".join(map(str, S)), "" if v is None else v] for S, v in rep.items()]
    obj = {"heap_bound": args.heap_bound, "last_nongreedy": {" ".join(map(str, S)): v for S, v in rep.items()}}
    _emit(obj, args.format, out, rows, ["set", "last_nongreedy_heap"], "".join(f"{r[0]}: {r[1]}\n" for r in rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cumulant", description="Solve and study cumulative games.")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp, default="text"):
        sp.add_argument("--format", choices=["csv", "json", "text"], default=default)

    o = sub.add_parser("outcome", help="outcome tables")
    o.add_argument("--preset", default="fixed")
    o.add_argument("--sets", action="append", help="comma-separated set; give twice for partizan play")
    o.add_argument("--variant", choices=["zs", "si"], default="si")
    o.add_argument("--tie", choices=["antagonistic", "friendly"], default="antagonistic")
    o.add_argument("--max-heap", type=int, default=20)
    o.add_argument("--file", help="game document; tabulates the recursive outcome from its start heaps")
    fmt(o)
    o.set_defaults(func=cmd_outcome)

    s = sub.add_parser("pspe", help="equilibrium value and line")
    s.add_argument("--file", required=True)
    fmt(s)
    s.set_defaults(func=cmd_pspe)

    pl = sub.add_parser("play", help="replay a scripted line")
    pl.add_argument("--file", required=True)
    pl.add_argument("--script", required=True)
    fmt(pl)
    pl.set_defaults(func=cmd_play)

    c = sub.add_parser("convert", help="cumulative game <-> extensive form")
    c.add_argument("--file", required=True)
    c.add_argument("--method", choices=["preorder", "cyclic"], default="preorder")
    fmt(c, "json")
    c.set_defaults(func=cmd_convert)

    sm = sub.add_parser("sum", help="disjunctive sum of game documents")
    sm.add_argument("--file", action="append", default=[])
    sm.add_argument("--previous", type=int)
    fmt(sm)
    sm.set_defaults(func=cmd_sum)

    cp = sub.add_parser("compare", help="bounded refutation of G >= H")
    cp.add_argument("--file", action="append", default=[])
    cp.add_argument("--player", type=int)
    cp.add_argument("--max-x", type=int, default=8)
    fmt(cp, "json")
    cp.set_defaults(func=cmd_compare)

    n = sub.add_parser("np", help="Normal-play classes and comparison")
    n.add_argument("--left", required=True)
    n.add_argument("--right")
    n.add_argument("--max-heap", type=int, default=20)
    n.add_argument("--ge", help="two heap sizes G,H: decide G >= H")
    fmt(n)
    n.set_defaults(func=cmd_np)

    lab = sub.add_parser("lab", help="empirical studies")
    lab.add_argument("study", choices=["census", "pareto", "greedy"])
    lab.add_argument("--max-value", type=int, default=20)
    lab.add_argument("--heap-bound", type=int, default=200)
    lab.add_argument("--sweep", help="comma-separated heap bounds to report counts at")
    lab.add_argument("--tie", choices=["antagonistic", "friendly", "both"], default="both")
    lab.add_argument("--workers", type=int)
    lab.add_argument("--checkpoint")
    lab.add_argument("--sets", default="2,3")
    lab.add_argument("--heap", type=int, default=30)
    fmt(lab)
    lab.set_defaults(func=cmd_lab)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ValidationError as exc:
        for path in exc.paths:
            err.write(f"error: {path}\n")
        return EXIT_INVALID
    except (UnknownPresetError, DimensionError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
