"""Command-line front end: ``dwell <command> [options]``.

Every command produces a report made of named sections, each a list of
flat records, written as aligned text, CSV (one header per section) or
JSON (validated by ``data/report.schema.json``).  Exit status is 0 on
success, 2 on bad arguments and 3 when the f-iteration reports a breakdown.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from dwell import asymptotic, oracle, tables
from dwell.f_iter import f_solve
from dwell.model import ModelParams, State, check_trial_conditions
from dwell.quad import MIN_PANELS, build_grid
from dwell.tau_iter import DEFAULT_ITERS, DivergenceError, solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSTABLE = 3

COMMANDS = ("solve", "fsolve", "asym", "pyramid", "tables", "oracle", "check")

Section = Dict[str, object]


def default_panels() -> int:
    return int(os.environ.get("DWELL_PANELS", "64"))


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, (list, tuple)):
        # exact integers travel as decimal strings
        return [str(v) if isinstance(v, int) else _json_value(v) for v in value]
    return value


def render(command: str, sections: List[Section], style: str) -> str:
    if style == "json":
        doc = {
            "command": command,
            "sections": [
                {"name": s["name"],
                 "records": [{k: _json_value(v) for k, v in r.items()} for r in s["records"]]}
                for s in sections
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    out = io.StringIO()
    for i, sec in enumerate(sections):
        if i:
            out.write("\n")
        records = sec["records"]
        header = list(dict.fromkeys(k for r in records for k in r))
        if style == "csv":
            out.write(f"# {sec['name']}\n")
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            for r in records:
                writer.writerow(_flatten([r.get(k) if isinstance(r.get(k), list) else fmt(r.get(k))
                                          for k in header]))
        else:
            out.write(f"{sec['name']}\n")
            cells = [header] + [[_text_cell(r.get(k)) for k in header] for r in records]
            widths = [max(len(row[j]) for row in cells) for j in range(len(header))]
            for row in cells:
                out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return out.getvalue()


def _flatten(cells):
    flat = []
    for c in cells:
        if isinstance(c, list):
            flat.extend(fmt(v) for v in c)
        else:
            flat.append(c)
    return flat


def _text_cell(value) -> str:
    if isinstance(value, list):
        return " ".join(fmt(v) for v in value)
    return fmt(value) if value is not None else "-"


def _g_list(text: str) -> List[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("need at least one coupling")
    bad = [v for v in values if not v > 0.0]
    if bad:
        raise argparse.ArgumentTypeError(f"couplings must be positive, got {bad}")
    return values


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")


def _panels(text: str) -> int:
    n = int(text)
    if n < MIN_PANELS:
        raise argparse.ArgumentTypeError(f"need at least {MIN_PANELS} panels")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwell", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", default=None, help="write the report to this file")
    common.add_argument("--panels", type=_panels, default=None,
                        help="quadrature panels (default: $DWELL_PANELS or 64)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="tau-iteration energies")
    p.add_argument("--g", type=_g_list, required=True)
    p.add_argument("--state", choices=("ev", "plus"), default="ev")
    p.add_argument("--iters", type=int, default=DEFAULT_ITERS)

    p = sub.add_parser("fsolve", parents=[common], help="f-iteration energies")
    p.add_argument("--g", type=_g_list, required=True)
    p.add_argument("--state", choices=("ev", "plus"), default="ev")
    p.add_argument("--iters", type=int, default=tables.F_ITERS)

    p = sub.add_parser("asym", parents=[common], help="asymptotic series and plateau")
    p.add_argument("--g", type=_g_list, required=True)
    p.add_argument("--terms", type=int, default=40)
    p.add_argument("--delta", type=float, default=None,
                   help="plateau resolution (default: published precision for g, else 1e-4)")
    p.add_argument("--criterion", choices=("rounding", "increment"), default="rounding")

    p = sub.add_parser("pyramid", parents=[common], help="beta coefficient pyramid")
    p.add_argument("--rows", type=int, default=4)

    p = sub.add_parser("tables", parents=[common], help="reproduce the energy tables")
    p.add_argument("--which", type=_int_list, default=[1, 2, 3, 4])
    p.add_argument("--no-oracle", action="store_true")

    p = sub.add_parser("oracle", parents=[common], help="finite-difference ground energy")
    p.add_argument("--g", type=_g_list, required=True)
    p.add_argument("--points", type=int, default=4000)

    p = sub.add_parser("check", parents=[common], help="conditions on the perturbation w")
    p.add_argument("--g", type=_g_list, required=True)
    p.add_argument("--state", choices=("ev", "plus"), default="ev")
    return parser


def cmd_solve(args, panels) -> List[Section]:
    records = []
    for g in args.g:
        params = ModelParams(g, State(args.state))
        tr = solve(params, build_grid(params, panels), args.iters)
        rec = {"g": g, "state": args.state, "scheme": "tau"}
        rec.update({f"E{n}": e for n, e in enumerate(tr.energies, start=1)})
        rec["E_final"] = tr.e_final
        records.append(rec)
    return [{"name": "tau-iteration", "records": records}]


def cmd_fsolve(args, panels) -> List[Section]:
    records = []
    for g in args.g:
        params = ModelParams(g, State(args.state))
        tr = f_solve(params, build_grid(params, panels), args.iters)
        rec = {"g": g, "state": args.state, "scheme": "f"}
        rec.update({f"E{n}": e for n, e in enumerate(tr.energies, start=1)})
        bad = tr.instability
        rec.update({
            "stable": tr.stable,
            "unstable_step": None if bad is None else bad.step,
            "reason": None if bad is None else bad.reason,
            "min_f": None if bad is None else bad.min_f,
        })
        records.append(rec)
    return [{"name": "f-iteration", "records": records}]


def cmd_asym(args, panels) -> List[Section]:
    eps = asymptotic.epsilon_series(asymptotic.build_pyramid(max(args.terms, 2)), args.terms)
    sums, plateaus = [], []
    for g in args.g:
        delta = args.delta or tables.TABLE4_DELTA.get(g, tables.DEFAULT_DELTA)
        ps = asymptotic.partial_sums(eps, g)
        try:
            rep = asymptotic.plateau(eps, g, delta, args.criterion)
        except ValueError as exc:
            rep, note = None, str(exc)
        else:
            note = None
        for n, (term, total) in enumerate(zip(eps.terms, ps)):
            sums.append({"g": g, "N": n, "eps": term, "partial_sum": float(total),
                         "in_plateau": bool(rep and not rep.empty and rep.n_min <= n <= rep.n_max)})
        plateaus.append({
            "g": g, "delta": delta, "criterion": args.criterion,
            "N_best": None if rep is None else rep.n_best,
            "N_min": None if rep is None else rep.n_min,
            "N_max": None if rep is None else rep.n_max,
            "value": None if rep is None or rep.empty else rep.value,
            "rounded": None if rep is None else rep.rounded,
            "note": note,
        })
    return [{"name": "partial sums", "records": sums}, {"name": "plateau", "records": plateaus}]


def cmd_pyramid(args, panels) -> List[Section]:
    p = asymptotic.build_pyramid(args.rows)
    records = []
    for m in range(1, args.rows + 1):
        eps = asymptotic.epsilon(p, m)
        for part, rows in (("beta0", p.base), ("delta_beta", p.delta), ("beta", p.rows)):
            # printed with the highest l first, as in the published layout
            records.append({"m": m, "part": part, "epsilon": eps if part == "beta" else None,
                            "values_l_desc": list(reversed(rows[m - 1]))})
    return [{"name": "beta pyramid", "records": records}]


def cmd_tables(args, panels) -> List[Section]:
    sections = []
    for which in args.which:
        if which not in tables.TABLES:
            raise argparse.ArgumentTypeError(f"no table {which}")
        recs = tables.TABLES[which](panels, with_oracle=not args.no_oracle)
        sections.append({"name": f"table {which}", "records": recs})
    return sections


def cmd_oracle(args, panels) -> List[Section]:
    records = []
    for g in args.g:
        cfg = oracle.OracleConfig.for_coupling(g, args.points)
        records.append({"g": g, "half_width": cfg.half_width, "n_points": cfg.n_points,
                        "E_ev": oracle.ground_energy(g, cfg)})
    return [{"name": "finite-difference oracle", "records": records}]


def cmd_check(args, panels) -> List[Section]:
    records = []
    for g in args.g:
        params = ModelParams(g, State(args.state))
        rep = check_trial_conditions(params, build_grid(params, panels))
        records.append({"g": g, "state": args.state, "positive": rep.positive,
                        "decreasing": rep.decreasing, "decays": rep.decays,
                        "first_negative": rep.first_negative,
                        "first_increase": rep.first_increase,
                        "jump_at_one": rep.jump_at_one, "tail_value": rep.tail_value})
    return [{"name": "trial conditions", "records": records}]


HANDLERS = {
    "solve": cmd_solve, "fsolve": cmd_fsolve, "asym": cmd_asym, "pyramid": cmd_pyramid,
    "tables": cmd_tables, "oracle": cmd_oracle, "check": cmd_check,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    panels = args.panels or default_panels()
    try:
        sections = HANDLERS[args.command](args, panels)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"dwell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"dwell: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    text = render(args.command, sections, args.format)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"dwell: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    unstable = args.command == "fsolve" and any(
        not r["stable"] for s in sections for r in s["records"])
    return EXIT_UNSTABLE if unstable else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
