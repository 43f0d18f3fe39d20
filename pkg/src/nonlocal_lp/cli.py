"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 invalid certificate.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import games, nspolytope, oddcycle
from .errors import BudgetExceeded, GameError
from .rational import RationalFormatError, format_rational, parse_rational

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_CERT = 4

GAME_CATALOG = {
    "chsh": "two-player CHSH game (2 questions, 2 answers each)",
    "chsh3": "three-player CHSH game: A plays CHSH with B or with C",
    "oddcycle": "two-player odd cycle game; requires --n odd >= 3",
}


class UsageError(Exception):
    pass


class CertificateInvalid(Exception):
    def __init__(self, report):
        self.report = report
        super().__init__("certificate invalid")


def _emit_report(fields: dict, as_json: bool, out) -> None:
    if as_json:
        json.dump(fields, out, indent=1)
        out.write("\n")
    else:
        for key, value in fields.items():
            if isinstance(value, list):
                for item in value:
                    out.write(f"{key}: {item}\n")
            else:
                out.write(f"{key}: {value}\n")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def make_game(name: str, n: int | None, extend: int) -> games.Game:
    if name == "chsh":
        game = games.make_chsh()
    elif name == "chsh3":
        game = games.make_chsh_triangle()
    elif name == "oddcycle":
        if n is None:
            raise UsageError("oddcycle requires --n")
        try:
            game = games.make_odd_cycle(n)
        except GameError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError(f"unknown game {name!r}; choose from {', '.join(GAME_CATALOG)}")
    if name != "oddcycle" and n is not None:
        raise UsageError(f"--n does not apply to {name}")
    if extend:
        try:
            game = games.extend(game, extend)
        except GameError as exc:
            raise UsageError(str(exc)) from exc
    return game


def cmd_games(args, out) -> dict | None:
    if args.action == "list":
        for name, desc in GAME_CATALOG.items():
            out.write(f"{name}: {desc}\n")
        out.write("options: --extend K adds K clones of player 2 (two-player games only)\n")
        return None
    if not args.name:
        raise UsageError("emit needs a game name")
    if args.extend < 0:
        raise UsageError("--extend must be >= 0")
    game = make_game(args.name, args.n, args.extend)
    text = game.dumps() + "\n"
    if args.out:
        _write(args.out, text)
        return {"command": "games emit", "game": game.name, "players": game.players,
                "written": args.out}
    out.write(text)
    return None


def _load_game(path: str) -> games.Game:
    try:
        return games.Game.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_solve(args, out) -> dict:
    game = _load_game(args.game)
    fields = {"command": f"solve --value {args.value}", "game": game.name,
              "players": game.players}
    start = time.perf_counter()
    if args.value == "classical":
        if args.dual:
            raise UsageError("--dual only applies to --value ns")
        value, strategy = games.classical_value(game, budget=args.budget or games.DEFAULT_STRATEGY_BUDGET)
        fields["kind"] = "classical"
        fields["value"] = format_rational(value)
        fields["strategy"] = json.dumps([list(t) for t in strategy.tables])
        behavior = (nspolytope.Behavior.deterministic(strategy, game.question_sizes, game.answer_sizes)
                    if args.behavior else None)
    else:
        lp, sol = nspolytope.ns_solve(game, budget=args.budget or nspolytope.DEFAULT_LP_BUDGET)
        behavior = nspolytope.behavior_from_primal(lp, sol.primal, game.question_sizes, game.answer_sizes)
        fields["kind"] = "no-signaling"
        fields["value"] = format_rational(sol.value)
        if args.dual:
            duals = {label: format_rational(v) for label, v in sol.dual.items()}
            _write(args.dual, json.dumps(duals, indent=1) + "\n")
            fields["dual"] = args.dual
    if args.behavior:
        _write(args.behavior, behavior.dumps() + "\n")
        fields["behavior"] = args.behavior
    fields["wall_time"] = f"{time.perf_counter() - start:.3f}s"
    return fields


def cmd_oddcycle(args, out) -> dict:
    try:
        n = oddcycle.check_odd(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    fields = {"command": f"oddcycle --mode {args.mode}", "game": f"oddcycle{n}+ext1", "n": n}
    start = time.perf_counter()
    if args.mode == "reduced":
        fields["kind"] = "no-signaling (reduced LP)"
        fields["value"] = format_rational(oddcycle.reduced_ns_value(n))
    elif args.mode == "full":
        game = games.extend(games.make_odd_cycle(n), 1)
        value, _ = nspolytope.ns_value(game, budget=args.budget or nspolytope.DEFAULT_LP_BUDGET)
        fields["kind"] = "no-signaling (full LP)"
        fields["value"] = format_rational(value)
    else:
        if args.cert_in:
            try:
                cert = oddcycle.DualCertificate.loads(Path(args.cert_in).read_text())
            except OSError as exc:
                raise UsageError(f"cannot read {args.cert_in}: {exc}") from exc
            if cert.n != n:
                raise UsageError(f"certificate is for n={cert.n}, not n={n}")
            fields["certificate"] = args.cert_in
        else:
            cert = oddcycle.closed_form_certificate(n)
            if args.cert_out:
                _write(args.cert_out, cert.dumps() + "\n")
                fields["certificate"] = args.cert_out
        report = oddcycle.verify_certificate(cert)
        fields["kind"] = "certificate-bound"
        if not report.ok:
            fields["verification"] = "FAIL"
            fields["detail"] = report.describe()
            raise CertificateInvalid(fields)
        fields["value"] = format_rational(report.bound)
        fields["verification"] = "PASS"
        if report.warnings:
            fields["detail"] = report.describe()
    fields["wall_time"] = f"{time.perf_counter() - start:.3f}s"
    return fields


def _parse_weight(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"weight pair must look like 'a/b,c/d', got {text!r}")
    try:
        alpha, beta = (parse_rational(p.strip()) for p in parts)
    except RationalFormatError as exc:
        raise UsageError(str(exc)) from exc
    if not alpha and not beta:
        raise UsageError("weight pair (0,0) is not a direction")
    return alpha, beta


def cmd_frontier(args, out) -> dict:
    if args.weights:
        pairs = [_parse_weight(w) for w in args.weights]
    else:
        pairs = [(Fraction(a), Fraction(b)) for a, b in nspolytope.FRONTIER_DIRECTIONS]
    start = time.perf_counter()
    rows = []
    for alpha, beta in pairs:
        point = nspolytope.chsh_tradeoff_max(alpha, beta)
        rows.append((format_rational(alpha), format_rational(beta), format_rational(point.optimum)))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha", "beta", "value"])
            writer.writerows(rows)
    fields = {"command": "frontier", "kind": "no-signaling support value",
              "point": [f"alpha={a} beta={b} value={v}" for a, b, v in rows]}
    if args.out:
        fields["csv"] = args.out
    fields["wall_time"] = f"{time.perf_counter() - start:.3f}s"
    return fields


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-lp",
        description="Exact classical and no-signaling values of nonlocal games.",
    )
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("games", help="list or emit built-in games")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    p.add_argument("--n", type=int, help="odd cycle length")
    p.add_argument("--extend", type=int, default=0, metavar="K")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("solve", help="value of a game given as JSON")
    p.add_argument("game", help="game JSON file")
    p.add_argument("--value", choices=["classical", "ns"], required=True)
    p.add_argument("--behavior", metavar="PATH", help="write an optimal behavior")
    p.add_argument("--dual", metavar="PATH", help="write the LP dual multipliers")
    p.add_argument("--budget", type=int, help="strategy count (classical) or LP variables (ns)")

    p = sub.add_parser("oddcycle", help="extended odd cycle game")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["reduced", "full", "certificate"], required=True)
    p.add_argument("--cert-out", metavar="PATH", help="write the closed-form certificate")
    p.add_argument("--cert-in", metavar="PATH", help="verify this certificate instead")
    p.add_argument("--budget", type=int, help="LP variable budget for --mode full")

    p = sub.add_parser("frontier", help="support values of the CHSH tradeoff region")
    p.add_argument("--weights", nargs="+", metavar="A,B", help="direction pairs, e.g. 1,1 2,1 1/2,-1")
    p.add_argument("--out", metavar="CSV")
    return parser


COMMANDS = {
    "games": cmd_games,
    "solve": cmd_solve,
    "oddcycle": cmd_oddcycle,
    "frontier": cmd_frontier,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        fields = COMMANDS[args.command](args, out)
    except (UsageError, GameError, nspolytope.BehaviorError, oddcycle.CertificateError,
            RationalFormatError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except CertificateInvalid as exc:
        _emit_report(exc.report, args.json, out)
        return EXIT_CERT
    if fields is not None:
        _emit_report(fields, args.json, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
