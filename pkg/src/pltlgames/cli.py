"""Command-line front end: ``pltl-arena <subcommand> ...``.

Exit status 0 means the command ran and the answer is positive, 2 means a
negative answer (false, none, losing strategy) and 1 a usage or input error.
"""
from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import solve
from .automata import dump_automaton, pltl_f_pipeline
from .formula import (
    Formula, FormulaError, classify, expand_valuation, f_variables, g_variables, negate_nnf,
    parse_formula, variables,
)
from .game import ArenaError, dump_strategy, parse_arena, parse_strategy
from .parity import dump_solution, parse_parity_game, solve_parity

EXIT_OK, EXIT_ERROR, EXIT_NO = 0, 1, 2
MAX_BOUND_ENV = "PLTL_ARENA_MAX_BOUND"

log = logging.getLogger("pltlgames")


class UsageError(Exception):
    pass


@dataclass
class Report:
    """Ordered ``key = value`` pairs plus free text for the human format."""
    fields: dict = field(default_factory=dict)
    body: str = ""
    positive: bool = True

    def emit(self, fmt: str) -> str:
        if fmt == "record":
            out = "".join(f"{k} = {_fmt(v)}\n" for k, v in self.fields.items())
        else:
            out = "".join(f"{k.replace('_', ' ')}: {_fmt(v)}\n" for k, v in self.fields.items())
        return out + self.body


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return ",".join(f"{k}={x}" for k, x in sorted(v.items())) or "-"
    return str(v)


def parse_bindings(text: str | None) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for part in text.split(","):
        name, eq, value = part.strip().partition("=")
        if not eq or not name.strip():
            raise UsageError(f"bad binding {part!r}; expected name=value")
        try:
            n = int(value)
        except ValueError:
            raise UsageError(f"binding {part!r} needs a natural number") from None
        if n < 0:
            raise UsageError(f"binding {part!r} needs a natural number")
        out[name.strip()] = n
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _formula(arg: str) -> Formula:
    text = _read(arg) if os.path.isfile(arg) else arg
    return parse_formula(text.strip())


def _game(args) -> solve.PltlGame:
    return solve.PltlGame(parse_arena(_read(args.arena)), _formula(args.formula))


def _max_bound(args) -> int | None:
    if args.max_bound is not None:
        return args.max_bound
    env = os.environ.get(MAX_BOUND_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{MAX_BOUND_ENV} must be an integer") from None
    return None


def _valuation(args, phi: Formula) -> dict[str, int]:
    alpha = parse_bindings(args.val)
    missing = sorted(variables(phi) - set(alpha))
    if missing:
        raise UsageError(f"--val misses {', '.join(missing)}")
    return {z: alpha[z] for z in variables(phi)}


def _emit(args, phi: Formula, alpha) -> None:
    if not args.emit_automata:
        return
    write_pipeline(Path(args.emit_automata), phi, alpha)


def write_pipeline(out: Path, phi: Formula, alpha) -> list[Path]:
    """Dump every stage of the pipeline used for ``phi`` under ``alpha``."""
    out.mkdir(parents=True, exist_ok=True)
    if g_variables(phi) and f_variables(phi):
        phi, alpha = expand_valuation(phi, alpha), {}
    prefix = ""
    if g_variables(phi):
        phi, prefix = negate_nnf(phi), "neg-"
    p = pltl_f_pipeline(phi, alpha)
    files = []
    for name, text in ((f"{prefix}gnba.txt", dump_automaton(p.gnba)),
                       (f"{prefix}nba.txt", dump_automaton(p.nba)),
                       (f"{prefix}trimmed.txt", dump_automaton(p.trimmed, p.constraints)),
                       (f"{prefix}dpa.txt", dump_automaton(p.dpa))):
        (out / name).write_text(text)
        files.append(out / name)
    return files


# -- subcommands --------------------------------------------------------------

def cmd_member(args) -> Report:
    g = _game(args)
    alpha = _valuation(args, g.formula)
    res = solve.membership(g, args.player, alpha, blinking=args.blinking)
    _emit(args, g.formula, alpha)
    fields = {"result": res.holds, "winner": res.winner, "valuation": alpha,
              "product_vertices": res.product_size}
    fields.update(sorted(res.stats.sizes.items()))
    for i, note in enumerate(res.stats.notes):
        fields[f"note{i}"] = note
    return Report(fields, positive=res.holds)


def _decision(fn):
    def run(args) -> Report:
        g = _game(args)
        stats = solve.Stats()
        answer = bool(fn(g, args.player, stats))
        fields = {"result": answer, "class": classify(g.formula).value,
                  "queries": stats.queries}
        fields.update(sorted(stats.sizes.items()))
        return Report(fields, positive=answer)
    return run


cmd_empty = _decision(lambda g, p, s: solve.emptiness(g, p, s).empty)
cmd_universal = _decision(solve.universality)
cmd_finite = _decision(solve.finiteness)


def cmd_optimize(args) -> Report:
    g = _game(args)
    if args.player == 1:
        g = g.dual()
    res = solve.optimize_unipolar(g, args.objective, max_bound=_max_bound(args), jobs=args.jobs)
    solve.attach_strategy(g, res)
    if res.status is solve.Status.VALUE:
        _emit(args, g.formula, res.valuation)
    report = Report(res.record(), positive=res.status is not solve.Status.NONE)
    if res.status is solve.Status.NONE and res.capped:
        report.fields["message"] = f"no winning valuation <= {res.bound}"
    if args.strategy_out and res.strategy is not None:
        Path(args.strategy_out).write_text(dump_strategy(res.strategy, g.arena))
    return report


def cmd_synthesize(args) -> Report:
    g = _game(args)
    alpha = _valuation(args, g.formula)
    res = solve.membership(g, args.player, alpha)
    _emit(args, g.formula, alpha)
    if not res.holds:
        return Report({"result": False, "winner": res.winner}, positive=False)
    text = dump_strategy(res.strategy, g.arena)
    if args.strategy_out:
        Path(args.strategy_out).write_text(text)
        text = ""
    return Report({"result": True, "memory_states": res.strategy.memory.size,
                   "moves": len(res.strategy.moves)}, text)


def cmd_verify(args) -> Report:
    g = _game(args)
    alpha = _valuation(args, g.formula)
    strategy = parse_strategy(_read(args.strategy), g.arena, args.player)
    try:
        cex = solve.find_counterexample(g, args.player, alpha, strategy, args.blinking)
    except ArenaError as e:
        return Report({"result": False, "reason": str(e)}, positive=False)
    if cex is None:
        return Report({"result": True})
    return Report({"result": False,
                   "counterexample_prefix": " ".join(map(str, cex.prefix)) or "-",
                   "counterexample_cycle": " ".join(map(str, cex.cycle))}, positive=False)


def cmd_solve_parity(args) -> Report:
    path = args.game or args.game_opt
    if not path:
        raise UsageError("solve-parity needs a game file")
    g = parse_parity_game(_read(path))
    sol = solve_parity(g)
    winner = sol.winner(g.init)
    return Report({"winner": winner, "vertices": len(g), "priorities": g.num_priorities()},
                  dump_solution(g, sol))


def cmd_translate(args) -> Report:
    phi = _formula(args.formula)
    alpha = _valuation(args, phi)
    out = Path(args.emit_automata or args.out or ".")
    files = write_pipeline(out, phi, alpha)
    return Report({"class": classify(phi).value, "valuation": alpha,
                   "files": " ".join(str(f) for f in files)})


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "record"), default="record")
    common.add_argument("--max-bound", type=int, default=None,
                        help=f"cap on the search bound (env {MAX_BOUND_ENV})")
    common.add_argument("--emit-automata", metavar="DIR")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for sampling helpers; results do not depend on it")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    game = argparse.ArgumentParser(add_help=False)
    game.add_argument("--arena", required=True)
    game.add_argument("--formula", required=True, help="formula text or a file holding it")
    game.add_argument("--player", type=int, choices=(0, 1), default=0)

    val = argparse.ArgumentParser(add_help=False)
    val.add_argument("--val", default="", help="bindings such as x=3,y=0")
    blink = argparse.ArgumentParser(add_help=False)
    blink.add_argument("--blinking", action="store_true",
                       help="judge plays on even positions (color-expanded arenas)")

    p = argparse.ArgumentParser(prog="pltl-arena", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("member", parents=[common, game, val, blink]).set_defaults(fn=cmd_member)
    sub.add_parser("empty", parents=[common, game]).set_defaults(fn=cmd_empty)
    sub.add_parser("universal", parents=[common, game]).set_defaults(fn=cmd_universal)
    sub.add_parser("finite", parents=[common, game]).set_defaults(fn=cmd_finite)
    opt = sub.add_parser("optimize", parents=[common, game])
    opt.add_argument("--objective", required=True, choices=[o.value for o in solve.Objective])
    opt.add_argument("--strategy-out")
    opt.set_defaults(fn=cmd_optimize)
    syn = sub.add_parser("synthesize", parents=[common, game, val])
    syn.add_argument("--strategy-out")
    syn.set_defaults(fn=cmd_synthesize)
    ver = sub.add_parser("verify", parents=[common, game, val, blink])
    ver.add_argument("--strategy", required=True)
    ver.set_defaults(fn=cmd_verify)
    sp = sub.add_parser("solve-parity", parents=[common])
    sp.add_argument("game", nargs="?", help="parity game file")
    sp.add_argument("--game", dest="game_opt", metavar="GAME")
    sp.set_defaults(fn=cmd_solve_parity)
    tr = sub.add_parser("translate", parents=[common, val])
    tr.add_argument("--formula", required=True)
    tr.add_argument("--out", help="output directory (default: --emit-automata or .)")
    tr.set_defaults(fn=cmd_translate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    random.seed(args.seed)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        report = args.fn(args)
    except (UsageError, FormulaError, ArenaError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(report.emit(args.format))
    return EXIT_OK if report.positive else EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
