"""Decision and optimization problems for PLTL games.

Everything reduces to parity games: a deterministic parity automaton for
the winning condition (under a fixed valuation) is run as memory alongside
the arena, and the product is solved with Zielonka's algorithm.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Mapping

from . import _graph
from .automata import (
    DPA, complement_dpa, degeneralize, build_gnba, encode_letter, pltl_f_pipeline,
    remove_unproductive,
)
from .formula import (
    Formula, FormulaClass, FormulaError, atoms, alternating_color_rewrite, classify,
    expand_valuation, f_variables, g_variables, negate_nnf, project_variable,
    strip_always, unify_variables, variables,
)
from .game import (
    Arena, ArenaError, MealyStrategy, MemoryStructure, PlayLasso, dpa_to_memory,
    dual_game, expand_alternating_color, product_with_memory,
)
from .parity import ParityGame, solve_parity

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PltlGame:
    arena: Arena
    formula: Formula

    @property
    def cls(self) -> FormulaClass:
        return classify(self.formula)

    def dual(self) -> "PltlGame":
        return PltlGame(*dual_game(self.arena, self.formula))


@dataclass
class Stats:
    """Sizes of the largest objects built and the number of games solved."""
    queries: int = 0
    sizes: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def record(self, **sizes: int) -> None:
        self.queries += 1
        for k, v in sizes.items():
            self.sizes[k] = max(self.sizes.get(k, 0), v)

    def merge(self, other: "Stats") -> None:
        self.queries += other.queries
        for k, v in other.sizes.items():
            self.sizes[k] = max(self.sizes.get(k, 0), v)
        self.notes += [n for n in other.notes if n not in self.notes]


# -- the condition automaton -------------------------------------------------

def _key(alpha: Mapping[str, int]):
    return tuple(sorted(alpha.items()))


@lru_cache(maxsize=256)
def _condition_dpa(phi: Formula, alpha_key: tuple) -> tuple[DPA, str, dict]:
    """DPA for ``{w | (w, 0, alpha) |= phi}`` and the route taken."""
    alpha = dict(alpha_key)
    if not g_variables(phi):
        p = pltl_f_pipeline(phi, alpha)
        return p.dpa, "counters", p.sizes()
    if not f_variables(phi):
        p = pltl_f_pipeline(negate_nnf(phi), alpha)
        return complement_dpa(p.dpa), "complemented counters", p.sizes()
    p = pltl_f_pipeline(expand_valuation(phi, alpha), {})
    return p.dpa, "expanded", p.sizes()


def condition_dpa(phi: Formula, alpha: Mapping[str, int], expand: bool = False) -> DPA:
    """Parity automaton for ``phi`` under ``alpha``.

    With ``expand`` the bounds are unrolled first and no counters are used,
    which gives an independent second route.
    """
    _check_valuation(phi, alpha)
    alpha = {z: alpha[z] for z in variables(phi)}
    if expand:
        return _condition_dpa(expand_valuation(phi, alpha), ())[0]
    return _condition_dpa(phi, _key(alpha))[0]


def _check_valuation(phi: Formula, alpha: Mapping[str, int]) -> None:
    missing = variables(phi) - set(alpha)
    if missing:
        raise FormulaError(f"valuation misses {', '.join(sorted(missing))}")
    bad = [z for z in variables(phi) if not isinstance(alpha[z], int) or alpha[z] < 0]
    if bad:
        raise FormulaError(f"valuation of {bad[0]} must be a natural number")


# -- membership ----------------------------------------------------------------

@dataclass
class Membership:
    holds: bool          # the asked player wins
    winner: int
    strategy: MealyStrategy
    product_size: int
    stats: Stats

    def __iter__(self):  # allows ``holds, strategy = membership(...)``
        return iter((self.holds, self.strategy))

    def __bool__(self):
        return self.holds


def _solve_with_dpa(arena: Arena, dpa: DPA, blinking: bool):
    mem, prio = dpa_to_memory(dpa, arena, blinking)
    prod = product_with_memory(arena, mem)
    pg = ParityGame.from_arena(prod, {n: prio(*n) for n in prod.vertices})
    sol = solve_parity(pg)
    winner = sol.winner(pg.init)
    moves = {}
    for v, w in sol.strategies[winner].items():
        (s, m), (t, _) = pg.names[v], pg.names[w]
        moves[(s, m)] = t
    return winner, MealyStrategy(winner, mem, moves), len(prod), len(set(pg.priority))


def membership(g: PltlGame, player: int, alpha: Mapping[str, int], blinking: bool = False,
               expand: bool = False, stats: Stats | None = None) -> Membership:
    """Does ``player`` win ``g`` with respect to ``alpha``?

    The returned strategy belongs to the actual winner.
    """
    if player not in (0, 1):
        raise ValueError("player must be 0 or 1")
    stats = stats if stats is not None else Stats()
    _check_valuation(g.formula, alpha)
    alpha = {z: alpha[z] for z in variables(g.formula)}
    key = expand_valuation(g.formula, alpha) if expand else g.formula
    dpa, route, sizes = _condition_dpa(key, () if expand else _key(alpha))
    if route == "expanded" and "mixed polarity: bounds unrolled" not in stats.notes:
        stats.notes.append("mixed polarity: bounds unrolled")
    winner, strategy, n, prios = _solve_with_dpa(g.arena, dpa, blinking)
    stats.record(**sizes, product_vertices=n, priorities=prios)
    log.debug("membership %s alpha=%s route=%s product=%d winner=%d",
              g.formula, alpha, route, n, winner)
    return Membership(winner == player, winner, strategy, n, stats)


def synthesize_strategy(g: PltlGame, player: int, alpha: Mapping[str, int],
                        blinking: bool = False) -> MealyStrategy:
    res = membership(g, player, alpha, blinking)
    if not res.holds:
        raise ValueError(f"Player {player} does not win with respect to {dict(alpha)}")
    return res.strategy


# -- independent strategy check ------------------------------------------------

def _strategy_graph(a: Arena, s: MealyStrategy):
    s.check_edges(a)
    mem = s.memory

    def successors(node):
        v, m = node
        if a.owner[v] != s.player:
            targets = a.succ[v]
        elif len(a.succ[v]) == 1:  # forced moves need not be listed
            targets = (s.moves.get((v, m), a.succ[v][0]),)
        else:
            targets = (s.next_move(v, m),)
        for w in targets:
            yield (w, mem.update(m, w))

    return _graph.explore([(a.init, mem.initial)], successors)


def find_counterexample(g: PltlGame, player: int, alpha: Mapping[str, int],
                        s: MealyStrategy, blinking: bool = False) -> PlayLasso | None:
    """A play consistent with ``s`` that ``player`` loses, or None.

    Uses only the arena, the strategy and a Büchi automaton for the losing
    condition with all bounds unrolled.
    """
    if s.player != player:
        raise ValueError("strategy belongs to the other player")
    _check_valuation(g.formula, alpha)
    ltl = expand_valuation(g.formula, alpha)
    bad = negate_nnf(ltl) if player == 0 else ltl
    gnba = build_gnba(bad)
    nba = remove_unproductive(degeneralize(gnba)[0])
    a = g.arena
    nodes, _, adj = _strategy_graph(a, s)
    skip = a.edge_nodes if blinking else frozenset()
    letter = {v: encode_letter(a.labels[v], nba.ap) for v in a.vertices}

    # (i, q): the automaton is in q and reads vertex nodes[i] next
    def successors(node):
        i, q = node
        v = nodes[i][0]
        qs = (q,) if v in skip else nba.successors(q, letter[v])
        for j in adj[i]:
            for q2 in qs:
                yield (j, q2)

    start = [(0, q) for q in sorted(nba.initial)]
    pnodes, _, padj = _graph.explore(start, successors)
    acc = [q in nba.accepting for _, q in pnodes]
    good = _graph.accepting_cycle_nodes(padj, acc)
    targets = {i for i in range(len(pnodes)) if good[i] and acc[i]}
    for root in range(len(start)):
        found = _graph.lasso_through(padj, root, targets)
        if found is not None:
            stem, loop = found
            vs = lambda ids: tuple(nodes[pnodes[i][0]][0] for i in ids)
            return PlayLasso(vs(stem), vs(loop))
    return None


def verify_strategy(g: PltlGame, player: int, alpha: Mapping[str, int], s: MealyStrategy,
                    blinking: bool = False) -> bool:
    """Does every play consistent with ``s`` satisfy the player's objective?"""
    try:
        return find_counterexample(g, player, alpha, s, blinking) is None
    except ArenaError:
        return False


# -- emptiness, universality, finiteness ------------------------------------------

def fresh_color(g: PltlGame) -> str:
    used = atoms(g.formula) | g.arena.propositions()
    name, i = "c", 0
    while name in used:
        name, i = f"c{i}", i + 1
    return name


@dataclass
class EmptinessResult:
    empty: bool
    product_size: int
    stats: Stats

    def __bool__(self):
        return self.empty


def _emptiness0(g: PltlGame, stats: Stats) -> EmptinessResult:
    phi_f = strip_always(g.formula)
    if not variables(phi_f):
        # Nothing left to bound: W0 is empty iff Player 0 loses the LTL game.
        res = membership(PltlGame(g.arena, phi_f), 0, {}, stats=stats)
        return EmptinessResult(not res.holds, res.product_size, stats)
    x = min(variables(phi_f))
    color = fresh_color(g)
    psi = alternating_color_rewrite(unify_variables(phi_f, x), (), color)
    expanded = expand_alternating_color(g.arena, color)
    res = membership(PltlGame(expanded, psi), 0, {}, blinking=True, stats=stats)
    return EmptinessResult(not res.holds, res.product_size, stats)


def emptiness(g: PltlGame, player: int = 0, stats: Stats | None = None) -> EmptinessResult:
    """Is the set of valuations winning for ``player`` empty?"""
    stats = stats if stats is not None else Stats()
    return _emptiness0(g if player == 0 else g.dual(), stats)


def universality(g: PltlGame, player: int = 0, stats: Stats | None = None) -> bool:
    """Is every valuation winning for ``player``?"""
    return emptiness(g, 1 - player, stats).empty


def finiteness(g: PltlGame, player: int = 0, stats: Stats | None = None) -> bool:
    """Is the set of valuations winning for ``player`` finite?"""
    stats = stats if stats is not None else Stats()
    if player == 1:
        return finiteness(g.dual(), 0, stats)
    phi = g.formula
    if not variables(phi):
        return True
    if f_variables(phi):
        return emptiness(g, 0, stats).empty
    return not any(universality(PltlGame(g.arena, project_variable(phi, y)), 0, stats)
                   for y in sorted(variables(phi)))


# -- optimization ---------------------------------------------------------------

class Status(Enum):
    VALUE = "value"
    NONE = "none"
    UNBOUNDED = "unbounded"


@dataclass
class OptimizationResult:
    status: Status
    value: int | None = None
    valuation: dict | None = None
    strategy: MealyStrategy | None = None
    stats: Stats = field(default_factory=Stats)
    bound: int | None = None
    capped: bool = False  # search stopped at a user cap rather than the computed bound
    blinking: bool = False

    def record(self) -> dict:
        out = {"status": self.status.value}
        if self.value is not None:
            out["value"] = self.value
        if self.valuation is not None:
            out["valuation"] = ",".join(f"{k}={v}" for k, v in sorted(self.valuation.items()))
        if self.bound is not None:
            out["bound"] = self.bound
        if self.capped:
            out["capped"] = "true"
        out["queries"] = self.stats.queries
        out.update(sorted(self.stats.sizes.items()))
        for i, note in enumerate(self.stats.notes):
            out[f"note{i}"] = note
        return out


@dataclass
class SearchBound:
    bound: int
    product_size: int


class BoundError(RuntimeError):
    """The computed search bound did not contain a winning valuation."""


def compute_search_bound(g: PltlGame, stats: Stats | None = None,
                         emptiness_result: EmptinessResult | None = None) -> SearchBound:
    """Upper bound on the least winning PROMPT value, from the size of the
    parity game solved for emptiness."""
    res = emptiness_result or emptiness(g, 0, stats)
    if res.empty:
        raise ValueError("no winning valuation exists; the search bound is undefined")
    return SearchBound(2 * (res.product_size + 1), res.product_size)


def _least(test: Callable[[int], bool], hi: int) -> int | None:
    """Least n in [0, hi] with test(n), for monotone ``test``; None if none.

    Probes 0, 1, 2, 4, ... before bisecting, so small answers never pay for
    the large automata that values near ``hi`` need.
    """
    lo, probe = 0, 0
    while not test(probe):
        if probe >= hi:
            return None
        lo = probe + 1
        probe = min(hi, max(1, 2 * probe))
    hi = probe
    while lo < hi:
        mid = (lo + hi) // 2
        if test(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def prompt_optimum(g: PltlGame, blinking: bool = False, max_bound: int | None = None,
                   stats: Stats | None = None, bound: int | None = None) -> OptimizationResult:
    """Least ``n`` such that Player 0 wins with every variable set to ``n``.

    ``g`` must have a single F<= variable.  ``bound`` overrides the computed
    search bound (used for blinking subgames); ``max_bound`` caps it.
    """
    stats = stats if stats is not None else Stats()
    fv = f_variables(g.formula)
    if len(fv) != 1 or g_variables(g.formula):
        raise FormulaError("prompt_optimum needs exactly one F<= variable and no G<=")
    (x,) = fv
    if bound is None:
        e = emptiness(g, 0, stats)
        if e.empty:
            return OptimizationResult(Status.NONE, stats=stats, blinking=blinking)
        bound = compute_search_bound(g, stats, e).bound
    hi, capped = bound, False
    if max_bound is not None and max_bound < bound:
        hi, capped = max_bound, True
    wins: dict[int, Membership] = {}

    def test(n):
        r = membership(g, 0, {x: n}, blinking=blinking, stats=stats)
        if r.holds:
            wins[n] = r
        return r.holds

    n = _least(test, hi)
    if n is None:
        if not capped and not blinking:
            raise BoundError(f"no winning value up to the computed bound {bound}")
        return OptimizationResult(Status.NONE, stats=stats, bound=hi, capped=capped,
                                  blinking=blinking)
    return OptimizationResult(Status.VALUE, n, {x: n}, wins[n].strategy, stats, hi, capped,
                              blinking)


class Objective(Enum):
    MIN_MIN = "min-min"
    MIN_MAX = "min-max"
    MAX_MAX = "max-max"
    MAX_MIN = "max-min"


def _map_jobs(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def optimize_unipolar(g: PltlGame, objective: Objective | str, max_bound: int | None = None,
                      jobs: int = 1) -> OptimizationResult:
    """Optimal valuation for Player 0 in a unipolar game.

    For Player 1 optimize the dual game instead.
    """
    objective = Objective(objective)
    phi = g.formula
    fv, gv = f_variables(phi), g_variables(phi)
    if fv and gv:
        raise FormulaError("optimization needs a unipolar formula")
    if objective in (Objective.MIN_MIN, Objective.MIN_MAX):
        if gv or not fv:
            raise FormulaError(f"{objective.value} needs F<= variables only")
        if objective is Objective.MIN_MAX:
            return _min_max(g, max_bound)
        return _min_min(g, max_bound, jobs)
    if fv or not gv:
        raise FormulaError(f"{objective.value} needs G<= variables only")
    if objective is Objective.MAX_MIN:
        return _max_single(PltlGame(g.arena, unify_variables(phi, min(gv))), gv, max_bound)
    return _max_max(g, max_bound, jobs)


def _min_max(g: PltlGame, max_bound):
    phi = g.formula
    x = min(f_variables(phi))
    res = prompt_optimum(PltlGame(g.arena, unify_variables(phi, x)), max_bound=max_bound)
    if res.status is Status.VALUE:
        res.valuation = {z: res.value for z in f_variables(phi)}
        res.strategy = membership(g, 0, res.valuation, stats=res.stats).strategy
    return res


def _min_min(g: PltlGame, max_bound, jobs):
    phi = g.formula
    stats = Stats()
    unified = PltlGame(g.arena, unify_variables(phi, min(f_variables(phi))))
    e = emptiness(unified, 0, stats)
    if e.empty:
        return OptimizationResult(Status.NONE, stats=stats)
    bound = compute_search_bound(unified, stats, e).bound
    color = fresh_color(g)
    expanded = expand_alternating_color(g.arena, color)

    def per_variable(x):
        sub = PltlGame(expanded, alternating_color_rewrite(phi, {x}, color))
        return x, prompt_optimum(sub, blinking=True, max_bound=max_bound, bound=bound)

    results = _map_jobs(per_variable, sorted(f_variables(phi)), jobs)
    for _, r in results:
        stats.merge(r.stats)
    found = [(r.value, x, r) for x, r in results if r.status is Status.VALUE]
    capped = any(r.capped for _, r in results)
    if not found:
        if capped:
            return OptimizationResult(Status.NONE, stats=stats, bound=max_bound, capped=True)
        raise BoundError(f"no variable reaches a winning value up to the bound {bound}")
    n, x, best = min(found)
    others = sorted(f_variables(phi) - {x})
    if not others:
        m = membership(g, 0, {x: n}, stats=stats)
        return OptimizationResult(Status.VALUE, n, {x: n}, m.strategy, stats, bound)
    # Any large enough uniform bound on the remaining variables works; find the least.
    limit = 2 * (best.strategy.memory.size * len(expanded) + 1)
    wins: dict[int, Membership] = {}

    def test(k):
        alpha = {z: k for z in others}
        alpha[x] = n
        r = membership(g, 0, alpha, stats=stats)
        if r.holds:
            wins[k] = r
        return r.holds

    k = _least(test, limit)
    if k is None:
        raise BoundError(f"no witness for the remaining variables up to {limit}")
    alpha = {z: k for z in others}
    alpha[x] = n
    return OptimizationResult(Status.VALUE, n, alpha, wins[k].strategy, stats, bound)


def _max_single(g: PltlGame, all_vars, max_bound, fill: Mapping[str, int] | None = None):
    """Largest uniform value winning a single-variable PLTL_G game, via the
    least value winning its dual (a PROMPT game)."""
    (y,) = g_variables(g.formula)
    dual = g.dual()
    res = prompt_optimum(dual, max_bound=max_bound)
    stats = res.stats
    if res.status is Status.NONE:
        if res.capped:
            # every value up to the cap wins for Player 0
            return OptimizationResult(Status.NONE, stats=stats, bound=res.bound, capped=True)
        return OptimizationResult(Status.UNBOUNDED, stats=stats)
    if res.value == 0:
        return OptimizationResult(Status.NONE, stats=stats, bound=res.bound)
    n = res.value - 1
    alpha = {z: n for z in all_vars}
    if fill:
        alpha.update(fill)
    return OptimizationResult(Status.VALUE, n, alpha, None, stats, res.bound)


def _max_max(g: PltlGame, max_bound, jobs):
    phi = g.formula
    gv = sorted(g_variables(phi))

    def per_variable(y):
        sub = PltlGame(g.arena, project_variable(phi, y))
        return y, _max_single(sub, [y], max_bound, {z: 0 for z in gv if z != y})

    results = _map_jobs(per_variable, gv, jobs)
    stats = Stats()
    for _, r in results:
        stats.merge(r.stats)
    if any(r.status is Status.UNBOUNDED for _, r in results):
        return OptimizationResult(Status.UNBOUNDED, stats=stats)
    found = [(r.value, y, r) for y, r in results if r.status is Status.VALUE]
    if not found:
        return OptimizationResult(Status.NONE, stats=stats,
                                  capped=any(r.capped for _, r in results))
    n = max(v for v, _, _ in found)
    y, best = next((y, r) for v, y, r in found if v == n)
    best.stats = stats
    return best


def attach_strategy(g: PltlGame, res: OptimizationResult) -> OptimizationResult:
    """Fill in a winning strategy at the result's valuation when missing."""
    if res.status is Status.VALUE and res.strategy is None:
        res.strategy = membership(g, 0, res.valuation, stats=res.stats).strategy
    return res


__all__ = [
    "PltlGame", "Stats", "Membership", "membership", "synthesize_strategy",
    "verify_strategy", "find_counterexample", "emptiness", "universality", "finiteness",
    "compute_search_bound", "SearchBound", "prompt_optimum", "optimize_unipolar",
    "Objective", "OptimizationResult", "Status", "BoundError", "condition_dpa",
    "fresh_color", "attach_strategy",
]
