"""Min-parity games: Zielonka's recursive solver, a brute-force oracle and a
strategy checker.

Games are stored with integer vertices ``0..n-1``; ``names`` keeps the
original ids for reporting.  Player 0 wins a play iff the least priority
seen infinitely often is even.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Mapping, Sequence

from . import _graph
from .game import Arena, ArenaError, dump_arena, make_arena, parse_arena


@dataclass(frozen=True, eq=False)
class ParityGame:
    owner: tuple[int, ...]
    succ: tuple[tuple[int, ...], ...]
    priority: tuple[int, ...]
    init: int = 0
    names: tuple = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(range(len(self.owner))))
        for v, out in enumerate(self.succ):
            if not out:
                raise ArenaError(f"vertex {self.names[v]!r} has no outgoing edge")
        if any(c < 0 for c in self.priority):
            raise ValueError("priorities must be non-negative")

    def __len__(self):
        return len(self.owner)

    @classmethod
    def from_arena(cls, a: Arena, priority: Mapping[Hashable, int]) -> "ParityGame":
        index = {v: i for i, v in enumerate(a.vertices)}
        return cls(tuple(a.owner[v] for v in a.vertices),
                   tuple(tuple(index[w] for w in a.succ[v]) for v in a.vertices),
                   tuple(priority[v] for v in a.vertices), index[a.init], tuple(a.vertices))

    def num_priorities(self) -> int:
        return len(set(self.priority))


@dataclass(frozen=True)
class Solution:
    regions: tuple[frozenset[int], frozenset[int]]
    # per player: vertex -> chosen successor, on the player's own vertices
    # inside the player's region
    strategies: tuple[dict[int, int], dict[int, int]]

    def winner(self, v: int) -> int:
        return 0 if v in self.regions[0] else 1


# -- Zielonka ------------------------------------------------------------------

def _attractor(g: ParityGame, pred, live: set[int], player: int, target: set[int]):
    """Attractor of ``target`` for ``player`` inside the subgame ``live``.

    Built layer by layer; a player vertex joining layer k+1 moves to its
    lowest-id successor among layers 0..k.
    """
    attr = set(target)
    strat: dict[int, int] = {}
    count = {v: sum(1 for w in g.succ[v] if w in live) for v in live}
    frontier = sorted(target)
    while frontier:
        candidates = set()
        for w in frontier:
            for v in pred[w]:
                if v not in live or v in attr:
                    continue
                if g.owner[v] == player:
                    candidates.add(v)
                else:
                    count[v] -= 1
                    if count[v] == 0:
                        candidates.add(v)
        for v in candidates:
            if g.owner[v] == player:
                strat[v] = min(w for w in g.succ[v] if w in attr)
        attr |= candidates
        frontier = sorted(candidates)
    return attr, strat


def _any_move(g: ParityGame, v: int, live: set[int]) -> int:
    return min(w for w in g.succ[v] if w in live)


def _zielonka(g: ParityGame, pred, live: set[int]):
    if not live:
        return (set(), set()), ({}, {})
    d = min(g.priority[v] for v in live)
    i = d % 2
    top = {v for v in live if g.priority[v] == d}
    a, astrat = _attractor(g, pred, live, i, top)
    (w_sub, s_sub) = _zielonka(g, pred, live - a)
    if not w_sub[1 - i]:
        strat_i = dict(s_sub[i])
        strat_i.update(astrat)
        for v in top:
            if g.owner[v] == i:
                strat_i[v] = _any_move(g, v, live)
        regions = [set(), set()]
        regions[i] = set(live)
        strategies = [{}, {}]
        strategies[i] = strat_i
        return tuple(regions), tuple(strategies)
    b, bstrat = _attractor(g, pred, live, 1 - i, w_sub[1 - i])
    (w2, s2) = _zielonka(g, pred, live - b)
    regions = [None, None]
    strategies = [None, None]
    regions[i] = w2[i]
    strategies[i] = dict(s2[i])
    opp = dict(s2[1 - i])
    opp.update(s_sub[1 - i])
    opp.update(bstrat)
    regions[1 - i] = w2[1 - i] | b
    strategies[1 - i] = opp
    return tuple(regions), tuple(strategies)


def solve_parity(g: ParityGame) -> Solution:
    """Winning regions and positional strategies for both players."""
    pred = _graph.reverse(g.succ)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(g) + 1000))
    try:
        regions, strategies = _zielonka(g, pred, set(range(len(g))))
    finally:
        sys.setrecursionlimit(limit)
    strategies = tuple({v: w for v, w in s.items() if g.owner[v] == p and v in regions[p]}
                       for p, s in enumerate(strategies))
    return Solution((frozenset(regions[0]), frozenset(regions[1])), strategies)


# -- checking strategies ------------------------------------------------------------

def _losing_for(g: ParityGame, adj: Sequence[Sequence[int]], player: int) -> set[int]:
    """Vertices of the one-player graph ``adj`` that can reach a cycle whose
    least priority has the opponent's parity."""
    bad: set[int] = set()
    for q in sorted(set(g.priority)):
        if q % 2 == player:
            continue
        keep = [v for v in range(len(adj)) if g.priority[v] >= q]
        pos = {v: i for i, v in enumerate(keep)}
        sub = [[pos[w] for w in adj[v] if w in pos] for v in keep]
        cyc = _graph.accepting_cycle_nodes(sub, [g.priority[v] == q for v in keep])
        bad |= {keep[i] for i in range(len(keep)) if cyc[i]}
    return _graph.reachable(_graph.reverse(adj), bad)


def _restricted(g: ParityGame, player: int, strategy: Mapping[int, int]):
    adj = []
    for v in range(len(g)):
        if g.owner[v] == player and v in strategy:
            w = strategy[v]
            if w not in g.succ[v]:
                name = g.names[w] if 0 <= w < len(g) else w
                raise ArenaError(f"strategy move {g.names[v]} -> {name} is not an edge")
            adj.append([w])
        else:
            adj.append(list(g.succ[v]))
    return adj


def verify_parity_strategy(g: ParityGame, player: int, strategy: Mapping[int, int],
                           region: frozenset[int] | None = None) -> bool:
    """Does ``strategy`` win every consistent play starting in ``region``?

    ``region`` defaults to the vertices where the strategy is defined plus
    the initial vertex.  Plays reaching a player vertex without a move are
    counted as lost.
    """
    if region is None:
        region = frozenset(strategy) | {g.init}
    adj = _restricted(g, player, strategy)
    reach = _graph.reachable(adj, region)
    if any(g.owner[v] == player and v not in strategy for v in reach):
        return False
    return not (reach & _losing_for(g, adj, player))


# -- brute force ------------------------------------------------------------

BRUTE_FORCE_LIMIT = 4096


def brute_force_parity(g: ParityGame, limit: int = BRUTE_FORCE_LIMIT) -> Solution:
    """Exact regions by enumerating positional strategies of one player.

    The enumerated player is the one with fewer strategy combinations; a
    vertex is theirs iff some enumerated strategy wins from it.
    """
    combos = [1, 1]
    for v in range(len(g)):
        combos[g.owner[v]] *= len(g.succ[v])
    p = 0 if combos[0] <= combos[1] else 1
    if combos[p] > limit:
        raise ValueError(f"{combos[p]} positional strategies exceed the limit of {limit}")
    mine = [v for v in range(len(g)) if g.owner[v] == p]
    won: set[int] = set()
    witness: dict[int, dict[int, int]] = {}
    for choice in product(*(g.succ[v] for v in mine)):
        strat = dict(zip(mine, choice))
        adj = _restricted(g, p, strat)
        wins = set(range(len(g))) - _losing_for(g, adj, p)
        for v in wins - won:
            witness[v] = strat
        won |= wins
    regions = [None, None]
    regions[p] = frozenset(won)
    regions[1 - p] = frozenset(range(len(g))) - won
    # a uniform strategy for p is not assembled here; the oracle reports regions
    strategies = [{}, {}]
    strategies[p] = {v: witness[v][v] for v in won if g.owner[v] == p}
    return Solution(tuple(regions), tuple(strategies))


# -- text format ----------------------------------------------------------------

def parse_parity_game(text: str) -> ParityGame:
    prios: dict[str, int] = {}

    def extra(n, words):
        if words[0] != "prio" or len(words) != 3:
            return False
        try:
            prios[words[1]] = int(words[2])
        except ValueError:
            raise ArenaError(f"line {n}: priority must be an integer") from None
        return True

    a = parse_arena(text, extra)
    missing = [v for v in a.vertices if v not in prios]
    if missing:
        raise ArenaError(f"vertex {missing[0]} has no priority")
    unknown = set(prios) - set(a.vertices)
    if unknown:
        raise ArenaError(f"priority for unknown vertex {sorted(unknown)[0]}")
    return ParityGame.from_arena(a, prios)


def dump_parity_game(g: ParityGame) -> str:
    vertices = {g.names[v]: (g.owner[v], ()) for v in range(len(g))}
    edges = [(g.names[v], g.names[w]) for v in range(len(g)) for w in g.succ[v]]
    text = dump_arena(make_arena(g.names[g.init], vertices, edges))
    return text + "".join(f"prio {g.names[v]} {g.priority[v]}\n" for v in range(len(g)))


def dump_solution(g: ParityGame, s: Solution) -> str:
    lines = []
    for p in (0, 1):
        names = " ".join(str(g.names[v]) for v in sorted(s.regions[p]))
        lines.append(f"region {p} = {names}")
    for p in (0, 1):
        for v in sorted(s.strategies[p]):
            lines.append(f"move {p} {g.names[v]} -> {g.names[s.strategies[p][v]]}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ParityGame", "Solution", "solve_parity", "brute_force_parity",
    "verify_parity_strategy", "parse_parity_game", "dump_parity_game", "dump_solution",
]
