"""Arenas, plays, memory structures and the products built from them.

Vertex ids are arbitrary hashables (strings when parsed from text).  The
alternating-color arena uses ``(v, 0)``/``(v, 1)`` for vertex copies and
``Edge(v, w)`` for the intermediate edge vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from . import _graph
from .automata import DPA, encode_letter
from .formula import Formula, LassoWord, negate_nnf

Vertex = Hashable


class ArenaError(ValueError):
    """Malformed arena, strategy or play."""


class Edge(NamedTuple):
    """Edge vertex of the alternating-color arena."""
    src: Vertex
    dst: Vertex

    def __str__(self):
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True, eq=False)
class Arena:
    vertices: tuple
    owner: Mapping[Vertex, int]
    succ: Mapping[Vertex, tuple]
    init: Vertex
    labels: Mapping[Vertex, frozenset]
    # vertices of the edge partition when the arena is bipartite by
    # construction (see expand_alternating_color); empty otherwise
    edge_nodes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise ArenaError("duplicate vertex")
        if self.init not in known:
            raise ArenaError(f"initial vertex {self.init!r} is not a vertex")
        for v in self.vertices:
            if self.owner.get(v) not in (0, 1):
                raise ArenaError(f"vertex {v!r} needs owner 0 or 1")
            out = self.succ.get(v, ())
            if not out:
                raise ArenaError(f"vertex {v!r} has no outgoing edge")
            for w in out:
                if w not in known:
                    raise ArenaError(f"edge {v!r} -> {w!r} leaves the arena")

    def __len__(self):
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple]:
        return [(v, w) for v in self.vertices for w in self.succ[v]]

    def propositions(self) -> frozenset:
        return frozenset().union(*self.labels.values())

    def with_owners(self, owner: Mapping[Vertex, int]) -> "Arena":
        return Arena(self.vertices, dict(owner), self.succ, self.init, self.labels, self.edge_nodes)

    def relabel(self, labels: Mapping[Vertex, Iterable[str]]) -> "Arena":
        full = {v: frozenset(labels.get(v, ())) for v in self.vertices}
        return Arena(self.vertices, self.owner, self.succ, self.init, full, self.edge_nodes)


def make_arena(init: Vertex, vertices: Mapping[Vertex, tuple[int, Iterable[str]]],
               edges: Iterable[tuple[Vertex, Vertex]]) -> Arena:
    """Convenience constructor: ``vertices`` maps id to ``(owner, label)``."""
    succ: dict = {v: [] for v in vertices}
    for v, w in edges:
        if v not in succ:
            raise ArenaError(f"edge from unknown vertex {v!r}")
        if w not in succ[v]:
            succ[v].append(w)
    return Arena(tuple(vertices), {v: o for v, (o, _) in vertices.items()},
                 {v: tuple(out) for v, out in succ.items()}, init,
                 {v: frozenset(lab) for v, (_, lab) in vertices.items()})


# -- text format -------------------------------------------------------------

def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def parse_arena(text: str, extra: Callable[[int, list[str]], bool] | None = None) -> Arena:
    """Parse the line format ``init``/``vertex``/``edge``.

    ``extra`` gets a chance at unknown keywords (used for ``prio`` lines);
    it returns False to reject the line.
    """
    init = None
    vertices: dict = {}
    edges = []
    for n, words in _lines(text):
        key = words[0]
        if key == "init" and len(words) == 2:
            init = words[1]
        elif key == "vertex" and len(words) in (3, 5):
            v, own = words[1], words[2]
            if own not in ("0", "1"):
                raise ArenaError(f"line {n}: owner must be 0 or 1")
            if v in vertices:
                raise ArenaError(f"line {n}: vertex {v} declared twice")
            label: list[str] = []
            if len(words) == 5:
                if words[3] != "label":
                    raise ArenaError(f"line {n}: expected 'label'")
                label = [p for p in words[4].split(",") if p]
            vertices[v] = (int(own), label)
        elif key == "edge" and len(words) == 3:
            for w in words[1:]:
                if w not in vertices:
                    raise ArenaError(f"line {n}: unknown vertex {w}")
            edges.append((words[1], words[2]))
        elif extra is None or not extra(n, words):
            raise ArenaError(f"line {n}: cannot parse {' '.join(words)!r}")
    if init is None:
        raise ArenaError("missing init line")
    if init not in vertices:
        raise ArenaError(f"initial vertex {init} is not declared")
    return make_arena(init, vertices, edges)


def dump_arena(a: Arena) -> str:
    lines = [f"init {a.init}"]
    for v in a.vertices:
        lab = a.labels[v]
        suffix = f" label {','.join(sorted(lab))}" if lab else ""
        lines.append(f"vertex {v} {a.owner[v]}{suffix}")
    lines += [f"edge {v} {w}" for v, w in a.edges]
    return "\n".join(lines) + "\n"


# -- reductions on arenas --------------------------------------------------------

def dual_arena(a: Arena) -> Arena:
    return a.with_owners({v: 1 - o for v, o in a.owner.items()})


def dual_game(arena: Arena, phi: Formula) -> tuple[Arena, Formula]:
    """Swap the players and negate the winning condition."""
    return dual_arena(arena), negate_nnf(phi)


def expand_alternating_color(a: Arena, color: str) -> Arena:
    """Arena in which Player 0 picks a color bit on every move.

    Each move ``v -> w`` passes through an edge vertex owned by Player 0 that
    chooses between ``(w, 0)``, labeled with ``color``, and ``(w, 1)``.
    """
    if color in a.propositions():
        raise ArenaError(f"color {color!r} already labels the arena")
    vertices, owner, succ, labels = [], {}, {}, {}
    for v in a.vertices:
        for b in (0, 1):
            node = (v, b)
            vertices.append(node)
            owner[node] = a.owner[v]
            succ[node] = tuple(Edge(v, w) for w in a.succ[v])
            labels[node] = a.labels[v] | {color} if b == 0 else a.labels[v]
    edge_nodes = []
    for v, w in a.edges:
        e = Edge(v, w)
        vertices.append(e)
        edge_nodes.append(e)
        owner[e] = 0
        succ[e] = ((w, 0), (w, 1))
        labels[e] = frozenset()
    return Arena(tuple(vertices), owner, succ, (a.init, 0), labels, frozenset(edge_nodes))


# -- memory and strategies --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MemoryStructure:
    """``size`` memory states ``0..size-1``; ``update(m, v)`` is total."""
    size: int
    initial: int
    update: Callable[[int, Vertex], int]


@dataclass(frozen=True, eq=False)
class MealyStrategy:
    player: int
    memory: MemoryStructure
    moves: Mapping[tuple, Vertex]  # (vertex, memory) -> successor

    def next_move(self, v: Vertex, m: int) -> Vertex:
        try:
            return self.moves[(v, m)]
        except KeyError:
            raise ArenaError(f"strategy has no move at vertex {v!r} with memory {m}") from None

    def check_edges(self, a: Arena) -> None:
        for (v, m), w in self.moves.items():
            if w not in a.succ.get(v, ()):
                raise ArenaError(f"illegal move {v} -> {w} (memory {m})")


def positional_strategy(player: int, moves: Mapping[Vertex, Vertex]) -> MealyStrategy:
    mem = MemoryStructure(1, 0, lambda m, v: 0)
    return MealyStrategy(player, mem, {(v, 0): w for v, w in moves.items()})


def product_with_memory(a: Arena, m: MemoryStructure) -> Arena:
    """Reachable part of ``a x m``; a move into ``s'`` updates memory with ``s'``.

    The initial vertex is ``(v0, m.initial)``; ``m.initial`` is expected to
    already account for ``v0``.
    """
    start = (a.init, m.initial)

    def successors(node):
        s, mem = node
        for t in a.succ[s]:
            yield (t, m.update(mem, t))

    nodes, _, adj = _graph.explore([start], successors)
    succ = {nodes[i]: tuple(nodes[j] for j in out) for i, out in enumerate(adj)}
    owner = {n: a.owner[n[0]] for n in nodes}
    labels = {n: a.labels[n[0]] for n in nodes}
    edge_nodes = frozenset(n for n in nodes if n[0] in a.edge_nodes)
    return Arena(tuple(nodes), owner, succ, start, labels, edge_nodes)


def check_bipartite(a: Arena) -> None:
    if not a.edge_nodes:
        raise ArenaError("blinking semantics needs an arena built by expand_alternating_color")
    for v in a.vertices:
        side = v in a.edge_nodes
        if any((w in a.edge_nodes) == side for w in a.succ[v]):
            raise ArenaError(f"arena is not bipartite at {v!r}")


def dpa_to_memory(d: DPA, a: Arena, blinking: bool = False):
    """Memory structure running ``d`` on the labels of visited vertices.

    Returns ``(memory, priority)`` where ``priority(v, q)`` is the priority
    of the product vertex.  Memory holds the DPA state after reading the
    current vertex, so the initial memory already consumed ``l(v0)``.  With
    blinking, edge vertices leave the memory untouched and repeat the
    priority of the memory state they carry.
    """
    if blinking:
        check_bipartite(a)
    letter = {v: encode_letter(a.labels[v], d.ap) for v in a.vertices}
    skip = a.edge_nodes if blinking else frozenset()

    def update(q, v):
        return q if v in skip else d.delta[q][letter[v]]

    m0 = update(d.initial, a.init)
    return MemoryStructure(len(d), m0, update), (lambda v, q: d.priority[q])


# -- plays -----------------------------------------------------------------

@dataclass(frozen=True)
class PlayLasso:
    prefix: tuple
    cycle: tuple

    def check(self, a: Arena) -> None:
        if not self.cycle:
            raise ArenaError("play cycle must be non-empty")
        seq = list(self.prefix) + list(self.cycle) + [self.cycle[0]]
        if seq[0] != a.init:
            raise ArenaError("play does not start at the initial vertex")
        for v, w in zip(seq, seq[1:]):
            if w not in a.succ[v]:
                raise ArenaError(f"{v} -> {w} is not an edge")


def play_trace(rho: PlayLasso, a: Arena, blinking: bool = False) -> LassoWord:
    """Trace of the play; with blinking only even positions are kept."""
    pre = [a.labels[v] for v in rho.prefix]
    cyc = [a.labels[v] for v in rho.cycle]
    if not blinking:
        return LassoWord(tuple(pre), tuple(cyc))
    if len(cyc) % 2:
        raise ArenaError("blinking needs an even-length cycle")
    return LassoWord(tuple(pre[0::2]), tuple(cyc[len(pre) % 2::2]))


# -- strategy text format --------------------------------------------------------

def dump_strategy(s: MealyStrategy, a: Arena) -> str:
    """Text form.  Only the updates met by plays consistent with ``s`` are
    listed, which keeps dumps of automaton-sized memories short."""
    mem = s.memory
    table: dict = {}

    def successors(node):
        v, m = node
        move = s.moves.get((v, m)) if a.owner[v] == s.player else None
        for w in (move,) if move is not None else a.succ[v]:
            m2 = table.setdefault((m, w), mem.update(m, w))
            yield (w, m2)

    nodes, _, _ = _graph.explore([(a.init, mem.initial)], successors)
    seen = set(nodes)
    lines = [f"memory {mem.size}", f"initial {mem.initial}"]
    order = {v: i for i, v in enumerate(a.vertices)}
    for (m, v), m2 in sorted(table.items(), key=lambda kv: (kv[0][0], order[kv[0][1]])):
        lines.append(f"upd {m} {v} -> {m2}")
    moves = [(k, w) for k, w in s.moves.items() if k in seen]
    for (v, m), w in sorted(moves, key=lambda kv: (kv[0][1], order[kv[0][0]])):
        lines.append(f"move {v} {m} -> {w}")
    return "\n".join(lines) + "\n"


def parse_strategy(text: str, a: Arena, player: int) -> MealyStrategy:
    """Inverse of :func:`dump_strategy` for arenas with string vertex ids.

    Missing ``upd`` entries keep the memory unchanged.
    """
    size = initial = None
    table: dict = {}
    moves: dict = {}
    names = {str(v): v for v in a.vertices}

    def vertex(tok, n):
        if tok not in names:
            raise ArenaError(f"line {n}: unknown vertex {tok}")
        return names[tok]

    for n, words in _lines(text):
        try:
            if words[0] == "memory":
                size = int(words[1])
            elif words[0] == "initial":
                initial = int(words[1])
            elif words[0] == "upd" and words[3] == "->":
                table[(int(words[1]), vertex(words[2], n))] = int(words[4])
            elif words[0] == "move" and words[3] == "->":
                moves[(vertex(words[1], n), int(words[2]))] = vertex(words[4], n)
            else:
                raise ArenaError(f"line {n}: cannot parse {' '.join(words)!r}")
        except (IndexError, ValueError) as exc:
            raise ArenaError(f"line {n}: {exc}") from None
    if size is None or initial is None:
        raise ArenaError("strategy needs 'memory' and 'initial' lines")
    mem = MemoryStructure(size, initial, lambda m, v: table.get((m, v), m))
    s = MealyStrategy(player, mem, moves)
    s.check_edges(a)
    return s


__all__ = [
    "Arena", "ArenaError", "Edge", "MemoryStructure", "MealyStrategy", "PlayLasso",
    "make_arena", "parse_arena", "dump_arena", "dual_arena", "dual_game",
    "expand_alternating_color", "product_with_memory", "dpa_to_memory", "play_trace",
    "positional_strategy", "check_bipartite", "dump_strategy", "parse_strategy",
]
