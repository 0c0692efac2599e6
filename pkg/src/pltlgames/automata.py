"""Omega-automata for PLTL_F formulas.

The pipeline turns a PLTL_F formula into an unambiguous generalized Büchi
automaton that tracks parameterized eventualities as pending obligations,
degeneralizes it, trims unproductive states, and determinizes the resulting
non-confluent Büchi automaton into a parity automaton.  The parameter bounds
re-enter only in the last step, as window constraints tracked by counters.

Letters are ints: bit ``i`` set means proposition ``ap[i]`` holds.
NBA/GNBA states are ``0..n-1``; ``delta[q]`` maps a letter to successor ids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _graph
from .formula import (
    And, Atom, BoundedF, Formula, FormulaError, LassoWord, Next, Or, Release,
    Until, atoms, closure, consistent_masks, expand_choice_points, g_variables,
    has_choice_points, is_parametric,
)

BOTTOM = -1


def encode_letter(props: Iterable[str], ap: Sequence[str]) -> int:
    """Project a proposition set onto ``ap`` and encode it."""
    props = set(props)
    return sum(1 << i for i, p in enumerate(ap) if p in props)


def decode_letter(letter: int, ap: Sequence[str]) -> frozenset[str]:
    return frozenset(p for i, p in enumerate(ap) if letter >> i & 1)


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


# -- data types --------------------------------------------------------------

@dataclass(frozen=True)
class GNBA:
    ap: tuple[str, ...]
    closure: tuple[Formula, ...]
    states: tuple  # frozensets of formulas, or ObligationState
    initial: frozenset[int]
    delta: tuple[dict[int, tuple[int, ...]], ...]
    # (source subformula, member states) for every U, R and F<= subformula
    acceptance: tuple[tuple[Formula, frozenset[int]], ...]

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class NBA:
    ap: tuple[str, ...]
    initial: frozenset[int]
    delta: tuple[dict[int, tuple[int, ...]], ...]
    accepting: frozenset[int]
    # per state: (source GNBA state, round-robin index), or None for hand-built automata
    origin: tuple | None = None

    def __len__(self):
        return len(self.delta)

    def successors(self, q: int, letter: int) -> tuple[int, ...]:
        return self.delta[q].get(letter, ())


@dataclass(frozen=True)
class Constraint:
    """Every infix of ``bound`` consecutive run states meets ``states``."""
    states: frozenset[int]
    bound: int
    tag: Formula | None = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("window bound must be positive")


ConstraintSet = tuple[Constraint, ...]


@dataclass(frozen=True)
class DPAState:
    sets: tuple[frozenset[int], ...]
    marks: tuple[int, ...]
    counters: dict  # (q, j) -> value; absent pairs are bottom


@dataclass
class DPA:
    ap: tuple[str, ...]
    delta: list[list[int]]  # delta[state][letter]
    priority: list[int]
    initial: int = 0
    keys: list = field(default_factory=list, repr=False)
    nba_size: int = 0
    n_constraints: int = 0

    def __len__(self):
        return len(self.delta)

    def step(self, q: int, letter: int) -> int:
        return self.delta[q][letter]

    def state(self, i: int) -> DPAState:
        sets, marks, d = self.keys[i]
        k = self.n_constraints
        counters = {(q, j): d[q * k + j] for q in range(self.nba_size)
                    for j in range(k) if d[q * k + j] != BOTTOM}
        return DPAState(tuple(frozenset(_bits(s)) for s in sets), marks, counters)


# -- PLTL_F -> GNBA -----------------------------------------------------------

@dataclass(frozen=True)
class ObligationState:
    """GNBA state: truth of the parameter-free subformulae plus the
    parametric subformulae that are currently owed."""
    truths: frozenset
    needs: frozenset


def _tableau_successors(cl: Sequence[Formula], masks: Sequence[int]) -> list[tuple[int, ...]]:
    """Per consistent set, the ids of the sets allowed to follow it.

    Bounded eventualities (if present) are treated like unbounded ones.
    """
    index = {f: i for i, f in enumerate(cl)}
    temporal = [(i, f) for i, f in enumerate(cl) if isinstance(f, (Next, Until, Release, BoundedF))]
    wide = len(cl) > 63
    arr = None if wide else np.array(masks, dtype=np.uint64)
    out = []
    for m in masks:
        must = mustnot = 0
        dead = False

        def has(g):
            return m >> index[g] & 1
        for i, f in temporal:
            bit = 1 << i
            if isinstance(f, Next):
                if m & bit:
                    must |= 1 << index[f.arg]
                else:
                    mustnot |= 1 << index[f.arg]
            elif isinstance(f, Until):
                if has(f.right):
                    continue
                if m & bit:
                    if not has(f.left):
                        dead = True
                    must |= bit
                elif has(f.left):
                    mustnot |= bit
            elif isinstance(f, Release):
                if not has(f.right):
                    if m & bit:
                        dead = True
                elif not has(f.left):
                    if m & bit:
                        must |= bit
                    else:
                        mustnot |= bit
            else:  # BoundedF
                if has(f.arg):
                    continue
                if m & bit:
                    must |= bit
                else:
                    mustnot |= bit
        if dead or must & mustnot:
            out.append(())
        elif wide:
            out.append(tuple(j for j, m2 in enumerate(masks) if m2 & must == must and not m2 & mustnot))
        else:
            ok = ((arr & np.uint64(must)) == np.uint64(must)) & ((arr & np.uint64(mustnot)) == 0)
            out.append(tuple(int(j) for j in np.flatnonzero(ok)))
    return out


def _letter_fn(cl: Sequence[Formula], ap: Sequence[str]):
    index = {f: i for i, f in enumerate(cl)}
    atom_bits = [(1 << index[Atom(p)], 1 << i) for i, p in enumerate(ap)]
    return lambda m: sum(lb for cb, lb in atom_bits if m & cb)


def _truth_acceptance(f: Formula, bit: int, index, masks_of) -> list[int]:
    if isinstance(f, Until):
        rb = 1 << index[f.right]
        return [j for j, m in masks_of if not m & bit or m & rb]
    if isinstance(f, Release):
        rb = 1 << index[f.right]
        return [j for j, m in masks_of if m & bit or not m & rb]
    ab = 1 << index[f.arg]
    return [j for j, m in masks_of if not m & bit or m & ab]


def build_gnba(phi: Formula, relaxed: bool = False) -> GNBA:
    """Unambiguous generalized Büchi automaton for a PLTL_F formula.

    Parameter-free subformulae are tracked by truth, as in the usual tableau.
    Parametric ones are tracked as obligations: a bounded eventuality enters
    a state only while it is owed and undischarged, so the acceptance set of
    ``F<=x psi`` (states where it is not owed or ``psi`` holds) is exactly the
    window that ``alpha(x)`` must bound.  Obligations are a function of the
    run, which requires ``phi`` to have no choice points (see
    :func:`pltlgames.formula.expand_choice_points`).

    ``relaxed=True`` gives the plain tableau over consistent sets with every
    ``F<=`` read as ``F``.  Its windows then constrain every position where
    the unbounded eventuality holds, which over-approximates the bounded
    semantics, so it is kept for inspection only.
    """
    if g_variables(phi):
        raise FormulaError("build_gnba needs a PLTL_F formula; negate or strip G<= first")
    if relaxed:
        return _build_relaxed(phi)
    if has_choice_points(phi):
        raise FormulaError("formula has choice points; apply expand_choice_points first")
    cl = closure(phi)
    ap = tuple(sorted(atoms(phi)))
    plain = [f for f in cl if not is_parametric(f)]
    param = [f for f in cl if is_parametric(f)]
    tidx = {f: i for i, f in enumerate(plain)}
    nidx = {f: i for i, f in enumerate(param)}
    masks = consistent_masks(plain)
    tsucc = _tableau_successors(plain, masks)
    letter_of = _letter_fn(plain, ap)

    def true_in(m, g):
        return m >> tidx[g] & 1

    def nbit(g):
        return 1 << nidx[g]

    def close(seed: int, m: int):
        """Least owed set containing ``seed``; None if some owed
        parameter-free part is false."""
        need = seed
        for f in reversed(param):  # parents before children
            if not need & nbit(f):
                continue
            if isinstance(f, And):
                for c in (f.left, f.right):
                    if c in nidx:
                        need |= nbit(c)
                    elif not true_in(m, c):
                        return None
            elif isinstance(f, Or):
                a, b = (f.left, f.right) if f.left in nidx else (f.right, f.left)
                if not true_in(m, b):
                    need |= nbit(a)
            elif isinstance(f, Until):
                if not true_in(m, f.right):
                    need |= nbit(f.left)
            elif isinstance(f, Release):
                need |= nbit(f.right)
        return need

    def carry(need: int, m: int) -> int:
        out = 0
        for f in param:
            if not need & nbit(f):
                continue
            if isinstance(f, Next):
                out |= nbit(f.arg)
            elif isinstance(f, Until):
                if not true_in(m, f.right):
                    out |= nbit(f)
            elif isinstance(f, Release):
                if not true_in(m, f.left):
                    out |= nbit(f)
            elif isinstance(f, BoundedF):
                if not true_in(m, f.arg):
                    out |= nbit(f)
        return out

    initial = []
    for b, m in enumerate(masks):
        if phi in tidx:
            if true_in(m, phi):
                initial.append((b, 0))
        else:
            need = close(nbit(phi), m)
            if need is not None:
                initial.append((b, need))

    def successors(node):
        b, need = node
        seed = carry(need, masks[b])
        for b2 in tsucc[b]:
            need2 = close(seed, masks[b2])
            if need2 is not None:
                yield (b2, need2)

    nodes, index, adj = _graph.explore(initial, successors)
    delta = tuple({letter_of(masks[b]): tuple(adj[i])} if adj[i] else {}
                  for i, (b, _) in enumerate(nodes))
    states = tuple(ObligationState(frozenset(f for f in plain if true_in(masks[b], f)),
                                   frozenset(f for f in param if need & nbit(f)))
                   for b, need in nodes)
    masks_of = [(i, masks[b]) for i, (b, _) in enumerate(nodes)]
    acceptance = []
    for f in cl:
        if isinstance(f, (Until, Release)) and f in tidx:
            members = _truth_acceptance(f, 1 << tidx[f], tidx, masks_of)
        elif isinstance(f, (Until, BoundedF)) and f in nidx:
            target = f.right if isinstance(f, Until) else f.arg
            members = [i for i, (b, need) in enumerate(nodes)
                       if not need & nbit(f) or true_in(masks[b], target)]
        else:
            continue
        acceptance.append((f, frozenset(members)))
    return GNBA(ap, tuple(cl), states, frozenset(index[v] for v in initial), delta,
                tuple(acceptance))


def _build_relaxed(phi: Formula) -> GNBA:
    cl = closure(phi)
    index = {f: i for i, f in enumerate(cl)}
    ap = tuple(sorted(atoms(phi)))
    masks = consistent_masks(cl)
    letter_of = _letter_fn(cl, ap)
    succ = _tableau_successors(cl, masks)
    delta = tuple({letter_of(m): s} if s else {} for m, s in zip(masks, succ))
    states = tuple(frozenset(f for i, f in enumerate(cl) if m >> i & 1) for m in masks)
    initial = frozenset(j for j, m in enumerate(masks) if m >> index[phi] & 1)
    masks_of = list(enumerate(masks))
    acceptance = [(f, frozenset(_truth_acceptance(f, 1 << i, index, masks_of)))
                  for i, f in enumerate(cl) if isinstance(f, (Until, Release, BoundedF))]
    return GNBA(ap, tuple(cl), states, initial, delta, tuple(acceptance))


# -- GNBA -> NBA ---------------------------------------------------------------

def degeneralize(a: GNBA) -> tuple[NBA, dict[Formula, frozenset[int]]]:
    """Round-robin product ``Q x {0..k}``.

    Index ``i`` records that the first ``i`` acceptance sets have been seen in
    the current round; it advances when the current state belongs to set
    ``i+1``.  States with index ``k`` are accepting; the next step restarts at 0.
    """
    sets = [s for _, s in a.acceptance]
    k = len(sets)
    width = k + 1

    def nxt(q, i):
        base = 0 if i == k else i
        if k and q in sets[base]:
            return base + 1
        return base

    delta = []
    origin = []
    for q in range(len(a)):
        for i in range(width):
            j = nxt(q, i)
            delta.append({letter: tuple(s * width + j for s in succ)
                          for letter, succ in a.delta[q].items()})
            origin.append((q, i))
    initial = frozenset(q * width for q in a.initial)
    accepting = frozenset(q * width + k for q in range(len(a)))
    nba = NBA(a.ap, initial, tuple(delta), accepting, tuple(origin))
    lift = {tag: frozenset(q * width + i for q in s for i in range(width)) for tag, s in a.acceptance}
    return nba, lift


def remove_unproductive(a: NBA) -> NBA:
    """Drop states that are unreachable or start no accepting run."""
    adj = [sorted({s for succ in a.delta[q].values() for s in succ}) for q in range(len(a))]
    reach = _graph.reachable(adj, a.initial)
    sub = sorted(reach)
    pos = {q: i for i, q in enumerate(sub)}
    sub_adj = [[pos[s] for s in adj[q] if s in pos] for q in sub]
    good = _graph.accepting_cycle_nodes(sub_adj, [q in a.accepting for q in sub])
    productive = _graph.reachable(_graph.reverse(sub_adj), [i for i in range(len(sub)) if good[i]])
    keep = [q for i, q in enumerate(sub) if i in productive]
    new = {q: i for i, q in enumerate(keep)}
    delta = []
    for q in keep:
        out = {}
        for letter, succ in a.delta[q].items():
            kept = tuple(new[s] for s in succ if s in new)
            if kept:
                out[letter] = kept
        delta.append(out)
    origin = tuple(a.origin[q] for q in keep) if a.origin is not None else None
    return NBA(a.ap, frozenset(new[q] for q in a.initial if q in new), tuple(delta),
               frozenset(new[q] for q in a.accepting if q in new), origin)


def window_constraints(nba: NBA, gnba: GNBA, alpha: Mapping[str, int]) -> ConstraintSet:
    """Lift each F<= acceptance set to NBA states via the origin projection."""
    out = []
    for tag, members in gnba.acceptance:
        if isinstance(tag, BoundedF):
            states = frozenset(q for q in range(len(nba)) if nba.origin[q][0] in members)
            out.append(Constraint(states, alpha[tag.var] + 1, tag))
    return tuple(out)


# -- exact structural checks -------------------------------------------------

def _letters(a: NBA, q1: int, q2: int):
    d1, d2 = a.delta[q1], a.delta[q2]
    return [x for x in d1 if x in d2]


def check_unambiguous(a: NBA) -> bool:
    """Exact: no two distinct accepting runs on one word.

    Explores pairs of runs on a common word, with a flag recording whether
    they ever differed, and looks for a flagged cycle on which both
    components see accepting states.
    """
    init = [(p, q, p != q) for p in a.initial for q in a.initial]

    def succ(node):
        p, q, flag = node
        for x in _letters(a, p, q):
            for s in a.delta[p][x]:
                for t in a.delta[q][x]:
                    yield (s, t, flag or s != t)

    nodes, _, adj = _graph.explore(init, succ)
    labels = _graph.scc_labels(adj)
    cyc = _graph.on_cycle(adj, labels)
    left, right = set(), set()
    for i, (p, q, flag) in enumerate(nodes):
        if flag and cyc[i]:
            if p in a.accepting:
                left.add(labels[i])
            if q in a.accepting:
                right.add(labels[i])
    return not (left & right)


def check_nonconfluent(a: NBA) -> bool:
    """Exact: no two distinct simultaneously reachable states share a successor
    on a common letter."""
    init = [(p, q) for p in a.initial for q in a.initial]

    def succ(node):
        p, q = node
        for x in _letters(a, p, q):
            for s in a.delta[p][x]:
                for t in a.delta[q][x]:
                    yield (s, t)

    nodes, _, _ = _graph.explore(init, succ)
    for p, q in nodes:
        if p != q:
            for x in _letters(a, p, q):
                if set(a.delta[p][x]) & set(a.delta[q][x]):
                    return False
    return True


# -- acceptance oracles on lassos ---------------------------------------------

def nba_lasso_accepts(a: NBA, constraints: ConstraintSet, w: LassoWord) -> bool:
    """Does ``a`` have an accepting run on ``w`` meeting every window constraint?"""
    letters = [encode_letter(w[i], a.ap) for i in range(len(w))]
    bounds = [c.bound for c in constraints]
    members = [c.states for c in constraints]

    def counters(q, prev):
        out = []
        for j, b in enumerate(bounds):
            v = 0 if q in members[j] else prev[j] + 1
            if v >= b:
                return None
            out.append(v)
        return tuple(out)

    start = []
    for q in sorted(a.initial):
        d = counters(q, [0] * len(bounds))  # first non-member state counts 1
        if d is not None:
            start.append((q, 0, d))

    def succ(node):
        q, i, d = node
        j = w.successor(i)
        for s in a.successors(q, letters[i]):
            d2 = counters(s, d)
            if d2 is not None:
                yield (s, j, d2)

    nodes, _, adj = _graph.explore(start, succ)
    return _graph.buchi_nonempty(adj, [n[0] in a.accepting for n in nodes])


# -- NBA + window constraints -> DPA ------------------------------------------

def compute_priority(s: DPAState) -> int:
    e = next((i for i, S in enumerate(s.sets) if not S), None)
    if e is None:
        raise ValueError("ill-formed state: no empty set in the list")
    m = next((i for i, mark in enumerate(s.marks) if mark), None)
    return _priority(e, m)


def _priority(e: int, m: int | None) -> int:
    assert e != m
    if e == 0:
        return 1
    if m is not None and m < e:
        return 2 * m
    return 2 * e - 1


class ConfluenceError(ValueError):
    pass


def determinize_with_counters(a: NBA, constraints: ConstraintSet = (), check: bool = True) -> DPA:
    """Deterministic parity automaton for the constrained language of ``a``.

    ``a`` must be non-confluent.  States hold a list of ``|a|+1`` (set, mark)
    pairs and a counter per (NBA state, constraint).  Only reachable states are
    built.  With ``check`` the structural invariants of reachable states are
    asserted as they are created.
    """
    n = len(a)
    k = len(constraints)
    letters = range(1 << len(a.ap))
    fin = sum(1 << q for q in a.accepting)
    member = [[q in c.states for c in constraints] for q in range(n)]
    bounds = [c.bound for c in constraints]
    succ_mask = [[sum(1 << s for s in a.successors(q, x)) for x in letters] for q in range(n)]

    def post(S, x):
        out = 0
        for q in _bits(S):
            out |= succ_mask[q][x]
        return out

    # initial state
    d0 = [BOTTOM] * (n * k)
    S0 = 0
    for q in a.initial:
        alive = True
        vals = []
        for j in range(k):
            if member[q][j]:
                vals.append(0)
            elif 1 < bounds[j]:
                vals.append(1)
            else:
                alive = False
                break
        if alive:
            S0 |= 1 << q
            d0[q * k:q * k + k] = vals
    init = ((S0,) + (0,) * n, (0,) * (n + 1), tuple(d0))

    def step(key, x):
        sets, _, d = key
        S = sets[0]
        pred = {}
        for p in _bits(S):
            for q in a.successors(p, x):
                if q in pred:
                    raise ConfluenceError(
                        f"states {pred[q]} and {p} merge into {q}; input must be non-confluent")
                pred[q] = p
        d2 = [BOTTOM] * (n * k)
        T = 0
        for q, p in pred.items():
            vals = []
            for j in range(k):
                if member[q][j]:
                    vals.append(0)
                else:
                    v = d[p * k + j] + 1
                    if v >= bounds[j]:
                        break
                    vals.append(v)
            else:
                T |= 1 << q
                d2[q * k:q * k + k] = vals
        # list update
        lst = [post(Si, x) & T for Si in sets if Si]
        lst.append(lst[0] & fin if lst else 0)
        marks = []
        for i in range(len(lst)):
            later = 0
            for Sj in lst[i + 1:]:
                later |= Sj
            if lst[i] and not (lst[i] & ~fin & ~later):
                marks.append(1)
                for j in range(i + 1, len(lst)):
                    lst[j] &= ~lst[i]
            else:
                marks.append(0)
        assert len(lst) <= n + 1
        pad = n + 1 - len(lst)
        return (tuple(lst) + (0,) * pad, tuple(marks) + (0,) * pad, tuple(d2))

    def verify(key):
        sets, marks, d = key
        S0 = sets[0]
        for i, Si in enumerate(sets):
            assert Si & ~S0 == 0, "set not contained in S_0"
            if Si:
                later = 0
                for Sj in sets[i + 1:]:
                    later |= Sj
                assert Si & ~later, "non-empty set without a private witness"
        alive = 0
        for q in range(n):
            if all(d[q * k + j] != BOTTOM for j in range(k)):
                alive |= 1 << q
        if k:
            assert alive == S0, "S_0 disagrees with the counter table"

    keys = [init]
    index = {init: 0}
    delta: list[list[int]] = []
    priority: list[int] = []
    head = 0
    while head < len(keys):
        key = keys[head]
        if check:
            verify(key)
        sets, marks, _ = key
        e = next(i for i, Si in enumerate(sets) if not Si)
        m = next((i for i, mk in enumerate(marks) if mk), None)
        priority.append(_priority(e, m))
        row = []
        for x in letters:
            nk = step(key, x)
            j = index.get(nk)
            if j is None:
                j = index[nk] = len(keys)
                keys.append(nk)
            row.append(j)
        delta.append(row)
        head += 1
    return DPA(a.ap, delta, priority, 0, keys, n, k)


def complement_dpa(d: DPA) -> DPA:
    return DPA(d.ap, d.delta, [c + 1 for c in d.priority], d.initial, d.keys, d.nba_size, d.n_constraints)


def dpa_accepts_lasso(d: DPA, w: LassoWord) -> bool:
    q = d.initial
    for letter in w.prefix:
        q = d.step(q, encode_letter(letter, d.ap))
    cyc = [encode_letter(letter, d.ap) for letter in w.cycle]
    seen: dict[tuple[int, int], int] = {}
    trace = []
    i = 0
    while (q, i) not in seen:
        seen[(q, i)] = len(trace)
        trace.append(d.priority[q])
        q = d.step(q, cyc[i])
        i = (i + 1) % len(cyc)
    return min(trace[seen[(q, i)]:]) % 2 == 0


# -- pipeline ----------------------------------------------------------------

@dataclass
class Pipeline:
    """Every stage of the PLTL_F-to-parity translation, kept for reporting."""
    gnba: GNBA
    nba: NBA
    trimmed: NBA
    constraints: ConstraintSet
    dpa: DPA

    def sizes(self) -> dict[str, int]:
        return {"gnba_states": len(self.gnba), "nba_states": len(self.nba),
                "trimmed_states": len(self.trimmed), "dpa_states": len(self.dpa)}


def pltl_f_pipeline(phi: Formula, alpha: Mapping[str, int], check: bool = False) -> Pipeline:
    """DPA recognizing ``{w | (w, 0, alpha) |= phi}`` for a PLTL_F formula."""
    gnba = build_gnba(expand_choice_points(phi, alpha))
    nba, _ = degeneralize(gnba)
    trimmed = remove_unproductive(nba)
    constraints = window_constraints(trimmed, gnba, alpha)
    dpa = determinize_with_counters(trimmed, constraints, check=check)
    return Pipeline(gnba, nba, trimmed, constraints, dpa)


# -- text dumps ----------------------------------------------------------------

def _fmt_letter(letter: int, ap: Sequence[str]) -> str:
    props = [p for i, p in enumerate(ap) if letter >> i & 1]
    return ",".join(props) if props else "-"


def _ids(ids: Iterable[int]) -> str:
    return " ".join(str(i) for i in sorted(ids))


def dump_automaton(a, constraints: ConstraintSet = ()) -> str:
    """HOA-flavoured text dump of a GNBA, NBA or DPA."""
    lines = []
    if isinstance(a, DPA):
        lines += [f"States: {len(a)}", f"Start: {a.initial}",
                  f"Acceptance: parity {max(a.priority) if a.priority else 0}", f"AP: {' '.join(a.ap)}"]
        for q, row in enumerate(a.delta):
            lines.append(f"State: {q} {a.priority[q]}")
            for x, s in enumerate(row):
                lines.append(f"  {_fmt_letter(x, a.ap)} -> {s}")
        return "\n".join(lines) + "\n"
    if isinstance(a, GNBA):
        lines += [f"States: {len(a)}", f"Start: {_ids(a.initial)}",
                  f"Acceptance: gen-buchi {len(a.acceptance)}", f"AP: {' '.join(a.ap)}"]
        for j, (_, members) in enumerate(a.acceptance):
            lines.append(f"Set: {j} {{{_ids(members)}}}")
    else:
        lines += [f"States: {len(a)}", f"Start: {_ids(a.initial)}",
                  "Acceptance: buchi", f"AP: {' '.join(a.ap)}",
                  f"Accepting: {{{_ids(a.accepting)}}}"]
    for j, c in enumerate(constraints):
        lines.append(f"Constraint: {j} b={c.bound} F={{{_ids(c.states)}}}")
    for q, row in enumerate(a.delta):
        lines.append(f"State: {q}")
        for x in sorted(row):
            for s in row[x]:
                lines.append(f"  {_fmt_letter(x, a.ap)} -> {s}")
    return "\n".join(lines) + "\n"


def parse_automaton(text: str):
    """Inverse of :func:`dump_automaton`.

    Returns ``(automaton, constraints)``.  Generalized Büchi dumps come back
    as a :class:`GNBA` with empty state contents.
    """
    header: dict[str, str] = {}
    sets: list[frozenset[int]] = []
    constraints = []
    rows: list[dict[int, list[int]]] = []
    prios: list[int] = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        if raw.startswith("  "):
            lhs, rhs = raw.strip().split("->")
            lhs = lhs.strip()
            props = [] if lhs == "-" else lhs.split(",")
            rows[-1].setdefault(tuple(props), []).append(int(rhs))
            continue
        key, _, val = raw.partition(":")
        val = val.strip()
        if key == "State":
            parts = val.split()
            rows.append({})
            if len(parts) > 1:
                prios.append(int(parts[1]))
        elif key == "Set":
            j, body = val.split(maxsplit=1)
            sets.append(frozenset(int(t) for t in body.strip("{}").split()))
        elif key == "Constraint":
            _, b, f = val.split(maxsplit=2)
            constraints.append(Constraint(frozenset(int(t) for t in f[2:].strip("{}").split()),
                                          int(b[2:])))
        else:
            header[key] = val
    ap = tuple(header.get("AP", "").split())
    kind = header["Acceptance"].split()[0]

    def enc(props):
        return encode_letter(props, ap)

    if kind == "parity":
        delta = [[0] * (1 << len(ap)) for _ in rows]
        for q, row in enumerate(rows):
            for props, succ in row.items():
                delta[q][enc(props)] = succ[0]
        return DPA(ap, delta, prios, int(header["Start"])), ()
    delta = tuple({enc(props): tuple(succ) for props, succ in row.items()} for row in rows)
    start = frozenset(int(t) for t in header["Start"].split())
    if kind == "gen-buchi":
        acc = tuple((None, s) for s in sets)
        return GNBA(ap, (), tuple(frozenset() for _ in rows), start, delta, acc), tuple(constraints)
    accepting = frozenset(int(t) for t in header["Accepting"].strip("{}").split())
    return NBA(ap, start, delta, accepting), tuple(constraints)
