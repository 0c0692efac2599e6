"""Small explicit-graph helpers shared by the automata, game and parity code.

Graphs are adjacency lists over ``0..n-1``.  Strongly connected components
come from scipy's compressed sparse graph routines.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


def explore(initial: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]):
    """Breadth-first exploration of an implicitly given graph.

    Returns ``(nodes, index, adj)`` where ``nodes[i]`` is the i-th discovered
    node, ``index`` maps nodes back to ids and ``adj[i]`` lists successor ids.
    """
    nodes: list = []
    index: dict = {}
    for v in initial:
        if v not in index:
            index[v] = len(nodes)
            nodes.append(v)
    adj: list[list[int]] = []
    head = 0
    while head < len(nodes):
        out = []
        for s in successors(nodes[head]):
            j = index.get(s)
            if j is None:
                j = index[s] = len(nodes)
                nodes.append(s)
            out.append(j)
        adj.append(out)
        head += 1
    return nodes, index, adj


def scc_labels(adj: Sequence[Sequence[int]]) -> np.ndarray:
    n = len(adj)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rows = np.fromiter((i for i, out in enumerate(adj) for _ in out), dtype=np.int64)
    cols = np.fromiter((j for out in adj for j in out), dtype=np.int64)
    m = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(m, directed=True, connection="strong")
    return labels


def on_cycle(adj: Sequence[Sequence[int]], labels: np.ndarray | None = None) -> np.ndarray:
    """Boolean mask of nodes lying on some cycle (non-trivial SCC or self-loop)."""
    if labels is None:
        labels = scc_labels(adj)
    n = len(adj)
    counts = np.bincount(labels, minlength=labels.max() + 1 if n else 0)
    mask = counts[labels] > 1 if n else np.zeros(0, dtype=bool)
    for i, out in enumerate(adj):
        if not mask[i] and i in out:
            mask[i] = True
    return mask


def reachable(adj: Sequence[Sequence[int]], sources: Iterable[int]) -> set[int]:
    seen = set(sources)
    queue = deque(seen)
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return seen


def reverse(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    rev: list[list[int]] = [[] for _ in adj]
    for i, out in enumerate(adj):
        for j in out:
            rev[j].append(i)
    return rev


def accepting_cycle_nodes(adj: Sequence[Sequence[int]], accepting: Sequence[bool]) -> np.ndarray:
    """Mask of nodes whose SCC is non-trivial and contains an accepting node."""
    labels = scc_labels(adj)
    cyc = on_cycle(adj, labels)
    good_components = {labels[i] for i in range(len(adj)) if accepting[i] and cyc[i]}
    return np.array([labels[i] in good_components for i in range(len(adj))], dtype=bool)


def buchi_nonempty(adj: Sequence[Sequence[int]], accepting: Sequence[bool]) -> bool:
    """Some node reachable in ``adj`` (all nodes are assumed reachable) lies on
    a cycle through an accepting node."""
    return bool(accepting_cycle_nodes(adj, accepting).any())


def lasso_through(adj: Sequence[Sequence[int]], start: int, targets: set[int]):
    """Shortest path from ``start`` into ``targets`` followed by a cycle back to
    the reached target, or ``None``.  Used for counterexample reporting."""
    parent = {start: None}
    queue = deque([start])
    hit = None
    while queue:
        i = queue.popleft()
        if i in targets:
            hit = i
            break
        for j in adj[i]:
            if j not in parent:
                parent[j] = i
                queue.append(j)
    if hit is None:
        return None
    stem = []
    i = hit
    while i is not None:
        stem.append(i)
        i = parent[i]
    stem.reverse()
    parent = {}
    queue = deque()
    for j in adj[hit]:
        if j not in parent:
            parent[j] = hit
            queue.append(j)
    while queue:
        i = queue.popleft()
        if i == hit:
            break
        for j in adj[i]:
            if j not in parent:
                parent[j] = i
                queue.append(j)
    if hit not in parent:
        return None
    loop = []
    i = parent[hit]
    while i != hit:
        loop.append(i)
        i = parent[i]
    loop.reverse()
    return stem[:-1], [hit] + loop
