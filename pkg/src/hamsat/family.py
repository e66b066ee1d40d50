"""Membership predicates for the edge families H11, H12, H2, H3 and |H3| counting.

The families are never materialized at full scale: an edge is tested
against the layout and the base graph on demand.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from hamsat.basegraph import BaseGraph
from hamsat.layout import VertexLayout

FLAGS = ("H11", "H12", "H2", "H3")


@dataclass(frozen=True)
class MembershipClass:
    flags: frozenset[str]

    @property
    def h11(self) -> bool:
        return "H11" in self.flags

    @property
    def h12(self) -> bool:
        return "H12" in self.flags

    @property
    def h1(self) -> bool:
        return self.h11 or self.h12

    @property
    def h2(self) -> bool:
        return "H2" in self.flags

    @property
    def h3(self) -> bool:
        return "H3" in self.flags

    def __str__(self) -> str:
        return ",".join(f for f in FLAGS if f in self.flags) or "none"


def _part_counts(e: Iterable[int], layout: VertexLayout) -> tuple[Counter, Counter]:
    parts: Counter = Counter()
    a_parts: Counter = Counter()
    for v in e:
        s, cls, _ = layout.classify(v)
        parts[s] += 1
        if cls == "A":
            a_parts[s] += 1
    return parts, a_parts


def in_h11(parts: Counter, a_parts: Counter, layout: VertexLayout, graph: BaseGraph) -> bool:
    cores = [s for s in parts if s <= layout.n]
    if len(cores) != 2:
        return False
    i, j = cores
    half = layout.k // 2
    return graph.has_edge(i, j) and a_parts[i] >= half and a_parts[j] >= half


def in_h12(parts: Counter, a_parts: Counter, layout: VertexLayout) -> bool:
    if len(parts) != 2:
        return False
    i, other = sorted(parts)
    n, k, ell = layout.n, layout.k, layout.ell
    return i <= n and other == n + i and a_parts[i] == ell + 1 and a_parts[other] == k - ell - 1


def in_h2(parts: Counter, layout: VertexLayout) -> bool:
    return parts[min(parts)] >= layout.k - layout.ell + 1


def classify_edge(e: Sequence[int], layout: VertexLayout, graph: BaseGraph, p: int) -> MembershipClass:
    if len(set(e)) != layout.k:
        raise ValueError(f"an edge needs {layout.k} distinct vertices, got {sorted(e)}")
    parts, a_parts = _part_counts(e, layout)
    flags = set()
    if in_h11(parts, a_parts, layout, graph):
        flags.add("H11")
    if in_h12(parts, a_parts, layout):
        flags.add("H12")
    if in_h2(parts, layout):
        flags.add("H2")
    if graph.cube_component_count(parts) <= p:
        flags.add("H3")
    return MembershipClass(frozenset(flags))


def c_value(e: Iterable[int], layout: VertexLayout, graph: BaseGraph) -> int:
    """Number of components of G^3 induced on tr(e)."""
    return graph.cube_component_count(layout.trace(e))


class BatchClassifier:
    """Vectorized classification of many edges against one layout."""

    def __init__(self, layout: VertexLayout, graph: BaseGraph, p: int):
        self.layout = layout
        self.graph = graph
        self.p = p
        n = layout.n
        self._adj = np.zeros((n + 1, n + 1), dtype=bool)
        for u, v in graph.edges:
            self._adj[u, v] = self._adj[v, u] = True
        self._c_cache: dict[tuple[int, ...], int] = {}

    def c_values(self, parts: np.ndarray) -> np.ndarray:
        keys, inverse = np.unique(np.sort(parts, axis=1), axis=0, return_inverse=True)
        vals = np.empty(len(keys), dtype=np.int64)
        for row, key in enumerate(keys):
            tr = tuple(sorted(set(key.tolist())))
            if tr not in self._c_cache:
                self._c_cache[tr] = self.graph.cube_component_count(tr)
            vals[row] = self._c_cache[tr]
        return vals[inverse.reshape(-1)]

    def __call__(self, edges: np.ndarray) -> dict[str, np.ndarray]:
        lay = self.layout
        k, ell, n = lay.k, lay.ell, lay.n
        edges = np.asarray(edges, dtype=np.int64)
        m = len(edges)
        parts = lay.parts_array(edges)
        is_a = lay.a_mask(edges)
        rows = np.repeat(np.arange(m), k)
        counts = np.zeros((m, 2 * n + 1), dtype=np.int16)
        a_counts = np.zeros((m, 2 * n + 1), dtype=np.int16)
        np.add.at(counts, (rows, parts.ravel()), 1)
        np.add.at(a_counts, (rows, parts.ravel()), is_a.ravel().astype(np.int16))
        idx = np.arange(m)

        mins = parts.min(axis=1)
        h2 = counts[idx, mins] >= k - ell + 1

        core_touch = counts[:, 1 : n + 1] > 0
        n_cores = core_touch.sum(axis=1)
        two = n_cores == 2
        # the two touched cores, smallest first
        first = np.argmax(core_touch, axis=1) + 1
        last = n - np.argmax(core_touch[:, ::-1], axis=1)
        half = k // 2
        h11 = (
            two
            & self._adj[first, last]
            & (a_counts[idx, first] >= half)
            & (a_counts[idx, last] >= half)
        )

        n_parts = (counts[:, 1:] > 0).sum(axis=1)
        maxs = parts.max(axis=1)
        h12 = (
            (n_parts == 2)
            & (mins <= n)
            & (maxs == mins + n)
            & (a_counts[idx, mins] == ell + 1)
            & (a_counts[idx, np.minimum(maxs, 2 * n)] == k - ell - 1)
        )
        h3 = self.c_values(parts) <= self.p
        return {"H11": h11, "H12": h12, "H2": h2, "H3": h3}


# -- counting H3 ------------------------------------------------------------


def _connected_sets(graph: BaseGraph, root: int, allowed: frozenset[int], max_size: int) -> Iterator[frozenset[int]]:
    """Connected sets of G^3 with minimum ``root`` inside ``allowed`` (each once)."""
    adj3 = graph.adj3

    def extend(sub: frozenset[int], ext: set[int], closed: frozenset[int]) -> Iterator[frozenset[int]]:
        yield sub
        if len(sub) == max_size:
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            new = {x for x in adj3[w] if x > root and x in allowed and x not in closed}
            yield from extend(sub | {w}, ext | new, closed | adj3[w] | {w})

    if root in allowed:
        start = {x for x in adj3[root] if x > root and x in allowed}
        yield from extend(frozenset({root}), start, frozenset(adj3[root] | {root}))


def trace_sets(graph: BaseGraph, max_size: int, max_components: int) -> Iterator[frozenset[int]]:
    """Nonempty T in V(G), |T| <= max_size, with at most max_components components in G^3[T].

    Components are generated in increasing order of their minimum vertex,
    each grown as a connected set avoiding the closed neighbourhood of the
    components chosen before it.
    """
    vertices = range(1, 2 * graph.n + 1)
    everything = frozenset(vertices)
    adj3 = graph.adj3

    def choose(T: frozenset[int], blocked: frozenset[int], last_root: int, comps: int) -> Iterator[frozenset[int]]:
        if T:
            yield T
        if comps == max_components or len(T) == max_size:
            return
        for root in vertices:
            if root <= last_root or root in blocked:
                continue
            allowed = everything - blocked
            for C in _connected_sets(graph, root, allowed, max_size - len(T)):
                nbhd = frozenset().union(*(adj3[v] for v in C))
                yield from choose(T | C, blocked | C | nbhd, root, comps + 1)

    yield from choose(frozenset(), frozenset(), 0, 0)


def onto_count(sizes: Sequence[int], k: int) -> int:
    """k-subsets of a disjoint union meeting every block, by inclusion-exclusion."""
    t = len(sizes)
    total = 0
    for r in range(t + 1):
        for sub in combinations(sizes, r):
            total += (-1) ** (t - r) * comb(sum(sub), k)
    return total


def count_h3(layout: VertexLayout, graph: BaseGraph, p: int) -> int:
    if p <= 0:
        return 0
    k = layout.k
    return sum(onto_count([layout.part_size(s) for s in T], k) for T in trace_sets(graph, k, p))


def count_h3_brute(layout: VertexLayout, graph: BaseGraph, p: int) -> int:
    """Classify every k-subset directly; micro layouts only."""
    if layout.N > 24:
        raise ValueError(f"brute force over C({layout.N}, {layout.k}) subsets refused")
    return sum(
        1
        for e in combinations(range(layout.N), layout.k)
        if graph.cube_component_count(layout.trace(e)) <= p
    )
