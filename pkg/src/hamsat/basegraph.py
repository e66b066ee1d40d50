"""The base graph G1, its pendant extension G, and the cube G^3.

G1 lives on ``1..n``; G adds pendant vertices ``n+1..2n`` with ``n+i``
attached to ``i``.  Hamiltonicity questions are answered by bitmask
backtracking, which is practical up to a couple of dozen vertices.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class MNHResult:
    status: str  # "verified_true" | "verified_false" | "budget_exceeded"
    witness: tuple[int, ...] | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "verified_true"


def _bit(v: int) -> int:
    return 1 << v


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Search:
    """Hamiltonian path backtracking over adjacency bitmasks."""

    def __init__(self, masks: Sequence[int], full: int, budget: int | None):
        self.masks = masks
        self.full = full
        self.budget = budget
        self.nodes = 0

    def _connected(self, region: int) -> bool:
        start = region & -region
        seen = start
        frontier = start
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = self.masks[v] & region & ~seen
            seen |= new
            frontier |= new
        return seen == region

    def path(self, start: int, end: int) -> list[int] | None:
        path = [start]
        found = self._extend(path, _bit(start), end)
        return found

    def _extend(self, path: list[int], visited: int, end: int) -> list[int] | None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded {self.budget} nodes")
        cur = path[-1]
        if visited == self.full:
            return list(path) if cur == end else None
        if cur == end:
            return None
        remaining = self.full & ~visited
        reach = remaining | _bit(cur)
        for w in _iter_bits(remaining):
            avail = (self.masks[w] & reach).bit_count()
            if avail < (1 if w == end else 2):
                return None
        if not self._connected(reach):
            return None
        options = list(_iter_bits(self.masks[cur] & remaining))
        # fewest onward choices first
        options.sort(key=lambda w: (self.masks[w] & remaining).bit_count())
        for w in options:
            path.append(w)
            found = self._extend(path, visited | _bit(w), end)
            if found is not None:
                return found
            path.pop()
        return None


class BaseGraph:
    """Immutable G1 plus its pendant extension G and the cube G^3."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], name: str = ""):
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ValueError(f"bad edge ({u}, {v}) for a graph on [1, {n}]")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.name = name
        self.adj1: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)
        self._masks1 = tuple(sum(_bit(w) for w in a) for a in self.adj1)
        self._adj3: tuple[frozenset[int], ...] | None = None

    # -- basic structure ---------------------------------------------------

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(1, self.n + 1) for v in sorted(self.adj1[u]) if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj1[u]

    def non_edges(self) -> list[tuple[int, int]]:
        return [
            (u, v) for u in range(1, self.n + 1) for v in range(u + 1, self.n + 1) if v not in self.adj1[u]
        ]

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj1[1:]), default=0)

    def neighbors_g(self, v: int) -> set[int]:
        """Neighbourhood in G (core graph plus pendants)."""
        n = self.n
        if v <= n:
            return set(self.adj1[v]) | {n + v}
        return {v - n}

    def max_degree_g(self) -> int:
        return max(len(self.neighbors_g(v)) for v in range(1, 2 * self.n + 1))

    def distance_g(self, u: int, v: int) -> int | None:
        seen = {u: 0}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            if w == v:
                return seen[w]
            for x in self.neighbors_g(w):
                if x not in seen:
                    seen[x] = seen[w] + 1
                    queue.append(x)
        return None

    @property
    def adj3(self) -> tuple[frozenset[int], ...]:
        """Adjacency of G^3, indexed by vertex ``1..2n`` (entry 0 unused)."""
        if self._adj3 is None:
            out = [frozenset()]
            for v in range(1, 2 * self.n + 1):
                seen = {v}
                frontier = {v}
                for _ in range(3):
                    frontier = {x for w in frontier for x in self.neighbors_g(w)} - seen
                    seen |= frontier
                out.append(frozenset(seen - {v}))
            self._adj3 = tuple(out)
        return self._adj3

    def max_degree_cube(self) -> int:
        return max(len(a) for a in self.adj3[1:])

    def cube_components(self, S: Iterable[int]) -> list[list[int]]:
        """Connected components of G^3 induced on S, each sorted, ordered by minimum."""
        S = set(S)
        adj3 = self.adj3
        comps = []
        for v in sorted(S):
            if any(v in c for c in comps):
                continue
            comp = {v}
            stack = [v]
            while stack:
                w = stack.pop()
                for x in adj3[w] & S:
                    if x not in comp:
                        comp.add(x)
                        stack.append(x)
            comps.append(comp)
        return [sorted(c) for c in comps]

    def cube_component_count(self, S: Iterable[int]) -> int:
        return len(self.cube_components(S))

    # -- hamiltonicity ---------------------------------------------------

    def _search(self, budget: int | None) -> _Search:
        full = sum(_bit(v) for v in range(1, self.n + 1))
        return _Search(self._masks1, full, budget)

    def ham_cycle(self, budget: int | None = None) -> list[int] | None:
        """A hamiltonian cycle of G1 as a vertex list, or None."""
        if self.n < 3:
            return None
        s = 1
        search = self._search(budget)
        for t in sorted(self.adj1[s]):
            found = search.path(s, t)
            if found is not None:
                return found
        return None

    def ham_path(self, u: int, v: int, budget: int | None = None) -> list[int]:
        """A hamiltonian path of G1 from u to v, for a non-edge uv."""
        if u == v or self.has_edge(u, v):
            raise ValueError(f"ham_path needs a non-adjacent pair, got ({u}, {v})")
        return list(self._ham_path_cached(u, v, budget))

    @lru_cache(maxsize=None)
    def _ham_path_cached(self, u: int, v: int, budget: int | None) -> tuple[int, ...]:
        found = self._search(budget).path(u, v)
        if found is None:
            raise ValueError(f"no hamiltonian path from {u} to {v}: G1 is not maximally non-hamiltonian")
        return tuple(found)

    def relabel(self, i_core: int, j_core: int) -> dict[int, int]:
        """Permutation of [1, n] sending a hamiltonian i_core..j_core path onto 1, 2, ..., n."""
        order = self.ham_path(i_core, j_core)
        return {v: t for t, v in enumerate(order, start=1)}

    # -- io ------------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {len(self.edges)}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "BaseGraph":
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not rows:
            raise ValueError("empty graph file")
        n, m = map(int, rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
        if len(edges) != m:
            raise ValueError(f"header announces {m} edges, found {len(edges)}")
        return cls(n, edges, name=name)

    @classmethod
    def load(cls, path: str | Path) -> "BaseGraph":
        return cls.from_text(Path(path).read_text(), name=Path(path).stem)

    def __repr__(self) -> str:
        return f"BaseGraph(n={self.n}, m={len(self.edges)}, name={self.name!r})"


def verify_mnh(graph: BaseGraph, budget: int | None = 5_000_000) -> MNHResult:
    """Exhaustively decide whether G1 is maximally non-hamiltonian.

    ``budget`` bounds the number of search nodes per hamiltonicity query.
    """
    try:
        cycle = graph.ham_cycle(budget)
        if cycle is not None:
            return MNHResult("verified_false", tuple(cycle), "G1 has a hamiltonian cycle")
        for u, v in graph.non_edges():
            try:
                graph.ham_path(u, v, budget)
            except ValueError:
                return MNHResult("verified_false", (u, v), f"G1 + {u}{v} is still non-hamiltonian")
    except BudgetExceeded as exc:
        return MNHResult("budget_exceeded", None, str(exc))
    return MNHResult("verified_true")


def trust_certificate(graph: BaseGraph) -> MNHResult:
    """Accept an externally certified G1 without checking it."""
    log.warning("trusting external maximal non-hamiltonicity certificate for %r", graph)
    return MNHResult("verified_true", None, "trusted external certificate")


# -- built-in graphs ------------------------------------------------------------


def petersen() -> BaseGraph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return BaseGraph(10, outer + spokes + inner, name="petersen")


def flower_snark(m: int) -> BaseGraph:
    """Isaacs' flower snark J_m on 4m vertices (m odd)."""
    if m < 3 or m % 2 == 0:
        raise ValueError("flower snarks need odd m >= 3")
    a = lambda i: 4 * (i % m) + 1  # noqa: E731
    b = lambda i: 4 * (i % m) + 2  # noqa: E731
    c = lambda i: 4 * (i % m) + 3  # noqa: E731
    d = lambda i: 4 * (i % m) + 4  # noqa: E731
    edges = []
    for i in range(m):
        edges += [(a(i), b(i)), (a(i), c(i)), (a(i), d(i)), (b(i), b(i + 1))]
    for i in range(m - 1):
        edges += [(c(i), c(i + 1)), (d(i), d(i + 1))]
    edges += [(c(m - 1), d(0)), (d(m - 1), c(0))]
    return BaseGraph(4 * m, edges, name=f"flower_snark_J{m}")


def cycle_graph(n: int) -> BaseGraph:
    return BaseGraph(n, [(i, i % n + 1) for i in range(1, n + 1)], name=f"C{n}")


def complete_bipartite(a: int, b: int) -> BaseGraph:
    edges = [(u, a + w) for u in range(1, a + 1) for w in range(1, b + 1)]
    return BaseGraph(a + b, edges, name=f"K{a},{b}")


BUILTIN = {"petersen": petersen, "j5": lambda: flower_snark(5)}


def resolve_graph(spec: str) -> BaseGraph:
    """A built-in name (``petersen``, ``j5``) or a path to a graph text file."""
    if spec in BUILTIN:
        return BUILTIN[spec]()
    return BaseGraph.load(spec)
