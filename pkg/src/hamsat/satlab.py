"""Micro-scale ground truth: exhaustive (l,k)-hamiltonicity, saturation, sat values.

Also hosts the randomized path samplers used to exercise the structural
facts about H1 and H2 paths, plus an exhaustive search for H12 paths.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Collection, Iterable, Sequence

import numpy as np

from hamsat.basegraph import BaseGraph
from hamsat.family import BatchClassifier, classify_edge
from hamsat.layout import VertexLayout

Edge = frozenset[int]

MAX_VERTICES = 14


class SizeCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class MicroHypergraph:
    N: int
    k: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for e in self.edges:
            if len(e) != self.k or not all(0 <= v < self.N for v in e):
                raise ValueError(f"{sorted(e)} is not a {self.k}-subset of [0, {self.N})")

    @classmethod
    def of(cls, N: int, k: int, edges: Iterable[Iterable[int]]) -> "MicroHypergraph":
        return cls(N, k, frozenset(frozenset(e) for e in edges))

    @classmethod
    def complete(cls, N: int, k: int) -> "MicroHypergraph":
        return cls.of(N, k, combinations(range(N), k))

    def to_json(self) -> dict:
        return {"N": self.N, "k": self.k, "edges": sorted(sorted(e) for e in self.edges)}


def _check_sizes(N: int, k: int, ell: int) -> None:
    if N > MAX_VERTICES:
        raise SizeCapExceeded(f"N = {N} exceeds the exhaustive-search cap {MAX_VERTICES}")
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got k={k}, ell={ell}")
    if N % (k - ell):
        raise ValueError(f"N = {N} is not divisible by k-ell = {k - ell}")


def _subsets_of(edges: Iterable[Edge]) -> set[Edge]:
    out: set[Edge] = set()
    for e in edges:
        items = sorted(e)
        for r in range(len(items) + 1):
            out.update(frozenset(c) for c in combinations(items, r))
    return out


def ham_cycle(edges: Iterable[Iterable[int]], N: int, k: int, ell: int) -> list[int] | None:
    """A cyclic vertex order whose windows are all edges, or None."""
    _check_sizes(N, k, ell)
    E = {frozenset(e) for e in edges}
    if not E or N < k:
        return None
    step = k - ell
    prefixes = _subsets_of(E)
    # windows through each position, ignoring the ones wrapping past the end
    starts = [s for s in range(0, N, step) if s + k <= N]
    covering = [[s for s in starts if s <= pos < s + k] for pos in range(N)]
    wrapping = [s for s in range(0, N, step) if s + k > N]
    seq = [-1] * N
    free = set(range(N))

    def fits(pos: int) -> bool:
        for s in covering[pos]:
            if frozenset(seq[s : pos + 1]) not in prefixes:
                return False
        return True

    def closes() -> bool:
        return all(frozenset(seq[s:] + seq[: s + k - N]) in E for s in wrapping)

    def extend(pos: int) -> bool:
        if pos == N:
            return closes()
        if seq[pos] != -1:
            return fits(pos) and extend(pos + 1)
        for v in sorted(free):
            if v == 0:
                continue
            seq[pos] = v
            free.discard(v)
            if fits(pos) and extend(pos + 1):
                return True
            free.add(v)
            seq[pos] = -1
        return False

    # rotating by a multiple of k-l keeps the windows, so vertex 0 sits in the first block
    free.discard(0)
    for offset in range(step):
        seq[offset] = 0
        if extend(0):
            return list(seq)
        seq[offset] = -1
    return None


def ham_cycle_exists(H: MicroHypergraph, ell: int) -> tuple[bool, list[int] | None]:
    witness = ham_cycle(H.edges, H.N, H.k, ell)
    return witness is not None, witness


def greedy_saturate(lower: MicroHypergraph, upper: MicroHypergraph, ell: int) -> MicroHypergraph:
    """Add edges of ``upper`` in lexicographic order while the result stays non-hamiltonian."""
    if not lower.edges <= upper.edges:
        raise ValueError("lower must be contained in upper")
    N, k = lower.N, lower.k
    if ham_cycle(lower.edges, N, k, ell) is not None:
        raise ValueError("lower is already hamiltonian")
    H = set(lower.edges)
    for e in sorted(upper.edges - lower.edges, key=sorted):
        if ham_cycle(H | {e}, N, k, ell) is None:
            H.add(e)
    return MicroHypergraph(N, k, frozenset(H))


def verify_saturated(H: MicroHypergraph, upper: MicroHypergraph, ell: int) -> tuple[bool, str]:
    """Exhaustively confirm H is non-hamiltonian and every edge of upper - H completes a cycle."""
    if ham_cycle(H.edges, H.N, H.k, ell) is not None:
        return False, "H itself is hamiltonian"
    for e in sorted(upper.edges - H.edges, key=sorted):
        if ham_cycle(H.edges | {e}, H.N, H.k, ell) is None:
            return False, f"adding {sorted(e)} creates no hamiltonian cycle"
    return True, ""


# -- exact saturation numbers ------------------------------------------------


def cycle_edge_sets(N: int, k: int, ell: int) -> list[frozenset[Edge]]:
    """Edge sets of all hamiltonian (l,k)-cycles of the complete k-graph on [0, N)."""
    _check_sizes(N, k, ell)
    if N > 10:
        raise SizeCapExceeded(f"enumerating all orders of {N} vertices is too slow")
    step = k - ell
    found: set[frozenset[Edge]] = set()
    for rest in permutations(range(1, N)):
        # vertex 0 may sit anywhere in the first block of k-l positions
        for offset in range(step):
            seq = rest[:offset] + (0,) + rest[offset:]
            found.add(frozenset(frozenset(seq[s : s + k] + seq[: max(0, s + k - N)]) for s in range(0, N, step)))
    return sorted(found, key=lambda c: sorted(sorted(e) for e in c))


def sat_exact(N: int, k: int, ell: int, node_budget: int = 20_000_000) -> tuple[int, MicroHypergraph]:
    """Minimum edge count of an l-hamiltonian saturated k-graph on N vertices.

    A saturated H is exactly a maximal cycle-free edge set, so the search
    is for a smallest maximal set.  Edges are decided in order; an edge
    left out must end up blocked, meaning some cycle through it has all
    other edges in H.
    """
    _check_sizes(N, k, ell)
    edges = [frozenset(c) for c in combinations(range(N), k)]
    index = {e: t for t, e in enumerate(edges)}
    cycles = [sum(1 << index[e] for e in c) for c in cycle_edge_sets(N, k, ell)]
    m = len(edges)
    through = [[c for c in cycles if c >> t & 1] for t in range(m)]
    # a greedy saturation seeds the bound
    seed_H = greedy_saturate(MicroHypergraph(N, k, frozenset()), MicroHypergraph.complete(N, k), ell)
    best = [len(seed_H.edges), sum(1 << index[e] for e in seed_H.edges)]
    nodes = [0]

    def blocked(t: int, H: int) -> bool:
        bit = 1 << t
        return any(c & ~H == bit for c in through[t])

    def can_block(t: int, out: int) -> bool:
        return any(not (c & out & ~(1 << t)) for c in through[t])

    def search(t: int, H: int, out: int, pending: list[int], size: int) -> None:
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise SizeCapExceeded(f"sat_exact exceeded {node_budget} search nodes")
        if size >= best[0]:
            return
        if any(not can_block(f, out) for f in pending):
            return
        if t == m:
            if all(blocked(f, H) for f in pending):
                best[0], best[1] = size, H
            return
        if blocked(t, H):
            search(t + 1, H, out | 1 << t, pending, size)
            return
        search(t + 1, H | 1 << t, out, pending, size + 1)
        search(t + 1, H, out | 1 << t, pending + [t], size)

    # every vertex is alike, so the first edge can be taken to be in H
    search(1, 1, 0, [], 1)
    if best[0] > m:
        raise RuntimeError("no saturated k-graph found")
    H = best[1]
    return best[0], MicroHypergraph(N, k, frozenset(e for t, e in enumerate(edges) if H >> t & 1))


# -- structural facts about H1/H2 paths --------------------------------------


def micro_layout(k: int, ell: int, n: int, core_b: int = 4, pendant_b: int = 4) -> VertexLayout:
    """A small layout with the production A-class sizes."""
    half = k // 2
    size_a = [2 * half + ell] * n + [2 * k - 2 * ell - 3] * n
    size_b = [core_b] * n + [pendant_b] * n
    return VertexLayout(k, ell, n, tuple(size_a), tuple(size_b))


def h12_edges(layout: VertexLayout) -> list[Edge]:
    k, ell, n = layout.k, layout.ell, layout.n
    out = []
    for i in range(1, n + 1):
        for a in combinations(layout.a_range(i), ell + 1):
            for b in combinations(layout.a_range(n + i), k - ell - 1):
                out.append(frozenset(a + b))
    return out


def h12_three_edge_paths(layout: VertexLayout) -> list[tuple[Edge, Edge, Edge]]:
    """All (e1, e2, e3) in H12 with |e1^e2| = |e2^e3| = l and e1, e3 disjoint."""
    ell = layout.ell
    E = h12_edges(layout)
    out: list[tuple[Edge, Edge, Edge]] = []
    if not E:
        return out
    # consecutive H12 edges share a part, hence the same {i, n+i}; group by it
    groups: dict[int, list[Edge]] = {}
    for e in E:
        groups.setdefault(layout.part_of(min(e)), []).append(e)
    for group in groups.values():
        verts = sorted(set().union(*group))
        col = {v: c for c, v in enumerate(verts)}
        M = np.zeros((len(group), len(verts)), dtype=np.int32)
        for r, e in enumerate(group):
            M[r, [col[v] for v in e]] = 1
        inter = M @ M.T
        adj = inter == ell
        apart = inter == 0
        for mid in range(len(group)):
            nb = np.flatnonzero(adj[mid])
            pairs = np.argwhere(apart[np.ix_(nb, nb)])
            out.extend((group[nb[a]], group[mid], group[nb[b]]) for a, b in pairs)
    return out


def _draw(rng: random.Random, pools: Sequence[range], count: int, exclude: Collection[int]) -> list[int] | None:
    """``count`` distinct ids from the union of ``pools`` avoiding ``exclude``, by rejection."""
    total = sum(len(r) for r in pools)
    blocked = sum(1 for v in set(exclude) if any(v in r for r in pools))
    if count < 0 or total - blocked < count:
        return None
    out: list[int] = []
    taken: set[int] = set()
    while len(out) < count:
        idx = rng.randrange(total)
        for r in pools:
            if idx < len(r):
                v = r[idx]
                break
            idx -= len(r)
        if v not in exclude and v not in taken:
            taken.add(v)
            out.append(v)
    return out


class PathSampler:
    """Random (l,k)-paths that are forced window by window into chosen families."""

    def __init__(self, layout: VertexLayout, graph: BaseGraph, p: int, seed: int = 0):
        self.layout, self.graph, self.p = layout, graph, p
        self.rng = random.Random(seed)
        self.part = [layout.part_of(v) for v in range(layout.N)]
        self.k, self.ell = layout.k, layout.ell

    def _cls(self, e: Sequence[int]):
        return classify_edge(e, self.layout, self.graph, self.p)

    def _is_h2(self, e: Sequence[int]) -> bool:
        parts = [self.part[v] for v in e]
        return parts.count(min(parts)) >= self.k - self.ell + 1

    def _fresh(self, used: set[int], prefer: int, count: int) -> list[int] | None:
        """``count`` unused vertices, mostly from U_prefer, the rest anywhere."""
        rng, lay = self.rng, self.layout
        take = rng.randint(max(0, count - 2), count)
        out = _draw(rng, [lay.u_range(prefer)], take, used)
        if out is None:
            return None
        rest = _draw(rng, [range(lay.N)], count - take, used | set(out))
        if rest is None:
            return None
        out += rest
        rng.shuffle(out)
        return out

    def _near(self, s: int) -> list[int]:
        """Parts an H1 edge through part s can use: s, its core/pendant twin, G1 neighbours."""
        n = self.layout.n
        core = s if s <= n else s - n
        return [core, n + core, *sorted(self.graph.adj1[core])]

    def _h2_step(self, seq: list[int], used: set[int], tries: int = 20, steer: bool = False) -> list[int] | None:
        """Fresh k-l vertices extending ``seq`` by an H2 edge.

        With ``steer`` the last l vertices come from A-blocks near the
        edge's parts, so that an H1 edge can follow.
        """
        k, ell, lay = self.k, self.ell, self.layout
        overlap = seq[-ell:]
        parts = [self.part[v] for v in overlap]
        for _ in range(tries):
            prefer = self.rng.choice(parts) if self.rng.random() < 0.7 else self.rng.randint(1, 2 * lay.n)
            fresh = self._fresh(used, prefer, k - ell)
            if fresh is None:
                continue
            # the fresh block ends the edge; put preferred-part vertices last so the next overlap keeps them
            fresh.sort(key=lambda v: self.part[v] == prefer)
            if steer:
                near = self._near(prefer)
                tail = []
                for _ in range(ell):
                    got = _draw(self.rng, [lay.a_range(self.rng.choice(near))], 1, used | set(fresh) | set(tail))
                    tail += got or []
                if len(tail) < ell:
                    continue
                fresh[-ell:] = tail
            if self._is_h2(overlap + fresh):
                return fresh
        return None

    def random_h2_edge(self) -> list[int]:
        k, ell, lay = self.k, self.ell, self.layout
        while True:
            j = self.rng.randint(1, 2 * lay.n)
            c = self.rng.randint(k - ell + 1, k)
            e = _draw(self.rng, [lay.u_range(j)], c, ())
            if e is None:
                continue
            e += _draw(self.rng, [range(lay.N)], k - c, e)
            self.rng.shuffle(e)
            if self._is_h2(e):
                e.sort(key=lambda v: self.part[v] == j)
                return e

    def random_h1_edge(self) -> list[int]:
        k, ell, lay, rng = self.k, self.ell, self.layout, self.rng
        n, half = lay.n, k // 2
        while True:
            if rng.random() < 0.5 and self.graph.edges:
                a, b = rng.choice(self.graph.edges)
                e = rng.sample(lay.a_range(a), half) + rng.sample(lay.a_range(b), half)
                if k % 2:
                    pools = [lay.u_range(a), lay.u_range(b)] if rng.random() < 0.5 else [range(lay.u_range(n + 1).start, lay.N)]
                    e += _draw(rng, pools, 1, e) or []
            else:
                i = rng.randint(1, n)
                e = rng.sample(lay.a_range(i), ell + 1) + rng.sample(lay.a_range(n + i), k - ell - 1)
            rng.shuffle(e)
            if self._cls(e).h1:
                return e

    def _fill(self, used: set[int], quotas: dict[int, int], spare_parts: Sequence[int], spare: int) -> list[int] | None:
        """Quota vertices from each A-block, then ``spare`` more from the given parts."""
        rng, lay = self.rng, self.layout
        out: list[int] = []
        for s, c in quotas.items():
            got = _draw(rng, [lay.a_range(s)], c, used)
            if got is None:
                return None
            out += got
        extra = _draw(rng, [lay.u_range(s) for s in spare_parts], spare, used | set(out))
        if extra is None:
            return None
        out += extra
        rng.shuffle(out)
        return out

    def _h1_close(self, seq: list[int], used: set[int], tries: int = 8) -> list[int] | None:
        """k-l fresh vertices completing the last l of ``seq`` to an H1 edge."""
        k, ell, lay, rng = self.k, self.ell, self.layout, self.rng
        n, half = lay.n, k // 2
        overlap = seq[-ell:]
        parts = [self.part[v] for v in overlap]
        cores = sorted({s for s in parts if s <= n})
        in_a = Counter(s for v, s in zip(overlap, parts) if v in lay.a_range(s))
        options: list[tuple[dict[int, int], list[int], int]] = []
        # H11 around a G1 edge {a, b} containing every core part of the overlap
        if len(cores) == 2 and self.graph.has_edge(*cores):
            pairs = [tuple(cores)]
        elif len(cores) == 1:
            pairs = [(cores[0], b) for b in sorted(self.graph.adj1[cores[0]])]
        elif not cores:
            pairs = list(self.graph.edges)
        else:
            pairs = []
        for a, b in pairs:
            quotas = {a: max(0, half - in_a[a]), b: max(0, half - in_a[b])}
            options.append((quotas, [a, b], k - ell - sum(quotas.values())))
        # H12 on {a, n+a}: the overlap must already sit in those A-blocks
        for a in {s if s <= n else s - n for s in parts}:
            if all(s in (a, n + a) for s in parts) and sum(in_a.values()) == ell:
                options.append(({a: ell + 1 - in_a[a], n + a: k - ell - 1 - in_a[n + a]}, [], 0))
        if not options:
            return None
        for _ in range(tries):
            quotas, spare_parts, spare = rng.choice(options)
            fresh = self._fill(used, quotas, spare_parts, spare)
            if fresh is not None and self._cls(overlap + fresh).h1:
                return fresh
        return None

    def h2_path(self, edges: int) -> list[list[int]] | None:
        """An (l,k)-path of up to ``edges`` H2 edges; None if the first extension fails."""
        seq = self.random_h2_edge()
        used = set(seq)
        out = [list(seq)]
        for _ in range(edges - 1):
            fresh = self._h2_step(seq, used)
            if fresh is None:
                break
            out.append(seq[-self.ell :] + fresh)
            seq += fresh
            used.update(fresh)
        return out if len(out) >= 2 else None

    def h1_h2_h1_path(self, inner: int) -> list[list[int]] | None:
        """An (l,k)-path e, e_1..e_s, e' with e, e' in H1 and e_t in H2, or None."""
        seq = self.random_h1_edge()
        used = set(seq)
        out = [list(seq)]
        for t in range(inner):
            fresh = self._h2_step(seq, used, steer=t == inner - 1)
            if fresh is None:
                return None
            out.append(seq[-self.ell :] + fresh)
            seq += fresh
            used.update(fresh)
        fresh = self._h1_close(seq, used)
        if fresh is None:
            return None
        out.append(seq[-self.ell :] + fresh)
        return out


def check_fact3(path: list[list[int]], layout: VertexLayout) -> bool:
    """All edges of an H2 path share one minimum part."""
    return len({layout.min_trace(e) for e in path}) == 1


def check_claim2(path: list[list[int]], layout: VertexLayout) -> bool:
    """Inner H2 edges share one minimum part lying in tr1 of both end edges."""
    mins = {layout.min_trace(f) for f in path[1:-1]}
    if len(mins) != 1:
        return False
    (j,) = mins
    return j in layout.trace1(path[0]) and j in layout.trace1(path[-1])


def sample_edges(layout: VertexLayout, graph: BaseGraph, count: int, seed: int = 0) -> np.ndarray:
    """``count`` k-subsets, a quarter each uniform, H2-leaning, H11-leaning and H12-leaning."""
    rng = np.random.default_rng(seed)
    k, ell, n, N = layout.k, layout.ell, layout.n, layout.N
    half = k // 2
    g_edges = np.array(graph.edges, dtype=np.int64)
    out = np.empty((count, k), dtype=np.int64)
    a_lo = np.array([layout.a_range(s).start for s in range(1, 2 * n + 1)])
    a_sz = np.array(layout.size_a)
    u_lo = np.array([layout.u_range(s).start for s in range(1, 2 * n + 1)])
    u_sz = np.array([layout.part_size(s) for s in range(1, 2 * n + 1)])

    def from_block(lo: np.ndarray, size: np.ndarray, c: int) -> np.ndarray:
        # c distinct offsets per row; rows still repeating after the redraws are dropped at the end
        pick = rng.integers(0, np.maximum(size, 1)[:, None], size=(len(lo), c))
        for _ in range(20):
            bad = np.flatnonzero(np.any(np.diff(np.sort(pick, axis=1), axis=1) == 0, axis=1))
            if not len(bad):
                break
            pick[bad] = rng.integers(0, np.maximum(size[bad], 1)[:, None], size=(len(bad), c))
        return lo[:, None] + pick

    kind = rng.integers(0, 4, size=count)
    rows = np.flatnonzero(kind == 0)
    out[rows] = rng.integers(0, N, size=(len(rows), k))
    rows = np.flatnonzero(kind == 1)
    if len(rows):
        parts = rng.integers(0, 2 * n, size=len(rows))
        c = k - ell + 1
        out[rows, :c] = from_block(u_lo[parts], u_sz[parts], c)
        out[rows, c:] = rng.integers(0, N, size=(len(rows), k - c))
    rows = np.flatnonzero(kind == 2)
    if len(rows):
        ge = g_edges[rng.integers(0, len(g_edges), size=len(rows))] - 1
        out[rows, :half] = from_block(a_lo[ge[:, 0]], a_sz[ge[:, 0]], half)
        out[rows, half : 2 * half] = from_block(a_lo[ge[:, 1]], a_sz[ge[:, 1]], half)
        if k % 2:
            out[rows, k - 1] = rng.integers(u_lo[n], N, size=len(rows))
    rows = np.flatnonzero(kind == 3)
    if len(rows):
        i = rng.integers(0, n, size=len(rows))
        out[rows, : ell + 1] = from_block(a_lo[i], a_sz[i], ell + 1)
        out[rows, ell + 1 :] = from_block(a_lo[n + i], a_sz[n + i], k - ell - 1)
    distinct = np.all(np.diff(np.sort(out, axis=1), axis=1) > 0, axis=1)
    return out[distinct]


@dataclass
class FactOneReport:
    sampled: int
    counts: dict[str, int]
    violations: int


def check_fact1(layout: VertexLayout, graph: BaseGraph, p: int, count: int, seed: int = 0, batch: int = 200_000) -> FactOneReport:
    """H11, H12, H2 all lie in H3, and H11/H12/H2 are pairwise exclusive, on sampled edges."""
    clf = BatchClassifier(layout, graph, p)
    totals = {"H11": 0, "H12": 0, "H2": 0, "H3": 0}
    sampled = violations = 0
    chunk_seed = seed
    while sampled < count:
        E = sample_edges(layout, graph, min(batch, count - sampled) + 64, seed=chunk_seed)[: count - sampled]
        chunk_seed += 1
        f = clf(E)
        low = f["H11"] | f["H12"] | f["H2"]
        pair = (f["H11"] & f["H12"]) | (f["H11"] & f["H2"]) | (f["H12"] & f["H2"])
        violations += int((low & ~f["H3"]).sum()) + int(pair.sum())
        for key in totals:
            totals[key] += int(f[key].sum())
        sampled += len(E)
    return FactOneReport(sampled, totals, violations)
