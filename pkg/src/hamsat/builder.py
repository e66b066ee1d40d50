"""Explicit hamiltonian (l,k)-cycle in H1 u H2 + e for an edge e outside H3.

The base graph is never relabelled in place.  A hamiltonian path
``order[0] .. order[n-1]`` of G1 from the core of i to the core of j gives
*positions* ``t = 1..n``; position t stands for core part ``order[t-1]``
and pendant part ``n + order[t-1]``.  Vertex ids are always the layout's.

Build order: e is reserved, then the bridge Q0 around e, the bridges
Q1..Q(n-1) around H11 edges, and finally the long H2 paths P1..Pn, which
absorb every vertex not used so far.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from hamsat.basegraph import BaseGraph
from hamsat.family import classify_edge
from hamsat.layout import VertexLayout, iter_sequence_chunks, read_header
from hamsat.nu import U_SYM, extremal_path
from hamsat.params import ConstructionParams

EXIT_VALID = 0
EXIT_INVALID = 2
EXIT_PRECONDITION = 3


class BuildError(RuntimeError):
    """A vertex budget ran out: some inequality the construction relies on fails."""


class PreconditionError(ValueError):
    """The edge lies in H3, so there is nothing to extend."""


@dataclass(frozen=True)
class ExtensionChoice:
    i: int
    j: int
    X: frozenset[int]
    Y: frozenset[int]
    eX: tuple[int, ...]
    eY: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]  # sorted by rho descending
    rho: tuple[int, ...]
    n: int

    @property
    def i_core(self) -> int:
        return self.i if self.i <= self.n else self.i - self.n

    @property
    def j_core(self) -> int:
        return self.j if self.j <= self.n else self.j - self.n


def choose_ij(e: Sequence[int], layout: VertexLayout, graph: BaseGraph, p: int) -> ExtensionChoice:
    """Pick the two trace parts i, j the cycle is threaded between."""
    e = sorted(set(int(v) for v in e))
    if len(e) != layout.k:
        raise ValueError(f"an edge needs {layout.k} distinct vertices, got {len(e)}")
    counts = Counter(layout.part_of(v) for v in e)
    comps = graph.cube_components(counts)
    if len(comps) <= p:
        raise PreconditionError(f"c(e) = {len(comps)} <= p = {p}: e is in H3")
    rho = [max(counts[v] for v in c) for c in comps]
    ranked = sorted(range(len(comps)), key=lambda t: (-rho[t], comps[t][0]))
    comps = [comps[t] for t in ranked]
    rho = [rho[t] for t in ranked]
    ell = layout.ell

    def argmax(c: Sequence[int]) -> int:
        return min(c, key=lambda v: (-counts[v], v))

    if rho[0] <= ell:
        i = min(counts)
    else:
        i = argmax(comps[0])
    X = frozenset(next(c for c in comps if i in c))
    Y = frozenset(counts) - X
    j = argmax(comps[1]) if rho[1] > ell else min(Y)
    eX = tuple(v for v in e if layout.part_of(v) in X)
    eY = tuple(v for v in e if layout.part_of(v) in Y)

    for t in counts:
        if t not in (i, j) and counts[t] > ell:
            raise AssertionError(f"part {t} holds {counts[t]} > ell vertices of e")
    return ExtensionChoice(i, j, X, Y, eX, eY, tuple(map(tuple, comps)), tuple(rho), layout.n)


class _Allocator:
    """Hands out unused ids of one (part, class) block in ascending order."""

    def __init__(self, layout: VertexLayout):
        self.layout = layout
        self.used = np.zeros(layout.N, dtype=bool)
        self._cursor: dict[tuple[int, str], int] = {}

    def reserve(self, ids: Iterable[int]) -> None:
        for v in ids:
            if self.used[v]:
                raise BuildError(f"vertex {v} used twice")
            self.used[v] = True

    def take(self, part: int, cls: str, count: int) -> list[int]:
        r = self.layout.a_range(part) if cls == "A" else self.layout.b_range(part)
        pos = self._cursor.get((part, cls), r.start)
        out: list[int] = []
        while len(out) < count and pos < r.stop:
            if not self.used[pos]:
                out.append(pos)
                self.used[pos] = True
            pos += 1
        self._cursor[(part, cls)] = pos
        if len(out) < count:
            raise BuildError(f"{cls}_{part} has only {len(out)} of {count} requested vertices left")
        return out

    def take_pendant_b(self) -> int:
        """The lowest unused id in any pendant B block."""
        for s in range(self.layout.n + 1, 2 * self.layout.n + 1):
            r = self.layout.b_range(s)
            if self._cursor.get((s, "B"), r.start) < r.stop:
                try:
                    return self.take(s, "B", 1)[0]
                except BuildError:
                    continue
        raise BuildError("no pendant B vertex left")

    def unused_in(self, r: range) -> np.ndarray:
        idx = np.arange(r.start, r.stop)
        return idx[~self.used[r.start : r.stop]]


@dataclass
class BridgePlan:
    order: tuple[int, ...]  # core part at each position 1..n
    Q0: list[int]
    Q: list[list[int]] = field(default_factory=list)  # Q[t-1] is Q_t
    T1: frozenset[int] = frozenset()
    T2: frozenset[int] = frozenset()
    q0_left_pad: int = 0  # length of the b_n run before Q0'

    def core(self, t: int) -> int:
        return self.order[t - 1]

    def pend(self, t: int) -> int:
        return len(self.order) + self.order[t - 1]


def order_e(e: Sequence[int], choice: ExtensionChoice, layout: VertexLayout) -> list[int]:
    """U_j part of e first (A before B), rest of eY, rest of eX, U_i part last (A last)."""
    i, j = choice.i, choice.j
    a_i, b_i = layout.a_range(i), layout.b_range(i)
    a_j, b_j = layout.a_range(j), layout.b_range(j)
    ev = sorted(e)
    head = [v for v in ev if v in a_j] + [v for v in ev if v in b_j]
    tail = [v for v in ev if v in b_i] + [v for v in ev if v in a_i]
    uj, ui = layout.u_range(j), layout.u_range(i)
    mid_y = [v for v in choice.eY if v not in uj]
    mid_x = [v for v in choice.eX if v not in ui]
    return head + mid_y + mid_x + tail


def build_Q0(
    e: Sequence[int], choice: ExtensionChoice, layout: VertexLayout, order: Sequence[int], alloc: _Allocator
) -> tuple[list[int], int]:
    """Q0 = b_n^(k-2l) Q0' b_1^(k-2l); returns the sequence and the left pad length."""
    k, ell, n = layout.k, layout.ell, layout.n
    i, j = choice.i, choice.j
    ev = order_e(e, choice, layout)

    if j <= n:
        left = alloc.take(j, "B", k - ell)
    else:
        jc = j - n
        if layout.count_in(e, j, "A") <= k - ell - 2:
            left = alloc.take(jc, "A", ell + 1) + alloc.take(j, "A", k - ell - 1) + alloc.take(j, "B", k - 2 * ell)
        else:
            left = alloc.take(jc, "A", ell + 1) + alloc.take(j, "A", k - 2 * ell - 1)
    if i <= n:
        right = alloc.take(i, "B", k - ell)
    else:
        ic = i - n
        if layout.count_in(e, i, "A") <= k - ell - 2:
            right = alloc.take(i, "B", k - 2 * ell) + alloc.take(i, "A", k - ell - 1) + alloc.take(ic, "A", ell + 1)
        else:
            right = alloc.take(i, "A", k - 2 * ell - 1) + alloc.take(ic, "A", ell + 1)
    pad_l = alloc.take(order[-1], "B", k - 2 * ell)
    pad_r = alloc.take(order[0], "B", k - 2 * ell)
    return pad_l + left + ev + right + pad_r, len(pad_l)


def _check_q0_usage(plan: BridgePlan, layout: VertexLayout, p: int) -> None:
    n, ell, k = layout.n, layout.ell, layout.k
    q0 = plan.Q0
    for t in range(1, n + 1):
        used = layout.count_in(q0, plan.core(t), "A")
        if t in (1, n):
            bound = k - p
        elif t in plan.T2:
            bound = ell
        else:
            bound = 0
        if used > bound:
            raise BuildError(f"Q0 takes {used} > {bound} vertices of A_{plan.core(t)} (position {t})")


def build_bridges(plan: BridgePlan, layout: VertexLayout, alloc: _Allocator) -> None:
    """Append Q1..Q(n-1) to ``plan``; each is L_t, e_t, R_t."""
    k, ell, n = layout.k, layout.ell, layout.n
    half = k // 2
    for t in range(1, n):
        L = alloc.take(plan.core(t), "B", k - 2 * ell)
        mid = alloc.take(plan.core(t), "A", half)
        if k % 2:
            mid.append(alloc.take_pendant_b())
        mid += alloc.take(plan.core(t + 1), "A", half)
        if t + 1 in plan.T1:
            R = alloc.take(plan.pend(t + 1), "A", k - 2 * ell)
        else:
            R = alloc.take(plan.core(t + 1), "B", k - 2 * ell)
        plan.Q.append(L + mid + R)


def _check_bridge_usage(plan: BridgePlan, layout: VertexLayout) -> None:
    k, ell = layout.k, layout.ell
    Q = set(plan.Q0).union(*plan.Q)
    for t in plan.T1:
        got = (
            layout.count_in(Q, plan.core(t), "A"),
            layout.count_in(Q, plan.core(t), "B"),
            layout.count_in(Q, plan.pend(t), "A"),
        )
        want = (2 * (k // 2), k - 2 * ell, k - 2 * ell)
        if got != want:
            raise BuildError(f"position {t}: bridges use (A, B, pendant A) = {got}, expected {want}")


def _symbol_mask(x: int, k: int, ell: int) -> np.ndarray:
    s = extremal_path(x, k, ell)
    return np.frombuffer(s.encode(), dtype=np.uint8) == ord(U_SYM)


def _trim(masks: list[np.ndarray], excess: int, step: int) -> None:
    """Drop ``excess`` W-symbols, step at a time, always from the path holding most W's."""
    if excess % step:
        raise BuildError(f"excess {excess} not divisible by {step}")
    w_counts = [int((~m).sum()) for m in masks]
    heap = [(-w, t) for t, w in enumerate(w_counts)]
    heapq.heapify(heap)
    cuts = [0] * len(masks)
    for _ in range(excess // step):
        w, t = heapq.heappop(heap)
        if -w < step:
            raise BuildError("no path has enough W-symbols left to trim")
        cuts[t] += step
        heapq.heappush(heap, (w + step, t))
    for t, c in enumerate(cuts):
        if c:
            ws = np.flatnonzero(~masks[t])
            masks[t] = np.delete(masks[t], ws[:c])


def _reshape_first_edge(mask: np.ndarray, k: int, ell: int) -> np.ndarray:
    """First edge becomes w^(l-1) u^(k-l+1); surplus u's fill the leftmost later w's."""
    mask = mask.copy()
    surplus = int(mask[:k].sum()) - (k - ell + 1)
    if surplus < 0:
        raise BuildError("first edge holds fewer than k-l+1 u's")
    mask[: ell - 1] = False
    mask[ell - 1 : k] = True
    ws = np.flatnonzero(~mask[k:])
    if len(ws) < surplus:
        raise BuildError("not enough W-symbols to absorb the reshaped first edge")
    mask[k + ws[:surplus]] = True
    return mask


def build_paths(
    plan: BridgePlan, layout: VertexLayout, alloc: _Allocator, N: int
) -> list[np.ndarray]:
    """The H2 paths P1..Pn as id arrays; together with the bridges they cover all N ids."""
    k, ell, n = layout.k, layout.ell, layout.n
    step = k - ell
    own = [alloc.unused_in(layout.u_range(plan.core(t))) for t in range(1, n + 1)]
    for ids in own:
        alloc.used[ids] = True
    masks = [_symbol_mask(len(ids), k, ell) for ids in own]
    bridge_total = len(plan.Q0) + sum(len(q) for q in plan.Q)
    total = bridge_total + sum(len(m) for m in masks)
    if total < N:
        raise BuildError(f"maximal paths and bridges reach only {total} < N = {N} vertices")
    _trim(masks, total - N, step)
    for t in plan.T1:
        masks[t - 1] = _reshape_first_edge(masks[t - 1], k, ell)

    lead: dict[int, list[int]] = {t: alloc.take(plan.pend(t), "A", ell - 1) for t in sorted(plan.T1)}
    pool = np.concatenate([alloc.unused_in(layout.u_range(s)) for s in range(n + 1, 2 * n + 1)])
    alloc.used[pool] = True
    cursor = 0
    paths = []
    for t in range(1, n + 1):
        mask = masks[t - 1]
        ids = own[t - 1]
        out = np.empty(len(mask), dtype=np.int64)
        u_pos = np.flatnonzero(mask)
        w_pos = np.flatnonzero(~mask)
        if len(u_pos) != len(ids):
            raise BuildError(f"path {t} has {len(u_pos)} u-slots for {len(ids)} vertices")
        if t in plan.T1:
            a_range = layout.a_range(plan.core(t))
            a_first = next(int(v) for v in ids if v in a_range)
            rest = ids[ids != a_first]
            out[ell - 1] = a_first
            out[u_pos[u_pos != ell - 1]] = rest
            out[w_pos[: ell - 1]] = lead[t]
            w_pos = w_pos[ell - 1 :]
        else:
            out[u_pos] = ids
        take = len(w_pos)
        if cursor + take > len(pool):
            raise BuildError("pendant pool exhausted")
        out[w_pos] = pool[cursor : cursor + take]
        cursor += take
        paths.append(out)
    if cursor != len(pool):
        raise BuildError(f"{len(pool) - cursor} pendant vertices left unplaced")
    return paths


def assemble(plan: BridgePlan, paths: list[np.ndarray]) -> np.ndarray:
    """Q0', b_1 pad, P1, Q1, ..., Q(n-1), Pn, b_n pad: windows start at Q0'."""
    pad = plan.q0_left_pad
    pieces: list[np.ndarray] = [np.asarray(plan.Q0[pad:], dtype=np.int64)]
    for t, path in enumerate(paths, start=1):
        pieces.append(path)
        if t < len(paths):
            pieces.append(np.asarray(plan.Q[t - 1], dtype=np.int64))
    pieces.append(np.asarray(plan.Q0[:pad], dtype=np.int64))
    return np.concatenate(pieces)


def plan_bridges(
    e: Sequence[int], layout: VertexLayout, graph: BaseGraph, params: ConstructionParams, alloc: _Allocator
) -> tuple[ExtensionChoice, BridgePlan]:
    n = layout.n
    choice = choose_ij(e, layout, graph, params.p)
    order = tuple(graph.ham_path(choice.i_core, choice.j_core))
    tr = set(choice.X | choice.Y)
    T1 = frozenset(t for t in range(1, n + 1) if order[t - 1] not in tr and n + order[t - 1] not in tr)
    T2 = frozenset(range(1, n + 1)) - T1
    alloc.reserve(e)
    Q0, pad = build_Q0(e, choice, layout, order, alloc)
    plan = BridgePlan(order, Q0, [], T1, T2, pad)
    _check_q0_usage(plan, layout, params.p)
    build_bridges(plan, layout, alloc)
    _check_bridge_usage(plan, layout)
    return choice, plan


def build_cycle(
    e: Sequence[int], layout: VertexLayout, graph: BaseGraph, params: ConstructionParams
) -> np.ndarray:
    """A hamiltonian (l,k)-cycle in H1 u H2 + e as an array of N vertex ids."""
    if graph.n != layout.n:
        raise ValueError(f"G1 has {graph.n} vertices but the layout has n = {layout.n}")
    alloc = _Allocator(layout)
    _, plan = plan_bridges(e, layout, graph, params, alloc)
    paths = build_paths(plan, layout, alloc, layout.N)
    if not alloc.used.all():
        raise BuildError(f"{int((~alloc.used).sum())} vertices never placed")
    return assemble(plan, paths)


# -- validation -----------------------------------------------------------


@dataclass
class CycleReport:
    valid: bool
    windows: int = 0
    edge_classes: Counter = field(default_factory=Counter)  # label -> window count
    special: list[tuple[int, str]] = field(default_factory=list)  # (window index, label) outside H2
    failure: str = ""

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "windows": self.windows,
            "edge_classes": dict(self.edge_classes),
            "special": [list(s) for s in self.special],
            "failure": self.failure,
        }


class _WindowChecker:
    """Classifies consecutive windows block by block; keeps no per-window state."""

    def __init__(self, layout: VertexLayout, graph: BaseGraph, p: int, e: Sequence[int]):
        self.layout, self.graph, self.p = layout, graph, p
        self.e = frozenset(int(v) for v in e)
        self.report = CycleReport(valid=True)
        self.k, self.step = layout.k, layout.k - layout.ell

    def feed(self, block: np.ndarray) -> None:
        """``block`` holds m windows: length m*(k-l) + l."""
        if not self.report.valid:
            return
        k, step, rep = self.k, self.step, self.report
        m = (len(block) - self.layout.ell) // step
        if m <= 0:
            return
        idx = np.arange(m)[:, None] * step + np.arange(k)[None, :]
        win = block[idx]
        parts = self.layout.parts_array(win)
        mins = parts.min(axis=1)
        h2 = (parts == mins[:, None]).sum(axis=1) >= k - self.layout.ell + 1
        rep.edge_classes["H2"] += int(h2.sum())
        for w in np.flatnonzero(~h2):
            edge = [int(v) for v in win[w]]
            number = rep.windows + int(w)
            if frozenset(edge) == self.e:
                label = "e"
            else:
                cls = classify_edge(edge, self.layout, self.graph, self.p)
                label = "H11" if cls.h11 else "H12" if cls.h12 else ""
            if not label:
                rep.valid = False
                rep.failure = f"window {number} {sorted(edge)} is in neither H1, H2 nor equal to e"
                return
            rep.edge_classes[label] += 1
            rep.special.append((number, label))
        rep.windows += m

    def finish(self) -> CycleReport:
        rep = self.report
        if rep.valid and rep.edge_classes["e"] != 1:
            rep.valid = False
            rep.failure = f"e appears {rep.edge_classes['e']} times, expected once"
        return rep


def _seen_update(seen: np.ndarray, ids: np.ndarray, N: int) -> str:
    if len(ids) and (ids.min() < 0 or ids.max() >= N):
        return f"vertex id outside [0, {N})"
    if len(np.unique(ids)) != len(ids) or seen[ids].any():
        return "a vertex is repeated"
    seen[ids] = True
    return ""


def validate_cycle(
    seq: np.ndarray, layout: VertexLayout, graph: BaseGraph, p: int, e: Sequence[int]
) -> CycleReport:
    """Check that ``seq`` is a hamiltonian (l,k)-cycle with windows in H1 u H2 u {e}."""
    return validate_chunks(iter([np.asarray(seq, dtype=np.int64)]), len(seq), layout, graph, p, e)


def validate_chunks(
    chunks: Iterator[np.ndarray],
    length: int,
    layout: VertexLayout,
    graph: BaseGraph,
    p: int,
    e: Sequence[int],
    block_windows: int = 1 << 16,
) -> CycleReport:
    N, k, ell = layout.N, layout.k, layout.ell
    step = k - ell
    if length != N:
        return CycleReport(False, failure=f"sequence has {length} ids, layout has N = {N}")
    if N % step:
        return CycleReport(False, failure=f"N = {N} not divisible by k-l = {step}")
    seen = np.zeros(N, dtype=bool)
    checker = _WindowChecker(layout, graph, p, e)
    head: np.ndarray | None = None
    buf = np.zeros(0, dtype=np.int64)
    for chunk in chunks:
        chunk = np.asarray(chunk, dtype=np.int64)
        problem = _seen_update(seen, chunk, N)
        if problem:
            return CycleReport(False, failure=problem)
        if head is None or len(head) < ell:
            head = chunk[:ell] if head is None else np.concatenate([head, chunk])[:ell]
        buf = np.concatenate([buf, chunk])
        m = (len(buf) - ell) // step
        while m >= block_windows or (m > 0 and len(buf) > block_windows * step):
            take = min(m, block_windows)
            checker.feed(buf[: take * step + ell])
            buf = buf[take * step :]
            m = (len(buf) - ell) // step
    if not seen.all():
        return CycleReport(False, failure=f"{int((~seen).sum())} vertices missing")
    checker.feed(np.concatenate([buf, head]))
    return checker.finish()


def validate_file(path, layout: VertexLayout, graph: BaseGraph, p: int, e: Sequence[int], chunk: int = 1 << 20) -> CycleReport:
    k, ell, N = read_header(path)
    if (k, ell) != (layout.k, layout.ell):
        return CycleReport(False, failure=f"file is for (k, l) = ({k}, {ell}), layout for ({layout.k}, {layout.ell})")
    return validate_chunks(iter_sequence_chunks(path, chunk), N, layout, graph, p, e)
