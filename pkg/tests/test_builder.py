import itertools
import random

import numpy as np
import pytest

from hamsat.basegraph import BaseGraph, flower_snark, petersen
from hamsat.builder import (
    BuildError,
    PreconditionError,
    _Allocator,
    build_cycle,
    choose_ij,
    plan_bridges,
    validate_chunks,
    validate_cycle,
    validate_file,
)
from hamsat.family import c_value
from hamsat.layout import InstanceConfig, windows, write_sequence
from hamsat.params import run_pipeline
from hamsat.satlab import micro_layout


def U(lay, s, c, skip=0):
    return list(lay.u_range(s))[skip : skip + c]


def A(lay, s, c, skip=0):
    return list(lay.a_range(s))[skip : skip + c]


def extension_edges(layout, graph, p, count, seed):
    """Random edges with c(e) >= p+1 over independent sets, mixing core and pendant parts."""
    rng = random.Random(seed)
    n, k = layout.n, layout.k
    ind = [
        S
        for r in range(p + 1, k + 1)
        for S in itertools.combinations(range(1, n + 1), r)
        if not any(graph.has_edge(a, b) for a, b in itertools.combinations(S, 2))
    ]
    out = []
    while len(out) < count:
        S = rng.choice(ind)
        parts = [s if rng.random() < 0.3 else s + n for s in S]
        cnt = [1] * len(parts)
        for _ in range(k - len(parts)):
            cnt[rng.randrange(len(parts))] += 1
        e = []
        for s, c in zip(parts, cnt):
            pool = list(layout.a_range(s)) if rng.random() < 0.6 else list(layout.u_range(s))[:40]
            e += rng.sample(pool, c)
        if len(set(e)) == k and c_value(e, layout, graph) > p:
            out.append(e)
    return out


# -- choice of i and j ----------------------------------------------------


def test_choose_ij_worked_example():
    # parts 3, 5, 8 are isolated in G^3 and hold 4, 2, 1 vertices of e
    lay = micro_layout(7, 2, 8, core_b=6)
    g = BaseGraph(8, [])
    e = U(lay, 3, 4) + U(lay, 5, 2) + U(lay, 8, 1)
    ch = choose_ij(e, lay, g, p=2)
    assert (ch.i, ch.j) == (3, 5)
    assert ch.X == {3} and ch.Y == {5, 8}
    assert set(ch.eX) | set(ch.eY) == set(e) and not set(ch.eX) & set(ch.eY)
    assert ch.rho == (4, 2, 1)


def test_choose_ij_fallback_branches():
    lay = micro_layout(5, 2, 8)
    g = BaseGraph(8, [])
    e = U(lay, 2, 1) + U(lay, 4, 1) + U(lay, 6, 1) + U(lay, 7, 2)
    ch = choose_ij(e, lay, g, p=2)
    assert ch.i == 2 and ch.j == min(ch.Y) == 4


def test_choose_ij_rejects_h3_edges(instance, graph):
    params, layout, _ = instance
    e = U(layout, 1, 3) + U(layout, 2, 2)
    with pytest.raises(PreconditionError, match="H3"):
        choose_ij(e, layout, graph, params.p)
    with pytest.raises(PreconditionError):
        build_cycle(e, layout, graph, params)


def test_choice_satisfies_part_bounds(instance, graph):
    params, layout, _ = instance
    for e in extension_edges(layout, graph, params.p, 200, seed=4):
        ch = choose_ij(e, layout, graph, params.p)
        assert ch.i in ch.X and ch.j in ch.Y
        for t in layout.trace(e) - {ch.i, ch.j}:
            assert layout.count_in(e, t) <= layout.ell


# -- bridges ----------------------------------------------------------------


def test_bridge_shapes(instance, graph):
    params, layout, _ = instance
    k, ell, n = layout.k, layout.ell, layout.n
    for e in extension_edges(layout, graph, params.p, 20, seed=8):
        _, plan = plan_bridges(e, layout, graph, params, _Allocator(layout))
        assert len(plan.Q) == n - 1
        assert plan.T1 | plan.T2 == set(range(1, n + 1)) and not plan.T1 & plan.T2
        everything = list(plan.Q0) + [v for q in plan.Q for v in q]
        assert len(everything) == len(set(everything))
        for t, q in enumerate(plan.Q, start=1):
            assert len(q) == 3 * k - 4 * ell
            assert all(v in layout.b_range(plan.core(t)) for v in q[: k - 2 * ell])
            right = layout.a_range(plan.pend(t + 1)) if t + 1 in plan.T1 else layout.b_range(plan.core(t + 1))
            assert all(v in right for v in q[-(k - 2 * ell) :])
        q0 = plan.Q0[plan.q0_left_pad :]
        kappa = k - ell + 1
        assert sum(v in layout.u_range(plan.core(n)) for v in plan.Q0[:k]) >= kappa
        assert sum(v in layout.u_range(plan.core(1)) for v in q0[-k:]) >= kappa


# -- full builds ------------------------------------------------------------


def test_build_and_validate_petersen_k5(instance, graph):
    params, layout, _ = instance
    for e in extension_edges(layout, graph, params.p, 15, seed=1):
        seq = build_cycle(e, layout, graph, params)
        assert len(seq) == layout.N and len(np.unique(seq)) == layout.N
        rep = validate_cycle(seq, layout, graph, params.p, e)
        assert rep.valid, rep.failure
        assert rep.edge_classes["e"] == 1
        assert sum(rep.edge_classes.values()) == rep.windows == layout.N // (layout.k - layout.ell)
        assert len(rep.special) == rep.windows - rep.edge_classes["H2"]


@pytest.mark.parametrize(("k", "ell", "N"), [(6, 2, 855360), (7, 3, 1848772)])
def test_build_other_parameters(k, ell, N, graph):
    params, layout, report = run_pipeline(InstanceConfig(k, ell, N, relaxed=True))
    assert report.passed
    for e in extension_edges(layout, graph, params.p, 3, seed=k):
        rep = validate_cycle(build_cycle(e, layout, graph, params), layout, graph, params.p, e)
        assert rep.valid, rep.failure


@pytest.mark.slow
def test_build_on_flower_snark_k9():
    g = flower_snark(5)
    params, layout, report = run_pipeline(InstanceConfig(9, 4, 12990780, relaxed=True))
    assert report.passed and params.p == 4
    for e in extension_edges(layout, g, params.p, 2, seed=2):
        rep = validate_cycle(build_cycle(e, layout, g, params), layout, g, params.p, e)
        assert rep.valid, rep.failure


def test_pendant_branches_of_q0(instance, graph):
    """Both pendant-side shapes: few and many e-vertices in the pendant A-block."""
    params, layout, _ = instance
    n = layout.n
    # 1, 3, 9 independent in Petersen
    few = A(layout, n + 1, 1) + U(layout, n + 3, 2) + U(layout, n + 9, 2)
    many = A(layout, n + 1, 3) + U(layout, n + 3, 1) + U(layout, n + 9, 1)
    for e in (few, many):
        rep = validate_cycle(build_cycle(e, layout, graph, params), layout, graph, params.p, e)
        assert rep.valid, rep.failure
        assert rep.edge_classes["H12"] >= 1


# -- validation -------------------------------------------------------------


@pytest.fixture(scope="module")
def built(instance, graph):
    params, layout, _ = instance
    e = extension_edges(layout, graph, params.p, 1, seed=42)[0]
    return e, build_cycle(e, layout, graph, params)


def test_validator_rejects_repeats(instance, graph, built):
    params, layout, _ = instance
    e, seq = built
    bad = seq.copy()
    bad[10] = bad[11]
    rep = validate_cycle(bad, layout, graph, params.p, e)
    assert not rep.valid and "repeated" in rep.failure


def test_validator_rejects_wrong_edge(instance, graph, built):
    params, layout, _ = instance
    e, seq = built
    other = extension_edges(layout, graph, params.p, 1, seed=43)[0]
    rep = validate_cycle(seq, layout, graph, params.p, other)
    assert not rep.valid


def test_validator_rejects_swapped_vertices(instance, graph, built):
    params, layout, _ = instance
    e, seq = built
    bad = seq.copy()
    # swapping a vertex of e with a far-away B vertex breaks the window holding e
    pos = int(np.flatnonzero(np.isin(bad, e))[0])
    bad[pos], bad[len(bad) // 2] = bad[len(bad) // 2], bad[pos]
    assert not validate_cycle(bad, layout, graph, params.p, e).valid


def test_validator_rejects_bad_length(instance, graph, built):
    params, layout, _ = instance
    e, seq = built
    rep = validate_cycle(seq[:-1], layout, graph, params.p, e)
    assert not rep.valid and "ids" in rep.failure


def test_streaming_matches_in_memory(instance, graph, built, tmp_path):
    params, layout, _ = instance
    e, seq = built
    full = validate_cycle(seq, layout, graph, params.p, e)
    chunks = (seq[i : i + 9973] for i in range(0, len(seq), 9973))
    streamed = validate_chunks(chunks, len(seq), layout, graph, params.p, e, block_windows=1000)
    assert streamed.to_json() == full.to_json()
    path = tmp_path / "c.bin"
    write_sequence(path, seq, layout.k, layout.ell, layout.N)
    assert validate_file(path, layout, graph, params.p, e, chunk=50_000).to_json() == full.to_json()


def test_report_windows_agree_with_reference_iterator(instance, graph, built):
    params, layout, _ = instance
    e, seq = built
    rep = validate_cycle(seq, layout, graph, params.p, e)
    special = {idx for idx, _ in rep.special}
    ws = list(windows(seq.tolist(), layout.k, layout.ell, "cycle"))
    assert len(ws) == rep.windows
    e_set = frozenset(e)
    assert [idx for idx, w in enumerate(ws) if frozenset(w) == e_set] == [
        idx for idx, label in rep.special if label == "e"
    ]
    for idx in list(special)[:50]:
        assert len(layout.trace(ws[idx])) >= 2


def test_graph_size_mismatch(instance):
    params, layout, _ = instance
    with pytest.raises(ValueError, match="G1 has"):
        build_cycle(list(range(5)), layout, BaseGraph(5, [(1, 2)]), params)


def test_build_error_is_runtime_error():
    assert issubclass(BuildError, RuntimeError)
