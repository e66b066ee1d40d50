import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamsat.basegraph import BaseGraph, cycle_graph, petersen
from hamsat.family import (
    BatchClassifier,
    MembershipClass,
    c_value,
    classify_edge,
    count_h3,
    count_h3_brute,
    onto_count,
    trace_sets,
)
from hamsat.layout import VertexLayout
from hamsat.satlab import micro_layout, sample_edges


@pytest.fixture(scope="module")
def fig():
    """k=7, l=3 micro layout over Petersen."""
    return micro_layout(7, 3, 10), petersen()


def A(lay, s, c, skip=0):
    return list(lay.a_range(s))[skip : skip + c]


def U(lay, s, c):
    return list(lay.u_range(s))[:c]


def test_h11_example(fig):
    lay, g = fig
    e = A(lay, 1, 3) + A(lay, 2, 3) + A(lay, lay.n + 4, 1)
    cls = classify_edge(e, lay, g, p=3)
    assert cls.h11 and not cls.h12 and not cls.h2 and cls.h3


def test_h12_example(fig):
    lay, g = fig
    e = A(lay, 3, 4) + A(lay, lay.n + 3, 3)
    assert lay.trace(e) == {3, lay.n + 3} and lay.trace1(e) == {3}
    cls = classify_edge(e, lay, g, p=3)
    assert cls.h12 and not cls.h11 and not cls.h2


def test_example_outside_h1_and_h2(fig):
    lay, g = fig
    e = U(lay, 3, 5) + U(lay, 2, 2)
    cls = classify_edge(e, lay, g, p=3)
    assert not (cls.h1 or cls.h2)
    assert str(cls) == "H3"


def test_h2_needs_kappa_in_the_minimum_part(fig):
    lay, g = fig
    assert classify_edge(U(lay, 2, 5) + U(lay, 9, 2), lay, g, 3).h2
    assert not classify_edge(U(lay, 2, 4) + U(lay, 9, 3), lay, g, 3).h2


def test_h11_needs_a_g1_edge(fig):
    lay, g = fig
    assert not g.has_edge(1, 3)
    e = A(lay, 1, 3) + A(lay, 3, 3) + A(lay, lay.n + 4, 1)
    assert not classify_edge(e, lay, g, 3).h11


def test_membership_str():
    assert str(MembershipClass(frozenset())) == "none"
    assert str(MembershipClass(frozenset({"H3", "H11"}))) == "H11,H3"


def test_classify_rejects_repeated_vertices(fig):
    lay, g = fig
    with pytest.raises(ValueError):
        classify_edge([0] * 7, lay, g, 3)


def test_c_value_for_independent_pendants():
    lay, g = micro_layout(5, 2, 10), petersen()
    e = U(lay, lay.n + 1, 2) + U(lay, lay.n + 3, 1) + U(lay, lay.n + 9, 1) + U(lay, lay.n + 10, 1)
    assert c_value(e, lay, g) == 4


def test_onto_count_small_cases():
    assert onto_count([3, 3], 4) == 15
    assert onto_count([2, 2], 4) == 1
    assert onto_count([1, 1, 1], 2) == 0
    assert onto_count([5], 3) == 10


def test_count_h3_two_parts():
    lay = VertexLayout(4, 1, 1, (1, 1), (2, 2))
    g = BaseGraph(1, [])
    assert count_h3(lay, g, 2) == 15 == count_h3_brute(lay, g, 2)
    assert count_h3(lay, g, 0) == 0


@pytest.mark.parametrize("p", range(0, 5))
def test_count_h3_cycle_graph(p):
    lay = VertexLayout(3, 1, 4, (1,) * 8, (1, 0, 1, 0, 0, 1, 0, 1))
    g = cycle_graph(4)
    assert count_h3(lay, g, p) == count_h3_brute(lay, g, p)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.data())
def test_count_h3_matches_brute_force(n, data):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = BaseGraph(n, [e for e, k in zip(pairs, keep) if k])
    sizes = data.draw(st.lists(st.integers(0, 2), min_size=2 * n, max_size=2 * n))
    k = data.draw(st.integers(2, 5))
    lay = VertexLayout(k, 1, n, tuple(sizes), (0,) * (2 * n))
    if lay.N < k or lay.N > 14:
        return
    p = data.draw(st.integers(0, k))
    assert count_h3(lay, g, p) == count_h3_brute(lay, g, p)


def test_trace_sets_are_distinct_and_bounded():
    g = petersen()
    sets = list(trace_sets(g, 3, 2))
    assert len(sets) == len(set(sets))
    assert all(1 <= len(T) <= 3 and g.cube_component_count(T) <= 2 for T in sets)
    expected = [
        frozenset(T)
        for r in range(1, 4)
        for T in itertools.combinations(range(1, 21), r)
        if g.cube_component_count(T) <= 2
    ]
    assert set(sets) == set(expected)


def test_h3_count_growth_is_polynomial():
    # doubling n (n=10 -> 20) should scale |H3| by a bounded power of 2
    from hamsat.basegraph import flower_snark

    small = count_h3(micro_layout(5, 2, 10), petersen(), 2)
    large = count_h3(micro_layout(5, 2, 20), flower_snark(5), 2)
    assert 1 < large / small < 2**5


def test_h3_frozen_petersen_count(instance, graph):
    params, layout, _ = instance
    assert count_h3(layout, graph, params.p) == 39953186055790066904523000


def test_batch_classifier_matches_scalar(instance, graph):
    params, layout, _ = instance
    edges = sample_edges(layout, graph, 4000, seed=5)
    flags = BatchClassifier(layout, graph, params.p)(edges)
    for row, e in enumerate(edges):
        cls = classify_edge(e.tolist(), layout, graph, params.p)
        assert (cls.h11, cls.h12, cls.h2, cls.h3) == tuple(bool(flags[f][row]) for f in ("H11", "H12", "H2", "H3"))


def test_family_exclusions_on_samples(instance, graph):
    params, layout, _ = instance
    f = BatchClassifier(layout, graph, params.p)(sample_edges(layout, graph, 50_000, seed=9))
    assert not np.any(f["H11"] & f["H12"])
    assert not np.any((f["H11"] | f["H12"]) & f["H2"])
    assert np.all(f["H3"][f["H11"] | f["H12"] | f["H2"]])
    assert f["H11"].any() and f["H12"].any() and f["H2"].any()
