import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from piercing_lab.geometry import RegionFamily
from piercing_lab.helly import (
    certified_deep_bound,
    deep_edge,
    exact_delaunay_expectation,
    friend_density,
    validate_friend_lemma,
)
from piercing_lab.hypergraph import (
    Hypergraph,
    check_hereditary_linearity,
    delaunay_graph,
    dual_hypergraph,
    friends_pairs,
    induced,
)

from conftest import disc, random_discs


def H(n, *edges):
    return Hypergraph.from_edges(n, edges)


hypergraphs = st.integers(2, 9).flatmap(
    lambda n: st.lists(st.sets(st.integers(0, n - 1), min_size=1), min_size=1, max_size=10).map(lambda es: H(n, *es))
)


def enumerated_expectation(h, x):
    """Sum over every vertex subset, weighted by its probability."""
    n = h.n_vertices
    total = 0.0
    for m in range(1, 1 << n):
        s = [v for v in range(n) if (m >> v) & 1]
        prob = x ** len(s) * (1 - x) ** (n - len(s))
        total += prob * len(delaunay_graph(induced(h, s)).edges)
    return total


def test_friend_density_examples():
    assert friend_density(H(3, {0, 1, 2})) == 1.0
    assert friend_density(Hypergraph(4, frozenset())) == 0.0
    with pytest.raises(ValueError):
        friend_density(H(1, {0}))


@given(hypergraphs)
@settings(max_examples=100, deadline=None)
def test_friend_density_is_pair_fraction(h):
    d = friend_density(h) * math.comb(h.n_vertices, 2)
    assert d == pytest.approx(round(d)) and round(d) == len(friends_pairs(h))


def test_certified_bound_examples():
    assert certified_deep_bound(10, 3, 20) == 2
    assert certified_deep_bound(10, 3, 100) == 3
    assert certified_deep_bound(10, 3, 600) == 7
    assert certified_deep_bound(10, 3, 0) == 1
    assert certified_deep_bound(40, 3, 780) == math.floor(780 / 480) + 2


@given(st.integers(2, 60), st.floats(0.5, 6), st.floats(0.5, 6), st.data())
def test_certified_bound_monotone(n, c1, c2, data):
    total = math.comb(n, 2)
    a = data.draw(st.integers(0, total))
    b = data.draw(st.integers(a, total))
    assert certified_deep_bound(n, c1, a) <= certified_deep_bound(n, c1, b)
    lo, hi = sorted((c1, c2))
    assert certified_deep_bound(n, hi, a) <= certified_deep_bound(n, lo, a)


@given(hypergraphs)
@settings(max_examples=300, deadline=None)
def test_certificate_sound_on_linear_hypergraphs(h):
    rep = check_hereditary_linearity(h, 3, "exhaustive")
    assume(rep.passed)
    assert h.max_edge_size >= certified_deep_bound(h.n_vertices, 3, len(friends_pairs(h)))


def test_deep_edge_examples():
    rep = deep_edge(H(4, {0, 1, 2, 3}))
    assert rep.witness == frozenset({0, 1, 2, 3}) and rep.k_observed == 4
    with pytest.raises(ValueError):
        deep_edge(Hypergraph(3, frozenset()))


def test_deep_edge_common_point():
    f = RegionFamily(tuple(disc(np.cos(t), np.sin(t), 1.2) for t in np.linspace(0, 6, 7)))
    rep = deep_edge(dual_hypergraph(f))
    assert rep.k_observed == 7 and rep.alpha == 1.0


@pytest.mark.parametrize("seed", range(10))
def test_deep_edge_sound_on_discs(seed):
    rng = np.random.default_rng(seed)
    h = dual_hypergraph(random_discs(rng, 12, side=3 + seed))
    assert check_hereditary_linearity(h, 3, "exhaustive").passed
    rep = deep_edge(h, 3)
    assert rep.sound and 0 <= rep.alpha <= 1


def test_friend_lemma_edgeless():
    rep = validate_friend_lemma(Hypergraph(3, frozenset()), 0.5, trials=100)
    assert rep.empirical_mean == 0 and rep.lower_bound == 0 and rep.passed


def test_friend_lemma_single_pair_exact():
    h = H(2, {0, 1})
    rep = validate_friend_lemma(h, 0.5, trials=20_000, seed=3)
    assert rep.exact_mean == pytest.approx(0.25)
    assert rep.lower_bound == pytest.approx(0.25)
    assert abs(rep.empirical_mean - 0.25) < 4 * rep.stderr
    assert rep.passed


@given(hypergraphs, st.floats(0.05, 0.95))
@settings(max_examples=60, deadline=None)
def test_exact_expectation_matches_enumeration(h, x):
    exact = exact_delaunay_expectation(h, x)
    assume(exact is not None)
    assert exact == pytest.approx(enumerated_expectation(h, x), abs=1e-9)


def test_pair_edges_contribute_x_squared():
    h = H(6, {0, 1}, {2, 3}, {4, 5})
    assert exact_delaunay_expectation(h, 0.3) == pytest.approx(3 * 0.09)


@pytest.mark.parametrize("seed", range(3))
def test_friend_lemma_on_discs(seed):
    rng = np.random.default_rng(seed)
    h = dual_hypergraph(random_discs(rng, 15, side=4))
    x = 1 / max(h.max_edge_size - 2, 2)
    rep = validate_friend_lemma(h, x, trials=10_000, seed=seed)
    assert rep.passed
    if rep.exact_mean is not None:
        assert abs(rep.empirical_mean - rep.exact_mean) < 4 * rep.stderr


def test_friend_lemma_seeded_reproducible():
    h = dual_hypergraph(random_discs(np.random.default_rng(1), 10, side=4))
    a = validate_friend_lemma(h, 0.3, trials=500, seed=9)
    b = validate_friend_lemma(h, 0.3, trials=500, seed=9)
    assert a == b
