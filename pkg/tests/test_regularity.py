import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specreg.errors import EmptySet, NotDisjoint, TooLarge
from specreg.generators import PlantedModel, expected_matrix, generate
from specreg.graph import WeightedGraph, from_edge_list
from specreg.partitioning import exact_min_k_variance, spectral_cluster
from specreg.regularity import (
    alpha_exact,
    alpha_sampled,
    certify,
    mixing_check_exact,
    mixing_check_sampled,
    regularity_bound,
    structural_s_squared,
    tail_eps,
    two_way_trend,
)
from specreg.spectral import decompose, modularity_norm, representatives

from oracles import alpha_bruteforce, mixing_worst_ratio, random_connected

K3 = from_edge_list([(0, 1, 1), (0, 2, 1), (1, 2, 1)], 3)


def test_alpha_regular_triangle_is_zero():
    assert alpha_exact(K3, [0], [1]).alpha == 0.0
    # K_3 is regular, so every subset pair sits exactly at the density
    assert alpha_exact(K3, [0], [1, 2]).alpha == pytest.approx(0.0, abs=1e-15)
    assert alpha_bruteforce(K3.weights, [0], [1, 2]) == pytest.approx(0.0, abs=1e-15)


def test_alpha_hand_expanded_path():
    # path 0-1-2-3, A = {0, 1}, B = {2, 3}: raw cut 1, volumes 3/6 each
    g = from_edge_list([(0, 1, 1), (1, 2, 1), (2, 3, 1)], 4)
    res = alpha_exact(g, [0, 1], [2, 3])
    rho = (1 / 6) / (0.5 * 0.5)
    # X = {1}, Y = {2}: w = 1/6, Vol = 2/6 each
    dev = abs(1 / 6 - rho * (2 / 6) * (2 / 6))
    assert res.alpha == pytest.approx(dev / 0.5, abs=1e-15)
    assert res.alpha == pytest.approx(alpha_bruteforce(g.weights, [0, 1], [2, 3]), abs=1e-15)


def test_alpha_errors():
    with pytest.raises(EmptySet):
        alpha_exact(K3, [], [1])
    with pytest.raises(NotDisjoint):
        alpha_exact(K3, [0, 1], [1, 2])
    g = WeightedGraph.from_matrix(np.ones((30, 30)) - np.eye(30))
    with pytest.raises(TooLarge):
        alpha_exact(g, range(14), range(14))
    with pytest.raises(TooLarge):
        alpha_exact(g, range(14), range(14, 28))


def test_alpha_planted_pair_below_bound():
    g, planted = generate(PlantedModel.two_block(10, 10, 0.8, 0.1, seed=5))
    s = decompose(g)
    X = representatives(s, g, 2)[:, 1:]
    res = exact_min_k_variance(g, X, 2)
    A, B = res.partition.clusters()
    a = alpha_exact(g, A, B).alpha
    assert a == pytest.approx(alpha_bruteforce(g.weights, list(A), list(B)), abs=1e-14)
    bound = regularity_bound(structural_s_squared(g, s, res.partition), tail_eps(s, 2))
    assert a <= bound + 1e-9


def test_sampled_candidates_without_trials():
    g, planted = generate(PlantedModel.two_block(6, 6, 0.8, 0.3, seed=2))
    A, B = planted.clusters()
    zero = alpha_sampled(g, A, B, trials=0, rng_seed=0)
    assert zero.alpha >= 0.0
    assert zero.alpha <= alpha_exact(g, A, B).alpha + 1e-15


def test_sampled_is_a_nested_lower_bound():
    g, planted = generate(PlantedModel.two_block(9, 9, 0.6, 0.2, seed=8))
    A, B = planted.clusters()
    exact = alpha_exact(g, A, B).alpha
    values = [alpha_sampled(g, A, B, t, rng_seed=4).alpha for t in (0, 10, 100, 1000)]
    assert values == sorted(values)
    assert values[-1] <= exact + 1e-15
    intra = alpha_sampled(g, A, A, 500, rng_seed=1).alpha
    assert intra <= alpha_exact(g, A, A).alpha + 1e-15


def test_sampled_large_pair_below_bound():
    g, planted = generate(PlantedModel.two_block(100, 100, 0.2, 0.02, seed=6))
    s = decompose(g)
    res = spectral_cluster(g, 2, spectrum=s, rng_seed=6)
    A, B = res.partition.clusters()
    a = alpha_sampled(g, A, B, trials=10_000, rng_seed=6).alpha
    bound = regularity_bound(structural_s_squared(g, s, res.partition), tail_eps(s, 2))
    assert 0 < a <= bound


def test_mixing_triangle_hand_values():
    rep = mixing_check_exact(K3)
    assert rep.passed and rep.violations == 0
    assert rep.norm == pytest.approx(0.5)
    lhs = abs(1 / 6 - 1 / 9)
    rhs = 0.5 * math.sqrt((1 / 3) * (2 / 3) * (1 / 3) * (2 / 3))
    assert lhs == pytest.approx(1 / 18)
    assert rhs == pytest.approx(1 / 9)
    assert rep.worst_ratio >= lhs / rhs - 1e-12
    worst, violations = mixing_worst_ratio(K3.weights, 0.5)
    assert violations == 0
    assert rep.worst_ratio == pytest.approx(worst, abs=1e-12)


def test_mixing_size_cap():
    g = WeightedGraph.from_matrix(np.ones((14, 14)) - np.eye(14))
    with pytest.raises(TooLarge):
        mixing_check_exact(g)


def test_mixing_sampled_on_larger_graph():
    g, _ = generate(PlantedModel.two_block(20, 20, 0.5, 0.1, seed=3))
    rep = mixing_check_sampled(g, 500, rng_seed=2)
    assert rep.passed and rep.mode.startswith("sampled")


def test_certify_planted_three_blocks():
    g, _ = generate(PlantedModel.uniform((8, 8, 8), 0.9, 0.1, seed=7))
    s = decompose(g)
    res = spectral_cluster(g, 3, spectrum=s, rng_seed=7)
    certs = certify(g, s, res)
    assert len(certs) == 6
    assert all(c.passed and c.alpha_mode == "exact" for c in certs)
    for c in certs:
        A, B = res.partition.members(c.pair[0]), res.partition.members(c.pair[1])
        assert c.alpha == pytest.approx(alpha_bruteforce(g.weights, list(A), list(B)), abs=1e-13)
        assert c.bound_name == ("theorem2_intra" if c.pair[0] == c.pair[1] else "theorem2_inter")


def test_certify_singletons():
    g, _ = generate(PlantedModel.uniform((3, 3), 0.9, 0.4, seed=0))
    s = decompose(g)
    res = spectral_cluster(g, g.n, spectrum=s)
    certs = certify(g, s, res)
    assert len(certs) == g.n * (g.n + 1) // 2
    assert all(c.alpha == 0.0 and c.passed for c in certs)
    assert structural_s_squared(g, s, res.partition) == pytest.approx(0.0, abs=1e-20)


def test_certify_ideal_block_model():
    model = PlantedModel.uniform((4, 5, 6), 0.6, 0.1, seed=0)
    g = expected_matrix(model)
    s = decompose(g)
    res = spectral_cluster(g, 3, spectrum=s)
    certs = certify(g, s, res)
    assert all(c.alpha <= 1e-9 and c.passed for c in certs)


def test_sampled_mode_for_large_clusters():
    g, _ = generate(PlantedModel.two_block(20, 20, 0.6, 0.05, seed=1))
    s = decompose(g)
    res = spectral_cluster(g, 2, spectrum=s)
    certs = certify(g, s, res, trials=200, rng_seed=3)
    assert {c.alpha_mode for c in certs} == {"sampled(200)"}
    again = certify(g, s, res, trials=200, rng_seed=3)
    assert [c.alpha for c in certs] == [c.alpha for c in again]


def test_two_way_trend_value():
    g, _ = generate(PlantedModel.two_block(10, 10, 0.8, 0.1, seed=2))
    s = decompose(g)
    a = s.abs_rho
    assert two_way_trend(s) == pytest.approx(math.sqrt((1 - a[1]) / (1 - a[2])))


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(3, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    return WeightedGraph.from_matrix(random_connected(n, 0.6, np.random.default_rng(seed)))


@settings(max_examples=40, deadline=None)
@given(graphs(), st.data())
def test_alpha_matches_bruteforce_and_is_symmetric(g, data):
    labels = data.draw(st.lists(st.integers(0, 2), min_size=g.n, max_size=g.n))
    A = [i for i in range(g.n) if labels[i] == 0]
    B = [i for i in range(g.n) if labels[i] == 1]
    if not A or not B:
        return
    ab = alpha_exact(g, A, B).alpha
    assert ab == pytest.approx(alpha_bruteforce(g.weights, A, B), abs=1e-14)
    assert alpha_exact(g, B, A).alpha == pytest.approx(ab, abs=1e-15)
    assert alpha_exact(g, A, A).alpha == pytest.approx(alpha_bruteforce(g.weights, A, A), abs=1e-14)
    assert alpha_sampled(g, A, B, 50, rng_seed=0).alpha <= ab + 1e-15
    perm = np.random.default_rng(len(A)).permutation(g.n)
    h = WeightedGraph.from_matrix(g.weights[np.ix_(perm, perm)])
    inv = np.argsort(perm)
    assert alpha_exact(h, inv[A], inv[B]).alpha == pytest.approx(ab, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(graphs(max_n=7))
def test_mixing_lemma_matches_bruteforce(g):
    rep = mixing_check_exact(g)
    worst, violations = mixing_worst_ratio(g.weights, modularity_norm(decompose(g)))
    assert rep.passed and violations == 0
    assert rep.worst_ratio == pytest.approx(worst, abs=1e-9)
