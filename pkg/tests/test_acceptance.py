"""Acceptance suite: eleven end-to-end criteria at their stated tolerances.

Every test records a one-line verdict (see ``conftest.record_criterion``)
before asserting, so a failing criterion still prints its line.  Seeds are
fixed; the random graphs come from ``oracles.random_connected`` drawn from
``default_rng(seed)``, alternating weighted and 0-1 edges.
"""

import json
import subprocess
import sys
import time

import numpy as np
from scipy.stats import spearmanr

from specreg.generators import PlantedModel, expected_matrix, generate
from specreg.graph import WeightedGraph, from_edge_list
from specreg.objectives import verify_bounds
from specreg.partitioning import exact_min_k_variance, spectral_cluster, weighted_kmeans
from specreg.regularity import certify, mixing_check_exact, tail_eps
from specreg.spectral import decompose, representatives, select_k

from conftest import record_criterion
from oracles import best_match_accuracy, random_connected

TOL = 1e-9


def seeded_graph(seed: int, n_low: int, n_high: int) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_low, n_high + 1))
    p = float(rng.uniform(0.3, 0.8))
    return WeightedGraph.from_matrix(random_connected(n, p, rng, weighted=seed % 2 == 0))


def check(number, title, passed, detail):
    record_criterion(number, title, passed, detail)
    assert passed, detail


def test_01_closed_form_spectra():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 13):
        W = np.ones((n, n)) - np.eye(n)
        lam = decompose(WeightedGraph.from_matrix(W)).lam
        expected = np.r_[0.0, np.full(n - 1, n / (n - 1))]
        worst = max(worst, float(np.abs(lam - expected).max()))
    p3 = decompose(from_edge_list([(0, 1, 1), (1, 2, 1)], 3)).lam
    worst = max(worst, float(np.abs(p3 - [0, 1, 2]).max()))
    dt = time.perf_counter() - t0
    check(1, "closed-form spectra K_2..K_12, P_3", worst <= 1e-10 and dt < 1.0, f"max error {worst:.2e}, {dt:.2f}s")


def test_02_mixing_lemma_exhaustive():
    t0 = time.perf_counter()
    violations = 0
    worst = 0.0
    for seed in range(50):
        rep = mixing_check_exact(seeded_graph(seed, 3, 10))
        violations += rep.violations
        worst = max(worst, rep.worst_ratio)
    dt = time.perf_counter() - t0
    ok = violations == 0 and worst <= 1 + TOL and dt < 120
    check(2, "mixing lemma, 50 graphs n<=10, all subset pairs", ok, f"{violations} violations, worst ratio {worst:.12f}, {dt:.1f}s")


EQ3 = ("lambda2/2 <= h", "h <= min(1, sqrt(2 lambda2))", "h <= sqrt(lambda2 (2 - lambda2))", "f_2 <= 2h")


def test_03_isoperimetric_bounds():
    t0 = time.perf_counter()
    failures, checked, strong = [], 0, 0
    for seed in range(30):
        rep = verify_bounds(seeded_graph(100 + seed, 4, 12), [2])
        for q in rep.inequalities:
            if q.name in EQ3:
                checked += 1
                strong += q.name.startswith("h <= sqrt")
                if not q.passed:
                    failures.append((seed, q))
        if rep.h_exact is None or not any(q.name == "f_2 <= 2h" for q in rep.inequalities):
            failures.append((seed, "missing check"))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 120
    check(3, "isoperimetric bounds and f_2 <= 2h, 30 graphs n<=12", ok, f"{checked} checks ({strong} strong), {len(failures)} violations, {dt:.1f}s")


def test_04_two_variance_bound():
    failures, used, seed = [], 0, 200
    while used < 30:
        g = seeded_graph(seed, 4, 10)
        seed += 1
        rep = verify_bounds(g, [])
        if rep.two_variance is None:
            continue  # lambda_3 <= 1e-9
        used += 1
        if not rep.two_variance <= rep.two_variance_bound + TOL:
            failures.append(seed - 1)
    check(4, "exact S_2^2 of D^-1/2 u_2 <= lambda2/lambda3, 30 graphs n<=10", not failures, f"{len(failures)} violations")


def test_05_cut_and_modularity_lower_bounds():
    failures, ratios = [], []
    for seed in range(30):
        g = seeded_graph(300 + seed, 4, 9)
        rep = verify_bounds(g, [2, 3])
        for k in (2, 3):
            if k not in rep.fk_exact:
                failures.append((seed, k, "skipped"))
                continue
            if not rep.fk_lower[k] <= rep.fk_exact[k] + TOL:
                failures.append((seed, k, "f_k"))
            if not rep.qk_min_lower[k] <= rep.qk_min_exact[k] + TOL:
                failures.append((seed, k, "Q_k"))
            ratios.append(rep.c_empirical[k])
    detail = f"{len(failures)} violations; empirical c in [{min(ratios):.3f}, {max(ratios):.3f}]"
    check(5, "sum lambda <= f_k and min Q_k >= sum beta, k in {2,3}, 30 graphs n<=9", not failures, detail)


def planted_instances():
    sizes2 = [(8, 8), (7, 8), (6, 8), (8, 5)]
    sizes3 = [(5, 5, 5), (4, 6, 6), (5, 5, 6), (4, 4, 5)]
    contrasts = [(0.9, 0.1), (0.8, 0.15), (0.7, 0.1)]
    for seed in range(20):
        sizes = sizes2[seed // 2 % 4] if seed % 2 == 0 else sizes3[seed // 2 % 4]
        p_in, p_out = contrasts[seed % 3]
        yield PlantedModel.uniform(sizes, p_in, p_out, seed=500 + seed)


def test_06_regularity_certificate():
    t0 = time.perf_counter()
    failures, worst, count = [], 0.0, 0
    for model in planted_instances():
        assert model.probs[0, 0] >= 5 * model.probs[0, 1] and model.n <= 24
        g, _ = generate(model)
        s = decompose(g)
        k = model.k
        X = representatives(s, g, k)[:, 1:]
        res = exact_min_k_variance(g, X, k)
        for c in certify(g, s, res):
            count += 1
            if c.alpha_mode != "exact":
                failures.append((model.seed, c.pair, "not exact"))
            worst = max(worst, c.alpha / c.bound)
            if not c.alpha <= c.bound + TOL:
                failures.append((model.seed, c.pair))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 600
    check(6, "exact alpha <= 2(sqrt2 s + eps), 20 planted graphs", ok, f"{count} certificates, {len(failures)} violations, worst alpha/bound {worst:.3f}, {dt:.1f}s")


RATIOS = (1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0, 40.0)


def test_07_sampled_alpha_trend():
    """Sum p_in + p_out fixed at 0.3 so the mean degree stays put while contrast grows."""
    t0 = time.perf_counter()
    gaps, alphas = [], []
    for level, r in enumerate(RATIOS):
        p_out = 0.3 / (1 + r)
        for seed in range(5):
            g, _ = generate(PlantedModel.two_block(100, 100, 0.3 - p_out, p_out, seed=700 + 10 * level + seed))
            s = decompose(g)
            res = spectral_cluster(g, 2, spectrum=s, rng_seed=seed)
            inter = [c for c in certify(g, s, res, trials=500, rng_seed=seed) if c.pair == (0, 1)][0]
            a = s.abs_rho
            gaps.append(a[1] - tail_eps(s, 2))
            alphas.append(inter.alpha)
    corr = float(spearmanr(gaps, alphas).correlation)
    dt = time.perf_counter() - t0
    ok = corr <= -0.8 and dt < 300
    check(7, f"sampled alpha vs theta-eps, {len(RATIOS)} levels x 5 seeds, n=200", ok, f"Spearman {corr:.3f}, {dt:.1f}s")


def test_08_planted_recovery():
    acc_ok, k_ok, accs = 0, 0, []
    for seed in range(20):
        g, planted = generate(PlantedModel.two_block(100, 100, 0.2, 0.02, seed=800 + seed))
        s = decompose(g)
        k_ok += select_k(s).k == 2
        res = spectral_cluster(g, 2, spectrum=s, rng_seed=seed)
        acc = best_match_accuracy(res.partition.assignment, planted.assignment, 2)
        accs.append(acc)
        acc_ok += acc >= 0.95
    ok = acc_ok >= 19 and k_ok >= 19
    check(8, "recovery n=200, p_in=0.2, p_out=0.02", ok, f"accuracy>=95% in {acc_ok}/20 (min {min(accs):.3f}), select_k=2 in {k_ok}/20")


def test_09_ideal_block_model():
    models = [
        PlantedModel.two_block(4, 4, 0.2, 0.02),
        PlantedModel.uniform((4, 5, 6), 0.6, 0.1),
        PlantedModel.uniform((10, 10, 10), 0.5, 0.05),
        PlantedModel((3, 4, 5, 6), [[0.9, 0.1, 0.2, 0.05], [0.1, 0.8, 0.1, 0.1], [0.2, 0.1, 0.7, 0.15], [0.05, 0.1, 0.15, 0.6]]),
    ]
    worst_alpha, bad = 0.0, []
    for model in models:
        g = expected_matrix(model)
        s = decompose(g)
        structural = int(np.sum(s.abs_rho > 1e-9))
        if structural != model.k:
            bad.append((model.sizes, structural))
        res = spectral_cluster(g, model.k, spectrum=s)
        for c in certify(g, s, res):
            worst_alpha = max(worst_alpha, c.alpha)
    ok = not bad and worst_alpha <= 1e-9
    check(9, "ideal block model: k structural eigenvalues, alpha = 0", ok, f"{len(models)} models, max alpha {worst_alpha:.2e}, rank mismatches {bad}")


def test_10_kmeans_attains_exact_minimum():
    worst, misses = 0.0, 0
    for i in range(20):
        g = seeded_graph(1000 + i, 5, 9)
        k = 2 + i % 2
        X = representatives(decompose(g), g, k)[:, 1:]
        exact = exact_min_k_variance(g, X, k).s_squared
        km = weighted_kmeans(g, X, k, seeds=32, rng_seed=i).s_squared
        gap = km - exact
        worst = max(worst, gap)
        misses += gap > 1e-10
    check(10, "weighted_kmeans(32) = exact_min_k_variance, 20 instances n<=9", misses == 0, f"max excess {worst:.2e}")


def test_11_cli_determinism(tmp_path):
    model = PlantedModel.uniform((6, 6, 6), 0.8, 0.1, seed=11)
    (tmp_path / "m.json").write_text(json.dumps(model.to_json()))
    (tmp_path / "k4.tsv").write_text("0 1 1\n0 2 2\n0 3 1\n1 2 1\n1 3 3\n2 3 1\n")
    subprocess.run([sys.executable, "-m", "specreg", "generate", "--in", "m.json", "--out", "g.tsv"], cwd=tmp_path, check=True)
    runs = [
        ("generate", "m.json", ["--seed", "5"]),
        ("spectrum", "g.tsv", []),
        ("cluster", "g.tsv", ["--seed", "5"]),
        ("certify", "g.tsv", ["--seed", "5", "--exact-cap", "4", "--trials", "200"]),
        ("bounds", "k4.tsv", []),
        ("mixing", "g.tsv", ["--seed", "5", "--trials", "200"]),
    ]
    differing = []
    for cmd, src, extra in runs:
        for fmt in ("json", "tsv"):
            blobs = []
            for rep in range(2):
                out = f"{cmd}.{fmt}.{rep}"
                argv = [sys.executable, "-m", "specreg", cmd, "--in", src, "--out", out, "--format", fmt, *extra]
                proc = subprocess.run(argv, cwd=tmp_path, capture_output=True)
                files = sorted(tmp_path.glob(f"{out}*"))
                blobs.append((proc.returncode, proc.stdout, [f.read_bytes() for f in files]))
            if blobs[0] != blobs[1] or blobs[0][0] != 0:
                differing.append(f"{cmd}/{fmt}")
    ok = not differing
    check(11, "CLI determinism, 6 commands x 2 formats, separate processes", ok, f"differing: {differing or 'none'}")
