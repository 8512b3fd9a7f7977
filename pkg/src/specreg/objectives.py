"""Isoperimetric number, normalized cuts, normalized modularity and their spectral bounds.

Every bound check runs exhaustive oracles; nothing here goes through the
k-means heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .enumeration import PARTITION_CAP, iter_partitions, mask_members, stirling2, subset_sums
from .errors import SpecregError, TooLarge
from .graph import WeightedGraph
from .partitioning import Partition, exact_min_k_variance
from .spectral import Spectrum, decompose

ISO_MAX_N = 24
BOUND_TOL = 1e-9


def internal_weights(g: WeightedGraph) -> np.ndarray:
    """``w(U, U)`` for every bitmask ``U``."""
    W = g.weights
    table = np.zeros(1)
    for h in range(g.n):
        row = subset_sums(W[h, :h]) if h else np.zeros(1)
        table = np.concatenate([table, table + 2 * row + W[h, h]])
    return table


def isoperimetric_exact(g: WeightedGraph) -> tuple[float, list[int]]:
    """Exact ``h(G)`` and the smallest-bitmask minimizer."""
    if g.n > ISO_MAX_N:
        raise TooLarge(f"isoperimetric scan needs n <= {ISO_MAX_N}, got {g.n}")
    vol = subset_sums(g.degrees)
    cut = vol - internal_weights(g)
    admissible = vol <= 0.5 + 1e-12
    admissible[0] = False
    ratio = np.full(vol.shape, np.inf)
    ratio[admissible] = cut[admissible] / vol[admissible]
    best = int(np.argmin(ratio))
    return float(ratio[best]), mask_members(best)


def cut_table(g: WeightedGraph, P: Partition) -> np.ndarray:
    """k-by-k matrix of cluster-pair cuts ``w(V_a, V_b)``."""
    H = P.indicator()
    return H.T @ g.weights @ H


def normalized_cut(g: WeightedGraph, P: Partition) -> float:
    """``k - sum_a w(V_a, V_a) / Vol(V_a)``."""
    M = cut_table(g, P)
    return float(P.k - np.sum(np.diag(M) / P.volumes))


def normalized_cut_pairwise(g: WeightedGraph, P: Partition) -> float:
    """The same cut summed over cluster pairs, ``(1/Vol_a + 1/Vol_b) w(V_a, V_b)``."""
    M = cut_table(g, P)
    total = 0.0
    for a in range(P.k):
        for b in range(a + 1, P.k):
            total += (1 / P.volumes[a] + 1 / P.volumes[b]) * M[a, b]
    return float(total)


def modularity(g: WeightedGraph, P: Partition) -> float:
    """Normalized Newman-Girvan modularity ``sum_a [w(V_a,V_a) - Vol_a^2] / Vol_a``."""
    total = 0.0
    d = g.degrees
    for members, vol in zip(P.clusters(), P.volumes):
        inner = g.weights[np.ix_(members, members)].sum()
        total += (inner - d[members].sum() ** 2) / vol
    return float(total)


OBJECTIVES = ("min_fk", "min_Qk", "max_Qk")


def extremize_partition_exact(
    g: WeightedGraph, k: int, objective: str, cap: int = PARTITION_CAP
) -> tuple[float, Partition]:
    """Exact extremum of the normalized cut or modularity over all k-partitions.

    Ties go to the first partition in lexicographic restricted-growth order.
    ``max_Qk`` and ``min_fk`` share a witness since ``Q_k = k - 1 - f_k``.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    n = g.n
    count = stirling2(n, k)
    if count > cap:
        raise TooLarge(f"S({n},{k}) = {count} partitions exceeds cap {cap}")
    W, d = g.weights, g.degrees
    sign = -1.0 if objective == "min_Qk" else 1.0
    best_score, best_row = -np.inf, None
    for rows in iter_partitions(n, k):
        H = np.zeros((rows.shape[0], k, n))
        H[np.arange(rows.shape[0])[:, None], rows, np.arange(n)[None, :]] = 1.0
        inner = np.einsum("rkn,nm,rkm->rk", H, W, H)
        ratio = np.sum(inner / (H @ d), axis=1)
        i = int(np.argmax(sign * ratio))
        if sign * ratio[i] > best_score:
            best_score, best_row = sign * ratio[i], rows[i].astype(np.intp)
    P = Partition.from_assignment(g, best_row, k)
    r = sign * best_score
    value = k - r if objective == "min_fk" else r - 1
    return float(value), P


def laplacian_vector(s: Spectrum, i: int) -> tuple[float, np.ndarray]:
    """``(lambda_i, u_i)`` with the Laplacian's ascending (1-based) numbering."""
    order = np.argsort(-s.rho, kind="stable")
    j = order[i - 1]
    return float(1.0 - s.rho[j]), s.vectors[:, j]


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float
    passed: bool


def _check(name: str, lhs: float, rhs: float) -> Inequality:
    return Inequality(name, float(lhs), float(rhs), bool(lhs <= rhs + BOUND_TOL))


@dataclass
class BoundsReport:
    n: int
    lambda2_half: float | None = None
    h_exact: float | None = None
    h_witness: list[int] | None = None
    h_upper: float | None = None
    h_upper_strong: float | None = None
    two_variance: float | None = None
    two_variance_bound: float | None = None
    fk_exact: dict[int, float] = field(default_factory=dict)
    fk_lower: dict[int, float] = field(default_factory=dict)
    c_empirical: dict[int, float] = field(default_factory=dict)
    qk_min_exact: dict[int, float] = field(default_factory=dict)
    qk_min_lower: dict[int, float] = field(default_factory=dict)
    qk_max_exact: dict[int, float] = field(default_factory=dict)
    inequalities: list[Inequality] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(q.passed for q in self.inequalities)

    def failures(self) -> list[Inequality]:
        return [q for q in self.inequalities if not q.passed]


def verify_bounds(g: WeightedGraph, ks=(2, 3), spectrum: Spectrum | None = None) -> BoundsReport:
    """Evaluate every spectral bound on ``g`` with exact left and right sides.

    Sub-checks that exceed an enumeration cap are listed in ``skipped``
    instead of failing the whole report.
    """
    s = decompose(g) if spectrum is None else spectrum
    lam = s.lam
    beta = s.beta
    n = g.n
    rep = BoundsReport(n=n)
    lam2 = float(lam[1])
    rep.lambda2_half = lam2 / 2
    rep.inequalities.append(_check("lambda2 <= n/(n-1)", lam2, n / (n - 1)))
    rep.inequalities.append(_check("lambda_n <= 2", float(lam[-1]), 2.0))

    h = None
    try:
        h, witness = isoperimetric_exact(g)
    except SpecregError as exc:
        rep.skipped.append(("isoperimetric", str(exc)))
    if h is not None:
        rep.h_exact, rep.h_witness = h, witness
        rep.h_upper = min(1.0, math.sqrt(2 * lam2))
        rep.inequalities.append(_check("lambda2/2 <= h", lam2 / 2, h))
        rep.inequalities.append(_check("h <= min(1, sqrt(2 lambda2))", h, rep.h_upper))
        if lam2 <= 1 + BOUND_TOL:
            rep.h_upper_strong = math.sqrt(max(lam2 * (2 - lam2), 0.0))
            rep.inequalities.append(
                _check("h <= sqrt(lambda2 (2 - lambda2))", h, rep.h_upper_strong)
            )

    lam3 = float(lam[2]) if n >= 3 else 0.0
    if lam3 > 1e-9:
        _, u2 = laplacian_vector(s, 2)
        x = u2 / np.sqrt(g.degrees)
        try:
            res = exact_min_k_variance(g, x, 2)
        except SpecregError as exc:
            rep.skipped.append(("two_variance", str(exc)))
        else:
            rep.two_variance = res.s_squared
            rep.two_variance_bound = lam2 / lam3
            rep.inequalities.append(_check("S2^2(D^-1/2 u2) <= lambda2/lambda3", res.s_squared, lam2 / lam3))

    for k in ks:
        k = int(k)
        if not 2 <= k <= n:
            rep.skipped.append((f"k={k}", "k must satisfy 2 <= k <= n"))
            continue
        try:
            fk, _ = extremize_partition_exact(g, k, "min_fk")
            qmin, _ = extremize_partition_exact(g, k, "min_Qk")
            qmax, _ = extremize_partition_exact(g, k, "max_Qk")
        except SpecregError as exc:
            rep.skipped.append((f"k={k}", str(exc)))
            continue
        lower = float(np.sum(lam[:k]))
        qlower = float(np.sum(beta[n - k:]))
        rep.fk_exact[k] = fk
        rep.fk_lower[k] = lower
        rep.c_empirical[k] = math.sqrt(fk / lower) if lower > 0 else math.inf
        rep.qk_min_exact[k] = qmin
        rep.qk_min_lower[k] = qlower
        rep.qk_max_exact[k] = qmax
        rep.inequalities.append(_check(f"sum lambda_1..{k} <= f_{k}", lower, fk))
        rep.inequalities.append(_check(f"sum beta_n..n+1-{k} <= min Q_{k}", qlower, qmin))
        if k == 2 and h is not None:
            rep.inequalities.append(_check("f_2 <= 2h", fk, 2 * h))
    return rep
