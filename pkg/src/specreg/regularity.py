"""Volume-regularity constants, the weighted expander mixing lemma, certificates.

The exact regularity constant of a cluster pair ``(A, B)`` is

    max over X in A, Y in B of |w(X, Y) - rho(A, B) Vol(X) Vol(Y)| / sqrt(Vol(A) Vol(B)).

For a fixed ``X`` the deviation is linear in the indicator of ``Y``, so the
inner maximum is attained by collecting either all positive or all negative
per-vertex contributions.  The exact scan therefore only enumerates subsets
of the smaller side.  The same observation drives the best-response steps of
the sampled lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .enumeration import mask_matrix, mask_members, subset_sums
from .errors import EmptySet, NotDisjoint, TooLarge
from .graph import VertexSetLike, WeightedGraph, vertex_set
from .partitioning import KMeansResult, k_variance
from .spectral import Spectrum, decompose, modularity_norm, representatives

EXACT_CAP = 13
MIXING_MAX_N = 13
DEFAULT_TRIALS = 2000
PASS_TOL = 1e-9
_LOW_BITS = 12
_BATCH = 1024


class AlphaResult(NamedTuple):
    alpha: float
    X: list[int]
    Y: list[int]


def _pair(g: WeightedGraph, A: VertexSetLike, B: VertexSetLike):
    a = vertex_set(g.n, A)
    b = vertex_set(g.n, B)
    if a.size == 0 or b.size == 0:
        raise EmptySet("regularity pair needs nonempty sets")
    same = np.array_equal(a, b)
    if not same and np.intersect1d(a, b).size:
        raise NotDisjoint("distinct sets A and B must be disjoint")
    return a, b, same


def _density(g, a, b):
    va = g.degrees[a].sum()
    vb = g.degrees[b].sum()
    rho = g.weights[np.ix_(a, b)].sum() / (va * vb)
    return rho, math.sqrt(va * vb)


def alpha_exact(g: WeightedGraph, A: VertexSetLike, B: VertexSetLike, cap: int = EXACT_CAP) -> AlphaResult:
    """Exact regularity constant with a witnessing subset pair.

    ``A == B`` gives the intra-cluster version, normalized by ``Vol(A)``.
    Caps: ``|A| <= cap`` for the intra case, ``|A| + |B| <= 2 cap`` otherwise.
    """
    a, b, same = _pair(g, A, B)
    if same and a.size > cap:
        raise TooLarge(f"intra scan needs |A| <= {cap}, got {a.size}")
    if not same and a.size + b.size > 2 * cap:
        raise TooLarge(f"pair scan needs |A|+|B| <= {2 * cap}, got {a.size + b.size}")
    rho, norm = _density(g, a, b)
    swap = b.size < a.size
    outer, inner = (b, a) if swap else (a, b)
    S = g.weights[np.ix_(outer, inner)]
    d_out, d_in = g.degrees[outer], g.degrees[inner]

    m = outer.size
    low = min(m, _LOW_BITS)
    R_low = subset_sums(S[:low])
    V_low = subset_sums(d_out[:low])
    R_high = subset_sums(S[low:])
    V_high = subset_sums(d_out[low:])
    best_dev, best_mask, best_pos = -1.0, 0, True
    for h in range(R_high.shape[0]):
        c = (R_low + R_high[h]) - rho * (V_low + V_high[h])[:, None] * d_in[None, :]
        pos = np.where(c > 0, c, 0.0).sum(axis=1)
        neg = -np.where(c < 0, c, 0.0).sum(axis=1)
        dev = np.maximum(pos, neg)
        i = int(np.argmax(dev))
        if dev[i] > best_dev:
            best_dev = float(dev[i])
            best_mask = (h << low) | i
            best_pos = bool(pos[i] >= neg[i])
    xo = mask_members(best_mask)
    xs = outer[xo]
    c = S[xo].sum(axis=0) - rho * d_out[xo].sum() * d_in
    ys = inner[c > 0] if best_pos else inner[c < 0]
    X, Y = (ys, xs) if swap else (xs, ys)
    return AlphaResult(max(best_dev, 0.0) / norm + 0.0, sorted(X.tolist()), sorted(Y.tolist()))


def _best_response(S, rho, d_rows, d_cols, Xmat):
    """For each indicator row of ``Xmat`` find the deviation-maximizing column set."""
    c = Xmat @ S - rho * (Xmat @ d_rows)[:, None] * d_cols[None, :]
    pos = np.where(c > 0, c, 0.0).sum(axis=1)
    neg = -np.where(c < 0, c, 0.0).sum(axis=1)
    use_pos = pos >= neg
    Y = np.where(use_pos[:, None], c > 0, c < 0).astype(float)
    return np.maximum(pos, neg), Y


def alpha_sampled(
    g: WeightedGraph,
    A: VertexSetLike,
    B: VertexSetLike,
    trials: int = DEFAULT_TRIALS,
    rng_seed: int = 0,
) -> AlphaResult:
    """Monte-Carlo lower bound on the exact regularity constant.

    Candidates are the degree-sorted prefix pairs, the full sets and
    ``trials`` uniformly random subsets ``X`` of ``A``.  Each starting ``X``
    is followed by an exact best response ``Y`` and one more best response
    ``X'`` to that ``Y``.  Random draws are consumed sequentially, so the
    candidates for ``t`` trials are contained in those for any ``t' > t``.
    """
    a, b, same = _pair(g, A, B)
    rho, norm = _density(g, a, b)
    S = g.weights[np.ix_(a, b)]
    da, db = g.degrees[a], g.degrees[b]

    best = [-1.0, None, None]

    def consider(dev, Xm, Ym):
        i = int(np.argmax(dev))
        if dev[i] > best[0]:
            best[0] = float(dev[i])
            best[1] = a[Xm[i] > 0]
            best[2] = b[Ym[i] > 0]

    # prefix pairs ordered by decreasing degree
    oa = np.argsort(-da, kind="stable")
    ob = np.argsort(-db, kind="stable")
    cum = np.cumsum(np.cumsum(S[np.ix_(oa, ob)], axis=0), axis=1)
    va = np.cumsum(da[oa])
    vb = np.cumsum(db[ob])
    dev = np.abs(cum - rho * va[:, None] * vb[None, :])
    p, q = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[p, q] > best[0]:
        best = [float(dev[p, q]), a[oa[: p + 1]], b[ob[: q + 1]]]

    def explore(Xm):
        dev1, Ym = _best_response(S, rho, da, db, Xm)
        consider(dev1, Xm, Ym)
        dev2, Xm2 = _best_response(S.T, rho, db, da, Ym)
        consider(dev2, Xm2, Ym)

    prefixes = np.tril(np.ones((a.size, a.size)))[:, np.argsort(oa)]
    explore(prefixes)
    # the column side as the starting point too
    col_prefixes = np.tril(np.ones((b.size, b.size)))[:, np.argsort(ob)]
    dev1, Xm = _best_response(S.T, rho, db, da, col_prefixes)
    consider(dev1, Xm, col_prefixes)

    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    done = 0
    while done < trials:
        t = min(_BATCH, trials - done)
        Xm = (rng.random((t, a.size)) < 0.5).astype(float)
        explore(Xm)
        done += t
    return AlphaResult(max(best[0], 0.0) / norm + 0.0, sorted(best[1].tolist()), sorted(best[2].tolist()))


# -- expander mixing lemma ---------------------------------------------------


@dataclass(frozen=True)
class MixingReport:
    worst_pair: tuple[list[int], list[int]]
    worst_ratio: float
    passed: bool
    norm: float
    violations: int
    pairs_checked: int
    mode: str


def _mixing_rows(R, vx, cx, S, vy, cy, norm):
    """Deviation and both right-hand sides for a batch of X rows against all Y.

    ``cx``/``cy`` are complement volumes, summed directly so that ``X = V``
    gives an exact zero instead of ``1 - 1.0000000000000002``.
    """
    C = R @ S.T
    lhs = np.abs(C - vx[:, None] * vy[None, :])
    qx = vx * cx
    qy = vy * cy
    rhs1 = norm * np.sqrt(qx[:, None] * qy[None, :])
    rhs2 = norm * np.sqrt(vx[:, None] * vy[None, :])
    bad = (lhs > rhs1 + PASS_TOL) | (lhs > rhs2 + PASS_TOL)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs1 > 0, lhs / rhs1, np.where(lhs <= PASS_TOL, 0.0, np.inf))
    return ratio, int(bad.sum())


def mixing_check_exact(g: WeightedGraph, spectrum: Spectrum | None = None, max_n: int = MIXING_MAX_N) -> MixingReport:
    """Check the weighted mixing lemma on every pair of vertex subsets."""
    n = g.n
    if n > max_n:
        raise TooLarge(f"exhaustive mixing check needs n <= {max_n}, got {n}")
    s = decompose(g) if spectrum is None else spectrum
    norm = modularity_norm(s)
    S = mask_matrix(n)
    vol = S @ g.degrees
    cvol = vol[::-1]  # mask m and (2^n - 1 - m) are complements
    R_all = S @ g.weights  # row X: w(X, {j})
    worst, wx, wy, bad = -1.0, 0, 0, 0
    for start in range(0, 1 << n, _BATCH):
        stop = min(start + _BATCH, 1 << n)
        ratio, nbad = _mixing_rows(R_all[start:stop], vol[start:stop], cvol[start:stop], S, vol, cvol, norm)
        bad += nbad
        i = int(np.argmax(ratio))
        r, c = divmod(i, ratio.shape[1])
        if ratio[r, c] > worst:
            worst, wx, wy = float(ratio[r, c]), start + r, c
    return MixingReport(
        worst_pair=(mask_members(wx), mask_members(wy)),
        worst_ratio=worst,
        passed=bad == 0 and worst <= 1 + PASS_TOL,
        norm=norm,
        violations=bad,
        pairs_checked=(1 << n) ** 2,
        mode="exact",
    )


def mixing_check_sampled(
    g: WeightedGraph, trials: int = DEFAULT_TRIALS, rng_seed: int = 0, spectrum: Spectrum | None = None
) -> MixingReport:
    """Mixing lemma on ``trials`` random subset pairs (for graphs too large to scan)."""
    s = decompose(g) if spectrum is None else spectrum
    norm = modularity_norm(s)
    n = g.n
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    worst, wx, wy, bad = -1.0, None, None, 0
    done = 0
    while done < trials:
        t = min(_BATCH, trials - done)
        Xm = (rng.random((t, n)) < 0.5).astype(float)
        Ym = (rng.random((t, n)) < 0.5).astype(float)
        vx, vy = Xm @ g.degrees, Ym @ g.degrees
        cx, cy = (1 - Xm) @ g.degrees, (1 - Ym) @ g.degrees
        C = np.sum((Xm @ g.weights) * Ym, axis=1)
        lhs = np.abs(C - vx * vy)
        rhs1 = norm * np.sqrt(vx * cx * vy * cy)
        bad += int(np.sum(lhs > rhs1 + PASS_TOL))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs1 > 0, lhs / rhs1, np.where(lhs <= PASS_TOL, 0.0, np.inf))
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, wx, wy = float(ratio[i]), np.flatnonzero(Xm[i]), np.flatnonzero(Ym[i])
        done += t
    return MixingReport(
        worst_pair=(wx.tolist() if wx is not None else [], wy.tolist() if wy is not None else []),
        worst_ratio=max(worst, 0.0),
        passed=bad == 0 and worst <= 1 + PASS_TOL,
        norm=norm,
        violations=bad,
        pairs_checked=trials,
        mode=f"sampled({trials})",
    )


# -- certificates ------------------------------------------------------------


@dataclass(frozen=True)
class RegularityCertificate:
    pair: tuple[int, int]
    rho: float
    alpha: float
    alpha_mode: str
    bound: float
    bound_name: str
    passed: bool
    witness: tuple[list[int], list[int]] = ((), ())


def regularity_bound(s_squared: float, eps: float) -> float:
    """``2 (sqrt(2) s + eps)``."""
    return 2.0 * (math.sqrt(2.0) * math.sqrt(max(s_squared, 0.0)) + eps)


def tail_eps(spectrum: Spectrum, k: int) -> float:
    """``max_{i > k} |rho_i|``, zero when ``k == n``."""
    a = spectrum.abs_rho
    return float(a[k:].max()) if k < a.size else 0.0


def two_way_trend(spectrum: Spectrum) -> float:
    """``sqrt((1 - theta) / (1 - eps))`` with ``theta = |rho_2|`` and ``eps = max_{i>=3} |rho_i|``.

    A trend statistic for two-way splits; no constant is attached to it.
    """
    theta = float(spectrum.abs_rho[1])
    eps = tail_eps(spectrum, 2)
    if eps >= 1.0:
        return math.inf
    return math.sqrt(max(1.0 - theta, 0.0) / (1.0 - eps))


def structural_s_squared(g: WeightedGraph, spectrum: Spectrum, partition) -> float:
    """k-variance of the structural representatives under ``partition``."""
    X = representatives(spectrum, g, partition.k)
    return k_variance(g, partition, X)


def certify(
    g: WeightedGraph,
    spectrum: Spectrum,
    kmeans_result: KMeansResult,
    *,
    exact_cap: int = EXACT_CAP,
    trials: int = DEFAULT_TRIALS,
    rng_seed: int = 0,
) -> list[RegularityCertificate]:
    """Regularity certificates for every cluster pair ``a <= b``.

    ``s^2`` is re-evaluated on the representatives of ``spectrum`` so the
    bound always refers to the structural eigenvectors.  Pairs within the
    exact caps get the exact constant; larger ones a sampled lower bound.
    """
    P = kmeans_result.partition
    k = P.k
    if k < 2:
        raise ValueError("certificates need at least two clusters")
    s2 = structural_s_squared(g, spectrum, P)
    eps = tail_eps(spectrum, k)
    bound = regularity_bound(s2, eps)
    clusters = P.clusters()
    out = []
    for i in range(k):
        for j in range(i, k):
            A, B = clusters[i], clusters[j]
            rho, _ = _density(g, A, B)
            same = i == j
            small = max(A.size, B.size) <= exact_cap
            if small:
                res = alpha_exact(g, A, B, cap=exact_cap)
                mode = "exact"
            else:
                seed = np.random.SeedSequence(rng_seed, spawn_key=(i, j)).generate_state(1)[0]
                res = alpha_sampled(g, A, B, trials, int(seed))
                mode = f"sampled({trials})"
            out.append(
                RegularityCertificate(
                    pair=(i, j),
                    rho=float(rho),
                    alpha=res.alpha,
                    alpha_mode=mode,
                    bound=bound,
                    bound_name="theorem2_intra" if same else "theorem2_inter",
                    passed=bool(res.alpha <= bound + PASS_TOL),
                    witness=(res.X, res.Y),
                )
            )
    return out
