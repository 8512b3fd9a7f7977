"""Weighted k-variance, weighted k-means and the exhaustive k-variance oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enumeration import PARTITION_CAP, iter_partitions, stirling2
from .errors import EmptyCluster, TooLarge
from .graph import WeightedGraph
from .spectral import Spectrum, decompose, representatives, select_k

MAX_ITER = 1000
IMPROVEMENT_TOL = 1e-12
DEFAULT_RESTARTS = 32


def canonical_labels(assignment) -> np.ndarray:
    """Relabel clusters in order of first occurrence."""
    assignment = np.asarray(assignment)
    mapping: dict[int, int] = {}
    out = np.empty(assignment.size, dtype=np.intp)
    for i, a in enumerate(assignment.tolist()):
        out[i] = mapping.setdefault(a, len(mapping))
    return out


@dataclass(frozen=True, eq=False)
class Partition:
    assignment: np.ndarray
    k: int
    volumes: np.ndarray

    @classmethod
    def from_assignment(cls, g: WeightedGraph, assignment, k: int | None = None) -> "Partition":
        a = np.asarray(assignment, dtype=np.intp).copy()
        if a.shape != (g.n,):
            raise ValueError(f"assignment must have length {g.n}")
        k = int(a.max()) + 1 if k is None else int(k)
        if a.min() < 0 or a.max() >= k:
            raise ValueError("cluster id out of range")
        counts = np.bincount(a, minlength=k)
        if np.any(counts == 0):
            raise EmptyCluster(f"cluster {int(np.flatnonzero(counts == 0)[0])} is empty")
        vols = np.bincount(a, weights=g.degrees, minlength=k)
        a.setflags(write=False)
        vols.setflags(write=False)
        return cls(assignment=a, k=k, volumes=vols)

    def members(self, a: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == a)

    def clusters(self) -> list[np.ndarray]:
        return [self.members(a) for a in range(self.k)]

    def indicator(self) -> np.ndarray:
        """n-by-k 0-1 membership matrix."""
        H = np.zeros((self.assignment.size, self.k))
        H[np.arange(self.assignment.size), self.assignment] = 1.0
        return H

    @property
    def partition_vectors(self) -> np.ndarray:
        """Columns ``z_a`` with entry ``1/sqrt(Vol(V_a))`` on ``V_a``.

        The square root gives ``D^{1/2} z_a`` unit norm, so ``z_a^T D z_b``
        is the Kronecker delta.
        """
        return self.indicator() / np.sqrt(self.volumes)[None, :]

    def same_as(self, other: "Partition") -> bool:
        """Equality up to cluster relabeling."""
        return np.array_equal(canonical_labels(self.assignment), canonical_labels(other.assignment))


def trivial_partition(g: WeightedGraph) -> Partition:
    return Partition.from_assignment(g, np.zeros(g.n, dtype=np.intp), 1)


def _as_matrix(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != n:
        raise ValueError(f"X must have {n} rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("X has non-finite entries")
    return X


def weighted_centers(d: np.ndarray, X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    H = np.zeros((k, labels.size))
    H[labels, np.arange(labels.size)] = d
    vols = H.sum(axis=1)
    if np.any(vols <= 0):
        raise EmptyCluster("cannot take the center of an empty cluster")
    return (H @ X) / vols[:, None]


def k_variance(g: WeightedGraph, P: Partition, X) -> float:
    """Degree-weighted within-cluster sum of squares about weighted centers."""
    X = _as_matrix(X, g.n)
    C = weighted_centers(g.degrees, X, P.assignment, P.k)
    resid = X - C[P.assignment]
    return float(np.sum(g.degrees * np.sum(resid * resid, axis=1)))


@dataclass(frozen=True, eq=False)
class KMeansResult:
    partition: Partition
    s_squared: float
    centers: np.ndarray
    iterations: int
    converged: bool
    trace: tuple[float, ...] = ()


def _kmeanspp(X: np.ndarray, d: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.choice(n, p=d / d.sum()))]
    dist2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        p = d * dist2
        total = p.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=p / total))
        else:
            pool = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(pool))
        chosen.append(nxt)
        dist2 = np.minimum(dist2, np.sum((X - X[nxt]) ** 2, axis=1))
    return X[chosen].copy()


def _assign(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    dist = np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)
    return np.argmin(dist, axis=1)  # lowest index on ties


def _repair(X: np.ndarray, d: np.ndarray, C: np.ndarray, labels: np.ndarray, k: int) -> None:
    """Fill empty clusters in place with the worst-fitting movable point."""
    while True:
        counts = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return
        contrib = d * np.sum((X - C[labels]) ** 2, axis=1)
        contrib[counts[labels] < 2] = -np.inf
        j = int(np.argmax(contrib))
        labels[j] = empty[0]
        C[empty[0]] = X[j]


def _objective(X, d, C, labels) -> float:
    r = X - C[labels]
    return float(np.sum(d * np.sum(r * r, axis=1)))


def _lloyd(X, d, k, rng):
    C = _kmeanspp(X, d, k, rng)
    labels = _assign(X, C)
    _repair(X, d, C, labels, k)
    trace = []
    converged = False
    it = 0
    while it < MAX_ITER:
        it += 1
        C = weighted_centers(d, X, labels, k)
        obj = _objective(X, d, C, labels)
        trace.append(obj)
        new = _assign(X, C)
        _repair(X, d, C, new, k)
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        if len(trace) > 1 and trace[-2] - obj < IMPROVEMENT_TOL:
            converged = True
            break
    return labels, it, converged, trace


def weighted_kmeans(
    g: WeightedGraph,
    X,
    k: int,
    seeds: int = DEFAULT_RESTARTS,
    rng_seed: int = 0,
) -> KMeansResult:
    """Lloyd iterations with degree-weighted centers, best of ``seeds`` restarts.

    Restart ``r`` draws its k-means++ seeding (probabilities proportional to
    ``d_j`` times squared distance) from ``SeedSequence(rng_seed, spawn_key=(r,))``,
    so the result does not depend on the order restarts are run in.
    """
    X = _as_matrix(X, g.n)
    n = g.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    d = np.asarray(g.degrees)
    if k == n:
        labels = np.arange(n)
        P = Partition.from_assignment(g, labels, k)
        return KMeansResult(P, 0.0, X.copy(), 0, True, (0.0,))
    best = None
    for r in range(max(1, seeds)):
        rng = np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(r,)))
        labels, it, converged, trace = _lloyd(X, d, k, rng)
        labels = canonical_labels(labels)
        P = Partition.from_assignment(g, labels, k)
        s2 = k_variance(g, P, X)
        if best is None or s2 < best[1]:
            best = (P, s2, it, converged, tuple(trace))
    P, s2, it, converged, trace = best
    C = weighted_centers(d, X, P.assignment, k)
    return KMeansResult(P, s2, C, it, converged, trace)


def exact_min_k_variance(g: WeightedGraph, X, k: int, cap: int = PARTITION_CAP) -> KMeansResult:
    """Global k-variance minimum by enumerating every k-partition.

    The first minimizer in lexicographic restricted-growth order wins ties.
    """
    X = _as_matrix(X, g.n)
    n = g.n
    count = stirling2(n, k)
    if count > cap:
        raise TooLarge(f"S({n},{k}) = {count} partitions exceeds cap {cap}")
    d = np.asarray(g.degrees)
    dX = d[:, None] * X
    total = float(np.sum(dX * X))
    best_val = np.inf
    best_row = None
    for rows in iter_partitions(n, k):
        H = np.zeros((rows.shape[0], k, n))
        H[np.arange(rows.shape[0])[:, None], rows, np.arange(n)[None, :]] = 1.0
        sums = H @ dX  # (r, k, m)
        vols = H @ d  # (r, k)
        vals = total - np.sum(np.sum(sums * sums, axis=2) / vols, axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = vals[i]
            best_row = rows[i].astype(np.intp)
    P = Partition.from_assignment(g, best_row, k)
    s2 = k_variance(g, P, X)
    C = weighted_centers(d, X, P.assignment, k)
    return KMeansResult(P, s2, C, count, True, (s2,))


def spectral_cluster(
    g: WeightedGraph,
    k: int | None = None,
    policy="gap",
    seeds: int = DEFAULT_RESTARTS,
    rng_seed: int = 0,
    *,
    spectrum: Spectrum | None = None,
    drop_trivial: bool = True,
    exact: bool = False,
) -> KMeansResult:
    """Cluster the vertex representatives built from the top-``k`` eigenvectors.

    ``k=None`` selects it with :func:`select_k` under ``policy``.  With
    ``exact`` the clustering step is the exhaustive oracle instead of k-means.
    """
    s = decompose(g) if spectrum is None else spectrum
    if k is None:
        k = select_k(s, policy).k
    if k == 1:
        P = trivial_partition(g)
        X = representatives(s, g, 1)
        return KMeansResult(P, 0.0, X[:1].copy(), 0, True, (0.0,))
    X = representatives(s, g, k)
    if drop_trivial:
        X = X[:, 1:]
    if exact:
        return exact_min_k_variance(g, X, k)
    return weighted_kmeans(g, X, k, seeds, rng_seed)
