"""Planted-partition (generalized random) graphs and their noiseless expectation.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``.  Block
pair ``(a, b)`` with ``a <= b`` on attempt ``r`` uses the stream
``SeedSequence(seed, spawn_key=(r, a, b))`` and draws one uniform per vertex
pair in row-major order (upper triangle for ``a == b``); an edge is present
when the uniform is below ``p_ab``.  Random memberships, when requested, use
``spawn_key=(r, MEMBERSHIP_KEY)``.  Attempts are repeated until the graph is
connected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyCluster, GenerationFailed, SpecregError
from .graph import WeightedGraph
from .partitioning import Partition

MAX_ATTEMPTS = 100
MEMBERSHIP_KEY = 2**31 - 1


@dataclass(frozen=True, eq=False)
class PlantedModel:
    sizes: tuple[int, ...]
    probs: np.ndarray
    seed: int = 0
    membership: str = "fixed"
    membership_probs: tuple[float, ...] | None = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        P = np.array(self.probs, dtype=float)
        k = len(sizes)
        if k == 0 or any(s < 1 for s in sizes):
            raise ValueError("cluster sizes must be positive")
        if P.shape != (k, k):
            raise ValueError(f"probs must be {k}x{k}")
        if not np.array_equal(P, P.T):
            raise ValueError("probs must be symmetric")
        if np.any(P < 0) or np.any(P > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if sum(sizes) < 2:
            raise ValueError("need n >= 2")
        if not np.any(P > 0):
            raise ValueError("at least one probability must be positive")
        if self.membership not in ("fixed", "iid"):
            raise ValueError("membership must be 'fixed' or 'iid'")
        if self.membership == "iid":
            pi = np.asarray(self.membership_probs if self.membership_probs is not None else np.array(sizes) / sum(sizes), dtype=float)
            if pi.shape != (k,) or np.any(pi < 0) or not np.isclose(pi.sum(), 1.0):
                raise ValueError("membership_probs must be a distribution over the clusters")
            object.__setattr__(self, "membership_probs", tuple(float(x) for x in pi))
        P.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "probs", P)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @classmethod
    def two_block(cls, n1: int, n2: int, p_in: float, p_out: float, seed: int = 0) -> "PlantedModel":
        return cls((n1, n2), [[p_in, p_out], [p_out, p_in]], seed)

    @classmethod
    def uniform(cls, sizes, p_in: float, p_out: float, seed: int = 0) -> "PlantedModel":
        k = len(sizes)
        P = np.full((k, k), float(p_out))
        np.fill_diagonal(P, p_in)
        return cls(tuple(sizes), P, seed)

    def to_json(self) -> dict:
        out = {"sizes": list(self.sizes), "probs": self.probs.tolist(), "seed": int(self.seed)}
        if self.membership != "fixed":
            out["membership"] = self.membership
            out["membership_probs"] = list(self.membership_probs)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PlantedModel":
        return cls(
            sizes=tuple(obj["sizes"]),
            probs=np.array(obj["probs"], dtype=float),
            seed=int(obj.get("seed", 0)),
            membership=obj.get("membership", "fixed"),
            membership_probs=obj.get("membership_probs"),
        )


def read_model(path) -> PlantedModel:
    return PlantedModel.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fixed_labels(sizes) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


@dataclass(frozen=True, eq=False)
class Generated:
    graph: WeightedGraph
    planted: Partition
    adjacency: np.ndarray
    attempts: int
    seed: int
    metadata: dict = field(default_factory=dict)


def _labels(model: PlantedModel, attempt: int) -> np.ndarray:
    if model.membership == "fixed":
        return fixed_labels(model.sizes)
    rng = np.random.default_rng(np.random.SeedSequence(model.seed, spawn_key=(attempt, MEMBERSHIP_KEY)))
    return rng.choice(model.k, size=model.n, p=np.array(model.membership_probs))


def sample_adjacency(model: PlantedModel, labels: np.ndarray, attempt: int) -> np.ndarray:
    n = labels.size
    A = np.zeros((n, n), dtype=np.int8)
    blocks = [np.flatnonzero(labels == a) for a in range(model.k)]
    for a in range(model.k):
        for b in range(a, model.k):
            p = model.probs[a, b]
            rng = np.random.default_rng(np.random.SeedSequence(model.seed, spawn_key=(attempt, a, b)))
            va, vb = blocks[a], blocks[b]
            if a == b:
                iu, ju = np.triu_indices(va.size, k=1)
                hit = rng.random(iu.size) < p
                A[va[iu[hit]], va[ju[hit]]] = 1
            else:
                hit = rng.random((va.size, vb.size)) < p
                r, c = np.nonzero(hit)
                A[va[r], vb[c]] = 1
    return A | A.T


def generate_with_info(model: PlantedModel) -> Generated:
    """Sample until connected; raise GenerationFailed after ``MAX_ATTEMPTS``."""
    last = None
    for attempt in range(MAX_ATTEMPTS):
        labels = _labels(model, attempt)
        A = sample_adjacency(model, labels, attempt)
        try:
            g = WeightedGraph.from_matrix(A)
            planted = Partition.from_assignment(g, labels, model.k)
        except (SpecregError, EmptyCluster) as exc:
            last = exc
            continue
        meta = {"seed": int(model.seed), "attempts": attempt + 1, "retries": attempt, "membership": model.membership}
        return Generated(g, planted, A, attempt + 1, int(model.seed), meta)
    raise GenerationFailed(f"no connected sample in {MAX_ATTEMPTS} attempts (last: {last})")


def generate(model: PlantedModel) -> tuple[WeightedGraph, Partition]:
    res = generate_with_info(model)
    return res.graph, res.planted


def erdos_renyi(n: int, p: float, seed: int = 0) -> WeightedGraph:
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    return generate(PlantedModel((n,), [[p]], seed))[0]


def expected_matrix(model: PlantedModel, *, include_diagonal: bool = True) -> WeightedGraph:
    """The noiseless block graph ``w_ij = p_ab`` for ``i`` in ``V_a``, ``j`` in ``V_b``.

    By default the diagonal keeps its block value ``p_aa`` so that the matrix
    is exactly block-constant (rank at most k).  With
    ``include_diagonal=False`` the diagonal is zeroed, which perturbs the
    spectrum by order ``1/n``.
    """
    labels = fixed_labels(model.sizes)
    W = model.probs[np.ix_(labels, labels)].copy()
    if not include_diagonal:
        np.fill_diagonal(W, 0.0)
    return WeightedGraph.from_matrix(W, allow_loops=include_diagonal)


def planted_labels(model: PlantedModel) -> np.ndarray:
    return fixed_labels(model.sizes)
