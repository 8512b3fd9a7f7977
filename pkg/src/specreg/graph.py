"""Edge-weighted graphs normalized to unit total weight.

A :class:`WeightedGraph` holds a dense symmetric weight matrix whose entries
sum to one, so it can be read as a joint distribution on vertex pairs whose
marginals are the generalized degrees.  Volumes, cuts and relative densities
are defined on top of it.

Vertex sets are passed around as plain iterables of vertex ids or as integer
bitmasks (bit ``i`` set means vertex ``i`` is a member).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    EmptySet,
    InvalidVertexSet,
    IsolatedVertex,
    NonPositiveWeight,
    NotSimpleGraph,
    ParseError,
    SelfLoop,
)

TOL = 1e-12

VertexSetLike = Union[int, Iterable[int]]


def vertex_set(n: int, members: VertexSetLike) -> np.ndarray:
    """Validate ``members`` against ``n`` vertices and return sorted ids.

    ``members`` may be an integer bitmask or an iterable of vertex ids.
    """
    if isinstance(members, (int, np.integer)) and not isinstance(members, bool):
        mask = int(members)
        if mask < 0 or mask >> n:
            raise InvalidVertexSet(f"bitmask {mask:#x} out of range for n={n}")
        return np.array([i for i in range(n) if mask >> i & 1], dtype=np.intp)
    ids = np.asarray(list(members), dtype=np.intp)
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise InvalidVertexSet(f"vertex id out of range for n={n}")
    ids = np.sort(ids)
    if ids.size > 1 and np.any(ids[1:] == ids[:-1]):
        raise InvalidVertexSet("duplicate vertex ids")
    return ids


def to_mask(members: Iterable[int]) -> int:
    mask = 0
    for i in members:
        mask |= 1 << int(i)
    return mask


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric non-negative weights with ``weights.sum() == 1``.

    Build instances with :meth:`from_matrix` or :func:`from_edge_list`; the
    constructor itself does not validate.  ``raw_scale`` is the factor the
    input weights were divided by, which lets :func:`complement` recover the
    0-1 adjacency of a simple graph.
    """

    n: int
    weights: np.ndarray
    degrees: np.ndarray
    total_volume: float
    raw_scale: float = field(default=1.0)
    has_loops: bool = field(default=False)

    @classmethod
    def from_matrix(cls, W, *, allow_loops: bool = False) -> "WeightedGraph":
        """Validate and normalize a weight matrix.

        ``allow_loops`` admits a non-negative diagonal; it exists for ideal
        block-model graphs and is not reachable from edge-list input.
        """
        W = np.array(W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("weight matrix must be square")
        n = W.shape[0]
        if n < 2:
            raise ValueError("need at least 2 vertices")
        if not np.all(np.isfinite(W)):
            raise NonPositiveWeight("weights must be finite")
        if np.any(W < 0):
            raise NonPositiveWeight("negative weight")
        diag = np.diag(W)
        if not allow_loops and np.any(diag != 0):
            raise SelfLoop(f"nonzero diagonal at vertex {int(np.flatnonzero(diag)[0])}")
        if not np.allclose(W, W.T, rtol=0, atol=TOL * max(1.0, np.abs(W).max())):
            raise ValueError("weight matrix must be symmetric")
        W = (W + W.T) / 2
        total = W.sum()
        if total <= 0:
            raise Disconnected("graph has no edges")
        W = W / total
        d = W.sum(axis=1)
        if np.any(d <= 0):
            raise IsolatedVertex(f"vertex {int(np.flatnonzero(d <= 0)[0])} is isolated")
        ncomp, _ = connected_components(W > 0, directed=False)
        if ncomp > 1:
            raise Disconnected(f"graph has {ncomp} components")
        W.setflags(write=False)
        d.setflags(write=False)
        return cls(
            n=n,
            weights=W,
            degrees=d,
            total_volume=float(d.sum()),
            raw_scale=float(total),
            has_loops=bool(np.any(np.diag(W) > 0)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges ``(i, j, w_ij)`` with ``i < j``."""
        iu, ju = np.nonzero(np.triu(self.weights, k=1))
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(iu, ju)]


def from_edge_list(entries: Iterable[Sequence], n: int) -> WeightedGraph:
    """Build a graph from ``(u, v, w)`` triples; repeated pairs accumulate."""
    W = np.zeros((n, n))
    for entry in entries:
        u, v, w = int(entry[0]), int(entry[1]), float(entry[2])
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidVertexSet(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if not w > 0 or not np.isfinite(w):
            raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w!r}")
        W[u, v] += w
        W[v, u] += w
    return WeightedGraph.from_matrix(W)


def weighted_cut(g: WeightedGraph, X: VertexSetLike, Y: VertexSetLike) -> float:
    x = vertex_set(g.n, X)
    y = vertex_set(g.n, Y)
    if x.size == 0 or y.size == 0:
        return 0.0
    return float(g.weights[np.ix_(x, y)].sum())


def volume(g: WeightedGraph, U: VertexSetLike) -> float:
    u = vertex_set(g.n, U)
    return float(g.degrees[u].sum())


def relative_density(g: WeightedGraph, A: VertexSetLike, B: VertexSetLike) -> float:
    """``w(A, B) / (Vol(A) Vol(B))``; pass ``A == B`` for the intra density."""
    a = vertex_set(g.n, A)
    b = vertex_set(g.n, B)
    if a.size == 0 or b.size == 0:
        raise EmptySet("relative density of an empty set")
    va = g.degrees[a].sum()
    vb = g.degrees[b].sum()
    return float(g.weights[np.ix_(a, b)].sum() / (va * vb))


def adjacency(g: WeightedGraph) -> np.ndarray:
    """The 0-1 adjacency of a simple graph, or raise NotSimpleGraph."""
    if g.has_loops:
        raise NotSimpleGraph("graph has self-loop weights")
    raw = g.weights * g.raw_scale
    A = np.rint(raw)
    if not np.allclose(raw, A, rtol=0, atol=1e-9) or np.any((A != 0) & (A != 1)):
        raise NotSimpleGraph("input weights are not 0/1")
    return A.astype(np.int8)


def complement(g: WeightedGraph) -> WeightedGraph:
    """Complement of a simple graph, renormalized."""
    A = adjacency(g)
    C = 1 - A
    np.fill_diagonal(C, 0)
    return WeightedGraph.from_matrix(C)


# -- edge-list files ---------------------------------------------------------


def parse_edge_list(text: str) -> WeightedGraph:
    """Parse ``u v w`` lines; ``#`` comments and an ``n <count>`` header allowed."""
    n = None
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or n is not None or entries:
                raise ParseError(f"line {lineno}: malformed header")
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: bad vertex count") from None
            continue
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'u v w'")
        try:
            entries.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse {line!r}") from None
    if n is None:
        if not entries:
            raise ParseError("no edges")
        n = 1 + max(max(u, v) for u, v, _ in entries)
    return from_edge_list(entries, n)


def read_edge_list(path) -> WeightedGraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def format_edge_list(g: WeightedGraph, *, raw: bool = True) -> str:
    """Serialize ``g``; with ``raw`` the pre-normalization weights are written."""
    if g.has_loops:
        raise SelfLoop("edge-list format cannot hold self-loops")
    scale = g.raw_scale if raw else 1.0
    lines = [f"n {g.n}"]
    for i, j, w in g.edges():
        val = w * scale
        r = round(val)
        text = str(int(r)) if raw and abs(val - r) <= 1e-9 * max(1.0, abs(val)) else repr(val)
        lines.append(f"{i} {j} {text}")
    return "\n".join(lines) + "\n"


def write_edge_list(g: WeightedGraph, path, *, raw: bool = True) -> None:
    Path(path).write_text(format_edge_list(g, raw=raw), encoding="utf-8")
