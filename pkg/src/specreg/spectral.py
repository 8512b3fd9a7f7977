"""Eigen-structure of the normalized adjacency ``D^-1/2 W D^-1/2``.

The eigenvalues ``rho`` are ordered by decreasing absolute value with the
trivial ``rho_1 = 1`` first.  The normalized Laplacian eigenvalues are
``lambda = 1 - rho`` (ascending) and the normalized modularity matrix
``B_D = N - sqrt(d) sqrt(d)^T`` has the ``rho_i`` for ``i >= 2`` plus a zero
on ``sqrt(d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConvergenceFailure, DegenerateSpectrum
from .graph import WeightedGraph

RESIDUAL_TOL = 1e-9
TIE_TOL = 1e-12
K_MAX = 50


def normalized_adjacency(g: WeightedGraph) -> np.ndarray:
    s = 1.0 / np.sqrt(g.degrees)
    return s[:, None] * g.weights * s[None, :]


def modularity_matrix(g: WeightedGraph) -> np.ndarray:
    sd = np.sqrt(g.degrees)
    return normalized_adjacency(g) - np.outer(sd, sd)


def normalized_laplacian(g: WeightedGraph) -> np.ndarray:
    return np.eye(g.n) - normalized_adjacency(g)


@dataclass(frozen=True, eq=False)
class Spectrum:
    rho: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.rho.size

    @property
    def lam(self) -> np.ndarray:
        """Normalized Laplacian eigenvalues, ascending."""
        return np.sort(1.0 - self.rho)

    @property
    def beta(self) -> np.ndarray:
        """Normalized modularity eigenvalues, descending."""
        return np.sort(np.concatenate([[0.0], self.rho[1:]]))[::-1]

    @property
    def abs_rho(self) -> np.ndarray:
        return np.abs(self.rho)


def _fix_signs(U: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(U), axis=0)  # first index on ties
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def decompose(g: WeightedGraph) -> Spectrum:
    """Full dense eigendecomposition with the ordering and sign convention fixed."""
    N = normalized_adjacency(g)
    N = (N + N.T) / 2
    try:
        vals, vecs = np.linalg.eigh(N)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    top = int(np.argmax(vals))
    rest = [i for i in range(g.n) if i != top]
    # descending |rho|, positive before negative on exact ties, stable otherwise
    rest.sort(key=lambda i: (-abs(vals[i]), -vals[i]))
    order = [top] + rest
    rho = vals[order].copy()
    U = _fix_signs(vecs[:, order])
    # the trivial pair is known exactly
    rho[0] = 1.0
    U[:, 0] = np.sqrt(g.degrees)
    resid = np.linalg.norm(N @ U - U * rho, axis=0).max()
    if not resid <= RESIDUAL_TOL:
        raise ConvergenceFailure(f"eigen residual {resid:.3e} exceeds {RESIDUAL_TOL}")
    rho.setflags(write=False)
    U.setflags(write=False)
    return Spectrum(rho=rho, vectors=U)


def modularity_norm(s: Spectrum) -> float:
    """Spectral norm of the normalized modularity matrix, ``max_{i>=2} |rho_i|``."""
    if s.n < 2:
        return 0.0
    return float(np.abs(s.rho[1:]).max())


@dataclass(frozen=True)
class GapReport:
    k: int
    theta: float
    eps: float
    gaps: tuple[float, ...]
    policy: str


Policy = Union[str, tuple]


def parse_policy(text: str) -> Policy:
    """``"gap"``, ``"threshold:EPS"`` or ``"fixed:K"``."""
    if text == "gap":
        return "gap"
    name, _, arg = text.partition(":")
    if name == "threshold" and arg:
        return ("threshold", float(arg))
    if name == "fixed" and arg:
        return ("fixed", int(arg))
    raise ValueError(f"unknown policy {text!r}")


def _policy_name(policy: Policy) -> str:
    if policy == "gap":
        return "gap"
    return f"{policy[0]}:{policy[1]}"


def select_k(s: Spectrum, policy: Policy = "gap", k_max: int = K_MAX) -> GapReport:
    """Pick the number of structural eigenvalues (``rho_1`` included).

    The gap policy maximizes the relative gap
    ``(|rho_k| - |rho_{k+1}|) / max(|rho_k|, 1e-12)`` over
    ``1 <= k <= min(n // 2, k_max)``; ties go to the smaller ``k``.  The
    ceiling ``n // 2`` keeps the search out of the spectral tail, where tiny
    ``|rho|`` values make relative gaps close to 1 by chance.
    """
    a = s.abs_rho
    n = a.size
    gaps = tuple(float(x) for x in a[:-1] - a[1:])
    policy_is_auto = True
    if isinstance(policy, str):
        if policy != "gap":
            raise ValueError(f"unknown policy {policy!r}")
        if n > 2 and np.ptp(a[1:]) <= TIE_TOL:
            raise DegenerateSpectrum("all non-trivial |rho| are equal; no gap")
        kmax = max(1, min(n // 2, n - 1, k_max))
        rel = [(a[k - 1] - a[k]) / max(a[k - 1], TIE_TOL) for k in range(1, kmax + 1)]
        k = 1 + int(np.argmax(rel))
    elif policy[0] == "threshold":
        k = int(np.sum(a > policy[1]))
        k = max(k, 1)
    elif policy[0] == "fixed":
        policy_is_auto = False
        k = int(policy[1])
        if not 1 <= k <= n:
            raise ValueError(f"fixed k={k} out of range for n={n}")
    else:
        raise ValueError(f"unknown policy {policy!r}")
    theta = float(a[k - 1])
    eps = float(a[k:].max()) if k < n else 0.0
    # an explicit k is honoured even across a tie
    if policy_is_auto and 2 <= k < n and theta - eps <= TIE_TOL:
        raise DegenerateSpectrum(f"|rho_{k}| = |rho_{k + 1}|; structural count is ambiguous")
    return GapReport(k=k, theta=theta, eps=eps, gaps=gaps, policy=_policy_name(policy))


def representatives(s: Spectrum, g: WeightedGraph, k: int) -> np.ndarray:
    """n-by-k matrix with columns ``D^-1/2 u_i``; the first column is all ones."""
    if not 1 <= k <= s.n:
        raise ValueError(f"k={k} out of range")
    X = s.vectors[:, :k] / np.sqrt(g.degrees)[:, None]
    X[:, 0] = 1.0
    return X
