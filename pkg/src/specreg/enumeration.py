"""Exhaustive enumeration of subsets and set partitions, vectorized with numpy."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

PARTITION_CAP = 10**7
CHUNK = 1 << 16


def subset_sums(values: np.ndarray) -> np.ndarray:
    """All subset sums of ``values`` along axis 0, indexed by bitmask.

    Entry ``mask`` of the result is the sum of ``values[i]`` over the set bits
    ``i`` of ``mask``.  ``values`` may be 1-D or 2-D (rows are summed).
    """
    values = np.asarray(values, dtype=float)
    out = np.zeros((1,) + values.shape[1:])
    for v in values:
        out = np.concatenate([out, out + v])
    return out


def mask_members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_matrix(m: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Indicator rows (dtype float) of bitmasks ``start..stop-1`` over ``m`` bits."""
    stop = (1 << m) if stop is None else stop
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(m)) & 1).astype(float)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Number of partitions of ``n`` labelled items into ``k`` nonempty blocks."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def iter_partitions(n: int, k: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Yield all k-partitions of ``range(n)`` as restricted growth strings.

    Each yielded array has shape ``(rows, n)``; row ``r`` assigns vertex ``j``
    to block ``row[j]``, block ids appear in first-occurrence order and every
    block is used.  Rows come out in lexicographic order.
    """
    if not 1 <= k <= n:
        return

    def expand(prefix: np.ndarray, top: np.ndarray):
        # prefix: (r, p) labels; top: (r,) current max label
        p = prefix.shape[1]
        remaining = n - p - 1
        vals = np.arange(k)
        new_top = np.maximum(top[:, None], vals[None, :])
        ok = (vals[None, :] <= top[:, None] + 1) & (k - 1 - new_top <= remaining)
        rows, cols = np.nonzero(ok)
        nxt = np.concatenate([prefix[rows], cols[:, None].astype(np.int8)], axis=1)
        return nxt, new_top[rows, cols]

    def walk(prefix, top):
        while prefix.shape[1] < n:
            if prefix.shape[0] > chunk and prefix.shape[1] < n:
                half = prefix.shape[0] // 2
                yield from walk(prefix[:half], top[:half])
                yield from walk(prefix[half:], top[half:])
                return
            prefix, top = expand(prefix, top)
        yield prefix

    yield from walk(np.zeros((1, 1), dtype=np.int8), np.zeros(1, dtype=np.int64))
