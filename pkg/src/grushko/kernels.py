"""Hot enumeration kernels: numba-compiled with a pure-numpy fallback.

The visibility sweep (criterion: no visible class outside the segment
conjugator set) iterates every reduced word g up to a length bound for
every fixture tree; with ~10^5 words per tree and hundreds of trees this
is the package's hot loop.  Segments of the walk are precomputed per tree
as edge bitmasks, so a word is visible iff the OR of its segment masks has
popcount equal to the summed segment lengths (tree paths are internally
edge-distinct, so overlaps are the only failure mode).

Backend selection: numba when importable, unless GRUSHKO_NO_NUMBA is set,
in which case the vectorized numpy path runs.  `bench/benchmark.py`
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and not os.environ.get("GRUSHKO_NO_NUMBA")
BACKEND = "numba" if USE_NUMBA else "numpy"


def reduced_words(n: int, length: int) -> np.ndarray:
    """All reduced words of exactly the given length, one per row (int8 letters)."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int8)
    words = np.arange(1, n + 1, dtype=np.int8).reshape(-1, 1)
    for _ in range(length - 1):
        rows = []
        for letter in range(1, n + 1):
            keep = words[words[:, -1] != letter]
            rows.append(np.hstack([keep, np.full((len(keep), 1), letter, dtype=np.int8)]))
        words = np.vstack(rows)
    return words


def _sweep_scalar_py(words, segmask, seglen, r, s):
    m = words.shape[0]
    length = words.shape[1]
    out = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        acc = np.uint64(0)
        prev = r
        ok = True
        for k in range(length):
            cur = words[i, k]
            msk = segmask[prev, cur]
            if acc & msk:
                ok = False
                break
            acc |= msk
            prev = cur
        if ok:
            msk = segmask[prev, s]
            ok = (acc & msk) == 0
        out[i] = ok
    return out


_sweep_scalar_jit = njit(cache=True)(_sweep_scalar_py) if _HAVE_NUMBA else None


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    v = arr.copy()
    out = np.zeros(arr.shape, dtype=np.uint64)
    while v.any():
        out += v & np.uint64(1)
        v >>= np.uint64(1)
    return out


def _sweep_vectorized(words, segmask, seglen, r, s):
    m, length = words.shape
    prev = np.full(m, r, dtype=np.int64)
    acc = np.zeros(m, dtype=np.uint64)
    total = np.zeros(m, dtype=np.int64)
    for k in range(length):
        cur = words[:, k].astype(np.int64)
        acc |= segmask[prev, cur]
        total += seglen[prev, cur]
        prev = cur
    acc |= segmask[prev, s]
    total += seglen[prev, s]
    return _popcount(acc).astype(np.int64) == total


def sweep_visible(segmask: np.ndarray, seglen: np.ndarray, r: int, s: int,
                  n: int, max_len: int) -> list[tuple[int, ...]]:
    """Conjugator words g (|g| <= max_len) whose slot walk r..g..s is injective.

    segmask[a, b] / seglen[a, b] describe the shape path between the marked
    vertices of slots a and b as an edge bitmask and edge count.
    """
    visible: list[tuple[int, ...]] = []
    for length in range(max_len + 1):
        words = reduced_words(n, length)
        if USE_NUMBA:
            mask = _sweep_scalar_jit(words, segmask, seglen, r, s)
        else:
            mask = _sweep_vectorized(words, segmask, seglen, r, s)
        for row in words[mask]:
            visible.append(tuple(int(x) for x in row))
    return visible


def sweep_backends() -> dict:
    """The available sweep implementations, for benchmarking and cross-tests."""
    backends = {"numpy": _sweep_vectorized}
    if _HAVE_NUMBA:
        backends["numba"] = _sweep_scalar_jit
    return backends


def segment_tables(tree) -> tuple[np.ndarray, np.ndarray]:
    """Per-slot-pair edge bitmasks and path lengths for a marked tree."""
    n = tree.n
    if len(tree.shape.edges) > 63:
        raise ValueError("shape too large for bitmask kernels")
    segmask = np.zeros((n + 1, n + 1), dtype=np.uint64)
    seglen = np.zeros((n + 1, n + 1), dtype=np.int64)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a == b:
                continue
            labels = tree.labels_between(tree.vertex_of_slot(a), tree.vertex_of_slot(b))
            mask = 0
            for e in labels:
                mask |= 1 << e
            segmask[a, b] = mask
            seglen[a, b] = len(labels)
    return segmask, seglen
