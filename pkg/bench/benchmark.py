#!/usr/bin/env python3
"""Benchmark the visibility sweep kernel: numba JIT vs pure-numpy fallback.

The sweep enumerates every reduced conjugator word up to a length bound and
tests path-injectivity through precomputed segment bitmasks; it is the hot
loop of the conjugator-completeness verification.  Both backends produce
identical masks; this script times them on caterpillar trees of several
ranks.

Usage:
    python bench/benchmark.py [--max-len 8] [--repeat 5]

Run with GRUSHKO_NO_NUMBA=1 to confirm the package itself works on the
fallback path; this script always times both backends when numba imports.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from grushko.kernels import BACKEND, reduced_words, segment_tables, sweep_backends
from grushko.trees import caterpillar


def run(max_len: int, repeat: int) -> None:
    backends = sweep_backends()
    print(f"active backend: {BACKEND}; timing {', '.join(sorted(backends))}")
    header = f"{'n':>3} {'words':>8} {'visible':>8}"
    for name in sorted(backends):
        header += f" {name + ' ms':>12}"
    print(header)
    for n in (3, 4, 5):
        tree = caterpillar(n)
        segmask, seglen = segment_tables(tree)
        words = reduced_words(n, max_len)
        row = {}
        visible = None
        for name, fn in backends.items():
            fn(words[:64], segmask, seglen, 1, 2)  # warm-up / JIT compile
            t0 = time.perf_counter()
            for _ in range(repeat):
                mask = fn(words, segmask, seglen, 1, 2)
            row[name] = (time.perf_counter() - t0) / repeat * 1e3
            count = int(np.asarray(mask).sum())
            if visible is None:
                visible = count
            elif visible != count:
                raise SystemExit(f"backend disagreement at n={n}: {visible} vs {count}")
        line = f"{n:>3} {words.shape[0]:>8} {visible:>8}"
        for name in sorted(backends):
            line += f" {row[name]:>12.3f}"
        print(line)
    if len(backends) == 2:
        speedup = row["numpy"] / row["numba"]
        print(f"speedup at n=5, length {max_len}: {speedup:.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-len", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    run(args.max_len, args.repeat)
