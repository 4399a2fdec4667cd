#!/usr/bin/env python3
"""Benchmark the compiled distance kernels against the pure-Python fallback.

Generates synthetic lifecycle traces (short repeated-activity sequences over
a small alphabet, like real bug histories) and times the full pairwise
score matrix for both metrics on every available backend.

    python benchmarks/bench_kernels.py --traces 200 --mean-length 60
"""

from __future__ import annotations

import argparse
import random
import time

from bugmine.distance import _pykernels

BACKENDS = {"pure": _pykernels}
try:
    from bugmine.distance import _ckernels

    BACKENDS["compiled"] = _ckernels
except ImportError:
    print("note: compiled kernels unavailable, benchmarking pure backend only")


def synthetic_traces(n: int, mean_length: int, alphabet: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    traces = []
    for _ in range(n):
        length = max(2, int(rng.gauss(mean_length, mean_length / 4)))
        trace = []
        symbol = rng.randrange(alphabet)
        for _ in range(length):
            # Lifecycle logs repeat activities in bursts (CC churn, flag flips).
            if rng.random() > 0.35:
                symbol = rng.randrange(alphabet)
            trace.append(symbol)
        traces.append(trace)
    return traces


def time_matrix(kernels, kernel_name: str, traces: list[list[int]]) -> float:
    prepared = [kernels.prepare(t) for t in traces]
    kernel = getattr(kernels, kernel_name)
    started = time.perf_counter()
    for i in range(len(prepared)):
        for j in range(i + 1, len(prepared)):
            kernel(prepared[i], prepared[j])
    return time.perf_counter() - started


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--traces", type=int, default=150)
    parser.add_argument("--mean-length", type=int, default=60)
    parser.add_argument("--alphabet", type=int, default=40)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    traces = synthetic_traces(args.traces, args.mean_length, args.alphabet, args.seed)
    pairs = args.traces * (args.traces - 1) // 2
    total_symbols = sum(len(t) for t in traces)
    print(
        f"{args.traces} traces, {total_symbols} events, {pairs} pairs, "
        f"alphabet {args.alphabet}"
    )
    print(f"{'kernel':8} {'backend':10} {'total s':>9} {'us/pair':>9} {'speedup':>8}")
    for kernel_name in ("lcs", "dtw"):
        baseline = None
        for backend_name in ("pure", "compiled"):
            if backend_name not in BACKENDS:
                continue
            elapsed = time_matrix(BACKENDS[backend_name], kernel_name, traces)
            if baseline is None:
                baseline = elapsed
            print(
                f"{kernel_name:8} {backend_name:10} {elapsed:9.3f} "
                f"{1e6 * elapsed / pairs:9.1f} {baseline / elapsed:7.1f}x"
            )


if __name__ == "__main__":
    main()
