"""Times the compiled edit-distance kernel against the pure-Python fallback.

Both backends run the same two-row DP over integer-encoded sequences, so the
numbers differ only in constant factor.  Usage:

    python3 benchmarks/bench_kernels.py [--sizes 16,64,256,1024] [--pairs 40]
"""

import argparse
import random
import statistics
import time
from array import array

from leveltext import _pure

try:
    from leveltext import _speedups
except ImportError:
    _speedups = None


def random_pairs(rng, size, count):
    # 70% shared vocabulary so the DP walks a realistic mix of hits and edits.
    vocab = list(range(max(8, size // 2)))
    pairs = []
    for _ in range(count):
        a = [rng.choice(vocab) for _ in range(size)]
        b = list(a)
        for _ in range(max(1, int(size * 0.3))):
            op = rng.random()
            pos = rng.randrange(len(b)) if b else 0
            if op < 0.4 and b:
                b[pos] = rng.choice(vocab)
            elif op < 0.7 and b:
                del b[pos]
            else:
                b.insert(pos, rng.choice(vocab))
        pairs.append((array("i", a), array("i", b)))
    return pairs


def time_backend(fn, pairs, repeats):
    best = []
    for enc_a, enc_b in pairs:
        samples = []
        for _ in range(repeats):
            started = time.perf_counter()
            fn(enc_a, enc_b)
            samples.append(time.perf_counter() - started)
        best.append(min(samples))
    return statistics.median(best)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,64,256,1024")
    parser.add_argument("--pairs", type=int, default=40, help="sequence pairs per size")
    parser.add_argument("--repeats", type=int, default=5, help="timings per pair; best is kept")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'size':>6}  {'pure (us)':>12}  {'cython (us)':>12}  {'speedup':>8}")
    for size in sizes:
        pairs = random_pairs(rng, size, args.pairs)
        for enc_a, enc_b in pairs:  # agreement check before timing
            if _speedups is not None:
                assert _pure.edit_distance_i32(enc_a, enc_b) == _speedups.edit_distance_i32(
                    enc_a, enc_b
                )
        pure_s = time_backend(_pure.edit_distance_i32, pairs, args.repeats)
        if _speedups is None:
            print(f"{size:>6}  {pure_s * 1e6:>12.2f}  {'n/a':>12}  {'n/a':>8}")
            continue
        fast_s = time_backend(_speedups.edit_distance_i32, pairs, args.repeats)
        print(
            f"{size:>6}  {pure_s * 1e6:>12.2f}  {fast_s * 1e6:>12.2f}"
            f"  {pure_s / fast_s:>7.1f}x"
        )
    if _speedups is None:
        print("compiled extension not built; showing fallback only")


if __name__ == "__main__":
    main()
