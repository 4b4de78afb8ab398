"""Compiled vs pure-Python GF(2) kernels.

    python3 benchmarks/bench_kernels.py [--sizes 64 256 1024] [--repeat 5]
"""

import argparse
import random
import timeit

import numpy as np

from oneway import _kernels_py

try:
    from oneway import _kernels as compiled
except ImportError:
    compiled = None


def random_system(n: int, rng: random.Random):
    words = (n + 1 + 63) // 64
    aug = np.zeros((n, words), dtype=np.uint64)
    for i in range(n):
        aug[i] = np.frombuffer(rng.getrandbits(n + 1).to_bytes(words * 8, "little"), dtype="<u8")
    return aug


def random_csr(n: int, rng: random.Random, degree: int = 4):
    ptr = np.zeros(n + 1, dtype=np.int64)
    idx = []
    for y in range(n):
        xs = sorted(rng.sample(range(n), min(degree, n)))
        idx += xs
        ptr[y + 1] = ptr[y] + len(xs)
    d = np.array(sorted(rng.sample(range(n), n // 2)), dtype=np.int64)
    return d, ptr, np.array(idx, dtype=np.int64)


def best(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; timing the pure backend only")
    rng = random.Random(0)
    print(f"{'kernel':<16}{'n':>6}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}")
    for n in args.sizes:
        aug = random_system(n, rng)
        d, ptr, idx = random_csr(n, rng)
        cases = {
            "gf2_solve": lambda m: m.gf2_solve_packed(aug, n),
            "column_residual": lambda m: m.column_residual(d, ptr, idx, n),
        }
        for name, call in cases.items():
            tp = best(lambda: call(_kernels_py), args.repeat) * 1e3
            if compiled is None:
                print(f"{name:<16}{n:>6}{tp:>12.3f}{'-':>15}{'-':>9}")
                continue
            assert (call(_kernels_py) is None) == (call(compiled) is None)
            tc = best(lambda: call(compiled), args.repeat) * 1e3
            print(f"{name:<16}{n:>6}{tp:>12.3f}{tc:>15.3f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
