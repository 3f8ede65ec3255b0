"""Benchmark: compiled vs pure-Python exact discrete Gaussian kernels.

Usage: python benchmarks/bench_sampler.py [draws-per-case]

Both kernels consume the keyed bit stream identically, so the draws are
checked for equality while timing.
"""

import sys
import time
from fractions import Fraction

from dptab.mechanisms import kernels

CASES = [
    ("sigma^2 = 0.25", Fraction(1, 4)),
    ("sigma^2 = 1", Fraction(1)),
    ("sigma^2 = 2.34375 (rho=1.92, s=9)", Fraction(75, 32)),
    ("sigma^2 = 652.17 (rho=0.0069, s=9)", Fraction(15000, 23)),
]


def bench(kernel, sigma_sq, n):
    stream = kernel.BitStream(b"bench")
    num, den = sigma_sq.numerator, sigma_sq.denominator
    draw = kernel.sample_dgauss
    start = time.perf_counter()
    values = [draw(stream, num, den) for _ in range(n)]
    elapsed = time.perf_counter() - start
    return values, elapsed


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    available = kernels()
    print(f"kernels: {', '.join(available)}   ({n:,} draws per case)\n")
    header = f"{'case':<38}" + "".join(f"{name:>16}" for name in available)
    if len(available) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for label, sigma_sq in CASES:
        rates = {}
        draws = {}
        for name, kernel in available.items():
            values, elapsed = bench(kernel, sigma_sq, n)
            rates[name] = n / elapsed
            draws[name] = values
        line = f"{label:<38}" + "".join(
            f"{rates[name]:>13,.0f}/s" for name in available
        )
        if len(available) > 1:
            assert draws["python"] == draws["cython"], "kernel draws diverged"
            line += f"{rates['cython'] / rates['python']:>9.1f}x"
        print(line)
    if len(available) > 1:
        print("\ndraw-for-draw equality verified across kernels")


if __name__ == "__main__":
    main()
