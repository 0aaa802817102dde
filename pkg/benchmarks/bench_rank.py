"""Time the exact integer kernels: compiled extension vs pure Python.

Runs ff_rank and imat_mul on synthetic integer matrices and on a real
operator matrix assembled from the library, then prints one line per
(kernel, backend) pair with the best-of-N wall time.

Usage:
    python3 benchmarks/bench_rank.py [--size 120] [--repeats 3] [--seed 7]
"""

from __future__ import annotations

import argparse
import random
import time

from cuboid_complex._exactcore import BACKEND, pure

try:
    from cuboid_complex._exactcore import _speedups
except ImportError:
    _speedups = None


def synthetic_sparse(n: int, rng: random.Random) -> list[dict[int, int]]:
    """Random sparse rows, roughly 12 entries each, rank-deficient by 5."""
    rows = [{rng.randrange(n): rng.randint(-9, 9) for _ in range(12)}
            for _ in range(n - 5)]
    rows += [{c: 3 * v for c, v in rng.choice(rows).items()} for _ in range(5)]
    rng.shuffle(rows)
    return rows


def synthetic_dense(n: int, rng: random.Random) -> list[list[int]]:
    return [[rng.randint(-99, 99) for _ in range(n)] for _ in range(n)]


def assembled_rows() -> tuple[list[dict[int, int]], int]:
    from cuboid_complex.assembly import assemble_space, operator_matrix
    from cuboid_complex.elements import family
    from cuboid_complex.mesh import uniform_unit_mesh
    mesh = uniform_unit_mesh(2, 1, 1)
    xi = assemble_space(family("xi", 3), mesh)
    q = assemble_space(family("q", 3), mesh)
    mat = operator_matrix("div", xi, q)
    return mat.int_rows(), mat.ncols


def best_of(repeats: int, fn, *args) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=120,
                    help="synthetic matrix size (default 120)")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    backends = [("pure", pure)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    print(f"active backend: {BACKEND}; "
          f"candidates: {', '.join(n for n, _ in backends)}")

    rng = random.Random(args.seed)
    sparse = synthetic_sparse(args.size, rng)
    dense_a = synthetic_dense(args.size // 2, rng)
    dense_b = synthetic_dense(args.size // 2, rng)
    div_rows, div_cols = assembled_rows()

    cases = [
        (f"ff_rank  synthetic {args.size}x{args.size}",
         lambda impl: (impl.ff_rank, [dict(r) for r in sparse], args.size)),
        (f"ff_rank  div matrix {len(div_rows)}x{div_cols}",
         lambda impl: (impl.ff_rank, [dict(r) for r in div_rows], div_cols)),
        (f"imat_mul dense {args.size // 2}x{args.size // 2}",
         lambda impl: (impl.imat_mul, dense_a, dense_b)),
    ]

    for label, setup in cases:
        reference = None
        for name, impl in backends:
            fn, *fn_args = setup(impl)
            elapsed, result = best_of(args.repeats, fn, *fn_args)
            if reference is None:
                reference = result
            elif result != reference:
                raise SystemExit(f"{label}: backends disagree")
            print(f"{label}  {name:8s} {elapsed * 1000:9.2f} ms")


if __name__ == "__main__":
    main()
