"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 16 64 128] [--repeat 5]

Both backends are imported from the same module and called directly, so the
NCRANK_DISABLE_NUMBA flag does not matter here.  Results are checked equal
before timing.  A final row times a full ncrk run on a random blown-up space
under whichever backend the flag selects.
"""
import argparse
import time

import numpy as np

from ncrank import _kernels
from ncrank.exactlin import Field
from ncrank.matspace import Config, MatrixSpace, ncrk


def best_of(fn, repeat):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)


def bench_rref(n, p, repeat, rng):
    a = rng.integers(0, p, size=(n, n), dtype=np.int64)
    x, y = a.copy(), a.copy()
    r1, piv1 = _kernels.rref_mod_numba(x, p)
    r2, piv2 = _kernels.rref_mod_numpy(y, p)
    assert r1 == r2 and list(piv1) == list(piv2) and np.array_equal(x, y)
    t_nb = best_of(lambda: _kernels.rref_mod_numba(a.copy(), p), repeat)
    t_np = best_of(lambda: _kernels.rref_mod_numpy(a.copy(), p), repeat)
    return t_nb, t_np


def bench_matmul(n, p, repeat, rng):
    a = rng.integers(0, p, size=(n, n), dtype=np.int64)
    b = rng.integers(0, p, size=(n, n), dtype=np.int64)
    assert np.array_equal(_kernels.matmul_mod_numba(a, b, p), _kernels.matmul_mod_numpy(a, b, p))
    t_nb = best_of(lambda: _kernels.matmul_mod_numba(a, b, p), repeat)
    t_np = best_of(lambda: _kernels.matmul_mod_numpy(a, b, p), repeat)
    return t_nb, t_np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 128, 256])
    ap.add_argument("--prime", type=int, default=1000003)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    p = args.prime
    # compile outside the timed region
    bench_rref(4, p, 1, rng)
    bench_matmul(4, p, 1, rng)
    print(f"{'kernel':<8}{'n':>6}{'numba ms':>12}{'numpy ms':>12}{'ratio':>8}")
    for name, fn in (("rref", bench_rref), ("matmul", bench_matmul)):
        for n in args.sizes:
            t_nb, t_np = fn(n, p, args.repeat, rng)
            print(f"{name:<8}{n:>6}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>8.1f}")

    F = Field.prime(p)
    mats = [F.random(rng, (8, 8)) for _ in range(3)]
    s = MatrixSpace.from_matrices(F, [m @ np.diag([1] * 5 + [0] * 3) % p for m in mats])
    t = best_of(lambda: ncrk(s, Config()), args.repeat)
    print(f"ncrk 8x8 x3 (backend {_kernels.BACKEND}): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
