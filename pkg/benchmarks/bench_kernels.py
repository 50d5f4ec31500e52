"""Compare the compiled and pure-Python kernel backends.

Run:  python benchmarks/bench_kernels.py [--repeat N]

Times the three hot kernels on representative workloads and prints the
per-call best-of-N wall time for each backend plus the speedup.  Works
with only the Python backend present (prints a note instead of ratios).
"""

import argparse
import math
import time

import numpy as np

from catscale._kernels import _pykernels as pk

try:
    from catscale._kernels import _cykernels as ck
except ImportError:
    ck = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def coherent_masses(mu, cutoff):
    n = np.arange(cutoff + 1)
    logp = -mu + n * math.log(mu) - [math.lgamma(v + 1) for v in n]
    return np.exp(np.asarray(logp))


def workloads():
    rng = np.random.default_rng(11)

    # scatter: wide coherent-like PMF onto a sigma=30 grid
    cutoff, sigma, k = 2000, 30.0, 8
    pad = math.ceil(8 * sigma)
    npts = (cutoff + 2 * pad) * k + 1
    R = int(math.ceil(12 * sigma * k))
    t = (np.arange(2 * R + 1) - R) / k
    prof = np.exp(-t * t / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)
    masses = coherent_masses(900.0, cutoff)
    masses /= masses.sum()
    base0 = pad * k

    def scatter(mod):
        out = np.zeros(npts)
        mod.scatter_profile(masses, base0, k, prof, R, 0, npts, out)
        return out

    # pointwise density at 1M scattered readings in the small-sigma regime
    # where this kernel is actually used (above it a grid + interp takes over)
    xs = np.sort(rng.uniform(-1.0, cutoff + 1.0, size=1_000_000))

    def density(mod):
        return mod.density_at_points(masses, 0, 0.03, xs)

    # displacement matrix block, alpha=8, 1200 columns
    def displacement(mod):
        return mod.displacement_block(8.0, 1200, 0, 1200)

    return [("scatter_profile", scatter),
            ("density_at_points", density),
            ("displacement_block", displacement)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'kernel':<20} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, fn in workloads():
        t_py = best_of(lambda: fn(pk), args.repeat)
        if ck is None:
            print(f"{name:<20} {t_py*1e3:9.1f}ms {'-':>10} {'-':>8}")
            continue
        t_cy = best_of(lambda: fn(ck), args.repeat)
        ref = fn(pk)
        got = fn(ck)
        assert np.allclose(ref, got, rtol=1e-10, atol=1e-12), name
        print(f"{name:<20} {t_py*1e3:9.1f}ms {t_cy*1e3:9.1f}ms {t_py/t_cy:7.1f}x")
    if ck is None:
        print("compiled backend not built; showing pure-Python times only")


if __name__ == "__main__":
    main()
