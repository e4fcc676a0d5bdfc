"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 1000 100000] [--repeat 5]

Each kernel is run on identical inputs with both implementations; the table
reports the best wall time of ``--repeat`` runs and the speed-up. The
end-to-end row times ``zebra()`` on a simulated score set with each backend
swapped in.
"""
import argparse
import sys
import timeit

import numpy as np

import zebra_eval.calibration as calibration
import zebra_eval.metrics as metrics
from zebra_eval import _backend, _purepy
from zebra_eval.profile import make_grid
from zebra_eval.simulate import ScoreSimSpec, simulate_scores


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def use_backend(mod):
    _backend.kernels = mod
    calibration.kernels = mod
    metrics.kernels = mod


def pav_inputs(rng, n):
    # alternating-ish counts force plenty of merging
    group_n = rng.integers(1, 4, n)
    group_a = rng.binomial(group_n, np.linspace(0.2, 0.8, n))
    return group_a.astype(np.int64), group_n.astype(np.int64)


def cases(rng, n):
    ga, gn = pav_inputs(rng, n)
    values = rng.normal(0, 4, n)
    weights = rng.integers(1, 5, n).astype(np.float64)
    shifts = make_grid(-4, 4, 201) * np.log(10)
    log_x = rng.normal(0, 5, n)
    return {
        "pav_merge": lambda k: k.pav_merge(ga, gn),
        "softplus_means x201": lambda k: k.softplus_means(values, weights, shifts),
        "z_mean": lambda k: k.z_mean(log_x, weights),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    compiled = _backend.compiled
    if compiled is None:
        print("compiled kernels are not built; only the fallback can be timed", file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<22}{'n':>9}{'python [ms]':>14}{'cython [ms]':>14}{'speed-up':>10}")
    for n in args.sizes:
        for name, fn in cases(rng, n).items():
            t_py = best_time(lambda: fn(_purepy), args.repeat)
            t_cy = best_time(lambda: fn(compiled), args.repeat)
            print(f"{name:<22}{n:>9}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>10.1f}")

        scores = simulate_scores(ScoreSimSpec(1.5, 0.0, 1.0, n, n, seed=args.seed))
        timings = []
        for mod in (_purepy, compiled):
            use_backend(mod)
            timings.append(best_time(lambda: metrics.zebra(scores), args.repeat))
        use_backend(compiled)
        t_py, t_cy = timings
        print(f"{'zebra end-to-end':<22}{2 * n:>9}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
