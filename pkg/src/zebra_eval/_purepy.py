"""Pure-Python/numpy kernels. Same signatures as the compiled ``_kernels``."""
import numpy as np

# |x - 1| below this uses the cubic series for Z
Z_SERIES_CUTOFF = 1e-3

_CHUNK = 1 << 22


def pav_merge(group_a, group_n):
    """Pool adjacent violators over tie groups with integer class counts.

    ``group_a[i]`` mated items out of ``group_n[i]`` items in group ``i``.
    Adjacent blocks are merged while the earlier block's posterior is >= the
    later one, compared exactly by cross-multiplication. Returns the block
    counts and the block index of each group.
    """
    a_in = [int(v) for v in group_a]
    n_in = [int(v) for v in group_n]
    blk_a = []
    blk_n = []
    blk_len = []
    for a, n in zip(a_in, n_in):
        length = 1
        while blk_a and blk_a[-1] * n >= a * blk_n[-1]:
            a += blk_a.pop()
            n += blk_n.pop()
            length += blk_len.pop()
        blk_a.append(a)
        blk_n.append(n)
        blk_len.append(length)
    group_block = np.repeat(np.arange(len(blk_len), dtype=np.int64), blk_len)
    return (
        np.asarray(blk_a, dtype=np.int64),
        np.asarray(blk_n, dtype=np.int64),
        group_block,
    )


def _softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def softplus_means(values, weights, shifts):
    """Weighted mean of softplus(values + s) for every s in ``shifts``.

    Weights are normalised before summation so a single distinct value
    returns softplus exactly.
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    weights = weights / weights.sum()
    shifts = np.asarray(shifts, dtype=np.float64)
    out = np.empty(shifts.size)
    step = max(1, _CHUNK // max(values.size, 1))
    for start in range(0, shifts.size, step):
        s = shifts[start:start + step, None]
        terms = _softplus(values[None, :] + s) * weights[None, :]
        out[start:start + step] = terms.sum(axis=1)
    return out


def z_values(log_x):
    """Z(x) evaluated from t = ln(x), stable across the whole real line.

    x - 1 is never formed by subtraction: with e = expm1(t), Z = (e(e - 2) +
    2t) / (4e^2); for t > 0 the same expression divided through by x^2, with
    w = 1 - 1/x = -expm1(-t), so large LRs cannot overflow.
    """
    t = np.asarray(log_x, dtype=np.float64)
    with np.errstate(over="ignore"):
        e = np.expm1(t)
    out = np.empty_like(t)
    near = np.abs(e) < Z_SERIES_CUTOFF
    hi = ~near & (t > 0)
    lo = ~near & ~hi

    en = e[near]
    out[near] = en * (1.0 / 6.0 + en * (-1.0 / 8.0 + en * (1.0 / 10.0)))

    th = t[hi]
    w = -np.expm1(-th)
    u = np.exp(-th)
    out[hi] = (w * (3.0 * w - 2.0) + 2.0 * th * u * u) / (4.0 * w * w)

    el = e[lo]
    out[lo] = (el * (el - 2.0) + 2.0 * t[lo]) / (4.0 * el * el)
    return out


def z_mean(log_x, weights):
    weights = np.asarray(weights, dtype=np.float64)
    return float((z_values(log_x) * (weights / weights.sum())).sum())
