"""Oracle calibration: Laplace augmentation followed by PAV isotonic regression.

Scores are pooled and sorted, then one mated dummy is placed below the lowest
score and one non-mated dummy above the highest. PAV on the class indicators
gives non-decreasing block posteriors, which are turned into natural-log
likelihood ratios by removing the (augmented) class-proportion prior. The
dummies shape the extreme blocks, so no block is single-class and every LLR is
finite, but they are dropped from the output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from ._backend import kernels
from .types import CalibratedLLRs, ScoreSet, TooLarge

MATED = 1
NONMATED = 0
ORACLE_MAX_LEN = 14


class Pooled(NamedTuple):
    """Score-sorted pooled sequence; ``labels`` is 1 for mated, 0 for non-mated."""

    scores: np.ndarray
    labels: np.ndarray
    is_dummy: np.ndarray


@dataclass(frozen=True)
class PavBlock:
    """One constant piece of the isotonic fit; ``end_index`` is exclusive."""

    start_index: int
    end_index: int
    n_mated: int
    n_nonmated: int

    @property
    def posterior(self) -> Fraction:
        return Fraction(self.n_mated, self.n_mated + self.n_nonmated)


def dummy_offset(lo: float, hi: float) -> float:
    return max(1.0, 1e-6 * (hi - lo))


def _beyond(x: float, delta: float, direction: float) -> float:
    y = x + direction * delta
    if not math.isfinite(y) or y == x:
        # delta absorbed by rounding (huge |x|) or overflowed
        y = math.nextafter(x, direction * math.inf)
    return y


def laplace_augment(scores: ScoreSet) -> Pooled:
    """Pool both classes, add the two Laplace dummies, sort ascending."""
    lo = float(min(scores.mated.min(), scores.nonmated.min()))
    hi = float(max(scores.mated.max(), scores.nonmated.max()))
    delta = dummy_offset(lo, hi)
    values = np.concatenate(
        [[_beyond(lo, delta, -1.0)], scores.mated, scores.nonmated, [_beyond(hi, delta, 1.0)]]
    )
    labels = np.concatenate(
        [[MATED], np.ones(scores.n_mated, np.int64), np.zeros(scores.n_nonmated, np.int64), [NONMATED]]
    ).astype(np.int64)
    dummy = np.zeros(values.size, dtype=bool)
    dummy[0] = dummy[-1] = True
    order = np.argsort(values, kind="stable")
    return Pooled(values[order], labels[order], dummy[order])


def _tie_groups(sorted_scores: np.ndarray, labels: np.ndarray):
    """Group starts plus per-group (mated, total) counts for a sorted sequence."""
    n = sorted_scores.size
    new = np.empty(n, dtype=bool)
    new[0] = True
    np.not_equal(sorted_scores[1:], sorted_scores[:-1], out=new[1:])
    starts = np.flatnonzero(new)
    group_n = np.diff(np.append(starts, n)).astype(np.int64)
    group_a = np.add.reduceat(labels.astype(np.int64), starts)
    return starts, group_a, group_n


def pav_blocks(pooled: Sequence[Tuple[float, int]]) -> List[PavBlock]:
    """Run PAV on an arbitrary (score, class) sequence.

    Equal scores are pooled into one tie group before regression. Blocks are
    reported in score order with positions in the sorted sequence.
    """
    scores = np.array([s for s, _ in pooled], dtype=np.float64)
    labels = np.array([c for _, c in pooled], dtype=np.int64)
    order = np.argsort(scores, kind="stable")
    scores, labels = scores[order], labels[order]
    starts, group_a, group_n = _tie_groups(scores, labels)
    blk_a, blk_n, group_block = kernels.pav_merge(group_a, group_n)
    blocks = []
    pos = 0
    for a, n in zip(blk_a.tolist(), blk_n.tolist()):
        blocks.append(PavBlock(pos, pos + n, a, n - a))
        pos += n
    return blocks


def block_llrs(blk_a: np.ndarray, blk_n: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    """ln(p / (1 - p)) - ln(n_a / n_b) per block, from exact integer counts."""
    num = blk_a * n_b
    den = (blk_n - blk_a) * n_a
    with np.errstate(divide="ignore"):
        return np.log(num.astype(np.float64) / den.astype(np.float64))


def pav_calibrate(scores: ScoreSet) -> CalibratedLLRs:
    """Oracle-calibrate a score set to finite natural-log LLRs."""
    n_m, n_nm = scores.n_mated, scores.n_nonmated
    values = np.concatenate([scores.mated, scores.nonmated])
    labels = np.concatenate([np.ones(n_m, np.int64), np.zeros(n_nm, np.int64)])
    order = np.argsort(values, kind="stable")
    starts, group_a, group_n = _tie_groups(values[order], labels[order])

    # the dummies sit strictly outside the observed range, so they are always
    # their own tie groups: a mated one first and a non-mated one last
    group_a = np.concatenate([[1], group_a, [0]])
    group_n = np.concatenate([[1], group_n, [1]])
    blk_a, blk_n, group_block = kernels.pav_merge(group_a, group_n)
    llr_blocks = block_llrs(blk_a, blk_n, n_m + 1, n_nm + 1)
    llr_groups = llr_blocks[group_block[1:-1]]

    group_of_sorted = np.repeat(np.arange(starts.size), np.diff(np.append(starts, values.size)))
    llr = np.empty(values.size)
    llr[order] = llr_groups[group_of_sorted]
    return CalibratedLLRs(llr[:n_m], llr[n_m:])


def pav_brute_force_oracle(pooled: Sequence[Tuple[float, int]]) -> List[Fraction]:
    """Exact isotonic fit by exhaustive search, for testing PAV.

    Tries every split of the score-sorted tie groups into contiguous blocks
    with non-decreasing means and keeps the one with least squared error
    against the class indicators. Returns one exact posterior per element of
    the sorted sequence.
    """
    if len(pooled) > ORACLE_MAX_LEN:
        raise TooLarge(f"oracle handles at most {ORACLE_MAX_LEN} items, got {len(pooled)}")
    items = sorted(pooled, key=lambda p: p[0])
    groups: List[List[int]] = []  # [mated, total]
    prev = None
    for score, cls in items:
        if not groups or score != prev:
            groups.append([0, 0])
        groups[-1][0] += int(cls)
        groups[-1][1] += 1
        prev = score
    m = len(groups)

    # SSE = sum(labels) - sum(a**2 / n) over blocks; maximise the second term
    best_gain = None
    best_cuts: Tuple[int, ...] = ()

    def search(start: int, last_mean: Fraction, gain: Fraction, cuts: Tuple[int, ...]):
        nonlocal best_gain, best_cuts
        if start == m:
            if best_gain is None or gain > best_gain:
                best_gain, best_cuts = gain, cuts
            return
        a = n = 0
        for end in range(start, m):
            a += groups[end][0]
            n += groups[end][1]
            mean = Fraction(a, n)
            if last_mean is not None and mean < last_mean:
                continue
            search(end + 1, mean, gain + Fraction(a * a, n), cuts + (end + 1,))

    search(0, None, Fraction(0), ())

    out: List[Fraction] = []
    lo = 0
    for hi in best_cuts:
        a = sum(g[0] for g in groups[lo:hi])
        n = sum(g[1] for g in groups[lo:hi])
        out.extend([Fraction(a, n)] * n)
        lo = hi
    return out
