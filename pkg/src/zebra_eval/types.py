"""Domain types shared by every module.

All containers are frozen dataclasses over read-only float64 arrays, so they
can be handed to concurrent readers without copying.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MAX_D_ECE = 1.0 / (2.0 * math.log(2.0))
TAGS = ("0", "A", "B", "C", "D", "E", "F")

# absolute slack on the D_ECE range check in ZebraReport
_D_ECE_SLACK = 1e-12


class ZebraError(ValueError):
    """Base class for user-facing validation errors."""


class EmptyClass(ZebraError):
    def __init__(self, cls: str):
        self.cls = cls
        super().__init__(f"no {cls} scores")


class NonFiniteScore(ZebraError):
    def __init__(self, cls: str, index: int, value: float):
        self.cls = cls
        self.index = index
        self.value = value
        super().__init__(f"non-finite {cls} score at index {index}: {value!r}")


class ParseError(ZebraError):
    def __init__(self, line: int, reason: str, path: Optional[str] = None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:" if path else "line "
        super().__init__(f"{where}{line}: {reason}")


class InvalidGrid(ZebraError):
    pass


class GridMismatch(ZebraError):
    pass


class InvalidSpec(ZebraError):
    pass


class NegativeMagnitude(ZebraError):
    pass


class TooLarge(ZebraError):
    pass


class MiscalibratedInput(UserWarning):
    """D_ECE came out negative: the LLRs were not oracle-calibrated."""


def _frozen_array(values, cls: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteScore(cls, i, float(arr[i]))
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScoreSet:
    """Raw classifier scores split into mated (same speaker) and non-mated pools."""

    mated: np.ndarray
    nonmated: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        mated = _frozen_array(self.mated, "mated")
        nonmated = _frozen_array(self.nonmated, "nonmated")
        if mated.size == 0:
            raise EmptyClass("mated")
        if nonmated.size == 0:
            raise EmptyClass("nonmated")
        object.__setattr__(self, "mated", mated)
        object.__setattr__(self, "nonmated", nonmated)
        object.__setattr__(self, "source_id", str(self.source_id))

    def __eq__(self, other):
        if not isinstance(other, ScoreSet):
            return NotImplemented
        return (
            self.source_id == other.source_id
            and np.array_equal(self.mated, other.mated)
            and np.array_equal(self.nonmated, other.nonmated)
        )

    __hash__ = None

    @property
    def n_mated(self) -> int:
        return int(self.mated.size)

    @property
    def n_nonmated(self) -> int:
        return int(self.nonmated.size)


def validate_score_set(
    raw_mated: Sequence[float], raw_nonmated: Sequence[float], source_id: str = ""
) -> ScoreSet:
    """Build a ScoreSet, raising EmptyClass or NonFiniteScore on bad input."""
    return ScoreSet(raw_mated, raw_nonmated, source_id)


@dataclass(frozen=True, eq=False)
class CalibratedLLRs:
    """Natural-log likelihood ratios aligned with the original score order."""

    mated_llr: np.ndarray
    nonmated_llr: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mated_llr", _frozen_array(self.mated_llr, "mated"))
        object.__setattr__(
            self, "nonmated_llr", _frozen_array(self.nonmated_llr, "nonmated")
        )
        if self.mated_llr.size == 0:
            raise EmptyClass("mated")
        if self.nonmated_llr.size == 0:
            raise EmptyClass("nonmated")

    @classmethod
    def from_lrs(cls, mated_lr, nonmated_lr) -> "CalibratedLLRs":
        """Convenience constructor from plain likelihood ratios (must be > 0)."""
        with np.errstate(divide="ignore"):
            return cls(np.log(np.asarray(mated_lr, float)), np.log(np.asarray(nonmated_lr, float)))

    @property
    def n_mated(self) -> int:
        return int(self.mated_llr.size)

    @property
    def n_nonmated(self) -> int:
        return int(self.nonmated_llr.size)

    def __eq__(self, other):
        if not isinstance(other, CalibratedLLRs):
            return NotImplemented
        return np.array_equal(self.mated_llr, other.mated_llr) and np.array_equal(
            self.nonmated_llr, other.nonmated_llr
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class EceProfile:
    """ECE sampled over a grid of prior log10-odds, in bits."""

    grid: np.ndarray
    ece: np.ndarray
    perfect_privacy_ece: np.ndarray

    def __post_init__(self):
        grid = np.array(self.grid, dtype=np.float64)
        ece = np.array(self.ece, dtype=np.float64)
        ref = np.array(self.perfect_privacy_ece, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 2:
            raise InvalidGrid("profile grid needs at least 2 points")
        if not (grid.shape == ece.shape == ref.shape):
            raise InvalidGrid("grid, ece and perfect_privacy_ece lengths differ")
        if np.any(np.diff(grid) <= 0):
            raise InvalidGrid("profile grid must be strictly increasing")
        for arr in (grid, ece, ref):
            arr.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "ece", ece)
        object.__setattr__(self, "perfect_privacy_ece", ref)

    def __eq__(self, other):
        if not isinstance(other, EceProfile):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in (
                (self.grid, other.grid),
                (self.ece, other.ece),
                (self.perfect_privacy_ece, other.perfect_privacy_ece),
            )
        )

    __hash__ = None


def tag_for(log10_l: float) -> str:
    """Worst-case disclosure category; boundaries are closed-left, open-right."""
    if not log10_l >= 0.0:
        raise NegativeMagnitude(f"log10(l) must be >= 0, got {log10_l!r}")
    if log10_l == 0.0:
        return "0"
    if log10_l < 1.0:
        return "A"
    if log10_l < 2.0:
        return "B"
    if log10_l < 4.0:
        return "C"
    if log10_l < 5.0:
        return "D"
    if log10_l < 6.0:
        return "E"
    return "F"


@dataclass(frozen=True)
class ZebraReport:
    d_ece: float
    log10_l: float
    tag: str
    source_id: str = ""
    cllr: Optional[float] = None
    eer: Optional[float] = None

    def __post_init__(self):
        if not (-_D_ECE_SLACK <= self.d_ece <= MAX_D_ECE + _D_ECE_SLACK):
            raise ZebraError(f"d_ece out of range: {self.d_ece!r}")
        if self.tag not in TAGS:
            raise ZebraError(f"unknown tag {self.tag!r}")
        if tag_for(self.log10_l) != self.tag:
            raise ZebraError(f"tag {self.tag} inconsistent with log10(l)={self.log10_l!r}")
        if self.eer is not None and not (0.0 <= self.eer <= 1.0):
            raise ZebraError(f"eer out of range: {self.eer!r}")

    @property
    def display(self) -> dict:
        return {
            "d_ece_2dp": f"{self.d_ece:.2f}",
            "log10_l_2dp": f"{self.log10_l:.2f}",
        }

    def as_tuple(self) -> tuple:
        return (self.d_ece, self.log10_l, self.tag)
