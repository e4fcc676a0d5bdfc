"""Score files and evaluation reports.

Two score-file layouts are supported, chosen explicitly by the caller:

``labeled-tsv``
    one ``<label><TAB or spaces><score>`` per line, label ``mated`` or
    ``nonmated`` (any case).
``split-pair``
    two files with one score per line, mated and non-mated.

In both, blank lines and lines starting with ``#`` are skipped. A comment of
the form ``# source_id: <name>`` names the evaluated system.
"""
from __future__ import annotations

import json
import re
from typing import Iterator, List, Optional, Tuple

from .types import ParseError, ScoreSet, ZebraReport

FORMATS = ("labeled-tsv", "split-pair")
LABELS = ("mated", "nonmated")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?", re.ASCII)
_NONFINITE = re.compile(r"[+-]?(?:nan|inf|infinity)", re.IGNORECASE)
_SOURCE = re.compile(r"#\s*source_id:\s?(.*)$")


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    """Physical lines with 1-based numbers; CRLF and LF both accepted."""
    for no, line in enumerate(text.split("\n"), start=1):
        yield no, line[:-1] if line.endswith("\r") else line


def _score(token: str, line: int, path: Optional[str]) -> float:
    if _NUMBER.fullmatch(token) or _NONFINITE.fullmatch(token):
        # non-finite values (including overflow) are rejected by ScoreSet
        return float(token)
    raise ParseError(line, f"not a number: {token!r}", path)


def _source_comment(line: str) -> Optional[str]:
    m = _SOURCE.match(line.strip())
    return m.group(1).strip() if m else None


def parse_labeled_tsv(text: str, source_id: Optional[str] = None, path: Optional[str] = None) -> ScoreSet:
    mated: List[float] = []
    nonmated: List[float] = []
    found_id = None
    for no, line in _lines(text):
        body = line.strip()
        if not body:
            continue
        if body.startswith("#"):
            if found_id is None:
                found_id = _source_comment(body)
            continue
        fields = body.split()
        if len(fields) != 2:
            raise ParseError(no, f"expected '<label> <score>', got {len(fields)} fields", path)
        label = fields[0].lower()
        if label not in LABELS:
            raise ParseError(no, f"unknown label {fields[0]!r}", path)
        (mated if label == "mated" else nonmated).append(_score(fields[1], no, path))
    if source_id is None:
        source_id = found_id or ""
    return ScoreSet(mated, nonmated, source_id)


def _parse_column(text: str, path: Optional[str]) -> Tuple[List[float], Optional[str]]:
    values: List[float] = []
    found_id = None
    for no, line in _lines(text):
        body = line.strip()
        if not body:
            continue
        if body.startswith("#"):
            if found_id is None:
                found_id = _source_comment(body)
            continue
        fields = body.split()
        if len(fields) != 1:
            raise ParseError(no, f"expected one score per line, got {len(fields)} fields", path)
        values.append(_score(fields[0], no, path))
    return values, found_id


def parse_split_pair(
    mated_text: str,
    nonmated_text: str,
    source_id: Optional[str] = None,
    mated_path: Optional[str] = None,
    nonmated_path: Optional[str] = None,
) -> ScoreSet:
    mated, id_a = _parse_column(mated_text, mated_path)
    nonmated, id_b = _parse_column(nonmated_text, nonmated_path)
    if source_id is None:
        source_id = id_a or id_b or ""
    return ScoreSet(mated, nonmated, source_id)


def write_labeled_tsv(scores: ScoreSet) -> str:
    """Serialise a score set; ``repr`` floats make the round trip exact."""
    out = []
    if scores.source_id:
        out.append(f"# source_id: {scores.source_id}")
    out.extend(f"mated\t{float(s)!r}" for s in scores.mated)
    out.extend(f"nonmated\t{float(s)!r}" for s in scores.nonmated)
    return "\n".join(out) + "\n"


def read_scores(
    path: str,
    fmt: str = "labeled-tsv",
    nonmated_path: Optional[str] = None,
    source_id: Optional[str] = None,
) -> ScoreSet:
    """Load a score set from disk. ``source_id`` defaults to the file comment, then the path."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if fmt == "labeled-tsv":
        scores = parse_labeled_tsv(text, source_id, path=path)
    else:
        if nonmated_path is None:
            raise ValueError("split-pair format needs a non-mated score file")
        with open(nonmated_path, encoding="utf-8", newline="") as fh:
            other = fh.read()
        scores = parse_split_pair(text, other, source_id, path, nonmated_path)
    if not scores.source_id:
        scores = ScoreSet(scores.mated, scores.nonmated, path)
    return scores


def report_to_dict(report: ZebraReport) -> dict:
    d = {
        "source_id": report.source_id,
        "d_ece": report.d_ece,
        "log10_l": report.log10_l,
        "tag": report.tag,
    }
    if report.cllr is not None:
        d["cllr"] = report.cllr
    if report.eer is not None:
        d["eer"] = report.eer
    d["display"] = report.display
    return d


def write_report(report: ZebraReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    disp = report.display
    line = (
        f"{report.source_id}: (D_ECE={disp['d_ece_2dp']}, "
        f"log10(l)={disp['log10_l_2dp']}, tag={report.tag})"
    )
    extras = []
    if report.cllr is not None:
        extras.append(f"Cllr={report.cllr:.4f} bits")
    if report.eer is not None:
        extras.append(f"EER={100.0 * report.eer:.2f}%")
    if extras:
        line += "  [contrast only: " + ", ".join(extras) + "]"
    return line + "\n"


def read_report(text: str) -> ZebraReport:
    """Parse a JSON report written by :func:`write_report`."""
    d = json.loads(text)
    return ZebraReport(
        d_ece=float(d["d_ece"]),
        log10_l=float(d["log10_l"]),
        tag=str(d["tag"]),
        source_id=str(d.get("source_id", "")),
        cllr=d.get("cllr"),
        eer=d.get("eer"),
    )
