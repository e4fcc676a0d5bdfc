import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import random_score_set
from zebra_eval.calibration import pav_calibrate
from zebra_eval.metrics import zebra
from zebra_eval.profile import (
    build_profile,
    emit_csv,
    emit_svg,
    parse_csv,
    parse_grid,
)
from zebra_eval.types import CalibratedLLRs, GridMismatch, InvalidGrid, ZebraReport

SVG_NS = "{http://www.w3.org/2000/svg}"


def zero_cal():
    return CalibratedLLRs(np.zeros(3), np.zeros(4))


def test_zero_evidence_profile_matches_reference():
    p = build_profile(zero_cal(), -4, 4, 201)
    assert np.array_equal(p.ece, p.perfect_privacy_ece)


def test_default_grid():
    p = build_profile(zero_cal())
    assert p.grid.size == 201 and p.grid[0] == -4 and p.grid[-1] == 4


def test_origin_is_even_prior():
    p = build_profile(zero_cal(), -1, 1, 3)
    assert p.grid[1] == 0.0
    assert p.perfect_privacy_ece[1] == 1.0


def test_separated_profile_near_zero():
    p = build_profile(CalibratedLLRs.from_lrs([1e9], [1e-9]), -4, 4, 81)
    assert p.ece.max() < 1e-4


@pytest.mark.parametrize("lo, hi, n", [(0, 1, 1), (1, 0, 5), (0, 0, 5), (0, float("inf"), 5)])
def test_invalid_grid(lo, hi, n):
    with pytest.raises(InvalidGrid):
        build_profile(zero_cal(), lo, hi, n)


@pytest.mark.parametrize("text", ["0:1:1", "0:1", "a:b:c", "1:0:5"])
def test_parse_grid_rejects(text):
    with pytest.raises(InvalidGrid):
        parse_grid(text)


def test_parse_grid():
    assert parse_grid("-4:4:201") == (-4.0, 4.0, 201)


def test_resolution_independence(rng):
    cal = pav_calibrate(random_score_set(rng))
    coarse = build_profile(cal, -4, 4, 201)
    fine = build_profile(cal, -4, 4, 401)
    assert np.allclose(coarse.grid, fine.grid[::2], rtol=0, atol=1e-14)
    np.testing.assert_allclose(coarse.ece, fine.ece[::2], rtol=1e-12, atol=1e-15)


def test_csv_counts():
    text = emit_csv([("a", build_profile(zero_cal(), 0, 1, 2))])
    lines = text.split("\n")
    assert lines[-1] == "" and len(lines) == 4
    assert lines[0] == "log10_odds,perfect_privacy_ece,a"


def test_csv_zero_evidence_columns_equal():
    text = emit_csv([("z", build_profile(zero_cal(), -2, 2, 9))])
    for row in text.strip().split("\n")[1:]:
        cols = row.split(",")
        assert cols[1] == cols[2]


def test_csv_grid_mismatch():
    with pytest.raises(GridMismatch):
        emit_csv([("a", build_profile(zero_cal(), 0, 1, 3)), ("b", build_profile(zero_cal(), 0, 1, 4))])


def test_csv_round_trip_bit_exact(rng):
    profiles = [(f"sys,{k}", build_profile(pav_calibrate(random_score_set(rng)))) for k in range(3)]
    back = parse_csv(emit_csv(profiles))
    assert [n for n, _ in back] == [n for n, _ in profiles]
    for (_, p), (_, q) in zip(profiles, back):
        assert p == q


def _polylines(svg):
    return ET.fromstring(svg.encode()).iter(f"{SVG_NS}polyline")


def test_svg_one_profile():
    svg = emit_svg([("a", build_profile(zero_cal()))])
    assert len(list(_polylines(svg))) == 2
    root = ET.fromstring(svg.encode())
    assert root.get("viewBox") == "0 0 640 400"
    assert "\r" not in svg


def test_svg_empty_list():
    with pytest.raises(InvalidGrid):
        emit_svg([])


def test_svg_three_systems_with_legend(rng):
    names = ["unprotected", "B1", "B2"]
    profiles, reports = [], {}
    for name in names:
        s = random_score_set(rng, 20, 60, ties=False, source_id=name)
        profiles.append((name, build_profile(pav_calibrate(s))))
        reports[name] = zebra(s)
    svg = emit_svg(profiles, reports=reports)
    lines = list(_polylines(svg))
    assert len(lines) == 4
    assert lines[0].get("stroke") == "#000000"
    for name in names:
        r = reports[name]
        assert f"{name} ({r.d_ece:.2f}, {r.log10_l:.2f}, {r.tag})" in svg


def test_svg_legend_format():
    svg = emit_svg(
        [("unprotected", build_profile(zero_cal()))],
        reports={"unprotected": ZebraReport(0.58, 3.98, "C", "unprotected")},
    )
    assert "unprotected (0.58, 3.98, C)" in svg


def test_svg_escapes_names():
    svg = emit_svg([("<a&b>", build_profile(zero_cal()))])
    ET.fromstring(svg.encode())
    assert "&lt;a&amp;b&gt;" in svg


def test_svg_deterministic(rng):
    cal = pav_calibrate(random_score_set(rng))
    a = emit_svg([("x", build_profile(cal))])
    b = emit_svg([("x", build_profile(cal))])
    assert a == b
    assert re.search(r'points="[0-9., ]+"', a)
