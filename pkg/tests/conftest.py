import numpy as np
import pytest
from hypothesis import strategies as st

from zebra_eval import _backend, _purepy
from zebra_eval.types import ScoreSet

BACKENDS = [pytest.param(_purepy, id="python")]
if _backend.compiled is not None:
    BACKENDS.append(pytest.param(_backend.compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test against each available kernel implementation."""
    monkeypatch.setattr(_backend, "kernels", request.param)
    import zebra_eval.calibration as cal
    import zebra_eval.metrics as met

    monkeypatch.setattr(cal, "kernels", request.param)
    monkeypatch.setattr(met, "kernels", request.param)
    return request.param


def random_score_set(rng, n_min=1, n_max=50, ties=True, source_id="rand"):
    na, nb = rng.integers(n_min, n_max + 1, size=2)
    if ties and rng.random() < 0.5:
        levels = rng.integers(2, 8)
        mated = rng.integers(0, levels, na) + rng.integers(0, 2)
        nonmated = rng.integers(0, levels, nb).astype(float)
    else:
        gap = rng.uniform(-1, 4)
        mated = rng.normal(gap, 1.0, na)
        nonmated = rng.normal(0.0, 1.0, nb)
    return ScoreSet(mated, nonmated, source_id)


finite_scores = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
tied_scores = st.integers(min_value=-5, max_value=5).map(float)
score_lists = st.lists(st.one_of(finite_scores, tied_scores), min_size=1, max_size=40)


@st.composite
def score_sets(draw):
    return ScoreSet(draw(score_lists), draw(score_lists), "hyp")


@pytest.fixture
def rng():
    return np.random.default_rng(20201025)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
