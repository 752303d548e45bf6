import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cyclespan.graph import LabeledGraph

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=1, max_n=9, min_p=0.0):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return LabeledGraph(n, tuple(e for e, k in zip(pairs, keep) if k))


@st.composite
def bit_rows(draw, max_m=16, max_rows=10):
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.integers(0, 2**m - 1), max_size=max_rows))
    return m, rows


@pytest.fixture
def workers_one(monkeypatch):
    monkeypatch.setenv("CYCLESPAN_WORKERS", "1")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance summary")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
