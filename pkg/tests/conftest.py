import os
import string
import sys
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from gammoid.dimaze import Dimaze  # noqa: E402
from gammoid.transversal import BipartiteGraph  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def dimazes(draw, max_vertices: int = 6, min_vertices: int = 1):
    n = draw(st.integers(min_vertices, max_vertices))
    names = list(string.ascii_lowercase[:n])
    exits = frozenset(draw(st.sets(st.sampled_from(names))))
    slots = [(u, v) for u in names if u not in exits for v in names if v != u]
    edges = frozenset(draw(st.sets(st.sampled_from(slots))) if slots else frozenset())
    return Dimaze(tuple(names), edges, exits)


@st.composite
def dimaze_and_subset(draw, max_vertices: int = 6):
    d = draw(dimazes(max_vertices))
    X = frozenset(draw(st.sets(st.sampled_from(d.vertices))))
    return d, X


@st.composite
def bigraphs(draw, max_left: int = 4, max_right: int = 4):
    nl = draw(st.integers(0, max_left))
    nr = draw(st.integers(0, max_right))
    left = [f"v{i}" for i in range(nl)]
    right = [f"w{i}" for i in range(nr)]
    pairs = [(v, w) for v in left for w in right]
    edges = frozenset(draw(st.sets(st.sampled_from(pairs)))) if pairs else frozenset()
    return BipartiteGraph(tuple(left), tuple(right), edges)


@pytest.fixture
def size_guard_env(monkeypatch):
    def set_guard(value):
        monkeypatch.setenv("GAMMOID_SIZE_GUARD", str(value))

    return set_guard


# --- acceptance reporting ---------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, printed at the end of the run."""

    @contextmanager
    def record(number: int, title: str):
        notes: list[str] = []
        try:
            yield notes.append
        except BaseException as exc:
            detail = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            line = f"criterion {number:>2}: FAIL  {title} ({detail})"
            ACCEPTANCE[number] = line
            print(line)
            raise
        line = f"criterion {number:>2}: PASS  {title}" + (f" ({'; '.join(notes)})" if notes else "")
        ACCEPTANCE[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
