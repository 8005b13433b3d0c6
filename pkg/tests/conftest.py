import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from negwave.fockstate import StateSpace, StateVector

ACCEPTANCE_RESULTS = []


def terms_from_vector(alphabets, vec):
    """Row-major (np.kron order) dense vector -> {ket tuple: amplitude}."""
    vec = np.asarray(vec, dtype=complex).ravel()
    kets = list(itertools.product(*alphabets))
    assert len(kets) == len(vec)
    return {k: complex(a) for k, a in zip(kets, vec)}


def assert_terms(state, expected, tol):
    """Every ket of ``state`` or ``expected`` agrees within ``tol``."""
    kets = set(state.terms) | set(expected)
    for k in kets:
        got = state.amplitude(k)
        want = complex(expected.get(k, 0))
        assert abs(got - want) <= tol, f"{k}: got {got}, want {want}"


def kron_all(*vecs):
    out = np.array([1.0 + 0j])
    for v in vecs:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return out


# zero or clearly above PRUNE_TOL, so products of a few amplitudes never straddle it
amps = st.one_of(
    st.just(0j),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1.0, allow_nan=False, allow_infinity=False),
)


@st.composite
def spaces(draw, max_subsystems=3, max_labels=3, min_subsystems=1, min_labels=1):
    n = draw(st.integers(min_subsystems, max_subsystems))
    subs = tuple(f"s{i}" for i in range(n))
    alphs = tuple(
        tuple(f"l{j}" for j in range(draw(st.integers(min_labels, max_labels)))) for _ in subs
    )
    return StateSpace(subs, alphs)


@st.composite
def states(draw, space=None, **kw):
    space = draw(spaces(**kw)) if space is None else space
    terms = {k: draw(amps) for k in space.basis()}
    return StateVector(space, terms)


@st.composite
def unit_vectors(draw, dim):
    re = draw(st.lists(st.floats(-1, 1), min_size=dim, max_size=dim))
    im = draw(st.lists(st.floats(-1, 1), min_size=dim, max_size=dim))
    v = np.array(re) + 1j * np.array(im)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1
        return v
    return v / n


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1].rstrip(":").lstrip("AC"))):
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the criterion under test."""
    label = request.node.get_closest_marker("criterion").args[0]
    yield
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    ACCEPTANCE_RESULTS.append(f"[{status}] {label}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")
