import numpy as np
import pytest
from hypothesis import strategies as st

from squid_interface.quantum import make_state


def random_state(rng, dim):
    return make_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20150501)


seeds = st.integers(min_value=0, max_value=2**63 - 1)


@st.composite
def complex_arrays(draw, min_dim=1, max_dim=64):
    dim = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    return r.normal(size=dim) + 1j * r.normal(size=dim)


# -- acceptance report ------------------------------------------------------

_criteria: dict[int, list[tuple[str, bool]]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number = int(name.split("_")[2])
        _criteria.setdefault(number, []).append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _criteria[number]
        failed = [name for name, ok in results if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f" ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {number:2d}: {status}  [{len(results) - len(failed)}/{len(results)} checks]{detail}")
