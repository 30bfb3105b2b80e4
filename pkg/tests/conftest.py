import numpy as np
import pytest

from sptk.certificate import synthesize_certificate
from sptk.decomposition import decompose
from sptk.model import build_heat1d, build_scalar_exemplar

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    _criteria.setdefault(number, (title, []))[1].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number:2d}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


@pytest.fixture(scope="session")
def scalar():
    return build_scalar_exemplar()


@pytest.fixture(scope="session")
def heat():
    return build_heat1d(32, 1.0, "constant", "constant", [[-2.0]], [[1.0]], [[1.0]])


@pytest.fixture(scope="session")
def scalar_parts(scalar):
    dec = decompose(scalar)
    return scalar, dec, synthesize_certificate(scalar, dec, np.eye(1), 2.0 * np.eye(1))


@pytest.fixture(scope="session")
def heat_parts(heat):
    dec = decompose(heat)
    return heat, dec, synthesize_certificate(heat, dec)


def random_hurwitz(rng, n):
    """Random matrix shifted so its spectral abscissa is in [-2, -0.1]."""
    A = rng.standard_normal((n, n))
    shift = np.max(np.linalg.eigvals(A).real) + rng.uniform(0.1, 2.0)
    return A - shift * np.eye(n)
