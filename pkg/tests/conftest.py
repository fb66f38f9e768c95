import pytest
from hypothesis import HealthCheck, settings

from mfseries.catalog import DISC6_SIGNATURE, disc6_group, gamma0_11_group
from mfseries.fuchsian import compute_dirichlet_domain
from mfseries.mpnum import backend

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
settings.load_profile("default")

ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in range(1, 8):
        terminalreporter.write_line(ACCEPTANCE.get(key, f"criterion {key}: NOT RUN  (deselected in this session; criterion 4 needs -m slow)"))


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(number: int, ok: bool, detail: str):
        ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return _report


@pytest.fixture(scope="session")
def ar():
    return backend()


@pytest.fixture(scope="session")
def disc6_domain():
    return compute_dirichlet_domain(disc6_group(backend()), signature=DISC6_SIGNATURE)


@pytest.fixture(scope="session")
def gamma0_11_domain():
    return compute_dirichlet_domain(gamma0_11_group(backend()), require_cocompact=False)


@pytest.fixture(scope="session")
def disc6_reference():
    """Frozen extended-precision b_n of the weight 4 disc-6 form (see scripts/)."""
    import json
    from pathlib import Path

    data = json.loads((Path(__file__).parent / "data" / "disc6_k4_reference.json").read_text())
    return [complex(float(re), float(im)) for re, im in data["b"]]
