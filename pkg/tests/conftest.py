import numpy as np
import pytest
from hypothesis import settings

from lagpme import mesh

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_triangle():
    return mesh.Triangulation.from_arrays([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])


@pytest.fixture
def square():
    return mesh.build_structured((0.0, 1.0, 0.0, 1.0), (4, 4))


def perturbed(tri, rng, scale=0.05):
    """Random admissible configuration near the identity."""
    h = np.sqrt(tri.areas.min())
    for _ in range(50):
        x = tri.identity() + scale * h * rng.standard_normal(tri.nodes.shape)
        if mesh.is_admissible(tri, x)[0]:
            return x
        scale *= 0.5
    raise AssertionError("could not draw an admissible configuration")
