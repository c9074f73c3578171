import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def gaussian_classes(rng, n_per_class, n_features, n_classes=3, spread=4.0):
    """Isotropic Gaussian blobs with 1-based labels."""
    means = spread * rng.standard_normal((n_classes, n_features))
    x = np.vstack([m + rng.standard_normal((n_per_class, n_features)) for m in means])
    labels = np.repeat(np.arange(1, n_classes + 1), n_per_class)
    return x, labels


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
