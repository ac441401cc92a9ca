import numpy as np
import pytest

from wrelm.synthgen import GenConfig, generate
from wrelm.trainer import TrainConfig, train_offline

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def train_ds():
    return generate(GenConfig(seed=3, n_steps=3000, mu_min=2.8, mu_max=3.6, noise=0.01))


@pytest.fixture(scope="session")
def model(train_ds):
    return train_offline(train_ds, TrainConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(ident: str, title: str, passed: bool, detail: str = "") -> None:
        line = f"{ident} {'PASS' if passed else 'FAIL'} {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
