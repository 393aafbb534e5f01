import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hll.exterior import Form, basis_enumerate  # noqa: E402


def random_form(rng, n, p, q, density=1.0):
    terms = {}
    for key in basis_enumerate(n, p, q):
        if rng.random() < density:
            terms[key] = complex(rng.standard_normal(), rng.standard_normal())
    return Form(n, p, q, terms)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
