import random
import shutil

import pytest
from hypothesis import settings, strategies as st

from oracles import random_formula

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

Z3 = shutil.which("z3") or ("/usr/local/bin/z3" if shutil.os.path.exists("/usr/local/bin/z3") else None)


def formulas(max_atoms=4):
    return st.integers(0, 2**32).map(lambda s: random_formula(random.Random(s), max_atoms))


@pytest.fixture
def z3_solver():
    if Z3 is None:
        pytest.skip("z3 binary not available")
    from sscc.constraints import ExternalSolver
    return ExternalSolver(Z3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
