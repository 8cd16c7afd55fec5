import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)



def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {i:02d}: {'PASS' if ok else 'FAIL'}  {detail}")
