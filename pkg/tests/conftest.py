import numpy as np
import pytest

from hermetic.states import Ket, SystemLayout

SQ2 = 1 / np.sqrt(2)


def ket(label, *entries):
    v = np.asarray(entries, dtype=np.complex128)
    return Ket(v, SystemLayout.of((label, v.size)))


def basis(label, dim, j):
    return Ket.basis(SystemLayout.of((label, dim)), j)


def bell():
    return Ket(np.array([SQ2, 0, 0, SQ2], dtype=complex), SystemLayout.of(("A", 2), ("B", 2)))


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record (number -> (passed, detail)); printed at the end
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
