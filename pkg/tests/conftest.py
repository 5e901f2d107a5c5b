from __future__ import annotations

import mpmath
import pytest


@pytest.fixture(autouse=True, scope="module")
def mp_precision():
    # mpmath oracles run at 256 bits unless a module overrides this fixture
    with mpmath.workprec(256):
        yield
