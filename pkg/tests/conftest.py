import functools

import pytest

from oracles import GroebnerRing


@pytest.fixture(scope="session")
def groebner():
    """``groebner(n)``: the cached polynomial-quotient oracle for ``B = {1..n}``."""
    return functools.lru_cache(maxsize=None)(GroebnerRing)
