# -*- coding: utf-8 -*-
import pytest

from binentpy.alpha_solver import solve_alpha


@pytest.fixture(scope="session")
def alpha_of():
    """alpha certificates, solved once per k and session."""
    cache = {}

    def get(k):
        if k not in cache:
            cache[k] = solve_alpha(k)
        return cache[k]

    return get
