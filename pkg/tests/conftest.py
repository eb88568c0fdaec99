"""Shared fixtures: correlator tables are immutable once computed, so they
are cached per model across the whole test session."""

import functools

import pytest

from toprec_kp.kp import build_model_curve, pq_model
from toprec_kp.toprec import CorrelatorTable


@functools.lru_cache(maxsize=None)
def _table(p: int, q: int) -> CorrelatorTable:
    return CorrelatorTable(build_model_curve(pq_model(p, q)))


@pytest.fixture(scope="session")
def model_table():
    """model_table(p, q) -> shared CorrelatorTable on the printed curve."""
    return _table
