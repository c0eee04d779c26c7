"""Exact Mertens function values and the explicit-formula approximation."""

from ._core import (
    MertensError,
    NotFoundError,
    ParseError,
    PrecisionError,
    PreconditionError,
    QuasiPeriod,
    ResourceLimitError,
    ZeroTable,
    crossing_probability,
    fast_div,
    find_quasiperiod,
    mertens,
    mertens_many,
    mertens_naive,
    mertens_quotients,
    moebius,
    q,
    q_grid,
    q_sigma,
    quasiperiod_at,
    rebased_phases,
    set_workers,
    squarefree_density,
    threshold_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
