"""Covert symbiotic-radio analysis toolkit."""

from ._core import (  # noqa: F401
    SystemConfig,
    bessel_k0,
    bessel_k1,
    chebyshev_nodes,
    dbm_to_watt,
    dep_closed_form,
    dep_monte_carlo,
    optimal_threshold,
    optimize_phases,
    path_loss_db,
    watt_to_dbm,
)
