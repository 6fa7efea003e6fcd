"""Natural longevity hedging toolkit.

Thin Python layer over the C++ core: mortality model fitting and
simulation, portfolio valuation, hedge calibration, risk measures,
prediction regions and preset experiments.
"""

from ._core import (
    AnnuityProduct,
    Error,
    InsuranceProduct,
    Portfolio,
    __version__,
    build_regions,
    classify_outcome,
    compute_experiment,
    expected_shortfall,
    fit_cbd,
    fit_lee_carter,
    force_of_interest,
    hedge_ratio_dm,
    hedge_ratio_vm,
    list_presets,
    load_config,
    load_rates,
    present_values,
    risk_report,
    run_experiment,
    simulate_bootstrap,
    simulate_cbd,
    simulate_lc,
    validate_config,
    value_at_risk,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
