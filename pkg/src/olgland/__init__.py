"""Equilibria, bubbles and efficiency in two-period OLG economies with land."""

__version__ = "0.1.0"

from .economy import (  # noqa: E402
    CESParams,
    CRRAParams,
    Demography,
    FactorPrices,
    asymptotics,
    ces_output,
    factor_prices_at,
    indifference_elasticity,
    labor_share,
    mrs,
    sigma_numeric,
)
from .equilibrium import (  # noqa: E402
    EquilibriumPath,
    PathKind,
    PricePathSpec,
    ScenarioConfig,
    build,
    build_bubbly,
    build_fundamental,
    date0_prices,
    detrend,
    find_t0,
    fundamental_value,
    verify_residuals,
)
from .diagnostics import (  # noqa: E402
    DiagnosticsReport,
    SeriesClassification,
    Verdict,
    asymptotically_bubbly_check,
    cass_check,
    classify_bubble,
    classify_series,
    construction_bounds,
    diagnose,
    mu_bound,
    necessity_check,
    pv_endowment,
)
from .welfare import (  # noqa: E402
    ImprovementReport,
    TransferScheme,
    WelfareVerdict,
    apply_transfer,
    first_order_gain,
    improvement_search,
)
