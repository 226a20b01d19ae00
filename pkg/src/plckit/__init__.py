"""Product life cycle modeling for durable goods.

Simulates and fits the sales evolution of consumer durables: first
purchase through two diffusion channels, repurchase through replacement
waves and multiple purchase, brand competition with an emergent
exponential price decline, logistic substitution, and the lognormal size
distribution of unit sales.
"""

from .competition import (
    BrandState,
    MarketState,
    PriceHistogram,
    decline_rate_from_micro,
    fisher_pry,
    fisher_pry_ode,
    fitness,
    mean_price_ode,
    micro_step,
    price_histogram_step,
    replicator_step,
    rescale_histogram,
    run_replicator,
)
from .diffusion import (
    BassParams,
    GompertzParams,
    PriceTrajectory,
    bass_cumulative,
    bass_rate,
    gompertz_consistency,
    gompertz_cumulative,
    gompertz_rate,
    mean_price,
    price_function,
    shape_from_price,
)
from .gibrat import (
    GibratConfig,
    GibratSample,
    NormalityReport,
    gibrat_simulate,
    lognormal_pdf,
    normality_test,
)
from .income_market import (
    IncomeModel,
    MarketVolumeParams,
    income_pdf,
    market_volume,
    real_price,
    volume_density,
)
from .repurchase import (
    FailureDistribution,
    RepurchaseParams,
    branch_plc,
    multiple_purchase,
    replacement_convolve,
    total_plc,
)
from .config import dump_config, load_config
from .dataio import Dataset, emit, load_csv
from .fitting import (
    FitResult,
    fit_gompertz,
    fit_penetration,
    fit_pipeline,
    fit_plc,
    fit_price_decline,
)
from .scenarios import BUILTIN_SCENARIOS, Scenario, assemble
from .series import SalesSeries

__version__ = "0.1.0"
