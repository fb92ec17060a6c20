"""Statistics and outage analysis of cascaded turbulence/misalignment channels."""

from .specfun import (
    AccuracyError,
    DegenerateParametersError,
    DomainError,
    MeijerGSpec,
    SeriesOverflowError,
    UnsupportedSpecError,
    bessel_k,
    build_slater_expansion,
    erf_fn,
    gamma_fn,
    meijer_g,
    pfq,
)
from .distributions import (
    CompositeProduct,
    GammaGammaParams,
    PointingErrorParams,
    gg_pdf,
    sample_z,
    z1_cdf,
    z1_pdf,
    z2_pdf,
    z_cdf,
    z_cdf_asymptotic,
    z_pdf,
)
from .channels import (
    FsoAtmosphere,
    FsoLinkGeometry,
    ThzAtmosphere,
    ThzLinkBudget,
    TURBULENCE_PRESETS,
    fso_gain,
    fso_gg_params,
    hill_cn2,
    molecular_absorption,
    rytov_variance,
    thz_gain,
    thz_gg_params,
)
from .performance import (
    OutageResult,
    diversity_order,
    gamma_s,
    op_fso_cascade,
    op_fso_cascade_asymptotic,
    op_fso_parallel_bound,
    op_thz,
)
from .mc import McEstimate, ks_statistic, mc_cdf, mc_op_parallel, mc_op_thz

__version__ = "0.1.0"
