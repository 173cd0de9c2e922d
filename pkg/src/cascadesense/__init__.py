"""Energy-detection performance over N*Rayleigh cascaded fading channels."""

from .errors import (BranchError, ConvergenceError, DivergentIntegralError,
                     DomainError, NumericsError, OverflowRangeError,
                     ParameterError)
from .specfun import (bessel_i, bessel_k, inverse_regularized_gamma_q,
                      marcum_q, regularized_gamma_q)
from .mellin import (ContourConfig, GSpec, cascaded_gspec, cascaded_kernel,
                     meijer_g, validate_gspec)
from .bivariate import (BivariateGSpec, BivariateValue, ComplexArgumentPair,
                        bivariate_g, real_part_checked,
                        theorem1_argument_pair, theorem1_bivariate_spec)
from .detection import (AvgPdResult, DetectorConfig, Theorem1Params,
                        avg_pd_cascaded, avg_pd_cascaded_result, avg_pd_sls,
                        cascaded_pdf, pd_awgn, pf_from_threshold, pf_sls,
                        theorem1_integral, threshold_from_pf)
from .mcsim import (McEstimate, RngStream, estimate_avg_pd, estimate_sls_pd,
                    sample_cascaded_snr, simulate_statistic)

__version__ = "0.1.0"

__all__ = [
    "BranchError", "ConvergenceError", "DivergentIntegralError", "DomainError",
    "NumericsError", "OverflowRangeError", "ParameterError",
    "bessel_i", "bessel_k", "inverse_regularized_gamma_q", "marcum_q",
    "regularized_gamma_q",
    "ContourConfig", "GSpec", "cascaded_gspec", "cascaded_kernel", "meijer_g",
    "validate_gspec",
    "BivariateGSpec", "BivariateValue", "ComplexArgumentPair", "bivariate_g",
    "real_part_checked", "theorem1_argument_pair", "theorem1_bivariate_spec",
    "AvgPdResult", "DetectorConfig", "Theorem1Params", "avg_pd_cascaded",
    "avg_pd_cascaded_result", "avg_pd_sls", "cascaded_pdf", "pd_awgn",
    "pf_from_threshold", "pf_sls", "theorem1_integral", "threshold_from_pf",
    "McEstimate", "RngStream", "estimate_avg_pd", "estimate_sls_pd",
    "sample_cascaded_snr", "simulate_statistic",
    "__version__",
]
