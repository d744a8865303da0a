"""Ergodic capacity of Fisher-Snedecor F fading channels.

Closed forms (hypergeometric and Meijer-G), an independent quadrature
reference, asymptotic expansions and a Monte Carlo estimator for four
power-adaptation schemes.  All capacities are in nats.
"""

from ._backend import kernels
from .capacity import (
    CutoffSolution,
    EcResult,
    Scheme,
    SchemeKind,
    ci_target_snr,
    ec_asym,
    ec_ci,
    ec_ci_asym,
    ec_closed,
    ec_opra,
    ec_opra_asym,
    ec_ora,
    ec_ora_asym,
    ec_quadrature,
    ec_tci,
    ec_tci_asym,
    solve_opra_cutoff,
    verify_power_constraint,
)
from .errors import (
    BracketError,
    ContourError,
    DivergenceError,
    DomainError,
    FisherECError,
    NonConvergenceError,
    ToleranceError,
)
from .fading import FadingParams, ccdf, cdf, inverse_moment_tail, pdf, sample, true_mean
from .montecarlo import McEstimate, mc_ec
from .special import ContourSpec, digamma, gauss_2f1, ln_beta, ln_gamma, meijer_g_opra, meijer_g_ora

__version__ = "0.1.0"
BACKEND = kernels.NAME
