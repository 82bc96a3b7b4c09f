"""Exact energy statistics of the critical 2D Ising model on a cylinder.

The lattice is 2N wide (periodic) and 2M tall (free boundary).  The package
evaluates the closed-form partition function and its beta-derivatives,
the energy moment generating function, exact energy moments, and numerical
checks of the central limit theorem for the total energy, cross-validated
by brute-force enumeration and Monte Carlo sampling.
"""

from .asymptotics import (
    BoundReport,
    CltScanRow,
    PropositionTerms,
    bound_suite,
    clt_scan,
    odd_harmonic_sum,
    proposition_terms,
)
from .errors import ResourceLimitError, ValidationError
from .montecarlo import McConfig, McEstimate
from .montecarlo import run as mc_run
from .montecarlo import run_chains as mc_run_chains
from .oracle import (
    EnergyPmf,
    enumerate_pmf,
    oracle_log_mgf,
    oracle_log_partition,
    oracle_moments,
)
from .partition import (
    EnergyMoments,
    LogPartition,
    energy_moments,
    free_partition,
    log_mgf,
    log_partition,
    log_partition_hp,
    normalized_log_mgf,
)
from .spectrum import (
    BETA_CRITICAL,
    LatticeSpec,
    SpectrumPoint,
    critical_beta,
    eta,
    f,
    f_derivatives,
    f_p_critical,
    g,
    g_derivatives,
    gamma,
    gamma_derivatives,
    spectrum_point,
    theta_grid,
)

__all__ = [
    "BETA_CRITICAL",
    "BoundReport",
    "CltScanRow",
    "EnergyMoments",
    "EnergyPmf",
    "LatticeSpec",
    "LogPartition",
    "McConfig",
    "McEstimate",
    "PropositionTerms",
    "ResourceLimitError",
    "SpectrumPoint",
    "ValidationError",
    "bound_suite",
    "clt_scan",
    "critical_beta",
    "energy_moments",
    "enumerate_pmf",
    "eta",
    "f",
    "f_derivatives",
    "f_p_critical",
    "free_partition",
    "g",
    "g_derivatives",
    "gamma",
    "gamma_derivatives",
    "log_mgf",
    "log_partition",
    "log_partition_hp",
    "mc_run",
    "mc_run_chains",
    "normalized_log_mgf",
    "odd_harmonic_sum",
    "oracle_log_mgf",
    "oracle_log_partition",
    "oracle_moments",
    "proposition_terms",
    "spectrum_point",
    "theta_grid",
]

__version__ = "0.1.0"
