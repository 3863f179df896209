"""Quantum noise and two-mode entanglement of a self-phase-locked NOPO.

Modules
-------
params         physical parameters, derived quantities, config loading
langevin       positive-P drift, noise and Euler step
semiclassical  steady states, critical pumps, stability, photon fluxes
linearized     drift/diffusion matrices and fluctuation covariances
entanglement   V, R, V+-, product and the criteria
unitary        lossless V(t)
stochastic     Monte Carlo ensembles of the Langevin equations
figures        figure datasets and sweeps
cli            command-line entry point
"""

__version__ = "0.1.0"

from .errors import DomainError, MonteCarloError, NopoError, ParameterError, ThresholdProximityError
from .params import SystemParams, derive, load_config, threshold_epsilon

__all__ = [
    "DomainError", "MonteCarloError", "NopoError", "ParameterError", "ThresholdProximityError",
    "SystemParams", "derive", "load_config", "threshold_epsilon", "__version__",
]
