"""Large-time asymptotics of KP-2 solutions through the dbar problem."""
from .errors import KP2Error
from .estimator import KP2Reconstructor
from .phase_geometry import PhaseParams
from .scattering import ScatteringData, gaussian_family, zero_data

__all__ = ["KP2Error", "KP2Reconstructor", "PhaseParams", "ScatteringData", "gaussian_family",
           "zero_data"]
__version__ = "0.1.0"
