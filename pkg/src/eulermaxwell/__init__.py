"""Spectral theory, reference oracles, and a periodic-box solver for the
relaxed electron fluid coupled to Maxwell fields.

Subpackages by capability:

- `spectrum`:   characteristic cubics and their root structure
- `modes`:      exact closed-form propagation of a single Fourier mode
- `oracle`:     brute-force RK4 reference and Lyapunov decay verification
- `decay`:      whole-space norm evolution by radial quadrature, decay fits
- `fields`:     periodic spectral grid, field states, constraint projection
- `simulation`: nonlinear pseudospectral solver and energy functionals
- `cli`:        experiment harness (manifests, CSV/JSON reports)
"""

from .spectrum import (LONGITUDINAL, TRANSVERSE, SpectralRoots,
                       asymptotic_roots, characteristic_value,
                       longitudinal_roots, transverse_roots)
from .modes import (IncompatibleModeError, LongitudinalCoeffs,
                    LongitudinalState, ModeState, TransverseCoeffs,
                    TransverseState, WaveVector, decompose, envelope_bounds,
                    longitudinal_coeffs, propagate_longitudinal,
                    propagate_mode, propagate_transverse,
                    random_compatible_mode, transverse_coeffs)
from .oracle import (DEFAULT_WEIGHTS, LyapunovWeights, ModeTrajectory,
                     integrate, lyapunov_decay_check, lyapunov_value, rhs,
                     weight_search)

__all__ = [
    "LONGITUDINAL", "TRANSVERSE", "SpectralRoots", "asymptotic_roots",
    "characteristic_value", "longitudinal_roots", "transverse_roots",
    "IncompatibleModeError", "LongitudinalCoeffs", "LongitudinalState",
    "ModeState", "TransverseCoeffs", "TransverseState", "WaveVector",
    "decompose", "envelope_bounds", "longitudinal_coeffs",
    "propagate_longitudinal", "propagate_mode", "propagate_transverse",
    "random_compatible_mode", "transverse_coeffs",
    "DEFAULT_WEIGHTS", "LyapunovWeights", "ModeTrajectory", "integrate",
    "lyapunov_decay_check", "lyapunov_value", "rhs", "weight_search",
]

__version__ = "0.1.0"
