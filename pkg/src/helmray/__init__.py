"""helmray: coupled Hamiltonian ray tracing for monochromatic wave beams.

Rays carry an amplitude and are coupled through the dimensionless wave
potential reconstructed from the beam profile each step, which is the
one and only source of diffraction and interference in the model; with
the coupling switched off the engine reduces to geometrical optics.  An
independent angular-spectrum solver provides reference solutions.
"""

from .model import (BeamFront, Medium, RayState, ScenarioConfig, UnitSystem,
                    ensure_valid, units_from_physical, validate)
from .profiles import (CenteredGaussianSum, MirroredGaussianComb,
                       SampledProfile, build_launch_front, eval_profile,
                       profile_violations)
from .transport import (FrontGeometry, StencilOperator, adjacent_distances,
                        attach_coupling, estimate_dg_dx, estimate_g,
                        transport_amplitudes)
from .dynamics import Propagator, TrajectoryRecord, force, run, step
from .diagnostics import (ExtremaSet, UncertaintyReport, fringe_extrema,
                          intensity_profile, uncertainty_product,
                          waist_trajectory)
from .oracle import ComplexField, compare, grid_for_scenario, lift_profile, propagate
from .config import (PRESET_NAMES, emit_config, emit_config_text,
                     parse_config, parse_config_text, preset)
from .errors import (CausticError, FarFieldError, HelmrayError,
                     MomentumOverflowError, OverlapError, ValidationError)

__version__ = "0.1.0"

__all__ = [
    "BeamFront", "Medium", "RayState", "ScenarioConfig", "UnitSystem",
    "ensure_valid", "units_from_physical", "validate",
    "CenteredGaussianSum", "MirroredGaussianComb", "SampledProfile",
    "build_launch_front", "eval_profile", "profile_violations",
    "FrontGeometry", "StencilOperator", "adjacent_distances",
    "attach_coupling", "estimate_dg_dx", "estimate_g", "transport_amplitudes",
    "Propagator", "TrajectoryRecord", "force", "run", "step",
    "ExtremaSet", "UncertaintyReport", "fringe_extrema", "intensity_profile",
    "uncertainty_product", "waist_trajectory",
    "ComplexField", "compare", "grid_for_scenario", "lift_profile", "propagate",
    "PRESET_NAMES", "emit_config", "emit_config_text", "parse_config",
    "parse_config_text", "preset",
    "CausticError", "FarFieldError", "HelmrayError", "MomentumOverflowError",
    "OverlapError", "ValidationError",
    "__version__",
]
