"""Random point configurations on S^2 and S^3, Hopf lifting and exact logarithmic energies."""
from .diamond import DiamondSpec, build_diamond, diamond_expected_energy_s2, rotate_south_pole_to_minus_x
from .dpp import (RadialProfile, build_projection_kernel, harmonic_profile, hkpv_sample,
                  spherical_profile)
from .errors import (CoincidentPoints, DomainError, HopfLiftError, KTooSmall, NonConvergence,
                     NumericalError, OddM, OddN, RejectionStall, SingularBase, SingularPair,
                     ValidationError)
from .geometry import Configuration, cp1_abs_inner, fiber_point, hopf_map, s2_to_cp1, cp1_to_s2
from .harness import ExperimentConfig, ResultRow, mc_estimate, sweep_diamond_alpha
from .lift import fiber_energy, hopf_lift, log_energy
from .sampling import SeededStream, antipodal_augment, sample_uniform_s2, sample_uniform_s3

__version__ = "0.1.0"
