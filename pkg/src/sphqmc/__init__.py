"""Point configurations on the sphere and their equal-weight integration quality."""

from .core import (Cap, ConsistencyError, PointSet, PointSetFormatError,
                   avg_distance_power, cap_area_constant, cap_measure,
                   inverse_cap_measure, read_pointset, rising_factorial,
                   surface_area, write_pointset)
from .experiments import (CONJECTURED_S_STAR, ExpectationReport, FitReport,
                          StratifiedReport, decay_fit, franke_study,
                          random_baseline, saturation_table,
                          standard_families, stratified_baseline, wce_table)
from .generators import (Partition, Region, equal_area_partition, polytope,
                         randomized_equal_area, random_uniform, region_centers,
                         spiral)
from .harmonics import (LegendreEvaluator, design_point_lower_bound,
                        design_strength, harmonic_defect,
                        harmonic_defect_profile, harmonic_space_dim, legendre)
from .kernels import (Canonical, CuiFreeden, GeneralizedDistance, KernelSpec,
                      Truncated, centered_at_one, distance_kernel_coeff,
                      kernel_coeffs, kernel_eval, sign_correction_poly,
                      tail_eval, truncated_centered_eval)
from .optimize import (Coulomb, DistanceSum, KernelEnergy, LogEnergy,
                       OptOptions, OptResult, energy_and_gradient, optimize,
                       wce_objective)
from .quality import (FRANKE_MEAN, HarmonicWceReport, SobolevSpace, WceReport,
                      cap_l2_discrepancy, cap_l2_discrepancy_direct,
                      cap_linf_discrepancy_estimate, franke, property_r_check,
                      qmc_integrate, wce_harmonic, worst_case_error)

__version__ = "0.1.0"
