"""Numerical geometry, rearrangement and convolution bounds on rank-one
symmetric spaces, with a batch verification front-end."""

from .geometry import (IwasawaPoint, SpaceParams, UnsupportedSpaceError,
                       ball_volume, cartan_radius, conjugate_by_a, distance,
                       iwasawa_weight, make_point, make_space, radial_density)
from .kernel import (KernelTable, RadialFunction, abel_l21_bound,
                     abel_transform, build_kernel_table, phi_sup_identity_check,
                     phi_weight, psi, psi_comparator, radial_indicator_l21,
                     radial_l2_norm, surface_mc)
from .rearrange import (DoubleProfile, StepProfile, WeightedSamples,
                        decreasing_rearrangement, double_rearrangement,
                        exp_embedding_check, general_radial_profile, l21_norm,
                        lorentz_norm, rectangle_domination_check,
                        row_l21_embedding_check, samples, weak_l2_norm)
from .convolution import (BiInvariantTriple, DiscreteModel, RearrangedData,
                          chain_step1_bound, chain_step2_bound,
                          chain_step3_bound, coordinate_bridge_constant,
                          endpoint_ratio_sweep, horospherical_ball_measure,
                          min_young_check, random_model, rearranged_data,
                          rearranged_data_profile, rearranged_norms,
                          split_optimize, theorem8_bound, trilinear_mc)
from .maximal import (BallSpec, FieldGrid, GridModel, ball_cells,
                      covering_select, indicator_field, m1_centered,
                      m2_noncentered, m2_tilde, m3_nilpotent,
                      pointwise_domination_check, radial_field,
                      weak_type_sweep)

__version__ = "0.1.0"
