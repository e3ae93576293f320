"""Finite-field cone restriction, Gauss sums and point-sphere incidences."""

from .characters import additive_char, gauss_closed_form, gauss_power, gauss_sum, quad_exp_sum, quadratic_char
from .cone import (ConeVariety, cone_enumerate, cone_ift_brute, cone_ift_closed, cone_ift_table, cone_size_closed,
                   gamma, sigma_ift)
from .constructions import (find_null_system, isotropic_dimension, max_isotropic_subspace, omega_subspace,
                            sharp_family)
from .field import BudgetExceeded, FieldSpec, Scalar, Subspace, enumerate_points, make_field, span
from .incidence import (WeightedFamily, cone_energy, goodsize_check, incidence_bound_check, incidence_identity_check,
                        incidence_weighted, lift, lift_points)
from .restriction import (dyadic_decompose, extension_ratio, gamma_testset, gamma_testset_ft_check, l2_char_estimate,
                          sweep_restriction)
from .spectral import GridFn, SurfaceMeasure, extension, fourier, inverse_fourier

__version__ = "0.1.0"
