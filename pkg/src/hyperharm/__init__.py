"""hyperharm: harmonic analysis and pseudo-differential operators on
rank-one hyperbolic spaces, with the even-multiplicity reduction to
Euclidean operators and a verification CLI."""

from .geometry import (HoroPoint, SpaceParams, StripSpec, make_space, make_strip,
                       polar_density)
from .cfunction import CFunction, c_function
from .spherical import phi_table
from .transforms import (RadialFunction, SpectralFunction, SphericalAnalysis,
                         abel_transform_horocyclic, abel_transform_sinh,
                         function_family, kappa_inv, paley_wiener_factory)
from .euclid import (EuclidSymbol, UniformGrid, apply_multiplier, apply_pdo,
                     multiplier_symbol, symmetric_grid, validate_symbol)
from .psdo import (SpaceSymbol, apply_radial_psdo, global_kernel_profile,
                   multiplier_space_symbol, norm_lab, separate_kernel,
                   transference_check)
from .weylred import (ComplexSymbol, WeylData, apply_psdo_complex, cv_symbol_check,
                      kappa_w, phi_lambda_complex, reduce, weyl_a2, weyl_phi,
                      weyl_rank1)

__version__ = "0.1.0"
