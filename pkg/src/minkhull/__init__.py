"""Fuchsian convex polyhedral surfaces in Minkowski space R^{2,1}.

Build the boundary of the convex hull of a Fuchsian orbit, measure its
intrinsic metric and test the quantitative estimates that relate it to
the hyperbolic metric.
"""

from .bounds import (BoundReport, bilipschitz_check, chord_tangent_check, f_function_check,
                     fmax_integral_check, lower_bound_argument_check, projection_estimate_check,
                     translation_length_bound_check)
from .flat import FlatComplex, GeodesicPath, SurfaceGraph, face_euclidean_embed
from .fuchsian import (FuchsianGroup, NormalizationData, enumerate_orbit, genus2_octagon_group,
                       length_spectrum, normalize_representation, sl2_to_so21, translation_length)
from .hull import FacePlane, HConvexFn, HullComplex, alpha_beta, fuchsian_hull, radial_function, support_face_at
from .intrinsic import (CoverSurface, QuotientSurface, cone_angle, f_along_path, induced_distance,
                        length_functional, quotient_distance)
from .lorentz import (boost_chord_length, causal_class, hyp_dist, mink_inner, radial_project,
                      spacelike_norm)
from .metricspace import (ConeMetric, SampledMetric, az_flatten, cat0_spot_check, comparison_triangle,
                          convergence_experiment, induced_cone_metric, sup_metric, uniform_distance,
                          upper_angle_estimate)

__version__ = "0.1.0"
