"""coneiso: isoperimetric deficits, asymmetry indices, and optimal-transport
diagnostics for convex bodies inside convex cones."""

__version__ = "0.1.0"

from .cones import (BodyError, ConeError, ConvexCone, SectorBody,
                    boundary_height_constant, circular_cone,
                    cone_projection_split, full_space, gauge_bounds,
                    halfplane, minkowski_gauge, optimal_recentring, orthant,
                    plane_cone, quadrant, reduced_wedge, sector_body,
                    support_bracket, support_value, unit_ball_body,
                    wedge2d, wedge_parameters)
from .deficits import (DeficitError, DeficitReport, anisotropic_deficit,
                       anisotropic_perimeter, asymmetry_index,
                       constrained_asymmetry, deficit_report, relative_deficit,
                       stability_ratio)
from .families import (ExponentFit, FamilyResult, constant_estimator,
                       ellipsoid_family, exponent_fit,
                       shift_difference_lower_bound,
                       shift_difference_ratio_scan, theta_cone_family,
                       wedge_identity_check)
from .regions import (Region, RegionError, SurfaceSample, boolean_region,
                      affine_image_region, ellipsoid_sector_region,
                      half_ball_region, polytope_region, relative_perimeter,
                      sample_boundary, sample_interior, sector_region,
                      symmetric_difference_volume, unit_square_region, volume)
from .transport import (AffineMap, GromovChainReport, RadialMap, TransportError,
                        TransportPlan, am_gm_gap, estimate_alpha,
                        gromov_chain_report, solve_transport, trace_integral)
