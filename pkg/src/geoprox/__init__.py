"""Proximal and projection iterations in geodesic spaces.

Model spaces (Euclidean, hyperbolic half-plane, metric trees, spherical
caps), convex sets with exact projections, firmly nonexpansive mappings,
cyclic and alternating iteration schemes, explicit rates of asymptotic
regularity and tools to check all of them numerically.
"""
from .geometry import (DomainError, Euclidean, GeometryError, HalfPlane, MetricTree, Point,
                       SpaceMismatchError, SphericalCap, TreeSpec, UnsupportedSpaceError, distance,
                       geodesic_point)
from .convex_sets import (AffineSet, Ball, GeodesicLine, GeodesicSegment, HalfSpace, Subtree, project,
                          set_distance)
from .operators import (Composition, DistTo, HalfSqDistTo, Indicator, Projection, Resolvent, Scaled, Sum,
                        WithError, resolve)
from .iteration import (AlternatingProblem, CyclicProblem, Explicit, Geometric, PowerLaw, Zero,
                        run_alternating, run_cyclic)
from .certificates import (RateCertificate, theta2, theta_min, theta_r, theta_tilde2, theta_tilde_r,
                           validate_certificate)
from .analysis import MinProblem, asymptotic_center_estimate, classify_alternating, phi

__version__ = "0.1.0"
