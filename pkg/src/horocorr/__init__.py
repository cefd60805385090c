"""Hypersurfaces in hyperbolic space from conformal metrics on sphere domains."""
from __future__ import annotations

__version__ = "0.1.0"

from .catalog import (get_entry, list_entries, make_constant, make_cylindric,
                      make_flat_punctured, make_horosphere_reference,
                      make_selfintersecting_fixture)
from .conformal import (ConformalMetric, GradientBoundConstants, PTensorSample,
                        RealizabilityReport, beta, boundary_divergence_scan,
                        completeness_probe, gradient_bound_constants,
                        ode_comparison_solution, p_eigenvalues_rescaled, p_tensor,
                        realizability_scan)
from .correspondence import (ConvexityVerdict, CurvatureReport, HypersurfaceMesh,
                             convexity_check, gauss_injectivity_probe,
                             horospherical_metric_samples, hypersurface_to_metric,
                             kappa_from_lambda, lambda_from_kappa, metric_to_hypersurface,
                             min_flow_time)
from .curvature import fd_principal_curvatures, principal_curvatures_fd
from .domains import DomainSpec, ParameterGrid, build_grid
from .errors import (DegenerateImmersionWarning, DimensionError, DomainError,
                     MathDomainError, ModelError)
from .flow import (FlowResult, find_embedding_time, flow_invariance_check, normal_flow,
                   riccati_curvature)
from .intersect import EmbeddingVerdict, embeddedness_check
from .lorentz import (Model, classify, from_poincare_ball, hyperbolic_distance, mink_inner,
                      to_poincare_ball)
from .sphere import ScalarFieldOnSphere, constant_field, linear_field, stereographic_chart
