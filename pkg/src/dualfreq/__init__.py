"""Generalized principal frequencies of planar domains.

Grid-based primal solvers, explicit dual certificates, and geometric
bounds for the minimization of the Dirichlet energy against an L^q norm,
1 <= q <= 2, on masked rectangular lattices.
"""

from .geometry import (
    GridDomain,
    GeometricSummary,
    build_rectangle,
    build_disk,
    build_polygon,
    domain_from_spec,
    load_domain,
    save_domain,
    summarize,
    distance_field,
    moment,
    min_moment,
)
from .elliptic import (
    ScalarField,
    VectorField,
    apply_laplacian,
    solve_poisson,
    gradient,
    divergence,
    gradient_matrix,
    integrate,
    integrate_corrected,
    dirichlet_energy,
    gradient_energy,
    ConvergenceError,
)
from .convex import (
    primal_integrand,
    dual_integrand,
    conjugate_constant,
    conjugate_closed_form,
    conjugate_bruteforce,
    rescaled_conjugate_identity_check,
)
from .onedim import (
    sobolev_poincare_1d,
    interval_frequency,
    interval_profile,
)
from .primal import (
    FrequencySolution,
    solve_torsion,
    solve_eigen,
    solve_sublinear,
    solve_frequency,
    rayleigh,
    richardson,
    hidden_functional,
)
from .dual import (
    FEASIBILITY_TOL,
    DualPair,
    DualityReport,
    trusted_mask,
    feasibility_residual,
    build_pair_torsion,
    build_pair_sub,
    build_pair_eigen,
    build_pair_moment,
    build_pair,
    dual_objective,
    weak_duality_certificate,
    protter_hersch_lower_bound,
)
from .bounds import (
    InapplicableBound,
    BoundRow,
    BoundReport,
    ball_reference,
    faber_krahn_lower,
    hersch_makai_lower,
    hersch_makai_perimeter_lower,
    polya_upper,
    diaz_weinstein_lower,
    cheeger_constant_disk,
    cheeger_constant_rectangle,
    cheeger_estimate,
    cheeger_lower,
    transplant_lower,
    bound_report,
)

__version__ = "0.1.0"
