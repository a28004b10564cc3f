//! Numerical laboratory for the normalized p(x)-Laplacian eigenproblem.
//!
//! The crate computes Luxemburg norms and the nonlocal Rayleigh quotient on
//! variable-exponent spaces, solves for first eigenpairs under Dirichlet and
//! free boundary conditions by projected descent, provides exact
//! constant-exponent 1D spectra through generalized trigonometric functions,
//! and verifies the norm-sandwich, homothety, join, and Weyl-type counting
//! inequalities at desk scale.

pub mod counting;
pub mod domain;
pub mod eigen;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod gridfn;
pub mod lambda_star;
pub mod modular;
pub mod ptrig;
pub mod quadrature;
pub mod rayleigh;
pub mod spectrum;

pub use counting::{
    cube_count_bounds, fit_growth_exponent, homothety_transport, join_normalized, mix_factor,
    mix_factor_monotonicity, mix_norm, theorem_bounds, CountingReport, CubeEstimate,
    HomothetyReport, JoinReport,
};
pub use domain::{cube_cover, Cube, CubeCover, Domain, Grid};
pub use lambda_star::{
    bump_family_explorer, decade_grid, modular_quotient, BumpExplorerReport, PlateauBump,
    QuotientSample,
};
pub use ptrig::{
    exact_spectrum_constant_p, pi_p, pi_p_closed_form, quotient_scale, shooting_eigenvalue, sin_p,
};
pub use eigen::{
    first_eigenpair, neumann_first_nontrivial, nodal_modes_1d, project_to_sphere, EigenpairResult,
    SolverOptions,
};
pub use error::{PxError, Result};
pub use exponent::{build_exponent_field, exponent_stats, ExponentField, ExponentSpec, ExponentStats};
pub use gridfn::{BoundaryCondition, GradientField, GridFunction};
pub use modular::{check_norm_sandwich, lp_norm, luxemburg_norm, modular, modular_unweighted, SandwichReport};
pub use rayleigh::{
    d_function_norm, d_gradient_norm, euler_lagrange_residual, euler_lagrange_residual_hats,
    rayleigh, RayleighState,
};
pub use spectrum::{counting_function, EigenvalueKind, Spectrum, SpectrumEntry};
