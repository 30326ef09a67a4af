//! Numerical analysis of saddle-node unfoldings of one-dimensional vector
//! fields through the epsilon-neighborhoods of orbits of their time-one
//! maps.
//!
//! The crate computes orbit tail lengths, fits them in a compensator scale
//! whose coefficients reproduce the displacement function's Taylor data,
//! reads the bifurcation multiplicity from the vanishing leading
//! coefficients, and estimates box dimension and Minkowski-content proxies
//! across the bifurcation. See the `snb` binary for the command-line
//! surface.

pub mod compensators;
pub mod error;
pub mod expr;
pub mod fatou;
pub mod field;
pub mod fit;
pub mod format;
pub mod grid;
pub mod numerics;
pub mod orbit;
pub mod scaling;
pub mod validate;

pub use error::{Error, Result};
pub use expr::{parse, ExprError, FieldExpr, Var};
pub use fatou::{fatou_model, fatou_numeric, DisplacementJet, Fatou, FatouBranch};
pub use field::{AnalysisBox, Field, FixedPoint, GenericityReport, ModelParams};
pub use fit::{
    collect_samples, eta_of, eta_sample, eta_vs_eta_tilde, fit_scale, i_empirical,
    read_multiplicity, regime_fit, EtaRatioRow, EtaSample, FitResult, MultiplicityReport, Regime,
    RegimeFit, DEFAULT_TOL_REL,
};
pub use orbit::{
    continuous_critical_time, discrete_critical_index, generate_orbit, neighborhood_length,
    sawtooth_g, tail_lengths, tail_lengths_with_orbit, NeighborhoodMeasure, Orbit, StopReason,
};
pub use scaling::{content_blowup, dimension_report, scaling_exponent, ContentRow, ScalingReport};
pub use validate::{all_suites, compensator_suite, fatou_suite, orbit_suite, ValidationRow};
