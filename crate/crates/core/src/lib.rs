//! Multilevel PWM waveform design by linear-programming relaxation.
//!
//! A waveform with `N` samples drawn from a finite level set is described by
//! a row-stochastic assignment matrix `Z`. Prescribing a set of Fourier
//! coefficients and minimising an energy surrogate gives an LP whose vertices
//! are integral in all but a handful of rows; clamping those rows to the
//! nearest level gives a valid waveform with certified residual and energy
//! bounds.

pub mod design;
pub mod formulation;
pub mod model;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod refine;
pub mod simplex;
pub mod spectrum;

pub use design::{design, design_with, DesignError};
pub use formulation::{apply_half_wave, build_lp, recover_waveform, FormulationError, PwmLp, RowKind};
pub use model::{
    validate_level_set, validate_spec, AssignmentMatrix, BoundCertificate, DesignResult, EnergyChain,
    HarmonicSpec, HarmonicTarget, LevelSet, ModelError, SolveStats, Waveform,
};
pub use refine::{certify, clamp, delta_constant, jensen_gap, CertifyError, ClampProfile};
pub use simplex::{solve, solve_with, LpSolution, LpStatus, SimplexError, SolverOptions, StandardLp};
pub use spectrum::{energy, full_spectrum, harmonic, thd, thd_from_spectrum, SpectrumError};
