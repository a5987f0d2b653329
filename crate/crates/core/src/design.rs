//! End-to-end pipeline: validate, build, solve, recover, clamp, certify.

use thiserror::Error;

use crate::formulation::{build_lp, recover_waveform, FormulationError};
use crate::model::{validate_spec, DesignResult, HarmonicSpec, LevelSet, ModelError, SolveStats};
use crate::refine::{certify, clamp, CertifyError};
use crate::simplex::{solve_with, IterationLog, LpStatus, SimplexError, SolverOptions};
use crate::spectrum::{full_spectrum, thd_from_spectrum, SpectrumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error("harmonic targets are infeasible for this level set")]
    Infeasible,
    #[error("assignment LP reported unbounded")]
    Unbounded,
    #[error(transparent)]
    Solver(#[from] SimplexError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

pub fn design(spec: &HarmonicSpec, levels: &LevelSet) -> Result<DesignResult, DesignError> {
    design_with(spec, levels, &SolverOptions::default(), None)
}

pub fn design_with(
    spec: &HarmonicSpec,
    levels: &LevelSet,
    options: &SolverOptions,
    observer: Option<&mut dyn FnMut(&IterationLog)>,
) -> Result<DesignResult, DesignError> {
    validate_spec(spec, levels)?;
    let pwm = build_lp(spec, levels)?;
    let sol = solve_with(&pwm.lp, options, observer)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(DesignError::Infeasible),
        LpStatus::Unbounded => return Err(DesignError::Unbounded),
    }
    let (relaxed, assignment) = recover_waveform(&pwm, &sol)?;
    let clamped = clamp(relaxed.samples(), levels);
    let spectrum = full_spectrum(clamped.samples());
    let thd = thd_from_spectrum(&spectrum, &spec.harmonic_indices())?;
    let certificates = certify(spec, levels, &relaxed, &assignment, &clamped, sol.objective)?;
    Ok(DesignResult {
        waveform_relaxed: relaxed,
        waveform: clamped,
        assignment,
        spectrum,
        thd,
        lp_objective: sol.objective,
        certificates,
        stats: SolveStats {
            iterations: sol.iterations,
            phase_one_iterations: sol.phase_one_iterations,
            refactorizations: sol.refactorizations,
            bland_pivots: sol.bland_pivots,
            working_rank: sol.working_rank,
        },
    })
}
