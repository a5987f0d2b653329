//! Clamping of the relaxed waveform and certification of the resulting
//! design against the analytic residual, energy-gap and integrality bounds.

use serde::Serialize;
use thiserror::Error;

use crate::model::{AssignmentMatrix, BoundCertificate, EnergyChain, HarmonicSpec, LevelSet, Waveform};
use crate::spectrum::{energy, harmonic};

/// A row of `Z*` counts as integral when one entry reaches this value.
pub const INTEGRAL_ROW_THRESHOLD: f64 = 1.0 - 1e-6;
/// Slack allowed on every certified bound.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("{bound} violated: measured {measured:e} exceeds bound {limit:e}")]
    BoundViolated {
        bound: &'static str,
        measured: f64,
        limit: f64,
        certificate: Box<BoundCertificate>,
    },
    #[error("waveform lengths disagree: spec N = {expected}, got {got}")]
    Length { expected: usize, got: usize },
}

/// Level-gap constants of a level set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClampProfile {
    /// `[(L2-L1), (L2-L1), (L3-L2), ..., (Lm-Lm-1)]`; the first gap appears twice.
    pub d_vec: Vec<f64>,
    /// Same layout with `|L_{l+1}^2 - L_l^2|`.
    pub dp_vec: Vec<f64>,
    pub d_inf: f64,
    pub dp_inf: f64,
    pub delta: f64,
}

impl ClampProfile {
    pub fn new(levels: &LevelSet) -> Self {
        let l = levels.values();
        let gaps: Vec<f64> = l.windows(2).map(|w| w[1] - w[0]).collect();
        let pgaps: Vec<f64> = l.windows(2).map(|w| (w[1] * w[1] - w[0] * w[0]).abs()).collect();
        let d_vec: Vec<f64> = std::iter::once(gaps[0]).chain(gaps.iter().copied()).collect();
        let dp_vec: Vec<f64> = std::iter::once(pgaps[0]).chain(pgaps.iter().copied()).collect();
        let d_inf = d_vec.iter().fold(0.0f64, |m, v| m.max(*v));
        let dp_inf = dp_vec.iter().fold(0.0f64, |m, v| m.max(*v));
        Self {
            d_vec,
            dp_vec,
            d_inf,
            dp_inf,
            delta: delta_constant(levels),
        }
    }
}

/// Nearest level to `v`; exact midpoints go to the lower level.
pub fn nearest_level(v: f64, levels: &LevelSet) -> f64 {
    let l = levels.values();
    let upper = l.partition_point(|&x| x < v);
    if upper == 0 {
        return l[0];
    }
    if upper == l.len() {
        return l[l.len() - 1];
    }
    let (lo, hi) = (l[upper - 1], l[upper]);
    if v - lo <= hi - v {
        lo
    } else {
        hi
    }
}

pub fn clamp(x: &[f64], levels: &LevelSet) -> Waveform {
    let samples = x.iter().map(|&v| nearest_level(v, levels)).collect();
    Waveform::quantized(samples, levels).expect("nearest levels are members")
}

/// Maximum variance of a distribution supported on `values`, attained by
/// splitting mass equally between the two extremes.
pub fn max_variance(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if values.is_empty() {
        return 0.0;
    }
    let half = (hi - lo) / 2.0;
    half * half
}

/// `delta = max_{lambda in simplex} lambda^T S_p - (lambda^T S)^2`.
pub fn delta_constant(levels: &LevelSet) -> f64 {
    max_variance(levels.values())
}

/// `c^T vec(Z*) - energy(x*)`: the summed per-row variance of the relaxed
/// assignment, divided by `N`.
pub fn jensen_gap(assignment: &AssignmentMatrix, relaxed: &[f64], levels: &LevelSet) -> f64 {
    assignment.energy_surrogate(levels) - energy(relaxed)
}

/// Measures a clamped design and checks it against the analytic bounds.
///
/// Every bound uses the number of samples a vertex can leave fractional:
/// the count of harmonic and DC equality rows, doubled under half-wave
/// symmetry because each free sample appears twice in the full period.
pub fn certify(
    spec: &HarmonicSpec,
    levels: &LevelSet,
    relaxed: &Waveform,
    assignment: &AssignmentMatrix,
    clamped: &Waveform,
    lp_objective: f64,
) -> Result<BoundCertificate, CertifyError> {
    let n = spec.n_samples();
    for w in [relaxed.len(), clamped.len(), assignment.rows()] {
        if w != n {
            return Err(CertifyError::Length { expected: n, got: w });
        }
    }
    let profile = ClampProfile::new(levels);
    let xc = clamped.samples();

    let mut residual_inf = 0.0f64;
    for t in spec.targets() {
        let h = harmonic(xc, t.k).expect("validated harmonic index");
        residual_inf = residual_inf.max((h.re - t.re).abs()).max((h.im - t.im).abs());
    }
    if spec.has_dc_row() {
        let dc = 2.0 / n as f64 * xc.iter().sum::<f64>();
        residual_inf = residual_inf.max(dc.abs());
    }

    let capacity = spec.fractional_row_capacity();
    let ratio = capacity as f64 / n as f64;
    let relaxed_energy = energy(relaxed.samples());
    let clamped_energy = energy(xc);

    let cert = BoundCertificate {
        residual_inf,
        residual_bound: profile.d_inf * ratio,
        energy_gap: (clamped_energy - relaxed_energy).abs(),
        energy_gap_bound: profile.dp_inf * ratio + ratio * profile.delta,
        clamp_cost_gap: (clamped_energy - lp_objective).abs(),
        clamp_cost_bound: profile.dp_inf * ratio,
        jensen_gap: jensen_gap(assignment, relaxed.samples(), levels),
        jensen_bound: ratio * profile.delta,
        delta: profile.delta,
        integral_rows: assignment.integral_rows(INTEGRAL_ROW_THRESHOLD),
        integral_rows_floor: n.saturating_sub(capacity),
        harmonic_rows: spec.harmonic_row_count(),
        fractional_capacity: capacity,
        chain: EnergyChain {
            relaxed_energy,
            lp_objective,
            clamped_energy,
        },
    };

    let violation = |bound, measured: f64, limit: f64, cert: &BoundCertificate| CertifyError::BoundViolated {
        bound,
        measured,
        limit,
        certificate: Box::new(cert.clone()),
    };
    if !cert.residual_ok(BOUND_SLACK) {
        return Err(violation("residual bound", cert.residual_inf, cert.residual_bound, &cert));
    }
    if !cert.energy_gap_ok(BOUND_SLACK) {
        return Err(violation("energy-gap bound", cert.energy_gap, cert.energy_gap_bound, &cert));
    }
    if !cert.integral_rows_ok() {
        return Err(violation(
            "integral-row floor",
            cert.integral_rows as f64,
            cert.integral_rows_floor as f64,
            &cert,
        ));
    }
    Ok(cert)
}
