//! Domain types shared by the formulation, solver and certification code.
//!
//! Everything here is immutable after construction. Structural checks (index
//! ranges, dimensions) happen in constructors; the modelling assumptions of
//! the design method (fundamental present, non-zero target, enough samples)
//! are checked separately by [`validate_spec`] so that small or degenerate
//! instances can still be built for testing.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Tolerance used whenever a real value is compared against 0 or 1.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Minimum ratio between the sample count and both `|K|` and `max(K)`.
pub const SAMPLES_PER_HARMONIC: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("level set needs at least 3 values, got {0}")]
    TooFewLevels(usize),
    #[error("levels must be strictly increasing (violated at position {0})")]
    NotStrictlyIncreasing(usize),
    #[error("level {0} is not a finite number")]
    NonFiniteLevel(usize),
    #[error("the fundamental (k = 1) is not among the prescribed harmonics")]
    MissingFundamental,
    #[error("all harmonic targets are zero")]
    ZeroTarget,
    #[error("N = {n_samples} is too small: need |K| = {count} and max(K) = {max_k} both <= N/{SAMPLES_PER_HARMONIC}")]
    RatioViolated {
        n_samples: usize,
        count: usize,
        max_k: usize,
    },
    #[error("harmonic {0} is even, but half-wave anti-symmetry forces even harmonics to zero")]
    EvenHarmonicUnderHalfWave(usize),
    #[error("half-wave anti-symmetry needs an even sample count, got {0}")]
    OddSamplesUnderHalfWave(usize),
    #[error("sample count must be at least 2, got {0}")]
    TooFewSamples(usize),
    #[error("harmonic index {k} is outside 1 <= k < N/2 = {half}")]
    HarmonicOutOfRange { k: usize, half: usize },
    #[error("harmonic {0} is prescribed twice")]
    DuplicateHarmonic(usize),
    #[error("target for harmonic {0} is not finite")]
    NonFiniteTarget(usize),
    #[error("no harmonics prescribed")]
    NoHarmonics,
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("row {row} is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },
    #[error("sample {0} is not a member of the level set")]
    OffLevel(usize),
}

/// Ordered admissible values `L_1 < ... < L_m`, `m >= 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    levels: Vec<f64>,
}

impl LevelSet {
    pub fn new(levels: Vec<f64>) -> Result<Self, ModelError> {
        if let Some(i) = levels.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteLevel(i));
        }
        if levels.len() < 3 {
            return Err(ModelError::TooFewLevels(levels.len()));
        }
        if let Some(i) = levels.windows(2).position(|w| w[0] >= w[1]) {
            return Err(ModelError::NotStrictlyIncreasing(i + 1));
        }
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.levels
    }

    /// `S = [L_1, ..., L_m]`.
    pub fn value_vector(&self) -> Vec<f64> {
        self.levels.clone()
    }

    /// `S_p = [L_1^2, ..., L_m^2]`.
    pub fn power_vector(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l * l).collect()
    }

    pub fn min(&self) -> f64 {
        self.levels[0]
    }

    pub fn max(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn contains(&self, value: f64) -> bool {
        self.levels.contains(&value)
    }

    /// Index of the level equal to `-L_index`, if the set has one.
    pub fn mirror_index(&self, index: usize) -> Option<usize> {
        let target = -self.levels[index];
        self.levels.iter().position(|&l| l == target)
    }

    /// True when the set is closed under negation.
    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| self.mirror_index(i).is_some())
    }
}

pub fn validate_level_set(levels: &[f64]) -> Result<LevelSet, ModelError> {
    LevelSet::new(levels.to_vec())
}

/// One prescribed harmonic `k` with its complex target `h^c_k + j h^s_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicTarget {
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

impl HarmonicTarget {
    pub fn new(k: usize, re: f64, im: f64) -> Self {
        Self { k, re, im }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Prescribed harmonic content of a design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSpec {
    n_samples: usize,
    targets: Vec<HarmonicTarget>,
    half_wave: bool,
    zero_dc: bool,
}

impl HarmonicSpec {
    /// Checks only structural sanity: distinct in-range indices, finite
    /// targets, and an even `N` under half-wave symmetry.
    pub fn new(
        n_samples: usize,
        targets: Vec<HarmonicTarget>,
        half_wave: bool,
        zero_dc: bool,
    ) -> Result<Self, ModelError> {
        if n_samples < 2 {
            return Err(ModelError::TooFewSamples(n_samples));
        }
        if targets.is_empty() {
            return Err(ModelError::NoHarmonics);
        }
        if half_wave && n_samples % 2 != 0 {
            return Err(ModelError::OddSamplesUnderHalfWave(n_samples));
        }
        let half = n_samples / 2;
        for (i, t) in targets.iter().enumerate() {
            if t.k < 1 || 2 * t.k >= n_samples {
                return Err(ModelError::HarmonicOutOfRange { k: t.k, half });
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(ModelError::NonFiniteTarget(t.k));
            }
            if targets[..i].iter().any(|o| o.k == t.k) {
                return Err(ModelError::DuplicateHarmonic(t.k));
            }
        }
        Ok(Self {
            n_samples,
            targets,
            half_wave,
            zero_dc,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn targets(&self) -> &[HarmonicTarget] {
        &self.targets
    }

    pub fn harmonic_indices(&self) -> Vec<usize> {
        self.targets.iter().map(|t| t.k).collect()
    }

    pub fn half_wave(&self) -> bool {
        self.half_wave
    }

    pub fn zero_dc(&self) -> bool {
        self.zero_dc
    }

    /// Number of prescribed harmonics `r`.
    pub fn count(&self) -> usize {
        self.targets.len()
    }

    /// Whether the LP carries an explicit zero-mean row. Under half-wave
    /// anti-symmetry the mean vanishes identically and the row is dropped.
    pub fn has_dc_row(&self) -> bool {
        self.zero_dc && !self.half_wave
    }

    /// Number of real equality rows encoding harmonic and DC constraints.
    pub fn harmonic_row_count(&self) -> usize {
        2 * self.count() + usize::from(self.has_dc_row())
    }

    /// Upper bound on the number of samples of the full-length waveform that
    /// a vertex solution may leave off the level set. Each free sample
    /// appears twice in the expanded waveform under half-wave symmetry.
    pub fn fractional_row_capacity(&self) -> usize {
        let rows = self.harmonic_row_count();
        if self.half_wave {
            2 * rows
        } else {
            rows
        }
    }

    pub fn with_n_samples(&self, n_samples: usize) -> Result<Self, ModelError> {
        Self::new(n_samples, self.targets.clone(), self.half_wave, self.zero_dc)
    }
}

/// Checks the modelling assumptions of the design method.
pub fn validate_spec(spec: &HarmonicSpec, levels: &LevelSet) -> Result<(), ModelError> {
    if !spec.targets.iter().any(|t| t.k == 1) {
        return Err(ModelError::MissingFundamental);
    }
    if spec.targets.iter().all(|t| t.re == 0.0 && t.im == 0.0) {
        return Err(ModelError::ZeroTarget);
    }
    let max_k = spec.targets.iter().map(|t| t.k).max().unwrap_or(0);
    let limit = spec.n_samples / SAMPLES_PER_HARMONIC;
    if spec.count() > limit || max_k > limit {
        return Err(ModelError::RatioViolated {
            n_samples: spec.n_samples,
            count: spec.count(),
            max_k,
        });
    }
    if spec.half_wave {
        if let Some(t) = spec.targets.iter().find(|t| t.k % 2 == 0) {
            return Err(ModelError::EvenHarmonicUnderHalfWave(t.k));
        }
    }
    // Level symmetry under half-wave is a formulation concern and is
    // reported by `apply_half_wave`.
    let _ = levels;
    Ok(())
}

/// Sampled waveform `x(0..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    levels: LevelSet,
    quantized: bool,
}

impl Waveform {
    /// A waveform whose samples may lie between levels.
    pub fn relaxed(samples: Vec<f64>, levels: &LevelSet) -> Self {
        Self {
            samples,
            levels: levels.clone(),
            quantized: false,
        }
    }

    /// A waveform whose every sample is exactly a level.
    pub fn quantized(samples: Vec<f64>, levels: &LevelSet) -> Result<Self, ModelError> {
        if let Some(i) = samples.iter().position(|&v| !levels.contains(v)) {
            return Err(ModelError::OffLevel(i));
        }
        Ok(Self {
            samples,
            levels: levels.clone(),
            quantized: true,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    pub fn is_quantized(&self) -> bool {
        self.quantized
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Row-stochastic `N x m` selector `Z`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    entries: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl AssignmentMatrix {
    pub fn new(entries: Vec<f64>, rows: usize, cols: usize) -> Result<Self, ModelError> {
        if entries.len() != rows * cols {
            return Err(ModelError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for (i, row) in entries.chunks(cols.max(1)).enumerate() {
            if let Some(v) = row.iter().find(|v| !(**v >= -FEASIBILITY_TOL)) {
                return Err(ModelError::NotStochastic {
                    row: i,
                    reason: format!("entry {v} is negative"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > FEASIBILITY_TOL {
                return Err(ModelError::NotStochastic {
                    row: i,
                    reason: format!("row sums to {sum}"),
                });
            }
        }
        Ok(Self { entries, rows, cols })
    }

    /// Binary matrix selecting `choice[i]` in row `i`.
    pub fn from_choices(choices: &[usize], cols: usize) -> Result<Self, ModelError> {
        let mut entries = vec![0.0; choices.len() * cols];
        for (i, &c) in choices.iter().enumerate() {
            if c >= cols {
                return Err(ModelError::Shape(format!("choice {c} in row {i} exceeds {cols} columns")));
            }
            entries[i * cols + c] = 1.0;
        }
        Ok(Self {
            entries,
            rows: choices.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, l: usize) -> f64 {
        self.entries[i * self.cols + l]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.cols)
    }

    /// `x = Z S`.
    pub fn waveform_samples(&self, levels: &LevelSet) -> Vec<f64> {
        self.iter_rows()
            .map(|row| row.iter().zip(levels.values()).map(|(z, l)| z * l).sum())
            .collect()
    }

    /// `(1/N) 1^T Z S_p^T`, the linear energy surrogate.
    pub fn energy_surrogate(&self, levels: &LevelSet) -> f64 {
        let sp = levels.power_vector();
        let total: f64 = self
            .iter_rows()
            .map(|row| row.iter().zip(&sp).map(|(z, p)| z * p).sum::<f64>())
            .sum();
        total / self.rows as f64
    }

    /// Rows with a single entry at or above `threshold`.
    pub fn integral_rows(&self, threshold: f64) -> usize {
        self.iter_rows()
            .filter(|row| row.iter().any(|&v| v >= threshold))
            .count()
    }
}

/// Measured quantities and the analytic bounds they must respect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    /// `max |a_j^T x_c - b_j|` over the harmonic and DC rows.
    pub residual_inf: f64,
    /// `||D||_inf * n_frac / N`.
    pub residual_bound: f64,
    /// `|energy(x_c) - energy(x*)|`.
    pub energy_gap: f64,
    /// `||D_p||_inf * n_frac / N + (n_frac / N) * delta`.
    pub energy_gap_bound: f64,
    /// `|c^T vec(Z_c) - c^T vec(Z*)|`, the clamping cost change.
    pub clamp_cost_gap: f64,
    /// `||D_p||_inf * n_frac / N`.
    pub clamp_cost_bound: f64,
    /// `c^T vec(Z*) - energy(x*)`.
    pub jensen_gap: f64,
    /// `(n_frac / N) * delta`.
    pub jensen_bound: f64,
    pub delta: f64,
    pub integral_rows: usize,
    pub integral_rows_floor: usize,
    /// Number of harmonic/DC equality rows.
    pub harmonic_rows: usize,
    /// Maximum number of non-integral rows the bounds are evaluated with.
    pub fractional_capacity: usize,
    pub chain: EnergyChain,
}

/// `energy(x*) <= c^T vec(Z*)` and the clamped energy it is compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyChain {
    pub relaxed_energy: f64,
    pub lp_objective: f64,
    pub clamped_energy: f64,
}

impl EnergyChain {
    pub fn jensen_holds(&self, tol: f64) -> bool {
        self.relaxed_energy <= self.lp_objective + tol
    }

    pub fn clamp_holds(&self, tol: f64) -> bool {
        self.lp_objective <= self.clamped_energy + tol
    }
}

impl BoundCertificate {
    pub fn residual_ok(&self, tol: f64) -> bool {
        self.residual_inf <= self.residual_bound + tol
    }

    pub fn energy_gap_ok(&self, tol: f64) -> bool {
        self.energy_gap <= self.energy_gap_bound + tol
    }

    pub fn integral_rows_ok(&self) -> bool {
        self.integral_rows >= self.integral_rows_floor
    }
}

/// Solver statistics carried into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub phase_one_iterations: usize,
    pub refactorizations: usize,
    pub bland_pivots: usize,
    pub working_rank: usize,
}

/// Output of the full design pipeline.
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub waveform_relaxed: Waveform,
    pub waveform: Waveform,
    pub assignment: AssignmentMatrix,
    /// `f_k^T x_c` for `k = 1..=N/2`; element `k - 1` is harmonic `k`.
    pub spectrum: Vec<Complex64>,
    pub thd: f64,
    pub lp_objective: f64,
    pub certificates: BoundCertificate,
    pub stats: SolveStats,
}
