//! Builds the assignment LP
//!
//! ```text
//! min  (1/N) 1^T Z S_p^T
//! s.t. f_k^T (Z S) = h_k   for k in K   (real and imaginary rows)
//!      Z 1 = 1,  Z >= 0
//! ```
//!
//! over `vec(Z)` in column-major order: variable `(i, l)` sits at index
//! `l * n_free + i`. Harmonic rows come first, one real and one imaginary row
//! per prescribed harmonic plus an optional zero-mean row, followed by one
//! stochasticity row per free sample.

use std::sync::Arc;

use thiserror::Error;

use crate::model::{AssignmentMatrix, HarmonicSpec, LevelSet, ModelError, Waveform};
use crate::simplex::{ConstraintColumns, LpSolution, LpStatus, SimplexError, StandardLp};
use crate::spectrum::fourier_row;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulationError {
    #[error("half-wave anti-symmetry needs a level set closed under negation; -{0} is missing")]
    AsymmetricLevelsUnderHalfWave(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SimplexError),
    #[error("cannot recover a waveform from a {0:?} solution")]
    NotOptimal(LpStatus),
    #[error("solution has {got} entries, expected {expected}")]
    SolutionShape { got: usize, expected: usize },
}

/// Meaning of an LP row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    HarmonicRe(usize),
    HarmonicIm(usize),
    ZeroMean,
    Stochastic(usize),
}

/// Column generator for the assignment LP. Column `(i, l)` is `L_l` times
/// column `i` of the harmonic matrix, plus a unit entry in stochasticity
/// row `i`.
#[derive(Debug, Clone)]
pub struct PwmColumns {
    n_free: usize,
    levels: Vec<f64>,
    harmonic_rows: usize,
    /// `harmonic_rows x n_free`, row-major.
    coeffs: Vec<f64>,
}

impl PwmColumns {
    fn coeff(&self, h: usize, i: usize) -> f64 {
        self.coeffs[h * self.n_free + i]
    }
}

impl ConstraintColumns for PwmColumns {
    fn n_rows(&self) -> usize {
        self.harmonic_rows + self.n_free
    }

    fn n_cols(&self) -> usize {
        self.n_free * self.levels.len()
    }

    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let (level, i) = (j / self.n_free, j % self.n_free);
        let l = self.levels[level];
        if l != 0.0 {
            for h in 0..self.harmonic_rows {
                let v = self.coeff(h, i) * l;
                if v != 0.0 {
                    out.push((h, v));
                }
            }
        }
        out.push((self.harmonic_rows + i, 1.0));
    }

    fn transpose_product(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n_free;
        let mut w = vec![0.0; n];
        for (h, &yh) in y[..self.harmonic_rows].iter().enumerate() {
            if yh != 0.0 {
                for (wi, c) in w.iter_mut().zip(&self.coeffs[h * n..(h + 1) * n]) {
                    *wi += yh * c;
                }
            }
        }
        let stoch = &y[self.harmonic_rows..];
        for (level, &l) in self.levels.iter().enumerate() {
            let block = &mut out[level * n..(level + 1) * n];
            for ((o, s), wi) in block.iter_mut().zip(stoch).zip(&w) {
                *o = s + l * wi;
            }
        }
    }
}

/// The assignment LP together with the bookkeeping needed to map a solution
/// back onto a waveform.
#[derive(Debug, Clone)]
pub struct PwmLp {
    pub lp: StandardLp,
    columns: Arc<PwmColumns>,
    levels: LevelSet,
    n_samples: usize,
    half_wave: bool,
    row_map: Vec<RowKind>,
}

impl PwmLp {
    pub fn n_vars(&self) -> usize {
        self.lp.n_cols()
    }

    pub fn n_rows(&self) -> usize {
        self.lp.n_rows()
    }

    pub fn harmonic_rows(&self) -> usize {
        self.columns.harmonic_rows
    }

    /// Samples carried by LP variables (`N`, or `N/2` under half-wave).
    pub fn free_samples(&self) -> usize {
        self.columns.n_free
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn half_wave(&self) -> bool {
        self.half_wave
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    pub fn row_map(&self) -> &[RowKind] {
        &self.row_map
    }

    pub fn columns(&self) -> &PwmColumns {
        &self.columns
    }

    /// Index of variable `(sample, level)` in `vec(Z)`.
    pub fn var_index(&self, sample: usize, level: usize) -> usize {
        level * self.columns.n_free + sample
    }

    /// Packs a free-sample assignment (row-major `n_free x m`) into `vec(Z)`.
    pub fn pack(&self, z: &AssignmentMatrix) -> Vec<f64> {
        let mut v = vec![0.0; self.n_vars()];
        for i in 0..self.columns.n_free {
            for l in 0..self.levels.len() {
                v[self.var_index(i, l)] = z.get(i, l);
            }
        }
        v
    }
}

/// Row-major harmonic coefficients, their row meanings and right-hand sides.
type HarmonicBlock = (Vec<f64>, Vec<RowKind>, Vec<f64>);

fn harmonic_coefficients(spec: &HarmonicSpec, n_free: usize, scale: f64) -> Result<HarmonicBlock, FormulationError> {
    let n = spec.n_samples();
    let rows = fourier_rows(spec)?;
    let mut coeffs = Vec::with_capacity(spec.harmonic_row_count() * n_free);
    let mut kinds = Vec::new();
    let mut rhs = Vec::new();
    for (row, t) in rows.iter().zip(spec.targets()) {
        coeffs.extend(row.re[..n_free].iter().map(|v| v * scale));
        kinds.push(RowKind::HarmonicRe(t.k));
        rhs.push(t.re);
    }
    for (row, t) in rows.iter().zip(spec.targets()) {
        coeffs.extend(row.im[..n_free].iter().map(|v| v * scale));
        kinds.push(RowKind::HarmonicIm(t.k));
        rhs.push(t.im);
    }
    if spec.has_dc_row() {
        coeffs.extend(std::iter::repeat(2.0 / n as f64).take(n_free));
        kinds.push(RowKind::ZeroMean);
        rhs.push(0.0);
    }
    Ok((coeffs, kinds, rhs))
}

fn fourier_rows(spec: &HarmonicSpec) -> Result<Vec<crate::spectrum::FourierRow>, FormulationError> {
    spec.targets()
        .iter()
        .map(|t| {
            fourier_row(t.k, spec.n_samples()).map_err(|_| {
                FormulationError::Model(ModelError::HarmonicOutOfRange {
                    k: t.k,
                    half: spec.n_samples() / 2,
                })
            })
        })
        .collect()
}

fn assemble(
    spec: &HarmonicSpec,
    levels: &LevelSet,
    n_free: usize,
    harmonic_scale: f64,
    energy_scale: f64,
) -> Result<PwmLp, FormulationError> {
    let (coeffs, mut row_map, mut rhs) = harmonic_coefficients(spec, n_free, harmonic_scale)?;
    let harmonic_rows = row_map.len();
    row_map.extend((0..n_free).map(RowKind::Stochastic));
    rhs.extend(std::iter::repeat(1.0).take(n_free));
    let columns = Arc::new(PwmColumns {
        n_free,
        levels: levels.value_vector(),
        harmonic_rows,
        coeffs,
    });
    let sp = levels.power_vector();
    let cost: Vec<f64> = sp
        .iter()
        .flat_map(|p| std::iter::repeat(p * energy_scale).take(n_free))
        .collect();
    let lp = StandardLp::new(cost, columns.clone(), rhs)?;
    Ok(PwmLp {
        lp,
        columns,
        levels: levels.clone(),
        n_samples: spec.n_samples(),
        half_wave: spec.half_wave(),
        row_map,
    })
}

/// Builds the LP for `spec`, dispatching to [`apply_half_wave`] when the
/// spec asks for half-wave anti-symmetry.
pub fn build_lp(spec: &HarmonicSpec, levels: &LevelSet) -> Result<PwmLp, FormulationError> {
    if spec.half_wave() {
        return apply_half_wave(spec, levels);
    }
    let n = spec.n_samples();
    assemble(spec, levels, n, 1.0, 1.0 / n as f64)
}

/// LP over the first half of the period with `x(i + N/2) = -x(i)`. For odd
/// `k` the second half repeats the first half's contribution, so harmonic
/// rows are doubled; even harmonics vanish identically. The mean is zero by
/// construction, so no DC row is emitted.
pub fn apply_half_wave(spec: &HarmonicSpec, levels: &LevelSet) -> Result<PwmLp, FormulationError> {
    if let Some(t) = spec.targets().iter().find(|t| t.k % 2 == 0) {
        return Err(ModelError::EvenHarmonicUnderHalfWave(t.k).into());
    }
    if let Some(l) = (0..levels.len()).find(|&l| levels.mirror_index(l).is_none()) {
        return Err(FormulationError::AsymmetricLevelsUnderHalfWave(levels.values()[l]));
    }
    let n = spec.n_samples();
    if n % 2 != 0 {
        return Err(ModelError::OddSamplesUnderHalfWave(n).into());
    }
    let spec = HarmonicSpec::new(n, spec.targets().to_vec(), true, spec.zero_dc())?;
    assemble(&spec, levels, n / 2, 2.0, 2.0 / n as f64)
}

/// Maps an optimal LP solution to `(x*, Z*)` over the full period.
///
/// Rows of `Z*` are projected onto the probability simplex (negative
/// round-off clipped, rows renormalised) so that the returned matrix is
/// stochastic to machine precision.
pub fn recover_waveform(pwm: &PwmLp, sol: &LpSolution) -> Result<(Waveform, AssignmentMatrix), FormulationError> {
    if sol.status != LpStatus::Optimal {
        return Err(FormulationError::NotOptimal(sol.status));
    }
    if sol.z.len() != pwm.n_vars() {
        return Err(FormulationError::SolutionShape {
            got: sol.z.len(),
            expected: pwm.n_vars(),
        });
    }
    let m = pwm.levels.len();
    let n_free = pwm.columns.n_free;
    let n = pwm.n_samples;
    let mut entries = vec![0.0; n * m];
    for i in 0..n_free {
        let row: Vec<f64> = (0..m).map(|l| sol.z[pwm.var_index(i, l)].max(0.0)).collect();
        let sum: f64 = row.iter().sum();
        for (l, v) in row.iter().enumerate() {
            entries[i * m + l] = v / sum;
        }
        if pwm.half_wave {
            for l in 0..m {
                let mirror = pwm.levels.mirror_index(l).expect("symmetric levels");
                entries[(i + n_free) * m + mirror] = entries[i * m + l];
            }
        }
    }
    let z = AssignmentMatrix::new(entries, n, m)?;
    let x = z.waveform_samples(&pwm.levels);
    Ok((Waveform::relaxed(x, &pwm.levels), z))
}
