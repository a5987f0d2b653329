//! Exhaustive reference solvers for small instances.
//!
//! Nothing here shares code with the simplex solver or the spectral module:
//! Fourier sums are evaluated directly and basis systems are solved with
//! nalgebra.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::model::{HarmonicSpec, LevelSet};
use crate::simplex::StandardLp;

pub const MAX_VERTEX_VARS: usize = 14;
pub const MAX_VERTEX_ROWS: usize = 7;
const MAX_GRID_POINTS: f64 = 5e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{states} candidate waveforms exceed the budget of {cap}")]
    BudgetExceeded { states: f64, cap: u64 },
    #[error("no waveform meets the harmonic targets")]
    NoFeasiblePoint,
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
    #[error("LP has no feasible vertex")]
    Infeasible,
    #[error("half-wave enumeration needs a symmetric level set")]
    AsymmetricLevels,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_enumeration: u64,
    /// Allowed `|f_k^T x - h_k|` per real/imaginary component.
    pub residual_tol: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_enumeration: 2_000_000,
            residual_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceDesign {
    pub samples: Vec<f64>,
    pub energy: f64,
    pub feasible_count: u64,
}

fn direct_harmonic(x: &[f64], k: usize) -> (f64, f64) {
    let n = x.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let phase = 2.0 * std::f64::consts::PI * (k * i) as f64 / n;
        re += v * phase.cos();
        im -= v * phase.sin();
    }
    (2.0 * re / n, 2.0 * im / n)
}

/// Largest component-wise harmonic (and DC, when constrained) mismatch.
pub fn harmonic_mismatch(x: &[f64], spec: &HarmonicSpec) -> f64 {
    let mut worst = 0.0f64;
    for t in spec.targets() {
        let (re, im) = direct_harmonic(x, t.k);
        worst = worst.max((re - t.re).abs()).max((im - t.im).abs());
    }
    if spec.zero_dc() {
        let dc = 2.0 * x.iter().sum::<f64>() / x.len() as f64;
        worst = worst.max(dc.abs());
    }
    worst
}

/// Minimum-energy waveform over every assignment in `levels^N` meeting the
/// targets within `budget.residual_tol`. Candidates are visited in
/// lexicographic order of level indices and the first minimiser is kept.
/// Under half-wave symmetry only the first half is enumerated.
pub fn brute_force_design(
    spec: &HarmonicSpec,
    levels: &LevelSet,
    budget: &OracleBudget,
) -> Result<BruteForceDesign, OracleError> {
    let n = spec.n_samples();
    let m = levels.len();
    let free = if spec.half_wave() { n / 2 } else { n };
    if spec.half_wave() && !levels.is_symmetric() {
        return Err(OracleError::AsymmetricLevels);
    }
    let states = (m as f64).powi(free as i32);
    if states > budget.max_enumeration as f64 {
        return Err(OracleError::BudgetExceeded {
            states,
            cap: budget.max_enumeration,
        });
    }
    let values = levels.values();
    let mut idx = vec![0usize; free];
    let mut x = vec![0.0; n];
    let mut best: Option<BruteForceDesign> = None;
    let mut feasible_count = 0;
    loop {
        for (i, &l) in idx.iter().enumerate() {
            x[i] = values[l];
            if spec.half_wave() {
                x[i + free] = -values[l];
            }
        }
        if harmonic_mismatch(&x, spec) <= budget.residual_tol {
            feasible_count += 1;
            let e = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
            if best.as_ref().map_or(true, |b| e < b.energy - 1e-12) {
                best = Some(BruteForceDesign {
                    samples: x.clone(),
                    energy: e,
                    feasible_count: 0,
                });
            }
        }
        // Odometer with the first sample most significant.
        let mut pos = free;
        loop {
            if pos == 0 {
                return best
                    .map(|b| BruteForceDesign { feasible_count, ..b })
                    .ok_or(OracleError::NoFeasiblePoint);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexOptimum {
    pub objective: f64,
    pub z: Vec<f64>,
    pub vertices: usize,
}

fn dense_rows(lp: &StandardLp) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(lp.n_rows(), lp.n_cols());
    let mut col = Vec::new();
    for j in 0..lp.n_cols() {
        lp.matrix().column(j, &mut col);
        for &(i, v) in &col {
            a[(i, j)] = v;
        }
    }
    a
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimises the LP by visiting every basic feasible solution. Redundant
/// rows are dropped first, and feasibility of a vertex is checked against
/// all original rows.
pub fn enumerate_vertices(lp: &StandardLp) -> Result<VertexOptimum, OracleError> {
    let (rows, cols) = (lp.n_rows(), lp.n_cols());
    if cols > MAX_VERTEX_VARS || rows > MAX_VERTEX_ROWS {
        return Err(OracleError::TooLarge(format!(
            "{rows}x{cols} exceeds {MAX_VERTEX_ROWS}x{MAX_VERTEX_VARS}"
        )));
    }
    let a = dense_rows(lp);
    let b = DVector::from_column_slice(lp.rhs());
    let scale = a.amax().max(1.0);

    // Greedy selection of linearly independent rows.
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..rows {
        let mut trial = kept.clone();
        trial.push(i);
        let sub = a.select_rows(trial.iter());
        if sub.rank(1e-10 * scale) == trial.len() {
            kept = trial;
        }
    }
    let rank = kept.len();
    let ar = a.select_rows(kept.iter());
    let br = DVector::from_iterator(rank, kept.iter().map(|&i| b[i]));
    let tol = 1e-9 * (1.0 + b.amax());

    let mut best: Option<VertexOptimum> = None;
    let mut vertices = 0;
    let mut choice: Vec<usize> = (0..rank).collect();
    loop {
        let basis = ar.select_columns(choice.iter());
        if let Some(xb) = basis.clone().lu().solve(&br) {
            let residual = (&basis * &xb - &br).amax();
            if residual <= tol && xb.iter().all(|&v| v >= -tol) {
                let mut z = vec![0.0; cols];
                for (&j, &v) in choice.iter().zip(xb.iter()) {
                    z[j] = v.max(0.0);
                }
                let full = (&a * DVector::from_column_slice(&z) - &b).amax();
                if full <= 1e-7 * (1.0 + b.amax()) {
                    vertices += 1;
                    let objective: f64 = z.iter().zip(lp.cost()).map(|(v, c)| v * c).sum();
                    if best.as_ref().map_or(true, |v| objective < v.objective) {
                        best = Some(VertexOptimum { objective, z, vertices: 0 });
                    }
                }
            }
        }
        if rank == 0 || !next_combination(&mut choice, cols) {
            break;
        }
    }
    best.map(|b| VertexOptimum { vertices, ..b }).ok_or(OracleError::Infeasible)
}

/// `max lambda^T S_p - (lambda^T S)^2` over a lattice on the simplex with
/// spacing `step`.
pub fn grid_delta(levels: &[f64], step: f64) -> Result<f64, OracleError> {
    let m = levels.len();
    let parts = (1.0 / step).round() as usize;
    // Number of lattice points, C(parts + m - 1, m - 1).
    let mut count = 1.0f64;
    for i in 1..m {
        count *= (parts + i) as f64 / i as f64;
    }
    if count > MAX_GRID_POINTS {
        return Err(OracleError::TooLarge(format!("{count:.3e} grid points")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; m];
    grid_walk(levels, parts, 0, parts, &mut counts, &mut best);
    Ok(best)
}

fn grid_walk(levels: &[f64], parts: usize, pos: usize, left: usize, counts: &mut [usize], best: &mut f64) {
    if pos + 1 == levels.len() {
        counts[pos] = left;
        let (mut mean, mut power) = (0.0, 0.0);
        for (&c, &l) in counts.iter().zip(levels) {
            let p = c as f64 / parts as f64;
            mean += p * l;
            power += p * l * l;
        }
        *best = best.max(power - mean * mean);
        return;
    }
    for c in 0..=left {
        counts[pos] = c;
        grid_walk(levels, parts, pos + 1, left - c, counts, best);
    }
}
