//! Two-phase revised simplex for `min c^T z  s.t.  Q z = s, z >= 0`.
//!
//! The solver always terminates at a basic feasible solution. Columns of `Q`
//! are pulled on demand through [`ConstraintColumns`], so structured
//! constraint matrices never need to be stored densely.
//!
//! Pricing is Dantzig's rule, falling back to Bland's rule after a long run
//! of degenerate pivots. Phase one starts from a triangular crash basis
//! padded with artificial variables.

mod factor;
mod lu;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use factor::{BasisFactor, FactorError};

/// Reduced costs below `-OPTIMALITY_TOL` are attractive.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Smallest admissible pivot element in the ratio test.
pub const PIVOT_TOL: f64 = 1e-9;
/// Basic-solution drift that forces a refactorisation.
pub const DRIFT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("numerical breakdown after {iterations} iterations: {reason}")]
    NumericalBreakdown { iterations: usize, reason: String },
    #[error("iteration limit {limit} exceeded")]
    IterationLimit { limit: usize },
}

/// Column access to the constraint matrix `Q`.
pub trait ConstraintColumns: Send + Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;

    /// Replaces `out` with the nonzeros `(row, value)` of column `j`.
    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>);

    /// `out[j] = y^T q_j` for every column.
    fn transpose_product(&self, y: &[f64], out: &mut [f64]) {
        let mut col = Vec::new();
        for (j, o) in out.iter_mut().enumerate() {
            self.column(j, &mut col);
            *o = col.iter().map(|&(r, v)| y[r] * v).sum();
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, SimplexError> {
        if data.len() != rows * cols {
            return Err(SimplexError::InvalidProblem(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SimplexError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SimplexError::InvalidProblem("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

impl ConstraintColumns for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.rows
    }

    fn n_cols(&self) -> usize {
        self.cols
    }

    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        out.extend(
            (0..self.rows)
                .map(|i| (i, self.data[i * self.cols + j]))
                .filter(|&(_, v)| v != 0.0),
        );
    }
}

/// `min cost^T z  s.t.  matrix z = rhs, z >= 0`.
#[derive(Clone)]
pub struct StandardLp {
    cost: Vec<f64>,
    matrix: Arc<dyn ConstraintColumns>,
    rhs: Vec<f64>,
}

impl std::fmt::Debug for StandardLp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StandardLp")
            .field("rows", &self.rhs.len())
            .field("cols", &self.cost.len())
            .finish()
    }
}

impl StandardLp {
    pub fn new(
        cost: Vec<f64>,
        matrix: Arc<dyn ConstraintColumns>,
        rhs: Vec<f64>,
    ) -> Result<Self, SimplexError> {
        if matrix.n_cols() != cost.len() || matrix.n_rows() != rhs.len() {
            return Err(SimplexError::InvalidProblem(format!(
                "matrix is {}x{}, cost has {} entries, rhs has {}",
                matrix.n_rows(),
                matrix.n_cols(),
                cost.len(),
                rhs.len()
            )));
        }
        if rhs.len() > cost.len() {
            return Err(SimplexError::InvalidProblem(format!(
                "{} rows exceed {} variables",
                rhs.len(),
                cost.len()
            )));
        }
        if cost.iter().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(SimplexError::InvalidProblem("non-finite cost or rhs".into()));
        }
        Ok(Self { cost, matrix, rhs })
    }

    pub fn dense(cost: Vec<f64>, rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self, SimplexError> {
        Self::new(cost, Arc::new(DenseMatrix::from_rows(rows)?), rhs)
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn matrix(&self) -> &dyn ConstraintColumns {
        self.matrix.as_ref()
    }

    /// `Q z - s`.
    pub fn residual(&self, z: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = self.rhs.iter().map(|v| -v).collect();
        let mut col = Vec::new();
        for (j, &zj) in z.iter().enumerate() {
            if zj != 0.0 {
                self.matrix.column(j, &mut col);
                for &(i, v) in &col {
                    r[i] += v * zj;
                }
            }
        }
        r
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        self.cost.iter().zip(z).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub objective: f64,
    /// Structural variables in the working basis, in basis-position order.
    pub basis: Vec<usize>,
    /// Rank of the working basis: rows minus redundant rows detected.
    pub working_rank: usize,
    /// Simplex multipliers `y` with `B^T y = c_B`.
    pub duals: Vec<f64>,
    pub iterations: usize,
    pub phase_one_iterations: usize,
    pub refactorizations: usize,
    pub bland_pivots: usize,
}

impl LpSolution {
    /// Count of entries with `|z_j| > tol`.
    pub fn nonzeros(&self, tol: f64) -> usize {
        self.z.iter().filter(|v| v.abs() > tol).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Dantzig, switching to Bland after `5 * rows` consecutive degenerate pivots.
    Dantzig,
    /// Bland's rule throughout.
    Bland,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub pricing: Pricing,
    pub refactor_interval: usize,
    pub crash: bool,
    /// Emit an [`IterationLog`] every this many iterations (0 disables).
    pub log_interval: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pricing: Pricing::Dantzig,
            refactor_interval: 100,
            crash: true,
            log_interval: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub phase: u8,
    pub objective: f64,
    pub infeasibility: f64,
    pub bland: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOneOutcome {
    Feasible {
        /// Structural basic variables.
        basis: Vec<usize>,
        z: Vec<f64>,
        iterations: usize,
    },
    Infeasible {
        infeasibility: f64,
    },
}

pub fn solve(lp: &StandardLp) -> Result<LpSolution, SimplexError> {
    solve_with(lp, &SolverOptions::default(), None)
}

pub fn solve_with(
    lp: &StandardLp,
    options: &SolverOptions,
    observer: Option<&mut dyn FnMut(&IterationLog)>,
) -> Result<LpSolution, SimplexError> {
    let mut s = Simplex::new(lp, options, observer)?;
    s.run()
}

/// Runs only phase one, returning a feasible basis or an infeasibility proof.
pub fn phase_one(lp: &StandardLp) -> Result<PhaseOneOutcome, SimplexError> {
    let options = SolverOptions::default();
    let mut s = Simplex::new(lp, &options, None)?;
    if !s.run_phase_one()? {
        return Ok(PhaseOneOutcome::Infeasible {
            infeasibility: s.artificial_sum(),
        });
    }
    let z = s.structural_values();
    Ok(PhaseOneOutcome::Feasible {
        basis: s.structural_basis(),
        z,
        iterations: s.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Nonbasic,
    /// Artificial that has left the basis; never re-enters.
    Retired,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

struct Simplex<'a, 'o> {
    lp: &'a StandardLp,
    options: &'a SolverOptions,
    observer: Option<&'o mut dyn FnMut(&IterationLog)>,
    rows: usize,
    cols: usize,
    art_sign: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    xb: Vec<f64>,
    factor: BasisFactor,
    phase: u8,
    iterations: usize,
    phase_one_iterations: usize,
    refactorizations: usize,
    bland_pivots: usize,
    degenerate_run: usize,
    bland: bool,
    limit: usize,
    redundant_rows: usize,
    col_buf: Vec<(usize, f64)>,
    price_buf: Vec<f64>,
}

impl<'a, 'o> Simplex<'a, 'o> {
    fn new(
        lp: &'a StandardLp,
        options: &'a SolverOptions,
        observer: Option<&'o mut dyn FnMut(&IterationLog)>,
    ) -> Result<Self, SimplexError> {
        let rows = lp.n_rows();
        let cols = lp.n_cols();
        let mut state = vec![VarState::Nonbasic; cols + rows];
        let mut basis = vec![usize::MAX; rows];
        let mut xb = vec![0.0; rows];
        let mut assigned = vec![false; rows];

        if options.crash {
            for (r, j, value) in triangular_crash(lp) {
                basis[r] = j;
                state[j] = VarState::Basic(r);
                xb[r] = value;
                assigned[r] = true;
            }
        }

        // Residual left for the artificials.
        let structural: Vec<f64> = {
            let mut z = vec![0.0; cols];
            for r in 0..rows {
                if assigned[r] {
                    z[basis[r]] = xb[r];
                }
            }
            z
        };
        let residual = lp.residual(&structural);
        let mut art_sign = vec![1.0; rows];
        for r in 0..rows {
            if assigned[r] {
                state[cols + r] = VarState::Retired;
            } else {
                let need = -residual[r];
                art_sign[r] = if need < 0.0 { -1.0 } else { 1.0 };
                basis[r] = cols + r;
                state[cols + r] = VarState::Basic(r);
                xb[r] = need.abs();
            }
        }

        let mut columns = Vec::with_capacity(rows);
        let mut buf = Vec::new();
        for &v in &basis {
            column_of(lp, &art_sign, v, &mut buf);
            columns.push(buf.clone());
        }
        let factor = BasisFactor::new(&columns, rows).map_err(|e| breakdown(0, e))?;

        Ok(Self {
            lp,
            options,
            observer,
            rows,
            cols,
            art_sign,
            basis,
            state,
            xb,
            factor,
            phase: 1,
            iterations: 0,
            phase_one_iterations: 0,
            refactorizations: 0,
            bland_pivots: 0,
            degenerate_run: 0,
            bland: options.pricing == Pricing::Bland,
            limit: 50 * (cols + rows),
            redundant_rows: 0,
            col_buf: Vec::new(),
            price_buf: vec![0.0; cols],
        })
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.cols
    }

    fn cost_of(&self, var: usize) -> f64 {
        match (self.phase, self.is_artificial(var)) {
            (1, true) => 1.0,
            (1, false) => 0.0,
            (_, true) => 0.0,
            (_, false) => self.lp.cost[var],
        }
    }

    fn artificial_sum(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&v, _)| self.is_artificial(v))
            .map(|(_, &x)| x.max(0.0))
            .sum()
    }

    fn structural_values(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.cols];
        for (&v, &x) in self.basis.iter().zip(&self.xb) {
            if !self.is_artificial(v) {
                z[v] = x;
            }
        }
        z
    }

    fn structural_basis(&self) -> Vec<usize> {
        self.basis.iter().copied().filter(|&v| !self.is_artificial(v)).collect()
    }

    fn run(&mut self) -> Result<LpSolution, SimplexError> {
        if !self.run_phase_one()? {
            return Ok(self.solution(LpStatus::Infeasible));
        }
        self.phase = 2;
        self.degenerate_run = 0;
        self.bland = self.options.pricing == Pricing::Bland;
        self.refactor()?;
        loop {
            match self.iterate()? {
                Step::Pivoted => {}
                Step::Optimal => break,
                Step::Unbounded => return Ok(self.solution(LpStatus::Unbounded)),
            }
        }
        self.refactor()?;
        let sol = self.solution(LpStatus::Optimal);
        let residual = self
            .lp
            .residual(&sol.z)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = 1.0 + self.lp.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > 1e-8 * scale {
            return Err(SimplexError::NumericalBreakdown {
                iterations: self.iterations,
                reason: format!("final residual {residual:e}"),
            });
        }
        Ok(sol)
    }

    /// Returns false when the problem is infeasible.
    fn run_phase_one(&mut self) -> Result<bool, SimplexError> {
        self.phase = 1;
        loop {
            match self.iterate()? {
                Step::Pivoted => {}
                Step::Optimal => break,
                Step::Unbounded => {
                    return Err(SimplexError::NumericalBreakdown {
                        iterations: self.iterations,
                        reason: "phase one objective unbounded".into(),
                    })
                }
            }
        }
        self.phase_one_iterations = self.iterations;
        self.refactor()?;
        let s1: f64 = self.lp.rhs.iter().map(|v| v.abs()).sum();
        if self.artificial_sum() > 1e-7 * (1.0 + s1) {
            return Ok(false);
        }
        self.drive_out_artificials()?;
        Ok(true)
    }

    /// Pivots zero-valued artificials out of the basis where a structural
    /// column can replace them; the rest mark redundant rows.
    fn drive_out_artificials(&mut self) -> Result<(), SimplexError> {
        for pos in 0..self.rows {
            let var = self.basis[pos];
            if !self.is_artificial(var) {
                continue;
            }
            let mut unit = vec![0.0; self.rows];
            unit[pos] = 1.0;
            let rho = self.factor.btran(&unit);
            self.lp.matrix.transpose_product(&rho, &mut self.price_buf);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if self.state[j] != VarState::Nonbasic {
                    continue;
                }
                let a = self.price_buf[j].abs();
                if a > 1e-7 && best.map_or(true, |(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            match best {
                Some((j, _)) => {
                    let alpha = self.ftran_var(j);
                    self.xb[pos] = 0.0;
                    self.pivot(j, pos, 0.0, &alpha)?;
                }
                None => self.redundant_rows += 1,
            }
        }
        self.refactor()
    }

    fn ftran_var(&mut self, var: usize) -> Vec<f64> {
        column_of(self.lp, &self.art_sign, var, &mut self.col_buf);
        let mut dense = vec![0.0; self.rows];
        for &(r, v) in &self.col_buf {
            dense[r] = v;
        }
        self.factor.ftran(&dense)
    }

    fn iterate(&mut self) -> Result<Step, SimplexError> {
        if self.iterations >= self.limit {
            return Err(SimplexError::IterationLimit { limit: self.limit });
        }
        let cb: Vec<f64> = self.basis.iter().map(|&v| self.cost_of(v)).collect();
        let y = self.factor.btran(&cb);
        self.lp.matrix.transpose_product(&y, &mut self.price_buf);

        let mut entering: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if self.state[j] != VarState::Nonbasic {
                continue;
            }
            let d = self.cost_of(j) - self.price_buf[j];
            if d < -OPTIMALITY_TOL {
                if self.bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.map_or(true, |(_, best)| d < best) {
                    entering = Some((j, d));
                }
            }
        }
        let Some((q, _)) = entering else {
            return Ok(Step::Optimal);
        };

        let alpha = self.ftran_var(q);
        let Some((leave, theta)) = self.ratio_test(&alpha) else {
            return Ok(Step::Unbounded);
        };
        self.pivot(q, leave, theta, &alpha)?;
        self.iterations += 1;
        if self.phase == 1 {
            self.phase_one_iterations = self.iterations;
        }
        if self.bland {
            self.bland_pivots += 1;
        }

        if theta <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run > 5 * self.rows && !self.bland {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = self.options.pricing == Pricing::Bland;
        }

        let stale = self.factor.eta_count() >= self.options.refactor_interval;
        if stale || (self.iterations % 20 == 0 && self.drift() > DRIFT_TOL) {
            self.refactor()?;
        }

        if self.options.log_interval > 0 && self.iterations % self.options.log_interval == 0 {
            let log = IterationLog {
                iteration: self.iterations,
                phase: self.phase,
                objective: self.basis.iter().zip(&self.xb).map(|(&v, &x)| self.cost_of(v) * x).sum(),
                infeasibility: self.artificial_sum(),
                bland: self.bland,
            };
            if let Some(obs) = self.observer.as_mut() {
                obs(&log);
            }
        }
        Ok(Step::Pivoted)
    }

    /// Chooses the leaving basis position and step length.
    fn ratio_test(&self, alpha: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (p, &a) in alpha.iter().enumerate() {
            let var = self.basis[p];
            let ratio = if self.phase == 2 && self.is_artificial(var) {
                // Redundant-row artificials are fixed at zero.
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                0.0
            } else {
                if a <= PIVOT_TOL {
                    continue;
                }
                self.xb[p].max(0.0) / a
            };
            let better = match best {
                None => true,
                Some((bp, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                    if !tie {
                        ratio < br
                    } else if self.bland {
                        var < self.basis[bp]
                    } else {
                        let (aa, ba) = (a.abs(), alpha[bp].abs());
                        aa > ba || (aa == ba && var < self.basis[bp])
                    }
                }
            };
            if better {
                best = Some((p, ratio));
            }
        }
        best
    }

    fn pivot(&mut self, q: usize, leave: usize, theta: f64, alpha: &[f64]) -> Result<(), SimplexError> {
        if alpha[leave].abs() <= f64::MIN_POSITIVE {
            return Err(SimplexError::NumericalBreakdown {
                iterations: self.iterations,
                reason: "zero pivot".into(),
            });
        }
        if theta != 0.0 {
            for (x, a) in self.xb.iter_mut().zip(alpha) {
                *x -= theta * a;
            }
        }
        self.xb[leave] = theta;
        let old = self.basis[leave];
        self.state[old] = if self.is_artificial(old) {
            VarState::Retired
        } else {
            VarState::Nonbasic
        };
        self.basis[leave] = q;
        self.state[q] = VarState::Basic(leave);
        self.factor.push_eta(leave, alpha);
        Ok(())
    }

    fn basis_columns(&mut self) -> Vec<Vec<(usize, f64)>> {
        let mut columns = Vec::with_capacity(self.rows);
        for p in 0..self.rows {
            column_of(self.lp, &self.art_sign, self.basis[p], &mut self.col_buf);
            columns.push(self.col_buf.clone());
        }
        columns
    }

    fn refactor(&mut self) -> Result<(), SimplexError> {
        let columns = self.basis_columns();
        self.factor = BasisFactor::new(&columns, self.rows).map_err(|e| breakdown(self.iterations, e))?;
        self.refactorizations += 1;
        self.xb = self.factor.ftran(&self.lp.rhs);
        Ok(())
    }

    /// `||B x_B - s||_inf`.
    fn drift(&mut self) -> f64 {
        let mut r: Vec<f64> = self.lp.rhs.iter().map(|v| -v).collect();
        for p in 0..self.rows {
            let x = self.xb[p];
            if x == 0.0 {
                continue;
            }
            column_of(self.lp, &self.art_sign, self.basis[p], &mut self.col_buf);
            for &(i, v) in &self.col_buf {
                r[i] += v * x;
            }
        }
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn solution(&mut self, status: LpStatus) -> LpSolution {
        let mut z = self.structural_values();
        for v in z.iter_mut() {
            if *v < 0.0 && *v >= -1e-9 {
                *v = 0.0;
            }
        }
        let cb: Vec<f64> = self.basis.iter().map(|&v| self.cost_of(v)).collect();
        let duals = self.factor.btran(&cb);
        LpSolution {
            status,
            objective: self.lp.objective(&z),
            z,
            basis: self.structural_basis(),
            working_rank: self.rows - self.redundant_rows,
            duals,
            iterations: self.iterations,
            phase_one_iterations: self.phase_one_iterations,
            refactorizations: self.refactorizations,
            bland_pivots: self.bland_pivots,
        }
    }
}

fn column_of(lp: &StandardLp, art_sign: &[f64], var: usize, out: &mut Vec<(usize, f64)>) {
    let cols = lp.n_cols();
    if var < cols {
        lp.matrix.column(var, out);
    } else {
        out.clear();
        out.push((var - cols, art_sign[var - cols]));
    }
}

fn breakdown(iterations: usize, e: FactorError) -> SimplexError {
    let FactorError::Singular { rank_deficit } = e;
    SimplexError::NumericalBreakdown {
        iterations,
        reason: format!("singular basis (rank deficit {rank_deficit})"),
    }
}

/// Greedy lower-triangular crash: assigns to a row a structural column that
/// touches no already-assigned row, provided the row is untouched by earlier
/// picks and the implied value is nonnegative. Rows are visited sparsest
/// first; among candidate columns the sparsest, then cheapest, wins.
/// Returns `(row, column, value)` triples.
fn triangular_crash(lp: &StandardLp) -> Vec<(usize, usize, f64)> {
    let rows = lp.n_rows();
    let cols = lp.n_cols();
    let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    let mut col_nnz = vec![0usize; cols];
    let mut col = Vec::new();
    for j in 0..cols {
        lp.matrix.column(j, &mut col);
        col_nnz[j] = col.len();
        for &(r, v) in &col {
            row_entries[r].push((j, v));
        }
    }
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by_key(|&r| (row_entries[r].len(), r));

    let mut assigned = vec![false; rows];
    let mut touched = vec![false; rows];
    let mut picks = Vec::new();
    for r in order {
        if touched[r] {
            continue;
        }
        // (column, value, nonzeros, cost contribution)
        let mut best: Option<(usize, f64, usize, f64)> = None;
        for &(j, v) in &row_entries[r] {
            let value = lp.rhs[r] / v;
            if !(value >= 0.0) {
                continue;
            }
            lp.matrix.column(j, &mut col);
            if col.iter().any(|&(i, _)| assigned[i]) {
                continue;
            }
            let (nnz, cost) = (col_nnz[j], lp.cost[j] * value);
            let better = best.map_or(true, |(_, _, bn, bc)| nnz < bn || (nnz == bn && cost < bc));
            if better {
                best = Some((j, value, nnz, cost));
            }
        }
        if let Some((j, value, _, _)) = best {
            lp.matrix.column(j, &mut col);
            for &(i, _) in &col {
                touched[i] = true;
            }
            assigned[r] = true;
            picks.push((r, j, value));
        }
    }
    picks
}
