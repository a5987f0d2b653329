//! Basis factorisation for the revised simplex method.
//!
//! Row singletons are peeled off first, which permutes the basis into
//!
//! ```text
//! [ T  0 ]
//! [ X  W ]
//! ```
//!
//! with `T` lower triangular. Only the remaining bump `W` gets a dense LU.
//! Bases of assignment-type LPs are almost entirely row singletons, so the
//! bump stays at a few dozen rows even when the basis has thousands.
//! Pivots between refactorisations are kept as product-form eta columns.

use super::lu::DenseLu;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FactorError {
    /// Structural or numerical singularity; `rank_deficit` rows had no pivot.
    Singular { rank_deficit: usize },
}

#[derive(Debug, Clone, Copy)]
enum RowSlot {
    Peeled(usize),
    Rest(usize),
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    others: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    n: usize,
    peel_rows: Vec<usize>,
    peel_pos: Vec<usize>,
    diag: Vec<f64>,
    /// Column `t` of `T` below the diagonal, as (peeled index, value).
    lower: Vec<Vec<(usize, f64)>>,
    /// Column `t` of `X`, as (rest row index, value).
    coupling: Vec<Vec<(usize, f64)>>,
    rest_rows: Vec<usize>,
    rest_pos: Vec<usize>,
    #[cfg_attr(not(test), allow(dead_code))]
    row_slot: Vec<RowSlot>,
    bump: Option<DenseLu>,
    etas: Vec<Eta>,
}

/// Entries below this magnitude are dropped from eta columns.
const ETA_DROP: f64 = 1e-14;

impl BasisFactor {
    /// `columns[p]` lists the nonzeros `(row, value)` of the basic column in
    /// position `p`.
    pub fn new(columns: &[Vec<(usize, f64)>], n: usize) -> Result<Self, FactorError> {
        debug_assert_eq!(columns.len(), n);
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (p, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                if v != 0.0 {
                    row_cols[r].push(p);
                }
            }
        }
        let mut count: Vec<usize> = row_cols.iter().map(Vec::len).collect();
        let mut active = vec![true; n];
        let mut peeled = vec![false; n];
        let mut queue: Vec<usize> = (0..n).rev().filter(|&r| count[r] == 1).collect();
        let mut peel_rows = Vec::new();
        let mut peel_pos = Vec::new();
        while let Some(r) = queue.pop() {
            if peeled[r] || count[r] != 1 {
                continue;
            }
            let Some(&p) = row_cols[r].iter().find(|&&p| active[p]) else {
                continue;
            };
            peeled[r] = true;
            active[p] = false;
            peel_rows.push(r);
            peel_pos.push(p);
            for &(r2, v) in &columns[p] {
                if r2 != r && v != 0.0 && !peeled[r2] {
                    count[r2] -= 1;
                    if count[r2] == 1 {
                        queue.push(r2);
                    }
                }
            }
        }

        let rest_rows: Vec<usize> = (0..n).filter(|&r| !peeled[r]).collect();
        let rest_pos: Vec<usize> = (0..n).filter(|&p| active[p]).collect();
        debug_assert_eq!(rest_rows.len(), rest_pos.len());

        let mut row_slot = vec![RowSlot::Rest(0); n];
        for (t, &r) in peel_rows.iter().enumerate() {
            row_slot[r] = RowSlot::Peeled(t);
        }
        for (a, &r) in rest_rows.iter().enumerate() {
            row_slot[r] = RowSlot::Rest(a);
        }

        let p_count = peel_rows.len();
        let mut diag = vec![0.0; p_count];
        let mut lower = vec![Vec::new(); p_count];
        let mut coupling = vec![Vec::new(); p_count];
        for t in 0..p_count {
            for &(r, v) in &columns[peel_pos[t]] {
                if v == 0.0 {
                    continue;
                }
                match row_slot[r] {
                    RowSlot::Peeled(s) if s == t => diag[t] = v,
                    RowSlot::Peeled(s) => {
                        debug_assert!(s > t);
                        lower[t].push((s, v));
                    }
                    RowSlot::Rest(a) => coupling[t].push((a, v)),
                }
            }
        }

        let q = rest_rows.len();
        let bump = if q == 0 {
            None
        } else {
            let mut w = vec![0.0; q * q];
            for (b, &p) in rest_pos.iter().enumerate() {
                for &(r, v) in &columns[p] {
                    if let RowSlot::Rest(a) = row_slot[r] {
                        w[a * q + b] = v;
                    }
                }
            }
            match DenseLu::factor(w, q) {
                Ok(lu) => Some(lu),
                Err(e) => {
                    return Err(FactorError::Singular {
                        rank_deficit: q - e.column,
                    })
                }
            }
        };

        Ok(Self {
            n,
            peel_rows,
            peel_pos,
            diag,
            lower,
            coupling,
            rest_rows,
            rest_pos,
            row_slot,
            bump,
            etas: Vec::new(),
        })
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn bump_size(&self) -> usize {
        self.rest_rows.len()
    }

    pub fn eta_count(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B u = v`; `v` is indexed by row, the result by basis position.
    pub fn ftran(&self, v: &[f64]) -> Vec<f64> {
        let p_count = self.peel_rows.len();
        let mut wp: Vec<f64> = self.peel_rows.iter().map(|&r| v[r]).collect();
        let mut wr: Vec<f64> = self.rest_rows.iter().map(|&r| v[r]).collect();
        for t in 0..p_count {
            let u = wp[t] / self.diag[t];
            wp[t] = u;
            if u != 0.0 {
                for &(s, val) in &self.lower[t] {
                    wp[s] -= val * u;
                }
                for &(a, val) in &self.coupling[t] {
                    wr[a] -= val * u;
                }
            }
        }
        if let Some(lu) = &self.bump {
            lu.solve(&mut wr);
        }
        let mut out = vec![0.0; self.n];
        for (t, &p) in self.peel_pos.iter().enumerate() {
            out[p] = wp[t];
        }
        for (b, &p) in self.rest_pos.iter().enumerate() {
            out[p] = wr[b];
        }
        for eta in &self.etas {
            let r = out[eta.pos] / eta.pivot;
            out[eta.pos] = r;
            if r != 0.0 {
                for &(i, a) in &eta.others {
                    out[i] -= a * r;
                }
            }
        }
        out
    }

    /// Solves `B^T y = c`; `c` is indexed by basis position, `y` by row.
    pub fn btran(&self, c: &[f64]) -> Vec<f64> {
        let mut c = c.to_vec();
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.others.iter().map(|&(i, a)| c[i] * a).sum();
            c[eta.pos] = (c[eta.pos] - s) / eta.pivot;
        }
        let mut yr: Vec<f64> = self.rest_pos.iter().map(|&p| c[p]).collect();
        if let Some(lu) = &self.bump {
            lu.solve_transpose(&mut yr);
        }
        let p_count = self.peel_rows.len();
        let mut yp = vec![0.0; p_count];
        for t in (0..p_count).rev() {
            let mut rhs = c[self.peel_pos[t]];
            for &(a, val) in &self.coupling[t] {
                rhs -= val * yr[a];
            }
            for &(s, val) in &self.lower[t] {
                rhs -= val * yp[s];
            }
            yp[t] = rhs / self.diag[t];
        }
        let mut y = vec![0.0; self.n];
        for (t, &r) in self.peel_rows.iter().enumerate() {
            y[r] = yp[t];
        }
        for (a, &r) in self.rest_rows.iter().enumerate() {
            y[r] = yr[a];
        }
        y
    }

    /// Records the replacement of the column at `pos` by a column whose
    /// FTRAN image is `alpha`.
    pub fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != pos && a.abs() > ETA_DROP)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            others,
        });
    }

    #[cfg(test)]
    fn row_is_peeled(&self, r: usize) -> bool {
        matches!(self.row_slot[r], RowSlot::Peeled(_))
    }
}
