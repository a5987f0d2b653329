//! Dense LU with partial pivoting, `P A = L U`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Singular {
    pub column: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
}

impl DenseLu {
    /// Factors the row-major `n x n` matrix `a`.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Self, Singular> {
        debug_assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if best <= tol {
                return Err(Singular { column: k });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                a[i * n + k] = f;
                let (upper, lower) = a.split_at_mut(i * n);
                let src = &upper[k * n + k + 1..k * n + n];
                for (dst, s) in lower[k + 1..n].iter_mut().zip(src) {
                    *dst -= f * s;
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..i * n + n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `A^T x = b` in place.
    pub fn solve_transpose(&self, b: &mut [f64]) {
        let n = self.n;
        let mut w = b.to_vec();
        // U^T w = b, forward.
        for i in 0..n {
            w[i] /= self.lu[i * n + i];
            let wi = w[i];
            if wi != 0.0 {
                for j in i + 1..n {
                    w[j] -= self.lu[i * n + j] * wi;
                }
            }
        }
        // L^T v = w, backward with unit diagonal.
        for i in (0..n).rev() {
            let vi = w[i];
            if vi != 0.0 {
                for j in 0..i {
                    w[j] -= self.lu[i * n + j] * vi;
                }
            }
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = w[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
    }

    #[test]
    fn solves_both_orientations() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 4.0];
        let lu = DenseLu::factor(a.clone(), 3).unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let mut x = b.clone();
        lu.solve(&mut x);
        let back = matvec(&a, &x, 3);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let at: Vec<f64> = (0..9).map(|k| a[(k % 3) * 3 + k / 3]).collect();
        let mut y = b.clone();
        lu.solve_transpose(&mut y);
        let back = matvec(&at, &y, 3);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_singularity() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert_eq!(DenseLu::factor(a, 2).unwrap_err(), Singular { column: 1 });
    }
}
