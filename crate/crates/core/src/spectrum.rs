//! Discrete harmonic analysis with the `2/N` normalisation
//! `f_k^T x = (2/N) sum_i x(i) exp(-j 2 pi k i / N)`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

/// Total out-of-DC power below which THD is reported as undefined.
pub const ZERO_POWER: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("harmonic index {k} outside 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },
    #[error("signal has no power outside DC; THD is undefined")]
    ZeroSignal,
    #[error("need at least 2 samples, got {0}")]
    TooShort(usize),
}

/// Real and imaginary parts of the harmonic row `f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierRow {
    pub k: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl FourierRow {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Complex64 {
        let re = self.re.iter().zip(x).map(|(a, b)| a * b).sum();
        let im = self.im.iter().zip(x).map(|(a, b)| a * b).sum();
        Complex64::new(re, im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|v| v * v).sum()
    }
}

/// `exp(-j 2 pi (k i mod N) / N)` evaluated with the index reduced first so
/// that large `k i` does not lose phase accuracy.
fn twiddle(k: usize, i: usize, n: usize) -> (f64, f64) {
    let m = (k as u128 * i as u128 % n as u128) as f64;
    let theta = std::f64::consts::TAU * m / n as f64;
    let (s, c) = theta.sin_cos();
    (c, -s)
}

fn check_index(k: usize, n: usize) -> Result<(), SpectrumError> {
    if k < 1 || k > n / 2 {
        return Err(SpectrumError::IndexOutOfRange { k, max: n / 2 });
    }
    Ok(())
}

pub fn fourier_row(k: usize, n: usize) -> Result<FourierRow, SpectrumError> {
    check_index(k, n)?;
    let scale = 2.0 / n as f64;
    let (re, im) = (0..n)
        .map(|i| {
            let (c, s) = twiddle(k, i, n);
            (scale * c, scale * s)
        })
        .unzip();
    Ok(FourierRow { k, re, im })
}

/// `f_k^T x` by direct summation.
pub fn harmonic(x: &[f64], k: usize) -> Result<Complex64, SpectrumError> {
    let n = x.len();
    check_index(k, n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let (c, s) = twiddle(k, i, n);
        acc += Complex64::new(v * c, v * s);
    }
    Ok(acc * (2.0 / n as f64))
}

/// `f_k^T x` for `k = 1..=N/2` via an FFT. Element `k - 1` holds harmonic `k`.
pub fn full_spectrum(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    if n < 2 {
        return Vec::new();
    }
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 / n as f64;
    buf[1..=n / 2].iter().map(|c| c * scale).collect()
}

/// O(N^2) reference for [`full_spectrum`].
pub fn full_spectrum_direct(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (1..=n / 2)
        .map(|k| harmonic(x, k).expect("k in range"))
        .collect()
}

/// Mean power `(1/N) sum x(i)^2`.
pub fn energy(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// THD from a spectrum laid out as returned by [`full_spectrum`]. The
/// denominator runs over every stored harmonic, Nyquist included with unit
/// weight; DC is never part of the spectrum.
pub fn thd_from_spectrum(spectrum: &[Complex64], harmonics: &[usize]) -> Result<f64, SpectrumError> {
    let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
    if !(total >= ZERO_POWER) {
        return Err(SpectrumError::ZeroSignal);
    }
    let mut kept = 0.0;
    for &k in harmonics {
        check_index(k, 2 * spectrum.len())?;
        kept += spectrum[k - 1].norm_sqr();
    }
    Ok((1.0 - kept / total).clamp(0.0, 1.0))
}

pub fn thd(x: &[f64], harmonics: &[usize]) -> Result<f64, SpectrumError> {
    if x.len() < 2 {
        return Err(SpectrumError::TooShort(x.len()));
    }
    thd_from_spectrum(&full_spectrum(x), harmonics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn square(n: usize, a: f64) -> Vec<f64> {
        (0..n).map(|i| if i < n / 2 { a } else { -a }).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rows_on_four_points() {
        let r = fourier_row(1, 4).unwrap();
        let expect_re = [0.5, 0.0, -0.5, 0.0];
        let expect_im = [0.0, -0.5, 0.0, 0.5];
        for i in 0..4 {
            assert!(close(r.re[i], expect_re[i], 1e-15));
            assert!(close(r.im[i], expect_im[i], 1e-15));
        }
        let r = fourier_row(2, 4).unwrap();
        for i in 0..4 {
            let sign = if i % 2 == 0 { 0.5 } else { -0.5 };
            assert!(close(r.re[i], sign, 1e-15));
            assert!(close(r.im[i], 0.0, 1e-15));
        }
    }

    #[test]
    fn row_norm_matches_closed_form() {
        let n = 2048;
        let r = fourier_row(1, n).unwrap();
        // Direct summation of |2/N e^{-j theta}|^2 over the row.
        let direct: f64 = (0..n)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / n as f64;
                let (re, im) = (2.0 / n as f64 * theta.cos(), -2.0 / n as f64 * theta.sin());
                re * re + im * im
            })
            .sum();
        assert!(close(r.norm_sqr(), 4.0 / n as f64, 1e-15));
        assert!(close(direct, 4.0 / n as f64, 1e-15));
    }

    #[test]
    fn row_index_range() {
        assert_eq!(
            fourier_row(0, 8),
            Err(SpectrumError::IndexOutOfRange { k: 0, max: 4 })
        );
        assert!(fourier_row(5, 8).is_err());
        assert!(harmonic(&[0.0; 8], 5).is_err());
    }

    #[test]
    fn square_wave_fundamental() {
        let n = 2048;
        let a = 1.5;
        let x = square(n, a);
        let h1 = harmonic(&x, 1).unwrap();
        let theta = Complex64::new(0.0, -2.0 * PI / n as f64).exp();
        let closed = Complex64::new(4.0 * a / n as f64, 0.0) * 2.0 / (Complex64::new(1.0, 0.0) - theta);
        assert!((h1 - closed).norm() < 1e-12);
        assert!((h1.norm() - 4.0 * a / PI).abs() < 1e-5 * a);
        assert!(harmonic(&x, 2).unwrap().norm() < 1e-12);
        assert_eq!(harmonic(&vec![0.0; n], 3).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn square_wave_series() {
        let n = 2048;
        let spec = full_spectrum(&square(n, 2.0));
        for k in 1..40 {
            let c = spec[k - 1];
            if k % 2 == 0 {
                assert!(c.norm() < 1e-10);
            } else {
                // Within the discretisation error of the continuous series.
                let ideal = 8.0 / (k as f64 * PI);
                assert!((c.norm() - ideal).abs() < 1e-3 * ideal, "k={k}");
                assert!(c.im < 0.0);
            }
        }
        assert!(full_spectrum(&vec![0.0; 64]).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn fft_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..256).map(|_| if rng.random_bool(0.5) { 2.0 } else { -2.0 }).collect();
        let fast = full_spectrum(&x);
        let slow = full_spectrum_direct(&x);
        assert_eq!(fast.len(), 128);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn energy_cases() {
        assert_eq!(energy(&[0.0; 10]), 0.0);
        assert_eq!(energy(&[2.0; 7]), 4.0);
        assert!(close(energy(&square(2048, 2.0)), 4.0, 1e-15));
    }

    #[test]
    fn square_wave_thd() {
        let n = 2048;
        let x = square(n, 1.0);
        // Reference: per-harmonic direct sums, truncated at N/2.
        let powers: Vec<f64> = (1..=n / 2).map(|k| harmonic(&x, k).unwrap().norm_sqr()).collect();
        let reference = 1.0 - powers[0] / powers.iter().sum::<f64>();
        let got = thd(&x, &[1]).unwrap();
        assert!(close(got, reference, 1e-12));
        assert!(close(got, 0.1894, 5e-4), "{got}");
    }

    #[test]
    fn thd_edge_cases() {
        let n = 64;
        let pure: Vec<f64> = (0..n).map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).cos()).collect();
        assert!(thd(&pure, &[3]).unwrap() < 1e-12);
        assert_eq!(thd(&vec![0.0; n], &[1]), Err(SpectrumError::ZeroSignal));
        // Constant signal: only DC, which is excluded.
        assert_eq!(thd(&vec![1.0; n], &[1]), Err(SpectrumError::ZeroSignal));
        // Nyquist counts with unit weight.
        let alt: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let spec = full_spectrum(&alt);
        assert!(close(spec[n / 2 - 1].norm(), 2.0, 1e-12));
        assert!(close(thd(&alt, &[1]).unwrap(), 1.0, 1e-12));
    }

    proptest! {
        #[test]
        fn parseval_for_zero_mean(raw in proptest::collection::vec(-3.0f64..3.0, 32)) {
            // Remove DC and the Nyquist component, leaving only k in 1..N/2.
            let n = raw.len();
            let mean = raw.iter().sum::<f64>() / n as f64;
            let alt = raw.iter().enumerate()
                .map(|(i, v)| if i % 2 == 0 { v - mean } else { -(v - mean) })
                .sum::<f64>() / n as f64;
            let x: Vec<f64> = raw.iter().enumerate()
                .map(|(i, v)| v - mean - if i % 2 == 0 { alt } else { -alt })
                .collect();
            let spec = full_spectrum(&x);
            let lhs: f64 = spec[..n / 2 - 1].iter().map(|c| c.norm_sqr()).sum();
            let rhs = 2.0 / n as f64 * x.iter().map(|v| v * v).sum::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn thd_scale_invariant(raw in proptest::collection::vec(-3.0f64..3.0, 64), alpha in 0.01f64..100.0) {
            let a = thd(&raw, &[1, 3]);
            let scaled: Vec<f64> = raw.iter().map(|v| v * alpha).collect();
            let b = thd(&scaled, &[1, 3]);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-10);
                prop_assert!((0.0..=1.0).contains(&a));
            }
        }

        #[test]
        fn harmonic_is_linear(x in proptest::collection::vec(-3.0f64..3.0, 48),
                              y in proptest::collection::vec(-3.0f64..3.0, 48),
                              a in -5.0f64..5.0, k in 1usize..=24) {
            let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
            let lhs = harmonic(&mix, k).unwrap();
            let rhs = harmonic(&x, k).unwrap() * a + harmonic(&y, k).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn fft_agrees_with_per_k(x in proptest::collection::vec(-3.0f64..3.0, 2..80)) {
            let fast = full_spectrum(&x);
            for (k, c) in fast.iter().enumerate() {
                prop_assert!((c - harmonic(&x, k + 1).unwrap()).norm() < 1e-12);
            }
        }
    }
}
