//! Fixtures shared by the benchmarks.

use pwmlp_core::{HarmonicSpec, HarmonicTarget, LevelSet};

pub const HARMONICS: [usize; 11] = [1, 5, 7, 11, 13, 17, 19, 23, 25, 29, 31];

/// Symmetric level set `{-(m-1), ..., m-1}` in steps of 2.
pub fn levels(m: usize) -> LevelSet {
    LevelSet::new((0..m).map(|i| 2.0 * i as f64 - (m as f64 - 1.0)).collect()).unwrap()
}

/// Selective-elimination targets with fundamental `amplitude * (1 - j)`.
pub fn she_spec(n: usize, amplitude: f64) -> HarmonicSpec {
    let targets = HARMONICS
        .iter()
        .map(|&k| {
            let a = if k == 1 { amplitude } else { 0.0 };
            HarmonicTarget::new(k, a, -a)
        })
        .collect();
    HarmonicSpec::new(n, targets, false, true).unwrap()
}
