//! Oracle cross-checks at small scale, run by `pwmlp selftest`.

use pwmlp_core::oracle::{brute_force_design, enumerate_vertices, grid_delta, OracleBudget};
use pwmlp_core::spectrum::full_spectrum_direct;
use pwmlp_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_lp(rng: &mut ChaCha8Rng) -> StandardLp {
    let mut a: Vec<Vec<f64>> = (0..4).map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    a.push((0..8).map(|_| rng.random_range(0.2..1.0)).collect());
    let z0: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
    let rhs = a.iter().map(|r| r.iter().zip(&z0).map(|(x, y)| x * y).sum()).collect();
    let cost = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    StandardLp::dense(cost, &a, rhs).expect("well-formed")
}

fn simplex_vs_vertices() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let lp = random_lp(&mut rng);
        let (Ok(sol), Ok(v)) = (solve(&lp), enumerate_vertices(&lp)) else {
            return check("simplex_vs_vertices", false, "solver or oracle failed".into());
        };
        worst = worst.max((sol.objective - v.objective).abs());
    }
    check("simplex_vs_vertices", worst <= 1e-8, format!("max_gap={worst:e}"))
}

fn lp_lower_bound() -> Check {
    let levels = LevelSet::new(vec![-1.0, 0.0, 1.0]).expect("valid");
    let eps = 0.2;
    let spec = HarmonicSpec::new(12, vec![HarmonicTarget::new(1, 0.5, -0.5)], false, false).expect("valid");
    let budget = OracleBudget {
        residual_tol: eps,
        ..OracleBudget::default()
    };
    let kappa = 2.0 * eps * levels.max_abs();
    let lp = build_lp(&spec, &levels).ok().and_then(|p| solve(&p.lp).ok());
    match (lp, brute_force_design(&spec, &levels, &budget)) {
        (Some(sol), Ok(best)) => check(
            "lp_lower_bound",
            sol.objective <= best.energy + kappa,
            format!("lp={} oracle={} kappa={kappa}", sol.objective, best.energy),
        ),
        _ => check("lp_lower_bound", false, "solver or oracle failed".into()),
    }
}

fn delta_grid() -> Check {
    let sets = [vec![-2.0, 0.0, 2.0], vec![-4.0, -2.0, 0.0, 2.0, 4.0]];
    let mut worst = 0.0f64;
    for s in sets {
        let closed = delta_constant(&LevelSet::new(s.clone()).expect("valid"));
        match grid_delta(&s, 1e-2) {
            Ok(g) => worst = worst.max((closed - g).abs()),
            Err(e) => return check("delta_grid", false, e.to_string()),
        }
    }
    check("delta_grid", worst <= 1e-6, format!("max_gap={worst:e}"))
}

fn spectrum_fft() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..256).map(|_| [-2.0, 0.0, 2.0][rng.random_range(0..3)]).collect();
    let worst = full_spectrum(&x)
        .iter()
        .zip(full_spectrum_direct(&x))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    check("spectrum_fft", worst <= 1e-10, format!("max_gap={worst:e}"))
}

fn half_wave_design() -> Check {
    let levels = LevelSet::new(vec![-2.0, 0.0, 2.0]).expect("valid");
    let targets = vec![HarmonicTarget::new(1, 1.0, -1.0), HarmonicTarget::new(3, 0.0, 0.0)];
    let spec = HarmonicSpec::new(128, targets, true, true).expect("valid");
    match design(&spec, &levels) {
        Ok(r) => {
            let x = r.waveform.samples();
            let anti = (0..64).all(|i| x[i + 64] == -x[i]);
            let even = (2..=64).step_by(2).map(|k| r.spectrum[k - 1].norm()).fold(0.0f64, f64::max);
            check("half_wave_design", anti && even <= 1e-9, format!("antisymmetric={anti} max_even={even:e}"))
        }
        Err(e) => check("half_wave_design", false, e.to_string()),
    }
}

pub fn run_selftest() -> Vec<Check> {
    vec![simplex_vs_vertices(), lp_lower_bound(), delta_grid(), spectrum_fft(), half_wave_design()]
}
