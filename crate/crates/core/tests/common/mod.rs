#![allow(dead_code)]

use std::f64::consts::PI;

use dorsal_flow::convergence::choose_time_step;
use dorsal_flow::{GridSpec, MeshProfile};
use rand::Rng;

/// Random grid plus initial profile satisfying the step-size, domain and
/// gradient hypotheses.
pub struct RandomCase {
    pub grid: GridSpec,
    pub w0: MeshProfile,
}

/// Mixes a few modes `cos((2i+1) pi u / (2 rho0))` (compatible with both
/// boundary conditions) with optional rough noise, then rescales so that
/// `rho0 >= du (1 + |D+ w|^2)`.
pub fn random_case<R: Rng>(rng: &mut R, nonnegative: bool) -> RandomCase {
    let rho0 = rng.gen_range(0.5..5.0);
    let n = rng.gen_range(4..64);
    let du = rho0 / n as f64;
    let (m_full, _) = choose_time_step(du, 1.0).unwrap();
    // shrink dt by up to 3x below the limit, keep a few hundred steps at most
    let stretch = rng.gen_range(1.0..3.0);
    let steps = ((m_full as f64 * stretch).ceil() as usize).min(400).max(1);
    let t_final = steps as f64 * du * du / (2.0 * stretch);
    let grid = GridSpec::new(rho0, n, t_final, steps).unwrap();
    assert!(du * du - 2.0 * grid.delta_t() >= 0.0);

    let mut values: Vec<f64> = if nonnegative {
        let mut v: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect();
        v[0] = v[1];
        v
    } else {
        let modes: Vec<(f64, f64)> = (0..4).map(|i| (rng.gen_range(-1.0..1.0), (2 * i + 1) as f64)).collect();
        let noise = rng.gen_range(0.0..0.3);
        (0..=n)
            .map(|k| {
                let u = k as f64 * du;
                modes.iter().map(|(a, f)| a * (f * PI * u / (2.0 * rho0)).cos()).sum::<f64>()
                    + noise * rng.gen_range(-1.0..1.0)
            })
            .collect()
    };
    values[n] = 0.0;
    let raw = MeshProfile::new(grid, values.clone()).unwrap();
    let slope = raw.dplus_sup_norm();
    let limit = (rho0 / du - 1.0).max(0.0).sqrt();
    let scale = rng.gen_range(0.1..1.0) * if slope > 0.0 { (limit / slope).min(3.0) } else { 1.0 };
    for v in &mut values {
        *v *= scale;
    }
    values[n] = 0.0;
    RandomCase {
        grid,
        w0: MeshProfile::new(grid, values).unwrap(),
    }
}
