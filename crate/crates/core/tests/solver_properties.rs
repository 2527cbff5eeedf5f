mod common;

use dorsal_flow::convergence::auto_grid;
use dorsal_flow::profiles::inflection_profile;
use dorsal_flow::solver::Solver;
use dorsal_flow::{run, validate_stability, SolverState, StabilityPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn nonnegative_data_stays_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let case = common::random_case(&mut rng, true);
        assert!(validate_stability(&case.grid, &case.w0, None).is_stable());
        let mut solver = Solver::new(SolverState::initial(case.w0.clone()).unwrap());
        while solver.j() < case.grid.m() {
            solver.advance().unwrap();
            let min = solver.values().iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-12, "min {min} at level {}", solver.j());
        }
    }
}

#[test]
fn d_zero_is_bounded_by_d_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let case = common::random_case(&mut rng, false);
        let mut solver = Solver::new(SolverState::initial(case.w0.clone()).unwrap());
        while solver.j() < case.grid.m() {
            solver.advance().unwrap();
            let state = solver.state();
            let p = state.profile();
            assert!(p.dzero_sup_norm() <= p.dplus_sup_norm() + 1e-12);
        }
    }
}

#[test]
fn runs_are_bitwise_repeatable() {
    let grid = auto_grid(3.0, 40, 1.0).unwrap();
    let w0 = inflection_profile(grid, 0.7, 2.0).unwrap();
    let times = [0.0, 0.25, 0.5, 1.0];
    let a = run(&grid, &w0, &times, StabilityPolicy::Enforce).unwrap();
    let b = run(&grid, &w0, &times, StabilityPolicy::Enforce).unwrap();
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        let xb: Vec<u64> = x.profile.values().iter().map(|v| v.to_bits()).collect();
        let yb: Vec<u64> = y.profile.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(xb, yb);
    }
    assert_eq!(a.diagnostics, b.diagnostics);
}

#[test]
fn snapshots_land_on_first_level_at_or_after_request() {
    let grid = auto_grid(3.0, 20, 4.0).unwrap();
    let w0 = inflection_profile(grid, 0.7, 2.0).unwrap();
    let out = run(&grid, &w0, &[0.0, 0.1, 2.0, 4.0], StabilityPolicy::Enforce).unwrap();
    assert_eq!(out.snapshots.len(), 4);
    let dt = grid.delta_t();
    for (snap, want) in out.snapshots.iter().zip([0.0, 0.1, 2.0, 4.0]) {
        assert!(snap.t >= want - 1e-12);
        assert!(snap.t < want + dt);
    }
    // level 0, the three snapshot levels past it, and T (already a snapshot)
    assert_eq!(out.diagnostics.len(), 4);
    assert_eq!(out.diagnostics.last().unwrap().t, 4.0);
}

#[test]
fn inflection_decays_by_final_time() {
    let grid = auto_grid(3.0, 160, 4.0).unwrap();
    let w0 = inflection_profile(grid, 0.7, 2.0).unwrap();
    let out = run(&grid, &w0, &[0.0, 4.0], StabilityPolicy::Enforce).unwrap();
    let first = out.snapshots[0].profile.sup_norm();
    let last = out.snapshots[1].profile.sup_norm();
    assert_eq!(first, w0.sup_norm());
    assert!(last < first, "{last} !< {first}");
}

#[test]
fn inflection_gradient_margin() {
    // dplus sup of the sampled profile at du = 0.15 is 0.68965309160008 (30-digit evaluation)
    let grid = auto_grid(3.0, 20, 4.0).unwrap();
    let w0 = inflection_profile(grid, 0.7, 2.0).unwrap();
    let r = validate_stability(&grid, &w0, None);
    let s: f64 = 0.689_653_091_600_081;
    let want = 3.0 - 0.15 * (1.0 + s * s);
    assert!((r.gradient.margin.unwrap() - want).abs() < 1e-12);
    assert!((r.gradient.margin.unwrap() - 2.779).abs() < 1e-3);
}
