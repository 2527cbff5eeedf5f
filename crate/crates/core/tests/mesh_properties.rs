use dorsal_flow::{GridSpec, MeshProfile};
use proptest::prelude::*;

fn grid(rho0: f64, n: usize) -> GridSpec {
    GridSpec::new(rho0, n, 1.0, 1).unwrap()
}

fn profile_strategy() -> impl Strategy<Value = MeshProfile> {
    (0.5f64..5.0, 2usize..40).prop_flat_map(|(rho0, n)| {
        prop::collection::vec(-3.0f64..3.0, n + 1)
            .prop_map(move |v| MeshProfile::new(grid(rho0, n), v).unwrap())
    })
}

proptest! {
    #[test]
    fn affine_data_is_differentiated_exactly(
        rho0 in 0.5f64..5.0, n in 2usize..40, a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let p = MeshProfile::from_fn(grid(rho0, n), |u| a + b * u).unwrap();
        let tol = 1e-12 * (1.0 + a.abs() + b.abs() * rho0) / p.grid().delta_u();
        for k in 0..n {
            prop_assert!((p.d_plus(k).unwrap() - b).abs() <= tol);
            prop_assert!((p.d_minus(k + 1).unwrap() - b).abs() <= tol);
        }
        for k in 1..n {
            prop_assert!((p.d_zero(k).unwrap() - b).abs() <= tol);
        }
    }

    #[test]
    fn quadratics_have_exact_second_difference(
        rho0 in 0.5f64..5.0, n in 2usize..40, c in -3.0f64..3.0,
    ) {
        let p = MeshProfile::from_fn(grid(rho0, n), |u| c * u * u).unwrap();
        let du = p.grid().delta_u();
        // roundoff of the three samples, amplified by 1/du^2
        let tol = 4.0 * f64::EPSILON * (c.abs() * rho0 * rho0) / (du * du) + 1e-14;
        for k in 1..n {
            prop_assert!((p.d_second(k).unwrap() - 2.0 * c).abs() <= tol);
        }
    }

    #[test]
    fn second_difference_is_difference_of_d_plus(p in profile_strategy()) {
        let du = p.grid().delta_u();
        let scale = 4.0 * f64::EPSILON * 3.0 * (1.0 + p.sup_norm()) / (du * du);
        for k in 1..p.n() {
            let via_dplus = (p.d_plus(k).unwrap() - p.d_plus(k - 1).unwrap()) / du;
            prop_assert!((p.d_second(k).unwrap() - via_dplus).abs() <= scale);
            let avg = 0.5 * (p.d_plus(k).unwrap() + p.d_plus(k - 1).unwrap());
            prop_assert!((p.d_zero(k).unwrap() - avg).abs() <= scale * du);
        }
    }

    #[test]
    fn length_is_at_least_domain(p in profile_strategy()) {
        let rho0 = p.grid().rho0();
        prop_assert!(p.discrete_length() >= rho0 * (1.0 - 4.0 * f64::EPSILON));
    }

    #[test]
    fn restriction_composes(k1 in 1usize..4, k2 in 1usize..4, base in 2usize..6, seed in any::<u64>()) {
        let n = base * k1 * k2;
        let values: Vec<f64> = (0..=n).map(|i| ((i as u64 ^ seed) % 97) as f64 * 0.1).collect();
        let f = MeshProfile::new(grid(2.0, n), values).unwrap();
        let two_steps = f.restrict(k1).unwrap().restrict(k2).unwrap();
        let one_step = f.restrict(k1 * k2).unwrap();
        prop_assert_eq!(two_steps.values(), one_step.values());
    }
}

#[test]
fn constant_profiles_have_minimal_length() {
    for n in [2, 7, 20, 160] {
        let p = MeshProfile::from_fn(grid(3.0, n), |_| 0.4).unwrap();
        // summation roundoff grows with the number of terms
        assert!((p.discrete_length() - 3.0).abs() <= 3.0 * n as f64 * f64::EPSILON);
        assert_eq!(p.dplus_sup_norm(), 0.0);
    }
}
