mod common;

use common::rng;
use ddmor::informativity::{check_interpolation, check_sysid, compute_moments};
use ddmor::simkit::{
    regenerate_circuit_data, simulate_io, simulate_state_space, ss_to_params, zoh_discretize, SimConfig,
    StateSpace,
};
use ddmor::trajectory::{fixtures, make_pair};
use ddmor::Tolerances;
use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Continuous-time system with `||A|| <= bound`, shifted left so it is stable.
fn random_continuous(g: &mut ChaCha8Rng, n: usize, bound: f64) -> StateSpace {
    let mut a = DMatrix::from_fn(n, n, |_, _| g.gen_range(-1.0..1.0));
    a -= DMatrix::identity(n, n) * (a.norm() + 0.1);
    a *= bound / a.norm();
    StateSpace::new(
        a,
        DVector::from_fn(n, |_, _| g.gen_range(-1.0..1.0)),
        RowDVector::from_fn(n, |_, _| g.gen_range(-1.0..1.0)),
        g.gen_range(-1.0..1.0),
    )
    .unwrap()
}

fn taylor_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * m / k as f64;
        sum += &term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_matches_state_space(seed in any::<u64>(), n in 1usize..6, dt in 0.05f64..0.5) {
        let mut g = rng(seed);
        let ss = zoh_discretize(&random_continuous(&mut g, n, 3.0), dt).unwrap();
        let params = ss_to_params(&ss).unwrap();
        let u: Vec<f64> = (0..50).map(|_| g.gen_range(-1.0..1.0)).collect();
        let y_ss = simulate_state_space(&ss, &u);
        let cfg = SimConfig { initial_outputs: y_ss[..n].to_vec(), input: u };
        let traj = simulate_io(&params, &cfg).unwrap();
        let scale = y_ss.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for (a, b) in traj.y().iter().zip(&y_ss) {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{} vs {}", a, b);
        }
    }

    #[test]
    fn zoh_matches_taylor_series(seed in any::<u64>(), n in 1usize..6, dt in 0.05f64..1.0) {
        let mut g = rng(seed);
        let ss = random_continuous(&mut g, n, 1.0 / dt);
        let d = zoh_discretize(&ss, dt).unwrap();
        let mut aug = DMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&(&ss.a * dt));
        aug.view_mut((0, n), (n, 1)).copy_from(&(&ss.b * dt));
        let e = taylor_exp(&aug);
        prop_assert!((d.a.clone() - e.view((0, 0), (n, n))).abs().max() <= 1e-10);
        prop_assert!((d.b.clone() - e.view((0, n), (n, 1)).column(0)).abs().max() <= 1e-10);
    }
}

#[test]
fn regenerated_circuit_data_gives_the_same_answers() {
    let tols = Tolerances::default();
    let fixture = make_pair(&fixtures::circuit());
    let regen = make_pair(&regenerate_circuit_data());
    assert_eq!(
        check_sysid(&fixture, &tols).unwrap().verdict,
        check_sysid(&regen, &tols).unwrap().verdict
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for s in [Complex64::new(r, r), Complex64::new(0.0, 0.0)] {
        let a = check_interpolation(&fixture, s, &tols).unwrap();
        let b = check_interpolation(&regen, s, &tols).unwrap();
        assert_eq!(a.verdict, b.verdict);
        if let (Some(x), Some(y)) = (a.moment, b.moment) {
            assert!((x - y).norm() < 1e-3);
        }
    }
    let a = compute_moments(&fixture, Complex64::new(0.5, 0.0), 1, &tols).unwrap();
    let b = compute_moments(&regen, Complex64::new(0.5, 0.0), 1, &tols).unwrap();
    assert!(a.informative() && b.informative());
    for (x, y) in a.moments.iter().zip(&b.moments) {
        assert!((x - y).norm() < 1e-3);
    }
}
