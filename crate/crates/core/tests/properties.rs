use rand::Rng;

use discord_core::channels::{apply_kraus, dephase_markov, DephasingParams, KrausSet, Qubit};
use discord_core::freezing::{check_freezing_x, freeze_endpoint_markov};
use discord_core::gmqd::{gmqd_svd, x_lambdas};
use discord_core::numerics::{max_abs_diff4, TOL};
use discord_core::qstate::{
    bloch_compose, bloch_decompose, build_r_prime, density_to_x, x_state_bloch, x_to_density, StateInput,
};
use discord_core::sampling::{random_density, random_freezing_x_state, random_x_state, seeded};

#[test]
fn x_state_dense_round_trip() {
    let mut rng = seeded(101);
    for _ in 0..10_000 {
        let s = random_x_state(&mut rng);
        let back = density_to_x(&x_to_density(&s), TOL.x_structure).unwrap();
        assert_eq!(back, s);
    }
}

#[test]
fn bloch_round_trip() {
    let mut rng = seeded(102);
    for _ in 0..2_000 {
        let d = random_density(&mut rng);
        let back = bloch_compose(&bloch_decompose(&d)).unwrap();
        assert!(max_abs_diff4(back.entries(), d.entries()) < 1e-13);
    }
}

#[test]
fn x_state_bloch_matches_dense_decomposition() {
    let mut rng = seeded(103);
    for _ in 0..10_000 {
        let s = random_x_state(&mut rng);
        let fast = x_state_bloch(&s);
        let slow = bloch_decompose(&x_to_density(&s));
        for i in 0..3 {
            assert!((fast.x[i] - slow.x[i]).abs() < 1e-14);
            assert!((fast.y[i] - slow.y[i]).abs() < 1e-14);
            for j in 0..3 {
                assert!((fast.r[i][j] - slow.r[i][j]).abs() < 1e-14);
            }
        }
        let rp = build_r_prime(&fast);
        assert!((rp.frobenius_sq() - fast.weight()).abs() < 1e-14);
    }
}

#[test]
fn closed_form_matches_svd_on_random_x_states() {
    let mut rng = seeded(104);
    for _ in 0..10_000 {
        let s = random_x_state(&mut rng);
        let closed = x_lambdas(&s).value;
        let svd = gmqd_svd(&x_to_density(&s)).value;
        assert!((closed - svd).abs() < 1e-12, "{closed} vs {svd}");
    }
}

#[test]
fn dephasing_semigroup_and_ratio() {
    let mut rng = seeded(105);
    for _ in 0..1_000 {
        let s = random_x_state(&mut rng);
        let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
        let twice = dephase_markov(
            &dephase_markov(&s, &DephasingParams::symmetric(p1).unwrap()),
            &DephasingParams::symmetric(p2).unwrap(),
        );
        let once = dephase_markov(&s, &DephasingParams::symmetric(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap());
        assert!((twice.rho14() - once.rho14()).norm() < 1e-14);
        assert!((twice.rho23() - once.rho23()).norm() < 1e-14);
        assert_eq!(twice.diagonal(), s.diagonal());
        if s.rho23().norm() > 1e-6 && once.rho23().norm() > 1e-200 {
            let before = s.rho14().norm() / s.rho23().norm();
            let after = once.rho14().norm() / once.rho23().norm();
            assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        }
    }
}

#[test]
fn dephasing_matches_kraus_on_dense_embedding() {
    let mut rng = seeded(106);
    for _ in 0..1_000 {
        let s = random_x_state(&mut rng);
        let p = DephasingParams::new(rng.gen(), rng.gen()).unwrap();
        let d = x_to_density(&s);
        let a = apply_kraus(&d, &KrausSet::phase_damping(p.p_a, Qubit::A)).unwrap();
        let ab = apply_kraus(&a, &KrausSet::phase_damping(p.p_b, Qubit::B)).unwrap();
        let closed = x_to_density(&dephase_markov(&s, &p));
        assert!(max_abs_diff4(ab.entries(), closed.entries()) < 1e-14);
    }
}

#[test]
fn quartic_decay_after_endpoint_is_continuous() {
    let mut rng = seeded(107);
    for _ in 0..1_000 {
        let s = random_freezing_x_state(&mut rng, 0.01);
        let a = s.rho14().norm();
        let p_star = freeze_endpoint_markov(&s).unwrap().p_star;
        let at = |p: f64| x_lambdas(&dephase_markov(&s, &DephasingParams::symmetric(p).unwrap())).value;
        assert!((at(p_star - 1e-6) - at(p_star + 1e-6)).abs() < 1e-6);
        for k in 1..=10 {
            let p = p_star + (1.0 - p_star) * k as f64 / 10.0;
            let expected = 4.0 * a * a * (1.0 - p).powi(4);
            assert!((at(p) - expected).abs() < 1e-10);
        }
        assert!((at(0.0) - check_freezing_x(&s).frozen_value).abs() < 1e-12);
    }
}

#[test]
fn state_json_round_trip() {
    let mut rng = seeded(108);
    for _ in 0..500 {
        let s = random_x_state(&mut rng);
        let text = serde_json::to_string(&StateInput::from_x_state(&s)).unwrap();
        let parsed: StateInput = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.resolve().unwrap().x_state().unwrap(), s);
    }
}
