//! Seeded random states used by property tests, the acceptance suite and the CLI.
//!
//! All generators take a caller-owned RNG; use [`seeded`] for a portable,
//! reproducible stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rand::SeedableRng;
use std::f64::consts::PI;

use crate::numerics::{c, zero4, Mat2, Mat4, C64};
use crate::qstate::{make_x_state, BellDiagonalParams, DensityMatrix, XState};
use crate::freezing::check_freezing_x;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric Dirichlet(1, ..., 1) draw.
pub fn dirichlet<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [f64; N] {
    let mut w = [0.0; N];
    for v in w.iter_mut() {
        *v = Exp1.sample(rng);
    }
    let total: f64 = w.iter().sum();
    w.map(|v| v / total)
}

/// X state with Dirichlet populations and coherences drawn uniformly inside
/// their allowed disks (modulus scaled by a uniform factor, uniform phase).
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> XState {
    let [p11, p22, p33, p44] = dirichlet::<4, _>(rng);
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let phi14 = rng.gen_range(0.0..2.0 * PI);
    let phi23 = rng.gen_range(0.0..2.0 * PI);
    let m14 = u * (p11 * p44).sqrt();
    let m23 = v * (p22 * p33).sqrt();
    make_x_state(p11, p22, p33, p44, C64::from_polar(m14, phi14), C64::from_polar(m23, phi23))
        .expect("valid by construction")
}

/// X state satisfying both freezing conditions with `margin >= min_margin`.
pub fn random_freezing_x_state<R: Rng + ?Sized>(rng: &mut R, min_margin: f64) -> XState {
    loop {
        let [p11, p22, p33, p44] = dirichlet::<4, _>(rng);
        let cap = (p11 * p44).sqrt().min((p22 * p33).sqrt());
        let m = cap * rng.gen::<f64>().sqrt();
        let phi14 = rng.gen_range(0.0..2.0 * PI);
        let phi23 = rng.gen_range(0.0..2.0 * PI);
        let s = make_x_state(p11, p22, p33, p44, C64::from_polar(m, phi14), C64::from_polar(m, phi23))
            .expect("valid by construction");
        let verdict = check_freezing_x(&s);
        if verdict.holds && verdict.margin >= min_margin {
            return s;
        }
    }
}

/// Haar-random normalized pure state on two qubits.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    let mut psi = [c(0.0, 0.0); 4];
    for z in psi.iter_mut() {
        *z = c(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.map(|z| z / norm)
}

/// Mixture of four random pure states with Dirichlet weights.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let weights = dirichlet::<4, _>(rng);
    let mut m: Mat4 = zero4();
    for w in weights {
        let psi = random_pure(rng);
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += psi[i] * psi[j].conj() * w;
            }
        }
    }
    // Exact Hermiticity and unit trace before validation.
    for i in 0..4 {
        m[i][i] = c(m[i][i].re, 0.0);
        for j in (i + 1)..4 {
            m[j][i] = m[i][j].conj();
        }
    }
    let tr: f64 = (0..4).map(|i| m[i][i].re).sum();
    for v in m.iter_mut().flatten() {
        *v /= tr;
    }
    DensityMatrix::new(m).expect("mixture of pure states is a valid density")
}

/// Haar-random element of SU(2), from a uniform point on the 3-sphere.
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut q = [0.0f64; 4];
    for v in q.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [a, b, cc, d] = q.map(|v| v / n);
    [[c(a, d), c(cc, b)], [c(-cc, b), c(a, -d)]]
}

/// Bell-diagonal parameters drawn uniformly from `[-1, 1]^5` until physical.
/// A third of the draws pin `c1 = 0` and another third `c2 = 0`, so both
/// branches of the freezing condition get exercised.
pub fn random_bell_params<R: Rng + ?Sized>(rng: &mut R) -> BellDiagonalParams {
    loop {
        let mut p = BellDiagonalParams::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)],
        );
        match rng.gen_range(0..3) {
            0 => p.c[0] = 0.0,
            1 => p.c[1] = 0.0,
            _ => {}
        }
        if crate::qstate::bell_diagonal_state(&p).is_ok() {
            return p;
        }
    }
}
