//! Geometric measure of quantum discord (measurement on qubit A).
//!
//! Three evaluators that do not share code paths beyond the Bloch
//! decomposition:
//!
//! * [`gmqd_k`]: `1/4 (||x||^2 + ||R||^2 - k_max)` with `k_max` the largest
//!   eigenvalue of `K = x x^T + R R^T`.
//! * [`gmqd_svd`]: `1/4 (sum_k l_k^2 - max_k l_k^2)` over the singular values
//!   of `[x | R]`.
//! * [`x_lambdas`]: the same quantity for X states from closed-form squared
//!   singular values.
//!
//! [`gmqd_oracle`] minimizes `||rho - Pi(rho)||^2` over projective
//! measurements `Pi` on qubit A directly, without any closed form.

use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::numerics::{
    c, hs_norm_sq4, kron, matmul4, pauli, singular_values, sym3_eigenvalues, zero4, Mat2, Mat4, TOL,
};
use crate::qstate::{bloch_decompose, build_r_prime, DensityMatrix, XState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmqdBreakdown {
    /// Squared singular values of `[x | R]`, or the closed-form triple for X states.
    pub lambda_sq: [f64; 3],
    /// Eigenvalues of `K`, when evaluated through it.
    pub k_eigen: Option<[f64; 3]>,
    pub value: f64,
    /// Index into `lambda_sq` of the first maximal entry.
    pub max_index: usize,
}

impl GmqdBreakdown {
    pub fn from_lambda_sq(lambda_sq: [f64; 3]) -> Self {
        let max = lambda_sq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_index = lambda_sq.iter().position(|&v| v >= max - TOL.max_tie).unwrap_or(0);
        // Summing the two smaller entries avoids cancelling a tiny discord
        // against the dominant one.
        let top = lambda_sq.iter().position(|&v| v == max).unwrap_or(0);
        let rest: f64 = (0..3).filter(|&k| k != top).map(|k| lambda_sq[k]).sum();
        Self { lambda_sq, k_eigen: None, value: (0.25 * rest).max(0.0), max_index }
    }

    /// `lambda_sq` sorted in descending order.
    pub fn sorted_lambda_sq(&self) -> [f64; 3] {
        let mut v = self.lambda_sq;
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

pub fn gmqd_k(d: &DensityMatrix) -> GmqdBreakdown {
    let b = bloch_decompose(d);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = b.x[i] * b.x[j] + (0..3).map(|l| b.r[i][l] * b.r[j][l]).sum::<f64>();
        }
    }
    let eig = sym3_eigenvalues(&k).map(|v| v.max(0.0));
    let value = (0.25 * (b.weight() - eig[0])).max(0.0);
    GmqdBreakdown { lambda_sq: eig, k_eigen: Some(eig), value, max_index: 0 }
}

pub fn gmqd_svd(d: &DensityMatrix) -> GmqdBreakdown {
    let sv = singular_values(&build_r_prime(&bloch_decompose(d)));
    GmqdBreakdown::from_lambda_sq(sv.map(|s| s * s))
}

/// Closed-form squared singular values of an X state.
///
/// The cross term of the first two entries is `|rho14| |rho23|`, so
/// `lambda_sq[0] >= lambda_sq[1]` always and the triple equals the squared
/// singular values of `[x | R]` for complex coherences as well.
pub fn x_lambdas(s: &XState) -> GmqdBreakdown {
    let a = s.rho14().norm();
    let b = s.rho23().norm();
    let d13 = s.rho11() - s.rho33();
    let d24 = s.rho22() - s.rho44();
    let l1 = 4.0 * (a + b) * (a + b);
    let l2 = 4.0 * (a - b) * (a - b);
    let l3 = 2.0 * (d13 * d13 + d24 * d24);
    GmqdBreakdown::from_lambda_sq([l1, l2, l3])
}

/// Projective measurement axis on qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementDirection {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementDirection {
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Canonical angles (`theta` in `[0, pi]`, `phi` in `[0, 2 pi)`) for any direction.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let n = Self { theta, phi }.unit_vector();
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let mut phi = n[1].atan2(n[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self { theta, phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub direction: MeasurementDirection,
}

/// Default number of polar-angle grid points for the oracle.
pub const ORACLE_DEFAULT_STEPS: usize = 181;

const REFINE_FTOL: f64 = 1e-13;
const REFINE_MAX_ITER: usize = 2000;

/// `||rho - sum_k (P_k (x) I) rho (P_k (x) I)||^2` for the measurement along `dir`.
pub fn measurement_distance(rho: &Mat4, dir: MeasurementDirection) -> f64 {
    let n = dir.unit_vector();
    let id = pauli(0);
    let mut total = zero4();
    for sign in [1.0, -1.0] {
        let mut p: Mat2 = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.5 * id[i][j];
                for (k, nk) in n.iter().enumerate() {
                    v += 0.5 * sign * nk * pauli(k + 1)[i][j];
                }
                p[i][j] = v;
            }
        }
        let big = kron(&p, &id);
        let proj = matmul4(&matmul4(&big, rho), &big);
        for i in 0..4 {
            for j in 0..4 {
                total[i][j] += proj[i][j];
            }
        }
    }
    let mut diff = zero4();
    for i in 0..4 {
        for j in 0..4 {
            diff[i][j] = rho[i][j] - total[i][j];
        }
    }
    hs_norm_sq4(&diff)
}

fn candidate_cmp(a: &(f64, f64, f64), b: &(f64, f64, f64)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
}

/// Brute-force discord: grid search over measurement axes on qubit A, then
/// optional Nelder-Mead refinement from the best grid point.
///
/// The polar grid has `coarse_steps` points on `[0, pi]`; the azimuthal grid
/// has `2 (coarse_steps - 1)` points on `[0, 2 pi)`, so both share one spacing.
pub fn gmqd_oracle(d: &DensityMatrix, coarse_steps: usize, refine: bool) -> OracleResult {
    assert!(coarse_steps >= 16, "oracle grid needs at least 16 polar steps");
    let rho = *d.entries();
    let n_theta = coarse_steps;
    let n_phi = 2 * (coarse_steps - 1);
    let h = PI / (n_theta - 1) as f64;

    let best = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = h * i as f64;
            (0..n_phi)
                .map(|j| {
                    let phi = h * j as f64;
                    (measurement_distance(&rho, MeasurementDirection { theta, phi }), theta, phi)
                })
                .min_by(candidate_cmp)
                .expect("non-empty grid")
        })
        .reduce(|| (f64::INFINITY, 0.0, 0.0), |a, b| if candidate_cmp(&b, &a).is_lt() { b } else { a });

    let (mut value, mut theta, mut phi) = best;
    if refine {
        let f = |x: [f64; 2]| measurement_distance(&rho, MeasurementDirection { theta: x[0], phi: x[1] });
        let (x, fx) = nelder_mead(f, [theta, phi], h);
        if fx < value {
            value = fx;
            theta = x[0];
            phi = x[1];
        }
    }
    OracleResult { value, direction: MeasurementDirection::canonical(theta, phi) }
}

fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    for _ in 0..REFINE_MAX_ITER {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|k| simplex[k]);
        values = order.map(|k| values[k]);
        if values[2] - values[0] <= REFINE_FTOL {
            break;
        }
        let centroid = [0.5 * (simplex[0][0] + simplex[1][0]), 0.5 * (simplex[0][1] + simplex[1][1])];
        let along = |t: f64| {
            [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best], values[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, dagger4, C64};
    use crate::qstate::{bell_diagonal_state, make_x_state, x_to_density, BellDiagonalParams};
    use crate::sampling::{random_density, random_unitary2, random_x_state, seeded};

    fn s1() -> XState {
        make_x_state(0.35, 0.15, 0.25, 0.25, c(0.1, 0.0), c(0.1, 0.0)).unwrap()
    }

    fn bell_density() -> DensityMatrix {
        x_to_density(&make_x_state(0.5, 0.0, 0.0, 0.5, c(0.5, 0.0), c(0.0, 0.0)).unwrap())
    }

    fn fig2_initial() -> DensityMatrix {
        x_to_density(&bell_diagonal_state(&BellDiagonalParams::bell([0.0, 0.35, 0.1])).unwrap())
    }

    fn basis(k: usize) -> DensityMatrix {
        let mut psi = [C64::new(0.0, 0.0); 4];
        psi[k] = c(1.0, 0.0);
        DensityMatrix::pure(psi).unwrap()
    }

    #[test]
    fn k_route_examples() {
        assert_eq!(gmqd_k(&DensityMatrix::maximally_mixed()).value, 0.0);
        let b = gmqd_k(&bell_density());
        assert!((b.value - 0.5).abs() < 1e-14);
        let k = b.k_eigen.unwrap();
        assert!(k.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((gmqd_k(&fig2_initial()).value - 0.0025).abs() < 1e-14);
    }

    #[test]
    fn svd_route_examples() {
        for d in [DensityMatrix::maximally_mixed(), bell_density(), fig2_initial(), basis(1)] {
            assert!((gmqd_k(&d).value - gmqd_svd(&d).value).abs() < 1e-12);
        }
        assert!(gmqd_svd(&basis(1)).value.abs() < 1e-15);
        let b = gmqd_svd(&x_to_density(&s1()));
        let l = b.sorted_lambda_sq();
        for (got, want) in l.iter().zip([0.16, 0.04, 0.0]) {
            assert!((got - want).abs() < 1e-14, "{l:?}");
        }
        assert!((b.value - 0.01).abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let b = x_lambdas(&s1());
        for (got, want) in b.lambda_sq.iter().zip([0.16, 0.0, 0.04]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((b.value - 0.01).abs() < 1e-15);
        assert_eq!(b.max_index, 0);

        let s = make_x_state(0.4, 0.1, 0.3, 0.2, c(0.15, 0.0), c(0.05, 0.0)).unwrap();
        let b = x_lambdas(&s);
        for (got, want) in b.lambda_sq.iter().zip([0.16, 0.04, 0.04]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((b.value - 0.02).abs() < 1e-15);
        assert!((gmqd_svd(&x_to_density(&s)).value - 0.02).abs() < 1e-14);

        let mm = make_x_state(0.25, 0.25, 0.25, 0.25, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(x_lambdas(&mm).lambda_sq, [0.0; 3]);
        assert_eq!(x_lambdas(&mm).value, 0.0);
    }

    #[test]
    fn tie_records_first_maximum() {
        let b = GmqdBreakdown::from_lambda_sq([0.04, 0.16, 0.16]);
        assert_eq!(b.max_index, 1);
        assert!((b.value - 0.05).abs() < 1e-15);
    }

    #[test]
    fn oracle_examples() {
        let r = gmqd_oracle(&basis(0), 16, true);
        assert!(r.value.abs() < 1e-12);
        let r = gmqd_oracle(&bell_density(), 31, true);
        assert!((r.value - 0.5).abs() < 1e-6, "{r:?}");
        let r = gmqd_oracle(&x_to_density(&s1()), 31, true);
        assert!((r.value - 0.01).abs() < 1e-6, "{r:?}");
        // The optimal axis for this state is x (the largest K eigenvector).
        let n = r.direction.unit_vector();
        assert!(n[0].abs() > 1.0 - 1e-4, "{n:?}");
    }

    #[test]
    fn oracle_grid_never_beats_closed_form() {
        let mut rng = seeded(99);
        for _ in 0..10 {
            let d = random_density(&mut rng);
            let coarse = gmqd_oracle(&d, 16, false);
            assert!(coarse.value >= gmqd_svd(&d).value - 1e-12);
        }
    }

    #[test]
    fn classical_quantum_states_have_zero_discord() {
        let mut rng = seeded(5);
        for _ in 0..500 {
            let a = random_density(&mut rng);
            let b = random_density(&mut rng);
            let w: f64 = rand::Rng::gen(&mut rng);
            // Reduced states of B conditioned on A in |0> and |1>.
            let cond = |d: &DensityMatrix| {
                let e = d.entries();
                let mut m = [[c(0.0, 0.0); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = e[i][j] + e[i + 2][j + 2];
                    }
                }
                m
            };
            let (ra, rb) = (cond(&a), cond(&b));
            let mut m = zero4();
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = ra[i][j] * w;
                    m[i + 2][j + 2] = rb[i][j] * (1.0 - w);
                }
            }
            let d = DensityMatrix::new(m).unwrap();
            assert!(gmqd_svd(&d).value <= 1e-12);
            assert!(gmqd_k(&d).value <= 1e-12);
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = seeded(17);
        for _ in 0..500 {
            let d = random_density(&mut rng);
            let u = kron(&random_unitary2(&mut rng), &random_unitary2(&mut rng));
            let rotated = matmul4(&matmul4(&u, d.entries()), &dagger4(&u));
            let d2 = DensityMatrix::new(rotated).unwrap();
            assert!((gmqd_svd(&d).value - gmqd_svd(&d2).value).abs() < 1e-10);
        }
    }

    #[test]
    fn value_within_bounds_and_consistent() {
        let mut rng = seeded(23);
        for _ in 0..1000 {
            let s = random_x_state(&mut rng);
            for b in [x_lambdas(&s), gmqd_svd(&x_to_density(&s)), gmqd_k(&x_to_density(&s))] {
                assert!(b.value >= 0.0 && b.value <= 0.5 + 1e-12);
                let max = b.lambda_sq.iter().copied().fold(f64::MIN, f64::max);
                let sum: f64 = b.lambda_sq.iter().sum();
                assert!((b.value - 0.25 * (sum - max)).abs() < 1e-12);
            }
        }
    }
}
