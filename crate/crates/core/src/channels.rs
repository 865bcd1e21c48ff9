//! Local dephasing dynamics.
//!
//! Markovian phase damping uses the trace-preserving Kraus pair
//! `E1 = sqrt(1 - p/2) I`, `E2 = sqrt(p/2) Z`, which multiplies the
//! single-qubit coherence by `1 - p`. The non-Markovian colored-noise channel
//! is `sqrt((1 + L)/2) I`, `sqrt((1 - L)/2) sigma_i` with the memory kernel
//! `L(nu) = e^-nu [cos(mu nu) + sin(mu nu) / mu]`, `mu = sqrt((4 a tau)^2 - 1)`,
//! acting independently on both qubits.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freezing::{check_freezing_bell, check_freezing_x, FROZEN_ATOL};
use crate::gmqd::{gmqd_svd, x_lambdas, GmqdBreakdown};
use crate::numerics::{
    c, dagger2, identity2, kron, matmul2, matmul4, pauli, dagger4, zero4, Mat2, TOL,
};
use crate::qstate::{bell_diagonal_state, x_to_density, BellDiagonalParams, DensityMatrix, XState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Qubit {
    A,
    B,
}

/// Phase-damping strengths applied to qubits A and B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DephasingParams {
    pub p_a: f64,
    pub p_b: f64,
}

impl DephasingParams {
    pub fn new(p_a: f64, p_b: f64) -> Result<Self> {
        for p in [p_a, p_b] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("dephasing strength {p} outside [0, 1]")));
            }
        }
        Ok(Self { p_a, p_b })
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

/// Colored-noise channel parameters: rate `a` (1/s), memory time `tau` (s)
/// and the Pauli axis of the noise (1 = bit flip, 2 = bit-phase flip,
/// 3 = phase flip).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColoredNoiseParams {
    pub a: f64,
    pub tau: f64,
    pub direction: usize,
}

impl ColoredNoiseParams {
    pub fn new(a: f64, tau: f64, direction: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("a and tau must be positive, got a={a}, tau={tau}")));
        }
        if !(1..=3).contains(&direction) {
            return Err(Error::InvalidParameter(format!("noise direction {direction} not in 1..=3")));
        }
        Ok(Self { a, tau, direction })
    }

    /// `mu^2 = (4 a tau)^2 - 1`; negative in the overdamped regime.
    pub fn mu_squared(&self) -> f64 {
        let k = 4.0 * self.a * self.tau;
        k * k - 1.0
    }

    /// Dimensionless time `nu = t / (2 tau)`.
    pub fn nu_of_time(&self, t: f64) -> f64 {
        t / (2.0 * self.tau)
    }
}

/// Single-qubit Kraus operators acting on one side of the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<Mat2>,
    pub target: Qubit,
}

impl KrausSet {
    pub fn phase_damping(p: f64, target: Qubit) -> Self {
        let id = identity2();
        let z = pauli(3);
        let a = (1.0 - 0.5 * p).sqrt();
        let b = (0.5 * p).sqrt();
        Self { operators: vec![scale2(&id, a), scale2(&z, b)], target }
    }

    pub fn colored_noise(lambda: f64, direction: usize, target: Qubit) -> Self {
        let id = identity2();
        let a = ((1.0 + lambda) / 2.0).max(0.0).sqrt();
        let b = ((1.0 - lambda) / 2.0).max(0.0).sqrt();
        Self { operators: vec![scale2(&id, a), scale2(&pauli(direction), b)], target }
    }

    /// `|| sum K^dag K - I ||` (max entry modulus).
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = [[c(0.0, 0.0); 2]; 2];
        for k in &self.operators {
            let kk = matmul2(&dagger2(k), k);
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += kk[i][j];
                }
            }
        }
        let id = identity2();
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((sum[i][j] - id[i][j]).norm());
            }
        }
        d
    }
}

fn scale2(m: &Mat2, s: f64) -> Mat2 {
    m.map(|row| row.map(|z| z * s))
}

pub fn apply_kraus(d: &DensityMatrix, k: &KrausSet) -> Result<DensityMatrix> {
    let defect = k.completeness_defect();
    if defect > TOL.kraus_completeness {
        return Err(Error::IncompleteKraus { defect });
    }
    let id = identity2();
    let mut out = zero4();
    for op in &k.operators {
        let big = match k.target {
            Qubit::A => kron(op, &id),
            Qubit::B => kron(&id, op),
        };
        let term = matmul4(&matmul4(&big, d.entries()), &dagger4(&big));
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += term[i][j];
            }
        }
    }
    DensityMatrix::new(out)
}

/// Local phase damping on both qubits. Populations are untouched; both
/// coherences shrink by `(1 - p_a)(1 - p_b)`.
pub fn dephase_markov(s: &XState, p: &DephasingParams) -> XState {
    let factor = (1.0 - p.p_a) * (1.0 - p.p_b);
    s.with_coherences(s.rho14() * factor, s.rho23() * factor)
}

/// Memory kernel of the colored-noise channel. For `4 a tau < 1` the
/// trigonometric functions continue to their hyperbolic counterparts and for
/// `4 a tau = 1` to the limit `e^-nu (1 + nu)`.
pub fn lambda_colored(nu: f64, cn: &ColoredNoiseParams) -> f64 {
    let mu2 = cn.mu_squared();
    let decay = (-nu).exp();
    if mu2 > 0.0 {
        let mu = mu2.sqrt();
        decay * ((mu * nu).cos() + (mu * nu).sin() / mu)
    } else if mu2 < 0.0 {
        let kappa = (-mu2).sqrt();
        decay * ((kappa * nu).cosh() + (kappa * nu).sinh() / kappa)
    } else {
        decay * (1.0 + nu)
    }
}

fn require_bell(b: &BellDiagonalParams) -> Result<()> {
    if b.r != 0.0 || b.s != 0.0 {
        return Err(Error::UnsupportedSubclass(format!(
            "colored-noise evolution is defined for Bell-diagonal states only (r = s = 0), got r={}, s={}",
            b.r, b.s
        )));
    }
    Ok(())
}

/// Bell-diagonal correlations after colored noise on both qubits: the
/// component along the noise axis is kept, the other two scale by `L(nu)^2`.
pub fn colored_step(b: &BellDiagonalParams, nu: f64, cn: &ColoredNoiseParams) -> Result<BellDiagonalParams> {
    require_bell(b)?;
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be nonnegative, got {nu}")));
    }
    let l2 = lambda_colored(nu, cn).powi(2);
    let mut out = *b;
    for (k, ck) in out.c.iter_mut().enumerate() {
        if k + 1 != cn.direction {
            *ck *= l2;
        }
    }
    bell_diagonal_state(&out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    Markov { p_max: f64 },
    Colored { a: f64, tau: f64, direction: usize, nu_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    /// `p` for Markovian runs, `nu` for colored noise.
    pub param: f64,
    pub state: XState,
    pub gmqd: GmqdBreakdown,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMetadata {
    pub channel: ChannelKind,
    pub steps: usize,
    pub seed: Option<u64>,
    /// Plateau level predicted by the freezing conditions, when they hold.
    pub frozen_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub metadata: TrajectoryMetadata,
}

impl Trajectory {
    pub fn params(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.param).collect()
    }

    pub fn gmqd_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gmqd.value).collect()
    }

    /// Recomputes every record's discord from the dense state through the
    /// singular-value route; fails if any record disagrees by more than `tol`.
    pub fn audit(&self, tol: f64) -> Result<f64> {
        let worst = self
            .records
            .par_iter()
            .map(|r| (gmqd_svd(&x_to_density(&r.state)).value - r.gmqd.value).abs())
            .reduce(|| 0.0, f64::max);
        if worst > tol {
            return Err(Error::CheckFailed { what: "trajectory closed-form GMQD vs SVD".into(), deviation: worst });
        }
        Ok(worst)
    }
}

fn uniform_grid(max: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| max * k as f64 / (steps - 1) as f64).collect()
}

fn record(param: f64, state: XState, reference: Option<f64>) -> TrajectoryRecord {
    let gmqd = x_lambdas(&state);
    let frozen = reference.is_some_and(|v| (gmqd.value - v).abs() <= FROZEN_ATOL);
    TrajectoryRecord { param, state, gmqd, frozen }
}

/// Symmetric phase damping swept over `p` in `[0, p_max]` on a uniform grid.
pub fn markov_trajectory(s: &XState, steps: usize, p_max: f64) -> Result<Trajectory> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("trajectory needs at least 2 steps, got {steps}")));
    }
    if !(0.0..=1.0).contains(&p_max) {
        return Err(Error::InvalidParameter(format!("p_max {p_max} outside [0, 1]")));
    }
    let verdict = check_freezing_x(s);
    let reference = verdict.holds.then_some(verdict.frozen_value);
    let records = uniform_grid(p_max, steps)
        .into_par_iter()
        .map(|p| {
            let params = DephasingParams::symmetric(p).expect("grid inside [0, 1]");
            record(p, dephase_markov(s, &params), reference)
        })
        .collect();
    Ok(Trajectory {
        records,
        metadata: TrajectoryMetadata {
            channel: ChannelKind::Markov { p_max },
            steps,
            seed: None,
            frozen_reference: reference,
        },
    })
}

/// Bell-diagonal state under colored noise on both qubits, sampled on a
/// uniform grid of the dimensionless time `nu` in `[0, nu_max]`.
pub fn colored_trajectory(
    b: &BellDiagonalParams,
    cn: &ColoredNoiseParams,
    nu_max: f64,
    steps: usize,
) -> Result<Trajectory> {
    require_bell(b)?;
    bell_diagonal_state(b)?;
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("trajectory needs at least 2 steps, got {steps}")));
    }
    if !(nu_max >= 0.0 && nu_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("nu_max must be finite and nonnegative, got {nu_max}")));
    }
    let verdict = check_freezing_bell(b);
    let reference = verdict.holds.then_some(verdict.frozen_value);
    let records = uniform_grid(nu_max, steps)
        .into_par_iter()
        .map(|nu| {
            let evolved = colored_step(b, nu, cn)?;
            Ok(record(nu, bell_diagonal_state(&evolved)?, reference))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        records,
        metadata: TrajectoryMetadata {
            channel: ChannelKind::Colored { a: cn.a, tau: cn.tau, direction: cn.direction, nu_max },
            steps,
            seed: None,
            frozen_reference: reference,
        },
    })
}
