//! Freezing of geometric discord under local dephasing.
//!
//! An X state keeps its discord constant for a finite stretch of dephasing iff
//!
//! 1. `|rho14| = |rho23|`, and
//! 2. `8 |rho14 rho23| > (rho11 - rho33)^2 + (rho22 - rho44)^2`.
//!
//! The first condition is the vanishing of `|rho14|^2 + |rho23|^2 - 2 |rho14 rho23|
//! = (|rho14| - |rho23|)^2`. Both are tested with the slack `TOL.freeze`; the
//! strict inequality means boundary cases count as not freezing.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::Trajectory;
use crate::error::{Error, Result};
use crate::gmqd::x_lambdas;
use crate::qstate::{bell_diagonal_state, BellDiagonalParams, XState};
use crate::numerics::TOL;

/// Absolute tolerance for flagging a trajectory record as frozen.
pub const FROZEN_ATOL: f64 = 1e-9;

/// Absolute tolerance for grouping records into frozen intervals. Plateau
/// values are reproduced to ~1e-17; at 1e-9 the flat neighbourhood of a
/// smooth extremum on a fine grid also passes as a run.
pub const INTERVAL_ATOL: f64 = 1e-12;

/// Plateaus at or below this level are reported as trivial (zero discord).
pub const NEGLIGIBLE_LEVEL: f64 = 1e-6;

/// Records needed before a constant run counts as an interval.
pub const MIN_INTERVAL_RECORDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreezingVerdict {
    pub holds: bool,
    /// `| |rho14| - |rho23| |`.
    pub equal_coherence_defect: f64,
    /// `8 |rho14 rho23| - (rho11 - rho33)^2 - (rho22 - rho44)^2`.
    pub margin: f64,
    /// Plateau level `lambda_3^2 / 4`.
    pub frozen_value: f64,
}

fn verdict(equal_coherence_defect: f64, margin: f64, frozen_value: f64) -> FreezingVerdict {
    FreezingVerdict {
        holds: equal_coherence_defect <= TOL.freeze && margin > TOL.freeze,
        equal_coherence_defect,
        margin,
        frozen_value,
    }
}

pub fn check_freezing_x(s: &XState) -> FreezingVerdict {
    let a = s.rho14().norm();
    let b = s.rho23().norm();
    let d13 = s.rho11() - s.rho33();
    let d24 = s.rho22() - s.rho44();
    let populations = d13 * d13 + d24 * d24;
    // lambda_3^2 = 2 * populations
    verdict((a - b).abs(), 8.0 * a * b - populations, populations / 2.0)
}

/// Freezing test for `1/4 [I + r Z(x)I + s I(x)Z + sum c_i sigma_i (x) sigma_i]`:
/// `c1 = 0, c2^2 > r^2 + c3^2` or `c2 = 0, c1^2 > r^2 + c3^2`.
///
/// The verdict fields are expressed in X-state units (`|rho14| = |c1 - c2| / 4`,
/// `|rho23| = |c1 + c2| / 4`) so they compare directly with [`check_freezing_x`].
pub fn check_freezing_bell(b: &BellDiagonalParams) -> FreezingVerdict {
    let [c1, c2, c3] = b.c;
    let bound = b.r * b.r + c3 * c3;
    // One branch per vanishing transverse component.
    let branch = |zero: f64, other: f64| (zero.abs() / 2.0, (other * other - zero * zero - bound) / 2.0);
    let first = branch(c1, c2);
    let second = branch(c2, c1);
    let frozen_value = bound / 4.0;
    let v1 = verdict(first.0, first.1, frozen_value);
    let v2 = verdict(second.0, second.1, frozen_value);
    match (v1.holds, v2.holds) {
        (true, _) => v1,
        (false, true) => v2,
        // Report the branch whose vanishing component is smaller.
        _ if c1.abs() <= c2.abs() => v1,
        _ => v2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreezeEndpoint {
    /// Dephasing strength at which the plateau ends.
    pub p_star: f64,
    /// The plateau sits at zero discord.
    pub trivial: bool,
}

/// End of the plateau under symmetric Markovian dephasing: the point where
/// `lambda_1^2 (1 - p)^4` falls to `lambda_3^2`.
pub fn freeze_endpoint_markov(s: &XState) -> Result<FreezeEndpoint> {
    let v = check_freezing_x(s);
    if !v.holds {
        return Err(Error::Precondition(format!(
            "freezing conditions do not hold (coherence defect {:e}, margin {:e})",
            v.equal_coherence_defect, v.margin
        )));
    }
    let l = x_lambdas(s).lambda_sq;
    let trivial = l[2] <= TOL.freeze;
    let p_star = if l[2] <= 0.0 { 1.0 } else { 1.0 - (l[2] / l[0]).powf(0.25) };
    Ok(FreezeEndpoint { p_star, trivial })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrozenInterval {
    pub start: f64,
    pub end: f64,
    pub level: f64,
    pub trivial: bool,
}

/// Maximal runs of records whose discord stays within `atol` of the run's
/// first record, at least [`MIN_INTERVAL_RECORDS`] long. Runs at a level
/// below `max(atol, NEGLIGIBLE_LEVEL)` are flagged trivial: the slowly
/// vanishing tail of a decay forms such runs without being frozen.
pub fn detect_frozen_intervals(t: &Trajectory, atol: f64) -> Vec<FrozenInterval> {
    let recs = &t.records;
    let mut out = Vec::new();
    let mut i = 0;
    while i < recs.len() {
        let level = recs[i].gmqd.value;
        let mut j = i + 1;
        while j < recs.len() && (recs[j].gmqd.value - level).abs() <= atol {
            j += 1;
        }
        if j - i >= MIN_INTERVAL_RECORDS {
            out.push(FrozenInterval {
                start: recs[i].param,
                end: recs[j - 1].param,
                level,
                trivial: level <= atol.max(NEGLIGIBLE_LEVEL),
            });
            i = j;
        } else {
            i += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionMembership {
    pub physical: bool,
    pub freezing: bool,
}

pub fn region_membership(r: f64, s: f64, c1: f64, c2: f64, c3: f64) -> RegionMembership {
    let p = BellDiagonalParams::new(r, s, [c1, c2, c3]);
    let physical = bell_diagonal_state(&p).is_ok();
    RegionMembership { physical, freezing: physical && check_freezing_bell(&p).holds }
}

/// Which transverse correlation is scanned against `c3` (the other is zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanAxes {
    C2C3,
    C1C3,
}

impl ScanAxes {
    pub fn header(&self) -> &'static str {
        match self {
            ScanAxes::C2C3 => "c2,c3,physical,freezing",
            ScanAxes::C1C3 => "c1,c3,physical,freezing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    /// Scanned transverse correlation (`c2` or `c1`).
    pub transverse: f64,
    pub c3: f64,
    pub membership: RegionMembership,
}

/// `grid x grid` scan of `[-1, 1]^2`, row-major with the transverse
/// coordinate outermost.
pub fn scan_region(r: f64, s: f64, axes: ScanAxes, grid: usize) -> Result<Vec<ScanRow>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("scan grid must be at least 2, got {grid}")));
    }
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / (grid - 1) as f64;
    Ok((0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (u, c3) = (coord(idx / grid), coord(idx % grid));
            let membership = match axes {
                ScanAxes::C2C3 => region_membership(r, s, 0.0, u, c3),
                ScanAxes::C1C3 => region_membership(r, s, u, 0.0, c3),
            };
            ScanRow { transverse: u, c3, membership }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{colored_trajectory, dephase_markov, markov_trajectory, ColoredNoiseParams, DephasingParams};
    use crate::numerics::c;
    use crate::qstate::make_x_state;
    use crate::sampling::{random_bell_params, random_freezing_x_state, random_x_state, seeded};
    use rand::Rng;

    fn s1() -> XState {
        make_x_state(0.35, 0.15, 0.25, 0.25, c(0.1, 0.0), c(0.1, 0.0)).unwrap()
    }

    #[test]
    fn x_verdict_examples() {
        let v = check_freezing_x(&s1());
        assert!(v.holds);
        assert!((v.margin - 0.06).abs() < 1e-15);
        assert!((v.frozen_value - 0.01).abs() < 1e-15);
        assert_eq!(v.equal_coherence_defect, 0.0);

        let v = check_freezing_x(&make_x_state(0.4, 0.1, 0.3, 0.2, c(0.15, 0.0), c(0.05, 0.0)).unwrap());
        assert!(!v.holds);
        assert!((v.equal_coherence_defect - 0.1).abs() < 1e-15);

        let product = make_x_state(0.5, 0.2, 0.2, 0.1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let v = check_freezing_x(&product);
        assert!(!v.holds && v.margin <= 0.0);
    }

    #[test]
    fn boundary_margin_is_not_freezing() {
        // 8 m^2 = 0.02 exactly at m = 0.05.
        let s = make_x_state(0.35, 0.15, 0.25, 0.25, c(0.05, 0.0), c(0.0, 0.05)).unwrap();
        let v = check_freezing_x(&s);
        assert!(v.margin.abs() < 1e-15);
        assert!(!v.holds);
    }

    #[test]
    fn bell_verdict_examples() {
        let v = check_freezing_bell(&BellDiagonalParams::bell([0.0, 0.35, 0.1]));
        assert!(v.holds);
        assert!((v.frozen_value - 0.0025).abs() < 1e-16);
        assert!(check_freezing_bell(&BellDiagonalParams::bell([0.35, 0.0, 0.1])).holds);
        assert!(!check_freezing_bell(&BellDiagonalParams::new(0.4, 0.1, [0.0, 0.35, 0.1])).holds);
    }

    #[test]
    fn bell_and_x_verdicts_agree() {
        let mut rng = seeded(53);
        let mut holds = 0;
        for _ in 0..10_000 {
            let p = random_bell_params(&mut rng);
            let vb = check_freezing_bell(&p);
            let vx = check_freezing_x(&bell_diagonal_state(&p).unwrap());
            assert_eq!(vb.holds, vx.holds, "{p:?}");
            assert!((vb.frozen_value - vx.frozen_value).abs() < 1e-15);
            holds += vb.holds as usize;
        }
        assert!(holds > 100, "only {holds} freezing draws");
    }

    #[test]
    fn endpoint_examples() {
        let e = freeze_endpoint_markov(&s1()).unwrap();
        assert!((e.p_star - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!(!e.trivial);

        let flat = make_x_state(0.3, 0.2, 0.3, 0.2, c(0.1, 0.0), c(0.0, -0.1)).unwrap();
        let e = freeze_endpoint_markov(&flat).unwrap();
        assert_eq!(e.p_star, 1.0);
        assert!(e.trivial);

        let b = bell_diagonal_state(&BellDiagonalParams::bell([0.0, 0.35, 0.1])).unwrap();
        let e = freeze_endpoint_markov(&b).unwrap();
        let expected = 1.0 - (0.01f64 / 0.1225).powf(0.25);
        assert!((e.p_star - expected).abs() < 1e-12);
        assert!((e.p_star - 0.465478).abs() < 1e-6);

        let err = freeze_endpoint_markov(&make_x_state(0.4, 0.1, 0.3, 0.2, c(0.15, 0.0), c(0.05, 0.0)).unwrap());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn markov_intervals() {
        let t = markov_trajectory(&s1(), 1001, 1.0).unwrap();
        let iv = detect_frozen_intervals(&t, 1e-9);
        let nontrivial: Vec<_> = iv.iter().filter(|i| !i.trivial).collect();
        assert_eq!(nontrivial.len(), 1, "{iv:?}");
        assert_eq!(nontrivial[0].start, 0.0);
        assert!((nontrivial[0].end - 0.292).abs() < 1e-12);
        assert!((nontrivial[0].level - 0.01).abs() < 1e-15);
    }

    #[test]
    fn colored_intervals() {
        let cn = ColoredNoiseParams::new(1.0, 2.5, 3).unwrap();
        let t = colored_trajectory(&BellDiagonalParams::bell([0.0, 0.35, 0.1]), &cn, 1.5, 15001).unwrap();
        let iv: Vec<_> = detect_frozen_intervals(&t, INTERVAL_ATOL).into_iter().filter(|i| !i.trivial).collect();
        assert_eq!(iv.len(), 2, "{iv:?}");
        // A coarser tolerance also accepts the flat top of the k = 4 extremum of the kernel.
        let loose: Vec<_> = detect_frozen_intervals(&t, 1e-9).into_iter().filter(|i| !i.trivial).collect();
        assert_eq!(loose.len(), 3, "{loose:?}");
        assert!(iv.iter().all(|i| (i.level - 0.0025).abs() < 1e-9));
    }

    #[test]
    fn constant_zero_is_one_trivial_interval() {
        let product = make_x_state(0.5, 0.2, 0.2, 0.1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let iv = detect_frozen_intervals(&markov_trajectory(&product, 5, 1.0).unwrap(), 1e-9);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].trivial);
        assert_eq!((iv[0].start, iv[0].end), (0.0, 1.0));
    }

    #[test]
    fn short_runs_are_not_intervals() {
        let product = make_x_state(0.5, 0.2, 0.2, 0.1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let t = markov_trajectory(&product, 2, 1.0).unwrap();
        assert!(detect_frozen_intervals(&t, 1e-9).is_empty());
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_membership(0.0, 0.0, 0.0, 0.8, 0.1), RegionMembership { physical: true, freezing: true });
        assert_eq!(region_membership(0.0, 0.0, 0.0, 0.05, 0.3), RegionMembership { physical: true, freezing: false });
        assert!(!region_membership(0.4, 0.1, 0.0, 0.9, 0.0).physical);
    }

    #[test]
    fn corner_scan() {
        let rows = scan_region(0.0, 0.0, ScanAxes::C2C3, 2).unwrap();
        let coords: Vec<(f64, f64)> = rows.iter().map(|r| (r.transverse, r.c3)).collect();
        assert_eq!(coords, vec![(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]);
        assert!(scan_region(0.0, 0.0, ScanAxes::C2C3, 1).is_err());
    }

    #[test]
    fn dephasing_preserves_equal_coherences() {
        let mut rng = seeded(59);
        for _ in 0..1000 {
            let s = random_freezing_x_state(&mut rng, 0.0);
            let p: f64 = rng.gen();
            let out = dephase_markov(&s, &DephasingParams::symmetric(p).unwrap());
            assert!((out.rho14().norm() - out.rho23().norm()).abs() <= 1e-15);
        }
    }

    #[test]
    fn plateau_then_quartic_decay() {
        let mut rng = seeded(61);
        for _ in 0..300 {
            let s = random_freezing_x_state(&mut rng, 0.01);
            let v = check_freezing_x(&s);
            let e = freeze_endpoint_markov(&s).unwrap();
            let g = |p: f64| x_lambdas(&dephase_markov(&s, &DephasingParams::symmetric(p).unwrap())).value;
            if e.p_star > 1e-6 && e.p_star < 1.0 - 1e-6 {
                assert!((g(e.p_star - 1e-6) - g(e.p_star + 1e-6)).abs() < 1e-5);
            }
            for k in 1..=20 {
                let p = e.p_star + (1.0 - e.p_star) * k as f64 / 20.0;
                let expected = 4.0 * s.rho14().norm_sqr() * (1.0 - p).powi(4);
                assert!((g(p) - expected).abs() < 1e-10);
                assert!(g(p) <= v.frozen_value + 1e-12);
            }
        }
    }

    #[test]
    fn generic_states_do_not_freeze() {
        let mut rng = seeded(67);
        let holds = (0..1000).filter(|_| check_freezing_x(&random_x_state(&mut rng)).holds).count();
        assert_eq!(holds, 0);
    }
}
