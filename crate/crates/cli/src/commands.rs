use std::fs;
use std::io::Write;

use serde_json::json;
use thiserror::Error;

use discord_core::channels::{colored_trajectory, markov_trajectory, ColoredNoiseParams, Trajectory};
use discord_core::freezing::{
    check_freezing_bell, check_freezing_x, detect_frozen_intervals, freeze_endpoint_markov, scan_region,
    ScanAxes, INTERVAL_ATOL,
};
use discord_core::gmqd::{gmqd_k, gmqd_oracle, gmqd_svd, x_lambdas};
use discord_core::qstate::{
    bell_diagonal_state, bell_params_of, BellDiagonalParams, ResolvedState, StateInput, XState,
};
use discord_core::Error;

use crate::output::{self, Report};
use crate::{Axes, Channel, ColoredArgs, Common, EvolveArgs, Format, FreezeArgs, GmqdArgs, ScanArgs, StateSource};

/// Closed forms must agree with the singular-value route to this.
const CHECK_TOL: f64 = 1e-10;
/// Refined oracle agreement required in `--check` mode.
const ORACLE_CHECK_TOL: f64 = 1e-6;
/// Discord at or below this is reported as zero.
const ZERO_DISCORD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::Unphysical(_) | Error::UnphysicalBloch { .. } => 3,
                Error::UnsupportedSubclass(_) => 4,
                Error::CheckFailed { .. } => 5,
                _ => 2,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn resolve_state(src: &StateSource) -> CliResult<ResolvedState> {
    let given = [src.input.is_some(), src.state.is_some(), src.c.is_some()].iter().filter(|b| **b).count();
    if given != 1 {
        return Err(CliError::Input(
            "exactly one state source is required: --input <file>, --state '<json>' or --c c1,c2,c3".into(),
        ));
    }
    let input = if let Some(path) = &src.input {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        parse_state(&text)?
    } else if let Some(text) = &src.state {
        parse_state(text)?
    } else {
        let c = src.c.as_ref().expect("counted above");
        if c.len() != 3 {
            return Err(CliError::Input(format!("--c needs exactly three values, got {}", c.len())));
        }
        StateInput::BellDiagonal(BellDiagonalParams::new(
            src.r.unwrap_or(0.0),
            src.s.unwrap_or(0.0),
            [c[0], c[1], c[2]],
        ))
    };
    Ok(input.resolve()?)
}

fn parse_state(text: &str) -> CliResult<StateInput> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed state JSON: {e}")))
}

/// Bell-diagonal parameters of a resolved state, if it has that form.
fn bell_params(state: &ResolvedState) -> CliResult<BellDiagonalParams> {
    if let ResolvedState::BellDiagonal(p, _) = state {
        return Ok(*p);
    }
    let s = state.x_state()?;
    let p = bell_params_of(&s);
    let rebuilt = bell_diagonal_state(&p).ok();
    let matches = rebuilt.is_some_and(|b| {
        b.diagonal().iter().zip(s.diagonal()).all(|(a, b)| (a - b).abs() < 1e-12)
            && (b.rho14() - s.rho14()).norm() < 1e-12
            && (b.rho23() - s.rho23()).norm() < 1e-12
    });
    if !matches {
        return Err(Error::UnsupportedSubclass(
            "colored-noise evolution needs a Bell-diagonal state with real coherences".into(),
        )
        .into());
    }
    Ok(p)
}

fn colored_params(args: &ColoredArgs) -> CliResult<ColoredNoiseParams> {
    match (args.a, args.tau) {
        (Some(a), Some(tau)) => Ok(ColoredNoiseParams::new(a, tau, args.direction)?),
        _ => Err(CliError::Input("colored noise needs both --a and --tau".into())),
    }
}

fn emit(common: &Common, content: &str) -> CliResult<()> {
    match &common.output {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn emit_report(common: &Common, report: &Report) -> CliResult<()> {
    match common.format {
        Format::Csv => emit(common, &report.to_csv()),
        Format::Json => emit(common, &report.to_json()),
    }
}

fn check(what: &str, deviation: f64, tol: f64) -> CliResult<()> {
    if deviation > tol {
        return Err(Error::CheckFailed { what: what.into(), deviation }.into());
    }
    Ok(())
}

pub fn cmd_gmqd(args: &GmqdArgs) -> CliResult<()> {
    let state = resolve_state(&args.source)?;
    let d = state.density();
    let svd = gmqd_svd(&d);
    let k = gmqd_k(&d);
    let closed = state.x_state().ok().map(|s| x_lambdas(&s));

    let mut r = Report::default();
    let primary = closed.unwrap_or(svd);
    r.push("value", primary.value);
    r.push("lambda_sq", primary.lambda_sq.to_vec());
    r.push("value_closed_form", closed.map(|c| c.value));
    r.push("value_svd", svd.value);
    r.push("value_k", k.value);
    r.push("k_eigen", k.k_eigen.map(|e| e.to_vec()));
    let delta_svd_k = (svd.value - k.value).abs();
    r.push("delta_svd_k", delta_svd_k);
    let delta_closed_svd = closed.map(|c| (c.value - svd.value).abs());
    let delta_closed_k = closed.map(|c| (c.value - k.value).abs());
    r.push("delta_closed_svd", delta_closed_svd);
    r.push("delta_closed_k", delta_closed_k);

    if args.common.check {
        check("K-matrix vs SVD", delta_svd_k, CHECK_TOL)?;
        if let (Some(a), Some(b)) = (delta_closed_svd, delta_closed_k) {
            check("closed form vs SVD", a.max(b), CHECK_TOL)?;
        }
    }
    if args.oracle {
        if args.oracle_steps < 16 {
            return Err(CliError::Input("--oracle-steps must be at least 16".into()));
        }
        let o = gmqd_oracle(&d, args.oracle_steps, true);
        let delta = (o.value - svd.value).abs();
        r.push("oracle_value", o.value);
        r.push("oracle_theta", o.direction.theta);
        r.push("oracle_phi", o.direction.phi);
        r.push("delta_oracle_svd", delta);
        if args.common.check {
            check("oracle vs SVD", delta, ORACLE_CHECK_TOL)?;
        }
    }
    r.push("seed", args.common.seed);
    emit_report(&args.common, &r)
}

fn write_trajectory(common: &Common, t: &Trajectory) -> CliResult<()> {
    match common.format {
        Format::Csv => emit(common, &output::trajectory_csv(t)),
        Format::Json => emit(common, &output::trajectory_json(t, &detect_frozen_intervals(t, INTERVAL_ATOL))),
    }
}

pub fn cmd_evolve(args: &EvolveArgs) -> CliResult<()> {
    let state = resolve_state(&args.source)?;
    let mut t = match args.channel {
        Channel::Markov => markov_trajectory(&state.x_state()?, args.steps, args.p_max)?,
        Channel::Colored => {
            let cn = colored_params(&args.colored)?;
            colored_trajectory(&bell_params(&state)?, &cn, args.colored.nu_max, args.steps)?
        }
    };
    t.metadata.seed = Some(args.common.seed);
    if args.common.check {
        t.audit(CHECK_TOL)?;
    }
    write_trajectory(&args.common, &t)
}

pub fn cmd_freeze(args: &FreezeArgs) -> CliResult<()> {
    let state = resolve_state(&args.source)?;
    let s: XState = state.x_state()?;
    let v = check_freezing_x(&s);
    let g = x_lambdas(&s);
    if args.common.check {
        check("closed form vs SVD", (g.value - gmqd_svd(&state.density()).value).abs(), CHECK_TOL)?;
    }

    let mut r = Report::default();
    r.push("holds", v.holds);
    r.push("equal_coherence_defect", v.equal_coherence_defect);
    r.push("margin", v.margin);
    r.push("frozen_value", v.frozen_value);
    r.push("gmqd", g.value);
    let zero = g.value <= ZERO_DISCORD;
    r.push("zero_discord", zero);
    if zero && !v.holds {
        r.push("note", "zero discord: constant under dephasing but trivially frozen");
    }
    if let ResolvedState::BellDiagonal(p, _) = state {
        r.push("bell_condition_holds", check_freezing_bell(&p).holds);
    }
    if v.holds {
        let e = freeze_endpoint_markov(&s)?;
        r.push("p_star", e.p_star);
        r.push("plateau_trivial", e.trivial);
    }
    if args.colored.a.is_some() || args.colored.tau.is_some() {
        let cn = colored_params(&args.colored)?;
        let t = colored_trajectory(&bell_params(&state)?, &cn, args.colored.nu_max, args.steps)?;
        if args.common.check {
            t.audit(CHECK_TOL)?;
        }
        let intervals = detect_frozen_intervals(&t, INTERVAL_ATOL);
        r.push("nontrivial_intervals", intervals.iter().filter(|i| !i.trivial).count() as u64);
        let listed: Vec<_> = intervals.iter().map(output::interval_json).collect();
        match args.common.format {
            Format::Json => r.push("intervals", listed),
            Format::Csv => r.push(
                "intervals",
                intervals
                    .iter()
                    .map(|i| {
                        json!(format!(
                            "{}:{}:{}:{}",
                            output::num(i.start),
                            output::num(i.end),
                            output::num(i.level),
                            u8::from(i.trivial)
                        ))
                    })
                    .collect::<Vec<_>>(),
            ),
        };
    }
    r.push("seed", args.common.seed);
    emit_report(&args.common, &r)
}

pub fn cmd_scan(args: &ScanArgs) -> CliResult<()> {
    let axes = match args.axes {
        Axes::C2c3 => ScanAxes::C2C3,
        Axes::C1c3 => ScanAxes::C1C3,
    };
    let rows = scan_region(args.r, args.s, axes, args.grid)?;
    if args.common.check {
        let mut worst: f64 = 0.0;
        for row in rows.iter().filter(|r| r.membership.physical) {
            let c = match axes {
                ScanAxes::C2C3 => [0.0, row.transverse, row.c3],
                ScanAxes::C1C3 => [row.transverse, 0.0, row.c3],
            };
            let s = bell_diagonal_state(&BellDiagonalParams::new(args.r, args.s, c))?;
            let d = discord_core::qstate::x_to_density(&s);
            worst = worst.max((x_lambdas(&s).value - gmqd_svd(&d).value).abs());
        }
        check("scan closed form vs SVD", worst, CHECK_TOL)?;
    }
    let content = match args.common.format {
        Format::Csv => output::scan_csv(axes, &rows),
        Format::Json => output::scan_json(args.r, args.s, axes, args.grid, args.common.seed, &rows),
    };
    emit(&args.common, &content)
}
