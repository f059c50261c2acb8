//! Command execution. Grid items run in parallel and are reported in
//! input order.

use lane_emden_core::balldomain::{
    check_decay, pohozaev_check, pohozaev_limit, solve_ball, v_green_trend, BallEnergy, BallOptions, BallSolution,
    BlowupScan, DecayFit, GreenComparison, PohozaevRecord, MIN_LAMBDA,
};
use lane_emden_core::entire::{
    bubble, bubble_integral, profile_rows, solve_entire, sobolev_quotient, DecayConstants, EntireOptions,
    EntireSolution, Norm, RadialProfile, SobolevQuotient,
};
use lane_emden_core::greenfun::{BallGreenContext, HTildeBoundaryEstimate};
use lane_emden_core::halfspace::{
    regime_grid, verify_as0, verify_as1, verify_b50, verify_master, InequalityReport, TOL_LOW_A, TOL_LOW_B,
};
use lane_emden_core::{balldomain, make_params, Error, Regime, SystemParams};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::config::{BallArgs, Command, EntireArgs, Format, GreenArgs, Output, RunConfig, ScanArgs, VerifyArgs, Which};
use crate::numlist::{ListError, NumList};
use crate::report::{exit, Item, Report, Status};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LANE_EMDEN_THREADS";

/// Radii at which `d(x) = 1 - |x|` is sampled for the `H̃` boundary check.
pub const HTILDE_DISTANCES: [f64; 4] = [0.2, 0.1, 0.05, 0.02];
const DEFAULT_GTILDE_SHELLS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const GREEN_TOL: f64 = 1e-8;
const ROBIN_TOL: f64 = 1e-10;
const GTILDE_TOL: f64 = 1e-4;

#[derive(Debug, ThisError)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    List(#[from] ListError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("csv buffer: {0}")]
    CsvBuffer(String),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::List(_) => exit::USAGE,
            _ => exit::NUMERICAL,
        }
    }
}

/// Rendered output and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
    /// `ok/total` for the status line.
    pub tally: (usize, usize),
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

pub fn thread_pool() -> Result<ThreadPool, LabError> {
    let mut b = ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(k);
    }
    Ok(b.build()?)
}

pub fn run(cmd: &Command) -> Result<Outcome, LabError> {
    let pool = thread_pool()?;
    pool.install(|| match cmd {
        Command::VerifyIneq(a) => verify_ineq(a),
        Command::Entire(a) => entire(a),
        Command::Ball(a) => ball(a),
        Command::Scan(a) => scan(a),
        Command::Green(a) => green(a),
    })
}

fn resolve_tol(tol: Option<f64>, default: f64) -> Result<f64, LabError> {
    let t = tol.unwrap_or(default);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(usage(format!("--tol must be positive, got {t}")))
    }
}

fn base_config(cmd: &str, n: &NumList, tol: f64, out: &Output) -> Result<RunConfig, LabError> {
    Ok(RunConfig {
        command: cmd.to_string(),
        n_list: n.as_u32()?,
        p_list: None,
        eps_list: None,
        tol,
        which: None,
        robin: None,
        shells: None,
        format: out.format,
        output_path: out.out.as_ref().map(|p| p.display().to_string()),
    })
}

fn json_only(out: &Output, cmd: &str) -> Result<(), LabError> {
    if out.format == Format::Csv {
        return Err(usage(format!("{cmd} writes JSON only")));
    }
    Ok(())
}

fn render<T: Serialize>(report: &Report<Item<T>>) -> Result<Outcome, LabError> {
    let mut body = serde_json::to_string_pretty(report)?;
    body.push('\n');
    Ok(Outcome { body, exit_code: report.summary.exit_code, tally: (report.summary.ok, report.summary.total) })
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, LabError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::CsvBuffer(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::CsvBuffer(e.to_string()))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn grid2(ns: &[u32], ps: &[f64]) -> Vec<(u32, f64)> {
    ns.iter().flat_map(|&n| ps.iter().map(move |&p| (n, p))).collect()
}

// ------------------------------------------------------------ verify-ineq

/// One certification record, or the boolean large-`n` condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VerifyOutcome {
    Report(Box<InequalityReport>),
    B50 { holds: bool },
}

fn verify_ineq(a: &VerifyArgs) -> Result<Outcome, LabError> {
    json_only(&a.output, "verify-ineq")?;
    let default_tol = if a.which == Which::As0 { TOL_LOW_B } else { TOL_LOW_A };
    let tol = resolve_tol(a.tol, default_tol)?;
    let mut config = base_config("verify-ineq", &a.n, tol, &a.output)?;
    config.which = Some(a.which);
    config.p_list = a.p.as_ref().map(|l| l.0.clone());
    let regime = if a.which == Which::As0 { Regime::LowB } else { Regime::LowA };

    let mut jobs: Vec<(u32, Result<f64, Error>)> = Vec::new();
    for &n in &config.n_list {
        match (&a.p, a.which) {
            (Some(l), _) => jobs.extend(l.values().iter().map(|&p| (n, Ok(p)))),
            _ if n < 3 => jobs.push((n, Err(Error::Domain(format!("n = {n} has no exponent grid"))))),
            (None, Which::B50) => jobs.push((n, Ok((n as f64 - 1.0) / (n as f64 - 2.0)))),
            (None, _) => match regime_grid(n, regime, 5) {
                Ok(ps) => jobs.extend(ps.into_iter().map(|p| (n, Ok(p)))),
                Err(e) => jobs.push((n, Err(e))),
            },
        }
    }
    let which = a.which;
    let results: Vec<Item<VerifyOutcome>> = jobs
        .par_iter()
        .map(|(n, p)| {
            let n = *n;
            let p = match p {
                Ok(p) => *p,
                Err(e) => return Item::new(n, None, None).failed(e),
            };
            let item = Item::new(n, Some(p), None).with_params(make_params(n, p, 0.0).ok());
            let report = |r: lane_emden_core::Result<InequalityReport>| {
                r.map(|r| VerifyOutcome::Report(Box::new(r)))
            };
            let out = match which {
                Which::As0 => report(verify_as0(n, p, tol)),
                Which::As1 => report(verify_as1(n, p, tol)),
                Which::Master => report(verify_master(n, p, tol)),
                Which::B50 => verify_b50(n, p).map(|holds| VerifyOutcome::B50 { holds }),
            };
            item.from_result(out, |o| match o {
                VerifyOutcome::Report(r) => Status::from_verdict(r.verdict),
                VerifyOutcome::B50 { holds: true } => Status::Certified,
                VerifyOutcome::B50 { holds: false } => Status::Failed,
            })
        })
        .collect();
    render(&Report::new(config, results))
}

// ------------------------------------------------------------ entire

/// Comparison against the explicit bubble at `p = q0 = (n+2)/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleCheck {
    /// `max |U - w|, |V - w|` over grid points with `r <= 50`.
    pub sup_error: f64,
    /// `|s* - 1|`.
    pub shoot_error: f64,
    /// Relative error of `a` against `(n(n-2))^{(n-2)/2}`.
    pub a_rel_error: f64,
    /// Relative error of `A_U0` against the Beta closed form.
    pub a_u0_rel_error: f64,
    pub pass: bool,
}

/// Bubble tolerances: sup error, shooting parameter, relative `a` and `A_U0`.
pub const BUBBLE_TOL: (f64, f64, f64, f64) = (1e-5, 1e-5, 1e-3, 1e-3);

/// Whether `p` is the self-dual exponent `(n+2)/(n-2)`, up to input rounding.
pub fn is_bubble_case(n: u32, p: f64) -> bool {
    let nf = n as f64;
    n >= 3 && (p - (nf + 2.0) / (nf - 2.0)).abs() < 1e-8
}

pub fn bubble_check(sol: &EntireSolution) -> lane_emden_core::Result<BubbleCheck> {
    let n = sol.params.n;
    let nf = n as f64;
    let pr = &sol.profile;
    let sup_error = (0..pr.len())
        .take_while(|&i| pr.grid[i] <= 50.0)
        .map(|i| {
            let w = bubble(n, pr.grid[i]);
            (pr.u_vals[i] - w).abs().max((pr.v_vals[i] - w).abs())
        })
        .fold(0.0, f64::max);
    let a_exact = (nf * (nf - 2.0)).powf(0.5 * (nf - 2.0));
    let au_exact = bubble_integral(n, sol.params.q0)?;
    let au = sol.a_u0.value().ok_or_else(|| Error::Divergence("A_U0".into()))?;
    let shoot_error = (sol.shoot_param - 1.0).abs();
    let a_rel_error = ((sol.a - a_exact) / a_exact).abs();
    let a_u0_rel_error = ((au - au_exact) / au_exact).abs();
    let reaches = pr.grid.last().is_some_and(|&r| r >= 50.0);
    let pass = reaches
        && sup_error < BUBBLE_TOL.0
        && shoot_error < BUBBLE_TOL.1
        && a_rel_error < BUBBLE_TOL.2
        && a_u0_rel_error < BUBBLE_TOL.3;
    Ok(BubbleCheck { sup_error, shoot_error, a_rel_error, a_u0_rel_error, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireSummary {
    pub shoot_param: f64,
    pub bracket: (f64, f64),
    pub a: f64,
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub decay: DecayConstants,
    #[serde(rename = "A_U0")]
    pub a_u0: Norm,
    #[serde(rename = "A_V0")]
    pub a_v0: Norm,
    pub sobolev: Option<SobolevQuotient>,
    pub sobolev_error: Option<String>,
    pub r_end: f64,
    pub profile_points: usize,
    pub shots: usize,
    pub bubble: Option<BubbleCheck>,
    pub warnings: Vec<String>,
}

pub fn summarize_entire(sol: &EntireSolution) -> lane_emden_core::Result<EntireSummary> {
    let (sobolev, sobolev_error) = match sobolev_quotient(sol) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let bubble = if is_bubble_case(sol.params.n, sol.params.p) { Some(bubble_check(sol)?) } else { None };
    Ok(EntireSummary {
        shoot_param: sol.shoot_param,
        bracket: sol.bracket,
        a: sol.a,
        b: sol.b,
        l: sol.l,
        decay: sol.decay,
        a_u0: sol.a_u0,
        a_v0: sol.a_v0,
        sobolev,
        sobolev_error,
        r_end: sol.moments.radius,
        profile_points: sol.profile.len(),
        shots: sol.shots.len(),
        bubble,
        warnings: sol.warnings.clone(),
    })
}

fn profile_csv(profile: &RadialProfile) -> Result<String, LabError> {
    csv_body(&["r", "U", "V", "dU", "dV"], profile_rows(profile).map(|row| row.iter().map(|v| v.to_string()).collect()))
}

fn single<T: Copy>(jobs: &[T], cmd: &str) -> Result<T, LabError> {
    match jobs {
        [one] => Ok(*one),
        _ => Err(usage(format!("{cmd} --format csv needs exactly one grid point, got {}", jobs.len()))),
    }
}

fn entire(a: &EntireArgs) -> Result<Outcome, LabError> {
    let defaults = EntireOptions::default();
    let tol = resolve_tol(a.tol, defaults.tol)?;
    let opts = EntireOptions { tol, ..defaults };
    let mut config = base_config("entire", &a.n, tol, &a.output)?;
    config.p_list = Some(a.p.0.clone());
    let jobs = grid2(&config.n_list, a.p.values());

    if a.output.format == Format::Csv {
        let (n, p) = single(&jobs, "entire")?;
        let sol = make_params(n, p, 0.0)
            .and_then(|prm| solve_entire(&prm, &opts))
            .map_err(|e| usage(format!("entire ({n}, {p}): {e}")))?;
        return Ok(Outcome { body: profile_csv(&sol.profile)?, exit_code: exit::OK, tally: (1, 1) });
    }

    let results: Vec<Item<EntireSummary>> = jobs
        .par_iter()
        .map(|&(n, p)| {
            let item = Item::new(n, Some(p), None);
            match make_params(n, p, 0.0) {
                Err(e) => item.failed(&e),
                Ok(prm) => item.with_params(Some(prm)).from_result(
                    solve_entire(&prm, &opts).and_then(|s| summarize_entire(&s)),
                    |s| match s.bubble {
                        Some(b) if !b.pass => Status::Failed,
                        _ => Status::Ok,
                    },
                ),
            }
        })
        .collect();
    render(&Report::new(config, results))
}

// ------------------------------------------------------------ ball

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    #[serde(rename = "M_eps")]
    pub m_eps: f64,
    pub lambda_eps: f64,
    pub lambda_relation_error: f64,
    pub shoot_param: f64,
    pub energy_quotient: f64,
    pub boundary_residual: f64,
    pub energy: BallEnergy,
    pub decay: DecayFit,
    /// Local Pohozaev identity on `∂B(0.3e₁, 0.2)`, first component.
    pub pohozaev: Option<PohozaevRecord>,
    pub green: Option<GreenComparison>,
    /// Whether `λ_ε` reaches the blow-up gate of the Green comparison.
    pub green_gate_met: bool,
}

fn summarize_ball(sol: &BallSolution, a_u0: Option<f64>, shells: Option<&[f64]>) -> lane_emden_core::Result<BallSummary> {
    let pohozaev = Some(pohozaev_check(sol, &axis(sol.params.n, 0.3), 0.2, 0, 1e-10)?);
    let green = match (a_u0, shells) {
        (Some(m), Some(s)) => Some(v_green_trend(sol, m, s)?),
        _ => None,
    };
    Ok(BallSummary {
        m_eps: sol.m_eps,
        lambda_eps: sol.lambda_eps,
        lambda_relation_error: sol.lambda_relation_error(),
        shoot_param: sol.shoot_param,
        energy_quotient: sol.energy_quotient,
        boundary_residual: sol.boundary_residual,
        energy: balldomain::energy(sol)?,
        decay: check_decay(sol)?,
        pohozaev,
        green,
        green_gate_met: sol.lambda_eps >= MIN_LAMBDA,
    })
}

/// `A_U0` of the ground state at `(n, p)`.
fn ground_state_mass(n: u32, p: f64) -> lane_emden_core::Result<f64> {
    let sol = solve_entire(&make_params(n, p, 0.0)?, &EntireOptions::default())?;
    sol.a_u0.value().ok_or_else(|| Error::Divergence("A_U0".into()))
}

fn ball_options(tol: Option<f64>) -> Result<BallOptions, LabError> {
    let d = BallOptions::default();
    Ok(BallOptions { tol: resolve_tol(tol, d.tol)?, ..d })
}

fn ball(a: &BallArgs) -> Result<Outcome, LabError> {
    let opts = ball_options(a.tol)?;
    let mut config = base_config("ball", &a.n, opts.tol, &a.output)?;
    config.p_list = Some(a.p.0.clone());
    config.eps_list = Some(a.eps.0.clone());
    config.shells = a.shells.as_ref().map(|l| l.0.clone());
    let jobs: Vec<(u32, f64, f64)> = grid2(&config.n_list, a.p.values())
        .into_iter()
        .flat_map(|(n, p)| a.eps.values().iter().map(move |&e| (n, p, e)))
        .collect();

    if a.output.format == Format::Csv {
        let (n, p, e) = single(&jobs, "ball")?;
        let sol = make_params(n, p, e)
            .and_then(|prm| solve_ball(&prm, &opts))
            .map_err(|err| usage(format!("ball ({n}, {p}, {e}): {err}")))?;
        return Ok(Outcome { body: profile_csv(&sol.profile)?, exit_code: exit::OK, tally: (1, 1) });
    }

    let shells = config.shells.clone();
    let results: Vec<Item<BallSummary>> = jobs
        .par_iter()
        .map(|&(n, p, e)| {
            let item = Item::new(n, Some(p), Some(e));
            let prm = match make_params(n, p, e) {
                Ok(prm) => prm,
                Err(err) => return item.failed(&err),
            };
            let out = solve_ball(&prm, &opts).and_then(|sol| {
                let mass = match shells {
                    Some(_) => Some(ground_state_mass(n, p)?),
                    None => None,
                };
                summarize_ball(&sol, mass, shells.as_deref())
            });
            item.with_params(Some(prm)).from_result(out, |_| Status::Ok)
        })
        .collect();
    render(&Report::new(config, results))
}

// ------------------------------------------------------------ scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    #[serde(flatten)]
    pub scan: BlowupScan,
    /// Sobolev constant of the ground state at the same `(n, p)`.
    pub sobolev: Option<f64>,
    /// `S_ε / S` at the smallest solved `ε`.
    pub energy_ratio: Option<f64>,
    /// HIGH only: limit of the compensated product from the Pohozaev identity.
    pub pohozaev_limit: Option<f64>,
    /// `v` Green deviation per row, when shells were given.
    pub green_deviation: Option<Vec<Option<f64>>>,
    pub ground_state_error: Option<String>,
}

/// Solves every row in parallel, then assembles the scan in list order.
pub fn parallel_scan(
    n: u32,
    p: f64,
    eps: &[f64],
    opts: &BallOptions,
    shells: Option<&[f64]>,
) -> lane_emden_core::Result<ScanSummary> {
    let sols: Vec<lane_emden_core::Result<BallSolution>> =
        eps.par_iter().map(|&e| make_params(n, p, e).and_then(|prm| solve_ball(&prm, opts))).collect();
    let scan = balldomain::blowup_scan_with(n, p, eps, |prm: &SystemParams| {
        let i = eps.iter().position(|&e| e == prm.eps).expect("row eps comes from the list");
        sols[i].clone()
    })?;

    let ground = make_params(n, p, 0.0).and_then(|prm| {
        let ent = solve_entire(&prm, &EntireOptions::default())?;
        let sq = sobolev_quotient(&ent)?;
        Ok((ent, sq))
    });
    let (mut sobolev, mut energy_ratio, mut limit, mut green, mut ground_state_error) = (None, None, None, None, None);
    match ground {
        Ok((ent, sq)) => {
            sobolev = Some(sq.s);
            energy_ratio = scan.rows.iter().rev().find_map(|r| r.energy_quotient).map(|q| q / sq.s);
            if ent.params.regime == Regime::High {
                limit = Some(pohozaev_limit(&ent, &sq)?);
            }
            if let (Some(sh), Some(m)) = (shells, ent.a_u0.value()) {
                green = Some(
                    sols.iter()
                        .map(|s| s.as_ref().ok().and_then(|s| v_green_trend(s, m, sh).ok()).map(|g| g.max_deviation))
                        .collect(),
                );
            }
        }
        Err(e) => ground_state_error = Some(e.to_string()),
    }
    Ok(ScanSummary { scan, sobolev, energy_ratio, pohozaev_limit: limit, green_deviation: green, ground_state_error })
}

pub const SCAN_CSV_HEADER: [&str; 6] = ["eps", "q_eps", "M_eps", "lambda_eps", "compensated", "slope_estimate"];

pub fn scan_csv(scan: &BlowupScan) -> Result<String, LabError> {
    csv_body(
        &SCAN_CSV_HEADER,
        scan.rows.iter().map(|r| {
            vec![
                r.eps.to_string(),
                r.q_eps.to_string(),
                cell(r.m_eps),
                cell(r.lambda_eps),
                cell(r.compensated),
                cell(r.slope_estimate),
            ]
        }),
    )
}

fn scan(a: &ScanArgs) -> Result<Outcome, LabError> {
    let opts = ball_options(a.tol)?;
    let mut config = base_config("scan", &a.n, opts.tol, &a.output)?;
    config.p_list = Some(a.p.0.clone());
    config.eps_list = Some(a.eps.0.clone());
    config.shells = a.shells.as_ref().map(|l| l.0.clone());
    if a.eps.values().windows(2).any(|w| !(w[1] < w[0])) {
        return Err(usage("--eps must be strictly decreasing"));
    }
    let jobs = grid2(&config.n_list, a.p.values());
    let eps = a.eps.values();

    if a.output.format == Format::Csv {
        let (n, p) = single(&jobs, "scan")?;
        let s = parallel_scan(n, p, eps, &opts, None).map_err(|e| usage(format!("scan ({n}, {p}): {e}")))?;
        let ok = s.scan.rows.iter().filter(|r| r.error.is_none()).count();
        let code = if ok == s.scan.rows.len() { exit::OK } else { exit::NUMERICAL };
        return Ok(Outcome { body: scan_csv(&s.scan)?, exit_code: code, tally: (ok, s.scan.rows.len()) });
    }

    let shells = config.shells.clone();
    let results: Vec<Item<ScanSummary>> = jobs
        .par_iter()
        .map(|&(n, p)| {
            let item = Item::new(n, Some(p), None).with_params(make_params(n, p, eps[0]).ok());
            item.from_result(parallel_scan(n, p, eps, &opts, shells.as_deref()), |s| {
                if s.scan.rows.iter().all(|r| r.error.is_none()) {
                    Status::Ok
                } else {
                    Status::NumericalError
                }
            })
        })
        .collect();
    render(&Report::new(config, results))
}

// ------------------------------------------------------------ green

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobinRow {
    pub radius: f64,
    pub robin: f64,
    /// `c_n (1 - |x|²)^{2-n}`.
    pub closed_form: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtildeRow {
    pub radius: f64,
    /// `G̃(x, 0)` from the radial ODE.
    pub radial: f64,
    /// `G̃(x, 0)` from the Green representation.
    pub representation: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenSummary {
    pub robin: Vec<RobinRow>,
    pub gtilde: Vec<GtildeRow>,
    pub htilde_boundary: Option<HTildeBoundaryEstimate>,
}

impl GreenSummary {
    pub fn passes(&self) -> bool {
        self.robin.iter().all(|r| r.rel_error < ROBIN_TOL)
            && self.gtilde.iter().all(|g| g.rel_diff < GTILDE_TOL)
            && self.htilde_boundary.as_ref().map_or(true, |h| h.all_positive())
    }
}

fn axis(n: u32, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; n as usize];
    x[0] = r;
    x
}

pub fn green_checks(
    n: u32,
    p: Option<f64>,
    robin: &[f64],
    shells: &[f64],
    tol: f64,
) -> lane_emden_core::Result<GreenSummary> {
    // G, H and τ do not depend on p
    let ctx = BallGreenContext::new(n, p.unwrap_or(1.0))?;
    let nf = n as f64;
    let robin = robin
        .iter()
        .map(|&r| {
            let v = ctx.robin(&axis(n, r))?;
            let exact = ctx.c_n * (1.0 - r * r).powf(2.0 - nf);
            Ok(RobinRow { radius: r, robin: v, closed_form: exact, rel_error: ((v - exact) / exact).abs() })
        })
        .collect::<lane_emden_core::Result<Vec<_>>>()?;
    let Some(_) = p else {
        return Ok(GreenSummary { robin, gtilde: Vec::new(), htilde_boundary: None });
    };
    let zero = vec![0.0; n as usize];
    let gtilde = shells
        .iter()
        .map(|&r| {
            let x = axis(n, r);
            let radial = ctx.gtilde_radial(&x, tol)?;
            let representation = ctx.gtilde_representation(&x, &zero, tol)?;
            let rel_diff = ((radial - representation) / representation).abs();
            Ok(GtildeRow { radius: r, radial, representation, rel_diff })
        })
        .collect::<lane_emden_core::Result<Vec<_>>>()?;
    let htilde_boundary = if ctx.regime.is_low() && n >= 5 {
        Some(ctx.check_htilde_boundary(&axis(n, 1.0), &HTILDE_DISTANCES, tol)?)
    } else {
        None
    };
    Ok(GreenSummary { robin, gtilde, htilde_boundary })
}

fn green(a: &GreenArgs) -> Result<Outcome, LabError> {
    json_only(&a.output, "green")?;
    let tol = resolve_tol(a.tol, GREEN_TOL)?;
    let mut config = base_config("green", &a.n, tol, &a.output)?;
    config.p_list = a.p.as_ref().map(|l| l.0.clone());
    config.robin = a.robin.as_ref().map(|l| l.0.clone());
    config.shells = a.shells.as_ref().map(|l| l.0.clone());
    let ps: Vec<Option<f64>> = match &config.p_list {
        Some(l) => l.iter().map(|&p| Some(p)).collect(),
        None => vec![None],
    };
    let jobs: Vec<(u32, Option<f64>)> =
        config.n_list.iter().flat_map(|&n| ps.iter().map(move |&p| (n, p))).collect();
    let robin = config.robin.clone().unwrap_or_default();
    let shells = config.shells.clone().unwrap_or_else(|| DEFAULT_GTILDE_SHELLS.to_vec());
    let results: Vec<Item<GreenSummary>> = jobs
        .par_iter()
        .map(|&(n, p)| {
            let params = p.and_then(|p| make_params(n, p, 0.0).ok());
            Item::new(n, p, None).with_params(params).from_result(green_checks(n, p, &robin, &shells, tol), |g| {
                if g.passes() {
                    Status::Ok
                } else {
                    Status::Failed
                }
            })
        })
        .collect();
    render(&Report::new(config, results))
}
