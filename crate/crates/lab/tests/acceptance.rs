//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The process exits 0 even when a criterion fails, so the run works as a
//! report inside `cargo test`. Set `ACCEPTANCE_STRICT=1` to turn failures
//! into a nonzero exit.

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Result};
use lane_emden_core::balldomain::{pohozaev_check, solve_ball, v_green_trend, BallOptions};
use lane_emden_core::entire::{solve_entire, EntireOptions, EntireSolution, PLATEAU_TOL};
use lane_emden_core::greenfun::BallGreenContext;
use lane_emden_core::halfspace::*;
use lane_emden_core::{make_params, Regime};
use lane_emden_lab::commands::{bubble_check, parallel_scan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

type Criterion = fn() -> Result<Outcome>;

fn axis(n: u32, k: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n as usize];
    v[k] = s;
    v
}

fn grid(regime: Regime) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::new();
    for n in 5..=12u32 {
        out.extend(regime_grid(n, regime, 5)?.into_iter().map(|p| (n, p)));
    }
    Ok(out)
}

fn ground_state(n: u32, p: f64) -> Result<EntireSolution> {
    Ok(solve_entire(&make_params(n, p, 0.0)?, &EntireOptions::default())?)
}

fn c1_quadrature_oracle() -> Result<Outcome> {
    let (closed, quad) = rhs_as0(5, 1.0)?;
    let first = (quad.value + 1.0 / 24.0).abs();
    let mut worst: f64 = 0.0;
    for (n, p) in grid(Regime::LowB)? {
        let (c, q) = rhs_as0(n, p)?;
        worst = worst.max((c - q.value).abs());
    }
    for (n, p) in grid(Regime::LowA)? {
        let (c, q) = rhs_as1(n, p)?;
        worst = worst.max((c - q.value).abs());
    }
    let pass = first < 1e-10 && (closed + 1.0 / 24.0).abs() < 1e-14 && worst < 1e-8;
    outcome(pass, format!("|quad + 1/24| = {first:.1e}; worst grid |closed - quad| = {worst:.1e}"))
}

fn c2_as0_certification() -> Result<Outcome> {
    let pts = grid(Regime::LowB)?;
    let reports: Vec<_> = pts.par_iter().map(|&(n, p)| verify_as0(n, p, TOL_LOW_B)).collect::<Result<_, _>>()?;
    let certified = reports.iter().filter(|r| r.verdict == Verdict::Certified).count();
    let m = verify_as0(5, 1.0, TOL_LOW_B)?.margin;
    let pass = certified == pts.len() && m >= 1.0 / 32.0 - 1e-6;
    outcome(pass, format!("{certified}/{} CERTIFIED; margin at (5,1) = {m:.7} (>= 1/32)", pts.len()))
}

fn c3_as1_certification() -> Result<Outcome> {
    let pts = grid(Regime::LowA)?;
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&(n, p)| Ok((verify_as1(n, p, TOL_LOW_A)?.verdict, verify_master(n, p, TOL_LOW_A)?.verdict)))
        .collect::<Result<_>>()?;
    let as1 = rows.iter().filter(|r| r.0 == Verdict::Certified).count();
    let master = rows.iter().filter(|r| r.1 == Verdict::Certified).count();
    let implication = rows.iter().all(|r| r.1 != Verdict::Certified || r.0 == Verdict::Certified);
    let b50 = verify_b50(100, 99.0 / 98.0)?;
    let pass = as1 == pts.len() && implication && b50;
    outcome(
        pass,
        format!("as1 {as1}/{n} CERTIFIED; master {master}/{n}, implication holds: {implication}; b50(100, 99/98) = {b50}", n = pts.len()),
    )
}

fn c4_bound_lemmas() -> Result<Outcome> {
    let pts = grid(Regime::LowA)?;
    let ok: Vec<[bool; 3]> = pts
        .par_iter()
        .map(|&(n, p)| {
            let x1 = compute_x1(n, p, TOL_LOW_A)?;
            let x2 = compute_x2(n, p, TOL_LOW_A)?;
            let x3 = compute_x3(n, p, TOL_LOW_A)?;
            Ok([
                x1.value + x1.abs_error < x1_bound(n, p)?,
                -x2.total.value + x2.total.abs_error < neg_x2_bound(n, p)?,
                x3.value + x3.abs_error < x3_bound(n, p)?,
            ])
        })
        .collect::<Result<_>>()?;
    let count = |k: usize| ok.iter().filter(|r| r[k]).count();
    let ln_y = ln_y(100, 99.0 / 98.0)?;
    let ln_bound = y_lower_bound(100).ln();
    let pass = (0..3).all(|k| count(k) == pts.len()) && ln_y >= ln_bound;
    outcome(
        pass,
        format!(
            "X1 {}/{n}, -X2 {}/{n}, X3 {}/{n} below their bounds; ln Y(100) = {ln_y:.3} >= {ln_bound:.3}",
            count(0),
            count(1),
            count(2),
            n = pts.len()
        ),
    )
}

fn c5_bubble() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, p) in [(5u32, 7.0 / 3.0), (6, 2.0)] {
        let b = bubble_check(&ground_state(n, p)?)?;
        pass &= b.pass;
        parts.push(format!(
            "n={n}: sup {:.1e}, |s*-1| {:.1e}, a {:.1e}, A_U0 {:.1e}",
            b.sup_error, b.shoot_error, b.a_rel_error, b.a_u0_rel_error
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c6_decay_plateaus() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, p) in [(5u32, 2.0), (5, 1.0)] {
        let d = ground_state(n, p)?.decay;
        let worst = d.a.variation.max(d.b.variation).max(d.l.variation);
        pass &= worst < PLATEAU_TOL;
        parts.push(format!("({n},{p}) a={:.4} b={:.4} L={:.4}, worst variation {:.2}%", d.a.value, d.b.value, d.l.value, 100.0 * worst));
    }
    outcome(pass, parts.join("; "))
}

fn random_point(rng: &mut ChaCha8Rng, n: u32, rmax: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let l = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
    let r = rmax * rng.gen::<f64>().powf(1.0 / n as f64);
    v.iter().map(|a| a * r / l).collect()
}

fn c7_green_oracles() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut robin_err: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=8u32);
        let g = BallGreenContext::new(n, 1.0)?;
        let x = random_point(&mut rng, n, 0.95);
        // image-charge form: H(x, x) = c_n (|x| |x - x*|)^{2-n}, x* = x / |x|²
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let dist = x.iter().map(|v| (v - v / r2).powi(2)).sum::<f64>().sqrt();
        let exact = g.c_n * (r2.sqrt() * dist).powf(2.0 - n as f64);
        robin_err = robin_err.max(((g.robin(&x)? - exact) / exact).abs());
    }
    let mut bad_pairs = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=8u32);
        let g = BallGreenContext::new(n, 1.0)?;
        let (x, y) = (random_point(&mut rng, n, 0.999), random_point(&mut rng, n, 0.999));
        let d = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let v = g.green(&x, &y)?;
        if !(v > 0.0 && v < g.c_n * d.powf(2.0 - n as f64)) {
            bad_pairs += 1;
        }
    }
    let mut spreads = Vec::new();
    let mut positive = true;
    for n in [3u32, 5] {
        let g = BallGreenContext::new(n, 1.0)?;
        let y = axis(n, 1, 0.4);
        let mut ratios = Vec::new();
        for d in [0.2, 0.1, 0.05, 0.02] {
            let est = g.check_h_boundary(&axis(n, 0, 1.0 - d), &y)?;
            positive &= est.ratio_fd > 0.0 && est.image_ratio.is_finite();
            ratios.push(est.ratio_fd);
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0f64), |(a, b), &r| (a.min(r), b.max(r)));
        spreads.push(hi / lo);
    }
    let bounded = spreads.iter().all(|&s| s.is_finite() && s < 10.0);
    let pass = robin_err < 1e-10 && bad_pairs == 0 && positive && bounded;
    outcome(
        pass,
        format!(
            "robin max rel err {robin_err:.1e} (100 pts); G bound violations {bad_pairs}/1000; boundary ratio spread n=3 {:.2}, n=5 {:.2}",
            spreads[0], spreads[1]
        ),
    )
}

fn c8_gtilde_dual() -> Result<Outcome> {
    let worst = [1.0, 1.3]
        .par_iter()
        .map(|&p| {
            let g = BallGreenContext::new(5, p)?;
            let zero = vec![0.0; 5];
            let mut worst: f64 = 0.0;
            for k in 0..10 {
                let x = axis(5, k % 5, 0.05 + 0.09 * k as f64);
                let a = g.gtilde_radial(&x, 1e-9)?;
                let b = g.gtilde_representation(&x, &zero, 1e-9)?;
                worst = worst.max(((a - b) / a).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    outcome(worst.iter().all(|&w| w < 1e-4), format!("max rel diff (5,1) {:.1e}, (5,1.3) {:.1e}", worst[0], worst[1]))
}

fn c9_htilde_positivity() -> Result<Outcome> {
    let ds = [0.2, 0.1, 0.05, 0.02, 0.01];
    let cases = [(5u32, 1.0), (5, 1.3), (6, 0.8), (7, 1.2)];
    let rows = cases
        .par_iter()
        .map(|&(n, p)| {
            let g = BallGreenContext::new(n, p)?;
            Ok(g.check_htilde_boundary(&axis(n, 0, 1.0), &ds, 1e-8)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.all_positive());
    let parts: Vec<String> =
        rows.iter().map(|r| format!("({},{}) min {:.3e} spread {:.2}", r.n, r.p, r.min_ratio, r.spread())).collect();
    outcome(pass, parts.join("; "))
}

fn c10_pohozaev() -> Result<Outcome> {
    let g = BallGreenContext::new(5, 1.0)?;
    let x0 = axis(5, 0, 0.5);
    let radii = [0.05, 0.1, 0.2];
    let i1: Vec<f64> = radii.iter().map(|&r| g.pohozaev_i1(&x0, r, 0, 1e-13)).collect::<Result<_, _>>()?;
    let i1_spread = i1.iter().map(|v| ((v - i1[0]) / i1[0]).abs()).fold(0.0, f64::max);
    // closed form: ∂₁H(x, x0) at x = x0 is c_n (n-2) |x0| (1-|x0|²)^{1-n}
    let (a, nf) = (0.5f64, 5.0f64);
    let dh = g.c_n * (nf - 2.0) * a * (1.0 - a * a).powf(1.0 - nf);
    let limit = 2.0 * g.c_n * (nf - 2.0) * g.sphere * dh;
    let i1_limit = ((i1[1] - limit) / limit).abs();
    let i2: Vec<f64> = radii.iter().map(|&r| g.pohozaev_i2(&x0, r, 0, 1e-7)).collect::<Result<_, _>>()?;
    let i2_spread = i2.iter().map(|v| ((v - i2[0]) / i2[0]).abs()).fold(0.0, f64::max);
    let sol = solve_ball(&make_params(5, 2.0, 0.01)?, &BallOptions::default())?;
    let rec = pohozaev_check(&sol, &axis(5, 0, 0.3), 0.2, 0, 1e-10)?;
    let pass = i1_spread < 1e-6 && i1_limit < 1e-5 && i2_spread < 1e-4 && rec.residual < 1e-4;
    outcome(
        pass,
        format!(
            "I1 r-spread {i1_spread:.1e}, limit err {i1_limit:.1e}; I2 r-spread {i2_spread:.1e}; ball residual {:.1e}",
            rec.residual
        ),
    )
}

const EPS_LIST: [f64; 4] = [0.02, 0.01, 0.005, 0.002];

fn c11_blowup_law() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, target) in [(2.0, 4.0 / 9.0), (1.0, 0.5)] {
        let s = parallel_scan(5, p, &EPS_LIST, &BallOptions::default(), None)?;
        let slope = s.scan.slope.ok_or_else(|| anyhow!("scan at p = {p} has no slope"))?;
        let local = s.scan.rows.last().and_then(|r| r.slope_estimate).unwrap_or(f64::NAN);
        let ratio = s.energy_ratio.ok_or_else(|| anyhow!("no energy quotient at p = {p}"))?;
        let ok = (slope - target).abs() < 0.1 * target && (ratio - 1.0).abs() < 0.05;
        pass &= ok;
        parts.push(format!(
            "(5,{p}) slope {slope:.3} vs {target:.4} (last local {local:.3}), S_eps/S {ratio:.4}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c12_green_approximation() -> Result<Outcome> {
    let a_u0 = ground_state(5, 2.0)?.a_u0.value().ok_or_else(|| anyhow!("A_U0 diverges at (5,2)"))?;
    let shells = [0.3, 0.5, 0.7];
    let devs = EPS_LIST
        .par_iter()
        .map(|&e| {
            let sol = solve_ball(&make_params(5, 2.0, e)?, &BallOptions::default())?;
            Ok(v_green_trend(&sol, a_u0, &shells)?.max_deviation)
        })
        .collect::<Result<Vec<f64>>>()?;
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let last = *devs.last().expect("non-empty");
    let list: Vec<String> = devs.iter().map(|d| format!("{:.3}", d)).collect();
    outcome(monotone && last < 0.1, format!("deviations [{}], monotone: {monotone}", list.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 12] = [
        ("closed-form quadrature oracle", c1_quadrature_oracle),
        ("as0 certification", c2_as0_certification),
        ("as1 certification", c3_as1_certification),
        ("bound lemmas", c4_bound_lemmas),
        ("bubble oracle", c5_bubble),
        ("decay plateaus", c6_decay_plateaus),
        ("Green's function oracles", c7_green_oracles),
        ("G~ dual methods", c8_gtilde_dual),
        ("H~ boundary positivity", c9_htilde_positivity),
        ("Pohozaev functionals", c10_pohozaev),
        ("blow-up scaling law", c11_blowup_law),
        ("Green approximation of v", c12_green_approximation),
    ];
    let start = Instant::now();
    let results: Vec<(Result<Outcome>, f64)> = criteria
        .par_iter()
        .map(|(_, f)| {
            let t = Instant::now();
            let r = f();
            (r, t.elapsed().as_secs_f64())
        })
        .collect();
    let mut passed = 0;
    for (k, ((name, _), (res, secs))) in criteria.iter().zip(&results).enumerate() {
        let (tag, detail) = match res {
            Ok(o) if o.pass => ("PASS", o.detail.clone()),
            Ok(o) => ("FAIL", o.detail.clone()),
            Err(e) => ("FAIL", format!("error: {e:#}")),
        };
        if tag == "PASS" {
            passed += 1;
        }
        println!("criterion {:>2} {tag} {name} ({secs:.1}s): {detail}", k + 1);
    }
    println!("acceptance: {passed}/{} passed in {:.1}s", criteria.len(), start.elapsed().as_secs_f64());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < criteria.len() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
