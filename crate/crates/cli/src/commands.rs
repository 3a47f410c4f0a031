use jainlab::bvrate::{error_vs_bound, korovkin_check, MuRule};
use jainlab::moments::{estimate_sandwich_c, sufficiently_large_n, verify_moments, MomentGrid};
use jainlab::operators::evaluate;
use jainlab::Family;
use serde::Serialize;

use crate::output::{emit, emit_one};
use crate::settings::Settings;
use crate::CliError;

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct EvalRecord {
    family: Family,
    n: u32,
    mu: f64,
    r: u32,
    c: f64,
    x: f64,
    value: f64,
    est_error_budget: f64,
}

pub fn eval(s: &Settings) -> Result<(), CliError> {
    let spec = s.spec()?;
    let acc = s.accuracy()?;
    let f =
        s.f.as_ref()
            .ok_or_else(|| CliError::config("eval requires a function (--f)"))?
            .integrand()?;
    let x =
        s.x.ok_or_else(|| CliError::config("eval requires x >= 0 (--x)"))?;
    let value = evaluate(&f, x, &spec, &acc)?;
    let record = EvalRecord {
        family: spec.family,
        n: spec.n,
        mu: spec.mu,
        r: spec.r,
        c: spec.c,
        x,
        value,
        est_error_budget: acc.budget(),
    };
    emit_one(&record, s.format(), s.out.as_deref())
}

#[derive(Serialize)]
struct MomentRecord {
    kind: &'static str,
    m: u32,
    x: f64,
    family: Family,
    n: u32,
    r: u32,
    mu: f64,
    c: f64,
    closed: f64,
    numeric: f64,
    abs_err: f64,
    rel_err: f64,
}

pub fn verify_moments_cmd(s: &Settings) -> Result<(), CliError> {
    let acc = s.accuracy()?;
    let threshold = s.threshold.unwrap_or(1e-8);
    if !(threshold > 0.0) {
        return Err(CliError::config("threshold > 0 required"));
    }
    let mut grid = MomentGrid::default();
    if let Some(n) = s.n_values()? {
        grid.n = n;
    }
    if let Some(x) = s.x_values()? {
        grid.x = x;
    }
    if let Some(r) = s.r {
        grid.r = vec![r];
    }
    if let Some(mu) = s.mu {
        grid.mu = vec![mu];
    }
    if let Some(c) = s.c.as_ref().filter(|c| !c.is_empty()) {
        grid.c = c.clone();
    }
    let reports = verify_moments(&grid, &acc)?;
    let rows: Vec<MomentRecord> = reports
        .iter()
        .map(|r| MomentRecord {
            kind: r.kind.name(),
            m: r.m,
            x: r.x,
            family: r.spec.family,
            n: r.spec.n,
            r: r.spec.r,
            mu: r.spec.mu,
            c: r.spec.c,
            closed: r.closed,
            numeric: r.numeric,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
        })
        .collect();
    emit(&rows, s.format(), s.out.as_deref())?;
    let mut bad: Vec<&MomentRecord> = rows.iter().filter(|r| !(r.rel_err <= threshold)).collect();
    eprintln!(
        "{} moment checks, {} above threshold {threshold:e}",
        rows.len(),
        bad.len()
    );
    if bad.is_empty() {
        return Ok(());
    }
    bad.sort_by(|a, b| b.rel_err.total_cmp(&a.rel_err));
    for r in bad.iter().take(5) {
        eprintln!(
            "  {} m={} x={} {} n={} r={} mu={} c={}: rel_err {:e}",
            r.kind, r.m, r.x, r.family, r.n, r.r, r.mu, r.c, r.rel_err
        );
    }
    Err(CliError::Property(format!(
        "closed and numeric moments differ by more than {threshold:e} in {} cases",
        bad.len()
    )))
}

#[derive(Serialize)]
struct BoundRecord {
    n: u32,
    x: f64,
    measured_error: f64,
    bound_total: f64,
    term_tv: f64,
    term_jump: f64,
    term_mean: f64,
    term_f2x: f64,
    term_tail: f64,
}

pub fn bound(s: &Settings) -> Result<(), CliError> {
    let spec = s.spec()?;
    if !matches!(spec.family, Family::JainBaskakov | Family::JainBaskakovC) {
        return Err(CliError::config(
            "bound requires family jain-baskakov or jain-baskakov-c",
        ));
    }
    let acc = s.accuracy()?;
    let f =
        s.f.as_ref()
            .ok_or_else(|| CliError::config("bound requires a function (--f)"))?
            .test_function()?;
    let xs = s.x_values()?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let ns = s.n_values()?.unwrap_or_else(|| vec![50, 100, 200, 400]);
    let exp = error_vs_bound(&f, &xs, &ns, &spec, &acc)?;
    let rows: Vec<BoundRecord> = exp
        .rows
        .iter()
        .map(|r| BoundRecord {
            n: r.n,
            x: r.x,
            measured_error: r.measured_error,
            bound_total: r.bound_total,
            term_tv: r.terms.tv,
            term_jump: r.terms.jump,
            term_mean: r.terms.mean,
            term_f2x: r.terms.f2x,
            term_tail: r.terms.tail,
        })
        .collect();
    emit(&rows, s.format(), s.out.as_deref())?;
    let violations = exp.rows.iter().filter(|r| !r.dominated()).count();
    eprintln!(
        "{}: sandwich C = {}, {} rows, {violations} with measured error above the bound",
        f.name(),
        exp.sandwich_c,
        rows.len()
    );
    if violations > 0 {
        return Err(CliError::Property(format!(
            "measured error exceeds the bound in {violations} rows"
        )));
    }
    Ok(())
}

pub fn korovkin(s: &Settings) -> Result<(), CliError> {
    let acc = s.accuracy()?;
    let rule = s.mu_rule()?;
    let family = s.family();
    let c = s.single_c()?;
    let r = s.r.unwrap_or(0);
    let e = match s.x_values()? {
        None => (0.5, 2.0),
        Some(v) => (
            v.iter().copied().fold(f64::INFINITY, f64::min),
            v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
    };
    let ns = s.n_values()?.unwrap_or_else(|| vec![100, 200, 400, 800]);
    let rows = korovkin_check(family, r, c, rule, e, &ns, &acc)?;
    emit(&rows, s.format(), s.out.as_deref())?;
    match rule {
        MuRule::InvSqrt => {
            let decreasing =
                |m: usize| rows.windows(2).all(|w| w[1].errors()[m] < w[0].errors()[m]);
            let ok = decreasing(1) && decreasing(2);
            eprintln!(
                "mu_n = n^(-1/2) on E = [{}, {}]: m=1,2 sup errors decreasing over n: {}",
                e.0,
                e.1,
                if ok { "yes" } else { "no" }
            );
            if !ok {
                return Err(CliError::Property(
                    "sup errors for m = 1, 2 do not decrease over the n-grid".into(),
                ));
            }
        }
        MuRule::Constant(mu) => {
            let last = rows.last().map(|r| r.sup_err_m1).unwrap_or(0.0);
            eprintln!(
                "constant mu = {mu} on E = [{}, {}]: m=1 sup error plateaus at {last} (limit {} = b mu / (1 - mu))",
                e.0,
                e.1,
                e.1 * mu / (1.0 - mu)
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SandwichRecord {
    r: u32,
    c: f64,
    mu_max: f64,
    sandwich_c: f64,
    worst_lower: f64,
    worst_upper: f64,
    n_grid: String,
    x_grid: String,
    mu_grid: String,
}

pub fn estimate_c(s: &Settings) -> Result<(), CliError> {
    let r = s.r.unwrap_or(0);
    let c = s.single_c()?;
    let mu_max = s.mu.unwrap_or(0.2);
    let n0 = sufficiently_large_n(r, c);
    let ns = s
        .n_values()?
        .unwrap_or_else(|| vec![n0, 2 * n0, 4 * n0, 8 * n0]);
    let xs = s
        .x_values()?
        .unwrap_or_else(|| (0..9).map(|i| 0.25 + 3.75 * f64::from(i) / 8.0).collect());
    let est = estimate_sandwich_c(r, mu_max, &ns, &xs, c)?;
    let record = SandwichRecord {
        r,
        c,
        mu_max: est.mu_max,
        sandwich_c: est.constant,
        worst_lower: est.worst_lower,
        worst_upper: est.worst_upper,
        n_grid: join(&est.n_grid),
        x_grid: join(&est.x_grid),
        mu_grid: join(&est.mu_grid),
    };
    emit_one(&record, s.format(), s.out.as_deref())?;
    eprintln!("C = {}", est.constant);
    Ok(())
}
