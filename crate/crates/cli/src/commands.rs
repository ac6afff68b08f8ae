//! The subcommands. Each builds its artifacts as strings and hands them to an
//! [`Output`], which writes files into the output directory or prints the primary
//! artifact to stdout.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vps_core::abel_eddington::{
    abel_forward, abel_invert, eddington_forward, eddington_invert, HalfLineFunction,
};
use vps_core::ans_solver::{
    chart_csv, format_sig6, refinement_ladder, ChartLayout, LadderOptions, NewtonOptions,
};
use vps_core::inverse_problem::{dh_dh, extendability_verdict, DhSample};
use vps_core::models::{fixture, list_fixtures, FixtureParams, ModelFixture};

use crate::config::{Format, RunConfig, TransformKind};
use crate::error::{CliError, Result};

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let dir = cfg.output_dir();
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    /// Secondary artifacts are only written when there is a directory to hold them.
    fn emit(&self, name: &str, content: &str, primary: bool) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, content)?;
                eprintln!("wrote {}", path.display());
            }
            None if primary => print!("{content}"),
            None => {}
        }
        Ok(())
    }
}

fn resolve_fixture(cfg: &RunConfig) -> Result<ModelFixture> {
    let name = cfg
        .fixture
        .as_deref()
        .ok_or_else(|| CliError::Usage("--fixture is required".into()))?;
    let params = FixtureParams {
        cutoff: cfg.cutoff,
        b: cfg.b,
        c: cfg.c,
    };
    fixture(name, &params).map_err(CliError::from_setup)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn inverse(cfg: &RunConfig) -> Result<()> {
    let fx = resolve_fixture(cfg)?;
    let Some(density) = fx.density.as_ref() else {
        return Err(CliError::Usage(format!(
            "{} is defined through q only; use `direct`",
            fx.name
        )));
    };
    let report = extendability_verdict(density, cfg.grid).map_err(CliError::numerical)?;
    let samples = if report.dh_samples.is_empty() {
        uniform_dh_samples(&fx, cfg.grid)?
    } else {
        report.dh_samples.clone()
    };

    let mut x_csv = String::from("r,x\n");
    for s in &report.x_samples {
        let _ = writeln!(x_csv, "{},{}", format_sig6(s.r), format_sig6(s.x));
    }
    let mut q_csv = String::from("h,phi,dh_dh,dh_dh_error,q,q_error\n");
    for s in &samples {
        let cells = [s.h, s.phi, s.value, s.error, s.q(), s.q_error()];
        let _ = writeln!(q_csv, "{}", cells.map(format_sig6).join(","));
    }
    let json = to_json(&report);

    let out = Output::new(cfg)?;
    out.emit(
        &format!("{}-verdict.json", fx.name),
        &json,
        cfg.format == Format::Json,
    )?;
    out.emit(&format!("{}-x.csv", fx.name), &x_csv, false)?;
    out.emit(
        &format!("{}-q.csv", fx.name),
        &q_csv,
        cfg.format == Format::Csv,
    )?;

    let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
    let evidence = report
        .evidence
        .map(|e| serde_json::to_value(e).expect("evidence serializes"));
    eprintln!(
        "{}: verdict {} (evidence {}; expected {})",
        fx.name,
        verdict.as_str().unwrap_or_default(),
        evidence.as_ref().and_then(|v| v.as_str()).unwrap_or("none"),
        fx.expected
    );
    Ok(())
}

/// `dH/dh` on a uniform energy grid, for verdicts decided without sampling `q`. An
/// unbounded energy range is cut at the depth of `r = R/1000`.
fn uniform_dh_samples(fx: &ModelFixture, grid: usize) -> Result<Vec<DhSample>> {
    let slice = fx.energy_slice().map_err(CliError::numerical)?;
    let span = slice.span();
    let top = if span.is_finite() {
        span
    } else {
        slice.profile().height(1e-3 * slice.profile().cutoff())
    };
    (1..=grid)
        .map(|j| dh_dh(&slice, top * j as f64 / (grid + 1) as f64).map_err(CliError::numerical))
        .collect()
}

pub fn direct(cfg: &RunConfig) -> Result<()> {
    let fx = resolve_fixture(cfg)?;
    let Some(g0) = fx.g0.as_ref() else {
        return Err(CliError::Usage(format!(
            "{} has no closed-form G0",
            fx.name
        )));
    };
    let options = LadderOptions {
        newton: NewtonOptions {
            step_tol: cfg.newton_tol,
            residual_tol: cfg.newton_tol,
            max_iterations: cfg.max_iterations,
            ..NewtonOptions::default()
        },
        bisection_tol: cfg.bisection_tol,
        ..LadderOptions::default()
    };
    let reference = fx.reference();
    let reference = reference.as_ref().map(|f| f as &dyn Fn(f64) -> f64);
    let reports = refinement_ladder(g0, fx.cutoff, cfg.n_max, reference, &options)
        .map_err(CliError::numerical)?;

    let layout = if reference.is_some() {
        ChartLayout::Reference
    } else {
        ChartLayout::SelfConvergence
    };
    let csv = chart_csv(&reports, layout, reference, fx.e0);
    let json = to_json(&reports);
    let out = Output::new(cfg)?;
    out.emit(
        &format!("{}-ladder.json", fx.name),
        &json,
        cfg.format == Format::Json,
    )?;

    let last = reports.last().expect("the ladder always solves n = 1");
    if !last.converged {
        eprintln!("last report:\n{}", to_json(last));
        return Err(CliError::Numerical(format!(
            "Newton did not converge at n = {}: {}",
            last.n,
            last.failure.as_deref().unwrap_or("no reason recorded")
        )));
    }
    out.emit(
        &format!("{}-ladder.csv", fx.name),
        &csv,
        cfg.format == Format::Csv,
    )?;
    eprintln!(
        "{}: n = {}, E0n = {}, residual {:e}",
        fx.name,
        last.n,
        format_sig6(last.e0n),
        last.residual_inf
    );
    Ok(())
}

/// Reads `x,y` rows; a non-numeric first line is taken as a header.
fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read input {}: {e}", path.display())))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Option<(f64, f64)> = line
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        match parsed {
            Some((x, y)) => {
                xs.push(x);
                ys.push(y);
            }
            None if xs.is_empty() && lineno == 0 => {}
            None => {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected x,y",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok((xs, ys))
}

/// The sampled polygon with its piecewise-constant slope (right-continuous).
fn sampled_function(xs: Vec<f64>, ys: Vec<f64>, with_slope: bool) -> Result<HalfLineFunction> {
    let f = HalfLineFunction::from_samples(xs.clone(), ys.clone()).map_err(CliError::from_setup)?;
    if !with_slope {
        return Ok(f);
    }
    Ok(f.with_derivative(move |x| {
        let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1])
    }))
}

fn fixture_function(cfg: &RunConfig, kind: TransformKind) -> Result<HalfLineFunction> {
    let fx = resolve_fixture(cfg)?;
    if kind.is_inversion() {
        // the energy profile F₀, scaled so that Eddington inversion returns q
        let scale = if kind == TransformKind::EddingtonInvert {
            1.0 / (4.0 * PI * 2f64.sqrt())
        } else {
            1.0
        };
        let default_upper = |span: f64| {
            cfg.upper
                .unwrap_or(if span.is_finite() { span } else { 1.0 })
        };
        if let Some(e) = &fx.energy {
            let (a, b, c) = (e.f0.clone(), e.f0_prime.clone(), e.f0_second.clone());
            return Ok(
                HalfLineFunction::new(default_upper(e.span), move |h| scale * a(h))
                    .with_derivative(move |h| scale * b(h))
                    .with_second_derivative(move |h| scale * c(h)),
            );
        }
        let slice = fx.energy_slice().map_err(CliError::from_setup)?;
        let upper = default_upper(slice.span());
        let (a, b, c) = (slice.clone(), slice.clone(), slice);
        return Ok(
            HalfLineFunction::new(upper, move |h| scale * a.f0(h).unwrap_or(f64::NAN))
                .with_derivative(move |h| scale * b.f0_prime(h).unwrap_or(f64::NAN))
                .with_second_derivative(move |h| scale * c.f0_second(h).unwrap_or(f64::NAN)),
        );
    }
    let micro = fx.micro.as_ref().ok_or_else(|| {
        CliError::Usage(format!(
            "{} has no closed-form q; forward transforms need a fixture defined by q or --input",
            fx.name
        ))
    })?;
    let upper = cfg.upper.unwrap_or(if micro.upper().is_finite() {
        micro.upper()
    } else {
        1.0
    });
    let q = micro.clone();
    Ok(HalfLineFunction::new(upper, move |s| q.value(s))
        .singular_at_zero(micro.is_singular_at_zero()))
}

pub fn transform(cfg: &RunConfig) -> Result<()> {
    let kind = cfg
        .kind
        .ok_or_else(|| CliError::Usage("--kind is required".into()))?;
    let input = match &cfg.input {
        Some(path) => {
            let (xs, ys) = read_samples(path)?;
            let f = sampled_function(xs, ys, kind == TransformKind::EddingtonInvert)?;
            if let Some(u) = cfg.upper {
                if u > f.upper() {
                    return Err(CliError::Usage(format!(
                        "upper {u} exceeds the last sample {}",
                        f.upper()
                    )));
                }
            }
            f
        }
        None => fixture_function(cfg, kind)?,
    };
    let upper = cfg.upper.unwrap_or(input.upper());
    let first = usize::from(kind.is_inversion());
    let mut rows = Vec::with_capacity(cfg.points + 1);
    for j in first..=cfg.points {
        let x = upper * j as f64 / cfg.points as f64;
        let value = match kind {
            TransformKind::AbelForward => abel_forward(&input, x),
            TransformKind::AbelInvert => abel_invert(&input, x),
            TransformKind::EddingtonForward => eddington_forward(&input, x, true),
            TransformKind::EddingtonInvert => eddington_invert(&input, x),
        }
        .map_err(CliError::numerical)?;
        rows.push(Sample { x, f: value });
    }

    let content = match cfg.format {
        Format::Csv => {
            let mut s = String::from("x,f\n");
            for r in &rows {
                let _ = writeln!(s, "{},{}", format_sig6(r.x), format_sig6(r.f));
            }
            s
        }
        Format::Json => to_json(&rows),
    };
    let ext = if cfg.format == Format::Csv {
        "csv"
    } else {
        "json"
    };
    Output::new(cfg)?.emit(&format!("{}.{ext}", kind.name()), &content, true)
}

#[derive(Serialize)]
struct Sample {
    x: f64,
    f: f64,
}

pub fn models_list(cfg: &RunConfig) -> Result<()> {
    let rows = list_fixtures();
    let content = match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let widths = rows.iter().fold((4, 10), |(a, b), r| {
                (a.max(r.name.len()), b.max(r.parameters.len()))
            });
            let mut s = format!(
                "{:<a$}  {:<b$}  expected\n",
                "name",
                "parameters",
                a = widths.0,
                b = widths.1
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<a$}  {:<b$}  {}",
                    r.name,
                    r.parameters,
                    r.expected,
                    a = widths.0,
                    b = widths.1
                );
            }
            s
        }
    };
    let ext = if cfg.format == Format::Csv {
        "txt"
    } else {
        "json"
    };
    Output::new(cfg)?.emit(&format!("models.{ext}"), &content, true)
}
