//! Run configuration: parsed flags, overridden by an optional `key=value` file whose
//! keys are the long flag names.

use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "VPS_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    AbelForward,
    AbelInvert,
    EddingtonForward,
    EddingtonInvert,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::AbelForward => "abel-forward",
            Self::AbelInvert => "abel-invert",
            Self::EddingtonForward => "eddington-forward",
            Self::EddingtonInvert => "eddington-invert",
        }
    }

    pub fn is_inversion(self) -> bool {
        matches!(self, Self::AbelInvert | Self::EddingtonInvert)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Inverse,
    Direct,
    Transform,
    ModelsList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub fixture: Option<String>,
    pub input: Option<PathBuf>,
    pub cutoff: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    /// Sample count of the inverse-problem scan.
    pub grid: usize,
    /// Finest `n` of the refinement ladder.
    pub n_max: usize,
    pub newton_tol: f64,
    pub bisection_tol: f64,
    pub max_iterations: usize,
    pub kind: Option<TransformKind>,
    pub upper: Option<f64>,
    pub points: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            fixture: None,
            input: None,
            cutoff: None,
            b: None,
            c: None,
            grid: 200,
            n_max: 128,
            newton_tol: 1e-9,
            bisection_tol: 1e-12,
            max_iterations: 50,
            kind: None,
            upper: None,
            points: 100,
            out: None,
            format: Format::Csv,
        }
    }

    /// Applies every `key=value` line of `path`. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value {value:?} for {key}"))
        }
        match key {
            "fixture" => self.fixture = Some(value.to_string()),
            "input" => self.input = Some(PathBuf::from(value)),
            "R" => self.cutoff = Some(num(key, value)?),
            "b" => self.b = Some(num(key, value)?),
            "c" => self.c = Some(num(key, value)?),
            "grid" => self.grid = num(key, value)?,
            "n" => self.n_max = num(key, value)?,
            "newton-tol" => self.newton_tol = num(key, value)?,
            "bisection-tol" => self.bisection_tol = num(key, value)?,
            "max-iterations" => self.max_iterations = num(key, value)?,
            "kind" => self.kind = Some(TransformKind::from_str(value, false)?),
            "upper" => self.upper = Some(num(key, value)?),
            "points" => self.points = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Format::from_str(value, false)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        for (name, v) in [
            ("newton-tol", self.newton_tol),
            ("bisection-tol", self.bisection_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return usage(format!("{name} must be positive, got {v}"));
            }
        }
        if self.command == Command::Direct && !(self.n_max >= 1 && self.n_max.is_power_of_two()) {
            return usage(format!("n must be a power of two, got {}", self.n_max));
        }
        if self.grid < 2 {
            return usage(format!("grid must be at least 2, got {}", self.grid));
        }
        if self.points == 0 {
            return usage("points must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return usage("max-iterations must be at least 1".into());
        }
        if let Some(u) = self.upper {
            if !(u > 0.0 && u.is_finite()) {
                return usage(format!("upper must be positive, got {u}"));
            }
        }
        match self.command {
            Command::Inverse | Command::Direct if self.fixture.is_none() => {
                usage("--fixture is required".into())
            }
            Command::Transform if self.kind.is_none() => usage("--kind is required".into()),
            Command::Transform if self.fixture.is_some() == self.input.is_some() => {
                usage("give exactly one of --fixture and --input".into())
            }
            _ => Ok(()),
        }
    }

    /// `--out`, else the environment default; `None` means stdout.
    pub fn output_dir(&self) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            std::env::var_os(OUTPUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
    }
}
