//! Run settings: a TOML file merged with command-line flags (flags win).

use std::path::{Path, PathBuf};

use jainlab::bvrate::{corpus_function, MuRule, TestFunction, TestFunctionDef, CORPUS};
use jainlab::poly::{PiecewisePoly, Poly};
use jainlab::{Accuracy, Family, Integrand, OperatorSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A grid in a config file: `"a,b,c"`, `"start:stop:count[:log]"`, a list,
/// or a `{ start, stop, count, spacing }` table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GridSpec::Text(s) => parse_grid(s),
            GridSpec::List(v) if v.is_empty() => Err(CliError::config("grids must be nonempty")),
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range {
                start,
                stop,
                count,
                spacing,
            } => range(*start, *stop, *count, *spacing),
        }
    }
}

fn range(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>, CliError> {
    if count == 0 {
        return Err(CliError::config("grids must be nonempty (count >= 1)"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..count)
            .map(|i| start + (stop - start) * step(i))
            .collect()),
        Spacing::Log => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(CliError::config("log grids need positive endpoints"));
            }
            let ratio = stop / start;
            Ok((0..count).map(|i| start * ratio.powf(step(i))).collect())
        }
    }
}

fn number(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("not a number: {s:?}")))
}

/// `"a,b,c"` or `"start:stop:count[:log]"`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => {
                return Err(CliError::config(format!(
                    "grid spacing must be linear or log, got {other:?}"
                )))
            }
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::config(format!(
                "grid must be start:stop:count[:log], got {s:?}"
            )));
        }
        let count = parts[2].trim().parse::<usize>().map_err(|_| {
            CliError::config(format!(
                "grid count must be a positive integer, got {:?}",
                parts[2]
            ))
        })?;
        return range(number(parts[0])?, number(parts[1])?, count, spacing);
    }
    let values = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(number)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::config("grids must be nonempty"));
    }
    Ok(values)
}

/// An n-grid: positive integers.
pub fn integer_grid(values: &[f64]) -> Result<Vec<u32>, CliError> {
    values
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(CliError::config(format!(
                    "n-grid values must be positive integers, got {v}"
                )))
            }
        })
        .collect()
}

/// A function given inline or as a table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Text(String),
    Def(TestFunctionDef),
}

fn coefficients(s: &str) -> Result<Vec<f64>, CliError> {
    let c = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if c.is_empty() {
        return Err(CliError::config(
            "polynomials need at least one coefficient",
        ));
    }
    Ok(c)
}

/// What an inline function string describes.
pub enum ParsedFunction {
    Poly(Vec<f64>),
    Test(TestFunction),
}

impl FunctionSpec {
    pub fn parse(&self) -> Result<ParsedFunction, CliError> {
        let text = match self {
            FunctionSpec::Def(def) => {
                return Ok(ParsedFunction::Test(TestFunction::from_def(def)?))
            }
            FunctionSpec::Text(t) => t.trim(),
        };
        if let Some(rest) = text.strip_prefix("poly:") {
            return Ok(ParsedFunction::Poly(coefficients(rest)?));
        }
        if let Some(rest) = text.strip_prefix("piecewise:") {
            let mut knots = Vec::new();
            let mut pieces = Vec::new();
            for piece in rest.split(';').filter(|p| !p.trim().is_empty()) {
                let (bp, coefs) = piece.split_once('|').ok_or_else(|| {
                    CliError::config(format!(
                        "piecewise pieces must be bp|c0,c1,..., got {piece:?}"
                    ))
                })?;
                knots.push(number(bp)?);
                pieces.push(Poly::new(coefficients(coefs)?));
            }
            let f = PiecewisePoly::new(knots, pieces)?;
            return Ok(ParsedFunction::Test(TestFunction::with_derived_envelope(
                "inline", f,
            )?));
        }
        let name = text.strip_prefix("corpus:").unwrap_or(text);
        if CORPUS.contains(&name) {
            return Ok(ParsedFunction::Test(corpus_function(name)?));
        }
        Err(CliError::config(format!(
            "function must be poly:c0,c1,..., piecewise:bp|c0,...;..., or corpus:<{}>, got {text:?}",
            CORPUS.join("|")
        )))
    }

    pub fn integrand(&self) -> Result<Integrand, CliError> {
        Ok(match self.parse()? {
            ParsedFunction::Poly(c) => Integrand::polynomial(c),
            ParsedFunction::Test(t) => t.integrand()?,
        })
    }

    pub fn test_function(&self) -> Result<TestFunction, CliError> {
        Ok(match self.parse()? {
            ParsedFunction::Poly(c) => TestFunction::with_derived_envelope(
                "inline",
                PiecewisePoly::from_poly(Poly::new(c)),
            )?,
            ParsedFunction::Test(t) => t,
        })
    }
}

/// Optional accuracy overrides.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AccuracyConfig {
    pub series_eps: Option<f64>,
    pub quad_rel_eps: Option<f64>,
    pub v_cap: Option<usize>,
    pub panel_cap: Option<usize>,
}

/// Every setting a command may read.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub family: Option<Family>,
    pub n: Option<u32>,
    pub mu: Option<f64>,
    pub r: Option<u32>,
    pub c: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub x: Option<f64>,
    pub f: Option<FunctionSpec>,
    pub n_grid: Option<GridSpec>,
    pub x_grid: Option<GridSpec>,
    pub mu_rule: Option<String>,
    pub threshold: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub accuracy: Option<AccuracyConfig>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
    }

    /// Overwrite every field that `flags` sets.
    pub fn merge(mut self, flags: Settings) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        take!(
            family, n, mu, r, c, alpha, beta, x, f, n_grid, x_grid, mu_rule, threshold, format,
            out, jobs, accuracy
        );
        self
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn accuracy(&self) -> Result<Accuracy, CliError> {
        let mut acc = Accuracy::default();
        if let Some(cfg) = &self.accuracy {
            acc.series_eps = cfg.series_eps.unwrap_or(acc.series_eps);
            acc.quad_rel_eps = cfg.quad_rel_eps.unwrap_or(acc.quad_rel_eps);
            acc.v_cap = cfg.v_cap.unwrap_or(acc.v_cap);
            acc.panel_cap = cfg.panel_cap.unwrap_or(acc.panel_cap);
        }
        acc.validate()?;
        Ok(acc)
    }

    pub fn family(&self) -> Family {
        self.family.unwrap_or(Family::JainBaskakov)
    }

    /// The single `c` of commands that take one.
    pub fn single_c(&self) -> Result<f64, CliError> {
        match self.c.as_deref() {
            None | Some([]) => Ok(1.0),
            Some([c]) => Ok(*c),
            Some(_) => Err(CliError::config("this command takes a single --c")),
        }
    }

    /// The operator spec named by the scalar settings, validated.
    pub fn spec(&self) -> Result<OperatorSpec, CliError> {
        let family = self.family();
        let mut spec = match family {
            Family::Jain => OperatorSpec::jain(self.n.unwrap_or(100), self.mu.unwrap_or(0.0)),
            _ => OperatorSpec::jain_baskakov(
                self.n.unwrap_or(100),
                self.r.unwrap_or(0),
                self.mu.unwrap_or(0.0),
            ),
        };
        spec.family = family;
        spec.c = self.single_c()?;
        spec.alpha = self.alpha.unwrap_or(0.0);
        spec.beta = self.beta.unwrap_or(0.0);
        spec.validate()?;
        Ok(spec)
    }

    pub fn mu_rule(&self) -> Result<MuRule, CliError> {
        match &self.mu_rule {
            None => Ok(MuRule::InvSqrt),
            Some(s) => Ok(s.parse::<MuRule>()?),
        }
    }

    pub fn grid(&self, grid: &Option<GridSpec>) -> Result<Option<Vec<f64>>, CliError> {
        grid.as_ref().map(GridSpec::values).transpose()
    }

    pub fn n_values(&self) -> Result<Option<Vec<u32>>, CliError> {
        self.grid(&self.n_grid)?
            .map(|v| integer_grid(&v))
            .transpose()
    }

    pub fn x_values(&self) -> Result<Option<Vec<f64>>, CliError> {
        self.grid(&self.x_grid)
    }
}
