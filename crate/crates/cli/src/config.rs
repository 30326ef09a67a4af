//! Run configuration: flat key=value config files, flag merging and
//! field-level validation. Flags override file values; defaults fill the
//! rest.

use anyhow::{anyhow, bail, Context, Result};
use snb_core::{AnalysisBox, Fatou, Field, ModelParams};
use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

/// Which family the run analyzes.
#[derive(Debug, Clone)]
pub enum FieldSpec {
    Model { rho: Vec<f64> },
    Expression(String),
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field_spec: FieldSpec,
    pub x_box: (f64, f64),
    pub nu_max: f64,
    pub nu: f64,
    pub nu_grid: Option<(f64, f64, usize)>,
    pub x0: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_per_decade: usize,
    pub degree: usize,
    pub tol_rel: f64,
    pub dump_samples: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// 0 means the default thread count.
    pub jobs: usize,
}

/// Parse a flat `key = value` file; `#` starts a comment, blank lines are
/// skipped.
pub fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("config: cannot read {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config: line {} is not `key = value`: `{raw}`", lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Parse a comma list like `0.3` or `0.3,0.1`.
pub fn parse_f64_list(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("{name}: `{p}` is not a number"))
        })
        .collect()
}

/// Parse `a,b` into an interval.
pub fn parse_pair(name: &str, text: &str) -> Result<(f64, f64)> {
    let v = parse_f64_list(name, text)?;
    if v.len() != 2 || v[0] >= v[1] {
        bail!("{name}: expected `a,b` with a < b, got `{text}`");
    }
    Ok((v[0], v[1]))
}

/// Parse `a,b,n` into a log-spaced grid description.
pub fn parse_nu_grid(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("nu-grid: expected `a,b,n`, got `{text}`");
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| anyhow!("nu-grid: `{}` is not a number", parts[0]))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| anyhow!("nu-grid: `{}` is not a number", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| anyhow!("nu-grid: `{}` is not a count", parts[2]))?;
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(a > 0.0) || !(b > a) || n < 2 {
        bail!("nu-grid: need 0 < a < b and n >= 2 (log spacing), got `{text}`");
    }
    Ok((a, b, n))
}

fn config_value<T: FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| anyhow!("config key {key}: cannot parse `{raw}`")),
    }
}

/// Raw option set shared by every subcommand (all optional; merged with the
/// config file and defaults by [`resolve`]).
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Use the built-in model family.
    #[arg(long)]
    pub model: bool,

    /// Analyze a parsed expression F(x, nu) instead of the model.
    #[arg(long, conflicts_with = "model", allow_hyphen_values = true)]
    pub field_expr: Option<String>,

    /// Model coefficients rho0[,rho1,...] of rho(nu).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,

    /// Parameter value (nu >= 0).
    #[arg(long)]
    pub nu: Option<f64>,

    /// Log-spaced parameter grid `a,b,n` with a > 0.
    #[arg(long, conflicts_with = "nu")]
    pub nu_grid: Option<String>,

    /// Initial orbit point.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,

    /// Smallest epsilon of the grid.
    #[arg(long)]
    pub eps_min: Option<f64>,

    /// Largest epsilon of the grid.
    #[arg(long)]
    pub eps_max: Option<f64>,

    /// Grid density in points per decade.
    #[arg(long)]
    pub eps_per_decade: Option<usize>,

    /// Fit degree K of the scale {I eta^k}, k = 0..K.
    #[arg(long)]
    pub degree: Option<usize>,

    /// Relative tolerance for coefficient vanishing.
    #[arg(long)]
    pub tol_rel: Option<f64>,

    /// Write the fitted samples as CSV to this path.
    #[arg(long)]
    pub dump_samples: Option<PathBuf>,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: SNB_JOBS or all cores).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Analysis box x-interval `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    pub x_box: Option<String>,

    /// Analysis box parameter ceiling.
    #[arg(long)]
    pub nu_max: Option<f64>,
}

/// Merge flags, config file and defaults into a validated `RunConfig`.
pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };

    let model_flag = args.model || config_value::<bool>(&file, "model")?.unwrap_or(false);
    let field_expr = args
        .field_expr
        .clone()
        .or_else(|| file.get("field_expr").cloned());
    let field_spec = match (model_flag, field_expr) {
        (true, Some(_)) => bail!("field: choose either --model or --field-expr, not both"),
        (true, None) => {
            let rho_text = args
                .rho
                .clone()
                .or_else(|| file.get("rho").cloned())
                .unwrap_or_else(|| "0".into());
            FieldSpec::Model {
                rho: parse_f64_list("rho", &rho_text)?,
            }
        }
        (false, Some(expr)) => FieldSpec::Expression(expr),
        (false, None) => bail!("field: one of --model or --field-expr is required"),
    };

    let x_box = match args.x_box.clone().or_else(|| file.get("x_box").cloned()) {
        Some(text) => parse_pair("x-box", &text)?,
        None => (-0.5, 1.5),
    };
    let nu_grid = match args
        .nu_grid
        .clone()
        .or_else(|| file.get("nu_grid").cloned())
    {
        Some(text) => Some(parse_nu_grid(&text)?),
        None => None,
    };

    let cfg = RunConfig {
        field_spec,
        x_box,
        nu_max: args
            .nu_max
            .or(config_value(&file, "nu_max")?)
            .unwrap_or(0.1),
        nu: args.nu.or(config_value(&file, "nu")?).unwrap_or(0.0),
        nu_grid,
        x0: args.x0.or(config_value(&file, "x0")?).unwrap_or(1.0),
        eps_min: args
            .eps_min
            .or(config_value(&file, "eps_min")?)
            .unwrap_or(1e-10),
        eps_max: args
            .eps_max
            .or(config_value(&file, "eps_max")?)
            .unwrap_or(1e-3),
        eps_per_decade: args
            .eps_per_decade
            .or(config_value(&file, "eps_per_decade")?)
            .unwrap_or(40),
        degree: args.degree.or(config_value(&file, "degree")?).unwrap_or(3),
        tol_rel: args
            .tol_rel
            .or(config_value(&file, "tol_rel")?)
            .unwrap_or(snb_core::DEFAULT_TOL_REL),
        dump_samples: args
            .dump_samples
            .clone()
            .or_else(|| file.get("dump_samples").map(PathBuf::from)),
        out: args
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from)),
        jobs: match args.jobs.or(config_value(&file, "jobs")?) {
            Some(j) => j,
            None => std::env::var("SNB_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(0),
        },
    };
    validate_static(&cfg)?;
    Ok(cfg)
}

/// Numeric sanity independent of the field. The negated comparisons also
/// reject NaN inputs.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn validate_static(cfg: &RunConfig) -> Result<()> {
    if !(cfg.eps_min > 0.0) {
        bail!("eps_min: must be positive, got {}", cfg.eps_min);
    }
    if !(cfg.eps_max > cfg.eps_min) {
        bail!(
            "eps_max: must exceed eps_min ({} <= {})",
            cfg.eps_max,
            cfg.eps_min
        );
    }
    if cfg.eps_per_decade == 0 {
        bail!("eps_per_decade: must be positive");
    }
    if !(cfg.nu >= 0.0) {
        bail!("nu: must be nonnegative, got {}", cfg.nu);
    }
    if !(cfg.nu_max > 0.0) {
        bail!("nu_max: must be positive, got {}", cfg.nu_max);
    }
    if !(cfg.tol_rel > 0.0) {
        bail!("tol_rel: must be positive, got {}", cfg.tol_rel);
    }
    if !(cfg.x0 > cfg.x_box.0 && cfg.x0 <= cfg.x_box.1) {
        bail!(
            "x0: {} outside the analysis box ({}, {}]",
            cfg.x0,
            cfg.x_box.0,
            cfg.x_box.1
        );
    }
    Ok(())
}

impl RunConfig {
    pub fn analysis_box(&self) -> AnalysisBox {
        AnalysisBox {
            x_min: self.x_box.0,
            x_max: self.x_box.1,
            nu_max: self.nu_max,
        }
    }

    pub fn build_field(&self) -> Result<Field> {
        match &self.field_spec {
            FieldSpec::Model { rho } => {
                Field::model(ModelParams::new(rho.clone()), self.analysis_box())
                    .map_err(|e| anyhow!("field: {e}"))
            }
            FieldSpec::Expression(text) => {
                let expr = snb_core::parse(text).map_err(|e| anyhow!("field-expr: {e}"))?;
                Ok(Field::generic(expr, self.analysis_box()))
            }
        }
    }

    /// The requested parameter values: the grid when given, else `nu`.
    pub fn nus(&self) -> Vec<f64> {
        match self.nu_grid {
            Some((a, b, n)) => snb_core::grid::log_grid_n(a, b, n),
            None => vec![self.nu],
        }
    }

    pub fn eps_grid(&self) -> Vec<f64> {
        snb_core::grid::log_grid(self.eps_min, self.eps_max, self.eps_per_decade)
    }

    /// Per-parameter validation requiring the field: every requested nu must
    /// keep `2 eps_max` inside the displacement range at `x0`.
    pub fn validate_against_field(&self, field: &Field) -> Result<()> {
        for nu in self.nus() {
            if nu > self.nu_max {
                bail!("nu: {} exceeds nu_max = {}", nu, self.nu_max);
            }
            let fatou =
                Fatou::new(field, nu, self.x0).map_err(|e| anyhow!("field at nu = {nu}: {e}"))?;
            let g_x0 = fatou
                .displacement(self.x0)
                .map_err(|e| anyhow!("displacement at x0, nu = {nu}: {e}"))?;
            if 2.0 * self.eps_max >= g_x0 {
                bail!(
                    "eps_max: 2*eps_max = {} must stay below g(x0) = {} at nu = {nu}",
                    2.0 * self.eps_max,
                    g_x0
                );
            }
        }
        Ok(())
    }
}
