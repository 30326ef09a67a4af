//! `snb`: orbit neighborhood lengths, compensator-scale fits, multiplicity
//! reading and scaling reports for saddle-node families on the line.

mod config;
mod output;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use config::{resolve, CommonArgs, RunConfig};
use output::{Json, Sink};
use rayon::prelude::*;
use snb_core::format::{fmt_f64, fmt_usize};
use snb_core::{
    content_blowup, dimension_report, eta_sample, fit_scale, generate_orbit, read_multiplicity,
    tail_lengths_with_orbit, Fatou,
};

#[derive(Parser)]
#[command(
    name = "snb",
    about = "Epsilon-neighborhood analysis of saddle-node unfoldings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the forward orbit of the time-one map.
    Orbit(CommonArgs),
    /// Tail lengths and neighborhood measures over the epsilon grid.
    Lengths(CommonArgs),
    /// Least-squares fit of the continuous tail length in the scale {I eta^k}.
    Fit(CommonArgs),
    /// Count vanishing leading scale coefficients and cross-check the jet.
    Multiplicity(CommonArgs),
    /// Box-dimension estimates from neighborhood lengths.
    Boxdim(CommonArgs),
    /// Minkowski-content proxy sweep over a parameter grid.
    Sweep(CommonArgs),
    /// Run invariant suites; exit status reflects the outcome.
    Validate {
        /// Which suite: compensators | fatou | orbit | all.
        suite: String,
        #[command(flatten)]
        args: CommonArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Orbit(args) => with_pool(&args, cmd_orbit),
        Command::Lengths(args) => with_pool(&args, cmd_lengths),
        Command::Fit(args) => with_pool(&args, cmd_fit),
        Command::Multiplicity(args) => with_pool(&args, cmd_multiplicity),
        Command::Boxdim(args) => with_pool(&args, cmd_boxdim),
        Command::Sweep(args) => with_pool(&args, cmd_sweep),
        Command::Validate { suite, args } => cmd_validate(&suite, &args),
    }
}

/// Resolve the configuration and run `body` inside a thread pool of the
/// requested size. Grid maps preserve input order, so results are
/// byte-identical regardless of the worker count.
fn with_pool(args: &CommonArgs, body: fn(&RunConfig) -> Result<i32>) -> Result<i32> {
    let cfg = resolve(args)?;
    if cfg.jobs == 0 {
        return body(&cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| anyhow!("jobs: {e}"))?;
    pool.install(|| body(&cfg))
}

fn cmd_orbit(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    let mut sink = Sink::new(cfg.out.clone());
    sink.line("n,x");
    for nu in cfg.nus() {
        let fatou = Fatou::new(&field, nu, cfg.x0)?;
        let orbit = generate_orbit(&fatou, cfg.x0, cfg.eps_min / 10.0, 10_000_000)?;
        for (n, x) in orbit.points.iter().enumerate() {
            sink.csv_row(&[fmt_usize(n), fmt_f64(*x)]);
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_lengths(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    let mut sink = Sink::new(cfg.out.clone());
    sink.line("epsilon,nu,n_discrete,tau,tail_discrete,tail_continuous,total_length");
    let eps_grid = cfg.eps_grid();
    for nu in cfg.nus() {
        let fatou = Fatou::new(&field, nu, cfg.x0)?;
        let orbit = generate_orbit(&fatou, cfg.x0, cfg.eps_min / 10.0, 10_000_000)?;
        let rows: Vec<_> = eps_grid
            .par_iter()
            .map(|&eps| tail_lengths_with_orbit(&fatou, &orbit, eps))
            .collect::<snb_core::Result<_>>()?;
        for m in rows {
            sink.csv_row(&[
                fmt_f64(m.epsilon),
                fmt_f64(nu),
                fmt_usize(m.n_discrete),
                fmt_f64(m.tau_continuous),
                fmt_f64(m.tail_discrete),
                fmt_f64(m.tail_continuous),
                fmt_f64(m.total_length),
            ]);
        }
    }
    sink.finish()?;
    Ok(0)
}

fn samples_parallel(
    fatou: &Fatou,
    x0: f64,
    eps_grid: &[f64],
) -> snb_core::Result<Vec<snb_core::EtaSample>> {
    eps_grid
        .par_iter()
        .map(|&e| eta_sample(fatou, x0, e))
        .collect()
}

fn dump_samples(cfg: &RunConfig, samples: &[snb_core::EtaSample]) -> Result<()> {
    if let Some(path) = &cfg.dump_samples {
        let mut sink = Sink::new(Some(path.clone()));
        sink.line("epsilon,eta,i_value,ell_c");
        for s in samples {
            sink.csv_row(&[
                fmt_f64(s.epsilon),
                fmt_f64(s.eta),
                fmt_f64(s.i_value),
                fmt_f64(s.ell_c),
            ]);
        }
        sink.finish()?;
    }
    Ok(())
}

fn single_nu(cfg: &RunConfig, subcommand: &str) -> Result<f64> {
    if cfg.nu_grid.is_some() {
        bail!("nu-grid: {subcommand} analyzes one parameter value; use --nu");
    }
    Ok(cfg.nu)
}

fn cmd_fit(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    let fatou = Fatou::new(&field, single_nu(cfg, "fit")?, cfg.x0)?;
    let samples = samples_parallel(&fatou, cfg.x0, &cfg.eps_grid())?;
    dump_samples(cfg, &samples)?;
    let fit = fit_scale(&samples, cfg.degree)?;
    let json = Json::Object(vec![
        ("degree".into(), Json::Integer(fit.degree as i64)),
        (
            "coefficients".into(),
            Json::Array(fit.coefficients.iter().map(|&c| Json::Number(c)).collect()),
        ),
        ("residual_rms".into(), Json::Number(fit.residual_rms)),
        ("condition".into(), Json::Number(fit.condition_estimate)),
    ]);
    let mut sink = Sink::new(cfg.out.clone());
    sink.line(&json.render());
    sink.finish()?;
    Ok(0)
}

fn cmd_multiplicity(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    let fatou = Fatou::new(&field, single_nu(cfg, "multiplicity")?, cfg.x0)?;
    let samples = samples_parallel(&fatou, cfg.x0, &cfg.eps_grid())?;
    dump_samples(cfg, &samples)?;
    let fit = fit_scale(&samples, cfg.degree)?;
    let jet = fatou.displacement_jet(2)?;
    let report = read_multiplicity(&fit, &jet, cfg.tol_rel);
    let json = Json::Object(vec![
        (
            "vanish_count".into(),
            Json::Integer(report.vanish_count as i64),
        ),
        ("tol_rel".into(), Json::Number(report.tol_rel)),
        (
            "jet_vanish_count".into(),
            Json::Integer(report.jet_vanish_count as i64),
        ),
        ("agree".into(), Json::Bool(report.agree)),
        (
            "fit_coefficients".into(),
            Json::Array(fit.coefficients.iter().map(|&c| Json::Number(c)).collect()),
        ),
        (
            "jet_coefficients".into(),
            Json::Array(jet.coeffs.iter().map(|&c| Json::Number(c)).collect()),
        ),
    ]);
    let mut sink = Sink::new(cfg.out.clone());
    sink.line(&json.render());
    sink.finish()?;
    Ok(0)
}

fn cmd_boxdim(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    let eps_grid = cfg.eps_grid();
    let nus = cfg.nus();
    let reports: Vec<_> = nus
        .par_iter()
        .map(|&nu| {
            let fatou = Fatou::new(&field, nu, cfg.x0)?;
            dimension_report(&fatou, cfg.x0, &eps_grid)
        })
        .collect::<snb_core::Result<_>>()?;
    let mut sink = Sink::new(cfg.out.clone());
    sink.line("nu,slope,dim_estimate");
    for r in reports {
        sink.csv_row(&[fmt_f64(r.nu), fmt_f64(r.slope), fmt_f64(r.dim_estimate)]);
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let field = cfg.build_field()?;
    cfg.validate_against_field(&field)?;
    if cfg.nu_grid.is_none() {
        bail!("nu-grid: sweep requires --nu-grid a,b,n");
    }
    let eps_grid = cfg.eps_grid();
    let nus = cfg.nus();
    let fatous: Vec<Fatou> = nus
        .iter()
        .map(|&nu| Fatou::new(&field, nu, cfg.x0))
        .collect::<snb_core::Result<_>>()?;
    let rows = content_blowup(fatous.iter(), cfg.x0, &eps_grid)?;
    let mut sink = Sink::new(cfg.out.clone());
    sink.line("nu,median_content");
    for r in rows {
        sink.csv_row(&[fmt_f64(r.nu), fmt_f64(r.median_content)]);
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_validate(suite: &str, args: &CommonArgs) -> Result<i32> {
    let cfg = resolve_for_validate(args)?;
    let rows = match suite {
        "compensators" => snb_core::compensator_suite(),
        "fatou" => snb_core::fatou_suite()?,
        "orbit" => snb_core::orbit_suite()?,
        "all" => snb_core::all_suites()?,
        other => bail!("validate: unknown suite `{other}` (compensators | fatou | orbit | all)"),
    };
    let mut sink = Sink::new(cfg.and_then(|c| c.out));
    sink.line("identity,grid,max_err,tolerance,pass");
    let mut all_pass = true;
    for r in &rows {
        all_pass &= r.pass;
        sink.csv_row(&[
            r.identity.clone(),
            format!("\"{}\"", r.grid),
            fmt_f64(r.max_err),
            fmt_f64(r.tolerance),
            r.pass.to_string(),
        ]);
    }
    sink.finish()?;
    Ok(if all_pass { 0 } else { 1 })
}

/// Validate runs need no field; only honor --out/--config if present.
fn resolve_for_validate(args: &CommonArgs) -> Result<Option<RunConfig>> {
    if args.model || args.field_expr.is_some() || args.config.is_some() {
        return resolve(args).map(Some);
    }
    Ok(args.out.clone().map(|out| RunConfig {
        field_spec: config::FieldSpec::Model { rho: vec![0.0] },
        x_box: (-0.5, 1.5),
        nu_max: 0.1,
        nu: 0.0,
        nu_grid: None,
        x0: 1.0,
        eps_min: 1e-10,
        eps_max: 1e-3,
        eps_per_decade: 40,
        degree: 3,
        tol_rel: snb_core::DEFAULT_TOL_REL,
        dump_samples: None,
        out: Some(out),
        jobs: 0,
    }))
}
