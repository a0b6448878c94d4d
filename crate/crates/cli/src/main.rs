use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use fracfk::harness::tables::{Comparison, TABLES};
use fracfk::harness::{
    emit_plot_data, emit_report, format_sci, projection_comparison, spatial_convergence_norms, temporal_convergence,
    write_field_csv, ConvergenceReport,
};
use fracfk::model::ProblemConfig;
use fracfk::oracle::{reference_solution, regularity_probe, ContourSpec};
use fracfk::stepper::{run, SchemeConfig};
use fracfk::{CqWeights, Generator, Mesh1D, NormKind, ProblemSpec, Scheme};

#[derive(Parser)]
#[command(name = "fracfk", version, about = "Backward fractional Feynman-Kac solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convolution quadrature weights as CSV `i,d_i`
    Weights {
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        n: usize,
    },
    /// Time-step a problem and write the final field as `x,re,im`
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "be")]
        scheme: Scheme,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        cells: usize,
        #[arg(long, default_value = "solution.csv")]
        out: PathBuf,
    },
    /// Contour-integral reference field at one time
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        cells: usize,
        #[command(flatten)]
        contour: ContourArgs,
        /// Write CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `(t, ‖A_h G_h(t)‖)` pairs and the fitted log-log slope
    ProbeRegularity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 128)]
        cells: usize,
        /// Sample at t = T·2^{-k} for k = 0..=levels
        #[arg(long, default_value_t = 8)]
        levels: i32,
        #[command(flatten)]
        contour: ContourArgs,
    },
    /// Temporal self-convergence study
    ConvTime(StudyArgs),
    /// Spatial self-convergence study
    ConvSpace(StudyArgs),
    /// Main scheme against the variant with a projected initial datum
    CompareProjection(StudyArgs),
    /// Run the eight benchmark tables and compare with the reference values
    ReproTables {
        #[arg(long, default_value = "tables")]
        out: PathBuf,
        /// Only these tables
        #[arg(long, value_delimiter = ',')]
        ids: Vec<u8>,
        /// Exit non-zero when a value falls outside tolerance
        #[arg(long)]
        assert: bool,
        #[arg(long, default_value_t = 0.05)]
        error_tol: f64,
        #[arg(long, default_value_t = 0.05)]
        rate_tol: f64,
    },
}

#[derive(Args)]
struct ContourArgs {
    /// Gauss nodes on each ray (default 128)
    #[arg(long)]
    n_ray: Option<usize>,
    /// Gauss nodes on the arc (default 32)
    #[arg(long)]
    n_arc: Option<usize>,
}

impl ContourArgs {
    fn spec(&self, problem: &ProblemSpec) -> ContourSpec {
        let mut spec = ContourSpec::default_for(problem);
        spec.n_ray = self.n_ray.unwrap_or(spec.n_ray);
        spec.n_arc = self.n_arc.unwrap_or(spec.n_arc);
        spec
    }
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Problem plus the study chain, e.g.
/// `{"alpha": 0.5, "rho": [1, 1], "T": 1, "condition": "a", "scheme": "be",
///   "chain": [50, 100, 200, 400], "fixed": 128}`.
#[derive(Deserialize)]
struct StudyFile {
    #[serde(flatten)]
    problem: ProblemConfig,
    #[serde(default)]
    scheme: Option<Scheme>,
    chain: Vec<usize>,
    fixed: usize,
    #[serde(default)]
    norms: Option<Vec<NormKind>>,
}

impl StudyFile {
    fn load(path: &Path) -> Result<(Self, ProblemSpec)> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: StudyFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let problem = ProblemSpec::from_config(&file.problem)?;
        Ok((file, problem))
    }
}

fn write_report(report: &ConvergenceReport, dir: &Path, stem: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    emit_report(report, dir.join(format!("{stem}.csv")))?;
    emit_plot_data(report, dir.join(format!("{stem}.dat")))?;
    print_report(stem, report);
    Ok(())
}

fn print_report(title: &str, report: &ConvergenceReport) {
    println!("{title}");
    for row in &report.rows {
        let rate = row.rate.map(|r| format!("{r:.4}")).unwrap_or_default();
        println!("  {:>12}  {:>12}  {rate}", format_sci(row.resolution), format_sci(row.error));
    }
}

fn step_count(horizon: f64, tau: f64) -> Result<usize> {
    let n = (horizon / tau).round();
    if !(tau > 0.0) || n < 1.0 || ((n * tau - horizon) / horizon).abs() > 1e-9 {
        bail!("tau = {tau} does not divide T = {horizon}");
    }
    Ok(n as usize)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Weights { order, alpha, tau, n } => {
            let w = CqWeights::new(Generator::from_order(order)?, alpha, tau, n)?;
            let mut out = io::stdout().lock();
            writeln!(out, "i,d_i")?;
            for (i, d) in w.d.iter().enumerate() {
                writeln!(out, "{i},{d:.17e}")?;
            }
        }
        Command::Solve { config, scheme, tau, cells, out } => {
            let problem = ProblemSpec::load(&config)?;
            let cfg = SchemeConfig::new(scheme, problem.horizon, step_count(problem.horizon, tau)?, Mesh1D::new(cells)?)?;
            let history = run(&problem, &cfg)?;
            write_field_csv(history.final_field(), &out)?;
            eprintln!(
                "{scheme}: {} steps on {cells} cells in {:.3}s -> {}",
                cfg.n_steps,
                history.elapsed.as_secs_f64(),
                out.display()
            );
        }
        Command::Oracle { config, time, cells, contour, out } => {
            let problem = ProblemSpec::load(&config)?;
            let field = reference_solution(&problem, Mesh1D::new(cells)?, time, &contour.spec(&problem))?;
            match out {
                Some(path) => write_field_csv(&field, path)?,
                None => {
                    let mut w = io::stdout().lock();
                    writeln!(w, "x,re,im")?;
                    let mesh = field.mesh();
                    for j in 0..=mesh.n_cells() {
                        let v = field.node_value(j);
                        writeln!(w, "{:.17e},{:.17e},{:.17e}", mesh.node(j), v.re, v.im)?;
                    }
                }
            }
        }
        Command::ProbeRegularity { config, cells, levels, contour } => {
            let problem = ProblemSpec::load(&config)?;
            let times: Vec<f64> = (0..=levels).map(|k| problem.horizon * 0.5f64.powi(k)).collect();
            let probe = regularity_probe(&problem, Mesh1D::new(cells)?, &times, &contour.spec(&problem))?;
            println!("t,norm");
            for (t, v) in &probe.samples {
                println!("{},{}", format_sci(*t), format_sci(*v));
            }
            eprintln!("slope {:.4}", probe.slope);
        }
        Command::ConvTime(args) => {
            let (file, problem) = StudyFile::load(&args.config)?;
            let scheme = file.scheme.unwrap_or(Scheme::Be);
            let report = temporal_convergence(&problem, scheme, &file.chain, file.fixed)?;
            write_report(&report, &args.out, &format!("temporal_{scheme}"))?;
        }
        Command::ConvSpace(args) => {
            let (file, problem) = StudyFile::load(&args.config)?;
            let scheme = file.scheme.unwrap_or(Scheme::Be);
            let norms = file.norms.unwrap_or_else(|| vec![NormKind::L2, NormKind::H1]);
            for report in spatial_convergence_norms(&problem, scheme, &file.chain, file.fixed, &norms)? {
                let norm = format!("{:?}", report.norm).to_lowercase();
                write_report(&report, &args.out, &format!("spatial_{scheme}_{norm}"))?;
            }
        }
        Command::CompareProjection(args) => {
            let (file, problem) = StudyFile::load(&args.config)?;
            let (main, variant) = projection_comparison(&problem, &file.chain, file.fixed)?;
            write_report(&main, &args.out, "projection_main")?;
            write_report(&variant, &args.out, "projection_variant")?;
        }
        Command::ReproTables { out, ids, assert, error_tol, rate_tol } => {
            let mut failures = 0;
            for t in TABLES.iter().filter(|t| ids.is_empty() || ids.contains(&t.id)) {
                for col in &t.columns {
                    let report = t.run(col.alpha)?;
                    let stem = format!("table{}_alpha{}", t.id, col.alpha);
                    fs::create_dir_all(&out)?;
                    emit_report(&report, out.join(format!("{stem}.csv")))?;
                    emit_plot_data(&report, out.join(format!("{stem}.dat")))?;
                    let cmp = Comparison::new(&report, col);
                    let ok = cmp.max_error_rel() <= error_tol && cmp.max_rate_abs() <= rate_tol;
                    failures += usize::from(!ok);
                    println!(
                        "{} table {} alpha {}: errors {} rates {} (max err dev {:.2}%, max rate dev {:.4})",
                        if ok { "ok  " } else { "FAIL" },
                        t.id,
                        col.alpha,
                        report.errors().iter().map(|e| format_sci(*e)).collect::<Vec<_>>().join(" "),
                        report.rates().iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(" "),
                        100.0 * cmp.max_error_rel(),
                        cmp.max_rate_abs()
                    );
                }
            }
            if assert && failures > 0 {
                eprintln!("{failures} table columns outside tolerance");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
