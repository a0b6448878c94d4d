//! Self-convergence studies: runs a scheme over a halving chain of step
//! sizes or mesh sizes, measures the difference between consecutive
//! resolutions at the final time, and reports observed rates.

pub mod tables;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fem1d::{nested_error, Mesh1D, NodalField, NormKind};
use crate::model::ProblemSpec;
use crate::stepper::{run, Scheme, SchemeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Temporal,
    Spatial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `τ` for temporal studies, `h` for spatial ones.
    pub resolution: f64,
    pub error: f64,
    /// `ln(E_k / E_{k+1}) / ln 2` against the previous row.
    pub rate: Option<f64>,
}

/// Problem and discretization parameters a report was produced with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub alpha: f64,
    pub rho: [f64; 2],
    #[serde(rename = "T")]
    pub horizon: f64,
    pub scheme: Scheme,
    /// Step counts (temporal) or cell counts (spatial) of the chain.
    pub chain: Vec<usize>,
    /// Cell count (temporal) or step count (spatial) held fixed.
    pub fixed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub study: Study,
    pub norm: NormKind,
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }
}

/// `ln(E_coarse / E_fine) / ln 2`
pub fn observed_rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).ln() / std::f64::consts::LN_2
}

fn rows_from(resolutions: &[f64], errors: &[f64]) -> Vec<ReportRow> {
    resolutions
        .iter()
        .zip(errors)
        .enumerate()
        .map(|(k, (&resolution, &error))| ReportRow {
            resolution,
            error,
            rate: (k > 0).then(|| observed_rate(errors[k - 1], error)),
        })
        .collect()
}

fn check_halving(chain: &[usize], what: &str) -> Result<()> {
    if chain.is_empty() {
        return Err(invalid(format!("empty {what} chain")));
    }
    if chain.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(invalid(format!("{what} chain {chain:?} is not a halving chain")));
    }
    Ok(())
}

fn metadata(problem: &ProblemSpec, scheme: Scheme, chain: &[usize], fixed: usize) -> ReportMetadata {
    ReportMetadata {
        alpha: problem.alpha,
        rho: [problem.rho.re, problem.rho.im],
        horizon: problem.horizon,
        scheme,
        chain: chain.to_vec(),
        fixed,
        label: None,
    }
}

/// Final-time fields for each configuration, computed in parallel and
/// returned in input order.
fn final_fields(problem: &ProblemSpec, configs: &[SchemeConfig]) -> Result<Vec<NodalField>> {
    configs
        .par_iter()
        .map(|cfg| Ok(run(problem, cfg)?.final_field().clone()))
        .collect()
}

/// Temporal self-convergence: `E_τ = ‖G_τ(T) − G_{τ/2}(T)‖_{L²}` for each
/// `τ = T/N` of the chain `steps`, on a fixed mesh.
pub fn temporal_convergence(
    problem: &ProblemSpec,
    scheme: Scheme,
    steps: &[usize],
    cells: usize,
) -> Result<ConvergenceReport> {
    check_halving(steps, "step")?;
    let mesh = Mesh1D::new(cells)?;
    let mut all: Vec<usize> = steps.to_vec();
    all.push(2 * steps[steps.len() - 1]);
    let configs = all
        .iter()
        .map(|&n| SchemeConfig::new(scheme, problem.horizon, n, mesh))
        .collect::<Result<Vec<_>>>()?;
    let fields = final_fields(problem, &configs)?;
    let errors = fields
        .windows(2)
        .map(|w| nested_error(&w[0], &w[1], NormKind::L2))
        .collect::<Result<Vec<_>>>()?;
    let taus: Vec<f64> = steps.iter().map(|&n| problem.horizon / n as f64).collect();
    Ok(ConvergenceReport {
        study: Study::Temporal,
        norm: NormKind::L2,
        rows: rows_from(&taus, &errors),
        metadata: metadata(problem, scheme, steps, cells),
    })
}

/// Spatial self-convergence in several norms from one set of runs.
pub fn spatial_convergence_norms(
    problem: &ProblemSpec,
    scheme: Scheme,
    cells: &[usize],
    steps: usize,
    norms: &[NormKind],
) -> Result<Vec<ConvergenceReport>> {
    check_halving(cells, "cell")?;
    let mut all: Vec<usize> = cells.to_vec();
    all.push(2 * cells[cells.len() - 1]);
    let configs = all
        .iter()
        .map(|&n| SchemeConfig::new(scheme, problem.horizon, steps, Mesh1D::new(n)?))
        .collect::<Result<Vec<_>>>()?;
    let fields = final_fields(problem, &configs)?;
    let hs: Vec<f64> = cells.iter().map(|&n| 1.0 / n as f64).collect();
    norms
        .iter()
        .map(|&norm| {
            let errors = fields
                .windows(2)
                .map(|w| nested_error(&w[0], &w[1], norm))
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvergenceReport {
                study: Study::Spatial,
                norm,
                rows: rows_from(&hs, &errors),
                metadata: metadata(problem, scheme, cells, steps),
            })
        })
        .collect()
}

/// Spatial self-convergence: `E_h = ‖G_h(T) − G_{h/2}(T)‖` for each
/// `h = 1/cells` of the chain, with a fixed number of time steps.
pub fn spatial_convergence(
    problem: &ProblemSpec,
    scheme: Scheme,
    cells: &[usize],
    steps: usize,
    norm: NormKind,
) -> Result<ConvergenceReport> {
    Ok(spatial_convergence_norms(problem, scheme, cells, steps, &[norm])?.remove(0))
}

/// L² spatial studies of the projected-source scheme and of the variant
/// that multiplies the projected initial datum, side by side.
pub fn projection_comparison(
    problem: &ProblemSpec,
    cells: &[usize],
    steps: usize,
) -> Result<(ConvergenceReport, ConvergenceReport)> {
    let (main, variant) = rayon::join(
        || spatial_convergence(problem, Scheme::Be, cells, steps, NormKind::L2),
        || spatial_convergence(problem, Scheme::BeVariant, cells, steps, NormKind::L2),
    );
    Ok((main?, variant?))
}

/// Six significant digits in scientific notation.
pub fn format_sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `resolution,error,rate` CSV to `path` and the metadata to the
/// same path with a `.json` extension.
pub fn emit_report(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["resolution", "error", "rate"])?;
    for row in &report.rows {
        w.write_record([
            format_sci(row.resolution),
            format_sci(row.error),
            row.rate.map(format_sci).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let meta = serde_json::to_string_pretty(&serde_json::json!({
        "study": report.study,
        "norm": report.norm,
        "metadata": report.metadata,
    }))?;
    fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

/// Reads the rows written by [`emit_report`].
pub fn read_report_rows(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| invalid(format!("bad number {:?} in report", &rec[i])))
        };
        let rate = if rec[2].is_empty() { None } else { Some(parse(2)?) };
        rows.push(ReportRow {
            resolution: parse(0)?,
            error: parse(1)?,
            rate,
        });
    }
    Ok(rows)
}

/// Two-column `resolution error` text for plotting tools.
pub fn emit_plot_data(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# resolution error")?;
    for row in &report.rows {
        writeln!(f, "{} {}", format_sci(row.resolution), format_sci(row.error))?;
    }
    Ok(())
}

/// `x,re,im` rows of a field including the boundary nodes.
pub fn write_field_csv(field: &NodalField, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "re", "im"])?;
    let mesh = field.mesh();
    for j in 0..=mesh.n_cells() {
        let v: Complex64 = field.node_value(j);
        w.write_record([
            format!("{:.17e}", mesh.node(j)),
            format!("{:.17e}", v.re),
            format!("{:.17e}", v.im),
        ])?;
    }
    w.flush()?;
    Ok(())
}
