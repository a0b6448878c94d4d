//! Benchmark study registry with reference errors and rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{spatial_convergence, temporal_convergence, ConvergenceReport, Study};
use crate::error::{invalid, Result};
use crate::fem1d::NormKind;
use crate::model::{Condition, ProblemConfig, ProblemSpec};
use crate::stepper::Scheme;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceColumn {
    pub alpha: f64,
    pub errors: [f64; 4],
    pub rates: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceTable {
    pub id: u8,
    pub condition: Condition,
    pub scheme: Scheme,
    pub rho: Complex64,
    pub study: Study,
    pub norm: NormKind,
    /// Step counts (temporal) or cell counts (spatial).
    pub chain: [usize; 4],
    /// Cells (temporal) or steps (spatial) held fixed.
    pub fixed: usize,
    pub columns: [ReferenceColumn; 2],
}

const fn col(alpha: f64, errors: [f64; 4], rates: [f64; 3]) -> ReferenceColumn {
    ReferenceColumn { alpha, errors, rates }
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const TABLES: [ReferenceTable; 8] = [
    ReferenceTable {
        id: 1,
        condition: Condition::A,
        scheme: Scheme::Be,
        rho: c(1.0, 1.0),
        study: Study::Temporal,
        norm: NormKind::L2,
        chain: [50, 100, 200, 400],
        fixed: 128,
        columns: [
            col(0.3, [6.435e-5, 3.201e-5, 1.597e-5, 7.974e-6], [1.0072, 1.0036, 1.0018]),
            col(0.7, [1.118e-4, 5.521e-5, 2.743e-5, 1.368e-5], [1.0180, 1.0089, 1.0045]),
        ],
    },
    ReferenceTable {
        id: 2,
        condition: Condition::A,
        scheme: Scheme::Bdf2,
        rho: c(-1.0, 1.0),
        study: Study::Temporal,
        norm: NormKind::L2,
        chain: [10, 20, 40, 80],
        fixed: 256,
        columns: [
            col(0.3, [5.185e-5, 1.192e-5, 2.875e-6, 7.110e-7], [2.1215, 2.0515, 2.0154]),
            col(0.7, [1.452e-4, 3.343e-5, 7.981e-6, 1.968e-6], [2.1190, 2.0665, 2.0199]),
        ],
    },
    ReferenceTable {
        id: 3,
        condition: Condition::B,
        scheme: Scheme::Be,
        rho: c(2.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::L2,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.2, [1.072e-4, 2.683e-5, 6.708e-6, 1.677e-6], [1.9988, 1.9997, 1.9999]),
            col(0.8, [3.151e-5, 7.885e-6, 1.972e-6, 4.929e-7], [1.9989, 1.9997, 1.9999]),
        ],
    },
    ReferenceTable {
        id: 4,
        condition: Condition::B,
        scheme: Scheme::Be,
        rho: c(2.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::H1,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.2, [6.062e-3, 3.033e-3, 1.517e-3, 7.586e-4], [0.9987, 0.9997, 0.9999]),
            col(0.8, [1.673e-3, 8.371e-4, 4.186e-4, 2.093e-4], [0.9991, 0.9998, 0.9999]),
        ],
    },
    ReferenceTable {
        id: 5,
        condition: Condition::A,
        scheme: Scheme::Bdf2,
        rho: c(-2.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::L2,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.4, [1.296e-4, 3.247e-5, 8.159e-6, 2.062e-6], [1.9966, 1.9927, 1.9842]),
            col(0.6, [9.379e-5, 2.355e-5, 5.944e-6, 1.517e-6], [1.9934, 1.9864, 1.9707]),
        ],
    },
    ReferenceTable {
        id: 6,
        condition: Condition::A,
        scheme: Scheme::Bdf2,
        rho: c(-2.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::H1,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.4, [7.296e-3, 3.648e-3, 1.824e-3, 9.120e-4], [1.0000, 1.0000, 1.0000]),
            col(0.6, [5.132e-3, 2.566e-3, 1.283e-3, 6.415e-4], [0.9999, 1.0, 1.0]),
        ],
    },
    ReferenceTable {
        id: 7,
        condition: Condition::A,
        scheme: Scheme::Be,
        rho: c(-1.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::L2,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.4, [1.296e-4, 3.239e-5, 8.097e-6, 2.024e-6], [2.0001, 2.0, 2.0]),
            col(0.6, [9.277e-5, 2.319e-5, 5.798e-6, 1.450e-6], [1.9999, 2.0, 2.0]),
        ],
    },
    ReferenceTable {
        id: 8,
        condition: Condition::A,
        scheme: Scheme::BeVariant,
        rho: c(-1.0, 1.0),
        study: Study::Spatial,
        norm: NormKind::L2,
        chain: [16, 32, 64, 128],
        fixed: 1000,
        columns: [
            col(0.4, [9.232e-4, 4.620e-4, 2.315e-4, 1.160e-4], [0.9988, 0.9967, 0.9976]),
            col(0.6, [6.282e-4, 3.150e-4, 1.580e-4, 7.919e-5], [0.9959, 0.9950, 0.9968]),
        ],
    },
];

pub fn table(id: u8) -> Result<&'static ReferenceTable> {
    TABLES
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| invalid(format!("no table {id}; expected 1..=8")))
}

impl ReferenceTable {
    pub fn problem(&self, alpha: f64) -> Result<ProblemSpec> {
        ProblemSpec::benchmark(self.condition, alpha, self.rho, 1.0)
    }

    pub fn column(&self, alpha: f64) -> Result<&ReferenceColumn> {
        self.columns
            .iter()
            .find(|c| (c.alpha - alpha).abs() < 1e-12)
            .ok_or_else(|| invalid(format!("table {} has no column for alpha = {alpha}", self.id)))
    }

    /// Runs the study for one fractional order.
    pub fn run(&self, alpha: f64) -> Result<ConvergenceReport> {
        let problem = self.problem(alpha)?;
        let mut report = match self.study {
            Study::Temporal => temporal_convergence(&problem, self.scheme, &self.chain, self.fixed)?,
            Study::Spatial => spatial_convergence(&problem, self.scheme, &self.chain, self.fixed, self.norm)?,
        };
        report.metadata.label = Some(format!("table{}", self.id));
        Ok(report)
    }
}

/// Relative deviations of computed errors from the reference values, and
/// absolute deviations of the rates.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub error_rel: Vec<f64>,
    pub rate_abs: Vec<f64>,
}

impl Comparison {
    pub fn new(report: &ConvergenceReport, reference: &ReferenceColumn) -> Self {
        Self {
            error_rel: report
                .errors()
                .iter()
                .zip(&reference.errors)
                .map(|(e, r)| (e - r).abs() / r)
                .collect(),
            rate_abs: report
                .rates()
                .iter()
                .zip(&reference.rates)
                .map(|(e, r)| (e - r).abs())
                .collect(),
        }
    }

    pub fn max_error_rel(&self) -> f64 {
        self.error_rel.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_rate_abs(&self) -> f64 {
        self.rate_abs.iter().cloned().fold(0.0, f64::max)
    }
}

/// JSON study description: a problem plus the scheme and the chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyConfig {
    #[serde(flatten)]
    pub problem: ProblemConfig,
    pub scheme: Scheme,
    pub study: Study,
    /// Step counts (temporal) or cell counts (spatial).
    pub chain: Vec<usize>,
    /// Cells (temporal) or steps (spatial).
    pub fixed: usize,
    #[serde(default = "default_norm")]
    pub norm: NormKind,
}

fn default_norm() -> NormKind {
    NormKind::L2
}

impl StudyConfig {
    pub fn run(&self) -> Result<ConvergenceReport> {
        let problem = ProblemSpec::from_config(&self.problem)?;
        match self.study {
            Study::Temporal => temporal_convergence(&problem, self.scheme, &self.chain, self.fixed),
            Study::Spatial => spatial_convergence(&problem, self.scheme, &self.chain, self.fixed, self.norm),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rates_match_reference_errors() {
        for t in &TABLES {
            for col in &t.columns {
                for k in 0..3 {
                    let r = super::super::observed_rate(col.errors[k], col.errors[k + 1]);
                    assert!((r - col.rates[k]).abs() < 0.02, "table {} alpha {}", t.id, col.alpha);
                }
            }
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(table(5).unwrap().scheme, Scheme::Bdf2);
        assert!(table(9).is_err());
        assert!(table(1).unwrap().column(0.5).is_err());
    }

    #[test]
    fn study_config_parses() {
        let text = r#"{"alpha": 0.5, "rho": [1, 1], "T": 1, "condition": "a",
                       "scheme": "bdf2", "study": "temporal", "chain": [4, 8], "fixed": 8}"#;
        let cfg: StudyConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.norm, NormKind::L2);
        let r = cfg.run().unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows[1].rate.is_some());
    }
}
