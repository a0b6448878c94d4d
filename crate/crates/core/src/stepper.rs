//! Fully discrete time marching.
//!
//! Every step solves `(d₀ M + K) Gⁿ = rhsⁿ` where the history part of the
//! right-hand side is `Σ_{i=1}^{n-1} d_i M_w(t_i) G^{n-i}` with the weighted
//! mass `M_w(t) = (e^{−tρU} φ_i, φ_j)`. The weighted masses are never
//! assembled: the history is kept at the quadrature points and the sum over
//! `i` is accumulated pointwise before a single integration against the basis.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cq::{CqWeights, Generator};
use crate::error::{invalid, Error, Result};
use crate::fem1d::{assemble_mass, assemble_stiffness, Mesh1D, NodalField, QuadTable, QuadratureRule};
use crate::model::ProblemSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Backward Euler convolution quadrature with the projected source
    /// `P_h(e^{−tρU} G₀)`.
    #[serde(rename = "be")]
    Be,
    /// BDF2 convolution quadrature with the first-step correction.
    #[serde(rename = "bdf2")]
    Bdf2,
    /// Backward Euler with the source `e^{−tρU} P_h G₀`.
    #[serde(rename = "be-variant")]
    BeVariant,
}

impl Scheme {
    pub fn generator(self) -> Generator {
        match self {
            Scheme::Be | Scheme::BeVariant => Generator::BackwardEuler,
            Scheme::Bdf2 => Generator::Bdf2,
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "be" => Ok(Scheme::Be),
            "bdf2" => Ok(Scheme::Bdf2),
            "be-variant" => Ok(Scheme::BeVariant),
            other => Err(invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Be => "be",
            Scheme::Bdf2 => "bdf2",
            Scheme::BeVariant => "be-variant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub tau: f64,
    pub n_steps: usize,
    pub mesh: Mesh1D,
}

impl SchemeConfig {
    /// Uniform steps `τ = T / n_steps`.
    pub fn new(scheme: Scheme, horizon: f64, n_steps: usize, mesh: Mesh1D) -> Result<Self> {
        if n_steps == 0 {
            return Err(invalid("need at least one time step"));
        }
        Ok(Self {
            scheme,
            tau: horizon / n_steps as f64,
            n_steps,
            mesh,
        })
    }

    fn check(&self, problem: &ProblemSpec, expected: &[Scheme]) -> Result<()> {
        if !expected.contains(&self.scheme) {
            return Err(invalid(format!("scheme {} not handled here", self.scheme)));
        }
        let t = self.tau * self.n_steps as f64;
        if !(self.tau > 0.0) || ((t - problem.horizon) / problem.horizon).abs() > 1e-12 {
            return Err(invalid(format!(
                "tau * n_steps = {t} does not match T = {}",
                problem.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolutionHistory {
    pub fields: Vec<NodalField>,
    pub weights: CqWeights,
    pub config: SchemeConfig,
    pub elapsed: Duration,
}

impl SolutionHistory {
    pub fn final_field(&self) -> &NodalField {
        self.fields.last().expect("history holds at least the initial field")
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.config.tau
    }
}

/// Dispatches on `config.scheme`.
pub fn run(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionHistory> {
    match config.scheme {
        Scheme::Be => run_be(problem, config),
        Scheme::Bdf2 => run_bdf2(problem, config),
        Scheme::BeVariant => run_be_variant(problem, config),
    }
}

pub fn run_be(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionHistory> {
    config.check(problem, &[Scheme::Be])?;
    march(problem, config)
}

pub fn run_bdf2(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionHistory> {
    config.check(problem, &[Scheme::Bdf2])?;
    march(problem, config)
}

pub fn run_be_variant(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionHistory> {
    config.check(problem, &[Scheme::BeVariant])?;
    march(problem, config)
}

/// Quadrature table for a problem: splits at every breakpoint of `U` and `G₀`.
pub fn problem_quadrature(problem: &ProblemSpec, mesh: Mesh1D) -> QuadTable {
    QuadTable::new(
        mesh,
        &QuadratureRule::with_breakpoints(&problem.coefficient_breakpoints()),
    )
}

fn march(problem: &ProblemSpec, config: &SchemeConfig) -> Result<SolutionHistory> {
    let start = Instant::now();
    let mesh = config.mesh;
    let n_steps = config.n_steps;
    let tau = config.tau;
    let weights = CqWeights::new(config.scheme.generator(), problem.alpha, tau, n_steps)?;
    let d = &weights.d;
    let partial = weights.partial_sums();

    let table = problem_quadrature(problem, mesh);
    let nq = table.len();
    let m = mesh.n_interior();

    let mass = assemble_mass(mesh);
    let stiffness = assemble_stiffness(mesh);
    let system = mass
        .combine(Complex64::new(d[0], 0.0), &stiffness, Complex64::new(1.0, 0.0))?
        .factor()?;

    let rho_u = table.sample(|x| problem.rho_u(x));
    let g0 = table.sample(|x| Complex64::new(problem.initial.eval(x), 0.0));

    // decay[i * nq + q] = exp(−t_i ρ U(x_q))
    let mut decay = vec![ZERO; (n_steps + 1) * nq];
    for (i, row) in decay.chunks_exact_mut(nq).enumerate() {
        let t = i as f64 * tau;
        for (e, &ru) in row.iter_mut().zip(&rho_u) {
            *e = (-ru * t).exp();
        }
    }

    let initial = NodalField::new(mesh, mass.solve(&table.integrate_against_basis(&g0))?)?;
    let initial_at_q = table.interpolate(initial.values());

    // history[m * nq + q] = G^m(x_q)
    let mut history = vec![ZERO; (n_steps + 1) * nq];
    history[..nq].copy_from_slice(&initial_at_q);

    let mut fields = Vec::with_capacity(n_steps + 1);
    fields.push(initial);

    let mut acc = vec![ZERO; nq];
    let mut rhs = vec![ZERO; m];
    for n in 1..=n_steps {
        acc.iter_mut().for_each(|a| *a = ZERO);
        for i in 1..n {
            let di = d[i];
            let e = &decay[i * nq..(i + 1) * nq];
            let g = &history[(n - i) * nq..(n - i + 1) * nq];
            for ((a, &eq), &gq) in acc.iter_mut().zip(e).zip(g) {
                *a += eq * gq * di;
            }
        }

        let source_sum = partial[n - 1];
        let e_n = &decay[n * nq..(n + 1) * nq];
        let source = match config.scheme {
            Scheme::Be | Scheme::Bdf2 => &g0,
            Scheme::BeVariant => &initial_at_q,
        };
        for ((a, &eq), &sq) in acc.iter_mut().zip(e_n).zip(source) {
            *a = eq * sq * source_sum - *a;
        }
        table.integrate_against_basis_into(&acc, &mut rhs);

        if config.scheme == Scheme::Bdf2 && n == 1 {
            // rhs already holds d₀ (f¹, φ_j); subtract ½ K P_h f¹
            let f1: Vec<Complex64> = e_n.iter().zip(&g0).map(|(e, g)| e * g).collect();
            let projected = mass.solve(&table.integrate_against_basis(&f1))?;
            let correction = stiffness.matvec(&projected)?;
            for (r, c) in rhs.iter_mut().zip(&correction) {
                *r -= c * 0.5;
            }
        }

        system.solve_in_place(&mut rhs)?;
        table.interpolate_into(&rhs, &mut history[n * nq..(n + 1) * nq]);
        fields.push(NodalField::new(mesh, rhs.clone())?);
    }

    Ok(SolutionHistory {
        fields,
        weights,
        config: *config,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Condition, PiecewiseFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn config_mismatch_is_rejected() {
        let p = ProblemSpec::benchmark(Condition::A, 0.5, c(1.0, 1.0), 1.0).unwrap();
        let mesh = Mesh1D::new(8).unwrap();
        let cfg = SchemeConfig::new(Scheme::Bdf2, 1.0, 4, mesh).unwrap();
        assert!(run_be(&p, &cfg).is_err());
        let mut cfg = SchemeConfig::new(Scheme::Be, 1.0, 4, mesh).unwrap();
        cfg.tau = 0.3;
        assert!(run_be(&p, &cfg).is_err());
        assert!(SchemeConfig::new(Scheme::Be, 1.0, 0, mesh).is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Be, Scheme::Bdf2, Scheme::BeVariant] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn zero_potential_variant_coincides_with_main_scheme() {
        let p = ProblemSpec::new(
            0.4,
            c(-1.0, 1.0),
            PiecewiseFunction::constant(0.0),
            PiecewiseFunction::indicator(0.0, 0.5).unwrap(),
            1.0,
        )
        .unwrap();
        let mesh = Mesh1D::new(10).unwrap();
        let a = run(&p, &SchemeConfig::new(Scheme::Be, 1.0, 20, mesh).unwrap()).unwrap();
        let b = run(&p, &SchemeConfig::new(Scheme::BeVariant, 1.0, 20, mesh).unwrap()).unwrap();
        for (f, g) in a.fields.iter().zip(&b.fields) {
            for (x, y) in f.values().iter().zip(g.values()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let p = ProblemSpec::benchmark(Condition::B, 0.3, c(2.0, 1.0), 1.0).unwrap();
        let cfg = SchemeConfig::new(Scheme::Bdf2, 1.0, 16, Mesh1D::new(12).unwrap()).unwrap();
        let a = run(&p, &cfg).unwrap();
        let b = run(&p, &cfg).unwrap();
        assert_eq!(a.fields, b.fields);
        assert_eq!(a.fields.len(), 17);
    }
}
