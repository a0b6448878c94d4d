//! Reference solutions independent of the time-stepping schemes.
//!
//! The semi-discrete-in-space solution has the Laplace-domain form
//! `Ĝ(z) = (β(z)^α M + K)⁻¹ (β(z)^{α−1} G₀, φ)` with `β(z, x) = z + ρU(x)`
//! acting as a multiplication operator, and is inverted by quadrature along
//! the keyhole contour. For `U ≡ 0` the sine-series solution with
//! Mittag-Leffler time factors is available in closed form.

mod contour;
mod mittag_leffler;

pub use contour::{ContourNode, ContourSpec};
pub use mittag_leffler::mittag_leffler;

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem1d::{assemble_mass, assemble_stiffness, discrete_hdot2, l2_norm, Mesh1D, NodalField, QuadTable};
use crate::linalg::ComplexTridiag;
use crate::model::ProblemSpec;
use crate::stepper::problem_quadrature;

/// Relative drift tolerated between a contour quadrature and its doubling.
pub const QUADRATURE_DRIFT_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Precomputed pieces of the discrete resolvent for one problem and mesh.
pub struct Resolvent<'a> {
    problem: &'a ProblemSpec,
    table: QuadTable,
    rho_u: Vec<Complex64>,
    g0: Vec<Complex64>,
    stiffness: ComplexTridiag,
}

impl<'a> Resolvent<'a> {
    pub fn new(problem: &'a ProblemSpec, mesh: Mesh1D) -> Self {
        let table = problem_quadrature(problem, mesh);
        let rho_u = table.sample(|x| problem.rho_u(x));
        let g0 = table.sample(|x| Complex64::new(problem.initial.eval(x), 0.0));
        Self {
            problem,
            table,
            rho_u,
            g0,
            stiffness: assemble_stiffness(mesh),
        }
    }

    pub fn mesh(&self) -> Mesh1D {
        self.table.mesh()
    }

    /// Coefficients of `Ĝ(z)`.
    pub fn solve(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let alpha = self.problem.alpha;
        let beta: Vec<Complex64> = self.rho_u.iter().map(|ru| z + ru).collect();
        let weight: Vec<Complex64> = beta.iter().map(|b| b.powf(alpha)).collect();
        let source: Vec<Complex64> = beta
            .iter()
            .zip(&self.g0)
            .map(|(b, g)| b.powf(alpha - 1.0) * g)
            .collect();
        let system = self.table.weighted_mass(&weight).combine(
            Complex64::new(1.0, 0.0),
            &self.stiffness,
            Complex64::new(1.0, 0.0),
        )?;
        system.solve(&self.table.integrate_against_basis(&source))
    }

    /// `(1/2πi) ∫_Γ e^{zt} Ĝ(z) dz` with a single quadrature.
    pub fn invert(&self, t: f64, contour: &ContourSpec) -> Result<Vec<Complex64>> {
        // Schwarz reflection Ĝ(z̄) = conj Ĝ(z) holds when ρ is real.
        let real_data = self.problem.rho.im == 0.0;
        let nodes = contour.nodes(t, real_data);
        let terms: Vec<Vec<Complex64>> = nodes
            .par_iter()
            .map(|node| {
                let g = self.solve(node.z)?;
                let scale = (node.z * t).exp() * node.weight;
                Ok(g.into_iter().map(|v| v * scale).collect())
            })
            .collect::<Result<_>>()?;
        let m = self.mesh().n_interior();
        let mut sum = vec![ZERO; m];
        for term in &terms {
            for (s, v) in sum.iter_mut().zip(term) {
                *s += v;
            }
        }
        let out = if real_data {
            sum.iter().map(|s| Complex64::new(s.im / PI, 0.0)).collect()
        } else {
            sum.iter().map(|s| s / (2.0 * PI * Complex64::i())).collect()
        };
        Ok(out)
    }
}

/// Discrete resolvent field `Ĝ(z)` on `mesh`.
pub fn resolvent_solve(problem: &ProblemSpec, mesh: Mesh1D, z: Complex64) -> Result<NodalField> {
    NodalField::new(mesh, Resolvent::new(problem, mesh).solve(z)?)
}

/// Contour-quadrature solution at time `t` without the convergence check.
pub fn reference_solution_once(
    problem: &ProblemSpec,
    mesh: Mesh1D,
    t: f64,
    contour: &ContourSpec,
) -> Result<NodalField> {
    check_time(t)?;
    contour.validate(problem)?;
    NodalField::new(mesh, Resolvent::new(problem, mesh).invert(t, contour)?)
}

/// Contour-quadrature solution at time `t`. The quadrature is repeated with
/// doubled node counts; the finer result is returned unless the two differ
/// by more than [`QUADRATURE_DRIFT_TOL`] relative to `‖P_h G₀‖`.
pub fn reference_solution(
    problem: &ProblemSpec,
    mesh: Mesh1D,
    t: f64,
    contour: &ContourSpec,
) -> Result<NodalField> {
    check_time(t)?;
    contour.validate(problem)?;
    let resolvent = Resolvent::new(problem, mesh);
    let coarse = NodalField::new(mesh, resolvent.invert(t, contour)?)?;
    let fine = NodalField::new(mesh, resolvent.invert(t, &contour.doubled())?)?;
    let scale = l2_norm(&initial_projection(problem, mesh)?).max(f64::MIN_POSITIVE);
    let drift = l2_norm(&fine.sub(&coarse)?) / scale;
    if drift > QUADRATURE_DRIFT_TOL {
        return Err(Error::QuadratureDrift {
            drift,
            tol: QUADRATURE_DRIFT_TOL,
        });
    }
    Ok(fine)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(crate::error::invalid(format!("time {t} must be positive")));
    }
    Ok(())
}

/// `P_h G₀` under the problem's quadrature.
pub fn initial_projection(problem: &ProblemSpec, mesh: Mesh1D) -> Result<NodalField> {
    let table = problem_quadrature(problem, mesh);
    let g0 = table.sample(|x| Complex64::new(problem.initial.eval(x), 0.0));
    NodalField::new(mesh, assemble_mass(mesh).solve(&table.integrate_against_basis(&g0))?)
}

/// Sine-series representation against `φ_j = √2 sin(jπx)`, `j = 1..=J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub coefficients: Vec<f64>,
}

impl SpectralField {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    /// `λ_j = (jπ)²`
    pub fn eigenvalue(j: usize) -> f64 {
        (j as f64 * PI).powi(2)
    }

    pub fn eigenfunction(j: usize, x: f64) -> f64 {
        SQRT_2 * (j as f64 * PI * x).sin()
    }

    /// Coefficients of the indicator of `(a, b)`.
    pub fn indicator(a: f64, b: f64, terms: usize) -> Self {
        let coefficients = (1..=terms)
            .map(|j| {
                let k = j as f64 * PI;
                SQRT_2 * ((k * a).cos() - (k * b).cos()) / k
            })
            .collect();
        Self { coefficients }
    }

    /// Solution of the `U ≡ 0` problem at time `t`: each mode decays by
    /// `E_α(−λ_j t^α)`.
    pub fn evolve(&self, alpha: f64, t: f64) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| Ok(c * mittag_leffler(alpha, -Self::eigenvalue(i + 1) * t.powf(alpha))?))
            .collect::<Result<_>>()?;
        Ok(Self { coefficients })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * Self::eigenfunction(i + 1, x))
            .sum()
    }

    /// Parseval norm.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn nodal(&self, mesh: Mesh1D) -> NodalField {
        NodalField::interpolate(mesh, |x| Complex64::new(self.eval(x), 0.0))
    }
}

/// Output of [`regularity_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityProbe {
    /// `(t, ‖A_h G_h(t)‖)` pairs.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope of `ln ‖A_h G_h(t)‖` against `ln t`.
    pub slope: f64,
}

/// Fits the power law of the discrete `Ḣ²` norm of the reference solution
/// over the given times.
pub fn regularity_probe(
    problem: &ProblemSpec,
    mesh: Mesh1D,
    times: &[f64],
    contour: &ContourSpec,
) -> Result<RegularityProbe> {
    contour.validate(problem)?;
    if times.iter().any(|&t| !(t > 0.0 && t <= problem.horizon)) {
        return Err(crate::error::invalid("probe times must lie in (0, T]"));
    }
    let resolvent = Resolvent::new(problem, mesh);
    let mass = assemble_mass(mesh);
    let stiffness = assemble_stiffness(mesh);
    let samples = times
        .iter()
        .map(|&t| {
            let g = NodalField::new(mesh, resolvent.invert(t, contour)?)?;
            Ok((t, discrete_hdot2(&g, &mass, &stiffness)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&samples)?;
    Ok(RegularityProbe { samples, slope })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::DegenerateRegression("non-positive sample".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if logs.len() < 2 || !(sxx > 1e-12) {
        return Err(Error::DegenerateRegression(
            "need at least two distinct abscissae".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Operator norms (discrete L² → L²) of `(w + A_h)⁻¹` and `A_h (w + A_h)⁻¹`,
/// where `w` acts by multiplication, estimated by power iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolventNorms {
    pub resolvent: f64,
    pub smoothing: f64,
}

pub fn resolvent_operator_norms(table: &QuadTable, weight: &[Complex64], iterations: usize) -> Result<ResolventNorms> {
    let mesh = table.mesh();
    let mass = assemble_mass(mesh);
    let stiffness = assemble_stiffness(mesh);
    let system = table
        .weighted_mass(weight)
        .combine(Complex64::new(1.0, 0.0), &stiffness, Complex64::new(1.0, 0.0))?;
    let conj_system = ComplexTridiag::new(
        system.sub().iter().map(|v| v.conj()).collect(),
        system.diag().iter().map(|v| v.conj()).collect(),
        system.sup().iter().map(|v| v.conj()).collect(),
    )?;
    let lu = system.factor()?;
    let conj_lu = conj_system.factor()?;

    // B = S⁻¹M and C = M⁻¹K S⁻¹M; their M-adjoints are S^{-H}M and S^{-H}K.
    let normal_b = |x: &[Complex64]| -> Result<Vec<Complex64>> {
        let y = lu.solve(&mass.matvec(x)?)?;
        conj_lu.solve(&mass.matvec(&y)?)
    };
    let normal_c = |x: &[Complex64]| -> Result<Vec<Complex64>> {
        let y = lu.solve(&mass.matvec(x)?)?;
        let ky = stiffness.matvec(&y)?;
        let minv = mass.solve(&ky)?;
        conj_lu.solve(&stiffness.matvec(&minv)?)
    };
    let m_norm = |x: &[Complex64]| -> Result<f64> {
        let mx = mass.matvec(x)?;
        Ok(x.iter().zip(&mx).map(|(a, b)| (a.conj() * b).re).sum::<f64>().sqrt())
    };
    let power = |op: &dyn Fn(&[Complex64]) -> Result<Vec<Complex64>>| -> Result<f64> {
        let n = mesh.n_interior();
        let mut x: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + 0.1 * (j as f64).sin(), 0.05 * (j as f64).cos()))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let nx = m_norm(&x)?;
            x.iter_mut().for_each(|v| *v /= nx);
            let y = op(&x)?;
            let next = m_norm(&y)?;
            let converged = (next - lambda).abs() <= 1e-12 * next;
            lambda = next;
            x = y;
            if converged {
                break;
            }
        }
        Ok(lambda.sqrt())
    };
    Ok(ResolventNorms {
        resolvent: power(&normal_b)?,
        smoothing: power(&normal_c)?,
    })
}
