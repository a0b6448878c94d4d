//! Convolution-quadrature weights for the backward Euler and BDF2 generators,
//! and the discrete symbols built from them.
//!
//! The weights `d_i` are the power-series coefficients of `δ(ζ)^α`, with
//!
//! ```text
//! δ₁(ζ) = (1 − ζ) / τ
//! δ₂(ζ) = ((1 − ζ) + (1 − ζ)² / 2) / τ = (3 / 2τ) (1 − ζ)(1 − ζ/3)
//! ```
//!
//! Powers of complex symbols use the principal branch throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Linear multistep generator underlying a convolution quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    BackwardEuler,
    Bdf2,
}

impl Generator {
    pub fn order(self) -> u32 {
        match self {
            Generator::BackwardEuler => 1,
            Generator::Bdf2 => 2,
        }
    }

    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            1 => Ok(Generator::BackwardEuler),
            2 => Ok(Generator::Bdf2),
            k => Err(invalid(format!("unsupported generator order {k}"))),
        }
    }

    /// `δ_{τ,k}(ζ)`
    pub fn delta(self, zeta: Complex64, tau: f64) -> Complex64 {
        let one_minus = Complex64::new(1.0, 0.0) - zeta;
        match self {
            Generator::BackwardEuler => one_minus / tau,
            Generator::Bdf2 => (one_minus + one_minus * one_minus * 0.5) / tau,
        }
    }
}

/// Truncated weight sequence `d_0 ..= d_N` of `δ_{τ,k}(ζ)^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqWeights {
    pub generator: Generator,
    pub alpha: f64,
    pub tau: f64,
    pub d: Vec<f64>,
}

impl CqWeights {
    pub fn new(generator: Generator, alpha: f64, tau: f64, n: usize) -> Result<Self> {
        match generator {
            Generator::BackwardEuler => gl_weights(alpha, tau, n),
            Generator::Bdf2 => bdf2_weights(alpha, tau, n),
        }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// `S_n = Σ_{i=0}^{n} d_i` for every `n`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.d
            .iter()
            .scan(0.0, |acc, &di| {
                *acc += di;
                Some(*acc)
            })
            .collect()
    }
}

fn check_args(alpha: f64, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("time step tau = {tau} must be positive")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha = {alpha} must lie in (0,1]")));
    }
    Ok(())
}

/// Coefficients of `(1 − c ζ)^α`, `i = 0..=n`.
fn binomial_series(alpha: f64, c: f64, n: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(n + 1);
    g.push(1.0);
    for i in 1..=n {
        let prev = g[i - 1];
        g.push(prev * c * ((i as f64 - 1.0 - alpha) / i as f64));
    }
    g
}

/// Grünwald–Letnikov weights: the backward Euler convolution quadrature.
pub fn gl_weights(alpha: f64, tau: f64, n: usize) -> Result<CqWeights> {
    check_args(alpha, tau)?;
    let scale = tau.powf(-alpha);
    let d = binomial_series(alpha, 1.0, n)
        .into_iter()
        .map(|g| g * scale)
        .collect();
    Ok(CqWeights {
        generator: Generator::BackwardEuler,
        alpha,
        tau,
        d,
    })
}

/// BDF2 weights via the Cauchy product of the binomial series of
/// `(1 − ζ)^α` and `(1 − ζ/3)^α`, scaled by `(3 / 2τ)^α`.
pub fn bdf2_weights(alpha: f64, tau: f64, n: usize) -> Result<CqWeights> {
    check_args(alpha, tau)?;
    let a = binomial_series(alpha, 1.0, n);
    let b = binomial_series(alpha, 1.0 / 3.0, n);
    let scale = (1.5 / tau).powf(alpha);
    let d = (0..=n)
        .map(|k| scale * (0..=k).map(|j| a[j] * b[k - j]).sum::<f64>())
        .collect();
    Ok(CqWeights {
        generator: Generator::Bdf2,
        alpha,
        tau,
        d,
    })
}

/// `ν(ζ) = ζ(3 − ζ) / (2(1 − ζ))`
pub fn nu_symbol(zeta: Complex64) -> Result<Complex64> {
    let denom = (Complex64::new(1.0, 0.0) - zeta) * 2.0;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole);
    }
    Ok(zeta * (Complex64::new(3.0, 0.0) - zeta) / denom)
}

/// `μ(ζ) = ζ(3 − ζ)² / 4`, the BDF2 first-step correction factor.
pub fn mu_symbol(zeta: Complex64) -> Complex64 {
    let t = Complex64::new(3.0, 0.0) - zeta;
    zeta * t * t / 4.0
}

/// `β_{τ,k}(z) = δ_{τ,k}(exp(−τ (z + ρU)))`
pub fn beta_tau(generator: Generator, z: Complex64, tau: f64, rho_u: Complex64) -> Complex64 {
    generator.delta((-(z + rho_u) * tau).exp(), tau)
}

/// `max |β^γ − β_{τ,k}^γ| / (τ^k |z|^{γ+k})` over `(z, ρU)` samples.
///
/// Bounded uniformly in `τ` when the samples lie on the truncated contour.
pub fn symbol_order_ratio(
    generator: Generator,
    gamma: f64,
    tau: f64,
    samples: &[(Complex64, Complex64)],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("empty sample list"));
    }
    let k = generator.order() as f64;
    let ratio = samples
        .iter()
        .map(|&(z, rho_u)| {
            let exact = (z + rho_u).powf(gamma);
            let discrete = beta_tau(generator, z, tau, rho_u).powf(gamma);
            (exact - discrete).norm() / (tau.powf(k) * z.norm().powf(gamma + k))
        })
        .fold(0.0, f64::max);
    Ok(ratio)
}
