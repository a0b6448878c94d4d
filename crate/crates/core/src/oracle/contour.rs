//! Keyhole contour `Γ_{θ,κ}`: a circular arc of radius `κ` for
//! `|arg z| <= θ` joined to the rays `r e^{±iθ}`, `r >= κ`, oriented with
//! increasing imaginary part.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::ProblemSpec;
use crate::quadrature::gauss_legendre;

const PANEL: usize = 16;

/// `e^{zt}` falls below `e^{-RAY_DECAY}` at the end of each ray.
const RAY_DECAY: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub theta: f64,
    pub kappa: f64,
    /// Quadrature nodes per ray (rounded up to whole 16-point panels).
    pub n_ray: usize,
    /// Quadrature nodes on the arc (rounded up to whole 16-point panels).
    pub n_arc: usize,
    /// Truncates the rays at `|z| = π / (τ sin θ)`.
    pub tau_cap: Option<f64>,
}

/// A quadrature node `z` with its complex weight, including `dz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourNode {
    pub z: Complex64,
    pub weight: Complex64,
}

impl ContourSpec {
    pub const DEFAULT_THETA: f64 = FRAC_PI_2 + 0.3;

    /// Smallest admissible radius: `max(1, 2 |ρ| sup|U|)`.
    pub fn min_kappa(problem: &ProblemSpec) -> f64 {
        (2.0 * problem.rho_u_bound()).max(1.0)
    }

    pub fn default_for(problem: &ProblemSpec) -> Self {
        Self {
            theta: Self::DEFAULT_THETA,
            kappa: Self::min_kappa(problem),
            n_ray: 128,
            n_arc: 32,
            tau_cap: None,
        }
    }

    pub fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        if !(self.theta > FRAC_PI_2 && self.theta < PI) {
            return Err(invalid(format!("contour angle {} outside (π/2, π)", self.theta)));
        }
        let min = Self::min_kappa(problem);
        if !(self.kappa >= min) {
            return Err(invalid(format!("contour radius {} below {min}", self.kappa)));
        }
        if self.n_ray < PANEL || self.n_arc < PANEL {
            return Err(invalid(format!(
                "contour needs at least {PANEL} nodes per piece (ray {}, arc {})",
                self.n_ray, self.n_arc
            )));
        }
        if let Some(tau) = self.tau_cap {
            if !(tau > 0.0) {
                return Err(invalid("tau cap must be positive"));
            }
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_ray: 2 * self.n_ray,
            n_arc: 2 * self.n_arc,
            ..*self
        }
    }

    pub fn truncated(&self, tau: f64) -> Self {
        Self {
            tau_cap: Some(tau),
            ..*self
        }
    }

    /// Radius where the rays end: `π/(τ sin θ)` under a cap, otherwise where
    /// `|e^{zt}|` has decayed by `e^{-40}`.
    pub fn ray_end(&self, t: f64) -> f64 {
        let decay_end = RAY_DECAY / (-self.theta.cos() * t);
        let end = match self.tau_cap {
            Some(tau) => (PI / (tau * self.theta.sin())).min(decay_end),
            None => decay_end,
        };
        end.max(self.kappa)
    }

    /// Nodes and weights for `∫_Γ f(z) dz`, panelled Gauss–Legendre in
    /// `ln(r/κ)` on the rays and in the angle on the arc.
    ///
    /// With `upper_only` only the half with `Im z >= 0` is returned, oriented
    /// from `z = κ` outward.
    pub fn nodes(&self, t: f64, upper_only: bool) -> Vec<ContourNode> {
        let (x, w) = gauss_legendre(PANEL);
        let panel_nodes = |lo: f64, hi: f64, count: usize| -> Vec<(f64, f64)> {
            let panels = count.div_ceil(PANEL);
            let width = (hi - lo) / panels as f64;
            (0..panels)
                .flat_map(|p| {
                    let a = lo + p as f64 * width;
                    x.iter()
                        .zip(&w)
                        .map(move |(&xi, &wi)| (a + 0.5 * width * (xi + 1.0), 0.5 * width * wi))
                })
                .collect()
        };

        let (sin, cos) = self.theta.sin_cos();
        let up = Complex64::new(cos, sin);
        let down = up.conj();
        let s_end = (self.ray_end(t) / self.kappa).ln();
        let ray = panel_nodes(0.0, s_end, self.n_ray);
        let mut nodes = Vec::new();

        let arc_lo = if upper_only { 0.0 } else { -self.theta };
        for (phi, wphi) in panel_nodes(arc_lo, self.theta, self.n_arc) {
            let z = Complex64::from_polar(self.kappa, phi);
            nodes.push(ContourNode {
                z,
                weight: Complex64::i() * z * wphi,
            });
        }
        if s_end > 0.0 {
            for &(s, ws) in &ray {
                let r = self.kappa * s.exp();
                nodes.push(ContourNode {
                    z: up * r,
                    weight: up * r * ws,
                });
                if !upper_only {
                    // traversed inward: dz = −e^{−iθ} dr
                    nodes.push(ContourNode {
                        z: down * r,
                        weight: -down * r * ws,
                    });
                }
            }
        }
        nodes
    }

    /// `n` points spread evenly in arc length over the truncated contour
    /// `Γ^τ_{θ,κ}` (requires `tau_cap`), lower ray, arc and upper ray.
    pub fn sample_points(&self, n: usize) -> Result<Vec<Complex64>> {
        let tau = self
            .tau_cap
            .ok_or_else(|| invalid("sampling needs a truncated contour"))?;
        let r_end = (PI / (tau * self.theta.sin())).max(self.kappa);
        let ray_len = r_end - self.kappa;
        let arc_len = 2.0 * self.theta * self.kappa;
        let total = 2.0 * ray_len + arc_len;
        let pts = (0..n)
            .map(|k| {
                let s = total * (k as f64 + 0.5) / n as f64;
                if s < ray_len {
                    Complex64::from_polar(r_end - s, -self.theta)
                } else if s < ray_len + arc_len {
                    Complex64::from_polar(self.kappa, -self.theta + (s - ray_len) / self.kappa)
                } else {
                    Complex64::from_polar(self.kappa + (s - ray_len - arc_len), self.theta)
                }
            })
            .collect();
        Ok(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Condition;

    #[test]
    fn default_contour_is_admissible() {
        let p = ProblemSpec::benchmark(Condition::A, 0.5, Complex64::new(1.0, 1.0), 1.0).unwrap();
        let c = ContourSpec::default_for(&p);
        c.validate(&p).unwrap();
        assert!((c.kappa - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let bad = ContourSpec { kappa: 1.0, ..c };
        assert!(bad.validate(&p).is_err());
        let bad = ContourSpec { theta: 1.0, ..c };
        assert!(bad.validate(&p).is_err());
    }

    #[test]
    fn contour_integral_of_resolvent_kernel() {
        // (1/2πi) ∫ e^{zt} / (z + 1) dz = e^{−t} when −1 lies left of Γ.
        let c = ContourSpec {
            theta: ContourSpec::DEFAULT_THETA,
            kappa: 2.0,
            n_ray: 128,
            n_arc: 32,
            tau_cap: None,
        };
        for &(t, c, tol) in &[(0.01, c, 1e-10), (0.1, c, 1e-10), (1.0, c, 1e-13), (3.0, c.doubled(), 1e-13)] {
            let sum: Complex64 = c
                .nodes(t, false)
                .iter()
                .map(|n| (n.z * t).exp() / (n.z + 1.0) * n.weight)
                .sum();
            let val = sum / (2.0 * PI * Complex64::i());
            assert!((val - Complex64::new((-t as f64).exp(), 0.0)).norm() < tol, "t = {t}: {val}");
        }
    }

    #[test]
    fn samples_lie_on_truncated_contour() {
        let c = ContourSpec {
            theta: 2.0,
            kappa: 3.0,
            n_ray: 16,
            n_arc: 16,
            tau_cap: Some(0.01),
        };
        let r_end = PI / (0.01 * 2f64.sin());
        for z in c.sample_points(500).unwrap() {
            let on_arc = (z.norm() - 3.0).abs() < 1e-9 && z.arg().abs() <= 2.0 + 1e-12;
            let on_ray = (z.arg().abs() - 2.0).abs() < 1e-9 && z.norm() >= 3.0 - 1e-9 && z.norm() <= r_end + 1e-9;
            assert!(on_arc || on_ray, "{z}");
            assert!(z.im.abs() <= PI / 0.01 + 1e-9);
        }
        assert!(ContourSpec { tau_cap: None, ..c }.sample_points(10).is_err());
    }
}
