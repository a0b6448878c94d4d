//! Piecewise-linear finite elements on a uniform partition of (0,1) with
//! homogeneous Dirichlet conditions.
//!
//! Unknowns live on the interior nodes `x_j = j h`, `j = 1..n_cells-1`;
//! coefficient vectors are indexed from zero, so entry `j-1` holds node `j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexTridiag;
use crate::quadrature::gauss_legendre;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mesh1D {
    n_cells: usize,
}

impl Mesh1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(invalid(format!("mesh needs at least 2 cells, got {n_cells}")));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.n_cells as f64
    }

    pub fn refined(&self) -> Self {
        Self {
            n_cells: 2 * self.n_cells,
        }
    }
}

/// P1 function vanishing at 0 and 1, stored by its interior nodal values.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    mesh: Mesh1D,
    values: Vec<Complex64>,
}

impl NodalField {
    pub fn new(mesh: Mesh1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.n_interior() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_interior(),
                got: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh1D) -> Self {
        Self {
            mesh,
            values: vec![ZERO; mesh.n_interior()],
        }
    }

    /// Nodal interpolant of `f` (boundary values are dropped).
    pub fn interpolate(mesh: Mesh1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (1..mesh.n_cells()).map(|j| f(mesh.node(j))).collect();
        Self { mesh, values }
    }

    /// Unit coordinate vector of the hat function at interior node `k`.
    pub fn hat(mesh: Mesh1D, k: usize) -> Result<Self> {
        if k == 0 || k >= mesh.n_cells() {
            return Err(invalid(format!("node {k} is not interior")));
        }
        let mut f = Self::zeros(mesh);
        f.values[k - 1] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn mesh(&self) -> Mesh1D {
        self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at global node `j`, including the boundary zeros.
    pub fn node_value(&self, j: usize) -> Complex64 {
        if j == 0 || j >= self.mesh.n_cells() {
            ZERO
        } else {
            self.values[j - 1]
        }
    }

    /// Point evaluation of the piecewise-linear function.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.mesh.n_cells();
        let s = (x.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-12);
        let k = s.floor() as usize;
        let lam = s - k as f64;
        self.node_value(k) * (1.0 - lam) + self.node_value(k + 1) * lam
    }

    /// Representation on the mesh with half the spacing: nodal values are
    /// injected and midpoints linearly interpolated.
    pub fn prolong(&self) -> Self {
        let fine = self.mesh.refined();
        let values = (1..fine.n_cells())
            .map(|j| {
                if j % 2 == 0 {
                    self.node_value(j / 2)
                } else {
                    (self.node_value(j / 2) + self.node_value(j / 2 + 1)) * 0.5
                }
            })
            .collect();
        Self { mesh: fine, values }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.mesh != other.mesh {
            return Err(Error::NonNested {
                coarse: self.mesh.n_cells(),
                fine: other.mesh.n_cells(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { mesh: self.mesh, values })
    }
}

/// Element quadrature: an `n`-point Gauss rule applied on every smooth
/// sub-segment, splitting elements at coefficient breakpoints that fall
/// strictly inside them.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl QuadratureRule {
    pub const DEFAULT_POINTS: usize = 4;

    pub fn gauss(n_points: usize, breakpoints: &[f64]) -> Self {
        let (x, w) = gauss_legendre(n_points);
        // map to the reference segment [0, 1]
        let points = x.iter().map(|xi| 0.5 * (xi + 1.0)).collect();
        let weights = w.iter().map(|wi| 0.5 * wi).collect();
        let mut breakpoints: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > 0.0 && *b < 1.0).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self {
            points,
            weights,
            breakpoints,
        }
    }

    pub fn with_breakpoints(breakpoints: &[f64]) -> Self {
        Self::gauss(Self::DEFAULT_POINTS, breakpoints)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Sub-segment endpoints of element `[a, b]`.
    fn segments(&self, a: f64, b: f64) -> Vec<f64> {
        let eps = 1e-13 * (b - a);
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().copied().filter(|&p| p > a + eps && p < b - eps));
        cuts.push(b);
        cuts
    }
}

/// One quadrature point of an element, with the values of the two local
/// hat functions there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadPoint {
    pub element: usize,
    pub x: f64,
    pub weight: f64,
    pub phi_left: f64,
    pub phi_right: f64,
}

/// All quadrature points of a mesh under a given rule, in element order.
#[derive(Clone, Debug)]
pub struct QuadTable {
    mesh: Mesh1D,
    points: Vec<QuadPoint>,
}

impl QuadTable {
    pub fn new(mesh: Mesh1D, rule: &QuadratureRule) -> Self {
        let h = mesh.h();
        let mut points = Vec::with_capacity(mesh.n_cells() * rule.points.len());
        for k in 0..mesh.n_cells() {
            let (a, b) = (mesh.node(k), mesh.node(k + 1));
            for seg in rule.segments(a, b).windows(2) {
                let len = seg[1] - seg[0];
                let offset = seg[0] - a;
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let x = seg[0] + p * len;
                    // relative to the element, not (x − a), to avoid cancellation
                    let phi_right = (offset + p * len) / h;
                    points.push(QuadPoint {
                        element: k,
                        x,
                        weight: w * len,
                        phi_left: 1.0 - phi_right,
                        phi_right,
                    });
                }
            }
        }
        Self { mesh, points }
    }

    pub fn mesh(&self) -> Mesh1D {
        self.mesh
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Samples a function at every quadrature point.
    pub fn sample<T>(&self, f: impl Fn(f64) -> T) -> Vec<T> {
        self.points.iter().map(|q| f(q.x)).collect()
    }

    /// Values of the P1 function with coefficient vector `coeffs` at the
    /// quadrature points.
    pub fn interpolate_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let n = self.mesh.n_cells();
        let node = |j: usize| if j == 0 || j >= n { ZERO } else { coeffs[j - 1] };
        for (q, o) in self.points.iter().zip(out.iter_mut()) {
            *o = node(q.element) * q.phi_left + node(q.element + 1) * q.phi_right;
        }
    }

    pub fn interpolate(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.len()];
        self.interpolate_into(coeffs, &mut out);
        out
    }

    /// `out_j = Σ_q w_q g_q φ_j(x_q)`: the load vector of a function known
    /// at the quadrature points.
    pub fn integrate_against_basis_into(&self, g: &[Complex64], out: &mut [Complex64]) {
        let n = self.mesh.n_cells();
        out.iter_mut().for_each(|o| *o = ZERO);
        for (q, &gq) in self.points.iter().zip(g) {
            let v = gq * q.weight;
            if q.element >= 1 {
                out[q.element - 1] += v * q.phi_left;
            }
            if q.element + 1 < n {
                out[q.element] += v * q.phi_right;
            }
        }
    }

    pub fn integrate_against_basis(&self, g: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.mesh.n_interior()];
        self.integrate_against_basis_into(g, &mut out);
        out
    }

    /// Gram matrix `∫ w φ_i φ_j` for a weight known at the quadrature points.
    pub fn weighted_mass(&self, w: &[Complex64]) -> ComplexTridiag {
        let m = self.mesh.n_interior();
        let n = self.mesh.n_cells();
        let mut diag = vec![ZERO; m];
        let mut off = vec![ZERO; m.saturating_sub(1)];
        for (q, &wq) in self.points.iter().zip(w) {
            let v = wq * q.weight;
            let k = q.element;
            if k >= 1 {
                diag[k - 1] += v * q.phi_left * q.phi_left;
            }
            if k + 1 < n {
                diag[k] += v * q.phi_right * q.phi_right;
            }
            if k >= 1 && k + 1 < n {
                off[k - 1] += v * q.phi_left * q.phi_right;
            }
        }
        ComplexTridiag::new(off.clone(), diag, off).expect("finite weights give a finite matrix")
    }
}

/// `(∇φ_i, ∇φ_j)`: diagonal `2/h`, off-diagonal `−1/h`.
pub fn assemble_stiffness(mesh: Mesh1D) -> ComplexTridiag {
    let h = mesh.h();
    ComplexTridiag::toeplitz(
        mesh.n_interior(),
        Complex64::new(-1.0 / h, 0.0),
        Complex64::new(2.0 / h, 0.0),
        Complex64::new(-1.0 / h, 0.0),
    )
}

/// Exact P1 mass matrix: diagonal `2h/3`, off-diagonal `h/6`.
pub fn assemble_mass(mesh: Mesh1D) -> ComplexTridiag {
    let h = mesh.h();
    ComplexTridiag::toeplitz(
        mesh.n_interior(),
        Complex64::new(h / 6.0, 0.0),
        Complex64::new(2.0 * h / 3.0, 0.0),
        Complex64::new(h / 6.0, 0.0),
    )
}

pub fn assemble_weighted_mass(
    mesh: Mesh1D,
    w: impl Fn(f64) -> Complex64,
    rule: &QuadratureRule,
) -> ComplexTridiag {
    let table = QuadTable::new(mesh, rule);
    table.weighted_mass(&table.sample(w))
}

pub fn load_vector(mesh: Mesh1D, f: impl Fn(f64) -> Complex64, rule: &QuadratureRule) -> Vec<Complex64> {
    let table = QuadTable::new(mesh, rule);
    table.integrate_against_basis(&table.sample(f))
}

/// L²-orthogonal projection onto the P1 space.
pub fn l2_project(mesh: Mesh1D, f: impl Fn(f64) -> Complex64, rule: &QuadratureRule) -> Result<NodalField> {
    let b = load_vector(mesh, f, rule);
    let c = assemble_mass(mesh).solve(&b)?;
    NodalField::new(mesh, c)
}

pub fn l2_norm(field: &NodalField) -> f64 {
    let mesh = field.mesh();
    let h = mesh.h();
    // ∫ |a(1-s) + b s|² = h/3 (|a|² + Re(a b̄) + |b|²) per element
    let sum: f64 = (0..mesh.n_cells())
        .map(|k| {
            let a = field.node_value(k);
            let b = field.node_value(k + 1);
            a.norm_sqr() + (a * b.conj()).re + b.norm_sqr()
        })
        .sum();
    (sum * h / 3.0).sqrt()
}

pub fn h1_seminorm(field: &NodalField) -> f64 {
    let mesh = field.mesh();
    let sum: f64 = (0..mesh.n_cells())
        .map(|k| (field.node_value(k + 1) - field.node_value(k)).norm_sqr())
        .sum();
    (sum / mesh.h()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L2,
    H1,
}

impl NormKind {
    pub fn apply(self, field: &NodalField) -> f64 {
        match self {
            NormKind::L2 => l2_norm(field),
            NormKind::H1 => h1_seminorm(field),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(NormKind::L2),
            "h1" => Ok(NormKind::H1),
            other => Err(invalid(format!("unknown norm {other:?}"))),
        }
    }
}

/// Norm of the difference of two solutions on equal or once-halved meshes.
pub fn nested_error(coarse: &NodalField, fine: &NodalField, norm: NormKind) -> Result<f64> {
    let (nc, nf) = (coarse.mesh().n_cells(), fine.mesh().n_cells());
    let diff = if nc == nf {
        fine.sub(coarse)?
    } else if nf == 2 * nc {
        fine.sub(&coarse.prolong())?
    } else {
        return Err(Error::NonNested { coarse: nc, fine: nf });
    };
    Ok(norm.apply(&diff))
}

/// `‖A_h u‖` with `A_h = M⁻¹K`.
pub fn discrete_hdot2(field: &NodalField, mass: &ComplexTridiag, stiffness: &ComplexTridiag) -> Result<f64> {
    let ku = stiffness.matvec(field.values())?;
    let y = mass.solve(&ku)?;
    Ok(l2_norm(&NodalField::new(field.mesh(), y)?))
}
