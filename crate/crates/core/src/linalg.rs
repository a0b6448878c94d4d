//! Complex tridiagonal matrices: storage, banded products and the Thomas
//! algorithm without pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots below this magnitude (relative to the row scale) abort the solve.
const PIVOT_TOL: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTridiag {
    sub: Vec<Complex64>,
    diag: Vec<Complex64>,
    sup: Vec<Complex64>,
}

impl ComplexTridiag {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for band in [&sub, &sup] {
            if band.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: band.len(),
                });
            }
        }
        for (name, band) in [("sub", &sub), ("diag", &diag), ("super", &sup)] {
            if let Some(i) = band.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFinite(format!("{name}[{i}]")));
            }
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn identity(n: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            sub: vec![zero; n.saturating_sub(1)],
            diag: vec![Complex64::new(1.0, 0.0); n],
            sup: vec![zero; n.saturating_sub(1)],
        }
    }

    /// Constant-band Toeplitz matrix.
    pub fn toeplitz(n: usize, sub: Complex64, diag: Complex64, sup: Complex64) -> Self {
        Self {
            sub: vec![sub; n.saturating_sub(1)],
            diag: vec![diag; n],
            sup: vec![sup; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[Complex64] {
        &self.sub
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn sup(&self) -> &[Complex64] {
        &self.sup
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.sub[j]
        } else if i + 1 == j {
            self.sup[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let lin = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect()
        };
        Self::new(
            lin(&self.sub, &other.sub),
            lin(&self.diag, &other.diag),
            lin(&self.sup, &other.sup),
        )
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        let s = |x: &[Complex64]| x.iter().map(|&v| a * v).collect();
        Self {
            sub: s(&self.sub),
            diag: s(&self.diag),
            sup: s(&self.sup),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// Banded product into a preallocated buffer; lengths must equal `dim()`.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.dim();
        debug_assert!(x.len() == n && y.len() == n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.factor()?.solve(b)
    }

    /// LU factorization for repeated solves with the same matrix.
    pub fn factor(&self) -> Result<TridiagLu> {
        let n = self.dim();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = self.diag[0];
        check_pivot(pivot, self.diag[0], 0)?;
        pivots.push(pivot);
        for i in 1..n {
            let l = self.sub[i - 1] / pivot;
            pivot = self.diag[i] - l * self.sup[i - 1];
            check_pivot(pivot, self.diag[i], i)?;
            mult.push(l);
            pivots.push(pivot);
        }
        Ok(TridiagLu {
            mult,
            pivots,
            sup: self.sup.clone(),
        })
    }
}

fn check_pivot(pivot: Complex64, scale: Complex64, row: usize) -> Result<()> {
    let p = pivot.norm();
    if !p.is_finite() || p <= PIVOT_TOL || p <= f64::EPSILON * 1e-6 * scale.norm() {
        return Err(Error::Singular { row });
    }
    Ok(())
}

/// Thomas-algorithm factors of a [`ComplexTridiag`].
#[derive(Clone, Debug)]
pub struct TridiagLu {
    mult: Vec<Complex64>,
    pivots: Vec<Complex64>,
    sup: Vec<Complex64>,
}

impl TridiagLu {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= self.mult[i - 1] * prev;
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] = (x[i] - self.sup[i] * next) / self.pivots[i];
        }
        Ok(())
    }
}
