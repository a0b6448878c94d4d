//! Problem definition: fractional order, the complex functional variable,
//! the potential `U`, the initial datum `G0` and the horizon `T` on (0,1).

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Analytic descriptor for one interval of a [`PiecewiseFunction`].
#[derive(Clone)]
pub enum Piece {
    Constant(f64),
    /// `intercept + slope * x`
    Linear { intercept: f64, slope: f64 },
    /// Arbitrary closure. `bound` must dominate `|f|` on the piece.
    Expr {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        bound: f64,
    },
}

impl Piece {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Piece::Constant(c) => *c,
            Piece::Linear { intercept, slope } => intercept + slope * x,
            Piece::Expr { f, .. } => f(x),
        }
    }

    fn sup_abs_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Piece::Constant(c) => c.abs(),
            Piece::Linear { .. } => self.eval(a).abs().max(self.eval(b).abs()),
            Piece::Expr { bound, .. } => *bound,
        }
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Constant(c) => write!(f, "Constant({c})"),
            Piece::Linear { intercept, slope } => write!(f, "Linear({intercept} + {slope}x)"),
            Piece::Expr { bound, .. } => write!(f, "Expr(|f| <= {bound})"),
        }
    }
}

/// A function on [0,1] given by analytic pieces between ordered breakpoints.
///
/// At an interior breakpoint the function takes its right limit; at `x = 1`
/// it takes the value of the last piece.
#[derive(Clone, Debug)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(invalid(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(invalid("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        for p in &pieces {
            if let Piece::Expr { bound, .. } = p {
                if !bound.is_finite() || *bound < 0.0 {
                    return Err(invalid("expression pieces need a finite nonnegative bound"));
                }
            }
        }
        Ok(Self { breakpoints, pieces })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![Piece::Constant(c)],
        }
    }

    pub fn linear(intercept: f64, slope: f64) -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![Piece::Linear { intercept, slope }],
        }
    }

    /// Characteristic function of the open interval `(a, b)` with `0 <= a < b <= 1`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(invalid(format!("indicator interval ({a}, {b}) not inside [0,1]")));
        }
        let mut bps = vec![0.0];
        let mut pieces = Vec::new();
        if a > 0.0 {
            bps.push(a);
            pieces.push(Piece::Constant(0.0));
        }
        pieces.push(Piece::Constant(1.0));
        if b < 1.0 {
            bps.push(b);
            pieces.push(Piece::Constant(0.0));
        }
        bps.push(1.0);
        Self::new(bps, pieces)
    }

    /// Single smooth piece backed by a closure; `bound` must dominate `|f|`.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static, bound: f64) -> Result<Self> {
        Self::new(
            vec![0.0, 1.0],
            vec![Piece::Expr {
                f: Arc::new(f),
                bound,
            }],
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    fn piece_index(&self, x: f64) -> usize {
        // number of interior breakpoints <= x
        let interior = &self.breakpoints[1..self.breakpoints.len() - 1];
        interior.partition_point(|&b| b <= x)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Breakpoints strictly inside (0,1).
    pub fn interior_breakpoints(&self) -> &[f64] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    /// Certified `sup |f|` over [0,1].
    pub fn sup_abs(&self) -> f64 {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(p, w)| p.sup_abs_on(w[0], w[1]))
            .fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.pieces.iter().all(|p| match p {
            Piece::Constant(c) => *c == 0.0,
            Piece::Linear { intercept, slope } => *intercept == 0.0 && *slope == 0.0,
            Piece::Expr { bound, .. } => *bound == 0.0,
        })
    }
}

/// The continuous problem on the unit interval with homogeneous Dirichlet data.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub rho: Complex64,
    pub potential: PiecewiseFunction,
    pub initial: PiecewiseFunction,
    pub horizon: f64,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        rho: Complex64,
        potential: PiecewiseFunction,
        initial: PiecewiseFunction,
        horizon: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha = {alpha} must lie in (0,1)")));
        }
        Self::new_unchecked_alpha(alpha, rho, potential, initial, horizon)
    }

    /// Like [`ProblemSpec::new`] but admits `alpha = 1`, the classical heat
    /// equation limit used by reduction tests.
    pub fn with_limit_order(
        alpha: f64,
        rho: Complex64,
        potential: PiecewiseFunction,
        initial: PiecewiseFunction,
        horizon: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha = {alpha} must lie in (0,1]")));
        }
        Self::new_unchecked_alpha(alpha, rho, potential, initial, horizon)
    }

    fn new_unchecked_alpha(
        alpha: f64,
        rho: Complex64,
        potential: PiecewiseFunction,
        initial: PiecewiseFunction,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon T = {horizon} must be positive")));
        }
        if !(rho.re.is_finite() && rho.im.is_finite()) {
            return Err(invalid("rho must be finite"));
        }
        if !potential.sup_abs().is_finite() {
            return Err(invalid("potential must be bounded"));
        }
        Ok(Self {
            alpha,
            rho,
            potential,
            initial,
            horizon,
        })
    }

    /// One of the two benchmark configurations with the given coefficients.
    pub fn benchmark(cond: Condition, alpha: f64, rho: Complex64, horizon: f64) -> Result<Self> {
        let data = benchmark_condition(cond);
        Self::new(alpha, rho, data.potential, data.initial, horizon)
    }

    /// `rho * U(x)`
    pub fn rho_u(&self, x: f64) -> Complex64 {
        self.rho * self.potential.eval(x)
    }

    /// `beta(z, x) = z + rho U(x)`
    pub fn beta_symbol(&self, z: Complex64, x: f64) -> Complex64 {
        z + self.rho_u(x)
    }

    /// `|rho| * sup |U|`
    pub fn rho_u_bound(&self) -> f64 {
        self.rho.norm() * self.potential.sup_abs()
    }

    /// Union of the breakpoints of `U` and `G0` strictly inside (0,1).
    pub fn coefficient_breakpoints(&self) -> Vec<f64> {
        let mut bps: Vec<f64> = self
            .potential
            .interior_breakpoints()
            .iter()
            .chain(self.initial.interior_breakpoints())
            .copied()
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        bps
    }

    pub fn from_config(cfg: &ProblemConfig) -> Result<Self> {
        let rho = Complex64::new(cfg.rho[0], cfg.rho[1]);
        let (potential, initial) = match (&cfg.condition, &cfg.potential, &cfg.initial) {
            (Some(tag), None, None) => {
                let data = benchmark_condition(tag.parse()?);
                (data.potential, data.initial)
            }
            (None, Some(u), Some(g0)) => (u.build()?, g0.build()?),
            (Some(_), _, _) => {
                return Err(Error::Config(
                    "give either `condition` or explicit `potential`/`initial` tables, not both".into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "missing `condition` or `potential`/`initial` tables".into(),
                ))
            }
        };
        Self::new(cfg.alpha, rho, potential, initial, cfg.horizon)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ProblemConfig = serde_json::from_str(&text)?;
        Self::from_config(&cfg)
    }
}

/// Benchmark tags: (a) `G0 = χ(0,1/2)`, `U = χ(1/2,1)`; (b) `G0 = χ(0,1/2)`, `U = x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    A,
    B,
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Condition::A),
            "b" => Ok(Condition::B),
            other => Err(Error::UnknownCondition(other.to_string())),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::A => "a",
            Condition::B => "b",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkData {
    pub initial: PiecewiseFunction,
    pub potential: PiecewiseFunction,
}

pub fn benchmark_condition(cond: Condition) -> BenchmarkData {
    let left_half = PiecewiseFunction::indicator(0.0, 0.5).expect("valid interval");
    match cond {
        Condition::A => BenchmarkData {
            initial: left_half,
            potential: PiecewiseFunction::indicator(0.5, 1.0).expect("valid interval"),
        },
        Condition::B => BenchmarkData {
            initial: left_half,
            potential: PiecewiseFunction::linear(0.0, 1.0),
        },
    }
}

/// JSON problem file: `alpha`, `rho: [re, im]`, `T`, and either
/// `condition: "a" | "b"` or explicit `potential` / `initial` tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub rho: [f64; 2],
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PiecewiseTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<PiecewiseTable>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseTable {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<PieceTable>,
}

/// `{"constant": c}` or `{"linear": [intercept, slope]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceTable {
    Constant(f64),
    Linear([f64; 2]),
}

impl PiecewiseTable {
    pub fn build(&self) -> Result<PiecewiseFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match *p {
                PieceTable::Constant(c) => Piece::Constant(c),
                PieceTable::Linear([intercept, slope]) => Piece::Linear { intercept, slope },
            })
            .collect();
        PiecewiseFunction::new(self.breakpoints.clone(), pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_symbol_values() {
        let zero_u = ProblemSpec::new(
            0.5,
            c(1.0, 0.0),
            PiecewiseFunction::constant(0.0),
            PiecewiseFunction::constant(1.0),
            1.0,
        )
        .unwrap();
        assert_eq!(zero_u.beta_symbol(c(1.0, 0.0), 0.3), c(1.0, 0.0));

        let a = ProblemSpec::benchmark(Condition::A, 0.5, c(1.0, 1.0), 1.0).unwrap();
        assert_eq!(a.beta_symbol(c(2.0, 0.0), 0.75), c(3.0, 1.0));

        let b = ProblemSpec::benchmark(Condition::B, 0.5, c(2.0, 1.0), 1.0).unwrap();
        assert_eq!(b.beta_symbol(c(0.0, 0.0), 0.5), c(1.0, 0.5));
    }

    #[test]
    fn beta_symbol_is_affine_in_z() {
        let a = ProblemSpec::benchmark(Condition::A, 0.4, c(-1.0, 1.0), 1.0).unwrap();
        let (z1, z2) = (c(0.3, -2.0), c(-4.0, 7.5));
        for &x in &[0.1, 0.5, 0.9] {
            let d = a.beta_symbol(z1, x) - a.beta_symbol(z2, x);
            assert!((d - (z1 - z2)).norm() < 1e-15);
        }
    }

    #[test]
    fn benchmark_values() {
        let a = benchmark_condition(Condition::A);
        assert_eq!(a.initial.eval(0.25), 1.0);
        assert_eq!(a.initial.eval(0.75), 0.0);
        assert_eq!(a.potential.eval(0.25), 0.0);
        assert_eq!(a.potential.eval(0.75), 1.0);
        assert!(a.initial.breakpoints().contains(&0.5));
        assert!(a.potential.breakpoints().contains(&0.5));

        let b = benchmark_condition(Condition::B);
        assert!((b.potential.eval(0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn condition_a_is_zero_one_valued_with_single_jump() {
        let a = benchmark_condition(Condition::A);
        for f in [&a.initial, &a.potential] {
            assert_eq!(f.interior_breakpoints(), &[0.5]);
            for i in 0..=100 {
                let v = f.eval(i as f64 / 100.0);
                assert!(v == 0.0 || v == 1.0);
            }
        }
    }

    #[test]
    fn breakpoint_takes_right_limit() {
        let a = benchmark_condition(Condition::A);
        assert_eq!(a.initial.eval(0.5), 0.0);
        assert_eq!(a.potential.eval(0.5), 1.0);
        assert_eq!(a.potential.eval(1.0), 1.0);
        assert_eq!(a.initial.eval(0.0), 1.0);
    }

    #[test]
    fn sup_abs_is_exact_for_analytic_pieces() {
        assert_eq!(PiecewiseFunction::linear(-0.5, 2.0).sup_abs(), 1.5);
        assert_eq!(PiecewiseFunction::linear(0.5, -2.0).sup_abs(), 1.5);
        let a = benchmark_condition(Condition::A);
        assert_eq!(a.potential.sup_abs(), 1.0);
        let e = PiecewiseFunction::from_fn(|x| (3.0 * x).sin(), 1.0).unwrap();
        assert_eq!(e.sup_abs(), 1.0);
    }

    #[test]
    fn unknown_tag_is_an_error() {
        assert!(matches!("c".parse::<Condition>(), Err(Error::UnknownCondition(_))));
        assert_eq!("A".parse::<Condition>().unwrap(), Condition::A);
    }

    #[test]
    fn invariants_rejected() {
        let f = || PiecewiseFunction::constant(0.0);
        assert!(ProblemSpec::new(1.0, c(0.0, 0.0), f(), f(), 1.0).is_err());
        assert!(ProblemSpec::new(0.0, c(0.0, 0.0), f(), f(), 1.0).is_err());
        assert!(ProblemSpec::new(0.5, c(0.0, 0.0), f(), f(), 0.0).is_err());
        assert!(ProblemSpec::with_limit_order(1.0, c(0.0, 0.0), f(), f(), 1.0).is_ok());
        assert!(PiecewiseFunction::new(vec![0.0, 0.6, 0.5, 1.0], vec![Piece::Constant(0.0); 3]).is_err());
        assert!(PiecewiseFunction::new(vec![0.1, 1.0], vec![Piece::Constant(0.0)]).is_err());
        assert!(PiecewiseFunction::indicator(0.5, 0.5).is_err());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"alpha": 0.3, "rho": [1.0, 1.0], "T": 1.0, "condition": "a"}"#;
        let cfg: ProblemConfig = serde_json::from_str(text).unwrap();
        let p = ProblemSpec::from_config(&cfg).unwrap();
        assert_eq!(p.alpha, 0.3);
        assert_eq!(p.rho, c(1.0, 1.0));
        assert_eq!(p.potential.eval(0.75), 1.0);

        let text = r#"{
            "alpha": 0.5, "rho": [2.0, 1.0], "T": 2.0,
            "potential": {"breakpoints": [0, 1], "pieces": [{"linear": [0, 1]}]},
            "initial": {"breakpoints": [0, 0.5, 1], "pieces": [{"constant": 1}, {"constant": 0}]}
        }"#;
        let cfg: ProblemConfig = serde_json::from_str(text).unwrap();
        let p = ProblemSpec::from_config(&cfg).unwrap();
        assert_eq!(p.horizon, 2.0);
        assert_eq!(p.potential.eval(0.3), 0.3);
        assert_eq!(p.coefficient_breakpoints(), vec![0.5]);

        let bad: ProblemConfig =
            serde_json::from_str(r#"{"alpha": 0.5, "rho": [0, 0], "T": 1}"#).unwrap();
        assert!(matches!(ProblemSpec::from_config(&bad), Err(Error::Config(_))));
    }
}
