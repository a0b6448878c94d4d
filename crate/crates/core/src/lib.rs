//! Solver for the one-dimensional backward fractional Feynman-Kac equation
//! with non-smooth initial data.
//!
//! Time is discretized by backward Euler or BDF2 convolution quadrature of the
//! fractional substantial derivative, space by piecewise-linear finite
//! elements on (0,1). A contour-integral inversion of the Laplace-domain
//! solution serves as an independent reference, and [`harness`] runs the
//! self-convergence studies.

pub mod cq;
pub mod error;
pub mod fem1d;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod stepper;

pub use cq::{bdf2_weights, gl_weights, CqWeights, Generator};
pub use error::{Error, Result};
pub use fem1d::{Mesh1D, NodalField, NormKind, QuadratureRule};
pub use harness::{ConvergenceReport, ReportRow};
pub use linalg::ComplexTridiag;
pub use model::{Condition, PiecewiseFunction, ProblemSpec};
pub use num_complex::Complex64;
pub use oracle::ContourSpec;
pub use stepper::{Scheme, SchemeConfig, SolutionHistory};
