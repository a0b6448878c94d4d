use fracfk::fem1d::{assemble_mass, QuadTable};
use fracfk::linalg::ComplexTridiag;
use fracfk::Complex64;

/// Left and right sides of `cos(θ̂/2) min|w| ‖e‖² ≤ |e^H M_w e|`, where `θ̂`
/// is the spread of `arg w` over the quadrature points.
pub fn coercivity_sides(table: &QuadTable, w: &[Complex64], values: &[Complex64]) -> (f64, f64) {
    let mass = assemble_mass(table.mesh());
    let mw = table.weighted_mass(w);
    let quad = |a: &ComplexTridiag| -> Complex64 {
        let ax = a.matvec(values).unwrap();
        values.iter().zip(&ax).map(|(x, y)| x.conj() * y).sum()
    };
    let norm_sq = quad(&mass).re;
    let form = quad(&mw).norm();
    let args: Vec<f64> = w.iter().map(|v| v.arg()).collect();
    let spread = args.iter().cloned().fold(f64::MIN, f64::max) - args.iter().cloned().fold(f64::MAX, f64::min);
    let min_w = w.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    ((spread / 2.0).cos() * min_w * norm_sq, form)
}
