use nalgebra::DMatrix;

use crate::problem::{CompositeProblem, Point};
use crate::quadratic::{LeastSquares, RidgeProx};

/// `f = |x|^2 / 2` declared with `L = 1` and the given `mu` (any value in
/// `[0, 1)` is a valid lower bound), `h = rho |x|^2 / 2`, minimizer `0`.
pub fn half_norm_problem(n: usize, rho: f64, mu: f64) -> CompositeProblem<LeastSquares, RidgeProx> {
    let f = LeastSquares::with_constants(DMatrix::identity(n, n), Point::zeros(n), 1.0, mu);
    CompositeProblem::new(f, RidgeProx::new(rho, Point::zeros(n)), n)
        .and_then(|p| p.with_reference(Point::zeros(n)))
        .unwrap()
}
