//! Composite strongly convex minimization with forward-backward splitting
//! and fixed-inertia FISTA.
//!
//! The crate is organised around a [`CompositeProblem`] `F = f + h` where `f`
//! is smooth (`L`-Lipschitz gradient, `mu`-strongly convex) and `h` has a cheap
//! proximity operator (`rho`-strongly convex). On top of it:
//!
//! * [`shift`] moves strong convexity between `f` and `h` (`f + delta/2 |x|^2`,
//!   `h - delta/2 |x|^2`) and exposes the shifted forward-backward map;
//! * [`rates`] evaluates the closed-form contraction factors and inertias;
//! * [`solvers`] runs FBS, FISTA, the three-sequence z-form and FISTA-delta,
//!   recording value, error and Lyapunov traces;
//! * [`lyapunov`] evaluates the Lyapunov energies and normalized diagnostics;
//! * [`quadratic`] builds the Tikhonov least-squares benchmark instances;
//! * [`prng`] is the deterministic generator behind every random draw.

pub mod error;
pub mod lyapunov;
pub mod problem;
pub mod prng;
pub mod quadratic;
pub mod rates;
pub mod shift;
pub mod solvers;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use lyapunov::{empirical_rate, normalized_traces, LyapunovSpec, NormalizedTraces};
pub use problem::{
    validate_problem, CompositeProblem, Point, ProxOracle, SmoothOracle, ValidationReport,
};
pub use prng::SeededGenerator;
pub use quadratic::{InstanceParams, LeastSquares, QuadraticInstance, RidgeProx};
pub use rates::{Algorithm, RateCertificate, Winner};
pub use shift::ShiftedProblem;
pub use solvers::{SolverConfig, SolverRun};
