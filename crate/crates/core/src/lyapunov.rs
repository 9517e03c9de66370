//! Lyapunov energies and normalized convergence diagnostics.
//!
//! For FISTA the energy is
//! `Phi(x, z) = F(x) - F(x*) + mu (L + rho)^2 / (2 (L^2 + mu rho)) |z - x*|^2`,
//! for forward-backward it is `E(x) = F(x) - F(x*) + (mu + rho)/2 |x - x*|^2`.

use crate::error::{check_dim, Error, Result};
use crate::problem::{CompositeProblem, Point, ProxOracle, SmoothOracle};
use crate::solvers::SolverRun;

/// Slightly negative energies down to this value are rounding noise and are
/// clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// `mu (L + rho)^2 / (2 (L^2 + mu rho))`.
pub fn lyapunov_weight(mu: f64, rho: f64, l: f64) -> f64 {
    mu * (l + rho) * (l + rho) / (2.0 * (l * l + mu * rho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpec {
    pub mu: f64,
    pub rho: f64,
    pub lipschitz: f64,
    pub weight: f64,
    pub reference: Point,
    pub reference_value: f64,
}

/// A Lyapunov value; `clamped` is set when a slightly negative value was
/// rounded up to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub value: f64,
    pub clamped: bool,
}

impl LyapunovSpec {
    /// The FISTA energy with constants `(mu, rho, L)`, which may be the
    /// shifted constants `(mu + delta, rho - delta, L + delta)`.
    pub fn fista(mu: f64, rho: f64, l: f64, reference: Point, reference_value: f64) -> Self {
        Self {
            mu,
            rho,
            lipschitz: l,
            weight: lyapunov_weight(mu, rho, l),
            reference,
            reference_value,
        }
    }

    /// The forward-backward energy, weight `(mu + rho) / 2`.
    pub fn fbs(mu: f64, rho: f64, l: f64, reference: Point, reference_value: f64) -> Self {
        Self {
            mu,
            rho,
            lipschitz: l,
            weight: 0.5 * (mu + rho),
            reference,
            reference_value,
        }
    }

    /// FISTA energy of `p` with its own constants; needs the reference solution.
    pub fn for_problem<S: SmoothOracle, H: ProxOracle>(p: &CompositeProblem<S, H>) -> Result<Self> {
        let (x_star, f_star) = reference_of(p)?;
        Ok(Self::fista(p.mu(), p.rho(), p.lipschitz(), x_star.clone(), f_star))
    }

    /// Energy from an already evaluated `F(x)`.
    pub fn energy_from_value(&self, fx: f64, z: &Point) -> Energy {
        let raw = fx - self.reference_value + self.weight * (z - &self.reference).norm_squared();
        if (-CLAMP_TOLERANCE..0.0).contains(&raw) {
            Energy {
                value: 0.0,
                clamped: true,
            }
        } else {
            Energy {
                value: raw,
                clamped: false,
            }
        }
    }
}

fn reference_of<S: SmoothOracle, H: ProxOracle>(p: &CompositeProblem<S, H>) -> Result<(&Point, f64)> {
    match (p.reference_solution(), p.reference_value()) {
        (Some(x), Some(f)) => Ok((x, f)),
        _ => Err(Error::Unavailable("reference solution")),
    }
}

/// `Phi(x, z)` for the given spec. Unavailable when the weight vanishes
/// (`mu = 0`), since the z-sequence is then undefined.
pub fn phi<S: SmoothOracle, H: ProxOracle>(
    spec: &LyapunovSpec,
    p: &CompositeProblem<S, H>,
    x: &Point,
    z: &Point,
) -> Result<Energy> {
    if !(spec.weight > 0.0) {
        return Err(Error::Unavailable("Lyapunov function with mu = 0"));
    }
    check_dim(p.dimension(), z.len())?;
    let fx = p.objective_value(x)?;
    Ok(spec.energy_from_value(fx, z))
}

/// `F(x) - F(x*) + (mu + rho)/2 |x - x*|^2`.
pub fn fbs_energy<S: SmoothOracle, H: ProxOracle>(p: &CompositeProblem<S, H>, x: &Point) -> Result<f64> {
    let (x_star, f_star) = reference_of(p)?;
    let spec = LyapunovSpec::fbs(p.mu(), p.rho(), p.lipschitz(), x_star.clone(), f_star);
    let fx = p.objective_value(x)?;
    Ok(spec.energy_from_value(fx, x).value)
}

/// `e_k = |x_k - x*| / |x_0 - x*|`, `v_k = (F(x_k) - F*) / (F(x_0) - F*)` and
/// `ell_k = Phi_k / Phi_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTraces {
    pub e: Vec<f64>,
    pub v: Vec<f64>,
    /// Absent when the run recorded no Lyapunov trace.
    pub ell: Option<Vec<f64>>,
}

pub fn normalized_traces<S: SmoothOracle, H: ProxOracle>(
    run: &SolverRun,
    p: &CompositeProblem<S, H>,
) -> Result<NormalizedTraces> {
    let (_, f_star) = reference_of(p)?;
    let errors = run
        .errors
        .as_ref()
        .ok_or(Error::Unavailable("error trace (run had no reference solution)"))?;
    let e0 = errors[0];
    let v0 = run.values[0] - f_star;
    if !(e0 > 0.0) || !(v0 > 0.0) {
        return Err(Error::DegenerateNormalization("x_0 is the reference solution"));
    }
    let ell = match &run.lyapunov {
        Some(l) if l[0] > 0.0 => Some(l.iter().map(|&p| p / l[0]).collect()),
        Some(_) => return Err(Error::DegenerateNormalization("Phi(x_0, z_0) = 0")),
        None => None,
    };
    Ok(NormalizedTraces {
        e: errors.iter().map(|&e| e / e0).collect(),
        v: run.values.iter().map(|&f| (f - f_star) / v0).collect(),
        ell,
    })
}

/// Observed per-iteration contraction: the geometric mean of consecutive
/// ratios over the trailing `window` entries, after dropping everything from
/// the first entry below `1e2 * eps * sequence[0]` on (those sit at the
/// rounding floor). The window shrinks if fewer entries remain.
pub fn empirical_rate(sequence: &[f64], window: usize) -> Result<f64> {
    if window < 2 {
        return Err(Error::Sequence(format!("window must be >= 2, got {window}")));
    }
    if sequence.len() <= window {
        return Err(Error::Sequence(format!(
            "need more than {window} entries, got {}",
            sequence.len()
        )));
    }
    if let Some(bad) = sequence.iter().find(|&&s| !(s > 0.0) || !s.is_finite()) {
        // Zeros past the floor are fine; anything before it is not.
        if *bad != 0.0 || sequence[0] == 0.0 {
            return Err(Error::Sequence(format!("entries must be positive, found {bad}")));
        }
    }
    let floor = 1e2 * f64::EPSILON * sequence[0];
    let usable = sequence.iter().take_while(|&&s| s >= floor).count();
    if usable < 2 {
        return Err(Error::Sequence("sequence reaches the rounding floor immediately".into()));
    }
    let w = window.min(usable - 1);
    let last = usable - 1;
    Ok((sequence[last] / sequence[last - w]).powf(1.0 / w as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadraticInstance;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn two_by_two() -> QuadraticInstance {
        QuadraticInstance::from_parts(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]),
            Point::from_vec(vec![1.0, 1.0]),
            Point::zeros(2),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn phi_vanishes_at_minimizer() {
        let inst = two_by_two();
        let p = inst.problem();
        let spec = LyapunovSpec::for_problem(&p).unwrap();
        let xs = p.reference_solution().unwrap();
        let e = phi(&spec, &p, xs, xs).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn phi_weight_without_rho() {
        assert_relative_eq!(lyapunov_weight(0.3, 0.0, 2.0), 0.15, max_relative = 1e-15);
    }

    #[test]
    fn phi_on_two_by_two_instance() {
        let inst = two_by_two();
        let p = inst.problem();
        // Exact solve: (0.5 + 1) x1 = 1, (0.5 + 4) x2 = 2.
        let xs = [1.0 / 1.5, 2.0 / 4.5];
        let f = |x: [f64; 2]| {
            0.5 * ((x[0] - 1.0).powi(2) + (2.0 * x[1] - 1.0).powi(2)) + 0.25 * (x[0] * x[0] + x[1] * x[1])
        };
        let (mu, rho, l) = (p.mu(), p.rho(), p.lipschitz());
        assert_relative_eq!(mu, 1.0, max_relative = 1e-10);
        assert_relative_eq!(l, 4.0, max_relative = 1e-10);
        let w = mu * (l + rho).powi(2) / (2.0 * (l * l + mu * rho));
        let expected = f([0.0, 0.0]) - f(xs) + w * (xs[0] * xs[0] + xs[1] * xs[1]);
        let spec = LyapunovSpec::for_problem(&p).unwrap();
        let got = phi(&spec, &p, &Point::zeros(2), &Point::zeros(2)).unwrap();
        assert_relative_eq!(got.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn phi_unavailable_without_strong_convexity() {
        let p = crate::testutil::half_norm_problem(2, 1.0, 0.0);
        let spec = LyapunovSpec::for_problem(&p).unwrap();
        let x = Point::zeros(2);
        assert!(matches!(phi(&spec, &p, &x, &x), Err(Error::Unavailable(_))));
    }

    #[test]
    fn negative_rounding_is_clamped() {
        let spec = LyapunovSpec::fista(0.1, 0.1, 1.0, Point::zeros(1), 1.0);
        let e = spec.energy_from_value(1.0 - 1e-14, &Point::zeros(1));
        assert_eq!(e, Energy { value: 0.0, clamped: true });
        let e = spec.energy_from_value(1.0 - 1e-6, &Point::zeros(1));
        assert!(!e.clamped && e.value < 0.0);
    }

    #[test]
    fn fbs_energy_examples() {
        // f = x^2 / 2 (mu = 0.999 declared), h = 0: F(2) = 2 and (mu/2) 4 = 2 mu.
        let p = crate::testutil::half_norm_problem(1, 0.0, 0.999);
        let x = Point::from_vec(vec![2.0]);
        assert_relative_eq!(fbs_energy(&p, &x).unwrap(), 2.0 + 2.0 * 0.999, max_relative = 1e-15);
        assert_eq!(fbs_energy(&p, &Point::zeros(1)).unwrap(), 0.0);
    }

    #[test]
    fn empirical_rate_examples() {
        let geo: Vec<f64> = (0..60).map(|k| 0.7f64.powi(k)).collect();
        assert_relative_eq!(empirical_rate(&geo, 10).unwrap(), 0.7, max_relative = 1e-12);
        assert_eq!(empirical_rate(&[3.0; 20], 5).unwrap(), 1.0);
        assert!(empirical_rate(&[1.0, 0.5], 2).is_err());
        assert!(empirical_rate(&[1.0, -0.5, 0.2, 0.1], 2).is_err());
        assert!(empirical_rate(&[1.0; 10], 1).is_err());
        // Entries at the rounding floor are ignored.
        let mut floored: Vec<f64> = (0..40).map(|k| 0.5f64.powi(k)).collect();
        floored.extend([1e-30, 0.0, 1e-31]);
        assert_relative_eq!(empirical_rate(&floored, 8).unwrap(), 0.5, max_relative = 1e-12);
    }
}
