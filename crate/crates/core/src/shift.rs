//! Transfer of strong convexity between the two terms.
//!
//! For `delta` in `[-mu, rho]`, `F = f_delta + h_{-delta}` where
//! `f_delta = f + delta |.|^2 / 2` and `h_{-delta} = h - delta |.|^2 / 2`. The
//! shifted pair has constants `(mu + delta, rho - delta, L + delta)`, its prox is
//! a rescaled prox of `h`, and the shifted forward-backward map coincides with
//! the unshifted one at a rescaled step.

use crate::error::{check_dim, Error, Result};
use crate::problem::{CompositeProblem, Point, ProxOracle, SmoothOracle};

#[derive(Debug, Clone)]
pub struct ShiftedProblem<'a, S, H> {
    base: &'a CompositeProblem<S, H>,
    delta: f64,
    shifted_lipschitz: f64,
    shifted_mu: f64,
    shifted_rho: f64,
}

impl<'a, S: SmoothOracle, H: ProxOracle> ShiftedProblem<'a, S, H> {
    pub fn new(base: &'a CompositeProblem<S, H>, delta: f64) -> Result<Self> {
        let (mu, rho, l) = (base.mu(), base.rho(), base.lipschitz());
        if !(delta >= -mu && delta <= rho) {
            return Err(Error::Domain {
                name: "delta",
                value: delta,
                domain: format!("[-mu, rho] = [{}, {rho}]", -mu),
            });
        }
        Ok(Self {
            base,
            delta,
            shifted_lipschitz: l + delta,
            shifted_mu: mu + delta,
            shifted_rho: rho - delta,
        })
    }

    pub fn base(&self) -> &'a CompositeProblem<S, H> {
        self.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shifted_lipschitz(&self) -> f64 {
        self.shifted_lipschitz
    }

    pub fn shifted_mu(&self) -> f64 {
        self.shifted_mu
    }

    pub fn shifted_rho(&self) -> f64 {
        self.shifted_rho
    }

    pub fn shifted_smooth_value(&self, x: &Point) -> Result<f64> {
        check_dim(self.base.dimension(), x.len())?;
        Ok(self.base.smooth().value(x) + 0.5 * self.delta * x.norm_squared())
    }

    pub fn shifted_nonsmooth_value(&self, x: &Point) -> Result<f64> {
        check_dim(self.base.dimension(), x.len())?;
        Ok(self.base.nonsmooth().value(x) - 0.5 * self.delta * x.norm_squared())
    }

    /// `grad f(x) + delta x`.
    pub fn shifted_smooth_grad(&self, x: &Point) -> Result<Point> {
        check_dim(self.base.dimension(), x.len())?;
        let mut g = self.base.smooth().gradient(x);
        g.axpy(self.delta, x, 1.0);
        Ok(g)
    }

    fn check_step(&self, gamma: f64) -> Result<()> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::StepSize {
                gamma,
                reason: "gamma must be positive".into(),
            });
        }
        if gamma * self.delta >= 1.0 {
            return Err(Error::StepSize {
                gamma,
                reason: format!("gamma * delta must be < 1 (delta = {})", self.delta),
            });
        }
        Ok(())
    }

    /// `prox_{gamma h_{-delta}}(x) = prox_{gamma' h}(x / (1 - gamma delta))` with
    /// `gamma' = gamma / (1 - gamma delta)`. Requires `gamma delta < 1`; for
    /// `delta <= 0` every positive step qualifies.
    pub fn shifted_prox(&self, gamma: f64, x: &Point) -> Result<Point> {
        check_dim(self.base.dimension(), x.len())?;
        self.check_step(gamma)?;
        let scale = 1.0 - gamma * self.delta;
        Ok(self.base.nonsmooth().prox(gamma / scale, &(x / scale)))
    }

    /// `T_delta(gamma) x = prox_{gamma h_{-delta}}(x - gamma grad f_delta(x))`.
    pub fn forward_backward_map(&self, gamma: f64, x: &Point) -> Result<Point> {
        check_dim(self.base.dimension(), x.len())?;
        self.check_step(gamma)?;
        let mut forward = self.shifted_smooth_grad(x)?;
        forward *= -gamma;
        forward += x;
        self.shifted_prox(gamma, &forward)
    }
}

/// `omega(gamma) = max{|1 - gamma (mu + delta)|, |1 - gamma (L + delta)|} / (1 + gamma (rho - delta))`,
/// the Lipschitz constant of `T_delta(gamma)` for `gamma` in `(0, 2 / (L + delta))`.
pub fn contraction_factor(mu: f64, rho: f64, l: f64, delta: f64, gamma: f64) -> Result<f64> {
    let upper = 2.0 / (l + delta);
    if !(gamma > 0.0 && gamma < upper) {
        return Err(Error::StepSize {
            gamma,
            reason: format!("contraction requires 0 < gamma < 2 / (L + delta) = {upper}"),
        });
    }
    let lo = (1.0 - gamma * (mu + delta)).abs();
    let hi = (1.0 - gamma * (l + delta)).abs();
    Ok(lo.max(hi) / (1.0 + gamma * (rho - delta)))
}

/// `2 / (L + mu + 2 delta)`, the minimizer of [`contraction_factor`] over `gamma`;
/// the minimum value `(L - mu) / (L + mu + 2 rho)` does not depend on `delta`.
pub fn optimal_fbs_step(mu: f64, _rho: f64, l: f64, delta: f64) -> f64 {
    2.0 / (l + mu + 2.0 * delta)
}
