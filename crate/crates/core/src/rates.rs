//! Closed-form contraction factors, inertias and their comparisons.
//!
//! Notation: `L` Lipschitz constant of `grad f`, `mu` strong convexity of `f`,
//! `rho` strong convexity of `h`, `delta` the amount of strong convexity moved
//! from `h` to `f`.

use std::fmt;

use crate::error::{Error, Result};

/// Differences of rates at or below this are reported as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Forward-backward splitting (proximal gradient).
    Fbs,
    /// FISTA with fixed inertia.
    Fista,
    /// The three-sequence rewriting of FISTA with coupling `c`.
    FistaZForm,
    /// FISTA with inertia tuned for the `delta`-shifted splitting.
    FistaDelta,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fbs => "fbs",
            Algorithm::Fista => "fista",
            Algorithm::FistaZForm => "fista-z",
            Algorithm::FistaDelta => "fista-delta",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fbs" => Ok(Algorithm::Fbs),
            "fista" => Ok(Algorithm::Fista),
            "fista-z" | "fista_z" | "fista-zform" => Ok(Algorithm::FistaZForm),
            "fista-delta" | "fista_delta" => Ok(Algorithm::FistaDelta),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Theoretical per-iteration contraction of a Lyapunov energy, with the
/// parameters that achieve it.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCertificate {
    pub algorithm: Algorithm,
    pub mu: f64,
    pub rho: f64,
    pub lipschitz: f64,
    pub delta: f64,
    pub contraction: f64,
    pub inertia_alpha: f64,
    pub step_gamma: f64,
    /// `c = (1 - alpha) / 2`; the z-sequence is `z = x + (y - x) / c`.
    pub coupling_c: f64,
    /// Set when the effective strong convexity of `f` vanishes and no linear
    /// rate is available (`contraction == 1`).
    pub degenerate: bool,
    pub formula: &'static str,
}

fn check_constants(mu: f64, rho: f64, l: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Domain {
            name: "L",
            value: l,
            domain: "L > 0".into(),
        });
    }
    if !(mu >= 0.0 && mu < l) {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            domain: format!("0 <= mu < L = {l}"),
        });
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain {
            name: "rho",
            value: rho,
            domain: "rho >= 0".into(),
        });
    }
    Ok(())
}

/// `(sqrt(L^2 + mu rho), sqrt(mu (L + rho)))`.
fn fista_roots(mu: f64, rho: f64, l: f64) -> (f64, f64) {
    ((l * l + mu * rho).sqrt(), (mu * (l + rho)).sqrt())
}

/// `r(mu, rho, L) = 1 - sqrt(mu (L + rho) / (L^2 + mu rho))`, the FISTA
/// Lyapunov contraction. Equals 1 when `mu = 0`.
pub fn fista_rate(mu: f64, rho: f64, l: f64) -> Result<f64> {
    check_constants(mu, rho, l)?;
    Ok(fista_rate_unchecked(mu, rho, l))
}

pub(crate) fn fista_rate_unchecked(mu: f64, rho: f64, l: f64) -> f64 {
    1.0 - (mu * (l + rho) / (l * l + mu * rho)).sqrt()
}

/// The fixed inertia `alpha = (a - b) / (a + b)` with
/// `a = sqrt(L^2 + mu rho)`, `b = sqrt(mu (L + rho))`.
pub fn fista_inertia(mu: f64, rho: f64, l: f64) -> Result<f64> {
    check_constants(mu, rho, l)?;
    let (a, b) = fista_roots(mu, rho, l);
    Ok((a - b) / (a + b))
}

/// `c = b / (a + b)`, so that `alpha = 1 - 2c` and `z = x + (y - x) / c`.
pub fn fista_coupling(mu: f64, rho: f64, l: f64) -> Result<f64> {
    check_constants(mu, rho, l)?;
    let (a, b) = fista_roots(mu, rho, l);
    Ok(b / (a + b))
}

pub fn fista_certificate(mu: f64, rho: f64, l: f64) -> Result<RateCertificate> {
    check_constants(mu, rho, l)?;
    let (a, b) = fista_roots(mu, rho, l);
    Ok(RateCertificate {
        algorithm: Algorithm::Fista,
        mu,
        rho,
        lipschitz: l,
        delta: 0.0,
        contraction: fista_rate_unchecked(mu, rho, l),
        inertia_alpha: (a - b) / (a + b),
        step_gamma: 1.0 / l,
        coupling_c: b / (a + b),
        degenerate: mu == 0.0,
        formula: "1 - sqrt(mu (L + rho) / (L^2 + mu rho))",
    })
}

/// Certificate of FISTA run on `f + delta |.|^2 / 2` and `h - delta |.|^2 / 2`:
/// the rate is `r(mu + delta, rho - delta, L + delta)` while the iteration
/// itself keeps the unshifted step `1 / L`.
pub fn fista_delta_certificate(mu: f64, rho: f64, l: f64, delta: f64) -> Result<RateCertificate> {
    check_constants(mu, rho, l)?;
    if !(delta >= -mu && delta <= rho) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            domain: format!("[-mu, rho] = [{}, {rho}]", -mu),
        });
    }
    let (smu, srho, sl) = (mu + delta, rho - delta, l + delta);
    // sqrt((L + d)^2 + (mu + d)(rho - d)) and sqrt((mu + d)(L + rho)).
    let a = (sl * sl + smu * srho).sqrt();
    let b = (smu * (l + rho)).sqrt();
    Ok(RateCertificate {
        algorithm: Algorithm::FistaDelta,
        mu,
        rho,
        lipschitz: l,
        delta,
        contraction: 1.0 - b / a,
        inertia_alpha: (a - b) / (a + b),
        step_gamma: 1.0 / l,
        coupling_c: b / (a + b),
        degenerate: smu == 0.0,
        formula: "1 - sqrt((mu + delta)(L + rho) / ((L + delta)^2 + (mu + delta)(rho - delta)))",
    })
}

/// `(L - mu) / (L + mu + 2 rho)`: contraction of `F(x) - F* + (mu + rho)/2 |x - x*|^2`
/// along forward-backward with step `2 / (L + mu)`.
pub fn fbs_rate(mu: f64, rho: f64, l: f64) -> Result<f64> {
    check_constants(mu, rho, l)?;
    Ok(fbs_rate_unchecked(mu, rho, l))
}

pub(crate) fn fbs_rate_unchecked(mu: f64, rho: f64, l: f64) -> f64 {
    (l - mu) / (l + mu + 2.0 * rho)
}

pub fn fbs_certificate(mu: f64, rho: f64, l: f64) -> Result<RateCertificate> {
    check_constants(mu, rho, l)?;
    Ok(RateCertificate {
        algorithm: Algorithm::Fbs,
        mu,
        rho,
        lipschitz: l,
        delta: 0.0,
        contraction: fbs_rate_unchecked(mu, rho, l),
        inertia_alpha: 0.0,
        step_gamma: 2.0 / (l + mu),
        coupling_c: 0.5,
        degenerate: mu + rho == 0.0,
        formula: "(L - mu) / (L + mu + 2 rho)",
    })
}

/// The forward-backward rate `(1 - mu) / (1 + mu + rho)` used (with `L = 1`) in
/// the sign analysis behind [`zeta`]. Its denominator carries `rho` once where
/// [`fbs_rate`] carries `2 rho`; both are kept as stated.
pub fn fbs_rate_remark(mu: f64, rho: f64) -> f64 {
    (1.0 - mu) / (1.0 + mu + rho)
}

/// `1 - sqrt((mu + rho) / (1 + rho))`: FISTA with the full shift `delta = rho`
/// and `L = 1`.
pub fn fista_full_shift_rate(mu: f64, rho: f64) -> f64 {
    1.0 - ((mu + rho) / (1.0 + rho)).sqrt()
}

/// `zeta(mu, rho) = (mu + rho)(1 + mu + rho)^2 - (1 + rho)(2 mu + rho)^2`.
///
/// Positive exactly when [`fbs_rate_remark`] exceeds [`fista_full_shift_rate`].
pub fn zeta(mu: f64, rho: f64) -> f64 {
    let s = mu + rho;
    let t = 2.0 * mu + rho;
    s * (1.0 + s) * (1.0 + s) - (1.0 + rho) * t * t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    FbsBetter,
    Fista0Better,
    Tie,
}

impl Winner {
    pub fn name(self) -> &'static str {
        match self {
            Winner::FbsBetter => "FBS",
            Winner::Fista0Better => "FISTA0",
            Winner::Tie => "TIE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub mu: f64,
    pub rho: f64,
    pub r_fbs: f64,
    pub r_fista0: f64,
    pub winner: Winner,
}

/// Compares the forward-backward rate with the unshifted FISTA rate at `L = 1`.
/// Smaller rate wins; `|difference| <= 1e-12` is a tie.
pub fn compare_rates(mu: f64, rho: f64) -> RegionCell {
    let r_fbs = fbs_rate_unchecked(mu, rho, 1.0);
    let r_fista0 = fista_rate_unchecked(mu, rho, 1.0);
    let diff = r_fbs - r_fista0;
    let winner = if diff.abs() <= TIE_TOLERANCE {
        Winner::Tie
    } else if diff < 0.0 {
        Winner::FbsBetter
    } else {
        Winner::Fista0Better
    };
    RegionCell {
        mu,
        rho,
        r_fbs,
        r_fista0,
        winner,
    }
}

/// Winner map over `mu_grid x rho_grid` (outer index `mu`), `L = 1`.
/// Grids should lie in `[0, 1] x [0, 5]`; `mu = 1` is allowed as a limit.
pub fn region_map(mu_grid: &[f64], rho_grid: &[f64]) -> Result<Vec<Vec<RegionCell>>> {
    for &mu in mu_grid {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain {
                name: "mu",
                value: mu,
                domain: "[0, 1]".into(),
            });
        }
    }
    for &rho in rho_grid {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain {
                name: "rho",
                value: rho,
                domain: "rho >= 0".into(),
            });
        }
    }
    Ok(mu_grid
        .iter()
        .map(|&mu| rho_grid.iter().map(|&rho| compare_rates(mu, rho)).collect())
        .collect())
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| {
                if i + 1 == steps {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}
