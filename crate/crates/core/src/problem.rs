//! Problem model: smooth and proximable oracles, the composite objective and
//! randomized checks of the structural hypotheses.

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::prng::SeededGenerator;

/// Points are dense real vectors.
pub type Point = DVector<f64>;

/// A differentiable, `mu`-strongly convex function with `L`-Lipschitz gradient.
///
/// Implementations must be pure: the same input always gives the same output.
pub trait SmoothOracle: Send + Sync {
    fn value(&self, x: &Point) -> f64;

    /// Writes the gradient at `x` into `out` (same length as `x`).
    fn gradient_into(&self, x: &Point, out: &mut Point);

    fn gradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros(x.len());
        self.gradient_into(x, &mut g);
        g
    }

    fn lipschitz(&self) -> f64;

    fn strong_convexity(&self) -> f64;
}

/// A proper, lower semicontinuous, `rho`-strongly convex function with a
/// computable proximity operator `prox_{gamma h}`.
pub trait ProxOracle: Send + Sync {
    /// May return `+inf` outside the domain.
    fn value(&self, x: &Point) -> f64;

    /// Writes `argmin_p h(p) + |p - x|^2 / (2 gamma)` into `out`.
    fn prox_into(&self, gamma: f64, x: &Point, out: &mut Point);

    fn prox(&self, gamma: f64, x: &Point) -> Point {
        let mut p = Point::zeros(x.len());
        self.prox_into(gamma, x, &mut p);
        p
    }

    fn strong_convexity(&self) -> f64;

    /// Gradient of `h`, when `h` happens to be differentiable. Only used by
    /// validation to check the prox characterization `(x - p) / gamma = grad h(p)`.
    fn gradient(&self, _x: &Point) -> Option<Point> {
        None
    }
}

impl<T: SmoothOracle + ?Sized> SmoothOracle for &T {
    fn value(&self, x: &Point) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &Point, out: &mut Point) {
        (**self).gradient_into(x, out)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn strong_convexity(&self) -> f64 {
        (**self).strong_convexity()
    }
}

impl<T: ProxOracle + ?Sized> ProxOracle for &T {
    fn value(&self, x: &Point) -> f64 {
        (**self).value(x)
    }
    fn prox_into(&self, gamma: f64, x: &Point, out: &mut Point) {
        (**self).prox_into(gamma, x, out)
    }
    fn strong_convexity(&self) -> f64 {
        (**self).strong_convexity()
    }
    fn gradient(&self, x: &Point) -> Option<Point> {
        (**self).gradient(x)
    }
}

#[derive(Debug, Clone)]
struct Reference {
    point: Point,
    value: f64,
}

/// `F = f + h` with `L > 0`, `0 <= mu < L`, `rho >= 0` and `mu + rho > 0`, so
/// that `F` has a unique minimizer.
#[derive(Debug, Clone)]
pub struct CompositeProblem<S, H> {
    smooth: S,
    nonsmooth: H,
    dimension: usize,
    reference: Option<Reference>,
}

impl<S: SmoothOracle, H: ProxOracle> CompositeProblem<S, H> {
    pub fn new(smooth: S, nonsmooth: H, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConstants("dimension must be positive".into()));
        }
        let (l, mu, rho) = (
            smooth.lipschitz(),
            smooth.strong_convexity(),
            nonsmooth.strong_convexity(),
        );
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidConstants(format!("L = {l} must be positive")));
        }
        if !(mu >= 0.0 && mu < l) {
            return Err(Error::InvalidConstants(format!(
                "mu = {mu} must lie in [0, L) with L = {l}"
            )));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidConstants(format!("rho = {rho} must be >= 0")));
        }
        if mu + rho <= 0.0 {
            return Err(Error::InvalidConstants("mu + rho must be positive".into()));
        }
        Ok(Self {
            smooth,
            nonsmooth,
            dimension,
            reference: None,
        })
    }

    /// Attaches the known minimizer `x*`; `F(x*)` is evaluated once here.
    pub fn with_reference(mut self, x_star: Point) -> Result<Self> {
        check_dim(self.dimension, x_star.len())?;
        let value = self.smooth.value(&x_star) + self.nonsmooth.value(&x_star);
        if !value.is_finite() {
            return Err(Error::InvalidConstants(
                "objective is not finite at the reference solution".into(),
            ));
        }
        self.reference = Some(Reference {
            point: x_star,
            value,
        });
        Ok(self)
    }

    pub fn smooth(&self) -> &S {
        &self.smooth
    }

    pub fn nonsmooth(&self) -> &H {
        &self.nonsmooth
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz()
    }

    pub fn mu(&self) -> f64 {
        self.smooth.strong_convexity()
    }

    pub fn rho(&self) -> f64 {
        self.nonsmooth.strong_convexity()
    }

    pub fn reference_solution(&self) -> Option<&Point> {
        self.reference.as_ref().map(|r| &r.point)
    }

    /// `F(x*)`, when the reference solution is known.
    pub fn reference_value(&self) -> Option<f64> {
        self.reference.as_ref().map(|r| r.value)
    }

    /// `F(x) = f(x) + h(x)`; `+inf` when `h(x)` is.
    pub fn objective_value(&self, x: &Point) -> Result<f64> {
        check_dim(self.dimension, x.len())?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &Point) -> f64 {
        let hx = self.nonsmooth.value(x);
        if hx == f64::INFINITY {
            return f64::INFINITY;
        }
        self.smooth.value(x) + hx
    }
}

/// One randomized hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Worst normalized violation seen; positive means the hypothesis failed.
    pub worst_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>4}  samples={:<5} worst={:+.3e}",
                c.name,
                if c.passed { "ok" } else { "FAIL" },
                c.samples,
                c.worst_violation
            )?;
        }
        Ok(())
    }
}

const CHECK_RTOL: f64 = 1e-9;
const REFINE_STEPS: usize = 30;

struct Tracker {
    name: &'static str,
    samples: usize,
    worst: f64,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, violation: f64) {
        self.samples += 1;
        if violation > self.worst || violation.is_nan() {
            self.worst = violation;
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            passed: self.samples > 0 && self.worst <= 0.0,
            samples: self.samples,
            worst_violation: self.worst,
        }
    }
}

fn random_point(rng: &mut SeededGenerator, n: usize, center: Option<&Point>, scale: f64) -> Point {
    let mut p = Point::from_fn(n, |_, _| scale * (2.0 * rng.uniform01() - 1.0));
    if let Some(c) = center {
        p += c;
    }
    p
}

fn rescale(d: &mut Point, len: f64) {
    let norm = d.norm();
    if norm > 0.0 {
        *d *= len / norm;
    }
}

/// Randomized checks of the hypotheses on `f`, `h` and `x*` over `samples`
/// point pairs drawn from [`SeededGenerator`] with the given seed.
///
/// Besides uniformly drawn pairs, the gradient checks also use pairs whose
/// difference is refined by a few power-iteration steps on the gradient
/// increment, which finds the extreme curvature directions of quadratics
/// that uniform sampling in high dimension almost never hits.
pub fn validate_problem<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    samples: usize,
    seed: u64,
) -> ValidationReport {
    let samples = samples.max(1);
    let mut rng = SeededGenerator::new(seed);
    let n = p.dimension();
    let (l, mu, rho) = (p.lipschitz(), p.mu(), p.rho());
    let center = p.reference_solution();
    let scale = 1.0 + center.map_or(0.0, |c| c.amax());
    let f = p.smooth();
    let h = p.nonsmooth();

    let mut lipschitz = Tracker::new("smooth.lipschitz");
    let mut strong = Tracker::new("smooth.strong_convexity");
    let mut h_strong = Tracker::new("nonsmooth.strong_convexity");
    let mut prox_lip = Tracker::new("prox.lipschitz");
    let mut prox_opt = Tracker::new("prox.optimality");
    let mut prox_grad = Tracker::new("prox.subgradient");
    let mut convex = Tracker::new("objective.convexity");
    let mut minimal = Tracker::new("reference.strong_minimality");

    let lipschitz_violation = |x: &Point, y: &Point| -> f64 {
        let dist = (x - y).norm();
        if dist == 0.0 {
            return f64::NEG_INFINITY;
        }
        let gd = (f.gradient(x) - f.gradient(y)).norm();
        gd / (l * dist) - (1.0 + CHECK_RTOL)
    };
    let strong_violation = |x: &Point, y: &Point| -> f64 {
        let (fx, fy) = (f.value(x), f.value(y));
        let d = y - x;
        let lower = fx + f.gradient(x).dot(&d) + 0.5 * mu * d.norm_squared();
        let slack = CHECK_RTOL * (1.0 + fx.abs() + fy.abs());
        (lower - fy) / slack - 1.0
    };

    for _ in 0..samples {
        let x = random_point(&mut rng, n, center, scale);
        let y = random_point(&mut rng, n, center, scale);
        let dist = (&x - &y).norm();

        lipschitz.record(lipschitz_violation(&x, &y));
        strong.record(strong_violation(&x, &y));

        // Steepest and flattest directions through power steps on the
        // gradient increment d -> grad f(x + d) - grad f(x).
        let gx = f.gradient(&x);
        let mut up = &y - &x;
        let mut down = up.clone();
        for _ in 0..REFINE_STEPS {
            let inc = f.gradient(&(&x + &up)) - &gx;
            up = inc;
            rescale(&mut up, dist);
            let inc = f.gradient(&(&x + &down)) - &gx;
            down = &down * l - inc;
            rescale(&mut down, dist);
        }
        let y_up = &x + &up;
        let y_down = &x + &down;
        lipschitz.record(lipschitz_violation(&x, &y_up));
        strong.record(strong_violation(&x, &y_down));

        let t = rng.uniform01();
        let mid = &x * t + &y * (1.0 - t);
        let (hx, hy, hm) = (h.value(&x), h.value(&y), h.value(&mid));
        if hx.is_finite() && hy.is_finite() {
            let upper = t * hx + (1.0 - t) * hy - 0.5 * rho * t * (1.0 - t) * dist * dist;
            let slack = CHECK_RTOL * (1.0 + hx.abs() + hy.abs());
            h_strong.record((hm - upper) / slack - 1.0);
        }

        let (fx, fy) = (p.value_unchecked(&x), p.value_unchecked(&y));
        if fx.is_finite() && fy.is_finite() {
            let fm = p.value_unchecked(&mid);
            let slack = CHECK_RTOL * (1.0 + fx.abs() + fy.abs());
            convex.record((fm - (t * fx + (1.0 - t) * fy)) / slack - 1.0);
        }

        // Step sizes log-uniform in [1e-2 / L, 1e1 / L].
        let gamma = 10f64.powf(-2.0 + 3.0 * rng.uniform01()) / l;
        let px = h.prox(gamma, &x);
        let py = h.prox(gamma, &y);
        if dist > 0.0 {
            let ratio = (&px - &py).norm() * (1.0 + gamma * rho) / dist;
            prox_lip.record(ratio - (1.0 + CHECK_RTOL));
        }

        // p = prox(x) minimizes the (1/gamma + rho)-strongly convex
        // q -> h(q) + |q - x|^2 / (2 gamma).
        let model = |q: &Point| h.value(q) + (q - &x).norm_squared() / (2.0 * gamma);
        let at_p = model(&px);
        let q = random_point(&mut rng, n, Some(&px), dist.max(1e-3) * 1e-2 / (n as f64).sqrt());
        let at_q = model(&q);
        if at_q.is_finite() {
            let gap = at_p + 0.5 * (1.0 / gamma + rho) * (&q - &px).norm_squared() - at_q;
            let slack = CHECK_RTOL * (1.0 + at_p.abs() + at_q.abs());
            prox_opt.record(gap / slack - 1.0);
        }
        if let Some(gh) = h.gradient(&px) {
            let resid = ((&x - &px) / gamma - &gh).norm();
            let slack = 1e-8 * (1.0 + gh.norm() + (&x - &px).norm() / gamma);
            prox_grad.record(resid / slack - 1.0);
        }

        if let (Some(xs), Some(fs)) = (center, p.reference_value()) {
            let lower = fs + 0.5 * (mu + rho) * (&y - xs).norm_squared();
            if fy.is_finite() {
                let slack = CHECK_RTOL * (1.0 + fy.abs() + fs.abs());
                minimal.record((lower - fy) / slack - 1.0);
            }
        }
    }

    let mut checks = vec![
        lipschitz.finish(),
        strong.finish(),
        h_strong.finish(),
        prox_lip.finish(),
        prox_opt.finish(),
    ];
    if prox_grad.samples > 0 {
        checks.push(prox_grad.finish());
    }
    checks.push(convex.finish());
    if minimal.samples > 0 {
        checks.push(minimal.finish());
    }
    ValidationReport { seed, checks }
}
