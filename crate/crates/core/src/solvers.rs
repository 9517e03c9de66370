//! Iteration engines: forward-backward splitting, FISTA with fixed inertia,
//! its three-sequence z-form and FISTA-delta.
//!
//! Every engine records `F(x_k)` at every iteration and, when the problem
//! carries a reference solution, `|x_k - x*|` and the matching Lyapunov
//! energy. Points are stored every `point_stride` iterations (plus the last).

use crate::error::{check_dim, Error, Result};
use crate::lyapunov::LyapunovSpec;
use crate::problem::{CompositeProblem, Point, ProxOracle, SmoothOracle};
use crate::rates::{fbs_certificate, fista_certificate, fista_delta_certificate, Algorithm, RateCertificate};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iters: usize,
    /// Step size; `None` picks `2 / (L + mu)` for FBS and `1 / L` otherwise.
    pub gamma: Option<f64>,
    /// Inertia; `None` picks the certified value. Ignored by FBS.
    pub alpha: Option<f64>,
    /// Shift for FISTA-delta; `None` means `rho`.
    pub delta: Option<f64>,
    /// Coupling `c` of the z-form; `None` means `(1 - alpha) / 2` from the
    /// certificate.
    pub c_coupling: Option<f64>,
    /// Stop once `|x_{k+1} - x_k| <= tol (1 + |x_{k+1}|)`; 0 disables.
    pub stop_tolerance: f64,
    pub record_z: bool,
    /// Keep every `point_stride`-th iterate; 0 keeps only the first and last.
    pub point_stride: usize,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, max_iters: usize) -> Self {
        Self {
            algorithm,
            max_iters,
            gamma: None,
            alpha: None,
            delta: None,
            c_coupling: None,
            stop_tolerance: 0.0,
            record_z: true,
            point_stride: 1,
        }
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn c_coupling(mut self, c: f64) -> Self {
        self.c_coupling = Some(c);
        self
    }

    pub fn stop_tolerance(mut self, tol: f64) -> Self {
        self.stop_tolerance = tol;
        self
    }

    pub fn record_z(mut self, record: bool) -> Self {
        self.record_z = record;
        self
    }

    pub fn point_stride(mut self, stride: usize) -> Self {
        self.point_stride = stride;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub algorithm: Algorithm,
    pub gamma: f64,
    /// 0 for FBS.
    pub alpha: f64,
    pub c_coupling: Option<f64>,
    pub delta: Option<f64>,
    /// `None` when no linear rate is certified (`mu = 0` for FISTA).
    pub certificate: Option<RateCertificate>,
    /// Iteration indices of the stored points.
    pub recorded: Vec<usize>,
    pub xs: Vec<Point>,
    pub ys: Option<Vec<Point>>,
    pub zs: Option<Vec<Point>>,
    /// `F(x_k)` for `k = 0..=iterations`.
    pub values: Vec<f64>,
    /// `|x_k - x*|`, when the reference solution is known.
    pub errors: Option<Vec<f64>>,
    /// Lyapunov energy per iteration: `Phi` for the FISTA family, `E` for FBS.
    pub lyapunov: Option<Vec<f64>>,
    pub lyapunov_weight: Option<f64>,
    /// Number of Lyapunov values that were clamped from slightly negative to 0.
    pub clamped: usize,
    pub iterations: usize,
    pub stopped_early: bool,
    pub notes: Vec<String>,
    pub final_x: Point,
}

/// `tol > 0` and `|next - prev| <= tol (1 + |next|)`.
pub fn stop_check(prev: &Point, next: &Point, tol: f64) -> bool {
    tol > 0.0 && (next - prev).norm() <= tol * (1.0 + next.norm())
}

struct Recorder {
    stride: usize,
    record_y: bool,
    record_z: bool,
    reference: Option<Point>,
    lyap: Option<LyapunovSpec>,
    run: SolverRun,
}

impl Recorder {
    fn new(run: SolverRun, stride: usize, record_y: bool, record_z: bool, reference: Option<Point>, lyap: Option<LyapunovSpec>) -> Self {
        let mut run = run;
        if record_y {
            run.ys = Some(Vec::new());
        }
        if record_z {
            run.zs = Some(Vec::new());
        }
        if reference.is_some() {
            run.errors = Some(Vec::new());
        }
        if let Some(spec) = &lyap {
            run.lyapunov = Some(Vec::new());
            run.lyapunov_weight = Some(spec.weight);
        }
        Self {
            stride,
            record_y,
            record_z,
            reference,
            lyap,
            run,
        }
    }

    /// `z` is the point entering the Lyapunov energy (and is stored when
    /// z-recording is on).
    fn push(&mut self, k: usize, fx: f64, x: &Point, y: &Point, z: Option<&Point>, last: bool) {
        self.run.values.push(fx);
        if let (Some(xs), Some(errs)) = (&self.reference, &mut self.run.errors) {
            errs.push((x - xs).norm());
        }
        if let (Some(spec), Some(trace), Some(z)) = (&self.lyap, &mut self.run.lyapunov, z) {
            let e = spec.energy_from_value(fx, z);
            if e.clamped {
                self.run.clamped += 1;
            }
            trace.push(e.value);
        }
        let keep = if self.stride == 0 { k == 0 } else { k % self.stride == 0 };
        if keep || last {
            self.store(k, x, y, z);
        }
    }

    fn store(&mut self, k: usize, x: &Point, y: &Point, z: Option<&Point>) {
        if self.run.recorded.last() == Some(&k) {
            return;
        }
        self.run.recorded.push(k);
        self.run.xs.push(x.clone());
        if self.record_y {
            self.run.ys.as_mut().unwrap().push(y.clone());
        }
        if self.record_z {
            if let Some(z) = z {
                self.run.zs.as_mut().unwrap().push(z.clone());
            }
        }
    }

    fn finish(mut self, k: usize, x: &Point, y: &Point, z: Option<&Point>, stopped_early: bool) -> SolverRun {
        self.store(k, x, y, z);
        self.run.iterations = k;
        self.run.stopped_early = stopped_early;
        self.run.final_x = x.clone();
        self.run
    }
}

fn empty_run(algorithm: Algorithm, gamma: f64, alpha: f64, dim: usize) -> SolverRun {
    SolverRun {
        algorithm,
        gamma,
        alpha,
        c_coupling: None,
        delta: None,
        certificate: None,
        recorded: Vec::new(),
        xs: Vec::new(),
        ys: None,
        zs: None,
        values: Vec::new(),
        errors: None,
        lyapunov: None,
        lyapunov_weight: None,
        clamped: 0,
        iterations: 0,
        stopped_early: false,
        notes: Vec::new(),
        final_x: Point::zeros(dim),
    }
}

fn check_common(cfg: &SolverConfig, gamma: f64) -> Result<()> {
    if cfg.max_iters == 0 {
        return Err(Error::Domain {
            name: "max_iters",
            value: 0.0,
            domain: "max_iters >= 1".into(),
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::StepSize {
            gamma,
            reason: "must be positive and finite".into(),
        });
    }
    if !(cfg.stop_tolerance >= 0.0) {
        return Err(Error::Domain {
            name: "stop_tolerance",
            value: cfg.stop_tolerance,
            domain: "tol >= 0".into(),
        });
    }
    Ok(())
}

fn start_value<S: SmoothOracle, H: ProxOracle>(p: &CompositeProblem<S, H>, x0: &Point) -> Result<f64> {
    let f0 = p.objective_value(x0)?;
    if !f0.is_finite() {
        return Err(Error::InfeasibleStart);
    }
    Ok(f0)
}

fn reference<S: SmoothOracle, H: ProxOracle>(p: &CompositeProblem<S, H>) -> Option<(Point, f64)> {
    Some((p.reference_solution()?.clone(), p.reference_value()?))
}

/// One step `prox_{gamma h}(y - gamma grad f(y))` into `out`, using `scratch`
/// for the gradient.
fn forward_backward<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    gamma: f64,
    y: &Point,
    scratch: &mut Point,
    out: &mut Point,
) {
    p.smooth().gradient_into(y, scratch);
    // scratch <- y - gamma grad f(y)
    scratch.axpy(1.0, y, -gamma);
    p.nonsmooth().prox_into(gamma, scratch, out);
}

/// The shared two-sequence loop `x+ = T(y)`, `y+ = x+ + alpha (x+ - x)`.
/// With `coupling = Some(c)` the Lyapunov energy is taken at
/// `z = x + (y - x) / c`; otherwise at `x`.
fn inertial_loop<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
    y0: &Point,
    gamma: f64,
    alpha: f64,
    coupling: Option<f64>,
    mut rec: Recorder,
) -> Result<SolverRun> {
    let n = p.dimension();
    let z_of = |x: &Point, y: &Point| coupling.map(|c| x + (y - x) / c);

    let mut x = x0.clone();
    let mut y = y0.clone();
    let f0 = start_value(p, &x)?;
    let z0 = match coupling {
        Some(_) => z_of(&x, &y),
        None => Some(x.clone()),
    };
    rec.push(0, f0, &x, &y, z0.as_ref(), false);

    let mut scratch = Point::zeros(n);
    let mut x_next = Point::zeros(n);
    let mut stopped = false;
    let mut k = 0;
    while k < cfg.max_iters {
        forward_backward(p, gamma, &y, &mut scratch, &mut x_next);
        if x_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                iteration: k + 1,
                what: "iterate",
            });
        }
        let fx = p.value_unchecked(&x_next);
        if !fx.is_finite() {
            return Err(Error::Divergence {
                iteration: k + 1,
                what: "objective",
            });
        }
        stopped = stop_check(&x, &x_next, cfg.stop_tolerance);
        // y <- x_next + alpha (x_next - x)
        y.copy_from(&x_next);
        y *= 1.0 + alpha;
        y.axpy(-alpha, &x, 1.0);
        std::mem::swap(&mut x, &mut x_next);
        k += 1;
        let last = stopped || k == cfg.max_iters;
        let z = match coupling {
            Some(_) => z_of(&x, &y),
            None => Some(x.clone()),
        };
        rec.push(k, fx, &x, &y, z.as_ref(), last);
        if stopped {
            break;
        }
    }
    let z = z_of(&x, &y);
    Ok(rec.finish(k, &x, &y, z.as_ref(), stopped))
}

/// Forward-backward splitting `x_{k+1} = prox_{gamma h}(x_k - gamma grad f(x_k))`.
/// Records the energy `E_k = F(x_k) - F* + (mu + rho)/2 |x_k - x*|^2`.
pub fn fbs_run<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
) -> Result<SolverRun> {
    check_dim(p.dimension(), x0.len())?;
    let (mu, rho, l) = (p.mu(), p.rho(), p.lipschitz());
    let cert = fbs_certificate(mu, rho, l)?;
    let gamma = cfg.gamma.unwrap_or(cert.step_gamma);
    check_common(cfg, gamma)?;

    let mut run = empty_run(Algorithm::Fbs, gamma, 0.0, p.dimension());
    if gamma >= 2.0 / l {
        run.notes.push(format!("gamma = {gamma} >= 2/L: no convergence guarantee"));
    }
    if gamma != cert.step_gamma {
        run.notes.push(format!(
            "gamma differs from 2/(L+mu) = {}; certified rate does not apply",
            cert.step_gamma
        ));
    } else {
        run.certificate = Some(cert);
    }
    let refer = reference(p);
    let lyap = refer
        .as_ref()
        .map(|(xs, fs)| LyapunovSpec::fbs(mu, rho, l, xs.clone(), *fs));
    let rec = Recorder::new(run, cfg.point_stride, false, false, refer.map(|r| r.0), lyap);
    inertial_loop(p, cfg, x0, x0, gamma, 0.0, None, rec)
}

/// Shared body of FISTA and FISTA-delta: `cert` fixes the default inertia and
/// the Lyapunov constants.
fn fista_like<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
    y0: &Point,
    cert: RateCertificate,
    algorithm: Algorithm,
) -> Result<SolverRun> {
    let l = p.lipschitz();
    let gamma = cfg.gamma.unwrap_or(1.0 / l);
    check_common(cfg, gamma)?;
    let alpha = cfg.alpha.unwrap_or(cert.inertia_alpha);
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "[0, 1]".into(),
        });
    }

    let mut run = empty_run(algorithm, gamma, alpha, p.dimension());
    if algorithm == Algorithm::FistaDelta {
        run.delta = Some(cert.delta);
    }
    if gamma > 1.0 / l {
        run.notes.push(format!("gamma = {gamma} > 1/L: outside the certified range"));
    }
    let tuned = gamma == cert.step_gamma && alpha == cert.inertia_alpha;
    if !tuned {
        run.notes
            .push("gamma or alpha differ from the certified values; Lyapunov decrease is not guaranteed".into());
    }

    // z = x + (y - x) / c needs c > 0, i.e. mu + delta > 0.
    let coupling = if cert.degenerate {
        run.notes
            .push("effective mu = 0: z-sequence and Lyapunov function are unavailable".into());
        None
    } else {
        run.c_coupling = Some(cert.coupling_c);
        Some(cert.coupling_c)
    };
    let refer = reference(p);
    let lyap = match (&refer, coupling) {
        (Some((xs, fs)), Some(_)) => Some(LyapunovSpec::fista(
            cert.mu + cert.delta,
            cert.rho - cert.delta,
            cert.lipschitz + cert.delta,
            xs.clone(),
            *fs,
        )),
        _ => None,
    };
    if tuned && !cert.degenerate {
        run.certificate = Some(cert);
    }
    let record_z = cfg.record_z && coupling.is_some();
    if cfg.record_z && coupling.is_none() {
        run.notes.push("record_z requested but z is undefined".into());
    }
    let rec = Recorder::new(run, cfg.point_stride, true, record_z, refer.map(|r| r.0), lyap);
    // FBS-style energy at x is never used here, so no coupling means no Lyapunov.
    match coupling {
        Some(c) => inertial_loop(p, cfg, x0, y0, gamma, alpha, Some(c), rec),
        None => inertial_loop(p, cfg, x0, y0, gamma, alpha, None, rec),
    }
}

/// FISTA with fixed inertia: `x_{k+1} = prox_{gamma h}(y_k - gamma grad f(y_k))`,
/// `y_{k+1} = x_{k+1} + alpha (x_{k+1} - x_k)`. Defaults `gamma = 1/L` and the
/// certified `alpha`.
pub fn fista_run<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
    y0: &Point,
) -> Result<SolverRun> {
    check_dim(p.dimension(), x0.len())?;
    check_dim(p.dimension(), y0.len())?;
    let cert = fista_certificate(p.mu(), p.rho(), p.lipschitz())?;
    fista_like(p, cfg, x0, y0, cert, Algorithm::Fista)
}

/// FISTA with the inertia certified for the shifted splitting
/// `(f + delta/2 |.|^2, h - delta/2 |.|^2)`. Prox and gradient are the
/// unshifted ones at step `1/L`.
pub fn fista_delta_run<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
    y0: &Point,
) -> Result<SolverRun> {
    check_dim(p.dimension(), x0.len())?;
    check_dim(p.dimension(), y0.len())?;
    let delta = cfg.delta.unwrap_or(p.rho());
    let cert = fista_delta_certificate(p.mu(), p.rho(), p.lipschitz(), delta)?;
    fista_like(p, cfg, x0, y0, cert, Algorithm::FistaDelta)
}

/// The three-sequence form
///
/// ```text
/// y_k     = x_k + c (z_k - x_k)
/// x_{k+1} = prox_{gamma h}(y_k - gamma grad f(y_k))
/// z_{k+1} = alpha/(1-c) z_k - alpha/(c(1-c)) y_k + (c+alpha)/c x_{k+1}
/// ```
pub fn fista_zform_run<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
    z0: &Point,
) -> Result<SolverRun> {
    let n = p.dimension();
    check_dim(n, x0.len())?;
    check_dim(n, z0.len())?;
    let l = p.lipschitz();
    let cert = fista_certificate(p.mu(), p.rho(), l)?;
    let gamma = cfg.gamma.unwrap_or(1.0 / l);
    check_common(cfg, gamma)?;
    let alpha = cfg.alpha.unwrap_or(cert.inertia_alpha);
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "alpha >= 0".into(),
        });
    }
    let c = match cfg.c_coupling {
        Some(c) => c,
        None if cert.degenerate => {
            return Err(Error::Unavailable("default coupling c with mu = 0"));
        }
        None => cert.coupling_c,
    };
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain {
            name: "c_coupling",
            value: c,
            domain: "]0, 1[".into(),
        });
    }

    let mut run = empty_run(Algorithm::FistaZForm, gamma, alpha, n);
    run.c_coupling = Some(c);
    let tuned = gamma == cert.step_gamma && alpha == cert.inertia_alpha && c == cert.coupling_c;
    if tuned && !cert.degenerate {
        run.certificate = Some(cert.clone());
    } else {
        run.notes
            .push("parameters differ from the certified ones; Lyapunov decrease is not guaranteed".into());
    }
    let refer = reference(p);
    let lyap = match &refer {
        Some((xs, fs)) if !cert.degenerate => Some(LyapunovSpec::fista(p.mu(), p.rho(), l, xs.clone(), *fs)),
        _ => None,
    };
    let mut rec = Recorder::new(run, cfg.point_stride, true, true, refer.map(|r| r.0), lyap);

    let (cz, cx, cx_next) = (alpha / (1.0 - c), -alpha / (c * (1.0 - c)), (c + alpha) / c);
    let mut x = x0.clone();
    let mut z = z0.clone();
    // y = x + c (z - x)
    let mut y = x.clone() * (1.0 - c) + &z * c;
    let f0 = start_value(p, &x)?;
    rec.push(0, f0, &x, &y, Some(&z), false);

    let mut scratch = Point::zeros(n);
    let mut x_next = Point::zeros(n);
    let mut stopped = false;
    let mut k = 0;
    while k < cfg.max_iters {
        forward_backward(p, gamma, &y, &mut scratch, &mut x_next);
        if x_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                iteration: k + 1,
                what: "iterate",
            });
        }
        let fx = p.value_unchecked(&x_next);
        if !fx.is_finite() {
            return Err(Error::Divergence {
                iteration: k + 1,
                what: "objective",
            });
        }
        stopped = stop_check(&x, &x_next, cfg.stop_tolerance);
        // z <- cz z + cx y + cx_next x_next
        z *= cz;
        z.axpy(cx, &y, 1.0);
        z.axpy(cx_next, &x_next, 1.0);
        std::mem::swap(&mut x, &mut x_next);
        y.copy_from(&x);
        y *= 1.0 - c;
        y.axpy(c, &z, 1.0);
        k += 1;
        rec.push(k, fx, &x, &y, Some(&z), stopped || k == cfg.max_iters);
        if stopped {
            break;
        }
    }
    Ok(rec.finish(k, &x, &y, Some(&z), stopped))
}

/// Dispatches on `cfg.algorithm` with `y0 = x0` (and `z0 = x0` for the z-form).
pub fn run<S: SmoothOracle, H: ProxOracle>(
    p: &CompositeProblem<S, H>,
    cfg: &SolverConfig,
    x0: &Point,
) -> Result<SolverRun> {
    match cfg.algorithm {
        Algorithm::Fbs => fbs_run(p, cfg, x0),
        Algorithm::Fista => fista_run(p, cfg, x0, x0),
        Algorithm::FistaZForm => fista_zform_run(p, cfg, x0, x0),
        Algorithm::FistaDelta => fista_delta_run(p, cfg, x0, x0),
    }
}
