//! Tikhonov-shifted least squares benchmark
//! `F(x) = rho/2 |x + v|^2 + 1/2 |A x - z|^2`
//! with `f = 1/2 |A x - z|^2` (`L = |A^T A|`, `mu = lambda_min(A^T A)`) and
//! `h = rho/2 |x + v|^2`, whose minimizer solves `(rho I + A^T A) x = A^T z - rho v`.
//!
//! Random instances use `A0 = a I + b R` with `R`, `v`, `z` uniform on `[0, 1)`
//! (drawn in that order, `R` row-major) and `A = A0 / |A0^T A0|^{1/2}`.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::problem::{CompositeProblem, Point, ProxOracle, SmoothOracle};
use crate::prng::SeededGenerator;

/// Relative tolerance of the power iterations used when building instances.
pub const SPECTRAL_TOL: f64 = 1e-12;
pub const SPECTRAL_MAX_ITERS: usize = 200_000;

/// `f(x) = 1/2 |A x - z|^2`. The gradient is evaluated through the cached
/// Gram matrix, `A^T A x - A^T z`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: Arc<DMatrix<f64>>,
    z: DVector<f64>,
    gram: Arc<DMatrix<f64>>,
    atz: DVector<f64>,
    lipschitz: f64,
    mu: f64,
}

impl LeastSquares {
    /// Constants estimated with [`spectral_constants`].
    pub fn new(a: DMatrix<f64>, z: DVector<f64>) -> Result<Self> {
        let sc = spectral_constants(&a, SPECTRAL_TOL, SPECTRAL_MAX_ITERS)?;
        Ok(Self::with_constants(a, z, sc.lipschitz, sc.mu))
    }

    /// Uses the given constants as they are; handy for testing validation.
    pub fn with_constants(a: DMatrix<f64>, z: DVector<f64>, lipschitz: f64, mu: f64) -> Self {
        assert_eq!(a.nrows(), z.len(), "z must have one entry per row of A");
        let gram = a.tr_mul(&a);
        let atz = a.tr_mul(&z);
        Self {
            a: Arc::new(a),
            z,
            gram: Arc::new(gram),
            atz,
            lipschitz,
            mu,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }
}

impl SmoothOracle for LeastSquares {
    fn value(&self, x: &Point) -> f64 {
        let mut r = self.z.clone();
        r.gemv(1.0, &self.a, x, -1.0);
        0.5 * r.norm_squared()
    }

    fn gradient_into(&self, x: &Point, out: &mut Point) {
        out.copy_from(&self.atz);
        out.gemv(1.0, &self.gram, x, -1.0);
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }
}

/// `h(x) = rho/2 |x + v|^2`, with `prox_{gamma h}(x) = (x - gamma rho v) / (1 + gamma rho)`.
#[derive(Debug, Clone)]
pub struct RidgeProx {
    rho: f64,
    v: DVector<f64>,
}

impl RidgeProx {
    pub fn new(rho: f64, v: DVector<f64>) -> Self {
        Self { rho, v }
    }
}

impl ProxOracle for RidgeProx {
    fn value(&self, x: &Point) -> f64 {
        0.5 * self.rho * (x + &self.v).norm_squared()
    }

    fn prox_into(&self, gamma: f64, x: &Point, out: &mut Point) {
        let gr = gamma * self.rho;
        out.copy_from(x);
        out.axpy(-gr, &self.v, 1.0);
        *out /= 1.0 + gr;
    }

    fn strong_convexity(&self) -> f64 {
        self.rho
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        Some((x + &self.v) * self.rho)
    }
}

/// Generation parameters of a random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceParams {
    pub n: usize,
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct QuadraticInstance {
    params: Option<InstanceParams>,
    smooth: LeastSquares,
    z_data: DVector<f64>,
    v_shift: DVector<f64>,
    rho: f64,
    x_star: DVector<f64>,
}

impl QuadraticInstance {
    /// Draws `R` (`m x n`), `v`, `z` from the seeded generator and normalizes
    /// `A0 = a I + b R` to unit spectral norm of `A^T A`.
    pub fn generate(params: &InstanceParams) -> Result<Self> {
        let InstanceParams {
            n,
            m,
            a,
            b,
            rho,
            seed,
        } = *params;
        if n == 0 || m == 0 {
            return Err(Error::Shape("n and m must be positive".into()));
        }
        if a != 0.0 && n != m {
            return Err(Error::Shape(format!(
                "a = {a} adds a multiple of the identity, which needs n = m (got n = {n}, m = {m})"
            )));
        }
        let mut rng = SeededGenerator::new(seed);
        let r = rng.fill_matrix(m, n);
        let v = rng.fill_vector(n);
        let z = rng.fill_vector(m);

        let mut a0 = r * b;
        if a != 0.0 {
            for i in 0..n {
                a0[(i, i)] += a;
            }
        }
        let gram0 = a0.tr_mul(&a0);
        let (top, _) = power_iteration(&gram0, SPECTRAL_TOL, SPECTRAL_MAX_ITERS)?;
        if !(top > 0.0) {
            return Err(Error::InvalidConstants("A0 is zero".into()));
        }
        let a_mat = a0 / top.sqrt();
        let mut inst = Self::from_parts(a_mat, z, v, rho)?;
        inst.params = Some(*params);
        Ok(inst)
    }

    /// Builds an instance from explicit data; constants are estimated and the
    /// minimizer is computed by a Cholesky solve.
    pub fn from_parts(a: DMatrix<f64>, z: DVector<f64>, v: DVector<f64>, rho: f64) -> Result<Self> {
        check_dim(a.nrows(), z.len())?;
        check_dim(a.ncols(), v.len())?;
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidConstants(format!("rho = {rho} must be positive")));
        }
        let smooth = LeastSquares::new(a, z.clone())?;
        if smooth.mu >= smooth.lipschitz {
            return Err(Error::InvalidConstants(format!(
                "degenerate spectrum: mu = {} is not below L = {}",
                smooth.mu, smooth.lipschitz
            )));
        }
        let x_star = solve_normal_equations(&smooth.gram, &smooth.atz, &v, rho)?;
        Ok(Self {
            params: None,
            smooth,
            z_data: z,
            v_shift: v,
            rho,
            x_star,
        })
    }

    pub fn params(&self) -> Option<&InstanceParams> {
        self.params.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.v_shift.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.smooth.matrix()
    }

    pub fn z_data(&self) -> &DVector<f64> {
        &self.z_data
    }

    pub fn v_shift(&self) -> &DVector<f64> {
        &self.v_shift
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz
    }

    pub fn mu(&self) -> f64 {
        self.smooth.mu
    }

    pub fn x_star(&self) -> &DVector<f64> {
        &self.x_star
    }

    /// `A^T (A x - z)`, evaluated literally.
    pub fn grad(&self, x: &Point) -> Result<Point> {
        check_dim(self.dimension(), x.len())?;
        let mut r = self.z_data.clone();
        r.gemv(1.0, self.matrix(), x, -1.0);
        Ok(self.matrix().tr_mul(&r))
    }

    /// `(x - gamma rho v) / (1 + gamma rho)`.
    pub fn prox(&self, gamma: f64, x: &Point) -> Point {
        (x - &self.v_shift * (gamma * self.rho)) / (1.0 + gamma * self.rho)
    }

    /// Solves `(rho I + A^T A) x = A^T z - rho v` by Cholesky factorization.
    pub fn exact_solution(&self) -> Result<Point> {
        solve_normal_equations(&self.smooth.gram, &self.smooth.atz, &self.v_shift, self.rho)
    }

    /// `|(rho I + A^T A) x - (A^T z - rho v)|`.
    pub fn residual(&self, x: &Point) -> f64 {
        let mut r = &self.smooth.atz - &self.v_shift * self.rho;
        r.gemv(1.0, &self.smooth.gram, x, -1.0);
        r.axpy(self.rho, x, 1.0);
        r.norm()
    }

    pub fn atz_norm(&self) -> f64 {
        self.smooth.atz.norm()
    }

    /// The composite problem with the minimizer attached.
    pub fn problem(&self) -> CompositeProblem<LeastSquares, RidgeProx> {
        CompositeProblem::new(
            self.smooth.clone(),
            RidgeProx::new(self.rho, self.v_shift.clone()),
            self.dimension(),
        )
        .and_then(|p| p.with_reference(self.x_star.clone()))
        .expect("instance constants were validated at construction")
    }

    /// Self-describing text form; every number is written with 17
    /// significant digits so the data round-trips bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (m, n) = self.matrix().shape();
        out.push_str("# fistashift quadratic instance\n");
        out.push_str("format 1\n");
        let _ = writeln!(out, "n {n}");
        let _ = writeln!(out, "m {m}");
        if let Some(p) = &self.params {
            let _ = writeln!(out, "seed {}", p.seed);
            let _ = writeln!(out, "a {}", fmt17(p.a));
            let _ = writeln!(out, "b {}", fmt17(p.b));
        }
        let _ = writeln!(out, "rho {}", fmt17(self.rho));
        let _ = writeln!(out, "matrix A {m} {n}");
        for i in 0..m {
            let row: Vec<String> = (0..n).map(|j| fmt17(self.matrix()[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        for (name, vec) in [("z", &self.z_data), ("v", &self.v_shift)] {
            let _ = writeln!(out, "vector {name} {}", vec.len());
            let vals: Vec<String> = vec.iter().map(|&x| fmt17(x)).collect();
            out.push_str(&vals.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut header = std::collections::HashMap::new();
        let mut matrix = None;
        let mut vectors = std::collections::HashMap::new();
        let bad = |line: usize, message: String| Error::Parse { line, message };

        while let Some((ln, line)) = lines.next() {
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            match key {
                "matrix" => {
                    let (_, rows, cols) = (
                        words.next(),
                        parse_usize(words.next(), ln)?,
                        parse_usize(words.next(), ln)?,
                    );
                    let mut data = Vec::with_capacity(rows * cols);
                    for _ in 0..rows {
                        let (rl, row) = lines
                            .next()
                            .ok_or_else(|| bad(ln, "matrix ends early".into()))?;
                        let vals = parse_floats(row, rl)?;
                        if vals.len() != cols {
                            return Err(bad(rl, format!("expected {cols} values, found {}", vals.len())));
                        }
                        data.extend(vals);
                    }
                    matrix = Some(DMatrix::from_row_slice(rows, cols, &data));
                }
                "vector" => {
                    let name = words
                        .next()
                        .ok_or_else(|| bad(ln, "vector needs a name".into()))?
                        .to_string();
                    let len = parse_usize(words.next(), ln)?;
                    let (vl, row) = lines
                        .next()
                        .ok_or_else(|| bad(ln, "vector payload missing".into()))?;
                    let vals = parse_floats(row, vl)?;
                    if vals.len() != len {
                        return Err(bad(vl, format!("expected {len} values, found {}", vals.len())));
                    }
                    vectors.insert(name, DVector::from_vec(vals));
                }
                _ => {
                    let value = words
                        .next()
                        .ok_or_else(|| bad(ln, format!("`{key}` has no value")))?;
                    header.insert(key.to_string(), (ln, value.to_string()));
                }
            }
        }

        let get = |k: &str| header.get(k).cloned();
        if let Some((ln, f)) = get("format") {
            if f != "1" {
                return Err(bad(ln, format!("unsupported format {f}")));
            }
        }
        let float = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|(ln, s)| s.parse::<f64>().map_err(|e| bad(ln, format!("{k}: {e}"))))
                .transpose()
        };
        let rho = float("rho")?.ok_or_else(|| bad(0, "missing rho".into()))?;
        let a = matrix.ok_or_else(|| bad(0, "missing matrix A".into()))?;
        let z = vectors
            .remove("z")
            .ok_or_else(|| bad(0, "missing vector z".into()))?;
        let v = vectors
            .remove("v")
            .ok_or_else(|| bad(0, "missing vector v".into()))?;
        let params = match (get("seed"), float("a")?, float("b")?) {
            (Some((ln, seed)), Some(pa), Some(pb)) => Some(InstanceParams {
                n: a.ncols(),
                m: a.nrows(),
                a: pa,
                b: pb,
                rho,
                seed: seed.parse().map_err(|e| bad(ln, format!("seed: {e}")))?,
            }),
            _ => None,
        };
        let mut inst = Self::from_parts(a, z, v, rho)?;
        inst.params = params;
        Ok(inst)
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_usize(word: Option<&str>, line: usize) -> Result<usize> {
    word.and_then(|w| w.parse().ok()).ok_or(Error::Parse {
        line,
        message: "expected a non-negative integer".into(),
    })
}

fn parse_floats(row: &str, line: usize) -> Result<Vec<f64>> {
    row.split_whitespace()
        .map(|w| {
            w.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("`{w}`: {e}"),
            })
        })
        .collect()
}

fn solve_normal_equations(
    gram: &DMatrix<f64>,
    atz: &DVector<f64>,
    v: &DVector<f64>,
    rho: f64,
) -> Result<DVector<f64>> {
    let mut system = gram.clone();
    for i in 0..system.nrows() {
        system[(i, i)] += rho;
    }
    let chol = Cholesky::new(system).ok_or_else(|| {
        Error::Factorization("rho I + A^T A is not numerically positive definite".into())
    })?;
    Ok(chol.solve(&(atz - v * rho)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstants {
    pub lipschitz: f64,
    pub mu: f64,
}

fn start_vector(n: usize) -> DVector<f64> {
    let mut rng = SeededGenerator::new(0x5eed_cafe);
    DVector::from_iterator(n, (0..n).map(|_| 0.5 + rng.uniform01()))
}

/// Largest eigenvalue of the symmetric positive semidefinite `g` and its
/// eigenvector, by power iteration on Rayleigh quotients.
fn power_iteration(g: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<(f64, DVector<f64>)> {
    let n = g.nrows();
    let mut u = start_vector(n);
    u /= u.norm();
    let mut w = DVector::zeros(n);
    let mut lambda = 0.0;
    for it in 0..max_iters {
        w.gemv(1.0, g, &u, 0.0);
        let next = u.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok((0.0, u));
        }
        u.copy_from(&w);
        u /= norm;
        if it > 0 && (next - lambda).abs() <= tol * next.abs() {
            return Ok((next, u));
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        what: "power iteration",
        iterations: max_iters,
        estimate: lambda,
    })
}

/// `(L, mu) = (lambda_max(A^T A), lambda_min(A^T A))` to relative tolerance `tol`.
///
/// `L` comes from power iteration. `mu` comes from inverse iteration on a
/// Cholesky factor of `A^T A + s I` with `s` at the rounding level of `L`.
/// Final estimates are
/// Rayleigh quotients `|A u|^2 / |u|^2`, which avoids squaring rounding errors
/// through the Gram matrix.
pub fn spectral_constants(a: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<SpectralConstants> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "tol > 0".into(),
        });
    }
    let g = a.tr_mul(a);
    let rayleigh = |u: &DVector<f64>| (a * u).norm_squared() / u.norm_squared();
    let (_, top) = power_iteration(&g, tol, max_iters)?;
    let lipschitz = rayleigh(&top);

    // A tiny shift keeps the factorization meaningful when A^T A is
    // singular (wide A); it only perturbs the convergence ratio.
    let shift = 1e3 * g.nrows() as f64 * f64::EPSILON * lipschitz;
    let mut shifted = g;
    for i in 0..shifted.nrows() {
        shifted[(i, i)] += shift;
    }
    let chol = Cholesky::new(shifted)
        .ok_or_else(|| Error::Factorization("A^T A + s I is not numerically positive definite".into()))?;
    let mu = inverse_iteration(&chol, &rayleigh, lipschitz, tol, max_iters)?;
    Ok(SpectralConstants {
        lipschitz,
        mu: mu.clamp(0.0, lipschitz),
    })
}

fn inverse_iteration(
    chol: &Cholesky<f64, Dyn>,
    rayleigh: &dyn Fn(&DVector<f64>) -> f64,
    lipschitz: f64,
    tol: f64,
    max_iters: usize,
) -> Result<f64> {
    let mut u = start_vector(chol.l_dirty().nrows());
    // Absolute floor so that a zero eigenvalue can still converge.
    let floor = f64::EPSILON * lipschitz;
    u /= u.norm();
    let mut lambda = rayleigh(&u);
    for it in 0..max_iters {
        let w = chol.solve(&u);
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Factorization("inverse iteration broke down".into()));
        }
        u = w / norm;
        let next = rayleigh(&u);
        if it > 1 && (next - lambda).abs() <= tol * next.abs().max(floor) {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        what: "inverse iteration",
        iterations: max_iters,
        estimate: lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: usize, m: usize, a: f64, b: f64, rho: f64, seed: u64) -> InstanceParams {
        InstanceParams {
            n,
            m,
            a,
            b,
            rho,
            seed,
        }
    }

    #[test]
    fn generator_rejects_bad_shapes_and_degenerate_spectra() {
        assert!(matches!(
            QuadraticInstance::generate(&params(5, 4, 1.0, 0.1, 0.1, 1)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            QuadraticInstance::generate(&params(4, 4, 1.0, 0.0, 0.1, 1)),
            Err(Error::InvalidConstants(_))
        ));
        assert!(QuadraticInstance::generate(&params(4, 6, 0.0, 0.2, 0.1, 1)).is_ok());
    }

    #[test]
    fn normalized_instance_has_unit_lipschitz() {
        for (a, b) in [(0.0, 0.2), (0.58, 0.1)] {
            let inst = QuadraticInstance::generate(&params(30, 30, a, b, 0.1, 4)).unwrap();
            assert!((inst.lipschitz() - 1.0).abs() <= 1e-8);
            assert!(inst.mu() >= 0.0 && inst.mu() < inst.lipschitz());
        }
    }

    #[test]
    fn gradient_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let x_hat = DVector::from_vec(vec![0.5, -1.0]);
        let z = &a * &x_hat;
        let inst = QuadraticInstance::from_parts(a, z, DVector::zeros(2), 1.0).unwrap();
        assert!(inst.grad(&x_hat).unwrap().norm() <= 1e-15);

        let inst = QuadraticInstance::from_parts(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]),
            DVector::zeros(2),
            DVector::zeros(2),
            1.0,
        )
        .unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(inst.grad(&e1).unwrap(), e1);
        assert!(inst.grad(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let inst = QuadraticInstance::generate(&params(5, 5, 0.0, 1.0, 0.2, 8)).unwrap();
        let x = DVector::from_fn(5, |i, _| 0.3 * i as f64 - 0.5);
        let g = inst.grad(&x).unwrap();
        let f = |x: &DVector<f64>| 0.5 * (inst.matrix() * x - inst.z_data()).norm_squared();
        let h = 1e-6;
        for i in 0..5 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()));
        }
        // The Gram-based oracle agrees with the literal formula.
        let p = inst.problem();
        assert!((p.smooth().gradient(&x) - &g).norm() <= 1e-13 * (1.0 + g.norm()));
    }

    /// `A = diag(1, 0.5)`, `z = 0`, `v = (v0, 0)`; the prox acts coordinatewise.
    fn diag_instance(rho: f64, v0: f64) -> QuadraticInstance {
        QuadraticInstance::from_parts(
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5])),
            DVector::zeros(2),
            DVector::from_vec(vec![v0, 0.0]),
            rho,
        )
        .unwrap()
    }

    #[test]
    fn prox_examples() {
        let inst = diag_instance(2.0, 0.0);
        assert_relative_eq!(inst.prox(0.5, &DVector::from_vec(vec![2.0, 0.0]))[0], 1.0);
        let x = DVector::from_vec(vec![-3.5, 0.25]);
        assert!((inst.prox(1e-12, &x) - &x).amax() <= 1e-9);
    }

    #[test]
    fn prox_matches_grid_search() {
        for (gamma, rho, v, x) in [(0.7, 0.3, 1.2, -0.4), (2.0, 1.5, -0.3, 2.0), (0.05, 4.0, 0.0, 1.0)] {
            let inst = diag_instance(rho, v);
            let closed = inst.prox(gamma, &DVector::from_vec(vec![x, 0.0]))[0];
            let obj = |p: f64| 0.5 * rho * (p + v) * (p + v) + (p - x) * (p - x) / (2.0 * gamma);
            let (mut lo, mut hi) = (-10.0f64, 10.0f64);
            for _ in 0..10 {
                let step = (hi - lo) / 2000.0;
                let best = (0..=2000)
                    .map(|i| lo + step * i as f64)
                    .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
                    .unwrap();
                lo = best - step;
                hi = best + step;
            }
            assert!((closed - 0.5 * (lo + hi)).abs() <= 1e-6);
        }
    }

    #[test]
    fn exact_solution_examples() {
        let z = DVector::from_vec(vec![1.0, -2.0, 4.0]);
        let inst = QuadraticInstance::from_parts(
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.5])),
            z.clone(),
            DVector::zeros(3),
            1.0,
        )
        .unwrap();
        // Scalar check on the first two coordinates: (1 + 1) x = z.
        assert_relative_eq!(inst.x_star()[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(inst.x_star()[1], -1.0, max_relative = 1e-14);

        // v = -x_hat with A x_hat = z: both terms vanish at x_hat.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.2, 2.0]);
        let x_hat = DVector::from_vec(vec![0.7, -1.1]);
        let inst = QuadraticInstance::from_parts(a.clone(), &a * &x_hat, -&x_hat, 0.37).unwrap();
        assert!((inst.x_star() - &x_hat).norm() <= 1e-14);

        let inst = QuadraticInstance::from_parts(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::zeros(2),
            0.5,
        )
        .unwrap();
        assert_relative_eq!(inst.x_star()[0], 1.0 / 1.5, max_relative = 1e-14);
        assert_relative_eq!(inst.x_star()[1], 2.0 / 4.5, max_relative = 1e-14);
        assert_eq!(&inst.exact_solution().unwrap(), inst.x_star());
    }

    #[test]
    fn spectral_constants_examples() {
        let sc = spectral_constants(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])), 1e-12, 1000)
            .unwrap();
        assert_relative_eq!(sc.lipschitz, 4.0, max_relative = 1e-10);
        assert_relative_eq!(sc.mu, 1.0, max_relative = 1e-10);
        let sc = spectral_constants(&DMatrix::identity(6, 6), 1e-12, 1000).unwrap();
        assert_relative_eq!(sc.lipschitz, 1.0, max_relative = 1e-14);
        assert_relative_eq!(sc.mu, 1.0, max_relative = 1e-14);
        assert!(spectral_constants(&DMatrix::identity(2, 2), 0.0, 10).is_err());
    }

    #[test]
    fn wide_matrix_has_zero_mu() {
        // A^T A is 6x6 with rank 3.
        let a = SeededGenerator::new(3).fill_matrix(3, 6);
        let sc = spectral_constants(&a, 1e-10, 100_000).unwrap();
        assert!(sc.mu <= 1e-10 * sc.lipschitz, "{sc:?}");
    }

    #[test]
    fn spectral_nonconvergence_reports_estimate() {
        let a = SeededGenerator::new(1).fill_matrix(10, 10);
        match spectral_constants(&a, 1e-15, 1) {
            Err(Error::NoConvergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let inst = QuadraticInstance::generate(&params(7, 7, 0.58, 0.1, 0.02, 99)).unwrap();
        let text = inst.to_text();
        let back = QuadraticInstance::from_text(&text).unwrap();
        assert_eq!(back.matrix(), inst.matrix());
        assert_eq!(back.z_data(), inst.z_data());
        assert_eq!(back.v_shift(), inst.v_shift());
        assert_eq!(back.rho().to_bits(), inst.rho().to_bits());
        assert_eq!(back.params(), inst.params());
        assert_eq!(back.x_star(), inst.x_star());
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_parse_errors_carry_lines() {
        let text = "format 1\nrho 0.1\nmatrix A 1 2\n1.0 oops\n";
        match QuadraticInstance::from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(QuadraticInstance::from_text("rho 0.1\n").is_err());
    }
}
