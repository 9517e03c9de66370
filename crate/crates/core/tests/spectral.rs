use fistashift::quadratic::{spectral_constants, SPECTRAL_MAX_ITERS, SPECTRAL_TOL};
use fistashift::shift::contraction_factor;
use fistashift::solvers::{fista_run, SolverConfig};
use fistashift::{Algorithm, InstanceParams, Point, QuadraticInstance, SeededGenerator, ShiftedProblem};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn generate(n: usize, m: usize, a: f64, b: f64, rho: f64, seed: u64) -> QuadraticInstance {
    QuadraticInstance::generate(&InstanceParams { n, m, a, b, rho, seed }).unwrap()
}

/// `(sigma_max^2, sigma_min^2)` from a dense SVD; `sigma_min` is 0 for wide `A`.
fn svd_oracle(a: &DMatrix<f64>) -> (f64, f64) {
    let s = a.clone().svd(false, false).singular_values;
    let max = s.max();
    let min = if a.nrows() < a.ncols() { 0.0 } else { s.min() };
    (max * max, min * min)
}

#[test]
fn spectral_constants_match_dense_oracle() {
    let shapes = [(20, 20, 0.0, 0.2), (20, 20, 0.58, 0.1), (50, 50, 0.0, 0.2), (50, 50, 0.58, 0.1), (20, 35, 0.0, 0.2)];
    for (n, m, a, b) in shapes {
        for seed in [1, 2, 3] {
            let inst = generate(n, m, a, b, 0.1, seed);
            let (l, mu) = svd_oracle(inst.matrix());
            assert!((inst.lipschitz() - l).abs() <= 1e-8 * l, "L {n}x{m} seed {seed}");
            assert!((inst.mu() - mu).abs() <= 1e-8 * mu, "mu {n}x{m} seed {seed}: {} vs {mu}", inst.mu());
        }
    }
}

#[test]
fn raw_matrix_constants_match_dense_oracle() {
    let a = SeededGenerator::new(9).fill_matrix(20, 20);
    let sc = spectral_constants(&a, SPECTRAL_TOL, SPECTRAL_MAX_ITERS).unwrap();
    let (l, mu) = svd_oracle(&a);
    assert!((sc.lipschitz - l).abs() <= 1e-8 * l);
    assert!((sc.mu - mu).abs() <= 1e-8 * mu);
}

#[test]
fn exact_solution_residual() {
    for (n, a, b, rho) in [(20, 0.0, 0.2, 0.02), (50, 0.58, 0.1, 0.1), (50, 0.0, 0.2, 0.1)] {
        let inst = generate(n, n, a, b, rho, 21);
        assert!(inst.residual(inst.x_star()) <= 1e-10 * (1.0 + inst.atz_norm()));
    }
}

#[test]
fn normalized_instance_has_unit_lipschitz_constant() {
    for (a, b) in [(0.0, 0.2), (0.58, 0.1), (5.0, 0.1)] {
        let inst = generate(30, 30, a, b, 0.1, 4);
        assert!((inst.lipschitz() - 1.0).abs() <= 1e-8);
    }
}

/// FISTA written directly in matrix form.
fn hand_fista(inst: &QuadraticInstance, alpha: f64, iters: usize) -> Vec<Point> {
    let (a, z, v, rho) = (inst.matrix(), inst.z_data(), inst.v_shift(), inst.rho());
    let gamma = 1.0 / inst.lipschitz();
    let mut x = Point::zeros(inst.dimension());
    let mut y = x.clone();
    let mut out = vec![x.clone()];
    for _ in 0..iters {
        let grad = a.transpose() * (a * &y - z);
        let next = (&y - grad * gamma - v * (gamma * rho)) / (1.0 + gamma * rho);
        y = &next + (&next - &x) * alpha;
        x = next;
        out.push(x.clone());
    }
    out
}

#[test]
fn generic_solver_matches_hand_specialized_iteration() {
    let inst = generate(25, 25, 0.58, 0.1, 0.1, 8);
    let p = inst.problem();
    let x0 = Point::zeros(25);
    let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 200), &x0, &x0).unwrap();
    let hand = hand_fista(&inst, run.alpha, 200);
    for (k, (a, b)) in run.xs.iter().zip(&hand).enumerate() {
        assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()), "k = {k}");
    }
}

fn random_point(rng: &mut SeededGenerator, n: usize, scale: f64) -> Point {
    Point::from_fn(n, |_, _| scale * (2.0 * rng.uniform01() - 1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lipschitz_bound_holds(seed in 0u64..1000) {
        let inst = generate(15, 15, 0.0, 0.2, 0.1, seed % 7);
        let u = random_point(&mut SeededGenerator::new(seed), 15, 1.0);
        let g = inst.matrix().tr_mul(inst.matrix());
        prop_assert!((g * &u).norm() <= inst.lipschitz() * u.norm() * (1.0 + 1e-7));
    }

    #[test]
    fn minimizer_is_fixed_point_of_every_shifted_map(t in 0.0f64..=1.0, s in 0.01f64..0.99, seed in 0u64..5) {
        let inst = generate(15, 15, 0.58, 0.1, 0.1, seed);
        let p = inst.problem();
        let delta = (-p.mu() + t * (p.mu() + p.rho())).clamp(-p.mu(), p.rho());
        let gamma = s * 2.0 / (p.lipschitz() + delta);
        let shifted = ShiftedProblem::new(&p, delta).unwrap();
        let xs = inst.x_star();
        let image = shifted.forward_backward_map(gamma, xs).unwrap();
        prop_assert!((image - xs).norm() <= 1e-9 * (1.0 + xs.norm()));
    }

    #[test]
    fn shifted_map_contracts_by_omega(t in 0.0f64..=1.0, s in 0.01f64..0.99, seed in 0u64..1000) {
        let inst = generate(15, 15, 0.58, 0.1, 0.1, 3);
        let p = inst.problem();
        let (mu, rho, l) = (p.mu(), p.rho(), p.lipschitz());
        let delta = (-mu + t * (mu + rho)).clamp(-mu, rho);
        let gamma = s * 2.0 / (l + delta);
        let omega = contraction_factor(mu, rho, l, delta, gamma).unwrap();
        let shifted = ShiftedProblem::new(&p, delta).unwrap();
        let mut rng = SeededGenerator::new(seed);
        let x = random_point(&mut rng, 15, 3.0);
        let y = random_point(&mut rng, 15, 3.0);
        let tx = shifted.forward_backward_map(gamma, &x).unwrap();
        let ty = shifted.forward_backward_map(gamma, &y).unwrap();
        prop_assert!((tx - ty).norm() <= omega * (x - y).norm() * (1.0 + 1e-9));
    }
}
