use fistashift::lyapunov::{empirical_rate, normalized_traces, phi, LyapunovSpec};
use fistashift::rates::{fista_certificate, fista_delta_certificate, fista_rate};
use fistashift::solvers::{fbs_run, fista_delta_run, fista_run, fista_zform_run, SolverConfig};
use fistashift::{Algorithm, InstanceParams, Point, QuadraticInstance, SeededGenerator};
use proptest::prelude::*;

fn generate(n: usize, a: f64, b: f64, rho: f64, seed: u64) -> QuadraticInstance {
    QuadraticInstance::generate(&InstanceParams { n, m: n, a, b, rho, seed }).unwrap()
}

fn classes() -> impl Strategy<Value = (f64, f64)> {
    prop::sample::select(vec![(0.0, 0.2), (0.58, 0.1)])
}

fn rhos() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.02, 0.1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fista_lyapunov_decrease((a, b) in classes(), rho in rhos(), seed in 0u64..100_000) {
        let inst = generate(15, a, b, rho, seed);
        let p = inst.problem();
        let r = fista_rate(p.mu(), p.rho(), p.lipschitz()).unwrap();
        let x0 = Point::zeros(15);
        let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 300), &x0, &x0).unwrap();
        let l = run.lyapunov.unwrap();
        for k in 0..l.len() - 1 {
            prop_assert!(l[k + 1] <= r * l[k] * (1.0 + 1e-9) + 1e-12, "k = {}", k);
        }
    }

    #[test]
    fn value_and_z_envelopes((a, b) in classes(), rho in rhos(), seed in 0u64..100_000) {
        let inst = generate(15, a, b, rho, seed);
        let p = inst.problem();
        let r = fista_rate(p.mu(), p.rho(), p.lipschitz()).unwrap();
        let x0 = Point::zeros(15);
        let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 300), &x0, &x0).unwrap();
        let l = run.lyapunov.as_ref().unwrap();
        let weight = run.lyapunov_weight.unwrap();
        let phi0 = l[0];
        let f_star = p.reference_value().unwrap();
        let xs = inst.x_star();
        let zs = run.zs.as_ref().unwrap();
        for k in 0..l.len() {
            if l[k] < 1e2 * f64::EPSILON * phi0 {
                break;
            }
            let rk = r.powi(k as i32);
            prop_assert!(run.values[k] - f_star <= rk * phi0 * (1.0 + 1e-9));
            let dz = (&zs[k] - xs).norm();
            prop_assert!(dz <= rk.sqrt() * (phi0 / weight).sqrt() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn zform_equivalence(c in 0.05f64..0.95, alpha in 0.0f64..1.0, seed in 0u64..100_000) {
        let inst = generate(10, 0.58, 0.1, 0.1, seed);
        let p = inst.problem();
        let mut rng = SeededGenerator::new(seed);
        let x0 = Point::from_fn(10, |_, _| rng.uniform01());
        let z0 = Point::from_fn(10, |_, _| rng.uniform01());
        let y0 = &x0 + (&z0 - &x0) * c;
        let cfg = SolverConfig::new(Algorithm::FistaZForm, 100).alpha(alpha).c_coupling(c);
        let a = fista_run(&p, &cfg, &x0, &y0).unwrap();
        let b = fista_zform_run(&p, &cfg, &x0, &z0).unwrap();
        let ya = a.ys.as_ref().unwrap();
        let yb = b.ys.as_ref().unwrap();
        let zb = b.zs.as_ref().unwrap();
        for k in 0..=100 {
            let scale = 1.0 + b.xs[k].norm();
            prop_assert!((&a.xs[k] - &b.xs[k]).norm() <= 1e-10 * scale);
            prop_assert!((&ya[k] - &yb[k]).norm() <= 1e-10 * scale);
            let z_from_fista = &a.xs[k] + (&ya[k] - &a.xs[k]) / c;
            prop_assert!((z_from_fista - &zb[k]).norm() <= 1e-10 * (1.0 + zb[k].norm()));
        }
    }

    #[test]
    fn fbs_energy_decrease((a, b) in classes(), rho in rhos(), seed in 0u64..100_000) {
        let inst = generate(15, a, b, rho, seed);
        let p = inst.problem();
        let run = fbs_run(&p, &SolverConfig::new(Algorithm::Fbs, 300), &Point::zeros(15)).unwrap();
        let q = run.certificate.as_ref().unwrap().contraction;
        let e = run.lyapunov.unwrap();
        for k in 0..e.len() - 1 {
            prop_assert!(e[k + 1] <= q * e[k] * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn phi_is_nonnegative_and_vanishes_only_at_minimizer(seed in 0u64..100_000, s in 0.0f64..2.0) {
        let inst = generate(8, 0.58, 0.1, 0.1, 1);
        let p = inst.problem();
        let spec = LyapunovSpec::for_problem(&p).unwrap();
        let mut rng = SeededGenerator::new(seed);
        let xs = inst.x_star();
        let x = xs + Point::from_fn(8, |_, _| s * (rng.uniform01() - 0.5));
        let z = xs + Point::from_fn(8, |_, _| s * (rng.uniform01() - 0.5));
        let v = phi(&spec, &p, &x, &z).unwrap().value;
        prop_assert!(v >= 0.0);
        if (&x - xs).norm() > 1e-6 || (&z - xs).norm() > 1e-6 {
            prop_assert!(v > 0.0);
        }
    }
}

const SMALL_MU_SEED: u64 = 2024;

fn benchmark_instance(a: f64, b: f64, rho: f64) -> QuadraticInstance {
    generate(50, a, b, rho, SMALL_MU_SEED)
}

#[test]
fn normalized_traces_start_at_one() {
    let inst = benchmark_instance(0.58, 0.1, 0.1);
    let p = inst.problem();
    let x0 = Point::zeros(50);
    let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 20), &x0, &x0).unwrap();
    let t = normalized_traces(&run, &p).unwrap();
    assert_eq!((t.e[0], t.v[0], t.ell.as_ref().unwrap()[0]), (1.0, 1.0, 1.0));
    assert_eq!(t.e.len(), 21);

    let at_star = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 5), inst.x_star(), inst.x_star()).unwrap();
    assert!(normalized_traces(&at_star, &p).is_err());
}

#[test]
fn fbs_error_strictly_decreases() {
    let inst = benchmark_instance(0.58, 0.1, 0.1);
    let p = inst.problem();
    let run = fbs_run(&p, &SolverConfig::new(Algorithm::Fbs, 2000), &Point::zeros(50)).unwrap();
    let e = normalized_traces(&run, &p).unwrap().e;
    for k in 0..e.len() - 1 {
        if e[k] < 1e-13 {
            break;
        }
        assert!(e[k + 1] < e[k], "k = {k}");
    }
}

#[test]
fn fista_lyapunov_below_rate_power() {
    let inst = benchmark_instance(0.0, 0.2, 0.1);
    let p = inst.problem();
    let r = fista_rate(p.mu(), p.rho(), p.lipschitz()).unwrap();
    let x0 = Point::zeros(50);
    let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 2000), &x0, &x0).unwrap();
    let ell = normalized_traces(&run, &p).unwrap().ell.unwrap();
    for (k, l) in ell.iter().enumerate() {
        assert!(*l <= r.powi(k as i32) * (1.0 + 1e-9) + 1e-12, "k = {k}");
    }
}

#[test]
fn small_mu_fista_oscillates_but_lyapunov_is_monotone() {
    let inst = benchmark_instance(0.0, 0.2, 0.1);
    let p = inst.problem();
    let x0 = Point::zeros(50);
    let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 500), &x0, &x0).unwrap();
    let t = normalized_traces(&run, &p).unwrap();
    let increases = |s: &[f64]| (0..199).filter(|&k| s[k + 1] > s[k]).count();
    assert!(increases(&t.e) > 0, "e_k is monotone");
    assert!(increases(&t.v) > 0, "v_k is monotone");
    let ell = t.ell.unwrap();
    for k in 0..ell.len() - 1 {
        assert!(ell[k + 1] <= ell[k] * (1.0 + 1e-9) + 1e-12, "k = {k}");
    }
}

#[test]
fn full_shift_rate_is_observed() {
    let inst = benchmark_instance(0.0, 0.2, 0.1);
    let p = inst.problem();
    let cert = fista_delta_certificate(p.mu(), p.rho(), p.lipschitz(), p.rho()).unwrap();
    let expected = 1.0 - ((p.mu() + p.rho()) / (p.lipschitz() + p.rho())).sqrt();
    assert!((cert.contraction - expected).abs() <= 1e-12);
    let x0 = Point::zeros(50);
    let run = fista_delta_run(&p, &SolverConfig::new(Algorithm::FistaDelta, 2000), &x0, &x0).unwrap();
    let rate = empirical_rate(run.lyapunov.as_ref().unwrap(), 50).unwrap();
    assert!(rate <= cert.contraction + 0.02, "{rate} vs {}", cert.contraction);
}

#[test]
fn default_fista_coupling_reconstructs_z() {
    let inst = benchmark_instance(0.58, 0.1, 0.1);
    let p = inst.problem();
    let cert = fista_certificate(p.mu(), p.rho(), p.lipschitz()).unwrap();
    let x0 = Point::zeros(50);
    let run = fista_run(&p, &SolverConfig::new(Algorithm::Fista, 10), &x0, &x0).unwrap();
    let (ys, zs) = (run.ys.as_ref().unwrap(), run.zs.as_ref().unwrap());
    for k in 0..run.xs.len() {
        let z = &run.xs[k] + (&ys[k] - &run.xs[k]) / cert.coupling_c;
        assert!((z - &zs[k]).norm() <= 1e-14 * (1.0 + zs[k].norm()));
    }
}
