use pelastica::curves::{clamped_test_function, comparison_uc};
use pelastica::energy::*;
use pelastica::{EuP, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uc_grid(g: &EuP, c: f64, n: usize) -> GridFunction {
    GridFunction::from_fn(n, |x| comparison_uc(g, c, x).unwrap()).unwrap()
}

/// Random smooth feasible function: a short sine series vanishing at both ends.
fn random_grid(rng: &mut ChaCha8Rng, n: usize) -> GridFunction {
    let coef: Vec<f64> = (0..4).map(|k| rng.gen_range(-0.3..0.3) / (k + 1) as f64).collect();
    let shift = rng.gen_range(0.05..0.4);
    GridFunction::from_fn(n, |x| {
        shift * (std::f64::consts::PI * x).sin()
            + coef.iter().enumerate().map(|(k, a)| a * ((k + 2) as f64 * std::f64::consts::PI * x).sin()).sum::<f64>()
    })
    .unwrap()
}

/// Random strictly concave function: `u″ = −a − Σ b_k sin(kπx)` with `Σ|b_k| < a`,
/// so `|z|^p` stays away from its kink at zero.
fn random_concave(rng: &mut ChaCha8Rng, n: usize) -> GridFunction {
    use std::f64::consts::PI;
    let a = rng.gen_range(0.5..3.0);
    let b: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0) * 0.16 * a).collect();
    GridFunction::from_fn(n, |x| {
        0.5 * a * x * (1.0 - x) + b.iter().enumerate().map(|(k, bk)| bk * ((k + 1) as f64 * PI * x).sin() / ((k + 1) as f64 * PI).powi(2)).sum::<f64>()
    })
    .unwrap()
}

#[test]
fn eu_p_values() {
    assert_eq!(eu_p(2.0, 0.0).unwrap(), 0.0);
    let g = EuP::new(2.0).unwrap();
    assert!((eu_p(2.0f64, 1e12).unwrap() - 1.198_140_2).abs() < 1e-6);
    assert!((g.c_p() / 2.0 - 1.198_140_2).abs() < 1e-7);
    for &p in &[1.5f64, 2.0, 3.0, 7.0] {
        assert!((eu_p_inverse(p, eu_p(p, 1.3).unwrap()).unwrap() - 1.3).abs() < 1e-10);
        assert!((eu_p(p, -0.7).unwrap() + eu_p(p, 0.7).unwrap()).abs() < 1e-15);
    }
    assert!(eu_p_inverse(2.0, 1.2).is_err());
    assert!(EuP::new(1.000_000_001).is_ok());
    assert!(EuP::new(1.0).is_err());
}

#[test]
fn comparison_energy_converges() {
    for &p in &[1.5, 2.0, 3.0] {
        let g = EuP::new(p).unwrap();
        for &frac in &[0.3, 1.0] {
            let c = frac * g.c_p() / 2.0;
            let errs: Vec<f64> = [256, 512, 1024, 2048]
                .iter()
                .map(|&n| (energy_discrete(&g, p, &uc_grid(&g, c, n)) / c.powf(p) - 1.0).abs())
                .collect();
            assert!(errs[3] < 1e-3, "p={p} c={c} {errs:?}");
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "p={p} c={c} {errs:?}");
        }
    }
}

#[test]
fn clamped_energy() {
    let g = EuP::new(2.0).unwrap();
    let u = GridFunction::from_fn(2048, |x| clamped_test_function(&g, 1.0, 0.05, x).unwrap()).unwrap();
    let e = energy_discrete(&g, 2.0, &u);
    assert!((e - 0.9 / 0.81).abs() < 1e-2, "{e}");
}

#[test]
fn curvature_form_agrees() {
    let g = EuP::new(2.0).unwrap();
    let u = GridFunction::from_fn(2048, |x| x * (1.0 - x)).unwrap();
    let a = energy_discrete(&g, 2.0, &u);
    let b = energy_curvature_form(2.0, &u);
    assert!(((a - b) / a).abs() < 1e-3, "{a} {b}");
    let uc = uc_grid(&g, 1.0, 2048);
    assert!((energy_curvature_form(2.0, &uc) - 1.0).abs() < 1e-3);
    assert_eq!(energy_curvature_form(2.0, &GridFunction::zeros(64)), 0.0);
}

#[test]
fn curvature_form_error_is_first_order() {
    let g = EuP::new(3.0).unwrap();
    let err = |n| {
        let u = GridFunction::from_fn(n, |x| 0.4 * (std::f64::consts::PI * x).sin()).unwrap();
        (energy_discrete(&g, 3.0, &u) - energy_curvature_form(3.0, &u)).abs()
    };
    let (e1, e2) = (err(256), err(512));
    assert!(e2 < 0.6 * e1, "{e1} {e2}");
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 128;
    for &p in &[1.5, 2.0, 3.0] {
        let g = EuP::new(p).unwrap();
        for _ in 0..20 {
            let u = random_concave(&mut rng, n);
            // smooth direction: per-node noise has second quotients ~N² and needs far smaller steps
            let modes: Vec<f64> = (0..6).map(|k| rng.gen_range(-1.0..1.0) / (k + 1) as f64).collect();
            let phi: Vec<f64> = (0..=n)
                .map(|i| {
                    let x = i as f64 / n as f64;
                    modes.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * x).sin()).sum()
                })
                .collect();
            let grad = gradient_discrete(&g, p, &u);
            let exact: f64 = grad.iter().zip(&phi).map(|(a, b)| a * b).sum();
            let t = 1e-6;
            let shifted = |s: f64| {
                GridFunction::new(u.values().iter().zip(&phi).map(|(a, b)| a + s * b).collect()).unwrap()
            };
            let fd = (energy_discrete(&g, p, &shifted(t)) - energy_discrete(&g, p, &shifted(-t))) / (2.0 * t);
            assert!(((exact - fd) / exact).abs() < 1e-6, "p={p}: {exact} vs {fd}");
        }
    }
}

#[test]
fn zero_function() {
    let g = EuP::new(2.5).unwrap();
    let z = GridFunction::zeros(32);
    assert_eq!(energy_discrete(&g, 2.5, &z), 0.0);
    assert!(gradient_discrete(&g, 2.5, &z).iter().all(|&v| v == 0.0));
}

#[test]
fn small_slope_gradient_is_linear_in_scale() {
    // for p = 2 and small slopes E ≈ ∫u″², so the gradient scales linearly
    let g = EuP::new(2.0).unwrap();
    let base = GridFunction::from_fn(64, |x| x * x * (1.0 - x) * (1.0 - x)).unwrap();
    let scaled = |c: f64| GridFunction::new(base.values().iter().map(|v| c * v).collect()).unwrap();
    let g1 = gradient_discrete(&g, 2.0, &scaled(1e-4));
    let g2 = gradient_discrete(&g, 2.0, &scaled(2e-4));
    let top = g1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in g1.iter().zip(&g2) {
        assert!((b - 2.0 * a).abs() < 1e-6 * top);
    }
}

#[test]
fn reflection_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &p in &[1.5, 2.0, 4.0] {
        let g = EuP::new(p).unwrap();
        let u = random_grid(&mut rng, 200);
        let neg = GridFunction::new(u.reflected().values().iter().map(|v| -v).collect()).unwrap();
        let (a, b) = (energy_discrete(&g, p, &u), energy_discrete(&g, p, &neg));
        assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }
}

#[test]
fn euler_substitution_signs() {
    let g = EuP::new(3.0).unwrap();
    let lin = GridFunction::from_fn(50, |_| 0.0).unwrap();
    assert!(euler_substitution(&g, 3.0, &lin).iter().all(|&w| w == 0.0));
    let u = GridFunction::from_fn(50, |x| x * (1.0 - x) / 2.0).unwrap();
    let w = euler_substitution(&g, 3.0, &u);
    assert!(w[1..50].iter().all(|&v| v > 0.0));
    // w_i = pĠ(u′)^{p−1}(−u″)^{p−1}, with u″ = −1
    let mid = 25;
    let expect = 3.0 * g.g_dot(0.0).powf(2.0);
    assert!((w[mid] - expect).abs() < 1e-3);
}

#[test]
fn smoothed_energy_tends_to_exact() {
    let g = EuP::new(1.5).unwrap();
    let u = GridFunction::from_fn(128, |x| 0.3 * (std::f64::consts::PI * x).sin()).unwrap();
    let e = energy_discrete(&g, 1.5, &u);
    let e_small = energy_smoothed(&g, 1.5, 1e-10, &u);
    let e_big = energy_smoothed(&g, 1.5, 1e-2, &u);
    assert!((e - e_small).abs() < 1e-9);
    assert!((e - e_big).abs() > (e - e_small).abs());
}

#[test]
fn jensen_slope_bound_for_comparison_function() {
    let g = EuP::new(2.0).unwrap();
    let u = uc_grid(&g, 1.0, 1024);
    let e = energy_discrete(&g, 2.0, &u);
    let bound = g.g_inv(e.powf(0.5)).unwrap();
    let max = u.slopes().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max <= bound + 1e-3, "{max} {bound}");
}

#[test]
fn generic_over_f32() {
    let g = pelastica::energy::EuP::<f32>::new(2.0).unwrap();
    let u = pelastica::energy::GridFunction::<f32>::from_fn(64, |x| x * (1.0 - x)).unwrap();
    let e = energy_discrete(&g, 2.0f32, &u);
    let g64 = EuP::new(2.0).unwrap();
    let u64 = GridFunction::from_fn(64, |x| x * (1.0 - x)).unwrap();
    assert!((e as f64 - energy_discrete(&g64, 2.0, &u64)).abs() < 1e-4);
}
