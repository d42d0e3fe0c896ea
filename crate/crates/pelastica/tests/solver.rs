use pelastica::curves::{comparison_uc, exact_cone_minimizer, h_star};
use pelastica::energy::{energy_discrete, ShapeFunction};
use pelastica::solver::*;
use pelastica::{EuP, Error, GridFunction};
use statrs::function::beta::beta;

fn cone(h: f64) -> Obstacle<f64> {
    Obstacle::symmetric_cone(h, -0.25).unwrap()
}

fn opts(n: usize) -> MinimizeOptions<f64> {
    MinimizeOptions { n, ..Default::default() }
}

#[test]
fn assumption_violations() {
    assert!(matches!(Obstacle::symmetric_cone(-0.1, -1.0), Err(Error::Assumption(_))));
    assert!(matches!(Obstacle::sampled(vec![0.1, 0.5, -0.1]), Err(Error::Assumption(_))));
    let g = EuP::new(2.0).unwrap();
    assert!(minimize(&g, 2.0, &cone(0.4), &opts(32)).is_err());
    assert!(minimize(&g, 1.0, &cone(0.4), &opts(128)).is_err());
}

#[test]
fn cone_matches_oracle_at_p2() {
    let g = EuP::new(2.0).unwrap();
    let r = minimize(&g, 2.0, &cone(0.4), &opts(512)).unwrap();
    assert!(r.converged, "{:?}", r.notes);
    let exact = exact_cone_minimizer(2.0, 0.4).unwrap();
    let gap = r.minimizer.sup_distance(&exact.sample(512).unwrap()).unwrap();
    assert!(gap < 5e-3, "{gap}");
    assert!((r.energy - exact.energy).abs() < 1e-2 * exact.energy);
    assert_eq!(r.verdict.uniqueness, Uniqueness::Proven);
    assert!(r.verdict.universal_bound && r.verdict.slope_bound);
    let hs = h_star(2.0).unwrap();
    assert!((r.h_star.unwrap() - hs).abs() < 1e-12);
}

#[test]
fn near_threshold_energy_below_universal_bound() {
    let g = EuP::new(2.0).unwrap();
    let h = 0.8 * h_star(2.0).unwrap();
    let r = minimize(&g, 2.0, &cone(h), &opts(512)).unwrap();
    assert!(r.converged);
    assert!(r.energy < g.c_p().powi(2));
    // the feasible set is closed under the nodal max
    let psi = cone(h).nodal(512);
    assert!(r.minimizer.values().iter().zip(&psi).all(|(u, q)| u >= q));
}

#[test]
fn symmetric_mode_agrees() {
    let g = EuP::new(3.0).unwrap();
    let h = 0.5 * h_star(3.0).unwrap();
    let plain = minimize(&g, 3.0, &cone(h), &opts(256)).unwrap();
    let sym = minimize(&g, 3.0, &cone(h), &MinimizeOptions { symmetric: true, ..opts(256) }).unwrap();
    assert!(sym.converged);
    let v = sym.minimizer.values();
    assert!(v.iter().zip(v.iter().rev()).all(|(a, b)| a == b));
    assert!(plain.minimizer.sup_distance(&sym.minimizer).unwrap() < 1e-6);
}

#[test]
fn asymmetric_cone_reports_without_uniqueness() {
    let g = EuP::new(2.0).unwrap();
    let psi = Obstacle::cone(0.3, -0.1, -0.4, 0.3).unwrap();
    let r = minimize(&g, 2.0, &psi, &opts(256)).unwrap();
    assert!(r.converged);
    assert_eq!(r.verdict.uniqueness, Uniqueness::NotAsserted);
    assert!(r.verdict.threshold.is_none());
    assert!(r.energy <= g.c_p().powi(2) + 1e-6);
    assert_eq!(r.coincidence_nodes, vec![77]);
}

#[test]
fn residual_and_multipliers() {
    let g = EuP::new(2.0).unwrap();
    let psi = cone(0.4);
    let r = minimize(&g, 2.0, &psi, &opts(512)).unwrap();
    let res = vi_residual(&g, 2.0, &r.minimizer, &psi).unwrap();
    assert!(res < 1e-6, "{res}");
    let mu = estimate_coincidence_measure(&g, 2.0, &r.minimizer, &psi);
    let positive: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    assert_eq!(positive, vec![256]);
    assert!(mu.iter().all(|&m| m >= 0.0));
    assert!(mu.iter().sum::<f64>() / 512.0 > 0.0);
    // clamped ψ⁺ is feasible but far from stationary
    let clamp = GridFunction::new(psi.nodal(512).iter().map(|v| v.max(0.0)).collect()).unwrap();
    assert!(vi_residual(&g, 2.0, &clamp, &psi).unwrap() > 0.1);
    assert!(matches!(vi_residual(&g, 2.0, &GridFunction::zeros(512), &psi), Err(Error::Domain(_))));
}

#[test]
fn unconstrained_zero_has_no_multipliers() {
    let g = EuP::new(2.0).unwrap();
    // an obstacle that only rises above zero at one node, tested against a lifted
    // feasible function whose free nodes all carry gradient
    let psi = cone(0.01);
    let zero = GridFunction::zeros(64);
    let grad = pelastica::energy::gradient_discrete(&g, 2.0, &zero);
    assert!(grad.iter().all(|&v| v == 0.0));
    let lifted = GridFunction::from_fn(64, |x| 0.02 * (std::f64::consts::PI * x).sin()).unwrap();
    let mu = estimate_coincidence_measure(&g, 2.0, &lifted, &psi);
    assert!(mu.iter().all(|&m| m == 0.0));
}

#[test]
fn threshold_verdicts() {
    let r = threshold_verdict(2.0, &cone(0.5)).unwrap();
    assert_eq!(r.verdict, Existence::ExistsUnique);
    let hs = h_star(2.0).unwrap();
    assert_eq!(threshold_verdict(2.0, &cone(hs)).unwrap().verdict, Existence::NoMinimizer);
    // h_*(3) = p′/B(1/2, 5/6) from an independent beta
    let hs3 = 1.5 / beta(0.5, 5.0 / 6.0);
    assert!((h_star(3.0).unwrap() - hs3).abs() < 1e-9);
    assert_eq!(threshold_verdict(3.0, &cone(1.5)).unwrap().verdict, Existence::NoMinimizer);
    let lopsided = Obstacle::cone(0.3, -0.1, -0.2, 0.2).unwrap();
    assert!(matches!(threshold_verdict(2.0, &lopsided), Err(Error::Unsupported(_))));
    assert_eq!(Existence::NoMinimizer.as_str(), "no_minimizer");
}

#[test]
fn existence_bound() {
    let g = EuP::new(2.0).unwrap();
    let c = 0.4 * g.c_p();
    // an obstacle sitting under u_c
    let vals: Vec<f64> = (0..=200).map(|k| comparison_uc(&g, c, k as f64 / 200.0).unwrap() - 0.05).collect();
    let psi = Obstacle::sampled(vals).unwrap();
    let check = existence_bound_check(&g, 2.0, &psi, c.powi(2)).unwrap();
    assert!(check.holds);
    assert!(check.dominating_c.unwrap() <= c);
    assert!((check.symmetric_bound - g.c_p().powi(2)).abs() < 1e-12);
    let fail = existence_bound_check(&g, 2.0, &psi, g.c_p().powi(2)).unwrap();
    assert!(!fail.holds && !fail.holds_symmetric);
}

#[test]
fn nonexistence_functional() {
    for &p in &[2.0, 3.0] {
        let g = EuP::new(p).unwrap();
        let hs = h_star(p).unwrap();
        for k in 0..=30 {
            let a = 10f64.powf(-3.0 + k as f64 / 10.0);
            let v = nonexistence_h(&g, p, a).unwrap();
            assert!(v <= a && v >= 0.0, "p={p} A={a} H={v}");
        }
        assert!((nonexistence_h(&g, p, 1e4).unwrap() - 2.0 * hs).abs() < 1e-2);
        assert!(nonexistence_h(&g, p, 1e-6).unwrap() < 1e-5);
        let b = nonexistence_bound(&g, p).unwrap();
        assert!((b.limit - 2.0 * hs).abs() < 1e-9);
        assert!(b.bound < 1.2 * hs, "{} vs {}", b.bound, hs);
    }
    assert!(nonexistence_h(&EuP::new(2.0).unwrap(), 2.0, -1.0).is_err());
}

#[test]
fn slow_decay_is_rejected() {
    struct Slow;
    impl ShapeFunction<f64> for Slow {
        fn g(&self, z: f64) -> f64 {
            z.atan()
        }
        fn g_dot(&self, z: f64) -> f64 {
            1.0 / (1.0 + z * z)
        }
        fn g_ddot(&self, z: f64) -> f64 {
            -2.0 * z / (1.0 + z * z).powi(2)
        }
        fn c_p(&self) -> f64 {
            std::f64::consts::PI
        }
    }
    assert!(matches!(nonexistence_h(&Slow, 2.0, 1.0), Err(Error::Assumption(_))));
}

#[test]
fn iteration_cap_is_reported() {
    let g = EuP::new(3.0).unwrap();
    let r = minimize(&g, 3.0, &cone(0.3), &MinimizeOptions { max_iter: 3, ..opts(256) }).unwrap();
    assert!(!r.converged);
    assert!(r.iterations <= 3 + 20 * 6);
}

#[test]
fn projected_gradient_method_descends() {
    let g = EuP::new(2.0).unwrap();
    let psi = cone(0.4);
    let run = |max_iter| {
        let o = MinimizeOptions { method: Method::ProjectedGradient, max_iter, ..opts(128) };
        minimize(&g, 2.0, &psi, &o).unwrap()
    };
    let (short, long) = (run(50), run(400));
    assert!(long.energy <= short.energy + 1e-12);
    assert!(!long.converged);
    let nodal = psi.nodal(128);
    assert!(long.minimizer.values().iter().zip(&nodal).all(|(u, q)| u >= q));
    assert!((energy_discrete(&g, 2.0, &long.minimizer) - long.energy).abs() < 1e-12);
}

#[test]
fn f32_solve() {
    let g = pelastica::energy::EuP::<f32>::new(2.0).unwrap();
    let psi = Obstacle::<f32>::symmetric_cone(0.4, -0.25).unwrap();
    let o = MinimizeOptions::<f32> { n: 128, tol: 1e-2, ..Default::default() };
    let r = minimize(&g, 2.0f32, &psi, &o).unwrap();
    let exact = exact_cone_minimizer(2.0f32, 0.4).unwrap();
    assert!(r.minimizer.sup_distance(&exact.sample(128).unwrap()).unwrap() < 1e-2);
}
