//! Minimization of `E(u) = ∫|G(u′)′|^p` over `{u ≥ ψ}` and the existence theory around it.
//!
//! Iterates stay feasible: every trial point is the nodal projection
//! `max(u, ψ)` (followed by reflection averaging in symmetric mode), and a step
//! is accepted only under an Armijo condition on the working energy together
//! with a non-increase of the unsmoothed energy.

mod newton;
mod obstacle;
mod verdict;

pub use obstacle::{Obstacle, ObstacleKind};
pub use verdict::{
    existence_bound_check, nonexistence_bound, nonexistence_h, threshold_verdict, Existence, ExistenceCheck,
    NonexistenceBound, SolveVerdict, ThresholdReport, Uniqueness,
};

use serde::Serialize;

use crate::curves::profile_u0;
use crate::energy::{energy_with, gradient_with, GridFunction, Integrand, ShapeFunction};
use crate::error::{domain, Result};
use crate::scalar::Real;

/// Descent direction used by [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Two-metric projection: Newton step on the free nodes from a banded
    /// positive semidefinite Hessian model, scaled gradient on the active ones.
    ProjectedNewton,
    /// Plain projected gradient.
    ProjectedGradient,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeOptions<T> {
    /// Number of cells `N`.
    pub n: usize,
    /// Target for the KKT residual.
    pub tol: T,
    /// Restrict to `u = u(1 − ·)`.
    pub symmetric: bool,
    pub max_iter: usize,
    pub method: Method,
    /// Smoothing parameters, largest first; an exact stage always follows. Ignored for `p = 2`.
    pub epsilon_schedule: Vec<T>,
    /// Armijo constant.
    pub armijo: T,
    /// Overrides the default coincidence threshold `10·h·√ε_mach·(1 + max|u′|)`.
    pub coincidence_threshold: Option<T>,
}

impl<T: Real> Default for MinimizeOptions<T> {
    fn default() -> Self {
        MinimizeOptions {
            n: 512,
            tol: T::lit(1e-6),
            symmetric: false,
            max_iter: 1000,
            method: Method::ProjectedNewton,
            epsilon_schedule: [1e-2, 1e-4, 1e-6, 1e-8, 1e-10].iter().map(|&e| T::lit(e)).collect(),
            armijo: T::lit(1e-4),
            coincidence_threshold: None,
        }
    }
}

/// Progress of one smoothing stage.
#[derive(Debug, Clone, Serialize)]
pub struct StageSummary<T> {
    pub epsilon: T,
    pub iterations: usize,
    pub kkt_residual: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport<T> {
    pub minimizer: GridFunction<T>,
    /// Unsmoothed discrete energy.
    pub energy: T,
    pub kkt_residual: T,
    /// Change of the gradient caused by rounding `u` to the working precision.
    pub kkt_floor: T,
    /// `kkt_residual < max(tol, kkt_floor)`.
    pub converged: bool,
    pub iterations: usize,
    pub stages: Vec<StageSummary<T>>,
    pub coincidence_threshold: T,
    pub coincidence_nodes: Vec<usize>,
    /// Nodal multipliers (point masses), zero off the coincidence set.
    pub multipliers: Vec<T>,
    pub c_p: T,
    pub h_star: Option<T>,
    pub verdict: SolveVerdict<T>,
    pub notes: Vec<String>,
}

impl<T: Real> SolveReport<T> {
    /// `Σ μ_i`.
    pub fn total_multiplier(&self) -> T {
        self.multipliers.iter().copied().sum()
    }
}

/// `10·h·√ε_mach·(1 + max|u′|)`.
pub fn default_coincidence_threshold<T: Real>(u: &GridFunction<T>) -> T {
    let slope = u.slopes().iter().fold(T::zero(), |m, d| m.max(d.abs()));
    T::lit(10.0) * u.h() * T::epsilon().sqrt() * (T::one() + slope)
}

fn check_feasible<T: Real>(u: &GridFunction<T>, psi: &[T]) -> Result<()> {
    let tol = T::lit(64.0) * T::epsilon() * (T::one() + u.sup_norm());
    for (i, (&v, &q)) in u.values().iter().zip(psi).enumerate() {
        if v < q - tol {
            return domain(format!("u is below the obstacle at node {i}: {v} < {q}"));
        }
    }
    Ok(())
}

fn kkt_from<T: Real>(grad: &[T], u: &[T], psi: &[T], delta: T) -> T {
    let n = u.len() - 1;
    (1..n).fold(T::zero(), |m, i| {
        let r = if u[i] - psi[i] <= delta { (-grad[i]).max(T::zero()) } else { grad[i].abs() };
        m.max(r)
    })
}

/// Discrete KKT residual of `DE(u)(v − u) ≥ 0`, in the max norm.
///
/// With `g = ∇E_h(u)`: `|g_i|` on free nodes and `|min(g_i, 0)|` on coincidence
/// nodes `u_i − ψ_i < δ_coin`, where `μ_i = max(g_i, 0)` absorbs the rest.
pub fn vi_residual<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>, psi: &Obstacle<T>) -> Result<T> {
    let nodal = psi.nodal(u.n());
    check_feasible(u, &nodal)?;
    let grad = gradient_with(g, &Integrand::exact(p), u);
    Ok(kkt_from(&grad, u.values(), &nodal, default_coincidence_threshold(u)))
}

/// `μ_i = max(g_i, 0)` on nodes with `u_i − ψ(x_i) < δ_coin`, zero elsewhere.
pub fn estimate_coincidence_measure<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    u: &GridFunction<T>,
    psi: &Obstacle<T>,
) -> Vec<T> {
    let nodal = psi.nodal(u.n());
    let grad = gradient_with(g, &Integrand::exact(p), u);
    multipliers_from(&grad, u.values(), &nodal, default_coincidence_threshold(u))
}

fn multipliers_from<T: Real>(grad: &[T], u: &[T], psi: &[T], delta: T) -> Vec<T> {
    let n = u.len() - 1;
    (0..=n)
        .map(|i| if i > 0 && i < n && u[i] - psi[i] < delta { grad[i].max(T::zero()) } else { T::zero() })
        .collect()
}

/// `ε_mach·‖u‖_∞·‖H‖_∞` for the Hessian model `H` of the exact energy.
pub fn kkt_floor<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> T {
    let band = newton::hessian_model(g, &Integrand::exact(p), u);
    T::epsilon() * u.sup_norm() * band.max_row_sum()
}

struct Problem<'a, T, G: ?Sized> {
    g: &'a G,
    psi: Vec<T>,
    n: usize,
    symmetric: bool,
}

impl<T: Real, G: ShapeFunction<T> + ?Sized> Problem<'_, T, G> {
    fn project(&self, v: &mut [T]) {
        for i in 1..self.n {
            v[i] = v[i].max(self.psi[i]);
        }
        if self.symmetric {
            self.symmetrize(v);
        }
        v[0] = T::zero();
        v[self.n] = T::zero();
    }

    fn symmetrize(&self, v: &mut [T]) {
        let half = T::lit(0.5);
        for i in 1..=self.n / 2 {
            let j = self.n - i;
            let m = half * (v[i] + v[j]);
            v[i] = m;
            v[j] = m;
        }
    }

    fn grad(&self, f: &Integrand<T>, u: &GridFunction<T>) -> Vec<T> {
        let mut gr = gradient_with(self.g, f, u);
        if self.symmetric {
            self.symmetrize(&mut gr);
        }
        gr
    }

    fn newton_direction(&self, f: &Integrand<T>, u: &GridFunction<T>, grad: &[T], delta: T) -> Vec<T> {
        let n = self.n;
        let v = u.values();
        let mut band = newton::hessian_model(self.g, f, u);
        let floor = T::lit(1e-14) * band.max_diag().max(T::min_positive_value());
        for r in 0..n - 1 {
            band.d0[r] = band.d0[r].max(floor);
        }
        // width of the active band: distance moved by a scaled projected gradient step
        let w = (1..n).fold(T::zero(), |m, i| {
            let stepped = (v[i] - grad[i] / band.d0[i - 1]).max(self.psi[i]);
            m.max((v[i] - stepped).abs())
        });
        let eps_act = delta.max(w.min(T::lit(1e-3)));
        let active: Vec<bool> = (0..=n)
            .map(|i| i > 0 && i < n && v[i] - self.psi[i] <= eps_act && grad[i] > T::zero())
            .collect();
        for i in 1..n {
            if active[i] {
                band.decouple(i - 1);
            }
        }
        let rhs: Vec<T> = (1..n).map(|i| -grad[i]).collect();
        let mut tau = T::zero();
        let step = loop {
            if let Some(x) = band.solve(tau, &rhs) {
                break x;
            }
            tau = (tau * T::lit(10.0)).max(T::lit(1e-12) * band.max_diag());
            if !tau.is_finite() || tau > band.max_diag() * T::lit(1e6) {
                break (1..n).map(|i| -grad[i] / band.d0[i - 1]).collect();
            }
        };
        let mut dir = vec![T::zero(); n + 1];
        dir[1..n].copy_from_slice(&step);
        if self.symmetric {
            self.symmetrize(&mut dir);
        }
        dir
    }
}

struct Trial<T: Real> {
    u: GridFunction<T>,
    e_work: T,
    e_exact: T,
}

/// Minimizes the discrete energy over `{u_i ≥ ψ(x_i)}` (and `u = u(1−·)` if requested).
///
/// Starts from `max(t·U_0, 0)` with the least `t` that clears the obstacle.
/// Non-convergence is reported through [`SolveReport::converged`], not as an error.
pub fn minimize<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    psi: &Obstacle<T>,
    opts: &MinimizeOptions<T>,
) -> Result<SolveReport<T>> {
    if !(p > T::one() && p.is_finite()) {
        return domain(format!("p must exceed 1, got {p}"));
    }
    let n = opts.n;
    if n < 64 {
        return domain(format!("grid needs N ≥ 64, got {n}"));
    }
    if !(opts.tol > T::zero()) {
        return domain("tolerance must be positive");
    }
    if opts.epsilon_schedule.iter().any(|e| !(*e > T::zero())) {
        return domain("smoothing parameters must be positive");
    }
    let mut nodal = psi.nodal(n);
    if opts.symmetric {
        for i in 0..=n {
            nodal[i] = nodal[i].max(nodal[n - i]);
        }
    }
    let prob = Problem { g, psi: nodal, n, symmetric: opts.symmetric };
    let mut notes = Vec::new();

    let nn = T::from_count(n);
    let profile: Vec<T> = (0..=n).map(|i| profile_u0(g, T::from_count(i) / nn)).collect::<Result<_>>()?;
    let mut t = T::zero();
    for i in 1..n {
        if prob.psi[i] > T::zero() && profile[i] > T::zero() {
            t = t.max(prob.psi[i] / profile[i]);
        }
    }
    let mut start: Vec<T> = profile.iter().map(|&v| (t * v).max(T::zero())).collect();
    prob.project(&mut start);
    let mut u = GridFunction::new(start)?;

    let exact = Integrand::exact(p);
    let mut stages_eps: Vec<T> = if p == T::lit(2.0) { Vec::new() } else { opts.epsilon_schedule.clone() };
    stages_eps.push(T::zero());
    let stage_cap = (opts.max_iter / (4 * stages_eps.len())).max(20);

    let mut e0 = energy_with(g, &exact, &u);
    let mut iterations = 0usize;
    let mut stages = Vec::new();
    let mut pg_alpha = T::one();
    for (si, &eps) in stages_eps.iter().enumerate() {
        let last = si + 1 == stages_eps.len();
        let f = Integrand { p, eps };
        let cap = if last { opts.max_iter.saturating_sub(iterations) } else { stage_cap.min(opts.max_iter - iterations) };
        let mut it = 0usize;
        let mut best = T::infinity();
        let mut stall = 0usize;
        let mut kkt;
        loop {
            let grad = prob.grad(&f, &u);
            let delta = opts.coincidence_threshold.unwrap_or_else(|| default_coincidence_threshold(&u));
            kkt = kkt_from(&grad, u.values(), &prob.psi, delta);
            if kkt < opts.tol || it >= cap || stall >= 40 {
                break;
            }
            if kkt < best * T::lit(0.5) {
                best = kkt;
                stall = 0;
            } else {
                stall += 1;
            }
            it += 1;
            let (dir, alpha0) = match opts.method {
                Method::ProjectedNewton => (prob.newton_direction(&f, &u, &grad, delta), T::one()),
                Method::ProjectedGradient => (grad.iter().map(|&x| -x).collect(), pg_alpha * T::lit(2.0)),
            };
            let e_work = if eps > T::zero() { energy_with(g, &f, &u) } else { e0 };
            let evaluate = |alpha: T| -> Result<(Trial<T>, T)> {
                let mut v: Vec<T> = u.values().iter().zip(&dir).map(|(&a, &d)| a + alpha * d).collect();
                prob.project(&mut v);
                let pred = (1..n).map(|i| grad[i] * (v[i] - u.values()[i])).sum::<T>();
                let trial = GridFunction::new(v)?;
                let ex = energy_with(g, &exact, &trial);
                let wk = if eps > T::zero() { energy_with(g, &f, &trial) } else { ex };
                Ok((Trial { u: trial, e_work: wk, e_exact: ex }, pred))
            };
            let mono = T::lit(1e-12);
            let scale = T::one().max(e_work.abs());
            let mut alpha = alpha0;
            let mut accepted = None;
            for k in 0..60 {
                let (tr, pred) = evaluate(alpha)?;
                let armijo = tr.e_work <= e_work + opts.armijo * pred;
                // below the rounding level of the energy only monotonicity is testable
                let unresolved = k == 0 && pred.abs() <= T::lit(1e-12) * scale;
                if (armijo || unresolved) && tr.e_exact <= e0 + mono && tr.e_exact.is_finite() {
                    accepted = Some(tr);
                    break;
                }
                alpha = alpha * T::lit(0.5);
            }
            match accepted {
                Some(tr) if tr.u == u => break,
                Some(tr) => {
                    e0 = tr.e_exact;
                    u = tr.u;
                    pg_alpha = alpha;
                }
                None => break,
            }
        }
        iterations += it;
        stages.push(StageSummary { epsilon: eps, iterations: it, kkt_residual: kkt });
    }

    let grad = prob.grad(&exact, &u);
    let delta = opts.coincidence_threshold.unwrap_or_else(|| default_coincidence_threshold(&u));
    let kkt = kkt_from(&grad, u.values(), &prob.psi, delta);
    let kkt_floor = kkt_floor(g, p, &u);
    let multipliers = multipliers_from(&grad, u.values(), &prob.psi, delta);
    let coincidence_nodes: Vec<usize> = (1..n).filter(|&i| u.values()[i] - prob.psi[i] < delta).collect();
    // a residual at the rounding floor of the grid is the best attainable
    let converged = kkt < opts.tol.max(kkt_floor);
    if converged && kkt >= opts.tol {
        notes.push(format!("KKT residual {:e} is at the rounding floor {:e} of this grid", kkt.as_f64(), kkt_floor.as_f64()));
    }
    if !converged {
        notes.push(format!("KKT residual {:e} did not reach {:e} within {iterations} iterations", kkt.as_f64(), opts.tol.as_f64()));
    }
    let verdict = verdict::solve_verdict(g, p, psi, &u, e0)?;
    if verdict.threshold.as_ref().map(|t| t.verdict) == Some(Existence::NoMinimizer) {
        notes.push("no minimizer exists for this cone; the computed point only approximates the infimum".into());
    }
    let h_star = match g.eu_exponent() {
        Some(q) if q == p => Some(crate::curves::h_star(p)?),
        _ => None,
    };
    Ok(SolveReport {
        minimizer: u,
        energy: e0,
        kkt_residual: kkt,
        kkt_floor,
        converged,
        iterations,
        stages,
        coincidence_threshold: delta,
        coincidence_nodes,
        multipliers,
        c_p: g.c_p(),
        h_star,
        verdict,
        notes,
    })
}
