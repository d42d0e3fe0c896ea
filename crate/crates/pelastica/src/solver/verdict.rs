use serde::Serialize;

use super::obstacle::Obstacle;
use crate::curves::{comparison_uc, conjugate, h_star};
use crate::energy::{GridFunction, ShapeFunction};
use crate::error::{domain, Error, Result};
use crate::quad::integrate_with_breaks;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    ExistsUnique,
    NoMinimizer,
}

impl Existence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Existence::ExistsUnique => "exists_unique",
            Existence::NoMinimizer => "no_minimizer",
        }
    }
}

/// Cone height against the sharp threshold `h_*(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub verdict: Existence,
    pub h: T,
    pub h_star: T,
}

/// Existence and uniqueness for the symmetric cone `ψ` and `G = EU_p`:
/// a unique minimizer iff `ψ(1/2) < h_*`.
pub fn threshold_verdict<T: Real>(p: T, psi: &Obstacle<T>) -> Result<ThresholdReport<T>> {
    let h = psi
        .symmetric_cone_height()
        .ok_or_else(|| Error::Unsupported("the threshold verdict covers symmetric cones only".into()))?;
    let hs = h_star(p)?;
    let verdict = if h < hs { Existence::ExistsUnique } else { Existence::NoMinimizer };
    Ok(ThresholdReport { verdict, h, h_star: hs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    /// Symmetric cone below `h_*` with `G = EU_p`.
    Proven,
    /// Outside the cone theorem; a computed minimizer says nothing about others.
    NotAsserted,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveVerdict<T> {
    pub threshold: Option<ThresholdReport<T>>,
    pub uniqueness: Uniqueness,
    /// `E ≤ c_p^p + 10⁻⁶`.
    pub universal_bound: bool,
    /// `max|u′| ≤ G⁻¹(E^{1/p})` up to one cell of slope change (vacuous when `E^{1/p} ≥ c_p/2`).
    pub slope_bound: bool,
}

pub(super) fn solve_verdict<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    psi: &Obstacle<T>,
    u: &GridFunction<T>,
    energy: T,
) -> Result<SolveVerdict<T>> {
    let threshold = match (g.eu_exponent(), psi.symmetric_cone_height()) {
        (Some(q), Some(_)) if q == p => Some(threshold_verdict(p, psi)?),
        _ => None,
    };
    let uniqueness = match threshold {
        Some(ThresholdReport { verdict: Existence::ExistsUnique, .. }) => Uniqueness::Proven,
        _ => Uniqueness::NotAsserted,
    };
    let cp = g.c_p();
    let universal_bound = energy <= cp.powf(p) + T::lit(1e-6);
    let d = u.slopes();
    let max_slope = d.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let level = energy.max(T::zero()).powf(p.recip());
    let slope_bound = match g.g_inv(level) {
        Ok(bound) => {
            // one cell of u″ separates the boundary midpoint slope from u′(0)
            let ddu = u.second_quotients().iter().fold(T::zero(), |m, v| m.max(v.abs()));
            max_slope <= bound + u.h() * ddu + T::lit(1e-9)
        }
        Err(_) => true,
    };
    Ok(SolveVerdict { threshold, uniqueness, universal_bound, slope_bound })
}

/// Energy bounds for existence.
#[derive(Debug, Clone, Serialize)]
pub struct ExistenceCheck<T> {
    pub trial_energy: T,
    /// `c_p^p / 2^p`; a feasible competitor below it guarantees a minimizer in `M(ψ)`.
    pub bound: T,
    pub holds: bool,
    /// `c_p^p`, the corresponding bound in the symmetric class.
    pub symmetric_bound: T,
    pub holds_symmetric: bool,
    /// Smallest `c < c_p/2` (to bisection accuracy) with `ψ ≤ u_c`, when one exists.
    pub dominating_c: Option<T>,
}

fn dominated<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, psi: &Obstacle<T>, c: T, xs: &[T]) -> Result<bool> {
    for &x in xs {
        let q = psi.eval(x);
        if q > T::zero() && q > comparison_uc(g, c, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tests `trial_energy < c_p^p/2^p` and looks for `c ∈ (0, c_p/2)` with `ψ ≤ u_c`.
pub fn existence_bound_check<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    psi: &Obstacle<T>,
    trial_energy: T,
) -> Result<ExistenceCheck<T>> {
    let cp = g.c_p();
    let symmetric_bound = cp.powf(p);
    let bound = (cp / T::lit(2.0)).powf(p);
    let xs: Vec<T> = (0..=400).map(|k| T::from_count(k) / T::lit(400.0)).collect();
    let half = cp / T::lit(2.0);
    let mut hi = half * (T::one() - T::lit(1e-9));
    // u_c increases with c, so the dominating set of c is an interval
    let dominating_c = if dominated(g, psi, hi, &xs)? {
        let mut lo = T::zero();
        for _ in 0..50 {
            let mid = T::lit(0.5) * (lo + hi);
            if dominated(g, psi, mid, &xs)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    } else {
        None
    };
    Ok(ExistenceCheck {
        trial_energy,
        bound,
        holds: trial_energy < bound,
        symmetric_bound,
        holds_symmetric: trial_energy < symmetric_bound,
        dominating_c,
    })
}

/// `lim z^{2+ε}Ġ(z) = 0` for some `ε > 0`, checked through the local decay
/// exponent between `10⁵` and `10⁶`.
fn check_decay<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G) -> Result<()> {
    if g.eu_exponent().is_some() {
        return Ok(());
    }
    let z = T::lit(1e5);
    let (a, b) = (g.g_dot(z), g.g_dot(T::lit(10.0) * z));
    if !(b > T::zero()) {
        return Ok(());
    }
    let rate = (a / b).ln() / T::lit(10.0).ln();
    if rate > T::lit(2.0) + T::lit(1e-3) {
        Ok(())
    } else {
        Err(Error::Assumption(format!("Ġ decays like z^(-{rate}), not faster than z^(-2)")))
    }
}

/// `H(A) = ∫₀^A sĠ(s)(A−s)^{−1/p}ds / ∫₀^A Ġ(s)(A−s)^{−1/p}ds`.
///
/// With `s = A(1 − τ^{p′})` both integrands become bounded on `τ ∈ [0, 1]`.
pub fn nonexistence_h<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, a: T) -> Result<T> {
    if !(p > T::one()) {
        return domain(format!("p must exceed 1, got {p}"));
    }
    if !(a > T::zero() && a.is_finite()) {
        return domain(format!("A must be positive and finite, got {a}"));
    }
    check_decay(g)?;
    let pc = conjugate(p);
    let t_of = |tau: T| -(pc * tau.ln()).exp_m1();
    // Ġ(At) lives on t ≲ 1/A, i.e. τ close to 1
    let breaks: Vec<T> = [100.0, 10.0, 1.0]
        .iter()
        .map(|&k| T::lit(k) / a)
        .filter(|&t| t < T::one())
        .map(|t| (T::one() - t).powf(pc.recip()))
        .collect();
    let num = integrate_with_breaks(|tau| { let t = t_of(tau); t * g.g_dot(a * t) }, T::zero(), T::one(), &breaks);
    let den = integrate_with_breaks(|tau| g.g_dot(a * t_of(tau)), T::zero(), T::one(), &breaks);
    Ok(a * num / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct NonexistenceBound<T> {
    /// `(A, H(A))` on a logarithmic grid of `[10⁻³, 10⁵]`.
    pub samples: Vec<(T, T)>,
    /// `lim_{A→∞} H(A) = (2/c_p)∫₀^∞ sĠ`.
    pub limit: T,
    pub sup: T,
    /// `½ sup H`, the bound on `‖u‖_∞` for minimizers.
    pub bound: T,
}

/// `½ sup_A H(A)` over the sample grid and the analytic limit.
pub fn nonexistence_bound<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T) -> Result<NonexistenceBound<T>> {
    let samples = (0..=64)
        .map(|k| {
            let a = T::lit(10.0).powf(T::lit(-3.0) + T::from_count(k) / T::lit(8.0));
            nonexistence_h(g, p, a).map(|v| (a, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = T::lit(2.0) * g.tail_moment(T::zero()) / g.c_p();
    let sup = samples.iter().fold(limit, |m, &(_, v)| m.max(v));
    Ok(NonexistenceBound { samples, limit, sup, bound: sup / T::lit(2.0) })
}
