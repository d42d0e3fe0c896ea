//! Symmetric decreasing rearrangement of `f = G(u′)′` and the competitor `v`
//! solving `G(v′)′ = f_*`, `v(0) = v(1) = 0`.

use serde::Serialize;

use crate::energy::{energy_discrete, slopes_and_quotients, GridFunction, ShapeFunction};
use crate::error::{domain, Error, Result};
use crate::quad::newton_bisect;
use crate::scalar::Real;

/// Values below this fraction of `max|f|` carry no sign.
const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct RearrangementResult<T> {
    /// Rearranged source at the interior nodes `x_1..x_{N−1}`.
    pub f_star: Vec<T>,
    pub v: GridFunction<T>,
    /// `E(v) − ‖f_*‖_p^p`.
    pub energy_preserved: T,
    /// `max_i |v_i − v_{N−i}|`.
    pub asymmetry: T,
    pub symmetric: bool,
}

/// `G(u′)′` at the interior nodes, i.e. the quotients entering the discrete energy.
pub fn source_term<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, u: &GridFunction<T>) -> Vec<T> {
    slopes_and_quotients(g, u).1
}

/// Cell order by distance from the center, the left cell first on ties.
fn outward_order(m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m).collect();
    // twice the distance to (m−1)/2, kept integral
    idx.sort_by_key(|&i| ((2 * i) as isize - (m as isize - 1)).unsigned_abs() * 2 + usize::from(2 * i + 1 > m));
    idx
}

/// Sorts `|f|` in decreasing order, places the values alternately outward from
/// the center and reattaches the common sign of `f`.
pub fn sym_decreasing_rearrangement<T: Real>(f: &[T]) -> Result<Vec<T>> {
    if f.iter().any(|v| !v.is_finite()) {
        return domain("samples must be finite");
    }
    let top = f.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = T::lit(SIGN_TOLERANCE) * top;
    let pos = f.iter().any(|&v| v > cut);
    let neg = f.iter().any(|&v| v < -cut);
    if pos && neg {
        return Err(Error::MixedSign("f takes both signs; only one-signed sources are rearranged".into()));
    }
    let sign = if neg { -T::one() } else { T::one() };
    let mut mags: Vec<T> = f.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let mut out = vec![T::zero(); f.len()];
    for (slot, m) in outward_order(f.len()).into_iter().zip(mags) {
        out[slot] = sign * m;
    }
    Ok(out)
}

/// Solves `G(v′)′ = f_star` with `v(0) = v(1) = 0` on the grid with `f_star.len() + 1` cells.
///
/// The midpoint slopes are `v′_j = G⁻¹(F_j + c₀)` with `F_j = hΣ_{i≤j} f_i`; `c₀`
/// makes `Σ v′_j h` vanish.
pub fn reconstruct_v<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, f_star: &[T]) -> Result<GridFunction<T>> {
    let n = f_star.len() + 1;
    if n < 2 {
        return domain("need at least one interior value");
    }
    if f_star.iter().any(|v| !v.is_finite()) {
        return domain("samples must be finite");
    }
    let h = T::from_count(n).recip();
    let mut big_f = Vec::with_capacity(n);
    big_f.push(T::zero());
    for &fi in f_star {
        let last = *big_f.last().unwrap_or(&T::zero());
        big_f.push(last + h * fi);
    }
    let half = g.c_p() / T::lit(2.0);
    let (fmin, fmax) = big_f.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)));
    let (lo, hi) = (-half - fmin, half - fmax);
    if !(lo < hi) {
        return Err(Error::SlopeBlowup(format!(
            "the oscillation {} of the cumulative source reaches c_p(G) = {}",
            fmax - fmin,
            g.c_p()
        )));
    }
    let mean = |c0: T| -> Result<(T, T)> {
        let mut s = T::zero();
        let mut ds = T::zero();
        for &fj in &big_f {
            let z = g.g_inv(fj + c0)?;
            s += h * z;
            ds += h / g.g_dot(z);
        }
        Ok((s, ds))
    };
    let width = hi - lo;
    let pad = width * T::lit(1e-12);
    let (a, b) = (lo + pad, hi - pad);
    let blowup = || Error::SlopeBlowup("no constant balances the slopes inside the range of G".into());
    if mean(a).map_err(|_| blowup())?.0 > T::zero() || mean(b).map_err(|_| blowup())?.0 < T::zero() {
        return Err(blowup());
    }
    let c0 = newton_bisect(
        |c| mean(c).unwrap_or_else(|_| (T::nan(), T::nan())),
        a,
        b,
        -T::lit(0.5) * (big_f[0] + big_f[n - 1]),
        T::zero(),
    );
    let mut d = Vec::with_capacity(n);
    for &fj in &big_f {
        d.push(g.g_inv(fj + c0).map_err(|_| blowup())?);
    }
    // integrate from both ends and blend so that a symmetric source gives a symmetric v
    let mut left = vec![T::zero(); n + 1];
    let mut right = vec![T::zero(); n + 1];
    for j in 0..n {
        left[j + 1] = left[j] + h * d[j];
        right[n - j - 1] = right[n - j] - h * d[n - j - 1];
    }
    let values = (0..=n)
        .map(|i| {
            let t = T::from_count(i) * h;
            (T::one() - t) * left[i] + t * right[i]
        })
        .collect();
    GridFunction::new(values)
}

/// Rearranges `G(u′)′` and rebuilds the symmetric competitor.
pub fn rearrange_minimizer<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    u: &GridFunction<T>,
) -> Result<RearrangementResult<T>> {
    let f = source_term(g, u);
    let f_star = sym_decreasing_rearrangement(&f)?;
    let v = reconstruct_v(g, &f_star)?;
    let h = u.h();
    let norm = h * f_star.iter().map(|x| x.abs().powf(p)).sum::<T>();
    let energy_preserved = energy_discrete(g, p, &v) - norm;
    let vals = v.values();
    let asymmetry = vals.iter().zip(vals.iter().rev()).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let scale = v.sup_norm().max(T::one());
    let symmetric = asymmetry <= T::lit(1e-10) * scale;
    Ok(RearrangementResult { f_star, v, energy_preserved, asymmetry, symmetric })
}

/// `min 2Ġ(z) + zG̈(z) > 0` over 2001 samples of `[0, C₀]`; this is the derivative
/// form of the convexity of `1/G⁻¹` on `[0, G(C₀)]`.
pub fn convexity_condition<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c0: T) -> Result<bool> {
    if !(c0 > T::zero() && c0.is_finite()) {
        return domain(format!("C0 must be positive and finite, got {c0}"));
    }
    let samples = 2000;
    let min = (0..=samples)
        .map(|k| g.convexity_margin(c0 * T::from_count(k) / T::from_count(samples)))
        .fold(T::infinity(), |m, v| m.min(v));
    Ok(min > T::zero())
}

/// [`convexity_condition`] up to the largest slope of `u`, the hypothesis under
/// which the rearranged competitor does not raise the energy.
pub fn rearrangement_applies<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, u: &GridFunction<T>) -> Result<bool> {
    let c0 = u.slopes().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if c0 == T::zero() {
        return Ok(true);
    }
    convexity_condition(g, c0)
}

/// Convexity condition at energy level `c^p`: `2Ġ + zG̈ > 0` on `[0, G⁻¹(c)]`,
/// the slope range `max|u′| ≤ G⁻¹(c)` of symmetric minimizers with `E ≤ c^p`.
/// `false` when `c` is outside the range of `G`.
pub fn energy_level_condition<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c: T) -> Result<bool> {
    if !(c > T::zero()) {
        return domain(format!("c must be positive, got {c}"));
    }
    match g.g_inv(c) {
        Ok(c0) => convexity_condition(g, c0),
        Err(_) => Ok(false),
    }
}
