use serde::Serialize;

use crate::energy::{GridFunction, ShapeFunction};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// `c_p(G) = 2 lim_{s→∞} G(s)`, from `G(S)` plus a power-law tail estimate.
///
/// The decay exponent `a` of `Ġ(s) ~ s^{−a}` is read off between `S` and `2S`;
/// `a ≤ 2` means `id·Ġ` is not integrable and is reported as an assumption error.
pub fn c_p_of<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G) -> Result<T> {
    let two = T::lit(2.0);
    let mut s = T::lit(8.0);
    for _ in 0..40 {
        let d1 = g.g_dot(s);
        let d2 = g.g_dot(two * s);
        if !(d1 > T::zero()) || !(d2 > T::zero()) {
            // underflow: the tail is already negligible
            return Ok(two * g.g(s));
        }
        let a = -(d2 / d1).ln() / two.ln();
        if s >= T::lit(1e4) && a <= two + T::lit(1e-6) {
            return Err(Error::Assumption(format!(
                "Ġ decays like s^(-{a}), so id·Ġ is not integrable"
            )));
        }
        if a > T::one() {
            let tail = s * d1 / (a - T::one());
            if tail < T::lit(1e-10) {
                return Ok(two * (g.g(s) + tail));
            }
        }
        s = s * T::lit(4.0);
    }
    Err(Error::Assumption("G does not approach a finite limit".into()))
}

fn check_c<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c: T) -> Result<()> {
    if !(c > T::zero() && c < g.c_p()) {
        return domain(format!("c = {c} must lie in (0, c_p(G) = {})", g.c_p()));
    }
    Ok(())
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if !(x >= T::zero() && x <= T::one()) {
        return domain(format!("x = {x} is outside [0, 1]"));
    }
    Ok(())
}

/// `u_c′(x) = G⁻¹(c/2 − cx)`.
pub fn comparison_uc_slope<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c: T, x: T) -> Result<T> {
    check_c(g, c)?;
    check_x(x)?;
    g.g_inv(c / T::lit(2.0) - c * x)
}

/// `u_c(x) = (1/c)∫ sĠ(s) ds` between `G⁻¹(c/2−cx)` and `G⁻¹(c/2)`; `E(u_c) = c^p`.
pub fn comparison_uc<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c: T, x: T) -> Result<T> {
    check_c(g, c)?;
    check_x(x)?;
    let half = c / T::lit(2.0);
    let z0 = g.g_inv(half - c * x)?;
    let z1 = g.g_inv(half)?;
    Ok((g.tail_moment(z0) - g.tail_moment(z1)) / c)
}

/// `U_0 = lim_{c↑c_p} u_c`, i.e. `(1/c_p)∫_{|G⁻¹(c_p/2 − c_p x)|}^∞ sĠ`.
pub fn profile_u0<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, x: T) -> Result<T> {
    check_x(x)?;
    if x == T::zero() || x == T::one() {
        return Ok(T::zero());
    }
    let cp = g.c_p();
    let level = cp / T::lit(2.0) - cp * x;
    let z = match g.g_inv(level) {
        Ok(z) => z,
        // x within rounding of an endpoint
        Err(_) => return Ok(T::zero()),
    };
    Ok(g.tail_moment(z) / cp)
}

/// The clamped competitor `u_{δ,c}`: slope `u_c′(0)` on `[0,δ]` and `[1−δ,1]`,
/// `u_c′(0)δ + (1−2δ)u_c((x−δ)/(1−2δ))` in between.
pub fn clamped_test_function<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, c: T, delta: T, x: T) -> Result<T> {
    check_c(g, c)?;
    check_x(x)?;
    let half = T::lit(0.5);
    if !(delta > T::zero() && delta < half) {
        return domain(format!("delta = {delta} must lie in (0, 1/2)"));
    }
    let s0 = g.g_inv(c * half)?;
    if x <= delta {
        return Ok(s0 * x);
    }
    if x >= T::one() - delta {
        return Ok(s0 * (T::one() - x));
    }
    let w = T::one() - delta - delta;
    let y = ((x - delta) / w).max(T::zero()).min(T::one());
    Ok(s0 * delta + w * comparison_uc(g, c, y)?)
}

/// A graph resampled by arc length.
#[derive(Debug, Clone, Serialize)]
pub struct ArcLengthCurve<T> {
    /// Arc length at the interior nodes.
    pub s: Vec<T>,
    /// Curvature `u″/(1+u′²)^{3/2}` at the interior nodes.
    pub kappa: Vec<T>,
    /// Total length `s(1)`.
    pub length: T,
}

/// Cumulative arc length of the polygon through the nodes and the nodal curvature.
pub fn reparam_graph_to_arclength<T: Real>(u: &GridFunction<T>) -> ArcLengthCurve<T> {
    let h = u.h();
    let v = u.values();
    let two = T::lit(2.0);
    let mut nodes = Vec::with_capacity(v.len());
    let mut acc = T::zero();
    nodes.push(acc);
    for d in u.slopes() {
        acc += h * (T::one() + d * d).sqrt();
        nodes.push(acc);
    }
    let mut s = Vec::with_capacity(u.n() - 1);
    let mut kappa = Vec::with_capacity(u.n() - 1);
    for i in 1..u.n() {
        let du = (v[i + 1] - v[i - 1]) / (two * h);
        let ddu = (v[i + 1] - two * v[i] + v[i - 1]) / (h * h);
        s.push(nodes[i]);
        kappa.push(ddu / (T::one() + du * du).powf(T::lit(1.5)));
    }
    ArcLengthCurve { s, kappa, length: acc }
}
