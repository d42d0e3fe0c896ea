use serde::Serialize;

use super::conjugate;
use crate::error::{domain, Result};
use crate::gentrig::{beta, GenTrigParams};
use crate::scalar::Real;

/// The free p-elastica `Γ_λ = (X_λ, Y_λ)` on `[0, 2L_λ]`.
///
/// With `α = (p′)^{−1/p′}λ^{1/p}` and `S = sin_{2,2p′}(αs)`:
/// `Y_λ = (p′)^{1/p′}λ^{−1/p}S`, `X_λ′ = S^{p′}`, `k_λ = −(λp′)^{1/p}S^{1/(p−1)}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PElasticaCurve<T> {
    p: T,
    lambda: T,
    trig: GenTrigParams<T>,
    alpha: T,
    half_period: T,
    /// `∫₀¹ t^{p′}(1−t^{2p′})^{−1/2} dt`
    quarter_moment: T,
}

/// Uniform samples of a curve, as written to `curve.csv`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CurveSamples<T> {
    pub s: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub k: Vec<T>,
    pub theta: Vec<T>,
    pub tan_pw: Vec<T>,
}

impl<T: Real> PElasticaCurve<T> {
    pub fn new(p: T, lambda: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return domain(format!("p must exceed 1, got {p}"));
        }
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        let pc = conjugate(p);
        let trig = GenTrigParams::new(T::lit(2.0), pc + pc)?;
        let alpha = pc.powf(-pc.recip()) * lambda.powf(p.recip());
        let half_period = trig.half_pi() / alpha;
        let quarter_moment = trig.weighted_integral(|t| t.powf(pc), T::zero(), T::one());
        Ok(PElasticaCurve { p, lambda, trig, alpha, half_period, quarter_moment })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `L_λ = ½(p′)^{1/p′}λ^{−1/p}π_{2,2p′}`.
    pub fn half_period(&self) -> T {
        self.half_period
    }

    pub fn trig(&self) -> &GenTrigParams<T> {
        &self.trig
    }

    fn pc(&self) -> T {
        conjugate(self.p)
    }

    /// `ω_λ(s) = −(λp′)^{1/p′} sin_{2,2p′}(αs)`.
    pub fn omega(&self, s: T) -> T {
        let pc = self.pc();
        -(self.lambda * pc).powf(pc.recip()) * self.trig.sin(self.alpha * s)
    }

    /// `ω_λ′(s) = −λ cos_{2,2p′}(αs)`.
    pub fn omega_prime(&self, s: T) -> T {
        -self.lambda * self.trig.cos(self.alpha * s)
    }

    /// Signed curvature `k_λ = |ω|^{(2−p)/(p−1)}ω`.
    pub fn curvature(&self, s: T) -> T {
        let sn = self.trig.sin(self.alpha * s);
        let pc = self.pc();
        -(self.lambda * pc).powf(self.p.recip()) * sn.abs().powf((self.p - T::one()).recip()) * sn.signum()
    }

    fn check(&self, s: T) -> Result<T> {
        let end = self.half_period + self.half_period;
        let slack = T::lit(64.0) * T::epsilon() * end;
        if !(s >= -slack && s <= end + slack) {
            return domain(format!("s = {s} is outside [0, {end}]"));
        }
        Ok(s.max(T::zero()).min(end))
    }

    /// `(X, Y, X′, Y′)` at arc length `s ∈ [0, 2L_λ]`.
    pub fn frame(&self, s: T) -> Result<(T, T, T, T)> {
        let s = self.check(s)?;
        let pc = self.pc();
        let b = self.trig.branch(self.alpha * s);
        let sn = b.sin.max(T::zero());
        // ∫_S^1 t^{p′}(1−t^{2p′})^{−1/2} dt, taken from the top to stay accurate near S = 1
        let top = self.trig.weighted_integral_from_top(|t| t.powf(pc), b.gap);
        let x = if b.descending { self.quarter_moment + top } else { self.quarter_moment - top } / self.alpha;
        let y = pc.powf(pc.recip()) * self.lambda.powf(-self.p.recip()) * sn;
        Ok((x, y, sn.powf(pc), b.cos))
    }

    pub fn point(&self, s: T) -> Result<(T, T)> {
        self.frame(s).map(|(x, y, _, _)| (x, y))
    }

    /// `(X′, Y′)`.
    pub fn tangent(&self, s: T) -> Result<(T, T)> {
        let s = self.check(s)?;
        let (sn, cs) = self.trig.sin_cos(self.alpha * s);
        Ok((sn.max(T::zero()).powf(self.pc()), cs))
    }

    /// `(X″, Y″)` from differentiating the closed forms.
    pub fn second_derivatives(&self, s: T) -> Result<(T, T)> {
        let s = self.check(s)?;
        let pc = self.pc();
        let (sn, cs) = self.trig.sin_cos(self.alpha * s);
        let sn = sn.max(T::zero());
        let xpp = pc * sn.powf(pc - T::one()) * cs * self.alpha;
        let ypp = -self.alpha * pc * sn.powf(pc + pc - T::one());
        Ok((xpp, ypp))
    }

    /// Tangent angle `θ_λ`, decreasing from `π/2` to `−π/2`.
    pub fn theta(&self, s: T) -> Result<T> {
        let (xp, yp) = self.tangent(s)?;
        Ok(yp.atan2(xp))
    }

    /// Polar tangential angle `ϖ_λ`: the rotation taking `Γ/|Γ|` to `Γ′`.
    pub fn polar_tangential_angle(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return domain("the polar tangential angle needs s > 0");
        }
        let (x, y, xp, yp) = self.frame(s)?;
        Ok((x * yp - y * xp).atan2(x * xp + y * yp))
    }

    pub fn tan_polar_tangential(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return domain("the polar tangential angle needs s > 0");
        }
        let (x, y, xp, yp) = self.frame(s)?;
        Ok((x * yp - y * xp) / (x * xp + y * yp))
    }

    /// `n+1` equally spaced samples on `[0, 2L_λ]`.
    pub fn samples(&self, n: usize) -> Result<CurveSamples<T>> {
        if n == 0 {
            return domain("at least one sample interval is required");
        }
        let end = self.half_period + self.half_period;
        let mut out = CurveSamples::default();
        for i in 0..=n {
            let s = end * T::from_count(i) / T::from_count(n);
            let (x, y, xp, yp) = self.frame(s)?;
            out.s.push(s);
            out.x.push(x);
            out.y.push(y);
            out.k.push(self.curvature(s));
            out.theta.push(yp.atan2(xp));
            let tpw = if i == 0 { T::zero() } else { (x * yp - y * xp) / (x * xp + y * yp) };
            out.tan_pw.push(tpw);
        }
        Ok(out)
    }
}

pub fn omega_lambda<T: Real>(p: T, lambda: T, s: T) -> Result<T> {
    if lambda == T::zero() && p > T::one() {
        return Ok(T::zero());
    }
    Ok(PElasticaCurve::new(p, lambda)?.omega(s))
}

pub fn curvature_k<T: Real>(p: T, lambda: T, s: T) -> Result<T> {
    Ok(PElasticaCurve::new(p, lambda)?.curvature(s))
}

pub fn gamma<T: Real>(p: T, lambda: T, s: T) -> Result<(T, T)> {
    PElasticaCurve::new(p, lambda)?.point(s)
}

pub fn polar_tangential_tan<T: Real>(p: T, lambda: T, s: T) -> Result<T> {
    PElasticaCurve::new(p, lambda)?.tan_polar_tangential(s)
}

/// `(X_1(L_1), Y_1(L_1)) = (½(p′)^{−1+1/p′}B(1−1/(2p), ½), (p′)^{1/p′})`.
pub fn endpoint_constants<T: Real>(p: T) -> Result<(T, T)> {
    if !(p > T::one()) {
        return domain(format!("p must exceed 1, got {p}"));
    }
    let half = T::lit(0.5);
    let pc = conjugate(p);
    let x = half * pc.powf(-T::one() + pc.recip()) * beta(T::one() - half / p, half)?;
    Ok((x, pc.powf(pc.recip())))
}

/// Threshold height `h_* = p′/B(½, 1−1/(2p))`.
pub fn h_star<T: Real>(p: T) -> Result<T> {
    if !(p > T::one()) {
        return domain(format!("p must exceed 1, got {p}"));
    }
    let half = T::lit(0.5);
    Ok(conjugate(p) / beta(half, T::one() - half / p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_origin_pointing_up() {
        let c = PElasticaCurve::new(2.5f64, 3.0).unwrap();
        let (x, y, xp, yp) = c.frame(0.0).unwrap();
        assert_eq!((x, y), (0.0, 0.0));
        assert!(xp.abs() < 1e-15 && (yp - 1.0).abs() < 1e-15);
        assert_eq!(c.curvature(0.0), 0.0);
        assert!(c.point(2.0 * c.half_period() * 1.01).is_err());
        assert!(c.tan_polar_tangential(0.0).is_err());
    }

    #[test]
    fn circle_like_constants_at_p2() {
        let c = PElasticaCurve::new(2.0f64, 1.0).unwrap();
        let l = c.half_period();
        assert!((c.omega(l) + 2f64.sqrt()).abs() < 1e-12);
        assert!((c.curvature(l) + 2f64.sqrt()).abs() < 1e-12);
        let (x, y) = c.point(l).unwrap();
        let (xe, ye) = endpoint_constants(2.0).unwrap();
        assert!((x - xe).abs() < 1e-12 && (y - ye).abs() < 1e-12);
    }
}
