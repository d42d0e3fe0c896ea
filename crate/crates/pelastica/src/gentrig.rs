//! Generalized trigonometric functions `sin_{q,r}`, `cos_{q,r}`, the half-period
//! `π_{q,r}` and the beta function.
//!
//! `sin_{q,r}` is the inverse of `x ↦ ∫₀ˣ (1−t^r)^{−1/q} dt` on `[0, π_{q,r}/2]`,
//! extended by `sin(π−x) = sin x`, oddness and `2π_{q,r}`-periodicity.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::quad::{integrate_default, newton_bisect};
use crate::scalar::Real;

/// Beta function `B(x, y) = ∫₀¹ t^{x−1}(1−t)^{y−1} dt`.
///
/// Each half of the interval is mapped by `t = u^{1/x}` (resp. `1−t = v^{1/y}`)
/// so that the endpoint singularity disappears.
pub fn beta<T: Real>(x: T, y: T) -> Result<T> {
    if !(x > T::zero() && y > T::zero()) {
        return domain(format!("beta requires positive arguments, got ({x}, {y})"));
    }
    let half = T::lit(0.5);
    let part = |a: T, b: T| {
        let upper = half.powf(a);
        let ia = a.recip();
        integrate_default(|u: T| ((b - T::one()) * (-(u.powf(ia))).ln_1p()).exp(), T::zero(), upper) / a
    };
    Ok(part(x, y) + part(y, x))
}

/// Parameters `(q, r)` of the generalized sine, with the cached quarter period `π_{q,r}/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenTrigParams<T> {
    q: T,
    r: T,
    half_pi: T,
}

const TAIL: f64 = 1e-3;

impl<T: Real> GenTrigParams<T> {
    pub fn new(q: T, r: T) -> Result<Self> {
        if !(q > T::one()) || !q.is_finite() {
            return domain(format!("q must exceed 1, got {q}"));
        }
        if !(r > T::zero()) || !r.is_finite() {
            return domain(format!("r must be positive, got {r}"));
        }
        let mut params = GenTrigParams { q, r, half_pi: T::zero() };
        params.half_pi = params.weighted_integral(|_| T::one(), T::zero(), T::one());
        Ok(params)
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn r(&self) -> T {
        self.r
    }

    /// Conjugate exponent `q′ = q/(q−1)`.
    pub fn q_conj(&self) -> T {
        self.q / (self.q - T::one())
    }

    /// `π_{q,r}` as computed by quadrature.
    pub fn pi(&self) -> T {
        self.half_pi + self.half_pi
    }

    pub fn half_pi(&self) -> T {
        self.half_pi
    }

    /// Closed form `(2/r)·B(1/r, 1/q′)`, kept as an independent cross-check.
    pub fn pi_from_beta(&self) -> Result<T> {
        let two = T::lit(2.0);
        Ok(two / self.r * beta(self.r.recip(), self.q_conj().recip())?)
    }

    /// `(1 − t^r)^{−1/q}`, the derivative of `asin`.
    pub fn density(&self, t: T) -> T {
        (T::one() - t.powf(self.r)).powf(-self.q.recip())
    }

    /// Integrand after `t = 1 − τ^{q′}`: `q′ w(t) ρ^{−1/q}` with `1 − t^r = τ^{q′}ρ`.
    fn tail_integrand<W: Fn(T) -> T>(&self, w: &W, tau: T) -> T {
        let qc = self.q_conj();
        let v = tau.powf(qc);
        let rho = if v > T::zero() { -(self.r * (-v).ln_1p()).exp_m1() / v } else { self.r };
        qc * w(T::one() - v) * rho.powf(-self.q.recip())
    }

    /// `∫_lo^hi w(t)(1−t^r)^{−1/q} dt` for `0 ≤ lo ≤ hi ≤ 1` and smooth `w`.
    ///
    /// Beyond `1 − 10⁻³` the substitution `t = 1 − τ^{q′}` removes the singularity.
    pub fn weighted_integral<W: Fn(T) -> T>(&self, w: W, lo: T, hi: T) -> T {
        if hi < lo {
            return -self.weighted_integral(w, hi, lo);
        }
        let split = T::one() - T::lit(TAIL);
        let mut acc = T::zero();
        if lo < split {
            let top = hi.min(split);
            acc += integrate_default(|t| w(t) * self.density(t), lo, top);
        }
        if hi > split {
            let iqc = self.q_conj().recip();
            let bottom = lo.max(split);
            let t_lo = (T::one() - hi).max(T::zero()).powf(iqc);
            let t_hi = (T::one() - bottom).powf(iqc);
            acc += integrate_default(|tau| self.tail_integrand(&w, tau), t_lo, t_hi);
        }
        acc
    }

    /// `∫_{1−η}^1 w(t)(1−t^r)^{−1/q} dt`, accurate for tiny gaps `η`.
    pub fn weighted_integral_from_top<W: Fn(T) -> T>(&self, w: W, eta: T) -> T {
        if eta <= T::lit(TAIL) {
            let v = eta.max(T::zero()).powf(self.q_conj().recip());
            integrate_default(|tau| self.tail_integrand(&w, tau), T::zero(), v)
        } else {
            self.weighted_integral(w, T::one() - eta, T::one())
        }
    }

    /// `sin_{q,r}^{-1} x = ∫₀ˣ (1−t^r)^{−1/q} dt` for `x ∈ [0, 1]`.
    pub fn asin(&self, x: T) -> Result<T> {
        if !(x >= T::zero() && x <= T::one()) {
            return domain(format!("asin_gen needs x in [0, 1], got {x}"));
        }
        if x == T::one() {
            return Ok(self.half_pi);
        }
        Ok(self.weighted_integral(|_| T::one(), T::zero(), x))
    }

    /// Inverse of `asin` on `[0, π_{q,r}/2]`, returned as `(y, 1 − y)`.
    ///
    /// Close to the top the gap `1 − y` is solved for directly in the tail
    /// variable, so it keeps full relative precision.
    fn principal(&self, a: T) -> (T, T) {
        if a <= T::zero() {
            return (T::zero(), T::one());
        }
        if a >= self.half_pi {
            return (T::one(), T::zero());
        }
        let one = |_: T| T::one();
        let gap = self.half_pi - a;
        let tail = T::lit(TAIL);
        let v_max = tail.powf(self.q_conj().recip());
        if gap < self.weighted_integral_from_top(one, tail) {
            let mut v = T::zero();
            let mut fv = T::zero();
            let v = newton_bisect(
                |t| {
                    fv += integrate_default(|tau| self.tail_integrand(&one, tau), v, t);
                    v = t;
                    (fv - gap, self.tail_integrand(&one, t))
                },
                T::zero(),
                v_max,
                v_max * gap / self.weighted_integral_from_top(one, tail),
                T::zero(),
            );
            let eta = v.powf(self.q_conj());
            return (T::one() - eta, eta);
        }
        // Newton iterates share the running value of the integral.
        let mut y = T::zero();
        let mut fy = T::zero();
        let y = newton_bisect(
            |t| {
                fy += self.weighted_integral(one, y, t);
                y = t;
                (fy - a, self.density(t))
            },
            T::zero(),
            T::one() - tail,
            a / self.half_pi,
            T::lit(1e-15),
        );
        (y, T::one() - y)
    }

    /// Reduces `x` to `[0, π/2]`; returns (reduced, sign of sin, sign of cos).
    fn reduce(&self, x: T) -> (T, T, T) {
        let pi = self.pi();
        let period = pi + pi;
        let mut t = x - period * (x / period).round();
        let sign = if t < T::zero() { -T::one() } else { T::one() };
        t = t.abs();
        if t > self.half_pi {
            (pi - t, sign, -T::one())
        } else {
            (t, sign, T::one())
        }
    }

    pub fn sin(&self, x: T) -> T {
        self.sin_cos(x).0
    }

    /// Derivative of `sin`, via `|cos|^q + |sin|^r = 1`.
    pub fn cos(&self, x: T) -> T {
        self.sin_cos(x).1
    }

    pub fn sin_cos(&self, x: T) -> (T, T) {
        let b = self.branch(x);
        (b.sin, b.cos)
    }

    /// Full evaluation at `x`, including the gap `1 − |sin x|`.
    pub fn branch(&self, x: T) -> Branch<T> {
        let (t, s, c) = self.reduce(x);
        let (y, eta) = self.principal(t);
        let one_minus = -(self.r * (-eta).ln_1p()).exp_m1();
        let cos = c * one_minus.max(T::zero()).powf(self.q.recip());
        Branch { sin: s * y, cos, gap: eta, descending: c < T::zero() }
    }
}

/// `sin` and `cos` at a point together with the gap `1 − |sin|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch<T> {
    pub sin: T,
    pub cos: T,
    pub gap: T,
    /// The reduced argument lies past the quarter period (`cos ≤ 0` there).
    pub descending: bool,
}

pub fn asin_gen<T: Real>(params: &GenTrigParams<T>, x: T) -> Result<T> {
    params.asin(x)
}

pub fn pi_gen<T: Real>(params: &GenTrigParams<T>) -> T {
    params.pi()
}

pub fn sin_gen<T: Real>(params: &GenTrigParams<T>, x: T) -> T {
    params.sin(x)
}

pub fn cos_gen<T: Real>(params: &GenTrigParams<T>, x: T) -> T {
    params.cos(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_case() {
        let p = GenTrigParams::new(2.0, 2.0).unwrap();
        assert!((p.pi() - std::f64::consts::PI).abs() < 1e-13);
        for &x in &[0.1, 0.7, 1.5, 2.9, -4.0, 10.0] {
            assert!((p.sin(x) - x.sin()).abs() < 1e-13, "{x}");
            assert!((p.cos(x) - x.cos()).abs() < 1e-12, "{x}");
        }
        assert!((p.asin(0.5).unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GenTrigParams::new(1.0, 2.0).is_err());
        assert!(GenTrigParams::new(2.0, 0.0).is_err());
        let p = GenTrigParams::new(2.0, 4.0).unwrap();
        assert!(p.asin(1.1).is_err());
        assert!(beta(0.0, 1.0).is_err());
    }

    #[test]
    fn beta_half_half_is_pi() {
        let b: f64 = beta(0.5, 0.5).unwrap();
        assert!((b - std::f64::consts::PI).abs() < 1e-12);
        assert!((beta(1.0f64, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision() {
        let p = GenTrigParams::new(2.0f32, 4.0).unwrap();
        let (s, c) = p.sin_cos(0.7);
        assert!((c * c + s.powi(4) - 1.0).abs() < 1e-5);
        assert!((p.pi() - 2.622_057_5).abs() < 1e-5);
    }
}
