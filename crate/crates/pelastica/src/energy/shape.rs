use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gentrig::beta;
use crate::quad::{gauss7, integrate_default, newton_bisect};
use crate::scalar::Real;

/// Profile `G` of the generalized functional `∫|G(u′)′|^p`.
///
/// Implementors must be odd with `Ġ > 0` and `id·Ġ ∈ L¹(ℝ)`; then `G` is bounded
/// and `c_p(G) = 2 lim_{s→∞} G(s)` is finite.
pub trait ShapeFunction<T: Real>: Send + Sync {
    fn g(&self, z: T) -> T;
    fn g_dot(&self, z: T) -> T;
    fn g_ddot(&self, z: T) -> T;

    /// `c_p(G) = 2 sup G`.
    fn c_p(&self) -> T;

    /// `Some(p)` when `G = EU_p`.
    fn eu_exponent(&self) -> Option<T> {
        None
    }

    /// Inverse on `(−c_p/2, c_p/2)`.
    fn g_inv(&self, y: T) -> Result<T> {
        let half = self.c_p() / T::lit(2.0);
        if !(y.abs() < half) {
            return domain(format!("{y} is outside the range of G, (−{half}, {half})"));
        }
        if y == T::zero() {
            return Ok(T::zero());
        }
        let target = y.abs();
        let mut hi = T::one();
        let mut k = 0;
        while self.g(hi) < target {
            hi = hi * T::lit(2.0);
            k += 1;
            if k > 400 || !hi.is_finite() {
                return domain(format!("cannot bracket the preimage of {y}"));
            }
        }
        let z = newton_bisect(|z| (self.g(z) - target, self.g_dot(z)), T::zero(), hi, hi / T::lit(2.0), T::zero());
        Ok(z * y.signum())
    }

    /// `G(b) − G(a) = ∫_a^b Ġ`, by a 7-point Gauss rule on short panels.
    fn delta(&self, a: T, b: T) -> T {
        if a == b {
            return T::zero();
        }
        let width = if a.signum() == b.signum() { a.abs().min(b.abs()).max(T::one()) } else { T::one() };
        let panels = ((b - a).abs() / (T::lit(0.25) * width)).ceil().to_usize().unwrap_or(1).max(1);
        gauss7(|s| self.g_dot(s), a, b, panels)
    }

    /// `∫_z^∞ sĠ(s) ds`; even in `z` because `sĠ` is odd.
    fn tail_moment(&self, z: T) -> T {
        let z = z.abs();
        integrate_default(
            |t: T| {
                let om = T::one() - t;
                if om <= T::zero() {
                    return T::zero();
                }
                let s = z + t / om;
                let v = s * self.g_dot(s) / (om * om);
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            },
            T::zero(),
            T::one(),
        )
    }

    /// `2Ġ(z) + zG̈(z)`.
    fn convexity_margin(&self, z: T) -> T {
        T::lit(2.0) * self.g_dot(z) + z * self.g_ddot(z)
    }
}

impl<T: Real, S: ShapeFunction<T> + ?Sized> ShapeFunction<T> for &S {
    fn g(&self, z: T) -> T {
        (**self).g(z)
    }
    fn g_dot(&self, z: T) -> T {
        (**self).g_dot(z)
    }
    fn g_ddot(&self, z: T) -> T {
        (**self).g_ddot(z)
    }
    fn c_p(&self) -> T {
        (**self).c_p()
    }
    fn eu_exponent(&self) -> Option<T> {
        (**self).eu_exponent()
    }
    fn g_inv(&self, y: T) -> Result<T> {
        (**self).g_inv(y)
    }
    fn delta(&self, a: T, b: T) -> T {
        (**self).delta(a, b)
    }
    fn tail_moment(&self, z: T) -> T {
        (**self).tail_moment(z)
    }
    fn convexity_margin(&self, z: T) -> T {
        (**self).convexity_margin(z)
    }
}

/// `EU_p(z) = ∫₀^z (1+s²)^{−(3/2−1/(2p))} ds`, the profile for which `∫|G(u′)′|^p`
/// is the p-elastic energy of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuP<T> {
    p: T,
    a: T,
    c_p: T,
}

impl<T: Real> EuP<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return domain(format!("p must exceed 1, got {p}"));
        }
        let half = T::lit(0.5);
        let a = T::lit(1.5) - half / p;
        let c_p = beta(half, T::one() - half / p)?;
        Ok(EuP { p, a, c_p })
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// Exponent of `cos φ` after substituting `s = tan φ`.
    fn cos_exponent(&self) -> T {
        T::one() - self.p.recip()
    }

    /// `EU_p(tan φ) = ∫₀^φ cos^{1−1/p}`.
    pub fn angle_integral(&self, lo: T, hi: T) -> T {
        let b = self.cos_exponent();
        integrate_default(|t: T| t.cos().max(T::zero()).powf(b), lo, hi)
    }

    /// The angle `φ ∈ [0, π/2)` with `EU_p(tan φ) = y`, for `0 ≤ y < c_p/2`.
    pub fn inverse_angle(&self, y: T) -> Result<T> {
        let half = self.c_p / T::lit(2.0);
        if !(y >= T::zero() && y < half) {
            return domain(format!("{y} is outside [0, {half})"));
        }
        let b = self.cos_exponent();
        let mut at = T::zero();
        let mut val = T::zero();
        Ok(newton_bisect(
            |phi| {
                val += self.angle_integral(at, phi);
                at = phi;
                (val - y, phi.cos().powf(b))
            },
            T::zero(),
            T::FRAC_PI_2(),
            y,
            T::zero(),
        ))
    }
}

impl<T: Real> ShapeFunction<T> for EuP<T> {
    fn g(&self, z: T) -> T {
        self.angle_integral(T::zero(), z.abs().atan()) * z.signum()
    }

    fn g_dot(&self, z: T) -> T {
        (T::one() + z * z).powf(-self.a)
    }

    fn g_ddot(&self, z: T) -> T {
        -T::lit(2.0) * self.a * z * (T::one() + z * z).powf(-self.a - T::one())
    }

    fn c_p(&self) -> T {
        self.c_p
    }

    fn eu_exponent(&self) -> Option<T> {
        Some(self.p)
    }

    fn g_inv(&self, y: T) -> Result<T> {
        Ok(self.inverse_angle(y.abs())?.tan() * y.signum())
    }

    /// Closed form `p′(1+z²)^{−(1/2−1/(2p))}`.
    fn tail_moment(&self, z: T) -> T {
        let pc = self.p / (self.p - T::one());
        pc * (T::one() + z * z).powf(T::one() - self.a)
    }

    /// Factored form `2(1+z²)^{−a−1}(1 + (1−a)z²)`.
    fn convexity_margin(&self, z: T) -> T {
        let s = T::one() + z * z;
        T::lit(2.0) * s.powf(-self.a - T::one()) * (T::one() + (T::one() - self.a) * z * z)
    }
}

/// `G(z) = z/√(1+z²)`: bounded with `c_p = 2` and `Ġ = (1+z²)^{−3/2}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AlgebraicSigmoid;

impl<T: Real> ShapeFunction<T> for AlgebraicSigmoid {
    fn g(&self, z: T) -> T {
        z / (T::one() + z * z).sqrt()
    }

    fn g_dot(&self, z: T) -> T {
        (T::one() + z * z).powf(T::lit(-1.5))
    }

    fn g_ddot(&self, z: T) -> T {
        -T::lit(3.0) * z * (T::one() + z * z).powf(T::lit(-2.5))
    }

    fn c_p(&self) -> T {
        T::lit(2.0)
    }

    fn g_inv(&self, y: T) -> Result<T> {
        if !(y.abs() < T::one()) {
            return Err(Error::Domain(format!("{y} is outside (−1, 1)")));
        }
        Ok(y / (T::one() - y * y).sqrt())
    }

    fn tail_moment(&self, z: T) -> T {
        (T::one() + z * z).sqrt().recip()
    }
}

pub fn eu_p<T: Real>(p: T, z: T) -> Result<T> {
    Ok(EuP::new(p)?.g(z))
}

pub fn eu_p_inverse<T: Real>(p: T, y: T) -> Result<T> {
    EuP::new(p)?.g_inv(y)
}
