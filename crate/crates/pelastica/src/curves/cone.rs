use serde::Serialize;

use super::conjugate;
use super::elastica::{h_star, PElasticaCurve};
use crate::energy::GridFunction;
use crate::error::{domain, Error, Result};
use crate::quad::newton_bisect;
use crate::scalar::Real;

/// Exact minimizer over symmetric functions for the cone with tip `(1/2, h)`.
///
/// The left half is `γ_u(s) = R_{−π/2+θ_u} Γ_{λ_u}(s)`, `s ∈ [0, λ_u^{−1/p}s*]`,
/// where `s*` solves `tan(−ϖ_1(s*)) = 2h`.
#[derive(Debug, Clone, Serialize)]
pub struct ConeMinimizer<T> {
    pub p: T,
    pub h: T,
    pub s_star: T,
    pub theta_u: T,
    pub lambda_u: T,
    pub energy: T,
    #[serde(skip)]
    curve: PElasticaCurve<T>,
}

/// Builds the exact minimizer; `h ≥ h_*(p)` has none.
pub fn exact_cone_minimizer<T: Real>(p: T, h: T) -> Result<ConeMinimizer<T>> {
    if !(h > T::zero()) {
        return domain(format!("cone height must be positive, got {h}"));
    }
    let hs = h_star(p)?;
    if h >= hs {
        return Err(Error::Threshold { h: h.as_f64(), h_star: hs.as_f64() });
    }
    let curve = PElasticaCurve::new(p, T::one())?;
    let target = (h + h).atan();
    let (mut lo, mut hi) = (T::zero(), curve.half_period());
    let tol = T::lit(1e-13).max(T::lit(8.0) * T::epsilon());
    while hi - lo > tol * hi {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // −ϖ_1 increases on (0, L_1)
        if -curve.polar_tangential_angle(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_star = T::lit(0.5) * (lo + hi);
    let (x, y, xp, yp) = curve.frame(s_star)?;
    let theta_u = T::FRAC_PI_2() - yp.atan2(xp);
    let quarter = T::lit(0.25);
    let lambda_u = ((x * x + y * y).sqrt() / (quarter + h * h).sqrt()).powf(p);
    let energy = T::lit(2.0) * lambda_u * conjugate(p) * lambda_u.powf(-p.recip()) * x;
    Ok(ConeMinimizer { p, h, s_star, theta_u, lambda_u, energy, curve })
}

impl<T: Real> ConeMinimizer<T> {
    fn scale(&self) -> T {
        self.lambda_u.powf(-self.p.recip())
    }

    /// Point `(x, y)` of the left half at parameter `σ ∈ [0, s*]` of `Γ_1`,
    /// with `dx/dσ`.
    fn at(&self, sigma: T) -> Result<(T, T, T)> {
        let (x, y, xp, yp) = self.curve.frame(sigma)?;
        let (sb, cb) = (self.theta_u - T::FRAC_PI_2()).sin_cos();
        let k = self.scale();
        Ok((k * (cb * x - sb * y), k * (sb * x + cb * y), k * (cb * xp - sb * yp)))
    }

    /// Parameter `σ` of `Γ_1` at which the left half reaches abscissa `x ≤ 1/2`.
    fn sigma_at(&self, x: T, lo: T) -> Result<T> {
        let mut err = None;
        let s = newton_bisect(
            |sig| match self.at(sig) {
                Ok((px, _, dx)) => (px - x, dx),
                Err(e) => {
                    err = Some(e);
                    (T::zero(), T::one())
                }
            },
            lo,
            self.s_star,
            lo,
            T::lit(1e-15),
        );
        match err {
            Some(e) => Err(e),
            None => Ok(s),
        }
    }

    /// `u(x)` for `x ∈ [0, 1]`.
    pub fn value(&self, x: T) -> Result<T> {
        if !(x >= T::zero() && x <= T::one()) {
            return domain(format!("x = {x} is outside [0, 1]"));
        }
        let half = T::lit(0.5);
        let xl = if x > half { T::one() - x } else { x };
        if xl == T::zero() {
            return Ok(T::zero());
        }
        if xl == half {
            return Ok(self.h);
        }
        let s = self.sigma_at(xl, T::zero())?;
        Ok(self.at(s)?.1)
    }

    /// Samples `u` on an `n`-cell grid (`n` even keeps the tip on a node).
    pub fn sample(&self, n: usize) -> Result<GridFunction<T>> {
        let nn = T::from_count(n);
        let half = T::lit(0.5);
        let mut vals = vec![T::zero(); n + 1];
        let mut lo = T::zero();
        for i in 1..n {
            let x = T::from_count(i) / nn;
            if x > half {
                break;
            }
            if x == half {
                vals[i] = self.h;
                continue;
            }
            let s = self.sigma_at(x, lo)?;
            lo = s;
            vals[i] = self.at(s)?.1;
        }
        for i in 0..=n {
            if T::from_count(i) / nn > half {
                vals[i] = vals[n - i];
            }
        }
        GridFunction::new(vals)
    }

    /// Arc length from `x = 0` to `x ≤ 1/2` along the graph.
    pub fn arc_length_at(&self, x: T) -> Result<T> {
        Ok(self.scale() * self.sigma_at(x, T::zero())?)
    }

    /// Curvature `k_{λ_u}` at abscissa `x ≤ 1/2`.
    pub fn curvature_at(&self, x: T) -> Result<T> {
        let s = self.sigma_at(x, T::zero())?;
        Ok(self.lambda_u.powf(self.p.recip()) * self.curve.curvature(s))
    }
}
