//! Shape functions `G`, grid functions, and the discrete energy `E(u) = ∫|G(u′)′|^p`.
//!
//! The energy is discretized through midpoint slopes `d_{j+1/2}` and the nodal
//! quotient `z_i = (G(d_{i+1/2}) − G(d_{i−1/2}))/h`, so that
//! `E_h(u) = h Σ_{i=1}^{N−1} |z_i|^p`.

mod grid;
mod shape;

pub use grid::GridFunction;
pub use shape::{eu_p, eu_p_inverse, AlgebraicSigmoid, EuP, ShapeFunction};

use crate::scalar::Real;

/// `|z|^p`, or its smoothed form `(z²+ε²)^{p/2} − ε^p` when `eps > 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Integrand<T> {
    pub p: T,
    pub eps: T,
}

impl<T: Real> Integrand<T> {
    pub fn exact(p: T) -> Self {
        Integrand { p, eps: T::zero() }
    }

    pub fn phi(&self, z: T) -> T {
        if self.eps > T::zero() {
            (z * z + self.eps * self.eps).powf(self.p / T::lit(2.0)) - self.eps.powf(self.p)
        } else {
            z.abs().powf(self.p)
        }
    }

    pub fn dphi(&self, z: T) -> T {
        if self.eps > T::zero() {
            self.p * z * (z * z + self.eps * self.eps).powf(self.p / T::lit(2.0) - T::one())
        } else if z == T::zero() {
            T::zero()
        } else {
            self.p * z.abs().powf(self.p - T::one()) * z.signum()
        }
    }

    pub fn ddphi(&self, z: T) -> T {
        let two = T::lit(2.0);
        let e2 = self.eps * self.eps;
        let s = z * z + e2;
        if s == T::zero() {
            return if self.p > two { T::zero() } else { T::infinity() };
        }
        self.p * s.powf(self.p / two - two) * ((self.p - T::one()) * z * z + e2)
    }
}

/// Midpoint slopes and nodal quotients `z_i` (entry `i−1` holds node `i`).
pub(crate) fn slopes_and_quotients<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, u: &GridFunction<T>) -> (Vec<T>, Vec<T>) {
    let d = u.slopes();
    let h = u.h();
    let z = d.windows(2).map(|w| g.delta(w[0], w[1]) / h).collect();
    (d, z)
}

pub(crate) fn energy_with<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, f: &Integrand<T>, u: &GridFunction<T>) -> T {
    let (_, z) = slopes_and_quotients(g, u);
    u.h() * z.iter().map(|&zi| f.phi(zi)).sum::<T>()
}

pub(crate) fn gradient_with<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, f: &Integrand<T>, u: &GridFunction<T>) -> Vec<T> {
    let n = u.n();
    let h = u.h();
    let (d, z) = slopes_and_quotients(g, u);
    let dphi: Vec<T> = z.iter().map(|&zi| f.dphi(zi)).collect();
    // ∂E/∂d_{j+1/2} = Ġ(d_{j+1/2})·(φ′(z_j) − φ′(z_{j+1})), with z_0 = z_N absent
    let at = |i: usize| if i >= 1 && i < n { dphi[i - 1] } else { T::zero() };
    let big_d: Vec<T> = (0..n).map(|j| g.g_dot(d[j]) * (at(j) - at(j + 1))).collect();
    let mut grad = vec![T::zero(); n + 1];
    for k in 1..n {
        grad[k] = (big_d[k - 1] - big_d[k]) / h;
    }
    grad
}

/// Discrete energy `h Σ |z_i|^p`.
pub fn energy_discrete<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> T {
    energy_with(g, &Integrand::exact(p), u)
}

/// Discrete energy with `|z|^p` replaced by `(z²+ε²)^{p/2} − ε^p`.
pub fn energy_smoothed<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, eps: T, u: &GridFunction<T>) -> T {
    energy_with(g, &Integrand { p, eps }, u)
}

/// Exact gradient of [`energy_discrete`] with respect to the nodal values.
///
/// The returned vector has length `N+1`; the boundary entries are zero since
/// `u_0` and `u_N` are fixed.
pub fn gradient_discrete<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> Vec<T> {
    gradient_with(g, &Integrand::exact(p), u)
}

/// Gradient of [`energy_smoothed`].
pub fn gradient_smoothed<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, eps: T, u: &GridFunction<T>) -> Vec<T> {
    gradient_with(g, &Integrand { p, eps }, u)
}

/// Curvature form `h Σ |κ_i|^p √(1+u′_i²)` with `κ = u″/(1+u′²)^{3/2}`.
pub fn energy_curvature_form<T: Real>(p: T, u: &GridFunction<T>) -> T {
    let v = u.values();
    let h = u.h();
    let two = T::lit(2.0);
    let mut acc = T::zero();
    for i in 1..u.n() {
        let du = (v[i + 1] - v[i - 1]) / (two * h);
        let ddu = (v[i + 1] - two * v[i] + v[i - 1]) / (h * h);
        let s = T::one() + du * du;
        let kappa = ddu / s.powf(T::lit(1.5));
        acc += kappa.abs().powf(p) * s.sqrt();
    }
    acc * h
}

/// Euler's substitution `w = −pĠ(u′)^{p−1}|u″|^{p−2}u″` at the nodes.
///
/// In the discrete scheme `Ġ(u′)u″` is the quotient `z_i`, so `w_i = −p|z_i|^{p−2}z_i`.
/// The result has length `N+1`; the boundary entries are the zero closure used by
/// the discrete energy, not extrapolations.
pub fn euler_substitution<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> Vec<T> {
    let (_, z) = slopes_and_quotients(g, u);
    let f = Integrand::exact(p);
    let mut w = vec![T::zero(); u.n() + 1];
    for (i, zi) in z.iter().enumerate() {
        w[i + 1] = -f.dphi(*zi);
    }
    w
}
