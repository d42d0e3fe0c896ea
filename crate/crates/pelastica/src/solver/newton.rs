//! Banded Hessian model and its `LDLᵀ` solve.

use crate::energy::{slopes_and_quotients, GridFunction, Integrand, ShapeFunction};
use crate::scalar::Real;

/// Symmetric pentadiagonal matrix over the interior nodes; row `r` is node `r+1`.
#[derive(Debug, Clone)]
pub(crate) struct Banded<T> {
    pub d0: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

impl<T: Real> Banded<T> {
    fn zeros(m: usize) -> Self {
        Banded { d0: vec![T::zero(); m], d1: vec![T::zero(); m], d2: vec![T::zero(); m] }
    }

    fn add(&mut self, r: usize, c: usize, v: T) {
        match c - r {
            0 => self.d0[r] += v,
            1 => self.d1[r] += v,
            _ => self.d2[r] += v,
        }
    }

    /// Removes every coupling of row `r`, keeping its diagonal.
    pub fn decouple(&mut self, r: usize) {
        self.d1[r] = T::zero();
        self.d2[r] = T::zero();
        if r >= 1 {
            self.d1[r - 1] = T::zero();
        }
        if r >= 2 {
            self.d2[r - 2] = T::zero();
        }
    }

    /// `max_i Σ_j |A_ij|`.
    pub fn max_row_sum(&self) -> T {
        let m = self.d0.len();
        let off = |v: &Vec<T>, i: usize| if i < m { v[i].abs() } else { T::zero() };
        (0..m).fold(T::zero(), |acc, i| {
            let mut r = self.d0[i].abs() + off(&self.d1, i) + off(&self.d2, i);
            if i >= 1 {
                r += self.d1[i - 1].abs();
            }
            if i >= 2 {
                r += self.d2[i - 2].abs();
            }
            acc.max(r)
        })
    }

    pub fn max_diag(&self) -> T {
        self.d0.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    /// Solves `(A + τI)x = b`; `None` when a pivot is not positive.
    pub fn solve(&self, tau: T, b: &[T]) -> Option<Vec<T>> {
        let m = self.d0.len();
        let mut dd = vec![T::zero(); m];
        let mut l1 = vec![T::zero(); m];
        let mut l2 = vec![T::zero(); m];
        for i in 0..m {
            if i >= 2 {
                l2[i] = self.d2[i - 2] / dd[i - 2];
            }
            if i >= 1 {
                let mut a = self.d1[i - 1];
                if i >= 2 {
                    a -= l2[i] * l1[i - 1] * dd[i - 2];
                }
                l1[i] = a / dd[i - 1];
            }
            let mut d = self.d0[i] + tau;
            if i >= 1 {
                d -= l1[i] * l1[i] * dd[i - 1];
            }
            if i >= 2 {
                d -= l2[i] * l2[i] * dd[i - 2];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            dd[i] = d;
        }
        let mut y = b.to_vec();
        for i in 0..m {
            if i >= 1 {
                let t = l1[i] * y[i - 1];
                y[i] -= t;
            }
            if i >= 2 {
                let t = l2[i] * y[i - 2];
                y[i] -= t;
            }
        }
        for i in 0..m {
            y[i] /= dd[i];
        }
        for i in (0..m).rev() {
            if i + 1 < m {
                let t = l1[i + 1] * y[i + 1];
                y[i] -= t;
            }
            if i + 2 < m {
                let t = l2[i + 2] * y[i + 2];
                y[i] -= t;
            }
        }
        Some(y)
    }
}

/// Hessian of `h Σ φ(z_i)` with respect to the interior nodal values.
///
/// The Gauss–Newton part `h Σ φ″(z_i)∇z_i∇z_iᵀ` plus the curvature term
/// `G̈(d_j)(φ′(z_j) − φ′(z_{j+1}))` of each midpoint slope; the latter may be
/// indefinite, which the solve handles by a diagonal shift.
pub(crate) fn hessian_model<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    f: &Integrand<T>,
    u: &GridFunction<T>,
) -> Banded<T> {
    let n = u.n();
    let h = u.h();
    let h2 = h * h;
    let (d, z) = slopes_and_quotients(g, u);
    let a: Vec<T> = d.iter().map(|&dj| g.g_dot(dj)).collect();
    let dphi: Vec<T> = z.iter().map(|&zi| f.dphi(zi)).collect();
    let mut band = Banded::zeros(n - 1);
    let interior = |k: usize| k >= 1 && k < n;
    for i in 1..n {
        let w = f.ddphi(z[i - 1]) / (h2 * h);
        if !(w > T::zero()) || !w.is_finite() {
            continue;
        }
        let row = [(i - 1, a[i - 1]), (i, -(a[i - 1] + a[i])), (i + 1, a[i])];
        for (ka, &(na, ja)) in row.iter().enumerate() {
            if !interior(na) {
                continue;
            }
            for &(nb, jb) in row.iter().skip(ka) {
                if interior(nb) {
                    band.add(na - 1, nb - 1, w * ja * jb);
                }
            }
        }
    }
    let at = |i: usize| if interior(i) { dphi[i - 1] } else { T::zero() };
    for j in 0..n {
        let c = (g.g_ddot(d[j]) * (at(j) - at(j + 1))) / h2;
        if c == T::zero() || !c.is_finite() {
            continue;
        }
        if interior(j) {
            band.add(j - 1, j - 1, c);
        }
        if interior(j + 1) {
            band.add(j, j, c);
        }
        if interior(j) && interior(j + 1) {
            band.add(j - 1, j, -c);
        }
    }
    band
}
