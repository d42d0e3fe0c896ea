use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Nodal values `u_0..u_N` on the uniform grid `x_i = i/N` with `u_0 = u_N = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction<T> {
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    /// Wraps nodal values; the boundary values must vanish up to rounding and are
    /// then set to exactly zero.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.len() < 3 {
            return domain("a grid function needs at least two cells");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("grid values must be finite");
        }
        let scale = values.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::lit(1e-9) * scale;
        let n = values.len() - 1;
        if values[0].abs() > tol || values[n].abs() > tol {
            return domain(format!("boundary values must vanish, got {} and {}", values[0], values[n]));
        }
        values[0] = T::zero();
        values[n] = T::zero();
        Ok(GridFunction { values })
    }

    pub fn zeros(n: usize) -> Self {
        GridFunction { values: vec![T::zero(); n.max(2) + 1] }
    }

    /// Samples `f` at the nodes of an `n`-cell grid.
    pub fn from_fn<F: FnMut(T) -> T>(n: usize, mut f: F) -> Result<Self> {
        let nn = T::from_count(n);
        Self::new((0..=n).map(|i| f(T::from_count(i) / nn)).collect())
    }

    /// Number of cells `N`.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> T {
        T::one() / T::from_count(self.n())
    }

    pub fn x(&self, i: usize) -> T {
        T::from_count(i) / T::from_count(self.n())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }


    /// Midpoint slopes `d_{j+1/2} = (u_{j+1} − u_j)/h`, `j = 0..N−1`.
    pub fn slopes(&self) -> Vec<T> {
        let inv = T::from_count(self.n());
        self.values.windows(2).map(|w| (w[1] - w[0]) * inv).collect()
    }

    /// Second quotients at interior nodes (entry `i−1` holds node `i`).
    pub fn second_quotients(&self) -> Vec<T> {
        let nn = T::from_count(self.n());
        let inv = nn * nn;
        let two = T::lit(2.0);
        self.values.windows(3).map(|w| (w[2] - two * w[1] + w[0]) * inv).collect()
    }

    /// Mirror image `x ↦ u(1−x)`.
    pub fn reflected(&self) -> Self {
        GridFunction { values: self.values.iter().rev().copied().collect() }
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest nodal difference from `other` (same grid required).
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        if self.n() != other.n() {
            return domain("grid sizes differ");
        }
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }
}
