use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Shape of an obstacle.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstacleKind<T> {
    /// Affine on `[0, θ]` and `[θ, 1]` with tip value `height`.
    Cone { theta: T, left: T, right: T, height: T },
    /// Cone with tip at `1/2` and equal endpoint values.
    SymmetricCone { height: T, endpoint: T },
    /// Values on a uniform grid of `[0, 1]`, linearly interpolated.
    Sampled { values: Vec<T> },
}

/// Obstacle `ψ ∈ C⁰([0,1])` with `ψ(0), ψ(1) < 0 < max ψ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Obstacle<T> {
    kind: ObstacleKind<T>,
}

impl<T: Real> Obstacle<T> {
    pub fn cone(theta: T, left: T, right: T, height: T) -> Result<Self> {
        if !(theta > T::zero() && theta < T::one()) {
            return domain(format!("cone tip θ = {theta} must lie in (0, 1)"));
        }
        Self::validated(ObstacleKind::Cone { theta, left, right, height })
    }

    pub fn symmetric_cone(height: T, endpoint: T) -> Result<Self> {
        Self::validated(ObstacleKind::SymmetricCone { height, endpoint })
    }

    /// Obstacle through `values[k]` at `x = k/(len−1)`.
    pub fn sampled(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return domain("a sampled obstacle needs at least two values");
        }
        Self::validated(ObstacleKind::Sampled { values })
    }

    fn validated(kind: ObstacleKind<T>) -> Result<Self> {
        let o = Obstacle { kind };
        let (a, b, top) = (o.eval(T::zero()), o.eval(T::one()), o.max_value());
        if !(a.is_finite() && b.is_finite() && top.is_finite()) {
            return domain("obstacle values must be finite");
        }
        if let ObstacleKind::Sampled { values } = &o.kind {
            if values.iter().any(|v| !v.is_finite()) {
                return domain("obstacle values must be finite");
            }
        }
        if !(a < T::zero() && b < T::zero()) {
            return Err(Error::Assumption(format!("need ψ(0), ψ(1) < 0, got {a} and {b}")));
        }
        if !(top > T::zero()) {
            return Err(Error::Assumption(format!("need max ψ > 0, got {top}")));
        }
        Ok(o)
    }

    pub fn kind(&self) -> &ObstacleKind<T> {
        &self.kind
    }

    /// `ψ(x)`; arguments outside `[0, 1]` are clamped.
    pub fn eval(&self, x: T) -> T {
        let x = x.max(T::zero()).min(T::one());
        let affine = |x0: T, y0: T, x1: T, y1: T, x: T| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        match &self.kind {
            ObstacleKind::Cone { theta, left, right, height } => {
                if x <= *theta {
                    affine(T::zero(), *left, *theta, *height, x)
                } else {
                    affine(*theta, *height, T::one(), *right, x)
                }
            }
            ObstacleKind::SymmetricCone { height, endpoint } => {
                let half = T::lit(0.5);
                let d = (x - half).abs();
                *height + (*endpoint - *height) * d / half
            }
            ObstacleKind::Sampled { values } => {
                let m = values.len() - 1;
                let t = x * T::from_count(m);
                let k = t.floor().to_usize().unwrap_or(0).min(m - 1);
                let frac = t - T::from_count(k);
                values[k] + (values[k + 1] - values[k]) * frac
            }
        }
    }

    /// `ψ(x_i)` at the nodes of an `n`-cell grid.
    pub fn nodal(&self, n: usize) -> Vec<T> {
        let nn = T::from_count(n);
        (0..=n).map(|i| self.eval(T::from_count(i) / nn)).collect()
    }

    pub fn max_value(&self) -> T {
        match &self.kind {
            ObstacleKind::Cone { left, right, height, .. } => height.max(*left).max(*right),
            ObstacleKind::SymmetricCone { height, endpoint } => height.max(*endpoint),
            ObstacleKind::Sampled { values } => values.iter().fold(T::neg_infinity(), |m, &v| m.max(v)),
        }
    }

    /// Tip height when `ψ = ψ(1 − ·)` is a cone with tip at `1/2`.
    pub fn symmetric_cone_height(&self) -> Option<T> {
        match &self.kind {
            ObstacleKind::SymmetricCone { height, .. } => Some(*height),
            ObstacleKind::Cone { theta, left, right, height } if *theta == T::lit(0.5) && left == right => Some(*height),
            _ => None,
        }
    }

    /// Tip abscissa for cone obstacles.
    pub fn tip(&self) -> Option<T> {
        match &self.kind {
            ObstacleKind::Cone { theta, .. } => Some(*theta),
            ObstacleKind::SymmetricCone { .. } => Some(T::lit(0.5)),
            ObstacleKind::Sampled { .. } => None,
        }
    }

    /// Whether `ψ(x) = ψ(1 − x)`.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            ObstacleKind::SymmetricCone { .. } => true,
            ObstacleKind::Cone { .. } => self.symmetric_cone_height().is_some(),
            ObstacleKind::Sampled { values } => values.iter().zip(values.iter().rev()).all(|(a, b)| a == b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_values() {
        let o = Obstacle::<f64>::cone(0.25, -0.5, -1.0, 0.5).unwrap();
        assert_eq!(o.eval(0.25), 0.5);
        assert_eq!(o.eval(0.0), -0.5);
        assert!((o.eval(0.625) + 0.25).abs() < 1e-15);
        let s = Obstacle::<f64>::symmetric_cone(0.4, -0.2).unwrap();
        assert!((s.eval(0.25) - 0.1).abs() < 1e-15);
        assert_eq!(s.symmetric_cone_height(), Some(0.4));
        assert!(s.is_symmetric());
    }

    #[test]
    fn assumption_checks() {
        assert!(matches!(Obstacle::symmetric_cone(-0.1, -1.0), Err(Error::Assumption(_))));
        assert!(matches!(Obstacle::cone(0.5, 0.1, -1.0, 1.0), Err(Error::Assumption(_))));
        assert!(matches!(Obstacle::cone(1.5, -0.1, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(Obstacle::sampled(vec![-1.0, 0.5, -1.0]).is_ok());
        assert!(Obstacle::sampled(vec![-1.0, f64::NAN, -1.0]).is_err());
    }
}
