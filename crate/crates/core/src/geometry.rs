//! Points of the half space `Π₊ = {x_n > 0}` and of its boundary `ℝⁿ⁻¹`.
//!
//! A point `x = (y, x_n)` is stored as `(r, θ, ŷ)` with `r = |x|`, `θ` the
//! angle to `ê_n` and `ŷ = y/|y|` (set to `ê₁` when `y = 0`).

use crate::error::{domain, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn first_axis(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = 1.0;
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint {
    n: usize,
    r: f64,
    theta: f64,
    y_hat: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return domain("half-space points need n >= 2");
        }
        if x.iter().any(|v| !v.is_finite()) {
            return domain("non-finite coordinate");
        }
        let xn = x[n - 1];
        if !(xn > 0.0) {
            return domain(format!("x_n must be positive, got {xn}"));
        }
        let y = &x[..n - 1];
        let ynorm = norm(y);
        let r = (ynorm * ynorm + xn * xn).sqrt();
        let theta = ynorm.atan2(xn);
        let y_hat = if ynorm > 0.0 {
            y.iter().map(|v| v / ynorm).collect()
        } else {
            first_axis(n - 1)
        };
        Ok(Self { n, r, theta, y_hat })
    }

    pub fn from_polar(n: usize, r: f64, theta: f64, y_hat: &[f64]) -> Result<Self> {
        if n < 2 || y_hat.len() != n - 1 {
            return domain("direction length must be n - 1 with n >= 2");
        }
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("radius must be positive, got {r}"));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
            return domain(format!("theta must lie in [0, pi/2), got {theta}"));
        }
        let len = norm(y_hat);
        if (len - 1.0).abs() > 1e-12 {
            return domain("y_hat must be a unit vector");
        }
        let y_hat = y_hat.iter().map(|v| v / len).collect();
        Ok(Self { n, r, theta, y_hat })
    }

    /// Point at polar angle `theta` in the `(ê₁, ê_n)` plane.
    pub fn on_first_axis(n: usize, r: f64, theta: f64) -> Result<Self> {
        Self::from_polar(n, r, theta, &first_axis(n.max(2) - 1))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn y_hat(&self) -> &[f64] {
        &self.y_hat
    }

    pub fn xn(&self) -> f64 {
        self.r * self.theta.cos()
    }

    pub fn y_norm(&self) -> f64 {
        self.r * self.theta.sin()
    }

    pub fn y(&self) -> Vec<f64> {
        let s = self.y_norm();
        self.y_hat.iter().map(|v| v * s).collect()
    }

    pub fn to_cartesian(&self) -> Vec<f64> {
        let mut x = self.y();
        x.push(self.xn());
        x
    }

    pub fn direction(&self) -> Direction {
        Direction {
            n: self.n,
            theta: self.theta,
            y_hat: self.y_hat.clone(),
        }
    }
}

/// A unit vector in the closed upper half sphere, `θ ∈ [0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    n: usize,
    theta: f64,
    y_hat: Vec<f64>,
}

impl Direction {
    pub fn new(n: usize, theta: f64, y_hat: &[f64]) -> Result<Self> {
        if n < 2 || y_hat.len() != n - 1 {
            return domain("direction length must be n - 1 with n >= 2");
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return domain(format!("theta must lie in [0, pi/2], got {theta}"));
        }
        let len = norm(y_hat);
        if (len - 1.0).abs() > 1e-12 {
            return domain("y_hat must be a unit vector");
        }
        Ok(Self {
            n,
            theta,
            y_hat: y_hat.iter().map(|v| v / len).collect(),
        })
    }

    pub fn on_first_axis(n: usize, theta: f64) -> Result<Self> {
        Self::new(n, theta, &first_axis(n.max(2) - 1))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn y_hat(&self) -> &[f64] {
        &self.y_hat
    }

    pub fn at_radius(&self, r: f64) -> Result<HalfSpacePoint> {
        HalfSpacePoint::from_polar(self.n, r, self.theta, &self.y_hat)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    coords: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("boundary point needs at least one coordinate");
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return domain("non-finite coordinate");
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple {
    pub theta: f64,
    pub theta_prime: f64,
    pub big_theta: f64,
}

/// `cos θ'` with the convention `θ' = π/2` when `y = 0` or `y' = 0`.
fn cos_theta_prime(x: &HalfSpacePoint, yp: &BoundaryPoint) -> f64 {
    let rho = yp.norm();
    if x.y_norm() == 0.0 || rho == 0.0 {
        return 0.0;
    }
    (dot(&x.y_hat, &yp.coords) / rho).clamp(-1.0, 1.0)
}

pub fn theta_prime(x: &HalfSpacePoint, yp: &BoundaryPoint) -> f64 {
    cos_theta_prime(x, yp).acos()
}

/// `Θ = sin θ cos θ'`.
pub fn big_theta(x: &HalfSpacePoint, yp: &BoundaryPoint) -> f64 {
    (x.theta.sin() * cos_theta_prime(x, yp)).clamp(-1.0, 1.0)
}

pub fn angle_triple(x: &HalfSpacePoint, yp: &BoundaryPoint) -> AngleTriple {
    AngleTriple {
        theta: x.theta,
        theta_prime: theta_prime(x, yp),
        big_theta: big_theta(x, yp),
    }
}

pub fn reflect_across_first_axis(yp: &BoundaryPoint) -> BoundaryPoint {
    let mut coords = yp.coords.clone();
    coords[0] = -coords[0];
    BoundaryPoint { coords }
}

pub(crate) fn check_dims(x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<()> {
    if yp.dim() + 1 != x.dim() {
        return domain(format!(
            "boundary point has {} coordinates, expected {}",
            yp.dim(),
            x.dim() - 1
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn bp(v: &[f64]) -> BoundaryPoint {
        BoundaryPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn theta_prime_examples() {
        let x = HalfSpacePoint::from_polar(3, 1.0, FRAC_PI_4, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(theta_prime(&x, &bp(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(theta_prime(&x, &bp(&[0.0, 1.0])), FRAC_PI_2);
        let axis = HalfSpacePoint::from_cartesian(&[0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(theta_prime(&axis, &bp(&[0.3, -2.0])), FRAC_PI_2);
        assert_abs_diff_eq!(theta_prime(&x, &bp(&[0.0, 0.0])), FRAC_PI_2);
    }

    #[test]
    fn big_theta_examples() {
        let x = HalfSpacePoint::from_cartesian(&[1.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(big_theta(&x, &bp(&[2.0, 0.0])), 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(big_theta(&x, &bp(&[0.0, 1.0])), 0.0);
        let axis = HalfSpacePoint::from_cartesian(&[0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(big_theta(&axis, &bp(&[3.0, 1.0])), 0.0);
    }

    #[test]
    fn two_dimensional_convention() {
        let x = HalfSpacePoint::from_cartesian(&[-2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(theta_prime(&x, &bp(&[3.0])), std::f64::consts::PI);
        assert_abs_diff_eq!(theta_prime(&x, &bp(&[-0.5])), 0.0);
    }

    #[test]
    fn reflection() {
        assert_eq!(reflect_across_first_axis(&bp(&[3.0, 1.0])).coords(), &[-3.0, 1.0]);
        assert_eq!(reflect_across_first_axis(&bp(&[0.0, 5.0])).coords(), &[0.0, 5.0]);
    }

    #[test]
    fn rejects_lower_half_space() {
        assert!(HalfSpacePoint::from_cartesian(&[1.0, 0.0]).is_err());
        assert!(HalfSpacePoint::from_cartesian(&[1.0, -1.0]).is_err());
        assert!(HalfSpacePoint::from_polar(3, 1.0, FRAC_PI_2, &[1.0, 0.0]).is_err());
        assert!(Direction::new(3, FRAC_PI_2, &[1.0, 0.0]).is_ok());
    }
}
