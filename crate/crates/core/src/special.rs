//! Gamma-function helpers and dimensional constants.

use std::f64::consts::PI;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_factorial(k: u32) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Generalized binomial coefficient `binom(a, k)` for real `a` and integer `k ≥ 0`.
pub fn binomial(a: f64, k: u32) -> f64 {
    if k <= 60 {
        let mut acc = 1.0;
        for j in 0..k {
            acc *= (a - j as f64) / (j as f64 + 1.0);
        }
        acc
    } else {
        (ln_gamma(a + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma(a - k as f64 + 1.0)).exp()
    }
}

/// Volume of the unit ball in ℝ^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (h * PI.ln() - ln_gamma(1.0 + h)).exp()
}

/// Surface area of the unit sphere `S^{d-1}` ⊂ ℝ^d. For `d = 1` this is the
/// counting measure of `{-1, 1}`.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// `α_n = 2 / (n ω_n)`, the Poisson normalization in dimension `n`.
pub fn alpha(n: usize) -> f64 {
    2.0 / (n as f64 * unit_ball_volume(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn alpha_three() {
        assert_relative_eq!(alpha(3), 1.0 / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(alpha(2), 1.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn binomials() {
        assert_relative_eq!(binomial(5.0, 2), 10.0);
        assert_relative_eq!(binomial(4.0, 3), 4.0);
        assert_relative_eq!(binomial(2.5, 0), 1.0);
        assert_relative_eq!(binomial(3.5, 1), 3.5);
        let big = binomial(200.0, 100);
        let lg = (ln_gamma(201.0) - 2.0 * ln_gamma(101.0)).exp();
        assert_relative_eq!(big, lg, max_relative = 1e-10);
    }
}
