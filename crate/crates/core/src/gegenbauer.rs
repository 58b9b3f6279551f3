//! Gegenbauer (ultraspherical) polynomials `C_m^λ`.
//!
//! Values come from the forward three-term recurrence
//! `m C_m = 2(m+λ-1) t C_{m-1} - (m+2λ-2) C_{m-2}` seeded with `C_0 = 1` and
//! `C_1 = 2λt`. Negative degrees evaluate to zero.

use crate::error::{domain, Error, Result};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParams {
    lambda: f64,
    degree: i32,
}

impl GegenbauerParams {
    pub fn new(lambda: f64, degree: i32) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("gegenbauer lambda must be positive, got {lambda}"));
        }
        Ok(Self { lambda, degree })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn eval(&self, t: f64) -> f64 {
        gegenbauer(self.lambda, self.degree, t)
    }

    /// Value together with a flag that is set when `|t| > 1`.
    pub fn eval_flagged(&self, t: f64) -> (f64, bool) {
        (self.eval(t), t.abs() > 1.0)
    }

    pub fn eval_at_one(&self) -> f64 {
        gegenbauer_at_one(self.lambda, self.degree)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        gegenbauer_derivative(self.lambda, self.degree, t)
    }

    pub fn roots(&self) -> Vec<f64> {
        gegenbauer_roots(self.lambda, self.degree)
    }
}

/// `C_m^λ(t)`; `λ > 0` is assumed (use [`GegenbauerParams`] for checking).
pub fn gegenbauer(lambda: f64, degree: i32, t: f64) -> f64 {
    if degree < 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    if degree == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * t;
    for m in 2..=degree {
        let mf = m as f64;
        let next = (2.0 * (mf + lambda - 1.0) * t * cur - (mf + 2.0 * lambda - 2.0) * prev) / mf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[m] = C_m^λ(t)` for `m < out.len()`.
pub fn gegenbauer_sequence(lambda: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 2.0 * lambda * t;
    for m in 2..out.len() {
        let mf = m as f64;
        out[m] = (2.0 * (mf + lambda - 1.0) * t * out[m - 1]
            - (mf + 2.0 * lambda - 2.0) * out[m - 2])
            / mf;
    }
}

/// `C_m^λ(1) = Γ(2λ+m) / (Γ(2λ) Γ(m+1))`.
pub fn gegenbauer_at_one(lambda: f64, degree: i32) -> f64 {
    if degree < 0 {
        return 0.0;
    }
    let m = degree as f64;
    (ln_gamma(2.0 * lambda + m) - ln_gamma(2.0 * lambda) - ln_gamma(m + 1.0)).exp()
}

/// `d/dt C_m^λ(t) = 2λ C_{m-1}^{λ+1}(t)`.
pub fn gegenbauer_derivative(lambda: f64, degree: i32, t: f64) -> f64 {
    if degree <= 0 {
        return 0.0;
    }
    2.0 * lambda * gegenbauer(lambda + 1.0, degree - 1, t)
}

/// Taylor partial sum `Σ_{m<terms} z^m C_m^λ(t)` of the generating function
/// `(1 - 2tz + z²)^{-λ}`.
pub fn generating_function_partial_sum(lambda: f64, t: f64, z: f64, terms: usize) -> Result<f64> {
    GegenbauerParams::new(lambda, 0)?;
    if z.abs() >= 1.0 {
        return Err(Error::Divergence(format!(
            "generating function needs |z| < 1, got {z}"
        )));
    }
    let mut seq = vec![0.0; terms];
    gegenbauer_sequence(lambda, t, &mut seq);
    let mut sum = 0.0;
    let mut zp = 1.0;
    for c in seq {
        sum += zp * c;
        zp *= z;
    }
    Ok(sum)
}

/// Closed form `(1 - 2tz + z²)^{-λ}`.
pub fn generating_function(lambda: f64, t: f64, z: f64) -> f64 {
    (1.0 - 2.0 * t * z + z * z).powf(-lambda)
}

/// The `m` simple zeros of `C_m^λ` in `(-1, 1)`, ascending.
pub fn gegenbauer_roots(lambda: f64, degree: i32) -> Vec<f64> {
    if degree <= 0 {
        return Vec::new();
    }
    let m = degree as usize;
    let mut grid_points = 8 * m;
    loop {
        let roots = bracket_roots(lambda, degree, grid_points);
        if roots.len() == m || grid_points > 1 << 16 {
            return symmetrize(roots);
        }
        grid_points *= 2;
    }
}

fn bracket_roots(lambda: f64, degree: i32, grid_points: usize) -> Vec<f64> {
    let f = |t: f64| gegenbauer(lambda, degree, t);
    let node = |k: usize| -(std::f64::consts::PI * k as f64 / grid_points as f64).cos();
    let mut roots = Vec::with_capacity(degree as usize);
    let mut a = node(0);
    let mut fa = f(a);
    for k in 1..=grid_points {
        let b = node(k);
        let fb = f(b);
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            roots.push(polish(lambda, degree, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Bisection with Newton acceleration; Newton steps leaving the bracket are
/// replaced by bisection.
fn polish(lambda: f64, degree: i32, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = gegenbauer(lambda, degree, x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = gegenbauer_derivative(lambda, degree, x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || b - a < 1e-300 {
            return next;
        }
        x = next;
    }
    x
}

fn symmetrize(mut roots: Vec<f64>) -> Vec<f64> {
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = roots.len();
    for i in 0..n / 2 {
        let v = 0.5 * (roots[n - 1 - i] - roots[i]);
        roots[i] = -v;
        roots[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        roots[n / 2] = 0.0;
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `Φ±(Θ, ζ) = M C_M^λ(Θ) ± (2λ+M-1) C_{M-1}^λ(Θ) ζ`.
pub fn phi_pm(lambda: f64, big_m: u32, big_theta: f64, zeta: f64, sign: Sign) -> Result<f64> {
    GegenbauerParams::new(lambda, 0)?;
    if big_m == 0 {
        return domain("phi is defined for M >= 1");
    }
    Ok(phi_raw(lambda, big_m, big_theta, zeta, sign))
}

pub(crate) fn phi_raw(lambda: f64, big_m: u32, big_theta: f64, zeta: f64, sign: Sign) -> f64 {
    let m = big_m as i32;
    let a = big_m as f64 * gegenbauer(lambda, m, big_theta);
    let b = (2.0 * lambda + big_m as f64 - 1.0) * gegenbauer(lambda, m - 1, big_theta) * zeta;
    match sign {
        Sign::Plus => a + b,
        Sign::Minus => a - b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_degree_values() {
        assert_eq!(gegenbauer(0.7, 0, 0.3), 1.0);
        assert_abs_diff_eq!(gegenbauer(0.7, 1, 0.3), 0.42, epsilon = 1e-15);
        assert_abs_diff_eq!(gegenbauer(0.5, 2, 0.5), -0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(gegenbauer(1.0, 3, 1.0), 4.0, epsilon = 1e-14);
        assert_eq!(gegenbauer(1.3, -1, 0.2), 0.0);
        assert_eq!(gegenbauer(1.3, -2, 0.2), 0.0);
    }

    #[test]
    fn legendre_match() {
        for i in 0..=20 {
            let t = -1.0 + 0.1 * i as f64;
            let p3 = 0.5 * (5.0 * t * t * t - 3.0 * t);
            let p4 = (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0;
            assert_abs_diff_eq!(gegenbauer(0.5, 3, t), p3, epsilon = 1e-14);
            assert_abs_diff_eq!(gegenbauer(0.5, 4, t), p4, epsilon = 1e-14);
        }
    }

    #[test]
    fn chebyshev_second_kind() {
        for i in 1..20 {
            let phi = 0.15 * i as f64;
            for m in 0..10 {
                let expect = ((m as f64 + 1.0) * phi).sin() / phi.sin();
                assert_abs_diff_eq!(gegenbauer(1.0, m, phi.cos()), expect, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn at_one() {
        assert_abs_diff_eq!(gegenbauer_at_one(1.5, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gegenbauer_at_one(1.0, 3), 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(gegenbauer_at_one(0.5, 4), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(gegenbauer_derivative(0.5, 0, 0.9), 0.0);
        assert_abs_diff_eq!(gegenbauer_derivative(0.5, 1, 0.2), 1.0, epsilon = 1e-15);
        let h = 1e-5;
        let fd = (gegenbauer(1.0, 2, 0.4 + h) - gegenbauer(1.0, 2, 0.4 - h)) / (2.0 * h);
        assert_abs_diff_eq!(gegenbauer_derivative(1.0, 2, 0.4), fd, epsilon = 1e-6);
    }

    #[test]
    fn generating_function_examples() {
        assert_eq!(generating_function_partial_sum(2.0, 0.5, 0.0, 5).unwrap(), 1.0);
        let s = generating_function_partial_sum(1.5, 1.0, 0.5, 200).unwrap();
        assert_abs_diff_eq!(s, 8.0, epsilon = 1e-8);
        let s = generating_function_partial_sum(0.5, -0.3, 0.4, 200).unwrap();
        assert_abs_diff_eq!(s, 1.4f64.powf(-0.5), epsilon = 1e-8);
        assert!(matches!(
            generating_function_partial_sum(0.5, 0.0, 1.0, 10),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn root_examples() {
        assert_eq!(gegenbauer_roots(0.7, 1), vec![0.0]);
        let r = gegenbauer_roots(0.5, 2);
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r[0], -s, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], s, epsilon = 1e-14);
        let r = gegenbauer_roots(1.0, 3);
        let h = 0.5 * 2f64.sqrt();
        assert_abs_diff_eq!(r[0], -h, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[2], h, epsilon = 1e-14);
        assert!(gegenbauer_roots(1.0, 0).is_empty());
    }

    #[test]
    fn roots_many_degrees() {
        for &lambda in &[0.25, 0.5, 1.0, 1.5, 2.5] {
            for m in 1..=20 {
                let r = gegenbauer_roots(lambda, m);
                assert_eq!(r.len(), m as usize);
                for w in r.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for &x in &r {
                    assert!(gegenbauer(lambda, m, x).abs() <= 1e-12 * gegenbauer_at_one(lambda, m));
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_abs_diff_eq!(phi_pm(1.0, 1, 0.5, 0.0, Sign::Minus).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_pm(1.0, 1, 0.5, 2.0, Sign::Minus).unwrap(), -3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_pm(1.0, 1, 0.5, 2.0, Sign::Plus).unwrap(), 5.0, epsilon = 1e-15);
        assert!(phi_pm(1.0, 0, 0.5, 2.0, Sign::Plus).is_err());
    }

    #[test]
    fn parameter_domain() {
        assert!(GegenbauerParams::new(0.0, 2).is_err());
        assert!(GegenbauerParams::new(-1.0, 2).is_err());
        let p = GegenbauerParams::new(0.5, 2).unwrap();
        assert!(p.eval_flagged(1.5).1);
        assert!(!p.eval_flagged(0.5).1);
    }
}
