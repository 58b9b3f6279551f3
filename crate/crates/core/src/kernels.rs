//! The kernel `K(λ, x, y') = [|y'-y|² + x_n²]^{-λ}` and its modified forms
//!
//! * `K_M  = K - Σ_{m<M} |x|^m |y'|^{-(m+2λ)} C_m^λ(Θ)` (first kind),
//! * `K̃_M = K - Σ_{m<M} |y'|^m |x|^{-(m+2λ)} C_m^λ(Θ)` (second kind),
//!
//! with the convention `K_m = K` for `m ≤ 0`.

use crate::error::{domain, Error, Result};
use crate::gegenbauer::gegenbauer;
use crate::geometry::{big_theta, check_dims, norm, BoundaryPoint, HalfSpacePoint};
use crate::quadrature::rules::{integrate, Tolerance};
use crate::special::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    lambda: f64,
    m: u32,
    kind: KernelKind,
}

impl KernelParams {
    pub fn new(lambda: f64, m: u32, kind: KernelKind) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("kernel lambda must be positive, got {lambda}"));
        }
        if kind == KernelKind::Second && m == 0 {
            return domain("second-kind kernels need M >= 1");
        }
        Ok(Self { lambda, m, kind })
    }

    pub fn first(lambda: f64, m: u32) -> Result<Self> {
        Self::new(lambda, m, KernelKind::First)
    }

    pub fn second(lambda: f64, m: u32) -> Result<Self> {
        Self::new(lambda, m, KernelKind::Second)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Evaluates `K_M` or `K̃_M` according to `kind`.
    pub fn eval(&self, x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<f64> {
        match self.kind {
            KernelKind::First => kernel_km_direct(self, x, yp),
            KernelKind::Second => kernel_km_second(self, x, yp),
        }
    }
}

/// Polar quantities shared by all kernel formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGeometry {
    pub r: f64,
    pub rho: f64,
    pub big_theta: f64,
    pub dist_sq: f64,
}

impl KernelGeometry {
    pub fn new(x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<Self> {
        check_dims(x, yp)?;
        let rho = yp.norm();
        let delta = x.y_norm();
        let xn = x.xn();
        // |y'-y|² = (ρ-δ)² + ρδ|ŷ'-ŷ|², free of cancellation for nearby points.
        let chord_sq = if rho > 0.0 && delta > 0.0 {
            x.y_hat()
                .iter()
                .zip(yp.coords())
                .map(|(a, b)| (b / rho - a).powi(2))
                .sum::<f64>()
        } else {
            0.0
        };
        let dist_sq = (rho - delta).powi(2) + rho * delta * chord_sq + xn * xn;
        Ok(Self {
            r: x.r(),
            rho,
            big_theta: big_theta(x, yp),
            dist_sq,
        })
    }
}

pub fn k_from_dist_sq(lambda: f64, dist_sq: f64) -> f64 {
    dist_sq.powf(-lambda)
}

/// Below this ratio the remainder is summed directly; the subtraction
/// `K - Σ_{j<m}` loses all digits as `s → 0`.
const SERIES_RATIO: f64 = 0.25;

/// `Σ_{j≥m} s^j C_j^λ(Θ)` for `0 ≤ s ≤ SERIES_RATIO`, stopped once the
/// majorant `s^j C_j^λ(1)` falls below `1e-17` of its value at `j = m`.
fn gegenbauer_remainder(lambda: f64, m: i32, s: f64, big_theta: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut sp, mut at_one) = (1.0, 1.0);
    let mut sum = 0.0;
    let mut leading = 0.0;
    for j in 0.. {
        if j >= m {
            if j == m {
                leading = sp * at_one;
            } else if sp * at_one <= 1e-17 * leading || j > m + 2000 {
                break;
            }
            sum += sp * cur;
        }
        let jf = j as f64;
        let next = if j == 0 {
            2.0 * lambda * big_theta
        } else {
            (2.0 * (jf + lambda) * big_theta * cur - (jf + 2.0 * lambda - 1.0) * prev) / (jf + 1.0)
        };
        prev = cur;
        cur = next;
        at_one *= (jf + 2.0 * lambda) / (jf + 1.0);
        sp *= s;
    }
    sum
}

/// `Σ_{j<m} s^j C_j^λ(Θ)`.
fn gegenbauer_tail(lambda: f64, m: i32, s: f64, big_theta: f64) -> f64 {
    if m <= 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    let mut sum = 1.0;
    if m == 1 {
        return sum;
    }
    let mut cur = 2.0 * lambda * big_theta;
    let mut sp = s;
    sum += sp * cur;
    for j in 2..m {
        let jf = j as f64;
        let next = (2.0 * (jf + lambda - 1.0) * big_theta * cur - (jf + 2.0 * lambda - 2.0) * prev) / jf;
        prev = cur;
        cur = next;
        sp *= s;
        sum += sp * cur;
    }
    sum
}

/// `K_m` of the first kind from polar data; `m ≤ 0` gives `K`.
pub fn km_first_raw(lambda: f64, m: i32, r: f64, rho: f64, big_theta: f64, dist_sq: f64) -> f64 {
    let k = k_from_dist_sq(lambda, dist_sq);
    if m <= 0 {
        return k;
    }
    let s = r / rho;
    if s <= SERIES_RATIO {
        return rho.powf(-2.0 * lambda) * gegenbauer_remainder(lambda, m, s, big_theta);
    }
    k - rho.powf(-2.0 * lambda) * gegenbauer_tail(lambda, m, s, big_theta)
}

/// `K̃_m` of the second kind from polar data; `m ≤ 0` gives `K`.
pub fn km_second_raw(lambda: f64, m: i32, r: f64, rho: f64, big_theta: f64, dist_sq: f64) -> f64 {
    let k = k_from_dist_sq(lambda, dist_sq);
    if m <= 0 {
        return k;
    }
    let s = rho / r;
    if s <= SERIES_RATIO {
        return r.powf(-2.0 * lambda) * gegenbauer_remainder(lambda, m, s, big_theta);
    }
    k - r.powf(-2.0 * lambda) * gegenbauer_tail(lambda, m, s, big_theta)
}

pub fn kernel_k(lambda: f64, x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<f64> {
    KernelParams::first(lambda, 0)?;
    let g = KernelGeometry::new(x, yp)?;
    if g.dist_sq <= 0.0 {
        return Err(Error::Singularity("x coincides with y'".into()));
    }
    Ok(k_from_dist_sq(lambda, g.dist_sq))
}

/// `K` from Cartesian coordinates, `[|y'-y|² + x_n²]^{-λ}`.
pub fn kernel_k_cartesian(lambda: f64, x: &[f64], yp: &[f64]) -> f64 {
    let n = x.len();
    let mut d2 = x[n - 1] * x[n - 1];
    for i in 0..n - 1 {
        d2 += (yp[i] - x[i]).powi(2);
    }
    d2.powf(-lambda)
}

/// `K` from the law-of-cosines form `ρ² - 2ρ|x|Θ + |x|²`.
pub fn kernel_k_polar(lambda: f64, r: f64, rho: f64, big_theta: f64) -> f64 {
    (rho * rho - 2.0 * rho * r * big_theta + r * r).powf(-lambda)
}

pub fn kernel_km_direct(params: &KernelParams, x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<f64> {
    if params.kind != KernelKind::First {
        return domain("kernel_km_direct needs a first-kind kernel");
    }
    let g = KernelGeometry::new(x, yp)?;
    if params.m >= 1 && g.rho == 0.0 {
        return Err(Error::Singularity("K_M with M >= 1 is singular at y' = 0".into()));
    }
    if g.dist_sq <= 0.0 {
        return Err(Error::Singularity("x coincides with y'".into()));
    }
    Ok(km_first_raw(params.lambda, params.m as i32, g.r, g.rho, g.big_theta, g.dist_sq))
}

pub fn kernel_km_second(params: &KernelParams, x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<f64> {
    if params.kind != KernelKind::Second {
        return domain("kernel_km_second needs a second-kind kernel");
    }
    let g = KernelGeometry::new(x, yp)?;
    Ok(km_second_raw(params.lambda, params.m as i32, g.r, g.rho, g.big_theta, g.dist_sq))
}

/// `K_M` through `K · ∫₀^{s} (1-2Θζ+ζ²)^{λ-1} Φ₋(Θ,ζ) ζ^{M-1} dζ`, `s = |x|/|y'|`,
/// with absolute tolerance `tol` on `K_M`.
pub fn kernel_km_integral(
    params: &KernelParams,
    x: &HalfSpacePoint,
    yp: &BoundaryPoint,
    tol: f64,
) -> Result<f64> {
    if params.kind != KernelKind::First || params.m == 0 {
        return domain("the integral representation needs a first-kind kernel with M >= 1");
    }
    let g = KernelGeometry::new(x, yp)?;
    if g.rho == 0.0 {
        return Err(Error::Singularity("integral representation needs y' != 0".into()));
    }
    let k = k_from_dist_sq(params.lambda, g.dist_sq);
    let s = g.r / g.rho;
    let inner = representation_integral(params.lambda, params.m, s, g.big_theta, tol / k)?;
    Ok(k * inner)
}

/// `∫₀^{s} (1-2Θζ+ζ²)^{λ-1} Φ₋(Θ,ζ) ζ^{M-1} dζ`, the ratio `K_M / K`.
pub fn representation_integral(lambda: f64, big_m: u32, s: f64, big_theta: f64, abs_tol: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    let mi = big_m as i32;
    let a = big_m as f64 * gegenbauer(lambda, mi, big_theta);
    let b = (2.0 * lambda + big_m as f64 - 1.0) * gegenbauer(lambda, mi - 1, big_theta);
    // `w = ζ - Θ` is passed separately so the weight stays finite next to
    // `ζ = Θ = 1`.
    let a_theta = a - b * big_theta;
    let integrand = |z: f64, w: f64| {
        let base = (w * w + (1.0 - big_theta * big_theta)).max(0.0);
        if base == 0.0 {
            return 0.0;
        }
        base.powf(lambda - 1.0) * (a_theta - b * w) * z.powi(mi - 1)
    };
    // Grade the mesh towards ζ = Θ, where the weight is most peaked
    // (singular when Θ = 1 and λ < 1).
    let anchor = big_theta.clamp(0.0, s);
    let q = if lambda < 1.0 { (1.0 / lambda).ceil().min(12.0) } else { 1.0 };
    let tol = Tolerance::new(abs_tol.max(1e-300), 1e-14);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    let pieces = [(0.0, anchor, true), (anchor, s, false)];
    for &(lo, hi, toward_hi) in &pieces {
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        // ζ = anchor ∓ len·u^q with u ∈ [0, 1].
        let mapped = |u: f64| {
            let uq = u.powf(q);
            let (z, w) = if toward_hi {
                (hi - len * uq, (hi - big_theta) - len * uq)
            } else {
                (lo + len * uq, (lo - big_theta) + len * uq)
            };
            let jac = len * q * u.powf(q - 1.0);
            (integrand(z, w) * jac, 0.0)
        };
        let r = integrate(mapped, &[0.0, 1e-6, 1e-3, 0.05, 0.3, 1.0], tol, 4000);
        total += r.estimate.value;
        err += r.estimate.error;
        converged &= r.converged;
    }
    if !converged {
        return Err(Error::Accuracy {
            value: total,
            error: err,
            tolerance: abs_tol,
        });
    }
    Ok(total)
}

/// Closed form of [`representation_integral`] at `λ = 1`:
/// `C_M^1(Θ) s^M - C_{M-1}^1(Θ) s^{M+1}`.
pub fn representation_integral_unit_lambda(big_m: u32, s: f64, big_theta: f64) -> f64 {
    let m = big_m as i32;
    gegenbauer(1.0, m, big_theta) * s.powi(m) - gegenbauer(1.0, m - 1, big_theta) * s.powi(m + 1)
}

/// `d₁ = 2λ binom(2λ+M, M-1)`, the bound on `|Φ₋|` over `ζ ∈ [0, 1]`.
pub fn phi_bound_constant(lambda: f64, big_m: u32) -> f64 {
    if big_m == 0 {
        return 1.0;
    }
    2.0 * lambda * binomial(2.0 * lambda + big_m as f64, big_m - 1)
}

/// Explicit majorant of `|K_M|` valid for all `x ∈ Π₊`, `y' ≠ 0`.
///
/// For `λ ≥ 1/2`: `d₁ 2^{2λ} sec^{2λ}θ (|x|+|y'|)^{-2λ} s^M (1+s)^{2λ-1}`;
/// for `λ < 1/2` the last two factors become `s^{M-1} min(s, s^{2λ}) / λ`.
pub fn kernel_bound_first(params: &KernelParams, x: &HalfSpacePoint, yp: &BoundaryPoint) -> Result<f64> {
    if params.kind != KernelKind::First {
        return domain("kernel_bound_first needs a first-kind kernel");
    }
    check_dims(x, yp)?;
    let rho = norm(yp.coords());
    if params.m >= 1 && rho == 0.0 {
        return Err(Error::Singularity("bound is singular at y' = 0".into()));
    }
    Ok(bound_first_raw(params.lambda, params.m, x.r(), x.theta(), rho))
}

pub(crate) fn bound_first_raw(lambda: f64, big_m: u32, r: f64, theta: f64, rho: f64) -> f64 {
    let sec = 1.0 / theta.cos();
    let prefactor = (4.0 * sec * sec).powf(lambda) * (r + rho).powf(-2.0 * lambda);
    if big_m == 0 {
        return prefactor;
    }
    let s = r / rho;
    let d1 = phi_bound_constant(lambda, big_m);
    let m = big_m as i32;
    let tail = if lambda >= 0.5 {
        s.powi(m) * (1.0 + s).powf(2.0 * lambda - 1.0)
    } else {
        s.powi(m - 1) * s.min(s.powf(2.0 * lambda)) / lambda
    };
    d1 * prefactor * tail
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bp(v: &[f64]) -> BoundaryPoint {
        BoundaryPoint::new(v.to_vec()).unwrap()
    }

    fn pt(v: &[f64]) -> HalfSpacePoint {
        HalfSpacePoint::from_cartesian(v).unwrap()
    }

    #[test]
    fn remainder_series_matches_subtraction() {
        for &(l, m, t) in &[(0.5f64, 1, 0.3f64), (1.5, 2, -0.8), (2.5, 3, 0.95), (0.25, 2, 0.0)] {
            let s: f64 = 0.2;
            let direct = (1.0 - 2.0 * s * t + s * s).powf(-l) - gegenbauer_tail(l, m, s, t);
            assert_abs_diff_eq!(gegenbauer_remainder(l, m, s, t), direct, epsilon = 1e-14);
        }
        // Far out the subtraction has no digits left; the series stays relative.
        let v = km_first_raw(1.5, 2, 1.0, 1e12, 0.5, 1e24 - 1e12 + 1.0);
        let leading = 1e-36 * 1e-24 * crate::gegenbauer::gegenbauer(1.5, 2, 0.5);
        assert!((v / leading - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kernel_examples() {
        let x = pt(&[0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(kernel_k(1.5, &x, &bp(&[1.0, 0.0])).unwrap(), 2f64.powf(-1.5), epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_k(0.5, &x, &bp(&[0.0, 0.0])).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn km_examples() {
        let x = pt(&[0.0, 0.0, 1.0]);
        let p = KernelParams::first(0.5, 1).unwrap();
        let v = kernel_km_direct(&p, &x, &bp(&[2.0, 0.0])).unwrap();
        assert_abs_diff_eq!(v, 5f64.powf(-0.5) - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v, -0.052786, epsilon = 1e-6);
        assert!(matches!(
            kernel_km_direct(&p, &x, &bp(&[0.0, 0.0])),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn second_kind_example() {
        let x = pt(&[0.0, 0.0, 1.0]);
        let p = KernelParams::second(0.5, 1).unwrap();
        assert_abs_diff_eq!(kernel_km_second(&p, &x, &bp(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(KernelParams::second(0.5, 0).is_err());
    }

    #[test]
    fn zero_range_integral() {
        assert_eq!(representation_integral(1.5, 2, 0.0, 0.3, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn unit_lambda_closed_form() {
        for &s in &[0.1, 0.9, 1.0, 1.1, 3.0] {
            for &t in &[-0.9, 0.0, 0.9, 1.0] {
                for m in 1..=4 {
                    let q = representation_integral(1.0, m, s, t, 1e-15).unwrap();
                    let c = representation_integral_unit_lambda(m, s, t);
                    assert_abs_diff_eq!(q, c, epsilon = 1e-12 * c.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn bound_small_s() {
        let p = KernelParams::first(1.5, 2).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, 1.0, 0.3).unwrap();
        let b1 = kernel_bound_first(&p, &x, &bp(&[1e3, 0.0])).unwrap();
        let b2 = kernel_bound_first(&p, &x, &bp(&[1e4, 0.0])).unwrap();
        assert!(b2 < b1 * 1e-4);
    }
}
