//! Constructions behind the sharpness of the growth estimate for
//! `F_{λ,M}[f]`: the constants `β₁, β₂, γ_{λ,M}, r₀, A, A_λ`, the regions
//! `Ω₁, Ω₂, Ω₃, Ω_<, Ω_>`, sampled sign checks and the two families of
//! extremal data.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gegenbauer::{gegenbauer, gegenbauer_roots, phi_raw, Sign};
use crate::geometry::{dot, norm, BoundaryPoint, HalfSpacePoint};
use crate::kernels::{representation_integral, KernelParams};
use crate::quadrature::rules::{integrate, Tolerance};
use crate::quadrature::{integral_f, BoundaryData, QuadratureSpec, Support, SupportPiece};
use crate::special::{binomial, sphere_area};

const ROOT_EPS: f64 = 1e-12;

/// `M = 2μ + ε₀`.
pub fn parity(m: u32) -> (u32, u32) {
    (m / 2, m % 2)
}

/// `(-1)^{μ+ε₀}`, the sign of `Φ₋` on `Ω₁`.
pub fn omega1_sign(m: u32) -> f64 {
    let (mu, eps) = parity(m);
    if (mu + eps) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessConstants {
    pub lambda: f64,
    pub m: u32,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma_lm: f64,
    pub r0: f64,
    /// `min(2, r₀, sec(π/(2M)))`.
    pub a_upper: f64,
    pub a: f64,
    /// `min_{A^{-1} ≤ t ≤ 1} C_{M-1}^λ(t)`.
    pub min_c_m1: f64,
    pub a_lambda: f64,
    /// `arcsin √(A/(2A-1))`: `sin θ ≥ sin θ₀` keeps `Θ ≥ 1/A` on `Ω₂`.
    pub theta0_cone: f64,
    /// `½[π - arcsin(1 - A^{-2})]`: the balls `B_{x_n}(x₁ê₁)` then lie in `Ω₃`.
    pub theta0_ball: f64,
}

/// `γ_{λ,M} = (Σ_{m<M} 2^m C_m^λ(1))^{-1/λ}`.
pub fn gamma_lm(lambda: f64, m: u32) -> f64 {
    let s: f64 = (0..m as i32).map(|k| 2f64.powi(k) * gegenbauer(lambda, k, 1.0)).sum();
    s.powf(-1.0 / lambda)
}

/// Largest root of `A⁴ + (1-γ)A² - 2`.
pub fn quartic_root(gamma: f64) -> f64 {
    let b = 1.0 - gamma;
    (0.5 * (-b + (b * b + 8.0).sqrt())).sqrt()
}

fn min_on_interval(lambda: f64, degree: i32, lo: f64, hi: f64) -> f64 {
    let mut best = gegenbauer(lambda, degree, lo).min(gegenbauer(lambda, degree, hi));
    if degree >= 2 {
        for t in gegenbauer_roots(lambda + 1.0, degree - 1) {
            if t > lo && t < hi {
                best = best.min(gegenbauer(lambda, degree, t));
            }
        }
    }
    best
}

pub fn compute_constants(lambda: f64, m: u32) -> Result<SharpnessConstants> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain("lambda must be positive");
    }
    if m == 0 {
        return domain("the sharpness constants need M >= 1");
    }
    let mi = m as i32;
    let beta1 = if m == 1 {
        1.0
    } else {
        gegenbauer_roots(lambda, mi)
            .into_iter()
            .chain(gegenbauer_roots(lambda, mi - 1))
            .filter(|&t| t > ROOT_EPS)
            .fold(f64::INFINITY, f64::min)
    };
    let beta2 = gegenbauer_roots(lambda.min(1.0), mi)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let gamma = gamma_lm(lambda, m);
    let r0 = quartic_root(gamma);
    let sec = 1.0 / (PI / (2.0 * m as f64)).cos();
    let a_upper = 2f64.min(r0).min(if m == 1 { f64::INFINITY } else { sec });
    let a = 0.5 * (1.0 + a_upper);
    let min_c_m1 = min_on_interval(lambda, mi - 1, 1.0 / a, 1.0);
    let ratio = ((a + 1.0) / (a - 1.0)).powf(2.0 * lambda);
    let mf = m as f64;
    let second = 8.0 * 2f64.sqrt() * (mf + 1.0) / (2.0 * lambda + mf - 1.0) * binomial(2.0 * lambda + mf, m - 1)
        / min_c_m1;
    let a_lambda = ratio * second.max(1.0);
    Ok(SharpnessConstants {
        lambda,
        m,
        beta1,
        beta2,
        gamma_lm: gamma,
        r0,
        a_upper,
        a,
        min_c_m1,
        a_lambda,
        theta0_cone: (a / (2.0 * a - 1.0)).sqrt().asin(),
        theta0_ball: 0.5 * (PI - (1.0 - 1.0 / (a * a)).asin()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Omega {
    Omega1,
    Omega2,
    Omega3,
    /// `Ω_>`: the part of `Ω₂` with `s > A`.
    Greater,
    /// `Ω_<`: the mirror image of `Ω_>` across `ŷ · y' = 0`.
    Less,
}

#[derive(Debug, Clone)]
pub struct RegionSpec {
    which: Omega,
    constants: SharpnessConstants,
    y_hat: Vec<f64>,
    x_norm: Option<f64>,
}

impl RegionSpec {
    /// `x_ref` fixes `ŷ` and, for `Ω₃, Ω_≷`, the radius `|x|` in `s = |x|/|y'|`.
    /// `Ω₁` and `Ω₂` fall back to `ŷ = ê₁` without it.
    pub fn new(which: Omega, constants: SharpnessConstants, x_ref: Option<&HalfSpacePoint>) -> Result<Self> {
        let needs_x = matches!(which, Omega::Omega3 | Omega::Greater | Omega::Less);
        let (y_hat, x_norm) = match x_ref {
            Some(x) => (x.y_hat().to_vec(), Some(x.r())),
            None if needs_x => return domain("this region needs a reference point"),
            None => (Vec::new(), None),
        };
        Ok(Self {
            which,
            constants,
            y_hat,
            x_norm,
        })
    }

    pub fn which(&self) -> Omega {
        self.which
    }

    pub fn constants(&self) -> &SharpnessConstants {
        &self.constants
    }
}

fn cos_angle(y_hat: &[f64], yp: &[f64]) -> f64 {
    let rho = norm(yp);
    let along = if y_hat.is_empty() { yp[0] } else { dot(y_hat, yp) };
    (along / rho).clamp(-1.0, 1.0)
}

/// `Ω₁` as an interval of `cos θ'`. Even `M`: `[β₁/3, β₁/2]`; odd `M`: the
/// mirror band `[-β₁/2, -β₁/3]`.
pub fn omega1_cos_band(c: &SharpnessConstants) -> (f64, f64) {
    if c.m % 2 == 0 {
        (c.beta1 / 3.0, c.beta1 / 2.0)
    } else {
        (-c.beta1 / 2.0, -c.beta1 / 3.0)
    }
}

pub fn region_contains(region: &RegionSpec, yp: &BoundaryPoint) -> bool {
    let y = yp.coords();
    let rho = norm(y);
    if rho == 0.0 {
        return false;
    }
    let c = &region.constants;
    let cos_t = cos_angle(&region.y_hat, y);
    let in_cone = |cos_t: f64| rho > 1.0 && cos_t > 1.0 / c.a.sqrt();
    let s = region.x_norm.map(|r| r / rho).unwrap_or(f64::NAN);
    match region.which {
        Omega::Omega1 => {
            let (lo, hi) = omega1_cos_band(c);
            // Compare angles so that the band edges match `arccos` exactly.
            let t = cos_t.acos();
            t >= hi.acos() && t <= lo.acos()
        }
        Omega::Omega2 => in_cone(cos_t),
        Omega::Omega3 => in_cone(cos_t) && s > 1.0 / c.a && s < c.a,
        Omega::Greater => in_cone(cos_t) && s > c.a,
        Omega::Less => in_cone(-cos_t) && s > c.a,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub check: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub samples: usize,
    pub min_value: f64,
    pub pass: bool,
}

impl SharpnessReport {
    fn new(check: &str, samples: usize, min_value: f64, pass: bool) -> Self {
        Self {
            check: check.to_string(),
            params: BTreeMap::new(),
            samples,
            min_value,
            pass,
        }
    }

    fn param(mut self, key: &str, v: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }
}

const BATCH: usize = 512;

/// Minimum of `sample(rng)` over `samples` draws, batched over rayon with one
/// ChaCha stream per batch.
fn sampled_min<F>(samples: usize, seed: u64, sample: F) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut best = f64::INFINITY;
            for _ in 0..count {
                best = best.min(sample(&mut rng)?);
            }
            Ok(best)
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Unit vector in `ℝ^dim` at angle `acos(c)` from `ê₁`.
fn direction_with_cos<R: Rng>(rng: &mut R, dim: usize, c: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = c;
    let sin = (1.0 - c * c).max(0.0).sqrt();
    if dim == 2 {
        v[1] = if rng.gen::<bool>() { sin } else { -sin };
    } else if dim > 2 {
        let w = loop {
            let w: Vec<f64> = (1..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = norm(&w);
            if l > 1e-3 && l <= 1.0 {
                break w.into_iter().map(|x| x / l).collect::<Vec<_>>();
            }
        };
        for (i, wi) in w.into_iter().enumerate() {
            v[i + 1] = sin * wi;
        }
    }
    v
}

/// Samples `θ ∈ [0, π/2]`, `y' ∈ Ω₁(ê₁)` (dimension 2), `ζ ∈ [0, 1]`,
/// `s ∈ [0, 10]` and reports the minimum of `(-1)^{μ+ε₀} Φ₋(Θ, sζ)`.
pub fn sign_check_phi(lambda: f64, m: u32, samples: usize, seed: u64) -> Result<SharpnessReport> {
    let c = compute_constants(lambda, m)?;
    let region = RegionSpec::new(Omega::Omega1, c, None)?;
    let (lo, hi) = omega1_cos_band(&c);
    let sign = omega1_sign(m);
    let min = sampled_min(samples, seed, |rng| {
        let theta = rng.gen_range(0.0..=FRAC_PI_2);
        let cos_t = rng.gen_range(hi.acos()..=lo.acos()).cos();
        let rho = rng.gen_range(0.1..10.0);
        let yp: Vec<f64> = direction_with_cos(rng, 2, cos_t).into_iter().map(|v| v * rho).collect();
        let bp = BoundaryPoint::new(yp)?;
        if !region_contains(&region, &bp) {
            return Err(Error::Construction("sample left the band".into()));
        }
        let zeta: f64 = rng.gen_range(0.0..=1.0);
        let s: f64 = rng.gen_range(0.0..=10.0);
        Ok(sign * phi_raw(lambda, m, theta.sin() * cos_t, s * zeta, Sign::Minus))
    })?;
    Ok(SharpnessReport::new("sign_phi_omega1", samples, min, min > 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("beta1", c.beta1)
        .param("seed", seed))
}

/// Negative control for [`sign_check_phi`]: `θ' = 0`, so `Θ = sin θ` ranges
/// over `[1/2, 1]`.
pub fn sign_check_phi_control(lambda: f64, m: u32, samples: usize, seed: u64) -> Result<SharpnessReport> {
    compute_constants(lambda, m)?;
    let sign = omega1_sign(m);
    let min = sampled_min(samples, seed, |rng| {
        let theta: f64 = rng.gen_range(PI / 6.0..=FRAC_PI_2);
        let zeta: f64 = rng.gen_range(0.0..=1.0);
        let s: f64 = rng.gen_range(0.0..=10.0);
        Ok(sign * phi_raw(lambda, m, theta.sin(), s * zeta, Sign::Minus))
    })?;
    Ok(SharpnessReport::new("sign_phi_control", samples, min, min > 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("seed", seed))
}

/// `K_M / (K s^M)`, the integral factor in the representation of `K_M`.
pub fn km_ratio(lambda: f64, m: u32, s: f64, big_theta: f64) -> Result<f64> {
    let scale = s.powi(m as i32);
    Ok(representation_integral(lambda, m, s, big_theta, 1e-13 * scale)? / scale)
}

/// Samples `y' ∈ Ω₃` for the point `x` (on the `ê₁`–`ê_n` plane, `n ≥ 3`)
/// and reports the minimum of `K_M / (K s^M)`, a measured `d₈`.
pub fn sign_check_km_omega3(
    lambda: f64,
    m: u32,
    x: &HalfSpacePoint,
    samples: usize,
    seed: u64,
) -> Result<SharpnessReport> {
    let n = x.dim();
    if n < 3 {
        return domain("the Ω₃ check needs n >= 3");
    }
    if m == 0 {
        // K_0 = K: the ratio is identically one.
        return Ok(SharpnessReport::new("sign_km_omega3", samples, 1.0, true)
            .param("lambda", lambda)
            .param("M", 0));
    }
    let c = compute_constants(lambda, m)?;
    if x.theta().sin() < c.theta0_cone.sin() {
        return domain(format!("sin θ must be at least sin θ₀ = {}", c.theta0_cone.sin()));
    }
    if x.y_hat()[0] != 1.0 {
        return domain("x must lie in the ê₁–ê_n half plane");
    }
    let region = RegionSpec::new(Omega::Omega3, c, Some(x))?;
    let dim = n - 1;
    let min = sampled_min(samples, seed, |rng| {
        let cos_t: f64 = rng.gen_range(1.0 / c.a.sqrt()..=1.0);
        let s: f64 = rng.gen_range(1.0 / c.a..c.a);
        let rho = x.r() / s;
        let yp: Vec<f64> = direction_with_cos(rng, dim, cos_t).into_iter().map(|v| v * rho).collect();
        let bp = BoundaryPoint::new(yp)?;
        if !region_contains(&region, &bp) {
            // Boundary draws (cos θ' = 1/√A exactly, |y'| ≤ 1) are skipped.
            return Ok(f64::INFINITY);
        }
        km_ratio(lambda, m, s, x.theta().sin() * cos_t)
    })?;
    Ok(SharpnessReport::new("sign_km_omega3", samples, min, min > 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("n", n)
        .param("r", x.r())
        .param("theta", x.theta())
        .param("seed", seed))
}

/// Negative control for [`sign_check_km_omega3`]: `s ∈ [A, 10]`, `Θ ∈ [-1, 1]`.
pub fn sign_check_km_control(lambda: f64, m: u32, samples: usize, seed: u64) -> Result<SharpnessReport> {
    let c = compute_constants(lambda, m)?;
    let min = sampled_min(samples, seed, |rng| {
        let s: f64 = rng.gen_range(c.a..=10.0);
        let big_theta: f64 = rng.gen_range(-1.0..=1.0);
        km_ratio(lambda, m, s, big_theta)
    })?;
    Ok(SharpnessReport::new("sign_km_control", samples, min, min > 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("seed", seed))
}

/// Data supported on half balls, together with the quantities the
/// construction is judged by.
#[derive(Debug, Clone)]
pub struct SharpnessData {
    pub data: BoundaryData,
    pub amplitudes: Vec<f64>,
    /// Terms of the summability series; each is bounded by `C/i²`.
    pub summability_terms: Vec<f64>,
}

/// `f = (-1)^{μ+ε₀} f_i [1 - |y' - c_i ê₂|] |y₁'|` on the half balls
/// `B₁(c_i ê₂) ∩ {(-1)^M y₁' ≥ 0}`, with `f_i = d₇ ψ_i c_i^{2λ}`.
/// Requires `ψ_i ≤ c_i^M / i²`.
pub fn data_half_balls(
    dim: usize,
    psi: &[f64],
    centers: &[f64],
    lambda: f64,
    m: u32,
    d7: f64,
) -> Result<SharpnessData> {
    if dim < 2 {
        return Err(Error::Construction("half balls need dimension >= 2".into()));
    }
    if psi.is_empty() || psi.len() != centers.len() {
        return Err(Error::Construction("psi and centers must be non-empty and of equal length".into()));
    }
    if centers[0] < 2.0 || centers.windows(2).any(|w| w[1] - w[0] < 2.0) {
        return Err(Error::Construction("centers must start at 2 and keep the unit balls disjoint".into()));
    }
    if !(d7 > 0.0) {
        return Err(Error::Construction("d7 must be positive".into()));
    }
    for (i, (&p, &c)) in psi.iter().zip(centers).enumerate() {
        let k = (i + 1) as f64;
        if !(p > 0.0) || p > c.powi(m as i32) / (k * k) * (1.0 + 1e-12) {
            return Err(Error::Construction(format!("psi_{} exceeds c^M / i^2", i + 1)));
        }
    }
    let amplitudes: Vec<f64> = psi
        .iter()
        .zip(centers)
        .map(|(&p, &c)| d7 * p * c.powf(2.0 * lambda))
        .collect();
    let summability_terms = amplitudes
        .iter()
        .zip(centers)
        .map(|(&f, &c)| f * c.powf(-(m as f64 + 2.0 * lambda)))
        .collect();
    let sign = omega1_sign(m);
    let side = if m % 2 == 0 { 1.0 } else { -1.0 };
    let (cs, fs) = (centers.to_vec(), amplitudes.clone());
    let eval = move |y: &[f64]| {
        if side * y[0] < 0.0 {
            return 0.0;
        }
        for (&c, &f) in cs.iter().zip(&fs) {
            let d2: f64 = y.iter().enumerate().map(|(k, &v)| if k == 1 { (v - c).powi(2) } else { v * v }).sum();
            if d2 < 1.0 {
                return sign * f * (1.0 - d2.sqrt()) * y[0].abs();
            }
        }
        0.0
    };
    let pieces = centers
        .iter()
        .map(|&c| {
            let mut center = vec![0.0; dim];
            center[1] = c;
            SupportPiece::ball(center, 1.0)
        })
        .collect();
    let data = BoundaryData::new("sharpness_half_balls", dim, Arc::new(eval), f64::NEG_INFINITY, Support::new(pieces)?)?;
    Ok(SharpnessData {
        data,
        amplitudes,
        summability_terms,
    })
}

/// `f_i = d₉^{-1} ψ_i b_i^{2λ-n+1}` with `ψ_i = a_i^{M+2λ} b_i^{-2λ} / i²`.
pub fn super_ball_amplitudes(a: &[f64], b: &[f64], lambda: f64, m: u32, n: usize, d9: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&ai, &bi))| {
            let k = (i + 1) as f64;
            let psi = ai.powf(m as f64 + 2.0 * lambda) * bi.powf(-2.0 * lambda) / (k * k);
            psi * bi.powf(2.0 * lambda - n as f64 + 1.0) / d9
        })
        .collect()
}

/// Balls `B_{b_i}(±a_i ê₁)` carrying `f_i(1 - |y' ∓ a_i ê₁|/b_i)`, the
/// mirrored copy scaled by `(-1)^M A_λ` (`A_λ = 1` when `M = 0`).
pub fn data_balls_super_extension(
    dim: usize,
    a: &[f64],
    b: &[f64],
    amplitudes: &[f64],
    constants: &SharpnessConstants,
) -> Result<SharpnessData> {
    let m = constants.m;
    let lambda = constants.lambda;
    if a.is_empty() || a.len() != b.len() || a.len() != amplitudes.len() {
        return Err(Error::Construction("a, b and amplitudes must be non-empty and of equal length".into()));
    }
    let cone = (1.0 - 1.0 / constants.a).sqrt();
    for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
        if !(bi > 0.0 && bi <= 0.5 * ai) {
            return Err(Error::Construction(format!("ball {}: need 0 < b <= a/2", i + 1)));
        }
        if bi > cone * ai || ai - bi <= 1.0 {
            return Err(Error::Construction(format!("ball {} leaves the cone Ω₂", i + 1)));
        }
    }
    if a.windows(2).any(|w| w[1] < 3.0 * w[0]) {
        return Err(Error::Construction("need a_{i+1} >= 3 a_i".into()));
    }
    let mirror = if m == 0 {
        1.0
    } else if m % 2 == 0 {
        constants.a_lambda
    } else {
        -constants.a_lambda
    };
    let summability_terms = amplitudes
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&f, (&ai, &bi))| f * bi.powi(dim as i32) / ai.powf(m as f64 + 2.0 * lambda))
        .collect();
    let (av, bv, fv) = (a.to_vec(), b.to_vec(), amplitudes.to_vec());
    let eval = move |y: &[f64]| {
        let rest: f64 = y[1..].iter().map(|v| v * v).sum();
        for ((&ai, &bi), &fi) in av.iter().zip(&bv).zip(&fv) {
            let d = ((y[0].abs() - ai).powi(2) + rest).sqrt();
            if d < bi {
                let base = fi * (1.0 - d / bi);
                return if y[0] > 0.0 { base } else { mirror * base };
            }
        }
        0.0
    };
    let mut pieces = Vec::with_capacity(2 * a.len());
    for (&ai, &bi) in a.iter().zip(b) {
        for side in [1.0, -1.0] {
            let mut center = vec![0.0; dim];
            center[0] = side * ai;
            pieces.push(SupportPiece::ball(center, bi));
        }
    }
    let data = BoundaryData::new(
        "sharpness_super_balls",
        dim,
        Arc::new(eval),
        f64::NEG_INFINITY,
        Support::new(pieces)?,
    )?;
    Ok(SharpnessData {
        data,
        amplitudes: amplitudes.to_vec(),
        summability_terms,
    })
}

/// `d₉ = d₈ 2^{-M/2} |S^{n-2}| ∫₀¹ (1-ρ)(1+ρ²)^{-λ} ρ^{n-2} dρ`.
pub fn d9_from_d8(d8: f64, lambda: f64, m: u32, n: usize) -> f64 {
    let r = integrate(
        |p: f64| ((1.0 - p) * (1.0 + p * p).powf(-lambda) * p.powi(n as i32 - 2), 0.0),
        &[0.0, 1.0],
        Tolerance::new(1e-15, 1e-14),
        200,
    );
    d8 * 2f64.powf(-(m as f64) / 2.0) * sphere_area(n - 1) * r.estimate.value
}

/// Measured `F_{λ,M}[f](x̃^{(j)}) |x̃^{(j)}|^{2λ} / f_j` for half-ball data with
/// `ψ_i = c_i^M / i²`, `d₇ = 1` and `x̃^{(j)} = c_j (sin θ ê₁ + cos θ ê₃)`, `n = 3`.
/// The minimum is a measured `d₇^{-1}`; PASS iff it is positive.
pub fn half_ball_lower_bound(
    lambda: f64,
    m: u32,
    centers: &[f64],
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<SharpnessReport> {
    let psi: Vec<f64> = centers
        .iter()
        .enumerate()
        .map(|(i, &c)| c.powi(m as i32) / ((i + 1) as f64).powi(2))
        .collect();
    let built = data_half_balls(2, &psi, centers, lambda, m, 1.0)?;
    let params = KernelParams::first(lambda, m)?;
    let mut min = f64::INFINITY;
    let mut measured = Vec::new();
    for (j, &c) in centers.iter().enumerate() {
        let x = HalfSpacePoint::on_first_axis(3, c, theta)?;
        let v = integral_f(&params, &built.data, &x, spec)?;
        let q = v.value * c.powf(2.0 * lambda) / built.amplitudes[j];
        measured.push(q);
        min = min.min(q);
    }
    Ok(SharpnessReport::new("half_ball_lower_bound", centers.len(), min, min > 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("centers", centers.to_vec())
        .param("theta", theta)
        .param("ratios", measured))
}

/// Checks `F_{λ,M}[f](x̃^{(j)}) ≥ ψ(x̃^{(j)})` for super-ball data with
/// `x̃^{(j)} = a_j ê₁ + b_j ê_n`, amplitudes from `d₉` built on the given `d₈`.
/// Reports `min_j F / ψ_j`; PASS iff it is at least one.
pub fn super_ball_lower_bound(
    lambda: f64,
    m: u32,
    n: usize,
    a: &[f64],
    b: &[f64],
    d8: f64,
    spec: &QuadratureSpec,
) -> Result<SharpnessReport> {
    let c = compute_constants(lambda, m)?;
    let d9 = d9_from_d8(d8, lambda, m, n);
    let amps = super_ball_amplitudes(a, b, lambda, m, n, d9);
    let built = data_balls_super_extension(n - 1, a, b, &amps, &c)?;
    let params = KernelParams::first(lambda, m)?;
    let mut min = f64::INFINITY;
    let mut measured = Vec::new();
    for (j, (&aj, &bj)) in a.iter().zip(b).enumerate() {
        let x = target_point(n, aj, bj)?;
        let v = integral_f(&params, &built.data, &x, spec)?;
        let k = (j + 1) as f64;
        let psi = aj.powf(m as f64 + 2.0 * lambda) * bj.powf(-2.0 * lambda) / (k * k);
        let q = v.value / psi;
        measured.push(q);
        min = min.min(q);
    }
    Ok(SharpnessReport::new("super_ball_lower_bound", a.len(), min, min >= 1.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("n", n)
        .param("d8", d8)
        .param("d9", d9)
        .param("ratios", measured))
}

/// `∫_{Ω_< ∪ Ω_>} f K_M` at `x̃^{(2)}` for the first ball pair of a two-ball
/// instance; PASS iff non-negative.
pub fn balanced_sign_check(
    lambda: f64,
    m: u32,
    n: usize,
    a: [f64; 2],
    b: [f64; 2],
    spec: &QuadratureSpec,
) -> Result<SharpnessReport> {
    let c = compute_constants(lambda, m)?;
    let x = target_point(n, a[1], b[1])?;
    // The first pair must sit inside Ω_> ∪ Ω_< as seen from x̃^{(2)}.
    if a[0] + b[0] >= x.r() / c.a {
        return Err(Error::Construction("first ball pair is not inside Ω_> ∪ Ω_<".into()));
    }
    let built = data_balls_super_extension(n - 1, &a[..1], &b[..1], &[1.0], &c)?;
    let params = KernelParams::first(lambda, m)?;
    let v = integral_f(&params, &built.data, &x, spec)?;
    Ok(SharpnessReport::new("balanced_sign", 2, v.value, v.value >= 0.0)
        .param("lambda", lambda)
        .param("M", m)
        .param("n", n)
        .param("A_lambda", c.a_lambda)
        .param("error", v.error))
}

fn target_point(n: usize, a: f64, b: f64) -> Result<HalfSpacePoint> {
    let mut x = vec![0.0; n];
    x[0] = a;
    x[n - 1] = b;
    HalfSpacePoint::from_cartesian(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_order_constants() {
        let c = compute_constants(0.5, 1).unwrap();
        assert_eq!(c.beta1, 1.0);
        assert_abs_diff_eq!(c.gamma_lm, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.r0, 2f64.powf(0.25), epsilon = 1e-15);
        assert!(c.a > 1.0 && c.a < c.a_upper);
    }

    #[test]
    fn regions() {
        let c = compute_constants(1.0, 2).unwrap();
        let r1 = RegionSpec::new(Omega::Omega1, c, None).unwrap();
        let t = (c.beta1 / 2.5).acos();
        let yp = BoundaryPoint::new(vec![3.0 * t.cos(), 3.0 * t.sin()]).unwrap();
        assert!(region_contains(&r1, &yp));
        assert!(!region_contains(&r1, &BoundaryPoint::new(vec![3.0, 0.0]).unwrap()));
        let x = HalfSpacePoint::on_first_axis(3, 5.0, 1.4).unwrap();
        let r2 = RegionSpec::new(Omega::Omega2, c, Some(&x)).unwrap();
        assert!(region_contains(&r2, &BoundaryPoint::new(vec![1.5, 0.0]).unwrap()));
        let r3 = RegionSpec::new(Omega::Omega3, c, Some(&x)).unwrap();
        assert!(region_contains(&r3, &BoundaryPoint::new(vec![5.0, 0.0]).unwrap()));
        assert!(!region_contains(&r3, &BoundaryPoint::new(vec![-5.0, 0.0]).unwrap()));
        assert!(!region_contains(&r3, &BoundaryPoint::new(vec![1.5, 0.0]).unwrap()));
        let less = RegionSpec::new(Omega::Less, c, Some(&x)).unwrap();
        assert!(region_contains(&less, &BoundaryPoint::new(vec![-1.5, 0.0]).unwrap()));
        assert!(RegionSpec::new(Omega::Omega3, c, None).is_err());
    }

    #[test]
    fn km_ratio_at_the_corner_is_one() {
        for &l in &[0.5, 1.0, 1.5, 2.5] {
            for m in 1..4 {
                assert_abs_diff_eq!(km_ratio(l, m, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn half_ball_mirror_sign() {
        let d = data_half_balls(2, &[1.0], &[4.0], 0.5, 1, 1.0).unwrap();
        assert!(d.data.eval(&[-0.3, 4.0]) < 0.0);
        assert_eq!(d.data.eval(&[0.3, 4.0]), 0.0);
        assert!(data_half_balls(2, &[1.0, 1.0], &[4.0, 5.0], 0.5, 1, 1.0).is_err());
    }
}
