//! Harmonic polynomial families, expansion coefficients and the asymptotic
//! expansions of `D[f]` and `N[f]` for decaying data.
//!
//! Dirichlet side: `h_{m+1}^{(0)}(x) = x_n |x|^m C_m^{n/2}(Θ)` and
//! `Y_{m+1}^{(0)}(x̂) = α_n cos θ ∫ f |y'|^m C_m^{n/2}(Θ) dy'`.
//! Neumann side: `h_m^{(1)}(x) = |x|^m C_m^{(n-2)/2}(Θ)` and
//! `Y_m^{(1)}(x̂) = α_n/(n-2) ∫ f |y'|^m C_m^{(n-2)/2}(Θ) dy'`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{domain, Error, Result};
use crate::gegenbauer::gegenbauer;
use crate::geometry::{dot, norm, Direction, HalfSpacePoint};
use crate::quadrature::{
    dirichlet_d, dirichlet_d_second, moment_integral, neumann_n, neumann_n_second, BoundaryData, Estimate,
    Problem, QuadratureSpec,
};
use crate::special::{alpha, ln_factorial, ln_gamma};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFamilyTerm {
    family: Problem,
    m: u32,
    n: usize,
    pole: Vec<f64>,
}

impl HarmonicFamilyTerm {
    /// Term with pole `ê₁`.
    pub fn new(family: Problem, m: u32, n: usize) -> Result<Self> {
        let mut pole = vec![0.0; n.max(2) - 1];
        pole[0] = 1.0;
        Self::with_pole(family, m, n, pole)
    }

    pub fn with_pole(family: Problem, m: u32, n: usize, pole: Vec<f64>) -> Result<Self> {
        if n < 2 || pole.len() != n - 1 {
            return domain("pole must have n - 1 components, n >= 2");
        }
        if family == Problem::Neumann && n < 3 {
            return Err(Error::Unsupported("the Neumann family needs n >= 3".into()));
        }
        let len = norm(&pole);
        if (len - 1.0).abs() > 1e-12 {
            return domain("pole must be a unit vector");
        }
        Ok(Self { family, m, n, pole })
    }

    pub fn family(&self) -> Problem {
        self.family
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Homogeneity degree: `m + 1` (Dirichlet) or `m` (Neumann).
    pub fn degree(&self) -> u32 {
        match self.family {
            Problem::Dirichlet => self.m + 1,
            Problem::Neumann => self.m,
        }
    }

    fn lambda(&self) -> f64 {
        match self.family {
            Problem::Dirichlet => 0.5 * self.n as f64,
            Problem::Neumann => 0.5 * (self.n as f64 - 2.0),
        }
    }
}

/// Evaluates the harmonic polynomial at any `x ∈ ℝⁿ`.
pub fn harmonic_term(term: &HarmonicFamilyTerm, x: &[f64]) -> f64 {
    let n = term.n;
    let r = norm(x);
    let m = term.m as i32;
    let radial = if r == 0.0 {
        if m == 0 {
            gegenbauer(term.lambda(), 0, 0.0)
        } else {
            0.0
        }
    } else {
        let big_theta = (dot(&x[..n - 1], &term.pole) / r).clamp(-1.0, 1.0);
        r.powi(m) * gegenbauer(term.lambda(), m, big_theta)
    };
    match term.family {
        Problem::Dirichlet => x[n - 1] * radial,
        Problem::Neumann => radial,
    }
}

/// `|x|^{-(d+n-2)} Y(x̂)` with `Y` the restriction of the degree-`d` term to
/// the unit sphere; harmonic away from the origin.
pub fn kelvin_term(term: &HarmonicFamilyTerm, x: &[f64]) -> f64 {
    let r = norm(x);
    let d = term.degree() as i32;
    harmonic_term(term, x) * r.powi(-(2 * d + term.n as i32 - 2))
}

/// `C_m^{n/2}(ŷ₁·ŷ₂)`.
pub fn zonal_harmonic(n: usize, m: u32, y_hat1: &[f64], y_hat2: &[f64]) -> Result<f64> {
    if y_hat1.len() != y_hat2.len() {
        return domain("directions differ in length");
    }
    let t = dot(y_hat1, y_hat2).clamp(-1.0, 1.0);
    Ok(gegenbauer(0.5 * n as f64, m as i32, t))
}

fn require_moments(f: &BoundaryData, m: u32) -> Result<()> {
    if !f.satisfies_decay(m + 1) {
        return domain(format!("moment of order {m} does not exist for these data"));
    }
    Ok(())
}

/// `Y_{m+1}^{(0)}(x̂)`.
pub fn coefficient_y0(m: u32, f: &BoundaryData, dir: &Direction, spec: &QuadratureSpec) -> Result<Estimate> {
    require_moments(f, m)?;
    let n = dir.dim();
    let c = dir.theta().cos();
    if dir.theta() == std::f64::consts::FRAC_PI_2 {
        return Ok(Estimate::zero());
    }
    let lambda = 0.5 * n as f64;
    let mi = m as i32;
    let v = moment_integral(f, dir, spec, &|s| s.rho.powi(mi) * gegenbauer(lambda, mi, s.big_theta))?;
    Ok(v.scale(alpha(n) * c))
}

/// `Y_m^{(1)}(x̂)`, `n ≥ 3`.
pub fn coefficient_y1(m: u32, f: &BoundaryData, dir: &Direction, spec: &QuadratureSpec) -> Result<Estimate> {
    let n = dir.dim();
    if n < 3 {
        return Err(Error::Unsupported("Neumann coefficients need n >= 3".into()));
    }
    require_moments(f, m)?;
    let lambda = 0.5 * (n as f64 - 2.0);
    let mi = m as i32;
    let v = moment_integral(f, dir, spec, &|s| s.rho.powi(mi) * gegenbauer(lambda, mi, s.big_theta))?;
    Ok(v.scale(alpha(n) / (n as f64 - 2.0)))
}

/// Coefficient `γ_{d,m,ℓ}(θ)` of the separation
/// `C_m^{d/2}(sin θ · t) = Σ_{ℓ ≤ m/2} γ_{d,m,ℓ}(θ) C_{m-2ℓ}^{(d-1)/2}(t)`, `d ≥ 2`.
pub fn gamma_coefficient(d: usize, m: u32, l: u32, theta: f64) -> Result<f64> {
    if d < 2 {
        return domain("the separation needs d >= 2");
    }
    if 2 * l > m {
        return domain("l must satisfy 2l <= m");
    }
    let (df, mf, lf) = (d as f64, m as f64, l as f64);
    let h = 0.5 * df;
    let ln_mag = ln_gamma(df - 1.0) + ln_factorial(2 * l) + (df + 2.0 * mf - 4.0 * lf - 1.0).ln()
        + ln_gamma(h + mf - 2.0 * lf)
        + ln_gamma(h + mf - lf)
        - (2.0 * lf - mf) * 4f64.ln()
        - 2.0 * ln_gamma(h)
        - ln_factorial(l)
        - ln_gamma(df + 2.0 * mf - 2.0 * lf);
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let angular = theta.sin().powi((m - 2 * l) as i32) * gegenbauer(h + mf - 2.0 * lf, 2 * l as i32, theta.cos());
    Ok(sign * ln_mag.exp() * angular)
}

/// `Y_{m+1}^{(0)}(x̂)` reassembled as `α_n cos θ Σ_ℓ γ_{n,m,ℓ}(θ) δ_{n,m,ℓ}(ŷ)`
/// with `δ_{n,m,ℓ}(ŷ) = ∫ f |y'|^m C_{m-2ℓ}^{(n-1)/2}(ŷ·ŷ') dy'`.
pub fn addition_separation(
    n: usize,
    m: u32,
    theta: f64,
    y_hat: &[f64],
    f: &BoundaryData,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    require_moments(f, m)?;
    let dir = Direction::new(n, theta, y_hat)?;
    let boundary_dir = Direction::new(n, std::f64::consts::FRAC_PI_2, y_hat)?;
    let lambda = 0.5 * (n as f64 - 1.0);
    let mi = m as i32;
    let mut total = Estimate::zero();
    for l in 0..=m / 2 {
        let g = gamma_coefficient(n, m, l, theta)?;
        let deg = mi - 2 * l as i32;
        let delta = moment_integral(f, &boundary_dir, spec, &|s| s.rho.powi(mi) * gegenbauer(lambda, deg, s.big_theta))?;
        total = total + delta.scale(g);
    }
    Ok(total.scale(alpha(n) * dir.theta().cos()))
}

/// `Y_m^{(1)}(x̂)` for `f(y) = exp(-|y|)` in closed form; zero for odd `m`.
pub fn exp_example_coefficient(n: usize, m: u32, theta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Unsupported("Neumann coefficients need n >= 3".into()));
    }
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let (ln_mag, sign) = exp_example_log(n, m / 2, theta);
    Ok(sign * ln_mag.exp())
}

/// `Y_{2k}^{(1)}(x̂)` for `f(y) = exp(-|y|)`.
pub fn example_exp_closed_form(n: usize, k: u32, theta: f64) -> Result<f64> {
    exp_example_coefficient(n, 2 * k, theta)
}

/// `(ln |Y_{2k}^{(1)}|, sign)`; the log is `-∞` when the Gegenbauer factor vanishes.
fn exp_example_log(n: usize, k: u32, theta: f64) -> (f64, f64) {
    let nf = n as f64;
    let kf = k as f64;
    let c = gegenbauer(0.5 * (nf - 2.0), 2 * k as i32, theta.cos());
    let ln_mag = (nf - 2.0) * 2f64.ln() + ln_gamma(0.5 * nf - 1.0) + ln_factorial(2 * k) + ln_gamma(kf + 0.5 * nf)
        - std::f64::consts::PI.ln()
        - ln_factorial(k)
        + c.abs().ln();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 } * c.signum();
    (ln_mag, sign)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DivergenceTerm {
    pub k: u32,
    pub ln_magnitude: f64,
    pub magnitude: f64,
}

/// `|r^{-(2k+n-2)} Y_{2k}^{(1)}(x̂)|` for `k = 0..=k_max`, computed in log space.
pub fn divergence_demo(n: usize, r: f64, theta: f64, k_max: u32) -> Result<Vec<DivergenceTerm>> {
    if n < 3 {
        return Err(Error::Unsupported("Neumann coefficients need n >= 3".into()));
    }
    if !(r > 0.0) {
        return domain("r must be positive");
    }
    Ok((0..=k_max)
        .map(|k| {
            let (ln_y, _) = exp_example_log(n, k, theta);
            let ln_magnitude = ln_y - (2.0 * k as f64 + n as f64 - 2.0) * r.ln();
            DivergenceTerm {
                k,
                ln_magnitude,
                magnitude: ln_magnitude.exp(),
            }
        })
        .collect())
}

/// Smallest `k*` after which every available term ratio exceeds one, with at
/// least `run` increasing steps. `None` if the tail never grows that long.
pub fn growth_onset(terms: &[DivergenceTerm], run: usize) -> Option<u32> {
    let grows = |i: usize| terms[i + 1].ln_magnitude > terms[i].ln_magnitude;
    let steps = terms.len().checked_sub(1)?;
    let mut start = steps;
    while start > 0 && grows(start - 1) {
        start -= 1;
    }
    (steps - start >= run).then(|| terms[start].k)
}

/// Partial sum, direct value and remainders at one point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExpansionEvaluation {
    pub partial_sum: Estimate,
    pub direct: Estimate,
    /// `direct - partial_sum`.
    pub remainder: Estimate,
    /// `D̃_M[f](x)` or `Ñ_M[f](x)`, computed independently.
    pub modified_remainder: Estimate,
}

/// The truncated expansion of `D[f]` or `N[f]` with coefficients cached per
/// direction.
pub struct AsymptoticExpansion {
    problem: Problem,
    data: BoundaryData,
    m: u32,
    spec: QuadratureSpec,
    cache: RwLock<HashMap<(u32, Vec<u64>), Estimate>>,
}

impl AsymptoticExpansion {
    pub fn new(problem: Problem, data: BoundaryData, m: u32, spec: QuadratureSpec) -> Result<Self> {
        if !data.satisfies_decay(m.max(1)) {
            return domain(format!("data do not decay fast enough for M = {m}"));
        }
        Ok(Self {
            problem,
            data,
            m,
            spec,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// `Y_{j+1}^{(0)}` (Dirichlet) or `Y_j^{(1)}` (Neumann) at `dir`.
    pub fn coefficient(&self, j: u32, dir: &Direction) -> Result<Estimate> {
        let mut key_dir = vec![dir.theta().to_bits()];
        key_dir.extend(dir.y_hat().iter().map(|v| v.to_bits()));
        let key = (j, key_dir);
        if let Some(v) = self.cache.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = match self.problem {
            Problem::Dirichlet => coefficient_y0(j, &self.data, dir, &self.spec)?,
            Problem::Neumann => coefficient_y1(j, &self.data, dir, &self.spec)?,
        };
        self.cache.write().unwrap().insert(key, v);
        Ok(v)
    }

    pub fn partial_sum(&self, x: &HalfSpacePoint) -> Result<Estimate> {
        let n = x.dim() as i32;
        let dir = x.direction();
        let shift = match self.problem {
            Problem::Dirichlet => n - 1,
            Problem::Neumann => n - 2,
        };
        let mut total = Estimate::zero();
        for j in 0..self.m {
            let y = self.coefficient(j, &dir)?;
            total = total + y.scale(x.r().powi(-(j as i32 + shift)));
        }
        Ok(total)
    }

    pub fn evaluate(&self, x: &HalfSpacePoint) -> Result<ExpansionEvaluation> {
        let partial_sum = self.partial_sum(x)?;
        let (direct, modified_remainder) = match self.problem {
            Problem::Dirichlet => (
                dirichlet_d(&self.data, x, &self.spec)?,
                dirichlet_d_second(self.m, &self.data, x, &self.spec)?,
            ),
            Problem::Neumann => (
                neumann_n(&self.data, x, &self.spec)?,
                neumann_n_second(self.m, &self.data, x, &self.spec)?,
            ),
        };
        Ok(ExpansionEvaluation {
            partial_sum,
            direct,
            remainder: direct - partial_sum,
            modified_remainder,
        })
    }
}

/// One-shot form of [`AsymptoticExpansion::evaluate`].
pub fn asymptotic_expansion(
    problem: Problem,
    f: &BoundaryData,
    m: u32,
    x: &HalfSpacePoint,
    spec: &QuadratureSpec,
) -> Result<ExpansionEvaluation> {
    AsymptoticExpansion::new(problem, f.clone(), m, *spec)?.evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_terms() {
        let t = HarmonicFamilyTerm::new(Problem::Dirichlet, 0, 3).unwrap();
        assert_abs_diff_eq!(harmonic_term(&t, &[0.3, -0.2, 0.7]), 0.7, epsilon = 1e-15);
        let t = HarmonicFamilyTerm::new(Problem::Neumann, 1, 3).unwrap();
        assert_abs_diff_eq!(harmonic_term(&t, &[1.0, 0.0, 1.0]), 1.0, epsilon = 1e-15);
        assert!(HarmonicFamilyTerm::new(Problem::Neumann, 1, 2).is_err());
    }

    #[test]
    fn gamma_low_orders() {
        for n in 2..=6 {
            for &th in &[0.0, 0.4, 1.2] {
                assert_abs_diff_eq!(gamma_coefficient(n, 0, 0, th).unwrap(), 1.0, epsilon = 1e-14);
                let expect = n as f64 * f64::sin(th) / (n as f64 - 1.0);
                assert_abs_diff_eq!(gamma_coefficient(n, 1, 0, th).unwrap(), expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn exp_closed_form_values() {
        assert_abs_diff_eq!(example_exp_closed_form(3, 0, 0.4).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(exp_example_coefficient(3, 3, 0.4).unwrap(), 0.0);
        // n = 3, k = 1: -3 P₂(cos θ).
        let th = 0.7f64;
        let p2 = 0.5 * (3.0 * th.cos().powi(2) - 1.0);
        assert_abs_diff_eq!(example_exp_closed_form(3, 1, th).unwrap(), -3.0 * p2, epsilon = 1e-13);
    }

    #[test]
    fn zonal_values() {
        let v = zonal_harmonic(3, 4, &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(v, crate::special::binomial(6.0, 4), epsilon = 1e-12);
        assert_abs_diff_eq!(zonal_harmonic(3, 3, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }
}
