//! Boundary data `f: ℝⁿ⁻¹ → ℝ` with a growth class and a support description.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::geometry::norm;
use crate::special::{sphere_area, unit_ball_volume};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A closed ball (`inner = 0`) or, when centred at the origin, a shell
/// `inner ≤ |y| ≤ outer`. `outer` may be infinite for origin-centred pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPiece {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
}

impl SupportPiece {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Self {
            center,
            inner: 0.0,
            outer: radius,
        }
    }

    pub fn shell(dim: usize, inner: f64, outer: f64) -> Self {
        Self {
            center: vec![0.0; dim],
            inner,
            outer,
        }
    }

    pub fn is_origin_centered(&self) -> bool {
        self.center.iter().all(|c| *c == 0.0)
    }

    /// Smallest `|y|` over the piece.
    pub fn min_norm(&self) -> f64 {
        if self.is_origin_centered() {
            self.inner
        } else {
            (norm(&self.center) - self.outer).max(0.0)
        }
    }

    /// Largest `|y|` over the piece.
    pub fn max_norm(&self) -> f64 {
        norm(&self.center) + self.outer
    }

    pub fn width(&self) -> f64 {
        self.outer - self.inner
    }

    fn overlaps(&self, o: &SupportPiece) -> bool {
        if self.is_origin_centered() && o.is_origin_centered() {
            return self.inner < o.outer && o.inner < self.outer;
        }
        let d: f64 = self
            .center
            .iter()
            .zip(&o.center)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if self.is_origin_centered() {
            return d + o.outer > self.inner && d - o.outer < self.outer;
        }
        if o.is_origin_centered() {
            return o.overlaps(self);
        }
        d < self.outer + o.outer
    }
}

/// Pairwise disjoint pieces outside of which the data vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pieces: Vec<SupportPiece>,
}

impl Support {
    pub fn global(dim: usize) -> Self {
        Self {
            pieces: vec![SupportPiece::shell(dim, 0.0, f64::INFINITY)],
        }
    }

    pub fn new(pieces: Vec<SupportPiece>) -> Result<Self> {
        for (i, p) in pieces.iter().enumerate() {
            if !(p.inner >= 0.0 && p.outer > p.inner) {
                return domain("support piece needs 0 <= inner < outer");
            }
            if !p.is_origin_centered() && (p.inner != 0.0 || !p.outer.is_finite()) {
                return domain("off-origin support pieces must be finite balls");
            }
            for q in &pieces[..i] {
                if p.overlaps(q) {
                    return domain("support pieces overlap");
                }
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[SupportPiece] {
        &self.pieces
    }

    pub fn is_compact(&self) -> bool {
        self.pieces.iter().all(|p| p.outer.is_finite())
    }

    pub fn max_norm(&self) -> f64 {
        self.pieces.iter().map(|p| p.max_norm()).fold(0.0, f64::max)
    }

    pub fn min_norm(&self) -> f64 {
        self.pieces.iter().map(|p| p.min_norm()).fold(f64::INFINITY, f64::min)
    }

    /// Union, falling back to one covering shell when pieces overlap.
    fn union(&self, o: &Support, dim: usize) -> Support {
        let mut pieces = self.pieces.clone();
        pieces.extend(o.pieces.iter().cloned());
        Support::new(pieces.clone()).unwrap_or_else(|_| {
            let inner = pieces.iter().map(|p| p.min_norm()).fold(f64::INFINITY, f64::min);
            let outer = pieces.iter().map(|p| p.max_norm()).fold(0.0, f64::max);
            Support {
                pieces: vec![SupportPiece::shell(dim, inner, outer)],
            }
        })
    }
}

#[derive(Clone)]
pub struct BoundaryData {
    name: String,
    dim: usize,
    evaluator: Evaluator,
    growth_exponent: f64,
    support: Support,
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryData")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("growth_exponent", &self.growth_exponent)
            .field("support", &self.support)
            .finish()
    }
}

/// `exp(1 - 1/(1-u²))` on `|u| < 1`, zero outside; peak value 1.
pub fn bump_profile(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `3t² - 2t³` on `t = clamp(|y| - 1, 0, 1)`.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

impl BoundaryData {
    /// General constructor. `growth_exponent` is the smallest `g` with
    /// `|f(y)| ≤ C(1+|y|)^g`; use `-∞` for data with compact support or
    /// faster-than-polynomial decay.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        evaluator: Evaluator,
        growth_exponent: f64,
        support: Support,
    ) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return domain(format!("boundary dimension {dim} outside 1..=4"));
        }
        if support.pieces.iter().any(|p| p.center.len() != dim) {
            return domain("support piece dimension mismatch");
        }
        let growth_exponent = if support.is_compact() {
            f64::NEG_INFINITY
        } else {
            growth_exponent
        };
        Ok(Self {
            name: name.into(),
            dim,
            evaluator,
            growth_exponent,
            support,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.evaluator)(y)
    }

    pub(crate) fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Length scale of the data: the thinnest support piece, or 1 for
    /// unbounded pieces.
    pub fn scale(&self) -> f64 {
        self.support
            .pieces
            .iter()
            .map(|p| if p.outer.is_finite() { p.width() } else { 1.0 })
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫ |f| (1+|y|)^{-2λ} dy < ∞`, the condition for the classical integral.
    pub fn satisfies_classical(&self, lambda: f64) -> bool {
        self.growth_exponent + self.dim as f64 - 2.0 * lambda < 0.0
    }

    /// `∫_{|y|>1} |f| |y|^{-(M+2λ)} dy < ∞`.
    pub fn satisfies_modified(&self, lambda: f64, m: u32) -> bool {
        self.growth_exponent + self.dim as f64 - m as f64 - 2.0 * lambda < 0.0
    }

    /// `∫ |f| (|y|^{M-1} + 1) dy < ∞`.
    pub fn satisfies_decay(&self, m: u32) -> bool {
        let top = (m as f64 - 1.0).max(0.0);
        self.growth_exponent + self.dim as f64 + top < 0.0
    }

    /// Smallest `M` for which [`Self::satisfies_modified`] holds with the
    /// given `λ`.
    pub fn minimal_modification_order(&self, lambda: f64) -> u32 {
        if self.growth_exponent == f64::NEG_INFINITY {
            return 0;
        }
        let need = self.growth_exponent + self.dim as f64 - 2.0 * lambda;
        if need < 0.0 {
            0
        } else {
            need.floor() as u32 + 1
        }
    }

    pub fn scaled(&self, c: f64) -> BoundaryData {
        let f = self.evaluator.clone();
        BoundaryData {
            name: format!("{c}*{}", self.name),
            dim: self.dim,
            evaluator: Arc::new(move |y| c * f(y)),
            growth_exponent: self.growth_exponent,
            support: self.support.clone(),
        }
    }

    /// `a f + b g`.
    pub fn linear_combination(a: f64, f: &BoundaryData, b: f64, g: &BoundaryData) -> Result<BoundaryData> {
        if f.dim != g.dim {
            return domain("data dimensions differ");
        }
        let (fe, ge) = (f.evaluator.clone(), g.evaluator.clone());
        Ok(BoundaryData {
            name: format!("{a}*{}+{b}*{}", f.name, g.name),
            dim: f.dim,
            evaluator: Arc::new(move |y| a * fe(y) + b * ge(y)),
            growth_exponent: f.growth_exponent.max(g.growth_exponent),
            support: f.support.union(&g.support, f.dim),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new("zero", dim, Arc::new(|_| 0.0), f64::NEG_INFINITY, Support::new(vec![])?)
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::new("constant", dim, Arc::new(move |_| c), 0.0, Support::global(dim))
    }

    /// `amplitude · exp(1 - 1/(1-u²))`, `u = |y - center| / radius`.
    pub fn bump(center: &[f64], radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return domain("bump radius must be positive");
        }
        let c = center.to_vec();
        let dim = c.len();
        let cc = c.clone();
        let eval = move |y: &[f64]| {
            let d2: f64 = y.iter().zip(&cc).map(|(a, b)| (a - b).powi(2)).sum();
            amplitude * bump_profile(d2.sqrt() / radius)
        };
        Self::new(
            "bump",
            dim,
            Arc::new(eval),
            f64::NEG_INFINITY,
            Support::new(vec![SupportPiece::ball(c, radius)])?,
        )
    }

    /// Radially symmetric bump on `inner ≤ |y| ≤ outer`, normalized to unit mass.
    pub fn radial_bump(dim: usize, inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner) {
            return domain("radial bump needs 0 <= inner < outer");
        }
        let mid = 0.5 * (inner + outer);
        let half = 0.5 * (outer - inner);
        let profile = move |rho: f64| bump_profile((rho - mid) / half);
        let mass = radial_mass(dim, inner, outer, profile);
        let eval = move |y: &[f64]| profile(norm(y)) / mass;
        Self::new(
            "radial_bump",
            dim,
            Arc::new(eval),
            f64::NEG_INFINITY,
            Support::new(vec![SupportPiece::shell(dim, inner, outer)])?,
        )
    }

    /// `exp(-|y|)`.
    pub fn exp_decay(dim: usize) -> Result<Self> {
        Self::new(
            "exp_decay",
            dim,
            Arc::new(|y| (-norm(y)).exp()),
            f64::NEG_INFINITY,
            Support::global(dim),
        )
    }

    /// `(1 + |y|²)^{g/2}`.
    pub fn poly_growth(dim: usize, g: f64) -> Result<Self> {
        Self::new(
            "poly_growth",
            dim,
            Arc::new(move |y| (1.0 + y.iter().map(|v| v * v).sum::<f64>()).powf(0.5 * g)),
            g,
            Support::global(dim),
        )
    }

    /// `(1 + |y|²)^{g/2} · s(|y| - r_in)` with `s` the smoothstep, so the data
    /// vanish on `|y| ≤ r_in` and are unmodified beyond `r_in + 1`.
    pub fn poly_growth_outside(dim: usize, g: f64, r_in: f64) -> Result<Self> {
        Self::new(
            "poly_growth_outside",
            dim,
            Arc::new(move |y| {
                let r2 = y.iter().map(|v| v * v).sum::<f64>();
                (1.0 + r2).powf(0.5 * g) * smoothstep(r2.sqrt() - r_in)
            }),
            g,
            Support::new(vec![SupportPiece::shell(dim, r_in, f64::INFINITY)])?,
        )
    }

    /// Bumps of radius `radius` centred at `first · ratio^k ê₁`, `k < count`,
    /// with amplitude `|center|^g`.
    pub fn bump_train(dim: usize, count: usize, first: f64, ratio: f64, radius: f64, g: f64) -> Result<Self> {
        let centers: Vec<f64> = (0..count).map(|k| first * ratio.powi(k as i32)).collect();
        let pieces = centers
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; dim];
                v[0] = c;
                SupportPiece::ball(v, radius)
            })
            .collect();
        let support = Support::new(pieces)?;
        let cs = centers.clone();
        let eval = move |y: &[f64]| {
            let rest: f64 = y[1..].iter().map(|v| v * v).sum();
            cs.iter()
                .map(|&c| c.powf(g) * bump_profile(((y[0] - c).powi(2) + rest).sqrt() / radius))
                .sum()
        };
        Self::new("bump_train", dim, Arc::new(eval), f64::NEG_INFINITY, support)
    }
}

/// `∫ profile(|y|) dy` over the shell, via the radial integral.
fn radial_mass(dim: usize, inner: f64, outer: f64, profile: impl Fn(f64) -> f64) -> f64 {
    use super::rules::{integrate, Tolerance};
    let r = integrate(
        |t| (profile(t) * t.powi(dim as i32 - 1), 0.0),
        &[inner, 0.5 * (inner + outer), outer],
        Tolerance::new(0.0, 1e-14),
        500,
    );
    sphere_area(dim) * r.estimate.value
}

/// `∫ (1 - |y|) |y₁| dy` over the half unit ball `{|y| < 1, y₁ > 0}` in
/// ℝ^dim, equal to `ω_{dim-1} / ((dim+1)(dim+2))`.
pub fn half_ball_profile_mass(dim: usize) -> f64 {
    unit_ball_volume(dim - 1) / ((dim as f64 + 1.0) * (dim as f64 + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn smoothstep_values() {
        assert_eq!(smoothstep(-0.5), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert_abs_diff_eq!(smoothstep(0.5), 0.5);
    }

    #[test]
    fn support_overlap_detection() {
        let a = SupportPiece::ball(vec![0.0, 3.0], 1.0);
        let b = SupportPiece::ball(vec![0.0, 4.5], 1.0);
        assert!(Support::new(vec![a.clone(), b]).is_err());
        let c = SupportPiece::ball(vec![0.0, 6.0], 1.0);
        assert!(Support::new(vec![a.clone(), c]).is_ok());
        let shell = SupportPiece::shell(2, 1.0, 1.5);
        assert!(Support::new(vec![a, shell]).is_ok());
    }

    #[test]
    fn growth_classes() {
        let f = BoundaryData::poly_growth(2, 1.5).unwrap();
        assert!(!f.satisfies_classical(1.5));
        assert!(f.satisfies_modified(1.5, 2));
        assert!(!f.satisfies_modified(1.5, 0));
        let e = BoundaryData::exp_decay(2).unwrap();
        assert!(e.satisfies_decay(7));
        let b = BoundaryData::bump(&[0.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!(b.growth_exponent(), f64::NEG_INFINITY);
        assert_eq!(f.minimal_modification_order(1.5), 1);
        assert_eq!(b.minimal_modification_order(1.5), 0);
    }

    #[test]
    fn half_ball_mass() {
        assert_abs_diff_eq!(half_ball_profile_mass(2), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(half_ball_profile_mass(1), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn radial_bump_unit_mass() {
        let f = BoundaryData::radial_bump(1, 2.0, 3.0).unwrap();
        // Two symmetric intervals on the line.
        let h = 1e-4;
        let mut s = 0.0;
        let mut t = 2.0 + 0.5 * h;
        while t < 3.0 {
            s += 2.0 * f.eval(&[t]) * h;
            t += h;
        }
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-7);
    }
}
