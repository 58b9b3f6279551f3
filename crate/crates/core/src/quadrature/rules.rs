//! Gauss–Legendre rules and a globally adaptive 1D integrator.
//!
//! Each panel is integrated once whole and once as two halves; the
//! difference serves as the error estimate of the (kept) halves value.
//! The panel with the largest estimate is bisected next.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.value, c.abs() * self.error)
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate::new(self.value - o.value, self.error + o.error)
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::zero(), |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `k`-point Gauss–Legendre rule on `[-1, 1]`, nodes by Newton iteration.
pub fn gauss_legendre(k: usize) -> GaussLegendre {
    assert!(k >= 1);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(k, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub const PANEL_ORDER: usize = 10;

pub fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Result of an adaptive integration; `converged` is false when the panel
/// budget ran out before the tolerance was met.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub estimate: Estimate,
    pub converged: bool,
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    left: Estimate,
    right: Estimate,
    err: f64,
    l1: f64,
}

impl Panel {
    fn value(&self) -> Estimate {
        Estimate::new(self.left.value + self.right.value, self.err)
    }
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Rule value, propagated integrand error, and `∫|f|` (for the roundoff floor).
fn apply_rule<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> (Estimate, f64) {
    let rule = panel_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut v = 0.0;
    let mut e = 0.0;
    let mut l1 = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let (fv, fe) = f(c + h * x);
        v += w * fv;
        e += w * fe.abs();
        l1 += w * fv.abs();
    }
    (Estimate::new(h * v, h.abs() * e), h.abs() * l1)
}

fn make_panel<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64, whole: Estimate) -> Panel {
    let m = 0.5 * (a + b);
    let (left, l1a) = apply_rule(f, a, m);
    let (right, l1b) = apply_rule(f, m, b);
    let diff = (whole.value - left.value - right.value).abs();
    let noise = left.error + right.error;
    Panel {
        a,
        b,
        left,
        right,
        err: diff + noise,
        l1: l1a + l1b,
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`. The integrand returns a
/// value and an error bound for that value (zero for exact evaluations).
pub fn integrate<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
    max_panels: usize,
) -> Adaptive {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (whole, _) = apply_rule(&mut f, a, b);
        heap.push(make_panel(&mut f, a, b, whole));
    }
    let total = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| -> Estimate {
        heap.iter().chain(frozen.iter()).map(|p| p.value()).sum()
    };
    let l1_total = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| -> f64 {
        heap.iter().chain(frozen.iter()).map(|p| p.l1).sum()
    };
    // Differences below this are rounding noise and cannot be refined away.
    let floor = |l1: f64| 64.0 * f64::EPSILON * l1;
    let mut panels = heap.len();
    let mut est = total(&heap, &frozen);
    let mut l1 = l1_total(&heap, &frozen);
    loop {
        if est.error <= tol.target(est.value).max(floor(l1)) {
            return Adaptive {
                estimate: est,
                converged: true,
                panels,
            };
        }
        if panels >= max_panels {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        let scale = p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
        if p.b - p.a <= 64.0 * f64::EPSILON * scale {
            frozen.push(p);
            continue;
        }
        let l = make_panel(&mut f, p.a, m, p.left);
        let r = make_panel(&mut f, m, p.b, p.right);
        est = Estimate::new(
            est.value - p.left.value - p.right.value + l.value().value + r.value().value,
            est.error - p.err + l.err + r.err,
        );
        l1 += l.l1 + r.l1 - p.l1;
        heap.push(l);
        heap.push(r);
        panels += 1;
        // Running sums drift; refresh them now and then.
        if panels % 64 == 0 {
            est = total(&heap, &frozen);
            l1 = l1_total(&heap, &frozen);
        }
    }
    let estimate = total(&heap, &frozen);
    let l1 = l1_total(&heap, &frozen);
    Adaptive {
        converged: estimate.error <= tol.target(estimate.value).max(floor(l1)),
        estimate,
        panels,
    }
}

/// Sorted, deduplicated breakpoints clipped to `[a, b]`.
pub fn breakpoints(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.into_iter().filter(|p| p.is_finite() && *p > a && *p < b));
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let span = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|q| p - q > 1e-12 * span) {
            out.push(p);
        }
    }
    if *out.last().unwrap() != b {
        let last = out.len() - 1;
        out[last] = b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let g = gauss_legendre(10);
        let sum_w: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(sum_w, 2.0, epsilon = 1e-14);
        for p in 0..20 {
            let v: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert_abs_diff_eq!(v, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn odd_order_rule() {
        let g = gauss_legendre(7);
        let v: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(12)).sum();
        assert_abs_diff_eq!(v, 2.0 / 13.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_smooth_and_singular() {
        let r = integrate(|x| (x.exp(), 0.0), &[0.0, 1.0], Tolerance::new(1e-14, 1e-14), 100);
        assert!(r.converged);
        assert_abs_diff_eq!(r.estimate.value, 1f64.exp() - 1.0, epsilon = 1e-14);

        let r = integrate(|x| (x.sqrt(), 0.0), &[0.0, 1.0], Tolerance::new(1e-12, 0.0), 2000);
        assert!(r.converged);
        assert_abs_diff_eq!(r.estimate.value, 2.0 / 3.0, epsilon = 1e-12);

        let r = integrate(|x| ((x - 0.3).abs(), 0.0), &[0.0, 1.0], Tolerance::new(1e-13, 0.0), 2000);
        assert_abs_diff_eq!(r.estimate.value, 0.045 + 0.245, epsilon = 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x| (1.0 / x.sqrt(), 0.0), &[0.0, 1.0], Tolerance::new(1e-15, 0.0), 5);
        assert!(!r.converged);
    }

    #[test]
    fn breakpoint_cleanup() {
        let b = breakpoints(0.0, 1.0, [0.5, 0.5, 2.0, -1.0, f64::NAN, 0.25]);
        assert_eq!(b, vec![0.0, 0.25, 0.5, 1.0]);
    }
}
