//! Integration over balls and shells in ℝⁿ⁻¹ in polar coordinates about the
//! region centre, with the polar axis pointing at the projection `y` of the
//! evaluation point so that the kernel peak sits at `ψ = 0`.
//!
//! The sphere `S^{d-1}` is parametrised recursively,
//! `ω = cos ψ₁ e₀ + sin ψ₁ (cos ψ₂ e₁ + sin ψ₂ (…))`, with `±e_{d-1}` at the
//! last level. Every angular level and the radial variable are integrated
//! adaptively; inner errors propagate outward as integrand noise.

use super::rules::{breakpoints, integrate, Adaptive, Estimate, Tolerance};
use super::QuadratureSpec;
use crate::geometry::{Direction, HalfSpacePoint};

pub(crate) const MAX_DIM: usize = 4;
type V = [f64; MAX_DIM];

/// The evaluation point as seen from the boundary.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Target {
    pub dim: usize,
    pub y: V,
    pub xn: f64,
    pub r: f64,
    /// Whether the integrand peaks near `y` on the scale `x_n`.
    pub peaked: bool,
}

impl Target {
    pub fn from_point(x: &HalfSpacePoint) -> Self {
        let dim = x.dim() - 1;
        let mut y = [0.0; MAX_DIM];
        for (i, v) in x.y().into_iter().enumerate() {
            y[i] = v;
        }
        Self {
            dim,
            y,
            xn: x.xn(),
            r: x.r(),
            peaked: true,
        }
    }

    /// The unit point in direction `dir`, used for moment integrals that
    /// only need `Θ`.
    pub fn from_direction(dir: &Direction) -> Self {
        let dim = dir.dim() - 1;
        let mut y = [0.0; MAX_DIM];
        let s = dir.theta().sin();
        for (i, v) in dir.y_hat().iter().enumerate() {
            y[i] = s * v;
        }
        Self {
            dim,
            y,
            xn: dir.theta().cos(),
            r: 1.0,
            peaked: false,
        }
    }
}

/// One quadrature node handed to the integrand.
pub(crate) struct Sample<'a> {
    pub yp: &'a [f64],
    pub rho: f64,
    pub big_theta: f64,
    pub dist_sq: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Region {
    pub center: V,
    pub inner: f64,
    pub outer: f64,
}

impl Region {
    pub fn from_slice(center: &[f64], inner: f64, outer: f64) -> Self {
        let mut c = [0.0; MAX_DIM];
        c[..center.len()].copy_from_slice(center);
        Self {
            center: c,
            inner,
            outer,
        }
    }

    pub fn is_origin_centered(&self) -> bool {
        self.center.iter().all(|v| *v == 0.0)
    }
}

struct Integrator<'a, F> {
    dim: usize,
    target: Target,
    center: V,
    frame: [V; MAX_DIM],
    delta: f64,
    f: &'a F,
    inner_tol: Tolerance,
    inner_panels: usize,
    angular_order: usize,
}

fn norm_v(v: &V) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Orthonormal frame with `e₀ = pole`.
fn frame_from_pole(dim: usize, pole: V) -> [V; MAX_DIM] {
    let mut frame = [[0.0; MAX_DIM]; MAX_DIM];
    frame[0] = pole;
    let mut k = 1;
    for axis in 0..dim {
        if k == dim {
            break;
        }
        let mut v = [0.0; MAX_DIM];
        v[axis] = 1.0;
        for e in frame.iter().take(k) {
            let d: f64 = (0..dim).map(|i| v[i] * e[i]).sum();
            for i in 0..dim {
                v[i] -= d * e[i];
            }
        }
        let len = norm_v(&v);
        if len > 1e-8 {
            for x in v.iter_mut() {
                *x /= len;
            }
            frame[k] = v;
            k += 1;
        }
    }
    frame
}

impl<F: Fn(&Sample) -> f64> Integrator<'_, F> {
    fn eval(&self, t: f64, omega: &V, sin_half_sq: f64) -> f64 {
        let mut yp = [0.0; MAX_DIM];
        for i in 0..self.dim {
            yp[i] = self.center[i] + t * omega[i];
        }
        let rho = norm_v(&yp);
        let tg = &self.target;
        let big_theta = if rho > 0.0 && tg.r > 0.0 {
            let d: f64 = (0..self.dim).map(|i| tg.y[i] * yp[i]).sum();
            (d / (tg.r * rho)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let dist_sq = (t - self.delta).powi(2) + 4.0 * t * self.delta * sin_half_sq + tg.xn * tg.xn;
        (self.f)(&Sample {
            yp: &yp[..self.dim],
            rho,
            big_theta,
            dist_sq,
        })
    }

    /// `∫_{S^{d-1}} g(c + tω) dω`.
    fn sphere(&self, t: f64) -> (f64, f64) {
        self.level(t, 0, [0.0; MAX_DIM], 1.0, 0.0)
    }

    fn level(&self, t: f64, level: usize, base: V, amp: f64, sin_half_sq: f64) -> (f64, f64) {
        let k = self.dim - 1 - level;
        if k == 0 {
            let e = &self.frame[self.dim - 1];
            let mut plus = base;
            let mut minus = base;
            for i in 0..self.dim {
                plus[i] += amp * e[i];
                minus[i] -= amp * e[i];
            }
            // At the top level these are ψ = 0 and ψ = π.
            let (sp, sm) = if level == 0 { (0.0, 1.0) } else { (sin_half_sq, sin_half_sq) };
            return (self.eval(t, &plus, sp) + self.eval(t, &minus, sm), 0.0);
        }
        let e = self.frame[level];
        let integrand = |psi: f64| {
            let (s, c) = psi.sin_cos();
            let mut b = base;
            for i in 0..self.dim {
                b[i] += amp * c * e[i];
            }
            let shs = if level == 0 { (0.5 * psi).sin().powi(2) } else { sin_half_sq };
            let w = s.powi(k as i32 - 1);
            let (v, err) = self.level(t, level + 1, b, amp * s, shs);
            (w * v, w * err)
        };
        let pi = std::f64::consts::PI;
        let breaks = if level == 0 {
            self.psi_breaks(t)
        } else {
            let k = self.angular_order.max(1);
            (0..=k).map(|j| pi * j as f64 / k as f64).collect()
        };
        let r = integrate(integrand, &breaks, self.inner_tol, self.inner_panels);
        (r.estimate.value, r.estimate.error)
    }

    fn psi_breaks(&self, t: f64) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let mut extra = vec![0.5 * pi];
        if self.target.peaked && self.delta > 0.0 && t > 0.0 {
            let w = ((t - self.delta).powi(2) + self.target.xn.powi(2)).sqrt() / (t * self.delta).sqrt();
            let mut p = w;
            while p < pi {
                extra.push(p);
                p *= 4.0;
            }
        }
        breakpoints(0.0, pi, extra)
    }

    /// `t^{d-1} ∫_{S^{d-1}}`, the radial integrand.
    fn radial(&self, t: f64) -> (f64, f64) {
        let (v, e) = self.sphere(t);
        let w = t.powi(self.dim as i32 - 1);
        (w * v, w * e)
    }
}

/// Integrates `f` over `region` for the evaluation point `target`.
/// `extra_breaks` are radial breakpoints (distances from the region centre).
pub(crate) fn integrate_region<F: Fn(&Sample) -> f64>(
    region: &Region,
    target: &Target,
    f: &F,
    spec: &QuadratureSpec,
    extra_breaks: &[f64],
) -> Adaptive {
    let dim = target.dim;
    let mut rel = [0.0; MAX_DIM];
    for i in 0..dim {
        rel[i] = target.y[i] - region.center[i];
    }
    let delta = norm_v(&rel);
    let pole = if delta > 1e-300 {
        let mut p = rel;
        for v in p.iter_mut() {
            *v /= delta;
        }
        p
    } else {
        let mut p = [0.0; MAX_DIM];
        p[0] = 1.0;
        p
    };

    let (a, b) = (region.inner, region.outer);
    let mut extra: Vec<f64> = extra_breaks.to_vec();
    if target.peaked {
        extra.push(delta);
        let mut s = target.xn;
        for _ in 0..6 {
            extra.push(delta - s);
            extra.push(delta + s);
            s *= 4.0;
        }
    }
    if region.is_origin_centered() {
        extra.extend([0.5 * target.r, target.r, 2.0 * target.r]);
    }
    let finite_top = if b.is_finite() {
        b
    } else {
        let far = extra.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max);
        spec.truncation_radius.max(2.0 * far).max(2.0 * (delta + target.xn) + a).max(2.0 * a)
    };
    let panels = spec.radial_panels.max(1);
    for j in 1..panels {
        extra.push(a + (finite_top - a) * j as f64 / panels as f64);
    }
    let breaks = breakpoints(a, finite_top, extra);

    let radial_len = finite_top - a + if b.is_finite() { 0.0 } else { finite_top };
    let inner_tol = Tolerance::new(
        0.1 * spec.abs_tol / radial_len.max(1.0).powi(dim as i32),
        0.1 * spec.rel_tol,
    );
    let integ = Integrator {
        dim,
        target: *target,
        center: region.center,
        frame: frame_from_pole(dim, pole),
        delta,
        f,
        inner_tol,
        inner_panels: spec.max_panels / 4 + 16,
        angular_order: spec.angular_order,
    };
    let tol = Tolerance::new(spec.abs_tol, spec.rel_tol);
    let mut out = integrate(|t| integ.radial(t), &breaks, tol, spec.max_panels);
    if !b.is_finite() {
        // t = R/τ maps [R, ∞) onto (0, 1].
        let r0 = finite_top;
        let tail = integrate(
            |tau| {
                if tau <= 0.0 {
                    return (0.0, 0.0);
                }
                let t = r0 / tau;
                let jac = r0 / (tau * tau);
                let (v, e) = integ.radial(t);
                (v * jac, e * jac)
            },
            &[0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0],
            tol,
            spec.max_panels,
        );
        out = Adaptive {
            estimate: out.estimate + tail.estimate,
            converged: out.converged && tail.converged,
            panels: out.panels + tail.panels,
        };
    }
    out
}

/// Sum of region integrals; `converged` only if every part converged.
pub(crate) fn combine(parts: impl IntoIterator<Item = Adaptive>) -> Adaptive {
    let mut est = Estimate::zero();
    let mut ok = true;
    let mut panels = 0;
    for p in parts {
        est = est + p.estimate;
        ok &= p.converged;
        panels += p.panels;
    }
    Adaptive {
        estimate: est,
        converged: ok,
        panels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_tolerances(1e-12, 1e-12)
    }

    #[test]
    fn ball_volumes_by_region() {
        // ∫_{B_2(c)} 1 = ω_d 2^d for d = 1..4.
        for dim in 1..=4 {
            let mut c = [0.0; MAX_DIM];
            c[0] = 3.0;
            let region = Region { center: c, inner: 0.0, outer: 2.0 };
            let x = HalfSpacePoint::on_first_axis(dim + 1, 2.0, 0.4).unwrap();
            let t = Target::from_point(&x);
            let r = integrate_region(&region, &t, &|_s: &Sample| 1.0, &spec(), &[]);
            let exact = crate::special::unit_ball_volume(dim) * 2f64.powi(dim as i32);
            assert_abs_diff_eq!(r.estimate.value, exact, epsilon = 1e-10 * exact);
        }
    }

    #[test]
    fn infinite_tail() {
        // ∫_{ℝ²} e^{-|y|} dy = 2π.
        let region = Region { center: [0.0; MAX_DIM], inner: 0.0, outer: f64::INFINITY };
        let x = HalfSpacePoint::on_first_axis(3, 1.0, 0.2).unwrap();
        let t = Target::from_point(&x);
        let r = integrate_region(&region, &t, &|s: &Sample| (-s.rho).exp(), &spec(), &[]);
        assert_abs_diff_eq!(r.estimate.value, 2.0 * std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn sample_geometry_is_consistent() {
        let region = Region::from_slice(&[1.0, -2.0, 0.5], 0.0, 1.5);
        let x = HalfSpacePoint::from_cartesian(&[0.3, -1.2, 1.1, 0.2]).unwrap();
        let y = x.y();
        let t = Target::from_point(&x);
        let check = |s: &Sample| {
            let d2: f64 = s.yp.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() + x.xn().powi(2);
            assert!((d2 - s.dist_sq).abs() < 1e-12 * d2.max(1.0));
            let dot: f64 = s.yp.iter().zip(&y).map(|(a, b)| a * b).sum();
            assert!((dot / (x.r() * s.rho) - s.big_theta).abs() < 1e-12);
            1.0
        };
        integrate_region(&region, &t, &check, &QuadratureSpec::default(), &[]);
    }
}
