use super::data::{smoothstep, BoundaryData, SupportPiece};
use super::region::{combine, integrate_region, Region, Sample, Target};
use super::rules::{integrate, Adaptive, Estimate, Tolerance};
use super::QuadratureSpec;
use crate::error::{domain, Error, Result};
use crate::geometry::{norm, BoundaryPoint, HalfSpacePoint};
use crate::kernels::{k_from_dist_sq, km_first_raw, km_second_raw, KernelKind, KernelParams};
use crate::special::{alpha, sphere_area};

/// The cutoff `w(y) = s(|y| - 1)` with `s(t) = 3t² - 2t³` on `[0, 1]`:
/// zero on `|y| ≤ 1`, one on `|y| ≥ 2`.
pub fn cutoff_w(y: &BoundaryPoint) -> f64 {
    cutoff_radial(y.norm())
}

fn cutoff_radial(rho: f64) -> f64 {
    smoothstep(rho - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cutoff {
    None,
    /// Multiply by `w`.
    W,
    /// Multiply by `1 - w`.
    OneMinusW,
    /// Restrict to `|y'| > 1`.
    Exterior,
}

impl Cutoff {
    fn weight(self, rho: f64) -> f64 {
        match self {
            Cutoff::None => 1.0,
            Cutoff::W => cutoff_radial(rho),
            Cutoff::OneMinusW => 1.0 - cutoff_radial(rho),
            Cutoff::Exterior => {
                if rho > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Radial window `[lo, hi]` outside which the weight vanishes.
    fn window(self) -> (f64, f64) {
        match self {
            Cutoff::None => (0.0, f64::INFINITY),
            Cutoff::W | Cutoff::Exterior => (1.0, f64::INFINITY),
            Cutoff::OneMinusW => (0.0, 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Kernel {
    lambda: f64,
    m: i32,
    kind: KernelKind,
    r: f64,
}

impl Kernel {
    fn eval(&self, s: &Sample) -> f64 {
        match self.kind {
            KernelKind::First => km_first_raw(self.lambda, self.m, self.r, s.rho, s.big_theta, s.dist_sq),
            KernelKind::Second => km_second_raw(self.lambda, self.m, self.r, s.rho, s.big_theta, s.dist_sq),
        }
    }
}

fn check_point(f: &BoundaryData, x: &HalfSpacePoint) -> Result<()> {
    let n = x.dim();
    if !(2..=5).contains(&n) {
        return Err(Error::Unsupported(format!("dimension n = {n}; supported are 2..=5")));
    }
    if f.dim() + 1 != n {
        return domain(format!("data live on R^{}, point in R^{n}", f.dim()));
    }
    Ok(())
}

fn finish(a: Adaptive, spec: &QuadratureSpec) -> Result<Estimate> {
    if a.converged {
        Ok(a.estimate)
    } else {
        Err(Error::Accuracy {
            value: a.estimate.value,
            error: a.estimate.error,
            tolerance: spec.abs_tol.max(spec.rel_tol * a.estimate.value.abs()),
        })
    }
}

fn piece_contains(p: &SupportPiece, y: &[f64]) -> bool {
    if p.is_origin_centered() {
        let r = norm(y);
        r >= p.inner && r <= p.outer
    } else {
        let d: f64 = y.iter().zip(&p.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        d <= p.outer
    }
}

/// Region for one support piece under a cutoff, or `None` if the weight
/// vanishes on the whole piece.
fn piece_region(p: &SupportPiece, cutoff: Cutoff) -> Option<Region> {
    let (lo, hi) = cutoff.window();
    if p.is_origin_centered() {
        let inner = p.inner.max(lo);
        let outer = p.outer.min(hi);
        (inner < outer).then(|| Region::from_slice(&p.center, inner, outer))
    } else {
        (p.max_norm() > lo && p.min_norm() < hi).then(|| Region::from_slice(&p.center, p.inner, p.outer))
    }
}

/// `∫ c(|y'|) f(y') k(y') dy'` over the support of `f`.
fn weighted_integral(
    f: &BoundaryData,
    target: &Target,
    spec: &QuadratureSpec,
    kernel: &dyn Fn(&Sample) -> f64,
    cutoff: Cutoff,
    skip: Option<usize>,
) -> Adaptive {
    let eval = f.evaluator();
    let integrand = |s: &Sample| {
        let c = cutoff.weight(s.rho);
        if c == 0.0 {
            return 0.0;
        }
        let fv = eval(s.yp);
        if fv == 0.0 {
            return 0.0;
        }
        c * fv * kernel(s)
    };
    let parts = f
        .support()
        .pieces()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .filter_map(|(_, p)| {
            let region = piece_region(p, cutoff)?;
            let extra: &[f64] = if region.is_origin_centered() && cutoff != Cutoff::None {
                &[1.0, 2.0]
            } else {
                &[]
            };
            Some(integrate_region(&region, target, &integrand, spec, extra))
        });
    combine(parts.collect::<Vec<_>>())
}

/// `∫ f(y') k(y') dy'` for an evaluation point given by its direction only;
/// used for expansion moments.
pub(crate) fn moment_integral(
    f: &BoundaryData,
    dir: &crate::geometry::Direction,
    spec: &QuadratureSpec,
    kernel: &dyn Fn(&Sample) -> f64,
) -> Result<Estimate> {
    spec.validate()?;
    if f.dim() + 1 != dir.dim() {
        return domain(format!("data live on R^{}, direction in R^{}", f.dim(), dir.dim()));
    }
    let target = Target::from_direction(dir);
    finish(weighted_integral(f, &target, spec, kernel, Cutoff::None, None), spec)
}

/// `α_n x_n ∫_{|y'|<R} K(n/2, x, y') dy'`, the Poisson mass of a disc
/// centred below `x`.
pub fn poisson_disc_mass(n: usize, xn: f64, radius: f64) -> f64 {
    if radius.is_infinite() {
        return 1.0;
    }
    // t = x_n tan φ turns the radial integral into ∫ sin^{n-2} φ dφ.
    let phi0 = (radius / xn).atan();
    let half_pi = std::f64::consts::FRAC_PI_2;
    if phi0 >= half_pi {
        return 1.0;
    }
    let r = integrate(
        |phi| (phi.sin().powi(n as i32 - 2), 0.0),
        &[phi0, half_pi],
        Tolerance::new(1e-16, 1e-15),
        200,
    );
    1.0 - alpha(n) * sphere_area(n - 1) * r.estimate.value
}

/// Dirichlet integral of `c·f` against `K_m(n/2)`. Close to the boundary, at
/// points inside the support, the value `g(y)` is subtracted in a disc about
/// `y` and its Poisson mass added back analytically.
fn dirichlet_family(f: &BoundaryData, m: u32, x: &HalfSpacePoint, spec: &QuadratureSpec, cutoff: Cutoff) -> Result<Estimate> {
    let n = x.dim();
    let lambda = 0.5 * n as f64;
    let target = Target::from_point(x);
    let r = x.r();
    let kernel = Kernel {
        lambda,
        m: m as i32,
        kind: KernelKind::First,
        r,
    };
    let xn = x.xn();
    let y = x.y();
    let near = xn < 1e-2 * f.scale();
    let host = if near {
        f.support().pieces().iter().position(|p| piece_contains(p, &y))
    } else {
        None
    };
    let a = alpha(n);
    let main = weighted_integral(f, &target, spec, &|s| kernel.eval(s), cutoff, host);
    let mut total = finish(main, spec)?.scale(a * xn);
    if let Some(i) = host {
        let piece = &f.support().pieces()[i];
        let eval = f.evaluator();
        let g = |yp: &[f64], rho: f64| {
            if piece_contains(piece, yp) {
                let c = cutoff.weight(rho);
                if c == 0.0 {
                    0.0
                } else {
                    c * eval(yp)
                }
            } else {
                0.0
            }
        };
        let g0 = g(&y, norm(&y));
        let radius = if piece.outer.is_finite() {
            let d: f64 = y.iter().zip(&piece.center).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            (d + piece.outer) * (1.0 + 1e-12)
        } else {
            f64::INFINITY
        };
        let integrand = |s: &Sample| {
            let gv = g(s.yp, s.rho);
            let k = k_from_dist_sq(lambda, s.dist_sq);
            let mut v = (gv - g0) * k;
            if m > 0 && gv != 0.0 {
                v += gv * (kernel.eval(s) - k);
            }
            v
        };
        let region = Region::from_slice(&y, 0.0, radius);
        let sub = finish(integrate_region(&region, &target, &integrand, spec, &[]), spec)?;
        total = total + sub.scale(a * xn) + Estimate::new(g0 * poisson_disc_mass(n, xn, radius), 0.0);
    }
    Ok(total)
}

fn neumann_family(f: &BoundaryData, m: u32, x: &HalfSpacePoint, spec: &QuadratureSpec, cutoff: Cutoff) -> Result<Estimate> {
    let n = x.dim();
    if n < 3 {
        return Err(Error::Unsupported("the Neumann kernel for n = 2 is logarithmic".into()));
    }
    let lambda = 0.5 * (n as f64 - 2.0);
    let kernel = Kernel {
        lambda,
        m: m as i32,
        kind: KernelKind::First,
        r: x.r(),
    };
    let target = Target::from_point(x);
    let main = weighted_integral(f, &target, spec, &|s| kernel.eval(s), cutoff, None);
    Ok(finish(main, spec)?.scale(alpha(n) / (n as f64 - 2.0)))
}

fn require_modified(f: &BoundaryData, lambda: f64, m: u32) -> Result<()> {
    if !f.satisfies_modified(lambda, m) {
        return domain(format!(
            "data with growth exponent {} are not integrable against K_{m} (lambda = {lambda})",
            f.growth_exponent()
        ));
    }
    Ok(())
}

fn require_origin_clearance(f: &BoundaryData, m: u32) -> Result<()> {
    if m > 0 && f.support().min_norm() <= 0.0 {
        return domain("modified integrals need data vanishing near the origin");
    }
    Ok(())
}

/// `D[f](x) = α_n x_n ∫ f K(n/2, x, y') dy'`.
pub fn dirichlet_d(f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    check_point(f, x)?;
    let lambda = 0.5 * x.dim() as f64;
    if !f.satisfies_classical(lambda) {
        return domain("data grow too fast for the classical Poisson integral");
    }
    dirichlet_family(f, 0, x, spec, Cutoff::None)
}

/// `N[f](x) = α_n/(n-2) ∫ f K((n-2)/2, x, y') dy'`, `n ≥ 3`.
pub fn neumann_n(f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    check_point(f, x)?;
    let lambda = 0.5 * (x.dim() as f64 - 2.0);
    if x.dim() >= 3 && !f.satisfies_classical(lambda) {
        return domain("data grow too fast for the classical Neumann integral");
    }
    neumann_family(f, 0, x, spec, Cutoff::None)
}

/// `D_M[f](x) = α_n x_n ∫ f K_M(n/2, x, y') dy'`.
pub fn dirichlet_dm(m: u32, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if m == 0 {
        return dirichlet_d(f, x, spec);
    }
    spec.validate()?;
    check_point(f, x)?;
    require_origin_clearance(f, m)?;
    require_modified(f, 0.5 * x.dim() as f64, m)?;
    dirichlet_family(f, m, x, spec, Cutoff::None)
}

/// `N_M[f](x) = α_n/(n-2) ∫ f K_M((n-2)/2, x, y') dy'`.
pub fn neumann_nm(m: u32, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if m == 0 {
        return neumann_n(f, x, spec);
    }
    spec.validate()?;
    check_point(f, x)?;
    require_origin_clearance(f, m)?;
    if x.dim() >= 3 {
        require_modified(f, 0.5 * (x.dim() as f64 - 2.0), m)?;
    }
    neumann_family(f, m, x, spec, Cutoff::None)
}

/// `F_{λ,M}[f](x) = ∫_{|y'|>1} f K_M(λ, x, y') dy'`.
pub fn integral_f(params: &KernelParams, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if params.kind() != KernelKind::First {
        return domain("integral_f needs a first-kind kernel");
    }
    spec.validate()?;
    check_point(f, x)?;
    require_modified(f, params.lambda(), params.m())?;
    let kernel = Kernel {
        lambda: params.lambda(),
        m: params.m() as i32,
        kind: KernelKind::First,
        r: x.r(),
    };
    let target = Target::from_point(x);
    finish(weighted_integral(f, &target, spec, &|s| kernel.eval(s), Cutoff::Exterior, None), spec)
}

/// `F̃_{λ,M}[f](x) = ∫ f K̃_M(λ, x, y') dy'`.
pub fn integral_f_second(params: &KernelParams, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if params.kind() != KernelKind::Second {
        return domain("integral_f_second needs a second-kind kernel");
    }
    spec.validate()?;
    check_point(f, x)?;
    if !f.satisfies_decay(params.m()) {
        return domain(format!("data do not decay fast enough for M = {}", params.m()));
    }
    let kernel = Kernel {
        lambda: params.lambda(),
        m: params.m() as i32,
        kind: KernelKind::Second,
        r: x.r(),
    };
    let target = Target::from_point(x);
    finish(weighted_integral(f, &target, spec, &|s| kernel.eval(s), Cutoff::None, None), spec)
}

/// `D̃_M[f] = α_n x_n F̃_{n/2,M}[f]`.
pub fn dirichlet_d_second(m: u32, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if m == 0 {
        return dirichlet_d(f, x, spec);
    }
    let p = KernelParams::second(0.5 * x.dim() as f64, m)?;
    Ok(integral_f_second(&p, f, x, spec)?.scale(alpha(x.dim()) * x.xn()))
}

/// `Ñ_M[f] = α_n/(n-2) F̃_{(n-2)/2,M}[f]`.
pub fn neumann_n_second(m: u32, f: &BoundaryData, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    if m == 0 {
        return neumann_n(f, x, spec);
    }
    let n = x.dim();
    if n < 3 {
        return Err(Error::Unsupported("the Neumann kernel for n = 2 is logarithmic".into()));
    }
    let p = KernelParams::second(0.5 * (n as f64 - 2.0), m)?;
    Ok(integral_f_second(&p, f, x, spec)?.scale(alpha(n) / (n as f64 - 2.0)))
}

/// Which cutoff parts of `u`/`v` carry data.
fn cutoff_parts(f: &BoundaryData) -> (bool, bool) {
    let s = f.support();
    let inner_part = s.min_norm() < 2.0;
    let outer_part = s.max_norm() > 1.0;
    (inner_part, outer_part)
}

/// `u = D_M[w f] + D[(1-w) f]`.
pub fn solution_u(f: &BoundaryData, m: u32, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    check_point(f, x)?;
    let lambda = 0.5 * x.dim() as f64;
    require_modified(f, lambda, m)?;
    if m == 0 {
        return dirichlet_family(f, 0, x, spec, Cutoff::None);
    }
    let (inner, outer) = cutoff_parts(f);
    let mut total = Estimate::zero();
    if outer {
        total = total + dirichlet_family(f, m, x, spec, Cutoff::W)?;
    }
    if inner {
        total = total + dirichlet_family(f, 0, x, spec, Cutoff::OneMinusW)?;
    }
    Ok(total)
}

/// `v = N_M[w f] + N[(1-w) f]`.
pub fn solution_v(f: &BoundaryData, m: u32, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    check_point(f, x)?;
    if x.dim() < 3 {
        return Err(Error::Unsupported("the Neumann kernel for n = 2 is logarithmic".into()));
    }
    require_modified(f, 0.5 * (x.dim() as f64 - 2.0), m)?;
    if m == 0 {
        return neumann_family(f, 0, x, spec, Cutoff::None);
    }
    let (inner, outer) = cutoff_parts(f);
    let mut total = Estimate::zero();
    if outer {
        total = total + neumann_family(f, m, x, spec, Cutoff::W)?;
    }
    if inner {
        total = total + neumann_family(f, 0, x, spec, Cutoff::OneMinusW)?;
    }
    Ok(total)
}

/// Assembled solution for either problem.
pub fn solution(problem: super::Problem, f: &BoundaryData, m: u32, x: &HalfSpacePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    match problem {
        super::Problem::Dirichlet => solution_u(f, m, x, spec),
        super::Problem::Neumann => solution_v(f, m, x, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cutoff_values() {
        let p = |v: &[f64]| BoundaryPoint::new(v.to_vec()).unwrap();
        assert_eq!(cutoff_w(&p(&[0.5, 0.0])), 0.0);
        assert_eq!(cutoff_w(&p(&[3.0, 0.0])), 1.0);
        assert_abs_diff_eq!(cutoff_w(&p(&[1.5, 0.0])), 0.5);
    }

    #[test]
    fn disc_mass_limits() {
        for n in 2..=5 {
            assert_abs_diff_eq!(poisson_disc_mass(n, 1.0, f64::INFINITY), 1.0);
            assert!(poisson_disc_mass(n, 1.0, 1e-6) < 1e-5);
        }
        // n = 3 closed form 1 - x_n/√(R²+x_n²).
        let v = poisson_disc_mass(3, 0.3, 2.0);
        assert_abs_diff_eq!(v, 1.0 - 0.3 / (4.0f64 + 0.09).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn u_ignores_w_when_data_avoid_the_cutoff_band() {
        let inner = BoundaryData::bump(&[0.2, 0.0], 0.7, 1.0).unwrap();
        let outer = BoundaryData::bump(&[3.0, 1.0], 0.8, 1.0).unwrap();
        let f = BoundaryData::linear_combination(1.0, &inner, 1.0, &outer).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-11, 1e-11);
        for m in 1..=2 {
            for &(r, th) in &[(0.7, 0.4), (2.5, 1.0), (6.0, 0.2)] {
                let x = HalfSpacePoint::on_first_axis(3, r, th).unwrap();
                let u = solution_u(&f, m, &x, &spec).unwrap();
                // Sharp split at |y| = 1 instead of w.
                let sharp = dirichlet_family(&f, m, &x, &spec, Cutoff::Exterior).unwrap().value
                    + dirichlet_family(&f, 0, &x, &spec, Cutoff::None).unwrap().value
                    - dirichlet_family(&f, 0, &x, &spec, Cutoff::Exterior).unwrap().value;
                assert_abs_diff_eq!(u.value, sharp, epsilon = 1e-9);
            }
        }
    }
}
