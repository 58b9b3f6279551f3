use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use halfspace::expansions::{asymptotic_expansion, coefficient_y0, harmonic_term, kelvin_term, HarmonicFamilyTerm};
use halfspace::gegenbauer::{gegenbauer, gegenbauer_at_one, generating_function, generating_function_partial_sum};
use halfspace::geometry::{big_theta, theta_prime, BoundaryPoint, Direction, HalfSpacePoint};
use halfspace::kernels::{kernel_bound_first, kernel_k, kernel_km_direct, kernel_km_integral, KernelParams};
use halfspace::quadrature::{dirichlet_d, neumann_n, BoundaryData, Problem, QuadratureSpec};
use halfspace::report::CheckReport;
use halfspace::sharpness::{compute_constants, quartic_root};
use halfspace::verification::{check_harmonicity, check_refinement_order, fd_laplacian, prop31_residual, Field, Identity};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn unit2(phi: f64) -> Vec<f64> {
    vec![phi.cos(), phi.sin()]
}

fn unit3(a: f64, b: f64) -> Vec<f64> {
    vec![b.sin() * a.cos(), b.sin() * a.sin(), b.cos()]
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn gegenbauer_parity(lambda in 0.05f64..4.0, m in 0i32..=12, t in -1.0f64..=1.0) {
        let a = gegenbauer(lambda, m, -t);
        let b = if m % 2 == 0 { 1.0 } else { -1.0 } * gegenbauer(lambda, m, t);
        prop_assert!((a - b).abs() <= 1e-12 * gegenbauer_at_one(lambda, m));
    }

    #[test]
    fn gegenbauer_majorised_by_value_at_one(lambda in 0.05f64..4.0, m in 0i32..=12, t in -1.0f64..=1.0) {
        let one = gegenbauer_at_one(lambda, m);
        prop_assert!(gegenbauer(lambda, m, t).abs() <= one * (1.0 + 1e-12));
    }

    #[test]
    fn gegenbauer_sign_at_origin(lambda in 0.05f64..4.0, m in 0i32..=6) {
        let v = gegenbauer(lambda, 2 * m, 0.0);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(sign * v > 0.0);
    }

    #[test]
    fn gegenbauer_raising_identities(lambda in 0.1f64..3.0, m in 0i32..=12, t in -1.0f64..=1.0) {
        let mf = m as f64;
        let c = gegenbauer(lambda, m, t);
        let up = |k: i32| gegenbauer(lambda + 1.0, k, t);
        let scale = gegenbauer_at_one(lambda, m) * (mf + 2.0 * lambda);
        prop_assert!((mf * c - 2.0 * lambda * (t * up(m - 1) - up(m - 2))).abs() <= 1e-10 * scale);
        prop_assert!(((mf + 2.0 * lambda) * c - 2.0 * lambda * (up(m) - t * up(m - 1))).abs() <= 1e-10 * scale);
    }

    #[test]
    fn generating_function_partial_sums(lambda in 0.1f64..3.0, t in -1.0f64..=1.0, z in -0.6f64..=0.6) {
        let exact = generating_function(lambda, t, z);
        let partial = generating_function_partial_sum(lambda, t, z, 200).unwrap();
        prop_assert!((partial - exact).abs() <= 1e-8 * exact.abs());
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn cartesian_round_trip(y1 in -5.0f64..5.0, y2 in -5.0f64..5.0, xn in 1e-3f64..5.0) {
        let x = [y1, y2, xn];
        let p = HalfSpacePoint::from_cartesian(&x).unwrap();
        for (a, b) in p.to_cartesian().iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn big_theta_is_a_cosine(
        r in 0.1f64..5.0, theta in 0.0f64..1.5, phi in 0.0f64..(2.0 * PI),
        rho in 0.1f64..5.0, phi_p in 0.0f64..(2.0 * PI),
    ) {
        let x = HalfSpacePoint::from_polar(3, r, theta, &unit2(phi)).unwrap();
        let yp = BoundaryPoint::new(unit2(phi_p).iter().map(|v| rho * v).collect()).unwrap();
        let bt = big_theta(&x, &yp);
        prop_assert!((-1.0..=1.0).contains(&bt));
        prop_assert!((bt - theta.sin() * (phi - phi_p).cos()).abs() <= 1e-12);
    }

    #[test]
    fn theta_prime_is_rotation_invariant(
        r in 0.1f64..5.0, theta in 0.05f64..1.5, a in 0.0f64..(2.0 * PI), b in 0.1f64..3.0,
        rho in 0.1f64..5.0, ap in 0.0f64..(2.0 * PI), bp in 0.1f64..3.0, rot in 0.0f64..(2.0 * PI),
    ) {
        // n = 3: rotate the boundary plane by `rot`.
        let x = HalfSpacePoint::from_polar(3, r, theta, &unit2(a)).unwrap();
        let yp = BoundaryPoint::new(unit2(ap).iter().map(|v| rho * v).collect()).unwrap();
        let xr = HalfSpacePoint::from_polar(3, r, theta, &unit2(a + rot)).unwrap();
        let ypr = BoundaryPoint::new(unit2(ap + rot).iter().map(|v| rho * v).collect()).unwrap();
        prop_assert!((theta_prime(&x, &yp) - theta_prime(&xr, &ypr)).abs() <= 1e-10);
        // n = 4: rotate about the third boundary axis.
        let rot3 = |v: &[f64]| vec![v[0] * rot.cos() - v[1] * rot.sin(), v[0] * rot.sin() + v[1] * rot.cos(), v[2]];
        let yh = unit3(a, b);
        let q: Vec<f64> = unit3(ap, bp).iter().map(|v| rho * v).collect();
        let x4 = HalfSpacePoint::from_polar(4, r, theta, &yh).unwrap();
        let x4r = HalfSpacePoint::from_polar(4, r, theta, &rot3(&yh)).unwrap();
        let t1 = theta_prime(&x4, &BoundaryPoint::new(q.clone()).unwrap());
        let t2 = theta_prime(&x4r, &BoundaryPoint::new(rot3(&q)).unwrap());
        prop_assert!((t1 - t2).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn kernel_definitions_agree(
        lambda in prop::sample::select(vec![0.25, 0.4, 0.5, 1.0, 1.5, 2.5]),
        m in 1u32..=3, s in 0.05f64..4.0, theta in 0.05f64..1.5, phi in 0.0f64..(2.0 * PI),
    ) {
        let params = KernelParams::first(lambda, m).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, s, theta).unwrap();
        let yp = BoundaryPoint::new(unit2(phi)).unwrap();
        let a = kernel_km_direct(&params, &x, &yp).unwrap();
        let b = kernel_km_integral(&params, &x, &yp, 1e-12).unwrap();
        prop_assert!((a - b).abs() <= 1e-8, "direct {a} integral {b}");
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn kernel_positive_and_majorised(
        lambda in 0.2f64..3.0, m in 0u32..=6, r in 0.1f64..5.0, theta in 0.0f64..1.55,
        rho in 0.05f64..8.0, phi in 0.0f64..(2.0 * PI),
    ) {
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let yp = BoundaryPoint::new(unit2(phi).iter().map(|v| rho * v).collect()).unwrap();
        prop_assume!(kernel_k(lambda, &x, &yp).is_ok());
        prop_assert!(kernel_k(lambda, &x, &yp).unwrap() > 0.0);
        let params = KernelParams::first(lambda, m).unwrap();
        let km = kernel_km_direct(&params, &x, &yp).unwrap();
        let bound = kernel_bound_first(&params, &x, &yp).unwrap();
        prop_assert!(km.abs() <= bound * (1.0 + 1e-9) + 1e-300, "|K_M| = {} bound {}", km.abs(), bound);
    }

    #[test]
    fn modified_kernel_tail_vanishes(lambda in 0.2f64..3.0, r in 0.1f64..0.5, theta in 0.0f64..1.55, phi in 0.0f64..(2.0 * PI)) {
        // |y'| = 2 > |x|: the remainder decays geometrically in M.
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let yp = BoundaryPoint::new(unit2(phi).iter().map(|v| 2.0 * v).collect()).unwrap();
        let k = kernel_k(lambda, &x, &yp).unwrap();
        let k12 = kernel_km_direct(&KernelParams::first(lambda, 12).unwrap(), &x, &yp).unwrap();
        prop_assert!(k12.abs() <= 1e-2 * k);
    }

    #[test]
    fn kernels_at_theta_zero_ignore_the_direction(
        lambda in 0.2f64..3.0, m in 0u32..=4, r in 0.1f64..5.0, rho in 0.1f64..5.0,
        phi in 0.0f64..(2.0 * PI), yh in 0.0f64..(2.0 * PI),
    ) {
        prop_assume!((r - rho).abs() > 1e-3);
        let params = KernelParams::first(lambda, m).unwrap();
        let x = HalfSpacePoint::from_polar(3, r, 0.0, &unit2(yh)).unwrap();
        let a = kernel_km_direct(&params, &x, &BoundaryPoint::new(vec![rho, 0.0]).unwrap()).unwrap();
        let b = kernel_km_direct(&params, &x, &BoundaryPoint::new(unit2(phi).iter().map(|v| rho * v).collect()).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn differential_difference_identities(
        id in prop::sample::select(Identity::ALL.to_vec()), lambda in prop::sample::select(vec![0.5, 1.5]),
        m in 0u32..=3, r in 0.5f64..2.5, theta in 0.1f64..1.4, a in 0.0f64..(2.0 * PI),
        rho in 1.0f64..3.0, ap in 0.0f64..(2.0 * PI),
    ) {
        let x = HalfSpacePoint::from_polar(3, r, theta, &unit2(a)).unwrap();
        let yp: Vec<f64> = unit2(ap).iter().map(|v| rho * v).collect();
        let y = x.y();
        let d2 = (y[0] - yp[0]).powi(2) + (y[1] - yp[1]).powi(2) + x.xn().powi(2);
        prop_assume!(d2 >= 0.05);
        let res = prop31_residual(id, lambda, m, &x, &yp, 1e-4).unwrap();
        prop_assert!(res <= 1e-6, "{:?} residual {res}", id);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn poisson_integral_of_one_is_one(r in 0.2f64..5.0, theta in 0.0f64..1.4, phi in 0.0f64..(2.0 * PI)) {
        let one = BoundaryData::constant(2, 1.0).unwrap();
        let x = HalfSpacePoint::from_polar(3, r, theta, &unit2(phi)).unwrap();
        let v = dirichlet_d(&one, &x, &QuadratureSpec::default()).unwrap();
        prop_assert!((v.value - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn positive_data_give_positive_integrals(
        c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, radius in 0.3f64..2.0,
        r in 0.5f64..5.0, theta in 0.0f64..1.4,
    ) {
        let f = BoundaryData::bump(&[c1, c2], radius, 1.0).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let spec = QuadratureSpec::default();
        prop_assert!(dirichlet_d(&f, &x, &spec).unwrap().value > 0.0);
        prop_assert!(neumann_n(&f, &x, &spec).unwrap().value > 0.0);
    }

    #[test]
    fn error_estimates_are_honest(c1 in 1.0f64..3.0, r in 0.5f64..4.0, theta in 0.0f64..1.4) {
        let f = BoundaryData::bump(&[c1, 0.0], 0.8, 1.0).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-8, 1e-8);
        let coarse = dirichlet_d(&f, &x, &spec).unwrap();
        let fine = dirichlet_d(&f, &x, &spec.with_tolerances(5e-9, 1e-8)).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-15));
    }

    #[test]
    fn expansion_plus_remainder_is_the_integral(
        problem in prop::sample::select(vec![Problem::Dirichlet, Problem::Neumann]),
        m in 0u32..=3, r in 4.0f64..20.0, theta in 0.0f64..1.4,
    ) {
        let f = BoundaryData::bump(&[1.0, 0.5], 0.6, 1.0).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-12, 1e-12);
        let e = asymptotic_expansion(problem, &f, m, &x, &spec).unwrap();
        let gap = (e.remainder.value - e.modified_remainder.value).abs();
        prop_assert!(gap <= 1e-9 * e.direct.value.abs().max(1e-12), "gap {gap}");
    }

    #[test]
    fn truncation_radius_is_immaterial(r in 0.5f64..4.0, theta in 0.0f64..1.4, g in -1.5f64..-0.5) {
        let f = BoundaryData::poly_growth(2, g).unwrap();
        let x = HalfSpacePoint::on_first_axis(3, r, theta).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-11, 1e-11);
        let a = dirichlet_d(&f, &x, &spec).unwrap().value;
        let b = dirichlet_d(&f, &x, &spec.with_truncation_radius(2.0 * spec.truncation_radius)).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn harmonic_families_are_harmonic(
        family in prop::sample::select(vec![Problem::Dirichlet, Problem::Neumann]),
        m in 0u32..=6, n in 2usize..=4, r in 1.0f64..3.0, theta in 0.2f64..1.2,
    ) {
        let Ok(term) = HarmonicFamilyTerm::new(family, m, n) else { return Ok(()) };
        let x = HalfSpacePoint::on_first_axis(n, r, theta).unwrap().to_cartesian();
        let report = check_harmonicity("h", &Field::Harmonic(term.clone()), std::slice::from_ref(&x), 1e-3, 1e-6, &QuadratureSpec::default());
        prop_assert!(report.pass, "{}", report.summary_line());
        // The inverted field is not a polynomial: check the FD order instead.
        let kelvin = |p: &[f64]| kelvin_term(&term, p);
        let (k1, k2) = (fd_laplacian(kelvin, &x, 1e-2), fd_laplacian(kelvin, &x, 5e-3));
        let floor = 1e-9 * r.powi(-(term.degree() as i32 + n as i32));
        prop_assert!(k1.abs() <= floor || (k1 / k2).abs().log2() >= 1.8, "orders {k1} {k2}");
    }

    #[test]
    fn dirichlet_coefficients_vanish_on_the_boundary(m in 0u32..=4, c in 1.0f64..3.0) {
        let f = BoundaryData::bump(&[c, 0.5], 0.7, 1.0).unwrap();
        let dir = Direction::on_first_axis(3, FRAC_PI_2).unwrap();
        let v = coefficient_y0(m, &f, &dir, &QuadratureSpec::default()).unwrap();
        prop_assert!(v.value == 0.0);
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn sharpness_constants(lambda in 0.25f64..3.0, m in 1u32..=6) {
        let c = compute_constants(lambda, m).unwrap();
        let sum: f64 = (0..m).map(|k| 2f64.powi(k as i32) * gegenbauer_at_one(lambda, k as i32)).sum();
        prop_assert!((c.gamma_lm - sum.powf(-1.0 / lambda)).abs() <= 1e-12 * c.gamma_lm);
        let q = c.r0.powi(4) + (1.0 - c.gamma_lm) * c.r0 * c.r0 - 2.0;
        prop_assert!(q.abs() <= 1e-12);
        prop_assert!((quartic_root(c.gamma_lm) - c.r0).abs() == 0.0);
        prop_assert!(c.a > 1.0 && c.a < c.a_upper);
        prop_assert!(c.a_lambda >= ((c.a + 1.0) / (c.a - 1.0)).powf(2.0 * lambda));
        let lo = (PI / (m as f64 + 1.0)).cos();
        let hi = (PI / (2.0 * m as f64)).cos();
        prop_assert!(c.beta2 >= lo - 1e-12 && c.beta2 <= hi + 1e-12);
        if m == 1 {
            prop_assert!(c.beta1 == 1.0);
        }
    }

    #[test]
    fn reports_pass_iff_within_tolerance(residual in -1.0f64..1.0, tol in -1.0f64..1.0) {
        let r = CheckReport::new("p", residual, tol);
        prop_assert_eq!(r.pass, residual <= tol);
    }
}

#[test]
fn fd_laplacian_examples() {
    let x = [0.4, -0.3, 1.2];
    assert!(fd_laplacian(|p| p[2], &x, 1e-3).abs() < 1e-9);
    assert!((fd_laplacian(|p| p.iter().map(|v| v * v).sum(), &x, 1e-3) - 6.0).abs() < 1e-8);
    let h3 = HarmonicFamilyTerm::new(Problem::Dirichlet, 2, 3).unwrap();
    assert_eq!(h3.degree(), 3);
    assert!(fd_laplacian(|p| harmonic_term(&h3, p), &x, 1e-3).abs() < 1e-8 * 10.0);
    for n in 2..=4 {
        let mut p = vec![0.5; n];
        p[n - 1] = 1.3;
        assert!(check_refinement_order(&p, 1e-2).pass);
    }
}
