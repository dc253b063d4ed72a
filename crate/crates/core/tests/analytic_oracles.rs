use kerrsplit::analytic::{chi, dispersion_set, kerr_coefficient, taylor_validity_radius};
use kerrsplit::{Complex64, PhysParams};

const H: f64 = 1e-3;

fn f(p: &PhysParams, w: f64) -> Complex64 {
    chi(w, p).unwrap()
}

/// Four-point central differences of chi at omega = 0 with step `h`.
fn central(p: &PhysParams, h: f64) -> [Complex64; 3] {
    let (m2, m1, p1, p2) = (f(p, -2.0 * h), f(p, -h), f(p, h), f(p, 2.0 * h));
    let f0 = f(p, 0.0);
    [
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h),
        (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h),
    ]
}

fn grid() -> impl Iterator<Item = PhysParams> {
    (0..10).flat_map(|i| {
        (0..10).map(move |j| {
            let delta = 8.0 * i as f64 / 9.0;
            let oc = 0.5 + 1.5 * j as f64 / 9.0;
            PhysParams::raman(oc, delta, 4.0)
        })
    })
}

/// The plain third-derivative stencil is only second order; its truncation
/// error `h^2 chi^(5) / 4` reaches 5e-3 relative at small control and large
/// detuning, so it is Richardson-extrapolated over `h` and `h/2`.
fn third_derivative(p: &PhysParams) -> Complex64 {
    (4.0 * central(p, 0.5 * H)[2] - central(p, H)[2]) / 3.0
}

#[test]
fn closed_form_betas_match_finite_differences() {
    let mut worst = [0.0f64; 3];
    for p in grid() {
        let set = dispersion_set(&p).unwrap();
        let fd = central(&p, H);
        let fd = [fd[0], fd[1], third_derivative(&p)];
        let c2 = p.omega_c.norm_sqr();
        let a = Complex64::new(p.delta_p, 0.5 * p.gamma);
        for n in 0..3 {
            let exact = set.beta[n + 1];
            // beta_3 vanishes at |Omega_c|^2 = -(delta + i/2)^2; compare
            // against the size of its two terms there.
            let scale = if n == 2 {
                exact.norm().max(1e-3 * 6.0 * (c2 + a.norm_sqr()) / (c2 * c2 * c2))
            } else {
                exact.norm()
            };
            worst[n] = worst[n].max((fd[n] - exact).norm() / scale);
        }
    }
    println!("max relative error beta1..3: {worst:?}");
    assert!(worst.iter().all(|&e| e < 1e-5), "{worst:?}");
}

#[test]
fn beta0_vanishes_at_raman_resonance() {
    for p in grid() {
        assert_eq!(dispersion_set(&p).unwrap().beta[0], Complex64::new(0.0, 0.0));
        assert_eq!(f(&p, 0.0), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn beta2_special_values() {
    let b2 = dispersion_set(&PhysParams::raman(1.0, 0.0, 4.0)).unwrap().beta[2];
    assert_eq!(b2, Complex64::new(0.0, 1.0));
    let b2 = dispersion_set(&PhysParams::raman(1.0, 4.0, 4.0)).unwrap().beta[2];
    assert!((b2 - Complex64::new(8.0, 1.0)).norm() < 1e-14);
}

#[test]
fn kerr_coefficient_values() {
    // -2 / (dk + i/2) by hand: dk = 0 gives 4i, dk = 4 gives -2 (4 - i/2) / 16.25
    let r0 = kerr_coefficient(&PhysParams::raman(1.0, 4.0, 0.0));
    assert_eq!(r0.re, 0.0);
    assert!((r0.im - 4.0).abs() < 1e-15);
    let r4 = kerr_coefficient(&PhysParams::raman(1.0, 4.0, 4.0));
    assert!((r4 - Complex64::new(-8.0 / 16.25, 1.0 / 16.25)).norm() < 1e-15);
    for dk in [-8.0, -1.0, 0.0, 2.5, 8.0] {
        assert!(kerr_coefficient(&PhysParams::raman(1.3, 0.0, dk)).im > 0.0);
    }
}

#[test]
fn taylor_polynomial_tracks_chi_inside_validity_radius() {
    let mut worst = 0.0f64;
    for p in grid() {
        let set = dispersion_set(&p).unwrap();
        let r = taylor_validity_radius(&p);
        for k in 1..=50 {
            let w = r * k as f64 / 50.0;
            for w in [w, -w] {
                let exact = f(&p, w);
                worst = worst.max((set.taylor(w) - exact).norm() / exact.norm());
            }
        }
    }
    println!("max relative Taylor error inside the radius: {worst:e}");
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn taylor_polynomial_fails_well_outside_radius() {
    let p = PhysParams::raman(1.0, 4.0, 4.0);
    let set = dispersion_set(&p).unwrap();
    let w = 10.0 * taylor_validity_radius(&p);
    let exact = f(&p, w);
    assert!((set.taylor(w) - exact).norm() / exact.norm() > 0.1);
}
