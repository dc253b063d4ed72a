//! Weak-probe response of the medium in closed form.
//!
//! The linear susceptibility `chi(omega)` is the first-order response of the
//! probe coherence to an envelope mode `exp(-i omega tau)`, so that
//! `rho_13 = -chi(omega) Omega_p` mode by mode. Its Taylor coefficients at
//! `omega = 0` and the third-order Kerr coefficient `R_p` define the reduced
//! propagation model solved in [`crate::ssfm`].
//!
//! Ground-state decoherence is not part of the closed forms; the full
//! Maxwell-Bloch solver handles `gamma_g > 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Spectral;
use crate::params::PhysParams;
use crate::pulse::Envelope;

/// Relative size below which the susceptibility denominator counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;
/// Smallest control Rabi frequency (in units of gamma) accepted by the closed forms.
pub const MIN_CONTROL: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn chi_parts(omega: f64, p: &PhysParams) -> Result<(Complex64, Complex64, f64)> {
    let two_photon = omega + p.delta_p - p.delta_c;
    let c2 = p.omega_c.norm_sqr();
    let denom = Complex64::new(omega + p.delta_p, 0.5 * p.gamma) * two_photon - c2;
    let magnitude = denom.norm();
    if magnitude <= POLE_TOLERANCE * p.gamma * p.gamma {
        return Err(Error::Pole { omega, magnitude });
    }
    Ok((Complex64::from(two_photon), denom, c2))
}

/// Linear susceptibility at envelope frequency `omega`.
pub fn chi(omega: f64, p: &PhysParams) -> Result<Complex64> {
    let (num, denom, _) = chi_parts(omega, p)?;
    Ok(-num / denom)
}

/// `d chi / d omega`, differentiated in closed form:
/// `(|Omega_c|^2 + (omega + delta_p - delta_c)^2) / D^2`.
pub fn chi_slope(omega: f64, p: &PhysParams) -> Result<Complex64> {
    let (num, denom, c2) = chi_parts(omega, p)?;
    Ok((c2 + num * num) / (denom * denom))
}

/// Group slowness of an envelope component at `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupVelocity {
    pub omega: f64,
    /// `Re beta_1(omega) = Re d chi/d omega`, units 1/gamma^2.
    pub slowness: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl GroupVelocity {
    /// Retarded-frame delay accumulated over a depth span given in `eta zeta / gamma`.
    pub fn delay(&self, depth_span: f64) -> f64 {
        depth_span * self.gamma * self.slowness
    }

    /// Lab-frame group velocity `[1/c + eta Re beta_1]^-1` for a given speed of light.
    pub fn velocity(&self, c: f64) -> f64 {
        1.0 / (1.0 / c + self.eta * self.slowness)
    }
}

/// Group velocity of the envelope component at `omega` (beta_1 evaluated off centre).
pub fn group_velocity(p: &PhysParams, omega: f64) -> Result<GroupVelocity> {
    Ok(GroupVelocity {
        omega,
        slowness: chi_slope(omega, p)?.re,
        gamma: p.gamma,
        eta: p.eta,
    })
}

/// Delay between two spectral components after a depth span (`eta zeta / gamma`):
/// `span * gamma * |Re beta_1(omega_a) - Re beta_1(omega_b)|`.
pub fn delay_difference(p: &PhysParams, omega_a: f64, omega_b: f64, depth_span: f64) -> Result<f64> {
    let a = group_velocity(p, omega_a)?;
    let b = group_velocity(p, omega_b)?;
    Ok((a.delay(depth_span) - b.delay(depth_span)).abs())
}

/// Taylor coefficients of `chi` at Raman resonance plus the Kerr coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSet {
    /// `beta_n = d^n chi / d omega^n` at `omega = 0`.
    pub beta: [Complex64; 4],
    pub r_p: Complex64,
    pub params: PhysParams,
}

impl DispersionSet {
    /// Exact susceptibility for the parameters this set was built from.
    pub fn chi(&self, omega: f64) -> Result<Complex64> {
        chi(omega, &self.params)
    }

    /// Third-order Taylor polynomial `sum_n beta_n omega^n / n!`.
    pub fn taylor(&self, omega: f64) -> Complex64 {
        let [b0, b1, b2, b3] = self.beta;
        b0 + omega * (b1 + omega * (b2 / 2.0 + omega * b3 / 6.0))
    }

    /// `R_p |Omega_p|^2 Omega_p`.
    pub fn third_order_source(&self, omega_p: Complex64) -> Complex64 {
        self.r_p * omega_p.norm_sqr() * omega_p
    }
}

/// Closed-form `beta_0..beta_3` and `R_p`; valid only at Raman resonance.
pub fn dispersion_set(p: &PhysParams) -> Result<DispersionSet> {
    p.validate()?;
    if !p.is_raman_resonant() {
        return Err(Error::RamanCondition {
            delta_p: p.delta_p,
            delta_c: p.delta_c,
        });
    }
    let c2 = p.omega_c.norm_sqr();
    if c2.sqrt() < MIN_CONTROL * p.gamma {
        return Err(Error::ZeroControl(c2.sqrt()));
    }
    let a = p.delta_p + 0.5 * I * p.gamma;
    let beta = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0 / c2, 0.0),
        2.0 * a / (c2 * c2),
        6.0 * (c2 + a * a) / (c2 * c2 * c2),
    ];
    let r_p = kerr_coefficient(p);
    Ok(DispersionSet {
        beta,
        r_p,
        params: *p,
    })
}

/// `R_p = -2 / ((delta_kerr + i gamma/2) |Omega_c|^2)`.
pub fn kerr_coefficient(p: &PhysParams) -> Complex64 {
    -2.0 / (Complex64::new(p.delta_kerr, 0.5 * p.gamma) * p.omega_c.norm_sqr())
}

/// Third-order source `rho_24 - rho_13 = R_p |Omega_p|^2 Omega_p` at Raman resonance.
pub fn third_order_source(omega_p: Complex64, p: &PhysParams) -> Result<Complex64> {
    Ok(dispersion_set(p)?.third_order_source(omega_p))
}

/// Radius in `omega` inside which the third-order Taylor polynomial tracks
/// `chi` to better than 1%: `0.1 |Omega_c|^2 / max(gamma, |delta|, |Omega_c|)`.
/// The `|Omega_c|` term matters for strong control fields, where the series
/// converges only out to `|omega| ~ |Omega_c|`.
pub fn taylor_validity_radius(p: &PhysParams) -> f64 {
    let c = p.omega_c.norm();
    0.1 * c * c / p.gamma.max(p.delta_p.abs()).max(c)
}

/// First-order probe coherence `rho_13^(1)(tau)`: each envelope mode is
/// multiplied by `-chi(omega)`.
pub fn first_order_coherence(envelope: &Envelope, p: &PhysParams) -> Result<Vec<Complex64>> {
    let spectral = Spectral::new(envelope.len(), envelope.grid.d_tau)?;
    let mut buf = spectral.to_modes(&envelope.values);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= -chi(spectral.omega(k), p)?;
    }
    spectral.inverse(&mut buf);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SimGrid;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn chi_vanishes_at_raman_resonance() {
        for &d in &[0.0, 1.0, 4.0, -3.0] {
            assert_eq!(chi(0.0, &PhysParams::raman(1.0, d, 4.0)).unwrap(), Complex64::from(0.0));
        }
    }

    #[test]
    fn chi_slope_near_center() {
        let p = PhysParams::raman(1.0, 0.0, 4.0);
        let w = 1e-4;
        let c = chi(w, &p).unwrap();
        assert!((c.re / w - 1.0).abs() < 1e-3);
    }

    #[test]
    fn chi_against_high_precision_values() {
        // Frozen from a 30-digit evaluation of the same rational expression.
        let p = PhysParams::raman(1.0, 4.0, 4.0);
        let expected = Complex64::new(0.168282943525385054, 0.0142612664004563605);
        assert!(close(chi(0.1, &p).unwrap(), expected, 1e-14));

        let p = PhysParams::raman(1.0, 0.0, 4.0);
        let expected = Complex64::new(0.0500938474962492389, 0.00125548489965536940);
        assert!(close(chi(0.05, &p).unwrap(), expected, 1e-14));

        let p = PhysParams {
            omega_c: Complex64::new(0.8, 0.0),
            delta_p: 1.3,
            delta_c: 1.0,
            ..PhysParams::default()
        };
        let expected = Complex64::new(0.689655172413793103, 1.72413793103448276);
        assert!(close(chi(0.1, &p).unwrap(), expected, 1e-14));
    }

    #[test]
    fn pole_is_reported() {
        // D(omega) = (omega + i/2) omega - 1 never vanishes for real omega, but
        // with the control off and delta_p = delta_c, omega = 0 is a pole.
        let p = PhysParams {
            omega_c: Complex64::new(0.0, 0.0),
            ..PhysParams::default()
        };
        assert!(matches!(chi(0.0, &p), Err(Error::Pole { .. })));
    }

    #[test]
    fn closed_forms() {
        let set = dispersion_set(&PhysParams::raman(1.0, 0.0, 4.0)).unwrap();
        assert_eq!(set.beta[0], Complex64::from(0.0));
        assert_eq!(set.beta[1], Complex64::from(1.0));
        assert_eq!(set.beta[2], Complex64::new(0.0, 1.0));

        let set = dispersion_set(&PhysParams::raman(1.0, 4.0, 4.0)).unwrap();
        assert!(close(set.beta[2], Complex64::new(8.0, 1.0), 1e-14));
        assert!(close(set.r_p, Complex64::new(-0.492307692307692, 0.0615384615384615), 1e-14));

        let set = dispersion_set(&PhysParams::raman(1.0, 4.0, 0.0)).unwrap();
        assert!(close(set.r_p, Complex64::new(0.0, 4.0), 1e-14));
        assert_eq!(set.r_p.re, 0.0);
    }

    #[test]
    fn closed_forms_need_raman_and_control() {
        let p = PhysParams {
            delta_p: 1.0,
            ..PhysParams::default()
        };
        assert!(matches!(dispersion_set(&p), Err(Error::RamanCondition { .. })));
        let p = PhysParams::raman(1e-8, 0.0, 4.0);
        assert!(matches!(dispersion_set(&p), Err(Error::ZeroControl(_))));
    }

    #[test]
    fn third_order_source_scaling() {
        let p = PhysParams::raman(1.0, 4.0, 4.0);
        assert_eq!(third_order_source(Complex64::from(0.0), &p).unwrap(), Complex64::from(0.0));
        let a = third_order_source(Complex64::new(0.1, 0.05), &p).unwrap();
        let b = third_order_source(Complex64::new(0.2, 0.1), &p).unwrap();
        assert!((b.norm() / a.norm() - 8.0).abs() < 1e-12);
        let c = third_order_source(Complex64::new(0.1, 0.0), &p).unwrap();
        assert!(close(c, Complex64::new(-0.49230769, 0.06153846) * 1e-3, 1e-11));
    }

    #[test]
    fn group_velocity_at_center() {
        let p = PhysParams::raman(1.0, 4.0, 4.0);
        let v = group_velocity(&p, 0.0).unwrap();
        assert!((v.slowness - 1.0).abs() < 1e-15);
        assert!((v.delay(200.0) - 200.0).abs() < 1e-12);
        // 1/c -> 0 limit
        assert!((v.velocity(1e300) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_delay_at_zero_detuning() {
        let p = PhysParams::raman(1.0, 0.0, 4.0);
        let d = delay_difference(&p, -0.05, 0.05, 130.0).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn delay_difference_for_split_components() {
        // 130 * |Re beta_1(-0.05) - Re beta_1(0.05)| from a 30-digit numerical
        // derivative of chi.
        let p = PhysParams::raman(1.0, 4.0, 4.0);
        let d = delay_difference(&p, -0.05, 0.05, 130.0).unwrap();
        assert!((d - 113.545392217637314).abs() < 1e-10, "{d}");
    }

    #[test]
    fn first_order_coherence_of_single_mode() {
        let grid = SimGrid::new(256, 0.5, 1, 1.0, 1).unwrap();
        let spectral = Spectral::new(256, 0.5).unwrap();
        let w0 = spectral.omega(3);
        let env = Envelope::from_fn(grid, |t| (-I * w0 * t).exp());
        let p = PhysParams::raman(1.0, 4.0, 4.0);
        let rho13 = first_order_coherence(&env, &p).unwrap();
        let c = chi(w0, &p).unwrap();
        for (r, e) in rho13.iter().zip(&env.values) {
            assert!(close(*r, -c * e, 1e-12));
        }
    }

    #[test]
    fn first_order_coherence_of_constant_vanishes() {
        let grid = SimGrid::new(128, 0.5, 1, 1.0, 1).unwrap();
        let env = Envelope::from_fn(grid, |_| Complex64::new(0.3, 0.1));
        let rho13 = first_order_coherence(&env, &PhysParams::raman(1.0, 2.0, 4.0)).unwrap();
        assert!(rho13.iter().all(|v| v.norm() < 1e-15));
    }
}
