//! Closed-form predictions: effective coupling, accumulated phase, cavity
//! displacement, decay-corrected displacement, measurement angle, amplitude
//! constraint, error probability.
//!
//! These formulas hold for the sine pulse envelopes and serve as the
//! independent oracle for the propagators in [`crate::dynamics`]. All
//! functions accept the same [`SystematicErrors`] record as the model layer
//! so analytic-vs-numeric comparisons use identical effective parameters.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::model::{PhysicalParams, SystematicErrors};
use crate::{quad, Error, Result};

/// Error-shifted parameters entering every closed form.
#[derive(Debug, Clone, Copy)]
struct Effective {
    a1: f64,
    a2: f64,
    /// Unit coupling scaling the classical amplitudes (not error-shifted).
    g_unit: f64,
    /// Cavity coupling, carries eta3.
    g_cav: f64,
    delta_blue: f64,
    delta_red: f64,
    t_total: f64,
}

impl Effective {
    fn new(p: &PhysicalParams, e: &SystematicErrors) -> Self {
        Self {
            a1: (1.0 + e.eta1) * p.a1,
            a2: (1.0 + e.eta2) * p.a2,
            g_unit: p.g,
            g_cav: (1.0 + e.eta3) * p.g,
            delta_blue: (1.0 + e.eta1p) * p.delta_blue,
            delta_red: (1.0 + e.eta2p) * p.delta_red,
            t_total: p.total_time,
        }
    }

    /// Prefactor of the light-shift phase: d phi/dt = c2 sin^2(pi t/T).
    fn phase_rate(&self) -> f64 {
        let om2 = self.a2 * self.g_unit;
        om2 * om2 * self.g_cav * self.g_cav / (self.delta_blue * self.delta_blue * self.delta_red)
    }

    /// Peak of the effective drive: Omega Omega-tilde g / (Delta delta).
    fn drive_scale(&self) -> f64 {
        self.a1 * self.a2 * self.g_unit * self.g_unit * self.g_cav
            / (self.delta_blue * self.delta_red)
    }
}

fn check_time(t: f64, t_total: f64) -> Result<()> {
    if t < -1e-12 || t > t_total * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::TimeOutOfRange { t, t_max: t_total });
    }
    Ok(())
}

/// sin(x)/x with the removable singularity handled by series.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Winding parameter mu = A2^2 g^4 T / (4 pi Delta^2 delta), with
/// error-shifted parameters.
pub fn mu(p: &PhysicalParams, e: &SystematicErrors) -> f64 {
    let eff = Effective::new(p, e);
    eff.phase_rate() * eff.t_total / (4.0 * PI)
}

/// Accumulated light-shift phase for the sine envelope:
/// phi(t) = (A2^2 g^4 / Delta^2 delta) [t/2 - (T/4 pi) sin(2 pi t/T)].
pub fn phase_phi(t: f64, p: &PhysicalParams, e: &SystematicErrors) -> Result<f64> {
    let eff = Effective::new(p, e);
    check_time(t, eff.t_total)?;
    let c = eff.phase_rate();
    Ok(c * (t / 2.0 - (eff.t_total / (4.0 * PI)) * (2.0 * PI * t / eff.t_total).sin()))
}

/// Effective drive amplitude Omega_e(t) = Omega(t) Omega-tilde(t) g /
/// (Delta delta).
pub fn omega_e(t: f64, p: &PhysicalParams, e: &SystematicErrors) -> Result<f64> {
    let eff = Effective::new(p, e);
    check_time(t, eff.t_total)?;
    let s = (PI * t / eff.t_total).sin();
    Ok(eff.drive_scale() * s * s)
}

/// Displacement by quadrature:
/// alpha(t) = e^{i phi(t)} * integral_0^t i Omega_e(t') e^{-i phi(t')} dt'.
///
/// Adaptive Simpson, absolute tolerance 1e-10.
pub fn alpha_of_t(t: f64, p: &PhysicalParams, e: &SystematicErrors) -> Result<C64> {
    let eff = Effective::new(p, e);
    check_time(t, eff.t_total)?;
    let c = eff.phase_rate();
    let scale = eff.drive_scale();
    let t_total = eff.t_total;
    let integrand = move |tp: f64| {
        let s = (PI * tp / t_total).sin();
        let phi = c * (tp / 2.0 - (t_total / (4.0 * PI)) * (2.0 * PI * tp / t_total).sin());
        C64::new(0.0, scale * s * s) * C64::from_polar(1.0, -phi)
    };
    let alpha_tilde = quad::integrate_complex(integrand, 0.0, t, 1e-10)?;
    let phi_t = phase_phi(t, p, e)?;
    Ok(alpha_tilde * C64::from_polar(1.0, phi_t))
}

/// Closed-form final displacement:
/// alpha(T) = [A1 A2 g^3 T / (2 Delta delta)] * sinc(pi mu) *
///            exp{i [pi(1/2 - mu) + phi(T)]}.
///
/// The mu -> 0 limit is handled by the sinc series.
pub fn alpha_final_closed_form(p: &PhysicalParams, e: &SystematicErrors) -> Result<C64> {
    let eff = Effective::new(p, e);
    let m = mu(p, e);
    let phi_t = phase_phi(eff.t_total, p, e)?;
    let magnitude = eff.drive_scale() * eff.t_total / 2.0 * sinc(PI * m);
    Ok(C64::from_polar(magnitude, PI * (0.5 - m) + phi_t))
}

/// Minimal A1 making |alpha(T)| >= 2: A1 >= A2 g / [Delta sin(pi mu)].
///
/// Integer mu (vanishing sin) makes the constraint unsatisfiable and is
/// reported as an error rather than clamped.
pub fn min_a1(a2: f64, t_total: f64, p: &PhysicalParams) -> Result<f64> {
    let probe = PhysicalParams {
        a2,
        total_time: t_total,
        ..p.clone()
    };
    let m = mu(&probe, &SystematicErrors::none());
    let s = (PI * m).sin();
    if s.abs() < 1e-9 {
        return Err(Error::ConstraintUnsatisfiable(format!(
            "sin(pi mu) vanishes at mu = {m}; |alpha(T)| >= 2 unreachable"
        )));
    }
    if s < 0.0 {
        return Err(Error::ConstraintUnsatisfiable(format!(
            "sin(pi mu) < 0 at mu = {m}; constraint formula leaves the valid branch"
        )));
    }
    Ok(a2 * p.g / (p.delta_blue * s))
}

/// Decay-weighted displacement:
/// alpha_bar(T) = e^{i phi(T) - kappa T/2} * integral_0^T i Omega_e(t)
///                e^{kappa t/2 - i phi(t)} dt.
///
/// With `corrected`, Omega_e carries the extra exp[kappa (T-t)/2] pulse
/// factor, which makes alpha_bar(T) equal alpha(T) identically.
pub fn alpha_with_decay(
    p: &PhysicalParams,
    e: &SystematicErrors,
    kappa: f64,
    corrected: bool,
) -> Result<C64> {
    if kappa < 0.0 {
        return Err(Error::NegativeRate(kappa));
    }
    let eff = Effective::new(p, e);
    let c = eff.phase_rate();
    let scale = eff.drive_scale();
    let t_total = eff.t_total;
    let integrand = move |t: f64| {
        let s = (PI * t / t_total).sin();
        let mut oe = scale * s * s;
        if corrected {
            oe *= (kappa * (t_total - t) / 2.0).exp();
        }
        let phi = c * (t / 2.0 - (t_total / (4.0 * PI)) * (2.0 * PI * t / t_total).sin());
        C64::new(0.0, oe) * C64::from_polar((kappa * t / 2.0).exp(), -phi)
    };
    let integral = quad::integrate_complex(integrand, 0.0, t_total, 1e-10)?;
    let phi_t = phase_phi(t_total, p, e)?;
    Ok(integral * C64::from_polar((-kappa * t_total / 2.0).exp(), phi_t))
}

/// Discrimination error probability for final displacement modulus |alpha|:
/// P_e = erfc(sqrt(2) |alpha|) / 2.
///
/// For arguments beyond 6 the result underflows double precision and 0 is
/// returned exactly; [`error_probability_underflows`] flags that regime.
pub fn error_probability(modulus: f64) -> f64 {
    debug_assert!(modulus >= 0.0);
    let arg = std::f64::consts::SQRT_2 * modulus;
    if arg > 6.0 {
        return 0.0;
    }
    libm::erfc(arg) / 2.0
}

/// True when `error_probability` returned exact zero because the erfc
/// argument exceeded 6 (probability below ~1e-17, not meaningful in f64).
pub fn error_probability_underflows(modulus: f64) -> bool {
    std::f64::consts::SQRT_2 * modulus > 6.0
}

/// Homodyne angle aligned with the final displacement:
/// phi = pi(1/2 - mu) + phi(T), reduced to [0, 2 pi).
pub fn measurement_angle(p: &PhysicalParams, e: &SystematicErrors) -> Result<f64> {
    let m = mu(p, e);
    let phi_t = phase_phi(p.total_time, p, e)?;
    Ok((PI * (0.5 - m) + phi_t).rem_euclid(2.0 * PI))
}

/// Bundle of closed-form predictions for one parameter point.
#[derive(Debug, Clone)]
pub struct AnalyticPrediction {
    /// Winding parameter mu.
    pub mu: f64,
    /// Final accumulated phase phi(T), radians.
    pub phi_t: f64,
    /// Final displacement alpha(T) (decay-free).
    pub alpha_t: C64,
    /// Decay-weighted displacement alpha_bar(T) for the given kappa.
    pub alpha_bar_t: C64,
    /// Homodyne angle, radians in [0, 2 pi).
    pub phi_meas: f64,
    /// erfc error probability at |alpha_bar(T)|.
    pub p_err: f64,
}

impl AnalyticPrediction {
    pub fn compute(
        p: &PhysicalParams,
        e: &SystematicErrors,
        kappa: f64,
        corrected: bool,
    ) -> Result<Self> {
        let alpha_t = alpha_final_closed_form(p, e)?;
        let alpha_bar_t = if kappa == 0.0 {
            alpha_t
        } else {
            alpha_with_decay(p, e, kappa, corrected)?
        };
        Ok(Self {
            mu: mu(p, e),
            phi_t: phase_phi(p.total_time, p, e)?,
            alpha_t,
            alpha_bar_t,
            phi_meas: measurement_angle(p, e)?,
            p_err: error_probability(alpha_bar_t.norm()),
        })
    }

    /// Effective-model prediction of D(X/2) when measuring at `phi_nominal`:
    /// D = 2 Re[alpha_bar(T) e^{-i phi_nominal}].
    pub fn d_predicted(&self, phi_nominal: f64) -> f64 {
        2.0 * (self.alpha_bar_t * C64::from_polar(1.0, -phi_nominal)).re
    }
}
