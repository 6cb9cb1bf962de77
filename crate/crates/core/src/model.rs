//! Physical parameterization: pulse envelopes, Hamiltonian builders,
//! systematic-error and AWGN injection, decoherence rates, pulse correction.
//!
//! All quantities are dimensionless with the cavity coupling g as reference
//! unit (frequencies in g, times in 1/g). Conversion to laboratory units
//! happens only at the reporting layer through [`MolecularReference`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::qlinalg::{
    annihilation, embed_cavity, embed_molecule, mol_transition, CMat, CooMat, MOL_LEVELS,
};
use crate::{analytics, quad, Error, Result};

/// Dimensionless system parameters, everything in units of g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Cavity coupling strength; the reference unit, 1 by construction.
    #[serde(default = "default_g", skip_serializing_if = "is_unit")]
    pub g: f64,
    /// Blue detuning of the 1-2 drive.
    #[serde(rename = "Delta")]
    pub delta_blue: f64,
    /// Red detuning of the 1-3 drive.
    #[serde(rename = "delta")]
    pub delta_red: f64,
    /// Dimensionless amplitude of the 1-3 pulse.
    #[serde(rename = "A1")]
    pub a1: f64,
    /// Dimensionless amplitude of the 1-2 pulse.
    #[serde(rename = "A2")]
    pub a2: f64,
    /// Total interaction time, units of 1/g.
    #[serde(rename = "T")]
    pub total_time: f64,
    /// Fock truncation: highest retained photon number.
    #[serde(rename = "N")]
    pub fock_cutoff: usize,
}

fn default_g() -> f64 {
    1.0
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_unit(g: &f64) -> bool {
    *g == 1.0
}

impl Default for PhysicalParams {
    /// The working point of the reference study: Delta = 20g, delta = g,
    /// A1 = 0.15, A2 = 2.5, T = 250/g, N = 30.
    fn default() -> Self {
        Self {
            g: 1.0,
            delta_blue: 20.0,
            delta_red: 1.0,
            a1: 0.15,
            a2: 2.5,
            total_time: 250.0,
            fock_cutoff: 30,
        }
    }
}

impl PhysicalParams {
    /// Product-space dimension 3(N+1).
    pub fn dim(&self) -> usize {
        MOL_LEVELS * (self.fock_cutoff + 1)
    }

    /// Hard validity checks plus perturbative-regime warnings.
    ///
    /// The detuning hierarchy (Delta >> g, delta >> g^2/Delta) underpins the
    /// second-order effective model; violating it is legal but flagged.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.total_time <= 0.0 {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        if self.a1 <= 0.0 || self.a2 <= 0.0 {
            return Err(Error::InvalidParameter("A1 and A2 must be positive".into()));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParameter("g must be positive".into()));
        }
        if self.delta_blue <= 0.0 || self.delta_red <= 0.0 {
            return Err(Error::InvalidParameter("detunings must be positive".into()));
        }
        if self.fock_cutoff == 0 {
            return Err(Error::InvalidTruncation);
        }
        let mut warnings = Vec::new();
        if self.delta_blue < 10.0 * self.g {
            warnings.push(format!(
                "Delta = {} < 10 g: perturbative condition Delta >> g is marginal",
                self.delta_blue
            ));
        }
        if self.delta_red < 10.0 * self.g * self.g / self.delta_blue {
            warnings.push(format!(
                "delta = {} < 10 g^2/Delta: perturbative condition delta >> g^2/Delta is marginal",
                self.delta_red
            ));
        }
        Ok(warnings)
    }
}

/// Molecular handedness.
///
/// The sign convention table, used everywhere:
///
/// | handedness | Omega-tilde factor in the full Hamiltonian | effective-drive prefactor |
/// |------------|--------------------------------------------|---------------------------|
/// | L          | +1                                         | -1                        |
/// | R          | -1                                         | +1                        |
///
/// The L molecule ends in the cavity state |+alpha(T)> and gives a positive
/// quadrature reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    L,
    R,
}

impl Chirality {
    /// Sign multiplying the effective cavity drive (Eq.-level: -1 for L).
    pub fn effective_sign(self) -> f64 {
        match self {
            Chirality::L => -1.0,
            Chirality::R => 1.0,
        }
    }

    /// Sign multiplying the 1-3 Rabi term of the full Hamiltonian (+1 for L).
    pub fn omega_tilde_sign(self) -> f64 {
        -self.effective_sign()
    }

    pub fn label(self) -> &'static str {
        match self {
            Chirality::L => "L",
            Chirality::R => "R",
        }
    }

    pub fn other(self) -> Chirality {
        match self {
            Chirality::L => Chirality::R,
            Chirality::R => Chirality::L,
        }
    }
}

/// Fractional systematic errors on the drive amplitudes, cavity coupling and
/// detunings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystematicErrors {
    /// On the 1-3 Rabi amplitude: Omega-tilde -> (1+eta1) Omega-tilde.
    pub eta1: f64,
    /// On the 1-2 Rabi amplitude: Omega -> (1+eta2) Omega.
    pub eta2: f64,
    /// On the cavity coupling: g -> (1+eta3) g. Applies to the cavity term
    /// only, never to the classical amplitudes A1 g, A2 g.
    pub eta3: f64,
    /// On the blue detuning: Delta -> (1+eta1') Delta.
    pub eta1p: f64,
    /// On the red detuning: delta -> (1+eta2') delta.
    pub eta2p: f64,
}

impl SystematicErrors {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("eta3", self.eta3),
            ("eta1p", self.eta1p),
            ("eta2p", self.eta2p),
        ] {
            if !(-0.5..=0.5).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside the sanity bound [-0.5, 0.5]"
                )));
            }
        }
        Ok(())
    }
}

/// Additive white Gaussian noise on the pulse amplitudes.
///
/// Noise is sample-and-hold on a grid of cell width `grid_dt`: one i.i.d.
/// Gaussian value per cell, variance sigma^2 = P_sig / 10^(snr_db/10) with
/// P_sig the mean power of the reference envelope over [0, T]. Holding the
/// value over a finite cell keeps results integrator-step independent and
/// gives the noise a sinc^2 spectrum with zeros at multiples of
/// 2 pi / grid_dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwgnConfig {
    /// Signal-to-noise ratio R_N in dB.
    pub snr_db: f64,
    /// RNG seed for the noise stream.
    #[serde(default)]
    pub seed: u64,
    /// Sample-and-hold cell width, units of 1/g.
    ///
    /// Default 8 pi: an integer number of periods of both detuning
    /// frequencies at the nominal working point (delta = 1, Delta = 20), so
    /// the hold spectrum has nulls on both molecular transitions and sits
    /// deep in its 1/(omega tau)^2 tail across the light-shift-dressed
    /// neighborhoods; the noise then acts on the cavity displacement instead
    /// of incoherently heating the molecule.
    #[serde(default = "default_grid_dt")]
    pub grid_dt: f64,
}

pub fn default_grid_dt() -> f64 {
    8.0 * PI
}

impl Default for AwgnConfig {
    fn default() -> Self {
        Self {
            snr_db: 10.0,
            seed: 0,
            grid_dt: default_grid_dt(),
        }
    }
}

impl AwgnConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidParameter("snr_db must be finite".into()));
        }
        if !(self.grid_dt > 0.0) {
            return Err(Error::InvalidParameter("grid_dt must be positive".into()));
        }
        Ok(())
    }
}

/// Decoherence rates of the master equation, units of g.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceRates {
    /// Cavity decay rate.
    pub kappa: f64,
    /// Molecular energy relaxation rate.
    pub gamma: f64,
    /// Molecular dephasing rate.
    pub gamma_phi: f64,
}

impl DecoherenceRates {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn uniform(rate: f64) -> Self {
        Self {
            kappa: rate,
            gamma: rate,
            gamma_phi: rate,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0 && self.gamma_phi == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for r in [self.kappa, self.gamma, self.gamma_phi] {
            if r < 0.0 || !r.is_finite() {
                return Err(Error::NegativeRate(r));
            }
        }
        Ok(())
    }
}

/// Pulse correction compensating cavity decay:
/// Omega-tilde(t) -> Omega-tilde(t) exp[kappa (T - t)/2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseCorrection {
    Off,
    KappaCorrected(f64),
}

impl PulseCorrection {
    fn multiplier(self, t: f64, t_total: f64) -> f64 {
        match self {
            PulseCorrection::Off => 1.0,
            PulseCorrection::KappaCorrected(kappa) => (kappa * (t_total - t) / 2.0).exp(),
        }
    }
}

/// Reference record for 1,2-propanediol rotational states, laboratory units.
///
/// Levels |1>, |2>, |3> are the rotational states |0_00>, |1_11>, |1_10>.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolecularReference {
    /// 1-2 transition frequency, MHz.
    pub omega12_mhz: f64,
    /// 1-3 transition frequency, MHz.
    pub omega13_mhz: f64,
    /// 2-3 transition frequency, MHz.
    pub omega23_mhz: f64,
    /// Frequency of the Omega drive, MHz.
    pub omega_drive_mhz: f64,
    /// Frequency of the Omega-tilde drive, MHz.
    pub omega_tilde_drive_mhz: f64,
    /// Cavity mode frequency, MHz.
    pub nu_mhz: f64,
    /// Cavity coupling strength, MHz.
    pub g_mhz: f64,
}

impl Default for MolecularReference {
    fn default() -> Self {
        Self {
            omega12_mhz: 11363.0,
            omega13_mhz: 12212.0,
            omega23_mhz: 849.0,
            omega_drive_mhz: 11563.0,
            omega_tilde_drive_mhz: 12202.0,
            nu_mhz: 639.0,
            g_mhz: 10.0,
        }
    }
}

impl MolecularReference {
    /// Blue detuning omega - omega12 in MHz.
    pub fn delta_blue_mhz(&self) -> f64 {
        self.omega_drive_mhz - self.omega12_mhz
    }

    /// Red detuning omega13 - omega-tilde in MHz.
    pub fn delta_red_mhz(&self) -> f64 {
        self.omega13_mhz - self.omega_tilde_drive_mhz
    }

    /// Interaction time in microseconds for a dimensionless duration.
    pub fn time_us(&self, t_dimensionless: f64) -> f64 {
        t_dimensionless / self.g_mhz
    }

    /// Frequency-scheme consistency checks, asserted exactly:
    /// Delta = 200 MHz = 20 g, delta = 10 MHz = g, nu + Delta + delta = omega23.
    pub fn check_consistency(&self) -> Result<()> {
        let d_blue = self.delta_blue_mhz();
        let d_red = self.delta_red_mhz();
        if d_blue != 20.0 * self.g_mhz {
            return Err(Error::InvalidParameter(format!(
                "Delta_phys = {d_blue} MHz != 20 g_phys"
            )));
        }
        if d_red != self.g_mhz {
            return Err(Error::InvalidParameter(format!(
                "delta_phys = {d_red} MHz != g_phys"
            )));
        }
        if self.nu_mhz + d_blue + d_red != self.omega23_mhz {
            return Err(Error::InvalidParameter(format!(
                "nu + Delta + delta = {} MHz != omega23 = {} MHz",
                self.nu_mhz + d_blue + d_red,
                self.omega23_mhz
            )));
        }
        Ok(())
    }
}

/// A frozen sample-and-hold noise trace over [0, T].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    pub grid_dt: f64,
    pub samples: Vec<f64>,
}

impl NoiseTrace {
    /// Noise value at time t (held constant within each grid cell).
    pub fn value(&self, t: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let idx = ((t / self.grid_dt) as usize).min(self.samples.len() - 1);
        self.samples[idx]
    }
}

/// Generate an AWGN trace for the envelope `base` over [0, t_total].
///
/// sigma^2 = P_sig / 10^(R_N/10), P_sig = (1/T) integral of base(t)^2.
/// Deterministic for a fixed `cfg.seed`.
pub fn awgn_trace<F: Fn(f64) -> f64>(
    base: F,
    cfg: &AwgnConfig,
    t_total: f64,
) -> Result<NoiseTrace> {
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let sigma = noise_sigma(base, cfg, t_total)?;
    Ok(draw_trace(sigma, cfg.grid_dt, t_total, &mut rng))
}

fn noise_sigma<F: Fn(f64) -> f64>(base: F, cfg: &AwgnConfig, t_total: f64) -> Result<f64> {
    let p_sig = quad::integrate(|t| base(t) * base(t), 0.0, t_total, 1e-12)? / t_total;
    Ok((p_sig / 10f64.powf(cfg.snr_db / 10.0)).sqrt())
}

fn draw_trace(sigma: f64, grid_dt: f64, t_total: f64, rng: &mut ChaCha12Rng) -> NoiseTrace {
    let ncells = (t_total / grid_dt).ceil() as usize;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let samples = (0..ncells.max(1))
        .map(|_| sigma * normal.sample(rng))
        .collect();
    NoiseTrace { grid_dt, samples }
}

/// The pair of frozen noise traces for one propagation run.
#[derive(Debug, Clone, Default)]
pub struct RunNoise {
    pub omega_tilde: Option<NoiseTrace>,
    pub omega: Option<NoiseTrace>,
}

impl RunNoise {
    /// Draw both traces from one seeded stream: Omega-tilde first, then
    /// Omega.
    ///
    /// Both drive lines carry the same noise floor, set by the measured
    /// power of the weaker (1-3) envelope: sigma^2 = P_sig(Omega-tilde) /
    /// 10^(R_N/10). A per-signal floor would put a 22%-RMS amplitude noise
    /// on the strong 1-2 drive, which scrambles the accumulated light-shift
    /// phase and incoherently depletes the ground state at any hold width;
    /// the common floor is the convention under which the reference ensemble
    /// statistics are reproducible. The reference envelope includes
    /// systematic errors and pulse correction.
    pub fn generate(
        params: &PhysicalParams,
        errors: &SystematicErrors,
        correction: PulseCorrection,
        cfg: &AwgnConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let t_total = params.total_time;
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        let sigma = noise_sigma(
            |t| {
                envelope_omega_tilde(t, params, errors, None, correction)
                    .expect("t within support")
            },
            cfg,
            t_total,
        )?;
        let tilde = draw_trace(sigma, cfg.grid_dt, t_total, &mut rng);
        let omega = draw_trace(sigma, cfg.grid_dt, t_total, &mut rng);
        Ok(Self {
            omega_tilde: Some(tilde),
            omega: Some(omega),
        })
    }
}

fn check_support(t: f64, t_total: f64) -> Result<()> {
    // tiny grace for RK4 endpoint arithmetic
    if t < -1e-12 || t > t_total * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::TimeOutOfRange { t, t_max: t_total });
    }
    Ok(())
}

/// 1-2 drive envelope: (1+eta2) A2 g sin(pi t/T) + noise(t).
pub fn envelope_omega(
    t: f64,
    params: &PhysicalParams,
    errors: &SystematicErrors,
    noise: Option<&NoiseTrace>,
) -> Result<f64> {
    check_support(t, params.total_time)?;
    let clean =
        (1.0 + errors.eta2) * params.a2 * params.g * (PI * t / params.total_time).sin();
    Ok(clean + noise.map_or(0.0, |n| n.value(t)))
}

/// 1-3 drive envelope: (1+eta1) A1 g sin(pi t/T) [exp(kappa (T-t)/2)] + noise(t).
pub fn envelope_omega_tilde(
    t: f64,
    params: &PhysicalParams,
    errors: &SystematicErrors,
    noise: Option<&NoiseTrace>,
    correction: PulseCorrection,
) -> Result<f64> {
    check_support(t, params.total_time)?;
    let clean = (1.0 + errors.eta1)
        * params.a1
        * params.g
        * (PI * t / params.total_time).sin()
        * correction.multiplier(t, params.total_time);
    Ok(clean + noise.map_or(0.0, |n| n.value(t)))
}

/// Full rotating-frame Hamiltonian of one enantiomer:
///
/// H(t) = Omega(t) e^{i Delta t} |1><2|  +  g a e^{i (Delta+delta) t} |3><2|
///        +/- Omega-tilde(t) e^{-i delta t} |1><3|  + H.c.
///
/// Detuning errors shift the phase frequencies, eta3 rescales only the cavity
/// coupling. The struct owns no state; it is a pure function of (t, params).
#[derive(Debug, Clone)]
pub struct FullHamiltonian {
    pub chirality: Chirality,
    pub params: PhysicalParams,
    pub errors: SystematicErrors,
    pub correction: PulseCorrection,
    pub noise: RunNoise,
}

impl FullHamiltonian {
    pub fn new(
        chirality: Chirality,
        params: PhysicalParams,
        errors: SystematicErrors,
        correction: PulseCorrection,
        noise: RunNoise,
    ) -> Self {
        Self {
            chirality,
            params,
            errors,
            correction,
            noise,
        }
    }

    /// The three independent coupling coefficients at time t
    /// (c12, c23, c13 multiply |1><2| (x) I, |3><2| (x) a, |1><3| (x) I).
    pub fn coefficients(&self, t: f64) -> Result<(C64, C64, C64)> {
        let p = &self.params;
        let delta_blue = (1.0 + self.errors.eta1p) * p.delta_blue;
        let delta_red = (1.0 + self.errors.eta2p) * p.delta_red;
        let g_cav = (1.0 + self.errors.eta3) * p.g;
        let omega = envelope_omega(t, p, &self.errors, self.noise.omega.as_ref())?;
        let omega_tilde = envelope_omega_tilde(
            t,
            p,
            &self.errors,
            self.noise.omega_tilde.as_ref(),
            self.correction,
        )?;
        let c12 = C64::from_polar(omega, delta_blue * t);
        let c23 = C64::from_polar(g_cav, (delta_blue + delta_red) * t);
        let c13 = C64::from_polar(
            self.chirality.omega_tilde_sign() * omega_tilde,
            -delta_red * t,
        );
        Ok((c12, c23, c13))
    }

    /// Sparse form of H(t); the upper-triangle terms plus Hermitian
    /// conjugates, 6(N+1) - 2 entries.
    pub fn fill_coo(&self, t: f64, coo: &mut CooMat) -> Result<()> {
        let f = self.params.fock_cutoff + 1;
        debug_assert_eq!(coo.dim, MOL_LEVELS * f);
        coo.clear();
        let (c12, c23, c13) = self.coefficients(t)?;
        for n in 0..f {
            coo.push_hc(n, f + n, c12); // |1><2| (x) I
            coo.push_hc(n, 2 * f + n, c13); // |1><3| (x) I
        }
        for n in 0..f - 1 {
            // |3><2| (x) a : row (3,n), column (2,n+1), amplitude sqrt(n+1)
            let amp = c23 * ((n + 1) as f64).sqrt();
            coo.push_hc(2 * f + n, f + n + 1, amp);
        }
        Ok(())
    }

    /// Dense H(t) on the product space.
    pub fn matrix(&self, t: f64) -> Result<CMat> {
        let mut coo = CooMat::new(self.params.dim());
        self.fill_coo(t, &mut coo)?;
        Ok(coo.to_dense())
    }
}

/// Second-order effective Hamiltonian in the rotated frame:
///
/// H_e(t) = -/+ Omega_e(t) [e^{-i phi(t)} a^dag + e^{i phi(t)} a] |1><1|
///
/// with Omega_e = Omega Omega-tilde g / (Delta delta) and phi the accumulated
/// light-shift phase. Acts only inside the |1> molecular sector; observables
/// taken in the laboratory frame must be rotated by [`Self::frame_phase`].
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub chirality: Chirality,
    pub params: PhysicalParams,
    pub errors: SystematicErrors,
    pub correction: PulseCorrection,
}

impl EffectiveHamiltonian {
    pub fn new(
        chirality: Chirality,
        params: PhysicalParams,
        errors: SystematicErrors,
        correction: PulseCorrection,
    ) -> Self {
        Self {
            chirality,
            params,
            errors,
            correction,
        }
    }

    /// Accumulated frame rotation angle phi(t) of the a^dag a |1><1| term.
    pub fn frame_phase(&self, t: f64) -> f64 {
        analytics::phase_phi(t, &self.params, &self.errors).expect("t within support")
    }

    pub fn fill_coo(&self, t: f64, coo: &mut CooMat) -> Result<()> {
        let f = self.params.fock_cutoff + 1;
        debug_assert_eq!(coo.dim, MOL_LEVELS * f);
        coo.clear();
        let mut omega_e = analytics::omega_e(t, &self.params, &self.errors)?;
        if let PulseCorrection::KappaCorrected(kappa) = self.correction {
            omega_e *= (kappa * (self.params.total_time - t) / 2.0).exp();
        }
        let phi = analytics::phase_phi(t, &self.params, &self.errors)?;
        let drive = C64::from_polar(self.chirality.effective_sign() * omega_e, -phi);
        for n in 0..f - 1 {
            // |1> sector, a^dag ladder: row (1, n+1), column (1, n)
            let amp = drive * ((n + 1) as f64).sqrt();
            coo.push_hc(n + 1, n, amp);
        }
        Ok(())
    }

    pub fn matrix(&self, t: f64) -> Result<CMat> {
        let mut coo = CooMat::new(self.params.dim());
        self.fill_coo(t, &mut coo)?;
        Ok(coo.to_dense())
    }
}

/// Collapse operators of the master equation with rate prefactors folded in
/// as sqrt(rate/2), consistent with L[o] rho = 2 o rho o^dag - o^dag o rho -
/// rho o^dag o:
///
/// sqrt(kappa/2) a, sqrt(gamma/2) sigma^-_{ll'} and sqrt(gamma_phi/2)
/// sigma^z_{ll'} for the pairs (1,2), (1,3), (2,3), each embedded on the
/// product space. sigma^z_{ll'} = (|l'><l'| - |l><l|)/2. Zero rates are
/// skipped; all rates zero gives an empty list.
pub fn collapse_operators(rates: &DecoherenceRates, n_max: usize) -> Result<Vec<CMat>> {
    rates.validate()?;
    let mut ops = Vec::new();
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    if rates.kappa > 0.0 {
        let a = annihilation(n_max)?;
        ops.push(embed_cavity(&a) * C64::new((rates.kappa / 2.0).sqrt(), 0.0));
    }
    if rates.gamma > 0.0 {
        let s = C64::new((rates.gamma / 2.0).sqrt(), 0.0);
        for (l, lp) in pairs {
            ops.push(embed_molecule(&mol_transition(l, lp), n_max) * s);
        }
    }
    if rates.gamma_phi > 0.0 {
        let s = C64::new((rates.gamma_phi / 2.0).sqrt(), 0.0);
        for (l, lp) in pairs {
            let sz = (mol_transition(lp, lp) - mol_transition(l, l)) * C64::new(0.5, 0.0);
            ops.push(embed_molecule(&sz, n_max) * s);
        }
    }
    Ok(ops)
}

/// Hermitian quadrature operator X_phi = e^{i phi} a^dag + e^{-i phi} a on
/// the bare cavity space.
pub fn cavity_quadrature(phi: f64, n_max: usize) -> Result<CMat> {
    let a = annihilation(n_max)?;
    let phase = C64::from_polar(1.0, phi);
    Ok(a.adjoint() * phase + a * phase.conj())
}

/// X_phi embedded on the product space.
pub fn quadrature_product_space(phi: f64, n_max: usize) -> Result<CMat> {
    Ok(embed_cavity(&cavity_quadrature(phi, n_max)?))
}
