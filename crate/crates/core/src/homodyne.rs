//! Homodyne measurement statistics: quadrature operator, outcome
//! distributions, discrimination rule, error probability, Monte-Carlo
//! outcome sampling.
//!
//! The outcome variable x is X_phi/2, so a coherent state aligned with the
//! measurement angle gives mean |alpha| and variance 1/4. With that
//! convention the outcome density is sqrt(2/pi) exp[-2 (x - s|alpha|)^2]
//! where s = +1 for the L branch and -1 for R: the distribution for |s a>
//! peaks at s|a|, the sign convention the error-probability integral
//! P_e = erfc(sqrt(2)|alpha|)/2 requires.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::model::{cavity_quadrature, Chirality};
use crate::qlinalg::{is_hermitian, CMat};
use crate::{Error, Result};

/// Hermitian quadrature operator X_phi = e^{i phi} a^dag + e^{-i phi} a on
/// the truncated cavity space.
pub fn quadrature_operator(phi: f64, n_max: usize) -> Result<CMat> {
    cavity_quadrature(phi, n_max)
}

/// Gaussian outcome density of a displaced cavity in the x = X_phi/2
/// variable: sqrt(2/pi) exp[-2 (x - s m)^2], mean s*m, variance 1/4.
#[derive(Debug, Clone, Copy)]
pub struct OutcomeDensity {
    /// Branch sign: +1 (cavity at +|alpha|) or -1.
    pub sign: f64,
    /// Displacement modulus |alpha(T)|.
    pub modulus: f64,
}

impl OutcomeDensity {
    pub fn new(sign: f64, modulus: f64) -> Result<Self> {
        if modulus < 0.0 {
            return Err(Error::InvalidParameter("modulus must be >= 0".into()));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
        }
        Ok(Self { sign, modulus })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let u = x - self.sign * self.modulus;
        (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * u * u).exp()
    }

    pub fn mean(&self) -> f64 {
        self.sign * self.modulus
    }

    pub fn variance(&self) -> f64 {
        0.25
    }
}

/// Discrimination verdict for one homodyne outcome.
///
/// Rule: x > 0 reads L, x < 0 reads R. The measure-zero tie x = 0 is
/// assigned L and flagged so downstream statistics can count it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub outcome_x: f64,
    pub label: Chirality,
    pub degenerate: bool,
}

pub fn classify(x: f64) -> Verdict {
    if x > 0.0 {
        Verdict {
            outcome_x: x,
            label: Chirality::L,
            degenerate: false,
        }
    } else if x < 0.0 {
        Verdict {
            outcome_x: x,
            label: Chirality::R,
            degenerate: false,
        }
    } else {
        Verdict {
            outcome_x: x,
            label: Chirality::L,
            degenerate: true,
        }
    }
}

/// Input state for outcome sampling.
#[derive(Debug, Clone, Copy)]
pub enum CavityState<'a> {
    /// Ideal coherent state with the given complex displacement.
    Coherent(C64),
    /// Reduced cavity density matrix in the truncated Fock basis.
    Mixed(&'a CMat),
}

/// Draw homodyne outcomes x = X_phi/2 from a cavity state; deterministic per
/// seed.
///
/// Coherent input: i.i.d. Gaussian draws from the analytic outcome density
/// at mean Re[alpha e^{-i phi}]. Mixed input: draws from the spectral
/// distribution of X_phi/2 diagonalized in the truncated basis.
pub fn sample_outcomes(
    state: CavityState<'_>,
    phi: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match state {
        CavityState::Coherent(alpha) => {
            let mean = (alpha * C64::from_polar(1.0, -phi)).re;
            let normal = Normal::new(mean, 0.5).expect("valid sigma");
            Ok((0..count).map(|_| normal.sample(&mut rng)).collect())
        }
        CavityState::Mixed(rho) => {
            let spectral = SpectralDistribution::new(rho, phi)?;
            Ok((0..count).map(|_| spectral.sample(&mut rng)).collect())
        }
    }
}

/// Spectral distribution of x = X_phi/2 over a truncated-basis density
/// matrix: eigenvalues x_k with weights p_k = <v_k| rho |v_k>.
pub struct SpectralDistribution {
    /// Sorted outcome values.
    pub values: Vec<f64>,
    /// Cumulative probabilities aligned with `values`.
    cumulative: Vec<f64>,
    /// Probabilities aligned with `values`.
    pub probabilities: Vec<f64>,
}

impl SpectralDistribution {
    pub fn new(rho: &CMat, phi: f64) -> Result<Self> {
        let f = rho.nrows();
        if f != rho.ncols() || f < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f,
            });
        }
        if !is_hermitian(rho, 1e-8) {
            return Err(Error::InvalidState(
                "cavity state not Hermitian within 1e-8".into(),
            ));
        }
        let x_op = quadrature_operator(phi, f - 1)? * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(x_op);
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(f);
        for k in 0..f {
            let v = eig.eigenvectors.column(k);
            let mut p = C64::new(0.0, 0.0);
            for i in 0..f {
                for j in 0..f {
                    p += v[i].conj() * rho[(i, j)] * v[j];
                }
            }
            if p.re < -1e-8 {
                return Err(Error::InvalidState(format!(
                    "negative spectral weight {:.3e}",
                    p.re
                )));
            }
            pairs.push((eig.eigenvalues[k], p.re.max(0.0)));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
        let total: f64 = pairs.iter().map(|(_, p)| p).sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("zero total spectral weight".into()));
        }
        let mut cumulative = Vec::with_capacity(f);
        let mut acc = 0.0;
        for (_, p) in &pairs {
            acc += p / total;
            cumulative.push(acc);
        }
        Ok(Self {
            values: pairs.iter().map(|(x, _)| *x).collect(),
            probabilities: pairs.iter().map(|(_, p)| p / total).collect(),
            cumulative,
        })
    }

    fn sample(&self, rng: &mut ChaCha12Rng) -> f64 {
        let u: f64 = rand::Rng::gen(rng);
        let idx = self
            .cumulative
            .partition_point(|&c| c < u)
            .min(self.values.len() - 1);
        self.values[idx]
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probabilities)
            .map(|(x, p)| x * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values
            .iter()
            .zip(&self.probabilities)
            .map(|(x, p)| (x - m) * (x - m) * p)
            .sum()
    }

    /// Probability mass on x < 0, x = 0, x > 0.
    pub fn sign_masses(&self) -> (f64, f64, f64) {
        let mut neg = 0.0;
        let mut zero = 0.0;
        let mut pos = 0.0;
        for (x, p) in self.values.iter().zip(&self.probabilities) {
            if *x < 0.0 {
                neg += p;
            } else if *x > 0.0 {
                pos += p;
            } else {
                zero += p;
            }
        }
        (neg, zero, pos)
    }
}

/// Gaussian-surrogate error rate for two displaced branches separated by D
/// in X/2 units with a midpoint threshold: erfc(D/sqrt(2))/2.
///
/// Algebraically identical to `analytics::error_probability(D/2)`; kept as an
/// independent expression so the two routes check each other.
pub fn empirical_error_rate(d: f64) -> Result<f64> {
    if d < 0.0 {
        return Err(Error::InvalidParameter(
            "displacement difference must be >= 0".into(),
        ));
    }
    Ok(libm::erfc(d / std::f64::consts::SQRT_2) / 2.0)
}

/// Exact discrimination error from the spectral distributions of the two
/// reduced cavity states: mean of P(x <= 0 | L) and P(x > 0 | R), with the
/// x = 0 ties assigned to L per the classification rule.
pub fn exact_error_rate(rho_l: &CMat, rho_r: &CMat, phi: f64) -> Result<f64> {
    let dist_l = SpectralDistribution::new(rho_l, phi)?;
    let dist_r = SpectralDistribution::new(rho_r, phi)?;
    let (neg_l, _zero_l, _) = dist_l.sign_masses();
    let (_, zero_r, pos_r) = dist_r.sign_masses();
    // L read as R only when x < 0 (ties go to L); R read as L when x >= 0
    Ok(0.5 * (neg_l + pos_r + zero_r))
}
