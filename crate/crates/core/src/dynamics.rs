//! Time propagation: pure-state Schrödinger evolution (decoherence-free fast
//! path) and Lindblad master-equation integration, with observable extraction
//! along the trajectory.
//!
//! Both propagators are classic fixed-step fourth-order Runge-Kutta with
//! midpoint Hamiltonian evaluations. Fixed steps keep sample-and-hold noise
//! reproducible and the Hamiltonians here are globally smooth and bounded, so
//! adaptivity buys nothing. The master-equation right-hand side exploits the
//! structure of the dissipator (diagonal decay, elementwise dephasing mask,
//! banded cavity gain) instead of generic superoperator algebra; the generic
//! form built from the collapse-operator list is kept as
//! [`lindblad_rhs_reference`] and the two are tested against each other.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::model::{
    AwgnConfig, Chirality, DecoherenceRates, EffectiveHamiltonian, FullHamiltonian,
    PhysicalParams, PulseCorrection, RunNoise, SystematicErrors,
};
use crate::qlinalg::{check_density_matrix, outer, CMat, CVec, CooMat, MOL_LEVELS};
use crate::{analytics, Error, Result};

/// Time-dependent Hamiltonian usable by the propagators.
pub trait HamiltonianOp: Sync {
    fn dim(&self) -> usize;

    /// Write the sparse form of H(t) into `coo`.
    fn fill_coo(&self, t: f64, coo: &mut CooMat) -> Result<()>;

    /// Rotation angle of the interaction frame the operator is written in;
    /// lab-frame observables at angle phi are evaluated at
    /// `phi - frame_phase(t)`. Zero for lab-frame Hamiltonians.
    fn frame_phase(&self, _t: f64) -> f64 {
        0.0
    }

    fn matrix(&self, t: f64) -> Result<CMat> {
        let mut coo = CooMat::new(self.dim());
        self.fill_coo(t, &mut coo)?;
        Ok(coo.to_dense())
    }
}

impl HamiltonianOp for FullHamiltonian {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn fill_coo(&self, t: f64, coo: &mut CooMat) -> Result<()> {
        FullHamiltonian::fill_coo(self, t, coo)
    }
}

impl HamiltonianOp for EffectiveHamiltonian {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn fill_coo(&self, t: f64, coo: &mut CooMat) -> Result<()> {
        EffectiveHamiltonian::fill_coo(self, t, coo)
    }

    fn frame_phase(&self, t: f64) -> f64 {
        EffectiveHamiltonian::frame_phase(self, t)
    }
}

/// Which Hamiltonian drives a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    #[default]
    Full,
    Effective,
}

/// Fixed-step integration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Step, units of 1/g.
    pub dt: f64,
    /// Final time (t0 = 0 always).
    pub t_end: f64,
    /// Observables recorded every `sample_stride`-th step.
    pub sample_stride: usize,
    /// Optional window recorded at every step, for peak refinement.
    #[serde(default)]
    pub dense_window: Option<(f64, f64)>,
}

impl TimeGrid {
    /// Default grid for full-Hamiltonian runs: dt = 2e-3/g, 25-step stride.
    pub fn full_default(params: &PhysicalParams) -> Self {
        Self {
            dt: 2e-3,
            t_end: params.total_time,
            sample_stride: 25,
            dense_window: None,
        }
    }

    /// Default grid for effective-Hamiltonian runs: dt = 2e-2/g.
    pub fn effective_default(params: &PhysicalParams) -> Self {
        Self {
            dt: 2e-2,
            t_end: params.total_time,
            sample_stride: 25,
            dense_window: None,
        }
    }

    pub fn default_for(kind: HamiltonianKind, params: &PhysicalParams) -> Self {
        match kind {
            HamiltonianKind::Full => Self::full_default(params),
            HamiltonianKind::Effective => Self::effective_default(params),
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Validity: positive resolution, and for full-Hamiltonian runs the step
    /// must resolve the fastest phase: dt <= 2 pi / (50 (Delta + delta)).
    pub fn validate(
        &self,
        kind: HamiltonianKind,
        params: &PhysicalParams,
        errors: &SystematicErrors,
    ) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return Err(Error::InvalidParameter("grid dt and t_end must be positive".into()));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample_stride must be at least 1".into()));
        }
        if self.t_end > params.total_time * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "grid t_end {} beyond pulse support T = {}",
                self.t_end, params.total_time
            )));
        }
        if kind == HamiltonianKind::Full {
            let fastest = (1.0 + errors.eta1p) * params.delta_blue
                + (1.0 + errors.eta2p) * params.delta_red;
            let dt_max = 2.0 * std::f64::consts::PI / (50.0 * fastest);
            if self.dt > dt_max {
                return Err(Error::InvalidParameter(format!(
                    "dt = {} does not resolve the fastest phase; need dt <= {dt_max:.3e}",
                    self.dt
                )));
            }
        }
        Ok(())
    }
}

/// Densely-sampled quadrature series inside [`TimeGrid::dense_window`].
#[derive(Debug, Clone, Default)]
pub struct DenseSeries {
    pub times: Vec<f64>,
    pub x_phi: Vec<f64>,
}

/// Trajectory observables of one propagation.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub chirality: Chirality,
    /// Sample times (first entry is t = 0).
    pub times: Vec<f64>,
    /// <X_phi>(t) at the nominal measurement angle.
    pub x_phi: Vec<f64>,
    pub pop1: Vec<f64>,
    pub pop2: Vec<f64>,
    pub pop3: Vec<f64>,
    /// Mean photon number.
    pub nbar: Vec<f64>,
    /// Final density matrix on the product space.
    pub final_rho: CMat,
    /// <X_phi>(t_end)/2 for this run.
    pub d_metric_final: f64,
    /// Pure runs: worst |norm - 1| before renormalization. Master runs:
    /// worst |Tr rho - 1| (never renormalized).
    pub drift: f64,
    pub dense: Option<DenseSeries>,
}

impl RunResult {
    pub fn x_final(&self) -> f64 {
        *self.x_phi.last().expect("non-empty trajectory")
    }
}

struct Recorder {
    phi_meas: f64,
    stride: usize,
    window: Option<(f64, f64)>,
    times: Vec<f64>,
    x_phi: Vec<f64>,
    pop1: Vec<f64>,
    pop2: Vec<f64>,
    pop3: Vec<f64>,
    nbar: Vec<f64>,
    dense: DenseSeries,
}

impl Recorder {
    fn new(phi_meas: f64, grid: &TimeGrid) -> Self {
        Self {
            phi_meas,
            stride: grid.sample_stride,
            window: grid.dense_window,
            times: Vec::new(),
            x_phi: Vec::new(),
            pop1: Vec::new(),
            pop2: Vec::new(),
            pop3: Vec::new(),
            nbar: Vec::new(),
            dense: DenseSeries::default(),
        }
    }

    fn x_from_a(&self, a_expect: C64, frame_phase: f64) -> f64 {
        2.0 * (a_expect * C64::from_polar(1.0, -(self.phi_meas - frame_phase))).re
    }

    fn record_step(&mut self, step: usize, n_steps: usize, t: f64, obs: Observables, frame: f64) {
        let x = self.x_from_a(obs.a_expect, frame);
        if step % self.stride == 0 || step == n_steps {
            self.times.push(t);
            self.x_phi.push(x);
            self.pop1.push(obs.pops[0]);
            self.pop2.push(obs.pops[1]);
            self.pop3.push(obs.pops[2]);
            self.nbar.push(obs.nbar);
        }
        if let Some((lo, hi)) = self.window {
            if t >= lo && t <= hi {
                self.dense.times.push(t);
                self.dense.x_phi.push(x);
            }
        }
    }

    fn finish(self, chirality: Chirality, final_rho: CMat, drift: f64) -> RunResult {
        let d_final = self.x_phi.last().copied().unwrap_or(0.0) / 2.0;
        RunResult {
            chirality,
            times: self.times,
            x_phi: self.x_phi,
            pop1: self.pop1,
            pop2: self.pop2,
            pop3: self.pop3,
            nbar: self.nbar,
            final_rho,
            d_metric_final: d_final,
            drift,
            dense: if self.dense.times.is_empty() {
                None
            } else {
                Some(self.dense)
            },
        }
    }
}

struct Observables {
    a_expect: C64,
    pops: [f64; 3],
    nbar: f64,
}

fn observe_state(psi: &CVec, f: usize) -> Observables {
    let v = psi.as_slice();
    let mut a = C64::new(0.0, 0.0);
    let mut pops = [0.0; 3];
    let mut nbar = 0.0;
    for m in 0..MOL_LEVELS {
        let base = m * f;
        for n in 0..f {
            let amp = v[base + n];
            let w = amp.norm_sqr();
            pops[m] += w;
            nbar += n as f64 * w;
            if n + 1 < f {
                a += amp.conj() * ((n + 1) as f64).sqrt() * v[base + n + 1];
            }
        }
    }
    Observables {
        a_expect: a,
        pops,
        nbar,
    }
}

fn observe_density(rho: &CMat, f: usize) -> Observables {
    let d = MOL_LEVELS * f;
    let s = rho.as_slice(); // column-major, (i, j) at j*d + i
    let mut a = C64::new(0.0, 0.0);
    let mut pops = [0.0; 3];
    let mut nbar = 0.0;
    for m in 0..MOL_LEVELS {
        let base = m * f;
        for n in 0..f {
            let diag = s[(base + n) * d + base + n].re;
            pops[m] += diag;
            nbar += n as f64 * diag;
            if n + 1 < f {
                // Tr[a rho] picks rho[(m,n+1), (m,n)]
                a += ((n + 1) as f64).sqrt() * s[(base + n) * d + base + n + 1];
            }
        }
    }
    Observables {
        a_expect: a,
        pops,
        nbar,
    }
}

/// Ground state |1> (x) |vacuum> on the product space.
pub fn ground_state(params: &PhysicalParams) -> CVec {
    let mut v = CVec::zeros(params.dim());
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Pure-state Schrödinger propagation, i d psi/dt = H(t) psi, classic RK4
/// with midpoint evaluations.
///
/// The norm is renormalized only when the accumulated drift exceeds 1e-9
/// (the drift is recorded, not hidden); drift beyond 1e-6 aborts with a
/// step-size error.
pub fn propagate_pure<H: HamiltonianOp>(
    h: &H,
    psi0: &CVec,
    grid: &TimeGrid,
    phi_meas: f64,
    chirality: Chirality,
) -> Result<RunResult> {
    let d = h.dim();
    if psi0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: psi0.len(),
        });
    }
    let norm0 = psi0.norm();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial state norm {norm0} not 1 within 1e-9"
        )));
    }
    let f = d / MOL_LEVELS;
    let n_steps = grid.n_steps();
    let dt = grid.dt;

    let mut psi = psi0.clone();
    let mut k1 = CVec::zeros(d);
    let mut k2 = CVec::zeros(d);
    let mut k3 = CVec::zeros(d);
    let mut k4 = CVec::zeros(d);
    let mut tmp = CVec::zeros(d);
    let mut coo_t = CooMat::new(d);
    let mut coo_m = CooMat::new(d);
    let mut coo_e = CooMat::new(d);

    let minus_i = C64::new(0.0, -1.0);
    let mut worst_drift = 0.0_f64;
    let mut recorder = Recorder::new(phi_meas, grid);
    recorder.record_step(0, n_steps, 0.0, observe_state(&psi, f), h.frame_phase(0.0));

    for step in 0..n_steps {
        let t = step as f64 * dt;
        h.fill_coo(t, &mut coo_t)?;
        h.fill_coo(t + 0.5 * dt, &mut coo_m)?;
        h.fill_coo((t + dt).min(grid.t_end), &mut coo_e)?;

        k1.fill(C64::new(0.0, 0.0));
        coo_t.apply_scaled(&psi, minus_i, &mut k1);

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(0.5 * dt, 0.0), &k1, C64::new(1.0, 0.0));
        k2.fill(C64::new(0.0, 0.0));
        coo_m.apply_scaled(&tmp, minus_i, &mut k2);

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(0.5 * dt, 0.0), &k2, C64::new(1.0, 0.0));
        k3.fill(C64::new(0.0, 0.0));
        coo_m.apply_scaled(&tmp, minus_i, &mut k3);

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(dt, 0.0), &k3, C64::new(1.0, 0.0));
        k4.fill(C64::new(0.0, 0.0));
        coo_e.apply_scaled(&tmp, minus_i, &mut k4);

        let w = dt / 6.0;
        {
            let p = psi.as_mut_slice();
            let (a, b, c, e) = (k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
            for i in 0..d {
                p[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]);
            }
        }

        let norm = psi.norm();
        let drift = (norm - 1.0).abs();
        worst_drift = worst_drift.max(drift);
        if drift > 1e-6 {
            return Err(Error::NormDrift {
                drift,
                limit: 1e-6,
            });
        }
        if drift > 1e-9 {
            psi /= C64::new(norm, 0.0);
        }

        let t_next = (step + 1) as f64 * dt;
        recorder.record_step(
            step + 1,
            n_steps,
            t_next,
            observe_state(&psi, f),
            h.frame_phase(t_next.min(grid.t_end)),
        );
    }

    let final_rho = outer(&psi);
    Ok(recorder.finish(chirality, final_rho, worst_drift))
}

/// Structured dissipator of the master equation: elementwise mask for all
/// diagonal channels plus the two genuine gain terms.
struct DissipatorKernel {
    f: usize,
    kappa: f64,
    gamma: f64,
    /// w[i,j] multiplies rho[i,j] elementwise; collects the anticommutator
    /// diagonal and the dephasing sigma^z rho sigma^z gain (all diagonal ops).
    w: Vec<f64>,
    sqrt_n: Vec<f64>,
}

impl DissipatorKernel {
    fn new(rates: &DecoherenceRates, f: usize) -> Self {
        let d = MOL_LEVELS * f;
        // sigma^z vectors for pairs (1,2), (1,3), (2,3) on the molecule
        let zvecs: [[f64; 3]; 3] = [
            [-0.5, 0.5, 0.0],
            [-0.5, 0.0, 0.5],
            [0.0, -0.5, 0.5],
        ];
        // relaxation targets: sigma^dag sigma diagonal per molecule level
        let relax = [0.0, 1.0, 2.0];
        let z_sq: [f64; 3] = std::array::from_fn(|m| zvecs.iter().map(|z| z[m] * z[m]).sum());
        let mut dvec = vec![0.0_f64; d];
        for m in 0..MOL_LEVELS {
            for n in 0..f {
                dvec[m * f + n] = rates.kappa / 2.0 * n as f64
                    + rates.gamma / 2.0 * relax[m]
                    + rates.gamma_phi / 2.0 * z_sq[m];
            }
        }
        let mut cross = [[0.0_f64; 3]; 3];
        for (mi, row) in cross.iter_mut().enumerate() {
            for (mj, v) in row.iter_mut().enumerate() {
                *v = rates.gamma_phi * zvecs.iter().map(|z| z[mi] * z[mj]).sum::<f64>();
            }
        }
        // column-major to match the density-matrix storage
        let mut w = vec![0.0_f64; d * d];
        for j in 0..d {
            for i in 0..d {
                w[j * d + i] = cross[i / f][j / f] - dvec[i] - dvec[j];
            }
        }
        Self {
            f,
            kappa: rates.kappa,
            gamma: rates.gamma,
            w,
            sqrt_n: (1..f).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    /// out += D(rho).
    fn apply(&self, rho: &[C64], out: &mut [C64]) {
        let f = self.f;
        let d = MOL_LEVELS * f;
        for (o, (r, w)) in out.iter_mut().zip(rho.iter().zip(self.w.iter())) {
            *o += *w * *r;
        }
        if self.kappa != 0.0 {
            // kappa * a rho a^dag: out[(m,n),(m',n')] += k sq(n) sq(n') rho[(m,n+1),(m',n'+1)]
            for mp in 0..MOL_LEVELS {
                for np in 0..f - 1 {
                    let scale_col = self.kappa * self.sqrt_n[np];
                    let col_out = mp * f + np;
                    let col_in = mp * f + np + 1;
                    for m in 0..MOL_LEVELS {
                        let ro = &rho[col_in * d + m * f + 1..col_in * d + m * f + f];
                        let oo = &mut out[col_out * d + m * f..col_out * d + m * f + f - 1];
                        for n in 0..f - 1 {
                            oo[n] += scale_col * self.sqrt_n[n] * ro[n];
                        }
                    }
                }
            }
        }
        if self.gamma != 0.0 {
            // gamma * sigma rho sigma^dag for (l, l') in {(1,2),(1,3),(2,3)}:
            // block (l, l) gains from block (l', l')
            for (l, lp) in [(0usize, 1usize), (0, 2), (1, 2)] {
                for c in 0..f {
                    let col_out = l * f + c;
                    let col_in = lp * f + c;
                    let ro = &rho[col_in * d + lp * f..col_in * d + lp * f + f];
                    let oo = &mut out[col_out * d + l * f..col_out * d + l * f + f];
                    for n in 0..f {
                        oo[n] += self.gamma * ro[n];
                    }
                }
            }
        }
    }
}

/// out = -i [H, rho] + D(rho), with H in sparse form.
fn lindblad_rhs(
    coo: &CooMat,
    kernel: &DissipatorKernel,
    rho: &[C64],
    out: &mut [C64],
    d: usize,
) {
    out.fill(C64::new(0.0, 0.0));
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    for &(r, c, hval) in &coo.entries {
        let (r, c) = (r as usize, c as usize);
        // -i (H rho): out[r, j] += -i h rho[c, j]
        let s = minus_i * hval;
        for j in 0..d {
            out[j * d + r] += s * rho[j * d + c];
        }
        // +i (rho H): out[i, c] += i rho[i, r] h
        let s = plus_i * hval;
        let ro = &rho[r * d..r * d + d];
        let oo = &mut out[c * d..c * d + d];
        for i in 0..d {
            oo[i] += s * ro[i];
        }
    }
    kernel.apply(rho, out);
}

/// Generic master-equation right-hand side built directly from a collapse
/// operator list; reference implementation for testing the structured kernel.
///
/// d rho/dt = -i[H, rho] + sum_c (2 c rho c^dag - c^dag c rho - rho c^dag c),
/// matching collapse operators scaled as sqrt(rate/2) * o.
pub fn lindblad_rhs_reference(h: &CMat, collapse: &[CMat], rho: &CMat) -> CMat {
    let mut out = h * rho - rho * h;
    out *= C64::new(0.0, -1.0);
    for c in collapse {
        let cd = c.adjoint();
        let cdc = &cd * c;
        out += (c * rho * &cd) * C64::new(2.0, 0.0);
        out -= &cdc * rho;
        out -= rho * &cdc;
    }
    out
}

fn hermitize(rho: &mut [C64], d: usize) {
    for j in 0..d {
        for i in 0..j {
            let upper = rho[j * d + i];
            let lower = rho[i * d + j];
            let avg = 0.5 * (upper + lower.conj());
            rho[j * d + i] = avg;
            rho[i * d + j] = avg.conj();
        }
        let diag = rho[j * d + j];
        rho[j * d + j] = C64::new(diag.re, 0.0);
    }
}

fn trace(rho: &[C64], d: usize) -> f64 {
    (0..d).map(|i| rho[i * d + i].re).sum()
}

/// Lindblad master-equation propagation of Eq.-(6)-type dynamics, RK4 on the
/// full right-hand side.
///
/// Hermiticity is restored each step as rho <- (rho + rho^dag)/2. The trace
/// is never renormalized: its drift is an accuracy metric and drift beyond
/// 1e-6 aborts. Positivity is gated at sample times (min eigenvalue above
/// -1e-5 via shifted Cholesky).
pub fn propagate_lindblad<H: HamiltonianOp>(
    h: &H,
    rates: &DecoherenceRates,
    rho0: &CMat,
    grid: &TimeGrid,
    phi_meas: f64,
    chirality: Chirality,
) -> Result<RunResult> {
    rates.validate()?;
    let d = h.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho0.nrows(),
        });
    }
    check_density_matrix(rho0)?;
    let f = d / MOL_LEVELS;
    let kernel = DissipatorKernel::new(rates, f);
    let n_steps = grid.n_steps();
    let dt = grid.dt;

    let mut rho = rho0.clone();
    let mut k1 = vec![C64::new(0.0, 0.0); d * d];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = CMat::zeros(d, d);
    let mut coo_t = CooMat::new(d);
    let mut coo_m = CooMat::new(d);
    let mut coo_e = CooMat::new(d);

    let mut worst_drift = 0.0_f64;
    let mut recorder = Recorder::new(phi_meas, grid);
    recorder.record_step(0, n_steps, 0.0, observe_density(&rho, f), h.frame_phase(0.0));

    for step in 0..n_steps {
        let t = step as f64 * dt;
        h.fill_coo(t, &mut coo_t)?;
        h.fill_coo(t + 0.5 * dt, &mut coo_m)?;
        h.fill_coo((t + dt).min(grid.t_end), &mut coo_e)?;

        {
            let r = rho.as_slice();
            lindblad_rhs(&coo_t, &kernel, r, &mut k1, d);
        }
        stage(&rho, &k1, 0.5 * dt, &mut tmp);
        lindblad_rhs(&coo_m, &kernel, tmp.as_slice(), &mut k2, d);
        stage(&rho, &k2, 0.5 * dt, &mut tmp);
        lindblad_rhs(&coo_m, &kernel, tmp.as_slice(), &mut k3, d);
        stage(&rho, &k3, dt, &mut tmp);
        lindblad_rhs(&coo_e, &kernel, tmp.as_slice(), &mut k4, d);

        {
            let r = rho.as_mut_slice();
            let w = dt / 6.0;
            for i in 0..d * d {
                r[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            hermitize(r, d);
            let drift = (trace(r, d) - 1.0).abs();
            worst_drift = worst_drift.max(drift);
            if drift > 1e-6 {
                return Err(Error::TraceDrift {
                    drift,
                    limit: 1e-6,
                });
            }
        }

        let step1 = step + 1;
        if step1 % grid.sample_stride == 0 || step1 == n_steps {
            check_positivity(&rho, 1e-5)?;
        }
        let t_next = step1 as f64 * dt;
        recorder.record_step(
            step1,
            n_steps,
            t_next,
            observe_density(&rho, f),
            h.frame_phase(t_next.min(grid.t_end)),
        );
    }

    Ok(recorder.finish(chirality, rho, worst_drift))
}

fn stage(rho: &CMat, k: &[C64], h: f64, out: &mut CMat) {
    let r = rho.as_slice();
    let o = out.as_mut_slice();
    for i in 0..r.len() {
        o[i] = r[i] + h * k[i];
    }
}

/// Fail when the smallest eigenvalue of `rho` is below `-limit`; cheap
/// sufficient test first (Cholesky of rho + limit I), exact eigenvalue only
/// on failure.
fn check_positivity(rho: &CMat, limit: f64) -> Result<()> {
    let d = rho.nrows();
    let shifted = rho + CMat::identity(d, d) * C64::new(limit, 0.0);
    if nalgebra::Cholesky::new(shifted).is_some() {
        return Ok(());
    }
    let min_eig = crate::qlinalg::min_eigenvalue_hermitian(rho);
    if min_eig < -limit {
        return Err(Error::PositivityLost { min_eig });
    }
    Ok(())
}

/// One complete scenario: everything needed to propagate a single enantiomer
/// pair.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub params: PhysicalParams,
    pub errors: SystematicErrors,
    pub rates: DecoherenceRates,
    pub awgn: Option<AwgnConfig>,
    pub corrected_pulse: bool,
    pub mode: HamiltonianKind,
    /// Grid override; defaults per mode when absent.
    pub grid: Option<TimeGrid>,
}

impl RunSpec {
    pub fn nominal() -> Self {
        Self {
            params: PhysicalParams::default(),
            errors: SystematicErrors::none(),
            rates: DecoherenceRates::none(),
            awgn: None,
            corrected_pulse: false,
            mode: HamiltonianKind::Full,
            grid: None,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
            .clone()
            .unwrap_or_else(|| TimeGrid::default_for(self.mode, &self.params))
    }

    pub fn correction(&self) -> PulseCorrection {
        if self.corrected_pulse {
            PulseCorrection::KappaCorrected(self.rates.kappa)
        } else {
            PulseCorrection::Off
        }
    }

    /// The homodyne angle: always the nominal measurement angle, computed
    /// without systematic errors; the experimenter does not know the errors.
    pub fn phi_meas(&self) -> Result<f64> {
        analytics::measurement_angle(&self.params, &SystematicErrors::none())
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.params.validate()?;
        self.errors.validate()?;
        self.rates.validate()?;
        if let Some(awgn) = &self.awgn {
            awgn.validate()?;
        }
        self.grid().validate(self.mode, &self.params, &self.errors)?;
        Ok(warnings)
    }
}

/// Propagate a single chirality. `noise_seed` overrides the seed of the
/// AWGN block when present.
pub fn run_single(
    spec: &RunSpec,
    chirality: Chirality,
    noise_seed: Option<u64>,
) -> Result<RunResult> {
    let grid = spec.grid();
    grid.validate(spec.mode, &spec.params, &spec.errors)?;
    let phi_meas = spec.phi_meas()?;
    let correction = spec.correction();
    let noise = match &spec.awgn {
        Some(cfg) => {
            let mut cfg = *cfg;
            if let Some(seed) = noise_seed {
                cfg.seed = seed;
            }
            RunNoise::generate(&spec.params, &spec.errors, correction, &cfg)?
        }
        None => RunNoise::default(),
    };

    let psi0 = ground_state(&spec.params);
    match spec.mode {
        HamiltonianKind::Full => {
            let h = FullHamiltonian::new(
                chirality,
                spec.params.clone(),
                spec.errors,
                correction,
                noise,
            );
            if spec.rates.is_zero() {
                propagate_pure(&h, &psi0, &grid, phi_meas, chirality)
            } else {
                propagate_lindblad(&h, &spec.rates, &outer(&psi0), &grid, phi_meas, chirality)
            }
        }
        HamiltonianKind::Effective => {
            let h = EffectiveHamiltonian::new(
                chirality,
                spec.params.clone(),
                spec.errors,
                correction,
            );
            if spec.rates.is_zero() {
                propagate_pure(&h, &psi0, &grid, phi_meas, chirality)
            } else {
                propagate_lindblad(&h, &spec.rates, &outer(&psi0), &grid, phi_meas, chirality)
            }
        }
    }
}

/// Both-chirality outcome with the discrimination series
/// D(t) = (<X>_L(t) - <X>_R(t)) / 2.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub left: RunResult,
    pub right: RunResult,
    pub times: Vec<f64>,
    pub d_series: Vec<f64>,
    pub d_final: f64,
    /// Dense D(t) inside the grid's dense window, when requested.
    pub dense: Option<DenseSeries>,
}

/// Run both chiralities with identical parameters. With AWGN the two
/// branches draw independent noise (two molecules are physically distinct):
/// L uses `base_seed`, R uses `base_seed + 1`, where `base_seed` defaults to
/// the seed of the AWGN block.
pub fn run_pair(spec: &RunSpec, seeds: Option<(u64, u64)>) -> Result<PairOutcome> {
    let (seed_l, seed_r) = match (seeds, &spec.awgn) {
        (Some(pair), _) => pair,
        (None, Some(cfg)) => (cfg.seed, cfg.seed + 1),
        (None, None) => (0, 0),
    };
    let noise_seeds = spec.awgn.as_ref().map(|_| (seed_l, seed_r));
    let left = run_single(spec, Chirality::L, noise_seeds.map(|s| s.0))?;
    let right = run_single(spec, Chirality::R, noise_seeds.map(|s| s.1))?;
    if left.times != right.times {
        return Err(Error::InvalidParameter(
            "left/right runs recorded different time grids".into(),
        ));
    }
    let d_series: Vec<f64> = left
        .x_phi
        .iter()
        .zip(&right.x_phi)
        .map(|(l, r)| (l - r) / 2.0)
        .collect();
    let d_final = *d_series.last().expect("non-empty");
    let dense = match (&left.dense, &right.dense) {
        (Some(l), Some(r)) if l.times == r.times => Some(DenseSeries {
            times: l.times.clone(),
            x_phi: l
                .x_phi
                .iter()
                .zip(&r.x_phi)
                .map(|(a, b)| (a - b) / 2.0)
                .collect(),
        }),
        _ => None,
    };
    Ok(PairOutcome {
        times: left.times.clone(),
        d_series,
        d_final,
        dense,
        left,
        right,
    })
}

/// Argmax over a recorded discrimination series; ties break toward the
/// earlier time.
pub fn scan_tprime(times: &[f64], d_series: &[f64]) -> (f64, f64) {
    assert!(
        !times.is_empty() && times.len() == d_series.len(),
        "scan_tprime needs a non-empty series"
    );
    let mut best = 0;
    for i in 1..d_series.len() {
        if d_series[i] > d_series[best] {
            best = i;
        }
    }
    (times[best], d_series[best])
}
