//! Medium-weight cross-checks of the propagators against the closed-form
//! displacement analytics (the independent oracle for this crate).

use enantiosim::analytics;
use enantiosim::dynamics::{run_pair, run_single, HamiltonianKind, RunSpec, TimeGrid};
use enantiosim::homodyne::SpectralDistribution;
use enantiosim::model::{Chirality, DecoherenceRates, SystematicErrors};
use enantiosim::qlinalg::{expectation, partial_trace_molecule};

/// The nominal full-model endpoint, frozen from two independent
/// integrators agreeing to six digits.
const X_HALF_NOMINAL_FULL: f64 = 2.071517;

#[test]
fn full_run_endpoint_and_shape() {
    let out = run_single(&RunSpec::nominal(), Chirality::L, None).unwrap();
    let x_half = out.x_final() / 2.0;
    assert!(
        (x_half - X_HALF_NOMINAL_FULL).abs() < 1e-3,
        "X/2(T) = {x_half}"
    );
    // monotone rise after the initial transient
    let n = out.times.len();
    for i in (n / 10)..(n - 1) {
        assert!(
            out.x_phi[i + 1] > out.x_phi[i] - 1e-3,
            "quadrature dipped at t = {}",
            out.times[i]
        );
    }
    // vacuum start
    assert_eq!(out.x_phi[0], 0.0);
    assert_eq!(out.nbar[0], 0.0);
}

#[test]
fn frame_equivalence_full_vs_effective() {
    let full = run_single(&RunSpec::nominal(), Chirality::L, None).unwrap();
    let mut spec = RunSpec::nominal();
    spec.mode = HamiltonianKind::Effective;
    let eff = run_single(&spec, Chirality::L, None).unwrap();
    let rel = (full.x_final().abs() - eff.x_final().abs()).abs() / eff.x_final().abs();
    assert!(rel < 0.05, "full/effective mismatch {:.3}%", 100.0 * rel);

    // the effective run must land on the closed form almost exactly
    let p = spec.params.clone();
    let alpha = analytics::alpha_of_t(p.total_time, &p, &SystematicErrors::none()).unwrap();
    let x_eff = eff.x_final() / 2.0;
    assert!(
        (x_eff - alpha.norm()).abs() < 1e-5,
        "effective endpoint {x_eff} vs |alpha| {}",
        alpha.norm()
    );
}

#[test]
fn ideal_pair_discrimination_metric() {
    let pair = run_pair(&RunSpec::nominal(), None).unwrap();
    // D(T) = 2 x |X_L|/2 by antisymmetry; about twice 2.068
    assert!((pair.d_final - 2.0 * X_HALF_NOMINAL_FULL).abs() < 2e-3);
    assert!((pair.d_final - 4.136).abs() / 4.136 < 0.05);
    // per-run discrimination metric mirrors the series
    assert!((pair.left.d_metric_final - X_HALF_NOMINAL_FULL).abs() < 1e-3);
    assert!((pair.right.d_metric_final + X_HALF_NOMINAL_FULL).abs() < 1e-3);
}

#[test]
fn ground_population_confinement() {
    // the molecule stays close to |1>: the exact dynamics dips by the
    // counter-rotating beat depth ~4(Omega/Delta)^2 + the 1-3 contribution,
    // about 0.045 at the envelope peak for the working point
    let out = run_single(&RunSpec::nominal(), Chirality::L, None).unwrap();
    let min_p1 = out.pop1.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min_p1 > 0.93, "min P1 = {min_p1}");
    assert!(
        *out.pop1.last().unwrap() > 0.97,
        "end P1 = {}",
        out.pop1.last().unwrap()
    );
}

#[test]
fn spectral_sampler_consistent_on_decohered_state() {
    // general-rho sampling on a genuinely decohered cavity state agrees with
    // Tr[X rho]/2 within 2%
    let mut spec = RunSpec::nominal();
    spec.params.total_time = 60.0;
    spec.params.fock_cutoff = 14;
    spec.rates = DecoherenceRates {
        kappa: 0.02,
        gamma: 0.01,
        gamma_phi: 0.01,
    };
    spec.grid = Some(TimeGrid {
        dt: 2e-3,
        t_end: 60.0,
        sample_stride: 100,
        dense_window: None,
    });
    let out = run_single(&spec, Chirality::L, None).unwrap();
    let rho_cav = partial_trace_molecule(&out.final_rho).unwrap();
    let phi = spec.phi_meas().unwrap();
    let dist = SpectralDistribution::new(&rho_cav, phi).unwrap();
    let x_op = enantiosim::homodyne::quadrature_operator(phi, spec.params.fock_cutoff).unwrap();
    let direct = expectation(&x_op, &rho_cav).unwrap().re / 2.0;
    assert!(
        (dist.mean() - direct).abs() / direct.abs() < 0.02,
        "spectral mean {} vs Tr[X rho]/2 = {direct}",
        dist.mean()
    );
}

#[test]
fn effective_pair_matches_analytics_with_errors() {
    // analytic-vs-numeric comparison with a non-trivial error record goes
    // through identical effective parameters
    let mut spec = RunSpec::nominal();
    spec.mode = HamiltonianKind::Effective;
    spec.errors = SystematicErrors {
        eta1: 0.05,
        eta2: -0.04,
        eta3: 0.03,
        eta1p: 0.02,
        eta2p: -0.06,
    };
    let pair = run_pair(&spec, None).unwrap();
    let pred = analytics::AnalyticPrediction::compute(&spec.params, &spec.errors, 0.0, false)
        .unwrap();
    let phi_nominal = spec.phi_meas().unwrap();
    let d_pred = pred.d_predicted(phi_nominal);
    assert!(
        (pair.d_final - d_pred).abs() < 1e-4,
        "effective pair D = {} vs analytic {}",
        pair.d_final,
        d_pred
    );
}
