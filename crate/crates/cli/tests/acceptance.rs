//! Acceptance suite: one test per criterion (sub-criteria split out where a
//! single number is at stake), each printing a PASS/FAIL line with the
//! measured values. Heavy master-equation runs are shared across criteria
//! through lazy statics.
//!
//! Run with: cargo test -p enantiosim-cli --test acceptance -- --nocapture

use std::sync::OnceLock;

use enantiosim::analytics;
use enantiosim::dynamics::{
    run_pair, scan_tprime, HamiltonianKind, PairOutcome, RunSpec, TimeGrid,
};
use enantiosim::homodyne;
use enantiosim::model::{
    AwgnConfig, DecoherenceRates, MolecularReference, PhysicalParams, SystematicErrors,
};
use enantiosim::qlinalg::min_eigenvalue_hermitian;
use enantiosim_cli::commands::{self, systematic_1d_rows, Ctx};
use enantiosim_cli::config::ScenarioConfig;

fn nominal_spec() -> RunSpec {
    RunSpec::nominal()
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} :: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

fn check(criterion: &str, passed: bool, detail: &str) {
    report(criterion, passed, detail);
    assert!(passed, "{criterion}: {detail}");
}

fn nominal_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| run_pair(&nominal_spec(), None).expect("nominal pair"))
}

fn rate_pair(rates: DecoherenceRates, corrected: bool) -> PairOutcome {
    let mut spec = nominal_spec();
    spec.rates = rates;
    spec.corrected_pulse = corrected;
    run_pair(&spec, None).expect("master pair")
}

fn kappa_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| {
        rate_pair(
            DecoherenceRates {
                kappa: 0.01,
                ..DecoherenceRates::none()
            },
            false,
        )
    })
}

fn gamma_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| {
        rate_pair(
            DecoherenceRates {
                gamma: 0.01,
                ..DecoherenceRates::none()
            },
            false,
        )
    })
}

fn gamma_phi_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| {
        rate_pair(
            DecoherenceRates {
                gamma_phi: 0.01,
                ..DecoherenceRates::none()
            },
            false,
        )
    })
}

fn corrected_triple_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| rate_pair(DecoherenceRates::uniform(0.01), true))
}

fn original_triple_pair() -> &'static PairOutcome {
    static CELL: OnceLock<PairOutcome> = OnceLock::new();
    CELL.get_or_init(|| rate_pair(DecoherenceRates::uniform(0.01), false))
}

// --- criterion 1: analytic oracle identity --------------------------------

#[test]
fn criterion1_quadrature_matches_closed_form_on_grid() {
    let no_err = SystematicErrors::none();
    let mut worst = 0.0_f64;
    for i in 0..10 {
        for j in 0..10 {
            let a2 = 1.0 + 3.0 * i as f64 / 9.0;
            let t = 50.0 + 350.0 * j as f64 / 9.0;
            let p = PhysicalParams {
                a2,
                total_time: t,
                ..PhysicalParams::default()
            };
            let q = analytics::alpha_of_t(t, &p, &no_err).unwrap();
            let c = analytics::alpha_final_closed_form(&p, &no_err).unwrap();
            worst = worst.max((q - c).norm());
        }
    }
    check(
        "criterion 1a (quadrature = closed form on 10x10 grid)",
        worst < 1e-8,
        &format!("worst |quad - closed| = {worst:.3e} (limit 1e-8)"),
    );
}

#[test]
fn criterion1_nominal_modulus_as_stated() {
    // Stated: |alpha(T)| = 1.9894 +- 1e-4. Three independent routes
    // (adaptive quadrature of the displacement integral, the closed form,
    // and an effective-Hamiltonian propagation) all give 1.98858649; the
    // stated oracle value appears to be miscomputed. Asserted as stated.
    let p = PhysicalParams::default();
    let q = analytics::alpha_of_t(p.total_time, &p, &SystematicErrors::none()).unwrap();
    let measured = q.norm();
    check(
        "criterion 1b (nominal |alpha(T)| = 1.9894 +- 1e-4)",
        (measured - 1.9894).abs() <= 1e-4,
        &format!("measured {measured:.8} (independent routes agree to 1e-10)"),
    );
}

// --- criterion 2: Fig-2(b)-style reproduction ------------------------------

#[test]
fn criterion2_final_quadrature_within_tolerances() {
    let pair = nominal_pair();
    let xl = pair.left.x_final() / 2.0;
    let xr = pair.right.x_final() / 2.0;
    let ok_l = (xl - 2.068).abs() / 2.068 < 0.05;
    let ok_r = (xr + 2.068).abs() / 2.068 < 0.05;
    let ok_analytic = (xl - 1.9894).abs() / 1.9894 < 0.05;
    check(
        "criterion 2a (X/2 at T within 5% of +-2.068 and of the analytic value)",
        ok_l && ok_r && ok_analytic,
        &format!("X_L/2 = {xl:.6}, X_R/2 = {xr:.6}"),
    );
}

#[test]
fn criterion2_ground_population_stays_high() {
    // Stated: P1(t) > 0.98 throughout. The exact Eq.-(1) dynamics has
    // counter-rotating population beats of depth ~4(Omega/Delta)^2 ~ 0.06 at
    // the envelope peak, so the faithful minimum is ~0.955. Asserted as
    // stated.
    let pair = nominal_pair();
    let min_p1 = pair
        .left
        .pop1
        .iter()
        .chain(&pair.right.pop1)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    check(
        "criterion 2b (P1(t) > 0.98 throughout)",
        min_p1 > 0.98,
        &format!("min P1 = {min_p1:.6}"),
    );
}

// --- criterion 3: erfc pipeline --------------------------------------------

#[test]
fn criterion3_error_probability_reference_value() {
    let p2 = analytics::error_probability(2.0);
    // within 1 in the sixth significant figure of 3.16712e-5
    let ok = (p2 - 3.16712e-5).abs() < 1e-10;
    check(
        "criterion 3a (P_e(2) = 3.16712e-5 to 6 significant figures)",
        ok,
        &format!("P_e(2) = {p2:.6e}"),
    );
}

#[test]
fn criterion3_consistent_quoted_pairs() {
    let mut detail = String::new();
    let mut all_ok = true;
    for (d, pe) in [
        (3.77, 8.162e-5),
        (3.601, 1.5911e-4),
        (3.215, 6.5222e-4),
        (2.575, 0.005),
    ] {
        let got = homodyne::empirical_error_rate(d).unwrap();
        let rel = (got - pe).abs() / pe;
        all_ok &= rel < 0.02;
        detail.push_str(&format!("D={d}: {got:.4e} vs {pe:.4e} ({rel:+.4}); "));
    }
    check(
        "criterion 3b (quoted (D, P_e) pairs within 2% relative)",
        all_ok,
        &detail,
    );
}

#[test]
fn criterion3_pair_2p2326_as_stated() {
    // Stated: (2.2326, 0.012) reproduces within 2% relative. The erfc map
    // gives 1.2788e-2, which is 6.6% from the quoted 0.012 (the source
    // rounded inconsistently). Asserted as stated.
    let got = homodyne::empirical_error_rate(2.2326).unwrap();
    let rel = (got - 0.012).abs() / 0.012;
    check(
        "criterion 3c (pair (2.2326, 0.012) within 2% relative)",
        rel < 0.02,
        &format!("erfc(D/sqrt2)/2 = {got:.5e}, rel deviation {rel:.4}"),
    );
}

// --- criterion 4: systematic errors ----------------------------------------

#[test]
fn criterion4_systematic_error_sweeps() {
    let base = nominal_spec();
    let rows = systematic_1d_rows(&base, 21).expect("sweeps");
    let min_d = rows
        .iter()
        .map(|r| r.2)
        .fold(f64::INFINITY, f64::min);
    check(
        "criterion 4a (D >= 3.7 over all eta_j in [-0.1, 0.1])",
        min_d >= 3.7,
        &format!("min D over sweeps = {min_d:.4}"),
    );

    // eta1 monotonicity on [0, 0.1], exact per recorded samples
    let mut eta1_rows: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.0 == "eta1" && r.1 >= -1e-12)
        .map(|r| (r.1, r.2))
        .collect();
    eta1_rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let monotone = eta1_rows.windows(2).all(|w| w[1].1 > w[0].1);
    check(
        "criterion 4b (D strictly increasing in eta1 on [0, 0.1])",
        monotone,
        &format!(
            "samples: {}",
            eta1_rows
                .iter()
                .map(|(e, d)| format!("({e:.2}, {d:.4})"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    );

    // detuning worst case
    let mut spec = base.clone();
    spec.errors = SystematicErrors {
        eta1p: 0.1,
        eta2p: 0.1,
        ..Default::default()
    };
    let corner = run_pair(&spec, None).expect("corner pair");
    let rel = (corner.d_final - 3.601).abs() / 3.601;
    check(
        "criterion 4c (detuning corner (0.1, 0.1): D = 3.601 +- 3%)",
        rel <= 0.03,
        &format!("D = {:.4} ({rel:+.4} relative)", corner.d_final),
    );
}

// --- criterion 5: decoherence points ----------------------------------------

#[test]
fn criterion5_kappa_point_as_stated() {
    // Stated: kappa = 0.01 g alone gives D = 2.2326 +- 3%. The faithful
    // Eq.-(6) integration gives 2.3152 (+3.7%), cross-validated against an
    // independent integrator and the decay-weighted displacement quadrature.
    // Asserted as stated.
    let d = kappa_pair().d_final;
    let rel = (d - 2.2326).abs() / 2.2326;
    check(
        "criterion 5a (kappa = 0.01: D = 2.2326 +- 3%)",
        rel <= 0.03,
        &format!("D = {d:.4} ({rel:+.4} relative)"),
    );
}

#[test]
fn criterion5_gamma_point() {
    let d = gamma_pair().d_final;
    let rel = (d - 3.978).abs() / 3.978;
    check(
        "criterion 5b (gamma = 0.01: D = 3.978 +- 3%)",
        rel <= 0.03,
        &format!("D = {d:.4} ({rel:+.4} relative)"),
    );
}

#[test]
fn criterion5_gamma_phi_point() {
    let d = gamma_phi_pair().d_final;
    let rel = (d - 3.812).abs() / 3.812;
    check(
        "criterion 5c (gamma_phi = 0.01: D = 3.812 +- 3%)",
        rel <= 0.03,
        &format!("D = {d:.4} ({rel:+.4} relative)"),
    );
}

// --- criterion 6: pulse correction ------------------------------------------

#[test]
fn criterion6_corrected_displacement_identity() {
    let p = PhysicalParams::default();
    let no_err = SystematicErrors::none();
    let alpha = analytics::alpha_of_t(p.total_time, &p, &no_err).unwrap();
    let mut worst = 0.0_f64;
    for kappa in [0.005, 0.01, 0.02] {
        let bar = analytics::alpha_with_decay(&p, &no_err, kappa, true).unwrap();
        worst = worst.max((bar - alpha).norm());
    }
    check(
        "criterion 6a (corrected alpha_bar(T) = alpha(T) within 1e-8)",
        worst < 1e-8,
        &format!("worst deviation {worst:.2e}"),
    );
}

#[test]
fn criterion6_corrected_final_d_as_stated() {
    // Stated: corrected pulses at gamma = gamma_phi = kappa = 0.01 g give
    // D(T) = 2.575 +- 3%. The faithful simulation gives 2.872: the corrected
    // (amplified) 1-3 pulse drives the exact dynamics harder than the quoted
    // value reflects. Asserted as stated.
    let d = corrected_triple_pair().d_final;
    let rel = (d - 2.575).abs() / 2.575;
    check(
        "criterion 6b (corrected, uniform 0.01: D(T) = 2.575 +- 3%)",
        rel <= 0.03,
        &format!("D(T) = {d:.4} ({rel:+.4} relative)"),
    );
}

#[test]
fn criterion6_tprime_scan_corrected_as_stated() {
    // Stated: corrected maximum D = 3.367 +- 3% at T' = 165 +- 5. The
    // faithful scan peaks at 3.636 at T' = 178.8. Asserted as stated.
    let pair = corrected_triple_pair();
    let (t_star, d_max) = scan_tprime(&pair.times, &pair.d_series);
    let ok = (d_max - 3.367).abs() / 3.367 <= 0.03 && (t_star - 165.0).abs() <= 5.0;
    check(
        "criterion 6c (corrected scan: max D = 3.367 +- 3% at T' = 165 +- 5)",
        ok,
        &format!("max D = {d_max:.4} at T' = {t_star:.1}"),
    );
}

#[test]
fn criterion6_tprime_scan_original() {
    let pair = original_triple_pair();
    let (t_star, d_max) = scan_tprime(&pair.times, &pair.d_series);
    let ok = (d_max - 2.639).abs() / 2.639 <= 0.03 && (t_star - 183.0).abs() <= 5.0;
    check(
        "criterion 6d (original scan: max D = 2.639 +- 3% at T' = 183 +- 5)",
        ok,
        &format!("max D = {d_max:.4} at T' = {t_star:.1}"),
    );
}

// --- criterion 7: AWGN ensemble ---------------------------------------------

#[test]
fn criterion7_awgn_ensemble_statistics_and_determinism() {
    let base_seed = 1000_u64;
    let mut config = ScenarioConfig::default();
    config.awgn = Some(AwgnConfig {
        snr_db: 10.0,
        seed: base_seed,
        ..Default::default()
    });
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let mk_ctx = |dir: &std::path::Path| Ctx {
        config: config.clone(),
        out_dir: dir.to_path_buf(),
        base_seed,
        mode: HamiltonianKind::Full,
        threads: 0,
    };
    commands::cmd_awgn(&mk_ctx(dir_a.path())).expect("ensemble A");
    commands::cmd_awgn(&mk_ctx(dir_b.path())).expect("ensemble B");
    let csv_a = std::fs::read(dir_a.path().join("awgn_ensemble.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.path().join("awgn_ensemble.csv")).unwrap();
    check(
        "criterion 7a (identical base seed gives byte-identical output)",
        csv_a == csv_b,
        &format!("{} bytes compared", csv_a.len()),
    );

    let text = String::from_utf8(csv_a).unwrap();
    let ds: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ds.len(), 50);
    let mean = ds.iter().sum::<f64>() / ds.len() as f64;
    let min = ds.iter().cloned().fold(f64::INFINITY, f64::min);
    let noiseless = nominal_pair().d_final;
    let ok_min = (3.0..=3.6).contains(&min);
    let ok_mean = (mean - noiseless).abs() / noiseless <= 0.05;
    check(
        "criterion 7b (ensemble min in [3.0, 3.6], mean within 5% of noiseless)",
        ok_min && ok_mean,
        &format!("min = {min:.4}, mean = {mean:.4}, noiseless = {noiseless:.4}"),
    );
}

// --- criterion 8: physics property suite -------------------------------------

#[test]
fn criterion8_master_equation_run_health() {
    let mut worst_drift = 0.0_f64;
    let mut worst_eig = 0.0_f64;
    let mut worst_psum = 0.0_f64;
    for pair in [
        kappa_pair(),
        gamma_pair(),
        gamma_phi_pair(),
        corrected_triple_pair(),
        original_triple_pair(),
    ] {
        for run in [&pair.left, &pair.right] {
            worst_drift = worst_drift.max(run.drift);
            worst_eig = worst_eig.min(min_eigenvalue_hermitian(&run.final_rho));
            for i in 0..run.times.len() {
                let psum = run.pop1[i] + run.pop2[i] + run.pop3[i];
                worst_psum = worst_psum.max((psum - 1.0).abs());
            }
        }
    }
    let ok = worst_drift < 1e-7 && worst_eig >= -1e-6 && worst_psum < 1e-7;
    check(
        "criterion 8a (trace drift < 1e-7, min eig >= -1e-6, P-sum = 1 within 1e-7)",
        ok,
        &format!(
            "worst trace drift {worst_drift:.2e}, min eigenvalue {worst_eig:.2e}, worst |P-sum - 1| {worst_psum:.2e}"
        ),
    );
}

#[test]
fn criterion8_rk4_order_measured() {
    let d_at = |dt: f64| {
        let mut spec = nominal_spec();
        spec.grid = Some(TimeGrid {
            dt,
            t_end: spec.params.total_time,
            sample_stride: 25,
            dense_window: None,
        });
        run_pair(&spec, None).expect("pair").d_final
    };
    let d4 = d_at(4e-3);
    let d2 = d_at(2e-3);
    let d1 = d_at(1e-3);
    let ratio = (d4 - d2).abs() / (d2 - d1).abs();
    check(
        "criterion 8b (RK4 order: halving error ratio = 16 +- 2)",
        (14.0..=18.0).contains(&ratio),
        &format!(
            "|D(4e-3)-D(2e-3)| = {:.3e}, |D(2e-3)-D(1e-3)| = {:.3e}, ratio = {ratio:.2}",
            (d4 - d2).abs(),
            (d2 - d1).abs()
        ),
    );
}

#[test]
fn criterion8_truncation_shift() {
    let mut spec = nominal_spec();
    spec.params.fock_cutoff = 35;
    let d35 = run_pair(&spec, None).expect("N = 35 pair").d_final;
    let d30 = nominal_pair().d_final;
    check(
        "criterion 8c (N 30 -> 35 shifts D(T) by < 1e-3)",
        (d35 - d30).abs() < 1e-3,
        &format!("shift = {:.3e}", (d35 - d30).abs()),
    );
}

#[test]
fn criterion8_chirality_antisymmetry() {
    let pair = nominal_pair();
    let worst = pair
        .left
        .x_phi
        .iter()
        .zip(&pair.right.x_phi)
        .map(|(l, r)| (l + r).abs())
        .fold(0.0_f64, f64::max);
    check(
        "criterion 8d (ideal-case L/R antisymmetry below 1e-6)",
        worst < 1e-6,
        &format!("worst |X_L + X_R| = {worst:.2e}"),
    );
}

// --- criterion 9: molecular reference record ----------------------------------

#[test]
fn criterion9_molecular_reference_consistency() {
    let m = MolecularReference::default();
    let ok = m.check_consistency().is_ok()
        && m.delta_blue_mhz() == 200.0
        && m.delta_blue_mhz() == 20.0 * m.g_mhz
        && m.delta_red_mhz() == 10.0
        && m.delta_red_mhz() == m.g_mhz
        && m.nu_mhz + m.delta_blue_mhz() + m.delta_red_mhz() == 849.0
        && m.time_us(250.0) == 25.0;
    check(
        "criterion 9 (reference frequencies and 25 us interaction time, exact)",
        ok,
        &format!(
            "Delta = {} MHz, delta = {} MHz, nu+Delta+delta = {} MHz, T = {} us",
            m.delta_blue_mhz(),
            m.delta_red_mhz(),
            m.nu_mhz + m.delta_blue_mhz() + m.delta_red_mhz(),
            m.time_us(250.0)
        ),
    );
}
