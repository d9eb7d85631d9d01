//! Manual parameter scans behind the preset constants. Each test
//! prints a table; run with
//! `cargo test --test calibration -- --ignored --nocapture`
//! when re-deriving `DARK_RATE_HZ` or `PAIR_DEPOLARIZATION`.

use std::time::Instant;

use photon_logic::analysis::{fidelity_vs_delay, BoundConvention};
use photon_logic::experiments::{
    noise_free, preset, run, run_bell_pair, ExperimentKind, ReportBody,
};

fn with(mut cfg: photon_logic::experiments::ExperimentConfig, f: impl FnOnce(&mut photon_logic::experiments::ExperimentConfig)) -> photon_logic::experiments::ExperimentConfig {
    f(&mut cfg);
    cfg
}

#[test]
#[ignore]
fn scan_dark_rate() {
    for dark_hz in [1500.0, 1700.0, 1800.0, 1900.0, 2000.0, 2500.0] {
        for seed in [101, 202, 303] {
            let cfg = with(preset(ExperimentKind::Hbt, seed), |c| {
                c.detectors.dark_rate_hz = dark_hz;
            });
            let t0 = Instant::now();
            let out = run(&cfg).unwrap();
            if let ReportBody::Correlation { g2_zero, normalization, .. } = out.report.body {
                println!(
                    "dark {dark_hz:6.0} Hz  seed {seed}  g2(0) {g2_zero:.4}  norm {normalization:.1}  clicks {}  {:.1?}",
                    out.logs[0].events.len(),
                    t0.elapsed()
                );
            }
        }
    }
}

#[test]
#[ignore]
fn noise_free_g2_floor() {
    let cfg = with(noise_free(preset(ExperimentKind::Hbt, 102)), |c| c.duration_ns = 1e11);
    let t0 = Instant::now();
    let out = run(&cfg).unwrap();
    if let ReportBody::Correlation { g2_zero, normalization, .. } = out.report.body {
        println!(
            "noise-free g2(0) {g2_zero:.6}  norm {normalization:.1}  clicks {}  {:.1?}",
            out.logs[0].events.len(),
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn hom_visibility_check() {
    let cfg = preset(ExperimentKind::Hom, 103);
    let t0 = Instant::now();
    let out = run(&cfg).unwrap();
    if let ReportBody::Interference { visibility, pairs, coincidences, reference_coincidences, .. } =
        out.report.body
    {
        println!(
            "V {visibility:.4}  pairs {pairs}  C {coincidences}  Cref {reference_coincidences}  {:.1?}",
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn truth_table_profile() {
    let cfg = preset(ExperimentKind::CnotTruthTable, 104);
    let t0 = Instant::now();
    let out = run(&cfg).unwrap();
    if let ReportBody::TruthTable { similarity, row_pairs, delay_curve, .. } = &out.report.body {
        println!("S {similarity:.4}  rows {row_pairs:?}  {:.1?}", t0.elapsed());
        for p in &delay_curve.points {
            println!(
                "  dt {:5.0}  S {:.4}  pairs {:5}  flagged {}",
                p.center_ns, p.value, p.pairs, p.flagged
            );
        }
        println!("  empty {:?}", delay_curve.empty_centers);
    }
}

#[test]
#[ignore]
fn scan_depolarization() {
    for lambda in [0.36, 0.38, 0.40, 0.42, 0.44] {
        let mk = |kind| {
            with(preset(kind, 105), |c| {
                c.routing.depolarization = lambda;
            })
        };
        let t0 = Instant::now();
        let (report, _logs) =
            run_bell_pair(&mk(ExperimentKind::BellZz), &mk(ExperimentKind::BellXx)).unwrap();
        println!(
            "lambda {lambda:.2}  zz {:+.4}  xx {:+.4}  bound {:.4}  F {:.4}  spread {:.4}  {:.1?}",
            report.zz_value,
            report.xx_value,
            report.bound.bound,
            report.fidelity_estimate,
            report.spread,
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn bell_delay_profile() {
    let zz = preset(ExperimentKind::BellZz, 106);
    let xx = preset(ExperimentKind::BellXx, 106);
    let (report, logs) = run_bell_pair(&zz, &xx).unwrap();
    println!(
        "zz {:+.4}  xx {:+.4}  bound {:.4}  F {:.4}",
        report.zz_value, report.xx_value, report.bound.bound, report.fidelity_estimate
    );
    for convention in [BoundConvention::ScaledRootTwo, BoundConvention::Witness] {
        let curve = fidelity_vs_delay(
            &logs[0].events,
            &logs[1].events,
            &zz.qubit_channels().unwrap(),
            &zz.analysis.delay_centers_ns,
            zz.analysis.delay_half_width_ns,
            convention,
        )
        .unwrap();
        println!("convention {convention:?}  spread {:.4}", curve.spread());
        for p in &curve.points {
            println!(
                "  dt {:5.0}  value {:.4}  pairs {:5}  flagged {}",
                p.center_ns, p.value, p.pairs, p.flagged
            );
        }
    }
}
