//! Config-to-report pipelines, split into a simulation stage that
//! produces event logs and an analysis stage that only reads them.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::analysis::{
    coincidence_pairs, fidelity_bound, g2_histogram, ideal_cnot_truth_table, outcome_counts,
    pauli_expectation, sideband_background, similarity_vs_delay, symmetric_fidelity_estimate,
    truth_table, BackgroundMode, DelayCurve, FidelityBound, Window, PARITY_SIGNS,
    SWAPPED_CONTROL_SIGNS,
};
use crate::eventlog::EventLog;
use crate::experiments::{
    CorrelationSetting, ExperimentConfig, ExperimentKind, LogSummary, ReportBody, RunReport,
};
use crate::optics::Matrix;
use crate::rng::stream;
use crate::source::{
    detect, route_stream, simulate_emissions, ChannelMap, DetectionEvent, PhotonAtOutput,
    RoutedStream, SinglePhoton,
};
use crate::temporal::{
    two_photon_density, Polarization, TimeSampler, TwoPhotonSampler, Wavepacket,
};
use crate::{Error, Result};

/// A finished run: the summary report plus the raw logs it was computed
/// from, in the same order as `report.logs`.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub logs: Vec<EventLog>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let logs = simulate(cfg)?;
    let report = analyze(cfg, &logs)?;
    Ok(RunOutput { report, logs })
}

/// Produces one event log per label in [`log_labels`].
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Hbt => simulate_hbt(cfg),
        ExperimentKind::Hom => simulate_hom(cfg),
        ExperimentKind::CnotTruthTable => simulate_truth_table(cfg),
        ExperimentKind::BellZz | ExperimentKind::BellXx => simulate_bell(cfg),
    }
}

/// Computes the kind's metrics from previously recorded logs. The logs
/// must carry this config's hash and seed.
pub fn analyze(cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<RunReport> {
    cfg.validate()?;
    let labels = log_labels(cfg.kind);
    if logs.len() != labels.len() {
        return Err(Error::argument(format!(
            "{} expects {} event logs, got {}",
            cfg.kind.as_str(),
            labels.len(),
            logs.len()
        )));
    }
    let hash = cfg.hash()?;
    for log in logs {
        if log.config_hash != hash {
            return Err(Error::argument(format!(
                "event log was recorded under config {:016x}, not {:016x}",
                log.config_hash, hash
            )));
        }
        if log.seed != cfg.seed {
            return Err(Error::argument(format!(
                "event log was recorded under seed {}, not {}",
                log.seed, cfg.seed
            )));
        }
        if log.events.is_empty() {
            return Err(Error::EmptyLog);
        }
    }
    let body = match cfg.kind {
        ExperimentKind::Hbt => analyze_hbt(cfg, logs)?,
        ExperimentKind::Hom => analyze_hom(cfg, logs)?,
        ExperimentKind::CnotTruthTable => analyze_truth_table(cfg, logs)?,
        ExperimentKind::BellZz | ExperimentKind::BellXx => analyze_bell(cfg, logs)?,
    };
    Ok(RunReport {
        kind: cfg.kind,
        seed: cfg.seed,
        config_hash: format!("{hash:016x}"),
        duration_ns: cfg.duration_ns,
        logs: logs
            .iter()
            .zip(labels)
            .map(|(l, label)| LogSummary { label: label.to_string(), clicks: l.events.len() })
            .collect(),
        body,
    })
}

pub fn log_labels(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::Hbt => &["hbt"],
        ExperimentKind::Hom => &["interference", "reference"],
        ExperimentKind::CnotTruthTable => &["00", "01", "10", "11"],
        ExperimentKind::BellZz => &["zz"],
        ExperimentKind::BellXx => &["xx"],
    }
}

/// Index drawn proportionally to `weights`; zero-weight entries are
/// never selected.
fn weighted_choice(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        u -= w;
        if u <= 0.0 {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn column_powers(u: &Matrix, col: usize) -> Vec<f64> {
    (0..u.nrows()).map(|r| u[(r, col)].norm_sqr()).collect()
}

fn label(cfg: &ExperimentConfig, stage: &str) -> String {
    format!("{}:{stage}", cfg.kind.as_str())
}

fn keep_mapped(photons: Vec<PhotonAtOutput>, map: &ChannelMap) -> Vec<PhotonAtOutput> {
    photons.into_iter().filter(|p| map.outputs.contains_key(&p.mode)).collect()
}

fn simulate_hbt(cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    let src = cfg.source_config()?;
    let map = cfg.channel_map();
    let u = cfg.network()?.compile();
    let weights = column_powers(&u, map.input("source")?);
    let sampler = TimeSampler::from_packet(&src.envelope)?;
    let emissions =
        simulate_emissions(&src, cfg.duration_ns, &mut stream(cfg.seed, &label(cfg, "emissions"), 0))?;
    let mut rng = stream(cfg.seed, &label(cfg, "transport"), 0);
    let mut photons = Vec::with_capacity(emissions.len());
    for e in &emissions {
        let mode = weighted_choice(&weights, &mut rng);
        let time_ns = e.time_ns(src.rep_period_ns) + sampler.sample(&mut rng);
        photons.push(PhotonAtOutput { mode, time_ns });
    }
    let events = detect(
        &keep_mapped(photons, &map),
        &cfg.detector_config(),
        &map,
        cfg.duration_ns,
        &mut stream(cfg.seed, &label(cfg, "detect"), 0),
    )?;
    Ok(vec![EventLog::new(cfg.hash()?, cfg.seed, events)])
}

fn analyze_hbt(cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<ReportBody> {
    let map = cfg.channel_map();
    let hist = g2_histogram(
        &logs[0].events,
        &map.detector_ids(),
        cfg.analysis.bin_width_ns,
        cfg.analysis.max_lag_ns,
    )?;
    Ok(ReportBody::Correlation {
        g2_zero: hist.g2_zero(),
        normalization: hist.normalization,
        curve: hist.curve(),
    })
}

/// Shared two-photon transport: joint outcome sampling over all output
/// mode pairs (exchange included), independent routing for unpaired
/// photons, and the optional pair depolarizer.
struct PairPipeline {
    keys: Vec<(usize, usize)>,
    weights: Vec<f64>,
    samplers: Vec<Option<TwoPhotonSampler>>,
    single_sampler: TimeSampler,
    delayed_weights: Vec<f64>,
    direct_weights: Vec<f64>,
    depolarization: f64,
    rail_combos: Option<[(usize, usize); 4]>,
    coincidence: Vec<bool>,
}

impl PairPipeline {
    fn new(
        u: &Matrix,
        inputs: (usize, usize),
        delayed: &Wavepacket,
        direct: &Wavepacket,
        depolarization: f64,
        rails: Option<[(usize, usize); 4]>,
    ) -> Result<Self> {
        let density = two_photon_density(u, inputs, (delayed, direct))?;
        let keys: Vec<(usize, usize)> = density.pair_keys().collect();
        let mut weights = Vec::with_capacity(keys.len());
        let mut samplers = Vec::with_capacity(keys.len());
        for &(i, j) in &keys {
            let pd = density.pair(i, j)?;
            let w = pd.total_probability();
            if w > 1e-12 {
                samplers.push(Some(TwoPhotonSampler::new(&pd)?));
                weights.push(w);
            } else {
                samplers.push(None);
                weights.push(0.0);
            }
        }
        let combos =
            rails.map(|r| r.map(|(c, t)| if c <= t { (c, t) } else { (t, c) }));
        let coincidence =
            keys.iter().map(|k| combos.is_some_and(|cs| cs.contains(k))).collect();
        Ok(PairPipeline {
            keys,
            weights,
            samplers,
            single_sampler: TimeSampler::from_packet(direct)?,
            delayed_weights: column_powers(u, inputs.0),
            direct_weights: column_powers(u, inputs.1),
            depolarization,
            rail_combos: combos,
            coincidence,
        })
    }

    fn push_pair(&self, chip_time_ns: f64, rng: &mut impl Rng, out: &mut Vec<PhotonAtOutput>) {
        let idx = weighted_choice(&self.weights, rng);
        if let Some(combos) = self.rail_combos {
            if self.coincidence[idx]
                && self.depolarization > 0.0
                && rng.random::<f64>() < self.depolarization
            {
                let (a, b) = combos[rng.random_range(0..4)];
                let ta = chip_time_ns + self.single_sampler.sample(rng);
                let tb = chip_time_ns + self.single_sampler.sample(rng);
                out.push(PhotonAtOutput { mode: a, time_ns: ta });
                out.push(PhotonAtOutput { mode: b, time_ns: tb });
                return;
            }
        }
        let sampler = self.samplers[idx].as_ref().expect("sampled outcome has positive weight");
        let (t1, t2) = sampler.sample(rng);
        let (i, j) = self.keys[idx];
        out.push(PhotonAtOutput { mode: i, time_ns: chip_time_ns + t1 });
        out.push(PhotonAtOutput { mode: j, time_ns: chip_time_ns + t2 });
    }

    fn push_single(&self, s: &SinglePhoton, rng: &mut impl Rng, out: &mut Vec<PhotonAtOutput>) {
        let weights = match s.polarization {
            Polarization::H => &self.delayed_weights,
            Polarization::V => &self.direct_weights,
        };
        out.push(PhotonAtOutput {
            mode: weighted_choice(weights, rng),
            time_ns: s.chip_time_ns + self.single_sampler.sample(rng),
        });
    }

    fn emit(&self, routed: &RoutedStream, rng: &mut impl Rng) -> Vec<PhotonAtOutput> {
        let mut out = Vec::with_capacity(2 * routed.pairs.len() + routed.singles.len());
        for p in &routed.pairs {
            self.push_pair(p.chip_time_ns, rng, &mut out);
        }
        for s in &routed.singles {
            self.push_single(s, rng, &mut out);
        }
        out
    }
}

/// Signed lag histogram (time at `pair.1` minus time at `pair.0`) of
/// two-detector coincidences, one entry per unordered pair.
fn lag_histogram(
    events: &[DetectionEvent],
    pair: (u8, u8),
    bin_width_ns: f64,
    max_lag_ns: f64,
) -> Vec<(f64, u64)> {
    let bin_ps = (bin_width_ns * 1000.0).round();
    let max_bin = ((max_lag_ns * 1000.0) / bin_ps).round() as i64;
    let reach_ps = ((max_bin as f64 + 0.5) * bin_ps).ceil() as i64;
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for (i, a) in events.iter().enumerate() {
        for b in events[i + 1..].iter() {
            if b.timestamp_ps - a.timestamp_ps > reach_ps {
                break;
            }
            let signed_ps = if (a.detector, b.detector) == pair {
                b.timestamp_ps - a.timestamp_ps
            } else if (b.detector, a.detector) == pair {
                a.timestamp_ps - b.timestamp_ps
            } else {
                continue;
            };
            let lag = (signed_ps as f64 / bin_ps).round() as i64;
            if lag.abs() <= max_bin {
                *bins.entry(lag).or_insert(0) += 1;
            }
        }
    }
    bins.into_iter().map(|(lag, c)| (lag as f64 * bin_width_ns, c)).collect()
}

fn count_coincidences(events: &[DetectionEvent], pair: (u8, u8), half_width_ns: f64) -> u64 {
    let reach_ps = (half_width_ns * 1000.0).round() as i64;
    let mut n = 0;
    for (i, a) in events.iter().enumerate() {
        for b in events[i + 1..].iter() {
            if b.timestamp_ps - a.timestamp_ps > reach_ps {
                break;
            }
            if (a.detector, b.detector) == pair || (b.detector, a.detector) == pair {
                n += 1;
            }
        }
    }
    n
}

fn simulate_hom(cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    let src = cfg.source_config()?;
    let map = cfg.channel_map();
    let u = cfg.network()?.compile();
    let inputs = (map.input("delayed")?, map.input("direct")?);
    let packet = cfg.packet()?;
    let delayed = packet.with_detuning(cfg.routing.relative_detuning_rad_per_ns);
    // reference arm: orthogonal polarization switches interference off
    let reference_direct = packet.with_polarization(Polarization::V);
    let pipes = [
        PairPipeline::new(&u, inputs, &delayed, &packet, 0.0, None)?,
        PairPipeline::new(&u, inputs, &delayed, &reference_direct, 0.0, None)?,
    ];
    let emissions =
        simulate_emissions(&src, cfg.duration_ns, &mut stream(cfg.seed, &label(cfg, "emissions"), 0))?;
    let routed = route_stream(&emissions, src.rep_period_ns, cfg.routing.delay_ns);
    let det = cfg.detector_config();
    let hash = cfg.hash()?;
    let mut logs = Vec::new();
    for (idx, pipe) in pipes.iter().enumerate() {
        let photons = pipe.emit(&routed, &mut stream(cfg.seed, &label(cfg, "transport"), idx as u64));
        let events = detect(
            &keep_mapped(photons, &map),
            &det,
            &map,
            cfg.duration_ns,
            &mut stream(cfg.seed, &label(cfg, "detect"), idx as u64),
        )?;
        logs.push(EventLog::new(hash, cfg.seed, events));
    }
    Ok(logs)
}

fn analyze_hom(cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<ReportBody> {
    let src = cfg.source_config()?;
    let map = cfg.channel_map();
    let ids = map.detector_ids();
    if ids.len() != 2 {
        return Err(Error::Config("two-photon interference needs exactly two detectors".into()));
    }
    let pair = (ids[0], ids[1]);
    let hw = cfg.analysis.window_half_width_ns;
    let coincidences = count_coincidences(&logs[0].events, pair, hw);
    let reference_coincidences = count_coincidences(&logs[1].events, pair, hw);
    if reference_coincidences == 0 {
        return Err(Error::domain("no reference coincidences inside the acceptance window"));
    }
    let visibility = 1.0 - coincidences as f64 / reference_coincidences as f64;
    // injected pair count re-derived from the seeded emission stream
    let emissions =
        simulate_emissions(&src, cfg.duration_ns, &mut stream(cfg.seed, &label(cfg, "emissions"), 0))?;
    let routed = route_stream(&emissions, src.rep_period_ns, cfg.routing.delay_ns);
    Ok(ReportBody::Interference {
        visibility,
        pairs: routed.pairs.len() as u64,
        coincidences,
        reference_coincidences,
        dip: lag_histogram(&logs[0].events, pair, cfg.analysis.bin_width_ns, cfg.analysis.max_lag_ns),
        reference_dip: lag_histogram(
            &logs[1].events,
            pair,
            cfg.analysis.bin_width_ns,
            cfg.analysis.max_lag_ns,
        ),
    })
}

fn rail_inputs(cfg: &ExperimentConfig) -> Result<([usize; 2], [usize; 2])> {
    let map = cfg.channel_map();
    Ok((
        [map.input("control0")?, map.input("control1")?],
        [map.input("target0")?, map.input("target1")?],
    ))
}

fn rail_combos(c: [usize; 2], t: [usize; 2]) -> [(usize, usize); 4] {
    [(c[0], t[0]), (c[0], t[1]), (c[1], t[0]), (c[1], t[1])]
}

fn simulate_truth_table(cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    let src = cfg.source_config()?;
    let map = cfg.channel_map();
    let u = cfg.network()?.compile();
    let (c, t) = rail_inputs(cfg)?;
    let combos = rail_combos(c, t);
    let packet = cfg.packet()?;
    let delayed = packet.with_detuning(cfg.routing.relative_detuning_rad_per_ns);
    let det = cfg.detector_config();
    let hash = cfg.hash()?;
    let mut logs = Vec::with_capacity(4);
    for (row, &(ci, ti)) in combos.iter().enumerate() {
        let idx = row as u64;
        let emissions = simulate_emissions(
            &src,
            cfg.duration_ns,
            &mut stream(cfg.seed, &label(cfg, "emissions"), idx),
        )?;
        let routed = route_stream(&emissions, src.rep_period_ns, cfg.routing.delay_ns);
        let pipe = PairPipeline::new(
            &u,
            (ci, ti),
            &delayed,
            &packet,
            cfg.routing.depolarization,
            Some(combos),
        )?;
        let photons = pipe.emit(&routed, &mut stream(cfg.seed, &label(cfg, "transport"), idx));
        let events = detect(
            &keep_mapped(photons, &map),
            &det,
            &map,
            cfg.duration_ns,
            &mut stream(cfg.seed, &label(cfg, "detect"), idx),
        )?;
        logs.push(EventLog::new(hash, cfg.seed, events));
    }
    Ok(logs)
}

fn analyze_truth_table(cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<ReportBody> {
    let qc = cfg.qubit_channels()?;
    let window = Window::Global { half_width_ns: cfg.analysis.window_half_width_ns };
    let background = match cfg.analysis.sideband_ns {
        Some(band_ns) => BackgroundMode::Sidebands { band_ns },
        None => BackgroundMode::None,
    };
    let raw_logs: Vec<Vec<DetectionEvent>> = logs.iter().map(|l| l.events.clone()).collect();
    let table = truth_table(&raw_logs, &qc, &window, background)?;
    let similarity = table.similarity_to(&ideal_cnot_truth_table())?;
    let delay_curve = if cfg.analysis.delay_centers_ns.is_empty() {
        DelayCurve::default()
    } else {
        similarity_vs_delay(
            &raw_logs,
            &qc,
            &cfg.analysis.delay_centers_ns,
            cfg.analysis.delay_half_width_ns,
        )?
    };
    let mut raw_counts = Vec::with_capacity(16);
    let mut background_cells = Vec::with_capacity(16);
    for log in &raw_logs {
        let pairs = coincidence_pairs(log, &qc, &window)?;
        raw_counts.extend(outcome_counts(&pairs));
        background_cells.extend(match cfg.analysis.sideband_ns {
            Some(band_ns) => sideband_background(log, &qc, &window, band_ns)?,
            None => [0.0; 4],
        });
    }
    Ok(ReportBody::TruthTable {
        similarity,
        row_pairs: table.row_pairs.clone(),
        probabilities: table.cells(),
        raw_counts,
        background: background_cells,
        delay_curve,
    })
}

fn simulate_bell(cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    let src = cfg.source_config()?;
    let map = cfg.channel_map();
    let u = cfg.network()?.compile();
    let inputs = (map.input("delayed")?, map.input("direct")?);
    let (c, t) = rail_inputs(cfg)?;
    let packet = cfg.packet()?;
    let delayed = packet.with_detuning(cfg.routing.relative_detuning_rad_per_ns);
    let pipe = PairPipeline::new(
        &u,
        inputs,
        &delayed,
        &packet,
        cfg.routing.depolarization,
        Some(rail_combos(c, t)),
    )?;
    let emissions =
        simulate_emissions(&src, cfg.duration_ns, &mut stream(cfg.seed, &label(cfg, "emissions"), 0))?;
    let routed = route_stream(&emissions, src.rep_period_ns, cfg.routing.delay_ns);
    let photons = pipe.emit(&routed, &mut stream(cfg.seed, &label(cfg, "transport"), 0));
    let events = detect(
        &keep_mapped(photons, &map),
        &cfg.detector_config(),
        &map,
        cfg.duration_ns,
        &mut stream(cfg.seed, &label(cfg, "detect"), 0),
    )?;
    Ok(vec![EventLog::new(cfg.hash()?, cfg.seed, events)])
}

fn analyze_bell(cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<ReportBody> {
    let qc = cfg.qubit_channels()?;
    let window = Window::Global { half_width_ns: cfg.analysis.window_half_width_ns };
    let pairs = coincidence_pairs(&logs[0].events, &qc, &window)?;
    if pairs.is_empty() {
        return Err(Error::domain("no coincidences survive post-selection"));
    }
    let counts = outcome_counts(&pairs);
    let (setting, signs) = match cfg.kind {
        ExperimentKind::BellZz => (CorrelationSetting::Zz, SWAPPED_CONTROL_SIGNS),
        _ => (CorrelationSetting::Xx, PARITY_SIGNS),
    };
    let expectation = pauli_expectation(&counts, signs)?;
    Ok(ReportBody::Correlations { setting, expectation, counts, pairs: pairs.len() as u64 })
}

/// Both correlation settings plus the bound combining them.
#[derive(Debug, Clone, Serialize)]
pub struct BellPairReport {
    pub zz: RunReport,
    pub xx: RunReport,
    pub zz_value: f64,
    pub xx_value: f64,
    pub bound: FidelityBound,
    pub fidelity_estimate: f64,
    pub delay_curve: DelayCurve,
    pub spread: f64,
}

pub fn run_bell_pair(
    zz_cfg: &ExperimentConfig,
    xx_cfg: &ExperimentConfig,
) -> Result<(BellPairReport, Vec<EventLog>)> {
    if zz_cfg.kind != ExperimentKind::BellZz || xx_cfg.kind != ExperimentKind::BellXx {
        return Err(Error::argument("expected one bell_zz and one bell_xx config"));
    }
    let zz_out = run(zz_cfg)?;
    let xx_out = run(xx_cfg)?;
    let zz_value = correlation_value(&zz_out.report)?;
    let xx_value = correlation_value(&xx_out.report)?;
    let bound = fidelity_bound(zz_value, xx_value, zz_cfg.analysis.convention)?;
    let fidelity_estimate = symmetric_fidelity_estimate(zz_value, xx_value);
    let delay_curve = if zz_cfg.analysis.delay_centers_ns.is_empty() {
        DelayCurve::default()
    } else {
        crate::analysis::fidelity_vs_delay(
            &zz_out.logs[0].events,
            &xx_out.logs[0].events,
            &zz_cfg.qubit_channels()?,
            &zz_cfg.analysis.delay_centers_ns,
            zz_cfg.analysis.delay_half_width_ns,
            zz_cfg.analysis.convention,
        )?
    };
    let spread = delay_curve.spread();
    let mut logs = zz_out.logs;
    logs.extend(xx_out.logs);
    let report = BellPairReport {
        zz: zz_out.report,
        xx: xx_out.report,
        zz_value,
        xx_value,
        bound,
        fidelity_estimate,
        delay_curve,
        spread,
    };
    Ok((report, logs))
}

fn correlation_value(report: &RunReport) -> Result<f64> {
    match &report.body {
        ReportBody::Correlations { expectation, .. } => Ok(*expectation),
        _ => Err(Error::argument("report carries no correlation body")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::presets::{noise_free, preset};
    use approx::assert_abs_diff_eq;

    fn short(mut cfg: ExperimentConfig, duration_ns: f64) -> ExperimentConfig {
        cfg.duration_ns = duration_ns;
        cfg
    }

    #[test]
    fn weighted_choice_respects_weights_and_skips_zeros() {
        let mut rng = stream(3, "weighted", 0);
        let weights = [0.0, 0.25, 0.0, 0.75];
        let mut counts = [0u32; 4];
        for _ in 0..4000 {
            counts[weighted_choice(&weights, &mut rng)] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[2], 0);
        let frac = counts[3] as f64 / 4000.0;
        assert!((frac - 0.75).abs() < 0.03, "frac = {frac}");
    }

    #[test]
    fn hbt_run_is_deterministic_and_antibunched() {
        let cfg = short(preset(ExperimentKind::Hbt, 11), 4e9);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.logs, b.logs);
        assert_eq!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
        let other = run(&short(preset(ExperimentKind::Hbt, 12), 4e9)).unwrap();
        assert_ne!(a.logs, other.logs);
        match a.report.body {
            ReportBody::Correlation { g2_zero, .. } => {
                assert!(g2_zero < 0.6, "g2(0) = {g2_zero} with darks at a short run")
            }
            _ => panic!("wrong body"),
        }
    }

    #[test]
    fn analyze_rechecks_log_provenance() {
        let cfg = short(preset(ExperimentKind::Hbt, 11), 1e9);
        let logs = simulate(&cfg).unwrap();
        analyze(&cfg, &logs).unwrap();

        let mut wrong_seed = cfg.clone();
        wrong_seed.seed = 12;
        assert!(analyze(&wrong_seed, &logs).is_err());

        let empty = vec![EventLog::new(cfg.hash().unwrap(), cfg.seed, Vec::new())];
        assert!(matches!(analyze(&cfg, &empty), Err(Error::EmptyLog)));

        assert!(analyze(&cfg, &[]).is_err());
    }

    #[test]
    fn noise_free_interference_suppresses_coincidences() {
        let cfg = short(noise_free(preset(ExperimentKind::Hom, 5)), 1e10);
        let out = run(&cfg).unwrap();
        match out.report.body {
            ReportBody::Interference { visibility, coincidences, reference_coincidences, pairs, .. } => {
                assert!(pairs > 1000, "pairs = {pairs}");
                assert!(reference_coincidences > 100);
                assert_eq!(coincidences, 0, "identical packets never split");
                assert_abs_diff_eq!(visibility, 1.0, epsilon = 1e-12);
            }
            _ => panic!("wrong body"),
        }
    }

    #[test]
    fn noise_free_truth_table_matches_the_gate() {
        let cfg = short(noise_free(preset(ExperimentKind::CnotTruthTable, 9)), 6e9);
        let out = run(&cfg).unwrap();
        match &out.report.body {
            ReportBody::TruthTable { similarity, row_pairs, .. } => {
                assert!(row_pairs.iter().all(|&n| n > 50), "row pairs {row_pairs:?}");
                assert!(*similarity > 0.99, "similarity = {similarity}");
            }
            _ => panic!("wrong body"),
        }
    }

    #[test]
    fn noise_free_pair_correlations_certify_entanglement() {
        let zz = short(noise_free(preset(ExperimentKind::BellZz, 21)), 1.5e10);
        let xx = short(noise_free(preset(ExperimentKind::BellXx, 21)), 1.5e10);
        let (report, logs) = run_bell_pair(&zz, &xx).unwrap();
        assert_eq!(logs.len(), 2);
        assert!(report.zz_value < -0.9, "zz = {}", report.zz_value);
        assert!(report.xx_value > 0.9, "xx = {}", report.xx_value);
        assert!(report.bound.certifies_entanglement(), "bound = {}", report.bound.bound);
        assert!(report.fidelity_estimate > 0.9);
    }

    #[test]
    fn lag_histogram_signs_follow_the_detector_order() {
        let events = vec![
            DetectionEvent { timestamp_ps: 1_000_000, detector: 0 },
            DetectionEvent { timestamp_ps: 1_050_000, detector: 1 },
            DetectionEvent { timestamp_ps: 9_000_000, detector: 1 },
            DetectionEvent { timestamp_ps: 9_030_000, detector: 0 },
        ];
        let hist = lag_histogram(&events, (0, 1), 10.0, 100.0);
        assert_eq!(hist, vec![(-30.0, 1), (50.0, 1)]);
        assert_eq!(count_coincidences(&events, (0, 1), 100.0), 2);
        assert_eq!(count_coincidences(&events, (0, 1), 40.0), 1);
    }
}
