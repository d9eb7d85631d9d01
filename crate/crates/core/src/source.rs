//! Monte-Carlo model of the intermittent single-photon stream, the
//! delay-line pairing stage, and timestamping click detectors.
//!
//! Emission happens on a global slot grid (one slot per repetition
//! period). Atoms arrive as a Poisson process and emit during a random
//! transit; each covered slot yields at most one photon. The pairing
//! stage delays one polarization by a whole period so that favorable
//! consecutive emissions meet at the chip simultaneously.

use std::collections::BTreeMap;

use rand::Rng;

use crate::temporal::{Polarization, Wavepacket};
use crate::{Error, Result};

/// Photon-stream parameters.
#[derive(Debug, Clone)]
pub struct SourceConfig {
    /// Slot spacing, ns.
    pub rep_period_ns: f64,
    /// Emission probability per slot while an atom is present.
    pub emission_efficiency: f64,
    /// Atom arrival rate, atoms per second.
    pub atom_rate_hz: f64,
    /// Longest transit, ns.
    pub transit_max_ns: f64,
    pub transit_distribution: TransitDistribution,
    /// Single-photon envelope template, anchored per slot.
    pub envelope: Wavepacket,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransitDistribution {
    /// Uniform over (0, transit_max).
    Uniform,
    /// Exponential with the given mean, truncated at transit_max.
    Exponential { mean_ns: f64 },
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rep_period_ns > 0.0) {
            return Err(Error::domain(format!(
                "repetition period {} must be positive",
                self.rep_period_ns
            )));
        }
        if !(0.0..=1.0).contains(&self.emission_efficiency) {
            return Err(Error::domain(format!(
                "emission efficiency {} outside [0, 1]",
                self.emission_efficiency
            )));
        }
        if self.atom_rate_hz < 0.0 || self.transit_max_ns <= 0.0 {
            return Err(Error::domain("atom rate must be >= 0 and transit bound > 0"));
        }
        Ok(())
    }

    fn sample_transit(&self, rng: &mut impl Rng) -> f64 {
        match self.transit_distribution {
            TransitDistribution::Uniform => rng.random::<f64>() * self.transit_max_ns,
            TransitDistribution::Exponential { mean_ns } => {
                let u: f64 = rng.random();
                (-(1.0 - u).ln() * mean_ns).min(self.transit_max_ns)
            }
        }
    }
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            rep_period_ns: 1000.0,
            emission_efficiency: 0.60,
            atom_rate_hz: 200.0,
            transit_max_ns: 60_000.0,
            transit_distribution: TransitDistribution::Uniform,
            envelope: crate::temporal::default_envelope(400.0, 0.0, 1.0)
                .expect("default envelope parameters are valid"),
        }
    }
}

/// Click detector parameters.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub quantum_efficiency: f64,
    /// Dark counts per second per detector.
    pub dark_rate_hz: f64,
    /// Timestamp quantization, ns.
    pub resolution_ns: f64,
    pub dead_time_ns: f64,
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.quantum_efficiency) {
            return Err(Error::domain(format!(
                "quantum efficiency {} outside [0, 1]",
                self.quantum_efficiency
            )));
        }
        if !(self.resolution_ns > 0.0) {
            return Err(Error::domain(format!(
                "resolution {} must be positive",
                self.resolution_ns
            )));
        }
        if self.dark_rate_hz < 0.0 || self.dead_time_ns < 0.0 {
            return Err(Error::domain("dark rate and dead time must be >= 0"));
        }
        Ok(())
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            quantum_efficiency: 0.70,
            dark_rate_hz: 0.0,
            resolution_ns: 0.080,
            dead_time_ns: 0.0,
        }
    }
}

/// Routing between the stream, the chip and the detectors: which chip
/// input each photon role takes, and per-output loss, extra path delay
/// and detector assignment.
#[derive(Debug, Clone, Default)]
pub struct ChannelMap {
    /// Photon role ("delayed", "direct", ...) to chip input mode.
    pub inputs: BTreeMap<String, usize>,
    /// Chip output mode to its readout channel.
    pub outputs: BTreeMap<usize, OutputChannel>,
}

#[derive(Debug, Clone)]
pub struct OutputChannel {
    /// Lumped input-to-detector loss, dB.
    pub loss_db: f64,
    pub detector: u8,
    /// Extra path delay added to this output's timestamps, ns.
    pub delay_ns: f64,
}

impl OutputChannel {
    pub fn survival(&self) -> f64 {
        10f64.powf(-self.loss_db / 10.0)
    }
}

impl ChannelMap {
    pub fn validate(&self) -> Result<()> {
        for (mode, ch) in &self.outputs {
            if ch.loss_db < 0.0 {
                return Err(Error::domain(format!("output {mode}: loss {} dB < 0", ch.loss_db)));
            }
        }
        Ok(())
    }

    pub fn input(&self, role: &str) -> Result<usize> {
        self.inputs
            .get(role)
            .copied()
            .ok_or_else(|| Error::argument(format!("no chip input mapped for role '{role}'")))
    }

    pub fn output(&self, mode: usize) -> Result<&OutputChannel> {
        self.outputs
            .get(&mode)
            .ok_or_else(|| Error::argument(format!("no readout channel for chip output {mode}")))
    }

    pub fn detector_ids(&self) -> Vec<u8> {
        let mut ids: Vec<u8> = self.outputs.values().map(|c| c.detector).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// One emitted photon, identified by its slot on the global grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emission {
    pub slot: i64,
    pub polarization: Polarization,
}

impl Emission {
    pub fn time_ns(&self, rep_period_ns: f64) -> f64 {
        self.slot as f64 * rep_period_ns
    }
}

/// Emissions from a single transit window, one slot at a time.
pub fn emissions_for_transit(
    cfg: &SourceConfig,
    arrival_ns: f64,
    transit_ns: f64,
    rng: &mut impl Rng,
) -> Vec<Emission> {
    let rep = cfg.rep_period_ns;
    let first = (arrival_ns / rep).ceil() as i64;
    let last = ((arrival_ns + transit_ns) / rep).ceil() as i64;
    let mut out = Vec::new();
    for slot in first..last {
        if (slot as f64) * rep >= arrival_ns + transit_ns {
            break;
        }
        if rng.random::<f64>() < cfg.emission_efficiency {
            let polarization =
                if rng.random::<bool>() { Polarization::H } else { Polarization::V };
            out.push(Emission { slot, polarization });
        }
    }
    out
}

/// Full emission record over `duration_ns`: Poisson atom arrivals, a
/// random transit per atom, per-slot emission during transits. At most
/// one photon per slot.
pub fn simulate_emissions(
    cfg: &SourceConfig,
    duration_ns: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Emission>> {
    cfg.validate()?;
    if !(duration_ns > 0.0) {
        return Err(Error::domain(format!("duration {duration_ns} must be positive")));
    }
    let rate_per_ns = cfg.atom_rate_hz / 1e9;
    let mut emissions: Vec<Emission> = Vec::new();
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / rate_per_ns;
        if t >= duration_ns {
            break;
        }
        let transit = cfg.sample_transit(rng);
        emissions.extend(emissions_for_transit(cfg, t, transit.min(duration_ns - t), rng));
    }
    emissions.sort_unstable_by_key(|e| e.slot);
    emissions.dedup_by_key(|e| e.slot);
    Ok(emissions)
}

/// A photon pair meeting at the chip: the delayed photon from `slot`,
/// the direct photon from the following slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInjection {
    /// Common arrival time at the chip, ns.
    pub chip_time_ns: f64,
    pub delayed_slot: i64,
    pub direct_slot: i64,
}

/// A photon that found no partner, arriving alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhoton {
    pub chip_time_ns: f64,
    pub polarization: Polarization,
    pub slot: i64,
}

#[derive(Debug, Clone, Default)]
pub struct RoutedStream {
    pub pairs: Vec<PairInjection>,
    pub singles: Vec<SinglePhoton>,
}

/// Delay-line pairing: H photons take the long arm (+`delay_ns`), V
/// photons the short arm. A pair forms when a delayed photon lands on
/// the next slot's direct photon. Everything else continues alone.
pub fn route_stream(emissions: &[Emission], rep_period_ns: f64, delay_ns: f64) -> RoutedStream {
    let delay_slots = delay_ns / rep_period_ns;
    let whole = delay_slots.round();
    let aligned = (delay_slots - whole).abs() < 1e-9 && whole != 0.0;
    let by_slot: BTreeMap<i64, Polarization> =
        emissions.iter().map(|e| (e.slot, e.polarization)).collect();
    let mut out = RoutedStream::default();
    for e in emissions {
        let arrival = match e.polarization {
            Polarization::H => e.time_ns(rep_period_ns) + delay_ns,
            Polarization::V => e.time_ns(rep_period_ns),
        };
        match e.polarization {
            Polarization::H if aligned => {
                let partner = e.slot + whole as i64;
                if by_slot.get(&partner) == Some(&Polarization::V) {
                    out.pairs.push(PairInjection {
                        chip_time_ns: arrival,
                        delayed_slot: e.slot,
                        direct_slot: partner,
                    });
                    continue;
                }
            }
            Polarization::V if aligned => {
                let partner = e.slot - whole as i64;
                if by_slot.get(&partner) == Some(&Polarization::H) {
                    continue; // consumed by the pair pushed for the partner
                }
            }
            _ => {}
        }
        out.singles.push(SinglePhoton {
            chip_time_ns: arrival,
            polarization: e.polarization,
            slot: e.slot,
        });
    }
    out
}

/// Pairing stage output restricted to the pairs.
pub fn pair_router(
    emissions: &[Emission],
    rep_period_ns: f64,
    delay_ns: f64,
) -> Vec<PairInjection> {
    route_stream(emissions, rep_period_ns, delay_ns).pairs
}

/// A photon leaving the chip: output mode plus the detection-time draw
/// from its temporal density (slot offset included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonAtOutput {
    pub mode: usize,
    pub time_ns: f64,
}

/// One timestamped click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DetectionEvent {
    pub timestamp_ps: i64,
    pub detector: u8,
}

fn quantize_ps(time_ns: f64, resolution_ns: f64) -> i64 {
    let res_ps = (resolution_ns * 1000.0).round().max(1.0);
    ((time_ns * 1000.0 / res_ps).round() * res_ps) as i64
}

/// Click log for a batch of output photons: loss and quantum-efficiency
/// thinning, per-output path delay, timestamp quantization, Poisson dark
/// counts over `duration_ns`, then a per-detector dead-time filter. The
/// log is sorted by timestamp.
pub fn detect(
    photons: &[PhotonAtOutput],
    det: &DetectorConfig,
    map: &ChannelMap,
    duration_ns: f64,
    rng: &mut impl Rng,
) -> Result<Vec<DetectionEvent>> {
    det.validate()?;
    map.validate()?;
    let mut events = Vec::new();
    for photon in photons {
        let channel = map.output(photon.mode)?;
        if rng.random::<f64>() >= channel.survival() * det.quantum_efficiency {
            continue;
        }
        events.push(DetectionEvent {
            timestamp_ps: quantize_ps(photon.time_ns + channel.delay_ns, det.resolution_ns),
            detector: channel.detector,
        });
    }
    if det.dark_rate_hz > 0.0 {
        let rate_per_ns = det.dark_rate_hz / 1e9;
        for detector in map.detector_ids() {
            let mut t = 0.0;
            loop {
                let u: f64 = rng.random();
                t += -(1.0 - u).ln() / rate_per_ns;
                if t >= duration_ns {
                    break;
                }
                events.push(DetectionEvent {
                    timestamp_ps: quantize_ps(t, det.resolution_ns),
                    detector,
                });
            }
        }
    }
    events.sort_unstable();
    if det.dead_time_ns > 0.0 {
        let dead_ps = (det.dead_time_ns * 1000.0).round() as i64;
        let mut last: BTreeMap<u8, i64> = BTreeMap::new();
        events.retain(|e| match last.get(&e.detector) {
            Some(&prev) if e.timestamp_ps - prev < dead_ps => false,
            _ => {
                last.insert(e.detector, e.timestamp_ps);
                true
            }
        });
    }
    Ok(events)
}
