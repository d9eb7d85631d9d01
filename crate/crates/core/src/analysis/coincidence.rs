//! Windowed control-target coincidence extraction.

use crate::source::DetectionEvent;
use crate::{Error, Result};

/// Detector ids reading out one dual-rail qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RailChannels {
    pub zero: u8,
    pub one: u8,
}

impl RailChannels {
    fn rail_of(&self, detector: u8) -> Option<u8> {
        if detector == self.zero {
            Some(0)
        } else if detector == self.one {
            Some(1)
        } else {
            None
        }
    }
}

/// Detector assignment for a control-target pair measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitChannels {
    pub control: RailChannels,
    pub target: RailChannels,
}

impl QubitChannels {
    pub fn validate(&self) -> Result<()> {
        let ids =
            [self.control.zero, self.control.one, self.target.zero, self.target.one];
        for (i, a) in ids.iter().enumerate() {
            if ids[i + 1..].contains(a) {
                return Err(Error::Topology(format!(
                    "detector {a} appears in both channel sets"
                )));
            }
        }
        Ok(())
    }
}

/// Accepted detection-time differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// |dt| up to the half width.
    Global { half_width_ns: f64 },
    /// |dt| within half_width of the center separation.
    Sliding { center_ns: f64, half_width_ns: f64 },
}

impl Window {
    pub fn accepts(&self, delta_ns: f64) -> bool {
        match *self {
            Window::Global { half_width_ns } => delta_ns.abs() <= half_width_ns,
            Window::Sliding { center_ns, half_width_ns } => {
                (delta_ns.abs() - center_ns).abs() <= half_width_ns
            }
        }
    }

    /// Largest |dt| the window can accept.
    fn reach_ns(&self) -> f64 {
        match *self {
            Window::Global { half_width_ns } => half_width_ns,
            Window::Sliding { center_ns, half_width_ns } => center_ns + half_width_ns,
        }
    }

    /// Total measure of accepted signed time differences, ns.
    pub fn measure_ns(&self) -> f64 {
        match *self {
            Window::Global { half_width_ns } => 2.0 * half_width_ns,
            Window::Sliding { center_ns, half_width_ns } => {
                let lo = (center_ns - half_width_ns).max(0.0);
                let hi = center_ns + half_width_ns;
                if lo == 0.0 {
                    // bands on both signs merge across zero
                    2.0 * hi
                } else {
                    2.0 * (hi - lo)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Window::Global { half_width_ns } => half_width_ns > 0.0,
            Window::Sliding { center_ns, half_width_ns } => {
                half_width_ns > 0.0 && center_ns >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("window widths must be positive and centers nonnegative"))
        }
    }
}

/// One accepted control-target coincidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidencePair {
    pub control_rail: u8,
    pub target_rail: u8,
    /// t_control - t_target, ns.
    pub delta_ns: f64,
    /// Midpoint of the two clicks, ns.
    pub time_ns: f64,
}

impl CoincidencePair {
    /// Cell index in (control, target) outcome order 00, 01, 10, 11.
    pub fn outcome(&self) -> usize {
        (self.control_rail * 2 + self.target_rail) as usize
    }
}

/// Every click pair with one member in the control set and one in the
/// target set whose time difference the window accepts. The log must be
/// sorted by timestamp.
pub fn coincidence_pairs(
    events: &[DetectionEvent],
    channels: &QubitChannels,
    window: &Window,
) -> Result<Vec<CoincidencePair>> {
    channels.validate()?;
    window.validate()?;
    let reach_ps = (window.reach_ns() * 1000.0).ceil() as i64;
    let mut out = Vec::new();
    for (i, a) in events.iter().enumerate() {
        for b in events[i + 1..].iter() {
            if b.timestamp_ps - a.timestamp_ps > reach_ps {
                break;
            }
            let (control, target) = match (
                channels.control.rail_of(a.detector),
                channels.target.rail_of(b.detector),
            ) {
                (Some(c), Some(t)) => ((c, a.timestamp_ps), (t, b.timestamp_ps)),
                _ => match (
                    channels.target.rail_of(a.detector),
                    channels.control.rail_of(b.detector),
                ) {
                    (Some(t), Some(c)) => ((c, b.timestamp_ps), (t, a.timestamp_ps)),
                    _ => continue,
                },
            };
            let delta_ns = (control.1 - target.1) as f64 / 1000.0;
            if window.accepts(delta_ns) {
                out.push(CoincidencePair {
                    control_rail: control.0,
                    target_rail: target.0,
                    delta_ns,
                    time_ns: (control.1 + target.1) as f64 / 2000.0,
                });
            }
        }
    }
    Ok(out)
}

/// Pair counts per outcome cell in 00, 01, 10, 11 order.
pub fn outcome_counts(pairs: &[CoincidencePair]) -> [f64; 4] {
    let mut counts = [0.0; 4];
    for p in pairs {
        counts[p.outcome()] += 1.0;
    }
    counts
}

/// Accidental-coincidence estimate per outcome cell from a displaced
/// |dt| band, rescaled to the signal window's measure.
pub fn sideband_background(
    events: &[DetectionEvent],
    channels: &QubitChannels,
    signal: &Window,
    band_ns: (f64, f64),
) -> Result<[f64; 4]> {
    let (lo, hi) = band_ns;
    if !(0.0 <= lo && lo < hi) {
        return Err(Error::domain(format!("sideband ({lo}, {hi}) must satisfy 0 <= lo < hi")));
    }
    let band = Window::Sliding { center_ns: 0.5 * (lo + hi), half_width_ns: 0.5 * (hi - lo) };
    let pairs = coincidence_pairs(events, channels, &band)?;
    let scale = signal.measure_ns() / band.measure_ns();
    let mut counts = outcome_counts(&pairs);
    for c in &mut counts {
        *c *= scale;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channels() -> QubitChannels {
        QubitChannels {
            control: RailChannels { zero: 0, one: 1 },
            target: RailChannels { zero: 2, one: 3 },
        }
    }

    fn ev(detector: u8, time_ns: f64) -> DetectionEvent {
        DetectionEvent { timestamp_ps: (time_ns * 1000.0).round() as i64, detector }
    }

    #[test]
    fn close_pair_accepted_by_global_window() {
        let events = [ev(0, 1000.0), ev(3, 1150.0)];
        let pairs =
            coincidence_pairs(&events, &channels(), &Window::Global { half_width_ns: 200.0 })
                .unwrap();
        assert_eq!(pairs.len(), 1);
        let p = pairs[0];
        assert_eq!((p.control_rail, p.target_rail), (0, 1));
        assert_eq!(p.outcome(), 1);
        assert!((p.delta_ns + 150.0).abs() < 1e-9);
    }

    #[test]
    fn distant_sliding_window_rejects_close_pair() {
        let events = [ev(0, 1000.0), ev(3, 1150.0)];
        let pairs = coincidence_pairs(
            &events,
            &channels(),
            &Window::Sliding { center_ns: 400.0, half_width_ns: 30.0 },
        )
        .unwrap();
        assert!(pairs.is_empty());
        // matching center accepts it
        let pairs = coincidence_pairs(
            &events,
            &channels(),
            &Window::Sliding { center_ns: 150.0, half_width_ns: 30.0 },
        )
        .unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn synthetic_pair_count_is_recovered_exactly() {
        let mut events = Vec::new();
        let n = 500;
        for k in 0..n {
            let base = k as f64 * 10_000.0;
            events.push(ev((k % 2) as u8, base));
            events.push(ev(2 + (k % 2) as u8, base + 120.0));
        }
        events.sort_unstable();
        let pairs =
            coincidence_pairs(&events, &channels(), &Window::Global { half_width_ns: 200.0 })
                .unwrap();
        assert_eq!(pairs.len(), n);
        let counts = outcome_counts(&pairs);
        assert_eq!(counts, [250.0, 0.0, 0.0, 250.0]);
    }

    #[test]
    fn control_and_target_order_does_not_matter() {
        let events = [ev(2, 1000.0), ev(1, 1100.0)];
        let pairs =
            coincidence_pairs(&events, &channels(), &Window::Global { half_width_ns: 200.0 })
                .unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].control_rail, pairs[0].target_rail), (1, 0));
        assert!((pairs[0].delta_ns - 100.0).abs() < 1e-9);
    }

    #[test]
    fn clicks_outside_both_sets_are_ignored() {
        let events = [ev(0, 1000.0), ev(7, 1010.0), ev(3, 1050.0)];
        let pairs =
            coincidence_pairs(&events, &channels(), &Window::Global { half_width_ns: 200.0 })
                .unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn overlapping_channel_sets_are_rejected() {
        let bad = QubitChannels {
            control: RailChannels { zero: 0, one: 1 },
            target: RailChannels { zero: 1, one: 3 },
        };
        let events = [ev(0, 0.0)];
        assert!(matches!(
            coincidence_pairs(&events, &bad, &Window::Global { half_width_ns: 200.0 }),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn sideband_estimate_scales_to_the_signal_window() {
        // uniform accidental pairs: one per 25 ns of |dt| on each side
        let mut events = Vec::new();
        for k in 0..2000 {
            let base = k as f64 * 20_000.0;
            events.push(ev(0, base));
            events.push(ev(2, base + 400.0 + (k % 8) as f64 * 25.0));
        }
        events.sort_unstable();
        let signal = Window::Global { half_width_ns: 200.0 };
        let bg = sideband_background(&events, &channels(), &signal, (400.0, 600.0)).unwrap();
        // band measure 400 ns holds 2000 pairs; the signal window has the
        // same measure
        assert!((bg[0] - 2000.0).abs() < 1e-9, "bg {bg:?}");
        assert_eq!(&bg[1..], &[0.0, 0.0, 0.0]);
        assert!(sideband_background(&events, &channels(), &signal, (600.0, 400.0)).is_err());
    }

    #[test]
    fn window_measures() {
        assert_eq!(Window::Global { half_width_ns: 200.0 }.measure_ns(), 400.0);
        assert_eq!(
            Window::Sliding { center_ns: 400.0, half_width_ns: 30.0 }.measure_ns(),
            120.0
        );
        // center inside the half width: the two abs-bands merge around zero
        assert_eq!(
            Window::Sliding { center_ns: 10.0, half_width_ns: 30.0 }.measure_ns(),
            80.0
        );
        assert!(Window::Global { half_width_ns: 0.0 }.validate().is_err());
    }
}
