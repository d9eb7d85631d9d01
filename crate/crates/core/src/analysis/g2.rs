//! Second-order correlation of a click log.

use std::collections::BTreeMap;

use crate::source::DetectionEvent;
use crate::{Error, Result};

/// Lags used for the plateau fit, in bins away from zero.
const PLATEAU_FIT_BINS: i64 = 10;

/// Cross-correlation histogram between distinct detectors, binned by
/// time difference. `normalization` is the expected count per bin for
/// uncorrelated events, estimated from the bins next to zero lag, so the
/// normalized trace peaks at 1 for an intermittent source.
#[derive(Debug, Clone)]
pub struct CoincidenceHistogram {
    pub bin_width_ns: f64,
    /// Signed lag in bins to pair count.
    pub bins: BTreeMap<i64, u64>,
    pub normalization: f64,
}

impl CoincidenceHistogram {
    pub fn g2(&self, lag_bins: i64) -> f64 {
        self.bins.get(&lag_bins).copied().unwrap_or(0) as f64 / self.normalization
    }

    /// The zero-lag slot bin.
    pub fn g2_zero(&self) -> f64 {
        self.g2(0)
    }

    /// Normalized trace over all populated lags, in ns.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.bins
            .iter()
            .map(|(&lag, &count)| (lag as f64 * self.bin_width_ns, count as f64 / self.normalization))
            .collect()
    }
}

/// Histogram of click-time differences between distinct detectors in
/// `detectors`, normalized so uncorrelated coincidences sit at 1.
///
/// Intermittent emission makes the raw trace fall off with lag; the
/// uncorrelated level is the zero-lag intercept of a straight-line fit
/// over the first bins on both sides, excluding lag zero itself.
pub fn g2_histogram(
    events: &[DetectionEvent],
    detectors: &[u8],
    bin_width_ns: f64,
    max_lag_ns: f64,
) -> Result<CoincidenceHistogram> {
    if events.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut ids = detectors.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::argument("correlation needs at least two distinct detectors"));
    }
    if !(bin_width_ns > 0.0) || !(max_lag_ns >= bin_width_ns) {
        return Err(Error::domain("bin width must be positive and max lag at least one bin"));
    }
    let clicks: Vec<&DetectionEvent> =
        events.iter().filter(|e| ids.binary_search(&e.detector).is_ok()).collect();
    let bin_ps = (bin_width_ns * 1000.0).round();
    let max_lag_ps = (max_lag_ns * 1000.0).round() as i64;
    let max_bin = (max_lag_ps as f64 / bin_ps).round() as i64;
    // cover the outermost bin fully, not just up to its center
    let reach_ps = ((max_bin as f64 + 0.5) * bin_ps).ceil() as i64;
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for (i, a) in clicks.iter().enumerate() {
        for b in clicks[i + 1..].iter() {
            let dt = b.timestamp_ps - a.timestamp_ps;
            if dt > reach_ps {
                break;
            }
            if a.detector == b.detector {
                continue;
            }
            let lag = (dt as f64 / bin_ps).round() as i64;
            if lag > max_bin {
                continue;
            }
            *bins.entry(lag).or_insert(0) += 1;
            *bins.entry(-lag).or_insert(0) += 1;
        }
    }
    let fit_range = PLATEAU_FIT_BINS.min(max_bin);
    // pooled counts per |lag|, zeros included
    let samples: Vec<(f64, f64)> = (1..=fit_range)
        .map(|lag| {
            let c = bins.get(&lag).copied().unwrap_or(0) + bins.get(&-lag).copied().unwrap_or(0);
            (lag as f64, c as f64 / 2.0)
        })
        .collect();
    let normalization = if samples.len() >= 2 {
        intercept(&samples)
    } else if samples.len() == 1 {
        samples[0].1
    } else {
        return Err(Error::domain("max lag leaves no off-zero bins for normalization"));
    };
    if normalization <= 0.0 {
        return Err(Error::domain("no off-zero coincidences to normalize against"));
    }
    Ok(CoincidenceHistogram { bin_width_ns, bins, normalization })
}

/// Zero intercept of the least-squares line through (x, y) samples.
fn intercept(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let sx: f64 = samples.iter().map(|s| s.0).sum();
    let sy: f64 = samples.iter().map(|s| s.1).sum();
    let sxx: f64 = samples.iter().map(|s| s.0 * s.0).sum();
    let sxy: f64 = samples.iter().map(|s| s.0 * s.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return sy / n;
    }
    let slope = (n * sxy - sx * sy) / denom;
    (sy - slope * sx) / n
}
