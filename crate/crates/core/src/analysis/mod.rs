//! Event-log statistics: second-order correlations, windowed coincidence
//! counting, truth-table reconstruction with background handling and MLE
//! normalization, similarity, Pauli correlations and entanglement bounds.

pub mod bell;
pub mod coincidence;
pub mod g2;
pub mod tables;

pub use bell::{
    fidelity_bound, fidelity_vs_delay, pauli_expectation, symmetric_fidelity_estimate,
    werner_correlations, werner_fidelity, werner_witness, BoundConvention, FidelityBound,
    PARITY_SIGNS, SWAPPED_CONTROL_SIGNS,
};
pub use coincidence::{
    coincidence_pairs, outcome_counts, sideband_background, CoincidencePair, QubitChannels,
    RailChannels, Window,
};
pub use g2::{g2_histogram, CoincidenceHistogram};
pub use tables::{
    background_correct, bhattacharyya, ideal_cnot_truth_table, mle_normalize, similarity,
    similarity_vs_delay, truth_table, BackgroundMode, CorrectedTable, CountTable,
    ProbabilityTable, TruthTable, OUTCOME_LABELS,
};

use rand::Rng;
use serde::Serialize;

/// One sliding-window estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayPoint {
    pub center_ns: f64,
    pub value: f64,
    pub pairs: u64,
    /// Too few pairs for a trustworthy estimate.
    pub flagged: bool,
}

/// Sliding-window curve; centers whose windows held no usable pairs are
/// reported separately instead of silently dropped.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DelayCurve {
    pub points: Vec<DelayPoint>,
    pub empty_centers: Vec<f64>,
}

impl DelayCurve {
    pub fn values(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.center_ns, p.value)).collect()
    }

    pub fn spread(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.points {
            lo = lo.min(p.value);
            hi = hi.max(p.value);
        }
        if lo > hi {
            0.0
        } else {
            hi - lo
        }
    }
}

/// Standard error of a count-derived statistic under multinomial
/// resampling. Returns (point estimate, bootstrap standard deviation).
pub fn bootstrap_std(
    counts: &[f64],
    resamples: usize,
    rng: &mut impl Rng,
    metric: impl Fn(&[f64]) -> f64,
) -> (f64, f64) {
    let total: f64 = counts.iter().sum();
    let estimate = metric(counts);
    if total <= 0.0 || resamples == 0 {
        return (estimate, 0.0);
    }
    let n = total.round() as usize;
    let mut cum = Vec::with_capacity(counts.len());
    let mut acc = 0.0;
    for &c in counts {
        acc += c.max(0.0);
        cum.push(acc);
    }
    let mut values = Vec::with_capacity(resamples);
    let mut resampled = vec![0.0; counts.len()];
    for _ in 0..resamples {
        resampled.iter_mut().for_each(|c| *c = 0.0);
        for _ in 0..n {
            let u = rng.random::<f64>() * acc;
            let cell = cum.partition_point(|&c| c < u).min(counts.len() - 1);
            resampled[cell] += 1.0;
        }
        values.push(metric(&resampled));
    }
    let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
    let var: f64 =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (estimate, var.sqrt())
}
