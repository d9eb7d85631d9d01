//! Count tables, background handling, maximum-likelihood normalization
//! and table similarity.

use serde::{Deserialize, Serialize};

use crate::analysis::coincidence::{
    coincidence_pairs, outcome_counts, sideband_background, QubitChannels, Window,
};
use crate::analysis::{DelayCurve, DelayPoint};
use crate::source::DetectionEvent;
use crate::{Error, Result};

pub const OUTCOME_LABELS: [&str; 4] = ["00", "01", "10", "11"];

const MLE_TOL: f64 = 1e-10;
const MLE_MAX_ITERS: usize = 100_000;

/// Raw outcome counts with their background estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub labels: Vec<String>,
    pub raw: Vec<f64>,
    pub background: Vec<f64>,
    /// Human-readable acceptance-window description.
    pub window: String,
}

impl CountTable {
    pub fn new(labels: &[&str], raw: Vec<f64>, background: Vec<f64>, window: &str) -> Result<Self> {
        if labels.len() != raw.len() || labels.len() != background.len() {
            return Err(Error::argument("labels, counts and background lengths differ"));
        }
        if raw.iter().chain(background.iter()).any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::domain("counts must be finite and nonnegative"));
        }
        Ok(CountTable {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            raw,
            background,
            window: window.to_string(),
        })
    }

    pub fn without_background(labels: &[&str], raw: Vec<f64>, window: &str) -> Result<Self> {
        let background = vec![0.0; raw.len()];
        Self::new(labels, raw, background, window)
    }

    pub fn total(&self) -> f64 {
        self.raw.iter().sum()
    }
}

/// Background-subtracted counts plus the cells where the estimate
/// exceeded the raw count.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedTable {
    pub table: CountTable,
    pub deficit_cells: Vec<usize>,
}

/// Cell-wise `max(raw - background, 0)`, keeping the background column
/// for the MLE stage. Cells whose background exceeds the raw count are
/// reported, never silently clipped away.
pub fn background_correct(table: &CountTable) -> CorrectedTable {
    let mut corrected = table.clone();
    let mut deficit_cells = Vec::new();
    for (i, c) in corrected.raw.iter_mut().enumerate() {
        let bg = table.background[i];
        if bg > *c {
            deficit_cells.push(i);
        }
        *c = (*c - bg).max(0.0);
    }
    CorrectedTable { table: corrected, deficit_cells }
}

/// Normalized outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub labels: Vec<String>,
    pub p: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(labels: &[&str], p: Vec<f64>) -> Result<Self> {
        if labels.len() != p.len() {
            return Err(Error::argument("labels and probabilities lengths differ"));
        }
        if p.iter().any(|&v| v < 0.0) {
            return Err(Error::domain("probabilities must be nonnegative"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(ProbabilityTable { labels: labels.iter().map(|s| s.to_string()).collect(), p })
    }
}

/// Maximum-likelihood outcome probabilities for raw counts modeled as
/// multinomial draws from `signal * p_i + background_i`.
///
/// Expectation-maximization on the signal share of each cell, iterated
/// until the log-likelihood moves less than 1e-10. With zero background
/// the first iteration already lands on the plain frequencies.
pub fn mle_normalize(table: &CountTable) -> Result<ProbabilityTable> {
    let n: f64 = table.raw.iter().sum();
    if n <= 0.0 {
        return Err(Error::argument("all outcome counts are zero"));
    }
    let b: f64 = table.background.iter().sum();
    let signal = n - b;
    if signal <= 0.0 {
        return Err(Error::domain(format!(
            "background total {b} is not below the count total {n}"
        )));
    }
    let k = table.raw.len();
    let mut p = vec![1.0 / k as f64; k];
    let log_likelihood = |p: &[f64]| -> f64 {
        table
            .raw
            .iter()
            .zip(table.background.iter())
            .zip(p.iter())
            .filter(|((&n_i, _), _)| n_i > 0.0)
            .map(|((&n_i, &b_i), &p_i)| n_i * ((signal * p_i + b_i) / n).ln())
            .sum()
    };
    let mut last = log_likelihood(&p);
    for _ in 0..MLE_MAX_ITERS {
        let mut z = vec![0.0; k];
        for i in 0..k {
            let mean = signal * p[i] + table.background[i];
            if mean > 0.0 {
                z[i] = table.raw[i] * signal * p[i] / mean;
            }
        }
        let z_total: f64 = z.iter().sum();
        if z_total <= 0.0 {
            break;
        }
        for i in 0..k {
            p[i] = z[i] / z_total;
        }
        let ll = log_likelihood(&p);
        if (ll - last).abs() < MLE_TOL {
            break;
        }
        last = ll;
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    let labels: Vec<&str> = table.labels.iter().map(|s| s.as_str()).collect();
    ProbabilityTable::new(&labels, p)
}

/// `S = sum sqrt(p_i q_i) / sqrt(sum p_i sum q_i)` over matching cells.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::BasisMismatch(format!(
            "tables have {} and {} cells",
            p.len(),
            q.len()
        )));
    }
    if p.iter().chain(q.iter()).any(|&v| v < 0.0) {
        return Err(Error::domain("similarity needs nonnegative tables"));
    }
    let sp: f64 = p.iter().sum();
    let sq: f64 = q.iter().sum();
    if sp <= 0.0 || sq <= 0.0 {
        return Err(Error::domain("similarity of an all-zero table"));
    }
    let overlap: f64 = p.iter().zip(q.iter()).map(|(&a, &b)| (a * b).sqrt()).sum();
    Ok(overlap / (sp * sq).sqrt())
}

/// Similarity of two labeled distributions.
pub fn similarity(p: &ProbabilityTable, q: &ProbabilityTable) -> Result<f64> {
    if p.labels != q.labels {
        return Err(Error::BasisMismatch(format!(
            "table bases differ: {:?} vs {:?}",
            p.labels, q.labels
        )));
    }
    bhattacharyya(&p.p, &q.p)
}

/// Reconstructed conditional truth table: one outcome distribution per
/// computational-basis input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    /// Input labels in row order.
    pub inputs: Vec<String>,
    pub rows: Vec<ProbabilityTable>,
    /// Accepted pair count behind each row.
    pub row_pairs: Vec<u64>,
}

impl TruthTable {
    /// Row-major 16-cell view.
    pub fn cells(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.p.iter().copied()).collect()
    }

    pub fn total_pairs(&self) -> u64 {
        self.row_pairs.iter().sum()
    }

    pub fn similarity_to(&self, other: &TruthTable) -> Result<f64> {
        if self.inputs != other.inputs {
            return Err(Error::BasisMismatch("truth tables list different inputs".into()));
        }
        bhattacharyya(&self.cells(), &other.cells())
    }
}

/// The target operation's table: control passes, target flips when the
/// control is 1.
pub fn ideal_cnot_truth_table() -> TruthTable {
    let outcome_for = [0usize, 1, 3, 2];
    let rows = OUTCOME_LABELS
        .iter()
        .zip(outcome_for.iter())
        .map(|(_, &out)| {
            let mut p = vec![0.0; 4];
            p[out] = 1.0;
            ProbabilityTable::new(&OUTCOME_LABELS, p).unwrap()
        })
        .collect();
    TruthTable {
        inputs: OUTCOME_LABELS.iter().map(|s| s.to_string()).collect(),
        rows,
        row_pairs: vec![0; 4],
    }
}

/// How row backgrounds are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackgroundMode {
    None,
    /// Accidentals read from a displaced |dt| band.
    Sidebands { band_ns: (f64, f64) },
}

/// Full truth-table reconstruction: one log per input row, windowed
/// coincidences, background estimate, correction, MLE normalization.
pub fn truth_table(
    logs: &[Vec<DetectionEvent>],
    channels: &QubitChannels,
    window: &Window,
    background: BackgroundMode,
) -> Result<TruthTable> {
    if logs.len() != 4 {
        return Err(Error::argument(format!(
            "expected one log per basis input (4), got {}",
            logs.len()
        )));
    }
    let mut rows = Vec::with_capacity(4);
    let mut row_pairs = Vec::with_capacity(4);
    for (input, log) in OUTCOME_LABELS.iter().zip(logs.iter()) {
        let pairs = coincidence_pairs(log, channels, window)?;
        if pairs.is_empty() {
            return Err(Error::domain(format!("no coincidences for input {input}")));
        }
        let counts = outcome_counts(&pairs);
        let bg = match background {
            BackgroundMode::None => [0.0; 4],
            BackgroundMode::Sidebands { band_ns } => {
                sideband_background(log, channels, window, band_ns)?
            }
        };
        let table = CountTable::new(
            &OUTCOME_LABELS,
            counts.to_vec(),
            bg.to_vec(),
            &format!("{window:?}"),
        )?;
        let corrected = background_correct(&table);
        rows.push(mle_normalize(&corrected.table)?);
        row_pairs.push(pairs.len() as u64);
    }
    Ok(TruthTable {
        inputs: OUTCOME_LABELS.iter().map(|s| s.to_string()).collect(),
        rows,
        row_pairs,
    })
}

/// Truth-table similarity to the ideal operation, re-estimated inside a
/// sliding window per center. Centers with an empty row are reported in
/// `empty_centers`.
pub fn similarity_vs_delay(
    logs: &[Vec<DetectionEvent>],
    channels: &QubitChannels,
    centers_ns: &[f64],
    half_width_ns: f64,
) -> Result<DelayCurve> {
    let ideal = ideal_cnot_truth_table();
    let mut curve = DelayCurve::default();
    for &center in centers_ns {
        let window = Window::Sliding { center_ns: center, half_width_ns };
        match truth_table(logs, channels, &window, BackgroundMode::None) {
            Ok(table) => {
                let pairs = table.total_pairs();
                curve.points.push(DelayPoint {
                    center_ns: center,
                    value: table.similarity_to(&ideal)?,
                    pairs,
                    flagged: pairs < 20,
                });
            }
            Err(Error::Domain(_)) => curve.empty_centers.push(center),
            Err(e) => return Err(e),
        }
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::coincidence::RailChannels;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_background_correction_is_identity() {
        let t = CountTable::without_background(&OUTCOME_LABELS, vec![5.0, 1.0, 2.0, 0.0], "test")
            .unwrap();
        let c = background_correct(&t);
        assert_eq!(c.table, t);
        assert!(c.deficit_cells.is_empty());
    }

    #[test]
    fn uniform_background_keeps_uniform_shape_and_flags_deficits() {
        let t = CountTable::new(
            &OUTCOME_LABELS,
            vec![10.0, 10.0, 10.0, 10.0],
            vec![3.0, 3.0, 3.0, 3.0],
            "test",
        )
        .unwrap();
        let c = background_correct(&t);
        assert_eq!(c.table.raw, vec![7.0, 7.0, 7.0, 7.0]);
        let t = CountTable::new(&OUTCOME_LABELS, vec![1.0, 10.0, 10.0, 10.0], vec![3.0; 4], "t")
            .unwrap();
        let c = background_correct(&t);
        assert_eq!(c.deficit_cells, vec![0]);
        assert_eq!(c.table.raw[0], 0.0);
    }

    #[test]
    fn mle_without_background_is_exact_frequency_normalization() {
        let t = CountTable::without_background(&OUTCOME_LABELS, vec![10.0, 10.0, 10.0, 10.0], "t")
            .unwrap();
        let p = mle_normalize(&t).unwrap();
        assert_eq!(p.p, vec![0.25; 4]);
        let t = CountTable::without_background(&OUTCOME_LABELS, vec![7.0, 3.0, 15.0, 25.0], "t")
            .unwrap();
        let p = mle_normalize(&t).unwrap();
        assert_eq!(p.p, vec![0.14, 0.06, 0.30, 0.50]);
    }

    #[test]
    fn mle_strips_a_known_uniform_background() {
        let t = CountTable::new(
            &OUTCOME_LABELS,
            vec![100.0, 2.0, 2.0, 2.0],
            vec![2.0; 4],
            "t",
        )
        .unwrap();
        let p = mle_normalize(&t).unwrap();
        assert!((p.p[0] - 1.0).abs() < 1e-3, "p = {:?}", p.p);
        for &v in &p.p[1..] {
            assert!(v < 1e-3);
        }
        // no simplex point beats the EM optimum by more than the
        // stopping-rule gap; the optimum here sits on a corner, where
        // EM closes in sublinearly
        let n: f64 = t.raw.iter().sum();
        let signal = n - 8.0;
        let ll = |p: &[f64]| -> f64 {
            t.raw
                .iter()
                .zip(p.iter())
                .map(|(&n_i, &p_i)| {
                    if n_i > 0.0 {
                        n_i * ((signal * p_i + 2.0) / n).ln()
                    } else {
                        0.0
                    }
                })
                .sum()
        };
        let em_ll = ll(&p.p);
        let steps = 50;
        for a in 0..=steps {
            for b in 0..=steps - a {
                for c in 0..=steps - a - b {
                    let d = steps - a - b - c;
                    let q = [
                        a as f64 / steps as f64,
                        b as f64 / steps as f64,
                        c as f64 / steps as f64,
                        d as f64 / steps as f64,
                    ];
                    assert!(ll(&q) <= em_ll + 1e-5, "grid point {q:?} beats EM");
                }
            }
        }
    }

    #[test]
    fn mle_rejects_degenerate_tables() {
        let t = CountTable::without_background(&OUTCOME_LABELS, vec![0.0; 4], "t").unwrap();
        assert!(mle_normalize(&t).is_err());
        let t = CountTable::new(&OUTCOME_LABELS, vec![1.0; 4], vec![2.0; 4], "t").unwrap();
        assert!(mle_normalize(&t).is_err());
    }

    #[test]
    fn similarity_examples() {
        let p = ProbabilityTable::new(&OUTCOME_LABELS, vec![0.4, 0.1, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(similarity(&p, &p).unwrap(), 1.0, epsilon = 1e-12);
        let q = ProbabilityTable::new(&OUTCOME_LABELS, vec![0.0, 0.0, 0.5, 0.5]).unwrap();
        let r = ProbabilityTable::new(&OUTCOME_LABELS, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(similarity(&q, &r).unwrap(), 0.0);
        let other = ProbabilityTable::new(&["a", "b", "c", "d"], vec![0.25; 4]).unwrap();
        assert!(matches!(similarity(&p, &other), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn similarity_is_bounded_and_maximal_on_equal_tables() {
        let mut rng = crate::rng::stream(17, "similarity-fuzz", 0);
        use rand::Rng;
        for _ in 0..200 {
            let p: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let q: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let s = bhattacharyya(&p, &q).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&s));
            assert_abs_diff_eq!(bhattacharyya(&p, &p).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ideal_truth_table_rows_are_deterministic() {
        let t = ideal_cnot_truth_table();
        assert_eq!(t.rows[0].p, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.rows[1].p, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(t.rows[2].p, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.rows[3].p, vec![0.0, 0.0, 1.0, 0.0]);
        assert_abs_diff_eq!(t.similarity_to(&t).unwrap(), 1.0, epsilon = 1e-12);
    }

    fn channels() -> QubitChannels {
        QubitChannels {
            control: RailChannels { zero: 0, one: 1 },
            target: RailChannels { zero: 2, one: 3 },
        }
    }

    fn synthetic_logs(outcome_for: [usize; 4], pairs_per_row: usize) -> Vec<Vec<DetectionEvent>> {
        (0..4)
            .map(|row| {
                let out = outcome_for[row];
                let (c_rail, t_rail) = ((out / 2) as u8, (out % 2) as u8);
                let mut events = Vec::new();
                for k in 0..pairs_per_row {
                    let base = (k as i64 + 1) * 10_000_000;
                    events.push(DetectionEvent { timestamp_ps: base, detector: c_rail });
                    events.push(DetectionEvent {
                        timestamp_ps: base + 50_000,
                        detector: 2 + t_rail,
                    });
                }
                events.sort_unstable();
                events
            })
            .collect()
    }

    #[test]
    fn noise_free_truth_table_matches_the_ideal() {
        let logs = synthetic_logs([0, 1, 3, 2], 200);
        let table = truth_table(
            &logs,
            &channels(),
            &Window::Global { half_width_ns: 200.0 },
            BackgroundMode::None,
        )
        .unwrap();
        let ideal = ideal_cnot_truth_table();
        assert_abs_diff_eq!(table.similarity_to(&ideal).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(table.row_pairs, vec![200; 4]);
        for row in &table.rows {
            assert_abs_diff_eq!(row.p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn swapped_rows_lower_the_similarity() {
        let logs = synthetic_logs([0, 1, 2, 3], 200);
        let table = truth_table(
            &logs,
            &channels(),
            &Window::Global { half_width_ns: 200.0 },
            BackgroundMode::None,
        )
        .unwrap();
        let s = table.similarity_to(&ideal_cnot_truth_table()).unwrap();
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sliding_similarity_reports_empty_windows() {
        let logs = synthetic_logs([0, 1, 3, 2], 100);
        let curve =
            similarity_vs_delay(&logs, &channels(), &[50.0, 250.0], 30.0).unwrap();
        // pairs sit at dt = -50 ns exactly
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].center_ns, 50.0);
        assert_abs_diff_eq!(curve.points[0].value, 1.0, epsilon = 1e-12);
        assert!(!curve.points[0].flagged);
        assert_eq!(curve.empty_centers, vec![250.0]);
    }
}
