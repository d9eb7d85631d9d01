//! Two-qubit Pauli correlations from coincidence outcomes and the
//! fidelity bounds built from them.

use serde::{Deserialize, Serialize};

use crate::analysis::coincidence::{coincidence_pairs, outcome_counts, QubitChannels, Window};
use crate::analysis::{DelayCurve, DelayPoint};
use crate::source::DetectionEvent;
use crate::{Error, Result};

/// Eigenvalue of a joint Z (or X) measurement per outcome cell in
/// 00, 01, 10, 11 order.
pub const PARITY_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Outcome-to-eigenvalue map for the loop configuration whose return
/// pass swaps the control rails: detected control 0 is logical 1.
pub const SWAPPED_CONTROL_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];

/// Sign-weighted average of outcome frequencies.
pub fn pauli_expectation(counts: &[f64; 4], signs: [f64; 4]) -> Result<f64> {
    if counts.iter().any(|&c| c < 0.0 || !c.is_finite()) {
        return Err(Error::domain("outcome counts must be finite and nonnegative"));
    }
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::domain("no counts to average"));
    }
    Ok(counts.iter().zip(signs.iter()).map(|(&c, &s)| c * s).sum::<f64>() / total)
}

/// Prefactor applied when combining the two correlation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundConvention {
    /// bound = (xx - zz) / sqrt(2), saturating at sqrt(2).
    ScaledRootTwo,
    /// bound = (xx - zz) / 2, the two-setting fidelity lower bound.
    Witness,
}

impl BoundConvention {
    /// Value a separable state cannot exceed.
    pub fn separable_limit(self) -> f64 {
        match self {
            BoundConvention::ScaledRootTwo => std::f64::consts::FRAC_1_SQRT_2,
            BoundConvention::Witness => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityBound {
    pub zz: f64,
    pub xx: f64,
    pub bound: f64,
    pub convention: BoundConvention,
}

impl FidelityBound {
    pub fn certifies_entanglement(&self) -> bool {
        self.bound > self.convention.separable_limit()
    }
}

/// Combines the two measured correlations into the entanglement bound.
/// The pair state anticorrelates in Z and correlates in X, so the bound
/// grows with `xx - zz`.
pub fn fidelity_bound(zz: f64, xx: f64, convention: BoundConvention) -> Result<FidelityBound> {
    for (name, v) in [("zz", zz), ("xx", xx)] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("correlation {name} = {v} outside [-1, 1]")));
        }
    }
    let bound = match convention {
        BoundConvention::ScaledRootTwo => (xx - zz) * std::f64::consts::FRAC_1_SQRT_2,
        BoundConvention::Witness => 0.5 * (xx - zz),
    };
    Ok(FidelityBound { zz, xx, bound, convention })
}

/// Correlations of the pair state mixed with a share `lambda` of the
/// maximally mixed state.
pub fn werner_correlations(lambda: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("mixing weight {lambda} outside [0, 1]")));
    }
    Ok((-(1.0 - lambda), 1.0 - lambda))
}

/// Two-setting witness value of the mixed pair state: 1 - lambda.
pub fn werner_witness(lambda: f64) -> f64 {
    1.0 - lambda
}

/// True overlap of the mixed pair state with the pure pair state:
/// 1 - 3 lambda / 4. Drops to 1/2, the separability edge, at
/// lambda = 2/3.
pub fn werner_fidelity(lambda: f64) -> f64 {
    1.0 - 0.75 * lambda
}

/// Fidelity estimate assuming the unmeasured second transverse setting
/// matches the measured one: (1 + 2 xx - zz) / 4.
pub fn symmetric_fidelity_estimate(zz: f64, xx: f64) -> f64 {
    0.25 * (1.0 + 2.0 * xx - zz)
}

/// Entanglement bound re-estimated inside a sliding |dt| window per
/// center. `pairs` carries the smaller of the two settings' sample
/// sizes; windows where either setting has fewer than 20 pairs are
/// flagged. Centers empty in either setting land in `empty_centers`.
pub fn fidelity_vs_delay(
    zz_events: &[DetectionEvent],
    xx_events: &[DetectionEvent],
    channels: &QubitChannels,
    centers_ns: &[f64],
    half_width_ns: f64,
    convention: BoundConvention,
) -> Result<DelayCurve> {
    let mut curve = DelayCurve::default();
    for &center in centers_ns {
        let window = Window::Sliding { center_ns: center, half_width_ns };
        let zz_pairs = coincidence_pairs(zz_events, channels, &window)?;
        let xx_pairs = coincidence_pairs(xx_events, channels, &window)?;
        if zz_pairs.is_empty() || xx_pairs.is_empty() {
            curve.empty_centers.push(center);
            continue;
        }
        let zz = pauli_expectation(&outcome_counts(&zz_pairs), SWAPPED_CONTROL_SIGNS)?;
        let xx = pauli_expectation(&outcome_counts(&xx_pairs), PARITY_SIGNS)?;
        let bound = fidelity_bound(zz, xx, convention)?;
        let pairs = zz_pairs.len().min(xx_pairs.len()) as u64;
        curve.points.push(DelayPoint {
            center_ns: center,
            value: bound.bound,
            pairs,
            flagged: pairs < 20,
        });
    }
    Ok(curve)
}
