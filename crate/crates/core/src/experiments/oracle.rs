//! Independent brute-force check of the structured two-photon
//! transport: integrated outcome probabilities against matrix
//! permanents, over randomized coupler meshes.

use rand::Rng;

use crate::optics::{CouplerElement, Matrix, ModeNetwork, PhaseShifter};
use crate::rng::stream;
use crate::temporal::{default_envelope, permanent_oracle, two_photon_density};
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct CrossCheck {
    pub trials: usize,
    /// Two-photon outcomes compared across all trials.
    pub outcomes: u64,
    pub max_abs_delta: f64,
}

/// Random mesh of `couplers` two-mode couplers with interleaved phase
/// shifters; unitary by construction.
pub fn random_mesh(modes: usize, couplers: usize, rng: &mut impl Rng) -> Matrix {
    let mut net = ModeNetwork::with_unlabelled(modes);
    for _ in 0..couplers {
        let a = rng.random_range(0..modes);
        let mut b = rng.random_range(0..modes - 1);
        if b >= a {
            b += 1;
        }
        let eta = rng.random::<f64>();
        let phase = rng.random_range(-3.0..3.0);
        net.push_coupler(CouplerElement::new(a, b, eta, phase).unwrap()).unwrap();
        let m = rng.random_range(0..modes);
        net.push_shifter(PhaseShifter { mode: m, phase: rng.random_range(-3.0..3.0) }).unwrap();
    }
    net.compile()
}

/// Runs `trials` random meshes on 4 to 6 modes with a photon pair on
/// random distinct inputs and compares every integrated two-photon
/// outcome against the permanent.
pub fn permanent_cross_check(seed: u64, trials: usize) -> Result<CrossCheck> {
    let packet = default_envelope(40.0, 0.0, 0.5)?;
    let mut rng = stream(seed, "permanent-cross-check", 0);
    let mut max_abs_delta: f64 = 0.0;
    let mut outcomes = 0u64;
    for _ in 0..trials {
        let modes = rng.random_range(4..=6);
        let u = random_mesh(modes, 12, &mut rng);
        let k = rng.random_range(0..modes);
        let mut l = rng.random_range(0..modes - 1);
        if l >= k {
            l += 1;
        }
        let density = two_photon_density(&u, (k, l), (&packet, &packet))?;
        let mut n_in = vec![0usize; modes];
        n_in[k] += 1;
        n_in[l] += 1;
        for (i, j) in density.pair_keys() {
            let mut m_out = vec![0usize; modes];
            m_out[i] += 1;
            m_out[j] += 1;
            let fast = density.pair(i, j)?.total_probability();
            let slow = permanent_oracle(&u, &n_in, &m_out)?;
            max_abs_delta = max_abs_delta.max((fast - slow).abs());
            outcomes += 1;
        }
    }
    Ok(CrossCheck { trials, outcomes, max_abs_delta })
}
