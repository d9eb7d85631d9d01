//! Chip layouts used by the packaged experiments: the intensity
//! correlator splitter tree, the two-mode interference coupler, and the
//! pair-source gate chip with its loop readout variants.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::optics::{cnot_network, CouplerElement, Matrix, ModeNetwork, GATE_MODE_LABELS};
use crate::Result;

/// Which joint correlation a loop readout measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationSetting {
    /// Both qubits read in the computational basis; the return pass
    /// through the control coupler swaps the control rails.
    Zz,
    /// Both qubits rotated into the superposition basis before readout.
    Xx,
}

/// Three-way splitter tree feeding the intensity correlator: input on
/// mode 0, one third of the power on each output.
pub fn hbt_network() -> ModeNetwork {
    let mut net = ModeNetwork::new(&["a", "b", "c"]);
    net.push_coupler(CouplerElement::new(0, 1, 1.0 / 3.0, 0.0).unwrap()).unwrap();
    net.push_coupler(CouplerElement::balanced(0, 2)).unwrap();
    net
}

/// Single balanced coupler for two-photon interference.
pub fn hom_network() -> ModeNetwork {
    let mut net = ModeNetwork::new(&["a", "b"]);
    net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
    net
}

/// Balanced coupler on the control rails that turns the gate's pair
/// input into the maximally entangled pair.
fn prep_coupler() -> CouplerElement {
    CouplerElement { mode_a: 1, mode_b: 2, eta: 0.5, extra_phase: FRAC_PI_2 }
}

/// Gate chip with the pair-preparation coupler in front: photons sent
/// in on (C0, T1) leave, post-selected, as the symmetric rail pair.
pub fn bell_forward_network() -> ModeNetwork {
    let mut net = ModeNetwork::new(&GATE_MODE_LABELS);
    net.push_coupler(prep_coupler()).unwrap();
    for stage in cnot_network().stages() {
        match *stage {
            crate::optics::Stage::Coupler(c) => net.push_coupler(c).unwrap(),
            crate::optics::Stage::Shifter(p) => net.push_shifter(p).unwrap(),
        }
    }
    net
}

/// Full readout network for one correlation setting.
///
/// The control qubit always crosses the loop coupler once on the way
/// out. In the Zz setting it re-enters and crosses it again, which
/// amounts to a rail swap; in the Xx setting the target instead crosses
/// its own balanced coupler once, so both qubits are read in the
/// superposition basis.
pub fn bell_network(setting: CorrelationSetting) -> ModeNetwork {
    let mut net = bell_forward_network();
    net.push_coupler(CouplerElement::balanced(1, 2)).unwrap();
    match setting {
        CorrelationSetting::Zz => net.push_coupler(CouplerElement::balanced(1, 2)).unwrap(),
        CorrelationSetting::Xx => net.push_coupler(CouplerElement::balanced(3, 4)).unwrap(),
    }
    net
}

/// Post-selected two-photon amplitudes over (control rail, target rail)
/// outcomes, 00/01/10/11 order, for indistinguishable photons entering
/// the preparation network on (C0, T1). Exchange paths included.
pub fn bell_state_preparation() -> Result<[C64; 4]> {
    let u = bell_forward_network().compile();
    Ok(pair_amplitudes(&u, (1, 4)))
}

/// Two-photon transfer amplitudes onto the four rail outcomes.
pub fn pair_amplitudes(u: &Matrix, inputs: (usize, usize)) -> [C64; 4] {
    let (k, l) = inputs;
    let combos = [(1usize, 3usize), (1, 4), (2, 3), (2, 4)];
    let mut amps = [C64::new(0.0, 0.0); 4];
    for (slot, &(c, t)) in combos.iter().enumerate() {
        amps[slot] = u[(c, k)] * u[(t, l)] + u[(t, k)] * u[(c, l)];
    }
    amps
}
