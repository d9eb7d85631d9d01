//! Coupler networks on labelled modes and their compiled unitaries.
//!
//! A network is an ordered list of stages. Each stage is either a two-mode
//! directional coupler or a single-mode phase shifter. Compiling multiplies
//! the stage unitaries in listing order, embedded in the full mode space.
//!
//! Dual-rail qubits live on named rail pairs; [`post_selected_operator`]
//! extracts the two-qubit operator conditioned on one photon leaving in each
//! qubit's rail pair.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Matrix = Array2<C64>;

/// Power fraction cross-coupled between the rails of the three gate
/// couplers; the rail-continuing (bar) amplitude is 1/sqrt(3).
pub const GATE_COUPLER_ETA: f64 = 2.0 / 3.0;

/// Standard mode order for the six-mode gate: vacuum ancilla, control pair,
/// target pair, vacuum ancilla.
pub const GATE_MODE_LABELS: [&str; 6] = ["vA", "C0", "C1", "T0", "T1", "vB"];

/// Two-mode directional coupler.
///
/// `eta` is the cross-coupled power fraction. With `extra_phase` zero the
/// unitary on (mode_a, mode_b) is
/// `[[sqrt(1-eta), i*sqrt(eta)], [i*sqrt(eta), sqrt(1-eta)]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerElement {
    pub mode_a: usize,
    pub mode_b: usize,
    pub eta: f64,
    pub extra_phase: f64,
}

impl CouplerElement {
    pub fn new(mode_a: usize, mode_b: usize, eta: f64, extra_phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::domain(format!("coupler eta {eta} outside [0, 1]")));
        }
        if mode_a == mode_b {
            return Err(Error::domain("coupler modes must be distinct".to_string()));
        }
        Ok(CouplerElement { mode_a, mode_b, eta, extra_phase })
    }

    pub fn balanced(mode_a: usize, mode_b: usize) -> Self {
        CouplerElement { mode_a, mode_b, eta: 0.5, extra_phase: 0.0 }
    }

    /// 2x2 unitary in (mode_a, mode_b) order.
    pub fn unitary(&self) -> Matrix {
        coupler_unitary(self.eta, self.extra_phase).expect("eta validated at construction")
    }
}

/// The coupler matrix for cross power `eta` and cross phase `phi`.
pub fn coupler_unitary(eta: f64, phi: f64) -> Result<Matrix> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::domain(format!("coupler eta {eta} outside [0, 1]")));
    }
    let bar = C64::new((1.0 - eta).sqrt(), 0.0);
    let cross = C64::new(0.0, 1.0) * eta.sqrt();
    let ph = C64::from_polar(1.0, phi);
    Ok(ndarray::array![[bar, cross * ph], [cross * ph.conj(), bar]])
}

/// Single-mode phase shifter: multiplies the mode amplitude by `e^{i phase}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShifter {
    pub mode: usize,
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stage {
    Coupler(CouplerElement),
    Shifter(PhaseShifter),
}

impl Stage {
    pub fn modes(&self) -> (usize, Option<usize>) {
        match self {
            Stage::Coupler(c) => (c.mode_a, Some(c.mode_b)),
            Stage::Shifter(p) => (p.mode, None),
        }
    }
}

/// Ordered stage list over `mode_count` labelled modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeNetwork {
    mode_count: usize,
    labels: Vec<String>,
    stages: Vec<Stage>,
}

impl ModeNetwork {
    pub fn new(labels: &[&str]) -> Self {
        ModeNetwork {
            mode_count: labels.len(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            stages: Vec::new(),
        }
    }

    pub fn with_unlabelled(mode_count: usize) -> Self {
        let labels = (0..mode_count).map(|i| format!("m{i}")).collect();
        ModeNetwork { mode_count, labels, stages: Vec::new() }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Topology(format!("no mode labelled {label:?}")))
    }

    fn check_mode(&self, m: usize) -> Result<()> {
        if m >= self.mode_count {
            return Err(Error::Topology(format!(
                "mode {m} out of range for {}-mode network",
                self.mode_count
            )));
        }
        Ok(())
    }

    pub fn push_coupler(&mut self, c: CouplerElement) -> Result<()> {
        self.check_mode(c.mode_a)?;
        self.check_mode(c.mode_b)?;
        self.stages.push(Stage::Coupler(c));
        Ok(())
    }

    pub fn push_shifter(&mut self, p: PhaseShifter) -> Result<()> {
        self.check_mode(p.mode)?;
        self.stages.push(Stage::Shifter(p));
        Ok(())
    }

    /// Compiled mode unitary, stages applied in listing order.
    pub fn compile(&self) -> Matrix {
        let mut u = Matrix::eye(self.mode_count);
        for stage in &self.stages {
            apply_stage_left(&mut u, stage);
        }
        u
    }

    /// Unitary seen by a signal entering the listed `mode_subset` backward:
    /// the stages restricted to the subset, in reverse order, each with its
    /// own matrix. Stages not touching the subset are skipped; a stage
    /// coupling the subset to an outside mode is a topology error.
    pub fn reverse_pass_unitary(&self, mode_subset: &[usize]) -> Result<Matrix> {
        for &m in mode_subset {
            self.check_mode(m)?;
        }
        let inside = |m: usize| mode_subset.contains(&m);
        let mut u = Matrix::eye(self.mode_count);
        for stage in self.stages.iter().rev() {
            let relevant = match stage.modes() {
                (a, Some(b)) => match (inside(a), inside(b)) {
                    (true, true) => true,
                    (false, false) => false,
                    _ => {
                        return Err(Error::Topology(format!(
                            "reverse pass subset splits coupler on modes ({a}, {b})"
                        )))
                    }
                },
                (a, None) => inside(a),
            };
            if relevant {
                apply_stage_left(&mut u, stage);
            }
        }
        Ok(u)
    }
}

fn apply_stage_left(u: &mut Matrix, stage: &Stage) {
    let n = u.nrows();
    match stage {
        Stage::Shifter(p) => {
            let ph = C64::from_polar(1.0, p.phase);
            for k in 0..n {
                u[(p.mode, k)] *= ph;
            }
        }
        Stage::Coupler(c) => {
            let b = c.unitary();
            for k in 0..n {
                let ra = u[(c.mode_a, k)];
                let rb = u[(c.mode_b, k)];
                u[(c.mode_a, k)] = b[(0, 0)] * ra + b[(0, 1)] * rb;
                u[(c.mode_b, k)] = b[(1, 0)] * ra + b[(1, 1)] * rb;
            }
        }
    }
}

/// Max absolute deviation of `U U^dagger` from the identity.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    let n = u.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(i, k)] * u[(j, k)].conj();
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - expect).norm());
        }
    }
    worst
}

pub fn assert_unitary(u: &Matrix, tol: f64) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev > tol {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Rails carrying one dual-rail qubit: the modes detected as logical 0 / 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailPair {
    pub zero: usize,
    pub one: usize,
}

/// Control and target rail assignment for a two-qubit block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitRails {
    pub control: RailPair,
    pub target: RailPair,
}

impl QubitRails {
    /// Rails in the standard six-mode gate order.
    pub fn gate_standard() -> Self {
        QubitRails {
            control: RailPair { zero: 1, one: 2 },
            target: RailPair { zero: 3, one: 4 },
        }
    }

    fn all(&self) -> [usize; 4] {
        [self.control.zero, self.control.one, self.target.zero, self.target.one]
    }
}

/// Two-qubit operator post-selected on one photon per rail pair.
///
/// `matrix` is 4x4 over the basis |00>, |01>, |10>, |11> (control bit
/// first). `success_amplitude` is the overall scale when the block is
/// proportional to a unitary: its modulus is `sqrt(mean |entry|^2 * 4 / 4)`
/// and its phase follows the largest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalOperator {
    pub matrix: Matrix,
    pub success_amplitude: C64,
}

impl LogicalOperator {
    fn from_matrix(matrix: Matrix) -> Self {
        let total: f64 = matrix.iter().map(|a| a.norm_sqr()).sum();
        let scale = (total / 4.0).sqrt();
        let phase = matrix
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .map(|a| if a.norm() > 0.0 { a / a.norm() } else { C64::new(1.0, 0.0) })
            .unwrap_or(C64::new(1.0, 0.0));
        LogicalOperator { matrix, success_amplitude: scale * phase }
    }

    /// Probability that a logical basis input survives post-selection.
    pub fn success_probability(&self, input: usize) -> f64 {
        (0..4).map(|out| self.matrix[(out, input)].norm_sqr()).sum()
    }

    /// Scale factor gamma with `matrix = gamma * target`, if one exists
    /// within `tol` element-wise.
    pub fn proportional_to(&self, target: &Matrix, tol: f64) -> Option<C64> {
        let (mut gamma, mut best) = (C64::new(0.0, 0.0), 0.0_f64);
        for (m, t) in self.matrix.iter().zip(target.iter()) {
            if t.norm() > best {
                best = t.norm();
                gamma = m / t;
            }
        }
        if best == 0.0 {
            return None;
        }
        let ok = self
            .matrix
            .iter()
            .zip(target.iter())
            .all(|(m, t)| (m - gamma * t).norm() <= tol);
        ok.then_some(gamma)
    }

    /// Outcome distribution for a logical basis input, renormalised over the
    /// post-selected block.
    pub fn outcome_distribution(&self, input: usize) -> [f64; 4] {
        let mut p = [0.0; 4];
        let norm = self.success_probability(input);
        for (out, slot) in p.iter_mut().enumerate() {
            *slot = self.matrix[(out, input)].norm_sqr() / norm;
        }
        p
    }
}

/// Post-selected two-qubit operator of a compiled network.
///
/// Entry `(out, in)` is the two-photon transition amplitude between the
/// rail occupations encoding the logical basis states:
/// `U[c',c] U[t',t] + U[c',t] U[t',c]`.
pub fn post_selected_operator(network: &ModeNetwork, rails: &QubitRails) -> Result<LogicalOperator> {
    let u = network.compile();
    logical_block(&u, rails)
}

/// Same extraction from an already compiled unitary.
pub fn logical_block(u: &Matrix, rails: &QubitRails) -> Result<LogicalOperator> {
    let all = rails.all();
    for (i, &a) in all.iter().enumerate() {
        if a >= u.nrows() {
            return Err(Error::argument(format!("rail mode {a} out of range")));
        }
        for &b in &all[i + 1..] {
            if a == b {
                return Err(Error::argument("control and target rails overlap".to_string()));
            }
        }
    }
    let c = [rails.control.zero, rails.control.one];
    let t = [rails.target.zero, rails.target.one];
    let mut m = Matrix::zeros((4, 4));
    for (row, (cp, tp)) in basis_iter(&c, &t).enumerate() {
        for (col, (ci, ti)) in basis_iter(&c, &t).enumerate() {
            m[(row, col)] = u[(cp, ci)] * u[(tp, ti)] + u[(cp, ti)] * u[(tp, ci)];
        }
    }
    Ok(LogicalOperator::from_matrix(m))
}

fn basis_iter(c: &[usize; 2], t: &[usize; 2]) -> impl Iterator<Item = (usize, usize)> {
    let (c, t) = (*c, *t);
    (0..4).map(move |k| (c[k >> 1], t[k & 1]))
}

/// The 4x4 CNOT matrix (control bit high).
pub fn cnot_matrix() -> Matrix {
    let mut m = Matrix::zeros((4, 4));
    let one = C64::new(1.0, 0.0);
    m[(0, 0)] = one;
    m[(1, 1)] = one;
    m[(2, 3)] = one;
    m[(3, 2)] = one;
    m
}

/// The six-mode post-selected CNOT network.
///
/// Layout on modes (vA, C0, C1, T0, T1, vB): a balanced coupler pair on the
/// target rails encloses the row of three gate couplers (vA,C0), (C1,T0),
/// (T1,vB). Each gate coupler keeps power 1/3 in the continuing rail. The
/// phase shifters are solved so the post-selected block is exactly
/// (1/3) x CNOT; see the unit tests for the check against the two-photon
/// tensor oracle.
pub fn cnot_network() -> ModeNetwork {
    use std::f64::consts::FRAC_PI_2 as HALF_PI;
    use std::f64::consts::PI;
    let mut net = ModeNetwork::new(&GATE_MODE_LABELS);
    let half = |a, b| CouplerElement::balanced(a, b);
    let third = |a, b| CouplerElement { mode_a: a, mode_b: b, eta: GATE_COUPLER_ETA, extra_phase: 0.0 };
    net.push_shifter(PhaseShifter { mode: 3, phase: -HALF_PI }).unwrap();
    net.push_coupler(half(3, 4)).unwrap();
    net.push_shifter(PhaseShifter { mode: 4, phase: PI }).unwrap();
    net.push_coupler(third(0, 1)).unwrap();
    net.push_coupler(third(2, 3)).unwrap();
    net.push_coupler(third(4, 5)).unwrap();
    net.push_coupler(half(3, 4)).unwrap();
    net.push_shifter(PhaseShifter { mode: 1, phase: PI }).unwrap();
    net.push_shifter(PhaseShifter { mode: 2, phase: PI }).unwrap();
    net.push_shifter(PhaseShifter { mode: 3, phase: -HALF_PI }).unwrap();
    net
}

/// Serializable network description (stages keyed by mode label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub modes: Vec<String>,
    pub stages: Vec<StageSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageSpec {
    Coupler { a: String, b: String, eta: f64, #[serde(default)] phase: f64 },
    Shifter { mode: String, phase: f64 },
}

impl NetworkSpec {
    pub fn from_network(net: &ModeNetwork) -> Self {
        let name = |m: usize| net.labels[m].clone();
        let stages = net
            .stages
            .iter()
            .map(|s| match s {
                Stage::Coupler(c) => StageSpec::Coupler {
                    a: name(c.mode_a),
                    b: name(c.mode_b),
                    eta: c.eta,
                    phase: c.extra_phase,
                },
                Stage::Shifter(p) => StageSpec::Shifter { mode: name(p.mode), phase: p.phase },
            })
            .collect();
        NetworkSpec { modes: net.labels.clone(), stages }
    }

    pub fn build(&self) -> Result<ModeNetwork> {
        let refs: Vec<&str> = self.modes.iter().map(|s| s.as_str()).collect();
        let mut net = ModeNetwork::new(&refs);
        for stage in &self.stages {
            match stage {
                StageSpec::Coupler { a, b, eta, phase } => {
                    let c = CouplerElement::new(net.mode_index(a)?, net.mode_index(b)?, *eta, *phase)?;
                    net.push_coupler(c)?;
                }
                StageSpec::Shifter { mode, phase } => {
                    let p = PhaseShifter { mode: net.mode_index(mode)?, phase: *phase };
                    net.push_shifter(p)?;
                }
            }
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent route to two-photon amplitudes: build U (x) U on the
    /// 36-dimensional product space and contract with symmetrised input and
    /// output vectors. Shares no algebra with `logical_block`.
    fn tensor_amplitude(u: &Matrix, input: (usize, usize), output: (usize, usize)) -> C64 {
        let n = u.nrows();
        let sym = |a: usize, b: usize| {
            let mut v = vec![C64::new(0.0, 0.0); n * n];
            let norm = if a == b { 1.0 } else { 1.0 / 2.0_f64.sqrt() };
            v[a * n + b] += norm;
            v[b * n + a] += norm;
            if a == b {
                v[a * n + b] = C64::new(1.0, 0.0);
            }
            v
        };
        let vin = sym(input.0, input.1);
        let vout = sym(output.0, output.1);
        let mut amp = C64::new(0.0, 0.0);
        for (ij, vo) in vout.iter().enumerate() {
            if vo.norm() == 0.0 {
                continue;
            }
            let (i, j) = (ij / n, ij % n);
            for (kl, vi) in vin.iter().enumerate() {
                if vi.norm() == 0.0 {
                    continue;
                }
                let (k, l) = (kl / n, kl % n);
                amp += vo.conj() * u[(i, k)] * u[(j, l)] * vi;
            }
        }
        amp
    }

    #[test]
    fn coupler_limits_and_values() {
        let id = coupler_unitary(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(id[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(id[(0, 1)].norm(), 0.0, epsilon = 1e-15);

        let half = coupler_unitary(0.5, 0.0).unwrap();
        assert_abs_diff_eq!(half[(0, 0)].re, 0.5_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(half[(0, 1)].im, 0.5_f64.sqrt(), epsilon = 1e-15);

        let third = coupler_unitary(1.0 / 3.0, 0.0).unwrap();
        assert_abs_diff_eq!(third[(0, 0)].re, 0.816496580927726, epsilon = 1e-12);
        assert_abs_diff_eq!(third[(1, 0)].im, 0.5773502691896257, epsilon = 1e-12);

        assert!(coupler_unitary(1.2, 0.0).is_err());
        assert!(coupler_unitary(-0.1, 0.0).is_err());
        assert!(CouplerElement::new(0, 0, 0.5, 0.0).is_err());
    }

    #[test]
    fn coupler_is_unitary_for_any_phase() {
        for &(eta, phi) in &[(0.3, 0.0), (0.5, 1.2), (0.9, -2.8), (1.0, 0.4)] {
            let u = coupler_unitary(eta, phi).unwrap();
            assert!(unitarity_deviation(&u) < 1e-14);
        }
    }

    #[test]
    fn empty_network_compiles_to_identity() {
        let net = ModeNetwork::with_unlabelled(4);
        let u = net.compile();
        assert!(unitarity_deviation(&u) < 1e-15);
        for i in 0..4 {
            assert_abs_diff_eq!(u[(i, i)].re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn disjoint_stages_commute() {
        let mut ab = ModeNetwork::with_unlabelled(4);
        ab.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        ab.push_coupler(CouplerElement::new(2, 3, 0.3, 0.7).unwrap()).unwrap();
        let mut ba = ModeNetwork::with_unlabelled(4);
        ba.push_coupler(CouplerElement::new(2, 3, 0.3, 0.7).unwrap()).unwrap();
        ba.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        let (u, v) = (ab.compile(), ba.compile());
        for (x, y) in u.iter().zip(v.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn double_balanced_coupler_is_i_swap() {
        let mut net = ModeNetwork::with_unlabelled(2);
        net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        let u = net.compile();
        assert!((u[(0, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((u[(1, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(u[(0, 0)].norm() < 1e-15);
        assert!(u[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn random_networks_stay_unitary() {
        let mut rng = crate::rng::stream(11, "optics-unitarity", 0);
        for modes in 4..=6 {
            for _ in 0..20 {
                let mut net = ModeNetwork::with_unlabelled(modes);
                for _ in 0..12 {
                    let a = rng.random_range(0..modes);
                    let mut b = rng.random_range(0..modes - 1);
                    if b >= a {
                        b += 1;
                    }
                    net.push_coupler(
                        CouplerElement::new(a, b, rng.random::<f64>(), rng.random_range(-3.0..3.0))
                            .unwrap(),
                    )
                    .unwrap();
                    net.push_shifter(PhaseShifter {
                        mode: rng.random_range(0..modes),
                        phase: rng.random_range(-3.0..3.0),
                    })
                    .unwrap();
                }
                assert!(unitarity_deviation(&net.compile()) < 1e-12);
            }
        }
    }

    #[test]
    fn reverse_pass_of_single_coupler_is_its_own_matrix() {
        let mut net = ModeNetwork::with_unlabelled(2);
        net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        let fwd = net.compile();
        let rev = net.reverse_pass_unitary(&[0, 1]).unwrap();
        for (x, y) in fwd.iter().zip(rev.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
        // forward then reversed: photon on rail 0 exits rail 1
        let round = rev.dot(&fwd);
        assert_abs_diff_eq!(round[(1, 0)].norm(), 1.0, epsilon = 1e-14);
        assert!(round[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn reverse_pass_empty_subset_is_identity() {
        let net = cnot_network();
        let u = net.reverse_pass_unitary(&[]).unwrap();
        assert!(unitarity_deviation(&u) < 1e-15);
        assert_abs_diff_eq!(u[(2, 2)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reverse_pass_rejects_split_couplers() {
        let net = cnot_network();
        // control rails couple to vA and T0 inside the gate
        assert!(matches!(net.reverse_pass_unitary(&[1, 2]), Err(Error::Topology(_))));
    }

    #[test]
    fn palindromic_stage_list_reverses_to_itself() {
        let mut net = ModeNetwork::with_unlabelled(3);
        net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        net.push_shifter(PhaseShifter { mode: 2, phase: 0.4 }).unwrap();
        net.push_coupler(CouplerElement::balanced(0, 1)).unwrap();
        let fwd = net.compile();
        let rev = net.reverse_pass_unitary(&[0, 1, 2]).unwrap();
        for (x, y) in fwd.iter().zip(rev.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn cnot_block_is_exactly_one_third_cnot() {
        let op = post_selected_operator(&cnot_network(), &QubitRails::gate_standard()).unwrap();
        let gamma = op.proportional_to(&cnot_matrix(), 1e-12).expect("not proportional to CNOT");
        assert!((gamma - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((op.success_amplitude - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        for input in 0..4 {
            assert_abs_diff_eq!(op.success_probability(input), 1.0 / 9.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cnot_block_agrees_with_tensor_oracle() {
        let net = cnot_network();
        let u = net.compile();
        let rails = QubitRails::gate_standard();
        let op = logical_block(&u, &rails).unwrap();
        let enc = |bit: usize, rail: &RailPair| if bit == 0 { rail.zero } else { rail.one };
        for (col, (ci, ti)) in (0..4).map(|k| (k >> 1, k & 1)).enumerate() {
            for (row, (co, to)) in (0..4).map(|k| (k >> 1, k & 1)).enumerate() {
                let oracle = tensor_amplitude(
                    &u,
                    (enc(ci, &rails.control), enc(ti, &rails.target)),
                    (enc(co, &rails.control), enc(to, &rails.target)),
                );
                assert!(
                    (op.matrix[(row, col)] - oracle).norm() < 1e-12,
                    "mismatch at ({row},{col}): {} vs {}",
                    op.matrix[(row, col)],
                    oracle
                );
            }
        }
    }

    #[test]
    fn vacuum_ancilla_phases_leave_block_invariant() {
        let rails = QubitRails::gate_standard();
        let base = post_selected_operator(&cnot_network(), &rails).unwrap();
        let mut net = cnot_network();
        net.push_shifter(PhaseShifter { mode: 0, phase: 1.234 }).unwrap();
        net.push_shifter(PhaseShifter { mode: 5, phase: -2.1 }).unwrap();
        let shifted = post_selected_operator(&net, &rails).unwrap();
        for (x, y) in base.matrix.iter().zip(shifted.matrix.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn perturbed_center_coupler_breaks_cnot_but_matches_oracle() {
        let mut net = ModeNetwork::new(&GATE_MODE_LABELS);
        for stage in cnot_network().stages() {
            match *stage {
                Stage::Coupler(cp) if cp.mode_a == 2 && cp.mode_b == 3 => {
                    net.push_coupler(CouplerElement::new(2, 3, 0.4, 0.0).unwrap()).unwrap()
                }
                Stage::Coupler(cp) => net.push_coupler(cp).unwrap(),
                Stage::Shifter(p) => net.push_shifter(p).unwrap(),
            }
        }
        let rails = QubitRails::gate_standard();
        let op = post_selected_operator(&net, &rails).unwrap();
        assert!(op.proportional_to(&cnot_matrix(), 1e-6).is_none());
        let u = net.compile();
        let a = tensor_amplitude(&u, (2, 3), (2, 4));
        assert!((op.matrix[(3, 2)] - a).norm() < 1e-12);
    }

    #[test]
    fn overlapping_rails_rejected() {
        let u = Matrix::eye(6);
        let rails = QubitRails {
            control: RailPair { zero: 1, one: 2 },
            target: RailPair { zero: 2, one: 3 },
        };
        assert!(matches!(logical_block(&u, &rails), Err(Error::Argument(_))));
    }

    #[test]
    fn network_spec_round_trips() {
        let net = cnot_network();
        let spec = NetworkSpec::from_network(&net);
        let toml = toml::to_string(&spec).unwrap();
        let back: NetworkSpec = toml::from_str(&toml).unwrap();
        assert_eq!(spec, back);
        let rebuilt = back.build().unwrap();
        let (u, v) = (net.compile(), rebuilt.compile());
        for (x, y) in u.iter().zip(v.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}
