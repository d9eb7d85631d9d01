//! Sampled photon wavepackets and detection-time-resolved two-photon
//! statistics.
//!
//! Envelopes live on uniform time grids (nanoseconds). The joint
//! detection-time density of a photon pair behind a network is kept in a
//! structured form built from one-dimensional factors, so totals,
//! time-difference correlations and pair sampling all cost O(grid) instead
//! of O(grid^2). [`permanent_oracle`] is the independent brute-force route
//! to the same integrated probabilities and backs the tests.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::optics::{assert_unitary, Matrix};
use crate::{Error, Result};

/// Relative tolerance when matching time grids.
const GRID_TOL: f64 = 1e-6;

/// Default grid step, ns.
pub const DEFAULT_DT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Temporal amplitude on a uniform grid, tagged with polarization and a
/// carrier detuning. The full amplitude at grid node i is
/// `envelope[i] * exp(i * detuning * t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    pub t_start: f64,
    pub dt: f64,
    pub envelope: Vec<C64>,
    pub polarization: Polarization,
    pub detuning: f64,
}

impl Wavepacket {
    pub fn new(t_start: f64, dt: f64, envelope: Vec<C64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!("grid step {dt} must be positive")));
        }
        if envelope.len() < 2 {
            return Err(Error::argument("wavepacket needs at least two samples"));
        }
        Ok(Wavepacket { t_start, dt, envelope, polarization: Polarization::H, detuning: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    pub fn time(&self, idx: usize) -> f64 {
        self.t_start + idx as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.envelope.len() - 1)
    }

    pub fn support(&self) -> f64 {
        self.t_end() - self.t_start
    }

    /// Envelope including the carrier phase.
    pub fn amplitude(&self, idx: usize) -> C64 {
        self.envelope[idx] * C64::from_polar(1.0, self.detuning * self.time(idx))
    }

    /// Trapezoid integral of the intensity.
    pub fn norm_sqr(&self) -> f64 {
        trap_slice(self.dt, &self.intensity())
    }

    pub fn normalized(&self) -> Wavepacket {
        let scale = 1.0 / self.norm_sqr().sqrt();
        let mut out = self.clone();
        for a in &mut out.envelope {
            *a *= scale;
        }
        out
    }

    /// Same envelope displaced in time. Grid-sensitive operations fail
    /// later unless the shift is a whole number of grid steps.
    pub fn shifted(&self, tau: f64) -> Wavepacket {
        let mut out = self.clone();
        out.t_start += tau;
        out
    }

    pub fn with_detuning(&self, delta_rad_per_ns: f64) -> Wavepacket {
        let mut out = self.clone();
        out.detuning = delta_rad_per_ns;
        out
    }

    pub fn with_polarization(&self, polarization: Polarization) -> Wavepacket {
        let mut out = self.clone();
        out.polarization = polarization;
        out
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.envelope.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Unit-norm envelope `sqrt(2/T) sin(pi (t - t0) / T)` on one support of
/// length `duration`, zero at both ends.
pub fn default_envelope(duration: f64, t_start: f64, dt: f64) -> Result<Wavepacket> {
    if !(duration > 0.0) {
        return Err(Error::domain(format!("duration {duration} must be positive")));
    }
    let steps = duration / dt;
    let n = steps.round();
    if (steps - n).abs() > GRID_TOL {
        return Err(Error::GridMismatch(format!(
            "duration {duration} is not a whole number of {dt} steps"
        )));
    }
    let n = n as usize;
    let amp = (2.0 / duration).sqrt();
    let envelope = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                C64::new(0.0, 0.0)
            } else {
                C64::new(amp * (std::f64::consts::PI * i as f64 / n as f64).sin(), 0.0)
            }
        })
        .collect();
    Wavepacket::new(t_start, dt, envelope)
}

fn trap_slice(dt: f64, vals: &[f64]) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    let inner: f64 = vals[1..vals.len() - 1].iter().sum();
    dt * (inner + 0.5 * (vals[0] + vals[vals.len() - 1]))
}

fn trap_slice_c(dt: f64, vals: &[C64]) -> C64 {
    if vals.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let inner: C64 = vals[1..vals.len() - 1].iter().sum();
    dt * (inner + 0.5 * (vals[0] + vals[vals.len() - 1]))
}

/// Whole-step offset of `b`'s grid relative to `a`'s.
fn grid_offset(a: &Wavepacket, b: &Wavepacket) -> Result<i64> {
    if ((a.dt - b.dt) / a.dt).abs() > GRID_TOL {
        return Err(Error::GridMismatch(format!("grid steps differ: {} vs {}", a.dt, b.dt)));
    }
    let k = (b.t_start - a.t_start) / a.dt;
    let rounded = k.round();
    if (k - rounded).abs() > GRID_TOL {
        return Err(Error::GridMismatch(format!(
            "grid origins differ by {k} steps, not a whole number"
        )));
    }
    Ok(rounded as i64)
}

/// `integral conj(a) b exp(i (delta_b - delta_a) t) dt` over the common
/// support; zero for orthogonal polarizations.
pub fn overlap(a: &Wavepacket, b: &Wavepacket) -> Result<C64> {
    let off = grid_offset(a, b)?;
    if a.polarization != b.polarization {
        return Ok(C64::new(0.0, 0.0));
    }
    let lo = 0.max(off);
    let hi = (a.len() as i64 - 1).min(off + b.len() as i64 - 1);
    if hi <= lo {
        return Ok(C64::new(0.0, 0.0));
    }
    let vals: Vec<C64> = (lo..=hi)
        .map(|i| a.amplitude(i as usize).conj() * b.amplitude((i - off) as usize))
        .collect();
    Ok(trap_slice_c(a.dt, &vals))
}

/// Squared overlap of the unit-normalised packets: the mutual
/// indistinguishability, and the interference visibility of the pair on a
/// balanced coupler.
pub fn overlap_sq(a: &Wavepacket, b: &Wavepacket) -> Result<f64> {
    let chi = overlap(a, b)?;
    Ok(chi.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}

/// Closed-form |overlap| between two unit half-sine envelopes of length
/// `duration` whose carriers differ by `delta_rad_per_ns`.
pub fn detuned_sine_overlap_mag(delta_rad_per_ns: f64, duration: f64) -> f64 {
    let x = delta_rad_per_ns.abs() * duration;
    if x < 1e-9 {
        return 1.0;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let s = x - two_pi;
    if s.abs() < 0.5 {
        // sin(x/2) and 4 pi^2 - x^2 vanish together at x = 2 pi; divide
        // the common root out before evaluating
        let y = 0.5 * s;
        let sinc = if y.abs() < 1e-4 { 1.0 - y * y / 6.0 } else { y.sin() / y };
        return (two_pi * two_pi * sinc / (x * (x + two_pi))).abs();
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    (8.0 * pi2 * (0.5 * x).sin() / (x * (4.0 * pi2 - x * x))).abs()
}

/// Carrier detuning at which two equal half-sine envelopes of length
/// `duration` reach the given squared overlap. Bisection on the closed
/// form over the main lobe.
pub fn detuning_for_overlap_sq(target: f64, duration: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::domain(format!("overlap^2 {target} outside [0, 1]")));
    }
    let want = target.sqrt();
    // |overlap| falls monotonically from 1 across the main lobe; its first
    // zero sits at x = 4 pi
    let (mut lo, mut hi) = (0.0_f64, 4.0 * std::f64::consts::PI / duration);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if detuned_sine_overlap_mag(mid, duration) > want {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coincidence probability of one photon pair across a coupler of cross
/// power `eta`, given the squared envelope overlap of the inputs.
pub fn coupler_coincidence_probability(eta: f64, overlap_sq: f64) -> f64 {
    let bar = 1.0 - eta;
    bar * bar + eta * eta - 2.0 * eta * bar * overlap_sq
}

/// Joint detection-time densities of a photon pair behind a network, for
/// every unordered output-mode pair.
///
/// Each pair's density has the structured form
///
/// `P(t1, t2) = |a|^2 F1(t1) F2(t2) + |b|^2 F2(t1) F1(t2)
///            + 2 k Re[a conj(b) g(t1) conj(g(t2))]`
///
/// with `F = |psi|^2`, `g = psi_1 conj(psi_2)` shared across pairs, and
/// per-pair assignment amplitudes a, b. `k` is 1 for equal polarizations
/// and 0 otherwise, which turns the ordering sum into a probability sum.
#[derive(Debug, Clone)]
pub struct JointDensity {
    pub t_start: f64,
    pub dt: f64,
    f1: Vec<f64>,
    f2: Vec<f64>,
    g: Vec<C64>,
    interference: f64,
    pairs: BTreeMap<(usize, usize), (C64, C64)>,
}

/// One output pair's density, borrowing the shared temporal factors.
#[derive(Debug, Clone, Copy)]
pub struct PairDensity<'a> {
    pub t_start: f64,
    pub dt: f64,
    f1: &'a [f64],
    f2: &'a [f64],
    g: &'a [C64],
    interference: f64,
    amp_direct: C64,
    amp_swapped: C64,
}

impl JointDensity {
    pub fn len(&self) -> usize {
        self.f1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f1.is_empty()
    }

    pub fn time(&self, idx: usize) -> f64 {
        self.t_start + idx as f64 * self.dt
    }

    pub fn pair_keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.keys().copied()
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<PairDensity<'_>> {
        let key = (i.min(j), i.max(j));
        let &(amp_direct, amp_swapped) = self
            .pairs
            .get(&key)
            .ok_or_else(|| Error::argument(format!("no output pair ({i}, {j})")))?;
        Ok(PairDensity {
            t_start: self.t_start,
            dt: self.dt,
            f1: &self.f1,
            f2: &self.f2,
            g: &self.g,
            interference: self.interference,
            amp_direct,
            amp_swapped,
        })
    }

    /// Sum of every pair's integrated probability; 1 for a unitary network.
    pub fn total_probability(&self) -> f64 {
        self.pair_keys().map(|(i, j)| self.pair(i, j).unwrap().total_probability()).sum()
    }
}

impl<'a> PairDensity<'a> {
    pub fn len(&self) -> usize {
        self.f1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f1.is_empty()
    }

    pub fn time(&self, idx: usize) -> f64 {
        self.t_start + idx as f64 * self.dt
    }

    fn cross_coeff(&self) -> C64 {
        2.0 * self.interference * self.amp_direct * self.amp_swapped.conj()
    }

    /// Density at grid nodes (t1 = time(i), t2 = time(j)).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        let cross = (self.cross_coeff() * self.g[i] * self.g[j].conj()).re;
        let v = self.amp_direct.norm_sqr() * self.f1[i] * self.f2[j]
            + self.amp_swapped.norm_sqr() * self.f2[i] * self.f1[j]
            + cross;
        v.max(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        let n1 = trap_slice(self.dt, self.f1);
        let n2 = trap_slice(self.dt, self.f2);
        let g_int = trap_slice_c(self.dt, self.g);
        let cross = (self.cross_coeff() * g_int * g_int.conj()).re;
        let total =
            (self.amp_direct.norm_sqr() + self.amp_swapped.norm_sqr()) * n1 * n2 + cross;
        total.max(0.0)
    }

    /// Density of the first detection time, integrated over the second.
    pub fn marginal_first(&self) -> Vec<f64> {
        let n1 = trap_slice(self.dt, self.f1);
        let n2 = trap_slice(self.dt, self.f2);
        let g_int = trap_slice_c(self.dt, self.g);
        let cc = self.cross_coeff();
        (0..self.len())
            .map(|i| {
                let v = self.amp_direct.norm_sqr() * self.f1[i] * n2
                    + self.amp_swapped.norm_sqr() * self.f2[i] * n1
                    + (cc * self.g[i] * g_int.conj()).re;
                v.max(0.0)
            })
            .collect()
    }

    /// Density of the second detection time given the first at absolute
    /// time `t1` (linear interpolation between grid nodes).
    pub fn conditional_second(&self, t1: f64) -> Vec<f64> {
        let f1 = interp_real(self.t_start, self.dt, self.f1, t1);
        let f2 = interp_real(self.t_start, self.dt, self.f2, t1);
        let g1 = interp_complex(self.t_start, self.dt, self.g, t1);
        let cc = self.cross_coeff();
        (0..self.len())
            .map(|j| {
                let v = self.amp_direct.norm_sqr() * f1 * self.f2[j]
                    + self.amp_swapped.norm_sqr() * f2 * self.f1[j]
                    + (cc * g1 * self.g[j].conj()).re;
                v.max(0.0)
            })
            .collect()
    }

    /// `C(tau) = integral P(t, t + tau) dt` for every whole-step lag.
    pub fn coincidence_curve(&self) -> Vec<(f64, f64)> {
        let n = self.len() as i64;
        let a2 = self.amp_direct.norm_sqr();
        let b2 = self.amp_swapped.norm_sqr();
        let cc = self.cross_coeff();
        let mut out = Vec::with_capacity((2 * n - 1) as usize);
        for k in -(n - 1)..n {
            let lo = 0.max(-k);
            let hi = (n - 1).min(n - 1 - k);
            let vals: Vec<f64> = (lo..=hi)
                .map(|i| {
                    let (i, j) = (i as usize, (i + k) as usize);
                    let cross = (cc * self.g[i] * self.g[j].conj()).re;
                    (a2 * self.f1[i] * self.f2[j] + b2 * self.f2[i] * self.f1[j] + cross)
                        .max(0.0)
                })
                .collect();
            out.push((k as f64 * self.dt, trap_slice(self.dt, &vals)));
        }
        out
    }
}

/// Joint output densities for two photons entering the compiled unitary
/// `u` on `in_modes`, carrying `packets`. Packets must be unit-norm and
/// share a grid step with whole-step origin offsets; the densities live on
/// the union window. Supports every unordered output pair including both
/// photons on one mode.
pub fn two_photon_density(
    u: &Matrix,
    in_modes: (usize, usize),
    packets: (&Wavepacket, &Wavepacket),
) -> Result<JointDensity> {
    let n = u.nrows();
    assert_unitary(u, 1e-9)?;
    let (k, l) = in_modes;
    if k >= n || l >= n {
        return Err(Error::argument(format!("input modes {in_modes:?} out of range")));
    }
    if k == l {
        return Err(Error::argument("input photons must start on distinct modes"));
    }
    let (pa, pb) = packets;
    for (name, p) in [("first", pa), ("second", pb)] {
        let norm = p.norm_sqr();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::domain(format!("{name} packet norm^2 is {norm}, expected 1")));
        }
    }
    let off = grid_offset(pa, pb)?;
    // union window in pa's index frame
    let lo = 0.min(off);
    let hi = (pa.len() as i64 - 1).max(off + pb.len() as i64 - 1);
    let len = (hi - lo + 1) as usize;
    let fetch = |p: &Wavepacket, base: i64, i: i64| -> C64 {
        let idx = i + lo - base;
        if idx >= 0 && (idx as usize) < p.len() {
            p.amplitude(idx as usize)
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let mut f1 = Vec::with_capacity(len);
    let mut f2 = Vec::with_capacity(len);
    let mut g = Vec::with_capacity(len);
    for i in 0..len as i64 {
        let sa = fetch(pa, 0, i);
        let sb = fetch(pb, off, i);
        f1.push(sa.norm_sqr());
        f2.push(sb.norm_sqr());
        g.push(sa * sb.conj());
    }
    let mut pairs = BTreeMap::new();
    let root_half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i..n {
            let (a, b) = if i == j {
                let amp = u[(i, k)] * u[(i, l)] * root_half;
                (amp, amp)
            } else {
                (u[(i, k)] * u[(j, l)], u[(i, l)] * u[(j, k)])
            };
            pairs.insert((i, j), (a, b));
        }
    }
    Ok(JointDensity {
        t_start: pa.t_start + lo as f64 * pa.dt,
        dt: pa.dt,
        f1,
        f2,
        g,
        interference: if pa.polarization == pb.polarization { 1.0 } else { 0.0 },
        pairs,
    })
}

/// Time-difference coincidence curve of one output pair. Passing the pair
/// in reversed order mirrors the time axis.
pub fn coincidence_vs_tau(d: &JointDensity, pair: (usize, usize)) -> Result<Vec<(f64, f64)>> {
    let curve = d.pair(pair.0, pair.1)?.coincidence_curve();
    if pair.0 <= pair.1 {
        return Ok(curve);
    }
    Ok(curve.into_iter().rev().map(|(tau, c)| (-tau, c)).collect())
}

/// `V = 1 - (integral C_parallel) / (integral C_orthogonal)` for two
/// coincidence curves on the same lag grid.
pub fn hom_visibility(c_parallel: &[(f64, f64)], c_orthogonal: &[(f64, f64)]) -> Result<f64> {
    if c_parallel.len() < 2 || c_orthogonal.len() < 2 {
        return Err(Error::argument("visibility needs sampled coincidence curves"));
    }
    let span_par = c_parallel.last().unwrap().0 - c_parallel[0].0;
    let span_orth = c_orthogonal.last().unwrap().0 - c_orthogonal[0].0;
    if ((span_par - span_orth) / span_orth.max(1e-12)).abs() > GRID_TOL {
        return Err(Error::GridMismatch("coincidence curves cover different lag ranges".into()));
    }
    let integrate = |c: &[(f64, f64)]| {
        let dt = (c.last().unwrap().0 - c[0].0) / (c.len() - 1) as f64;
        let vals: Vec<f64> = c.iter().map(|&(_, v)| v).collect();
        trap_slice(dt, &vals)
    };
    let orth = integrate(c_orthogonal);
    if orth <= 0.0 {
        return Err(Error::domain("reference coincidence curve integrates to zero"));
    }
    Ok(1.0 - integrate(c_parallel) / orth)
}

/// Two-photon outcome probability by direct permanent evaluation, for
/// indistinguishable zero-detuning photons: `|Perm(U_{m,n})|^2 / (n! m!)`.
/// `n` and `m` are per-mode occupations summing to 2.
pub fn permanent_oracle(u: &Matrix, n_in: &[usize], m_out: &[usize]) -> Result<f64> {
    let modes = u.nrows();
    if n_in.len() != modes || m_out.len() != modes {
        return Err(Error::argument(format!(
            "occupation length must match the {modes}-mode unitary"
        )));
    }
    let total_in: usize = n_in.iter().sum();
    let total_out: usize = m_out.iter().sum();
    if total_in != total_out {
        return Err(Error::argument("input and output photon numbers differ"));
    }
    if total_in > 2 {
        return Err(Error::Unsupported(format!("photon number {total_in} > 2")));
    }
    let expand = |occ: &[usize]| {
        let mut v = Vec::new();
        for (mode, &count) in occ.iter().enumerate() {
            v.extend(std::iter::repeat(mode).take(count));
        }
        v
    };
    let cols = expand(n_in);
    let rows = expand(m_out);
    let perm = match total_in {
        0 => C64::new(1.0, 0.0),
        1 => u[(rows[0], cols[0])],
        _ => {
            u[(rows[0], cols[0])] * u[(rows[1], cols[1])]
                + u[(rows[0], cols[1])] * u[(rows[1], cols[0])]
        }
    };
    let fact = |occ: &[usize]| -> f64 {
        occ.iter()
            .map(|&c| match c {
                0 | 1 => 1.0,
                2 => 2.0,
                _ => unreachable!("occupations capped at 2"),
            })
            .product()
    };
    Ok(perm.norm_sqr() / (fact(n_in) * fact(m_out)))
}

fn interp_real(t_start: f64, dt: f64, vals: &[f64], t: f64) -> f64 {
    let x = (t - t_start) / dt;
    if x < 0.0 || x > (vals.len() - 1) as f64 {
        return 0.0;
    }
    let i = (x.floor() as usize).min(vals.len() - 2);
    let frac = x - i as f64;
    vals[i] * (1.0 - frac) + vals[i + 1] * frac
}

fn interp_complex(t_start: f64, dt: f64, vals: &[C64], t: f64) -> C64 {
    let x = (t - t_start) / dt;
    if x < 0.0 || x > (vals.len() - 1) as f64 {
        return C64::new(0.0, 0.0);
    }
    let i = (x.floor() as usize).min(vals.len() - 2);
    let frac = x - i as f64;
    vals[i] * (1.0 - frac) + vals[i + 1] * frac
}

/// Draws detection times from a sampled intensity profile. Cell masses
/// follow the trapezoid rule; within a cell the draw is uniform.
#[derive(Debug, Clone)]
pub struct TimeSampler {
    t_start: f64,
    dt: f64,
    cum: Vec<f64>,
}

impl TimeSampler {
    pub fn from_intensity(t_start: f64, dt: f64, intensity: &[f64]) -> Result<Self> {
        if intensity.len() < 2 {
            return Err(Error::argument("intensity needs at least two samples"));
        }
        let mut cum = Vec::with_capacity(intensity.len() - 1);
        let mut acc = 0.0;
        for w in intensity.windows(2) {
            let mass = 0.5 * (w[0] + w[1]) * dt;
            if mass < 0.0 {
                return Err(Error::domain("negative intensity sample"));
            }
            acc += mass;
            cum.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::domain("intensity integrates to zero"));
        }
        Ok(TimeSampler { t_start, dt, cum })
    }

    pub fn from_packet(p: &Wavepacket) -> Result<Self> {
        Self::from_intensity(p.t_start, p.dt, &p.intensity())
    }

    pub fn total_mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let target = rng.random::<f64>() * self.total_mass();
        let cell = self.cum.partition_point(|&c| c < target).min(self.cum.len() - 1);
        self.t_start + (cell as f64 + rng.random::<f64>()) * self.dt
    }
}

/// Draws correlated detection-time pairs from one output pair's density:
/// first time from the marginal, second from the conditional at the drawn
/// value.
#[derive(Debug, Clone)]
pub struct TwoPhotonSampler {
    t_start: f64,
    dt: f64,
    f1: Vec<f64>,
    f2: Vec<f64>,
    g: Vec<C64>,
    interference: f64,
    amp_direct: C64,
    amp_swapped: C64,
    marginal: TimeSampler,
}

impl TwoPhotonSampler {
    pub fn new(pair: &PairDensity<'_>) -> Result<Self> {
        let marginal =
            TimeSampler::from_intensity(pair.t_start, pair.dt, &pair.marginal_first())?;
        Ok(TwoPhotonSampler {
            t_start: pair.t_start,
            dt: pair.dt,
            f1: pair.f1.to_vec(),
            f2: pair.f2.to_vec(),
            g: pair.g.to_vec(),
            interference: pair.interference,
            amp_direct: pair.amp_direct,
            amp_swapped: pair.amp_swapped,
            marginal,
        })
    }

    fn pair(&self) -> PairDensity<'_> {
        PairDensity {
            t_start: self.t_start,
            dt: self.dt,
            f1: &self.f1,
            f2: &self.f2,
            g: &self.g,
            interference: self.interference,
            amp_direct: self.amp_direct,
            amp_swapped: self.amp_swapped,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> (f64, f64) {
        let t1 = self.marginal.sample(rng);
        let cond = self.pair().conditional_second(t1);
        let sampler = TimeSampler::from_intensity(self.t_start, self.dt, &cond)
            .expect("conditional density is nonnegative with positive mass");
        (t1, sampler.sample(rng))
    }
}
