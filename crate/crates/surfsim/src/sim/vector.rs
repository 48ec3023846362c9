//! Dense state-vector backend: exact simulation of Kraus damping channels
//! (and Pauli channels) on up to 25 qubits.
//!
//! Damping is applied stochastically per location: outcome k is chosen with
//! probability <psi|E_k' E_k|psi> and the normalized E_k|psi> kept. For
//! amplitude damping this is the no-extra-ancilla procedure: rotate the
//! surviving branch, damp to |0> on emission. Per timestep all qubits share
//! one duration class, so the no-event branches fuse into a single diagonal
//! pass; between collapses the vector is intentionally left unnormalized
//! and every probability is taken relative to the current norm, with the
//! measurement collapse restoring the norm exactly once per round.

use super::{ErrorSource, RoundOutcome, SimError};
use crate::layout::Layout;
use crate::noise::{DurationClass, ResolvedDamping};
use crate::pauli::{Pauli, PauliString};
use crate::schedule::{LocatedOp, ScheduledCircuit};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Noise resolution for a state-vector round.
pub enum SvNoise<'a> {
    Silent,
    Pauli(ErrorSource<'a>),
    Damping(&'a ResolvedDamping),
}

/// Dense amplitudes over the full register plus the last collapsed bit per
/// qubit (used to reset ancillas at preparation).
#[derive(Clone, Debug)]
pub struct VectorState {
    n: usize,
    n_stabs: usize,
    amps: Vec<Complex64>,
    last_meas: Vec<u8>,
    round: u32,
}

impl VectorState {
    pub fn new_zero(layout: &Layout) -> Result<Self, SimError> {
        let n = layout.n_qubits;
        if n > 25 {
            return Err(SimError::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n,
            n_stabs: layout.stabilizers.len(),
            amps,
            last_meas: vec![0; n],
            round: 0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn round_index(&self) -> u32 {
        self.round
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_h(&mut self, q: usize) {
        let bit = 1usize << q;
        let period = bit << 1;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i + bit];
                self.amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
                self.amps[i + bit] = (a0 - a1) * FRAC_1_SQRT_2;
            }
            base += period;
        }
    }

    /// Apply the operator X^{x_mask} Z^{z_mask} (global phase dropped).
    pub fn apply_pauli_mask(&mut self, x_mask: u64, z_mask: u64) {
        if x_mask == 0 && z_mask == 0 {
            return;
        }
        let xm = x_mask as usize;
        let zm = z_mask as usize;
        if xm == 0 {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if (i & zm).count_ones() & 1 == 1 {
                    *a = -*a;
                }
            }
            return;
        }
        for i in 0..self.amps.len() {
            let j = i ^ xm;
            if i < j {
                let si = (i & zm).count_ones() & 1 == 1;
                let sj = (j & zm).count_ones() & 1 == 1;
                let ai = self.amps[i];
                let aj = self.amps[j];
                self.amps[j] = if si { -ai } else { ai };
                self.amps[i] = if sj { -aj } else { aj };
            }
        }
    }

    /// Apply a layer of CNOTs on pairwise-disjoint qubits in one pass.
    pub fn apply_cnot_layer(&mut self, pairs: &[(usize, usize)]) {
        if pairs.is_empty() {
            return;
        }
        for i in 0..self.amps.len() {
            let mut j = i;
            for &(c, t) in pairs {
                if i >> c & 1 == 1 {
                    j ^= 1 << t;
                }
            }
            if i < j {
                self.amps.swap(i, j);
            }
        }
    }

    /// Expectation of a Pauli product relative to the current norm.
    pub fn expectation(&self, op: &PauliString) -> f64 {
        let xm = op.x_mask() as usize;
        let zm = op.z_mask() as usize;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            den += a.norm_sqr();
            let j = i ^ xm;
            let s = if (i & zm).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            num += s * (self.amps[j].conj() * a).re;
        }
        num / den
    }

    /// Jointly measure a block of qubits in the Z basis: one pass bins the
    /// probability mass over all outcome patterns, one draw picks the
    /// pattern, one pass projects and renormalizes exactly.
    fn measure_block(&mut self, qubits: &[usize], rng: &mut ChaCha8Rng) -> Vec<u8> {
        let k = qubits.len();
        debug_assert!(k <= 16);
        let mut bins = vec![0.0f64; 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            let mut key = 0usize;
            for (b, &q) in qubits.iter().enumerate() {
                key |= (i >> q & 1) << b;
            }
            bins[key] += a.norm_sqr();
        }
        let total: f64 = bins.iter().sum();
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = usize::MAX;
        for (key, &w) in bins.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            if u < acc {
                chosen = key;
                break;
            }
        }
        if chosen == usize::MAX {
            chosen = bins
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, _)| k)
                .unwrap();
        }
        let scale = 1.0 / bins[chosen].sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            let mut key = 0usize;
            for (b, &q) in qubits.iter().enumerate() {
                key |= (i >> q & 1) << b;
            }
            if key == chosen {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        (0..k).map(|b| (chosen >> b & 1) as u8).collect()
    }

    /// Single-qubit |1> marginals and the total norm, in one pass.
    fn marginals(&self) -> (Vec<f64>, f64) {
        let mut m = vec![0.0f64; self.n];
        let mut total = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            total += w;
            for (q, slot) in m.iter_mut().enumerate() {
                *slot += w * (i >> q & 1) as f64;
            }
        }
        (m, total)
    }

    /// Emission collapse: the qubit damps to |0>, normalized against the
    /// absolute |1> mass `m_abs`.
    fn collapse_emit(&mut self, q: usize, m_abs: f64) {
        let bit = 1usize << q;
        let inv = 1.0 / m_abs.sqrt();
        for i0 in 0..self.amps.len() {
            if i0 & bit == 0 {
                self.amps[i0] = self.amps[i0 | bit] * inv;
                self.amps[i0 | bit] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Phase-damping scatter collapse: project onto |1>.
    fn collapse_project_one(&mut self, q: usize, m_abs: f64) {
        let bit = 1usize << q;
        let inv = 1.0 / m_abs.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit == 0 {
                *a = Complex64::new(0.0, 0.0);
            } else {
                *a *= inv;
            }
        }
    }

    /// Apply the no-event damping branch diag(1, s) to every qubit in
    /// `mask`, leaving the vector unnormalized.
    fn apply_damp_diag(&mut self, mask: usize, s: f64) {
        if mask == 0 {
            return;
        }
        let mut pow = [1.0f64; 32];
        for w in 1..=self.n {
            pow[w] = pow[w - 1] * s;
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            let w = (i & mask).count_ones() as usize;
            if w > 0 {
                *a *= pow[w];
            }
        }
    }

    /// One timestep of combined amplitude-plus-phase damping on all qubits.
    /// Outcomes are drawn per qubit in index order; the common no-event
    /// branches are fused into one diagonal pass, and any collapse flushes
    /// pending branches and refreshes the marginals so its normalization is
    /// exact.
    fn damp_step(&mut self, p_ad: f64, p_pd: f64, rng: &mut ChaCha8Rng) {
        if p_ad == 0.0 && p_pd == 0.0 {
            return;
        }
        let s = ((1.0 - p_ad) * (1.0 - p_pd)).sqrt();
        let (mut m, mut total) = self.marginals();
        let mut pending = 0usize;
        for q in 0..self.n {
            let m1 = m[q] / total;
            let p_emit = p_ad * m1;
            let p_scatter = p_pd * (1.0 - p_ad) * m1;
            let u: f64 = rng.gen();
            if u < p_emit + p_scatter {
                self.apply_damp_diag(pending, s);
                pending = 0;
                let (fresh_m, fresh_total) = self.marginals();
                let m_abs = fresh_m[q];
                if m_abs > 0.0 {
                    if u < p_emit {
                        self.collapse_emit(q, m_abs);
                    } else {
                        self.collapse_project_one(q, m_abs);
                    }
                }
                let _ = fresh_total;
                let refreshed = self.marginals();
                m = refreshed.0;
                total = refreshed.1;
            } else {
                pending |= 1 << q;
            }
        }
        self.apply_damp_diag(pending, s);
    }
}

/// Execute one scheduled round on the state vector.
pub fn run_round(
    state: &mut VectorState,
    circuit: &ScheduledCircuit,
    noise: &mut SvNoise<'_>,
    rng: &mut ChaCha8Rng,
) -> Result<RoundOutcome, SimError> {
    let round = state.round;
    let mut out = RoundOutcome::zeros(state.n_stabs);
    for (step_idx, step) in circuit.steps.iter().enumerate() {
        let step_idx_u = step_idx as u16;
        let meas_ops: Vec<(usize, usize)> = step
            .ops
            .iter()
            .filter_map(|op| match *op {
                LocatedOp::Meas { qubit, stab } => Some((qubit, stab)),
                _ => None,
            })
            .collect();

        if meas_ops.is_empty() {
            apply_step_gates(state, step);
            apply_step_noise(state, step, round, step_idx_u, step.class, noise, rng)?;
        } else {
            // Errors land before the measurement locations.
            apply_step_noise(state, step, round, step_idx_u, step.class, noise, rng)?;
            let qubits: Vec<usize> = meas_ops.iter().map(|&(q, _)| q).collect();
            let bits = state.measure_block(&qubits, rng);
            for ((qubit, stab), bit) in meas_ops.into_iter().zip(bits) {
                out.bits[stab] = bit;
                state.last_meas[qubit] = bit;
            }
        }
    }
    state.round += 1;
    let norm = state.norm_sq();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(SimError::NormDrift { norm });
    }
    Ok(out)
}

/// Ideal gates of one non-measurement step: preparation resets, Hadamards,
/// and the CNOT layer.
fn apply_step_gates(state: &mut VectorState, step: &crate::schedule::Step) {
    let mut reset_mask = 0u64;
    let mut cnots: Vec<(usize, usize)> = Vec::new();
    for op in &step.ops {
        match *op {
            LocatedOp::Prep(q) => {
                // The qubit is in the collapsed basis state from its last
                // measurement; reset is a conditional X.
                if state.last_meas[q] == 1 {
                    reset_mask |= 1 << q;
                }
                state.last_meas[q] = 0;
            }
            LocatedOp::Cnot { control, target } => cnots.push((control, target)),
            _ => {}
        }
    }
    state.apply_pauli_mask(reset_mask, 0);
    for op in &step.ops {
        if let LocatedOp::Hadamard(q) = *op {
            state.apply_h(q);
        }
    }
    state.apply_cnot_layer(&cnots);
}

/// Noise contribution of one step. Pauli sources are sampled per location
/// in op order (matching the frame backend's traversal for tape replay) and
/// applied as one fused mask; damping acts on every qubit with the step's
/// class duration.
fn apply_step_noise(
    state: &mut VectorState,
    step: &crate::schedule::Step,
    round: u32,
    step_idx: u16,
    class: DurationClass,
    noise: &mut SvNoise<'_>,
    rng: &mut ChaCha8Rng,
) -> Result<(), SimError> {
    match noise {
        SvNoise::Silent => {}
        SvNoise::Pauli(source) => {
            let mut x_mask = 0u64;
            let mut z_mask = 0u64;
            let mut add = |q: usize, p: Pauli| {
                let (xb, zb) = p.bits();
                x_mask ^= (xb as u64) << q;
                z_mask ^= (zb as u64) << q;
            };
            for op in &step.ops {
                match *op {
                    LocatedOp::Cnot { control, target } => {
                        let (e1, e2) = source.two_q(round, step_idx, control, target, rng);
                        add(control, e1);
                        add(target, e2);
                    }
                    LocatedOp::Prep(q)
                    | LocatedOp::Hadamard(q)
                    | LocatedOp::Ident(q)
                    | LocatedOp::Meas { qubit: q, .. } => {
                        let e = source.one_q(round, step_idx, q, class, rng);
                        add(q, e);
                    }
                }
            }
            state.apply_pauli_mask(x_mask, z_mask);
        }
        SvNoise::Damping(resolved) => {
            let (p_ad, p_pd) = resolved.params(class);
            state.damp_step(p_ad, p_pd, rng);
        }
    }
    Ok(())
}

/// Quiescent preparation: data qubits in |0> (or |+> for the plus state),
/// one noise-free projective round, then the logical flip for |1_L>.
/// Returns the state, the quiescent syndrome bits, and the sign of the
/// watched logical operator.
pub fn prepare_quiescent(
    layout: &Layout,
    circuit: &ScheduledCircuit,
    encoded: super::EncodedState,
    rng: &mut ChaCha8Rng,
) -> Result<(VectorState, RoundOutcome, f64), SimError> {
    let mut state = VectorState::new_zero(layout)?;
    if encoded == super::EncodedState::PlusL {
        for q in 0..layout.n_data {
            state.apply_h(q);
        }
    }
    let reference = run_round(&mut state, circuit, &mut SvNoise::Silent, rng)?;
    // Noisy rounds are numbered from zero after quiescent projection, the
    // same convention the frame backend uses, so tapes align across
    // backends.
    state.round = 0;
    if encoded == super::EncodedState::OneL {
        state.apply_pauli_mask(layout.logical_x.x_mask(), layout.logical_x.z_mask());
    }
    let dual = encoded.dual_logical(layout);
    let sign = state.expectation(&dual);
    debug_assert!(sign.abs() > 1.0 - 1e-6, "quiescent logical sign not sharp");
    Ok((state, reference, sign.signum()))
}

/// Check the encoded state for a logical flip. Under Pauli noise the state
/// is a Pauli-deformed codeword and the expectation sign is read directly;
/// under damping a noise-free projective round on a clone returns to the
/// codespace first. An expectation within 1e-9 of zero is inconclusive and
/// counts as an error.
pub fn logical_flip(
    state: &VectorState,
    circuit: &ScheduledCircuit,
    layout: &Layout,
    encoded: super::EncodedState,
    reference_sign: f64,
    needs_projection: bool,
    rng: &mut ChaCha8Rng,
) -> Result<bool, SimError> {
    let dual = encoded.dual_logical(layout);
    let exp = if needs_projection {
        let mut clone = state.clone();
        run_round(&mut clone, circuit, &mut SvNoise::Silent, rng)?;
        clone.expectation(&dual)
    } else {
        state.expectation(&dual)
    };
    if exp.abs() <= 1e-9 {
        return Ok(true);
    }
    Ok(exp.signum() != reference_sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{build_layout, LayoutKind};
    use crate::noise::{preset_by_name, NoiseModel, ResolvedNoise};
    use crate::schedule::build_round_circuit;
    use crate::sim::{record_flips, EncodedState, ErrorTape};
    use rand::SeedableRng;

    #[test]
    fn quiescent_state_is_stationary() {
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut state, reference, sign) =
            prepare_quiescent(&layout, &circuit, EncodedState::ZeroL, &mut rng).unwrap();
        assert_eq!(sign, 1.0);
        for _ in 0..3 {
            let out = run_round(&mut state, &circuit, &mut SvNoise::Silent, &mut rng).unwrap();
            assert_eq!(out, reference, "quiescent signs must be reproduced");
        }
        assert!((state.norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quiescent_z_stabilizers_are_pinned_and_x_vary() {
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let mut patterns = std::collections::BTreeSet::new();
        for seed in 0..12 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, reference, _) =
                prepare_quiescent(&layout, &circuit, EncodedState::ZeroL, &mut rng).unwrap();
            // From |0...0> every Z stabilizer projects deterministically
            // to +1.
            for (i, s) in layout.stabilizers.iter().enumerate() {
                if s.kind == crate::layout::StabKind::Z {
                    assert_eq!(reference.bits[i], 0);
                }
            }
            patterns.insert(reference.bits.clone());
        }
        assert!(patterns.len() > 1, "X-stabilizer signs should vary by seed");
    }

    #[test]
    fn one_l_flips_dual_sign() {
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, _, sign) =
            prepare_quiescent(&layout, &circuit, EncodedState::OneL, &mut rng).unwrap();
        assert_eq!(sign, -1.0);
        let (_, _, sign) =
            prepare_quiescent(&layout, &circuit, EncodedState::PlusL, &mut rng).unwrap();
        assert_eq!(sign, 1.0);
    }

    #[test]
    fn full_damping_sends_one_to_zero() {
        // p_ad = 1 on |1>: the qubit is found in |0> afterward.
        let layout = build_layout(LayoutKind::Surface13);
        let mut state = VectorState::new_zero(&layout).unwrap();
        state.apply_pauli_mask(1 << 4, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        state.damp_step(1.0, 0.0, &mut rng);
        let bits = state.measure_block(&[4], &mut rng);
        assert_eq!(bits, vec![0]);
        assert!((state.norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tape_replay_matches_frame_flips() {
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let preset = preset_by_name("SC_H").unwrap();
        let model = NoiseModel::PauliTwirl { t1_ns: 2_000.0, preset };
        let ResolvedNoise::Pauli(channels) = model.resolve().unwrap() else {
            unreachable!()
        };

        // Record a noisy frame run.
        let mut tape = ErrorTape::default();
        let mut frame = crate::sim::FrameState::prepare_quiescent(&layout);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut frame_flips = Vec::new();
        {
            let mut src = ErrorSource::Stochastic {
                channels: &channels,
                record: Some(&mut tape),
            };
            let mut prev = frame.quiescent_reference();
            for _ in 0..6 {
                let out = crate::sim::frame::run_round(&mut frame, &circuit, &mut src, &mut rng);
                frame_flips.push(record_flips(&prev, &out));
                prev = out;
            }
        }
        assert!(!tape.events.is_empty(), "noise should have fired");

        // Replay on the state vector.
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let (mut state, reference, _) =
            prepare_quiescent(&layout, &circuit, EncodedState::ZeroL, &mut rng).unwrap();
        let mut sv_flips = Vec::new();
        let mut noise = SvNoise::Pauli(ErrorSource::replay(&tape));
        let mut prev = reference;
        for _ in 0..6 {
            let out = run_round(&mut state, &circuit, &mut noise, &mut rng).unwrap();
            sv_flips.push(record_flips(&prev, &out));
            prev = out;
        }
        assert_eq!(frame_flips, sv_flips);
    }

    #[test]
    fn logical_flip_detects_injected_chain() {
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (mut state, _, sign) =
            prepare_quiescent(&layout, &circuit, EncodedState::OneL, &mut rng).unwrap();
        assert!(!logical_flip(&state, &circuit, &layout, EncodedState::OneL, sign, false, &mut rng)
            .unwrap());
        state.apply_pauli_mask(layout.logical_x.x_mask(), 0);
        assert!(logical_flip(&state, &circuit, &layout, EncodedState::OneL, sign, false, &mut rng)
            .unwrap());
        // A stabilizer acts trivially.
        state.apply_pauli_mask(layout.logical_x.x_mask(), 0);
        let s = layout.stabilizers[2].pauli(layout.n_qubits);
        state.apply_pauli_mask(s.x_mask(), s.z_mask());
        assert!(!logical_flip(&state, &circuit, &layout, EncodedState::OneL, sign, true, &mut rng)
            .unwrap());
    }
}
