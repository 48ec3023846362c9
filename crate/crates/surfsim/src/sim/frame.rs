//! Pauli-frame backend: tracks the accumulated error relative to the
//! noise-free execution as a pair of bit masks, conjugated through the
//! ideal gates. Exact for Pauli channels and fast enough for threshold
//! sweeps.
//!
//! Because the frame is relative, the random quiescent signs never appear:
//! a measurement's outcome bit is simply whether the frame anticommutes
//! with the ancilla's Z readout, i.e. the syndrome flip itself.

use super::{ErrorSource, RoundOutcome};
use crate::layout::Layout;
use crate::pauli::{Pauli, PauliString};
use crate::schedule::{LocatedOp, ScheduledCircuit};
use rand_chacha::ChaCha8Rng;

/// The Pauli frame over all layout qubits. Identity at quiescent start.
#[derive(Clone, Debug)]
pub struct FrameState {
    n: usize,
    n_stabs: usize,
    data_mask: u64,
    x: u64,
    z: u64,
    round: u32,
}

impl FrameState {
    /// Quiescent initialization: identity frame, empty flip reference.
    pub fn prepare_quiescent(layout: &Layout) -> Self {
        Self {
            n: layout.n_qubits,
            n_stabs: layout.stabilizers.len(),
            data_mask: (1u64 << layout.n_data) - 1,
            x: 0,
            z: 0,
            round: 0,
        }
    }

    pub fn frame(&self) -> PauliString {
        PauliString::from_masks(self.n, self.x, self.z)
    }

    /// The frame restricted to data qubits. Residual ancilla components are
    /// transient (cleared at the next preparation) and irrelevant to
    /// logical-error accounting.
    pub fn data_frame(&self) -> PauliString {
        PauliString::from_masks(self.n, self.x & self.data_mask, self.z & self.data_mask)
    }

    pub fn round_index(&self) -> u32 {
        self.round
    }

    /// The flip reference: all clear.
    pub fn quiescent_reference(&self) -> RoundOutcome {
        RoundOutcome::zeros(self.n_stabs)
    }

    #[inline]
    fn conj_h(&mut self, q: usize) {
        let xb = self.x >> q & 1;
        let zb = self.z >> q & 1;
        self.x ^= (xb ^ zb) << q;
        self.z ^= (xb ^ zb) << q;
    }

    #[inline]
    fn conj_cnot(&mut self, c: usize, t: usize) {
        // X on the control propagates to the target; Z on the target to the
        // control.
        self.x ^= (self.x >> c & 1) << t;
        self.z ^= (self.z >> t & 1) << c;
    }

    #[inline]
    fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        self.x ^= (xb as u64) << q;
        self.z ^= (zb as u64) << q;
    }

    /// Noise-free Pauli application (used for corrections and logical
    /// preparation).
    pub fn apply_mask(&mut self, x_mask: u64, z_mask: u64) {
        self.x ^= x_mask;
        self.z ^= z_mask;
    }

    /// Whether the residual frame anticommutes with the given operator.
    pub fn anticommutes_with(&self, op: &PauliString) -> bool {
        !self.frame().commutes_with(op)
    }
}

/// Execute one scheduled round, sampling errors from `source`. Returns the
/// per-stabilizer flip bits.
pub fn run_round(
    state: &mut FrameState,
    circuit: &ScheduledCircuit,
    source: &mut ErrorSource<'_>,
    rng: &mut ChaCha8Rng,
) -> RoundOutcome {
    let round = state.round;
    let mut out = RoundOutcome::zeros(state.n_stabs);
    for (step_idx, step) in circuit.steps.iter().enumerate() {
        let step_idx = step_idx as u16;
        for op in &step.ops {
            match *op {
                LocatedOp::Ident(q) => {
                    let e = source.one_q(round, step_idx, q, step.class, rng);
                    state.apply_pauli(q, e);
                }
                LocatedOp::Prep(q) => {
                    let bit = 1u64 << q;
                    state.x &= !bit;
                    state.z &= !bit;
                    let e = source.one_q(round, step_idx, q, step.class, rng);
                    state.apply_pauli(q, e);
                }
                LocatedOp::Hadamard(q) => {
                    state.conj_h(q);
                    let e = source.one_q(round, step_idx, q, step.class, rng);
                    state.apply_pauli(q, e);
                }
                LocatedOp::Cnot { control, target } => {
                    state.conj_cnot(control, target);
                    let (e1, e2) = source.two_q(round, step_idx, control, target, rng);
                    state.apply_pauli(control, e1);
                    state.apply_pauli(target, e2);
                }
                LocatedOp::Meas { qubit, stab } => {
                    // Errors land before the readout.
                    let e = source.one_q(round, step_idx, qubit, step.class, rng);
                    state.apply_pauli(qubit, e);
                    out.bits[stab] = (state.x >> qubit & 1) as u8;
                    // Measurement destroys the phase component; the X
                    // component persists until the next preparation.
                    state.z &= !(1u64 << qubit);
                }
            }
        }
    }
    state.round += 1;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{build_layout, LayoutKind};
    use crate::schedule::build_round_circuit;
    use crate::sim::ErrorTape;
    use rand::SeedableRng;

    fn setup(kind: LayoutKind) -> (Layout, ScheduledCircuit, FrameState, ChaCha8Rng) {
        let layout = build_layout(kind);
        let circuit = build_round_circuit(&layout);
        let state = FrameState::prepare_quiescent(&layout);
        (layout, circuit, state, ChaCha8Rng::seed_from_u64(7))
    }

    fn flipped_syndromes(layout: &Layout, out: &RoundOutcome) -> Vec<usize> {
        out.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| layout.syndrome_id(i))
            .collect()
    }

    #[test]
    fn noise_free_round_has_no_flips() {
        for kind in LayoutKind::ALL {
            let (_, circuit, mut state, mut rng) = setup(kind);
            for _ in 0..5 {
                let out = run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng);
                assert!(out.bits.iter().all(|&b| b == 0), "{kind}");
            }
            assert!(state.frame().is_identity());
        }
    }

    #[test]
    fn z_on_data4_flips_syndromes_11_and_14() {
        let (layout, circuit, mut state, mut rng) = setup(LayoutKind::Surface17);
        // Z error placed at the start of the round (after the idle slot of
        // the preparation timestep).
        let tape = ErrorTape::single(0, 0, 4, Pauli::Z);
        let out = run_round(&mut state, &circuit, &mut ErrorSource::replay(&tape), &mut rng);
        assert_eq!(flipped_syndromes(&layout, &out), vec![11, 14]);
        // The error persists: the next round shows no further flips.
        let out2 = run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng);
        assert_eq!(out2, out);
    }

    #[test]
    fn x_on_data6_flips_syndrome_13() {
        let (layout, circuit, mut state, mut rng) = setup(LayoutKind::Surface17);
        let tape = ErrorTape::single(0, 0, 6, Pauli::X);
        let out = run_round(&mut state, &circuit, &mut ErrorSource::replay(&tape), &mut rng);
        assert_eq!(flipped_syndromes(&layout, &out), vec![13]);
    }

    #[test]
    fn measurement_error_flips_once_then_heals() {
        let (layout, circuit, mut state, mut rng) = setup(LayoutKind::Surface17);
        // X on ancilla 11 just before its measurement (step 7).
        let tape = ErrorTape::single(0, 7, 11, Pauli::X);
        let out1 = run_round(&mut state, &circuit, &mut ErrorSource::replay(&tape), &mut rng);
        assert_eq!(flipped_syndromes(&layout, &out1), vec![11]);
        let out2 = run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng);
        // The raw bit returns to quiescent, i.e. a second flip relative to
        // the previous round.
        assert!(out2.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn stabilizers_propagate_to_no_flips() {
        // A frame equal to any stabilizer yields no syndrome flips: the
        // CNOT orders preserve commutation through the round.
        for kind in LayoutKind::ALL {
            let (layout, circuit, _, mut rng) = setup(kind);
            for s in &layout.stabilizers {
                let mut state = FrameState::prepare_quiescent(&layout);
                let p = s.pauli(layout.n_qubits);
                state.apply_mask(p.x_mask(), p.z_mask());
                let out = run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng);
                assert!(
                    out.bits.iter().all(|&b| b == 0),
                    "{kind}: stabilizer {p} disturbed a noise-free round"
                );
            }
        }
    }

    #[test]
    fn corrections_cancel_matching_errors() {
        let (layout, circuit, mut state, mut rng) = setup(LayoutKind::Surface17);
        let tape = ErrorTape::single(0, 0, 6, Pauli::X);
        run_round(&mut state, &circuit, &mut ErrorSource::replay(&tape), &mut rng);
        // Correct with X7 instead of X6: residual X6X7 is a stabilizer.
        state.apply_mask(1 << 7, 0);
        let span = layout.full_stabilizer_span();
        assert!(span.contains(&state.data_frame()));
        assert!(!state.anticommutes_with(&layout.logical_z));
        // An uncorrected logical chain anticommutes with the dual logical.
        let mut state = FrameState::prepare_quiescent(&layout);
        state.apply_mask(layout.logical_x.x_mask(), 0);
        assert!(state.anticommutes_with(&layout.logical_z));
        // A lone stabilizer element does not.
        let mut state = FrameState::prepare_quiescent(&layout);
        let s = layout.stabilizers[0].pauli(layout.n_qubits);
        state.apply_mask(s.x_mask(), s.z_mask());
        assert!(!state.anticommutes_with(&layout.logical_z));
    }

    #[test]
    fn hook_error_on_z_ancilla_is_never_logical_after_one_more_qubit() {
        // The reordered Z sequence keeps the two-qubit hook from an ancilla
        // fault perpendicular to the logical-Z chain: no single additional
        // Z can complete a logical operator.
        let layout = build_layout(LayoutKind::Surface17);
        let circuit = build_round_circuit(&layout);
        let span = layout.full_stabilizer_span();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (idx, stab) in layout.stabilizers.iter().enumerate() {
            if stab.kind != crate::layout::StabKind::Z || stab.weight() != 4 {
                continue;
            }
            // Find this ancilla's second CNOT and inject Z on the ancilla
            // side just after the gate.
            let mut cnots = Vec::new();
            for (t, step) in circuit.steps.iter().enumerate() {
                for op in &step.ops {
                    if let LocatedOp::Cnot { control, target } = *op {
                        if target == stab.ancilla {
                            cnots.push((t, control));
                        }
                    }
                }
            }
            assert_eq!(cnots.len(), 4, "stab {idx}");
            let (step, control) = cnots[1];
            let tape =
                ErrorTape::two_qubit(0, step as u16, control, Pauli::I, stab.ancilla, Pauli::Z);
            let mut state = FrameState::prepare_quiescent(&layout);
            run_round(&mut state, &circuit, &mut ErrorSource::replay(&tape), &mut rng);
            // Residual data error: two Z's on the a/c column of the patch.
            let residual = state.data_frame();
            assert_eq!(residual.x_mask(), 0);
            assert_eq!(residual.z_mask().count_ones(), 2, "stab {idx}");
            for q in 0..layout.n_data {
                let extended = residual.mul(&PauliString::z_on(layout.n_qubits, &[q]));
                let is_logical = extended.commutes_with(&layout.logical_x)
                    && !span.contains(&extended)
                    && layout
                        .stabilizers
                        .iter()
                        .all(|s| extended.commutes_with(&s.pauli(layout.n_qubits)));
                assert!(
                    !is_logical,
                    "stab {idx}: hook plus Z{q} forms a logical operator"
                );
            }
        }
    }
}
