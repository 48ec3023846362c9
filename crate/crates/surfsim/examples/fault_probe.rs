use surfsim::decoder::{CorrectionSet, Decoder};
use surfsim::layout::{build_layout, LayoutKind};
use surfsim::pauli::Pauli;
use surfsim::schedule::{build_round_circuit, LocatedOp};
use surfsim::sim::frame::{run_round, FrameState};
use surfsim::sim::{ErrorSource, ErrorTape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let layout = build_layout(LayoutKind::Surface17);
    let circuit = build_round_circuit(&layout);
    let decoder = Decoder::new(&layout);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut failures = 0;
    let mut total = 0;

    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    for (t, step) in circuit.steps.iter().enumerate() {
        for op in &step.ops {
            let tapes: Vec<ErrorTape> = match *op {
                LocatedOp::Cnot { control, target } => {
                    let mut v = Vec::new();
                    for p1 in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                        for p2 in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                            if p1 == Pauli::I && p2 == Pauli::I { continue; }
                            v.push(ErrorTape::two_qubit(0, t as u16, control, p1, target, p2));
                        }
                    }
                    v
                }
                LocatedOp::Prep(q) | LocatedOp::Hadamard(q) | LocatedOp::Ident(q)
                | LocatedOp::Meas { qubit: q, .. } => paulis
                    .iter()
                    .map(|&p| ErrorTape::single(0, t as u16, q, p))
                    .collect(),
            };
            for tape in tapes {
                total += 1;
                let mut state = FrameState::prepare_quiescent(&layout);
                let mut prev = state.quiescent_reference();
                let mut layers = [vec![0u32; 3], vec![0u32; 3]];
                let mut carried = [0u32, 0u32];
                // Window 1: rounds 0,1,2 (round 0 noisy); window 2: rounds 3,4.
                let mut src = ErrorSource::replay(&tape);
                for w in 0..2 {
                    let (base, n_rounds) = if w == 0 { (0, 3) } else { (1, 2) };
                    for k in 0..n_rounds {
                        let cur = if w == 0 && k == 0 {
                            run_round(&mut state, &circuit, &mut src, &mut rng)
                        } else {
                            run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng)
                        };
                        for (s, (&p, &c)) in prev.bits.iter().zip(&cur.bits).enumerate() {
                            if p != c {
                                let (slot, local) = decoder.slot_of_stab(s);
                                layers[slot][base + k] |= 1 << local;
                            }
                        }
                        prev = cur;
                    }
                    let mut corr = CorrectionSet::default();
                    for slot in 0..2 {
                        if w > 0 { layers[slot][0] = carried[slot]; }
                        let (c, d) = decoder.decode_species(slot, &layers[slot]);
                        match decoder.slot_species(slot) {
                            surfsim::layout::StabKind::X => corr.x_mask ^= c,
                            surfsim::layout::StabKind::Z => corr.z_mask ^= c,
                        }
                        carried[slot] = d;
                        for l in layers[slot].iter_mut() { *l = 0; }
                    }
                    state.apply_mask(corr.x_mask, corr.z_mask);
                }
                let bad_x = state.anticommutes_with(&layout.logical_z);
                let bad_z = state.anticommutes_with(&layout.logical_x);
                if bad_x || bad_z {
                    failures += 1;
                    if failures <= 12 {
                        println!("FAIL t={t} op={op} tape={:?} badX={bad_x} badZ={bad_z} frame={}",
                                 tape.events[0], state.data_frame());
                    }
                }
            }
        }
    }
    println!("{failures} logical failures / {total} single-fault cases");
}
