use surfsim::decoder::{Decoder, SyndromeVolume};
use surfsim::layout::{build_layout, LayoutKind};
use surfsim::pauli::Pauli;
use surfsim::schedule::build_round_circuit;
use surfsim::sim::frame::{run_round, FrameState};
use surfsim::sim::{ErrorSource, ErrorTape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let layout = build_layout(LayoutKind::Surface17);
    let circuit = build_round_circuit(&layout);
    let decoder = Decoder::new(&layout);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let tape = ErrorTape::single(0, 0, 0, Pauli::X);
    let mut state = FrameState::prepare_quiescent(&layout);
    let mut src = ErrorSource::replay(&tape);
    let mut prev = state.quiescent_reference();
    let mut volume = SyndromeVolume::new(3);
    for k in 0..3 {
        let cur = if k == 0 {
            run_round(&mut state, &circuit, &mut src, &mut rng)
        } else {
            run_round(&mut state, &circuit, &mut ErrorSource::Silent, &mut rng)
        };
        println!("round {k} bits: {:?}", cur.bits);
        for (s, (&p, &c)) in prev.bits.iter().zip(&cur.bits).enumerate() {
            if p != c { volume.record(k, s); println!("  flip at (round {k}, stab {s} = syndrome {})", layout.syndrome_id(s)); }
        }
        prev = cur;
    }
    let out = decoder.decode(&volume).unwrap();
    println!("decode: x={:?} z={:?} deferred={:?}", out.corrections.x_qubits(), out.corrections.z_qubits(), out.deferred);
    println!("slot_of_stab(1) = {:?}, slot species 0 = {:?}", decoder.slot_of_stab(1), decoder.slot_species(0));
}
