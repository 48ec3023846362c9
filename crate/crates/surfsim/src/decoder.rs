//! Three-round syndrome-volume decoding by matching rules over neighboring
//! flips, memoized into a lookup table.
//!
//! X and Z error species decode independently: X errors flip Z-type
//! stabilizers and vice versa. Within one species the rules run in order,
//! each consuming the flips it matches:
//!
//! 1. the same syndrome flipping in consecutive rounds is a measurement
//!    error; drop the pair;
//! 2. neighboring syndromes flipping in the same round mark the data qubit
//!    between them;
//! 3. a flip whose neighbor flips in the next round marks the shared qubit;
//! 4. a flip left unpaired before the last round marks a boundary qubit of
//!    its patch (one not shared with any other patch of the species);
//! 5. an unpaired flip in the last round is deferred to the next window.
//!
//! A second pass runs with rules 2 and 3 exchanged and the smaller
//! correction set wins (first pass on ties). Ambiguous pairings resolve to
//! the lowest syndrome id; rule-4 candidates to the lowest data qubit.

use crate::layout::{Layout, StabKind};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("flip on stabilizer index {0} outside the layout")]
    UnknownStabilizer(usize),
    #[error("flip round {round} outside window of {window} rounds")]
    RoundOutOfRange { round: usize, window: usize },
}

/// The flips feeding one decode call: a window of `r` rounds plus the flips
/// deferred from the previous window, which occupy the overlap layer
/// (round 0) of this one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyndromeVolume {
    pub window: usize,
    /// (round index, stabilizer index) pairs.
    pub flips: BTreeSet<(usize, usize)>,
    /// Stabilizer indices deferred from the previous window.
    pub carried: BTreeSet<usize>,
}

impl SyndromeVolume {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            flips: BTreeSet::new(),
            carried: BTreeSet::new(),
        }
    }

    pub fn record(&mut self, round: usize, stab: usize) {
        self.flips.insert((round, stab));
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty() && self.carried.is_empty()
    }
}

/// Data-qubit corrections by species, as bit masks over qubit ids.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectionSet {
    /// Qubits receiving an X correction (fixing X errors).
    pub x_mask: u64,
    /// Qubits receiving a Z correction.
    pub z_mask: u64,
}

impl CorrectionSet {
    pub fn x_qubits(&self) -> Vec<usize> {
        mask_qubits(self.x_mask)
    }

    pub fn z_qubits(&self) -> Vec<usize> {
        mask_qubits(self.z_mask)
    }

    pub fn len(&self) -> usize {
        (self.x_mask.count_ones() + self.z_mask.count_ones()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }
}

fn mask_qubits(mask: u64) -> Vec<usize> {
    (0..64).filter(|q| mask >> q & 1 == 1).collect()
}

/// Result of decoding one volume.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub corrections: CorrectionSet,
    /// Last-round flips to carry into the next window, as stabilizer indices.
    pub deferred: Vec<usize>,
}

/// Per-species decoding state: the species' stabilizers in ascending index
/// order, their adjacency, and boundary candidates. The species of errors
/// named here is what gets corrected; the monitored stabilizers are the
/// opposite kind.
struct SpeciesDecoder {
    error_species: StabKind,
    /// Global stabilizer indices, ascending.
    stabs: Vec<usize>,
    /// adj[i] lists (local neighbor, shared data qubit), ascending.
    adj: Vec<Vec<(usize, usize)>>,
    /// Boundary data qubit per local stabilizer for rule 4.
    rule4: Vec<usize>,
    /// Memoized outcomes for three-round volumes with few flips, indexed by
    /// the packed layer mask. Entries are (correction mask, deferred mask).
    table: Vec<(u64, u32)>,
    table_flip_bound: u32,
}

/// The lookup-table decoder for one layout and window size.
pub struct Decoder {
    window: usize,
    n_stabs: usize,
    /// Species slot for each global stabilizer index: (species decoder slot
    /// 0/1, local index).
    stab_slots: Vec<(usize, usize)>,
    species: [SpeciesDecoder; 2],
}

/// Flips per volume above which decode falls back to the rule engine
/// instead of the memoized table.
pub const DEFAULT_TABLE_FLIP_BOUND: u32 = 6;

impl Decoder {
    pub fn new(layout: &Layout) -> Self {
        Self::with_window(layout, 3)
    }

    pub fn with_window(layout: &Layout, window: usize) -> Self {
        assert!(window >= 2, "window must span at least two rounds");
        let x_errors = SpeciesDecoder::new(layout, StabKind::X, window);
        let z_errors = SpeciesDecoder::new(layout, StabKind::Z, window);
        let mut stab_slots = vec![(usize::MAX, usize::MAX); layout.stabilizers.len()];
        for (slot, sp) in [&x_errors, &z_errors].into_iter().enumerate() {
            for (local, &global) in sp.stabs.iter().enumerate() {
                stab_slots[global] = (slot, local);
            }
        }
        Self {
            window,
            n_stabs: layout.stabilizers.len(),
            stab_slots,
            species: [x_errors, z_errors],
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Decode a volume into corrections and deferred flips.
    pub fn decode(&self, volume: &SyndromeVolume) -> Result<DecodeOutcome, DecodeError> {
        // Split flips into per-species layer masks; carried flips join the
        // overlap layer.
        let mut layers = [vec![0u32; self.window], vec![0u32; self.window]];
        for &(round, stab) in &volume.flips {
            if round >= self.window {
                return Err(DecodeError::RoundOutOfRange {
                    round,
                    window: self.window,
                });
            }
            let (slot, local) = self.slot_of(stab)?;
            layers[slot][round] |= 1 << local;
        }
        for &stab in &volume.carried {
            let (slot, local) = self.slot_of(stab)?;
            layers[slot][0] |= 1 << local;
        }

        let mut corrections = CorrectionSet::default();
        let mut deferred = Vec::new();
        for (slot, sp) in self.species.iter().enumerate() {
            let (corr, defer) = sp.decode_layers(&layers[slot]);
            match sp.error_species {
                StabKind::X => corrections.x_mask ^= corr,
                StabKind::Z => corrections.z_mask ^= corr,
            }
            for local in 0..sp.stabs.len() {
                if defer >> local & 1 == 1 {
                    deferred.push(sp.stabs[local]);
                }
            }
        }
        deferred.sort_unstable();
        Ok(DecodeOutcome {
            corrections,
            deferred,
        })
    }

    fn slot_of(&self, stab: usize) -> Result<(usize, usize), DecodeError> {
        if stab >= self.n_stabs {
            return Err(DecodeError::UnknownStabilizer(stab));
        }
        Ok(self.stab_slots[stab])
    }

    /// Rule-4 boundary candidate for a stabilizer, for tests and dumps.
    pub fn rule4_candidate(&self, stab: usize) -> usize {
        let (slot, local) = self.stab_slots[stab];
        self.species[slot].rule4[local]
    }

    /// Species slot (0 corrects X errors, 1 corrects Z errors) and local bit
    /// position of each stabilizer index. The Monte-Carlo loop uses this to
    /// assemble per-species layer masks without intermediate sets.
    pub fn slot_of_stab(&self, stab: usize) -> (usize, usize) {
        self.stab_slots[stab]
    }

    /// The error species a slot corrects.
    pub fn slot_species(&self, slot: usize) -> StabKind {
        self.species[slot].error_species
    }

    /// Global stabilizer indices monitored by a slot, ascending.
    pub fn slot_stabs(&self, slot: usize) -> &[usize] {
        &self.species[slot].stabs
    }

    /// Mask-level decode of one species: layer masks in, (correction mask
    /// over data qubits, deferred mask over local stabilizers) out.
    pub fn decode_species(&self, slot: usize, layers: &[u32]) -> (u64, u32) {
        self.species[slot].decode_layers(layers)
    }
}

impl SpeciesDecoder {
    fn new(layout: &Layout, error_species: StabKind, window: usize) -> Self {
        let monitored = error_species.other();
        let stabs = layout.stab_indices(monitored);
        let n = stabs.len();
        assert!(n <= 32, "species decoder supports up to 32 stabilizers");

        let supports: Vec<BTreeSet<usize>> = stabs
            .iter()
            .map(|&i| layout.stabilizers[i].data_qubits().collect())
            .collect();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if let Some(&shared) = supports[i].intersection(&supports[j]).next() {
                    adj[i].push((j, shared));
                }
            }
        }
        // Boundary qubit: lowest support qubit not shared with any other
        // stabilizer of the monitored kind. Every patch of the built-in
        // layouts has at least one.
        let rule4 = (0..n)
            .map(|i| {
                *supports[i]
                    .iter()
                    .find(|q| {
                        supports
                            .iter()
                            .enumerate()
                            .all(|(j, s)| j == i || !s.contains(q))
                    })
                    .expect("every patch has a boundary qubit")
            })
            .collect();

        let mut sp = Self {
            error_species,
            stabs,
            adj,
            rule4,
            table: Vec::new(),
            table_flip_bound: DEFAULT_TABLE_FLIP_BOUND,
        };
        if window == 3 && 3 * n <= 20 {
            let table: Vec<(u64, u32)> = (0..1u64 << (3 * n))
                .map(|key| {
                    if key.count_ones() <= sp.table_flip_bound {
                        let layers = vec![
                            (key & ((1 << n) - 1)) as u32,
                            (key >> n & ((1 << n) - 1)) as u32,
                            (key >> (2 * n)) as u32,
                        ];
                        sp.decode_layers_uncached(&layers)
                    } else {
                        (0, 0)
                    }
                })
                .collect();
            sp.table = table;
        }
        sp
    }

    fn decode_layers(&self, layers: &[u32]) -> (u64, u32) {
        if !self.table.is_empty() && layers.len() == 3 {
            let n = self.stabs.len();
            let key = layers[0] as u64 | (layers[1] as u64) << n | (layers[2] as u64) << (2 * n);
            if key.count_ones() <= self.table_flip_bound {
                return self.table[key as usize];
            }
        }
        self.decode_layers_uncached(layers)
    }

    /// Dual-pass rule decode on per-round flip masks.
    fn decode_layers_uncached(&self, layers: &[u32]) -> (u64, u32) {
        let pass_a = self.decode_pass(layers, false);
        let pass_b = self.decode_pass(layers, true);
        if pass_b.0.count_ones() < pass_a.0.count_ones() {
            pass_b
        } else {
            pass_a
        }
    }

    /// One rule pass. `swap_23` runs rule 3 before rule 2.
    fn decode_pass(&self, layers: &[u32], swap_23: bool) -> (u64, u32) {
        let rounds = layers.len();
        let n = self.stabs.len();
        let mut live: Vec<u32> = layers.to_vec();
        let mut corr = 0u64;

        // Rule 1: same syndrome in consecutive rounds.
        for r in 0..rounds - 1 {
            let pairs = live[r] & live[r + 1];
            live[r] &= !pairs;
            live[r + 1] &= !pairs;
        }

        let rule2 = |live: &mut Vec<u32>, corr: &mut u64| {
            for r in 0..rounds {
                for i in 0..n {
                    if live[r] >> i & 1 == 0 {
                        continue;
                    }
                    if let Some(&(j, shared)) = self
                        .adj[i]
                        .iter()
                        .find(|&&(j, _)| live[r] >> j & 1 == 1)
                    {
                        live[r] &= !(1 << i | 1 << j);
                        *corr ^= 1 << shared;
                    }
                }
            }
        };
        let rule3 = |live: &mut Vec<u32>, corr: &mut u64| {
            for r in 0..rounds - 1 {
                for i in 0..n {
                    if live[r] >> i & 1 == 0 {
                        continue;
                    }
                    if let Some(&(j, shared)) = self
                        .adj[i]
                        .iter()
                        .find(|&&(j, _)| live[r + 1] >> j & 1 == 1)
                    {
                        live[r] &= !(1 << i);
                        live[r + 1] &= !(1 << j);
                        *corr ^= 1 << shared;
                    }
                }
            }
        };

        if swap_23 {
            rule3(&mut live, &mut corr);
            rule2(&mut live, &mut corr);
        } else {
            rule2(&mut live, &mut corr);
            rule3(&mut live, &mut corr);
        }

        // Rule 4: unpaired flips before the last round take a boundary
        // correction.
        for r in 0..rounds - 1 {
            for i in 0..n {
                if live[r] >> i & 1 == 1 {
                    corr ^= 1 << self.rule4[i];
                    live[r] &= !(1 << i);
                }
            }
        }

        // Rule 5: unpaired last-round flips defer.
        (corr, live[rounds - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{build_layout, LayoutKind};
    use crate::pauli::PauliString;
    use proptest::prelude::*;

    fn s17() -> (Layout, Decoder) {
        let l = build_layout(LayoutKind::Surface17);
        let d = Decoder::new(&l);
        (l, d)
    }

    fn volume(l: &Layout, flips: &[(usize, usize)]) -> SyndromeVolume {
        // Flips given as (round, syndrome id).
        let mut v = SyndromeVolume::new(3);
        for &(r, id) in flips {
            v.record(r, l.stab_index_of_syndrome_id(id).unwrap());
        }
        v
    }

    #[test]
    fn z_error_on_data4_is_corrected() {
        let (l, d) = s17();
        let out = d.decode(&volume(&l, &[(0, 11), (0, 14)])).unwrap();
        assert_eq!(out.corrections.z_qubits(), vec![4]);
        assert_eq!(out.corrections.x_mask, 0);
        assert!(out.deferred.is_empty());
    }

    #[test]
    fn x_error_on_data6_takes_boundary_correction() {
        let (l, d) = s17();
        let out = d.decode(&volume(&l, &[(0, 13)])).unwrap();
        assert_eq!(out.corrections.x_qubits(), vec![6]);
        assert!(out.deferred.is_empty());
    }

    #[test]
    fn measurement_error_pair_is_discarded() {
        let (l, d) = s17();
        let out = d.decode(&volume(&l, &[(0, 11), (1, 11)])).unwrap();
        assert!(out.corrections.is_empty());
        assert!(out.deferred.is_empty());
    }

    #[test]
    fn last_round_flip_defers() {
        let (l, d) = s17();
        let out = d.decode(&volume(&l, &[(2, 11)])).unwrap();
        assert!(out.corrections.is_empty());
        assert_eq!(out.deferred, vec![l.stab_index_of_syndrome_id(11).unwrap()]);
    }

    #[test]
    fn carried_flip_pairs_with_rule_one() {
        let (l, d) = s17();
        let stab = l.stab_index_of_syndrome_id(11).unwrap();
        // A deferred measurement-error flip occupies the overlap layer; its
        // repeat lands in round 1, and rule 1 discards the pair.
        let mut v = SyndromeVolume::new(3);
        v.carried.insert(stab);
        v.record(1, stab);
        let out = d.decode(&v).unwrap();
        assert!(out.corrections.is_empty());
        assert!(out.deferred.is_empty());
    }

    #[test]
    fn diagonal_pair_uses_rule_three() {
        let (l, d) = s17();
        // Data 4 error between the capture times of its two patches: flip on
        // 14 in round 0, on 11 in round 1.
        let out = d.decode(&volume(&l, &[(0, 14), (1, 11)])).unwrap();
        assert_eq!(out.corrections.z_qubits(), vec![4]);
        assert!(out.deferred.is_empty());
    }

    #[test]
    fn rule4_boundary_candidates_match_layout_geometry() {
        let (l, d) = s17();
        let expect: &[(usize, usize)] = &[
            (9, 2),  // X1X2 detects Z errors; boundary qubit 2
            (10, 0), // Z0Z3 -> 0
            (11, 0), // X0X1X3X4 -> 0 (or 3; lowest wins)
            (12, 1), // Z1Z2Z4Z5 -> 1 (or 2)
            (13, 6), // Z3Z4Z6Z7 -> 6 (or 7)
            (14, 5), // X4X5X7X8 -> 5 (or 8)
            (15, 8), // Z5Z8 -> 8
            (16, 6), // X6X7 -> 6
        ];
        for &(id, qubit) in expect {
            let stab = l.stab_index_of_syndrome_id(id).unwrap();
            assert_eq!(d.rule4_candidate(stab), qubit, "syndrome {id}");
        }
    }

    #[test]
    fn unknown_stabilizer_errors() {
        let (_, d) = s17();
        let mut v = SyndromeVolume::new(3);
        v.record(0, 99);
        assert!(matches!(
            d.decode(&v),
            Err(DecodeError::UnknownStabilizer(99))
        ));
        let mut v = SyndromeVolume::new(3);
        v.record(7, 0);
        assert!(matches!(d.decode(&v), Err(DecodeError::RoundOutOfRange { .. })));
    }

    /// Every single data-qubit Pauli injected before round 0 of an otherwise
    /// clean window is annihilated modulo the stabilizer group.
    #[test]
    fn single_data_errors_are_corrected_modulo_stabilizers() {
        for kind in LayoutKind::ALL {
            let l = build_layout(kind);
            let d = Decoder::new(&l);
            let x_span = l.stabilizer_span(StabKind::X);
            let z_span = l.stabilizer_span(StabKind::Z);
            for q in 0..l.n_data {
                for species in [StabKind::X, StabKind::Z] {
                    // A persistent error flips the opposite-kind patches
                    // containing q, in round 0 only.
                    let mut v = SyndromeVolume::new(3);
                    for (i, s) in l.stabilizers.iter().enumerate() {
                        if s.kind == species.other() && s.data_qubits().any(|d| d == q) {
                            v.record(0, i);
                        }
                    }
                    let out = d.decode(&v).unwrap();
                    assert!(out.deferred.is_empty(), "{kind} q{q} {species:?}");
                    let (corr_mask, span, err) = match species {
                        StabKind::X => (
                            out.corrections.x_mask,
                            &x_span,
                            PauliString::x_on(l.n_qubits, &[q]),
                        ),
                        StabKind::Z => (
                            out.corrections.z_mask,
                            &z_span,
                            PauliString::z_on(l.n_qubits, &[q]),
                        ),
                    };
                    let corr = match species {
                        StabKind::X => PauliString::from_masks(l.n_qubits, corr_mask, 0),
                        StabKind::Z => PauliString::from_masks(l.n_qubits, 0, corr_mask),
                    };
                    let residual = err.mul(&corr);
                    assert!(
                        span.contains(&residual),
                        "{kind}: {species:?} error on {q} leaves residual {residual}"
                    );
                }
            }
        }
    }

    /// The memoized table agrees with the rule engine on every one- and
    /// two-flip volume.
    #[test]
    fn lookup_table_matches_rule_engine_exhaustively() {
        for kind in LayoutKind::ALL {
            let l = build_layout(kind);
            let d = Decoder::new(&l);
            for slot in 0..2 {
                let sp = &d.species[slot];
                let n = sp.stabs.len();
                let cells = 3 * n;
                for a in 0..cells {
                    for b in a..cells {
                        let mut layers = vec![0u32; 3];
                        layers[a / n] |= 1 << (a % n);
                        layers[b / n] |= 1 << (b % n);
                        let via_table = sp.decode_layers(&layers);
                        let via_engine = sp.decode_layers_uncached(&layers);
                        assert_eq!(via_table, via_engine, "{kind} slot {slot} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_volume_decodes_to_nothing() {
        let (_, d) = s17();
        let out = d.decode(&SyndromeVolume::new(3)).unwrap();
        assert!(out.corrections.is_empty());
        assert!(out.deferred.is_empty());
    }

    proptest! {
        /// Determinism and the dual-pass guarantee: the chosen correction
        /// set is never larger than either fixed rule order produces.
        #[test]
        fn dual_pass_never_worse_than_fixed_orders(bits in 0u64..(1 << 24)) {
            let l = build_layout(LayoutKind::Surface17);
            let d = Decoder::new(&l);
            let sp = &d.species[0];
            let n = sp.stabs.len();
            let layers = vec![
                (bits & 0xF) as u32,
                (bits >> n & 0xF) as u32,
                (bits >> (2 * n) & 0xF) as u32,
            ];
            let chosen = sp.decode_layers_uncached(&layers);
            let a = sp.decode_pass(&layers, false);
            let b = sp.decode_pass(&layers, true);
            prop_assert!(chosen.0.count_ones() <= a.0.count_ones());
            prop_assert!(chosen.0.count_ones() <= b.0.count_ones());
            // Pure function: same input, same output.
            prop_assert_eq!(chosen, sp.decode_layers_uncached(&layers));
        }
    }
}
