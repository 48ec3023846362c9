//! The three distance-three layouts: qubit sets, stabilizers with geometric
//! roles, logical operators, and the Surface-13 ancilla-reuse pairing.
//!
//! Data qubits are numbered 0..9 (Surface-13/17) or 0..13 (Surface-25) in
//! reading order over the data grid. Syndrome qubits continue upward, assigned
//! row-major over the stabilizer patch positions; for Surface-17 this puts the
//! weight-4 X patches at ancillas 11 and 14 and the bulk Z patch at 13, which
//! is the numbering the decoder's documentation and tests use throughout.

use crate::pauli::{PauliSpan, PauliString};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Stabilizer species: X-type patches detect Z errors and vice versa.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabKind {
    X,
    Z,
}

impl StabKind {
    pub fn other(self) -> StabKind {
        match self {
            StabKind::X => StabKind::Z,
            StabKind::Z => StabKind::X,
        }
    }
}

impl fmt::Display for StabKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabKind::X => write!(f, "X"),
            StabKind::Z => write!(f, "Z"),
        }
    }
}

/// Geometric role of a data qubit within its patch. For the rotated layouts
/// (Surface-13/17) the corners are A=top-left, B=top-right, C=bottom-left,
/// D=bottom-right; for Surface-25's diamond patches A=west, B=north,
/// C=south, D=east. CNOT ordering is expressed in roles: X patches run
/// B, A, D, C and Z patches run B, D, A, C.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
    D,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::A, Role::B, Role::C, Role::D];
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::A => write!(f, "a"),
            Role::B => write!(f, "b"),
            Role::C => write!(f, "c"),
            Role::D => write!(f, "d"),
        }
    }
}

/// One stabilizer generator: its species, measuring ancilla, and support
/// with geometric roles.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub kind: StabKind,
    pub ancilla: usize,
    /// (role, data qubit), at most one entry per role.
    pub support: Vec<(Role, usize)>,
}

impl Stabilizer {
    pub fn data_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&(_, q)| q)
    }

    pub fn qubit_at(&self, role: Role) -> Option<usize> {
        self.support.iter().find(|&&(r, _)| r == role).map(|&(_, q)| q)
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// The stabilizer as a Pauli operator on the full qubit register.
    pub fn pauli(&self, n_qubits: usize) -> PauliString {
        let qs: Vec<usize> = self.data_qubits().collect();
        match self.kind {
            StabKind::X => PauliString::x_on(n_qubits, &qs),
            StabKind::Z => PauliString::z_on(n_qubits, &qs),
        }
    }
}

/// The three built-in layouts.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayoutKind {
    Surface13,
    Surface17,
    Surface25,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 3] = [
        LayoutKind::Surface13,
        LayoutKind::Surface17,
        LayoutKind::Surface25,
    ];

    pub fn parse(s: &str) -> Option<LayoutKind> {
        match s.to_ascii_lowercase().as_str() {
            "surface-13" | "surface13" | "s13" | "13" => Some(LayoutKind::Surface13),
            "surface-17" | "surface17" | "s17" | "17" => Some(LayoutKind::Surface17),
            "surface-25" | "surface25" | "s25" | "25" => Some(LayoutKind::Surface25),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Surface13 => "Surface-13",
            LayoutKind::Surface17 => "Surface-17",
            LayoutKind::Surface25 => "Surface-25",
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A distance-three code layout: qubits, stabilizers, logicals, and (for
/// Surface-13) the ancilla-reuse pairing. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Layout {
    pub kind: LayoutKind,
    pub n_qubits: usize,
    pub n_data: usize,
    pub data_qubits: Vec<usize>,
    pub syndrome_qubits: Vec<usize>,
    pub stabilizers: Vec<Stabilizer>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    /// Surface-13 only: per ancilla, the (X-phase, Z-phase) stabilizer
    /// indices it measures within one round.
    pub ancilla_reuse: Option<Vec<(usize, usize, usize)>>,
}

type StabRow = (StabKind, usize, &'static [(Role, usize)]);

// Surface-13 / Surface-17 share the Table II stabilizers; roles follow the
// rotated grid with data qubit q at (row, col) = (q / 3, q % 3).
const S17_STABS: &[StabRow] = &[
    (StabKind::X, 9, &[(Role::C, 1), (Role::D, 2)]),
    (StabKind::Z, 10, &[(Role::B, 0), (Role::D, 3)]),
    (
        StabKind::X,
        11,
        &[(Role::A, 0), (Role::B, 1), (Role::C, 3), (Role::D, 4)],
    ),
    (
        StabKind::Z,
        12,
        &[(Role::A, 1), (Role::B, 2), (Role::C, 4), (Role::D, 5)],
    ),
    (
        StabKind::Z,
        13,
        &[(Role::A, 3), (Role::B, 4), (Role::C, 6), (Role::D, 7)],
    ),
    (
        StabKind::X,
        14,
        &[(Role::A, 4), (Role::B, 5), (Role::C, 7), (Role::D, 8)],
    ),
    (StabKind::Z, 15, &[(Role::A, 5), (Role::C, 8)]),
    (StabKind::X, 16, &[(Role::A, 6), (Role::B, 7)]),
];

// Surface-13 reuses four ancillas: each measures one weight-4 and one
// weight-2 patch, paired by which patches the ancilla sits between. X-phase
// stabilizers are listed first (indices 0..4), then the Z-phase (4..8).
const S13_STABS: &[StabRow] = &[
    (StabKind::X, 9, &[(Role::C, 1), (Role::D, 2)]),
    (
        StabKind::X,
        10,
        &[(Role::A, 0), (Role::B, 1), (Role::C, 3), (Role::D, 4)],
    ),
    (
        StabKind::X,
        11,
        &[(Role::A, 4), (Role::B, 5), (Role::C, 7), (Role::D, 8)],
    ),
    (StabKind::X, 12, &[(Role::A, 6), (Role::B, 7)]),
    (
        StabKind::Z,
        9,
        &[(Role::A, 1), (Role::B, 2), (Role::C, 4), (Role::D, 5)],
    ),
    (StabKind::Z, 10, &[(Role::B, 0), (Role::D, 3)]),
    (StabKind::Z, 11, &[(Role::A, 5), (Role::C, 8)]),
    (
        StabKind::Z,
        12,
        &[(Role::A, 3), (Role::B, 4), (Role::C, 6), (Role::D, 7)],
    ),
];

// Surface-25: data qubit q sits on the 5x5 grid at the q-th position with
// (r + c) even, reading order; syndrome positions fill (r + c) odd.
const S25_STABS: &[StabRow] = &[
    (StabKind::X, 13, &[(Role::A, 0), (Role::D, 1), (Role::C, 3)]),
    (StabKind::X, 14, &[(Role::A, 1), (Role::D, 2), (Role::C, 4)]),
    (StabKind::Z, 15, &[(Role::B, 0), (Role::D, 3), (Role::C, 5)]),
    (
        StabKind::Z,
        16,
        &[(Role::B, 1), (Role::A, 3), (Role::D, 4), (Role::C, 6)],
    ),
    (StabKind::Z, 17, &[(Role::B, 2), (Role::A, 4), (Role::C, 7)]),
    (
        StabKind::X,
        18,
        &[(Role::B, 3), (Role::A, 5), (Role::D, 6), (Role::C, 8)],
    ),
    (
        StabKind::X,
        19,
        &[(Role::B, 4), (Role::A, 6), (Role::D, 7), (Role::C, 9)],
    ),
    (StabKind::Z, 20, &[(Role::B, 5), (Role::D, 8), (Role::C, 10)]),
    (
        StabKind::Z,
        21,
        &[(Role::B, 6), (Role::A, 8), (Role::D, 9), (Role::C, 11)],
    ),
    (StabKind::Z, 22, &[(Role::B, 7), (Role::A, 9), (Role::C, 12)]),
    (StabKind::X, 23, &[(Role::B, 8), (Role::A, 10), (Role::D, 11)]),
    (StabKind::X, 24, &[(Role::B, 9), (Role::A, 11), (Role::D, 12)]),
];

/// Construct one of the three built-in layouts.
pub fn build_layout(kind: LayoutKind) -> Layout {
    let (n_qubits, n_data, rows): (usize, usize, &[StabRow]) = match kind {
        LayoutKind::Surface13 => (13, 9, S13_STABS),
        LayoutKind::Surface17 => (17, 9, S17_STABS),
        LayoutKind::Surface25 => (25, 13, S25_STABS),
    };
    let stabilizers: Vec<Stabilizer> = rows
        .iter()
        .map(|&(kind, ancilla, support)| Stabilizer {
            kind,
            ancilla,
            support: support.to_vec(),
        })
        .collect();
    let (logical_x, logical_z) = match kind {
        LayoutKind::Surface25 => (
            PauliString::x_on(n_qubits, &[0, 5, 10]),
            PauliString::z_on(n_qubits, &[0, 1, 2]),
        ),
        _ => (
            PauliString::x_on(n_qubits, &[2, 4, 6]),
            PauliString::z_on(n_qubits, &[0, 4, 8]),
        ),
    };
    let ancilla_reuse = match kind {
        LayoutKind::Surface13 => Some(vec![(9, 0, 4), (10, 1, 5), (11, 2, 6), (12, 3, 7)]),
        _ => None,
    };
    Layout {
        kind,
        n_qubits,
        n_data,
        data_qubits: (0..n_data).collect(),
        syndrome_qubits: (n_data..n_qubits).collect(),
        stabilizers,
        logical_x,
        logical_z,
        ancilla_reuse,
    }
}

impl Layout {
    /// External id of a stabilizer's syndrome record. For Surface-17/25 this
    /// is the measuring ancilla's qubit id; Surface-13 reuses each ancilla
    /// for two stabilizers, so the Z-phase records get ids 13..17 (ancilla
    /// id plus four) to stay unique.
    pub fn syndrome_id(&self, stab_idx: usize) -> usize {
        match self.kind {
            LayoutKind::Surface13 => 9 + stab_idx,
            LayoutKind::Surface17 => 9 + stab_idx,
            LayoutKind::Surface25 => 13 + stab_idx,
        }
    }

    pub fn stab_index_of_syndrome_id(&self, syndrome_id: usize) -> Option<usize> {
        let base = match self.kind {
            LayoutKind::Surface13 | LayoutKind::Surface17 => 9,
            LayoutKind::Surface25 => 13,
        };
        let idx = syndrome_id.checked_sub(base)?;
        (idx < self.stabilizers.len()).then_some(idx)
    }

    pub fn is_data(&self, qubit: usize) -> bool {
        qubit < self.n_data
    }

    /// Stabilizer indices of the given species.
    pub fn stab_indices(&self, kind: StabKind) -> Vec<usize> {
        self.stabilizers
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// GF(2) span of one species' stabilizer generators.
    pub fn stabilizer_span(&self, kind: StabKind) -> PauliSpan {
        let gens: Vec<PauliString> = self
            .stabilizers
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.pauli(self.n_qubits))
            .collect();
        PauliSpan::new(self.n_qubits, &gens)
    }

    /// Span of all stabilizer generators.
    pub fn full_stabilizer_span(&self) -> PauliSpan {
        let gens: Vec<PauliString> = self
            .stabilizers
            .iter()
            .map(|s| s.pauli(self.n_qubits))
            .collect();
        PauliSpan::new(self.n_qubits, &gens)
    }
}

/// Exhaustive code distance: the minimum weight over pure-X and pure-Z data
/// patterns that commute with every stabilizer but lie outside the
/// stabilizer group. For CSS codes the minimum-weight logical operator can
/// always be chosen pure, so this is the true distance.
pub fn code_distance(layout: &Layout) -> usize {
    let n = layout.n_qubits;
    let x_span = layout.stabilizer_span(StabKind::X);
    let z_span = layout.stabilizer_span(StabKind::Z);

    let mut best = usize::MAX;
    for species in [StabKind::X, StabKind::Z] {
        // Pure-X patterns must commute with Z stabilizers and escape the
        // X-stabilizer span; dually for pure-Z.
        let (checks, own_span): (Vec<PauliString>, &PauliSpan) = match species {
            StabKind::X => (
                layout
                    .stabilizers
                    .iter()
                    .filter(|s| s.kind == StabKind::Z)
                    .map(|s| s.pauli(n))
                    .collect(),
                &x_span,
            ),
            StabKind::Z => (
                layout
                    .stabilizers
                    .iter()
                    .filter(|s| s.kind == StabKind::X)
                    .map(|s| s.pauli(n))
                    .collect(),
                &z_span,
            ),
        };
        for mask in 1u64..1 << layout.n_data {
            let p = match species {
                StabKind::X => PauliString::from_masks(n, mask, 0),
                StabKind::Z => PauliString::from_masks(n, 0, mask),
            };
            if p.weight() >= best {
                continue;
            }
            if checks.iter().all(|s| p.commutes_with(s)) && !own_span.contains(&p) {
                best = p.weight();
            }
        }
    }
    best
}
