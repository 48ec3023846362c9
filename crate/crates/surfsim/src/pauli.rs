//! Bit-packed n-qubit Pauli operators and GF(2) span arithmetic.
//!
//! A Pauli product is stored as a pair of bit masks over the qubits: bit `q`
//! of `x_mask` marks an X component on qubit `q`, bit `q` of `z_mask` a Z
//! component, and both together mark Y. Phases are not tracked; every use in
//! this crate (error frames, stabilizers, logical operators, commutation
//! checks) only needs the operator up to phase.

use std::fmt;

/// A single-qubit Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// X/Z component bits, as (x, z).
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Index in the conventional {I, X, Y, Z} ordering.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// An n-qubit Pauli product as paired X/Z bit masks, phase-free.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    /// The identity on `n` qubits. Supports up to 64 qubits.
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "PauliString supports at most 64 qubits");
        Self { n, x_mask: 0, z_mask: 0 }
    }

    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> Self {
        assert!(n <= 64);
        let valid = mask_n(n);
        assert_eq!(x_mask & !valid, 0, "x_mask has bits beyond qubit count");
        assert_eq!(z_mask & !valid, 0, "z_mask has bits beyond qubit count");
        Self { n, x_mask, z_mask }
    }

    /// A product of X operators on the listed qubits.
    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self::from_masks(n, bits_of(qubits), 0)
    }

    /// A product of Z operators on the listed qubits.
    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self::from_masks(n, 0, bits_of(qubits))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n);
        Pauli::from_bits(self.x_mask >> qubit & 1 == 1, self.z_mask >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n);
        let bit = 1u64 << qubit;
        let (x, z) = p.bits();
        self.x_mask = self.x_mask & !bit | if x { bit } else { 0 };
        self.z_mask = self.z_mask & !bit | if z { bit } else { 0 };
    }

    /// Multiply `other` into `self` (phase discarded): component-wise XOR.
    pub fn mul_assign(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n);
        self.x_mask ^= other.x_mask;
        self.z_mask ^= other.z_mask;
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = *self;
        out.mul_assign(other);
        out
    }

    /// True when the two operators commute: the symplectic form
    /// parity(x1·z2 ⊕ z1·x2) vanishes.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n);
        let sym = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        sym % 2 == 0
    }

    /// Number of qubits with a non-identity component.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// Qubits with a non-identity component, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let combined = self.x_mask | self.z_mask;
        (0..self.n).filter(move |q| combined >> q & 1 == 1)
    }
}

impl fmt::Display for PauliString {
    /// Compact factor form, e.g. `X0X1Z4`; identity prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for q in self.support() {
            write!(f, "{}{}", self.get(q), q)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

fn bits_of(qubits: &[usize]) -> u64 {
    let mut m = 0u64;
    for &q in qubits {
        assert!(q < 64);
        m |= 1 << q;
    }
    m
}

fn mask_n(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The GF(2) span of a set of Pauli operators (phases ignored), supporting
/// membership tests and canonical reduction. Used for stabilizer-group
/// arithmetic: residual errors are compared modulo this span.
#[derive(Clone, Debug)]
pub struct PauliSpan {
    n: usize,
    /// Basis rows paired with their pivot bit. Each row packs (x_mask, z_mask)
    /// into a u128 as x | z << 64; pivots are pairwise distinct, so reduction
    /// by pivot-bit elimination yields a coset-unique residual.
    rows: Vec<(u32, u128)>,
}

impl PauliSpan {
    pub fn new(n: usize, generators: &[PauliString]) -> Self {
        let mut span = Self { n, rows: Vec::new() };
        for g in generators {
            assert_eq!(g.n(), n);
            span.insert(g);
        }
        span
    }

    fn pack(p: &PauliString) -> u128 {
        (p.x_mask as u128) | (p.z_mask as u128) << 64
    }

    fn unpack(&self, v: u128) -> PauliString {
        PauliString::from_masks(self.n, v as u64, (v >> 64) as u64)
    }

    fn reduce_packed(&self, mut v: u128) -> u128 {
        for &(pivot, row) in &self.rows {
            if v >> pivot & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Insert a generator. Returns false if it was already in the span.
    pub fn insert(&mut self, p: &PauliString) -> bool {
        let v = self.reduce_packed(Self::pack(p));
        if v == 0 {
            return false;
        }
        let pivot = 127 - v.leading_zeros();
        // Clear the new pivot from existing rows so pivots stay canonical.
        for (_, row) in &mut self.rows {
            if *row >> pivot & 1 == 1 {
                *row ^= v;
            }
        }
        self.rows.push((pivot, v));
        true
    }

    /// Canonical residual of `p` modulo the span; equal inputs modulo the
    /// span reduce to equal residuals.
    pub fn reduce(&self, p: &PauliString) -> PauliString {
        assert_eq!(p.n(), self.n);
        let v = self.reduce_packed(Self::pack(p));
        self.unpack(v)
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.reduce_packed(Self::pack(p)) == 0
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}
