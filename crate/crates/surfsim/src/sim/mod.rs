//! Execution backends over scheduled circuits: an exact Pauli-frame backend
//! for Pauli channels and a dense state-vector backend for Kraus channels.
//! Both walk the same schedule in the same order and produce per-round
//! syndrome outcomes, so a recorded error tape replays bit-identically
//! across them.

pub mod frame;
pub mod vector;

pub use frame::FrameState;
pub use vector::VectorState;

use crate::layout::Layout;
use crate::noise::{DurationClass, ResolvedPauli};
use crate::pauli::{Pauli, PauliString};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("frame backend cannot execute a Kraus noise model")]
    BackendMismatch,
    #[error("state-vector norm drifted to {norm} (beyond 1e-6)")]
    NormDrift { norm: f64 },
    #[error("state-vector backend supports at most 25 qubits, got {0}")]
    TooManyQubits(usize),
    #[error("logical expectation inconclusive (|{0}| below 1e-9)")]
    Inconclusive(f64),
    #[error("tape replay misaligned at round {round}, step {step}")]
    TapeMisaligned { round: u32, step: u16 },
}

/// The encoded logical state a run protects.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncodedState {
    #[serde(rename = "0L")]
    ZeroL,
    #[serde(rename = "1L")]
    OneL,
    #[serde(rename = "+L")]
    PlusL,
}

impl EncodedState {
    /// The logical operator whose sign detects failures of this state:
    /// Z_L for the computational-basis states (bit flips are the failure
    /// mode), X_L for |+_L> (phase flips).
    pub fn dual_logical(self, layout: &Layout) -> PauliString {
        match self {
            EncodedState::ZeroL | EncodedState::OneL => layout.logical_z,
            EncodedState::PlusL => layout.logical_x,
        }
    }

    /// Which error species the run measures.
    pub fn species(self) -> char {
        match self {
            EncodedState::ZeroL | EncodedState::OneL => 'X',
            EncodedState::PlusL => 'Z',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "0L" | "0" | "zero" => Some(EncodedState::ZeroL),
            "1L" | "1" | "one" => Some(EncodedState::OneL),
            "+L" | "+" | "plus" => Some(EncodedState::PlusL),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncodedState::ZeroL => "0L",
            EncodedState::OneL => "1L",
            EncodedState::PlusL => "+L",
        }
    }
}

/// Measured stabilizer bits for one round, indexed by stabilizer index.
/// The frame backend stores flip bits relative to the noise-free reference;
/// the state-vector backend stores raw measured bits. Flip extraction by
/// XOR against the previous round (or the quiescent reference) makes the
/// two representations interchangeable downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    pub bits: Vec<u8>,
}

impl RoundOutcome {
    pub fn zeros(n_stabs: usize) -> Self {
        Self { bits: vec![0; n_stabs] }
    }
}

/// Stabilizers whose bits changed between consecutive rounds (the first
/// round of a run compares against the quiescent reference).
pub fn record_flips(prev: &RoundOutcome, cur: &RoundOutcome) -> Vec<usize> {
    assert_eq!(prev.bits.len(), cur.bits.len());
    prev.bits
        .iter()
        .zip(&cur.bits)
        .enumerate()
        .filter(|(_, (p, c))| p != c)
        .map(|(i, _)| i)
        .collect()
}

/// One recorded error event. `qubits.1` is set for two-qubit locations;
/// the first Pauli acts on the op's first qubit (the CNOT control).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TapeEvent {
    pub round: u32,
    pub step: u16,
    pub q1: u8,
    pub p1: Pauli,
    pub second: Option<(u8, Pauli)>,
}

/// A recorded list of sampled non-identity errors, in circuit traversal
/// order. Supports bit-exact cross-backend replay and single-fault
/// injection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorTape {
    pub events: Vec<TapeEvent>,
}

impl ErrorTape {
    pub fn single(round: u32, step: u16, q: usize, p: Pauli) -> Self {
        Self {
            events: vec![TapeEvent {
                round,
                step,
                q1: q as u8,
                p1: p,
                second: None,
            }],
        }
    }

    pub fn two_qubit(round: u32, step: u16, q1: usize, p1: Pauli, q2: usize, p2: Pauli) -> Self {
        Self {
            events: vec![TapeEvent {
                round,
                step,
                q1: q1 as u8,
                p1,
                second: Some((q2 as u8, p2)),
            }],
        }
    }

    /// One event per line: `round step qubit pauli [qubit2 pauli2]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{} {} {} {}", e.round, e.step, e.q1, e.p1));
            if let Some((q2, p2)) = e.second {
                out.push_str(&format!(" {q2} {p2}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut events = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 && parts.len() != 6 {
                return Err(format!("line {}: expected 4 or 6 fields", lineno + 1));
            }
            let parse_pauli = |s: &str| match s {
                "X" => Ok(Pauli::X),
                "Y" => Ok(Pauli::Y),
                "Z" => Ok(Pauli::Z),
                "I" => Ok(Pauli::I),
                _ => Err(format!("line {}: bad Pauli {s:?}", lineno + 1)),
            };
            let num = |s: &str| {
                s.parse::<u32>()
                    .map_err(|_| format!("line {}: bad number {s:?}", lineno + 1))
            };
            let second = if parts.len() == 6 {
                Some((num(parts[4])? as u8, parse_pauli(parts[5])?))
            } else {
                None
            };
            events.push(TapeEvent {
                round: num(parts[0])?,
                step: num(parts[1])? as u16,
                q1: num(parts[2])? as u8,
                p1: parse_pauli(parts[3])?,
                second,
            });
        }
        Ok(Self { events })
    }
}

/// Where per-location Pauli errors come from during a round.
pub enum ErrorSource<'a> {
    /// Noise-free execution.
    Silent,
    /// Sample from resolved channels, optionally recording non-identity
    /// draws.
    Stochastic {
        channels: &'a ResolvedPauli,
        record: Option<&'a mut ErrorTape>,
    },
    /// Replay a recorded tape; locations without a matching event are clean.
    Replay { tape: &'a ErrorTape, cursor: usize },
}

impl<'a> ErrorSource<'a> {
    pub fn replay(tape: &'a ErrorTape) -> Self {
        ErrorSource::Replay { tape, cursor: 0 }
    }

    pub fn one_q(
        &mut self,
        round: u32,
        step: u16,
        q: usize,
        class: DurationClass,
        rng: &mut ChaCha8Rng,
    ) -> Pauli {
        match self {
            ErrorSource::Silent => Pauli::I,
            ErrorSource::Stochastic { channels, record } => {
                let p = channels.one_q(class).sample(rng);
                if p != Pauli::I {
                    if let Some(tape) = record {
                        tape.events.push(TapeEvent {
                            round,
                            step,
                            q1: q as u8,
                            p1: p,
                            second: None,
                        });
                    }
                }
                p
            }
            ErrorSource::Replay { tape, cursor } => {
                match tape.events.get(*cursor) {
                    Some(e) if e.round == round && e.step == step && e.q1 as usize == q => {
                        *cursor += 1;
                        e.p1
                    }
                    _ => Pauli::I,
                }
            }
        }
    }

    pub fn two_q(
        &mut self,
        round: u32,
        step: u16,
        q1: usize,
        q2: usize,
        rng: &mut ChaCha8Rng,
    ) -> (Pauli, Pauli) {
        match self {
            ErrorSource::Silent => (Pauli::I, Pauli::I),
            ErrorSource::Stochastic { channels, record } => {
                let (p1, p2) = channels.two_q.sample(rng);
                if (p1, p2) != (Pauli::I, Pauli::I) {
                    if let Some(tape) = record {
                        tape.events.push(TapeEvent {
                            round,
                            step,
                            q1: q1 as u8,
                            p1,
                            second: Some((q2 as u8, p2)),
                        });
                    }
                }
                (p1, p2)
            }
            ErrorSource::Replay { tape, cursor } => match tape.events.get(*cursor) {
                Some(e) if e.round == round && e.step == step && e.q1 as usize == q1 => {
                    *cursor += 1;
                    let p2 = e.second.map(|(_, p)| p).unwrap_or(Pauli::I);
                    (e.p1, p2)
                }
                _ => (Pauli::I, Pauli::I),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tape_text_round_trip() {
        let mut tape = ErrorTape::single(3, 2, 11, Pauli::Z);
        tape.events
            .extend(ErrorTape::two_qubit(4, 5, 0, Pauli::X, 10, Pauli::Y).events);
        let text = tape.to_text();
        let back = ErrorTape::from_text(&text).unwrap();
        assert_eq!(tape, back);
        assert!(ErrorTape::from_text("1 2 3").is_err());
        assert!(ErrorTape::from_text("1 2 3 Q").is_err());
        assert_eq!(
            ErrorTape::from_text("# comment\n\n").unwrap().events.len(),
            0
        );
    }

    #[test]
    fn flips_are_xor_of_rounds() {
        let a = RoundOutcome { bits: vec![0, 1, 0, 1] };
        let b = RoundOutcome { bits: vec![0, 0, 1, 1] };
        assert_eq!(record_flips(&a, &b), vec![1, 2]);
        assert!(record_flips(&a, &a).is_empty());
    }
}
