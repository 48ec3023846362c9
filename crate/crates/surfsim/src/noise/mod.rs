//! Noise channels and models: Pauli channels (depolarizing and twirled
//! damping), exact Kraus damping, architecture presets, and the resolution of
//! a noise model into per-duration-class channels for the simulators.

pub mod kraus;
pub mod presets;

pub use kraus::{
    amplitude_damping, combined_damping, damping_params_from_times, phase_damping, pz_from_ppd,
    twirl_numeric, KrausChannel, Mat2,
};
pub use presets::{
    builtin_presets, preset_by_name, presets_from_json, presets_to_json, ArchitecturePreset,
    DurationClass,
};

use crate::pauli::Pauli;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("probability {name} = {value} out of [0, 1]")]
    ProbabilityOutOfRange { name: String, value: f64 },
    #[error("channel probabilities do not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("negative probability {value} beyond rounding tolerance")]
    NegativeProbability { value: f64 },
    #[error("Kraus operators are not trace preserving")]
    NotTracePreserving,
    #[error("unphysical times: T2 = {t2_ns} ns exceeds 2 T1 = {t1_ns} ns")]
    Unphysical { t2_ns: f64, t1_ns: f64 },
    #[error("durations must be nonnegative and T1, T2 positive")]
    BadDuration,
    #[error("unknown architecture preset {0:?}")]
    UnknownPreset(String),
}

/// Probabilities smaller than this in magnitude are treated as rounding
/// noise and clamped to zero; anything more negative is a hard error.
const NEG_EPS: f64 = 1e-15;

fn clamp_prob(p: f64) -> Result<f64, NoiseError> {
    if p < 0.0 {
        if p < -NEG_EPS {
            return Err(NoiseError::NegativeProbability { value: p });
        }
        return Ok(0.0);
    }
    Ok(p)
}

/// A single-qubit Pauli channel: probabilities over {I, X, Y, Z}.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PauliChannel1Q {
    p: [f64; 4],
}

impl PauliChannel1Q {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self, NoiseError> {
        let p = [
            clamp_prob(p_i)?,
            clamp_prob(p_x)?,
            clamp_prob(p_y)?,
            clamp_prob(p_z)?,
        ];
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(NoiseError::NotNormalized { sum });
        }
        Ok(Self { p })
    }

    pub fn identity() -> Self {
        Self { p: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn p_i(&self) -> f64 {
        self.p[0]
    }
    pub fn p_x(&self) -> f64 {
        self.p[1]
    }
    pub fn p_y(&self) -> f64 {
        self.p[2]
    }
    pub fn p_z(&self) -> f64 {
        self.p[3]
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    /// Total non-identity probability.
    pub fn error_rate(&self) -> f64 {
        self.p[1] + self.p[2] + self.p[3]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.gen();
        // Fast path: error rates here are usually small.
        let err = self.error_rate();
        if u >= err {
            return Pauli::I;
        }
        if u < self.p[1] {
            Pauli::X
        } else if u < self.p[1] + self.p[2] {
            Pauli::Y
        } else {
            Pauli::Z
        }
    }
}

/// A two-qubit Pauli channel: probabilities over the 16 pairs, indexed by
/// `first.index() * 4 + second.index()` in {I, X, Y, Z} order.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PauliChannel2Q {
    p: [f64; 16],
}

impl PauliChannel2Q {
    pub fn new(p: [f64; 16]) -> Result<Self, NoiseError> {
        let mut q = [0.0; 16];
        for (slot, &v) in q.iter_mut().zip(p.iter()) {
            *slot = clamp_prob(v)?;
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(NoiseError::NotNormalized { sum });
        }
        Ok(Self { p: q })
    }

    pub fn identity() -> Self {
        let mut p = [0.0; 16];
        p[0] = 1.0;
        Self { p }
    }

    pub fn prob(&self, first: Pauli, second: Pauli) -> f64 {
        self.p[first.index() * 4 + second.index()]
    }

    pub fn probs(&self) -> [f64; 16] {
        self.p
    }

    pub fn error_rate(&self) -> f64 {
        1.0 - self.p[0]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> (Pauli, Pauli) {
        let u: f64 = rng.gen();
        if u >= self.error_rate() {
            return (Pauli::I, Pauli::I);
        }
        let mut acc = 0.0;
        for k in 1..16 {
            acc += self.p[k];
            if u < acc {
                return (Pauli::ALL[k / 4], Pauli::ALL[k % 4]);
            }
        }
        (Pauli::Z, Pauli::Z)
    }

    /// Marginal channel on one side (0 = first qubit, 1 = second).
    pub fn marginal(&self, side: usize) -> PauliChannel1Q {
        let mut m = [0.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                let k = if side == 0 { a } else { b };
                m[k] += self.p[a * 4 + b];
            }
        }
        PauliChannel1Q { p: m }
    }
}

/// Symmetric depolarizing channel: each non-identity Pauli with p/3.
pub fn symmetric_depolarizing_1q(p: f64) -> Result<PauliChannel1Q, NoiseError> {
    check_unit("p", p)?;
    PauliChannel1Q::new(1.0 - p, p / 3.0, p / 3.0, p / 3.0)
}

/// Asymmetric depolarizing channel with independent X/Y/Z probabilities.
pub fn asymmetric_depolarizing_1q(
    p_x: f64,
    p_y: f64,
    p_z: f64,
) -> Result<PauliChannel1Q, NoiseError> {
    PauliChannel1Q::new(1.0 - p_x - p_y - p_z, p_x, p_y, p_z)
}

/// Two-qubit symmetric depolarizing channel: each of the 15 non-identity
/// pairs with p/15.
pub fn symmetric_depolarizing_2q(p: f64) -> Result<PauliChannel2Q, NoiseError> {
    check_unit("p", p)?;
    let mut probs = [p / 15.0; 16];
    probs[0] = 1.0 - p;
    PauliChannel2Q::new(probs)
}

/// Closed-form Pauli twirl of the combined damping channel for a location of
/// duration `t_ns`: p_x = p_y = (1 - e^{-t/T1})/4 and
/// p_z = (1 - e^{-t/T2})/2 - (1 - e^{-t/T1})/4.
pub fn pauli_twirl_from_times(
    t_ns: f64,
    t1_ns: f64,
    t2_ns: f64,
) -> Result<PauliChannel1Q, NoiseError> {
    if t_ns < 0.0 || t1_ns <= 0.0 || t2_ns <= 0.0 {
        return Err(NoiseError::BadDuration);
    }
    let p_xy = (1.0 - (-t_ns / t1_ns).exp()) / 4.0;
    let p_z = (1.0 - (-t_ns / t2_ns).exp()) / 2.0 - p_xy;
    let p_i = 1.0 - 2.0 * p_xy - p_z;
    PauliChannel1Q::new(p_i, p_xy, p_xy, p_z)
}

/// Expand a single-qubit twirl channel to two qubits under the independence
/// assumption: p_{A,B} = p_A p_B, with p_{I,I} taking the remainder.
pub fn two_qubit_twirl(ch: &PauliChannel1Q) -> PauliChannel2Q {
    let q = ch.probs();
    let mut p = [0.0; 16];
    let mut rest = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            if a == 0 && b == 0 {
                continue;
            }
            p[a * 4 + b] = q[a] * q[b];
            rest += p[a * 4 + b];
        }
    }
    p[0] = 1.0 - rest;
    PauliChannel2Q::new(p).expect("product channel is normalized by construction")
}

fn check_unit(name: &str, p: f64) -> Result<(), NoiseError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(NoiseError::ProbabilityOutOfRange {
            name: name.to_string(),
            value: p,
        });
    }
    Ok(())
}

/// A noise model assignment: which channel family applies at each circuit
/// location. Durations resolve against the location's timestep class; for
/// measurement locations errors apply before the measurement, for all other
/// location types after.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseModel {
    /// Every location fails with probability p: p/3 per Pauli on one-qubit
    /// locations, p/15 per pair on CNOTs.
    SymmetricDepolarizing { p: f64 },
    /// Independent X/Y/Z rates on one-qubit locations; CNOTs take the
    /// two-qubit product expansion.
    AsymmetricDepolarizing { p_x: f64, p_y: f64, p_z: f64 },
    /// Twirled damping: per-location Pauli rates from (t, T1, T2) with t the
    /// location's class duration and T2 from the preset ratio.
    PauliTwirl {
        t1_ns: f64,
        preset: ArchitecturePreset,
    },
    /// Exact amplitude-plus-phase damping with the same timing resolution.
    /// Requires the state-vector backend.
    AmplitudePhaseDamping {
        t1_ns: f64,
        preset: ArchitecturePreset,
    },
}

impl NoiseModel {
    pub fn is_pauli(&self) -> bool {
        !matches!(self, NoiseModel::AmplitudePhaseDamping { .. })
    }

    /// Short name for reports.
    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::SymmetricDepolarizing { .. } => "depolarizing",
            NoiseModel::AsymmetricDepolarizing { .. } => "asymmetric-depolarizing",
            NoiseModel::PauliTwirl { .. } => "twirl",
            NoiseModel::AmplitudePhaseDamping { .. } => "apd",
        }
    }

    /// Resolve to concrete per-duration-class channels.
    pub fn resolve(&self) -> Result<ResolvedNoise, NoiseError> {
        match self {
            NoiseModel::SymmetricDepolarizing { p } => {
                let one = symmetric_depolarizing_1q(*p)?;
                Ok(ResolvedNoise::Pauli(ResolvedPauli {
                    one_q: [one; 4],
                    two_q: symmetric_depolarizing_2q(*p)?,
                }))
            }
            NoiseModel::AsymmetricDepolarizing { p_x, p_y, p_z } => {
                let one = asymmetric_depolarizing_1q(*p_x, *p_y, *p_z)?;
                Ok(ResolvedNoise::Pauli(ResolvedPauli {
                    one_q: [one; 4],
                    two_q: two_qubit_twirl(&one),
                }))
            }
            NoiseModel::PauliTwirl { t1_ns, preset } => {
                let t2 = preset.t2_ns(*t1_ns);
                let chan = |class: DurationClass| {
                    pauli_twirl_from_times(preset.duration_ns(class), *t1_ns, t2)
                };
                let one_q = [
                    chan(DurationClass::P)?,
                    chan(DurationClass::H)?,
                    chan(DurationClass::C)?,
                    chan(DurationClass::M)?,
                ];
                let two_q = two_qubit_twirl(&one_q[DurationClass::C as usize]);
                Ok(ResolvedNoise::Pauli(ResolvedPauli { one_q, two_q }))
            }
            NoiseModel::AmplitudePhaseDamping { t1_ns, preset } => {
                let t2 = preset.t2_ns(*t1_ns);
                let params = |class: DurationClass| {
                    damping_params_from_times(preset.duration_ns(class), *t1_ns, t2)
                };
                Ok(ResolvedNoise::Damping(ResolvedDamping {
                    per_class: [
                        params(DurationClass::P)?,
                        params(DurationClass::H)?,
                        params(DurationClass::C)?,
                        params(DurationClass::M)?,
                    ],
                }))
            }
        }
    }
}

/// Pauli channels per duration class (indexed by `DurationClass as usize`)
/// plus the two-qubit channel for CNOT locations.
#[derive(Clone, Debug)]
pub struct ResolvedPauli {
    pub one_q: [PauliChannel1Q; 4],
    pub two_q: PauliChannel2Q,
}

impl ResolvedPauli {
    pub fn one_q(&self, class: DurationClass) -> &PauliChannel1Q {
        &self.one_q[class as usize]
    }
}

/// Damping parameters (p_ad, p_pd) per duration class.
#[derive(Clone, Debug)]
pub struct ResolvedDamping {
    pub per_class: [(f64, f64); 4],
}

impl ResolvedDamping {
    pub fn params(&self, class: DurationClass) -> (f64, f64) {
        self.per_class[class as usize]
    }
}

#[derive(Clone, Debug)]
pub enum ResolvedNoise {
    Pauli(ResolvedPauli),
    Damping(ResolvedDamping),
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn symmetric_depolarizing_examples() {
        let c = symmetric_depolarizing_1q(0.0).unwrap();
        assert_eq!(c.probs(), [1.0, 0.0, 0.0, 0.0]);
        let c = symmetric_depolarizing_1q(0.003).unwrap();
        assert_abs_diff_eq!(c.p_i(), 0.997, epsilon = 1e-15);
        assert_abs_diff_eq!(c.p_x(), 0.001, epsilon = 1e-15);
        let c = symmetric_depolarizing_1q(1.0).unwrap();
        assert_abs_diff_eq!(c.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.p_x(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(symmetric_depolarizing_1q(1.5).is_err());
    }

    #[test]
    fn symmetric_depolarizing_2q_examples() {
        let c = symmetric_depolarizing_2q(0.0).unwrap();
        assert_eq!(c.prob(Pauli::I, Pauli::I), 1.0);
        let c = symmetric_depolarizing_2q(0.15).unwrap();
        assert_abs_diff_eq!(c.prob(Pauli::X, Pauli::Z), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(c.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn twirl_closed_form_examples() {
        let c = pauli_twirl_from_times(0.0, 1000.0, 1000.0).unwrap();
        assert_eq!(c.probs(), [1.0, 0.0, 0.0, 0.0]);

        let c = pauli_twirl_from_times(100.0, 1000.0, 1000.0).unwrap();
        let expect = (1.0 - (-0.1f64).exp()) / 4.0;
        assert_abs_diff_eq!(c.p_x(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(c.p_y(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(c.p_z(), expect, epsilon = 1e-15);

        // At the T2 = 2 T1 boundary p_z stays nonnegative.
        for k in 1..=10 {
            let t = 100.0 * k as f64;
            let c = pauli_twirl_from_times(t, 1000.0, 2000.0).unwrap();
            assert!(c.p_z() >= 0.0);
        }
    }

    #[test]
    fn asymmetric_reduces_to_symmetric() {
        let p = 0.0042;
        let a = asymmetric_depolarizing_1q(p / 3.0, p / 3.0, p / 3.0).unwrap();
        let s = symmetric_depolarizing_1q(p).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(a.probs()[k], s.probs()[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn two_qubit_twirl_examples() {
        let id = PauliChannel1Q::identity();
        assert_eq!(two_qubit_twirl(&id).probs(), PauliChannel2Q::identity().probs());

        let ch = asymmetric_depolarizing_1q(0.01, 0.01, 0.01).unwrap();
        let two = two_qubit_twirl(&ch);
        assert_abs_diff_eq!(two.prob(Pauli::Z, Pauli::Z), 1e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(two.prob(Pauli::I, Pauli::Z), 0.0097, epsilon = 1e-18);
        assert_abs_diff_eq!(two.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_qubit_twirl_marginals_match_product_structure() {
        let ch = pauli_twirl_from_times(35.0, 10_000.0, 10_000.0).unwrap();
        let two = two_qubit_twirl(&ch);
        for side in 0..2 {
            let m = two.marginal(side);
            for k in 0..4 {
                assert_abs_diff_eq!(m.probs()[k], ch.probs()[k], epsilon = 1e-12);
            }
        }
    }

    /// Oracle equivalence: the numeric twirl of the composed damping channel
    /// matches the closed form over a grid of times and T2/T1 ratios.
    #[test]
    fn numeric_twirl_matches_closed_form_on_grid() {
        let t1 = 1000.0;
        for &ratio in &[0.1, 1.0, 2.0] {
            let t2 = ratio * t1;
            for k in 0..10 {
                let t = t1 * (k as f64 + 1.0) / 10.0;
                let kraus = combined_damping(t, t1, t2).unwrap();
                let numeric = twirl_numeric(&kraus).unwrap();
                let closed = pauli_twirl_from_times(t, t1, t2).unwrap();
                for i in 0..4 {
                    assert_abs_diff_eq!(
                        numeric.probs()[i],
                        closed.probs()[i],
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn resolve_twirl_uses_class_durations() {
        let preset = preset_by_name("SC_H").unwrap();
        let model = NoiseModel::PauliTwirl {
            t1_ns: 10_000.0,
            preset: preset.clone(),
        };
        let ResolvedNoise::Pauli(res) = model.resolve().unwrap() else {
            panic!("twirl resolves to Pauli channels");
        };
        let direct = pauli_twirl_from_times(20.0, 10_000.0, 10_000.0).unwrap();
        assert_eq!(res.one_q(DurationClass::C), &direct);
        let two = two_qubit_twirl(&direct);
        assert_eq!(res.two_q.probs(), two.probs());
        assert!(res.one_q(DurationClass::P).error_rate() > res.one_q(DurationClass::H).error_rate());
    }

    proptest! {
        #[test]
        fn channels_always_normalized(p in 0.0f64..=1.0) {
            let c1 = symmetric_depolarizing_1q(p).unwrap();
            prop_assert!((c1.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let c2 = symmetric_depolarizing_2q(p).unwrap();
            prop_assert!((c2.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn twirl_probabilities_valid(
            t in 0.0f64..2000.0,
            t1 in 100.0f64..100_000.0,
            ratio in 0.05f64..2.0,
        ) {
            let c = pauli_twirl_from_times(t, t1, ratio * t1).unwrap();
            for p in c.probs() {
                prop_assert!(p >= 0.0 && p <= 1.0);
            }
            prop_assert!((c.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sampling_respects_support(p in 0.0f64..=1.0, seed in 0u64..1000) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c = symmetric_depolarizing_1q(p).unwrap();
            let s = c.sample(&mut rng);
            if p == 0.0 {
                prop_assert_eq!(s, Pauli::I);
            }
        }
    }
}
