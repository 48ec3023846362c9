//! Kraus-operator channels on one qubit: amplitude and phase damping, their
//! composition, and a numeric Pauli-twirling oracle built from the channel's
//! Pauli transfer matrix.

use super::{NoiseError, PauliChannel1Q};
use num_complex::Complex64;

type C = Complex64;

/// A 2x2 complex matrix, row-major.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[C::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Mat2 {
        Mat2([
            [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ])
    }

    pub fn pauli(idx: usize) -> Mat2 {
        let o = C::new(0.0, 0.0);
        let l = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        match idx {
            0 => Mat2::identity(),
            1 => Mat2([[o, l], [l, o]]),
            2 => Mat2([[o, -i], [i, o]]),
            3 => Mat2([[l, o], [o, -l]]),
            _ => panic!("Pauli index out of range"),
        }
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] *= s;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

/// A single-qubit channel in operator-sum form.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<Mat2>,
}

impl KrausChannel {
    /// Build a channel, checking trace preservation to 1e-12.
    pub fn new(operators: Vec<Mat2>) -> Result<Self, NoiseError> {
        let mut sum = Mat2::ZERO;
        for e in &operators {
            sum = sum.add(&e.adjoint().mul(e));
        }
        let id = Mat2::identity();
        for r in 0..2 {
            for c in 0..2 {
                if (sum.0[r][c] - id.0[r][c]).norm() > 1e-12 {
                    return Err(NoiseError::NotTracePreserving);
                }
            }
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.operators
    }

    /// Compose two channels: `second` applied after `self`.
    pub fn then(&self, second: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::with_capacity(self.operators.len() * second.operators.len());
        for f in &second.operators {
            for e in &self.operators {
                ops.push(f.mul(e));
            }
        }
        KrausChannel { operators: ops }
    }

    /// Apply the channel to a density matrix.
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for e in &self.operators {
            out = out.add(&e.mul(rho).mul(&e.adjoint()));
        }
        out
    }
}

/// Amplitude damping with photon-emission probability `p_ad`.
pub fn amplitude_damping(p_ad: f64) -> Result<KrausChannel, NoiseError> {
    check_prob("p_ad", p_ad)?;
    let o = C::new(0.0, 0.0);
    let e1 = Mat2([
        [C::new(1.0, 0.0), o],
        [o, C::new((1.0 - p_ad).sqrt(), 0.0)],
    ]);
    let e2 = Mat2([[o, C::new(p_ad.sqrt(), 0.0)], [o, o]]);
    KrausChannel::new(vec![e1, e2])
}

/// Phase damping with scattering probability `p_pd`.
pub fn phase_damping(p_pd: f64) -> Result<KrausChannel, NoiseError> {
    check_prob("p_pd", p_pd)?;
    let o = C::new(0.0, 0.0);
    let e1 = Mat2([
        [C::new(1.0, 0.0), o],
        [o, C::new((1.0 - p_pd).sqrt(), 0.0)],
    ]);
    let e2 = Mat2([[o, o], [o, C::new(p_pd.sqrt(), 0.0)]]);
    KrausChannel::new(vec![e1, e2])
}

/// The phase-flip probability equivalent to phase damping `p_pd`.
pub fn pz_from_ppd(p_pd: f64) -> f64 {
    (1.0 - (1.0 - p_pd).sqrt()) / 2.0
}

/// Damping parameters for a location of duration `t_ns` given relaxation and
/// dephasing times: `p_ad = 1 - exp(-t/T1)` and
/// `p_pd = 1 - exp(-2t/T2 + t/T1)`.
pub fn damping_params_from_times(
    t_ns: f64,
    t1_ns: f64,
    t2_ns: f64,
) -> Result<(f64, f64), NoiseError> {
    if t_ns < 0.0 || t1_ns <= 0.0 || t2_ns <= 0.0 {
        return Err(NoiseError::BadDuration);
    }
    if t2_ns > 2.0 * t1_ns + 1e-9 * t1_ns {
        return Err(NoiseError::Unphysical {
            t2_ns,
            t1_ns,
        });
    }
    let p_ad = 1.0 - (-t_ns / t1_ns).exp();
    let mut p_pd = 1.0 - (-2.0 * t_ns / t2_ns + t_ns / t1_ns).exp();
    if p_pd < 0.0 {
        if p_pd < -1e-12 {
            return Err(NoiseError::Unphysical { t2_ns, t1_ns });
        }
        p_pd = 0.0;
    }
    Ok((p_ad, p_pd))
}

/// The combined amplitude-then-phase damping channel for a location of
/// duration `t_ns`.
pub fn combined_damping(t_ns: f64, t1_ns: f64, t2_ns: f64) -> Result<KrausChannel, NoiseError> {
    let (p_ad, p_pd) = damping_params_from_times(t_ns, t1_ns, t2_ns)?;
    Ok(amplitude_damping(p_ad)?.then(&phase_damping(p_pd)?))
}

/// Numerically twirl a channel: average the superoperator conjugated by each
/// Pauli and read the Pauli probabilities off the diagonal of the resulting
/// Pauli transfer matrix. Serves as the independent oracle for the
/// closed-form twirl probabilities.
pub fn twirl_numeric(channel: &KrausChannel) -> Result<PauliChannel1Q, NoiseError> {
    // Pauli transfer matrix of the input: R[a][b] = Tr[P_a eps(P_b)] / 2.
    let mut ptm = [[0.0f64; 4]; 4];
    for b in 0..4 {
        let out = channel.apply(&Mat2::pauli(b));
        for (a, row) in ptm.iter_mut().enumerate() {
            let val = Mat2::pauli(a).mul(&out).trace();
            if val.im.abs() > 1e-12 {
                return Err(NoiseError::NotTracePreserving);
            }
            row[b] = val.re / 2.0;
        }
    }
    // Conjugating by Pauli A maps the PTM to D_A R D_A with D_A the diagonal
    // of signs s_A(P) = +1 if A and P commute else -1. Averaging over the four
    // conjugations zeroes every entry where the sign patterns differ, leaving
    // the diagonal.
    let mut avg = [[0.0f64; 4]; 4];
    for a in 0..4 {
        let sign = |p: usize| -> f64 {
            // Single-qubit Paulis commute iff equal or either is identity.
            if a == 0 || p == 0 || a == p {
                1.0
            } else {
                -1.0
            }
        };
        for (r, row) in ptm.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                avg[r][c] += 0.25 * sign(r) * v * sign(c);
            }
        }
    }
    // Diagonal PTM entries map to Pauli probabilities by the 4x4 Walsh
    // transform: p_Q = (1/4) sum_P s_Q(P) R_PP.
    let r = [avg[0][0], avg[1][1], avg[2][2], avg[3][3]];
    let p_i = (r[0] + r[1] + r[2] + r[3]) / 4.0;
    let p_x = (r[0] + r[1] - r[2] - r[3]) / 4.0;
    let p_y = (r[0] - r[1] + r[2] - r[3]) / 4.0;
    let p_z = (r[0] - r[1] - r[2] + r[3]) / 4.0;
    PauliChannel1Q::new(p_i, p_x, p_y, p_z)
}

fn check_prob(name: &str, p: f64) -> Result<(), NoiseError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(NoiseError::ProbabilityOutOfRange {
            name: name.to_string(),
            value: p,
        });
    }
    Ok(())
}
