//! Encoded-versus-unencoded break-even classification: for each relaxation
//! time, compare the encoded per-window logical rate against the decay
//! probability of a bare qubit held in memory for a grid of durations.

use super::{
    run_until_m_failures, unencoded_error_probability, ExperimentConfig, ExperimentError,
    RunResult, UnencodedBasis,
};
use crate::layout::build_layout;
use crate::noise::NoiseModel;
use crate::schedule::{build_round_circuit, round_duration_ns};
use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellClass {
    EncodedBetter,
    UnencodedBetter,
    /// The unencoded probability lies within the encoded two-sigma band.
    Inconclusive,
}

impl CellClass {
    pub fn name(self) -> &'static str {
        match self {
            CellClass::EncodedBetter => "encoded-better",
            CellClass::UnencodedBetter => "unencoded-better",
            CellClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakEvenCell {
    pub duration_ns: f64,
    pub unencoded_p: f64,
    pub class: CellClass,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakEvenRow {
    pub t1_ns: f64,
    pub t2_ns: f64,
    /// Time the encoded qubit spends per decode window.
    pub window_ns: f64,
    pub encoded: RunResult,
    pub cells: Vec<BreakEvenCell>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakEvenMap {
    pub preset: String,
    pub model: String,
    pub species: char,
    pub rows: Vec<BreakEvenRow>,
}

/// Replace the relaxation time inside a twirl or damping model.
pub fn with_t1(model: &NoiseModel, t1: f64) -> Result<NoiseModel, ExperimentError> {
    match model {
        NoiseModel::PauliTwirl { preset, .. } => Ok(NoiseModel::PauliTwirl {
            t1_ns: t1,
            preset: preset.clone(),
        }),
        NoiseModel::AmplitudePhaseDamping { preset, .. } => {
            Ok(NoiseModel::AmplitudePhaseDamping {
                t1_ns: t1,
                preset: preset.clone(),
            })
        }
        _ => Err(ExperimentError::BadConfig(
            "break-even analysis needs a timed noise model (twirl or apd)".into(),
        )),
    }
}

/// Classify one cell against the encoded estimate.
pub fn classify(encoded: &RunResult, unencoded_p: f64) -> CellClass {
    let p = encoded.quotable_rate();
    if (unencoded_p - p).abs() <= 2.0 * encoded.stderr {
        CellClass::Inconclusive
    } else if unencoded_p > p {
        CellClass::EncodedBetter
    } else {
        CellClass::UnencodedBetter
    }
}

/// The memory duration at which the unencoded probability rises to the
/// encoded rate; None when the rate is unreachable (phase basis saturates
/// at 1/2).
pub fn crossing_duration_ns(
    encoded_p: f64,
    t1_ns: f64,
    t2_ns: f64,
    basis: UnencodedBasis,
) -> Option<f64> {
    match basis {
        UnencodedBasis::Amplitude => {
            (encoded_p < 1.0).then(|| -t1_ns * (1.0 - encoded_p).ln())
        }
        UnencodedBasis::Phase => {
            (encoded_p < 0.5).then(|| -t2_ns * (1.0 - 2.0 * encoded_p).ln())
        }
    }
}

/// Build the classification map over a T1 grid and duration grid. The
/// template's model carries the preset; its T1 is overridden per row.
pub fn break_even_map(
    template: &ExperimentConfig,
    t1_grid_ns: &[f64],
    duration_grid_ns: &[f64],
) -> Result<BreakEvenMap, ExperimentError> {
    let (preset, model_name) = match &template.model {
        NoiseModel::PauliTwirl { preset, .. } => (preset.clone(), "twirl"),
        NoiseModel::AmplitudePhaseDamping { preset, .. } => (preset.clone(), "apd"),
        _ => {
            return Err(ExperimentError::BadConfig(
                "break-even analysis needs a timed noise model (twirl or apd)".into(),
            ))
        }
    };
    let basis = match template.encoded.species() {
        'X' => UnencodedBasis::Amplitude,
        _ => UnencodedBasis::Phase,
    };
    let layout = build_layout(template.layout);
    let window_ns =
        template.window as f64 * round_duration_ns(&build_round_circuit(&layout), &preset);

    let mut rows = Vec::new();
    for (k, &t1) in t1_grid_ns.iter().enumerate() {
        let mut config = template.clone();
        config.model = with_t1(&template.model, t1)?;
        config.seed = template
            .seed
            .wrapping_add((k as u64 + 1).wrapping_mul(0x517C_C1B7_2722_0A95));
        let encoded = run_until_m_failures(&config)?;
        let t2 = preset.t2_ns(t1);
        let cells = duration_grid_ns
            .iter()
            .map(|&d| {
                let unencoded_p = unencoded_error_probability(d, t1, t2, basis);
                BreakEvenCell {
                    duration_ns: d,
                    unencoded_p,
                    class: classify(&encoded, unencoded_p),
                }
            })
            .collect();
        rows.push(BreakEvenRow {
            t1_ns: t1,
            t2_ns: t2,
            window_ns,
            encoded,
            cells,
        });
    }
    Ok(BreakEvenMap {
        preset: preset.name.clone(),
        model: model_name.to_string(),
        species: template.encoded.species(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Backend;
    use crate::layout::LayoutKind;
    use crate::noise::preset_by_name;
    use crate::sim::EncodedState;

    #[test]
    fn classification_respects_error_band() {
        let encoded = RunResult {
            m: 100,
            windows: 10_000,
            p_r: 0.01,
            stderr: 0.001,
            censored: false,
            p_r_upper: 0.0101,
            seed: 0,
            wall_ms: 0,
        };
        assert_eq!(classify(&encoded, 0.05), CellClass::EncodedBetter);
        assert_eq!(classify(&encoded, 0.001), CellClass::UnencodedBetter);
        assert_eq!(classify(&encoded, 0.0105), CellClass::Inconclusive);
    }

    #[test]
    fn crossing_durations_invert_the_decay_laws() {
        let t = crossing_duration_ns(0.1, 1000.0, 1000.0, UnencodedBasis::Amplitude).unwrap();
        let back = unencoded_error_probability(t, 1000.0, 1000.0, UnencodedBasis::Amplitude);
        assert!((back - 0.1).abs() < 1e-12);
        assert!(crossing_duration_ns(0.6, 1000.0, 1000.0, UnencodedBasis::Phase).is_none());
    }

    #[test]
    fn map_rows_cover_grids() {
        let preset = preset_by_name("SC_H").unwrap();
        let template = ExperimentConfig {
            layout: LayoutKind::Surface17,
            backend: Backend::Frame,
            model: NoiseModel::PauliTwirl {
                t1_ns: 0.0,
                preset,
            },
            encoded: EncodedState::OneL,
            window: 3,
            m_target: 10,
            max_windows: 20_000,
            trial_cap: 128,
            seed: 9,
            workers: 0,
        };
        let map = break_even_map(&template, &[1000.0, 2000.0], &[50.0, 150.0, 400.0]).unwrap();
        assert_eq!(map.rows.len(), 2);
        assert_eq!(map.rows[0].cells.len(), 3);
        assert_eq!(map.species, 'X');
        // Longer memory durations only push the comparison toward the
        // encoded side.
        for row in &map.rows {
            let mut last = 0.0;
            for c in &row.cells {
                assert!(c.unencoded_p >= last);
                last = c.unencoded_p;
            }
        }
    }
}
