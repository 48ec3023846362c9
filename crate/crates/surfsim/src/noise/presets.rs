//! Architecture parameter presets: gate durations and the T2/T1 ratio for
//! four superconducting and two ion-trap settings.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Gate and idle duration classes. Every timestep of a scheduled round has
/// exactly one class; identity locations inherit their timestep's class.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DurationClass {
    /// State preparation.
    P,
    /// Single-qubit gate.
    H,
    /// Two-qubit gate.
    C,
    /// Measurement.
    M,
}

impl DurationClass {
    pub const ALL: [DurationClass; 4] = [
        DurationClass::P,
        DurationClass::H,
        DurationClass::C,
        DurationClass::M,
    ];
}

impl fmt::Display for DurationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            DurationClass::P => 'P',
            DurationClass::H => 'H',
            DurationClass::C => 'C',
            DurationClass::M => 'M',
        };
        write!(f, "{c}")
    }
}

/// One architecture setting: operation durations in nanoseconds and the
/// dephasing-to-relaxation ratio. T1 itself is the experiment sweep variable;
/// T2 is resolved as `t2_over_t1 * T1` at run time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitecturePreset {
    pub name: String,
    pub t2_over_t1: f64,
    pub t_prep_ns: f64,
    pub t_1q_ns: f64,
    pub t_meas_ns: f64,
    pub t_cnot_ns: f64,
}

impl ArchitecturePreset {
    pub fn duration_ns(&self, class: DurationClass) -> f64 {
        match class {
            DurationClass::P => self.t_prep_ns,
            DurationClass::H => self.t_1q_ns,
            DurationClass::C => self.t_cnot_ns,
            DurationClass::M => self.t_meas_ns,
        }
    }

    pub fn t2_ns(&self, t1_ns: f64) -> f64 {
        self.t2_over_t1 * t1_ns
    }

    fn new(name: &str, t2_over_t1: f64, prep: f64, one_q: f64, meas: f64, cnot: f64) -> Self {
        Self {
            name: name.to_string(),
            t2_over_t1,
            t_prep_ns: prep,
            t_1q_ns: one_q,
            t_meas_ns: meas,
            t_cnot_ns: cnot,
        }
    }
}

const US: f64 = 1000.0;

/// The six built-in architecture settings.
pub fn builtin_presets() -> Vec<ArchitecturePreset> {
    vec![
        ArchitecturePreset::new("SC_S", 1.0, 5.0 * US, 100.0, 5.0 * US, 1.0 * US),
        ArchitecturePreset::new("SC_F", 1.0, 1.0 * US, 10.0, 1.0 * US, 100.0),
        ArchitecturePreset::new("SC_D", 2.0, 40.0, 5.0, 35.0, 80.0),
        ArchitecturePreset::new("SC_H", 1.0, 40.0, 5.0, 35.0, 20.0),
        ArchitecturePreset::new("IT_S", 0.1, 100.0 * US, 1.0 * US, 100.0 * US, 100.0 * US),
        ArchitecturePreset::new("IT_F", 0.1, 30.0 * US, 1.0 * US, 30.0 * US, 10.0 * US),
    ]
}

/// Look up a built-in preset by name (case-insensitive).
pub fn preset_by_name(name: &str) -> Option<ArchitecturePreset> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}

/// Serialize presets as a JSON document mapping name to parameters.
pub fn presets_to_json(presets: &[ArchitecturePreset]) -> String {
    let map: serde_json::Map<String, serde_json::Value> = presets
        .iter()
        .map(|p| {
            (
                p.name.clone(),
                serde_json::json!({
                    "t2_over_t1": p.t2_over_t1,
                    "t_prep_ns": p.t_prep_ns,
                    "t_1q_ns": p.t_1q_ns,
                    "t_meas_ns": p.t_meas_ns,
                    "t_cnot_ns": p.t_cnot_ns,
                }),
            )
        })
        .collect();
    serde_json::to_string_pretty(&map).expect("preset serialization cannot fail")
}

/// Load presets from the same JSON schema `presets_to_json` emits.
pub fn presets_from_json(doc: &str) -> Result<Vec<ArchitecturePreset>, serde_json::Error> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Params {
        t2_over_t1: f64,
        t_prep_ns: f64,
        t_1q_ns: f64,
        t_meas_ns: f64,
        t_cnot_ns: f64,
    }
    let map: std::collections::BTreeMap<String, Params> = serde_json::from_str(doc)?;
    Ok(map
        .into_iter()
        .map(|(name, p)| ArchitecturePreset {
            name,
            t2_over_t1: p.t2_over_t1,
            t_prep_ns: p.t_prep_ns,
            t_1q_ns: p.t_1q_ns,
            t_meas_ns: p.t_meas_ns,
            t_cnot_ns: p.t_cnot_ns,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_values() {
        let ps = builtin_presets();
        assert_eq!(ps.len(), 6);
        let sch = preset_by_name("SC_H").unwrap();
        assert_eq!(sch.t_cnot_ns, 20.0);
        assert_eq!(sch.t_prep_ns, 40.0);
        assert_eq!(sch.t_meas_ns, 35.0);
        assert_eq!(sch.t_1q_ns, 5.0);
        assert_eq!(sch.t2_over_t1, 1.0);

        let itf = preset_by_name("it_f").unwrap();
        assert_eq!(itf.t_meas_ns, 30_000.0);
        let scd = preset_by_name("SC_D").unwrap();
        assert_eq!(scd.t2_over_t1, 2.0);
        let its = preset_by_name("IT_S").unwrap();
        assert_eq!(its.t2_over_t1, 0.1);
        assert_eq!(its.t2_ns(1000.0), 100.0);
        for p in &ps {
            for class in DurationClass::ALL {
                assert!(p.duration_ns(class) > 0.0);
            }
            // Physicality: derived T2 never exceeds 2 T1.
            assert!(p.t2_over_t1 <= 2.0);
        }
    }

    #[test]
    fn preset_json_round_trip() {
        let ps = builtin_presets();
        let doc = presets_to_json(&ps);
        let back = presets_from_json(&doc).unwrap();
        for p in &ps {
            let q = back.iter().find(|q| q.name == p.name).unwrap();
            assert_eq!(p, q);
        }
        assert!(presets_from_json("{\"bad\": {\"nope\": 1}}").is_err());
    }
}
