//! Pseudothreshold estimation: the crossing of the logical error rate with
//! the physical location error rate, located on a log-spaced depolarizing
//! sweep and refined by bisection.

use super::{
    round_rate_from_window_rate, run_until_m_failures, ExperimentConfig, ExperimentError,
    RunResult, WindowRelation,
};
use crate::noise::NoiseModel;
use serde::{Deserialize, Serialize};

/// One sweep point: the location error rate, the windowed estimate, and the
/// per-round rate derived through the window relation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub result: RunResult,
    pub p1: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Crossing of y(p) = p, with y the per-round or per-window rate.
    pub crossing: f64,
    /// Two-sigma interval propagated from the Monte-Carlo error bars.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub per_round: bool,
    pub curve: Vec<CurvePoint>,
}

/// Points per decade in the search grid.
const PER_DECADE: usize = 6;

/// Find the pseudothreshold for the template's layout. The template's noise
/// model must be symmetric depolarizing (its p is overridden per grid
/// point); `prior` seeds the grid around the expected crossing.
pub fn find_pseudothreshold(
    template: &ExperimentConfig,
    per_round: bool,
    prior: f64,
) -> Result<ThresholdResult, ExperimentError> {
    if !matches!(template.model, NoiseModel::SymmetricDepolarizing { .. }) {
        return Err(ExperimentError::BadConfig(
            "threshold search sweeps the symmetric depolarizing strength".into(),
        ));
    }
    let mut curve: Vec<CurvePoint> = Vec::new();
    let mut grid = log_grid(prior / 10.0, prior * 10.0);
    run_points(template, &grid, &mut curve)?;

    let mut bracket = find_bracket(&curve, per_round);
    if bracket.is_none() {
        // Expand the search one decade on each side, once.
        let mut wider = log_grid(prior / 100.0, prior / 10.0);
        wider.pop();
        let mut upper = log_grid(prior * 10.0, prior * 100.0);
        upper.remove(0);
        wider.extend(upper);
        grid.extend(wider.iter().copied());
        run_points(template, &wider, &mut curve)?;
        curve.sort_by(|a, b| a.p.total_cmp(&b.p));
        bracket = find_bracket(&curve, per_round);
    }
    let (mut lo, mut hi) = bracket.ok_or(ExperimentError::NoBracket)?;

    // Up to two bisection refinements in log space.
    for _ in 0..2 {
        let p_mid = (lo.0.ln() * 0.5 + hi.0.ln() * 0.5).exp();
        let pt = run_point(template, p_mid, curve.len())?;
        let f_mid = excess(&pt, per_round);
        let entry = (p_mid, f_mid, sigma_f(&pt, per_round));
        if f_mid < 0.0 {
            lo = entry;
        } else {
            hi = entry;
        }
        curve.push(pt);
    }
    curve.sort_by(|a, b| a.p.total_cmp(&b.p));

    // Log-log interpolation of the zero of f = ln(y/p) across the bracket.
    let (x_lo, f_lo, s_lo) = (lo.0.ln(), lo.1, lo.2);
    let (x_hi, f_hi, s_hi) = (hi.0.ln(), hi.1, hi.2);
    let slope = (f_hi - f_lo) / (x_hi - x_lo);
    let x_star = x_lo - f_lo / slope;
    let sigma_x = (s_lo.max(s_hi)) / slope.abs();
    Ok(ThresholdResult {
        crossing: x_star.exp(),
        ci_lo: (x_star - 2.0 * sigma_x).exp(),
        ci_hi: (x_star + 2.0 * sigma_x).exp(),
        per_round,
        curve,
    })
}

fn log_grid(lo: f64, hi: f64) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * PER_DECADE as f64).round() as usize;
    (0..=n)
        .map(|k| lo * 10f64.powf(k as f64 * decades / n as f64))
        .collect()
}

fn run_points(
    template: &ExperimentConfig,
    grid: &[f64],
    curve: &mut Vec<CurvePoint>,
) -> Result<(), ExperimentError> {
    for (k, &p) in grid.iter().enumerate() {
        curve.push(run_point(template, p, curve.len() + k)?);
    }
    Ok(())
}

fn run_point(
    template: &ExperimentConfig,
    p: f64,
    index: usize,
) -> Result<CurvePoint, ExperimentError> {
    let mut config = template.clone();
    config.model = NoiseModel::SymmetricDepolarizing { p };
    config.seed = template
        .seed
        .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let result = run_until_m_failures(&config)?;
    let p1 = round_rate_from_window_rate(
        result.quotable_rate(),
        config.window,
        WindowRelation::Corrected,
    )?;
    Ok(CurvePoint { p, result, p1 })
}

/// The rate the crossing is sought on.
fn rate(point: &CurvePoint, per_round: bool) -> f64 {
    if per_round {
        point.p1
    } else {
        point.result.quotable_rate()
    }
}

/// f = ln(y / p); negative below the pseudothreshold.
fn excess(point: &CurvePoint, per_round: bool) -> f64 {
    let y = rate(point, per_round);
    if y <= 0.0 {
        f64::NEG_INFINITY
    } else {
        (y / point.p).ln()
    }
}

/// Standard error of f at a point, i.e. the relative error of y.
fn sigma_f(point: &CurvePoint, per_round: bool) -> f64 {
    let y = rate(point, per_round);
    if y <= 0.0 {
        return f64::INFINITY;
    }
    let p3 = point.result.quotable_rate();
    if per_round {
        // Propagate through the inversion by finite differences.
        let sigma = point.result.stderr.max(p3 * 1e-6);
        let up = round_rate_from_window_rate((p3 + sigma).min(1.0), 3, WindowRelation::Corrected)
            .unwrap_or(y);
        let dn = round_rate_from_window_rate((p3 - sigma).max(0.0), 3, WindowRelation::Corrected)
            .unwrap_or(y);
        ((up - dn) / 2.0 / y).abs()
    } else {
        point.result.stderr / p3
    }
}

type BracketPoint = (f64, f64, f64);

/// The bracketing pair around the sign change of f, as (p, f, sigma_f).
fn find_bracket(curve: &[CurvePoint], per_round: bool) -> Option<(BracketPoint, BracketPoint)> {
    for w in curve.windows(2) {
        let f0 = excess(&w[0], per_round);
        let f1 = excess(&w[1], per_round);
        if f0 < 0.0 && f1 >= 0.0 && f0.is_finite() {
            return Some((
                (w[0].p, f0, sigma_f(&w[0], per_round)),
                (w[1].p, f1, sigma_f(&w[1], per_round)),
            ));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Backend;
    use crate::layout::LayoutKind;
    use crate::sim::EncodedState;

    #[test]
    fn grid_is_log_spaced() {
        let g = log_grid(1e-4, 1e-2);
        assert_eq!(g.len(), 13);
        assert!((g[0] - 1e-4).abs() < 1e-12);
        assert!((g[12] - 1e-2).abs() < 1e-10);
        let ratio = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] / ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn finds_surface17_crossing_with_small_budget() {
        // Smoke-level budget; the acceptance suite runs the full version.
        let template = ExperimentConfig {
            layout: LayoutKind::Surface17,
            backend: Backend::Frame,
            model: NoiseModel::SymmetricDepolarizing { p: 0.0 },
            encoded: EncodedState::OneL,
            window: 3,
            m_target: 40,
            max_windows: 3_000_000,
            trial_cap: 2048,
            seed: 7,
            workers: 0,
        };
        let res = find_pseudothreshold(&template, true, 8e-4).unwrap();
        assert!(
            res.crossing > 2e-4 && res.crossing < 3.2e-3,
            "crossing {} outside loose sanity range",
            res.crossing
        );
        assert!(res.ci_lo < res.crossing && res.crossing < res.ci_hi);
        assert!(res.curve.len() >= 13);
    }
}
