use surfsim::experiment::{run_until_m_failures, Backend, ExperimentConfig};
use surfsim::layout::LayoutKind;
use surfsim::noise::NoiseModel;
use surfsim::sim::EncodedState;

fn main() {
    for k in 0..9 {
        let p = 1e-4 * 10f64.powf(k as f64 / 4.0);
        let config = ExperimentConfig {
            layout: LayoutKind::Surface17,
            backend: Backend::Frame,
            model: NoiseModel::SymmetricDepolarizing { p },
            encoded: EncodedState::OneL,
            window: 3,
            m_target: 60,
            max_windows: 2_000_000,
            trial_cap: 2048,
            seed: 11,
            workers: 0,
        };
        let r = run_until_m_failures(&config).unwrap();
        println!(
            "p={:.3e}  P3={:.4e} (+-{:.1e})  m={} R={} censored={}",
            p, r.p_r, r.stderr, r.m, r.windows, r.censored
        );
    }
}
