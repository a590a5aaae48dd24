use super::config::{SweepAxis, SweepConfig, TrialConfig};
use crate::gmm::{Method, MixtureModel};

pub const PRESET_NAMES: [&str; 3] = ["fig1a", "fig1b", "fig3"];

const REPLICATES: usize = 20;

/// Built-in sweeps in `d = 2` with 1000 validation and 1000 test rows:
///
/// - `fig1a`: SNR from 0.5 to 3 at `n_l = 20`, `n_u = 2000`;
/// - `fig1b`: `n_u / n_l` from 1 to 350 at `s = 0.5`, `n_u = 7000`;
/// - `fig3`: `n_l` from 10 to 5000 at `s = 0.5`, `n_u = 10000`.
pub fn preset(name: &str) -> Option<SweepConfig> {
    let model = |s: f64| MixtureModel::along_first_axis(s, 2).expect("valid preset model");
    let spec = match name {
        "fig1a" => SweepConfig {
            trial: TrialConfig::new(
                model(1.0),
                20,
                2000,
                vec![Method::Sl, Method::UlPlus, Method::SslS, Method::SslW, Method::SelfTrain],
            ),
            axis: SweepAxis::Snr,
            grid: vec![0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0],
            replicates: REPLICATES,
        },
        "fig1b" => SweepConfig {
            trial: TrialConfig::new(
                model(0.5),
                20,
                7000,
                vec![Method::Sl, Method::UlPlus, Method::SslS, Method::SslW, Method::SelfTrain],
            ),
            axis: SweepAxis::Ratio,
            grid: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 350.0],
            replicates: REPLICATES,
        },
        "fig3" => SweepConfig {
            trial: TrialConfig::new(
                model(0.5),
                10,
                10_000,
                vec![Method::Sl, Method::UlPlus, Method::SslS, Method::SslW],
            ),
            axis: SweepAxis::NLabeled,
            grid: vec![10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0],
            replicates: REPLICATES,
        },
        _ => return None,
    };
    Some(spec)
}
