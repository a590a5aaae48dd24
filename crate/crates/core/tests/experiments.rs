mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{chi_mean, normal_vec, test_rng};
use ssl_gmm::estimators::oracle_weight;
use ssl_gmm::experiments::{
    error_gap, preset, run_sweep, run_sweep_with_threads, run_trial, scaling_fit, switching_point_oracle, Metric,
    RunningStats, SweepAxis, SweepConfig, TrialConfig,
};
use ssl_gmm::gmm::{Method, MixtureModel};
use ssl_gmm::theory::oracle_gap;

fn quiet(mut cfg: TrialConfig, seed: u64) -> TrialConfig {
    cfg.n_val = 0;
    cfg.n_test = 0;
    cfg.base_seed = seed;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn welford_is_order_free_to_rounding(mut xs in prop::collection::vec(-1e3f64..1e3, 1..60), seed in any::<u64>()) {
        let forward: RunningStats = xs.iter().copied().collect();
        let mut rng = test_rng(seed);
        for i in (1..xs.len()).rev() {
            xs.swap(i, rng.random_range(0..=i));
        }
        let shuffled: RunningStats = xs.iter().copied().collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        prop_assert!((forward.mean() - mean).abs() <= 1e-9);
        prop_assert!((forward.mean() - shuffled.mean()).abs() <= 1e-9);
        prop_assert!((forward.std() - shuffled.std()).abs() <= 1e-8);
        prop_assert!(forward.std() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sweeps_are_reproducible_across_worker_counts(seed in any::<u64>(), threads in 1usize..6) {
        let model = MixtureModel::along_first_axis(1.0, 2).unwrap();
        let mut trial = TrialConfig::new(model, 10, 300, vec![Method::Sl, Method::UlPlus, Method::SslS, Method::SslW]);
        trial.n_val = 100;
        trial.n_test = 100;
        trial.base_seed = seed;
        let spec = SweepConfig { trial, axis: SweepAxis::Snr, grid: vec![0.5, 1.5], replicates: 3 };
        let one = run_sweep_with_threads(&spec, Some(1)).unwrap();
        let many = run_sweep_with_threads(&spec, Some(threads)).unwrap();
        prop_assert_eq!(&one, &many);
        prop_assert_eq!(one, run_sweep(&spec).unwrap());
    }

    #[test]
    fn trials_are_deterministic_and_well_formed(seed in any::<u64>(), idx in 0u64..1000) {
        let model = MixtureModel::along_first_axis(1.0, 2).unwrap();
        let mut cfg = TrialConfig::new(model, 20, 200, vec![Method::Sl, Method::UlPlus, Method::SelfTrain]).with_seed(seed);
        cfg.n_val = 100;
        cfg.n_test = 100;
        let a = run_trial(&cfg, idx).unwrap();
        prop_assert_eq!(&a, &run_trial(&cfg, idx).unwrap());
        for r in &a.records {
            let m = r.outcome.as_ref().unwrap();
            prop_assert!(m.excess >= 0.0);
            let t = m.test_error.unwrap();
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }
}

#[test]
fn sl_mean_error_matches_chi_mean() {
    let model = MixtureModel::along_first_axis(1.0, 20).unwrap();
    let spec = SweepConfig {
        trial: quiet(TrialConfig::new(model, 100, 0, vec![Method::Sl]), 20),
        axis: SweepAxis::NLabeled,
        grid: vec![100.0],
        replicates: 200,
    };
    let mean = run_sweep(&spec).unwrap().row(100.0, Method::Sl).unwrap().mean_estimation;
    let target = chi_mean(20) / 10.0;
    assert!((mean - target).abs() / target <= 0.05, "{mean} vs {target}");
    assert!(mean <= (20.0f64 / 100.0).sqrt(), "{mean}");
}

#[test]
fn harmonic_combination_and_gap_identity() {
    let mut rng = test_rng(808);
    let d = 4;
    let n_l = 16.0;
    let star = normal_vec(&mut rng, d);
    // Unbiased estimators with per-coordinate variances chosen so MSE1 = d/n_l = 0.25.
    let mse1 = d as f64 / n_l;
    let mse2 = 0.75;
    let w = oracle_weight(mse1, mse2).unwrap().t;
    let trials = 100_000;
    let (mut e1, mut e2, mut ec) = (0.0, 0.0, 0.0);
    for _ in 0..trials {
        let a = &star + &(normal_vec(&mut rng, d) / n_l.sqrt());
        let b = &star + &(normal_vec(&mut rng, d) * (mse2 / d as f64).sqrt());
        let c = &a * w + &b * (1.0 - w);
        let sq = |v: &ndarray::Array1<f64>| (v - &star).mapv(|x| x * x).sum();
        e1 += sq(&a);
        e2 += sq(&b);
        ec += sq(&c);
    }
    let (e1, e2, ec) = (e1 / trials as f64, e2 / trials as f64, ec / trials as f64);
    let (gap, combined) = oracle_gap(mse1, mse2).unwrap();
    assert!((ec - combined).abs() / combined <= 0.05, "{ec} vs {combined}");
    let r = e1 / e2;
    let measured_gap = e1.min(e2) - ec;
    assert!((measured_gap - r.min(1.0 / r) * ec).abs() / gap <= 0.05, "{measured_gap} vs {gap}");
}

#[test]
fn wrong_sign_is_rare_with_many_labels() {
    let model = MixtureModel::along_first_axis(1.0, 5).unwrap();
    let cfg = quiet(TrialConfig::new(model, 200, 5000, vec![Method::Ul, Method::UlPlus]), 21);
    let correct = (0..500)
        .filter(|&i| !run_trial(&cfg, i).unwrap().metrics(Method::UlPlus).unwrap().wrong_sign.unwrap())
        .count();
    assert!(correct >= 495, "{correct} / 500");
}

#[test]
fn sign_errors_do_not_grow_with_labels() {
    let model = MixtureModel::along_first_axis(1.0, 5).unwrap();
    let rate = |n_l: usize| {
        let cfg = quiet(TrialConfig::new(model.clone(), n_l, 5000, vec![Method::UlPlus]), 22);
        let wrong = (0..500)
            .filter(|&i| run_trial(&cfg, i).unwrap().metrics(Method::UlPlus).unwrap().wrong_sign.unwrap())
            .count();
        wrong as f64 / 500.0
    };
    let rates: Vec<f64> = [5, 20, 100].into_iter().map(rate).collect();
    for w in rates.windows(2) {
        let se = |p: f64| (p * (1.0 - p) / 500.0).sqrt();
        assert!(w[1] <= w[0] + 2.0 * (se(w[0]).powi(2) + se(w[1]).powi(2)).sqrt(), "{rates:?}");
    }
}

#[test]
fn ssl_s_excess_scales_inversely_with_unlabeled() {
    let model = MixtureModel::along_first_axis(1.0, 10).unwrap();
    let spec = SweepConfig {
        trial: quiet(TrialConfig::new(model, 50, 2000, vec![Method::SslS]), 23),
        axis: SweepAxis::NUnlabeled,
        grid: vec![2e3, 8e3, 3.2e4, 1.28e5],
        replicates: 30,
    };
    let slope = scaling_fit(&run_sweep(&spec).unwrap(), Method::SslS, Metric::Excess).unwrap();
    assert!((-1.3..=-0.7).contains(&slope), "{slope}");
}

#[test]
fn self_training_helps_logistic_regression() {
    let model = MixtureModel::along_first_axis(1.0, 2).unwrap();
    let mut trial = TrialConfig::new(model, 20, 2000, vec![Method::Logistic, Method::SelfTrain]).with_seed(24);
    trial.n_test = 0;
    let spec = SweepConfig {
        trial,
        axis: SweepAxis::Snr,
        grid: vec![1.0],
        replicates: 20,
    };
    let s = run_sweep(&spec).unwrap();
    let lr = s.row(1.0, Method::Logistic).unwrap().mean_excess;
    let st = s.row(1.0, Method::SelfTrain).unwrap().mean_excess;
    assert!(st <= lr, "self-training {st} vs logistic {lr}");
}

#[test]
fn switching_gap_peaks_near_the_crossing() {
    let mut spec = preset("fig3").unwrap();
    spec.trial.n_test = 0;
    let s = run_sweep(&spec).unwrap();
    let cross = switching_point_oracle(&s, Metric::Estimation).unwrap();
    assert!(cross.crossed);
    let gap = error_gap(&s, Method::SslS, Method::SslW, Metric::Estimation).unwrap();
    let peak = gap.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let values = s.values();
    let pos = |v: f64| values.iter().position(|&x| x == v).unwrap() as i64;
    assert!((pos(peak.0) - pos(cross.value)).abs() <= 1, "peak at {}, crossing at {}", peak.0, cross.value);
}
