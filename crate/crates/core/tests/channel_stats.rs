use freebs::channel::FadingModel;
use freebs::{RawConfig, SimConfig};

#[test]
fn exponential_gain_mean_converges() {
    let cfg = SimConfig::reference(1);
    let mut model = FadingModel::new(31);
    let slots = 1_000_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..slots {
        let g = model.sample_slot_gains(&cfg).bs_to_user[0];
        sum += g;
        sum_sq += g * g;
    }
    let mean = sum / slots as f64;
    assert!((mean - 0.3).abs() < 1e-3, "mean {mean}");
    // Exponential: E[g^2] = 2 * mean^2.
    let second = sum_sq / slots as f64;
    assert!((second - 0.18).abs() < 2e-3, "second moment {second}");
}

#[test]
fn per_link_means_respected() {
    let raw = RawConfig::from_json_str(
        r#"{"n_users": 2, "mean_gain_bs": [0.1, 1.0], "mean_gain_d2d": [[1, 0.5], [2.0, 1]]}"#,
    )
    .unwrap();
    let cfg = raw.validate().unwrap();
    let mut model = FadingModel::new(3);
    let slots = 200_000;
    let mut acc = [0.0; 4];
    for _ in 0..slots {
        let g = model.sample_slot_gains(&cfg);
        acc[0] += g.bs_to_user[0];
        acc[1] += g.bs_to_user[1];
        acc[2] += g.d2d(0, 1);
        acc[3] += g.d2d(1, 0);
    }
    let means: Vec<f64> = acc.iter().map(|a| a / slots as f64).collect();
    for (m, want) in means.iter().zip([0.1, 1.0, 0.5, 2.0]) {
        assert!((m / want - 1.0).abs() < 0.02, "{means:?}");
    }
}
