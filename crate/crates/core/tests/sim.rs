use slicelab_core::sim::{linear_fit, simulate, SimConfig};

#[test]
fn egress_scales_linearly_with_clients() {
    let cfg = SimConfig::default();
    let report = simulate(&cfg).unwrap();
    assert_eq!(report.rows.len(), 4);
    for r in &report.rows {
        assert_eq!(r.group_size, 4);
        assert!(r.egress_msgs_per_sec <= 3.0 * cfg.rate * r.n_clients as f64 + 1e-9);
        assert_eq!(r.inbound_msgs as f64, cfg.rate * cfg.duration_secs * r.n_clients as f64);
    }
    for ratio in report.egress_ratios() {
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }
    assert!(report.r_squared >= 0.99, "r2 {}", report.r_squared);
    assert!((report.slope - 30.0).abs() < 1e-9);
}

#[test]
fn partial_groups_relay_fewer_copies() {
    let cfg = SimConfig { client_counts: vec![6], rate: 5.0, duration_secs: 2.0, seed: 3 };
    let report = simulate(&cfg).unwrap();
    // Groups of 4 and 2: 4 senders relay 3 copies, 2 senders relay 1.
    assert_eq!(report.rows[0].egress_msgs_per_sec, 5.0 * (4.0 * 3.0 + 2.0));
}

#[test]
fn runs_are_deterministic() {
    let cfg = SimConfig { client_counts: vec![4, 12], rate: 7.0, duration_secs: 1.5, seed: 11 };
    let a = simulate(&cfg).unwrap();
    let b = simulate(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    let csv = a.to_csv();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("n_clients,group_size,"));
}

#[test]
fn bad_configs_are_rejected() {
    assert!(simulate(&SimConfig { client_counts: vec![], ..SimConfig::default() }).is_err());
    assert!(simulate(&SimConfig { rate: 0.0, ..SimConfig::default() }).is_err());
}

#[test]
fn fit_r_squared_matches_manual() {
    let xs = [1.0, 2.0, 3.0, 4.0];
    let ys = [2.0, 4.5, 5.5, 8.0];
    let (m, b, r2) = linear_fit(&xs, &ys);
    assert!((m - 1.9).abs() < 1e-12);
    assert!((b - 0.25).abs() < 1e-12);
    let pred: Vec<f64> = xs.iter().map(|x| m * x + b).collect();
    let mean = 5.0;
    let ss_res: f64 = ys.iter().zip(&pred).map(|(y, p)| (y - p) * (y - p)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean) * (y - mean)).sum();
    assert!((r2 - (1.0 - ss_res / ss_tot)).abs() < 1e-12);
}
