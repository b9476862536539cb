use cpbox_core::sweep::{run_sweep, write_csv, Axis, RunMode, SweepConfig, CSV_HEADER};

fn csv(cfg: &SweepConfig) -> Vec<u8> {
    let rows = run_sweep(cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, cfg, &rows).unwrap();
    buf
}

#[test]
fn worker_count_does_not_change_bytes() {
    let base = SweepConfig {
        nbar: 3.0,
        t_max: 6.0,
        t_points: 25,
        mode: RunMode::Both,
        gamma_over_lambda: Axis::Range { min: 0.0, max: 0.1, points: 6 },
        ..SweepConfig::default()
    };
    let one = csv(&SweepConfig { workers: Some(1), ..base.clone() });
    let eight = csv(&SweepConfig { workers: Some(8), ..base.clone() });
    assert_eq!(one, eight);
    assert_eq!(one, csv(&SweepConfig { workers: Some(1), ..base }));
}

#[test]
fn rows_are_axis_major_and_time_minor() {
    let cfg = SweepConfig {
        nbar: 1.0,
        t_max: 2.0,
        t_points: 3,
        delta_over_lambda: Axis::Range { min: -0.5, max: 0.5, points: 3 },
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).unwrap();
    let keys: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.delta_over_lambda, r.metrics.t))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
    assert_eq!(rows.len(), 9);
}

#[test]
fn zero_duration_gives_identical_initial_rows() {
    let theta = 0.4f64;
    let cfg = SweepConfig {
        t_max: 0.0,
        t_points: 2,
        theta,
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].metrics, rows[1].metrics);
    let w = theta.cos().powi(2) - theta.sin().powi(2);
    assert!((rows[0].metrics.inversion - w).abs() < 1e-12);
    // a mixed qubit start is not pure, but carries no entanglement
    assert!(rows[0].metrics.negativity < 1e-12);
}

#[test]
fn header_block_echoes_config() {
    let cfg = SweepConfig {
        nbar: 2.0,
        t_max: 1.0,
        t_points: 2,
        ..SweepConfig::default()
    };
    let text = String::from_utf8(csv(&cfg)).unwrap();
    let echoed: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| format!("{}\n", &l[2..]))
        .collect();
    assert_eq!(SweepConfig::from_text(&echoed).unwrap(), cfg);
    assert!(text.lines().any(|l| l == CSV_HEADER));
}
