use sagrover_core::runtime::{advantage_threshold, grover_gain, speedup_row, speedup_table};
use sagrover_core::{random_instance, Assignment, RuntimeParams};

#[test]
fn speedup_is_capped_past_the_threshold() {
    let p = RuntimeParams::default();
    let start = advantage_threshold(p.q_oh);
    for q in (start..=60).step_by(2) {
        let r = speedup_row(&p, q);
        assert!(r.x_sa < r.x_qubo.min(r.t_sa / p.total_det()), "q {q}");
    }
}

#[test]
fn grover_time_halves_per_two_qubits() {
    let rows = speedup_table(&RuntimeParams::default(), &[2, 4, 6, 8, 10]);
    for w in rows.windows(2) {
        assert!((w[0].t_g / w[1].t_g - 2.0).abs() < 1e-12);
    }
    assert_eq!(grover_gain(10), 32.0);
}

#[test]
fn threshold_tracks_overhead() {
    assert_eq!(advantage_threshold(1.0), 2);
    assert_eq!(advantage_threshold(100.0), 14);
    assert_eq!(advantage_threshold(1000.0), 20);
}

#[test]
fn evaluation_cost_is_quadratic() {
    let ratio = |n: usize| {
        let m = random_instance(n, 1.0, 3, 1).unwrap();
        let (_, ops) = m.evaluate_counted(&Assignment::zeros(n)).unwrap();
        ops as f64 / (n * n) as f64
    };
    let small = ratio(10);
    let large = ratio(400);
    assert!(small / large < 3.0 && large / small < 3.0);
}
