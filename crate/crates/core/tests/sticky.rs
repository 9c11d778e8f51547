use areawalk::montecarlo::RngStream;
use areawalk::sticky::{init_poisson, init_uniform, k_curve, simulate, InitialModel, SystemState};
use proptest::prelude::*;

#[test]
fn symmetric_pair_meets_at_rest() {
    let s = SystemState::from_positions(&[0.0, 0.5]).unwrap();
    let done = simulate(&s, f64::INFINITY).unwrap();
    let c = done.clusters();
    assert_eq!(c.len(), 1);
    assert!(c[0].velocity.abs() < 1e-15);
    assert!((c[0].position - 0.25).abs() < 1e-15);
    assert!((done.merges()[0].time - 1.0).abs() < 1e-15);
    // The input state is untouched.
    assert_eq!(s.cluster_count(), 2);
}

#[test]
fn three_body_collision_becomes_two_merges_left_first() {
    // Outer particles accelerate inward at 2/3 and reach the middle one
    // together at t = sqrt(3).
    let mut s = SystemState::from_positions(&[-1.0, 0.0, 1.0]).unwrap();
    s.simulate(f64::INFINITY).unwrap();
    let m = s.merges();
    assert_eq!(m.len(), 2);
    assert_eq!((m[0].left_index, m[0].right_index), (0, 1));
    assert_eq!((m[1].left_index, m[1].right_index), (0, 2));
    assert!((m[0].time - 3f64.sqrt()).abs() < 1e-12);
    assert!((m[1].time - m[0].time).abs() < 1e-9);
    assert!(s.check_invariants().passed());
}

#[test]
fn partial_runs_compose() {
    let mut rng = RngStream::new(4, 0).rng();
    let start = init_uniform(300, &mut rng).unwrap();
    let whole = simulate(&start, f64::INFINITY).unwrap();
    let mut staged = start.clone();
    for t in [0.2, 0.5, 0.9, f64::INFINITY] {
        staged.simulate(t).unwrap();
        assert!(staged.check_invariants().passed());
    }
    assert_eq!(staged.merges(), whole.merges());
}

#[test]
fn cluster_count_at_half_time_near_limit() {
    let run = k_curve(4000, InitialModel::Poisson, &[0.5], 5, 3, 0).unwrap();
    assert!((run.curve.points[0].mean - 0.75).abs() < 0.03, "{:?}", run.curve.points);
    assert!(run.all_invariants_hold());
}

#[test]
fn merge_log_reads_back() {
    let mut rng = RngStream::new(8, 1).rng();
    let mut s = init_poisson(50, &mut rng).unwrap();
    s.simulate(f64::INFINITY).unwrap();
    let mut buf = Vec::new();
    s.write_merge_log_csv(&mut buf).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 49);
    let sizes: usize = rows.iter().map(|r| r[1].parse::<usize>().unwrap() + r[2].parse::<usize>().unwrap()).max().unwrap();
    assert_eq!(sizes, 50);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_configuration_collapses_cleanly(mut xs in proptest::collection::vec(-5.0f64..5.0, 1..60)) {
        xs.sort_by(f64::total_cmp);
        let mut s = SystemState::from_positions(&xs).unwrap();
        let com = s.center_of_mass();
        s.simulate(f64::INFINITY).unwrap();
        let report = s.check_invariants();
        prop_assert!(report.passed(), "{:?}", report);
        prop_assert_eq!(report.merges, xs.len() - 1);
        let last = s.clusters()[0];
        // Zero total momentum: the final cluster rests at the center of mass.
        prop_assert!(last.velocity.abs() < 1e-9);
        prop_assert!((last.position - com).abs() < 1e-9);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let k = s.k_on_grid(&grid);
        prop_assert!(k.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn uniform_start_is_sorted_and_at_rest(n in 1usize..200, seed in any::<u64>()) {
        let s = init_uniform(n, &mut RngStream::new(seed, 0).rng()).unwrap();
        let c = s.clusters();
        prop_assert_eq!(c.len(), n);
        prop_assert!(c.windows(2).all(|w| w[0].position <= w[1].position));
        prop_assert!(c.iter().all(|x| x.velocity == 0.0 && (0.0..=1.0).contains(&x.position)));
        let total: f64 = c.iter().map(|x| x.mass * x.acceleration).sum();
        prop_assert!(total.abs() < 1e-12);
    }
}
