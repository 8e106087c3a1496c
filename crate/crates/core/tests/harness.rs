use cs_reject::harness::{
    aggregate, read_rows, run_grid, write_rows, DatasetSource, DatasetSpec, GridSpec, MethodId, Setting,
};
use cs_reject::losses::MarginLoss;

fn grid(setting: Setting) -> GridSpec {
    GridSpec {
        datasets: vec![DatasetSpec {
            id: "twonorm".into(),
            source: DatasetSource::Twonorm {
                n: if setting == Setting::Pu { 4000 } else { 1000 },
            },
        }],
        methods: vec![
            MethodId::Cs(MarginLoss::Sigmoid),
            MethodId::Sce,
            MethodId::Defer,
            MethodId::Angle,
            MethodId::AlwaysReject,
        ],
        costs: vec![0.1, 0.25],
        trials: 2,
        setting,
        epochs: 10,
        ..GridSpec::default()
    }
}

fn csv_bytes(g: &GridSpec, threads: usize) -> Vec<u8> {
    let rows = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_grid(g).unwrap());
    let mut buf = Vec::new();
    write_rows(&rows, &mut buf).unwrap();
    buf
}

#[test]
fn csv_is_independent_of_thread_count() {
    let g = grid(Setting::Clean);
    assert_eq!(csv_bytes(&g, 1), csv_bytes(&g, 3));
}

#[test]
fn rows_satisfy_the_metric_identity() {
    for setting in [Setting::Clean, Setting::Noisy, Setting::Pu] {
        let rows = run_grid(&grid(setting)).unwrap();
        assert_eq!(rows.len(), 5 * 2 * 2);
        for r in &rows {
            let expected = r.cost * r.rejection_ratio + (1.0 - r.rejection_ratio) * r.accepted_error;
            assert!((r.risk01c - expected).abs() < 1e-12, "{r:?}");
            assert!(r.flag.is_none());
            if r.method == "always-reject" {
                assert_eq!(r.risk01c, r.cost);
            }
            if r.method != "cs-sigmoid" {
                assert_eq!(r.n_reject_ambiguity, 0);
            }
        }
    }
}

#[test]
fn csv_round_trip_and_aggregate() {
    let rows = run_grid(&grid(Setting::Clean)).unwrap();
    let mut buf = Vec::new();
    write_rows(&rows, &mut buf).unwrap();
    let back = read_rows(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert!((a.risk01c - b.risk01c).abs() <= 1e-6 * a.risk01c.abs().max(1e-6));
        assert_eq!(a.n_reject_distance, b.n_reject_distance);
    }
    let s = aggregate(&back);
    assert_eq!(s.len(), 10);
    assert!(s.iter().all(|g| g.n == 2 && !g.single));
}

#[test]
fn clean_cs_methods_beat_always_reject() {
    let g = GridSpec {
        methods: vec![MethodId::Cs(MarginLoss::Sigmoid), MethodId::Cs(MarginLoss::Hinge)],
        trials: 2,
        ..GridSpec::default()
    };
    for r in run_grid(&g).unwrap() {
        assert!(r.risk01c <= r.cost + 0.02, "{r:?}");
    }
}
