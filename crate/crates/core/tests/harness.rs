use std::io::{BufRead, BufReader};

use proptest::prelude::*;

use nmutp::harness::{
    run_case, run_dimension_sweep, run_td_histogram, ExperimentConfig, NdjsonWriter, QuartetRecord, RunSpec, Tally,
    BLOCK_LEN,
};
use nmutp::nmutp::{CaseStudy, QuartetMetrics};
use nmutp::sampling::SlotKind;

fn cfg(case: CaseStudy, n: u64, seed: u64, n_streams: usize) -> ExperimentConfig {
    ExperimentConfig { case, n_quartets: n, seed, n_streams, ..Default::default() }
}

#[test]
fn summaries_invariant_under_worker_count() {
    let n = 5 * BLOCK_LEN + 123;
    for row in [1, 7] {
        let case = CaseStudy::table1(row).unwrap();
        let runs: Vec<_> = [1, 4, 16].iter().map(|&w| run_case(&cfg(case, n, 21, w)).unwrap()).collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }
    let h: Vec<_> = [1, 4, 16]
        .iter()
        .map(|&w| run_td_histogram([SlotKind::MixedBall, SlotKind::Pure], 2, 3 * BLOCK_LEN + 1, 40, 5, w).unwrap())
        .collect();
    assert_eq!(h[0], h[1]);
    assert_eq!(h[0], h[2]);
}

#[test]
fn records_recompute_summary() {
    let config = cfg(CaseStudy::table1(1).unwrap(), 2 * BLOCK_LEN + 500, 8, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.ndjson");
    let mut w = NdjsonWriter::create(&path).unwrap();
    let summary = RunSpec::from_config(&config).records(|r| w.write(r)).unwrap();
    w.finish().unwrap();

    let records: Vec<QuartetRecord> = BufReader::new(std::fs::File::open(&path).unwrap())
        .lines()
        .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
        .collect();
    assert_eq!(records.len() as u64, summary.n_total);
    let gs: Vec<f64> = records.iter().filter_map(|r| r.g).collect();
    assert!(records.iter().all(|r| r.nmutp == r.g.is_some()));
    let n = gs.len() as f64;
    let mean = gs.iter().sum::<f64>() / n;
    let std = (gs.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert_eq!(gs.len() as u64, summary.n_flagged);
    assert!((100.0 * n / records.len() as f64 - summary.percentage).abs() <= 1e-12);
    assert!((mean - summary.g_mean.unwrap()).abs() <= 1e-12);
    assert!((std - summary.g_std.unwrap()).abs() <= 1e-12);
    assert_eq!(gs.iter().copied().fold(0.0, f64::max), summary.g_max.unwrap());
}

#[test]
fn all_pure_quartets_never_flagged() {
    for d in [2, 3, 5] {
        let case = CaseStudy::new([SlotKind::Pure; 4], d).unwrap();
        let s = run_case(&cfg(case, 3000, 13, 2)).unwrap();
        assert_eq!(s.n_flagged, 0, "d = {d}");
        assert_eq!(s.percentage, 0.0);
        assert!(s.g_mean.is_none() && s.g_std.is_none() && s.g_max.is_none());
    }
}

#[test]
fn sweep_determinism_and_degenerate_repetition() {
    let mut c = ExperimentConfig::sweep(vec![2, 3], 1, 17);
    c.quartets_by_dim.clear();
    c.n_quartets = 1500;
    let a = run_dimension_sweep(&c).unwrap();
    assert_eq!(a, run_dimension_sweep(&c).unwrap());
    assert!(a.iter().all(|p| p.fraction_min == p.fraction_mean && p.fraction_mean == p.fraction_max));

    c.n_repetitions = 3;
    c.n_streams = 4;
    let b = run_dimension_sweep(&c).unwrap();
    for p in &b {
        assert!(p.fraction_min <= p.fraction_mean && p.fraction_mean <= p.fraction_max);
        assert_eq!(p.g_mean_per_rep.len(), 3);
    }
    // Repetition 0 draws the same quartets whatever the repetition count.
    assert_eq!(b[0].repetitions[0], a[0].repetitions[0]);
}

fn metrics(g: Option<f64>) -> QuartetMetrics {
    QuartetMetrics { d1: 0.0, d2: 0.0, dt1: 0.0, dt2: 0.0, nmutp: g.is_some(), g }
}

proptest! {
    #[test]
    fn tally_merge_is_a_monoid(gs in prop::collection::vec(prop::option::of(0.0f64..2.0), 0..60), cut1 in 0usize..60, cut2 in 0usize..60) {
        let (i, j) = (cut1.min(cut2).min(gs.len()), cut1.max(cut2).min(gs.len()));
        let tally = |xs: &[Option<f64>]| {
            let mut t = Tally::default();
            xs.iter().for_each(|g| t.push(&metrics(*g)));
            t
        };
        let whole = tally(&gs);
        let (a, b, c) = (tally(&gs[..i]), tally(&gs[i..j]), tally(&gs[j..]));

        let mut left = a;
        left.merge(&b);
        left.merge(&c);
        let mut bc = b;
        bc.merge(&c);
        let mut right = a;
        right.merge(&bc);
        let mut swapped = c;
        swapped.merge(&a);
        swapped.merge(&b);

        let mut with_identity = whole;
        with_identity.merge(&Tally::default());
        prop_assert_eq!(with_identity, whole);
        for t in [left, right, swapped] {
            prop_assert_eq!((t.n_total, t.n_flagged, t.max_g), (whole.n_total, whole.n_flagged, whole.max_g));
            prop_assert!((t.sum_g - whole.sum_g).abs() <= 1e-12);
            prop_assert!((t.sum_g2 - whole.sum_g2).abs() <= 1e-12);
        }
    }
}
