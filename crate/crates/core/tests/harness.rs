use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wbgp_bo::bench::{
    emit_results, find_problem, run_campaign, wilcoxon_paired, AlgorithmSpec, CampaignConfig, PValue, WilcoxonMethod,
};

mod common;

#[test]
fn exact_wilcoxon_matches_sign_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..400 {
        let n = rng.random_range(6..=12);
        // one decimal forces ties and zero differences
        let a: Vec<f64> = (0..n).map(|_| (rng.random_range(-2.0..2.0) * 10.0f64).round() / 10.0).collect();
        let b: Vec<f64> = (0..n).map(|_| (rng.random_range(-2.0..2.0) * 10.0f64).round() / 10.0).collect();
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let r = wilcoxon_paired(&a, &b).unwrap();
        let oracle = common::enumerated_wilcoxon(&diffs);
        assert!((r.p_value - oracle).abs() <= 1e-6, "case {case}: {} vs {oracle}", r.p_value);
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn textbook_examples() {
    let zeros = [0.0; 6];
    let r = wilcoxon_paired(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &zeros).unwrap();
    assert!((r.p_value - 0.03125).abs() < 1e-12);
    assert_eq!(r.w_plus, 21.0);

    // ten pairs, one zero difference and a tie in |d|; the exact null
    // distribution is conditional on the midranks (162 of 256 patterns)
    let a = [125.0, 115.0, 130.0, 140.0, 140.0, 115.0, 140.0, 125.0, 140.0, 135.0];
    let b = [110.0, 122.0, 125.0, 120.0, 140.0, 124.0, 123.0, 137.0, 135.0, 145.0];
    let r = wilcoxon_paired(&a, &b).unwrap();
    assert_eq!(r.n_effective, 9);
    assert_eq!(r.w_plus, 27.0);
    assert!((r.p_value - 0.6328125).abs() < 1e-6, "{}", r.p_value);

    // Hollander & Wolfe depression scores
    let x = [1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30];
    let y = [0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29];
    assert!((wilcoxon_paired(&x, &y).unwrap().p_value - 0.0390625).abs() < 1e-9);
}

#[test]
fn wilcoxon_edge_cases() {
    let a = [0.5; 8];
    let r = wilcoxon_paired(&a, &a).unwrap();
    assert_eq!((r.p_value, r.method), (1.0, WilcoxonMethod::Degenerate));
    assert!(wilcoxon_paired(&[1.0; 5], &[0.0; 5]).is_err());
    assert!(wilcoxon_paired(&[1.0; 7], &[0.0; 6]).is_err());

    // large samples fall back to the normal approximation and stay symmetric
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..30).map(|_| rng.random::<f64>() + 0.1).collect();
    let ab = wilcoxon_paired(&a, &b).unwrap();
    let ba = wilcoxon_paired(&b, &a).unwrap();
    assert_eq!(ab.method, WilcoxonMethod::NormalApprox);
    assert!((ab.p_value - ba.p_value).abs() < 1e-12 && ab.p_value > 0.0 && ab.p_value <= 1.0);
}

fn small_campaign(jobs: usize, n_runs: usize) -> CampaignConfig {
    let mut cfg = CampaignConfig::new(
        vec![find_problem("02").unwrap(), find_problem("15").unwrap()],
        vec![AlgorithmSpec::GpBo, AlgorithmSpec::Wbgp(16)],
    );
    cfg.n_runs = n_runs;
    cfg.n_iters = 3;
    cfg.jobs = jobs;
    cfg
}

fn line_count(path: &std::path::Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn emitted_files_have_one_row_per_record() {
    let campaign = run_campaign(&small_campaign(2, 6)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_results(&campaign.result, &campaign.runs, dir.path()).unwrap();

    assert_eq!(line_count(&dir.path().join("summary.csv")), 1 + 2 * 2);
    assert_eq!(line_count(&dir.path().join("traces.csv")), 1 + 2 * 2 * 6 * 8);
    for p in ["problem02", "problem15"] {
        assert_eq!(line_count(&dir.path().join("convergence").join(format!("{p}.csv"))), 1 + 2 * 8);
    }
    assert!(dir.path().join("README.txt").exists());

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let baseline = summary.lines().find(|l| l.starts_with("problem02,GP-BO,")).unwrap();
    assert!(baseline.ends_with(",NA"));
    for cell in &campaign.result.cells {
        assert!(cell.is_complete());
        assert_eq!(cell.finals.len(), 6);
    }
}

#[test]
fn single_run_campaign_has_no_p_values() {
    let campaign = run_campaign(&small_campaign(1, 1)).unwrap();
    for cell in &campaign.result.cells {
        assert_eq!(cell.std, 0.0);
        assert_eq!(cell.p_value, PValue::NotApplicable);
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let read = |jobs: usize| {
        let campaign = run_campaign(&small_campaign(jobs, 6)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_results(&campaign.result, &campaign.runs, dir.path()).unwrap();
        (fs::read(dir.path().join("summary.csv")).unwrap(), fs::read(dir.path().join("traces.csv")).unwrap())
    };
    let one = read(1);
    assert_eq!(one, read(1));
    assert_eq!(one, read(4));
}
