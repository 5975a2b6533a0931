use std::fmt::Write as _;
use std::fs;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use catscore_core::catscore::ScoreMethod;
use catscore_core::io::{
    load_dataset, read_correlation_matrix, read_ranked_table, read_study_table,
    write_correlation_matrix, write_dataset, write_study_table, QqData, RankedTable,
};
use catscore_core::pipeline::{score_dataset, ScoreOptions};
use catscore_core::simharness::{
    build_scenario, replicate_rng, run_study, sample_dataset, GeneratorSpec, ScenarioSpec, Stream,
    StudyMethod,
};
use catscore_core::Error;

fn simulated() -> catscore_core::estimators::LabeledDataset {
    let spec = GeneratorSpec {
        p: 60,
        de_count: 6,
        seed: 31,
        ..GeneratorSpec::default()
    };
    let oracle = build_scenario(&ScenarioSpec::two_blocks(60, 6)).unwrap();
    sample_dataset(&spec, &oracle, &mut replicate_rng(31, 0, Stream::Data))
        .unwrap()
        .0
}

#[test]
fn written_dataset_reloads_with_identical_scores() {
    let data = simulated();
    let dir = tempfile::tempdir().unwrap();
    let (dp, lp) = (dir.path().join("data.tsv"), dir.path().join("labels.tsv"));
    write_dataset(&data, &dp, &lp).unwrap();
    let back = load_dataset(&dp, &lp).unwrap();
    for method in [
        ScoreMethod::Fold,
        ScoreMethod::T,
        ScoreMethod::ShrinkT,
        ScoreMethod::Cat,
        ScoreMethod::ShrinkCat,
        ScoreMethod::GroupedCat,
    ] {
        let a = score_dataset(&data, method, &ScoreOptions::default()).unwrap();
        let b = score_dataset(&back, method, &ScoreOptions::default()).unwrap();
        assert_eq!(a.scores.scores, b.scores.scores, "{method}");
    }
}

#[test]
fn prostate_shaped_dataset_loads() {
    let (p, n1, n2) = (518, 12, 14);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut data = String::from("metabolite");
    for j in 0..n1 + n2 {
        write!(data, "\tS{j}").unwrap();
    }
    data.push('\n');
    for i in 0..p {
        write!(data, "m{i}").unwrap();
        for _ in 0..n1 + n2 {
            write!(data, "\t{}", rng.random::<f64>() * 10.0).unwrap();
        }
        data.push('\n');
    }
    let mut labels = String::from("sample\tgroup\n");
    for j in 0..n1 + n2 {
        writeln!(labels, "S{j}\t{}", if j < n1 { 1 } else { 2 }).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let (dp, lp) = (dir.path().join("d.tsv"), dir.path().join("l.tsv"));
    fs::write(&dp, data).unwrap();
    fs::write(&lp, labels).unwrap();
    let ds = load_dataset(&dp, &lp).unwrap();
    assert_eq!((ds.p(), ds.n1(), ds.n2()), (518, 12, 14));
}

#[test]
fn ranked_table_feeds_qq() {
    let data = simulated();
    let scored = score_dataset(&data, ScoreMethod::GroupedCat, &ScoreOptions::default()).unwrap();
    let sizes = scored.neighborhood_sizes();
    let table = RankedTable::from_scores(&scored.scores, sizes.as_deref()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ranked.tsv");
    table.write(&path).unwrap();
    let back = read_ranked_table(&path).unwrap();
    assert_eq!(back.rows.len(), 60);
    assert!(back.rows.iter().enumerate().all(|(k, r)| r.rank == k + 1));
    for (a, b) in back.rows.iter().zip(&table.rows) {
        assert_eq!(a.feature, b.feature);
        assert!((a.score - b.score).abs() <= 1e-11 * b.score.abs());
    }
    let qq = QqData::from_scores(&back.scores()).unwrap();
    assert_eq!(qq.len(), 60);
    assert!(qq.empirical.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn normal_scores_give_unit_qq_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let scores: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
    let qq = QqData::from_scores(&scores).unwrap();
    // central 80%
    let (lo, hi) = (1_000, 9_000);
    let x = &qq.theoretical[lo..hi];
    let y = &qq.empirical[lo..hi];
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((0.95..=1.05).contains(&slope), "slope {slope}");
}

#[test]
fn study_table_round_trip() {
    let spec = GeneratorSpec {
        p: 40,
        de_count: 4,
        replicates: 5,
        seed: 34,
        ..GeneratorSpec::default()
    };
    let curves = run_study(
        &spec,
        &ScenarioSpec::identity(40),
        &[StudyMethod::T, StudyMethod::Random],
        None,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("study.tsv");
    fs::write(&path, write_study_table(&curves)).unwrap();
    let rows = read_study_table(&path).unwrap();
    assert_eq!(rows.len(), 80);
    assert_eq!(rows[0].method, "t");
    assert_eq!(rows[40].method, "random");
    assert_eq!(rows[39].cutoff, 40);
    assert!((rows[39].power_mean - 1.0).abs() < 1e-15);
}

#[test]
fn correlation_file_scenario() {
    let oracle = build_scenario(&ScenarioSpec::autoregressive(40)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corr.tsv");
    write_correlation_matrix(&path, oracle.matrix()).unwrap();
    assert_eq!(&read_correlation_matrix(&path).unwrap(), oracle.matrix());
    let from_file = build_scenario(&ScenarioSpec::file(40, &path)).unwrap();
    assert_eq!(from_file.matrix(), oracle.matrix());
    assert!(build_scenario(&ScenarioSpec::file(41, &path)).is_err());

    let indefinite = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
    write_correlation_matrix(&path, &indefinite).unwrap();
    let err = build_scenario(&ScenarioSpec::file(3, &path)).unwrap_err();
    assert!(matches!(err, Error::NotPositiveDefinite(_)), "{err}");
}
