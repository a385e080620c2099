mod common;

use common::*;
use csme_core::dataset::{
    project, stratified_kfold, stratified_split, Class, FeatureMask, LabeledDataset,
};
use csme_core::metrics::{auc, confusion, operating_point_a, roc_curve, summary};
use csme_core::neighbors::{knn_classify, Knn, KnnConfig};
use csme_core::oversample::{smote_with_origins, synthetic_count, OversampleConfig};
use csme_core::search::{
    bpso_run, criterion, ga_run, mean_sd, multi_run_select, Algorithm, SearchConfig,
};
use csme_core::synth::{generate, SynthSpec};
use proptest::prelude::*;
use rand::Rng;

fn dataset_strategy() -> impl Strategy<Value = LabeledDataset<f64>> {
    (any::<u64>(), 6usize..40, 1usize..6)
        .prop_map(|(seed, rows, n)| random_dataset(&mut rng(seed), rows, n, 0.4))
}

fn small_spec(seed: u64) -> SynthSpec {
    SynthSpec {
        n_features: 5,
        informative: vec![0, 3],
        n_minority: 20,
        n_majority: 30,
        class_separation: 2.0,
        noise_sd: 1.0,
        seed,
    }
}

fn quick_config(seed: u64) -> SearchConfig<f64> {
    SearchConfig {
        population_size: 8,
        fe_budget: 80,
        runs: 3,
        cv_folds: 4,
        master_seed: seed,
        ..SearchConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_ones_projection_is_identity(ds in dataset_strategy()) {
        let full = FeatureMask::all_ones(ds.n_features());
        prop_assert_eq!(project(&ds, &full).unwrap(), ds);
    }

    #[test]
    fn nested_projection_lifts(ds in dataset_strategy(), outer in any::<u64>(), inner in any::<u64>()) {
        let n = ds.n_features();
        let outer = FeatureMask::from_code(n, outer % ((1 << n) - 1) + 1);
        let k = outer.cardinality();
        let inner = FeatureMask::from_code(k, inner % ((1 << k) - 1) + 1);
        let twice = project(&project(&ds, &outer).unwrap(), &inner).unwrap();
        let lifted = outer.lift(&inner).unwrap();
        prop_assert_eq!(twice, project(&ds, &lifted).unwrap());
    }

    #[test]
    fn split_recombines_to_original(ds in dataset_strategy(), seed in any::<u64>(), f in 0.1f64..0.9) {
        prop_assume!(ds.class_count(Class::Minority) >= 2 && ds.class_count(Class::Majority) >= 2);
        let (train, test) = stratified_split(&ds, f, seed).unwrap();
        let key = |d: &LabeledDataset<f64>| {
            let mut rows: Vec<(String, u8, Vec<u64>)> = (0..d.len())
                .map(|i| (d.ids()[i].clone(), d.label(i).as_u8(), d.row(i).iter().map(|v| v.to_bits()).collect()))
                .collect();
            rows.sort();
            rows
        };
        let mut joined = key(&train);
        joined.extend(key(&test));
        joined.sort();
        prop_assert_eq!(joined, key(&ds));
        for class in Class::BOTH {
            let expected = (ds.class_count(class) as f64 * f).round() as usize;
            prop_assert_eq!(test.class_count(class), expected);
        }
    }

    #[test]
    fn every_fold_holds_both_classes(ds in dataset_strategy(), seed in any::<u64>(), k in 2usize..6) {
        prop_assume!(ds.class_count(Class::Minority) >= k && ds.class_count(Class::Majority) >= k);
        let folds = stratified_kfold(&ds, k, seed).unwrap();
        for f in 0..k {
            let rows = folds.test_rows(f);
            for class in Class::BOTH {
                prop_assert!(rows.iter().any(|&i| ds.label(i) == class));
            }
        }
    }

    #[test]
    fn knn_score_ignores_training_order(ds in dataset_strategy(), seed in any::<u64>(), k in 1usize..6) {
        prop_assume!(k <= ds.len());
        let mut r = rng(seed);
        let query: Vec<f64> = (0..ds.n_features()).map(|_| r.random_range(-5.0..5.0)).collect();
        let mut order: Vec<usize> = (0..ds.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let shuffled = ds.select_rows(&order);
        let cfg = KnnConfig::with_k(k);
        // continuous random features: distances are distinct with probability one
        prop_assert_eq!(
            Knn::fit(&ds, &cfg).unwrap().score(&query).unwrap(),
            Knn::fit(&shuffled, &cfg).unwrap().score(&query).unwrap()
        );
    }

    #[test]
    fn knn_scores_on_the_k_grid(ds in dataset_strategy(), q in dataset_strategy(), k in 1usize..6) {
        prop_assume!(k <= ds.len() && q.n_features() == ds.n_features());
        for s in Knn::fit(&ds, &KnnConfig::with_k(k)).unwrap().scores(&q, false).unwrap() {
            let scaled = s * k as f64;
            prop_assert!((scaled - scaled.round()).abs() < 1e-12 && (0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn odd_k_half_threshold_is_majority_vote(ds in dataset_strategy(), q in dataset_strategy(), half in 0usize..3) {
        let k = 2 * half + 1;
        prop_assume!(k <= ds.len() && q.n_features() == ds.n_features());
        let knn = Knn::fit(&ds, &KnnConfig::with_k(k)).unwrap();
        let pred = knn_classify(&ds, &q, &KnnConfig::with_k(k), 0.5).unwrap();
        for (i, row) in q.rows().enumerate() {
            let votes = knn.nearest(row).unwrap().iter().filter(|&&j| ds.label(j) == Class::Minority).count();
            let expected = if 2 * votes > k { Class::Minority } else { Class::Majority };
            prop_assert_eq!(pred[i], expected);
        }
    }

    #[test]
    fn roc_is_monotone_and_auc_bounded(seed in any::<u64>(), len in 2usize..80) {
        let (truth, scores) = random_scored(&mut rng(seed), len);
        let curve = roc_curve(&truth, &scores).unwrap();
        let pts = curve.points();
        prop_assert_eq!((pts[0].fpr, pts[0].tpr), (0.0, 0.0));
        prop_assert_eq!((pts[pts.len() - 1].fpr, pts[pts.len() - 1].tpr), (1.0, 1.0));
        for w in pts.windows(2) {
            prop_assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        }
        let a = auc(&curve);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn point_a_survives_monotone_transforms(seed in any::<u64>(), len in 4usize..60) {
        let (truth, scores) = random_scored(&mut rng(seed), len);
        let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
        let a = operating_point_a(&roc_curve(&truth, &scores).unwrap());
        let b = operating_point_a(&roc_curve(&truth, &warped).unwrap());
        prop_assert_eq!((a.fpr, a.tpr), (b.fpr, b.tpr));
    }

    #[test]
    fn perfect_prediction_summary(seed in any::<u64>(), len in 2usize..50) {
        let (truth, _) = random_scored(&mut rng(seed), len);
        let s = summary::<f64>(&confusion(&truth, &truth).unwrap()).unwrap();
        prop_assert_eq!((s.se, s.sp, s.accuracy), (1.0, 1.0, 1.0));
    }

    #[test]
    fn smote_segments_counts_and_majority_rows(
        data_seed in any::<u64>(),
        seed in any::<u64>(),
        r in 0.0f64..2.5,
        k in 1usize..6,
    ) {
        let ds = random_dataset(&mut rng(data_seed), 40, 3, 0.5);
        prop_assume!(ds.class_count(Class::Minority) > k);
        let cfg = OversampleConfig { r, k_neighbors: k, seed };
        let out = smote_with_origins(&ds, &cfg).unwrap();
        check_smote(&ds, &out.dataset, &out.origins, &cfg)?;
    }
}

/// Segment membership, synthetic counts and untouched majority rows.
fn check_smote(
    ds: &LabeledDataset<f64>,
    out: &LabeledDataset<f64>,
    origins: &[csme_core::oversample::SyntheticOrigin],
    cfg: &OversampleConfig,
) -> Result<(), TestCaseError> {
    let n_min = ds.class_count(Class::Minority);
    let added = synthetic_count(n_min, cfg.r);
    prop_assert_eq!(added, (cfg.r * n_min as f64).round() as usize);
    prop_assert_eq!(out.len(), ds.len() + added);
    prop_assert_eq!(out.class_count(Class::Minority), n_min + added);
    prop_assert_eq!(
        out.class_count(Class::Majority),
        ds.class_count(Class::Majority)
    );
    for i in 0..ds.len() {
        prop_assert_eq!(out.row(i), ds.row(i));
        prop_assert_eq!(out.label(i), ds.label(i));
    }
    let minority = ds.class_rows(Class::Minority);
    for (j, o) in origins.iter().enumerate() {
        let row = ds.len() + j;
        prop_assert_eq!(out.label(row), Class::Minority);
        prop_assert!(out.ids()[row].starts_with("syn:"));
        prop_assert!(
            ds.label(o.parent) == Class::Minority && ds.label(o.neighbor) == Class::Minority
        );
        prop_assert!(o.parent != o.neighbor);
        // neighbour is among the parent's k nearest minority rows
        let mut others: Vec<(f64, usize)> = minority
            .iter()
            .filter(|&&m| m != o.parent)
            .map(|&m| {
                let d: f64 = ds
                    .row(m)
                    .iter()
                    .zip(ds.row(o.parent))
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                (d, m)
            })
            .collect();
        others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        prop_assert!(others[..cfg.k_neighbors]
            .iter()
            .any(|&(_, m)| m == o.neighbor));
        for ((&s, &p), &t) in out
            .row(row)
            .iter()
            .zip(ds.row(o.parent))
            .zip(ds.row(o.neighbor))
        {
            let (lo, hi) = (p.min(t), p.max(t));
            prop_assert!(s >= lo - 1e-9 && s <= hi + 1e-9);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn criterion_is_a_unit_interval_value(data_seed in any::<u64>(), fold_seed in any::<u64>(), code in 1u64..32) {
        let ds: LabeledDataset<f64> = generate(&small_spec(data_seed)).unwrap();
        let folds = stratified_kfold(&ds, 5, fold_seed).unwrap();
        let j = criterion(&FeatureMask::from_code(5, code), &ds, &folds, &KnnConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&j));
    }

    #[test]
    fn criterion_follows_column_permutations(data_seed in any::<u64>(), perm_seed in any::<u64>(), code in 1u64..32) {
        let ds: LabeledDataset<f64> = generate(&small_spec(data_seed)).unwrap();
        let folds = stratified_kfold(&ds, 5, 3).unwrap();
        let mut perm: Vec<usize> = (0..5).collect();
        let mut r = rng(perm_seed);
        for i in (1..5).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let rows: Vec<Vec<f64>> = ds.rows().map(|row| perm.iter().map(|&p| row[p]).collect()).collect();
        let permuted = LabeledDataset::new(ds.ids().to_vec(), rows, ds.labels().to_vec(), None).unwrap();
        let mask = FeatureMask::from_code(5, code);
        let moved = FeatureMask::new(perm.iter().map(|&p| mask.bits()[p]).collect());
        let knn = KnnConfig::default();
        let a = criterion(&mask, &ds, &folds, &knn).unwrap();
        let b = criterion(&moved, &permuted, &folds, &knn).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn runs_are_monotone_and_spend_the_budget(data_seed in any::<u64>(), run_seed in any::<u64>(), pop in 2usize..10, extra in 0usize..40) {
        let ds: LabeledDataset<f64> = generate(&small_spec(data_seed)).unwrap();
        let cfg = SearchConfig { population_size: pop, fe_budget: pop * 4 + extra, ..quick_config(0) };
        for res in [ga_run(&ds, &cfg, run_seed).unwrap(), bpso_run(&ds, &cfg, run_seed).unwrap()] {
            prop_assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(res.evaluations, cfg.generations() * pop);
            prop_assert!(res.evaluations <= cfg.fe_budget);
            prop_assert_eq!(*res.history.last().unwrap(), res.best_j);
            prop_assert_eq!(res.cardinality, res.best_mask.cardinality());
            let folds = csme_core::search::run_folds(&ds, cfg.cv_folds, run_seed).unwrap();
            prop_assert_eq!(criterion(&res.best_mask, &ds, &folds, &cfg.knn).unwrap(), res.best_j);
        }
    }

    #[test]
    fn report_statistics_recompute(data_seed in any::<u64>(), master in any::<u64>(), ga in any::<bool>()) {
        let ds: LabeledDataset<f64> = generate(&small_spec(data_seed)).unwrap();
        let algorithm = if ga { Algorithm::Ga } else { Algorithm::Bpso };
        let report = multi_run_select(algorithm, &ds, &quick_config(master)).unwrap();
        let js: Vec<f64> = report.per_run.iter().map(|r| r.best_j).collect();
        let xs: Vec<f64> = report.per_run.iter().map(|r| r.cardinality as f64).collect();
        let stats = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (m, var.sqrt())
        };
        let (jm, jsd) = stats(&js);
        let (xm, xsd) = stats(&xs);
        prop_assert!((report.j_mean - jm).abs() < 1e-12 && (report.j_sd - jsd).abs() < 1e-12);
        prop_assert!((report.xi_mean - xm).abs() < 1e-12 && (report.xi_sd - xsd).abs() < 1e-12);
        let min = js.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(report.j_best, min);
        prop_assert_eq!(&report.best_overall, &report.per_run[report.best_run].best_mask);
        let min_card = report.per_run.iter().filter(|r| r.best_j == min).map(|r| r.cardinality).min().unwrap();
        prop_assert_eq!(report.xi_best, min_card);
        prop_assert!((report.xi_percent - (5.0 - xm) / 5.0 * 100.0).abs() < 1e-12);
        if let Some(pi) = report.pi_percent {
            prop_assert!((pi - (report.j_prime - jm) / report.j_prime * 100.0).abs() < 1e-12);
        }
        prop_assert_eq!(mean_sd(&js), (report.j_mean, report.j_sd));
    }
}

#[test]
fn shuffled_samples_keep_fold_composition_and_aucs() {
    let ds: LabeledDataset<f64> = generate(&small_spec(11)).unwrap();
    let mut order: Vec<usize> = (0..ds.len()).collect();
    let mut r = rng(12);
    for i in (1..order.len()).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let shuffled = ds.select_rows(&order);
    let composition = |d: &LabeledDataset<f64>| {
        let folds = stratified_kfold(d, 5, 4).unwrap();
        let mut per_fold: Vec<(usize, usize)> = (0..5)
            .map(|f| {
                let rows = folds.test_rows(f);
                let pos = rows
                    .iter()
                    .filter(|&&i| d.label(i) == Class::Minority)
                    .count();
                (pos, rows.len() - pos)
            })
            .collect();
        per_fold.sort();
        per_fold
    };
    assert_eq!(composition(&ds), composition(&shuffled));
    // folds regenerated over the same per-class id lists give the same AUC multiset
    let canonical = |d: &LabeledDataset<f64>| {
        let mut idx: Vec<usize> = (0..d.len()).collect();
        idx.sort_by(|&x, &y| {
            d.label(y)
                .cmp(&d.label(x))
                .then(d.ids()[x].cmp(&d.ids()[y]))
        });
        d.select_rows(&idx)
    };
    let aucs = |d: &LabeledDataset<f64>| {
        let folds = stratified_kfold(d, 5, 4).unwrap();
        let c = csme_core::search::Criterion::new(d, &folds, KnnConfig::default()).unwrap();
        let mut v: Vec<u64> = c
            .fold_aucs(&FeatureMask::all_ones(5))
            .unwrap()
            .iter()
            .map(|x| x.to_bits())
            .collect();
        v.sort();
        v
    };
    assert_eq!(aucs(&canonical(&ds)), aucs(&canonical(&shuffled)));
}
