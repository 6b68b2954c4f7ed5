//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N (...): pass` line on success (visible with --nocapture).
//!
//! Oracles here are coded independently of the library routines they check:
//! the leave-one-out and Wilcoxon references below share no helper code with
//! the crate.

use std::collections::HashSet;
use std::process::Command;

use rand::Rng;

use eusboost::dataset::{make_dataset, ClassLabel, Dataset, WeightDistribution};
use eusboost::ensembles::{
    self, pseudo_loss, train_adaboost, train_adaboost_traced, train_eusboost_traced,
    train_rusboost_traced, BoostTrace, Model,
};
use eusboost::eus::{self, Chromosome, EusConfig, EusContext};
use eusboost::evaluation::{
    compare, cross_validate, stratified_kfold, wilcoxon_signed_rank, MethodConfig, MethodTag,
};
use eusboost::learners::WeakLearnerSpec;
use eusboost::metrics::{self, ConfusionMatrix};
use eusboost::model::{dataset_fingerprint, load_model, save_model, ModelFile, MODEL_FORMAT_VERSION};
use eusboost::random::RandomSource;
use eusboost::report::{render, ReportFormat};
use eusboost::synth::{generate_synthetic, SyntheticSpec};

#[test]
fn criterion_1_metric_identities() {
    let mut rng = RandomSource::new(101).stream("cm-fuzz");
    for _ in 0..1000 {
        let cm = ConfusionMatrix::new(
            rng.gen_range(0..500),
            rng.gen_range(0..500),
            rng.gen_range(0..500),
            rng.gen_range(0..500),
        );
        if cm.total() == 0 {
            continue;
        }
        let all = [
            metrics::accuracy(&cm),
            metrics::sensitivity(&cm),
            metrics::specificity(&cm),
            metrics::precision(&cm),
            metrics::geometric_mean(&cm),
            metrics::auc_single_point(&cm),
            metrics::f_measure(&cm),
        ];
        for m in &all {
            if let Ok(v) = m {
                assert!((0.0..=1.0).contains(v), "metric {v} out of [0,1] for {cm:?}");
            }
        }
        if let (Ok(gm), Ok(sen), Ok(spc)) =
            (metrics::geometric_mean(&cm), metrics::sensitivity(&cm), metrics::specificity(&cm))
        {
            assert!((gm * gm - sen * spc).abs() < 1e-12, "GM identity broken for {cm:?}");
        }
        if let (Ok(auc), Ok(tpr), Ok(spc)) =
            (metrics::auc_single_point(&cm), metrics::sensitivity(&cm), metrics::specificity(&cm))
        {
            let fpr = 1.0 - spc;
            assert_eq!(auc, (1.0 + tpr - fpr) / 2.0, "AUC identity broken for {cm:?}");
        }
    }
    println!("criterion 1 (metric identities): pass");
}

fn check_trace(trace: &BoostTrace, n: usize, what: &str) {
    assert!(!trace.rounds.is_empty(), "{what}: no recorded rounds");
    for (t, round) in trace.rounds.iter().enumerate() {
        let sum: f64 = round.distribution.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9, "{what} round {t}: sum D = {sum}");
        assert_eq!(round.distribution.len(), n);
        let members: HashSet<usize> = round.subset_ids.iter().copied().collect();
        let restricted_sum: f64 = round.restricted.iter().sum();
        assert!((restricted_sum - 1.0).abs() <= 1e-9, "{what} round {t}: sum D' = {restricted_sum}");
        for (i, &d) in round.restricted.iter().enumerate() {
            if !members.contains(&i) {
                assert_eq!(d, 0.0, "{what} round {t}: D'[{i}] nonzero outside S'");
            }
        }
        assert!(
            (0.0..0.5).contains(&round.pseudo_loss),
            "{what} round {t}: pseudo-loss {} outside [0, 0.5)",
            round.pseudo_loss
        );
        assert!(
            round.beta > 0.0 && round.beta < 1.0,
            "{what} round {t}: beta {} outside (0,1)",
            round.beta
        );
    }
}

#[test]
fn criterion_2_boosting_weight_invariants() {
    for i in 0..20u64 {
        let spec = SyntheticSpec {
            n: 40 + (i as usize * 137) % 161, // 40..=200
            dims: 1 + (i as usize) % 3,
            ir: 1.5 + (i % 5) as f64,
            delta: 1.5 + 0.1 * (i % 8) as f64,
            seed: 900 + i,
        };
        let ds = generate_synthetic(&spec).unwrap();
        let src = RandomSource::new(7000 + i);
        let learner = WeakLearnerSpec::default();
        let (_, tr) =
            train_eusboost_traced(&ds, 10, &learner, &EusConfig::default(), &src).unwrap();
        check_trace(&tr, ds.n(), "eusboost");
        let (_, tr) = train_rusboost_traced(&ds, 10, &learner, &src).unwrap();
        check_trace(&tr, ds.n(), "rusboost");
        let (_, tr) = train_adaboost_traced(&ds, 10, &learner, &src).unwrap();
        check_trace(&tr, ds.n(), "adaboost");
    }
    println!("criterion 2 (boosting weight invariants): pass");
}

#[test]
fn criterion_3_pseudo_loss_anchors() {
    let d = WeightDistribution::uniform(4);
    let perfect = vec![(1.0, 0.0); 4];
    assert_eq!(pseudo_loss(&d, &perfect), 0.0);
    let coin = vec![(0.5, 0.5); 4];
    assert_eq!(pseudo_loss(&d, &coin), 0.5);
    let anti = vec![(0.0, 1.0); 4];
    assert_eq!(pseudo_loss(&d, &anti), 1.0);
    println!("criterion 3 (pseudo-loss anchors): pass");
}

/// Toy dataset with 12 majority ("b") and 5 minority ("a") points in 2-D,
/// drawn from overlapping uniform boxes so no mask is trivially optimal.
fn toy_12_5(seed: u64) -> Dataset<f64> {
    let mut rng = RandomSource::new(seed).stream("toy-12-5");
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..12 {
        rows.push(vec![rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)]);
        labels.push("b".to_string());
    }
    for _ in 0..5 {
        rows.push(vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]);
        labels.push("a".to_string());
    }
    make_dataset(rows, &labels).unwrap()
}

#[test]
fn criterion_4_eus_oracle_equivalence() {
    let cfg = EusConfig::default();
    let mut hits = 0;
    for seed in 0..10u64 {
        let ds = toy_12_5(seed);
        let ctx = EusContext::new(&ds);
        let (_, best_fit) = eus::exhaustive_best(&ctx, &cfg).unwrap();
        let mut rng = RandomSource::new(seed).stream("ga");
        let found = eus::evolve(&ctx, &cfg, &mut rng).unwrap();
        let found_fit = eus::fitness(&ctx, &found, &cfg);
        assert!(found_fit <= best_fit + 1e-12, "GA fitness above exhaustive optimum");
        if found_fit >= best_fit - 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 8, "GA reached the exhaustive optimum on only {hits}/10 seeds");
    println!("criterion 4 (EUS oracle equivalence): pass ({hits}/10 seeds optimal)");
}

/// Reference fitness: brute-force leave-one-out 1-NN over the selected
/// subset (squared Euclidean distance, ties to the lower id), GM from raw
/// counts, minus the balance penalty. Undefined GM scores 0.
fn reference_fitness(ds: &Dataset<f64>, mask: &[bool], penalty: f64) -> f64 {
    let (minority, majority) = ds.partition_by_class();
    let mut cand: Vec<usize> = minority.clone();
    cand.extend(majority.iter().zip(mask).filter(|(_, &b)| b).map(|(&id, _)| id));
    let (mut tp, mut fn_, mut fp, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for &i in &cand {
        let mut best: Option<(f64, usize)> = None;
        for &j in &cand {
            if j == i {
                continue;
            }
            let d2: f64 = ds
                .instance(i)
                .features
                .iter()
                .zip(&ds.instance(j).features)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let closer = match best {
                None => true,
                Some((bd, bj)) => d2 < bd || (d2 == bd && j < bj),
            };
            if closer {
                best = Some((d2, j));
            }
        }
        let predicted = ds.label(best.unwrap().1);
        match (predicted, ds.label(i)) {
            (ClassLabel::Positive, ClassLabel::Positive) => tp += 1,
            (ClassLabel::Negative, ClassLabel::Positive) => fn_ += 1,
            (ClassLabel::Positive, ClassLabel::Negative) => fp += 1,
            (ClassLabel::Negative, ClassLabel::Negative) => tn += 1,
        }
    }
    if tp + fn_ == 0 || fp + tn == 0 {
        return 0.0;
    }
    let sen = tp as f64 / (tp + fn_) as f64;
    let spc = tn as f64 / (fp + tn) as f64;
    let n_sel = mask.iter().filter(|&&b| b).count();
    (sen * spc).sqrt() - penalty * (1.0 - n_sel as f64 / minority.len() as f64).abs()
}

#[test]
fn criterion_5_fitness_cross_check() {
    let ds = toy_12_5(42);
    let ctx = EusContext::new(&ds);
    let cfg = EusConfig::default();
    for bits in 1u32..(1 << 12) {
        let mask: Vec<bool> = (0..12).map(|k| bits & (1 << k) != 0).collect();
        let lib = eus::fitness(&ctx, &Chromosome::new(mask.clone()), &cfg);
        let reference = reference_fitness(&ds, &mask, cfg.penalty);
        assert!(
            (lib - reference).abs() < 1e-12,
            "fitness mismatch for mask {bits:#014b}: lib {lib}, reference {reference}"
        );
    }
    println!("criterion 5 (fitness cross-check): pass (4095 masks)");
}

#[test]
fn criterion_6_qualitative_ordering() {
    let tags = [MethodTag::Eub, MethodTag::Bst, MethodTag::Bgg, MethodTag::Rub];
    let mut sums = [0.0f64; 4];
    for seed in 0..10u64 {
        let ds = generate_synthetic(&SyntheticSpec {
            n: 400,
            dims: 2,
            ir: 10.0,
            delta: 1.5,
            seed: 4200 + seed,
        })
        .unwrap();
        let src = RandomSource::new(seed);
        let plan = stratified_kfold(&ds, 5, 2, &src.derive("plan")).unwrap();
        for (slot, &tag) in tags.iter().enumerate() {
            let result = cross_validate(&MethodConfig::new(tag), &ds, &plan, &src).unwrap();
            sums[slot] += result.mean_gm().expect("GM defined on every seed");
        }
    }
    let [eub, bst, bgg, rub] = sums.map(|s| s / 10.0);
    println!(
        "criterion 6 means: GM(EUB) = {eub:.4}, GM(BST) = {bst:.4}, GM(BGG) = {bgg:.4}, GM(RUB) = {rub:.4}"
    );
    assert!(eub >= bst + 0.05, "GM(EUB) = {eub:.4} not >= GM(BST) + 0.05 = {:.4}", bst + 0.05);
    assert!(eub >= bgg + 0.05, "GM(EUB) = {eub:.4} not >= GM(BGG) + 0.05 = {:.4}", bgg + 0.05);
    assert!(eub >= rub - 0.02, "GM(EUB) = {eub:.4} not >= GM(RUB) - 0.02 = {:.4}", rub - 0.02);
    println!("criterion 6 (qualitative ordering): pass");
}

/// Reference two-sided signed-rank p-value by full sign-pattern enumeration,
/// using plain average ranks (multiples of 0.5, exact in floating point).
fn reference_wilcoxon(a: &[f64], b: &[f64]) -> Option<f64> {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return None;
    }
    let n = diffs.len();
    let mut by_abs: Vec<usize> = (0..n).collect();
    by_abs.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).unwrap());
    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[by_abs[j + 1]].abs() == diffs[by_abs[i]].abs() {
            j += 1;
        }
        let avg = ((i + 1)..=(j + 1)).sum::<usize>() as f64 / (j - i + 1) as f64;
        for &idx in &by_abs[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    let w_plus: f64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| ranks[i]).sum();
    let patterns = 1u64 << n;
    let (mut ge, mut le) = (0u64, 0u64);
    for bits in 0..patterns {
        let w: f64 = (0..n).filter(|&i| bits & (1 << i) != 0).map(|i| ranks[i]).sum();
        if w >= w_plus {
            ge += 1;
        }
        if w <= w_plus {
            le += 1;
        }
    }
    let p_ge = ge as f64 / patterns as f64;
    let p_le = le as f64 / patterns as f64;
    Some((2.0 * p_ge.min(p_le)).min(1.0))
}

#[test]
fn criterion_7_wilcoxon_exact_oracle() {
    let mut rng = RandomSource::new(77).stream("wilcoxon-fuzz");
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(1..=12usize);
        // a grid of quarter-steps produces plenty of ties and zero diffs
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=8) as f64 / 4.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=8) as f64 / 4.0).collect();
        match (wilcoxon_signed_rank(&a, &b), reference_wilcoxon(&a, &b)) {
            (Ok(p), Some(expected)) => {
                assert_eq!(p, expected, "p-value mismatch for a = {a:?}, b = {b:?}");
                checked += 1;
            }
            (Err(_), None) => {} // all diffs zero: both routes refuse
            (lib, oracle) => panic!("disagreement on degeneracy: {lib:?} vs {oracle:?}"),
        }
    }
    println!("criterion 7 (Wilcoxon exact oracle): pass (200 samples)");
}

#[test]
fn criterion_8_adaboost_convergence() {
    // separable in 1-D but not by any single stump: three alternating bands
    let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
    let labels: Vec<String> = ["n", "n", "n", "p", "p", "p", "n", "n", "n", "n"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let ds = make_dataset(xs.iter().map(|&x| vec![x]).collect(), &labels).unwrap();
    let ensemble =
        train_adaboost(&ds, 10, &WeakLearnerSpec::stump(), &RandomSource::new(8)).unwrap();
    let model = Model::Boosted(ensemble);
    let errors = ds
        .instances()
        .iter()
        .filter(|inst| model.predict(&inst.features).unwrap().0 != inst.label)
        .count();
    assert_eq!(errors, 0, "{errors} training errors remain after 10 rounds");
    println!("criterion 8 (AdaBoost convergence): pass");
}

#[test]
fn criterion_9_determinism_and_persistence() {
    let bin = env!("CARGO_BIN_EXE_eusboost");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(out.status.success(), "command {args:?} failed: {:?}", out);
        out.stdout
    };

    let data = path("d.csv");
    run(&["gen", "--n", "150", "--ir", "4", "--delta", "1.5", "--seed", "11", "--out", &data]);
    for (m1, m2) in [("a1.json", "a2.json")] {
        let (p1, p2) = (path(m1), path(m2));
        run(&["train", "--method", "eub", "--data", &data, "--seed", "5", "--out", &p1]);
        run(&["train", "--method", "eub", "--data", &data, "--seed", "5", "--out", &p2]);
        let bytes1 = std::fs::read(&p1).unwrap();
        let bytes2 = std::fs::read(&p2).unwrap();
        assert_eq!(bytes1, bytes2, "model files differ under identical seeds");
    }
    let report1 = run(&["compare", "--data", &data, "--seed", "5", "--folds", "3", "--repeats", "1"]);
    let report2 = run(&["compare", "--data", &data, "--seed", "5", "--folds", "3", "--repeats", "1"]);
    assert_eq!(report1, report2, "compare reports differ under identical seeds");

    // save/load round-trip preserves predictions on 100 fuzz points
    let ds = generate_synthetic(&SyntheticSpec { n: 150, dims: 3, ir: 4.0, delta: 1.5, seed: 11 })
        .unwrap();
    let model = ensembles::train_rusboost(&ds, 10, &WeakLearnerSpec::default(), &RandomSource::new(5))
        .unwrap();
    let file = ModelFile {
        version: MODEL_FORMAT_VERSION,
        method: MethodTag::Rub,
        learner: WeakLearnerSpec::default(),
        rounds: 10,
        eus: None,
        seed: 5,
        positive_label: ds.positive_name().to_string(),
        negative_label: ds.negative_name().to_string(),
        dataset_fingerprint: dataset_fingerprint(&ds),
        model: Model::Boosted(model),
    };
    let model_path = dir.path().join("round-trip.json");
    save_model(&file, &model_path).unwrap();
    let loaded = load_model(&model_path).unwrap();
    let mut rng = RandomSource::new(99).stream("fuzz-points");
    for _ in 0..100 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..8.0)).collect();
        assert_eq!(file.model.predict(&x).unwrap(), loaded.model.predict(&x).unwrap());
    }
    println!("criterion 9 (determinism and persistence): pass");
}

#[test]
fn criterion_10_report_shape() {
    let ds = generate_synthetic(&SyntheticSpec { n: 200, dims: 2, ir: 5.0, delta: 1.5, seed: 31 })
        .unwrap();
    let src = RandomSource::new(31);
    let plan = stratified_kfold(&ds, 5, 2, &src.derive("plan")).unwrap();
    let configs: Vec<MethodConfig> = MethodTag::all().iter().map(|&t| MethodConfig::new(t)).collect();
    let report = compare(&configs, &ds, &plan, &src).unwrap();
    let text = render(&report, ReportFormat::Text);

    let is_percent = |s: &str| {
        let s = s.trim();
        s.split_once('.').is_some_and(|(int, frac)| {
            !int.is_empty()
                && int.chars().all(|c| c.is_ascii_digit())
                && frac.len() == 2
                && frac.chars().all(|c| c.is_ascii_digit())
        })
    };
    let mut overall_rows = 0;
    let mut pairwise_rows = 0;
    for line in text.lines() {
        let cells: Vec<&str> = line.split('|').collect();
        let head = cells[0].trim();
        if MethodTag::all().iter().any(|t| t.to_string() == head) {
            assert_eq!(cells.len(), 4, "overall row needs SEN/GM/AUC cells: {line}");
            assert!(cells[1..].iter().all(|c| is_percent(c)), "non-percentage cell in: {line}");
            overall_rows += 1;
        }
        if head.starts_with("EUB vs.") {
            assert_eq!(cells.len(), 4, "pairwise row needs three measure cells: {line}");
            for cell in &cells[1..] {
                let cell = cell.trim();
                let (flag, p) = cell.split_at(1);
                assert!(flag == "+" || flag == "-", "missing direction flag in: {line}");
                let p = p.trim().trim_start_matches('(').trim_end_matches(')');
                let parsed: f64 = p.parse().expect("p-value parses");
                assert!((0.0..=1.0).contains(&parsed), "p-value out of range in: {line}");
            }
            pairwise_rows += 1;
        }
    }
    assert_eq!(overall_rows, 7, "expected 7 overall rows, saw {overall_rows}");
    assert_eq!(pairwise_rows, 6, "expected 6 pairwise rows, saw {pairwise_rows}");
    println!("criterion 10 (report shape): pass");
}
