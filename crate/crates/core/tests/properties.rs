use proptest::prelude::*;

use creditflow::binning::{prebin, BinningConfig, ClassCounts, FeatureBinning, WoeEncoder};
use creditflow::dataset::{
    compute_rate_def, read_csv, stratified_split, ColumnKind, ColumnSchema, DataTable, FeatureMatrix, Label, SplitSpec,
    TargetInfo, Value,
};
use creditflow::metrics::{brier, emp, roc_auc, scored, EmpParams};
use creditflow::models::{EnsembleModel, LogisticModel, ModelSpec, TrainedModel, TrainingData};

fn label(d: bool) -> Label {
    if d {
        Label::Default
    } else {
        Label::NonDefault
    }
}

fn labels_strategy(n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), n)
        .prop_filter("both classes", |y| y.iter().any(|&d| d) && y.iter().any(|&d| !d))
}

fn numeric_table(xs: &[f64], ys: &[bool]) -> DataTable {
    DataTable::new(
        vec![ColumnSchema {
            name: "x".into(),
            kind: ColumnKind::Numeric,
            allows_missing: false,
        }],
        xs.iter().map(|&x| vec![Value::Num(x)]).collect(),
        ys.iter().map(|&d| label(d)).collect(),
        TargetInfo::binary("y"),
    )
    .unwrap()
}

fn woe_column(encoder: &WoeEncoder, table: &DataTable) -> Vec<f64> {
    let encoded = encoder.transform(table).unwrap();
    encoded.rows().iter().map(|r| r[0].as_f64().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(
        nums in prop::collection::vec(prop::option::weighted(0.8, -1e6f64..1e6), 8),
        cats in prop::collection::vec(prop::option::weighted(0.8, "[a-z]{1,4}"), 8),
        ys in labels_strategy(8),
    ) {
        prop_assume!(nums.iter().any(Option::is_some) && cats.iter().any(Option::is_some));
        let schema = vec![
            ColumnSchema { name: "amount".into(), kind: ColumnKind::Numeric, allows_missing: nums.iter().any(Option::is_none) },
            ColumnSchema { name: "purpose".into(), kind: ColumnKind::Categorical, allows_missing: cats.iter().any(Option::is_none) },
        ];
        let rows = nums.iter().zip(&cats).map(|(n, c)| vec![
            n.map_or(Value::Missing, Value::Num),
            c.clone().map_or(Value::Missing, Value::Cat),
        ]).collect();
        let table = DataTable::new(schema, rows, ys.iter().map(|&d| label(d)).collect(), TargetInfo::binary("default")).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "default", "1").unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn stratified_split_preserves_rate(ys in labels_strategy(60), seed in any::<u64>(), frac in 0.5f64..0.9) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let table = numeric_table(&xs, &ys);
        let (train, test) = stratified_split(&table, &SplitSpec { train_fraction: frac, stratified: true, seed }).unwrap();
        let full = compute_rate_def(&table);
        let tol = 1.0 / train.n_rows().min(test.n_rows()) as f64;
        prop_assert!((compute_rate_def(&train) - full).abs() <= tol);
        prop_assert!((compute_rate_def(&test) - full).abs() <= tol);
    }

    #[test]
    fn monotone_relabeling_leaves_woe_unchanged(
        xs in prop::collection::vec(-50i32..50, 80),
        ys in labels_strategy(80),
    ) {
        let raw: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        // strictly increasing and exact in f64
        let mapped: Vec<f64> = raw.iter().map(|&x| x * x * x + 5.0 * x + 1000.0).collect();
        let a = numeric_table(&raw, &ys);
        let b = numeric_table(&mapped, &ys);
        let config = BinningConfig::default();
        let (ea, eb) = (WoeEncoder::fit(&a, &config).unwrap(), WoeEncoder::fit(&b, &config).unwrap());
        match (&ea.features[0].binning, &eb.features[0].binning) {
            (FeatureBinning::Fitted { .. }, FeatureBinning::Fitted { .. }) => {
                prop_assert_eq!(woe_column(&ea, &a), woe_column(&eb, &b));
            }
            (FeatureBinning::Excluded { .. }, FeatureBinning::Excluded { .. }) => {}
            _ => prop_assert!(false, "feasibility differs"),
        }
        let labels: Vec<Label> = ys.iter().map(|&d| label(d)).collect();
        let pa = prebin(&a.rows().iter().map(|r| r[0].clone()).collect::<Vec<_>>(), &labels, 20).unwrap();
        let pb = prebin(&b.rows().iter().map(|r| r[0].clone()).collect::<Vec<_>>(), &labels, 20).unwrap();
        let counts = |p: &creditflow::binning::Prebinning| p.prebins.iter().map(|b| b.counts).collect::<Vec<_>>();
        prop_assert_eq!(counts(&pa), counts(&pb));
    }

    #[test]
    fn iv_non_negative_and_bounded_by_prebins(
        xs in prop::collection::vec(0i32..30, 120),
        ys in labels_strategy(120),
    ) {
        let raw: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let table = numeric_table(&raw, &ys);
        let encoder = WoeEncoder::fit(&table, &BinningConfig::default()).unwrap();
        if let FeatureBinning::Fitted { solution } = &encoder.features[0].binning {
            prop_assert!(solution.iv >= 0.0);
            let all_zero = solution.all_bins().all(|b| b.woe == 0.0);
            prop_assert_eq!(solution.iv == 0.0, all_zero);

            let labels: Vec<Label> = ys.iter().map(|&d| label(d)).collect();
            let p = prebin(&table.rows().iter().map(|r| r[0].clone()).collect::<Vec<_>>(), &labels, 20).unwrap();
            let totals = p.totals();
            if p.prebins.iter().all(|b| b.counts.has_both_classes()) {
                let iv = |c: ClassCounts| {
                    let p0 = c.n_nonevent as f64 / totals.n_nonevent as f64;
                    let p1 = c.n_event as f64 / totals.n_event as f64;
                    (p0 - p1) * (p0 / p1).ln()
                };
                let unconstrained: f64 = p.prebins.iter().map(|b| iv(b.counts)).sum();
                prop_assert!(solution.objective <= unconstrained + 1e-12);
            }
        }
    }

    #[test]
    fn encoder_is_deterministic(xs in prop::collection::vec(0i32..200, 100), ys in labels_strategy(100)) {
        let raw: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let table = numeric_table(&raw, &ys);
        let a = WoeEncoder::fit(&table, &BinningConfig::default()).unwrap();
        let b = WoeEncoder::fit(&table, &BinningConfig::default()).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn auc_invariant_under_increasing_maps(p in prop::collection::vec(0.0f64..1.0, 30), ys in labels_strategy(30)) {
        let labels: Vec<Label> = ys.iter().map(|&d| label(d)).collect();
        let squashed: Vec<f64> = p.iter().map(|v| v * v * 0.5).collect();
        let a = roc_auc(&scored(&p, &labels).unwrap()).unwrap();
        let b = roc_auc(&scored(&squashed, &labels).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        let flipped: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
        let c = roc_auc(&scored(&flipped, &labels).unwrap()).unwrap();
        prop_assert!((a + c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brier_bounds_and_calibrated_constant(p in prop::collection::vec(0.0f64..=1.0, 25), ys in labels_strategy(25)) {
        let labels: Vec<Label> = ys.iter().map(|&d| label(d)).collect();
        let b = brier(&scored(&p, &labels).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        let rate = ys.iter().filter(|&&d| d).count() as f64 / ys.len() as f64;
        let constant = vec![rate; ys.len()];
        let bc = brier(&scored(&constant, &labels).unwrap()).unwrap();
        prop_assert!((bc - rate * (1.0 - rate)).abs() < 1e-12);
    }

    #[test]
    fn emp_monotone_in_costs(
        p in prop::collection::vec(0.0f64..1.0, 20),
        ys in labels_strategy(20),
        b0 in 0.0f64..1.0, db in 0.0f64..0.5,
        c1 in 0.0f64..1.0, dc in 0.0f64..0.5,
    ) {
        let samples = scored(&p, &ys.iter().map(|&d| label(d)).collect::<Vec<_>>()).unwrap();
        let at = |b0: f64, c1: f64| emp(&samples, &EmpParams::point(b0, c1, 0.0)).unwrap().emp;
        prop_assert!(at(b0 + db, c1) >= at(b0, c1) - 1e-12);
        prop_assert!(at(b0, c1 + dc) <= at(b0, c1) + 1e-12);
    }

    #[test]
    fn ensemble_vote_invariant_to_weight_scale(
        logits in prop::collection::vec(-3.0f64..3.0, 2..6),
        raw in prop::collection::vec(0.01f64..5.0, 6),
        scale in 0.001f64..1000.0,
    ) {
        let members: Vec<TrainedModel> = logits
            .iter()
            .map(|&z| TrainedModel::Logistic(LogisticModel { alpha0: z, alpha: vec![0.0] }))
            .collect();
        let w: Vec<f64> = raw[..members.len()].to_vec();
        let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let a = EnsembleModel::new(members.clone(), w).unwrap();
        let b = EnsembleModel::new(members, scaled).unwrap();
        prop_assert_eq!(a.vote(&[0.0]).unwrap(), b.vote(&[0.0]).unwrap());
    }
}

fn toy_training(seed: u64) -> TrainingData {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..120)
        .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let y = rows
        .iter()
        .map(|r| {
            if r[0] - 0.5 * r[1] + rng.gen_range(-0.3..0.3) > 0.0 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    TrainingData::new(FeatureMatrix::from_rows(&rows), y).unwrap()
}

fn small_specs() -> Vec<ModelSpec> {
    use creditflow::models::{EmlpParams, ForestParams, LogisticParams, MlpParams, TreeParams};
    let mlp = MlpParams {
        epochs: 8,
        ..Default::default()
    };
    vec![
        ModelSpec::Lr(LogisticParams::default()),
        ModelSpec::Ct(TreeParams::default()),
        ModelSpec::Rf(ForestParams {
            n_trees: 15,
            ..Default::default()
        }),
        ModelSpec::Mlp(mlp.clone()),
        ModelSpec::Emlp(EmlpParams {
            n_members: 3,
            mlp,
            ..Default::default()
        }),
    ]
}

#[test]
fn trainers_are_deterministic_and_predict_probabilities() {
    let data = toy_training(3);
    for spec in small_specs() {
        let a = spec.train(&data, None, 17).unwrap();
        let b = spec.train(&data, None, 17).unwrap();
        assert_eq!(a, b, "{}", spec.name());
        let probe = FeatureMatrix::from_rows(&[vec![5.0, -5.0, 0.0], vec![-9.0, 9.0, 1.0], vec![0.0, 0.0, 0.0]]);
        for p in a
            .predict_matrix(&data.x)
            .unwrap()
            .into_iter()
            .chain(a.predict_matrix(&probe).unwrap())
        {
            assert!((0.0..=1.0).contains(&p), "{}: {p}", spec.name());
        }
    }
}

#[test]
fn model_json_round_trip_preserves_predictions() {
    use creditflow::models::ModelDocument;
    let data = toy_training(4);
    for spec in small_specs() {
        let model = spec.train(&data, None, 5).unwrap();
        let doc = ModelDocument::new(spec.clone(), 5, vec!["a".into(), "b".into(), "c".into()], model.clone());
        let back = ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(
            back.model.predict_matrix(&data.x).unwrap(),
            model.predict_matrix(&data.x).unwrap()
        );
        assert_eq!(back.spec, spec);
    }
}
