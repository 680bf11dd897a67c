//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs with `cargo test -p creditflow --test acceptance`. Benchmark CSVs
//! are read from `data/` or `$CREDITFLOW_DATA_DIR`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use creditflow::binning::{
    optimize_bins, BinMembers, BinningConfig, BinningConstraints, ClassCounts, FeatureBinning, PreBin, WoeEncoder,
};
use creditflow::dataset::FeatureMatrix;
use creditflow::dataset::{compute_rate_def, Label, SplitSpec};
use creditflow::metrics::{emp, roc_auc, scored, CostPoint, EmpParams, ScoredSample};
use creditflow::models::{
    focal_loss, logistic_loss_and_grad, mlp_loss_and_grad, Activation, EmlpParams, FocalLossParams, ForestParams,
    LogisticModel, LogisticParams, Loss, MlpModel, MlpParams, ModelSpec, TrainingData, TreeParams,
};
use creditflow::optimizer::{
    default_space, evolve, fast_nondominated_sort, optimize_model, Gene, Individual, ModelKind, NsgaConfig, Parameter,
    SearchSpace,
};
use creditflow::pipeline::{self, benchmark, load_benchmark, Benchmark, BENCHMARKS};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.1}s]", out.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {}s limit", out.detail, limit.as_secs());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1. dataset counts

fn criterion_1() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for b in BENCHMARKS {
        match load_benchmark(&b) {
            Ok(t) => {
                let rate = compute_rate_def(&t);
                let ok = t.n_rows() == b.n_cases && (rate - b.rate_def).abs() <= 0.005;
                pass &= ok;
                parts.push(format!(
                    "{} n={} rate_def={:.4}{}",
                    b.name,
                    t.n_rows(),
                    rate,
                    if ok { "" } else { " MISMATCH" }
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", b.name));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 2-3. held-out AUC

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn mean_test_auc(b: &Benchmark, specs: &[ModelSpec]) -> Result<Vec<f64>, String> {
    let table = load_benchmark(b).map_err(|e| e.to_string())?;
    let mut sums = vec![0.0; specs.len()];
    for seed in SEEDS {
        let split = SplitSpec {
            train_fraction: 0.8,
            stratified: true,
            seed,
        };
        let prepared = pipeline::prepare(&table, &split, &BinningConfig::default()).map_err(|e| e.to_string())?;
        for (k, spec) in specs.iter().enumerate() {
            let (_, row) = pipeline::train_and_score(spec, &prepared, &EmpParams::default(), seed)
                .map_err(|e| format!("{}: {e}", spec.name()))?;
            sums[k] += row.auc;
        }
    }
    Ok(sums.into_iter().map(|s| s / SEEDS.len() as f64).collect())
}

fn criterion_2() -> Outcome {
    let ger = benchmark("GER").unwrap();
    let specs = [
        ModelSpec::Lr(LogisticParams::default()),
        ModelSpec::Rf(ForestParams::default()),
        ModelSpec::Mlp(MlpParams::default()),
    ];
    let published = [0.800, 0.792, 0.799];
    match mean_test_auc(&ger, &specs) {
        Ok(aucs) => {
            let mut pass = true;
            let parts: Vec<String> = specs
                .iter()
                .zip(aucs.iter().zip(published))
                .map(|(s, (&a, p))| {
                    let ok = (a - p).abs() <= 0.05;
                    pass &= ok;
                    format!("{} {:.4} (target {p:.3} ± 0.05)", s.name(), a)
                })
                .collect();
            Outcome::new(pass, parts.join(", "))
        }
        Err(e) => Outcome::new(false, e),
    }
}

fn criterion_3() -> Outcome {
    let specs = [
        ModelSpec::Mlp(MlpParams::default()),
        ModelSpec::Emlp(EmlpParams::default()),
        ModelSpec::Ct(TreeParams::default()),
        ModelSpec::Rf(ForestParams::default()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["GER", "HECL"] {
        let b = benchmark(name).unwrap();
        match mean_test_auc(&b, &specs) {
            Ok(a) => {
                let ok = a[1] >= a[0] - 0.01 && a[3] >= a[2] - 0.01;
                pass &= ok;
                parts.push(format!(
                    "{name}: MLP {:.4} EMLP {:.4} CT {:.4} RF {:.4}{}",
                    a[0],
                    a[1],
                    a[2],
                    a[3],
                    if ok { "" } else { " ORDER VIOLATED" }
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 4. NSGA-II front on GER

fn criterion_4() -> Outcome {
    let ger = benchmark("GER").unwrap();
    let table = match load_benchmark(&ger) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let prepared = match pipeline::prepare_three_way(&table, 0.6, 0.2, 42, &BinningConfig::default()) {
        Ok(p) => p,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let config = NsgaConfig {
        pop_size: 16,
        generations: 10,
        seed: 42,
        ..Default::default()
    };
    let space = default_space(ModelKind::Rf);
    let result = match optimize_model(
        ModelKind::Rf,
        &space,
        &prepared.train,
        prepared.validation.as_ref().unwrap(),
        &EmpParams::default(),
        &config,
    ) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let distinct = result.front.distinct_points();
    let mutual = distinct
        .iter()
        .any(|a| distinct.iter().any(|b| creditflow::optimizer::dominates(*a, *b)));
    let ok = distinct.len() >= 3 && !mutual && result.front.audit().is_ok();
    // context only: the verdict is the seed-42 run above
    let spread: Vec<String> = (0..10u64)
        .map(|seed| {
            let size = pipeline::prepare_three_way(&table, 0.6, 0.2, seed, &BinningConfig::default())
                .ok()
                .and_then(|p| {
                    let config = NsgaConfig { seed, ..config.clone() };
                    optimize_model(
                        ModelKind::Rf,
                        &space,
                        &p.train,
                        p.validation.as_ref()?,
                        &EmpParams::default(),
                        &config,
                    )
                    .ok()
                })
                .map(|r| r.front.distinct_points().len());
            size.map_or("err".into(), |n| n.to_string())
        })
        .collect();
    Outcome::new(
        ok,
        format!(
            "{} distinct front points, {} evaluations, dominance inside front: {mutual}; front sizes for seeds 0-9: [{}]",
            distinct.len(),
            result.trials.len(),
            spread.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. AUC vs pairwise brute force

fn brute_force_auc(scores: &[f64], defaults: &[bool]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !defaults[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if defaults[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                credit += 1.0;
            } else if si == sj {
                credit += 0.5;
            }
        }
    }
    credit / pairs
}

fn random_samples(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<bool>) {
    loop {
        // coarse grids force ties
        let levels = [4u32, 20, 1000][rng.gen_range(0..3)];
        let p: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..=levels) as f64 / levels as f64)
            .collect();
        let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.35)).collect();
        if y.iter().any(|&d| d) && y.iter().any(|&d| !d) {
            return (p, y);
        }
    }
}

fn to_samples(p: &[f64], y: &[bool]) -> Vec<ScoredSample> {
    let labels: Vec<Label> = y
        .iter()
        .map(|&d| if d { Label::Default } else { Label::NonDefault })
        .collect();
    scored(p, &labels).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=200);
        let (p, y) = random_samples(&mut rng, n);
        let got = roc_auc(&to_samples(&p, &y)).unwrap();
        worst = worst.max((got - brute_force_auc(&p, &y)).abs());
    }
    Outcome::new(worst <= 1e-9, format!("1000 instances, max |diff| {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 6. focal loss reduction and ordering

fn criterion_6() -> Outcome {
    let ce = FocalLossParams::new(1.0, 0.0).unwrap();
    let focal = FocalLossParams::new(1.0, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut ordered = true;
    for k in 1..=99 {
        let p_t = k as f64 / 100.0;
        worst = worst.max((focal_loss(p_t, &ce) + p_t.ln()).abs());
        ordered &= focal_loss(p_t, &focal) <= focal_loss(p_t, &ce);
    }
    Outcome::new(
        worst <= 1e-12 && ordered,
        format!("max |FL - CE| {worst:.2e}, FL(gamma=2) <= FL(gamma=0) on all 99 points: {ordered}"),
    )
}

// ---------------------------------------------------------------------------
// 7. analytic gradients vs central differences

fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = analytic
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt()
        .max(numeric.iter().map(|b| b * b).sum::<f64>().sqrt());
    if scale < 1e-10 {
        diff
    } else {
        diff / scale
    }
}

fn random_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> TrainingData {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y = (0..n).map(|_| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).collect();
    TrainingData::new(FeatureMatrix::from_rows(&rows), y).unwrap()
}

fn random_loss(rng: &mut ChaCha8Rng) -> Loss {
    Loss::Focal(FocalLossParams::new(rng.gen_range(0.1..0.9), rng.gen_range(0.0..5.0)).unwrap())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-6;
    let (mut worst_lr, mut worst_mlp): (f64, f64) = (0.0, 0.0);
    for instance in 0..50 {
        let n = rng.gen_range(3..12);
        let d = rng.gen_range(1..5);
        let data = random_data(&mut rng, n, d);
        let loss = random_loss(&mut rng);

        let l2 = rng.gen_range(0.0..0.5);
        let model = LogisticModel {
            alpha0: rng.gen_range(-1.0..1.0),
            alpha: (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let (_, grad) = logistic_loss_and_grad(&model, &data, &loss, l2);
        let mut numeric = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let shifted = |delta: f64| {
                let mut m = model.clone();
                if k == 0 {
                    m.alpha0 += delta;
                } else {
                    m.alpha[k - 1] += delta;
                }
                logistic_loss_and_grad(&m, &data, &loss, l2).0
            };
            numeric.push((shifted(h) - shifted(-h)) / (2.0 * h));
        }
        worst_lr = worst_lr.max(relative_error(&grad, &numeric));

        let activation = if instance % 2 == 0 {
            Activation::Tanh
        } else {
            Activation::Relu
        };
        let hidden: Vec<usize> = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(2..5)).collect();
        let mut mlp = MlpModel::init(d, &hidden, activation, 0);
        // random biases too: zero biases put dead ReLU units exactly on the kink
        for w in mlp.params.iter_mut() {
            *w = rng.gen_range(-1.0..1.0);
        }
        let rows: Vec<usize> = (0..n).collect();
        let (_, grad) = mlp_loss_and_grad(&mlp, &data, &rows, &loss);
        let numeric: Vec<f64> = (0..mlp.params.len())
            .map(|k| {
                let shifted = |delta: f64| {
                    let mut m = mlp.clone();
                    m.params[k] += delta;
                    mlp_loss_and_grad(&m, &data, &rows, &loss).0
                };
                (shifted(h) - shifted(-h)) / (2.0 * h)
            })
            .collect();
        worst_mlp = worst_mlp.max(relative_error(&grad, &numeric));
    }
    Outcome::new(
        worst_lr < 1e-4 && worst_mlp < 1e-4,
        format!("50 instances, max relative error LR {worst_lr:.2e}, MLP {worst_mlp:.2e}"),
    )
}

// ---------------------------------------------------------------------------
// 8. binning audit and exact merge search

fn iv_of(counts: ClassCounts, totals: ClassCounts) -> f64 {
    let p0 = counts.n_nonevent as f64 / totals.n_nonevent as f64;
    let p1 = counts.n_event as f64 / totals.n_event as f64;
    (p0 - p1) * (p0 / p1).ln()
}

/// Best IV over every contiguous partition of `counts`, or `None` if no
/// partition satisfies the constraints.
fn brute_force_best_iv(counts: &[ClassCounts], totals: ClassCounts, c: &BinningConstraints) -> Option<f64> {
    let n = counts.len();
    let floor = c.min_bin_fraction * totals.total() as f64;
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << (n - 1)) {
        // bit i set: cut between prebin i and i + 1
        let mut bins = Vec::new();
        let mut acc = ClassCounts::default();
        for (i, &cc) in counts.iter().enumerate() {
            acc = acc + cc;
            if i == n - 1 || mask & (1 << i) != 0 {
                bins.push(acc);
                acc = ClassCounts::default();
            }
        }
        let feasible = bins.len() <= c.max_bins
            && bins
                .iter()
                .all(|b| b.total() as f64 >= floor - 1e-9 && b.n_event > 0 && b.n_nonevent > 0);
        if feasible {
            let iv: f64 = bins.iter().map(|&b| iv_of(b, totals)).sum();
            best = Some(best.map_or(iv, |x: f64| x.max(iv)));
        }
    }
    best
}

fn criterion_8() -> Outcome {
    let constraints = BinningConstraints::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for b in BENCHMARKS {
        let table = match load_benchmark(&b) {
            Ok(t) => t,
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", b.name));
                continue;
            }
        };
        let encoder = match WoeEncoder::fit(&table, &BinningConfig::default()) {
            Ok(e) => e,
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", b.name));
                continue;
            }
        };
        let mut problems = Vec::new();
        let mut fitted = 0;
        for (j, f) in encoder.features.iter().enumerate() {
            if let FeatureBinning::Fitted { solution } = &f.binning {
                fitted += 1;
                for p in creditflow::binning::audit_solution(solution, &constraints) {
                    problems.push(format!("{}: {p}", f.name));
                }
                let has_missing = table.column(j).any(|v| v.is_missing());
                let isolated = solution
                    .missing_bin
                    .as_ref()
                    .is_some_and(|m| matches!(m.members, BinMembers::Missing));
                if has_missing && !isolated {
                    problems.push(format!("{}: missing values not isolated", f.name));
                }
            }
        }
        pass &= problems.is_empty();
        parts.push(format!(
            "{}: {fitted} features audited, {} problems{}",
            b.name,
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    let mut mismatches = 0;
    for _ in 0..300 {
        let n = rng.gen_range(1..=12);
        let counts: Vec<ClassCounts> = (0..n)
            .map(|_| ClassCounts::new(rng.gen_range(0..15), rng.gen_range(0..40)))
            .collect();
        let missing = ClassCounts::new(rng.gen_range(0..4), rng.gen_range(0..6));
        let totals = counts.iter().fold(missing, |acc, &c| acc + c);
        if totals.n_event == 0 || totals.n_nonevent == 0 {
            continue;
        }
        let prebins: Vec<PreBin> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| PreBin {
                members: BinMembers::Interval {
                    lo: (i > 0).then_some(i as f64),
                    hi: (i + 1 < n).then_some(i as f64 + 1.0),
                },
                counts: c,
            })
            .collect();
        let c = BinningConstraints {
            max_bins: rng.gen_range(2..=12),
            ..constraints.clone()
        };
        let expected = brute_force_best_iv(&counts, totals, &c);
        let got = optimize_bins(&prebins, &c, totals).ok().map(|s| s.objective);
        checked += 1;
        let agree = match (expected, got) {
            (Some(e), Some(g)) => (e - g).abs() <= 1e-9,
            (None, None) => true,
            _ => false,
        };
        if !agree {
            mismatches += 1;
        }
    }
    pass &= mismatches == 0;
    parts.push(format!(
        "{checked} random instances vs brute force, {mismatches} mismatches"
    ));
    Outcome::new(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 9. EMP reductions

/// Profit at every threshold `t` drawn from the scores themselves and
/// `-inf`, rejecting applicants whose credit score is `<= t`.
fn brute_force_max_profit(p: &[f64], y: &[bool], b0: f64, c1: f64, c_star: f64) -> f64 {
    let n = p.len() as f64;
    let n_def = y.iter().filter(|&&d| d).count() as f64;
    let n_good = n - n_def;
    let (pi0, pi1) = (n_def / n, n_good / n);
    let scores: Vec<f64> = p.iter().map(|&v| 1.0 - v).collect();
    let mut thresholds = scores.clone();
    thresholds.push(f64::NEG_INFINITY);
    thresholds
        .iter()
        .map(|&t| {
            let f0 = scores.iter().zip(y).filter(|(&s, &d)| d && s <= t).count() as f64 / n_def;
            let f1 = scores.iter().zip(y).filter(|(&s, &d)| !d && s <= t).count() as f64 / n_good;
            (b0 - c_star) * pi0 * f0 - (c1 - c_star) * pi1 * f1
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_point, mut worst_grid): (f64, f64) = (0.0, 0.0);
    for _ in 0..300 {
        let n = rng.gen_range(2..=50);
        let (p, y) = random_samples(&mut rng, n);
        let samples = to_samples(&p, &y);

        let (b0, c1) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let c_star = rng.gen_range(0.0..0.1);
        let got = emp(&samples, &EmpParams::point(b0, c1, c_star)).unwrap().emp;
        worst_point = worst_point.max((got - brute_force_max_profit(&p, &y, b0, c1, c_star)).abs());

        let k = rng.gen_range(2..6);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let h: Vec<CostPoint> = raw
            .iter()
            .map(|w| CostPoint {
                b0: rng.gen_range(0.0..1.0),
                c1: rng.gen_range(0.0..1.0),
                weight: w / total,
            })
            .collect();
        let params = EmpParams {
            h: h.clone(),
            ..Default::default()
        };
        let got = emp(&samples, &params).unwrap().emp;
        let expected: f64 = h
            .iter()
            .map(|pt| pt.weight * brute_force_max_profit(&p, &y, pt.b0, pt.c1, 0.0))
            .sum();
        worst_grid = worst_grid.max((got - expected).abs());
    }
    Outcome::new(
        worst_point <= 1e-9 && worst_grid <= 1e-9,
        format!("300 toys, max |diff| point-h {worst_point:.2e}, grid-h {worst_grid:.2e}"),
    )
}

// ---------------------------------------------------------------------------
// 10. non-dominated sorting and toy search

fn brute_force_fronts(points: &[(f64, f64)]) -> Vec<BTreeSet<usize>> {
    let dom = |a: (f64, f64), b: (f64, f64)| a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1);
    let mut remaining: BTreeSet<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: BTreeSet<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dom(points[j], points[i])))
            .collect();
        remaining = remaining.difference(&front).copied().collect();
        fronts.push(front);
    }
    fronts
}

fn toy_objectives(x: i64, y: i64) -> (f64, f64) {
    let xf = x as f64;
    (xf, (7.0 - xf).powi(2) / 7.0 - 0.5 * (y - 3).abs() as f64)
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sort_mismatch = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=500);
        let levels = [3, 10, 1000][rng.gen_range(0..3)];
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0..levels) as f64, rng.gen_range(0..levels) as f64))
            .collect();
        let pop: Vec<Individual> = points
            .iter()
            .enumerate()
            .map(|(i, &o)| Individual {
                trial: i,
                genome: vec![],
                objectives: Some(o),
                rank: 0,
                crowding: 0.0,
                infeasible: None,
            })
            .collect();
        let got: Vec<BTreeSet<usize>> = fast_nondominated_sort(&pop)
            .unwrap()
            .into_iter()
            .map(|f| f.into_iter().collect())
            .collect();
        if got != brute_force_fronts(&points) {
            sort_mismatch += 1;
        }
    }

    let space = SearchSpace::new(vec![Parameter::integer("x", 0, 7), Parameter::integer("y", 0, 7)]).unwrap();
    let grid: Vec<(i64, i64)> = (0..=7).flat_map(|x| (0..=7).map(move |y| (x, y))).collect();
    let grid_points: Vec<(f64, f64)> = grid.iter().map(|&(x, y)| toy_objectives(x, y)).collect();
    let expected: BTreeSet<(i64, i64)> = brute_force_fronts(&grid_points)[0].iter().map(|&i| grid[i]).collect();
    let config = NsgaConfig {
        pop_size: 20,
        generations: 40,
        seed: 10,
        ..Default::default()
    };
    let result = evolve(&space, &config, |g, _| match (g[0], g[1]) {
        (Gene::Int(x), Gene::Int(y)) => Ok(toy_objectives(x, y)),
        _ => Err("bad genome".into()),
    });
    let got: BTreeSet<(i64, i64)> = match &result {
        Ok(r) => r
            .front
            .members
            .iter()
            .map(|m| match (m.genome[0], m.genome[1]) {
                (Gene::Int(x), Gene::Int(y)) => (x, y),
                _ => (-1, -1),
            })
            .collect(),
        Err(_) => BTreeSet::new(),
    };
    let ok = sort_mismatch == 0 && got == expected;
    Outcome::new(
        ok,
        format!(
            "200 populations, {sort_mismatch} sort mismatches; toy front {} of {} brute-force points{}",
            got.intersection(&expected).count(),
            expected.len(),
            if got == expected { "" } else { " (sets differ)" }
        ),
    )
}

type Criterion = (u32, &'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "benchmark case counts and default rates", Some(30), criterion_1),
        (2, "GER held-out AUC bands for LR, RF, MLP", Some(300), criterion_2),
        (
            3,
            "ensembles do not degrade base learners (GER, HECL)",
            Some(900),
            criterion_3,
        ),
        (4, "NSGA-II RF front on GER", Some(600), criterion_4),
        (5, "AUC equals pairwise Mann-Whitney", None, criterion_5),
        (6, "focal loss reduces to cross-entropy", None, criterion_6),
        (7, "analytic gradients match central differences", None, criterion_7),
        (8, "binning constraint audit and exact merge search", None, criterion_8),
        (9, "EMP equals brute-force profit maximization", None, criterion_9),
        (10, "non-dominated sorting and toy Pareto search", None, criterion_10),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let out = timed(limit.map(Duration::from_secs), run);
        println!(
            "criterion {id:>2} {}: {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !out.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
