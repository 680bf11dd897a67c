use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;

use creditflow::binning::FeatureBinning;
use creditflow::dataset::{self, read_csv, DataTable, FeatureMatrix, SplitSpec, Value};
use creditflow::metrics::{write_metrics_csv, MetricsRow};
use creditflow::models::{derive_seed, ModelDocument, TrainingData};
use creditflow::optimizer::{self, decode, optimize_model, EvolveResult, SearchSpace};
use creditflow::pipeline::{self, Prepared};

use crate::config::RunConfig;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    Ok(&cfg.out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_metrics(dir: &Path, stem: &str, rows: &[MetricsRow]) -> Result<()> {
    write_json(&dir.join(format!("{stem}.json")), &rows)?;
    let path = dir.join(format!("{stem}.csv"));
    write_metrics_csv(rows, create(&path)?).map_err(|e| CliError::io(&path, e))
}

/// Writes the resolved config into the output directory.
pub fn echo_config(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg)?;
    write_text(&dir.join("config.json"), &(cfg.to_json() + "\n"))
}

fn load_table(cfg: &RunConfig) -> Result<DataTable> {
    let table = dataset::load_csv(cfg.data_path(), cfg.target(), &cfg.data.positive)?;
    info!("loaded {} rows, {} features", table.n_rows(), table.n_features());
    Ok(table.drop_columns(&cfg.data.drop)?)
}

fn split_spec(cfg: &RunConfig) -> SplitSpec {
    SplitSpec {
        train_fraction: cfg.split.train_fraction,
        stratified: cfg.split.stratified,
        seed: cfg.seed,
    }
}

fn check_features(table: &DataTable) -> Result<()> {
    if table.n_features() == 0 {
        return Err(CliError::Config("no features remain".into()));
    }
    Ok(())
}

fn report_excluded(prepared: &Prepared) {
    for f in &prepared.encoder.features {
        if let FeatureBinning::Excluded { reason } = &f.binning {
            warn!("feature `{}` excluded: {reason}", f.name);
            eprintln!("excluded {}: {reason}", f.name);
        }
    }
}

/// Splits, fits the encoder on the training rows and writes the encoding
/// artifacts.
fn encode_to(cfg: &RunConfig, dir: &Path) -> Result<(DataTable, Prepared)> {
    let table = load_table(cfg)?;
    check_features(&table)?;
    let (train, test) = dataset::stratified_split(&table, &split_spec(cfg))?;
    let prepared = pipeline::prepare_tables(&train, None, &test, &cfg.binning)?;
    report_excluded(&prepared);
    let encoder = &prepared.encoder;
    let encoded = encoder.transform(&table)?;
    encoded.write_csv_path(dir.join("encoded.csv"))?;
    encoder
        .transform(&train)?
        .write_csv_path(dir.join("encoded_train.csv"))?;
    encoder.transform(&test)?.write_csv_path(dir.join("encoded_test.csv"))?;
    let json = encoder.to_json().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(&dir.join("binning.json"), &(json + "\n"))?;
    let path = dir.join("bin_table.csv");
    encoder
        .write_report_csv(create(&path)?)
        .map_err(|e| CliError::io(&path, e))?;
    Ok((encoded, prepared))
}

pub fn encode(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg)?;
    let (encoded, prepared) = encode_to(cfg, dir)?;
    println!(
        "encoded {} rows, {} features ({} excluded) -> {}",
        encoded.n_rows(),
        prepared.features.len(),
        prepared.encoder.excluded().len(),
        dir.join("encoded.csv").display()
    );
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg)?;
    let (_, prepared) = encode_to(cfg, dir)?;
    let (model, row) = pipeline::train_and_score(&cfg.model, &prepared, &cfg.emp, cfg.seed)?;
    let doc = ModelDocument::new(cfg.model.clone(), cfg.seed, prepared.features.clone(), model);
    write_text(&dir.join("model.json"), &(doc.to_json()? + "\n"))?;
    write_metrics(dir, "metrics", std::slice::from_ref(&row))?;
    print_rows(&[row]);
    Ok(())
}

/// Columns of `table` named by `features`, in that order.
fn select_features(table: &DataTable, features: &[String]) -> Result<TrainingData> {
    let idx = features
        .iter()
        .map(|f| {
            table
                .column_index(f)
                .ok_or_else(|| CliError::Data(format!("arity mismatch: data lacks model feature `{f}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = table
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            idx.iter()
                .zip(features)
                .map(|(&j, name)| match &r[j] {
                    Value::Num(v) => Ok(*v),
                    _ => Err(CliError::Data(format!(
                        "row {i} feature `{name}` is not numeric; pass an encoded file"
                    ))),
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let y = table.target().iter().map(|l| l.outcome()).collect();
    Ok(TrainingData::new(FeatureMatrix::from_rows(&rows), y)?)
}

fn read_model(path: &Path) -> Result<ModelDocument> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let doc = ModelDocument::from_json(&text)?;
    if doc.model.n_features() != doc.features.len() {
        return Err(CliError::Data(format!(
            "{}: model has {} inputs but lists {} features",
            path.display(),
            doc.model.n_features(),
            doc.features.len()
        )));
    }
    Ok(doc)
}

/// Scores each model file on `data` (an encoded CSV), or on the test split
/// rebuilt from the config.
pub fn evaluate(cfg: &RunConfig, models: &[PathBuf], data: Option<&Path>) -> Result<()> {
    let dir = out_dir(cfg)?;
    let table = match data {
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            read_csv(file, cfg.target(), &cfg.data.positive)?
        }
        None => {
            let table = load_table(cfg)?;
            check_features(&table)?;
            let (train, test) = dataset::stratified_split(&table, &split_spec(cfg))?;
            pipeline::prepare_tables(&train, None, &test, &cfg.binning)?
                .encoder
                .transform(&test)?
        }
    };
    let mut rows = Vec::with_capacity(models.len());
    for path in models {
        let doc = read_model(path)?;
        let data = select_features(&table, &doc.features)?;
        rows.push(pipeline::score(doc.spec.name(), &doc.model, &data, &cfg.emp)?);
    }
    write_metrics(dir, "evaluation", &rows)?;
    print_rows(&rows);
    Ok(())
}

#[derive(Serialize)]
struct Knee {
    trial: usize,
    auc: f64,
    emp: f64,
    params: serde_json::Map<String, serde_json::Value>,
}

fn write_search(dir: &Path, space: &SearchSpace, result: &EvolveResult) -> Result<()> {
    let path = dir.join("front.csv");
    optimizer::write_front_csv(space, &result.front.members, create(&path)?)?;
    let path = dir.join("trials.csv");
    optimizer::write_trials_csv(space, &result.trials, create(&path)?)?;
    let path = dir.join("trials.jsonl");
    optimizer::write_trial_log(space, &result.trials, create(&path)?)?;
    let path = dir.join("history.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    let rows = std::iter::once(["generation", "front_size", "hypervolume", "best_hypervolume"].map(String::from))
        .chain(result.history.iter().map(|h| {
            [
                h.generation.to_string(),
                h.front_size.to_string(),
                h.hypervolume.to_string(),
                h.best_hypervolume.to_string(),
            ]
        }));
    for r in rows {
        w.write_record(&r).map_err(|e| CliError::io(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}

pub fn optimize(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg)?;
    let kind = cfg.search_kind();
    let space = cfg.search_space();
    let table = load_table(cfg)?;
    check_features(&table)?;
    let prepared = pipeline::prepare_three_way(
        &table,
        cfg.split.search_train_fraction,
        cfg.split.search_validation_fraction,
        cfg.seed,
        &cfg.binning,
    )?;
    report_excluded(&prepared);
    let validation = prepared.validation.as_ref().expect("three-way split");
    info!(
        "searching {} with pop {} for {} generations",
        kind.name(),
        cfg.search.nsga.pop_size,
        cfg.search.nsga.generations
    );
    let result = optimize_model(kind, &space, &prepared.train, validation, &cfg.emp, &cfg.search.nsga)?;
    write_search(dir, &space, &result)?;

    // refit front members with the seed their trial used and score them on test
    let model_dir = dir.join("models");
    fs::create_dir_all(&model_dir).map_err(|e| CliError::io(&model_dir, e))?;
    let trial_seed = derive_seed(cfg.search.nsga.seed, 1);
    let mut rows = Vec::new();
    for m in &result.front.members {
        let spec = decode(kind, &space, &m.genome)?;
        let model = spec.train(&prepared.train, Some(validation), trial_seed)?;
        let mut row = pipeline::score(spec.name(), &model, &prepared.test, &cfg.emp)?;
        row.model = format!("{}#{}", spec.name(), m.trial);
        rows.push(row);
        let doc = ModelDocument::new(spec, trial_seed, prepared.features.clone(), model);
        write_text(
            &model_dir.join(format!("trial_{}.json", m.trial)),
            &(doc.to_json()? + "\n"),
        )?;
    }
    write_metrics(dir, "front_metrics", &rows)?;

    println!(
        "{} trials, {} front members, hypervolume {:.6}",
        result.trials.len(),
        result.front.members.len(),
        result.front.hypervolume(cfg.search.nsga.reference)
    );
    for m in &result.front.members {
        let (auc, emp) = m.objectives()?;
        println!(
            "  trial {:>4}  auc {auc:.4}  emp {emp:.5}  {}",
            m.trial,
            params_line(&space, m)
        );
    }
    match result.front.knee_point() {
        Some(i) => {
            let m = &result.front.members[i];
            let (auc, emp) = m.objectives()?;
            println!(
                "knee suggestion: trial {} (auc {auc:.4}, emp {emp:.5}); final choice is yours",
                m.trial
            );
            let knee = Knee {
                trial: m.trial,
                auc,
                emp,
                params: space.genome_json(&m.genome),
            };
            write_json(&dir.join("knee.json"), &knee)?;
        }
        None => println!("no knee suggestion: front has fewer than two distinct points"),
    }
    Ok(())
}

fn params_line(space: &SearchSpace, m: &optimizer::Individual) -> String {
    space
        .parameters
        .iter()
        .zip(&m.genome)
        .map(|(p, g)| format!("{}={}", p.name, p.display(g)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Trains every configured model on the same split and tabulates the test
/// metrics.
pub fn report(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg)?;
    let table = load_table(cfg)?;
    check_features(&table)?;
    let prepared = pipeline::prepare(&table, &split_spec(cfg), &cfg.binning)?;
    report_excluded(&prepared);
    let mut rows = Vec::with_capacity(cfg.report_models.len());
    for spec in &cfg.report_models {
        info!("training {}", spec.name());
        rows.push(pipeline::train_and_score(spec, &prepared, &cfg.emp, cfg.seed)?.1);
    }
    write_metrics(dir, "report", &rows)?;
    print_rows(&rows);
    Ok(())
}

fn print_rows(rows: &[MetricsRow]) {
    println!("{:<10} {:>8} {:>8} {:>8} {:>9}", "Model", "AUC", "F1", "BS", "EMP");
    for r in rows {
        println!(
            "{:<10} {:>8.4} {:>8.4} {:>8.4} {:>9.5}",
            r.model, r.auc, r.f1, r.brier, r.emp
        );
    }
}
