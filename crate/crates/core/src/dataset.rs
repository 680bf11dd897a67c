//! Tabular datasets with a binary default target.
//!
//! A [`DataTable`] is immutable once built. Cells are numeric, categorical
//! tokens, or missing; the target is always complete and binary.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cell tokens treated as missing on load.
pub const MISSING_TOKENS: [&str; 3] = ["", "NA", "?"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("csv has no header row")]
    NoHeader,
    #[error("target column `{0}` not found in header")]
    MissingTargetColumn(String),
    #[error("target not binary: found distinct values {0:?}")]
    TargetNotBinary(Vec<String>),
    #[error("positive label `{label}` does not occur in target column `{column}`")]
    PositiveLabelAbsent { column: String, label: String },
    #[error("missing target value at line {line}")]
    MissingTarget { line: u64 },
    #[error("row at line {line} has {found} fields, expected {expected}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("table has no rows")]
    Empty,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("row {row} column `{column}`: {message}")]
    BadCell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("partition too small: {0}")]
    SplitTooSmall(String),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

/// Class label. `Default` is the `+1` class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    NonDefault,
    Default,
}

impl Label {
    pub fn from_sign(sign: i8) -> Option<Label> {
        match sign {
            1 => Some(Label::Default),
            -1 => Some(Label::NonDefault),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Default => 1,
            Label::NonDefault => -1,
        }
    }

    pub fn is_default(self) -> bool {
        self == Label::Default
    }

    /// 0/1 outcome: 1 for a default.
    pub fn outcome(self) -> f64 {
        if self.is_default() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub allows_missing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(String),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Cat(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

/// How the original target tokens map onto labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetInfo {
    pub name: String,
    pub positive: String,
    pub negative: String,
}

impl TargetInfo {
    /// Target written as `1` (default) / `0`.
    pub fn binary(name: impl Into<String>) -> Self {
        TargetInfo {
            name: name.into(),
            positive: "1".into(),
            negative: "0".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    schema: Vec<ColumnSchema>,
    rows: Vec<Vec<Value>>,
    target: Vec<Label>,
    target_info: TargetInfo,
}

impl DataTable {
    /// Builds a table, checking shape, name uniqueness and kind consistency.
    pub fn new(
        schema: Vec<ColumnSchema>,
        rows: Vec<Vec<Value>>,
        target: Vec<Label>,
        target_info: TargetInfo,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(DatasetError::Empty);
        }
        if rows.len() != target.len() {
            return Err(DatasetError::InvalidSplit(format!(
                "{} rows but {} target values",
                rows.len(),
                target.len()
            )));
        }
        let mut seen = HashSet::new();
        for col in &schema {
            if !seen.insert(col.name.as_str()) {
                return Err(DatasetError::DuplicateColumn(col.name.clone()));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(DatasetError::Ragged {
                    line: r as u64 + 2,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            for (value, col) in row.iter().zip(&schema) {
                let ok = match (value, col.kind) {
                    (Value::Missing, _) => col.allows_missing,
                    (Value::Num(v), ColumnKind::Numeric) => v.is_finite(),
                    (Value::Cat(_), ColumnKind::Categorical) => true,
                    _ => false,
                };
                if !ok {
                    return Err(DatasetError::BadCell {
                        row: r,
                        column: col.name.clone(),
                        message: format!("value `{value}` does not fit {:?} column", col.kind),
                    });
                }
            }
        }
        Ok(DataTable {
            schema,
            rows,
            target,
            target_info,
        })
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn target(&self) -> &[Label] {
        &self.target
    }

    pub fn target_info(&self) -> &TargetInfo {
        &self.target_info
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = &Value> + '_ {
        self.rows.iter().map(move |r| &r[index])
    }

    pub fn n_defaults(&self) -> usize {
        self.target.iter().filter(|l| l.is_default()).count()
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<DataTable> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let target = indices.iter().map(|&i| self.target[i]).collect();
        DataTable::new(self.schema.clone(), rows, target, self.target_info.clone())
    }

    /// Removes the named feature columns. Unknown names are an error.
    pub fn drop_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<DataTable> {
        let mut drop = HashSet::new();
        for name in names {
            let name = name.as_ref();
            let idx = self
                .column_index(name)
                .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))?;
            drop.insert(idx);
        }
        let keep: Vec<usize> = (0..self.schema.len()).filter(|i| !drop.contains(i)).collect();
        let schema = keep.iter().map(|&i| self.schema[i].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| keep.iter().map(|&i| r[i].clone()).collect())
            .collect();
        DataTable::new(schema, rows, self.target.clone(), self.target_info.clone())
    }

    /// Dense row-major matrix of an all-numeric table without missing cells.
    pub fn to_feature_matrix(&self) -> Result<FeatureMatrix> {
        let cols = self.schema.len();
        let mut data = Vec::with_capacity(self.rows.len() * cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (value, col) in row.iter().zip(&self.schema) {
                match value {
                    Value::Num(v) => data.push(*v),
                    other => {
                        return Err(DatasetError::BadCell {
                            row: r,
                            column: col.name.clone(),
                            message: format!("expected a number, found `{other}`"),
                        })
                    }
                }
            }
        }
        Ok(FeatureMatrix {
            n_rows: self.rows.len(),
            n_cols: cols,
            data,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.schema.iter().map(|c| c.name.as_str()).collect();
        header.push(&self.target_info.name);
        w.write_record(&header).map_err(csv_err)?;
        let mut record = Vec::with_capacity(header.len());
        for (row, label) in self.rows.iter().zip(&self.target) {
            record.clear();
            record.extend(row.iter().map(|v| v.to_string()));
            record.push(match label {
                Label::Default => self.target_info.positive.clone(),
                Label::NonDefault => self.target_info.negative.clone(),
            });
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| DatasetError::Io {
            path: "<writer>".into(),
            source: e,
        })
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| DatasetError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Row-major dense matrix used by the learners.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        FeatureMatrix {
            n_rows: rows.len(),
            n_cols,
            data,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n_rows: indices.len(),
            n_cols: self.n_cols,
            data,
        }
    }
}

fn csv_err(e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    DatasetError::Csv {
        line,
        message: e.to_string(),
    }
}

fn is_missing_token(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell)
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads a CSV file. See [`read_csv`].
pub fn load_csv(path: impl AsRef<Path>, target_column: &str, positive_label: &str) -> Result<DataTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_csv(std::io::BufReader::new(file), target_column, positive_label)
}

/// Parses CSV with a header row. Column kinds are inferred: a column is
/// numeric iff every non-missing cell parses as a finite decimal number.
/// `positive_label` maps to [`Label::Default`], the other token to
/// [`Label::NonDefault`].
pub fn read_csv<R: Read>(reader: R, target_column: &str, positive_label: &str) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(DatasetError::NoHeader);
    }
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DatasetError::MissingTargetColumn(target_column.to_string()))?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut target_tokens = Vec::new();
    let mut distinct = BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(DatasetError::Ragged {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let token = &record[target_idx];
        if is_missing_token(token) {
            return Err(DatasetError::MissingTarget { line });
        }
        distinct.insert(token.to_string());
        if distinct.len() > 2 {
            return Err(DatasetError::TargetNotBinary(distinct.into_iter().collect()));
        }
        target_tokens.push(token.to_string());
        cells.push(
            record
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != target_idx)
                .map(|(_, c)| c.to_string())
                .collect(),
        );
    }
    if cells.is_empty() {
        return Err(DatasetError::Empty);
    }
    if distinct.len() == 2 && !distinct.contains(positive_label) {
        return Err(DatasetError::PositiveLabelAbsent {
            column: target_column.to_string(),
            label: positive_label.to_string(),
        });
    }
    let negative = distinct
        .iter()
        .find(|t| t.as_str() != positive_label)
        .cloned()
        .unwrap_or_else(|| "0".to_string());

    let names: Vec<&String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h)
        .collect();
    let mut schema = Vec::with_capacity(names.len());
    for (j, name) in names.iter().enumerate() {
        let mut numeric = true;
        let mut missing = false;
        for row in &cells {
            let cell = row[j].as_str();
            if is_missing_token(cell) {
                missing = true;
            } else if parse_number(cell).is_none() {
                numeric = false;
            }
        }
        schema.push(ColumnSchema {
            name: name.to_string(),
            kind: if numeric {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            },
            allows_missing: missing,
        });
    }

    let rows = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&schema)
                .map(|(cell, col)| {
                    if is_missing_token(&cell) {
                        Value::Missing
                    } else if col.kind == ColumnKind::Numeric {
                        Value::Num(parse_number(&cell).expect("checked during inference"))
                    } else {
                        Value::Cat(cell)
                    }
                })
                .collect()
        })
        .collect();
    let target = target_tokens
        .iter()
        .map(|t| {
            if t == positive_label {
                Label::Default
            } else {
                Label::NonDefault
            }
        })
        .collect();
    DataTable::new(
        schema,
        rows,
        target,
        TargetInfo {
            name: target_column.to_string(),
            positive: positive_label.to_string(),
            negative,
        },
    )
}

/// Fraction of default (`+1`) rows.
pub fn compute_rate_def(table: &DataTable) -> f64 {
    table.n_defaults() as f64 / table.n_rows() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    pub n_cases: usize,
    pub rate_def: f64,
}

impl DatasetDescriptor {
    pub fn describe(name: impl Into<String>, table: &DataTable) -> Self {
        DatasetDescriptor {
            name: name.into(),
            n_cases: table.n_rows(),
            rate_def: compute_rate_def(table),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            stratified: true,
            seed: 42,
        }
    }
}

/// Splits into (train, test). Deterministic for a fixed seed; rows keep
/// their original relative order inside each partition.
///
/// Stratified splits round each class's share separately, which keeps the
/// partition default rates within `0.5 / partition size` of the full table.
pub fn stratified_split(table: &DataTable, spec: &SplitSpec) -> Result<(DataTable, DataTable)> {
    let (train, test) = split_indices(table, spec)?;
    Ok((table.subset(&train)?, table.subset(&test)?))
}

pub fn split_indices(table: &DataTable, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(DatasetError::InvalidSplit(format!(
            "train_fraction {} not in (0, 1)",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        for class in [Label::NonDefault, Label::Default] {
            let mut idx: Vec<usize> = (0..table.n_rows()).filter(|&i| table.target[i] == class).collect();
            let n = idx.len();
            let n_train = (spec.train_fraction * n as f64).round() as usize;
            if n_train == 0 || n_train >= n {
                return Err(DatasetError::SplitTooSmall(format!(
                    "{n} rows of class {:+} cannot fill both partitions at train_fraction {}",
                    class.sign(),
                    spec.train_fraction
                )));
            }
            idx.shuffle(&mut rng);
            train.extend_from_slice(&idx[..n_train]);
            test.extend_from_slice(&idx[n_train..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..table.n_rows()).collect();
        idx.shuffle(&mut rng);
        let n_train = (spec.train_fraction * idx.len() as f64).round() as usize;
        train.extend_from_slice(&idx[..n_train.min(idx.len())]);
        test.extend_from_slice(&idx[n_train.min(idx.len())..]);
        for (part, name) in [(&train, "train"), (&test, "test")] {
            let defaults = part.iter().filter(|&&i| table.target[i].is_default()).count();
            if defaults == 0 || defaults == part.len() {
                return Err(DatasetError::SplitTooSmall(format!(
                    "{name} partition lacks one of the classes"
                )));
            }
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Train / validation / test partitions.
#[derive(Debug, Clone)]
pub struct ThreeWaySplit {
    pub train: DataTable,
    pub validation: DataTable,
    pub test: DataTable,
}

/// Stratified split with fractions `(train, validation)`; the remainder is
/// the test set. `(0.6, 0.2)` gives the 60/20/20 protocol.
pub fn three_way_split(
    table: &DataTable,
    train_fraction: f64,
    validation_fraction: f64,
    seed: u64,
) -> Result<ThreeWaySplit> {
    let rest = train_fraction + validation_fraction;
    if !(rest > 0.0 && rest < 1.0) || train_fraction <= 0.0 || validation_fraction <= 0.0 {
        return Err(DatasetError::InvalidSplit(format!(
            "fractions ({train_fraction}, {validation_fraction}) must be positive and sum below 1"
        )));
    }
    let (fit, test) = stratified_split(
        table,
        &SplitSpec {
            train_fraction: rest,
            stratified: true,
            seed,
        },
    )?;
    let (train, validation) = stratified_split(
        &fit,
        &SplitSpec {
            train_fraction: train_fraction / rest,
            stratified: true,
            seed: seed.wrapping_add(1),
        },
    )?;
    Ok(ThreeWaySplit {
        train,
        validation,
        test,
    })
}
