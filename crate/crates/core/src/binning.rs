//! Constrained optimal binning and Weight-of-Evidence encoding.
//!
//! Each feature is first cut into granular prebins (quantiles for numeric
//! columns, one prebin per category for categorical ones). Contiguous
//! prebins are then merged by an exact dynamic program that maximizes the
//! Information Value subject to:
//!
//! * every bin holds at least `min_bin_fraction` of the observations,
//! * every bin has at least one event and one non-event,
//! * missing values sit in their own bin (exempt from the mass floor).
//!
//! WoE of bin `i` is `ln(share of non-events in i / share of events in i)`,
//! where shares are taken over the class totals of the whole feature.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ColumnKind, ColumnSchema, DataTable, Label, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BinningError {
    #[error("infeasible binning: {0}")]
    Infeasible(String),
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("bin has a zero class count (events {n_event}, non-events {n_nonevent})")]
    ZeroClass { n_event: usize, n_nonevent: usize },
    #[error("column and labels differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("column mixes numeric and categorical values")]
    MixedColumn,
    #[error("prebin counts exceed the class totals")]
    CountMismatch,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("feature `{feature}` row {row}: {message}")]
    BadValue {
        feature: String,
        row: usize,
        message: String,
    },
    #[error("{0}")]
    Dataset(String),
}

impl From<crate::dataset::DatasetError> for BinningError {
    fn from(e: crate::dataset::DatasetError) -> Self {
        BinningError::Dataset(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BinningError>;

/// Event (default) and non-event counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub n_event: usize,
    pub n_nonevent: usize,
}

impl ClassCounts {
    pub fn new(n_event: usize, n_nonevent: usize) -> Self {
        ClassCounts { n_event, n_nonevent }
    }

    pub fn total(&self) -> usize {
        self.n_event + self.n_nonevent
    }

    pub fn add(&mut self, label: Label) {
        if label.is_default() {
            self.n_event += 1;
        } else {
            self.n_nonevent += 1;
        }
    }

    pub fn has_both_classes(&self) -> bool {
        self.n_event > 0 && self.n_nonevent > 0
    }

    pub fn event_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.n_event as f64 / self.total() as f64
        }
    }
}

impl std::ops::Add for ClassCounts {
    type Output = ClassCounts;
    fn add(self, rhs: ClassCounts) -> ClassCounts {
        ClassCounts::new(self.n_event + rhs.n_event, self.n_nonevent + rhs.n_nonevent)
    }
}

/// What a bin covers. Interval bounds are `[lo, hi)`; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMembers {
    Interval { lo: Option<f64>, hi: Option<f64> },
    Categories(Vec<String>),
    Missing,
}

impl fmt::Display for BinMembers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinMembers::Interval { lo, hi } => {
                let lo = lo.map_or("-inf".to_string(), |v| v.to_string());
                let hi = hi.map_or("inf".to_string(), |v| v.to_string());
                write!(f, "[{lo}, {hi})")
            }
            BinMembers::Categories(c) => write!(f, "{{{}}}", c.join(", ")),
            BinMembers::Missing => f.write_str("missing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreBin {
    pub members: BinMembers,
    pub counts: ClassCounts,
}

/// Output of [`prebin`].
#[derive(Debug, Clone, PartialEq)]
pub struct Prebinning {
    pub prebins: Vec<PreBin>,
    pub missing: ClassCounts,
    /// The column holds a single distinct non-missing value.
    pub degenerate: bool,
}

impl Prebinning {
    pub fn totals(&self) -> ClassCounts {
        self.prebins.iter().fold(self.missing, |acc, p| acc + p.counts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotonicTrend {
    #[default]
    None,
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinningConstraints {
    pub min_bin_fraction: f64,
    pub require_nonzero_classes: bool,
    pub separate_missing_bin: bool,
    pub max_bins: usize,
    /// WoE trend across numeric bins; off unless requested.
    pub monotonic_trend: MonotonicTrend,
}

impl Default for BinningConstraints {
    fn default() -> Self {
        BinningConstraints {
            min_bin_fraction: 0.05,
            require_nonzero_classes: true,
            separate_missing_bin: true,
            max_bins: 4,
            monotonic_trend: MonotonicTrend::None,
        }
    }
}

impl BinningConstraints {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_bin_fraction > 0.0 && self.min_bin_fraction <= 0.5) {
            return Err(BinningError::InvalidConstraints(format!(
                "min_bin_fraction {} not in (0, 0.5]",
                self.min_bin_fraction
            )));
        }
        if self.max_bins < 2 {
            return Err(BinningError::InvalidConstraints(format!(
                "max_bins {} < 2",
                self.max_bins
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinningConfig {
    pub n_prebins: usize,
    pub constraints: BinningConstraints,
}

impl Default for BinningConfig {
    fn default() -> Self {
        BinningConfig {
            n_prebins: 20,
            constraints: BinningConstraints::default(),
        }
    }
}

/// `ln((n_nonevent / total_nonevent) / (n_event / total_event))`.
pub fn woe_of_bin(bin: ClassCounts, totals: ClassCounts) -> Result<f64> {
    if !bin.has_both_classes() || !totals.has_both_classes() {
        return Err(BinningError::ZeroClass {
            n_event: bin.n_event,
            n_nonevent: bin.n_nonevent,
        });
    }
    let nonevent_share = bin.n_nonevent as f64 / totals.n_nonevent as f64;
    let event_share = bin.n_event as f64 / totals.n_event as f64;
    Ok((nonevent_share / event_share).ln())
}

/// A bin's WoE and IV term; zero-class bins get the neutral WoE 0.
fn woe_and_iv(bin: ClassCounts, totals: ClassCounts) -> (f64, f64) {
    match woe_of_bin(bin, totals) {
        Ok(woe) => {
            let diff = bin.n_nonevent as f64 / totals.n_nonevent as f64 - bin.n_event as f64 / totals.n_event as f64;
            (woe, diff * woe)
        }
        Err(_) => (0.0, 0.0),
    }
}

/// Initial granular discretization of one feature.
///
/// Numeric cut points are order statistics at the `k / n_prebins`
/// quantiles, so prebin membership is invariant under strictly increasing
/// transforms. Categories become one prebin each, ordered by event rate.
/// Missing values are counted separately.
pub fn prebin(column: &[Value], labels: &[Label], n_prebins: usize) -> Result<Prebinning> {
    if column.len() != labels.len() {
        return Err(BinningError::LengthMismatch(column.len(), labels.len()));
    }
    if n_prebins < 2 {
        return Err(BinningError::InvalidConstraints(format!("n_prebins {n_prebins} < 2")));
    }
    let mut missing = ClassCounts::default();
    let mut numeric: Vec<(f64, Label)> = Vec::new();
    let mut categorical: Vec<(&str, Label)> = Vec::new();
    for (value, &label) in column.iter().zip(labels) {
        match value {
            Value::Missing => missing.add(label),
            Value::Num(v) => numeric.push((*v, label)),
            Value::Cat(c) => categorical.push((c.as_str(), label)),
        }
    }
    if !numeric.is_empty() && !categorical.is_empty() {
        return Err(BinningError::MixedColumn);
    }
    if !categorical.is_empty() {
        let mut by_cat: HashMap<&str, ClassCounts> = HashMap::new();
        for (c, label) in categorical {
            by_cat.entry(c).or_default().add(label);
        }
        let mut prebins: Vec<PreBin> = by_cat
            .into_iter()
            .map(|(c, counts)| PreBin {
                members: BinMembers::Categories(vec![c.to_string()]),
                counts,
            })
            .collect();
        prebins.sort_by(|a, b| {
            a.counts
                .event_rate()
                .total_cmp(&b.counts.event_rate())
                .then_with(|| category_key(&a.members).cmp(category_key(&b.members)))
        });
        let degenerate = prebins.len() == 1;
        return Ok(Prebinning {
            prebins,
            missing,
            degenerate,
        });
    }
    if numeric.is_empty() {
        return Ok(Prebinning {
            prebins: Vec::new(),
            missing,
            degenerate: true,
        });
    }
    numeric.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = numeric.len();
    let mut cuts: Vec<f64> = (1..n_prebins)
        .map(|k| numeric[k * m / n_prebins].0)
        .filter(|&c| c > numeric[0].0)
        .collect();
    cuts.dedup();
    let mut prebins = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for bin in 0..=cuts.len() {
        let hi = cuts.get(bin).copied();
        let end = match hi {
            Some(h) => start + numeric[start..].partition_point(|&(v, _)| v < h),
            None => m,
        };
        if end > start {
            let mut counts = ClassCounts::default();
            for &(_, label) in &numeric[start..end] {
                counts.add(label);
            }
            prebins.push(PreBin {
                members: BinMembers::Interval { lo: None, hi },
                counts,
            });
        }
        start = end;
    }
    // Lower bounds follow from the previous upper bound.
    for i in 1..prebins.len() {
        let prev_hi = match prebins[i - 1].members {
            BinMembers::Interval { hi, .. } => hi,
            _ => None,
        };
        if let BinMembers::Interval { lo, .. } = &mut prebins[i].members {
            *lo = prev_hi;
        }
    }
    let degenerate = numeric.first().map(|f| f.0) == numeric.last().map(|l| l.0);
    Ok(Prebinning {
        prebins,
        missing,
        degenerate,
    })
}

fn category_key(m: &BinMembers) -> &str {
    match m {
        BinMembers::Categories(c) => c.first().map_or("", String::as_str),
        _ => "",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub members: BinMembers,
    pub counts: ClassCounts,
    pub woe: f64,
    pub iv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningSolution {
    pub kind: ColumnKind,
    pub bins: Vec<Bin>,
    pub missing_bin: Option<Bin>,
    pub iv: f64,
    /// Value maximized by the merge search (the IV of the non-missing bins).
    pub objective: f64,
    pub degenerate: bool,
}

impl BinningSolution {
    pub fn totals(&self) -> ClassCounts {
        self.all_bins().fold(ClassCounts::default(), |acc, b| acc + b.counts)
    }

    pub fn all_bins(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().chain(self.missing_bin.iter())
    }

    pub fn missing_woe(&self) -> f64 {
        self.missing_bin.as_ref().map_or(0.0, |b| b.woe)
    }

    /// Index into `bins` for a numeric value.
    pub fn numeric_bin(&self, x: f64) -> usize {
        // Bins are contiguous; the upper bounds are the cut points.
        let n = self.bins.len();
        self.bins[..n.saturating_sub(1)].partition_point(|b| match b.members {
            BinMembers::Interval { hi: Some(h), .. } => x >= h,
            _ => false,
        })
    }
}

/// Merges contiguous prebins into the IV-maximizing feasible partition.
///
/// `totals` are the feature's class totals including missing values; the
/// missing counts are `totals - Σ prebins`.
pub fn optimize_bins(
    prebins: &[PreBin],
    constraints: &BinningConstraints,
    totals: ClassCounts,
) -> Result<BinningSolution> {
    constraints.validate()?;
    let summed = prebins.iter().fold(ClassCounts::default(), |acc, p| acc + p.counts);
    if summed.n_event > totals.n_event || summed.n_nonevent > totals.n_nonevent {
        return Err(BinningError::CountMismatch);
    }
    if !totals.has_both_classes() {
        return Err(BinningError::Infeasible(format!(
            "feature has {} events and {} non-events",
            totals.n_event, totals.n_nonevent
        )));
    }
    let missing = ClassCounts::new(totals.n_event - summed.n_event, totals.n_nonevent - summed.n_nonevent);
    let kind = match prebins.first().map(|p| &p.members) {
        Some(BinMembers::Categories(_)) => ColumnKind::Categorical,
        _ => ColumnKind::Numeric,
    };
    if prebins.is_empty() {
        return Err(BinningError::Infeasible("no non-missing values".into()));
    }

    let segments = best_partition(prebins, constraints, totals, kind)?;

    let mut bins: Vec<Bin> = segments
        .iter()
        .map(|&(a, b)| {
            let counts = prebins[a..=b]
                .iter()
                .fold(ClassCounts::default(), |acc, p| acc + p.counts);
            let (woe, iv) = woe_and_iv(counts, totals);
            Bin {
                members: merge_members(&prebins[a..=b]),
                counts,
                woe,
                iv,
            }
        })
        .collect();
    let objective: f64 = bins.iter().map(|b| b.iv).sum();

    let mut missing_bin = None;
    if missing.total() > 0 {
        if constraints.separate_missing_bin {
            let (woe, iv) = woe_and_iv(missing, totals);
            missing_bin = Some(Bin {
                members: BinMembers::Missing,
                counts: missing,
                woe,
                iv,
            });
        } else {
            // Fold missing rows into the bin with the closest event rate.
            let rate = missing.event_rate();
            let target = (0..bins.len())
                .min_by(|&i, &j| {
                    (bins[i].counts.event_rate() - rate)
                        .abs()
                        .total_cmp(&(bins[j].counts.event_rate() - rate).abs())
                })
                .expect("at least one bin");
            let counts = bins[target].counts + missing;
            let (woe, iv) = woe_and_iv(counts, totals);
            bins[target].counts = counts;
            bins[target].woe = woe;
            bins[target].iv = iv;
        }
    }
    let iv = bins.iter().chain(missing_bin.iter()).map(|b| b.iv).sum();
    let degenerate = bins.len() == 1 && prebins.len() == 1;
    Ok(BinningSolution {
        kind,
        bins,
        missing_bin,
        iv,
        objective,
        degenerate,
    })
}

fn merge_members(prebins: &[PreBin]) -> BinMembers {
    match (&prebins[0].members, &prebins[prebins.len() - 1].members) {
        (BinMembers::Interval { lo, .. }, BinMembers::Interval { hi, .. }) => BinMembers::Interval { lo: *lo, hi: *hi },
        _ => BinMembers::Categories(
            prebins
                .iter()
                .flat_map(|p| match &p.members {
                    BinMembers::Categories(c) => c.clone(),
                    _ => Vec::new(),
                })
                .collect(),
        ),
    }
}

/// Exact search over contiguous partitions.
///
/// State `(start, end, k)`: the best IV of a partition of prebins `0..=end`
/// into `k` segments whose last segment is `start..=end`. Keeping the last
/// segment in the state lets the optional monotonic-trend constraint
/// compare adjacent WoE values.
fn best_partition(
    prebins: &[PreBin],
    constraints: &BinningConstraints,
    totals: ClassCounts,
    kind: ColumnKind,
) -> Result<Vec<(usize, usize)>> {
    let n = prebins.len();
    let max_k = constraints.max_bins.min(n);
    let mut prefix = vec![ClassCounts::default(); n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + prebins[i].counts;
    }
    let seg = |a: usize, b: usize| {
        ClassCounts::new(
            prefix[b + 1].n_event - prefix[a].n_event,
            prefix[b + 1].n_nonevent - prefix[a].n_nonevent,
        )
    };
    let floor = constraints.min_bin_fraction * totals.total() as f64;
    let feasible = |c: ClassCounts| {
        c.total() as f64 >= floor - 1e-9 && (!constraints.require_nonzero_classes || c.has_both_classes())
    };
    let trend = if kind == ColumnKind::Numeric {
        constraints.monotonic_trend
    } else {
        MonotonicTrend::None
    };

    // value/woe per segment, NaN marks infeasible
    let mut value = vec![f64::NAN; n * n];
    let mut woe = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let c = seg(a, b);
            if feasible(c) {
                let (w, iv) = woe_and_iv(c, totals);
                value[a * n + b] = iv;
                woe[a * n + b] = w;
            }
        }
    }

    const NONE: usize = usize::MAX;
    let idx = |a: usize, b: usize, k: usize| (k * n + a) * n + b;
    let mut dp = vec![f64::NEG_INFINITY; (max_k + 1) * n * n];
    let mut parent = vec![NONE; (max_k + 1) * n * n];
    for b in 0..n {
        let v = value[b];
        if !v.is_nan() {
            dp[idx(0, b, 1)] = v;
        }
    }
    for k in 2..=max_k {
        for a in 1..n {
            for b in a..n {
                let v = value[a * n + b];
                if v.is_nan() {
                    continue;
                }
                let w = woe[a * n + b];
                let mut best = f64::NEG_INFINITY;
                let mut arg = NONE;
                for prev in 0..a {
                    let cand = dp[idx(prev, a - 1, k - 1)];
                    if cand == f64::NEG_INFINITY {
                        continue;
                    }
                    let pw = woe[prev * n + a - 1];
                    let ok = match trend {
                        MonotonicTrend::None => true,
                        MonotonicTrend::Ascending => w >= pw,
                        MonotonicTrend::Descending => w <= pw,
                    };
                    if ok && cand > best {
                        best = cand;
                        arg = prev;
                    }
                }
                if arg != NONE {
                    dp[idx(a, b, k)] = best + v;
                    parent[idx(a, b, k)] = arg;
                }
            }
        }
    }

    let mut best = f64::NEG_INFINITY;
    let mut end_state = None;
    for k in 1..=max_k {
        for a in 0..n {
            let v = dp[idx(a, n - 1, k)];
            if v > best {
                best = v;
                end_state = Some((a, k));
            }
        }
    }
    let (mut a, mut k) =
        end_state.ok_or_else(|| BinningError::Infeasible("no contiguous merge satisfies the constraints".into()))?;
    let mut segments = Vec::with_capacity(k);
    let mut b = n - 1;
    loop {
        segments.push((a, b));
        if k == 1 {
            break;
        }
        let prev = parent[idx(a, b, k)];
        b = a - 1;
        a = prev;
        k -= 1;
    }
    segments.reverse();
    Ok(segments)
}

/// Per-feature fitted state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeatureBinning {
    Fitted { solution: BinningSolution },
    Excluded { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub name: String,
    pub kind: ColumnKind,
    pub binning: FeatureBinning,
}

/// Fitted WoE transform for every feature of a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WoeEncoder {
    pub features: Vec<FeatureEntry>,
    pub fit_rows: usize,
    pub config: BinningConfig,
}

impl WoeEncoder {
    /// Fits every feature independently (in parallel). Features whose
    /// binning is infeasible are kept as `Excluded` and dropped by
    /// [`WoeEncoder::transform`].
    pub fn fit(table: &DataTable, config: &BinningConfig) -> Result<WoeEncoder> {
        config.constraints.validate()?;
        let labels = table.target();
        let features = table
            .schema()
            .par_iter()
            .enumerate()
            .map(|(j, col)| {
                let column: Vec<Value> = table.column(j).cloned().collect();
                let binning = match prebin(&column, labels, config.n_prebins).and_then(|p| {
                    let totals = p.totals();
                    optimize_bins(&p.prebins, &config.constraints, totals)
                }) {
                    Ok(solution) => FeatureBinning::Fitted { solution },
                    Err(e) => FeatureBinning::Excluded { reason: e.to_string() },
                };
                FeatureEntry {
                    name: col.name.clone(),
                    kind: col.kind,
                    binning,
                }
            })
            .collect();
        Ok(WoeEncoder {
            features,
            fit_rows: table.n_rows(),
            config: config.clone(),
        })
    }

    pub fn output_features(&self) -> Vec<&str> {
        self.features
            .iter()
            .filter(|f| matches!(f.binning, FeatureBinning::Fitted { .. }))
            .map(|f| f.name.as_str())
            .collect()
    }

    pub fn excluded(&self) -> Vec<(&str, &str)> {
        self.features
            .iter()
            .filter_map(|f| match &f.binning {
                FeatureBinning::Excluded { reason } => Some((f.name.as_str(), reason.as_str())),
                _ => None,
            })
            .collect()
    }

    pub fn solution(&self, name: &str) -> Option<&BinningSolution> {
        self.features
            .iter()
            .find(|f| f.name == name)
            .and_then(|f| match &f.binning {
                FeatureBinning::Fitted { solution } => Some(solution),
                _ => None,
            })
    }

    /// Replaces every feature by its bin's WoE. Missing cells and unseen
    /// categories take the missing bin's WoE (0 when there is no missing bin).
    pub fn transform(&self, table: &DataTable) -> Result<DataTable> {
        let names: Vec<&str> = table.schema().iter().map(|c| c.name.as_str()).collect();
        let fitted: Vec<&str> = self.features.iter().map(|f| f.name.as_str()).collect();
        if names != fitted {
            return Err(BinningError::SchemaMismatch(format!(
                "table columns {names:?} differ from fitted columns {fitted:?}"
            )));
        }
        let mut encoders = Vec::new();
        for (j, f) in self.features.iter().enumerate() {
            if let FeatureBinning::Fitted { solution } = &f.binning {
                let lookup: HashMap<&str, f64> = solution
                    .bins
                    .iter()
                    .flat_map(|b| match &b.members {
                        BinMembers::Categories(c) => c.iter().map(|s| (s.as_str(), b.woe)).collect::<Vec<_>>(),
                        _ => Vec::new(),
                    })
                    .collect();
                encoders.push((j, f, solution, lookup));
            }
        }
        let mut rows = Vec::with_capacity(table.n_rows());
        for (r, row) in table.rows().iter().enumerate() {
            let mut out = Vec::with_capacity(encoders.len());
            for (j, f, solution, lookup) in &encoders {
                let woe = match (&row[*j], solution.kind) {
                    (Value::Missing, _) => solution.missing_woe(),
                    (Value::Num(x), ColumnKind::Numeric) => solution.bins[solution.numeric_bin(*x)].woe,
                    (Value::Cat(c), ColumnKind::Categorical) => {
                        lookup.get(c.as_str()).copied().unwrap_or(solution.missing_woe())
                    }
                    (Value::Num(x), ColumnKind::Categorical) => lookup
                        .get(x.to_string().as_str())
                        .copied()
                        .unwrap_or(solution.missing_woe()),
                    (Value::Cat(c), ColumnKind::Numeric) => {
                        return Err(BinningError::BadValue {
                            feature: f.name.clone(),
                            row: r,
                            message: format!("category `{c}` in a numeric feature"),
                        })
                    }
                };
                out.push(Value::Num(woe));
            }
            rows.push(out);
        }
        let schema = encoders
            .iter()
            .map(|(_, f, _, _)| ColumnSchema {
                name: f.name.clone(),
                kind: ColumnKind::Numeric,
                allows_missing: false,
            })
            .collect();
        Ok(DataTable::new(
            schema,
            rows,
            table.target().to_vec(),
            table.target_info().clone(),
        )?)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<WoeEncoder> {
        serde_json::from_str(s)
    }

    /// Bin table: one CSV row per bin.
    pub fn write_report_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "feature",
            "bin",
            "members",
            "count",
            "n_event",
            "n_nonevent",
            "event_rate",
            "woe",
            "iv",
            "feature_iv",
        ])?;
        for f in &self.features {
            let FeatureBinning::Fitted { solution } = &f.binning else {
                continue;
            };
            for (i, b) in solution.all_bins().enumerate() {
                w.write_record([
                    f.name.clone(),
                    i.to_string(),
                    b.members.to_string(),
                    b.counts.total().to_string(),
                    b.counts.n_event.to_string(),
                    b.counts.n_nonevent.to_string(),
                    format!("{:.6}", b.counts.event_rate()),
                    format!("{:.6}", b.woe),
                    format!("{:.6}", b.iv),
                    format!("{:.6}", solution.iv),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Violations of the binning constraints in a fitted solution; empty when
/// the solution is valid.
pub fn audit_solution(solution: &BinningSolution, constraints: &BinningConstraints) -> Vec<String> {
    let mut problems = Vec::new();
    let totals = solution.totals();
    let floor = constraints.min_bin_fraction * totals.total() as f64;
    for (i, b) in solution.bins.iter().enumerate() {
        if (b.counts.total() as f64) < floor - 1e-9 {
            problems.push(format!(
                "bin {i} holds {} of {} rows (< {:.1}%)",
                b.counts.total(),
                totals.total(),
                constraints.min_bin_fraction * 100.0
            ));
        }
        if constraints.require_nonzero_classes && !b.counts.has_both_classes() {
            problems.push(format!("bin {i} has a zero class count"));
        }
        if matches!(b.members, BinMembers::Missing) {
            problems.push(format!("bin {i} mixes in the missing bin"));
        }
    }
    if let Some(m) = &solution.missing_bin {
        if !m.counts.has_both_classes() && m.woe != 0.0 {
            problems.push("zero-class missing bin has non-neutral WoE".into());
        }
        if !matches!(m.members, BinMembers::Missing) {
            problems.push("missing bin holds non-missing members".into());
        }
    }
    let nonevent_share: f64 = solution
        .all_bins()
        .map(|b| b.counts.n_nonevent as f64 / totals.n_nonevent as f64)
        .sum();
    let event_share: f64 = solution
        .all_bins()
        .map(|b| b.counts.n_event as f64 / totals.n_event as f64)
        .sum();
    if (nonevent_share - 1.0).abs() > 1e-9 || (event_share - 1.0).abs() > 1e-9 {
        problems.push("class shares do not sum to one".into());
    }
    problems
}
