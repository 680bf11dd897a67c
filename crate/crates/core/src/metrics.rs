//! Classification and profit metrics.
//!
//! All functions take [`ScoredSample`]s: a predicted default probability
//! and the true label. AUC, F1 and the Brier score use `p_default`
//! directly. The profit metrics follow the credit-scoring convention of a
//! score where defaulters sit low: they work on `s = 1 - p_default` and a
//! borrower with `s <= t` is rejected as a predicted defaulter, so `F0(t)`
//! and `F1(t)` are the fractions of defaulters and non-defaulters rejected
//! at cutoff `t`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Label;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("need at least one sample of each class ({positives} defaults, {negatives} non-defaults)")]
    SingleClass { positives: usize, negatives: usize },
    #[error("no samples")]
    Empty,
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid EMP parameters: {0}")]
    InvalidParams(String),
    #[error("{0} predictions but {1} labels")]
    LengthMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub p_default: f64,
    pub label: Label,
}

impl ScoredSample {
    pub fn new(p_default: f64, label: Label) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_default) {
            return Err(MetricsError::BadProbability(p_default));
        }
        Ok(ScoredSample { p_default, label })
    }
}

/// Pairs predictions with labels, validating probabilities.
pub fn scored(p_default: &[f64], labels: &[Label]) -> Result<Vec<ScoredSample>> {
    if p_default.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(p_default.len(), labels.len()));
    }
    p_default
        .iter()
        .zip(labels)
        .map(|(&p, &l)| ScoredSample::new(p, l))
        .collect()
}

fn class_counts(samples: &[ScoredSample]) -> (usize, usize) {
    let pos = samples.iter().filter(|s| s.label.is_default()).count();
    (pos, samples.len() - pos)
}

fn require_both(samples: &[ScoredSample]) -> Result<(usize, usize)> {
    let (pos, neg) = class_counts(samples);
    if pos == 0 || neg == 0 {
        return Err(MetricsError::SingleClass {
            positives: pos,
            negatives: neg,
        });
    }
    Ok((pos, neg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Descending; the first entry is `+inf` (nothing predicted positive).
    pub thresholds: Vec<f64>,
    pub tpr: Vec<f64>,
    pub fpr: Vec<f64>,
}

/// Groups of tied scores in descending order as `(score, positives, negatives)`.
fn descending_groups(samples: &[ScoredSample]) -> Vec<(f64, usize, usize)> {
    let mut sorted: Vec<&ScoredSample> = samples.iter().collect();
    sorted.sort_by(|a, b| b.p_default.total_cmp(&a.p_default));
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for s in sorted {
        let (pos, neg) = if s.label.is_default() { (1, 0) } else { (0, 1) };
        match groups.last_mut() {
            Some(g) if g.0 == s.p_default => {
                g.1 += pos;
                g.2 += neg;
            }
            _ => groups.push((s.p_default, pos, neg)),
        }
    }
    groups
}

pub fn roc_curve(samples: &[ScoredSample]) -> Result<RocCurve> {
    let (pos, neg) = require_both(samples)?;
    let mut curve = RocCurve {
        thresholds: vec![f64::INFINITY],
        tpr: vec![0.0],
        fpr: vec![0.0],
    };
    let (mut tp, mut fp) = (0usize, 0usize);
    for (score, p, n) in descending_groups(samples) {
        tp += p;
        fp += n;
        curve.thresholds.push(score);
        curve.tpr.push(tp as f64 / pos as f64);
        curve.fpr.push(fp as f64 / neg as f64);
    }
    Ok(curve)
}

/// Area under the empirical ROC curve by the trapezoidal rule.
///
/// Each tied group adds a trapezoid whose area, in count units, is
/// `negatives_in_group * (positives_above + positives_in_group / 2)`. The
/// sum is accumulated in integers (halves doubled) before the single
/// division, so the result equals the Mann-Whitney pairwise statistic with
/// half credit for ties.
pub fn roc_auc(samples: &[ScoredSample]) -> Result<f64> {
    let (pos, neg) = require_both(samples)?;
    let mut doubled: u128 = 0;
    let mut pos_above: u128 = 0;
    for (_, p, n) in descending_groups(samples) {
        doubled += n as u128 * (2 * pos_above + p as u128);
        pos_above += p as u128;
    }
    Ok(doubled as f64 / (2.0 * pos as f64 * neg as f64))
}

/// F1 of the default class; a sample is predicted default iff
/// `p_default >= threshold`. Defined as 0 when there are no true positives.
pub fn f1_at_threshold(samples: &[ScoredSample], threshold: f64) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for s in samples {
        let predicted = s.p_default >= threshold;
        match (predicted, s.label.is_default()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
}

/// Mean squared difference between `p_default` and the 0/1 outcome.
pub fn brier(samples: &[ScoredSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(MetricsError::Empty);
    }
    let sum: f64 = samples.iter().map(|s| (s.p_default - s.label.outcome()).powi(2)).sum();
    Ok(sum / samples.len() as f64)
}

/// Credit score used by the profit metrics: low for likely defaulters.
pub fn credit_score(sample: &ScoredSample) -> f64 {
    1.0 - sample.p_default
}

/// Empirical rejection fractions `(F0(t), F1(t))` of defaulters and
/// non-defaulters: the share of each class with credit score `<= t`.
pub fn rejection_rates(samples: &[ScoredSample], t: f64) -> Result<(f64, f64)> {
    let (pos, neg) = require_both(samples)?;
    let (mut r0, mut r1) = (0usize, 0usize);
    for s in samples {
        if credit_score(s) <= t {
            if s.label.is_default() {
                r0 += 1;
            } else {
                r1 += 1;
            }
        }
    }
    Ok((r0 as f64 / pos as f64, r1 as f64 / neg as f64))
}

/// Average classification profit per borrower at cutoff `t`:
/// `(b0 - c*) π0 F0(t) - (c1 - c*) π1 F1(t)`.
pub fn classification_profit(
    samples: &[ScoredSample],
    t: f64,
    b0: f64,
    c1: f64,
    c_star: f64,
    pi0: f64,
    pi1: f64,
) -> Result<f64> {
    let (f0, f1) = rejection_rates(samples, t)?;
    Ok(profit_from_rates(f0, f1, b0, c1, c_star, pi0, pi1))
}

fn profit_from_rates(f0: f64, f1: f64, b0: f64, c1: f64, c_star: f64, pi0: f64, pi1: f64) -> f64 {
    (b0 - c_star) * pi0 * f0 - (c1 - c_star) * pi1 * f1
}

/// One point of the discretized joint density `h(b0, c1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub b0: f64,
    pub c1: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpParams {
    /// `(π0, π1)`: priors of defaulters and non-defaulters. Taken from the
    /// evaluated sample when `None`.
    pub priors: Option<(f64, f64)>,
    pub c_star: f64,
    /// Constant return on investment of a good loan.
    pub roi: f64,
    /// Weighted grid over `(b0, c1)`. Empty means a single point at
    /// `(1, roi)`.
    pub h: Vec<CostPoint>,
}

pub const DEFAULT_ROI: f64 = 0.2644;

impl Default for EmpParams {
    fn default() -> Self {
        EmpParams {
            priors: None,
            c_star: 0.0,
            roi: DEFAULT_ROI,
            h: Vec::new(),
        }
    }
}

impl EmpParams {
    /// Degenerate `h` at one `(b0, c1)`.
    pub fn point(b0: f64, c1: f64, c_star: f64) -> Self {
        EmpParams {
            priors: None,
            c_star,
            roi: c1,
            h: vec![CostPoint { b0, c1, weight: 1.0 }],
        }
    }

    pub fn grid(&self) -> Vec<CostPoint> {
        if self.h.is_empty() {
            vec![CostPoint {
                b0: 1.0,
                c1: self.roi,
                weight: 1.0,
            }]
        } else {
            self.h.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((pi0, pi1)) = self.priors {
            if pi0 < 0.0 || pi1 < 0.0 || (pi0 + pi1 - 1.0).abs() > 1e-9 {
                return Err(MetricsError::InvalidParams(format!(
                    "priors ({pi0}, {pi1}) must be non-negative and sum to 1"
                )));
            }
        }
        let grid = self.grid();
        if grid
            .iter()
            .any(|p| !(p.weight >= 0.0) || !p.b0.is_finite() || !p.c1.is_finite())
        {
            return Err(MetricsError::InvalidParams(
                "h weights must be non-negative and points finite".into(),
            ));
        }
        let total: f64 = grid.iter().map(|p| p.weight).sum();
        if total == 0.0 {
            return Err(MetricsError::InvalidParams("h has zero total weight".into()));
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(MetricsError::InvalidParams(format!(
                "h weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    fn resolve_priors(&self, samples: &[ScoredSample]) -> (f64, f64) {
        self.priors.unwrap_or_else(|| {
            let (pos, _) = class_counts(samples);
            let pi0 = pos as f64 / samples.len() as f64;
            (pi0, 1.0 - pi0)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpResult {
    pub emp: f64,
    /// Profit-maximizing cutoff per grid point, on the credit-score scale.
    /// `±inf` means reject nobody / everybody.
    pub best_cutoffs: Vec<f64>,
    pub max_profits: Vec<f64>,
}

/// Candidate cutoffs: `-inf`, midpoints between consecutive distinct
/// credit scores, and `+inf`. Profit is constant between scores, so these
/// cover every attainable value.
pub fn candidate_cutoffs(samples: &[ScoredSample]) -> Vec<f64> {
    let mut scores: Vec<f64> = samples.iter().map(credit_score).collect();
    scores.sort_by(f64::total_cmp);
    scores.dedup();
    let mut cutoffs = Vec::with_capacity(scores.len() + 1);
    cutoffs.push(f64::NEG_INFINITY);
    cutoffs.extend(scores.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cutoffs.push(f64::INFINITY);
    cutoffs
}

/// Expected Maximum Profit: the `h`-weighted sum over grid points of the
/// classification profit at that point's optimal cutoff.
pub fn emp(samples: &[ScoredSample], params: &EmpParams) -> Result<EmpResult> {
    let (pos, neg) = require_both(samples)?;
    params.validate()?;
    let (pi0, pi1) = params.resolve_priors(samples);

    // cumulative rejection counts at each candidate cutoff
    let mut sorted: Vec<(f64, bool)> = samples
        .iter()
        .map(|s| (credit_score(s), s.label.is_default()))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cutoffs = candidate_cutoffs(samples);
    let mut rates = Vec::with_capacity(cutoffs.len());
    rates.push((0.0, 0.0));
    let (mut r0, mut r1) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let score = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == score {
            if sorted[i].1 {
                r0 += 1;
            } else {
                r1 += 1;
            }
            i += 1;
        }
        rates.push((r0 as f64 / pos as f64, r1 as f64 / neg as f64));
    }
    debug_assert_eq!(rates.len(), cutoffs.len());

    let grid = params.grid();
    let mut result = EmpResult {
        emp: 0.0,
        best_cutoffs: Vec::with_capacity(grid.len()),
        max_profits: Vec::with_capacity(grid.len()),
    };
    for point in &grid {
        let mut best = f64::NEG_INFINITY;
        let mut best_t = cutoffs[0];
        for (&(f0, f1), &t) in rates.iter().zip(&cutoffs) {
            let profit = profit_from_rates(f0, f1, point.b0, point.c1, params.c_star, pi0, pi1);
            if profit > best {
                best = profit;
                best_t = t;
            }
        }
        result.emp += point.weight * best;
        result.best_cutoffs.push(best_t);
        result.max_profits.push(best);
    }
    Ok(result)
}

/// One row of a metrics report, in report column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model: String,
    pub auc: f64,
    pub f1: f64,
    pub brier: f64,
    pub emp: f64,
}

pub const REPORT_COLUMNS: [&str; 4] = ["AUC", "F1", "BS", "EMP"];

/// Computes the four report metrics for one model.
pub fn evaluate(
    model: &str,
    p_default: &[f64],
    labels: &[Label],
    threshold: f64,
    emp_params: &EmpParams,
) -> Result<MetricsRow> {
    let samples = scored(p_default, labels)?;
    Ok(MetricsRow {
        model: model.to_string(),
        auc: roc_auc(&samples)?,
        f1: f1_at_threshold(&samples, threshold),
        brier: brier(&samples)?,
        emp: emp(&samples, emp_params)?.emp,
    })
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["Model"];
    header.extend(REPORT_COLUMNS);
    w.write_record(&header)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            format!("{:.6}", r.auc),
            format!("{:.6}", r.f1),
            format!("{:.6}", r.brier),
            format!("{:.6}", r.emp),
        ])?;
    }
    w.flush()?;
    Ok(())
}
