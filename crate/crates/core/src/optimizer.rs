//! NSGA-II search over model hyperparameters, maximizing (AUC, EMP).

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, EmpParams};
use crate::models::{
    derive_seed, Activation, EmlpParams, FocalLossParams, ForestParams, LogisticParams, Loss, MemberWeighting,
    MlpParams, ModelError, ModelSpec, TrainingData, TreeParams,
};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid genome: {0}")]
    InvalidGenome(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("individual {0} has not been evaluated")]
    Unevaluated(usize),
    #[error("training failed: {0}")]
    Model(#[from] ModelError),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("write failed: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, OptimizerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParamKind {
    Continuous { lo: f64, hi: f64, scale: Scale },
    Integer { lo: i64, hi: i64 },
    Categorical { choices: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
}

impl Parameter {
    pub fn continuous(name: &str, lo: f64, hi: f64, scale: Scale) -> Self {
        Parameter {
            name: name.into(),
            kind: ParamKind::Continuous { lo, hi, scale },
        }
    }

    pub fn integer(name: &str, lo: i64, hi: i64) -> Self {
        Parameter {
            name: name.into(),
            kind: ParamKind::Integer { lo, hi },
        }
    }

    pub fn categorical(name: &str, choices: &[&str]) -> Self {
        Parameter {
            name: name.into(),
            kind: ParamKind::Categorical {
                choices: choices.iter().map(|c| c.to_string()).collect(),
            },
        }
    }

    fn contains(&self, gene: &Gene) -> bool {
        match (&self.kind, gene) {
            (ParamKind::Continuous { lo, hi, .. }, Gene::Real(v)) => v.is_finite() && lo <= v && v <= hi,
            (ParamKind::Integer { lo, hi }, Gene::Int(v)) => lo <= v && v <= hi,
            (ParamKind::Categorical { choices }, Gene::Choice(i)) => *i < choices.len(),
            _ => false,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Gene {
        match &self.kind {
            ParamKind::Continuous { lo, hi, scale } => match scale {
                Scale::Linear => Gene::Real(rng.gen_range(*lo..=*hi)),
                Scale::Log => Gene::Real(rng.gen_range(lo.ln()..=hi.ln()).exp().clamp(*lo, *hi)),
            },
            ParamKind::Integer { lo, hi } => Gene::Int(rng.gen_range(*lo..=*hi)),
            ParamKind::Categorical { choices } => Gene::Choice(rng.gen_range(0..choices.len())),
        }
    }

    /// Bounds of the space the variation operators work in (log space for
    /// log-scaled parameters).
    fn internal_bounds(&self) -> Option<(f64, f64)> {
        match &self.kind {
            ParamKind::Continuous {
                lo,
                hi,
                scale: Scale::Linear,
            } => Some((*lo, *hi)),
            ParamKind::Continuous {
                lo,
                hi,
                scale: Scale::Log,
            } => Some((lo.ln(), hi.ln())),
            ParamKind::Integer { lo, hi } => Some((*lo as f64, *hi as f64)),
            ParamKind::Categorical { .. } => None,
        }
    }

    fn to_internal(&self, gene: &Gene) -> f64 {
        match (&self.kind, gene) {
            (ParamKind::Continuous { scale: Scale::Log, .. }, Gene::Real(v)) => v.ln(),
            (_, Gene::Real(v)) => *v,
            (_, Gene::Int(v)) => *v as f64,
            (_, Gene::Choice(i)) => *i as f64,
        }
    }

    /// Maps an internal value back into the domain, clipping to the bounds
    /// and rounding integers.
    fn gene_from_internal(&self, v: f64) -> Gene {
        match &self.kind {
            ParamKind::Continuous { lo, hi, scale } => {
                let x = match scale {
                    Scale::Linear => v,
                    Scale::Log => v.exp(),
                };
                Gene::Real(x.clamp(*lo, *hi))
            }
            ParamKind::Integer { lo, hi } => Gene::Int((v.round() as i64).clamp(*lo, *hi)),
            ParamKind::Categorical { choices } => Gene::Choice((v.round().max(0.0) as usize).min(choices.len() - 1)),
        }
    }

    pub fn display(&self, gene: &Gene) -> String {
        match (&self.kind, gene) {
            (ParamKind::Categorical { choices }, Gene::Choice(i)) => choices[*i].clone(),
            (_, Gene::Real(v)) => v.to_string(),
            (_, Gene::Int(v)) => v.to_string(),
            (_, Gene::Choice(i)) => i.to_string(),
        }
    }

    fn to_json(&self, gene: &Gene) -> serde_json::Value {
        match (&self.kind, gene) {
            (ParamKind::Categorical { choices }, Gene::Choice(i)) => choices[*i].clone().into(),
            (_, Gene::Real(v)) => (*v).into(),
            (_, Gene::Int(v)) => (*v).into(),
            (_, Gene::Choice(i)) => (*i).into(),
        }
    }
}

/// One value per parameter of a [`SearchSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gene {
    Real(f64),
    Int(i64),
    /// Index into the parameter's choices.
    Choice(usize),
}

impl Gene {
    fn key(&self) -> (u8, u64) {
        match self {
            Gene::Real(v) => (0, v.to_bits()),
            Gene::Int(v) => (1, *v as u64),
            Gene::Choice(i) => (2, *i as u64),
        }
    }
}

pub type Genome = Vec<Gene>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub parameters: Vec<Parameter>,
}

impl SearchSpace {
    pub fn new(parameters: Vec<Parameter>) -> Result<Self> {
        let space = SearchSpace { parameters };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameters.is_empty() {
            return Err(OptimizerError::InvalidSpace("no parameters".into()));
        }
        for (i, p) in self.parameters.iter().enumerate() {
            if self.parameters[..i].iter().any(|q| q.name == p.name) {
                return Err(OptimizerError::InvalidSpace(format!("duplicate parameter {}", p.name)));
            }
            let ok = match &p.kind {
                ParamKind::Continuous { lo, hi, scale } => {
                    lo.is_finite() && hi.is_finite() && lo < hi && (*scale == Scale::Linear || *lo > 0.0)
                }
                ParamKind::Integer { lo, hi } => lo < hi,
                ParamKind::Categorical { choices } => !choices.is_empty(),
            };
            if !ok {
                return Err(OptimizerError::InvalidSpace(format!("bad domain for {}", p.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p.name == name)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Genome {
        self.parameters.iter().map(|p| p.sample(rng)).collect()
    }

    pub fn check(&self, genome: &[Gene]) -> Result<()> {
        if genome.len() != self.parameters.len() {
            return Err(OptimizerError::InvalidGenome(format!(
                "{} genes for {} parameters",
                genome.len(),
                self.parameters.len()
            )));
        }
        for (p, g) in self.parameters.iter().zip(genome) {
            if !p.contains(g) {
                return Err(OptimizerError::InvalidGenome(format!(
                    "{} = {:?} outside its domain",
                    p.name, g
                )));
            }
        }
        Ok(())
    }

    /// Name → value map with categorical genes shown by choice name.
    pub fn genome_json(&self, genome: &[Gene]) -> serde_json::Map<String, serde_json::Value> {
        self.parameters
            .iter()
            .zip(genome)
            .map(|(p, g)| (p.name.clone(), p.to_json(g)))
            .collect()
    }

    fn genome_key(genome: &[Gene]) -> Vec<(u8, u64)> {
        genome.iter().map(Gene::key).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub trial: usize,
    pub genome: Genome,
    /// `(auc, emp)`, `None` until evaluated.
    pub objectives: Option<(f64, f64)>,
    pub rank: usize,
    pub crowding: f64,
    /// Reason the evaluation failed; such individuals score `(0, 0)`.
    pub infeasible: Option<String>,
}

impl Individual {
    fn new(trial: usize, genome: Genome) -> Self {
        Individual {
            trial,
            genome,
            objectives: None,
            rank: 0,
            crowding: 0.0,
            infeasible: None,
        }
    }

    pub fn objectives(&self) -> Result<(f64, f64)> {
        self.objectives.ok_or(OptimizerError::Unevaluated(self.trial))
    }
}

/// Both objectives maximized: `a` dominates `b` when it is no worse in
/// both and strictly better in at least one.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

/// Non-dominated fronts of `points` as index lists, best front first;
/// indices within a front are ascending.
pub fn nondominated_fronts(points: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(points[i], points[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(points[j], points[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

pub fn fast_nondominated_sort(population: &[Individual]) -> Result<Vec<Vec<usize>>> {
    let points = population
        .iter()
        .map(Individual::objectives)
        .collect::<Result<Vec<_>>>()?;
    Ok(nondominated_fronts(&points))
}

/// Crowding distance of each member of `front` (indices into `points`),
/// returned in the order of `front`. Boundary members get `+inf`; an
/// objective with zero range adds nothing. Ties in an objective are
/// ordered by position in `front`.
pub fn crowding_distance(points: &[(f64, f64)], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for obj in 0..2 {
        let value = |k: usize| {
            if obj == 0 {
                points[front[k]].0
            } else {
                points[front[k]].1
            }
        };
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let range = value(order[m - 1]) - value(order[0]);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        if range <= 0.0 {
            continue;
        }
        for k in 1..m - 1 {
            dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
        }
    }
    dist
}

/// Area dominated by `points` and bounded below by `reference`; points not
/// strictly above the reference in both objectives add nothing.
pub fn hypervolume(points: &[(f64, f64)], reference: (f64, f64)) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0 > reference.0 && p.1 > reference.1)
        .collect();
    // sweep by the first objective, best first
    pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut area = 0.0;
    let mut covered = reference.1;
    for (x, y) in pts {
        if y > covered {
            area += (x - reference.0) * (y - covered);
            covered = y;
        }
    }
    area
}

/// Non-dominated, feasible individuals of a finished search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<Individual>,
}

impl ParetoFront {
    pub fn new(members: Vec<Individual>) -> Result<Self> {
        let front = ParetoFront { members };
        front.audit()?;
        Ok(front)
    }

    /// Errors when a member is unevaluated or dominates another member.
    pub fn audit(&self) -> Result<()> {
        let points = self.points()?;
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if i != j && dominates(*a, *b) {
                    return Err(OptimizerError::Evaluation(format!(
                        "front member {} dominates member {}",
                        self.members[i].trial, self.members[j].trial
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        self.members.iter().map(Individual::objectives).collect()
    }

    pub fn distinct_points(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.members.iter().filter_map(|m| m.objectives).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.dedup();
        pts
    }

    pub fn hypervolume(&self, reference: (f64, f64)) -> f64 {
        hypervolume(&self.distinct_points(), reference)
    }

    /// Index of the member with the largest exclusive hypervolume
    /// contribution after scaling each objective to `[0, 1]` over the front,
    /// with the reference point at `-0.1` in both scaled objectives. Ties go
    /// to the lower index; `None` for an empty front.
    pub fn knee_point(&self) -> Option<usize> {
        let points: Vec<(f64, f64)> = self
            .members
            .iter()
            .map(|m| m.objectives.unwrap_or((0.0, 0.0)))
            .collect();
        if points.is_empty() {
            return None;
        }
        let scale = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 };
        let (lo0, hi0) = min_max(points.iter().map(|p| p.0));
        let (lo1, hi1) = min_max(points.iter().map(|p| p.1));
        let scaled: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (scale(p.0, lo0, hi0), scale(p.1, lo1, hi1)))
            .collect();
        let reference = (-0.1, -0.1);
        let total = hypervolume(&scaled, reference);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..scaled.len() {
            let others: Vec<(f64, f64)> = scaled
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| *p)
                .collect();
            let contribution = total - hypervolume(&others, reference);
            if best.is_none_or(|(_, c)| contribution > c + 1e-15) {
                best = Some((i, contribution));
            }
        }
        best.map(|(i, _)| i)
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NsgaConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub eta_crossover: f64,
    /// Per-gene mutation probability; `None` means `1 / genome length`.
    pub mutation_prob: Option<f64>,
    pub eta_mutation: f64,
    /// Reference point of the tracked hypervolume.
    pub reference: (f64, f64),
    pub seed: u64,
}

impl Default for NsgaConfig {
    fn default() -> Self {
        NsgaConfig {
            pop_size: 32,
            generations: 25,
            crossover_prob: 0.9,
            eta_crossover: 15.0,
            mutation_prob: None,
            eta_mutation: 20.0,
            reference: (0.0, 0.0),
            seed: 42,
        }
    }
}

impl NsgaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(OptimizerError::InvalidConfig(format!(
                "pop_size {} must be even and >= 4",
                self.pop_size
            )));
        }
        if self.generations == 0 {
            return Err(OptimizerError::InvalidConfig("generations must be >= 1".into()));
        }
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.crossover_prob) || !self.mutation_prob.is_none_or(unit) {
            return Err(OptimizerError::InvalidConfig("probabilities must lie in [0, 1]".into()));
        }
        if !(self.eta_crossover >= 0.0) || !(self.eta_mutation >= 0.0) {
            return Err(OptimizerError::InvalidConfig(
                "distribution indices must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// One evaluation, in the order performed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub generation: usize,
    pub genome: Genome,
    pub auc: f64,
    pub emp: f64,
    pub infeasible: Option<String>,
    /// Objectives reused from an earlier trial with the same genome.
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub front_size: usize,
    pub hypervolume: f64,
    pub best_hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveResult {
    pub front: ParetoFront,
    pub population: Vec<Individual>,
    pub trials: Vec<TrialRecord>,
    pub history: Vec<GenerationStats>,
}

/// Outcome of evaluating one genome: objectives, or the reason it is
/// infeasible.
pub type Evaluation = std::result::Result<(f64, f64), String>;

/// Generational NSGA-II. `evaluate` receives each genome together with the
/// run seed and must be deterministic in both; genomes already seen are not
/// re-evaluated. Evaluations within a generation run in parallel.
pub fn evolve<F>(space: &SearchSpace, config: &NsgaConfig, evaluate: F) -> Result<EvolveResult>
where
    F: Fn(&[Gene], u64) -> Evaluation + Sync,
{
    space.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cache: HashMap<Vec<(u8, u64)>, Evaluation> = HashMap::new();
    let mut trials = Vec::new();
    let mut history = Vec::new();
    let mut best_hv = f64::NEG_INFINITY;

    let initial: Vec<Individual> = (0..config.pop_size)
        .map(|t| Individual::new(t, space.sample(&mut rng)))
        .collect();
    let mut population = evaluate_batch(initial, 0, config.seed, &evaluate, &mut cache, &mut trials);
    assign_rank_and_crowding(&mut population);
    record_generation(0, &population, config, &mut best_hv, &mut history);

    let mutation_prob = config.mutation_prob.unwrap_or(1.0 / space.len() as f64);
    for generation in 1..=config.generations {
        let mut offspring = Vec::with_capacity(config.pop_size);
        while offspring.len() < config.pop_size {
            let a = &population[tournament(&population, &mut rng)];
            let b = &population[tournament(&population, &mut rng)];
            let (mut c1, mut c2) = crossover(space, &a.genome, &b.genome, config, &mut rng);
            mutate(space, &mut c1, mutation_prob, config.eta_mutation, &mut rng);
            mutate(space, &mut c2, mutation_prob, config.eta_mutation, &mut rng);
            for child in [c1, c2] {
                debug_assert!(space.check(&child).is_ok());
                offspring.push(Individual::new(trials.len() + offspring.len(), child));
            }
        }
        let offspring = evaluate_batch(offspring, generation, config.seed, &evaluate, &mut cache, &mut trials);
        let mut combined = population;
        combined.extend(offspring);
        population = select_survivors(combined, config.pop_size);
        record_generation(generation, &population, config, &mut best_hv, &mut history);
    }

    let front_members: Vec<Individual> = population
        .iter()
        .filter(|i| i.rank == 0 && i.infeasible.is_none())
        .cloned()
        .collect();
    let front = ParetoFront::new(front_members)?;
    Ok(EvolveResult {
        front,
        population,
        trials,
        history,
    })
}

fn evaluate_batch<F>(
    mut batch: Vec<Individual>,
    generation: usize,
    seed: u64,
    evaluate: &F,
    cache: &mut HashMap<Vec<(u8, u64)>, Evaluation>,
    trials: &mut Vec<TrialRecord>,
) -> Vec<Individual>
where
    F: Fn(&[Gene], u64) -> Evaluation + Sync,
{
    // distinct unseen genomes, in first-seen order
    let mut pending: Vec<(Vec<(u8, u64)>, Genome)> = Vec::new();
    for ind in &batch {
        let key = SearchSpace::genome_key(&ind.genome);
        if !cache.contains_key(&key) && !pending.iter().any(|(k, _)| *k == key) {
            pending.push((key, ind.genome.clone()));
        }
    }
    let fresh: Vec<Evaluation> = pending
        .par_iter()
        .map(|(_, genome)| match evaluate(genome, seed) {
            Ok((a, e)) if a.is_finite() && e.is_finite() => Ok((a, e)),
            Ok((a, e)) => Err(format!("non-finite objectives ({a}, {e})")),
            Err(reason) => Err(reason),
        })
        .collect();
    let fresh_keys: Vec<Vec<(u8, u64)>> = pending.iter().map(|(k, _)| k.clone()).collect();
    let mut first_use: Vec<bool> = vec![true; fresh_keys.len()];
    for ((key, _), result) in pending.into_iter().zip(fresh) {
        cache.insert(key, result);
    }
    for ind in batch.iter_mut() {
        let key = SearchSpace::genome_key(&ind.genome);
        let result = cache[&key].clone();
        let cached = match fresh_keys.iter().position(|k| *k == key) {
            Some(p) if first_use[p] => {
                first_use[p] = false;
                false
            }
            _ => true,
        };
        let (objectives, infeasible) = match result {
            Ok(obj) => (obj, None),
            Err(reason) => {
                log::warn!("trial {} infeasible: {reason}", ind.trial);
                ((0.0, 0.0), Some(reason))
            }
        };
        ind.objectives = Some(objectives);
        ind.infeasible = infeasible.clone();
        trials.push(TrialRecord {
            trial: ind.trial,
            generation,
            genome: ind.genome.clone(),
            auc: objectives.0,
            emp: objectives.1,
            infeasible,
            cached,
        });
    }
    batch
}

fn assign_rank_and_crowding(population: &mut [Individual]) {
    let points: Vec<(f64, f64)> = population.iter().map(|i| i.objectives.unwrap_or((0.0, 0.0))).collect();
    for (rank, front) in nondominated_fronts(&points).iter().enumerate() {
        let dist = crowding_distance(&points, front);
        for (&i, d) in front.iter().zip(dist) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
}

/// Elitist truncation of parents + offspring: whole fronts while they fit,
/// then the last front by descending crowding distance.
fn select_survivors(combined: Vec<Individual>, n: usize) -> Vec<Individual> {
    let points: Vec<(f64, f64)> = combined.iter().map(|i| i.objectives.unwrap_or((0.0, 0.0))).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for front in nondominated_fronts(&points) {
        if chosen.len() == n {
            break;
        }
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
        } else {
            let dist = crowding_distance(&points, &front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
            chosen.extend(order.into_iter().take(n - chosen.len()).map(|k| front[k]));
        }
    }
    chosen.sort_unstable();
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    let mut survivors: Vec<Individual> = chosen.into_iter().map(|i| slots[i].take().unwrap()).collect();
    assign_rank_and_crowding(&mut survivors);
    survivors
}

fn record_generation(
    generation: usize,
    population: &[Individual],
    config: &NsgaConfig,
    best: &mut f64,
    history: &mut Vec<GenerationStats>,
) {
    let front: Vec<(f64, f64)> = population
        .iter()
        .filter(|i| i.rank == 0 && i.infeasible.is_none())
        .filter_map(|i| i.objectives)
        .collect();
    let hv = hypervolume(&front, config.reference);
    *best = best.max(hv);
    log::debug!("generation {generation}: front {} hv {hv:.6}", front.len());
    history.push(GenerationStats {
        generation,
        front_size: front.len(),
        hypervolume: hv,
        best_hypervolume: *best,
    });
}

/// Binary tournament: lower rank wins, then larger crowding distance, then
/// the first drawn.
fn tournament<R: Rng>(population: &[Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    let (x, y) = (&population[a], &population[b]);
    if y.rank < x.rank || (y.rank == x.rank && y.crowding > x.crowding) {
        b
    } else {
        a
    }
}

fn crossover<R: Rng>(
    space: &SearchSpace,
    a: &[Gene],
    b: &[Gene],
    config: &NsgaConfig,
    rng: &mut R,
) -> (Genome, Genome) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.gen::<f64>() >= config.crossover_prob {
        return (c1, c2);
    }
    for (k, p) in space.parameters.iter().enumerate() {
        let swap = rng.gen::<f64>() < 0.5;
        match p.internal_bounds() {
            None => {
                if swap {
                    std::mem::swap(&mut c1[k], &mut c2[k]);
                }
            }
            Some((lo, hi)) => {
                if !swap {
                    continue;
                }
                let (x1, x2) = sbx(
                    p.to_internal(&a[k]),
                    p.to_internal(&b[k]),
                    lo,
                    hi,
                    config.eta_crossover,
                    rng,
                );
                c1[k] = p.gene_from_internal(x1);
                c2[k] = p.gene_from_internal(x2);
            }
        }
    }
    (c1, c2)
}

/// Bounded simulated binary crossover of one variable.
pub fn sbx<R: Rng>(x1: f64, x2: f64, lo: f64, hi: f64, eta: f64, rng: &mut R) -> (f64, f64) {
    if (x1 - x2).abs() <= 1e-14 {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.gen();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let beta_lo = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    let c1 = 0.5 * ((y1 + y2) - spread(beta_lo) * (y2 - y1));
    let beta_hi = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    let c2 = 0.5 * ((y1 + y2) + spread(beta_hi) * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.gen::<f64>() < 0.5 {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Bounded polynomial mutation of one variable.
pub fn polynomial_mutation<R: Rng>(x: f64, lo: f64, hi: f64, eta: f64, rng: &mut R) -> f64 {
    let range = hi - lo;
    if range <= 0.0 {
        return x;
    }
    let d1 = (x - lo) / range;
    let d2 = (hi - x) / range;
    let u: f64 = rng.gen();
    let power = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(power) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(power)
    };
    (x + dq * range).clamp(lo, hi)
}

fn mutate<R: Rng>(space: &SearchSpace, genome: &mut [Gene], prob: f64, eta: f64, rng: &mut R) {
    for (k, p) in space.parameters.iter().enumerate() {
        if rng.gen::<f64>() >= prob {
            continue;
        }
        genome[k] = match p.internal_bounds() {
            None => p.sample(rng),
            Some((lo, hi)) => {
                let mut x = polynomial_mutation(p.to_internal(&genome[k]), lo, hi, eta, rng);
                if let ParamKind::Integer { .. } = p.kind {
                    // make sure an integer gene can actually move
                    if x.round() == p.to_internal(&genome[k]) && (x - x.round()).abs() > 0.0 {
                        x += (x - x.round()).signum();
                    }
                }
                p.gene_from_internal(x)
            }
        };
    }
}

// ---------------------------------------------------------------------------
// Model hyperparameter spaces

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Ct,
    Rf,
    Mlp,
    Emlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Lr,
        ModelKind::Ct,
        ModelKind::Rf,
        ModelKind::Mlp,
        ModelKind::Emlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lr => "LR",
            ModelKind::Ct => "CT",
            ModelKind::Rf => "RF",
            ModelKind::Mlp => "MLP",
            ModelKind::Emlp => "EMLP",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn of(spec: &ModelSpec) -> ModelKind {
        match spec {
            ModelSpec::Lr(_) => ModelKind::Lr,
            ModelSpec::Ct(_) => ModelKind::Ct,
            ModelSpec::Rf(_) => ModelKind::Rf,
            ModelSpec::Mlp(_) => ModelKind::Mlp,
            ModelSpec::Emlp(_) => ModelKind::Emlp,
        }
    }

    /// Default hyperparameters when nothing is searched.
    pub fn default_spec(self) -> ModelSpec {
        match self {
            ModelKind::Lr => ModelSpec::Lr(LogisticParams::default()),
            ModelKind::Ct => ModelSpec::Ct(TreeParams::default()),
            ModelKind::Rf => ModelSpec::Rf(ForestParams::default()),
            ModelKind::Mlp => ModelSpec::Mlp(MlpParams::default()),
            ModelKind::Emlp => ModelSpec::Emlp(EmlpParams::default()),
        }
    }
}

fn mlp_parameters() -> Vec<Parameter> {
    vec![
        Parameter::integer("n_layers", 1, 3),
        Parameter::integer("units_1", 4, 128),
        Parameter::integer("units_2", 4, 128),
        Parameter::integer("units_3", 4, 128),
        Parameter::continuous("lr", 1e-4, 1e-1, Scale::Log),
        Parameter::integer("epochs", 20, 200),
        Parameter::continuous("gamma", 0.0, 5.0, Scale::Linear),
        Parameter::continuous("alpha", 0.1, 0.9, Scale::Linear),
    ]
}

/// The per-family search space.
pub fn default_space(kind: ModelKind) -> SearchSpace {
    let parameters = match kind {
        ModelKind::Lr => vec![
            Parameter::continuous("lr", 1e-4, 1.0, Scale::Log),
            Parameter::continuous("l2", 1e-6, 1.0, Scale::Log),
            Parameter::integer("epochs", 50, 500),
        ],
        ModelKind::Ct => vec![
            Parameter::integer("max_depth", 2, 12),
            Parameter::integer("min_leaf", 1, 64),
        ],
        ModelKind::Rf => vec![
            Parameter::integer("n_trees", 10, 300),
            Parameter::integer("max_depth", 2, 12),
            Parameter::continuous("feature_fraction", 0.2, 1.0, Scale::Linear),
        ],
        ModelKind::Mlp => mlp_parameters(),
        ModelKind::Emlp => {
            let mut p = mlp_parameters();
            p.push(Parameter::integer("n_members", 3, 9));
            p.push(Parameter::categorical("weighting", &["uniform", "validation_auc"]));
            p
        }
    };
    SearchSpace { parameters }
}

/// Builds the model spec a genome encodes. Parameters absent from `space`
/// keep their defaults; names the family does not know are rejected.
pub fn decode(kind: ModelKind, space: &SearchSpace, genome: &[Gene]) -> Result<ModelSpec> {
    space.check(genome)?;
    let real = |g: &Gene| match g {
        Gene::Real(v) => *v,
        Gene::Int(v) => *v as f64,
        Gene::Choice(i) => *i as f64,
    };
    let int = |g: &Gene| real(g).round().max(0.0) as usize;
    let unknown = |name: &str| OptimizerError::InvalidGenome(format!("{} has no parameter {name}", kind.name()));
    let mut spec = kind.default_spec();
    let mut layers = None;
    let mut units = [None; 3];
    for (p, g) in space.parameters.iter().zip(genome) {
        let name = p.name.as_str();
        match &mut spec {
            ModelSpec::Lr(lr) => match name {
                "lr" => lr.lr = real(g),
                "l2" => lr.l2 = real(g),
                "epochs" => lr.epochs = int(g),
                _ => return Err(unknown(name)),
            },
            ModelSpec::Ct(ct) => match name {
                "max_depth" => ct.max_depth = int(g),
                "min_leaf" => ct.min_leaf = int(g),
                _ => return Err(unknown(name)),
            },
            ModelSpec::Rf(rf) => match name {
                "n_trees" => rf.n_trees = int(g),
                "max_depth" => rf.max_depth = int(g),
                "min_leaf" => rf.min_leaf = int(g),
                "feature_fraction" => rf.feature_fraction = real(g),
                _ => return Err(unknown(name)),
            },
            ModelSpec::Mlp(_) | ModelSpec::Emlp(_) => {
                let (mlp, emlp) = match &mut spec {
                    ModelSpec::Mlp(m) => (m, None),
                    ModelSpec::Emlp(e) => {
                        let EmlpParams {
                            mlp,
                            n_members,
                            weighting,
                            ..
                        } = e;
                        (mlp, Some((n_members, weighting)))
                    }
                    _ => unreachable!(),
                };
                match (name, emlp) {
                    ("n_layers", _) => layers = Some(int(g)),
                    ("units_1", _) => units[0] = Some(int(g)),
                    ("units_2", _) => units[1] = Some(int(g)),
                    ("units_3", _) => units[2] = Some(int(g)),
                    ("lr", _) => mlp.lr = real(g),
                    ("epochs", _) => mlp.epochs = int(g),
                    ("gamma", _) | ("alpha", _) => {
                        let mut f = match mlp.loss {
                            Loss::Focal(f) => f,
                            Loss::CrossEntropy => FocalLossParams::default(),
                        };
                        if name == "gamma" {
                            f.gamma = real(g);
                        } else {
                            f.alpha_t = real(g);
                        }
                        mlp.loss = Loss::Focal(f);
                    }
                    ("activation", _) => {
                        mlp.activation = match p.display(g).as_str() {
                            "tanh" => Activation::Tanh,
                            _ => Activation::Relu,
                        }
                    }
                    ("n_members", Some((n, _))) => *n = int(g),
                    ("weighting", Some((_, w))) => {
                        *w = match p.display(g).as_str() {
                            "validation_auc" => MemberWeighting::ValidationAuc,
                            _ => MemberWeighting::Uniform,
                        }
                    }
                    _ => return Err(unknown(name)),
                }
            }
        }
    }
    if let Some(n) = layers {
        let mlp = match &mut spec {
            ModelSpec::Mlp(m) => m,
            ModelSpec::Emlp(e) => &mut e.mlp,
            _ => unreachable!(),
        };
        let defaults = mlp.hidden_sizes.clone();
        mlp.hidden_sizes = (0..n.clamp(1, 3))
            .map(|k| units[k].or_else(|| defaults.get(k).copied()).unwrap_or(16))
            .collect();
    }
    Ok(spec)
}

/// Trains the genome's model on `train` and returns `(AUC, EMP)` on
/// `validation`. Invalid genomes fail before any training.
pub fn evaluate_individual(
    genome: &[Gene],
    kind: ModelKind,
    space: &SearchSpace,
    train: &TrainingData,
    validation: &TrainingData,
    emp_params: &EmpParams,
    seed: u64,
) -> Result<(f64, f64)> {
    let spec = decode(kind, space, genome)?;
    let model = spec.train(train, Some(validation), seed)?;
    let p = model.predict_matrix(&validation.x)?;
    let samples = metrics::scored(&p, &validation.labels()).map_err(|e| OptimizerError::Evaluation(e.to_string()))?;
    let auc = metrics::roc_auc(&samples).map_err(|e| OptimizerError::Evaluation(e.to_string()))?;
    let emp = metrics::emp(&samples, emp_params)
        .map_err(|e| OptimizerError::Evaluation(e.to_string()))?
        .emp;
    Ok((auc, emp))
}

/// NSGA-II over `space` for one model family. Training failures become
/// flagged infeasible individuals; each trial trains from a seed derived
/// from the run seed.
pub fn optimize_model(
    kind: ModelKind,
    space: &SearchSpace,
    train: &TrainingData,
    validation: &TrainingData,
    emp_params: &EmpParams,
    config: &NsgaConfig,
) -> Result<EvolveResult> {
    // reject spaces naming parameters the family lacks before any training
    decode(kind, space, &space.sample(&mut ChaCha8Rng::seed_from_u64(0)))?;
    emp_params
        .validate()
        .map_err(|e| OptimizerError::InvalidConfig(e.to_string()))?;
    evolve(space, config, |genome, seed| {
        evaluate_individual(genome, kind, space, train, validation, emp_params, derive_seed(seed, 1))
            .map_err(|e| e.to_string())
    })
}

// ---------------------------------------------------------------------------
// Reports

fn io_err(e: impl std::fmt::Display) -> OptimizerError {
    OptimizerError::Io(e.to_string())
}

/// Front CSV: trial id, one column per parameter, auc, emp, rank, crowding.
pub fn write_front_csv<W: Write>(space: &SearchSpace, members: &[Individual], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["trial".to_string()];
    header.extend(space.parameters.iter().map(|p| p.name.clone()));
    header.extend(["auc", "emp", "rank", "crowding"].map(String::from));
    w.write_record(&header).map_err(io_err)?;
    for ind in members {
        let (auc, emp) = ind.objectives()?;
        let mut row = vec![ind.trial.to_string()];
        row.extend(space.parameters.iter().zip(&ind.genome).map(|(p, g)| p.display(g)));
        row.extend([
            auc.to_string(),
            emp.to_string(),
            ind.rank.to_string(),
            ind.crowding.to_string(),
        ]);
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Every evaluation as one CSV row, for scatter plots.
pub fn write_trials_csv<W: Write>(space: &SearchSpace, trials: &[TrialRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["trial".to_string(), "generation".to_string()];
    header.extend(space.parameters.iter().map(|p| p.name.clone()));
    header.extend(["auc", "emp", "infeasible"].map(String::from));
    w.write_record(&header).map_err(io_err)?;
    for t in trials {
        let mut row = vec![t.trial.to_string(), t.generation.to_string()];
        row.extend(space.parameters.iter().zip(&t.genome).map(|(p, g)| p.display(g)));
        row.extend([
            t.auc.to_string(),
            t.emp.to_string(),
            t.infeasible.clone().unwrap_or_default(),
        ]);
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// One JSON object per line, one line per evaluation.
pub fn write_trial_log<W: Write>(space: &SearchSpace, trials: &[TrialRecord], mut writer: W) -> Result<()> {
    for t in trials {
        let record = serde_json::json!({
            "trial": t.trial,
            "generation": t.generation,
            "params": space.genome_json(&t.genome),
            "auc": t.auc,
            "emp": t.emp,
            "infeasible": t.infeasible,
            "cached": t.cached,
        });
        writeln!(writer, "{record}").map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(trial: usize, obj: (f64, f64)) -> Individual {
        Individual {
            objectives: Some(obj),
            ..Individual::new(trial, vec![])
        }
    }

    #[test]
    fn three_point_fronts() {
        let fronts = nondominated_fronts(&[(2.0, 2.0), (1.0, 1.0), (0.0, 3.0)]);
        assert_eq!(fronts, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn identical_points_share_a_front() {
        assert_eq!(nondominated_fronts(&[(1.0, 1.0); 4]), vec![vec![0, 1, 2, 3]]);
        assert_eq!(nondominated_fronts(&[(0.3, 0.1)]), vec![vec![0]]);
    }

    #[test]
    fn unevaluated_is_an_error() {
        let pop = vec![ind(0, (1.0, 1.0)), Individual::new(1, vec![])];
        assert!(matches!(
            fast_nondominated_sort(&pop),
            Err(OptimizerError::Unevaluated(1))
        ));
    }

    #[test]
    fn crowding_examples() {
        let pts = [(0.0, 2.0), (1.0, 1.0), (2.0, 0.0)];
        let d = crowding_distance(&pts, &[0, 1, 2]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-12);
        assert!(crowding_distance(&pts, &[0, 1]).iter().all(|d| d.is_infinite()));
        let flat = [(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)];
        let d = crowding_distance(&flat, &[0, 1, 2]);
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_of_staircase() {
        let hv = hypervolume(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0), (1.0, 1.0)], (0.0, 0.0));
        assert!((hv - 6.0).abs() < 1e-12);
        assert_eq!(hypervolume(&[], (0.0, 0.0)), 0.0);
    }

    #[test]
    fn sbx_and_mutation_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let a = rng.gen_range(-1.0..3.0);
            let b = rng.gen_range(-1.0..3.0);
            let (c, d) = sbx(a, b, -1.0, 3.0, 15.0, &mut rng);
            assert!((-1.0..=3.0).contains(&c) && (-1.0..=3.0).contains(&d));
            let m = polynomial_mutation(a, -1.0, 3.0, 20.0, &mut rng);
            assert!((-1.0..=3.0).contains(&m));
        }
    }

    #[test]
    fn space_validation() {
        assert!(SearchSpace::new(vec![Parameter::integer("a", 3, 3)]).is_err());
        assert!(SearchSpace::new(vec![Parameter::continuous("a", 0.0, 1.0, Scale::Log)]).is_err());
        assert!(SearchSpace::new(vec![Parameter::categorical("a", &[])]).is_err());
        assert!(SearchSpace::new(vec![Parameter::integer("a", 0, 1), Parameter::integer("a", 0, 2)]).is_err());
        for kind in ModelKind::ALL {
            default_space(kind).validate().unwrap();
        }
    }

    #[test]
    fn genome_outside_domain_rejected() {
        let space = default_space(ModelKind::Ct);
        assert!(decode(ModelKind::Ct, &space, &[Gene::Int(1), Gene::Int(5)]).is_err());
        assert!(decode(ModelKind::Ct, &space, &[Gene::Int(3)]).is_err());
        assert!(decode(ModelKind::Ct, &space, &[Gene::Real(3.0), Gene::Int(5)]).is_err());
        let spec = decode(ModelKind::Ct, &space, &[Gene::Int(3), Gene::Int(5)]).unwrap();
        assert_eq!(
            spec,
            ModelSpec::Ct(TreeParams {
                max_depth: 3,
                min_leaf: 5
            })
        );
    }

    #[test]
    fn mlp_genome_decodes_layers() {
        let space = default_space(ModelKind::Emlp);
        let genome = vec![
            Gene::Int(2),
            Gene::Int(8),
            Gene::Int(6),
            Gene::Int(100),
            Gene::Real(0.01),
            Gene::Int(30),
            Gene::Real(2.0),
            Gene::Real(0.25),
            Gene::Int(4),
            Gene::Choice(1),
        ];
        let ModelSpec::Emlp(e) = decode(ModelKind::Emlp, &space, &genome).unwrap() else {
            panic!()
        };
        assert_eq!(e.mlp.hidden_sizes, vec![8, 6]);
        assert_eq!(e.n_members, 4);
        assert_eq!(e.weighting, MemberWeighting::ValidationAuc);
        assert_eq!(
            e.mlp.loss,
            Loss::Focal(FocalLossParams {
                alpha_t: 0.25,
                gamma: 2.0
            })
        );
    }

    #[test]
    fn config_validation() {
        let bad = NsgaConfig {
            pop_size: 5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = NsgaConfig {
            generations: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dominant_genome_survives_one_generation() {
        let space = SearchSpace::new(vec![Parameter::integer("x", 0, 20)]).unwrap();
        let config = NsgaConfig {
            pop_size: 4,
            generations: 1,
            seed: 3,
            ..Default::default()
        };
        let result = evolve(&space, &config, |g, _| {
            let Gene::Int(x) = g[0] else { unreachable!() };
            Ok((x as f64, x as f64))
        })
        .unwrap();
        let best_seen = result.trials.iter().map(|t| t.auc).fold(f64::MIN, f64::max);
        assert_eq!(result.front.distinct_points(), vec![(best_seen, best_seen)]);
    }

    #[test]
    fn infeasible_individuals_are_flagged() {
        let space = SearchSpace::new(vec![Parameter::integer("x", 0, 9)]).unwrap();
        let config = NsgaConfig {
            pop_size: 8,
            generations: 2,
            ..Default::default()
        };
        let result = evolve(&space, &config, |g, _| {
            let Gene::Int(x) = g[0] else { unreachable!() };
            if x % 2 == 1 {
                Err("odd".into())
            } else {
                Ok((x as f64, 1.0))
            }
        })
        .unwrap();
        for t in &result.trials {
            let Gene::Int(x) = t.genome[0] else { unreachable!() };
            assert_eq!(t.infeasible.is_some(), x % 2 == 1);
            if t.infeasible.is_some() {
                assert_eq!((t.auc, t.emp), (0.0, 0.0));
            }
        }
        assert!(result.front.members.iter().all(|m| m.infeasible.is_none()));
    }

    #[test]
    fn knee_prefers_the_bend() {
        let front = ParetoFront::new(vec![ind(0, (0.0, 1.0)), ind(1, (0.8, 0.8)), ind(2, (1.0, 0.0))]).unwrap();
        assert_eq!(front.knee_point(), Some(1));
        assert!(ParetoFront::new(vec![ind(0, (1.0, 1.0)), ind(1, (0.5, 0.5))]).is_err());
    }

    #[test]
    fn front_csv_columns() {
        let space = default_space(ModelKind::Ct);
        let mut member = ind(7, (0.75, 0.01));
        member.genome = vec![Gene::Int(3), Gene::Int(10)];
        let mut buf = Vec::new();
        write_front_csv(&space, &[member], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,max_depth,min_leaf,auc,emp,rank,crowding\n7,3,10,0.75,0.01,0,0"));
    }
}
