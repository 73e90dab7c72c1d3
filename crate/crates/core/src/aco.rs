//! Ant colony search over integer-percentile cut positions.
//!
//! Every condition attribute has a row of 99 candidate positions (the 1st to
//! 99th percentile of the fit data). An ant picks `num_cuts` ascending
//! positions per attribute, each drawn with probability proportional to
//! `tau^alpha * eta^beta` over the positions still feasible. The joint cut set
//! is scored by the validation error of the rough-set classifier it induces,
//! and pheromone is evaporated by `rho` and reinforced by `Q / cost` on every
//! position an ant used.

use log::info;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data_model::{DecisionTable, SplitSpec};
use crate::discretization::{
    apply_cuts, discretize_values, CutSet, PercentileGrid, MAX_PERCENTILE,
};
use crate::error::{Error, Result};
use crate::rough_set::induce_rules;

/// Number of candidate positions per attribute.
pub const NUM_POSITIONS: usize = MAX_PERCENTILE as usize;
pub const INITIAL_TAU: f64 = 1.0;
/// Lower bound applied to every pheromone value after an update.
pub const TAU_FLOOR: f64 = 1e-6;
/// Costs below this are raised to it before computing a deposit.
pub const COST_FLOOR: f64 = 1e-3;
/// Share of the training table held out to score candidate cut sets.
pub const VALIDATION_FRACTION: f64 = 0.2;
const ETA_EPSILON: f64 = 1e-3;

/// How the attractiveness matrix is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaMode {
    /// `eta = 1` everywhere; selection is guided by pheromone alone.
    #[default]
    Uniform,
    /// `eta` is the accuracy gain of a single cut at that position over the
    /// majority-class rate, measured on the fit data for that attribute alone.
    PurityGain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcoParams {
    pub num_ants: usize,
    pub num_iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub q_deposit: f64,
    pub num_cuts: usize,
    pub seed: u64,
    pub eta_mode: EtaMode,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            num_ants: 10,
            num_iterations: 100,
            alpha: 0.09,
            beta: 0.09,
            rho: 0.9,
            q_deposit: 1.0,
            num_cuts: 2,
            seed: 0,
            eta_mode: EtaMode::Uniform,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.into()));
        if self.num_ants == 0 {
            return bad("at least one ant required");
        }
        if self.num_iterations == 0 {
            return bad("at least one iteration required");
        }
        if self.num_cuts == 0 || self.num_cuts > NUM_POSITIONS {
            return bad("num_cuts must be in [1, 99]");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite())
            || !(self.beta >= 0.0 && self.beta.is_finite())
        {
            return bad("alpha and beta must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad("rho must be in [0, 1]");
        }
        if !(self.q_deposit > 0.0 && self.q_deposit.is_finite()) {
            return bad("q must be positive");
        }
        Ok(())
    }
}

/// Pheromone (`tau`) and attractiveness (`eta`) per attribute and percentile
/// position. Row `a`, column `p - 1` holds the value for position `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneModel {
    pub tau: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
}

impl PheromoneModel {
    pub fn uniform(num_attributes: usize) -> Self {
        Self {
            tau: vec![vec![INITIAL_TAU; NUM_POSITIONS]; num_attributes],
            eta: vec![vec![1.0; NUM_POSITIONS]; num_attributes],
        }
    }

    pub fn for_objective(objective: &Objective, mode: EtaMode) -> Self {
        let mut model = Self::uniform(objective.num_attributes());
        if mode == EtaMode::PurityGain {
            model.eta = purity_gain_eta(objective.fit(), objective.grid());
        }
        model
    }

    pub fn num_attributes(&self) -> usize {
        self.tau.len()
    }
}

fn purity_gain_eta(fit: &DecisionTable, grid: &PercentileGrid) -> Vec<Vec<f64>> {
    let labels = fit.decisions();
    let n = labels.len() as f64;
    let [h, f] = fit.class_counts();
    let base = h.max(f) as f64 / n;
    (0..fit.num_attributes())
        .map(|a| {
            let column = fit.column(a);
            (1..=MAX_PERCENTILE)
                .map(|p| {
                    let cut = grid.value(a, p);
                    let mut counts = [[0usize; 2]; 2];
                    for (&v, &l) in column.iter().zip(&labels) {
                        counts[usize::from(v >= cut)][l as usize] += 1;
                    }
                    let correct: usize = counts.iter().map(|c| c[0].max(c[1])).sum();
                    (correct as f64 / n - base).max(0.0) + ETA_EPSILON
                })
                .collect()
        })
        .collect()
}

/// Selection probabilities over `feasible` (1-based positions).
pub fn selection_probabilities(
    tau_row: &[f64],
    eta_row: &[f64],
    feasible: &[u32],
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    let weights = selection_weights(tau_row, eta_row, feasible, alpha, beta)?;
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

fn selection_weights(
    tau_row: &[f64],
    eta_row: &[f64],
    feasible: &[u32],
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if feasible.is_empty() {
        return Err(Error::InvalidParams("empty feasible set".into()));
    }
    let weights: Vec<f64> = feasible
        .iter()
        .map(|&p| {
            let i = p as usize - 1;
            tau_row[i].powf(alpha) * eta_row[i].powf(beta)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParams("selection weights sum to zero".into()));
    }
    Ok(weights)
}

/// Draws the next position from `feasible` with probability proportional to
/// `tau^alpha * eta^beta`.
pub fn select_next<R: Rng + ?Sized>(
    tau_row: &[f64],
    eta_row: &[f64],
    feasible: &[u32],
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<u32> {
    if feasible.len() == 1 {
        return Ok(feasible[0]);
    }
    let weights = selection_weights(tau_row, eta_row, feasible, alpha, beta)?;
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParams(format!("selection weights: {e}")))?;
    Ok(feasible[dist.sample(rng)])
}

/// One ant's path: ascending percentile positions per attribute, the cut set
/// they realize on the fit data, and the validation error once evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct AntSolution {
    pub percentiles: Vec<Vec<u32>>,
    pub cuts: CutSet,
    pub cost: Option<f64>,
}

/// Builds one ant's solution. For each attribute the ant starts below the
/// 1st percentile and picks `num_cuts` positions in turn; after picking `p`
/// only positions above `p` remain, and enough room is left for the picks
/// still to come.
pub fn construct_solution<R: Rng + ?Sized>(
    model: &PheromoneModel,
    params: &AcoParams,
    grid: &PercentileGrid,
    rng: &mut R,
) -> Result<AntSolution> {
    params.validate()?;
    if model.num_attributes() != grid.num_attributes() {
        return Err(Error::AttributeMismatch {
            expected: grid.num_attributes(),
            found: model.num_attributes(),
        });
    }
    let k = params.num_cuts as u32;
    let mut feasible = Vec::with_capacity(NUM_POSITIONS);
    let percentiles = (0..model.num_attributes())
        .map(|a| {
            let mut picks = Vec::with_capacity(params.num_cuts);
            let mut prev = 0;
            for m in 0..k {
                let hi = MAX_PERCENTILE - (k - 1 - m);
                feasible.clear();
                feasible.extend(prev + 1..=hi);
                let p = select_next(
                    &model.tau[a],
                    &model.eta[a],
                    &feasible,
                    params.alpha,
                    params.beta,
                    rng,
                )?;
                picks.push(p);
                prev = p;
            }
            Ok(picks)
        })
        .collect::<Result<Vec<_>>>()?;
    let cuts = grid.cut_set(&percentiles)?;
    Ok(AntSolution {
        percentiles,
        cuts,
        cost: None,
    })
}

/// Misclassification rate on `validation` of the rules induced from `train`
/// discretized with the solution's cuts.
pub fn evaluate_solution(
    solution: &AntSolution,
    train: &DecisionTable,
    validation: &DecisionTable,
) -> Result<f64> {
    classification_error(&solution.cuts, train, validation)
}

pub fn classification_error(
    cuts: &CutSet,
    train: &DecisionTable,
    validation: &DecisionTable,
) -> Result<f64> {
    if validation.is_empty() {
        return Err(Error::EmptyTable);
    }
    let rules = induce_rules(&apply_cuts(train, cuts)?)?;
    let mut wrong = 0usize;
    for obj in validation.objects() {
        let (decision, _) = rules.classify(&discretize_values(cuts, &obj.values))?;
        if decision != obj.decision {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / validation.len() as f64)
}

/// Evaporates every pheromone value by `rho` and adds `Q / max(cost, 0.001)`
/// for each ant that used the position, then clamps to [`TAU_FLOOR`].
pub fn update_pheromones(
    model: &PheromoneModel,
    solutions: &[AntSolution],
    params: &AcoParams,
) -> Result<PheromoneModel> {
    let keep = 1.0 - params.rho;
    let mut tau: Vec<Vec<f64>> = model
        .tau
        .iter()
        .map(|row| row.iter().map(|t| keep * t).collect())
        .collect();
    for sol in solutions {
        let cost = sol
            .cost
            .ok_or_else(|| Error::InvalidParams("solution has no cost".into()))?;
        if sol.percentiles.len() != tau.len() {
            return Err(Error::AttributeMismatch {
                expected: tau.len(),
                found: sol.percentiles.len(),
            });
        }
        let deposit = params.q_deposit / cost.max(COST_FLOOR);
        for (row, picks) in tau.iter_mut().zip(&sol.percentiles) {
            for &p in picks {
                row[p as usize - 1] += deposit;
            }
        }
    }
    for t in tau.iter_mut().flatten() {
        *t = t.max(TAU_FLOOR);
    }
    Ok(PheromoneModel {
        tau,
        eta: model.eta.clone(),
    })
}

/// The data a candidate cut set is scored on: rules are induced from `fit`
/// and tested on `validation`. Percentile positions refer to `fit`.
#[derive(Debug, Clone)]
pub struct Objective {
    fit: DecisionTable,
    validation: DecisionTable,
    grid: PercentileGrid,
}

impl Objective {
    /// Splits `train` into fit and validation parts (80/20, seeded).
    pub fn from_train(train: &DecisionTable, seed: u64) -> Result<Self> {
        let (fit, validation) = train.split(&SplitSpec::new(1.0 - VALIDATION_FRACTION, seed))?;
        Self::new(fit, validation)
    }

    pub fn new(fit: DecisionTable, validation: DecisionTable) -> Result<Self> {
        if fit.num_attributes() != validation.num_attributes() {
            return Err(Error::AttributeMismatch {
                expected: fit.num_attributes(),
                found: validation.num_attributes(),
            });
        }
        if !fit.has_both_classes() {
            return Err(Error::SingleClass);
        }
        if validation.is_empty() {
            return Err(Error::EmptyTable);
        }
        let grid = PercentileGrid::new(&fit)?;
        Ok(Self {
            fit,
            validation,
            grid,
        })
    }

    pub fn fit(&self) -> &DecisionTable {
        &self.fit
    }

    pub fn validation(&self) -> &DecisionTable {
        &self.validation
    }

    pub fn grid(&self) -> &PercentileGrid {
        &self.grid
    }

    pub fn num_attributes(&self) -> usize {
        self.fit.num_attributes()
    }

    /// Cost of the cut set realized by `percentiles`.
    pub fn cost(&self, percentiles: &[Vec<u32>]) -> Result<f64> {
        classification_error(
            &self.grid.cut_set(percentiles)?,
            &self.fit,
            &self.validation,
        )
    }

    pub fn evaluate(&self, solution: &mut AntSolution) -> Result<f64> {
        let cost = evaluate_solution(solution, &self.fit, &self.validation)?;
        solution.cost = Some(cost);
        Ok(cost)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Lowest cost found up to and including this iteration.
    pub best_cost: f64,
    /// Mean cost of this iteration's ants.
    pub mean_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best: AntSolution,
    pub history: Vec<IterationRecord>,
}

impl OptimizeResult {
    /// `iteration,best_cost,mean_cost` with a header line.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,best_cost,mean_cost\n");
        for r in &self.history {
            out.push_str(&format!(
                "{},{},{}\n",
                r.iteration, r.best_cost, r.mean_cost
            ));
        }
        out
    }
}

/// Random stream for one ant, fixed by `(seed, iteration, ant)` so results do
/// not depend on how ants are scheduled across threads.
pub fn ant_rng(seed: u64, iteration: usize, ant: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | ant as u64);
    rng
}

/// Searches cut positions for `train`, scoring candidates on an internal
/// fit/validation split of it.
pub fn optimize(train: &DecisionTable, params: &AcoParams) -> Result<OptimizeResult> {
    params.validate()?;
    let objective = Objective::from_train(train, params.seed)?;
    optimize_objective(&objective, params)
}

/// Runs the colony on a prepared objective. The returned solution is the
/// cheapest over all iterations, the earliest one on ties.
pub fn optimize_objective(objective: &Objective, params: &AcoParams) -> Result<OptimizeResult> {
    params.validate()?;
    let mut model = PheromoneModel::for_objective(objective, params.eta_mode);
    let mut best: Option<AntSolution> = None;
    let mut history = Vec::with_capacity(params.num_iterations);

    for iteration in 0..params.num_iterations {
        let snapshot = &model;
        let ants: Vec<AntSolution> = (0..params.num_ants)
            .into_par_iter()
            .map(|ant| {
                let mut rng = ant_rng(params.seed, iteration, ant);
                let mut sol = construct_solution(snapshot, params, objective.grid(), &mut rng)?;
                objective.evaluate(&mut sol)?;
                Ok(sol)
            })
            .collect::<Result<_>>()?;

        let mut total = 0.0;
        for sol in &ants {
            let cost = sol.cost.expect("evaluated");
            total += cost;
            if best
                .as_ref()
                .is_none_or(|b| cost < b.cost.expect("evaluated"))
            {
                best = Some(sol.clone());
            }
        }
        let record = IterationRecord {
            iteration: iteration + 1,
            best_cost: best
                .as_ref()
                .and_then(|b| b.cost)
                .expect("at least one ant"),
            mean_cost: total / ants.len() as f64,
        };
        info!(
            "iteration {} best cost {:.6} mean cost {:.6}",
            record.iteration, record.best_cost, record.mean_cost
        );
        history.push(record);
        model = update_pheromones(&model, &ants, params)?;
    }

    Ok(OptimizeResult {
        best: best.expect("at least one iteration"),
        history,
    })
}
