//! Confusion matrix, accuracy, ROC/AUC, and the end-to-end evaluation of a
//! cut set on a train/test pair. Class 1 (faulty) is the positive class.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::data_model::{DecisionTable, Label, FAULTY, HEALTHY};
use crate::discretization::{apply_cuts, CutSet};
use crate::error::{Error, Result};
use crate::rough_set::{induce_rules, RuleSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// `(TP + TN) / (TP + TN + FP + FN)`.
    pub fn accuracy(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::EmptyTable),
            n => Ok((self.tp + self.tn) as f64 / n as f64),
        }
    }
}

pub fn confusion(predictions: &[Label], actuals: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != actuals.len() {
        return Err(Error::LengthMismatch(predictions.len(), actuals.len()));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &a) in predictions.iter().zip(actuals) {
        match (p, a) {
            (FAULTY, FAULTY) => m.tp += 1,
            (HEALTHY, HEALTHY) => m.tn += 1,
            (FAULTY, HEALTHY) => m.fp += 1,
            (HEALTHY, FAULTY) => m.fn_ += 1,
            _ => {
                return Err(Error::BadLabel {
                    line: 0,
                    value: format!("({p}, {a})"),
                })
            }
        }
    }
    Ok(m)
}

pub fn accuracy(m: &ConfusionMatrix) -> Result<f64> {
    m.accuracy()
}

/// ROC points in ascending false-positive-rate order. `thresholds[i]` is the
/// score cut-off (predict positive when `score >= threshold`) producing
/// `points[i]`; the origin uses `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for (t, (fpr, tpr)) in self.thresholds.iter().zip(&self.points) {
            out.push_str(&format!("{t},{fpr},{tpr}\n"));
        }
        out
    }
}

/// Threshold sweep over the distinct scores, highest first. Objects with
/// tied scores enter the curve together as one diagonal step.
pub fn roc(scores: &[f64], actuals: &[Label]) -> Result<RocCurve> {
    if scores.len() != actuals.len() {
        return Err(Error::LengthMismatch(scores.len(), actuals.len()));
    }
    let positives = actuals.iter().filter(|&&a| a == FAULTY).count();
    let negatives = actuals.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParams("NaN score".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if actuals[order[i]] == FAULTY {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        thresholds.push(s);
    }
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(rename = "confusion")]
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
    pub auc: f64,
    pub num_rules: usize,
    pub num_certain_rules: usize,
    pub train_time_s: f64,
    pub test_time_s: f64,
}

impl EvaluationReport {
    /// Test time divided by the number of classified objects.
    pub fn test_time_per_object_s(&self) -> f64 {
        self.test_time_s / self.matrix.total().max(1) as f64
    }
}

/// Everything produced by evaluating one cut set.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: EvaluationReport,
    pub rules: RuleSet,
    pub roc: RocCurve,
    pub predictions: Vec<Label>,
    pub scores: Vec<f64>,
}

/// Discretizes both tables with `cuts`, induces rules on `train`, and
/// classifies `test`. `cut_search_time` is the time the caller spent
/// computing `cuts`; it is added to the reported training time.
pub fn evaluate_pipeline(
    train: &DecisionTable,
    test: &DecisionTable,
    cuts: &CutSet,
    cut_search_time: Duration,
) -> Result<PipelineOutcome> {
    let train_start = Instant::now();
    let rules = induce_rules(&apply_cuts(train, cuts)?)?;
    let train_time = cut_search_time + train_start.elapsed();

    let test_start = Instant::now();
    let discretized = apply_cuts(test, cuts)?;
    let classified: Vec<(Label, f64)> = discretized
        .rows()
        .iter()
        .map(|row| rules.classify(&row.bins))
        .collect::<Result<_>>()?;
    let test_time = test_start.elapsed();

    let (predictions, scores): (Vec<Label>, Vec<f64>) = classified.into_iter().unzip();
    let actuals = test.decisions();
    let matrix = confusion(&predictions, &actuals)?;
    let curve = roc(&scores, &actuals)?;
    let report = EvaluationReport {
        matrix,
        accuracy: matrix.accuracy()?,
        auc: auc(&curve),
        num_rules: rules.len(),
        num_certain_rules: rules.num_certain(),
        train_time_s: train_time.as_secs_f64(),
        test_time_s: test_time.as_secs_f64(),
    };
    Ok(PipelineOutcome {
        report,
        rules,
        roc: curve,
        predictions,
        scores,
    })
}
