//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rough_aco::discretization::{DiscretizedRow, DiscretizedTable};
use rough_aco::{DecisionTable, Label, Object};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random discretized table with `n` rows, `attrs` attributes and up to
/// `max_bins` bins per attribute.
pub fn random_discretized(
    rng: &mut ChaCha8Rng,
    n: usize,
    attrs: usize,
    max_bins: usize,
) -> DiscretizedTable {
    let bin_counts: Vec<usize> = (0..attrs).map(|_| rng.random_range(1..=max_bins)).collect();
    let rows = (0..n)
        .map(|_| DiscretizedRow {
            bins: bin_counts.iter().map(|&b| rng.random_range(0..b)).collect(),
            decision: rng.random_range(0..2u8),
        })
        .collect();
    DiscretizedTable::new(
        (0..attrs).map(|a| format!("a{a}")).collect(),
        rows,
        bin_counts,
    )
    .unwrap()
}

/// Random continuous table; values drawn uniformly so they are distinct with
/// probability one.
pub fn random_continuous(rng: &mut ChaCha8Rng, n: usize, attrs: usize) -> DecisionTable {
    let objects = (0..n)
        .map(|_| Object {
            values: (0..attrs)
                .map(|_| rng.random_range(-1000.0..1000.0))
                .collect(),
            decision: rng.random_range(0..2u8),
        })
        .collect();
    DecisionTable::new((0..attrs).map(|a| format!("a{a}")).collect(), objects).unwrap()
}

/// Indiscernibility classes by pairwise comparison of projected vectors.
pub fn brute_partition(table: &DiscretizedTable, attrs: &[usize]) -> Vec<BTreeSet<usize>> {
    let rows = table.rows();
    let same = |x: usize, y: usize| attrs.iter().all(|&a| rows[x].bins[a] == rows[y].bins[a]);
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    for x in 0..rows.len() {
        let class: BTreeSet<usize> = (0..rows.len()).filter(|&y| same(x, y)).collect();
        if !classes.contains(&class) {
            classes.push(class);
        }
    }
    classes
}

fn elementary_set(table: &DiscretizedTable, x: usize) -> BTreeSet<usize> {
    let rows = table.rows();
    (0..rows.len())
        .filter(|&y| rows[y].bins == rows[x].bins)
        .collect()
}

fn target_set(table: &DiscretizedTable, target: Label) -> BTreeSet<usize> {
    (0..table.len())
        .filter(|&i| table.rows()[i].decision == target)
        .collect()
}

/// `{x : B(x) ⊆ X}` over all attributes.
pub fn brute_lower(table: &DiscretizedTable, target: Label) -> BTreeSet<usize> {
    let x = target_set(table, target);
    (0..table.len())
        .filter(|&i| elementary_set(table, i).is_subset(&x))
        .collect()
}

/// `{x : B(x) ∩ X ≠ ∅}` over all attributes.
pub fn brute_upper(table: &DiscretizedTable, target: Label) -> BTreeSet<usize> {
    let x = target_set(table, target);
    (0..table.len())
        .filter(|&i| !elementary_set(table, i).is_disjoint(&x))
        .collect()
}

pub fn brute_membership(table: &DiscretizedTable, object: usize, target: Label) -> f64 {
    let b = elementary_set(table, object);
    let x = target_set(table, target);
    b.intersection(&x).count() as f64 / b.len() as f64
}

fn bins_linear(cuts: &[Vec<f64>], values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .zip(cuts)
        .map(|(&v, c)| c.iter().filter(|&&cut| cut <= v).count())
        .collect()
}

/// Straight-line discretize / induce / classify error rate.
pub fn reference_error(
    cuts: &[Vec<f64>],
    train: &DecisionTable,
    validation: &DecisionTable,
) -> f64 {
    let mut counts: BTreeMap<Vec<usize>, [usize; 2]> = BTreeMap::new();
    let mut prior = [0usize; 2];
    for o in train.objects() {
        counts.entry(bins_linear(cuts, &o.values)).or_default()[o.decision as usize] += 1;
        prior[o.decision as usize] += 1;
    }
    let global: Label = if prior[0] > prior[1] { 0 } else { 1 };
    let mut wrong = 0;
    for o in validation.objects() {
        let predicted = match counts.get(&bins_linear(cuts, &o.values)) {
            Some(&[h, f]) if f > h => 1,
            Some(&[h, f]) if h > f => 0,
            _ => global,
        };
        if predicted != o.decision {
            wrong += 1;
        }
    }
    wrong as f64 / validation.len() as f64
}

/// Mann-Whitney statistic: P(pos > neg) + P(tie) / 2.
pub fn pair_count_auc(scores: &[f64], actuals: &[Label]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &a) in actuals.iter().enumerate() {
        for (j, &b) in actuals.iter().enumerate() {
            if a == 1 && b == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// One attribute drawn uniformly from [0, 1000); the label is 1 exactly when
/// the value exceeds the table's `pct`-th percentile.
pub fn threshold_table(n: usize, pct: f64, seed: u64) -> DecisionTable {
    let mut r = rng(seed);
    let values: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1000.0)).collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[(pct / 100.0 * n as f64).ceil() as usize - 1];
    let objects = values
        .into_iter()
        .map(|v| Object {
            values: vec![v],
            decision: Label::from(v > threshold),
        })
        .collect();
    DecisionTable::new(vec!["x".into()], objects).unwrap()
}
