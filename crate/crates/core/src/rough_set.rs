//! Indiscernibility, set approximations, rough membership, and rule
//! induction over a discretized decision table.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Map, Value};

use crate::data_model::{Label, FAULTY, HEALTHY};
use crate::discretization::DiscretizedTable;
use crate::error::{Error, Result};

/// Equivalence classes of the indiscernibility relation over a set of
/// attributes. Classes are ordered by the index of their first object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Partition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, object: usize) -> usize {
        self.class_of[object]
    }

    /// The elementary set containing `object`.
    pub fn class_containing(&self, object: usize) -> &[usize] {
        &self.classes[self.class_of[object]]
    }

    pub fn num_objects(&self) -> usize {
        self.class_of.len()
    }
}

/// Groups objects whose bin vectors agree on every attribute in `attributes`.
pub fn partition(table: &DiscretizedTable, attributes: &[usize]) -> Result<Partition> {
    if attributes.is_empty() {
        return Err(Error::EmptyAttributes);
    }
    if let Some(&a) = attributes.iter().find(|&&a| a >= table.num_attributes()) {
        return Err(Error::NoSuchAttribute(a));
    }
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(table.len());
    for (i, row) in table.rows().iter().enumerate() {
        let key: Vec<usize> = attributes.iter().map(|&a| row.bins[a]).collect();
        let next = classes.len();
        let c = *index.entry(key).or_insert(next);
        if c == next {
            classes.push(Vec::new());
        }
        classes[c].push(i);
        class_of.push(c);
    }
    Ok(Partition { classes, class_of })
}

/// Lower and upper approximation of the objects labeled `target_class`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub lower: BTreeSet<usize>,
    pub upper: BTreeSet<usize>,
    pub boundary: BTreeSet<usize>,
    pub target_class: Label,
}

impl Approximation {
    /// True when the boundary region is empty.
    pub fn is_crisp(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Objects that can be ruled out of the target set: `U \ upper`.
    pub fn outside(&self, num_objects: usize) -> BTreeSet<usize> {
        (0..num_objects)
            .filter(|i| !self.upper.contains(i))
            .collect()
    }
}

pub fn approximate(part: &Partition, decisions: &[Label], target: Label) -> Result<Approximation> {
    if decisions.len() != part.num_objects() {
        return Err(Error::LengthMismatch(decisions.len(), part.num_objects()));
    }
    let mut lower = BTreeSet::new();
    let mut upper = BTreeSet::new();
    for class in part.classes() {
        let hits = class.iter().filter(|&&i| decisions[i] == target).count();
        if hits == class.len() {
            lower.extend(class.iter().copied());
        }
        if hits > 0 {
            upper.extend(class.iter().copied());
        }
    }
    let boundary = upper.difference(&lower).copied().collect();
    Ok(Approximation {
        lower,
        upper,
        boundary,
        target_class: target,
    })
}

/// Rough membership `|B(x) ∩ X| / |B(x)|` of `object` in the target class.
pub fn membership(
    part: &Partition,
    decisions: &[Label],
    object: usize,
    target: Label,
) -> Result<f64> {
    if decisions.len() != part.num_objects() {
        return Err(Error::LengthMismatch(decisions.len(), part.num_objects()));
    }
    if object >= part.num_objects() {
        return Err(Error::InvalidParams(format!(
            "object {object} out of range"
        )));
    }
    let class = part.class_containing(object);
    let hits = class.iter().filter(|&&i| decisions[i] == target).count();
    Ok(hits as f64 / class.len() as f64)
}

/// One if-then rule: an exact bin vector implies a decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub conditions: Vec<usize>,
    pub decision: Label,
    pub support: usize,
    pub confidence: f64,
    pub certain: bool,
}

impl Rule {
    /// Probability of class 1 among the objects matching this rule.
    pub fn positive_score(&self) -> f64 {
        if self.decision == FAULTY {
            self.confidence
        } else {
            1.0 - self.confidence
        }
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<Rule>,
    default_decision: Label,
    attribute_bin_counts: Vec<usize>,
    attribute_names: Vec<String>,
    index: HashMap<Vec<usize>, usize>,
}

impl PartialEq for RuleSet {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
            && self.default_decision == other.default_decision
            && self.attribute_bin_counts == other.attribute_bin_counts
            && self.attribute_names == other.attribute_names
    }
}

impl RuleSet {
    pub fn new(
        rules: Vec<Rule>,
        default_decision: Label,
        attribute_bin_counts: Vec<usize>,
        attribute_names: Vec<String>,
    ) -> Result<Self> {
        if attribute_names.len() != attribute_bin_counts.len() {
            return Err(Error::AttributeMismatch {
                expected: attribute_bin_counts.len(),
                found: attribute_names.len(),
            });
        }
        if default_decision > FAULTY {
            return Err(Error::InvalidParams(
                "default decision must be 0 or 1".into(),
            ));
        }
        let mut index = HashMap::with_capacity(rules.len());
        for (i, rule) in rules.iter().enumerate() {
            check_bins(&rule.conditions, &attribute_bin_counts)?;
            if rule.support == 0
                || !(0.0..=1.0).contains(&rule.confidence)
                || rule.decision > FAULTY
            {
                return Err(Error::InvalidParams(format!("rule {i} is malformed")));
            }
            if index.insert(rule.conditions.clone(), i).is_some() {
                return Err(Error::InvalidParams(format!(
                    "rule {i} duplicates an earlier rule"
                )));
            }
        }
        Ok(Self {
            rules,
            default_decision,
            attribute_bin_counts,
            attribute_names,
            index,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn num_certain(&self) -> usize {
        self.rules.iter().filter(|r| r.certain).count()
    }

    pub fn default_decision(&self) -> Label {
        self.default_decision
    }

    pub fn attribute_bin_counts(&self) -> &[usize] {
        &self.attribute_bin_counts
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn find(&self, bins: &[usize]) -> Option<&Rule> {
        self.index.get(bins).map(|&i| &self.rules[i])
    }

    /// Decision and class-1 score for a bin vector. Vectors not covered by
    /// any rule get the default decision with a neutral score of 0.5.
    pub fn classify(&self, bins: &[usize]) -> Result<(Label, f64)> {
        check_bins(bins, &self.attribute_bin_counts)?;
        Ok(match self.find(bins) {
            Some(rule) => (rule.decision, rule.positive_score()),
            None => (self.default_decision, 0.5),
        })
    }

    pub fn to_json(&self) -> Value {
        let rules: Vec<Value> = self
            .rules
            .iter()
            .map(|r| {
                let conditions: Map<String, Value> = self
                    .attribute_names
                    .iter()
                    .zip(&r.conditions)
                    .map(|(name, &bin)| (name.clone(), Value::from(bin)))
                    .collect();
                json!({
                    "conditions": conditions,
                    "decision": r.decision,
                    "support": r.support,
                    "confidence": r.confidence,
                    "certain": r.certain,
                })
            })
            .collect();
        json!({
            "attributes": self.attribute_names,
            "attribute_bin_counts": self.attribute_bin_counts,
            "default_decision": self.default_decision,
            "rules": rules,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParams(format!("rule set JSON: {what}"));
        let names: Vec<String> = serde_json::from_value(value["attributes"].clone())?;
        let bin_counts: Vec<usize> = serde_json::from_value(value["attribute_bin_counts"].clone())?;
        let default_decision: Label = serde_json::from_value(value["default_decision"].clone())?;
        let mut rules = Vec::new();
        for r in value["rules"]
            .as_array()
            .ok_or_else(|| bad("missing rules"))?
        {
            let cond = r["conditions"]
                .as_object()
                .ok_or_else(|| bad("missing conditions"))?;
            let conditions = names
                .iter()
                .map(|n| {
                    cond.get(n)
                        .and_then(Value::as_u64)
                        .map(|b| b as usize)
                        .ok_or_else(|| bad("incomplete conditions"))
                })
                .collect::<Result<Vec<_>>>()?;
            rules.push(Rule {
                conditions,
                decision: serde_json::from_value(r["decision"].clone())?,
                support: serde_json::from_value(r["support"].clone())?,
                confidence: serde_json::from_value(r["confidence"].clone())?,
                certain: serde_json::from_value(r["certain"].clone())?,
            });
        }
        Self::new(rules, default_decision, bin_counts, names)
    }
}

fn check_bins(bins: &[usize], counts: &[usize]) -> Result<()> {
    if bins.len() != counts.len() {
        return Err(Error::AttributeMismatch {
            expected: counts.len(),
            found: bins.len(),
        });
    }
    for (a, (&bin, &n)) in bins.iter().zip(counts).enumerate() {
        if bin >= n {
            return Err(Error::BinOutOfRange {
                attribute: a,
                bin,
                bins: n,
            });
        }
    }
    Ok(())
}

/// One rule per elementary set of the full-attribute partition.
///
/// A class whose objects all share a label yields a certain rule (it lies in
/// that label's lower approximation); a mixed class lies in the boundary and
/// yields an uncertain rule for its majority label, with the rough membership
/// of that label as confidence. Even splits go to the globally more frequent
/// class, then to label 1.
pub fn induce_rules(table: &DiscretizedTable) -> Result<RuleSet> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let decisions = table.decisions();
    let mut prior = [0usize; 2];
    for &d in &decisions {
        prior[d as usize] += 1;
    }
    if prior.contains(&0) {
        return Err(Error::SingleClass);
    }
    let preferred = if prior[HEALTHY as usize] > prior[FAULTY as usize] {
        HEALTHY
    } else {
        FAULTY
    };

    let all: Vec<usize> = (0..table.num_attributes()).collect();
    let rules = if all.is_empty() {
        // no condition attributes: the whole universe is one elementary set
        vec![rule_for(
            &(0..table.len()).collect::<Vec<_>>(),
            Vec::new(),
            &decisions,
            preferred,
        )]
    } else {
        let part = partition(table, &all)?;
        part.classes()
            .iter()
            .map(|class| {
                rule_for(
                    class,
                    table.rows()[class[0]].bins.clone(),
                    &decisions,
                    preferred,
                )
            })
            .collect()
    };

    RuleSet::new(
        rules,
        preferred,
        table.attribute_bin_counts().to_vec(),
        table.attribute_names().to_vec(),
    )
}

fn rule_for(
    class: &[usize],
    conditions: Vec<usize>,
    decisions: &[Label],
    preferred: Label,
) -> Rule {
    let positives = class.iter().filter(|&&i| decisions[i] == FAULTY).count();
    let negatives = class.len() - positives;
    let decision = match positives.cmp(&negatives) {
        std::cmp::Ordering::Greater => FAULTY,
        std::cmp::Ordering::Less => HEALTHY,
        std::cmp::Ordering::Equal => preferred,
    };
    let hits = if decision == FAULTY {
        positives
    } else {
        negatives
    };
    let confidence = hits as f64 / class.len() as f64;
    Rule {
        conditions,
        decision,
        support: class.len(),
        confidence,
        certain: hits == class.len(),
    }
}
