//! Cut sets, equal-frequency binning, and percentile cut positions.
//!
//! A value falls into bin `b` where `b` is the number of cuts less than or
//! equal to it, so bins are half-open `[cut_b, cut_{b+1})` and a value equal
//! to a cut lands in the upper bin.

use serde_json::{Map, Value};

use crate::data_model::{DecisionTable, Label, Object};
use crate::error::{Error, Result};

/// Largest number of cuts per attribute supported by the percentile grid.
pub const MAX_PERCENTILE: u32 = 99;

/// Ascending cut values for every condition attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSet {
    attribute_names: Vec<String>,
    cuts: Vec<Vec<f64>>,
}

impl CutSet {
    /// Builds a cut set, sorting each attribute's cuts and removing
    /// duplicates.
    pub fn new(attribute_names: Vec<String>, cuts: Vec<Vec<f64>>) -> Result<Self> {
        if attribute_names.len() != cuts.len() {
            return Err(Error::AttributeMismatch {
                expected: attribute_names.len(),
                found: cuts.len(),
            });
        }
        let cuts = cuts
            .into_iter()
            .map(|mut c| {
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParams("non-finite cut value".into()));
                }
                c.sort_by(f64::total_cmp);
                c.dedup();
                Ok(c)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            attribute_names,
            cuts,
        })
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn cuts(&self) -> &[Vec<f64>] {
        &self.cuts
    }

    pub fn num_attributes(&self) -> usize {
        self.cuts.len()
    }

    /// Number of bins per attribute (cuts + 1).
    pub fn bin_counts(&self) -> Vec<usize> {
        self.cuts.iter().map(|c| c.len() + 1).collect()
    }

    pub fn bin_of(&self, attribute: usize, value: f64) -> usize {
        self.cuts[attribute].partition_point(|&c| c <= value)
    }

    /// `{"attribute_name": [cut, cut], ...}` in attribute order.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .attribute_names
            .iter()
            .zip(&self.cuts)
            .map(|(name, cuts)| (name.clone(), Value::from(cuts.clone())))
            .collect();
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::InvalidParams("cut set JSON must be an object".into()))?;
        let mut names = Vec::with_capacity(map.len());
        let mut cuts = Vec::with_capacity(map.len());
        for (name, list) in map {
            let list: Vec<f64> = serde_json::from_value(list.clone())?;
            names.push(name.clone());
            cuts.push(list);
        }
        Self::new(names, cuts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizedRow {
    pub bins: Vec<usize>,
    pub decision: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizedTable {
    attribute_names: Vec<String>,
    rows: Vec<DiscretizedRow>,
    attribute_bin_counts: Vec<usize>,
}

impl DiscretizedTable {
    pub fn new(
        attribute_names: Vec<String>,
        rows: Vec<DiscretizedRow>,
        attribute_bin_counts: Vec<usize>,
    ) -> Result<Self> {
        if attribute_names.len() != attribute_bin_counts.len() {
            return Err(Error::AttributeMismatch {
                expected: attribute_names.len(),
                found: attribute_bin_counts.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.bins.len() != attribute_bin_counts.len() {
                return Err(Error::RowWidth {
                    row: r,
                    expected: attribute_bin_counts.len(),
                    found: row.bins.len(),
                });
            }
            for (a, (&bin, &bins)) in row.bins.iter().zip(&attribute_bin_counts).enumerate() {
                if bin >= bins {
                    return Err(Error::BinOutOfRange {
                        attribute: a,
                        bin,
                        bins,
                    });
                }
            }
            if row.decision > 1 {
                return Err(Error::BadLabel {
                    line: r,
                    value: row.decision.to_string(),
                });
            }
        }
        Ok(Self {
            attribute_names,
            rows,
            attribute_bin_counts,
        })
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn rows(&self) -> &[DiscretizedRow] {
        &self.rows
    }

    pub fn attribute_bin_counts(&self) -> &[usize] {
        &self.attribute_bin_counts
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_attributes(&self) -> usize {
        self.attribute_bin_counts.len()
    }

    pub fn decisions(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.decision).collect()
    }

    /// Bin indices as continuous values, for re-discretization.
    pub fn to_decision_table(&self) -> DecisionTable {
        let objects = self
            .rows
            .iter()
            .map(|r| Object {
                values: r.bins.iter().map(|&b| b as f64).collect(),
                decision: r.decision,
            })
            .collect();
        DecisionTable::new(self.attribute_names.clone(), objects).expect("bin indices are finite")
    }
}

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p / 100 * n)` (1-based, clamped to `[1, n]`).
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "percentile of an empty column");
    let rank = (p / 100.0 * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// `p`-th nearest-rank percentile of attribute `attribute`, `p` in `[1, 99]`.
pub fn percentile_to_cut(table: &DecisionTable, attribute: usize, p: u32) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if attribute >= table.num_attributes() {
        return Err(Error::NoSuchAttribute(attribute));
    }
    if !(1..=MAX_PERCENTILE).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "percentile {p} not in [1, 99]"
        )));
    }
    Ok(nearest_rank(&table.sorted_column(attribute), f64::from(p)))
}

/// Precomputed integer-percentile values of every attribute of a table, plus
/// each attribute's minimum.
#[derive(Debug, Clone)]
pub struct PercentileGrid {
    attribute_names: Vec<String>,
    values: Vec<[f64; MAX_PERCENTILE as usize]>,
    minimums: Vec<f64>,
}

impl PercentileGrid {
    pub fn new(table: &DecisionTable) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut values = Vec::with_capacity(table.num_attributes());
        let mut minimums = Vec::with_capacity(table.num_attributes());
        for a in 0..table.num_attributes() {
            let sorted = table.sorted_column(a);
            let mut row = [0.0; MAX_PERCENTILE as usize];
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = nearest_rank(&sorted, (i + 1) as f64);
            }
            values.push(row);
            minimums.push(sorted[0]);
        }
        Ok(Self {
            attribute_names: table.attribute_names().to_vec(),
            values,
            minimums,
        })
    }

    pub fn num_attributes(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, attribute: usize, p: u32) -> f64 {
        self.values[attribute][p as usize - 1]
    }

    /// Realizes per-attribute percentile positions as a cut set. Positions
    /// that map to the same data value collapse to one cut, and a cut at the
    /// attribute minimum is dropped since it would leave the lowest bin empty.
    pub fn cut_set(&self, percentiles: &[Vec<u32>]) -> Result<CutSet> {
        if percentiles.len() != self.num_attributes() {
            return Err(Error::AttributeMismatch {
                expected: self.num_attributes(),
                found: percentiles.len(),
            });
        }
        let cuts = percentiles
            .iter()
            .enumerate()
            .map(|(a, ps)| {
                ps.iter()
                    .map(|&p| self.value(a, p))
                    .filter(|&v| v > self.minimums[a])
                    .collect()
            })
            .collect();
        CutSet::new(self.attribute_names.clone(), cuts)
    }
}

/// Equal-frequency cuts: for each attribute, up to `num_cuts` cuts placed so
/// the resulting intervals hold equal object counts (within one).
///
/// Each cut is the midpoint of the two sorted values straddling an interval
/// boundary. When ties make the ideal boundary impossible, the nearest
/// boundary between distinct values is used; attributes with too few distinct
/// values get fewer cuts, and constant attributes get none.
pub fn efb_cuts(table: &DecisionTable, num_cuts: usize) -> Result<CutSet> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if num_cuts == 0 {
        return Err(Error::InvalidParams("num_cuts must be positive".into()));
    }
    let cuts = (0..table.num_attributes())
        .map(|a| equal_frequency_cuts(&table.sorted_column(a), num_cuts))
        .collect();
    CutSet::new(table.attribute_names().to_vec(), cuts)
}

fn equal_frequency_cuts(sorted: &[f64], num_cuts: usize) -> Vec<f64> {
    let n = sorted.len();
    let intervals = num_cuts + 1;
    // boundary t means t objects fall below the cut; valid iff it separates
    // two distinct values
    let is_valid = |t: usize| t > 0 && t < n && sorted[t - 1] < sorted[t];

    let mut cuts = Vec::with_capacity(num_cuts);
    let mut last = 0;
    for m in 1..=num_cuts {
        let ideal = m * n / intervals;
        let below = (last + 1..=ideal.min(n - 1)).rev().find(|&t| is_valid(t));
        let above = (ideal.max(last + 1)..n).find(|&t| is_valid(t));
        let chosen = match (below, above) {
            (Some(b), Some(u)) => {
                if ideal - b <= u - ideal {
                    b
                } else {
                    u
                }
            }
            (Some(b), None) => b,
            (None, Some(u)) => u,
            (None, None) => break,
        };
        cuts.push((sorted[chosen - 1] + sorted[chosen]) / 2.0);
        last = chosen;
    }
    cuts
}

/// Maps every object of `table` to its bin vector under `cuts`.
pub fn apply_cuts(table: &DecisionTable, cuts: &CutSet) -> Result<DiscretizedTable> {
    if cuts.num_attributes() != table.num_attributes() {
        return Err(Error::AttributeMismatch {
            expected: table.num_attributes(),
            found: cuts.num_attributes(),
        });
    }
    let rows = table
        .objects()
        .iter()
        .map(|o| DiscretizedRow {
            bins: discretize_values(cuts, &o.values),
            decision: o.decision,
        })
        .collect();
    Ok(DiscretizedTable {
        attribute_names: table.attribute_names().to_vec(),
        rows,
        attribute_bin_counts: cuts.bin_counts(),
    })
}

pub fn discretize_values(cuts: &CutSet, values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .map(|(a, &v)| cuts.bin_of(a, v))
        .collect()
}
