//! Decision tables: continuous condition attributes plus one binary decision.
//!
//! A [`DecisionTable`] is the universe of objects `U`, the condition
//! attributes `A` (one column per attribute name) and the decision `d`. It is
//! immutable once built; every constructor validates the table invariants.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Binary decision value: 0 = healthy, 1 = faulty.
pub type Label = u8;

pub const HEALTHY: Label = 0;
pub const FAULTY: Label = 1;

/// Name of the decision column in CSV files.
pub const LABEL_COLUMN: &str = "label";

const MAX_SPLIT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Object {
    pub values: Vec<f64>,
    pub decision: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    attribute_names: Vec<String>,
    objects: Vec<Object>,
}

/// Result of reading a CSV file: the table plus the number of rows dropped
/// because a condition cell was empty or not a finite number.
#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub table: DecisionTable,
    pub dropped: usize,
}

impl DecisionTable {
    pub fn new(attribute_names: Vec<String>, objects: Vec<Object>) -> Result<Self> {
        let width = attribute_names.len();
        for (i, obj) in objects.iter().enumerate() {
            if obj.values.len() != width {
                return Err(Error::RowWidth {
                    row: i,
                    expected: width,
                    found: obj.values.len(),
                });
            }
            if obj.decision > FAULTY {
                return Err(Error::BadLabel {
                    line: i,
                    value: obj.decision.to_string(),
                });
            }
            if obj.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i });
            }
        }
        Ok(Self {
            attribute_names,
            objects,
        })
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn num_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn decisions(&self) -> Vec<Label> {
        self.objects.iter().map(|o| o.decision).collect()
    }

    pub fn column(&self, attribute: usize) -> Vec<f64> {
        self.objects.iter().map(|o| o.values[attribute]).collect()
    }

    /// Column values sorted ascending.
    pub fn sorted_column(&self, attribute: usize) -> Vec<f64> {
        let mut col = self.column(attribute);
        col.sort_by(f64::total_cmp);
        col
    }

    /// Object counts per decision class, indexed by label.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for o in &self.objects {
            counts[o.decision as usize] += 1;
        }
        counts
    }

    pub fn has_both_classes(&self) -> bool {
        let [h, f] = self.class_counts();
        h > 0 && f > 0
    }

    /// Table restricted to the objects at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            attribute_names: self.attribute_names.clone(),
            objects: indices.iter().map(|&i| self.objects[i].clone()).collect(),
        }
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<LoadedTable> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<LoadedTable> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header = rdr.headers()?.clone();
        if header.len() < 2 || header.get(header.len() - 1) != Some(LABEL_COLUMN) {
            return Err(Error::MissingLabelColumn);
        }
        let width = header.len() - 1;
        let attribute_names: Vec<String> = header.iter().take(width).map(str::to_owned).collect();

        let mut objects = Vec::new();
        let mut dropped = 0;
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            // header is line 1
            let line = i + 2;
            if record.len() != width + 1 {
                return Err(Error::RowWidth {
                    row: line,
                    expected: width + 1,
                    found: record.len(),
                });
            }
            let label_cell = &record[width];
            let values: Option<Vec<f64>> = record
                .iter()
                .take(width)
                .map(|cell| cell.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect();
            let (Some(values), false) = (values, label_cell.is_empty()) else {
                dropped += 1;
                continue;
            };
            let decision = match label_cell {
                "0" => HEALTHY,
                "1" => FAULTY,
                other => {
                    return Err(Error::BadLabel {
                        line,
                        value: other.to_owned(),
                    })
                }
            };
            objects.push(Object { values, decision });
        }

        if objects.is_empty() {
            return Err(Error::NoRows { dropped });
        }
        let table = Self::new(attribute_names, objects)?;
        Ok(LoadedTable { table, dropped })
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    /// Writes the table as CSV. Values use the shortest representation that
    /// parses back to the identical `f64`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.attribute_names.iter().map(String::as_str).collect();
        header.push(LABEL_COLUMN);
        wtr.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for obj in &self.objects {
            record.clear();
            record.extend(obj.values.iter().map(|v| v.to_string()));
            record.push(obj.decision.to_string());
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    /// Shuffled, seeded train/test split. Both halves must keep both decision
    /// classes; unlucky shuffles are retried a bounded number of times.
    pub fn split(&self, spec: &SplitSpec) -> Result<(DecisionTable, DecisionTable)> {
        if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "train fraction {} not in (0, 1)",
                spec.train_fraction
            )));
        }
        let [healthy, faulty] = self.class_counts();
        if healthy < 2 || faulty < 2 {
            return Err(Error::InvalidSplit(
                "need at least two objects of each class".into(),
            ));
        }
        let n = self.len();
        let train_len = (spec.train_fraction * n as f64).round() as usize;
        if train_len < 2 || n - train_len < 2 {
            return Err(Error::InvalidSplit(format!(
                "train size {train_len} of {n} leaves a side with fewer than two objects"
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..MAX_SPLIT_ATTEMPTS {
            order.shuffle(&mut rng);
            let (train_idx, test_idx) = order.split_at(train_len);
            let train = self.subset(train_idx);
            let test = self.subset(test_idx);
            if train.has_both_classes() && test.has_both_classes() {
                return Ok((train, test));
            }
        }
        Err(Error::InvalidSplit(format!(
            "no split with both classes on each side after {MAX_SPLIT_ATTEMPTS} shuffles"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            seed,
        }
    }
}

/// Per-attribute clipping range used for optional outlier treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipBounds {
    pub bounds: Vec<(f64, f64)>,
}

impl ClipBounds {
    /// Nearest-rank `[lower_pct, upper_pct]` percentile range of every
    /// attribute of `table`.
    pub fn fit(table: &DecisionTable, lower_pct: f64, upper_pct: f64) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let bounds = (0..table.num_attributes())
            .map(|a| {
                let sorted = table.sorted_column(a);
                (
                    crate::discretization::nearest_rank(&sorted, lower_pct),
                    crate::discretization::nearest_rank(&sorted, upper_pct),
                )
            })
            .collect();
        Ok(Self { bounds })
    }

    pub fn apply(&self, table: &DecisionTable) -> Result<DecisionTable> {
        if self.bounds.len() != table.num_attributes() {
            return Err(Error::AttributeMismatch {
                expected: table.num_attributes(),
                found: self.bounds.len(),
            });
        }
        let objects = table
            .objects()
            .iter()
            .map(|o| Object {
                values: o
                    .values
                    .iter()
                    .zip(&self.bounds)
                    .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
                    .collect(),
                decision: o.decision,
            })
            .collect();
        DecisionTable::new(table.attribute_names().to_vec(), objects)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(values: &[f64], decision: Label) -> Object {
        Object {
            values: values.to_vec(),
            decision,
        }
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    #[test]
    fn parses_simple_csv() {
        let csv = "h2,ch4,label\n10.0,5.0,0\n900.0,400.0,1\n";
        let loaded = DecisionTable::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(loaded.table.len(), 2);
        assert_eq!(loaded.table.num_attributes(), 2);
        assert_eq!(loaded.table.attribute_names(), ["h2", "ch4"]);
        assert_eq!(loaded.dropped, 0);
        assert_eq!(loaded.table.objects()[1].values, vec![900.0, 400.0]);
        assert_eq!(loaded.table.decisions(), vec![0, 1]);
    }

    #[test]
    fn drops_rows_with_missing_values() {
        let csv = "h2,ch4,label\n10.0,1,0\n10.0,,1\n3,4,1\n";
        let loaded = DecisionTable::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(loaded.table.len(), 2);
        assert_eq!(loaded.dropped, 1);
    }

    #[test]
    fn drops_non_numeric_and_non_finite_cells() {
        let csv = "a,label\nabc,0\nNaN,1\ninf,1\n2,1\n";
        let loaded = DecisionTable::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(loaded.table.len(), 1);
        assert_eq!(loaded.dropped, 3);
    }

    #[test]
    fn rejects_missing_label_header() {
        let csv = "h2,ch4,fault\n1,2,0\n";
        assert!(matches!(
            DecisionTable::read_csv(csv.as_bytes()),
            Err(Error::MissingLabelColumn)
        ));
    }

    #[test]
    fn rejects_label_outside_binary() {
        let csv = "h2,label\n1,0\n2,2\n";
        assert!(matches!(
            DecisionTable::read_csv(csv.as_bytes()),
            Err(Error::BadLabel { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_when_no_rows_survive() {
        let csv = "h2,label\n,0\nx,1\n";
        assert!(matches!(
            DecisionTable::read_csv(csv.as_bytes()),
            Err(Error::NoRows { dropped: 2 })
        ));
    }

    #[test]
    fn unreadable_file_is_an_error() {
        assert!(matches!(
            DecisionTable::load_csv("/nonexistent/dir/data.csv"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn constructor_validates_rows() {
        assert!(DecisionTable::new(names(2), vec![obj(&[1.0], 0)]).is_err());
        assert!(DecisionTable::new(names(1), vec![obj(&[1.0], 2)]).is_err());
        assert!(DecisionTable::new(names(1), vec![obj(&[f64::NAN], 0)]).is_err());
    }

    #[test]
    fn csv_round_trip_keeps_full_precision() {
        let table = DecisionTable::new(
            names(2),
            vec![
                obj(&[0.1 + 0.2, 1e-300], 0),
                obj(&[123456.789012345, -2.5], 1),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = DecisionTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.table, table);
    }

    fn alternating(n: usize) -> DecisionTable {
        let objects = (0..n).map(|i| obj(&[i as f64], (i % 2) as Label)).collect();
        DecisionTable::new(names(1), objects).unwrap()
    }

    #[test]
    fn split_sizes_follow_fraction() {
        let (train, test) = alternating(2000).split(&SplitSpec::new(0.7, 1)).unwrap();
        assert_eq!((train.len(), test.len()), (1400, 600));
    }

    #[test]
    fn split_is_deterministic() {
        let t = alternating(10);
        let a = t.split(&SplitSpec::new(0.5, 9)).unwrap();
        let b = t.split(&SplitSpec::new(0.5, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_split_always_keeps_both_classes() {
        let t = alternating(4);
        for seed in 0..200 {
            let (train, test) = t.split(&SplitSpec::new(0.5, seed)).unwrap();
            assert!(train.has_both_classes(), "seed {seed}");
            assert!(test.has_both_classes(), "seed {seed}");
        }
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let t = alternating(10);
        assert!(t.split(&SplitSpec::new(0.0, 1)).is_err());
        assert!(t.split(&SplitSpec::new(1.0, 1)).is_err());
        let one_class =
            DecisionTable::new(names(1), (0..6).map(|i| obj(&[i as f64], 1)).collect()).unwrap();
        assert!(one_class.split(&SplitSpec::new(0.5, 1)).is_err());
    }

    #[test]
    fn clipping_limits_extremes() {
        let mut objects: Vec<Object> = (1..=200)
            .map(|i| obj(&[i as f64], (i % 2) as Label))
            .collect();
        objects.push(obj(&[1e9], 1));
        let t = DecisionTable::new(names(1), objects).unwrap();
        let clip = ClipBounds::fit(&t, 0.5, 99.5).unwrap();
        let clipped = clip.apply(&t).unwrap();
        let max = clipped.column(0).into_iter().fold(f64::MIN, f64::max);
        assert_eq!(max, 200.0);
        assert_eq!(clipped.column(0)[0], 2.0);
    }
}
