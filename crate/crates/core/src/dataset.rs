//! Labeled binary datasets: CSV ingestion, class summaries, stratified
//! splitting and appending synthetic rows.
//!
//! Datasets are immutable once built. Every transformation returns a new
//! value and leaves its input untouched.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use ndarray::{concatenate, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::SyntheticBatch;

/// Stream id used for the split shuffle.
const SPLIT_STREAM: u64 = 0x5eed_0001;

/// A class identifier, kept verbatim as it appeared in the source data.
///
/// Labels are totally ordered: two labels that both parse as finite numbers
/// compare numerically, numeric labels sort before non-numeric ones, and
/// anything else compares as a string. This is the canonical order used for
/// tie-breaks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(String);

impl ClassLabel {
    pub fn new(label: impl Into<String>) -> Self {
        ClassLabel(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<f64> {
        self.0.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

impl Ord for ClassLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.total_cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for ClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        ClassLabel::new(s)
    }
}

impl From<i64> for ClassLabel {
    fn from(v: i64) -> Self {
        ClassLabel::new(v.to_string())
    }
}

/// Which CSV column holds the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Interprets a command-line value: a header name if one matches exactly,
    /// otherwise a zero-based index when the value is an integer.
    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::MissingLabelColumn(format!("index {i}"))),
            LabelColumn::Name(name) => {
                if let Some(pos) = headers.iter().position(|h| h.trim() == name) {
                    return Ok(pos);
                }
                match name.parse::<usize>() {
                    Ok(i) if i < headers.len() => Ok(i),
                    _ => Err(Error::MissingLabelColumn(format!("`{name}`"))),
                }
            }
        }
    }
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        LabelColumn::Name(s.to_string())
    }
}

impl From<usize> for LabelColumn {
    fn from(i: usize) -> Self {
        LabelColumn::Index(i)
    }
}

/// Column layout of the file a dataset was read from, so it can be written
/// back with the same schema.
#[derive(Debug, Clone, PartialEq)]
struct CsvSchema {
    feature_names: Vec<String>,
    label_name: String,
    label_position: usize,
}

/// Feature matrix with one binary label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Array2<f64>,
    labels: Vec<ClassLabel>,
    schema: Option<CsvSchema>,
}

impl LabeledDataset {
    /// Builds a dataset, checking that rows and labels line up, that every
    /// feature is finite and that exactly two distinct labels occur.
    pub fn new(features: Array2<f64>, labels: Vec<ClassLabel>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(((row, column), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, column });
        }
        let distinct = count_labels(&labels).len();
        if distinct != 2 {
            return Err(Error::NotBinary { found: distinct });
        }
        Ok(LabeledDataset {
            features,
            labels,
            schema: None,
        })
    }

    /// Attaches column names. The label column is placed last when written.
    pub fn with_feature_names(mut self, names: Vec<String>, label_name: &str) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: self.n_features(),
            });
        }
        let label_position = names.len();
        self.schema = Some(CsvSchema {
            feature_names: names,
            label_name: label_name.to_string(),
            label_position,
        });
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.schema.as_ref().map(|s| s.feature_names.as_slice())
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    /// The two labels in canonical order.
    pub fn classes(&self) -> (ClassLabel, ClassLabel) {
        let counts = count_labels(&self.labels);
        let mut keys = counts.into_keys();
        let a = keys.next().expect("binary invariant");
        let b = keys.next().expect("binary invariant");
        (a, b)
    }

    /// Rows carrying `label`, in dataset order.
    pub fn rows_with_label(&self, label: &ClassLabel) -> Array2<f64> {
        let idx: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| *l == label)
            .map(|(i, _)| i)
            .collect();
        self.features.select(Axis(0), &idx)
    }

    /// Subset of rows in the given order. Fails if the subset is not binary.
    pub fn select_rows(&self, idx: &[usize]) -> Result<LabeledDataset> {
        let features = self.features.select(Axis(0), idx);
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mut out = LabeledDataset::new(features, labels)?;
        out.schema = self.schema.clone();
        Ok(out)
    }

    /// Writes the dataset as CSV. When `synthetic_from` is set, a trailing
    /// `synthetic` column flags rows at or after that index with 1.
    pub fn write_csv<W: Write>(&self, out: W, synthetic_from: Option<usize>) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let schema = self.schema.clone().unwrap_or_else(|| CsvSchema {
            feature_names: (0..self.n_features()).map(|j| format!("x{j}")).collect(),
            label_name: "label".to_string(),
            label_position: self.n_features(),
        });

        let mut header: Vec<String> = schema.feature_names.clone();
        header.insert(schema.label_position, schema.label_name.clone());
        if synthetic_from.is_some() {
            header.push("synthetic".to_string());
        }
        writer.write_record(&header)?;

        let mut record = Vec::with_capacity(header.len());
        for (i, row) in self.features.outer_iter().enumerate() {
            record.clear();
            record.extend(row.iter().map(|v| v.to_string()));
            record.insert(schema.label_position, self.labels[i].to_string());
            if let Some(start) = synthetic_from {
                record.push(if i >= start { "1" } else { "0" }.to_string());
            }
            writer.write_record(&record)?;
        }
        writer.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, synthetic_from: Option<usize>) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file), synthetic_from)
    }
}

fn count_labels(labels: &[ClassLabel]) -> BTreeMap<ClassLabel, usize> {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l.clone()).or_insert(0) += 1;
    }
    counts
}

/// Reads a comma-delimited file with a header row. Rows keep file order and
/// labels are taken verbatim from the label column; every other column must
/// hold finite numbers.
pub fn load_csv(path: &Path, label_column: &LabelColumn) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label_column)
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<R: std::io::Read>(input: R, label_column: &LabelColumn) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let label_position = label_column.resolve(&headers)?;
    let n_features = headers.len() - 1;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        // header is line 1
        let line = record.position().map_or(0, |p| p.line());
        for (j, cell) in record.iter().enumerate() {
            if j == label_position {
                labels.push(ClassLabel::new(cell));
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::Parse {
                        line,
                        column: headers[j].to_string(),
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let features = Array2::from_shape_vec((labels.len(), n_features), values)
        .map_err(|e| Error::Shape(e.to_string()))?;
    let mut ds = LabeledDataset::new(features, labels)?;
    ds.schema = Some(CsvSchema {
        feature_names: headers
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != label_position)
            .map(|(_, h)| h.to_string())
            .collect(),
        label_name: headers[label_position].to_string(),
        label_position,
    });
    Ok(ds)
}

/// Per-class counts with the minority class identified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    pub minority_label: ClassLabel,
    pub majority_label: ClassLabel,
    pub minority_count: usize,
    pub majority_count: usize,
    pub imbalance_ratio: f64,
}

/// Identifies the minority class. On an exact tie the label that sorts first
/// in canonical order is the minority.
pub fn class_summary(ds: &LabeledDataset) -> ClassSummary {
    let counts = count_labels(&ds.labels);
    let mut iter = counts.into_iter();
    let (first, n_first) = iter.next().expect("binary invariant");
    let (second, n_second) = iter.next().expect("binary invariant");
    let ((minority_label, minority_count), (majority_label, majority_count)) =
        if n_second < n_first {
            ((second, n_second), (first, n_first))
        } else {
            ((first, n_first), (second, n_second))
        };
    ClassSummary {
        imbalance_ratio: majority_count as f64 / minority_count as f64,
        minority_label,
        majority_label,
        minority_count,
        majority_count,
    }
}

/// Parameters of a stratified train/test split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub rng_seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, rng_seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "train fraction {train_fraction} not in (0, 1)"
            )));
        }
        Ok(SplitSpec {
            train_fraction,
            rng_seed,
        })
    }
}

/// Number of rows of a class of size `total` that go to the training side.
pub fn stratum_train_count(total: usize, train_fraction: f64) -> usize {
    // f64::round rounds half away from zero
    (train_fraction * total as f64).round() as usize
}

/// Splits each class separately: its rows are shuffled with a generator
/// seeded from `spec.rng_seed` and the first `round(fraction * class size)`
/// go to training. Both partitions keep original row order.
pub fn stratified_split(
    ds: &LabeledDataset,
    spec: &SplitSpec,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let spec = SplitSpec::new(spec.train_fraction, spec.rng_seed)?;
    let mut rng = crate::seeded_rng(spec.rng_seed, SPLIT_STREAM);
    let (a, b) = ds.classes();

    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [a, b] {
        let mut rows: Vec<usize> = (0..ds.n_samples())
            .filter(|&i| ds.labels[i] == class)
            .collect();
        let n_train = stratum_train_count(rows.len(), spec.train_fraction);
        if n_train == 0 || n_train == rows.len() {
            return Err(Error::InvalidSplit(format!(
                "class {class} with {} rows would leave a partition without samples at fraction {}",
                rows.len(),
                spec.train_fraction
            )));
        }
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..n_train]);
        test.extend_from_slice(&rows[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(&train)?, ds.select_rows(&test)?))
}

/// Appends the batch rows, all labeled `label`, after the existing rows.
pub fn append_synthetic(
    ds: &LabeledDataset,
    batch: &SyntheticBatch,
    label: &ClassLabel,
) -> Result<LabeledDataset> {
    if batch.samples.ncols() != ds.n_features() && batch.len() > 0 {
        return Err(Error::Shape(format!(
            "batch has {} features, dataset has {}",
            batch.samples.ncols(),
            ds.n_features()
        )));
    }
    if !ds.labels.contains(label) {
        return Err(Error::InvalidConfig(format!(
            "label {label} does not occur in the dataset"
        )));
    }
    if batch.len() == 0 {
        return Ok(ds.clone());
    }
    let features = concatenate(Axis(0), &[ds.features.view(), batch.samples.view()])
        .map_err(|e| Error::Shape(e.to_string()))?;
    let mut labels = ds.labels.clone();
    labels.extend(std::iter::repeat_n(label.clone(), batch.len()));
    Ok(LabeledDataset {
        features,
        labels,
        schema: ds.schema.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn labels(v: &[i64]) -> Vec<ClassLabel> {
        v.iter().map(|&x| ClassLabel::from(x)).collect()
    }

    fn counts_dataset(n_min: usize, n_maj: usize) -> LabeledDataset {
        let n = n_min + n_maj;
        let features = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        let mut l = vec![ClassLabel::from(1); n_min];
        l.extend(vec![ClassLabel::from(0); n_maj]);
        LabeledDataset::new(features, l).unwrap()
    }

    #[test]
    fn loads_small_file() {
        let csv = "a,b,y\n1.0,2.0,0\n3,4,1\n5,6,0\n7,8e-1,1\n";
        let ds = read_csv(csv.as_bytes(), &"y".into()).unwrap();
        assert_eq!(ds.n_samples(), 4);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.features()[[3, 1]], 0.8);
        assert_eq!(ds.labels()[1].as_str(), "1");
    }

    #[test]
    fn label_by_index_and_in_middle() {
        let csv = "a,y,b\n1,x,2\n3,z,4\n";
        let ds = read_csv(csv.as_bytes(), &LabelColumn::Index(1)).unwrap();
        assert_eq!(ds.features(), array![[1.0, 2.0], [3.0, 4.0]]);
        let ds2 = read_csv(csv.as_bytes(), &"1".into()).unwrap();
        assert_eq!(ds, ds2);
    }

    #[test]
    fn parse_error_names_row_and_column() {
        let csv = "a,b,y\n1,2,0\n3,oops,1\n";
        match read_csv(csv.as_bytes(), &"y".into()) {
            Err(Error::Parse {
                line,
                column,
                value,
            }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "b");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nan_and_non_binary_and_empty() {
        let nan = "a,y\nNaN,0\n1,1\n";
        assert!(matches!(
            read_csv(nan.as_bytes(), &"y".into()),
            Err(Error::Parse { .. })
        ));
        let three = "a,y\n1,0\n2,1\n3,2\n";
        assert!(matches!(
            read_csv(three.as_bytes(), &"y".into()),
            Err(Error::NotBinary { found: 3 })
        ));
        let one = "a,y\n1,0\n2,0\n";
        assert!(matches!(
            read_csv(one.as_bytes(), &"y".into()),
            Err(Error::NotBinary { found: 1 })
        ));
        let empty = "a,y\n";
        assert!(matches!(
            read_csv(empty.as_bytes(), &"y".into()),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            read_csv("a,y\n1,0\n".as_bytes(), &"nope".into()),
            Err(Error::MissingLabelColumn(_))
        ));
    }

    #[test]
    fn missing_file() {
        let err = load_csv(Path::new("/definitely/not/here.csv"), &"y".into()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn csv_round_trip_keeps_schema() {
        let csv = "a,y,b\n1.5,x,2\n3,z,-4.25\n";
        let ds = read_csv(csv.as_bytes(), &"y".into()).unwrap();
        let mut out = Vec::new();
        ds.write_csv(&mut out, None).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,y,b\n1.5,x,2\n3,z,-4.25\n");

        let mut flagged = Vec::new();
        ds.write_csv(&mut flagged, Some(1)).unwrap();
        assert_eq!(
            String::from_utf8(flagged).unwrap(),
            "a,y,b,synthetic\n1.5,x,2,0\n3,z,-4.25,1\n"
        );
    }

    #[test]
    fn canonical_label_order() {
        let mut v: Vec<ClassLabel> = ["b", "10", "2", "a", "-1"].iter().map(|s| (*s).into()).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(|l| l.as_str()).collect();
        assert_eq!(s, ["-1", "2", "10", "a", "b"]);
    }

    #[test]
    fn summary_identifies_minority() {
        let ds = counts_dataset(3, 7);
        let s = class_summary(&ds);
        assert_eq!(s.minority_label, ClassLabel::from(1));
        assert_eq!((s.minority_count, s.majority_count), (3, 7));
        assert!((s.imbalance_ratio - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn summary_tie_break_picks_smaller_label() {
        let ds = LabeledDataset::new(
            Array2::zeros((10, 1)),
            labels(&[1, 1, 1, 1, 1, 0, 0, 0, 0, 0]),
        )
        .unwrap();
        let s = class_summary(&ds);
        assert_eq!(s.minority_label, ClassLabel::from(0));
        assert_eq!(s.imbalance_ratio, 1.0);
    }

    #[test]
    fn split_counts_and_partition() {
        let ds = counts_dataset(10, 20);
        let (train, test) = stratified_split(&ds, &SplitSpec::new(0.7, 3).unwrap()).unwrap();
        let s = class_summary(&train);
        assert_eq!((s.minority_count, s.majority_count), (7, 14));
        assert_eq!(test.n_samples(), 9);

        // partition: first feature column is a unique row id
        let mut ids: Vec<i64> = train
            .features()
            .column(0)
            .iter()
            .chain(test.features().column(0).iter())
            .map(|v| *v as i64)
            .collect();
        ids.sort_unstable();
        let expected: Vec<i64> = (0..30).map(|i| i * 2).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let ds = counts_dataset(10, 20);
        let a = stratified_split(&ds, &SplitSpec::new(0.7, 11).unwrap()).unwrap();
        let b = stratified_split(&ds, &SplitSpec::new(0.7, 11).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = stratified_split(&ds, &SplitSpec::new(0.7, 12).unwrap()).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn split_rounding_diabetes_counts() {
        // round(0.7 * 268) = round(187.6) = 188, round(0.7 * 500) = 350
        assert_eq!(stratum_train_count(268, 0.7), 188);
        assert_eq!(stratum_train_count(500, 0.7), 350);
        // exact half rounds away from zero
        assert_eq!(stratum_train_count(5, 0.5), 3);
        let ds = counts_dataset(268, 500);
        let (train, _) = stratified_split(&ds, &SplitSpec::new(0.7, 1).unwrap()).unwrap();
        let s = class_summary(&train);
        assert_eq!((s.minority_count, s.majority_count), (188, 350));
    }

    #[test]
    fn split_rejects_empty_partition() {
        let ds = counts_dataset(1, 20);
        assert!(matches!(
            stratified_split(&ds, &SplitSpec { train_fraction: 0.7, rng_seed: 0 }),
            Err(Error::InvalidSplit(_))
        ));
        assert!(SplitSpec::new(1.0, 0).is_err());
        assert!(SplitSpec::new(0.0, 0).is_err());
    }

    #[test]
    fn append_empty_and_wrong_width() {
        let ds = counts_dataset(2, 3);
        let empty = SyntheticBatch::empty(2);
        assert_eq!(append_synthetic(&ds, &empty, &ClassLabel::from(1)).unwrap(), ds);

        let wide = SyntheticBatch::from_samples(Array2::zeros((2, 3)));
        assert!(matches!(
            append_synthetic(&ds, &wide, &ClassLabel::from(1)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn append_grows_minority() {
        let ds = counts_dataset(178, 570);
        let batch = SyntheticBatch::from_samples(Array2::ones((392, 2)));
        let out = append_synthetic(&ds, &batch, &ClassLabel::from(1)).unwrap();
        let s = class_summary(&out);
        assert_eq!((s.minority_count, s.majority_count), (570, 570));
        assert_eq!(out.features().slice(ndarray::s![..748, ..]), ds.features());
        assert_eq!(&out.labels()[..748], ds.labels());
    }
}
