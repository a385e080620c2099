//! Labeled feature datasets, feature masks and stratified partitioning.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

/// Binary class label. The minority class is the positive class throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Majority = 0,
    Minority = 1,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::Minority, Class::Majority];

    pub fn from_u8(v: u8) -> Option<Class> {
        match v {
            0 => Some(Class::Majority),
            1 => Some(Class::Minority),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn is_positive(self) -> bool {
        self == Class::Minority
    }
}

/// Samples with ids, a row-major feature matrix and binary labels.
///
/// Immutable once built; every constructor validates shape, finiteness and id
/// uniqueness.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    ids: Vec<String>,
    features: Vec<T>,
    labels: Vec<Class>,
    n: usize,
    source_tag: Option<String>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(
        ids: Vec<String>,
        rows: Vec<Vec<T>>,
        labels: Vec<Class>,
        source_tag: Option<String>,
    ) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut features = Vec::with_capacity(rows.len() * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::from_flat(ids, features, n, labels, source_tag)
    }

    pub fn from_flat(
        ids: Vec<String>,
        features: Vec<T>,
        n: usize,
        labels: Vec<Class>,
        source_tag: Option<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dataset needs at least one feature column"));
        }
        if ids.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: labels.len(),
            });
        }
        if features.len() != ids.len() * n {
            return Err(Error::DimensionMismatch {
                expected: ids.len() * n,
                found: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value in row {} column {}",
                pos / n + 1,
                pos % n + 1
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(format!("duplicate id {id:?}")));
            }
        }
        Ok(Self {
            ids,
            features,
            labels,
            n,
            source_tag,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of feature columns.
    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> Class {
        self.labels[row]
    }

    /// Row-major feature matrix.
    pub fn features(&self) -> &[T] {
        &self.features
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.features[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.features.chunks_exact(self.n)
    }

    pub fn source_tag(&self) -> Option<&str> {
        self.source_tag.as_deref()
    }

    pub fn with_source_tag(mut self, tag: Option<String>) -> Self {
        self.source_tag = tag;
        self
    }

    pub fn class_count(&self, class: Class) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }

    /// Row indices of `class`, ascending.
    pub fn class_rows(&self, class: Class) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.labels[i] == class)
            .collect()
    }

    /// Rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            features,
            n: self.n,
            source_tag: self.source_tag.clone(),
        }
    }

    /// Appends rows; ids must stay unique.
    pub fn extend(&self, ids: Vec<String>, features: Vec<T>, labels: Vec<Class>) -> Result<Self> {
        let mut all_ids = self.ids.clone();
        all_ids.extend(ids);
        let mut all_features = self.features.clone();
        all_features.extend(features);
        let mut all_labels = self.labels.clone();
        all_labels.extend(labels);
        Self::from_flat(
            all_ids,
            all_features,
            self.n,
            all_labels,
            self.source_tag.clone(),
        )
    }
}

/// Binary inclusion vector over the feature columns of a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    /// Mask of length `n` with the given zero-based columns set.
    pub fn from_indices(n: usize, selected: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &i in selected {
            if i >= n {
                return Err(Error::invalid(format!(
                    "feature index {} out of range 1..={n}",
                    i + 1
                )));
            }
            bits[i] = true;
        }
        Ok(Self { bits })
    }

    /// Mask whose bits are the binary digits of `code` (bit m = column m).
    pub fn from_code(n: usize, code: u64) -> Self {
        Self {
            bits: (0..n).map(|m| code >> m & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected features.
    pub fn cardinality(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty_subset(&self) -> bool {
        !self.bits.contains(&true)
    }

    /// Zero-based selected columns, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&m| self.bits[m]).collect()
    }

    pub fn and(&self, other: &FeatureMask) -> Result<FeatureMask> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(FeatureMask::new(
            self.bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a && *b)
                .collect(),
        ))
    }

    /// Expresses `inner`, a mask over this mask's selected columns, as a mask
    /// over the full column set.
    pub fn lift(&self, inner: &FeatureMask) -> Result<FeatureMask> {
        let selected = self.selected();
        if inner.len() != selected.len() {
            return Err(Error::DimensionMismatch {
                expected: selected.len(),
                found: inner.len(),
            });
        }
        let mut bits = vec![false; self.len()];
        for (j, &m) in selected.iter().enumerate() {
            bits[m] = inner.bits[j];
        }
        Ok(FeatureMask::new(bits))
    }

    /// Mask file text: `n=<n>` then the 1-based selected indices.
    pub fn to_mask_file(&self) -> String {
        let indices: Vec<String> = self
            .selected()
            .iter()
            .map(|m| (m + 1).to_string())
            .collect();
        format!("n={}\n{}\n", self.len(), indices.join(" "))
    }

    pub fn parse_mask_file(text: &str) -> Result<FeatureMask> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing n= line"))?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::parse(1, format!("expected n=<int>, got {header:?}")))?;
        let mut selected = Vec::new();
        if let Some(line) = lines.next() {
            let mut prev = 0;
            for tok in line.split_whitespace() {
                let idx: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(2, format!("bad feature index {tok:?}")))?;
                if idx == 0 || idx > n {
                    return Err(Error::parse(
                        2,
                        format!("feature index {idx} out of range 1..={n}"),
                    ));
                }
                if idx <= prev {
                    return Err(Error::parse(
                        2,
                        "feature indices must be strictly ascending",
                    ));
                }
                prev = idx;
                selected.push(idx - 1);
            }
        }
        FeatureMask::from_indices(n, &selected)
    }

    pub fn read(path: &Path) -> Result<FeatureMask> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse_mask_file(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_mask_file()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Keeps the columns selected by `mask`, in ascending column order.
pub fn project<T: Scalar>(ds: &LabeledDataset<T>, mask: &FeatureMask) -> Result<LabeledDataset<T>> {
    if mask.len() != ds.n {
        return Err(Error::DimensionMismatch {
            expected: ds.n,
            found: mask.len(),
        });
    }
    if mask.is_empty_subset() {
        return Err(Error::EmptySubset);
    }
    let cols = mask.selected();
    let mut features = Vec::with_capacity(ds.len() * cols.len());
    for row in ds.rows() {
        features.extend(cols.iter().map(|&m| row[m]));
    }
    Ok(LabeledDataset {
        ids: ds.ids.clone(),
        features,
        labels: ds.labels.clone(),
        n: cols.len(),
        source_tag: ds.source_tag.clone(),
    })
}

/// Fold id per sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
}

impl FoldAssignment {
    pub fn new(fold_of: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("fold count must be positive"));
        }
        let mut sizes = vec![0usize; k];
        for &f in &fold_of {
            if f >= k {
                return Err(Error::invalid(format!("fold id {f} out of range 0..{k}")));
            }
            sizes[f] += 1;
        }
        if let Some(f) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::invalid(format!("fold {f} is empty")));
        }
        Ok(Self { fold_of, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    /// Held-out rows of `fold`.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// Rows outside `fold`.
    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

fn shuffled_class_rows<T: Scalar>(
    ds: &LabeledDataset<T>,
    class: Class,
    seed: u64,
    stream: u64,
) -> Vec<usize> {
    let mut rows = ds.class_rows(class);
    let mut rng = seed::rng(seed, &[stream, class.as_u8() as u64]);
    rows.shuffle(&mut rng);
    rows
}

/// Per-class split with `round(count * test_fraction)` test rows per class.
/// Both halves keep the input row order.
pub fn stratified_split<T: Scalar>(
    ds: &LabeledDataset<T>,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset<T>, LabeledDataset<T>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction must lie in (0,1), got {test_fraction}"
        )));
    }
    let mut in_test = vec![false; ds.len()];
    for class in Class::BOTH {
        let count = ds.class_count(class);
        if count < 2 {
            return Err(Error::ClassTooSmall {
                class: class.as_u8(),
                count,
                required: 2,
            });
        }
        let n_test = (count as f64 * test_fraction).round() as usize;
        for &i in shuffled_class_rows(ds, class, seed, seed::SPLIT)
            .iter()
            .take(n_test)
        {
            in_test[i] = true;
        }
    }
    let train: Vec<usize> = (0..ds.len()).filter(|&i| !in_test[i]).collect();
    let test: Vec<usize> = (0..ds.len()).filter(|&i| in_test[i]).collect();
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
/// The majority deal starts where the minority deal stopped so fold sizes stay
/// within one of each other.
pub fn stratified_kfold<T: Scalar>(
    ds: &LabeledDataset<T>,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    let mut fold_of = vec![0; ds.len()];
    let mut next = 0;
    for class in Class::BOTH {
        let count = ds.class_count(class);
        if count < k {
            return Err(Error::ClassTooSmall {
                class: class.as_u8(),
                count,
                required: k,
            });
        }
        for i in shuffled_class_rows(ds, class, seed, seed::KFOLD) {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    FoldAssignment::new(fold_of, k)
}

/// Parses feature-file text. Line numbers in errors are 1-based file lines.
pub fn parse_feature_file<T: Scalar>(text: &str) -> Result<LabeledDataset<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let mut source_tag = None;
    let (mut line_no, mut line) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    if let Some(tag) = line.strip_prefix("#source=") {
        source_tag = Some(tag.to_owned());
        (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + 1, "missing header"))?;
    }

    let header: Vec<&str> = line.split(',').map(str::trim).collect();
    if header.len() < 3 || header[0] != "id" || header[1] != "label" {
        return Err(Error::parse(
            line_no,
            "malformed header, expected id,label,f1,...,fn",
        ));
    }
    let n = header.len() - 2;

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut features = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != n + 2 {
            return Err(Error::parse(line_no, "ragged row"));
        }
        let id = cells[0];
        if id.is_empty() {
            return Err(Error::parse(line_no, "empty id"));
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::parse(line_no, format!("duplicate id {id:?}")));
        }
        let label = match cells[1] {
            "0" => Class::Majority,
            "1" => Class::Minority,
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("label {other:?} outside {{0,1}}"),
                ))
            }
        };
        for cell in &cells[2..] {
            let v: T = cell
                .parse()
                .map_err(|_| Error::parse(line_no, format!("non-numeric cell {cell:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(line_no, format!("non-finite cell {cell:?}")));
            }
            features.push(v);
        }
        ids.push(id.to_owned());
        labels.push(label);
    }
    LabeledDataset::from_flat(ids, features, n, labels, source_tag)
}

pub fn load_feature_file<T: Scalar>(path: &Path) -> Result<LabeledDataset<T>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_feature_file(&text)
}

/// Serializes a dataset. Values use the shortest representation that parses
/// back to the identical value.
pub fn to_feature_string<T: Scalar>(ds: &LabeledDataset<T>) -> String {
    let mut out = String::new();
    if let Some(tag) = &ds.source_tag {
        let _ = writeln!(out, "#source={tag}");
    }
    out.push_str("id,label");
    for m in 1..=ds.n {
        let _ = write!(out, ",f{m}");
    }
    out.push('\n');
    for (i, row) in ds.rows().enumerate() {
        let _ = write!(out, "{},{}", ds.ids[i], ds.labels[i].as_u8());
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_feature_file<T: Scalar>(ds: &LabeledDataset<T>, path: &Path) -> Result<()> {
    fs::write(path, to_feature_string(ds)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}
