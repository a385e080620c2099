//! Confusion summaries, ROC analysis and feature-selection summary metrics.
//!
//! The minority class is the positive class. A sample is predicted positive iff
//! its score is strictly greater than the threshold.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dataset::Class;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    pub fn total(&self) -> usize {
        self.positives() + self.negatives()
    }
}

pub fn confusion(truth: &[Class], predicted: &[Class]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("confusion matrix of an empty sample"));
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in truth.iter().zip(predicted) {
        match (t.is_positive(), p.is_positive()) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Sensitivity, specificity and overall accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary<T> {
    pub se: T,
    pub sp: T,
    pub accuracy: T,
}

pub fn summary<T: Scalar>(cm: &ConfusionMatrix) -> Result<Summary<T>> {
    if cm.positives() == 0 {
        return Err(Error::MissingClass(Class::Minority.as_u8()));
    }
    if cm.negatives() == 0 {
        return Err(Error::MissingClass(Class::Majority.as_u8()));
    }
    let ratio = |a: usize, b: usize| T::of_usize(a) / T::of_usize(b);
    Ok(Summary {
        se: ratio(cm.tp, cm.positives()),
        sp: ratio(cm.tn, cm.negatives()),
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint<T> {
    pub fpr: T,
    pub tpr: T,
    pub threshold: T,
}

/// ROC points ordered by ascending fpr then tpr, from (0,0) to (1,1).
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve<T> {
    points: Vec<RocPoint<T>>,
    /// (positives, negatives) of the scored sample, when known.
    class_counts: Option<(usize, usize)>,
}

impl<T: Scalar> RocCurve<T> {
    /// Validates a curve built elsewhere, e.g. read back from a file.
    pub fn from_points(points: Vec<RocPoint<T>>) -> Result<Self> {
        let (zero, one) = (T::zero(), T::one());
        let first = points
            .first()
            .ok_or_else(|| Error::invalid("empty ROC curve"))?;
        let last = points.last().unwrap();
        if first.fpr != zero || first.tpr != zero {
            return Err(Error::invalid("ROC curve must start at (0,0)"));
        }
        if last.fpr != one || last.tpr != one {
            return Err(Error::invalid("ROC curve must end at (1,1)"));
        }
        for p in &points {
            if !(p.fpr >= zero && p.fpr <= one && p.tpr >= zero && p.tpr <= one) {
                return Err(Error::invalid("ROC coordinates must lie in [0,1]"));
            }
        }
        for w in points.windows(2) {
            if w[1].fpr < w[0].fpr || w[1].tpr < w[0].tpr {
                return Err(Error::invalid("ROC coordinates must be non-decreasing"));
            }
        }
        Ok(Self {
            points,
            class_counts: None,
        })
    }

    pub fn with_class_counts(mut self, positives: usize, negatives: usize) -> Self {
        self.class_counts = Some((positives, negatives));
        self
    }

    pub fn points(&self) -> &[RocPoint<T>] {
        &self.points
    }

    pub fn class_counts(&self) -> Option<(usize, usize)> {
        self.class_counts
    }

    /// `fpr,tpr,threshold` rows under a header line. The sentinel threshold of
    /// the (1,1) endpoint is written as `-inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr,threshold\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.fpr, p.tpr, p.threshold);
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "fpr,tpr,threshold" => {}
            _ => return Err(Error::parse(1, "expected header fpr,tpr,threshold")),
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 3 {
                return Err(Error::parse(i + 1, "ragged row"));
            }
            let num = |s: &str| {
                s.parse::<T>()
                    .map_err(|_| Error::parse(i + 1, format!("non-numeric cell {s:?}")))
            };
            points.push(RocPoint {
                fpr: num(cells[0])?,
                tpr: num(cells[1])?,
                threshold: num(cells[2])?,
            });
        }
        Self::from_points(points)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Threshold sweep over the distinct scores, highest first, plus the (1,1)
/// endpoint at threshold `-inf`. The sweep at the maximum score yields (0,0).
pub fn roc_curve<T: Scalar>(truth: &[Class], scores: &[T]) -> Result<RocCurve<T>> {
    if truth.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let positives = truth.iter().filter(|c| c.is_positive()).count();
    let negatives = truth.len() - positives;
    if positives == 0 {
        return Err(Error::MissingClass(Class::Minority.as_u8()));
    }
    if negatives == 0 {
        return Err(Error::MissingClass(Class::Majority.as_u8()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let (p, n) = (T::of_usize(positives), T::of_usize(negatives));
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        // everything scored above `threshold` is already counted
        points.push(RocPoint {
            fpr: T::of_usize(fp) / n,
            tpr: T::of_usize(tp) / p,
            threshold,
        });
        while i < order.len() && scores[order[i]] == threshold {
            if truth[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
    }
    points.push(RocPoint {
        fpr: T::one(),
        tpr: T::one(),
        threshold: T::neg_infinity(),
    });
    Ok(RocCurve {
        points,
        class_counts: Some((positives, negatives)),
    })
}

/// Trapezoidal area under the curve.
pub fn auc<T: Scalar>(curve: &RocCurve<T>) -> T {
    let two = T::one() + T::one();
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / two)
        .sum()
}

/// `roc_curve` followed by `auc`.
pub fn auc_of<T: Scalar>(truth: &[Class], scores: &[T]) -> Result<T> {
    roc_curve(truth, scores).map(|c| auc(&c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint<T> {
    pub threshold: T,
    pub fpr: T,
    pub tpr: T,
    pub se: T,
    pub sp: T,
    /// Present when the curve carries its class counts.
    pub accuracy: Option<T>,
}

impl<T: Scalar> OperatingPoint<T> {
    fn at(point: &RocPoint<T>, counts: Option<(usize, usize)>) -> Self {
        let mut op = Self {
            threshold: point.threshold,
            fpr: point.fpr,
            tpr: point.tpr,
            se: point.tpr,
            sp: T::one() - point.fpr,
            accuracy: None,
        };
        if let Some((p, n)) = counts {
            op = op.summary_at(p, n);
        }
        op
    }

    /// Fills in accuracy for a sample with `positives` and `negatives`.
    pub fn summary_at(mut self, positives: usize, negatives: usize) -> Self {
        let (p, n) = (T::of_usize(positives), T::of_usize(negatives));
        self.accuracy = Some((self.se * p + self.sp * n) / (p + n));
        self
    }

    /// `c_fn * prevalence * (1 - SE) + c_fp * (1 - prevalence) * (1 - SP)`.
    pub fn expected_cost(&self, prevalence: T, c_fn: T, c_fp: T) -> T {
        let one = T::one();
        c_fn * prevalence * (one - self.se) + c_fp * (one - prevalence) * (one - self.sp)
    }
}

/// Maximum Youden index `tpr - fpr`; ties go to higher tpr, then lower threshold.
pub fn operating_point_a<T: Scalar>(curve: &RocCurve<T>) -> OperatingPoint<T> {
    let best = curve
        .points
        .iter()
        .reduce(|best, p| {
            let (jb, jp) = (best.tpr - best.fpr, p.tpr - p.fpr);
            let better = jp > jb
                || (jp == jb
                    && (p.tpr > best.tpr || (p.tpr == best.tpr && p.threshold < best.threshold)));
            if better {
                p
            } else {
                best
            }
        })
        .expect("ROC curves are never empty");
    OperatingPoint::at(best, curve.class_counts)
}

/// Lowest-fpr point with `tpr >= min_se`; ties go to higher tpr, then lower
/// threshold.
pub fn operating_point_b<T: Scalar>(curve: &RocCurve<T>, min_se: T) -> Result<OperatingPoint<T>> {
    if !(min_se >= T::zero() && min_se <= T::one()) {
        return Err(Error::invalid(format!(
            "min_se must lie in [0,1], got {min_se}"
        )));
    }
    curve
        .points
        .iter()
        .filter(|p| p.tpr >= min_se)
        .reduce(|best, p| {
            let better = p.fpr < best.fpr
                || (p.fpr == best.fpr
                    && (p.tpr > best.tpr || (p.tpr == best.tpr && p.threshold < best.threshold)));
            if better {
                p
            } else {
                best
            }
        })
        .map(|p| OperatingPoint::at(p, curve.class_counts))
        .ok_or(Error::NoOperatingPoint(min_se.as_f64()))
}

/// Relative criterion improvement of the selected subsets over the full set, in
/// percent.
pub fn improvement_pi<T: Scalar>(j_prime: T, j_star_mean: T) -> Result<T> {
    if j_prime.is_nan() || j_prime <= T::zero() {
        return Err(Error::invalid(format!(
            "full-set criterion must be positive, got {j_prime}"
        )));
    }
    Ok((j_prime - j_star_mean) / j_prime * T::of(100.0))
}

/// Relative cardinality reduction, in percent.
pub fn reduction_xi<T: Scalar>(n: usize, xi_avg: T) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("feature count must be positive"));
    }
    let n = T::of_usize(n);
    if !(xi_avg >= T::zero() && xi_avg <= n) {
        return Err(Error::invalid(format!(
            "mean cardinality {xi_avg} outside [0, {n}]"
        )));
    }
    Ok((n - xi_avg) / n * T::of(100.0))
}
