//! Text serializations of a [`SelectionReport`].
//!
//! `to_text` is the human-readable form (key-value block then an aligned run
//! table); `summary_csv` and `runs_csv` carry the same numbers delimited.

use std::fmt::Write as _;

use super::SelectionReport;
use crate::scalar::Scalar;

fn indices(mask: &crate::FeatureMask) -> String {
    mask.selected()
        .iter()
        .map(|m| (m + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "undefined".to_owned(), |v| v.to_string())
}

impl<T: Scalar> SelectionReport<T> {
    pub fn summary_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("algorithm", self.algorithm.to_string()),
            ("n_features", self.n_features.to_string()),
            ("runs", self.per_run.len().to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("j_prime", self.j_prime.to_string()),
            ("j_mean", self.j_mean.to_string()),
            ("j_sd", self.j_sd.to_string()),
            ("j_best", self.j_best.to_string()),
            ("pi_percent", opt(self.pi_percent)),
            ("xi_mean", self.xi_mean.to_string()),
            ("xi_sd", self.xi_sd.to_string()),
            ("xi_best", self.xi_best.to_string()),
            ("xi_percent", self.xi_percent.to_string()),
            ("best_run", self.best_run.to_string()),
            ("best_features", indices(&self.best_overall)),
        ]
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in self.summary_pairs() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("run,best_j,cardinality,evaluations,features\n");
        for (i, r) in self.per_run.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{},{},{},{}",
                r.best_j,
                r.cardinality,
                r.evaluations,
                indices(&r.best_mask)
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let pairs = self.summary_pairs();
        let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &pairs {
            let _ = writeln!(out, "{k:<width$} = {v}");
        }
        out.push('\n');
        let rows: Vec<[String; 4]> = self
            .per_run
            .iter()
            .enumerate()
            .map(|(i, r)| {
                [
                    i.to_string(),
                    r.best_j.to_string(),
                    r.cardinality.to_string(),
                    r.evaluations.to_string(),
                ]
            })
            .collect();
        let header = ["run", "best_j", "cardinality", "evaluations"];
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let _ = writeln!(
            out,
            "{:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            header[0],
            header[1],
            header[2],
            header[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        );
        for row in &rows {
            let _ = writeln!(
                out,
                "{:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                row[0],
                row[1],
                row[2],
                row[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            );
        }
        out
    }
}
