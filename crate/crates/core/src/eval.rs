//! Example-based ranking metrics: precision@k and recall@k averaged over
//! instances.
//!
//! Precision@k keeps `k` in the denominator even when fewer predictions
//! exist, so missing slots count as misses. Instances with an empty truth set
//! contribute zero to precision but are excluded from the recall mean, which
//! matches common XMC tooling.

use crate::error::{Error, Result};
use crate::ranker::Prediction;
use crate::sparse::SparseMat;
use std::io::Write;
use std::path::Path;

/// Fraction of the top-`k` ranked labels that are in the truth set.
pub fn precision_at_k(ranked: &[u32], truth: &[u32], k: usize) -> f64 {
    debug_assert!(k >= 1);
    let hits = ranked
        .iter()
        .take(k)
        .filter(|l| truth.binary_search(l).is_ok())
        .count();
    hits as f64 / k as f64
}

/// Fraction of the truth set found in the top-`k`; 0 for empty truth.
pub fn recall_at_k(ranked: &[u32], truth: &[u32], k: usize) -> f64 {
    debug_assert!(k >= 1);
    if truth.is_empty() {
        return 0.0;
    }
    let hits = ranked
        .iter()
        .take(k)
        .filter(|l| truth.binary_search(l).is_ok())
        .count();
    hits as f64 / truth.len() as f64
}

/// Mean metrics over a prediction collection.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub ks: Vec<usize>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    /// Instances contributing to precision (all of them).
    pub instances: usize,
    /// Instances with non-empty truth, the recall denominator.
    pub recall_instances: usize,
}

impl MetricReport {
    pub fn precision_at(&self, k: usize) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.precision[i])
    }

    pub fn recall_at(&self, k: usize) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.recall[i])
    }

    /// Aligned human-readable table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "instances {} (recall over {})\n",
            self.instances, self.recall_instances
        ));
        out.push_str("metric   ");
        for k in &self.ks {
            out.push_str(&format!("      k={k:<3}"));
        }
        out.push('\n');
        out.push_str("precision");
        for p in &self.precision {
            out.push_str(&format!("   {p:8.4}"));
        }
        out.push('\n');
        out.push_str("recall   ");
        for r in &self.recall {
            out.push_str(&format!("   {r:8.4}"));
        }
        out.push('\n');
        out
    }

    /// Machine-readable `p@k=...` / `r@k=...` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (i, k) in self.ks.iter().enumerate() {
            out.push_str(&format!("p@{}={:.6}\n", k, self.precision[i]));
        }
        for (i, k) in self.ks.iter().enumerate() {
            out.push_str(&format!("r@{}={:.6}\n", k, self.recall[i]));
        }
        out
    }

    pub fn save_kv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::fs::File::create(path)?;
        out.write_all(self.to_kv().as_bytes())?;
        Ok(())
    }
}

/// Unweighted means over test instances. Prediction rows beyond the label
/// matrix are an error; instances missing from a shorter prediction list
/// count as empty rankings.
pub fn evaluate(preds: &[Prediction], y_test: &SparseMat, ks: &[usize]) -> Result<MetricReport> {
    if preds.len() > y_test.rows() {
        return Err(Error::DimMismatch {
            left: preds.len(),
            right: y_test.rows(),
        });
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::BadInput("ks must be positive".into()));
    }
    let n = y_test.rows();
    let empty: Prediction = Vec::new();
    let mut precision_sums = vec![0.0; ks.len()];
    let mut recall_sums = vec![0.0; ks.len()];
    let mut recall_instances = 0usize;
    for i in 0..n {
        let truth = y_test.row(i).indices;
        let ranked: Vec<u32> = preds
            .get(i)
            .unwrap_or(&empty)
            .iter()
            .map(|&(l, _)| l)
            .collect();
        if !truth.is_empty() {
            recall_instances += 1;
        }
        for (j, &k) in ks.iter().enumerate() {
            precision_sums[j] += precision_at_k(&ranked, truth, k);
            recall_sums[j] += recall_at_k(&ranked, truth, k);
        }
    }
    let precision = precision_sums.iter().map(|s| s / n.max(1) as f64).collect();
    let recall = recall_sums
        .iter()
        .map(|s| s / recall_instances.max(1) as f64)
        .collect();
    Ok(MetricReport {
        ks: ks.to_vec(),
        precision,
        recall,
        instances: n,
        recall_instances,
    })
}
