//! Cluster matching: map an instance to a ranked shortlist of label clusters.
//!
//! One linear squared-hinge classifier per cluster, trained one-vs-all over
//! all instances; a cluster is a positive for an instance when the instance
//! has at least one positive label inside it. Margins become probabilities
//! through a sigmoid, which keeps the cluster order identical to the raw
//! margin order.
//!
//! Deep matchers trained elsewhere plug in through the score file boundary:
//! [`import_scores`] output is interchangeable with [`MatcherModel::match_all`]
//! output downstream.

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::linear::{train_squared_hinge, SolverOptions};
use crate::rng::fan_out;
use crate::sparse::{top_k, SparseMat, SparseRow, SparseVec};
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::path::Path;

/// Binary instance-by-cluster relevance targets.
#[derive(Debug, Clone)]
pub struct MatcherTargets {
    m: SparseMat,
}

impl MatcherTargets {
    /// `M[i,k] = 1` iff instance `i` has a positive label in cluster `k`;
    /// the binarized product of the label matrix with the cluster indicator.
    pub fn build(y: &SparseMat, assign: &ClusterAssignment) -> Result<MatcherTargets> {
        if y.cols() != assign.num_labels() {
            return Err(Error::DimMismatch {
                left: y.cols(),
                right: assign.num_labels(),
            });
        }
        let k = assign.k();
        let mut rows = Vec::with_capacity(y.rows());
        let mut clusters: Vec<u32> = Vec::new();
        for row in y.iter_rows() {
            clusters.clear();
            clusters.extend(row.indices.iter().map(|&l| assign.cluster_of(l)));
            clusters.sort_unstable();
            clusters.dedup();
            let values = vec![1.0; clusters.len()];
            rows.push(SparseVec::new(clusters.clone(), values, k)?);
        }
        Ok(MatcherTargets {
            m: SparseMat::from_rows(rows, k)?,
        })
    }

    pub fn matrix(&self) -> &SparseMat {
        &self.m
    }

    pub fn num_instances(&self) -> usize {
        self.m.rows()
    }

    pub fn k(&self) -> usize {
        self.m.cols()
    }

    /// Instances relevant to the given cluster, ascending.
    pub fn instances_of(&self, cluster: usize) -> Vec<u32> {
        let mut out = Vec::new();
        for i in 0..self.m.rows() {
            if self.m.row(i).indices.binary_search(&(cluster as u32)).is_ok() {
                out.push(i as u32);
            }
        }
        out
    }
}

/// `K` linear classifiers over the feature space plus a bias each.
#[derive(Debug, Clone)]
pub struct MatcherModel {
    k: usize,
    feature_dim: usize,
    weights: SparseMat,
    biases: Vec<f64>,
    cluster_hash: u64,
    /// Clusters that had no positive instance and received the constant
    /// negative classifier.
    pub warnings: Vec<u32>,
}

/// Strip exact zeros out of a dense solver weight vector.
pub(crate) fn sparsify(w: &[f64], dim: usize) -> SparseVec {
    let pairs: Vec<(u32, f64)> = w[..dim]
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0.0)
        .map(|(i, &v)| (i as u32, v))
        .collect();
    SparseVec::from_pairs(pairs, dim).expect("solver weights are finite")
}

/// Logistic calibration of a margin into (0, 1).
pub fn sigmoid(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

/// Train one squared-hinge one-vs-all problem per cluster; the `K` problems
/// are independent and run in parallel. A cluster with no positive instance
/// gets weights 0 and bias -1 and is recorded in `warnings`.
pub fn train_matcher(
    x: &SparseMat,
    targets: &MatcherTargets,
    opts: &SolverOptions,
) -> Result<MatcherModel> {
    if x.rows() != targets.num_instances() {
        return Err(Error::DimMismatch {
            left: x.rows(),
            right: targets.num_instances(),
        });
    }
    let k = targets.k();
    let feature_dim = x.cols();
    let x_aug = x.with_constant_column(1.0);
    let trained: Vec<Result<(SparseVec, f64, bool)>> = (0..k)
        .into_par_iter()
        .map(|cluster| {
            let mut y = vec![-1.0f64; x_aug.rows()];
            let mut any_positive = false;
            for (i, slot) in y.iter_mut().enumerate() {
                if targets
                    .m
                    .row(i)
                    .indices
                    .binary_search(&(cluster as u32))
                    .is_ok()
                {
                    *slot = 1.0;
                    any_positive = true;
                }
            }
            if !any_positive {
                return Ok((SparseVec::empty(feature_dim), -1.0, true));
            }
            let mut cluster_opts = *opts;
            cluster_opts.seed = fan_out(opts.seed, "matcher", cluster as u64);
            let out = train_squared_hinge(&x_aug, &y, &cluster_opts)?;
            Ok((sparsify(&out.weights, feature_dim), out.weights[feature_dim], false))
        })
        .collect();
    let mut weight_rows = Vec::with_capacity(k);
    let mut biases = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    for (cluster, result) in trained.into_iter().enumerate() {
        let (w, b, degenerate) = result?;
        if degenerate {
            warnings.push(cluster as u32);
        }
        weight_rows.push(w);
        biases.push(b);
    }
    Ok(MatcherModel {
        k,
        feature_dim,
        weights: SparseMat::from_rows(weight_rows, feature_dim)?,
        biases,
        cluster_hash: 0,
        warnings,
    })
}

impl MatcherModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Hash of the cluster assignment this model was trained against.
    pub fn cluster_hash(&self) -> u64 {
        self.cluster_hash
    }

    /// Bind the model to the partition it was trained on; checked again at
    /// prediction time.
    pub fn with_cluster_hash(mut self, hash: u64) -> Self {
        self.cluster_hash = hash;
        self
    }

    /// Raw margins `w_k . x + b_k` for every cluster.
    pub fn margins(&self, x: SparseRow<'_>) -> Vec<f64> {
        (0..self.k)
            .map(|c| x.dot_row(self.weights.row(c)) + self.biases[c])
            .collect()
    }

    /// Top-`beam` clusters by probability (sigmoid of margin), ties to the
    /// smaller cluster id.
    pub fn match_clusters(&self, x: SparseRow<'_>, beam: usize) -> Vec<(u32, f64)> {
        let margins = self.margins(x);
        // Sorting on raw margins keeps the order invariant under any strictly
        // increasing calibration.
        let ranked = top_k(
            margins.iter().enumerate().map(|(c, &m)| (c as u32, m)),
            beam,
        );
        ranked.into_iter().map(|(c, m)| (c, sigmoid(m))).collect()
    }

    /// Matcher output for every row of `x`, in parallel.
    pub fn match_all(&self, x: &SparseMat, beam: usize) -> Result<Vec<Vec<(u32, f64)>>> {
        if x.cols() != self.feature_dim {
            return Err(Error::DimMismatch {
                left: x.cols(),
                right: self.feature_dim,
            });
        }
        Ok((0..x.rows())
            .into_par_iter()
            .map(|i| self.match_clusters(x.row(i), beam))
            .collect())
    }

    /// Header `K feature_dim cluster_hash`, `K` sparse weight rows, `K` bias
    /// lines. Values round-trip bit-exactly.
    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.k, self.feature_dim, self.cluster_hash)?;
        for c in 0..self.k {
            let row = self.weights.row(c);
            write!(out, "{}", row.nnz())?;
            for (idx, val) in row.iter() {
                write!(out, " {}:{}", idx, val)?;
            }
            writeln!(out)?;
        }
        for b in &self.biases {
            writeln!(out, "{b}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<MatcherModel> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing header")),
        };
        let mut head = header.split_whitespace();
        let k: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad K"))?;
        let feature_dim: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad feature_dim"))?;
        let cluster_hash: u64 = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad cluster hash"))?;
        let mut weight_rows = Vec::with_capacity(k);
        for _ in 0..k {
            let (lineno, line) = match lines.next() {
                Some((n, line)) => (n, line?),
                None => return Err(parse_err(path, k + 1, "missing weight row")),
            };
            weight_rows.push(parse_sparse_row(&line, feature_dim, path, lineno + 1)?);
        }
        let mut biases = Vec::with_capacity(k);
        for _ in 0..k {
            let (lineno, line) = match lines.next() {
                Some((n, line)) => (n, line?),
                None => return Err(parse_err(path, 2 * k + 1, "missing bias line")),
            };
            biases.push(
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, lineno + 1, &format!("bad bias: {e}")))?,
            );
        }
        Ok(MatcherModel {
            k,
            feature_dim,
            weights: SparseMat::from_rows(weight_rows, feature_dim)?,
            biases,
            cluster_hash,
            warnings: Vec::new(),
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut out)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<MatcherModel> {
        let file = std::fs::File::open(path.as_ref())?;
        MatcherModel::read(std::io::BufReader::new(file), path.as_ref())
    }
}

pub(crate) fn parse_sparse_row(
    line: &str,
    dim: usize,
    path: &Path,
    lineno: usize,
) -> Result<SparseVec> {
    let mut fields = line.split_whitespace();
    let nnz: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(path, lineno, "bad nnz"))?;
    let mut pairs = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let field = fields
            .next()
            .ok_or_else(|| parse_err(path, lineno, "fewer entries than nnz declares"))?;
        let (idx, val) = field
            .split_once(':')
            .ok_or_else(|| parse_err(path, lineno, "expected idx:val"))?;
        pairs.push((
            idx.parse::<u32>()
                .map_err(|e| parse_err(path, lineno, &format!("bad index: {e}")))?,
            val.parse::<f64>()
                .map_err(|e| parse_err(path, lineno, &format!("bad value: {e}")))?,
        ));
    }
    if fields.next().is_some() {
        return Err(parse_err(path, lineno, "more entries than nnz declares"));
    }
    SparseVec::from_pairs(pairs, dim)
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}

/// Read an external matcher score file: one `instance_id cluster:prob ...`
/// line per instance. Gaps become empty lists; duplicate instances, cluster
/// ids at or above `k`, and probabilities outside `[0, 1]` are rejected with
/// the offending line number.
pub fn import_scores<R: BufRead>(input: R, k: usize, path: &Path) -> Result<Vec<Vec<(u32, f64)>>> {
    let score_err = |line: usize, reason: String| Error::BadScoreFile {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut per_instance: Vec<(usize, Vec<(u32, f64)>)> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let instance: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| score_err(lineno + 1, format!("bad instance id: {e}")))?;
        let mut scores = Vec::new();
        let mut seen: Vec<u32> = Vec::new();
        for field in fields {
            let (cluster, prob) = field
                .split_once(':')
                .ok_or_else(|| score_err(lineno + 1, "expected cluster:prob".into()))?;
            let cluster: u32 = cluster
                .parse()
                .map_err(|e| score_err(lineno + 1, format!("bad cluster id: {e}")))?;
            if cluster as usize >= k {
                return Err(score_err(lineno + 1, format!("cluster {cluster} >= K={k}")));
            }
            let prob: f64 = prob
                .parse()
                .map_err(|e| score_err(lineno + 1, format!("bad probability: {e}")))?;
            if !(0.0..=1.0).contains(&prob) {
                return Err(score_err(lineno + 1, format!("probability {prob} outside [0,1]")));
            }
            if seen.contains(&cluster) {
                return Err(score_err(lineno + 1, format!("duplicate cluster {cluster}")));
            }
            seen.push(cluster);
            scores.push((cluster, prob));
        }
        if per_instance.iter().any(|&(i, _)| i == instance) {
            return Err(score_err(lineno + 1, format!("duplicate instance {instance}")));
        }
        // Keep the downstream contract: descending probability, ties to the
        // smaller cluster id.
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        per_instance.push((instance, scores));
    }
    let n = per_instance.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); n];
    for (i, scores) in per_instance {
        out[i] = scores;
    }
    Ok(out)
}

pub fn import_scores_file<P: AsRef<Path>>(path: P, k: usize) -> Result<Vec<Vec<(u32, f64)>>> {
    let file = std::fs::File::open(path.as_ref())?;
    import_scores(std::io::BufReader::new(file), k, path.as_ref())
}

/// Write matcher output in the same format [`import_scores`] reads; values
/// round-trip bit-exactly.
pub fn export_scores<W: Write>(scores: &[Vec<(u32, f64)>], out: &mut W) -> std::io::Result<()> {
    for (i, row) in scores.iter().enumerate() {
        write!(out, "{i}")?;
        for (cluster, prob) in row {
            write!(out, " {}:{}", cluster, prob)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn export_scores_file<P: AsRef<Path>>(scores: &[Vec<(u32, f64)>], path: P) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    export_scores(scores, &mut out)?;
    Ok(())
}

/// Build matcher targets from a label matrix and a cluster assignment.
pub fn build_targets(y: &SparseMat, assign: &ClusterAssignment) -> Result<MatcherTargets> {
    MatcherTargets::build(y, assign)
}
