//! Within-cluster label ranking, final prediction, and ensembling.
//!
//! Ranking scores `P(label | cluster, x)` with one squared-hinge classifier
//! per label, trained only against instances matched to the label's cluster.
//! The final per-label score multiplies the matcher probability of the
//! label's cluster with the calibrated ranker score; labels outside the
//! retrieved clusters are never scored, so each label receives exactly one
//! product term. An unsupervised alternative ranks by cosine between the
//! instance TF-IDF vector and the label's aggregated positive-instance
//! embedding, without any learned model.

use crate::cluster::ClusterAssignment;
use crate::embedding::{EmbeddingKind, LabelEmbeddings};
use crate::error::{Error, Result};
use crate::linear::{train_squared_hinge, SolverOptions};
use crate::matcher::{parse_sparse_row, sigmoid, sparsify, MatcherTargets};
use crate::rng::fan_out;
use crate::sparse::{top_k, SparseMat, SparseVec};
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

/// Ranked `(label, score)` list for one instance: scores in [0, 1],
/// descending, labels unique.
pub type Prediction = Vec<(u32, f64)>;

/// Per-label linear classifiers grouped by the cluster that owns the label.
#[derive(Debug, Clone)]
struct ClusterRanker {
    labels: Vec<u32>,
    weights: SparseMat,
    biases: Vec<f64>,
}

/// The ranking model of the pipeline: learned linear scorers, or the
/// model-free TF-IDF cosine fallback over positive-instance embeddings.
#[derive(Debug, Clone)]
pub enum RankerModel {
    Linear(LinearRanker),
    Tfidf(TfidfRanker),
}

impl RankerModel {
    pub fn kind(&self) -> &'static str {
        match self {
            RankerModel::Linear(_) => "linear",
            RankerModel::Tfidf(_) => "tfidf",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearRanker {
    feature_dim: usize,
    cluster_hash: u64,
    per_cluster: Vec<ClusterRanker>,
    /// Labels that had no positive instance in their cluster pool and got the
    /// constant negative classifier.
    pub warnings: Vec<u32>,
}

/// Cosine scorer against aggregated positive-instance embeddings.
#[derive(Debug, Clone)]
pub struct TfidfRanker {
    pifa: LabelEmbeddings,
}

impl TfidfRanker {
    pub fn new(pifa: LabelEmbeddings) -> Result<TfidfRanker> {
        if pifa.kind() != EmbeddingKind::Pifa {
            return Err(Error::BadInput(
                "tf-idf ranking needs positive-instance embeddings".into(),
            ));
        }
        Ok(TfidfRanker { pifa })
    }

    /// Cosine similarity clamped to [0, 1]; labels with no embedding score 0.
    pub fn score(&self, x_tfidf: &SparseVec, label: u32) -> f64 {
        if self.pifa.is_empty_label(label) {
            return 0.0;
        }
        let z = self
            .pifa
            .sparse_row(label as usize)
            .expect("positive-instance embeddings are sparse");
        x_tfidf.dot(&z).unwrap_or(0.0).clamp(0.0, 1.0)
    }

    pub fn embeddings(&self) -> &LabelEmbeddings {
        &self.pifa
    }
}

/// Cosine score between an instance and one label embedding. Errors if the
/// embeddings are not the positive-instance kind.
pub fn tfidf_ranker_score(
    x_tfidf: &SparseVec,
    pifa: &LabelEmbeddings,
    label: u32,
) -> Result<f64> {
    if pifa.kind() != EmbeddingKind::Pifa {
        return Err(Error::BadInput(
            "tf-idf ranking needs positive-instance embeddings".into(),
        ));
    }
    if pifa.is_empty_label(label) {
        return Ok(0.0);
    }
    let z = pifa.sparse_row(label as usize).expect("sparse rows");
    Ok(x_tfidf.dot(&z)?.clamp(0.0, 1.0))
}

/// Train the within-cluster rankers. For cluster `k` the training pool is
/// the set of instances with at least one positive label in `k`; each label
/// in `k` is a binary problem over that pool (positives: instances carrying
/// the label, negatives: the rest of the pool). All label problems run in
/// parallel.
pub fn train_ranker(
    x: &SparseMat,
    y: &SparseMat,
    assign: &ClusterAssignment,
    opts: &SolverOptions,
) -> Result<LinearRanker> {
    if x.rows() != y.rows() {
        return Err(Error::DimMismatch {
            left: x.rows(),
            right: y.rows(),
        });
    }
    let targets = MatcherTargets::build(y, assign)?;
    let feature_dim = x.cols();
    let label_positives = y.rows_by_col();

    let per_cluster: Vec<Result<(ClusterRanker, Vec<u32>)>> = (0..assign.k())
        .into_par_iter()
        .map(|cluster| {
            let pool = targets.instances_of(cluster);
            let pool_idx: Vec<usize> = pool.iter().map(|&i| i as usize).collect();
            let x_pool = x.select_rows(&pool_idx).with_constant_column(1.0);
            let labels = assign.labels_in(cluster).to_vec();
            let trained: Vec<Result<(SparseVec, f64, bool)>> = labels
                .par_iter()
                .map(|&label| {
                    let mut targets_vec = vec![-1.0f64; pool.len()];
                    let mut any_positive = false;
                    let positives = &label_positives[label as usize];
                    for (slot, &inst) in targets_vec.iter_mut().zip(&pool) {
                        if positives.binary_search(&inst).is_ok() {
                            *slot = 1.0;
                            any_positive = true;
                        }
                    }
                    if !any_positive {
                        return Ok((SparseVec::empty(feature_dim), -1.0, true));
                    }
                    let mut label_opts = *opts;
                    label_opts.seed = fan_out(opts.seed, "ranker", label as u64);
                    let out = train_squared_hinge(&x_pool, &targets_vec, &label_opts)?;
                    Ok((sparsify(&out.weights, feature_dim), out.weights[feature_dim], false))
                })
                .collect();
            let mut weight_rows = Vec::with_capacity(labels.len());
            let mut biases = Vec::with_capacity(labels.len());
            let mut degenerate = Vec::new();
            for (label, result) in labels.iter().zip(trained) {
                let (w, b, warn) = result?;
                if warn {
                    degenerate.push(*label);
                }
                weight_rows.push(w);
                biases.push(b);
            }
            Ok((
                ClusterRanker {
                    labels,
                    weights: SparseMat::from_rows(weight_rows, feature_dim)?,
                    biases,
                },
                degenerate,
            ))
        })
        .collect();

    let mut clusters = Vec::with_capacity(assign.k());
    let mut warnings = Vec::new();
    for result in per_cluster {
        let (ranker, degenerate) = result?;
        warnings.extend(degenerate);
        clusters.push(ranker);
    }
    warnings.sort_unstable();
    Ok(LinearRanker {
        feature_dim,
        cluster_hash: assign.content_hash(),
        per_cluster: clusters,
        warnings,
    })
}

impl LinearRanker {
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn cluster_hash(&self) -> u64 {
        self.cluster_hash
    }

    pub fn num_clusters(&self) -> usize {
        self.per_cluster.len()
    }

    pub fn labels_in(&self, cluster: usize) -> &[u32] {
        &self.per_cluster[cluster].labels
    }

    /// Raw margin of one label's scorer; `slot` indexes into
    /// [`labels_in`](Self::labels_in).
    pub fn margin(&self, cluster: usize, slot: usize, x: crate::sparse::SparseRow<'_>) -> f64 {
        let c = &self.per_cluster[cluster];
        x.dot_row(c.weights.row(slot)) + c.biases[slot]
    }

    /// Weight row and bias of one label's scorer.
    pub fn scorer(&self, cluster: usize, slot: usize) -> (crate::sparse::SparseRow<'_>, f64) {
        let c = &self.per_cluster[cluster];
        (c.weights.row(slot), c.biases[slot])
    }

    /// Persist as a directory: a manifest mapping clusters to labels plus one
    /// weight file per cluster in the matcher model format.
    pub fn save_dir<P: AsRef<Path>>(&self, dir: P) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut manifest =
            std::io::BufWriter::new(std::fs::File::create(dir.join("manifest.txt"))?);
        writeln!(
            manifest,
            "{} {} {}",
            self.per_cluster.len(),
            self.feature_dim,
            self.cluster_hash
        )?;
        for (c, ranker) in self.per_cluster.iter().enumerate() {
            write!(manifest, "{} {}", c, ranker.labels.len())?;
            for l in &ranker.labels {
                write!(manifest, " {l}")?;
            }
            writeln!(manifest)?;
        }
        drop(manifest);
        for (c, ranker) in self.per_cluster.iter().enumerate() {
            let mut out = std::io::BufWriter::new(std::fs::File::create(
                dir.join(format!("cluster_{c}.model")),
            )?);
            writeln!(
                out,
                "{} {} {}",
                ranker.labels.len(),
                self.feature_dim,
                self.cluster_hash
            )?;
            for i in 0..ranker.labels.len() {
                let row = ranker.weights.row(i);
                write!(out, "{}", row.nnz())?;
                for (idx, val) in row.iter() {
                    write!(out, " {}:{}", idx, val)?;
                }
                writeln!(out)?;
            }
            for b in &ranker.biases {
                writeln!(out, "{b}")?;
            }
        }
        Ok(())
    }

    pub fn load_dir<P: AsRef<Path>>(dir: P) -> Result<LinearRanker> {
        let dir = dir.as_ref();
        let manifest_path = dir.join("manifest.txt");
        let manifest = std::fs::read_to_string(&manifest_path)?;
        let mut lines = manifest.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err(&manifest_path, 1, "missing header"))?;
        let mut head = header.split_whitespace();
        let k: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(&manifest_path, 1, "bad cluster count"))?;
        let feature_dim: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(&manifest_path, 1, "bad feature_dim"))?;
        let cluster_hash: u64 = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(&manifest_path, 1, "bad cluster hash"))?;
        let mut cluster_labels: Vec<Vec<u32>> = vec![Vec::new(); k];
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let c: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(&manifest_path, lineno + 2, "bad cluster id"))?;
            let count: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(&manifest_path, lineno + 2, "bad label count"))?;
            let labels: Vec<u32> = fields
                .map(|s| s.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(&manifest_path, lineno + 2, &format!("bad label: {e}")))?;
            if labels.len() != count || c >= k {
                return Err(parse_err(
                    &manifest_path,
                    lineno + 2,
                    "manifest row is inconsistent",
                ));
            }
            cluster_labels[c] = labels;
        }
        let mut per_cluster = Vec::with_capacity(k);
        for (c, labels) in cluster_labels.into_iter().enumerate() {
            let model_path = dir.join(format!("cluster_{c}.model"));
            let file = std::fs::File::open(&model_path)?;
            let mut lines = std::io::BufReader::new(file).lines().enumerate();
            let header = match lines.next() {
                Some((_, line)) => line?,
                None => return Err(parse_err(&model_path, 1, "missing header")),
            };
            let n_labels: usize = header
                .split_whitespace()
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(&model_path, 1, "bad label count"))?;
            if n_labels != labels.len() {
                return Err(parse_err(
                    &model_path,
                    1,
                    "label count disagrees with manifest",
                ));
            }
            let mut weight_rows = Vec::with_capacity(n_labels);
            for _ in 0..n_labels {
                let (lineno, line) = match lines.next() {
                    Some((n, line)) => (n, line?),
                    None => return Err(parse_err(&model_path, 1, "missing weight row")),
                };
                weight_rows.push(parse_sparse_row(&line, feature_dim, &model_path, lineno + 1)?);
            }
            let mut biases = Vec::with_capacity(n_labels);
            for _ in 0..n_labels {
                let (lineno, line) = match lines.next() {
                    Some((n, line)) => (n, line?),
                    None => return Err(parse_err(&model_path, 1, "missing bias line")),
                };
                biases.push(line.trim().parse::<f64>().map_err(|e| {
                    parse_err(&model_path, lineno + 1, &format!("bad bias: {e}"))
                })?);
            }
            per_cluster.push(ClusterRanker {
                labels,
                weights: SparseMat::from_rows(weight_rows, feature_dim)?,
                biases,
            });
        }
        Ok(LinearRanker {
            feature_dim,
            cluster_hash,
            per_cluster,
            warnings: Vec::new(),
        })
    }
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: PathBuf::from(path),
        line,
        reason: reason.to_string(),
    }
}

/// Combine matcher output with the ranker: for each retrieved cluster `k`
/// and label `l` inside it, the candidate score is
/// `P(cluster k | x) * calibrated ranker score of l`. Labels outside every
/// retrieved cluster are never scored. Returns the global top-k, descending,
/// ties to the smaller label id.
pub fn predict(
    matcher_out: &[Vec<(u32, f64)>],
    ranker: &RankerModel,
    assign: &ClusterAssignment,
    x: &SparseMat,
    top_k_labels: usize,
) -> Result<Vec<Prediction>> {
    if matcher_out.len() != x.rows() {
        return Err(Error::DimMismatch {
            left: matcher_out.len(),
            right: x.rows(),
        });
    }
    if let RankerModel::Linear(linear) = ranker {
        if linear.cluster_hash != 0 && linear.cluster_hash != assign.content_hash() {
            return Err(Error::ModelMismatch(
                "ranker was trained on a different cluster assignment".into(),
            ));
        }
    }
    let results: Vec<Result<Prediction>> = (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let row = x.row(i);
            let mut candidates: Vec<(u32, f64)> = Vec::new();
            for &(cluster, cluster_prob) in &matcher_out[i] {
                if cluster as usize >= assign.k() {
                    return Err(Error::BadInput(format!(
                        "matcher produced cluster {cluster} but K={}",
                        assign.k()
                    )));
                }
                match ranker {
                    RankerModel::Linear(linear) => {
                        let labels = linear.labels_in(cluster as usize);
                        for (slot, &label) in labels.iter().enumerate() {
                            let margin = linear.margin(cluster as usize, slot, row);
                            candidates.push((label, cluster_prob * sigmoid(margin)));
                        }
                    }
                    RankerModel::Tfidf(tfidf) => {
                        let x_vec = row.to_vec(x.cols());
                        for &label in assign.labels_in(cluster as usize) {
                            candidates.push((label, cluster_prob * tfidf.score(&x_vec, label)));
                        }
                    }
                }
            }
            Ok(top_k(candidates.into_iter(), top_k_labels))
        })
        .collect();
    results.into_iter().collect()
}

/// Mean-score ensemble. Every member must cover the same instances; a label
/// missing from a member contributes zero. Output is re-ranked and truncated.
pub fn ensemble(members: &[Vec<Prediction>], top_k_labels: usize) -> Result<Vec<Prediction>> {
    let first = members
        .first()
        .ok_or_else(|| Error::BadInput("ensemble of zero members".into()))?;
    for m in members {
        if m.len() != first.len() {
            return Err(Error::EnsembleMismatch(first.len(), m.len()));
        }
    }
    let m_count = members.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let mut acc: Vec<(u32, f64)> = Vec::new();
            for member in members {
                for &(label, score) in &member[i] {
                    match acc.iter_mut().find(|(l, _)| *l == label) {
                        Some(slot) => slot.1 += score,
                        None => acc.push((label, score)),
                    }
                }
            }
            for slot in acc.iter_mut() {
                slot.1 /= m_count;
            }
            acc.sort_unstable_by_key(|&(l, _)| l);
            top_k(acc.into_iter(), top_k_labels)
        })
        .collect())
}

/// Write predictions: one `instance_id label:score ...` line per instance,
/// scores at 6 decimals, descending.
pub fn write_predictions<W: Write>(preds: &[Prediction], out: &mut W) -> std::io::Result<()> {
    for (i, row) in preds.iter().enumerate() {
        write!(out, "{i}")?;
        for (label, score) in row {
            write!(out, " {}:{:.6}", label, score)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_predictions<P: AsRef<Path>>(preds: &[Prediction], path: P) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_predictions(preds, &mut out)?;
    Ok(())
}

/// Parse a prediction file back into per-instance ranked lists.
pub fn load_predictions<P: AsRef<Path>>(path: P) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let mut per_instance: Vec<(usize, Prediction)> = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let instance: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| parse_err(path, lineno + 1, &format!("bad instance id: {e}")))?;
        let mut preds = Vec::new();
        for field in fields {
            let (label, score) = field
                .split_once(':')
                .ok_or_else(|| parse_err(path, lineno + 1, "expected label:score"))?;
            preds.push((
                label
                    .parse::<u32>()
                    .map_err(|e| parse_err(path, lineno + 1, &format!("bad label: {e}")))?,
                score
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, lineno + 1, &format!("bad score: {e}")))?,
            ));
        }
        per_instance.push((instance, preds));
    }
    let n = per_instance.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); n];
    for (i, preds) in per_instance {
        out[i] = preds;
    }
    Ok(out)
}
