//! End-to-end driver: featurize, embed, index, train matcher, train ranker,
//! predict, evaluate. Every stage writes its artifact into one output
//! directory; a manifest records the configuration and a content hash per
//! artifact, so identical config + data reproduce identical bytes and any
//! input change shows up in the manifest.

use crate::cluster::{build_index, ClusterAssignment};
use crate::dataset::Dataset;
use crate::embedding::{EmbeddingKind, LabelEmbeddings, WordEmbeddingTable};
use crate::error::{Error, Result};
use crate::eval::{evaluate, MetricReport};
use crate::linear::SolverOptions;
use crate::matcher::{export_scores_file, train_matcher, MatcherTargets};
use crate::ranker::{
    predict, save_predictions, train_ranker, Prediction, RankerModel, TfidfRanker,
};
use crate::rng::{fan_out, fnv1a};
use crate::sparse::{SparseMat, SparseVec};
use crate::text::{tfidf, tokenize, Vocabulary};
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Which scorer ranks labels within retrieved clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankerKind {
    Linear,
    Tfidf,
}

impl RankerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RankerKind::Linear => "linear",
            RankerKind::Tfidf => "tfidf",
        }
    }

    pub fn parse(s: &str) -> Result<RankerKind> {
        match s {
            "linear" => Ok(RankerKind::Linear),
            "tfidf" => Ok(RankerKind::Tfidf),
            other => Err(Error::BadInput(format!("unknown ranker kind {other:?}"))),
        }
    }
}

/// Pipeline configuration; one seed drives every stage through per-stage
/// fan-out.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub k: usize,
    pub seed: u64,
    pub embedding: EmbeddingKind,
    pub ranker: RankerKind,
    pub c_penalty: f64,
    pub beam: usize,
    pub top_k: usize,
    pub min_df: usize,
    /// Dimensionality of random label embeddings.
    pub random_dim: usize,
    /// Token table for text label embeddings.
    pub word_embeddings: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 64,
            seed: 42,
            embedding: EmbeddingKind::Pifa,
            ranker: RankerKind::Linear,
            c_penalty: 1.0,
            beam: 10,
            top_k: 10,
            min_df: 1,
            random_dim: 64,
            word_embeddings: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || !self.k.is_power_of_two() {
            return Err(Error::BadK {
                k: self.k,
                labels: 0,
            });
        }
        if self.beam == 0 || self.top_k == 0 {
            return Err(Error::BadInput("beam and top_k must be positive".into()));
        }
        if !(self.c_penalty.is_finite() && self.c_penalty > 0.0) {
            return Err(Error::BadInput("C must be positive".into()));
        }
        Ok(())
    }

    /// Round a requested cluster count up to the next power of two.
    pub fn round_k_up(requested: usize) -> usize {
        requested.max(1).next_power_of_two()
    }

    fn describe(&self) -> String {
        format!(
            "k={} seed={} embedding={} ranker={} c={} beam={} top_k={} min_df={} random_dim={}",
            self.k,
            self.seed,
            self.embedding.as_str(),
            self.ranker.as_str(),
            self.c_penalty,
            self.beam,
            self.top_k,
            self.min_df,
            self.random_dim,
        )
    }

    fn solver_options(&self, stage: &str) -> SolverOptions {
        SolverOptions {
            c: self.c_penalty,
            seed: fan_out(self.seed, stage, 0),
            ..SolverOptions::default()
        }
    }
}

/// Everything a finished run leaves behind.
#[derive(Debug)]
pub struct PipelineOutput {
    pub dir: PathBuf,
    pub report: MetricReport,
    pub predictions: Vec<Prediction>,
    pub assignment: ClusterAssignment,
}

/// TF-IDF featurize a document list against a vocabulary. Documents with no
/// in-vocabulary token become empty rows; the count of such rows is returned
/// alongside.
pub fn featurize_all(docs: &[String], vocab: &Vocabulary) -> (SparseMat, usize) {
    let rows: Vec<SparseVec> = docs
        .par_iter()
        .map(|doc| {
            let tokens = tokenize(doc);
            tfidf(&tokens, vocab).unwrap_or_else(|_| SparseVec::empty(vocab.len()))
        })
        .collect();
    let empties = rows.iter().filter(|r| r.is_empty()).count();
    let mat = SparseMat::from_rows(rows, vocab.len()).expect("tf-idf rows share the vocab dim");
    (mat, empties)
}

fn stage<T>(name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| e.in_stage(name))
}

/// Run the full train/predict/evaluate pipeline, writing artifacts under
/// `out_dir`.
pub fn run_pipeline(
    config: &PipelineConfig,
    train: &Dataset,
    test: &Dataset,
    out_dir: &Path,
) -> Result<PipelineOutput> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut artifacts: Vec<(String, PathBuf)> = Vec::new();

    // The label space is the union of both splits; labels unseen in training
    // stay as unreachable positives for recall.
    let num_labels = train.num_labels().max(test.num_labels());
    let mut train_y = train.y.clone();
    train_y.resize_cols(num_labels)?;
    let mut test_y = test.y.clone();
    test_y.resize_cols(num_labels)?;

    // featurize
    let vocab_path = out_dir.join("vocab.txt");
    let (x_train, x_test) = stage("featurize", || {
        let train_tokens: Vec<Vec<String>> = train.docs.par_iter().map(|d| tokenize(d)).collect();
        let vocab = Vocabulary::build(&train_tokens, config.min_df);
        vocab.save(&vocab_path)?;
        let (x_train, _) = featurize_all(&train.docs, &vocab);
        let (x_test, _) = featurize_all(&test.docs, &vocab);
        x_train.save(out_dir.join("train_features.smat"))?;
        x_test.save(out_dir.join("test_features.smat"))?;
        Ok((x_train, x_test))
    })?;
    artifacts.push(("vocab".into(), vocab_path));
    artifacts.push(("train_features".into(), out_dir.join("train_features.smat")));
    artifacts.push(("test_features".into(), out_dir.join("test_features.smat")));

    // embed
    let emb_path = out_dir.join("label_embeddings.txt");
    let embeddings = stage("embed", || {
        let emb = match config.embedding {
            EmbeddingKind::Pifa => LabelEmbeddings::pifa(&train_y, &x_train)?,
            EmbeddingKind::Text => {
                let texts = train
                    .label_texts
                    .as_ref()
                    .ok_or_else(|| Error::BadInput("text embeddings need label texts".into()))?;
                if texts.len() < num_labels {
                    return Err(Error::BadInput(format!(
                        "{} label texts for {} labels",
                        texts.len(),
                        num_labels
                    )));
                }
                let table_path = config.word_embeddings.as_ref().ok_or_else(|| {
                    Error::BadInput("text embeddings need a word-embedding table".into())
                })?;
                let table = WordEmbeddingTable::load(table_path)?;
                LabelEmbeddings::from_label_texts(&texts[..num_labels], &table)
            }
            EmbeddingKind::Random => LabelEmbeddings::random(
                num_labels,
                config.random_dim,
                fan_out(config.seed, "embed", 0),
            ),
        };
        emb.save(&emb_path)?;
        Ok(emb)
    })?;
    artifacts.push(("label_embeddings".into(), emb_path));

    // The unsupervised ranker always scores against positive-instance
    // embeddings, whatever drove the indexing.
    let pifa_for_ranker = if config.ranker == RankerKind::Tfidf {
        let pifa = if config.embedding == EmbeddingKind::Pifa {
            embeddings.clone()
        } else {
            stage("embed", || LabelEmbeddings::pifa(&train_y, &x_train))?
        };
        let path = out_dir.join("pifa_embeddings.txt");
        pifa.save(&path)?;
        artifacts.push(("pifa_embeddings".into(), path));
        Some(pifa)
    } else {
        None
    };

    // index
    let clusters_path = out_dir.join("clusters.txt");
    let assignment = stage("index", || {
        let assign = build_index(&embeddings, config.k, fan_out(config.seed, "index", 0))?;
        assign.save(&clusters_path)?;
        Ok(assign)
    })?;
    artifacts.push(("clusters".into(), clusters_path));

    // train-matcher
    let matcher_path = out_dir.join("matcher.model");
    let matcher = stage("train-matcher", || {
        let targets = MatcherTargets::build(&train_y, &assignment)?;
        let model = train_matcher(&x_train, &targets, &config.solver_options("matcher"))?
            .with_cluster_hash(assignment.content_hash());
        model.save(&matcher_path)?;
        Ok(model)
    })?;
    artifacts.push(("matcher".into(), matcher_path));

    // train-ranker
    let ranker = stage("train-ranker", || match config.ranker {
        RankerKind::Linear => {
            let model = train_ranker(
                &x_train,
                &train_y,
                &assignment,
                &config.solver_options("ranker"),
            )?;
            let dir = out_dir.join("ranker_model");
            model.save_dir(&dir)?;
            Ok(RankerModel::Linear(model))
        }
        RankerKind::Tfidf => Ok(RankerModel::Tfidf(TfidfRanker::new(
            pifa_for_ranker.expect("computed above"),
        )?)),
    })?;
    if config.ranker == RankerKind::Linear {
        artifacts.push((
            "ranker_manifest".into(),
            out_dir.join("ranker_model/manifest.txt"),
        ));
    }

    // predict
    let scores_path = out_dir.join("matcher_scores.txt");
    let pred_path = out_dir.join("test.pred");
    let predictions = stage("predict", || {
        let matcher_out = matcher.match_all(&x_test, config.beam)?;
        export_scores_file(&matcher_out, &scores_path)?;
        let preds = predict(&matcher_out, &ranker, &assignment, &x_test, config.top_k)?;
        save_predictions(&preds, &pred_path)?;
        Ok(preds)
    })?;
    artifacts.push(("matcher_scores".into(), scores_path));
    artifacts.push(("predictions".into(), pred_path));

    // evaluate
    let report = stage("evaluate", || {
        let report = evaluate(&predictions, &test_y, &[1, 3, 5])?;
        std::fs::write(out_dir.join("report.txt"), report.to_text())?;
        report.save_kv(out_dir.join("report.kv"))?;
        Ok(report)
    })?;
    artifacts.push(("report".into(), out_dir.join("report.kv")));

    write_manifest(out_dir, config, &artifacts)?;

    Ok(PipelineOutput {
        dir: out_dir.to_path_buf(),
        report,
        predictions,
        assignment,
    })
}

fn write_manifest(
    out_dir: &Path,
    config: &PipelineConfig,
    artifacts: &[(String, PathBuf)],
) -> Result<()> {
    let mut manifest = std::io::BufWriter::new(std::fs::File::create(out_dir.join("manifest.txt"))?);
    writeln!(manifest, "format 1")?;
    writeln!(manifest, "config {}", config.describe())?;
    for (name, path) in artifacts {
        let bytes = std::fs::read(path)?;
        writeln!(manifest, "artifact {} {:016x}", name, fnv1a(&bytes))?;
    }
    Ok(())
}
