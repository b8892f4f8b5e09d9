//! Extreme multi-label text classification as retrieval: semantically index
//! the labels into balanced clusters, match each instance to a few clusters,
//! rank the labels inside the retrieved clusters, and ensemble runs built on
//! heterogeneous label representations.
//!
//! The crate is organized along those stages:
//!
//! - [`sparse`]: vectors, CSR matrices and the shared numeric kernels
//! - [`text`]: tokenization, vocabulary and TF-IDF features
//! - [`embedding`]: PIFA / label-text / random label representations
//! - [`cluster`]: recursive balanced 2-means label indexing
//! - [`linear`]: the squared-hinge dual coordinate descent solver
//! - [`matcher`]: one-vs-all cluster scoring plus the external-score boundary
//! - [`ranker`]: within-cluster label ranking, prediction and ensembling
//! - [`eval`]: precision@k / recall@k
//! - [`dataset`]: data files and validation splits
//! - [`pipeline`]: the end-to-end train/predict/evaluate driver
//!
//! All stages are deterministic given the configuration seed; worker-thread
//! count never changes results.

pub mod cluster;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod linear;
pub mod matcher;
pub mod pipeline;
pub mod ranker;
pub mod rng;
pub mod sparse;
pub mod text;

pub use cluster::{balanced_two_means, build_index, cluster_stats, ClusterAssignment};
pub use dataset::{load_dataset, load_label_texts, split_validation, Dataset};
pub use embedding::{EmbeddingKind, LabelEmbeddings, WordEmbeddingTable};
pub use error::{Error, Result};
pub use eval::{evaluate, precision_at_k, recall_at_k, MetricReport};
pub use linear::{train_squared_hinge, SolverOptions, SolverOutput};
pub use matcher::{
    build_targets, export_scores_file, import_scores_file, sigmoid, train_matcher, MatcherModel,
    MatcherTargets,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput, RankerKind};
pub use ranker::{
    ensemble, load_predictions, predict, save_predictions, tfidf_ranker_score, train_ranker,
    LinearRanker, Prediction, RankerModel, TfidfRanker,
};
pub use sparse::{DenseVec, SparseMat, SparseVec};
pub use text::{tfidf, tokenize, Vocabulary};
