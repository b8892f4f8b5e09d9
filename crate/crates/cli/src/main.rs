//! `xmc`: train, predict and evaluate match-then-rank extreme multi-label
//! text classifiers. Every stage is also exposed as its own subcommand so
//! runs can be rebuilt piecewise; `run` chains them all.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use xmc::embedding::{EmbeddingKind, LabelEmbeddings, WordEmbeddingTable};
use xmc::matcher::{export_scores_file, import_scores_file, MatcherModel, MatcherTargets};
use xmc::pipeline::{featurize_all, run_pipeline, PipelineConfig, RankerKind};
use xmc::ranker::{LinearRanker, RankerModel, TfidfRanker};
use xmc::rng::fan_out;
use xmc::sparse::SparseMat;
use xmc::text::{tokenize, Vocabulary};
use xmc::{ClusterAssignment, SolverOptions};

#[derive(Parser)]
#[command(
    name = "xmc",
    about = "Extreme multi-label text classification: balanced label clustering, \
             cluster matching, within-cluster ranking, ensembling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonTrainArgs {
    /// Number of label clusters; rounded up to a power of two.
    #[arg(long, default_value_t = 64)]
    k: usize,
    /// Master seed; every stage derives its own stream from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Loss penalty C for all linear models.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline: featurize, embed, index, train, predict,
    /// evaluate.
    Run {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: CommonTrainArgs,
        /// Label representation driving the clustering.
        #[arg(long, default_value = "pifa")]
        embedding: String,
        /// Within-cluster ranking model.
        #[arg(long, default_value = "linear")]
        ranker: String,
        #[arg(long, default_value_t = 10)]
        beam: usize,
        #[arg(long, default_value_t = 10)]
        topk: usize,
        #[arg(long, default_value_t = 1)]
        min_df: usize,
        /// One label text per label id (for --embedding text).
        #[arg(long)]
        label_texts: Option<PathBuf>,
        /// Word-embedding table file (for --embedding text).
        #[arg(long)]
        word_embeddings: Option<PathBuf>,
        /// Hold out this fraction of training instances before training.
        #[arg(long)]
        holdout: Option<f64>,
    },
    /// Tokenize, build the vocabulary and write TF-IDF features.
    Featurize {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_df: usize,
    },
    /// Build label embeddings from features, label texts, or a seed.
    Embed {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "pifa")]
        embedding: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        label_texts: Option<PathBuf>,
        #[arg(long)]
        word_embeddings: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Dimensionality of random embeddings.
        #[arg(long, default_value_t = 64)]
        random_dim: usize,
    },
    /// Cluster the labels into a balanced index.
    Index {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train the one-vs-all cluster matcher.
    TrainMatcher {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonTrainArgs,
    },
    /// Train the within-cluster label rankers.
    TrainRanker {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: CommonTrainArgs,
    },
    /// Match clusters and rank labels for a feature matrix.
    Predict {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        clusters: PathBuf,
        /// Matcher model file; omit when importing external scores.
        #[arg(long)]
        matcher: Option<PathBuf>,
        /// External matcher score file used instead of --matcher.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Linear ranker directory.
        #[arg(long)]
        ranker_dir: Option<PathBuf>,
        /// Positive-instance embeddings for --scores-free tf-idf ranking.
        #[arg(long)]
        tfidf_embeddings: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the matcher scores used.
        #[arg(long)]
        emit_scores: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        beam: usize,
        #[arg(long, default_value_t = 10)]
        topk: usize,
    },
    /// Score a prediction file against a labeled dataset.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Comma-separated list of cutoffs.
        #[arg(long, default_value = "1,3,5")]
        ks: String,
        /// Write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average several prediction files into one.
    Ensemble {
        /// Comma-separated prediction files.
        #[arg(long)]
        ensemble: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        topk: usize,
    },
    /// Validate an external matcher score file and normalize its ordering.
    ImportScores {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    if let Ok(threads) = std::env::var("XMC_THREADS") {
        let threads: usize = threads
            .parse()
            .context("XMC_THREADS must be a thread count")?;
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("failed to configure worker pool")?;
        }
    }
    match Cli::parse().command {
        Command::Run {
            train,
            test,
            out_dir,
            common,
            embedding,
            ranker,
            beam,
            topk,
            min_df,
            label_texts,
            word_embeddings,
            holdout,
        } => {
            let k = PipelineConfig::round_k_up(common.k);
            if k != common.k {
                println!("requested k={} rounded up to {}", common.k, k);
            }
            let config = PipelineConfig {
                k,
                seed: common.seed,
                embedding: EmbeddingKind::parse(&embedding)?,
                ranker: RankerKind::parse(&ranker)?,
                c_penalty: common.c,
                beam,
                top_k: topk,
                min_df,
                random_dim: 64,
                word_embeddings,
            };
            let mut train_ds = xmc::load_dataset(&train)?;
            let test_ds = xmc::load_dataset(&test)?;
            if let Some(path) = label_texts {
                train_ds.label_texts = Some(xmc::load_label_texts(path)?);
            }
            if let Some(fraction) = holdout {
                let (kept, held) = xmc::split_validation(
                    &train_ds,
                    fraction,
                    fan_out(common.seed, "holdout", 0),
                )?;
                println!(
                    "holding out {} of {} training instances",
                    held.len(),
                    held.len() + kept.len()
                );
                train_ds = kept;
            }
            let out = run_pipeline(&config, &train_ds, &test_ds, &out_dir)?;
            print!("{}", out.report.to_text());
            println!("artifacts in {}", out.dir.display());
        }
        Command::Featurize {
            train,
            test,
            out_dir,
            min_df,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            let train_ds = xmc::load_dataset(&train)?;
            let tokens: Vec<Vec<String>> = train_ds.docs.iter().map(|d| tokenize(d)).collect();
            let vocab = Vocabulary::build(&tokens, min_df);
            vocab.save(out_dir.join("vocab.txt"))?;
            let (x_train, skipped) = featurize_all(&train_ds.docs, &vocab);
            x_train.save(out_dir.join("train_features.smat"))?;
            println!(
                "vocabulary {} tokens; train {}x{} ({} empty rows)",
                vocab.len(),
                x_train.rows(),
                x_train.cols(),
                skipped
            );
            if let Some(test) = test {
                let test_ds = xmc::load_dataset(&test)?;
                let (x_test, skipped) = featurize_all(&test_ds.docs, &vocab);
                x_test.save(out_dir.join("test_features.smat"))?;
                println!("test {}x{} ({} empty rows)", x_test.rows(), x_test.cols(), skipped);
            }
        }
        Command::Embed {
            train,
            features,
            embedding,
            out,
            label_texts,
            word_embeddings,
            seed,
            random_dim,
        } => {
            let train_ds = xmc::load_dataset(&train)?;
            let x = SparseMat::load(&features)?;
            let emb = match EmbeddingKind::parse(&embedding)? {
                EmbeddingKind::Pifa => LabelEmbeddings::pifa(&train_ds.y, &x)?,
                EmbeddingKind::Text => {
                    let texts_path =
                        label_texts.context("--embedding text needs --label-texts")?;
                    let table_path =
                        word_embeddings.context("--embedding text needs --word-embeddings")?;
                    let texts = xmc::load_label_texts(texts_path)?;
                    if texts.len() < train_ds.num_labels() {
                        bail!(
                            "{} label texts for {} labels",
                            texts.len(),
                            train_ds.num_labels()
                        );
                    }
                    let table = WordEmbeddingTable::load(table_path)?;
                    LabelEmbeddings::from_label_texts(&texts[..train_ds.num_labels()], &table)
                }
                EmbeddingKind::Random => {
                    LabelEmbeddings::random(train_ds.num_labels(), random_dim, seed)
                }
            };
            emb.save(&out)?;
            println!(
                "{} embeddings for {} labels ({} empty)",
                emb.kind().as_str(),
                emb.num_labels(),
                emb.empty_labels().len()
            );
        }
        Command::Index {
            embeddings,
            out,
            k,
            seed,
        } => {
            let emb = LabelEmbeddings::load(&embeddings)?;
            let k_rounded = PipelineConfig::round_k_up(k);
            if k_rounded != k {
                println!("requested k={k} rounded up to {k_rounded}");
            }
            let assign = xmc::build_index(&emb, k_rounded, seed)?;
            assign.save(&out)?;
            let sizes: Vec<usize> = (0..assign.k()).map(|c| assign.labels_in(c).len()).collect();
            println!(
                "{} clusters over {} labels, sizes {}..{}",
                assign.k(),
                assign.num_labels(),
                sizes.iter().min().unwrap(),
                sizes.iter().max().unwrap()
            );
        }
        Command::TrainMatcher {
            train,
            features,
            clusters,
            out,
            common,
        } => {
            let train_ds = xmc::load_dataset(&train)?;
            let x = SparseMat::load(&features)?;
            let assign = ClusterAssignment::load(&clusters)?;
            let mut y = train_ds.y;
            y.resize_cols(assign.num_labels())?;
            let targets = MatcherTargets::build(&y, &assign)?;
            let opts = SolverOptions {
                c: common.c,
                seed: fan_out(common.seed, "matcher", 0),
                ..SolverOptions::default()
            };
            let model =
                xmc::train_matcher(&x, &targets, &opts)?.with_cluster_hash(assign.content_hash());
            if !model.warnings.is_empty() {
                println!("{} clusters had no positive instances", model.warnings.len());
            }
            model.save(&out)?;
            println!("matcher over {} clusters saved to {}", model.k(), out.display());
        }
        Command::TrainRanker {
            train,
            features,
            clusters,
            out_dir,
            common,
        } => {
            let train_ds = xmc::load_dataset(&train)?;
            let x = SparseMat::load(&features)?;
            let assign = ClusterAssignment::load(&clusters)?;
            let mut y = train_ds.y;
            y.resize_cols(assign.num_labels())?;
            let opts = SolverOptions {
                c: common.c,
                seed: fan_out(common.seed, "ranker", 0),
                ..SolverOptions::default()
            };
            let model = xmc::train_ranker(&x, &y, &assign, &opts)?;
            if !model.warnings.is_empty() {
                println!(
                    "{} labels had no positive instance in their cluster pool",
                    model.warnings.len()
                );
            }
            model.save_dir(&out_dir)?;
            println!("rankers for {} labels saved to {}", assign.num_labels(), out_dir.display());
        }
        Command::Predict {
            features,
            clusters,
            matcher,
            scores,
            ranker_dir,
            tfidf_embeddings,
            out,
            emit_scores,
            beam,
            topk,
        } => {
            let x = SparseMat::load(&features)?;
            let assign = ClusterAssignment::load(&clusters)?;
            let matcher_out = match (&matcher, &scores) {
                (Some(model_path), None) => {
                    let model = MatcherModel::load(model_path)?;
                    if model.cluster_hash() != 0 && model.cluster_hash() != assign.content_hash() {
                        bail!("matcher was trained on a different cluster assignment");
                    }
                    model.match_all(&x, beam)?
                }
                (None, Some(score_path)) => {
                    let mut imported = import_scores_file(score_path, assign.k())?;
                    if imported.len() > x.rows() {
                        bail!(
                            "score file covers {} instances but features have {}",
                            imported.len(),
                            x.rows()
                        );
                    }
                    imported.resize(x.rows(), Vec::new());
                    imported
                }
                _ => bail!("provide exactly one of --matcher or --scores"),
            };
            if let Some(path) = emit_scores {
                export_scores_file(&matcher_out, path)?;
            }
            let ranker = match (&ranker_dir, &tfidf_embeddings) {
                (Some(dir), None) => RankerModel::Linear(LinearRanker::load_dir(dir)?),
                (None, Some(emb_path)) => {
                    RankerModel::Tfidf(TfidfRanker::new(LabelEmbeddings::load(emb_path)?)?)
                }
                _ => bail!("provide exactly one of --ranker-dir or --tfidf-embeddings"),
            };
            let preds = xmc::predict(&matcher_out, &ranker, &assign, &x, topk)?;
            xmc::save_predictions(&preds, &out)?;
            println!("predictions for {} instances written to {}", preds.len(), out.display());
        }
        Command::Evaluate { pred, test, ks, out } => {
            let preds = xmc::load_predictions(&pred)?;
            let test_ds = xmc::load_dataset(&test)?;
            let ks: Vec<usize> = ks
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .context("--ks must be comma-separated positive integers")?;
            let report = xmc::evaluate(&preds, &test_ds.y, &ks)?;
            print!("{}", report.to_text());
            if let Some(path) = out {
                report.save_kv(path)?;
            }
        }
        Command::Ensemble { ensemble, out, topk } => {
            let members: Vec<Vec<xmc::Prediction>> = ensemble
                .split(',')
                .map(xmc::load_predictions)
                .collect::<xmc::Result<_>>()?;
            let combined = xmc::ensemble(&members, topk)?;
            xmc::save_predictions(&combined, &out)?;
            println!(
                "ensembled {} members over {} instances into {}",
                members.len(),
                combined.len(),
                out.display()
            );
        }
        Command::ImportScores { scores, k, out } => {
            let imported = import_scores_file(&scores, k)?;
            let total: usize = imported.iter().map(|s| s.len()).sum();
            println!(
                "score file is well-formed: {} instances, {} scores",
                imported.len(),
                total
            );
            if let Some(path) = out {
                export_scores_file(&imported, path)?;
            }
        }
    }
    Ok(())
}
