//! Tokenization, vocabulary construction and TF-IDF featurization.
//!
//! Preprocessing follows the common XMC protocol: lowercase, split on
//! non-alphanumeric runs, map every maximal digit run to the `<num>` token,
//! and truncate documents after 300 words. TF-IDF uses raw term counts with
//! smoothed idf `ln((1+N)/(1+df)) + 1` and L2 normalization; document
//! frequencies come from the training split only.

use crate::error::{Error, Result};
use crate::sparse::SparseVec;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

/// The token standing in for any maximal digit run.
pub const NUM_TOKEN: &str = "<num>";

/// Documents are cut after this many tokens.
pub const MAX_DOC_TOKENS: usize = 300;

/// Lowercase, split on non-alphanumeric runs, replace digit runs with
/// [`NUM_TOKEN`], truncate to [`MAX_DOC_TOKENS`]. Mixed alphanumerics split at
/// digit boundaries ("abc123def" -> abc, `<num>`, def); underscore separates.
/// A literal `<num>` in the input is kept as-is, which makes tokenization
/// idempotent over its own space-joined output.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let bytes = lower.as_bytes();
    let mut tokens = Vec::new();
    let mut run = String::new();
    let mut run_is_digits = false;

    let flush = |run: &mut String, run_is_digits: bool, tokens: &mut Vec<String>| {
        if !run.is_empty() {
            if run_is_digits {
                tokens.push(NUM_TOKEN.to_string());
            } else {
                tokens.push(std::mem::take(run));
            }
            run.clear();
        }
    };

    let mut chars = lower.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        if tokens.len() >= MAX_DOC_TOKENS {
            break;
        }
        // Preserve a literal "<num>" so normalized text re-tokenizes to itself.
        if c == '<' && bytes[pos..].starts_with(NUM_TOKEN.as_bytes()) {
            flush(&mut run, run_is_digits, &mut tokens);
            tokens.push(NUM_TOKEN.to_string());
            for _ in 0..NUM_TOKEN.len() - 1 {
                chars.next();
            }
            continue;
        }
        let is_digit = c.is_numeric();
        let is_letter = c.is_alphabetic() && c != '_';
        if !is_digit && !is_letter {
            flush(&mut run, run_is_digits, &mut tokens);
            continue;
        }
        if !run.is_empty() && run_is_digits != is_digit {
            flush(&mut run, run_is_digits, &mut tokens);
        }
        run_is_digits = is_digit;
        run.push(c);
    }
    if tokens.len() < MAX_DOC_TOKENS {
        flush(&mut run, run_is_digits, &mut tokens);
    }
    tokens.truncate(MAX_DOC_TOKENS);
    tokens
}

/// Unigram vocabulary with document frequencies over the training corpus.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    token_to_id: HashMap<String, u32>,
    tokens: Vec<String>,
    dfs: Vec<u32>,
    corpus_size: usize,
}

impl Vocabulary {
    /// Count document frequencies and keep tokens with `df >= min_df`; ids
    /// are assigned in lexicographic token order.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], min_df: usize) -> Vocabulary {
        let mut df: HashMap<&str, u32> = HashMap::new();
        for doc in corpus {
            let mut seen: Vec<&str> = doc.iter().map(|t| t.as_ref()).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, u32)> = df
            .into_iter()
            .filter(|&(_, d)| d as usize >= min_df.max(1))
            .collect();
        kept.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let mut token_to_id = HashMap::with_capacity(kept.len());
        let mut tokens = Vec::with_capacity(kept.len());
        let mut dfs = Vec::with_capacity(kept.len());
        for (id, (tok, d)) in kept.into_iter().enumerate() {
            token_to_id.insert(tok.to_string(), id as u32);
            tokens.push(tok.to_string());
            dfs.push(d);
        }
        Vocabulary {
            token_to_id,
            tokens,
            dfs,
            corpus_size: corpus.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn df(&self, id: u32) -> u32 {
        self.dfs[id as usize]
    }

    /// Smoothed inverse document frequency: `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, id: u32) -> f64 {
        ((1.0 + self.corpus_size as f64) / (1.0 + self.dfs[id as usize] as f64)).ln() + 1.0
    }

    /// One line per token `token<TAB>id<TAB>df` sorted by id, preceded by a
    /// `#corpus_size N` header.
    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "#corpus_size {}", self.corpus_size)?;
        for (id, tok) in self.tokens.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", tok, id, self.dfs[id])?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<Vocabulary> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing #corpus_size header")),
        };
        let corpus_size = header
            .strip_prefix("#corpus_size ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| parse_err(path, 1, "bad #corpus_size header"))?;
        let mut token_to_id = HashMap::new();
        let mut tokens = Vec::new();
        let mut dfs = Vec::new();
        for (lineno, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (tok, id, df) = match (fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(i), Some(d)) => (t, i, d),
                _ => return Err(parse_err(path, lineno + 1, "expected token<TAB>id<TAB>df")),
            };
            let id: u32 = id
                .parse()
                .map_err(|e| parse_err(path, lineno + 1, &format!("bad id: {e}")))?;
            if id as usize != tokens.len() {
                return Err(parse_err(path, lineno + 1, "ids must be contiguous from 0"));
            }
            let df: u32 = df
                .parse()
                .map_err(|e| parse_err(path, lineno + 1, &format!("bad df: {e}")))?;
            token_to_id.insert(tok.to_string(), id);
            tokens.push(tok.to_string());
            dfs.push(df);
        }
        Ok(Vocabulary {
            token_to_id,
            tokens,
            dfs,
            corpus_size,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut out)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Vocabulary> {
        let file = std::fs::File::open(path.as_ref())?;
        Vocabulary::read(std::io::BufReader::new(file), path.as_ref())
    }
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}

/// L2-normalized `tf * idf` vector over the vocabulary; out-of-vocabulary
/// tokens are ignored. A document with no in-vocabulary token is an error.
pub fn tfidf<S: AsRef<str>>(doc: &[S], vocab: &Vocabulary) -> Result<SparseVec> {
    let mut counts: HashMap<u32, f64> = HashMap::new();
    for tok in doc {
        if let Some(id) = vocab.id_of(tok.as_ref()) {
            *counts.entry(id).or_insert(0.0) += 1.0;
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyFeature);
    }
    let pairs: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(id, tf)| (id, tf * vocab.idf(id)))
        .collect();
    SparseVec::from_pairs(pairs, vocab.len())?.l2_normalized()
}
