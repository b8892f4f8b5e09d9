//! Label representations that drive semantic indexing.
//!
//! Three constructions are supported: PIFA (the unit-normalized sum of the
//! TF-IDF vectors of a label's positive instances), mean-pooled word
//! embeddings of the label text, and seeded random unit vectors as a
//! clustering baseline. Labels without usable source data are kept as zero
//! rows and listed in `empty_labels`; the indexer distributes them after
//! clustering.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::{DenseVec, SparseMat, SparseVec};
use crate::text::tokenize;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

/// Which construction produced a set of label embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    Pifa,
    Text,
    Random,
}

impl EmbeddingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmbeddingKind::Pifa => "pifa",
            EmbeddingKind::Text => "text",
            EmbeddingKind::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<EmbeddingKind> {
        match s {
            "pifa" => Ok(EmbeddingKind::Pifa),
            "text" => Ok(EmbeddingKind::Text),
            "random" => Ok(EmbeddingKind::Random),
            other => Err(Error::BadInput(format!("unknown embedding kind {other:?}"))),
        }
    }
}

/// Row storage: PIFA rows stay sparse, pooled/random rows are dense.
#[derive(Debug, Clone)]
pub enum EmbeddingRows {
    Sparse(SparseMat),
    Dense { dim: usize, rows: Vec<Vec<f64>> },
}

/// One embedding row per label; non-empty rows have unit L2 norm.
#[derive(Debug, Clone)]
pub struct LabelEmbeddings {
    kind: EmbeddingKind,
    rows: EmbeddingRows,
    empty_labels: Vec<u32>,
}

impl LabelEmbeddings {
    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn num_labels(&self) -> usize {
        match &self.rows {
            EmbeddingRows::Sparse(m) => m.rows(),
            EmbeddingRows::Dense { rows, .. } => rows.len(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.rows {
            EmbeddingRows::Sparse(m) => m.cols(),
            EmbeddingRows::Dense { dim, .. } => *dim,
        }
    }

    /// Labels with no usable source data (zero rows), ascending.
    pub fn empty_labels(&self) -> &[u32] {
        &self.empty_labels
    }

    pub fn is_empty_label(&self, label: u32) -> bool {
        self.empty_labels.binary_search(&label).is_ok()
    }

    pub fn rows(&self) -> &EmbeddingRows {
        &self.rows
    }

    /// Dot of a label row against a dense query of length `dim`.
    pub fn dot_row(&self, label: usize, query: &[f64]) -> f64 {
        match &self.rows {
            EmbeddingRows::Sparse(m) => m.row(label).dot_dense(query),
            EmbeddingRows::Dense { rows, .. } => {
                rows[label].iter().zip(query).map(|(a, b)| a * b).sum()
            }
        }
    }

    /// Accumulate a label row into a dense buffer.
    pub fn add_row_into(&self, label: usize, out: &mut [f64]) {
        match &self.rows {
            EmbeddingRows::Sparse(m) => m.row(label).add_scaled_into(1.0, out),
            EmbeddingRows::Dense { rows, .. } => {
                for (o, v) in out.iter_mut().zip(&rows[label]) {
                    *o += v;
                }
            }
        }
    }

    /// Sparse view of a label row; only available for PIFA embeddings.
    pub fn sparse_row(&self, label: usize) -> Option<SparseVec> {
        match &self.rows {
            EmbeddingRows::Sparse(m) => Some(m.row_vec(label)),
            EmbeddingRows::Dense { .. } => None,
        }
    }

    /// PIFA: for each label, the L2-normalized sum of the TF-IDF rows of its
    /// positive instances. Labels with no positives become empty rows.
    pub fn pifa(y: &SparseMat, x_tfidf: &SparseMat) -> Result<LabelEmbeddings> {
        if y.rows() != x_tfidf.rows() {
            return Err(Error::DimMismatch {
                left: y.rows(),
                right: x_tfidf.rows(),
            });
        }
        let label_instances = y.rows_by_col();
        let dim = x_tfidf.cols();
        let rows: Vec<SparseVec> = label_instances
            .par_iter()
            .map(|instances| {
                if instances.is_empty() {
                    return SparseVec::empty(dim);
                }
                // Instance ids ascend, so the accumulation order is fixed and
                // the result deterministic.
                let mut acc: HashMap<u32, f64> = HashMap::new();
                for &i in instances {
                    for (idx, val) in x_tfidf.row(i as usize).iter() {
                        *acc.entry(idx).or_insert(0.0) += val;
                    }
                }
                let v = SparseVec::from_pairs(acc.into_iter().collect(), dim)
                    .expect("tf-idf rows are valid");
                match v.l2_normalized() {
                    Ok(unit) => unit,
                    Err(_) => SparseVec::empty(dim),
                }
            })
            .collect();
        let empty_labels = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_empty())
            .map(|(l, _)| l as u32)
            .collect();
        Ok(LabelEmbeddings {
            kind: EmbeddingKind::Pifa,
            rows: EmbeddingRows::Sparse(SparseMat::from_rows(rows, dim)?),
            empty_labels,
        })
    }

    /// Mean-pool the word embeddings of each label text and L2-normalize.
    /// Labels whose tokens are all out of the table become empty rows.
    pub fn from_label_texts<S: AsRef<str> + Sync>(
        label_texts: &[S],
        table: &WordEmbeddingTable,
    ) -> LabelEmbeddings {
        let dim = table.dim();
        let rows: Vec<Vec<f64>> = label_texts
            .par_iter()
            .map(|text| {
                let tokens = tokenize(text.as_ref());
                let mut sum = vec![0.0; dim];
                let mut hits = 0usize;
                for tok in &tokens {
                    if let Some(vec) = table.get(tok) {
                        for (s, v) in sum.iter_mut().zip(vec.as_slice()) {
                            *s += v;
                        }
                        hits += 1;
                    }
                }
                if hits == 0 {
                    return vec![0.0; dim];
                }
                for s in sum.iter_mut() {
                    *s /= hits as f64;
                }
                normalize_dense(&mut sum);
                sum
            })
            .collect();
        let empty_labels = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().all(|&v| v == 0.0))
            .map(|(l, _)| l as u32)
            .collect();
        LabelEmbeddings {
            kind: EmbeddingKind::Text,
            rows: EmbeddingRows::Dense { dim, rows },
            empty_labels,
        }
    }

    /// Seeded random unit vectors; the clustering baseline.
    pub fn random(num_labels: usize, dim: usize, seed: u64) -> LabelEmbeddings {
        assert!(dim >= 1, "random embeddings need dim >= 1");
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<Vec<f64>> = (0..num_labels)
            .map(|_| {
                let mut v: Vec<f64> = (0..dim).map(|_| rng.next_normal()).collect();
                loop {
                    if v.iter().any(|&x| x != 0.0) {
                        break;
                    }
                    v = (0..dim).map(|_| rng.next_normal()).collect();
                }
                normalize_dense(&mut v);
                v
            })
            .collect();
        LabelEmbeddings {
            kind: EmbeddingKind::Random,
            rows: EmbeddingRows::Dense { dim, rows },
            empty_labels: Vec::new(),
        }
    }

    /// Text serialization: header `kind L dim n_empty`, one line listing the
    /// empty labels, then one row per label (sparse `nnz idx:val ...` or
    /// dense whitespace-separated values).
    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "{} {} {} {}",
            self.kind.as_str(),
            self.num_labels(),
            self.dim(),
            self.empty_labels.len()
        )?;
        for (i, l) in self.empty_labels.iter().enumerate() {
            if i > 0 {
                write!(out, " ")?;
            }
            write!(out, "{l}")?;
        }
        writeln!(out)?;
        match &self.rows {
            EmbeddingRows::Sparse(m) => {
                for row in m.iter_rows() {
                    write!(out, "{}", row.nnz())?;
                    for (idx, val) in row.iter() {
                        write!(out, " {}:{}", idx, val)?;
                    }
                    writeln!(out)?;
                }
            }
            EmbeddingRows::Dense { rows, .. } => {
                for row in rows {
                    let mut first = true;
                    for v in row {
                        if !first {
                            write!(out, " ")?;
                        }
                        write!(out, "{v}")?;
                        first = false;
                    }
                    writeln!(out)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R, path: &Path) -> Result<LabelEmbeddings> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing header")),
        };
        let mut head = header.split_whitespace();
        let kind = EmbeddingKind::parse(
            head.next()
                .ok_or_else(|| parse_err(path, 1, "missing kind"))?,
        )?;
        let num_labels: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad label count"))?;
        let dim: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad dim"))?;
        let n_empty: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad empty count"))?;
        let empties_line = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 2, "missing empty-label line")),
        };
        let empty_labels: Vec<u32> = empties_line
            .split_whitespace()
            .map(|s| s.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(path, 2, &format!("bad empty label: {e}")))?;
        if empty_labels.len() != n_empty {
            return Err(parse_err(path, 2, "empty-label count mismatch"));
        }
        let mut body = Vec::with_capacity(num_labels);
        for _ in 0..num_labels {
            let (lineno, line) = match lines.next() {
                Some((n, line)) => (n, line?),
                None => return Err(parse_err(path, num_labels + 2, "fewer rows than declared")),
            };
            body.push((lineno + 1, line));
        }
        let rows = match kind {
            EmbeddingKind::Pifa => {
                let mut mat_rows = Vec::with_capacity(num_labels);
                for (lineno, line) in body {
                    let mut fields = line.split_whitespace();
                    let nnz: usize = fields
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err(path, lineno, "bad nnz"))?;
                    let mut pairs = Vec::with_capacity(nnz);
                    for _ in 0..nnz {
                        let field = fields
                            .next()
                            .ok_or_else(|| parse_err(path, lineno, "short row"))?;
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
                    mat_rows.push(SparseVec::from_pairs(pairs, dim)?);
                }
                EmbeddingRows::Sparse(SparseMat::from_rows(mat_rows, dim)?)
            }
            EmbeddingKind::Text | EmbeddingKind::Random => {
                let mut dense = Vec::with_capacity(num_labels);
                for (lineno, line) in body {
                    let vals: Vec<f64> = line
                        .split_whitespace()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(path, lineno, &format!("bad value: {e}")))?;
                    if vals.len() != dim {
                        return Err(parse_err(path, lineno, "dense row has wrong dimension"));
                    }
                    dense.push(vals);
                }
                EmbeddingRows::Dense { dim, rows: dense }
            }
        };
        Ok(LabelEmbeddings {
            kind,
            rows,
            empty_labels,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_text(&mut out)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<LabelEmbeddings> {
        let file = std::fs::File::open(path.as_ref())?;
        LabelEmbeddings::read_text(std::io::BufReader::new(file), path.as_ref())
    }
}

fn normalize_dense(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}

/// Static token -> dense vector table loaded from a text file
/// (`vocab_size dim` header, then `token v1 .. vdim` per line).
#[derive(Debug, Clone)]
pub struct WordEmbeddingTable {
    dim: usize,
    map: HashMap<String, DenseVec>,
}

impl WordEmbeddingTable {
    pub fn new(dim: usize) -> Self {
        WordEmbeddingTable {
            dim,
            map: HashMap::new(),
        }
    }

    pub fn insert(&mut self, token: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.dim {
            return Err(Error::DimMismatch {
                left: values.len(),
                right: self.dim,
            });
        }
        self.map.insert(token.to_string(), DenseVec::new(values)?);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&DenseVec> {
        self.map.get(token)
    }

    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<WordEmbeddingTable> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing header")),
        };
        let mut head = header.split_whitespace();
        let vocab_size: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad vocab_size"))?;
        let dim: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad dim"))?;
        let mut table = WordEmbeddingTable::new(dim);
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields
                .next()
                .ok_or_else(|| parse_err(path, lineno + 1, "missing token"))?;
            let values: Vec<f64> = fields
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(path, lineno + 1, &format!("bad value: {e}")))?;
            if values.len() != dim {
                return Err(parse_err(path, lineno + 1, "row has wrong dimension"));
            }
            table.insert(token, values)?;
        }
        if table.len() != vocab_size {
            return Err(parse_err(path, 1, "vocab_size does not match row count"));
        }
        Ok(table)
    }

    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.map.len(), self.dim)?;
        let mut tokens: Vec<&String> = self.map.keys().collect();
        tokens.sort();
        for tok in tokens {
            write!(out, "{tok}")?;
            for v in self.map[tok].as_slice() {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<WordEmbeddingTable> {
        let file = std::fs::File::open(path.as_ref())?;
        WordEmbeddingTable::read(std::io::BufReader::new(file), path.as_ref())
    }
}
