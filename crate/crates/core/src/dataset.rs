//! Dataset files and splits.
//!
//! The canonical input is one line per instance: comma-separated label ids, a
//! tab, then the raw document text. An optional companion file carries one
//! label text per label id for text-based label embeddings.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::{SparseMat, SparseVec};
use std::io::BufRead;
use std::path::Path;

/// Raw documents with their positive-label sets.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub docs: Vec<String>,
    pub y: SparseMat,
    pub label_texts: Option<Vec<String>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.y.cols()
    }

    /// Widen the label space (test sets may mention labels unseen in
    /// training and vice versa).
    pub fn resize_labels(&mut self, num_labels: usize) -> Result<()> {
        self.y.resize_cols(num_labels)
    }
}

/// Parse `label,label,...<TAB>text` lines. Duplicate label ids on a line are
/// collapsed; a line may carry no labels at all. The label space is sized by
/// the largest id seen.
pub fn load_dataset<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let mut docs = Vec::new();
    let mut label_sets: Vec<Vec<u32>> = Vec::new();
    let mut max_label: Option<u32> = None;
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let (labels_part, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: "expected labels<TAB>text".to_string(),
        })?;
        let mut labels = Vec::new();
        for field in labels_part.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let label: u32 = field.parse().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                reason: format!("bad label id {field:?}: {e}"),
            })?;
            labels.push(label);
        }
        labels.sort_unstable();
        labels.dedup();
        max_label = max_label.max(labels.last().copied());
        label_sets.push(labels);
        docs.push(text.to_string());
    }
    if docs.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    let num_labels = max_label.map_or(0, |m| m as usize + 1);
    let rows: Vec<SparseVec> = label_sets
        .into_iter()
        .map(|labels| {
            let values = vec![1.0; labels.len()];
            SparseVec::new(labels, values, num_labels)
        })
        .collect::<Result<_>>()?;
    Ok(Dataset {
        docs,
        y: SparseMat::from_rows(rows, num_labels)?,
        label_texts: None,
    })
}

/// One label text per line, line number = label id.
pub fn load_label_texts<P: AsRef<Path>>(path: P) -> Result<Vec<String>> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut texts = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        texts.push(line?);
    }
    Ok(texts)
}

/// Seeded uniform split into (train', validation); the validation side gets
/// `floor(fraction * N)` instances. Both sides keep the original instance
/// order.
pub fn split_validation(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0 < fraction && fraction < 1.0) {
        return Err(Error::BadInput(format!(
            "validation fraction must be in (0,1), got {fraction}"
        )));
    }
    let n = data.len();
    let n_valid = ((n as f64) * fraction).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut order);
    let mut valid_idx: Vec<usize> = order[..n_valid].to_vec();
    let mut train_idx: Vec<usize> = order[n_valid..].to_vec();
    valid_idx.sort_unstable();
    train_idx.sort_unstable();
    let pick = |idx: &[usize]| Dataset {
        docs: idx.iter().map(|&i| data.docs[i].clone()).collect(),
        y: data.y.select_rows(idx),
        label_texts: data.label_texts.clone(),
    };
    Ok((pick(&train_idx), pick(&valid_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_labels_and_text() {
        let f = write_tmp("3,17\tthe quick fox\n");
        let ds = load_dataset(f.path()).unwrap();
        assert_eq!(ds.docs, vec!["the quick fox"]);
        assert_eq!(ds.y.row(0).indices, &[3, 17]);
        assert_eq!(ds.num_labels(), 18);
    }

    #[test]
    fn empty_label_list_is_allowed() {
        let f = write_tmp("\tjust text\n1\tother\n");
        let ds = load_dataset(f.path()).unwrap();
        assert_eq!(ds.y.row(0).nnz(), 0);
        assert_eq!(ds.y.row(1).indices, &[1]);
    }

    #[test]
    fn duplicate_labels_collapse() {
        let f = write_tmp("2,2,2\tdoc\n");
        let ds = load_dataset(f.path()).unwrap();
        assert_eq!(ds.y.row(0).indices, &[2]);
    }

    #[test]
    fn missing_tab_reports_line() {
        let f = write_tmp("1\tok\nno tab here\n");
        let err = load_dataset(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("");
        assert!(matches!(
            load_dataset(f.path()),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn split_fraction_sizes() {
        let lines: String = (0..100).map(|i| format!("{i}\tdoc {i}\n")).collect();
        let f = write_tmp(&lines);
        let ds = load_dataset(f.path()).unwrap();
        let (train, valid) = split_validation(&ds, 0.1, 42).unwrap();
        assert_eq!(train.len(), 90);
        assert_eq!(valid.len(), 10);
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let lines: String = (0..40).map(|i| format!("{i}\tdoc {i}\n")).collect();
        let f = write_tmp(&lines);
        let ds = load_dataset(f.path()).unwrap();
        let (t1, v1) = split_validation(&ds, 0.25, 7).unwrap();
        let (t2, v2) = split_validation(&ds, 0.25, 7).unwrap();
        assert_eq!(t1.docs, t2.docs);
        assert_eq!(v1.docs, v2.docs);
        let mut all: Vec<&String> = t1.docs.iter().chain(v1.docs.iter()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 40, "split must be disjoint and exhaustive");
    }

    #[test]
    fn split_floors_validation_size() {
        let f = write_tmp("0\ta\n1\tb\n2\tc\n");
        let ds = load_dataset(f.path()).unwrap();
        let (train, valid) = split_validation(&ds, 0.5, 1).unwrap();
        assert_eq!(valid.len(), 1);
        assert_eq!(train.len(), 2);
    }

    #[test]
    fn resize_labels_widens() {
        let f = write_tmp("1\tdoc\n");
        let mut ds = load_dataset(f.path()).unwrap();
        assert_eq!(ds.num_labels(), 2);
        ds.resize_labels(10).unwrap();
        assert_eq!(ds.num_labels(), 10);
        assert!(ds.resize_labels(5).is_err());
    }
}
