//! Sparse vectors and row-compressed matrices.
//!
//! These are the carriers for TF-IDF features, label matrices, embeddings and
//! score matrices throughout the crate. All values are `f64` and every stored
//! entry is finite and nonzero; indices within a row are strictly increasing.
//! Instances are immutable after construction and safe to share across
//! threads.
//!
//! Ties anywhere in this crate break toward the smaller id, so ranked output
//! is deterministic.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;

/// Sparse vector: sorted `(index, value)` pairs over a fixed dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec {
    indices: Vec<u32>,
    values: Vec<f64>,
    dim: usize,
}

impl SparseVec {
    /// Build from parallel index/value arrays. Indices must be strictly
    /// increasing and below `dim`; values must be finite. Zero values are
    /// dropped.
    pub fn new(indices: Vec<u32>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::DimMismatch {
                left: indices.len(),
                right: values.len(),
            });
        }
        for (pos, (&i, &v)) in indices.iter().zip(&values).enumerate() {
            if (i as usize) >= dim {
                return Err(Error::BadInput(format!("index {i} out of range for dim {dim}")));
            }
            if pos > 0 && indices[pos - 1] >= i {
                return Err(Error::BadInput(format!("indices not strictly increasing at {i}")));
            }
            if !v.is_finite() {
                return Err(Error::BadInput(format!("non-finite value at index {i}")));
            }
        }
        let (indices, values) = if values.contains(&0.0) {
            indices
                .into_iter()
                .zip(values)
                .filter(|&(_, v)| v != 0.0)
                .unzip()
        } else {
            (indices, values)
        };
        Ok(SparseVec { indices, values, dim })
    }

    /// Build from unsorted pairs, summing duplicate indices.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>, dim: usize) -> Result<Self> {
        pairs.sort_unstable_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if Some(&i) == indices.last() {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        SparseVec::new(indices, values, dim)
    }

    pub fn empty(dim: usize) -> Self {
        SparseVec {
            indices: Vec::new(),
            values: Vec::new(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Dot product over shared indices. Errors on mismatched dimensionality.
    pub fn dot(&self, other: &SparseVec) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(dot_sorted(&self.indices, &self.values, &other.indices, &other.values))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unit-norm copy; preserves the sparsity pattern. Errors on the all-zero
    /// vector.
    pub fn l2_normalized(&self) -> Result<SparseVec> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(Error::EmptyVector);
        }
        Ok(SparseVec {
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v / norm).collect(),
            dim: self.dim,
        })
    }

    /// Dot against a dense slice of length `dim`.
    pub fn dot_dense(&self, w: &[f64]) -> f64 {
        debug_assert!(w.len() >= self.dim);
        self.iter().map(|(i, v)| v * w[i as usize]).sum()
    }

    /// Accumulate `scale * self` into a dense buffer.
    pub fn add_scaled_into(&self, scale: f64, out: &mut [f64]) {
        for (i, v) in self.iter() {
            out[i as usize] += scale * v;
        }
    }
}

/// Merge-based dot product of two sorted index/value arrays.
fn dot_sorted(ai: &[u32], av: &[f64], bi: &[u32], bv: &[f64]) -> f64 {
    let mut sum = 0.0;
    let (mut p, mut q) = (0, 0);
    while p < ai.len() && q < bi.len() {
        match ai[p].cmp(&bi[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                sum += av[p] * bv[q];
                p += 1;
                q += 1;
            }
        }
    }
    sum
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub struct SparseRow<'a> {
    pub indices: &'a [u32],
    pub values: &'a [f64],
}

impl<'a> SparseRow<'a> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot_dense(&self, w: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * w[i as usize]).sum()
    }

    pub fn dot_sparse(&self, other: &SparseVec) -> f64 {
        dot_sorted(self.indices, self.values, other.indices(), other.values())
    }

    pub fn dot_row(&self, other: SparseRow<'_>) -> f64 {
        dot_sorted(self.indices, self.values, other.indices, other.values)
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn add_scaled_into(&self, scale: f64, out: &mut [f64]) {
        for (i, v) in self.iter() {
            out[i as usize] += scale * v;
        }
    }

    pub fn to_vec(&self, dim: usize) -> SparseVec {
        SparseVec {
            indices: self.indices.to_vec(),
            values: self.values.to_vec(),
            dim,
        }
    }
}

/// Row-compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMat {
    /// Assemble from rows; every row must have `dim == cols`.
    pub fn from_rows(rows: Vec<SparseVec>, cols: usize) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0usize);
        let nnz: usize = rows.iter().map(|r| r.nnz()).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in &rows {
            if row.dim() != cols {
                return Err(Error::DimMismatch {
                    left: row.dim(),
                    right: cols,
                });
            }
            indices.extend_from_slice(row.indices());
            values.extend_from_slice(row.values());
            indptr.push(indices.len());
        }
        Ok(SparseMat {
            rows: rows.len(),
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// All-empty matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> SparseRow<'_> {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        SparseRow {
            indices: &self.indices[lo..hi],
            values: &self.values[lo..hi],
        }
    }

    pub fn row_vec(&self, i: usize) -> SparseVec {
        self.row(i).to_vec(self.cols)
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = SparseRow<'_>> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Copy the selected rows into a new matrix (same column space).
    pub fn select_rows(&self, which: &[usize]) -> SparseMat {
        let nnz: usize = which.iter().map(|&i| self.row(i).nnz()).sum();
        let mut indptr = Vec::with_capacity(which.len() + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        indptr.push(0);
        for &i in which {
            let row = self.row(i);
            indices.extend_from_slice(row.indices);
            values.extend_from_slice(row.values);
            indptr.push(indices.len());
        }
        SparseMat {
            rows: which.len(),
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }

    /// Append a constant column (used as the bias feature for linear models).
    pub fn with_constant_column(&self, value: f64) -> SparseMat {
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.nnz() + self.rows);
        let mut values = Vec::with_capacity(self.nnz() + self.rows);
        indptr.push(0);
        let bias_col = self.cols as u32;
        for i in 0..self.rows {
            let row = self.row(i);
            indices.extend_from_slice(row.indices);
            values.extend_from_slice(row.values);
            indices.push(bias_col);
            values.push(value);
            indptr.push(indices.len());
        }
        SparseMat {
            rows: self.rows,
            cols: self.cols + 1,
            indptr,
            indices,
            values,
        }
    }

    /// Per-row top-k entries by value, descending; ties broken toward the
    /// smaller column id. Rows with fewer than `k` entries return all of them.
    pub fn row_top_k(&self, k: usize) -> Vec<Vec<(u32, f64)>> {
        (0..self.rows).map(|i| top_k(self.row(i).iter(), k)).collect()
    }

    /// Column nonzero counts (label frequencies when applied to a label
    /// matrix).
    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.cols];
        for &i in &self.indices {
            counts[i as usize] += 1;
        }
        counts
    }

    /// Inverted row index: for each column, the (ascending) list of rows with
    /// a nonzero in that column.
    pub fn rows_by_col(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for &c in self.row(r).indices {
                out[c as usize].push(r as u32);
            }
        }
        out
    }

    /// Widen the column space; existing entries keep their indices.
    pub fn resize_cols(&mut self, cols: usize) -> Result<()> {
        if cols < self.cols {
            return Err(Error::BadInput(format!(
                "cannot shrink cols from {} to {}",
                self.cols, cols
            )));
        }
        self.cols = cols;
        Ok(())
    }

    /// Write in the text interchange format: header `rows cols`, then one
    /// `nnz idx:val ...` line per row. Values round-trip bit-exactly.
    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row = self.row(i);
            write!(out, "{}", row.nnz())?;
            for (idx, val) in row.iter() {
                write!(out, " {}:{}", idx, val)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parse the text interchange format produced by [`write_text`].
    ///
    /// [`write_text`]: SparseMat::write_text
    pub fn read_text<R: BufRead>(input: R, path: &Path) -> Result<SparseMat> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing header")),
        };
        let mut head = header.split_whitespace();
        let rows: usize = parse_field(head.next(), path, 1, "rows")?;
        let cols: usize = parse_field(head.next(), path, 1, "cols")?;
        let mut mat_rows = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (lineno, line) = match lines.next() {
                Some((n, line)) => (n, line?),
                None => return Err(parse_err(path, rows + 1, "fewer rows than header declares")),
            };
            let mut fields = line.split_whitespace();
            let nnz: usize = parse_field(fields.next(), path, lineno + 1, "nnz")?;
            let mut indices = Vec::with_capacity(nnz);
            let mut values = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let field = fields
                    .next()
                    .ok_or_else(|| parse_err(path, lineno + 1, "fewer entries than nnz declares"))?;
                let (idx, val) = field
                    .split_once(':')
                    .ok_or_else(|| parse_err(path, lineno + 1, "expected idx:val"))?;
                indices.push(
                    idx.parse::<u32>()
                        .map_err(|e| parse_err(path, lineno + 1, &format!("bad index: {e}")))?,
                );
                values.push(
                    val.parse::<f64>()
                        .map_err(|e| parse_err(path, lineno + 1, &format!("bad value: {e}")))?,
                );
            }
            if fields.next().is_some() {
                return Err(parse_err(path, lineno + 1, "more entries than nnz declares"));
            }
            mat_rows.push(SparseVec::new(indices, values, cols)?);
        }
        SparseMat::from_rows(mat_rows, cols)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_text(&mut out)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<SparseMat> {
        let file = std::fs::File::open(path.as_ref())?;
        SparseMat::read_text(std::io::BufReader::new(file), path.as_ref())
    }
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    path: &Path,
    line: usize,
    what: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = field.ok_or_else(|| parse_err(path, line, &format!("missing {what}")))?;
    raw.parse::<T>()
        .map_err(|e| parse_err(path, line, &format!("bad {what}: {e}")))
}

/// Top-k of an `(id, value)` stream: value descending, then id ascending.
pub fn top_k(entries: impl Iterator<Item = (u32, f64)>, k: usize) -> Vec<(u32, f64)> {
    let mut all: Vec<(u32, f64)> = entries.collect();
    all.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Dense vector with finite entries; carrier for dense label embeddings and
/// centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVec {
    values: Vec<f64>,
}

impl DenseVec {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadInput(format!("non-finite dense entry {bad}")));
        }
        Ok(DenseVec { values })
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVec {
            values: vec![0.0; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l2_normalized(&self) -> Result<DenseVec> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(Error::EmptyVector);
        }
        Ok(DenseVec {
            values: self.values.iter().map(|v| v / norm).collect(),
        })
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        debug_assert_eq!(self.values.len(), other.len());
        self.values.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(pairs: &[(u32, f64)], dim: usize) -> SparseVec {
        SparseVec::from_pairs(pairs.to_vec(), dim).unwrap()
    }

    #[test]
    fn dot_shared_index() {
        let a = sv(&[(0, 1.0), (2, 2.0)], 6);
        let b = sv(&[(2, 3.0), (5, 1.0)], 6);
        assert_eq!(a.dot(&b).unwrap(), 6.0);
    }

    #[test]
    fn dot_empty_operand() {
        let a = sv(&[(0, 1.0), (3, -2.0)], 4);
        let b = SparseVec::empty(4);
        assert_eq!(a.dot(&b).unwrap(), 0.0);
    }

    #[test]
    fn dot_unit_self_product() {
        let a = sv(&[(0, 0.6), (1, 0.8)], 2);
        assert!((a.dot(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dot_dimension_mismatch() {
        let a = sv(&[(0, 1.0)], 2);
        let b = sv(&[(0, 1.0)], 3);
        assert!(matches!(a.dot(&b), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn normalize_three_four_five() {
        let v = sv(&[(0, 3.0), (1, 4.0)], 2).l2_normalized().unwrap();
        assert_eq!(v.values(), &[0.6, 0.8]);
    }

    #[test]
    fn normalize_single_component() {
        let v = sv(&[(7, 5.0)], 8).l2_normalized().unwrap();
        assert_eq!(v.indices(), &[7]);
        assert_eq!(v.values(), &[1.0]);
    }

    #[test]
    fn normalize_symmetric_sum() {
        let v = sv(&[(0, 1.0), (1, 1.0)], 2).l2_normalized().unwrap();
        assert!((v.values()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!((v.values()[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn normalize_rejects_all_zero() {
        let v = SparseVec::empty(4);
        assert!(matches!(v.l2_normalized(), Err(Error::EmptyVector)));
    }

    #[test]
    fn new_rejects_unsorted_and_oob() {
        assert!(SparseVec::new(vec![2, 1], vec![1.0, 1.0], 4).is_err());
        assert!(SparseVec::new(vec![1, 1], vec![1.0, 1.0], 4).is_err());
        assert!(SparseVec::new(vec![4], vec![1.0], 4).is_err());
        assert!(SparseVec::new(vec![0], vec![f64::NAN], 4).is_err());
    }

    #[test]
    fn new_drops_stored_zeros() {
        let v = SparseVec::new(vec![0, 1, 2], vec![1.0, 0.0, 2.0], 3).unwrap();
        assert_eq!(v.indices(), &[0, 2]);
    }

    #[test]
    fn top_k_tie_breaks_by_smaller_id() {
        let row = sv(&[(1, 0.2), (4, 0.9), (7, 0.9)], 8);
        let mat = SparseMat::from_rows(vec![row], 8).unwrap();
        assert_eq!(mat.row_top_k(2)[0], vec![(4, 0.9), (7, 0.9)]);
    }

    #[test]
    fn top_k_empty_row() {
        let mat = SparseMat::from_rows(vec![SparseVec::empty(5)], 5).unwrap();
        assert!(mat.row_top_k(3)[0].is_empty());
    }

    #[test]
    fn top_k_exceeding_nnz_returns_all() {
        let row = sv(&[(0, 1.0), (1, 2.0), (2, 3.0)], 4);
        let mat = SparseMat::from_rows(vec![row], 4).unwrap();
        assert_eq!(mat.row_top_k(5)[0], vec![(2, 3.0), (1, 2.0), (0, 1.0)]);
    }

    #[test]
    fn constant_column_appends_bias() {
        let mat = SparseMat::from_rows(vec![sv(&[(1, 2.0)], 3), SparseVec::empty(3)], 3).unwrap();
        let aug = mat.with_constant_column(1.0);
        assert_eq!(aug.cols(), 4);
        assert_eq!(aug.row_vec(0), sv(&[(1, 2.0), (3, 1.0)], 4));
        assert_eq!(aug.row_vec(1), sv(&[(3, 1.0)], 4));
    }

    #[test]
    fn select_rows_copies_subset() {
        let mat = SparseMat::from_rows(
            vec![sv(&[(0, 1.0)], 2), sv(&[(1, 2.0)], 2), sv(&[(0, 3.0)], 2)],
            2,
        )
        .unwrap();
        let sub = mat.select_rows(&[2, 0]);
        assert_eq!(sub.rows(), 2);
        assert_eq!(sub.row_vec(0), sv(&[(0, 3.0)], 2));
        assert_eq!(sub.row_vec(1), sv(&[(0, 1.0)], 2));
    }

    #[test]
    fn text_format_round_trips_bit_exact() {
        let mat = SparseMat::from_rows(
            vec![
                sv(&[(0, 1.0 / 3.0), (5, -2.5e-17)], 7),
                SparseVec::empty(7),
                sv(&[(6, std::f64::consts::PI)], 7),
            ],
            7,
        )
        .unwrap();
        let mut buf = Vec::new();
        mat.write_text(&mut buf).unwrap();
        let back = SparseMat::read_text(std::io::Cursor::new(&buf), Path::new("mem")).unwrap();
        assert_eq!(mat, back);
        let mut buf2 = Vec::new();
        back.write_text(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn read_text_reports_line_numbers() {
        let text = "2 3\n1 0:1.0\n1 9:1.0\n";
        let err = SparseMat::read_text(std::io::Cursor::new(text), Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("out of range"));
        let text = "1 3\n2 0:1.0\n";
        let err = SparseMat::read_text(std::io::Cursor::new(text), Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn rows_by_col_inverts() {
        let mat = SparseMat::from_rows(
            vec![sv(&[(0, 1.0), (2, 1.0)], 3), sv(&[(2, 1.0)], 3)],
            3,
        )
        .unwrap();
        assert_eq!(mat.rows_by_col(), vec![vec![0], vec![], vec![0, 1]]);
    }

    proptest! {
        #[test]
        fn dot_is_symmetric_and_scales(
            pairs_a in proptest::collection::vec((0u32..40, -5.0f64..5.0), 0..20),
            pairs_b in proptest::collection::vec((0u32..40, -5.0f64..5.0), 0..20),
            alpha in -3.0f64..3.0,
        ) {
            let a = SparseVec::from_pairs(pairs_a, 40).unwrap();
            let b = SparseVec::from_pairs(pairs_b, 40).unwrap();
            let ab = a.dot(&b).unwrap();
            let ba = b.dot(&a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
            let scaled = SparseVec::new(
                a.indices().to_vec(),
                a.values().iter().map(|v| alpha * v).collect(),
                40,
            ).unwrap();
            let sab = scaled.dot(&b).unwrap();
            prop_assert!((sab - alpha * ab).abs() <= 1e-9 * (1.0 + sab.abs()));
        }

        #[test]
        fn normalized_norm_is_one(
            pairs in proptest::collection::vec((0u32..60, -5.0f64..5.0), 1..30),
        ) {
            let v = SparseVec::from_pairs(pairs, 60).unwrap();
            if v.nnz() > 0 {
                let n = v.l2_normalized().unwrap().l2_norm();
                prop_assert!((n - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn top_k_is_prefix_of_full_sort(
            pairs in proptest::collection::vec((0u32..30, -2.0f64..2.0), 0..25),
            k in 1usize..10,
        ) {
            let v = SparseVec::from_pairs(pairs, 30).unwrap();
            let mat = SparseMat::from_rows(vec![v.clone()], 30).unwrap();
            let got = mat.row_top_k(k).remove(0);
            let full = top_k(v.iter(), usize::MAX);
            prop_assert_eq!(&got[..], &full[..got.len()]);
            prop_assert_eq!(got.len(), k.min(v.nnz()));
        }
    }
}
