//! Shared synthetic inputs for the benchmark targets.

use xmc::rng::SplitMix64;
use xmc::sparse::{SparseMat, SparseVec};

/// Random sparse matrix with `nnz_per_row` uniform entries per row.
pub fn random_sparse(rows: usize, cols: usize, nnz_per_row: usize, seed: u64) -> SparseMat {
    let mut rng = SplitMix64::new(seed);
    let mat_rows: Vec<SparseVec> = (0..rows)
        .map(|_| {
            let mut pairs: Vec<(u32, f64)> = (0..nnz_per_row)
                .map(|_| (rng.next_below(cols) as u32, rng.next_f64() + 0.1))
                .collect();
            pairs.sort_unstable_by_key(|&(i, _)| i);
            pairs.dedup_by_key(|&mut (i, _)| i);
            SparseVec::from_pairs(pairs, cols).unwrap()
        })
        .collect();
    SparseMat::from_rows(mat_rows, cols).unwrap()
}

/// Two linearly separable blobs with +/-1 targets.
pub fn blobs(n: usize, dim: usize, seed: u64) -> (SparseMat, Vec<f64>) {
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let pairs: Vec<(u32, f64)> = (0..dim as u32)
            .map(|j| (j, sign * 2.0 + rng.next_normal()))
            .collect();
        rows.push(SparseVec::from_pairs(pairs, dim).unwrap());
        targets.push(sign);
    }
    (SparseMat::from_rows(rows, dim).unwrap(), targets)
}
