//! Balanced label clustering.
//!
//! Labels are partitioned into `K = 2^d` clusters by recursively splitting
//! with balanced 2-means over unit-norm label embeddings, cosine similarity
//! throughout. Each split hands the top half of the points (by preference for
//! the left centroid) to the left child, so sibling sizes differ by at most
//! one and leaf sizes by at most `log2(K)`. Labels with empty embeddings are
//! held out of the clustering and distributed round-robin across the smallest
//! clusters afterwards.

use crate::embedding::{EmbeddingKind, LabelEmbeddings};
use crate::error::{Error, Result};
use crate::rng::{fan_out, SplitMix64};
use crate::sparse::SparseMat;
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::path::Path;

const MAX_SPLIT_ITERS: usize = 50;
const INIT_SAMPLE: usize = 32;

/// A partition of the label set into `K` clusters, with both views kept
/// consistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    k: usize,
    label_to_cluster: Vec<u32>,
    cluster_to_labels: Vec<Vec<u32>>,
    seed: u64,
    kind: EmbeddingKind,
}

impl ClusterAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_labels(&self) -> usize {
        self.label_to_cluster.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn cluster_of(&self, label: u32) -> u32 {
        self.label_to_cluster[label as usize]
    }

    pub fn labels_in(&self, cluster: usize) -> &[u32] {
        &self.cluster_to_labels[cluster]
    }

    pub fn label_to_cluster(&self) -> &[u32] {
        &self.label_to_cluster
    }

    /// Content hash binding downstream models to this exact partition.
    pub fn content_hash(&self) -> u64 {
        let mut bytes = Vec::with_capacity(8 + self.label_to_cluster.len() * 4);
        bytes.extend_from_slice(&(self.k as u64).to_le_bytes());
        for &c in &self.label_to_cluster {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
        crate::rng::fnv1a(&bytes)
    }

    fn from_cluster_lists(
        mut cluster_to_labels: Vec<Vec<u32>>,
        num_labels: usize,
        seed: u64,
        kind: EmbeddingKind,
    ) -> Self {
        let k = cluster_to_labels.len();
        let mut label_to_cluster = vec![u32::MAX; num_labels];
        for (c, labels) in cluster_to_labels.iter_mut().enumerate() {
            labels.sort_unstable();
            for &l in labels.iter() {
                label_to_cluster[l as usize] = c as u32;
            }
        }
        debug_assert!(label_to_cluster.iter().all(|&c| c != u32::MAX));
        ClusterAssignment {
            k,
            label_to_cluster,
            cluster_to_labels,
            seed,
            kind,
        }
    }

    /// Header `L K seed kind`, then one `label_id cluster_id` line per label.
    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "{} {} {} {}",
            self.num_labels(),
            self.k,
            self.seed,
            self.kind.as_str()
        )?;
        for (l, &c) in self.label_to_cluster.iter().enumerate() {
            writeln!(out, "{} {}", l, c)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<ClusterAssignment> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(parse_err(path, 1, "missing header")),
        };
        let mut head = header.split_whitespace();
        let num_labels: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad L"))?;
        let k: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad K"))?;
        let seed: u64 = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, 1, "bad seed"))?;
        let kind = EmbeddingKind::parse(
            head.next()
                .ok_or_else(|| parse_err(path, 1, "missing kind"))?,
        )?;
        let mut label_to_cluster = vec![u32::MAX; num_labels];
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let l: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, lineno + 1, "bad label id"))?;
            let c: u32 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, lineno + 1, "bad cluster id"))?;
            if l >= num_labels || (c as usize) >= k {
                return Err(parse_err(path, lineno + 1, "label or cluster out of range"));
            }
            label_to_cluster[l] = c;
        }
        if label_to_cluster.contains(&u32::MAX) {
            return Err(parse_err(path, 1, "some labels have no cluster"));
        }
        let mut cluster_to_labels = vec![Vec::new(); k];
        for (l, &c) in label_to_cluster.iter().enumerate() {
            cluster_to_labels[c as usize].push(l as u32);
        }
        Ok(ClusterAssignment {
            k,
            label_to_cluster,
            cluster_to_labels,
            seed,
            kind,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut out)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<ClusterAssignment> {
        let file = std::fs::File::open(path.as_ref())?;
        ClusterAssignment::read(std::io::BufReader::new(file), path.as_ref())
    }
}

fn parse_err(path: &Path, line: usize, reason: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.to_string(),
    }
}

/// One balanced 2-means split. Returns the two halves (sizes differ by at
/// most one, left takes the extra point), each sorted by label id.
///
/// Alternates centroid updates (normalized member mean) with a balanced
/// reassignment that sorts points by `dot(p, c_left) - dot(p, c_right)` and
/// gives the top half to the left side; stops at an assignment fixpoint or
/// after `max_iters` rounds.
pub fn balanced_two_means(
    emb: &LabelEmbeddings,
    members: &[u32],
    seed: u64,
    max_iters: usize,
) -> Result<(Vec<u32>, Vec<u32>)> {
    if members.len() < 2 {
        return Err(Error::TooSmall(members.len()));
    }
    let dim = emb.dim();
    let mut rng = SplitMix64::new(seed);

    // Seeded candidate sample; centroids start from the pair farthest apart
    // under cosine, which avoids identical initial centroids.
    let sample: Vec<u32> = if members.len() <= INIT_SAMPLE {
        members.to_vec()
    } else {
        let mut pool = members.to_vec();
        for i in 0..INIT_SAMPLE {
            let j = i + rng.next_below(pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(INIT_SAMPLE);
        pool
    };
    let mut best = (f64::INFINITY, sample[0], sample[1]);
    for (i, &a) in sample.iter().enumerate() {
        let mut row = vec![0.0; dim];
        emb.add_row_into(a as usize, &mut row);
        for &b in sample.iter().skip(i + 1) {
            let sim = emb.dot_row(b as usize, &row);
            if sim < best.0 {
                best = (sim, a, b);
            }
        }
    }
    let mut left_centroid = vec![0.0; dim];
    let mut right_centroid = vec![0.0; dim];
    emb.add_row_into(best.1 as usize, &mut left_centroid);
    emb.add_row_into(best.2 as usize, &mut right_centroid);

    let left_size = members.len().div_ceil(2);
    let mut prev_left: Vec<u32> = Vec::new();
    for _ in 0..max_iters {
        // Preference for the left centroid, computed in input order so the
        // sort below is reproducible.
        let mut scored: Vec<(f64, u32)> = members
            .par_iter()
            .map(|&l| {
                let p = l as usize;
                (emb.dot_row(p, &left_centroid) - emb.dot_row(p, &right_centroid), l)
            })
            .collect();
        scored.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut left: Vec<u32> = scored[..left_size].iter().map(|&(_, l)| l).collect();
        left.sort_unstable();
        if left == prev_left {
            break;
        }
        recompute_centroid(emb, &left, &mut left_centroid);
        let mut right: Vec<u32> = scored[left_size..].iter().map(|&(_, l)| l).collect();
        right.sort_unstable();
        recompute_centroid(emb, &right, &mut right_centroid);
        prev_left = left;
    }
    let left = prev_left;
    let right: Vec<u32> = members.iter().copied().filter(|l| left.binary_search(l).is_err()).collect();
    Ok((left, right))
}

fn recompute_centroid(emb: &LabelEmbeddings, members: &[u32], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for &l in members {
        emb.add_row_into(l as usize, out);
    }
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Recursive balanced 2-means down to `K = 2^d` clusters. `K` must be a
/// power of two no larger than the label count. Deterministic given the seed.
pub fn build_index(emb: &LabelEmbeddings, k: usize, seed: u64) -> Result<ClusterAssignment> {
    let num_labels = emb.num_labels();
    if k == 0 || !k.is_power_of_two() || k > num_labels.max(1) {
        return Err(Error::BadK {
            k,
            labels: num_labels,
        });
    }
    let clustered: Vec<u32> = (0..num_labels as u32)
        .filter(|&l| !emb.is_empty_label(l))
        .collect();
    let depth = k.trailing_zeros() as usize;
    let leaves = split_recursive(emb, clustered, depth, seed, 1)?;
    debug_assert_eq!(leaves.len(), k);

    let mut clusters = leaves;
    // Park labels with no embedding in the smallest clusters, round-robin.
    let empties = emb.empty_labels();
    if !empties.is_empty() {
        let mut by_size: Vec<usize> = (0..clusters.len()).collect();
        for &l in empties {
            by_size.sort_by_key(|&c| (clusters[c].len(), c));
            clusters[by_size[0]].push(l);
        }
    }
    Ok(ClusterAssignment::from_cluster_lists(
        clusters,
        num_labels,
        seed,
        emb.kind(),
    ))
}

fn split_recursive(
    emb: &LabelEmbeddings,
    members: Vec<u32>,
    depth: usize,
    seed: u64,
    node: u64,
) -> Result<Vec<Vec<u32>>> {
    if depth == 0 {
        return Ok(vec![members]);
    }
    // Degenerate nodes (all labels empty-embedded upstream) still need to
    // produce the full leaf count.
    let (left, right) = if members.len() < 2 {
        (members, Vec::new())
    } else {
        balanced_two_means(emb, &members, fan_out(seed, "split", node), MAX_SPLIT_ITERS)?
    };
    let (l, r) = rayon::join(
        || split_recursive(emb, left, depth - 1, seed, node * 2),
        || split_recursive(emb, right, depth - 1, seed, node * 2 + 1),
    );
    let mut leaves = l?;
    leaves.extend(r?);
    Ok(leaves)
}

/// Per-cluster count of training instances with at least one positive label
/// inside the cluster.
pub fn cluster_stats(assign: &ClusterAssignment, y: &SparseMat) -> Result<Vec<usize>> {
    if y.cols() != assign.num_labels() {
        return Err(Error::DimMismatch {
            left: y.cols(),
            right: assign.num_labels(),
        });
    }
    let mut counts = vec![0usize; assign.k()];
    let mut touched: Vec<u32> = Vec::new();
    for row in y.iter_rows() {
        touched.clear();
        for &l in row.indices {
            touched.push(assign.cluster_of(l));
        }
        touched.sort_unstable();
        touched.dedup();
        for &c in &touched {
            counts[c as usize] += 1;
        }
    }
    Ok(counts)
}
