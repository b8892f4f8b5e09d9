//! Shared fixtures for the acceptance suite.
//!
//! The synthetic corpus mirrors the structure of desk-scale benchmark data:
//! labels grouped into latent topics with a long-tail popularity curve,
//! documents dominated by shared topic words, and label identity carried by
//! a few discriminative words. Everything is deterministic from one seed.
//!
//! Setting `XMC_EURLEX_TRAIN` / `XMC_EURLEX_TEST` (combined
//! `labels<TAB>text` files) swaps the real dataset in for the end-to-end
//! criteria.

use xmc::dataset::Dataset;
use xmc::embedding::WordEmbeddingTable;
use xmc::rng::SplitMix64;
use xmc::sparse::{SparseMat, SparseVec};

/// Spell a number with letters only, so tokens survive the digit-run rule.
pub fn alpha(mut n: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

pub struct SyntheticXmc {
    pub train: Dataset,
    pub test: Dataset,
    pub num_labels: usize,
    pub word_table: WordEmbeddingTable,
}

pub const TOPICS: usize = 32;
pub const LABELS_PER_TOPIC: usize = 16;
pub const TOPIC_TOKENS: usize = 16;
/// Identity words available inside a topic; labels draw overlapping subsets.
pub const IDENT_POOL: usize = 14;
/// Identity words per label.
pub const OWN_TOKENS: usize = 4;
/// Global identity vocabulary; topics share words out of it, so an identity
/// word alone is ambiguous and only topic context resolves it.
pub const GLOBAL_IDENT: usize = 120;
pub const NOISE_TOKENS: usize = 200;

fn topic_token(topic: usize, j: usize) -> String {
    format!("tw{}{}", alpha(topic), alpha(j))
}

fn ident_token(word: usize) -> String {
    format!("id{}", alpha(word))
}

/// The identity words a topic draws from: a fixed sample of the global
/// vocabulary, so roughly `TOPICS * IDENT_POOL / GLOBAL_IDENT` topics share
/// any given word.
fn topic_ident_pool(topic: usize) -> Vec<usize> {
    let mut rng = SplitMix64::new(0x900d ^ (topic as u64).wrapping_mul(0x51ed_2701));
    let mut picks: Vec<usize> = Vec::with_capacity(IDENT_POOL);
    while picks.len() < IDENT_POOL {
        let w = rng.next_below(GLOBAL_IDENT);
        if !picks.contains(&w) {
            picks.push(w);
        }
    }
    picks
}

/// The identity words of a label: an overlapping subset of its topic's
/// identity pool, fixed by the label id. Sibling labels share words, which
/// is what makes within-cluster ranking a real problem.
fn label_identity(label: usize) -> Vec<usize> {
    let topic = label / LABELS_PER_TOPIC;
    let pool = topic_ident_pool(topic);
    let mut rng = SplitMix64::new(0x1de57 ^ (label as u64).wrapping_mul(0x9e37_79b9));
    let mut picks: Vec<usize> = Vec::with_capacity(OWN_TOKENS);
    while picks.len() < OWN_TOKENS {
        let w = pool[rng.next_below(IDENT_POOL)];
        if !picks.contains(&w) {
            picks.push(w);
        }
    }
    picks
}

/// One document: a few labels from one topic (occasionally two). The text is
/// dominated by the topic's shared words; each positive label drops a noisy
/// subset of its identity words; global noise rounds it out.
fn generate_doc(rng: &mut SplitMix64, labels_out: &mut Vec<u32>, text_out: &mut String) {
    labels_out.clear();
    text_out.clear();
    let mut tokens: Vec<String> = Vec::new();
    let emit_topic = |topic: usize,
                          n_labels: usize,
                          rng: &mut SplitMix64,
                          tokens: &mut Vec<String>,
                          labels_out: &mut Vec<u32>| {
        // Long-tail label popularity inside the topic.
        let mut chosen: Vec<usize> = Vec::new();
        while chosen.len() < n_labels {
            let r = rng.next_f64();
            let rank = (((LABELS_PER_TOPIC as f64 + 1.0).powf(r)) - 1.0).floor() as usize;
            let rank = rank.min(LABELS_PER_TOPIC - 1);
            let label = topic * LABELS_PER_TOPIC + rank;
            if !chosen.contains(&label) {
                chosen.push(label);
            }
        }
        for &label in &chosen {
            labels_out.push(label as u32);
            for &w in &label_identity(label) {
                if rng.next_f64() < 0.6 {
                    tokens.push(ident_token(w));
                }
            }
        }
        for _ in 0..12 {
            tokens.push(topic_token(topic, rng.next_below(TOPIC_TOKENS)));
        }
    };

    let topic = rng.next_below(TOPICS);
    let n_labels = 2 + rng.next_below(3);
    emit_topic(topic, n_labels, rng, &mut tokens, labels_out);
    if rng.next_f64() < 0.25 {
        let mut other = rng.next_below(TOPICS);
        if other == topic {
            other = (other + 1) % TOPICS;
        }
        emit_topic(other, 1 + rng.next_below(2), rng, &mut tokens, labels_out);
    }
    for _ in 0..8 {
        tokens.push(format!("nz{}", alpha(rng.next_below(NOISE_TOKENS))));
    }
    rng.shuffle(&mut tokens);
    labels_out.sort_unstable();
    labels_out.dedup();
    *text_out = tokens.join(" ");
}

fn generate_split(n: usize, num_labels: usize, seed: u64) -> Dataset {
    let mut rng = SplitMix64::new(seed);
    let mut docs = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::new();
    let mut text = String::new();
    for _ in 0..n {
        generate_doc(&mut rng, &mut labels, &mut text);
        docs.push(text.clone());
        let pairs: Vec<(u32, f64)> = labels.iter().map(|&l| (l, 1.0)).collect();
        rows.push(SparseVec::from_pairs(pairs, num_labels).unwrap());
    }
    Dataset {
        docs,
        y: SparseMat::from_rows(rows, num_labels).unwrap(),
        label_texts: None,
    }
}

/// Label text: the label's identity words plus one topic word.
fn label_texts(num_labels: usize) -> Vec<String> {
    (0..num_labels)
        .map(|label| {
            let topic = label / LABELS_PER_TOPIC;
            let mut words: Vec<String> = label_identity(label)
                .iter()
                .map(|&w| ident_token(w))
                .collect();
            words.push(topic_token(topic, 0));
            words.join(" ")
        })
        .collect()
}

/// Word table for the text-embedding path: every topic gets a random unit
/// direction; its tokens sit near that direction.
fn word_table(seed: u64) -> WordEmbeddingTable {
    const DIM: usize = 16;
    let mut rng = SplitMix64::new(seed);
    let mut directions = Vec::with_capacity(TOPICS);
    for _ in 0..TOPICS {
        let mut v: Vec<f64> = (0..DIM).map(|_| rng.next_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        directions.push(v);
    }
    let mut table = WordEmbeddingTable::new(DIM);
    let insert_near = |token: String, topic: usize, rng: &mut SplitMix64, table: &mut WordEmbeddingTable| {
        let v: Vec<f64> = directions[topic]
            .iter()
            .map(|&d| d + 0.08 * rng.next_normal())
            .collect();
        table.insert(&token, v).unwrap();
    };
    for topic in 0..TOPICS {
        for j in 0..TOPIC_TOKENS {
            insert_near(topic_token(topic, j), topic, &mut rng, &mut table);
        }
    }
    // An identity word sits between the directions of every topic using it.
    for word in 0..GLOBAL_IDENT {
        let owners: Vec<usize> = (0..TOPICS)
            .filter(|&t| topic_ident_pool(t).contains(&word))
            .collect();
        if owners.is_empty() {
            continue;
        }
        let mut v = vec![0.0; DIM];
        for &t in &owners {
            for (slot, d) in v.iter_mut().zip(&directions[t]) {
                *slot += d / owners.len() as f64;
            }
        }
        for slot in v.iter_mut() {
            *slot += 0.08 * rng.next_normal();
        }
        table.insert(&ident_token(word), v).unwrap();
    }
    table
}

/// Build the desk-scale corpus, or load the real one when the environment
/// points at it.
pub fn desk_scale_data(n_train: usize, n_test: usize, seed: u64) -> (SyntheticXmc, bool) {
    if let (Ok(train_path), Ok(test_path)) = (
        std::env::var("XMC_EURLEX_TRAIN"),
        std::env::var("XMC_EURLEX_TEST"),
    ) {
        let train = xmc::load_dataset(&train_path).expect("XMC_EURLEX_TRAIN must parse");
        let test = xmc::load_dataset(&test_path).expect("XMC_EURLEX_TEST must parse");
        let num_labels = train.num_labels().max(test.num_labels());
        let synthetic = SyntheticXmc {
            train,
            test,
            num_labels,
            word_table: word_table(seed),
        };
        return (synthetic, true);
    }
    let num_labels = TOPICS * LABELS_PER_TOPIC;
    let mut train = generate_split(n_train, num_labels, seed);
    let test = generate_split(n_test, num_labels, seed ^ 0x5eed_0001);
    train.label_texts = Some(label_texts(num_labels));
    (
        SyntheticXmc {
            train,
            test,
            num_labels,
            word_table: word_table(seed ^ 0x5eed_0002),
        },
        false,
    )
}
