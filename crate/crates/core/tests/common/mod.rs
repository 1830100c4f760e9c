//! Synthetic data shared by the integration tests.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use scitrend::cluster::FeatureMatrix;
use scitrend::textprep::{build_dtm, DocumentTermMatrix, TokenDoc, Vocabulary};

pub const LEXICONS: [[&str; 10]; 3] = [
    ["alpha", "bravo", "charli", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet"],
    ["kilo", "lima", "mike", "novemb", "oscar", "papa", "quebec", "romeo", "sierra", "tango"],
    ["uniform", "victor", "whiskei", "xrai", "yanke", "zulu", "amber", "basalt", "cobalt", "dune"],
];

pub struct Recovery {
    pub vocab: Vocabulary,
    pub dtm: DocumentTermMatrix,
    /// Generating lexicon of each document.
    pub labels: Vec<usize>,
}

/// 100 documents of 50 tokens. Each document has a primary lexicon
/// (round-robin) and draws 90% of its tokens from it, the rest from the
/// other two.
pub fn recovery_corpus(seed: u64) -> Recovery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for d in 0..100 {
        let topic = d % 3;
        let stems = (0..50)
            .map(|_| {
                let lex = if rng.random::<f64>() < 0.9 {
                    topic
                } else {
                    (topic + rng.random_range(1..3)) % 3
                };
                LEXICONS[lex].choose(&mut rng).unwrap().to_string()
            })
            .collect();
        docs.push(TokenDoc {
            doc_id: d,
            year: 2011 + (d % 7) as i32,
            stems,
        });
        labels.push(topic);
    }
    let (vocab, dtm) = build_dtm(&docs);
    Recovery { vocab, dtm, labels }
}

/// 90 points in three Gaussian blobs of 30 (spread 1) whose centres are 20
/// apart, in 5 dimensions. Returns the matrix and generating labels.
pub fn three_blobs(seed: u64) -> (FeatureMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let centres = [
        [20.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 20.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 20.0, 0.0, 0.0],
    ];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, centre) in centres.iter().enumerate() {
        for _ in 0..30 {
            rows.push(centre.iter().map(|&x| x + noise.sample(&mut rng)).collect::<Vec<f64>>());
            labels.push(c);
        }
    }
    (FeatureMatrix::from_dense(&rows), labels)
}

/// Fraction of items whose predicted label equals the true one under the
/// best relabelling of predicted ids.
pub fn best_relabelled_accuracy(truth: &[usize], predicted: &[usize], k: usize) -> f64 {
    let mut best = 0;
    for perm in permutations(k) {
        let hits = truth.iter().zip(predicted).filter(|(&t, &p)| perm[p] == t).count();
        best = best.max(hits);
    }
    best as f64 / truth.len() as f64
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Random token documents over a vocabulary of `v` synthetic stems.
pub fn random_docs(rng: &mut ChaCha8Rng, n_docs: usize, v: usize, max_len: usize) -> Vec<TokenDoc> {
    (0..n_docs)
        .map(|d| {
            let len = rng.random_range(0..=max_len);
            TokenDoc {
                doc_id: d,
                year: 1961 + rng.random_range(0..57),
                stems: (0..len).map(|_| format!("w{:03}", rng.random_range(0..v))).collect(),
            }
        })
        .collect()
}

/// Nested-loop term counts per document, keyed by stem.
pub fn count_oracle(docs: &[TokenDoc]) -> Vec<std::collections::BTreeMap<String, u32>> {
    docs.iter()
        .map(|d| {
            let mut m = std::collections::BTreeMap::new();
            for s in &d.stems {
                let mut c = 0;
                for t in &d.stems {
                    if t == s {
                        c += 1;
                    }
                }
                m.insert(s.clone(), c);
            }
            m
        })
        .collect()
}

pub type NodeCounts = std::collections::BTreeMap<String, u64>;
pub type PairCounts = std::collections::BTreeMap<(String, String), u64>;

/// All-pairs co-occurrence counting over entity sets, keyed by label.
pub fn pair_oracle<S: AsRef<str>>(docs: &[Vec<S>]) -> (NodeCounts, PairCounts) {
    use std::collections::BTreeSet;
    let sets: Vec<BTreeSet<&str>> = docs.iter().map(|d| d.iter().map(AsRef::as_ref).collect()).collect();
    let labels: BTreeSet<&str> = sets.iter().flatten().copied().collect();
    let mut nodes = NodeCounts::new();
    let mut edges = PairCounts::new();
    for a in &labels {
        nodes.insert(a.to_string(), sets.iter().filter(|s| s.contains(a)).count() as u64);
        for b in &labels {
            if a < b {
                let both = sets.iter().filter(|s| s.contains(a) && s.contains(b)).count() as u64;
                if both > 0 {
                    edges.insert((a.to_string(), b.to_string()), both);
                }
            }
        }
    }
    (nodes, edges)
}
