//! LDA topic models fit by collapsed Gibbs sampling.
//!
//! The sampler integrates out the topic-word and document-topic
//! distributions and resamples each token's topic from
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + α) (n_kw + β_kw) / (n_k + Σ_w β_kw)
//! ```
//!
//! where seed words raise `β_kw` for their topic. Estimates of both
//! distributions are read from the counts of the last sweep.

mod gibbs;
mod table;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

use crate::textprep::{DocumentTermMatrix, Vocabulary};

pub use gibbs::SamplerState;
pub(crate) use table::render_grid;
pub use table::WordTable;

#[derive(Debug, Error, PartialEq)]
pub enum TopicError {
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("{k} topics exceed a vocabulary of {v} terms")]
    KExceedsVocabulary { k: usize, v: usize },
    #[error("invalid LDA configuration: {0}")]
    InvalidConfig(String),
    #[error("document {doc} out of range ({n_docs} documents)")]
    DocOutOfRange { doc: usize, n_docs: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Topic id to `(stem, extra prior weight)` pairs.
    #[serde(default)]
    pub seed_words: BTreeMap<usize, Vec<(String, f64)>>,
}

impl LdaConfig {
    /// `alpha = 50 / k`, `beta = 0.01`, 2000 sweeps of which 500 burn-in.
    pub fn new(k: usize) -> Self {
        LdaConfig {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 2000,
            burn_in: 500,
            seed: 0,
            seed_words: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iterations(mut self, iterations: usize, burn_in: usize) -> Self {
        self.iterations = iterations;
        self.burn_in = burn_in;
        self
    }

    pub fn with_seed_word(mut self, topic: usize, stem: &str, weight: f64) -> Self {
        self.seed_words.entry(topic).or_default().push((stem.to_owned(), weight));
        self
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        let bad = |msg: String| Err(TopicError::InvalidConfig(msg));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.burn_in >= self.iterations {
            return bad(format!("burn_in {} must be below iterations {}", self.burn_in, self.iterations));
        }
        for (&topic, words) in &self.seed_words {
            if topic >= self.k {
                return bad(format!("seed topic {topic} out of range"));
            }
            if let Some((w, x)) = words.iter().find(|(_, x)| !(*x > 0.0)) {
                return bad(format!("seed weight for '{w}' must be positive, got {x}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    /// `K x V` topic-word probabilities.
    pub phi: Vec<Vec<f64>>,
    /// `D x K` document-topic probabilities.
    pub theta: Vec<Vec<f64>>,
    /// Final topic of every token, per document.
    pub z: Vec<Vec<usize>>,
    /// Joint log-likelihood after each sweep.
    pub log_likelihood_trace: Vec<f64>,
    pub burn_in: usize,
    /// Seed stems not found in the vocabulary.
    pub unknown_seed_words: Vec<String>,
}

impl TopicModel {
    pub fn n_docs(&self) -> usize {
        self.theta.len()
    }

    /// `doc_id,topic_0,...,topic_{K-1}`.
    pub fn theta_csv(&self) -> String {
        let mut out = String::from("doc_id");
        for k in 0..self.k {
            let _ = write!(out, ",topic_{k}");
        }
        out.push('\n');
        for (d, row) in self.theta.iter().enumerate() {
            let _ = write!(out, "{d}");
            for p in row {
                let _ = write!(out, ",{p}");
            }
            out.push('\n');
        }
        out
    }
}

/// Fits LDA to `dtm`. See [`lda_fit_with_observer`].
pub fn lda_fit(dtm: &DocumentTermMatrix, vocab: &Vocabulary, config: &LdaConfig) -> Result<TopicModel, TopicError> {
    lda_fit_with_observer(dtm, vocab, config, |_, _| {})
}

/// Fits LDA, calling `observe(sweep, state)` after every sweep.
///
/// Initial topics are drawn uniformly from ChaCha8 seeded with
/// `config.seed`; the same stream then drives every sweep.
pub fn lda_fit_with_observer<F>(
    dtm: &DocumentTermMatrix,
    vocab: &Vocabulary,
    config: &LdaConfig,
    mut observe: F,
) -> Result<TopicModel, TopicError>
where
    F: FnMut(usize, &SamplerState),
{
    config.validate()?;
    if dtm.total_count() == 0 {
        return Err(TopicError::EmptyCorpus);
    }
    if config.k > dtm.n_terms() {
        return Err(TopicError::KExceedsVocabulary {
            k: config.k,
            v: dtm.n_terms(),
        });
    }
    let mut beta = vec![vec![config.beta; dtm.n_terms()]; config.k];
    let mut unknown = Vec::new();
    for (&topic, words) in &config.seed_words {
        for (stem, weight) in words {
            match vocab.id(stem) {
                Some(w) if w < dtm.n_terms() => beta[topic][w] += weight,
                _ => unknown.push(stem.clone()),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = SamplerState::random(dtm, config.alpha, beta, &mut rng);
    let mut trace = Vec::with_capacity(config.iterations);
    for it in 0..config.iterations {
        state.sweep(&mut rng);
        trace.push(state.log_likelihood());
        observe(it, &state);
    }
    Ok(TopicModel {
        k: config.k,
        phi: state.phi(),
        theta: state.theta(),
        z: state.assignments().to_vec(),
        log_likelihood_trace: trace,
        burn_in: config.burn_in,
        unknown_seed_words: unknown,
    })
}

/// The `n` most probable words of each topic, descending, ties in
/// vocabulary order.
pub fn topic_top_words(model: &TopicModel, vocab: &Vocabulary, n: usize) -> Vec<Vec<(String, f64)>> {
    model
        .phi
        .iter()
        .map(|row| {
            let mut ids: Vec<usize> = (0..row.len()).collect();
            ids.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            ids.into_iter().take(n).map(|w| (vocab.term(w).to_owned(), row[w])).collect()
        })
        .collect()
}

/// Argmax of a document's topic mixture, ties to the lowest topic.
pub fn dominant_topic(model: &TopicModel, doc: usize) -> Result<usize, TopicError> {
    let row = model.theta.get(doc).ok_or(TopicError::DocOutOfRange {
        doc,
        n_docs: model.n_docs(),
    })?;
    Ok(argmax(row))
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic: usize,
    pub top_words: Vec<(String, f64)>,
    pub documents: usize,
}

/// JSON topic report: per topic its top words and how many documents it
/// dominates.
pub fn topic_report_json(model: &TopicModel, vocab: &Vocabulary, n: usize) -> String {
    let mut docs = vec![0usize; model.k];
    for row in &model.theta {
        docs[argmax(row)] += 1;
    }
    let topics: Vec<TopicSummary> = topic_top_words(model, vocab, n)
        .into_iter()
        .enumerate()
        .map(|(topic, top_words)| TopicSummary {
            topic,
            top_words,
            documents: docs[topic],
        })
        .collect();
    serde_json::to_string_pretty(&topics).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{build_dtm, TokenDoc};

    fn corpus(docs: &[&str]) -> (Vocabulary, DocumentTermMatrix) {
        let docs: Vec<TokenDoc> = docs
            .iter()
            .enumerate()
            .map(|(i, d)| TokenDoc {
                doc_id: i,
                year: 2000,
                stems: d.split_whitespace().map(String::from).collect(),
            })
            .collect();
        build_dtm(&docs)
    }

    fn quick(k: usize) -> LdaConfig {
        LdaConfig::new(k).with_iterations(50, 10).with_seed(3)
    }

    #[test]
    fn one_topic_is_smoothed_unigram() {
        let (v, m) = corpus(&["a a b"]);
        let model = lda_fit(&m, &v, &quick(1)).unwrap();
        assert_eq!(model.theta, vec![vec![1.0]]);
        let denom = 3.0 + 2.0 * 0.01;
        assert!((model.phi[0][0] - 2.01 / denom).abs() < 1e-12);
        let top = topic_top_words(&model, &v, 5);
        assert_eq!(top[0].iter().map(|p| p.0.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn identical_single_word_documents() {
        // V = 1 forces K = 1
        let (v, m) = corpus(&["w", "w", "w", "w"]);
        let model = lda_fit(&m, &v, &LdaConfig::new(1).with_iterations(20, 5)).unwrap();
        assert!(model.theta.windows(2).all(|p| p[0] == p[1]));
        assert!(model.phi[0][0] > 0.99);
    }

    #[test]
    fn dominant_topic_rules() {
        let model = TopicModel {
            k: 3,
            phi: vec![],
            theta: vec![vec![0.6, 0.3, 0.1], vec![1.0 / 3.0; 3]],
            z: vec![],
            log_likelihood_trace: vec![],
            burn_in: 0,
            unknown_seed_words: vec![],
        };
        assert_eq!(dominant_topic(&model, 0), Ok(0));
        assert_eq!(dominant_topic(&model, 1), Ok(0));
        assert_eq!(dominant_topic(&model, 2), Err(TopicError::DocOutOfRange { doc: 2, n_docs: 2 }));
    }

    #[test]
    fn config_validation() {
        let (v, m) = corpus(&["a b"]);
        assert!(matches!(lda_fit(&m, &v, &quick(3)), Err(TopicError::KExceedsVocabulary { k: 3, v: 2 })));
        let (ve, me) = corpus(&[""]);
        assert_eq!(lda_fit(&me, &ve, &quick(1)), Err(TopicError::EmptyCorpus));
        let mut c = quick(1);
        c.burn_in = 50;
        assert!(matches!(c.validate(), Err(TopicError::InvalidConfig(_))));
        assert!(quick(1).with_seed_word(0, "a", 0.0).validate().is_err());
        assert!(quick(1).with_seed_word(1, "a", 1.0).validate().is_err());
        assert!(LdaConfig::new(0).validate().is_err());
    }

    #[test]
    fn unknown_seed_words_are_reported() {
        let (v, m) = corpus(&["a b", "b c"]);
        let model = lda_fit(&m, &v, &quick(2).with_seed_word(0, "zzz", 1.0).with_seed_word(1, "a", 2.0)).unwrap();
        assert_eq!(model.unknown_seed_words, vec!["zzz".to_string()]);
    }

    #[test]
    fn same_seed_same_model() {
        let (v, m) = corpus(&["a b c a", "c d e", "a e e b"]);
        assert_eq!(lda_fit(&m, &v, &quick(2)).unwrap(), lda_fit(&m, &v, &quick(2)).unwrap());
    }

    #[test]
    fn theta_csv_layout() {
        let (v, m) = corpus(&["a b"]);
        let model = lda_fit(&m, &v, &quick(2)).unwrap();
        let csv = model.theta_csv();
        assert!(csv.starts_with("doc_id,topic_0,topic_1\n0,"));
        assert_eq!(csv.lines().count(), 2);
    }
}
