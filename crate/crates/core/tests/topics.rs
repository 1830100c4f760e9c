mod common;

use std::collections::HashSet;

use common::{recovery_corpus, LEXICONS};
use scitrend::cluster::{kmeans, tfidf, KMeansOptions};
use scitrend::topics::{dominant_topic, lda_fit, lda_fit_with_observer, topic_top_words, LdaConfig};

fn fitted(seed_words: &[(usize, &str, f64)]) -> (common::Recovery, scitrend::topics::TopicModel) {
    let corpus = recovery_corpus(11);
    let mut cfg = LdaConfig::new(3).with_seed(5);
    for &(t, w, x) in seed_words {
        cfg = cfg.with_seed_word(t, w, x);
    }
    let model = lda_fit(&corpus.dtm, &corpus.vocab, &cfg).unwrap();
    (corpus, model)
}

/// For each lexicon, the topic whose top-10 words overlap it most, and that
/// overlap.
fn match_lexicons(top: &[Vec<(String, f64)>]) -> Vec<(usize, usize)> {
    LEXICONS
        .iter()
        .map(|lex| {
            let lex: HashSet<&str> = lex.iter().copied().collect();
            top.iter()
                .enumerate()
                .map(|(t, words)| (t, words.iter().filter(|w| lex.contains(w.0.as_str())).count()))
                .max_by_key(|&(t, n)| (n, std::cmp::Reverse(t)))
                .unwrap()
        })
        .collect()
}

#[test]
fn recovers_generating_lexicons() {
    let (corpus, model) = fitted(&[]);
    let top = topic_top_words(&model, &corpus.vocab, 10);
    let matched = match_lexicons(&top);
    for (lex, &(topic, overlap)) in matched.iter().enumerate() {
        assert!(overlap >= 8, "lexicon {lex}: topic {topic} overlaps {overlap}/10");
    }
    let topic_of: Vec<usize> = matched.iter().map(|m| m.0).collect();
    let hits = corpus
        .labels
        .iter()
        .enumerate()
        .filter(|&(d, &lex)| dominant_topic(&model, d).unwrap() == topic_of[lex])
        .count();
    assert!(hits >= 95, "{hits}/100 documents");
}

#[test]
fn distributions_normalized_and_counts_conserved() {
    let corpus = recovery_corpus(11);
    let cfg = LdaConfig::new(3).with_seed(5).with_iterations(300, 100);
    let mut sweeps = 0;
    let model = lda_fit_with_observer(&corpus.dtm, &corpus.vocab, &cfg, |_, state| {
        assert!(state.counts_conserved());
        sweeps += 1;
    })
    .unwrap();
    assert_eq!(sweeps, 300);
    for row in model.phi.iter().chain(model.theta.iter()) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(row.iter().all(|&p| p > 0.0));
    }
}

#[test]
fn likelihood_plateaus_upward() {
    let (_, model) = fitted(&[]);
    let trace = &model.log_likelihood_trace;
    assert_eq!(trace.len(), 2000);
    assert!(trace.iter().all(|x| x.is_finite()));
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    assert!(mean(&trace[trace.len() - 100..]) >= mean(&trace[..100]));
}

#[test]
fn seeding_never_lowers_seeded_probability() {
    let (corpus, base) = fitted(&[]);
    let top = topic_top_words(&base, &corpus.vocab, 10);
    let (topic, _) = match_lexicons(&top)[1];
    for word in ["kilo", "papa", "tango"] {
        let (_, seeded) = fitted(&[(topic, word, 2.0)]);
        let w = corpus.vocab.id(word).unwrap();
        assert!(seeded.phi[topic][w] >= base.phi[topic][w], "{word}");
    }
}

#[test]
fn mixtures_versus_hard_partition() {
    let (corpus, model) = fitted(&[]);
    let second_largest = |row: &[f64]| {
        let mut r = row.to_vec();
        r.sort_by(|a, b| b.total_cmp(a));
        r[1]
    };
    assert!(model.theta.iter().any(|row| second_largest(row) > 0.05));
    let km = kmeans(&tfidf(&corpus.dtm).unwrap(), 3, 5, KMeansOptions::default()).unwrap();
    assert_eq!(km.assignment.len(), corpus.dtm.n_docs());
    assert!(km.assignment.iter().all(|&c| c < 3));
}
