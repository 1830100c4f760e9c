use rand::Rng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::textprep::DocumentTermMatrix;

/// Count tables of a collapsed Gibbs chain.
///
/// Tokens are laid out document by document, and within a document by term
/// id, one token per unit of count. `z[d][i]` is the topic of the `i`-th token
/// of document `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    k: usize,
    alpha: f64,
    /// `K x V` topic-word prior, symmetric beta plus any seed weights.
    beta: Vec<Vec<f64>>,
    beta_sum: Vec<f64>,
    words: Vec<Vec<usize>>,
    z: Vec<Vec<usize>>,
    n_dk: Vec<Vec<u32>>,
    n_kw: Vec<Vec<u32>>,
    n_k: Vec<u64>,
}

fn doc_tokens(dtm: &DocumentTermMatrix) -> Vec<Vec<usize>> {
    (0..dtm.n_docs())
        .map(|d| {
            dtm.row(d)
                .flat_map(|(t, c)| std::iter::repeat_n(t, c as usize))
                .collect()
        })
        .collect()
}

impl SamplerState {
    /// Builds counts from explicit assignments. `beta` is the full `K x V`
    /// prior.
    pub fn from_assignments(dtm: &DocumentTermMatrix, alpha: f64, beta: Vec<Vec<f64>>, z: Vec<Vec<usize>>) -> Self {
        let k = beta.len();
        let v = dtm.n_terms();
        let words = doc_tokens(dtm);
        assert_eq!(words.len(), z.len(), "one assignment list per document");
        let mut n_dk = vec![vec![0u32; k]; words.len()];
        let mut n_kw = vec![vec![0u32; v]; k];
        let mut n_k = vec![0u64; k];
        for (d, (ws, zs)) in words.iter().zip(&z).enumerate() {
            assert_eq!(ws.len(), zs.len(), "document {d}: one topic per token");
            for (&w, &t) in ws.iter().zip(zs) {
                n_dk[d][t] += 1;
                n_kw[t][w] += 1;
                n_k[t] += 1;
            }
        }
        let beta_sum = beta.iter().map(|row| row.iter().sum()).collect();
        SamplerState {
            k,
            alpha,
            beta,
            beta_sum,
            words,
            z,
            n_dk,
            n_kw,
            n_k,
        }
    }

    pub(super) fn random(dtm: &DocumentTermMatrix, alpha: f64, beta: Vec<Vec<f64>>, rng: &mut ChaCha8Rng) -> Self {
        let k = beta.len();
        let z = doc_tokens(dtm)
            .iter()
            .map(|ws| ws.iter().map(|_| rng.random_range(0..k)).collect())
            .collect();
        Self::from_assignments(dtm, alpha, beta, z)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_docs(&self) -> usize {
        self.words.len()
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.z
    }

    pub fn doc_topic_counts(&self) -> &[Vec<u32>] {
        &self.n_dk
    }

    pub fn topic_word_counts(&self) -> &[Vec<u32>] {
        &self.n_kw
    }

    pub fn topic_counts(&self) -> &[u64] {
        &self.n_k
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.words[d].len()
    }

    /// Both marginal identities of the count tables:
    /// `sum_k n_dk = |doc d|` and `sum_w n_kw = n_k`.
    pub fn counts_conserved(&self) -> bool {
        let docs = self
            .n_dk
            .iter()
            .zip(&self.words)
            .all(|(row, ws)| row.iter().map(|&c| c as usize).sum::<usize>() == ws.len());
        let topics = self
            .n_kw
            .iter()
            .zip(&self.n_k)
            .all(|(row, &nk)| row.iter().map(|&c| c as u64).sum::<u64>() == nk);
        docs && topics
    }

    /// One full sweep over all tokens in layout order.
    pub(super) fn sweep(&mut self, rng: &mut ChaCha8Rng) {
        let mut p = vec![0.0; self.k];
        for d in 0..self.words.len() {
            for i in 0..self.words[d].len() {
                let w = self.words[d][i];
                let old = self.z[d][i];
                self.n_dk[d][old] -= 1;
                self.n_kw[old][w] -= 1;
                self.n_k[old] -= 1;

                let mut total = 0.0;
                for (t, slot) in p.iter_mut().enumerate() {
                    let val = (self.n_dk[d][t] as f64 + self.alpha) * (self.n_kw[t][w] as f64 + self.beta[t][w])
                        / (self.n_k[t] as f64 + self.beta_sum[t]);
                    total += val;
                    *slot = total;
                }
                let u = rng.random::<f64>() * total;
                let new = p.iter().position(|&c| u < c).unwrap_or(self.k - 1);

                self.z[d][i] = new;
                self.n_dk[d][new] += 1;
                self.n_kw[new][w] += 1;
                self.n_k[new] += 1;
            }
        }
    }

    /// Joint `log p(w, z | alpha, beta)` with topic-word and doc-topic
    /// distributions integrated out.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.k as f64;
        let mut ll = 0.0;
        for t in 0..self.k {
            ll += ln_gamma(self.beta_sum[t]) - ln_gamma(self.n_k[t] as f64 + self.beta_sum[t]);
            for (w, &n) in self.n_kw[t].iter().enumerate() {
                if n > 0 {
                    let b = self.beta[t][w];
                    ll += ln_gamma(n as f64 + b) - ln_gamma(b);
                }
            }
        }
        let doc_const = ln_gamma(k * self.alpha);
        let lg_alpha = ln_gamma(self.alpha);
        for (row, ws) in self.n_dk.iter().zip(&self.words) {
            ll += doc_const - ln_gamma(ws.len() as f64 + k * self.alpha);
            for &n in row {
                if n > 0 {
                    ll += ln_gamma(n as f64 + self.alpha) - lg_alpha;
                }
            }
        }
        ll
    }

    /// `K x V` smoothed topic-word probabilities.
    pub fn phi(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|t| {
                let denom = self.n_k[t] as f64 + self.beta_sum[t];
                self.n_kw[t]
                    .iter()
                    .zip(&self.beta[t])
                    .map(|(&n, &b)| (n as f64 + b) / denom)
                    .collect()
            })
            .collect()
    }

    /// `D x K` smoothed document-topic probabilities.
    pub fn theta(&self) -> Vec<Vec<f64>> {
        let k = self.k as f64;
        self.n_dk
            .iter()
            .zip(&self.words)
            .map(|(row, ws)| {
                let denom = ws.len() as f64 + k * self.alpha;
                row.iter().map(|&n| (n as f64 + self.alpha) / denom).collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dtm(rows: &[&[(usize, u32)]], v: usize) -> DocumentTermMatrix {
        DocumentTermMatrix::from_rows(rows.iter().map(|r| (2000, r.to_vec())).collect(), v)
    }

    #[test]
    fn single_token_single_topic_is_zero() {
        let m = dtm(&[&[(0, 1)]], 1);
        let s = SamplerState::from_assignments(&m, 0.7, vec![vec![0.01]], vec![vec![0]]);
        assert!(s.log_likelihood().abs() < 1e-12);
    }

    #[test]
    fn single_token_two_topics() {
        // p(z) = alpha / (2 alpha) = 1/2, p(w | z) = 1 with V = 1
        let m = dtm(&[&[(0, 1)]], 1);
        let s = SamplerState::from_assignments(&m, 0.3, vec![vec![0.05], vec![0.05]], vec![vec![1]]);
        assert!((s.log_likelihood() + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn two_tokens_same_topic() {
        // p(z1 = z2 = 0) = (alpha / 2alpha) * ((alpha + 1) / (2alpha + 1))
        let alpha = 0.4;
        let m = dtm(&[&[(0, 2)]], 1);
        let s = SamplerState::from_assignments(&m, alpha, vec![vec![0.1], vec![0.1]], vec![vec![0, 0]]);
        let expected = ((alpha + 1.0) / (2.0 * (2.0 * alpha + 1.0))).ln();
        assert!((s.log_likelihood() - expected).abs() < 1e-12);
    }

    #[test]
    fn estimates_are_normalized() {
        let m = dtm(&[&[(0, 2), (2, 1)], &[(1, 3)], &[]], 3);
        let s = SamplerState::from_assignments(&m, 0.5, vec![vec![0.01; 3]; 2], vec![vec![0, 1, 1], vec![0, 0, 1], vec![]]);
        assert!(s.counts_conserved());
        for row in s.phi().iter().chain(s.theta().iter()) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(s.theta()[2], vec![0.5, 0.5]);
    }
}
