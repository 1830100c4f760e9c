use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::PipelineError;
use crate::ingest::{CountryTable, YearRange};
use crate::textprep::{default_stopwords, load_word_list, PrepConfig, StemmerKind, TextFields};
use crate::topics::LdaConfig;

/// Everything a run needs. Relative paths resolve against the directory of
/// the config file when loaded with [`RunConfig::load`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    /// Name of the run directory under `out_dir`; a timestamp when absent.
    pub run_name: Option<String>,
    /// Seed of every stochastic stage.
    pub seed: u64,
    /// Year slots as `"start-end"`.
    pub slices: Vec<String>,
    /// Restrict the run to these slot labels; all when empty.
    pub only_slices: Vec<String>,
    /// Run slots concurrently. Timing rows are then marked contended.
    pub parallel_slices: bool,
    pub prep: PrepSection,
    pub cluster: ClusterSection,
    pub topics: TopicSection,
    pub graphs: GraphSection,
    pub render: RenderSection,
    pub stages: Stages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepSection {
    pub min_token_len: usize,
    pub stopwords_file: Option<PathBuf>,
    pub unwanted_words: Vec<String>,
    pub unwanted_file: Option<PathBuf>,
    pub fields: TextFields,
    pub stemmer: StemmerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub k_min: usize,
    pub k_max: usize,
    /// Fixed k instead of the elbow choice.
    pub k: Option<usize>,
    pub restarts: usize,
    pub max_iter: usize,
    pub top_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicSection {
    /// Topic count; the slot's cluster count when absent.
    pub k: Option<usize>,
    /// `50 / K` when absent.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub top_words: usize,
    pub seed_words: BTreeMap<usize, Vec<(String, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    /// Minimum contribution share for the filtered networks.
    pub threshold: f64,
    pub country_table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSection {
    pub max_words: usize,
    pub width: f64,
    pub height: f64,
    pub frequency_top_n: usize,
    pub cluster_cloud_words: usize,
}

/// Which stages run. Reading and slicing the corpus always happens; every
/// stage that needs document text also needs `text`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stages {
    /// Tokenization and cleaning.
    pub text: bool,
    pub dtm_export: bool,
    pub trends: bool,
    pub word_cloud: bool,
    pub frequency: bool,
    pub authors: bool,
    pub countries: bool,
    pub elbow: bool,
    pub clusters: bool,
    pub topics: bool,
    pub cluster_clouds: bool,
    pub group_trends: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            out_dir: PathBuf::from("out"),
            run_name: None,
            seed: 42,
            slices: YearRange::default_slots().iter().map(|r| r.label()).collect(),
            only_slices: Vec::new(),
            parallel_slices: false,
            prep: PrepSection::default(),
            cluster: ClusterSection::default(),
            topics: TopicSection::default(),
            graphs: GraphSection::default(),
            render: RenderSection::default(),
            stages: Stages::default(),
        }
    }
}

impl Default for PrepSection {
    fn default() -> Self {
        PrepSection {
            min_token_len: 3,
            stopwords_file: None,
            unwanted_words: Vec::new(),
            unwanted_file: None,
            fields: TextFields::default(),
            stemmer: StemmerKind::Porter,
        }
    }
}

impl Default for ClusterSection {
    fn default() -> Self {
        ClusterSection {
            k_min: 1,
            k_max: 8,
            k: None,
            restarts: 10,
            max_iter: 300,
            top_terms: 5,
        }
    }
}

impl Default for TopicSection {
    fn default() -> Self {
        TopicSection {
            k: None,
            alpha: None,
            beta: 0.01,
            iterations: 2000,
            burn_in: 500,
            top_words: 10,
            seed_words: BTreeMap::new(),
        }
    }
}

impl Default for GraphSection {
    fn default() -> Self {
        GraphSection {
            threshold: 0.01,
            country_table: None,
        }
    }
}

impl Default for RenderSection {
    fn default() -> Self {
        RenderSection {
            max_words: 100,
            width: 800.0,
            height: 600.0,
            frequency_top_n: 200,
            cluster_cloud_words: 50,
        }
    }
}

impl Default for Stages {
    fn default() -> Self {
        Stages::all()
    }
}

impl Stages {
    pub fn all() -> Self {
        Stages {
            text: true,
            dtm_export: true,
            trends: true,
            word_cloud: true,
            frequency: true,
            authors: true,
            countries: true,
            elbow: true,
            clusters: true,
            topics: true,
            cluster_clouds: true,
            group_trends: true,
        }
    }

    pub fn none() -> Self {
        Stages {
            text: false,
            dtm_export: false,
            trends: false,
            word_cloud: false,
            frequency: false,
            authors: false,
            countries: false,
            elbow: false,
            clusters: false,
            topics: false,
            cluster_clouds: false,
            group_trends: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.inputs.iter_mut().for_each(fix);
        fix(&mut self.out_dir);
        if let Some(p) = self.prep.stopwords_file.as_mut() {
            fix(p);
        }
        if let Some(p) = self.prep.unwanted_file.as_mut() {
            fix(p);
        }
        if let Some(p) = self.graphs.country_table.as_mut() {
            fix(p);
        }
    }

    pub fn year_ranges(&self) -> Result<Vec<YearRange>, PipelineError> {
        self.slices
            .iter()
            .map(|s| s.parse::<YearRange>().map_err(|e| PipelineError::Config(format!("slice '{s}': {e}"))))
            .collect()
    }

    /// Checks everything that can be checked before touching the inputs.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.inputs.is_empty() {
            return bad("no input files".into());
        }
        let files = self
            .inputs
            .iter()
            .chain(&self.prep.stopwords_file)
            .chain(&self.prep.unwanted_file)
            .chain(&self.graphs.country_table);
        for p in files {
            if !p.is_file() {
                return bad(format!("file not found: {}", p.display()));
            }
        }
        let ranges = self.year_ranges()?;
        for label in &self.only_slices {
            if !ranges.iter().any(|r| &r.label() == label) {
                return bad(format!("--slice {label} is not a configured slot"));
            }
        }
        if self.prep.min_token_len == 0 {
            return bad("prep.min_token_len must be at least 1".into());
        }
        let c = &self.cluster;
        if c.k_min == 0 || c.k_min >= c.k_max {
            return bad(format!("cluster.k_min..k_max must satisfy 1 <= k_min < k_max, got {}..{}", c.k_min, c.k_max));
        }
        if c.k == Some(0) || self.topics.k == Some(0) {
            return bad("k must be at least 1".into());
        }
        if self.stages.clusters && !self.stages.elbow && c.k.is_none() {
            return bad("clusters need either the elbow stage or cluster.k".into());
        }
        if self.stages.topics && self.topics.k.is_none() && !self.stages.clusters {
            return bad("topics need topics.k or the clusters stage to choose K".into());
        }
        if !(0.0..1.0).contains(&self.graphs.threshold) {
            return bad(format!("graphs.threshold must lie in [0, 1), got {}", self.graphs.threshold));
        }
        if self.render.max_words == 0 || self.render.width <= 0.0 || self.render.height <= 0.0 {
            return bad("render.max_words, width and height must be positive".into());
        }
        let seeded = self.topics.seed_words.keys().next_back().map_or(1, |&t| t + 1);
        let k = self.topics.k.unwrap_or(seeded);
        self.lda_config(k).validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn prep_config(&self) -> Result<PrepConfig, PipelineError> {
        let io = |p: &Path, e: crate::textprep::PrepError| PipelineError::Config(format!("{}: {e}", p.display()));
        let stop = match &self.prep.stopwords_file {
            Some(p) => load_word_list(p).map_err(|e| io(p, e))?,
            None => default_stopwords(),
        };
        let mut unwanted: Vec<String> = self.prep.unwanted_words.clone();
        if let Some(p) = &self.prep.unwanted_file {
            unwanted.extend(load_word_list(p).map_err(|e| io(p, e))?);
        }
        let mut cfg = PrepConfig::default()
            .with_min_token_len(self.prep.min_token_len)
            .map_err(|e| PipelineError::Config(e.to_string()))?
            .with_stopwords(stop)
            .with_unwanted(unwanted)
            .with_fields(self.prep.fields);
        cfg.stemmer = self.prep.stemmer;
        Ok(cfg)
    }

    pub fn lda_config(&self, k: usize) -> LdaConfig {
        let t = &self.topics;
        let mut cfg = LdaConfig::new(k).with_seed(self.seed).with_iterations(t.iterations, t.burn_in);
        if let Some(a) = t.alpha {
            cfg.alpha = a;
        }
        cfg.beta = t.beta;
        cfg.seed_words = t.seed_words.clone();
        cfg
    }

    pub fn country_table(&self) -> Result<CountryTable, PipelineError> {
        match &self.graphs.country_table {
            Some(p) => CountryTable::load(p).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display()))),
            None => Ok(CountryTable::bundled()),
        }
    }
}
