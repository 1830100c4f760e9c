//! End-to-end runs: configuration, per-slot stage execution, artifact
//! files with a checksummed manifest, and the stage timing report.

mod config;
mod timing;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::convert::Infallible;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub use config::{ClusterSection, GraphSection, PrepSection, RenderSection, RunConfig, Stages, TopicSection};
pub use timing::{stage, StageClock, StageTiming, StageTimingReport, TimingError, TimingRow, ALL_COLUMN};

use crate::cluster::{
    cluster_top_terms, elbow_curve, kmeans, tfidf, ClusterModel, ClusterReport, ElbowCurve, KMeansOptions,
    WeightedMatrix,
};
use crate::graphs::{
    author_graph, build_from_entities, centrality_csv, country_graph, degree_centrality, filter_by_contribution,
    CoOccurrenceGraph, EntityKind,
};
use crate::ingest::{
    diagnostics_to_jsonl, merge_and_dedup, parse_bibtex, partition_by_year, CountryTable, Diagnostic, Shard,
    YearSlice,
};
use crate::render::{emit_chart_data, emit_svg, layout_cloud, Canvas, ChartData, CloudStyle};
use crate::textprep::{build_dtm, clean_tokens, tokenize_records, DocumentTermMatrix, PrepConfig, Vocabulary};
use crate::topics::{dominant_topic, lda_fit, topic_report_json, topic_top_words, TopicModel, WordTable};
use crate::trends::{group_year_trend, top_terms, top_terms_in, year_histogram, YearSeries};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage '{stage}' failed in slot {slice}: {reason}")]
    StageFailed { stage: String, slice: String, reason: String },
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    }
}

/// One file written by a run. Paths are relative to the run directory and
/// use `/`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// False for files holding clock readings.
    pub deterministic: bool,
}

/// A stage that was enabled but could not run for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub slice: String,
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub label: String,
    pub documents: usize,
    pub vocabulary: Option<usize>,
    pub clusters: Option<usize>,
    pub topics: Option<usize>,
}

/// `manifest.json`: lists every other file of the run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_name: String,
    pub config: RunConfig,
    /// Seed used by each stochastic stage.
    pub seeds: BTreeMap<String, u64>,
    pub slices: Vec<SliceSummary>,
    pub artifacts: Vec<ArtifactEntry>,
    pub skipped: Vec<Skipped>,
    pub failed: Option<String>,
}

impl Manifest {
    pub fn load(run_dir: &Path) -> Result<Self, PipelineError> {
        let path = run_dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }

    pub fn artifact(&self, path: &str) -> Option<&ArtifactEntry> {
        self.artifacts.iter().find(|a| a.path == path)
    }

    /// Path to checksum of every deterministic artifact.
    pub fn deterministic_checksums(&self) -> BTreeMap<&str, &str> {
        self.artifacts
            .iter()
            .filter(|a| a.deterministic)
            .map(|a| (a.path.as_str(), a.sha256.as_str()))
            .collect()
    }
}

pub const MANIFEST: &str = "manifest.json";
pub const FAILED_MARKER: &str = "FAILED";
pub const TIMING_CSV: &str = "timing.csv";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub manifest: Manifest,
    pub timing: StageTimingReport,
}

struct ArtifactWriter {
    root: PathBuf,
    entries: Vec<ArtifactEntry>,
}

impl ArtifactWriter {
    fn write(&mut self, rel: &str, data: &[u8], deterministic: bool) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        std::fs::write(&path, data).map_err(io_err(&path))?;
        self.entries.push(ArtifactEntry {
            path: rel.to_owned(),
            sha256: hex::encode(Sha256::digest(data)),
            bytes: data.len() as u64,
            deterministic,
        });
        Ok(())
    }
}

fn create_run_dir(cfg: &RunConfig) -> Result<(String, PathBuf), PipelineError> {
    let base = cfg
        .run_name
        .clone()
        .unwrap_or_else(|| chrono::Local::now().format("run-%Y%m%d-%H%M%S").to_string());
    std::fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let mut name = base.clone();
    let mut n = 1;
    loop {
        let dir = cfg.out_dir.join(&name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok((name, dir)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                n += 1;
                name = format!("{base}-{n}");
            }
            Err(e) => return Err(io_err(&dir)(e)),
        }
    }
}

/// Executes every enabled stage on every configured year slot and writes
/// the results under a fresh directory in `cfg.out_dir`.
///
/// On a stage error the files produced so far stay on disk next to a
/// `FAILED` marker naming the stage, and the error is returned.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    cfg.validate()?;
    let prep = cfg.prep_config()?;
    let countries = cfg.country_table()?;
    let (run_name, run_dir) = create_run_dir(cfg)?;
    let mut writer = ArtifactWriter {
        root: run_dir.clone(),
        entries: Vec::new(),
    };
    let mut state = RunState::default();
    let result = execute(cfg, &prep, &countries, &mut writer, &mut state);
    let failed = result.as_ref().err().map(ToString::to_string);
    if let Some(msg) = &failed {
        writer.write(FAILED_MARKER, format!("{msg}\n").as_bytes(), true)?;
    }
    let manifest = Manifest {
        run_name,
        config: cfg.clone(),
        seeds: state.seeds,
        slices: state.slices,
        artifacts: writer.entries,
        skipped: state.skipped,
        failed,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = run_dir.join(MANIFEST);
    std::fs::write(&path, json + "\n").map_err(io_err(&path))?;
    result?;
    Ok(RunOutcome {
        run_dir,
        manifest,
        timing: state.timing.expect("timing is set on success"),
    })
}

#[derive(Default)]
struct RunState {
    seeds: BTreeMap<String, u64>,
    slices: Vec<SliceSummary>,
    skipped: Vec<Skipped>,
    timing: Option<StageTimingReport>,
}

#[derive(Serialize)]
struct CorpusSummary<'a> {
    records: usize,
    duplicates_dropped: usize,
    diagnostics: usize,
    shards: &'a [String],
    slices: Vec<(String, usize)>,
    unsliced: usize,
}

fn execute(
    cfg: &RunConfig,
    prep: &PrepConfig,
    countries: &CountryTable,
    writer: &mut ArtifactWriter,
    state: &mut RunState,
) -> Result<(), PipelineError> {
    writer.write("config.toml", cfg.to_toml().as_bytes(), true)?;
    let ranges = cfg.year_ranges()?;
    let selected: Vec<String> = ranges
        .iter()
        .map(|r| r.label())
        .filter(|l| cfg.only_slices.is_empty() || cfg.only_slices.contains(l))
        .collect();
    let mut report = StageTimingReport::new(&selected);
    report.contended = cfg.parallel_slices;

    let clock = StageClock::new();
    let (ingested, t) = clock.time(stage::CORPUS, || ingest(cfg, &ranges))?;
    report.set(stage::CORPUS, ALL_COLUMN, t.wall_s);
    let (partition, corpus, diagnostics) = ingested?;
    writer.write("diagnostics.jsonl", diagnostics_to_jsonl(&diagnostics).as_bytes(), true)?;
    let summary = CorpusSummary {
        records: corpus.records.len(),
        duplicates_dropped: corpus.dedup_count,
        diagnostics: diagnostics.len(),
        shards: &corpus.provenance,
        slices: partition.slices.iter().map(|s| (s.label.clone(), s.records.len())).collect(),
        unsliced: partition.unsliced_count(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    writer.write("corpus_summary.json", (json + "\n").as_bytes(), true)?;

    let slices: Vec<&YearSlice> = partition.slices.iter().filter(|s| selected.contains(&s.label)).collect();
    let work = |s: &&YearSlice| run_slice(cfg, s, prep, countries);
    let runs: Vec<SliceRun> = if cfg.parallel_slices {
        slices.par_iter().map(work).collect()
    } else {
        let mut out = Vec::new();
        for s in &slices {
            let r = work(s);
            let failed = r.error.is_some();
            out.push(r);
            if failed {
                break;
            }
        }
        out
    };

    let mut cpu = StageTimingReport::new(&selected);
    cpu.contended = cfg.parallel_slices;
    let mut first_error = None;
    let mut cluster_cols = Vec::new();
    let mut topic_cols = Vec::new();
    for r in runs {
        for f in &r.files {
            writer.write(&f.path, &f.data, true)?;
        }
        report.set(stage::DOCUMENTS, &r.label, r.summary.documents as f64);
        cpu.set(stage::DOCUMENTS, &r.label, r.summary.documents as f64);
        for (name, t) in &r.timings {
            report.set(name, &r.label, t.wall_s);
            cpu.set(name, &r.label, t.cpu_s);
        }
        state.seeds.extend(r.seeds);
        state.skipped.extend(r.skipped);
        cluster_cols.push((r.label.clone(), r.cluster_words));
        topic_cols.push((r.label.clone(), r.topic_words));
        state.slices.push(r.summary);
        if first_error.is_none() {
            first_error = r.error;
        }
    }
    report.finish();
    cpu.finish();
    writer.write(TIMING_CSV, report.to_csv().as_bytes(), false)?;
    writer.write("timing.txt", report.render_text().as_bytes(), false)?;
    writer.write("timing_cpu.csv", cpu.to_csv().as_bytes(), false)?;
    state.timing = Some(report);
    if let Some(e) = first_error {
        return Err(e);
    }

    for (name, corner, cols) in [
        ("cluster_words", "Cluster No", cluster_cols),
        ("topic_words", "Topic No", topic_cols),
    ] {
        if cols.iter().all(|c| c.1.is_none()) {
            continue;
        }
        let columns: Vec<(String, Vec<Vec<String>>)> =
            cols.into_iter().map(|(l, w)| (l, w.unwrap_or_default())).collect();
        let table = WordTable::from_columns(corner, "Cluster", &columns);
        writer.write(&format!("{name}.csv"), table.to_csv().as_bytes(), true)?;
        writer.write(&format!("{name}.txt"), table.render_text().as_bytes(), true)?;
    }
    Ok(())
}

type Ingested = (crate::ingest::Partition, crate::ingest::Corpus, Vec<Diagnostic>);

fn ingest(cfg: &RunConfig, ranges: &[crate::ingest::YearRange]) -> Result<Ingested, PipelineError> {
    let mut shards = Vec::new();
    let mut diagnostics = Vec::new();
    for path in &cfg.inputs {
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        let name = path.display().to_string();
        let parsed = parse_bibtex(&bytes, &name).map_err(|e| failed(stage::CORPUS, ALL_COLUMN, e))?;
        diagnostics.extend(parsed.diagnostics);
        shards.push(Shard::new(name, parsed.records));
    }
    let corpus = merge_and_dedup(shards);
    let partition = partition_by_year(&corpus, ranges).map_err(|e| failed(stage::CORPUS, ALL_COLUMN, e))?;
    Ok((partition, corpus, diagnostics))
}

fn failed(stage: &str, slice: &str, e: impl Display) -> PipelineError {
    PipelineError::StageFailed {
        stage: stage.to_owned(),
        slice: slice.to_owned(),
        reason: e.to_string(),
    }
}

struct Pending {
    path: String,
    data: Vec<u8>,
}

struct SliceRun {
    label: String,
    files: Vec<Pending>,
    timings: Vec<(&'static str, StageTiming)>,
    seeds: BTreeMap<String, u64>,
    skipped: Vec<Skipped>,
    summary: SliceSummary,
    cluster_words: Option<Vec<Vec<String>>>,
    topic_words: Option<Vec<Vec<String>>>,
    error: Option<PipelineError>,
}

impl SliceRun {
    fn put(&mut self, name: &str, data: impl Into<Vec<u8>>) {
        self.files.push(Pending {
            path: format!("{}/{name}", self.label),
            data: data.into(),
        });
    }

    fn skip(&mut self, stage: &str, reason: &str) {
        self.skipped.push(Skipped {
            slice: self.label.clone(),
            stage: stage.to_owned(),
            reason: reason.to_owned(),
        });
    }

    fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(format!("{}/{name}", self.label), seed);
    }

    fn timed<T, E: Display>(
        &mut self,
        clock: &StageClock,
        stage: &'static str,
        work: impl FnOnce() -> Result<T, E>,
    ) -> Result<T, PipelineError> {
        let (out, t) = clock.time(stage, work)?;
        self.timings.push((stage, t));
        out.map_err(|e| failed(stage, &self.label, e))
    }

    fn put_graph(&mut self, name: &str, g: &GraphExports) {
        self.put(&format!("{name}.graphml"), g.full.to_graphml());
        self.put(&format!("{name}.dot"), g.full.to_dot());
        self.put(&format!("{name}_nodes.csv"), g.full.nodes_csv());
        self.put(&format!("{name}_filtered.graphml"), g.filtered.to_graphml());
        self.put(&format!("{name}_filtered.dot"), g.filtered.to_dot());
        self.put(&format!("{name}_centrality.csv"), g.centrality.clone());
    }
}

struct GraphExports {
    full: CoOccurrenceGraph,
    filtered: CoOccurrenceGraph,
    centrality: String,
}

fn graph_exports(full: CoOccurrenceGraph, threshold: f64, docs: usize) -> Result<GraphExports, crate::graphs::GraphError> {
    let filtered = filter_by_contribution(&full, threshold, docs)?;
    let centrality = centrality_csv(&degree_centrality(&full));
    Ok(GraphExports {
        full,
        filtered,
        centrality,
    })
}

fn run_slice(cfg: &RunConfig, slice: &YearSlice, prep: &PrepConfig, countries: &CountryTable) -> SliceRun {
    let mut run = SliceRun {
        label: slice.label.clone(),
        files: Vec::new(),
        timings: Vec::new(),
        seeds: BTreeMap::new(),
        skipped: Vec::new(),
        summary: SliceSummary {
            label: slice.label.clone(),
            documents: slice.records.len(),
            vocabulary: None,
            clusters: None,
            topics: None,
        },
        cluster_words: None,
        topic_words: None,
        error: None,
    };
    if let Err(e) = slice_stages(cfg, slice, prep, countries, &mut run) {
        run.error = Some(e);
    }
    run
}

fn labelled(mut series: Vec<YearSeries>, prefix: &str) -> Vec<YearSeries> {
    for (i, s) in series.iter_mut().enumerate() {
        s.label = format!("{prefix}{}", i + 1);
    }
    series
}

fn slice_stages(
    cfg: &RunConfig,
    slice: &YearSlice,
    prep: &PrepConfig,
    countries: &CountryTable,
    run: &mut SliceRun,
) -> Result<(), PipelineError> {
    let st = cfg.stages;
    let clock = StageClock::new();
    let n_docs = slice.records.len();
    if n_docs == 0 {
        run.skip("*", "no documents in this slot");
        return Ok(());
    }

    let text = if st.text {
        let raw = run.timed(&clock, stage::TOKENIZATION, || {
            Ok::<_, Infallible>(tokenize_records(&slice.records, prep))
        })?;
        let (vocab, dtm) = run.timed(&clock, stage::CLEANING, || {
            Ok::<_, Infallible>(build_dtm(&clean_tokens(&raw, prep)))
        })?;
        run.summary.vocabulary = Some(vocab.len());
        if st.dtm_export {
            run.put("dtm.mtx", dtm.to_matrix_market());
            run.put("vocabulary.txt", vocab.to_text());
        }
        Some((vocab, dtm))
    } else {
        None
    };

    if st.trends {
        let chart = run.timed(&clock, stage::OVERALL_TREND, || {
            let hist = year_histogram(slice);
            Ok::<_, Infallible>(emit_chart_data(ChartData::Series(&hist), &format!("Documents per year, {}", slice.label)))
        })?;
        run.put("year_trend.csv", chart.csv);
        run.put("year_trend.svg", chart.svg);
    }

    let Some((vocab, dtm)) = text.as_ref().filter(|(v, _)| !v.is_empty()) else {
        let reason = if text.is_none() { "text stage disabled" } else { "no terms survive cleaning" };
        for (on, name) in [
            (st.frequency, stage::FREQUENCY),
            (st.word_cloud, stage::WORD_CLOUD),
            (st.elbow, stage::ELBOW),
            (st.clusters, stage::CLUSTERS),
            (st.topics, stage::TOPICS),
            (st.cluster_clouds, stage::CLUSTER_CLOUDS),
        ] {
            if on {
                run.skip(name, reason);
            }
        }
        return graph_stages(cfg, slice, countries, &clock, run, None);
    };

    if st.frequency {
        let chart = run.timed(&clock, stage::FREQUENCY, || {
            let table = top_terms(dtm, vocab, cfg.render.frequency_top_n);
            Ok::<_, Infallible>(emit_chart_data(ChartData::Terms(&table), &format!("Most frequent stems, {}", slice.label)))
        })?;
        run.put("top_terms.csv", chart.csv);
        run.put("top_terms.svg", chart.svg);
    }

    if st.word_cloud {
        run.seed("word_cloud", cfg.seed);
        let svg = run.timed(&clock, stage::WORD_CLOUD, || {
            let table = top_terms(dtm, vocab, cfg.render.max_words);
            let canvas = Canvas::new(cfg.render.width, cfg.render.height);
            let layout = layout_cloud(&table, cfg.render.max_words, canvas, cfg.seed, &CloudStyle::default())?;
            emit_svg(&layout)
        })?;
        run.put(&format!("{}_cloud.svg", slice.label), svg);
    }

    let clusters = cluster_stages(cfg, slice, vocab, dtm, &clock, run)?;
    let topics = topic_stages(cfg, slice, vocab, dtm, clusters.as_ref().map(|m| m.k), &clock, run)?;

    if st.cluster_clouds {
        match &clusters {
            Some(model) => {
                let canvas = Canvas::new(cfg.render.width, cfg.render.height);
                let svgs = run.timed(&clock, stage::CLUSTER_CLOUDS, || {
                    let mut out = Vec::new();
                    for c in 0..model.k {
                        let docs: Vec<usize> = (0..model.assignment.len()).filter(|&d| model.assignment[d] == c).collect();
                        let table = top_terms_in(dtm, vocab, &docs, cfg.render.cluster_cloud_words);
                        if table.is_empty() {
                            continue;
                        }
                        let seed = cfg.seed.wrapping_add(c as u64 + 1);
                        let layout = layout_cloud(&table, cfg.render.cluster_cloud_words, canvas, seed, &CloudStyle::default())?;
                        out.push((c, seed, emit_svg(&layout)?));
                    }
                    Ok::<_, crate::render::RenderError>(out)
                })?;
                for (c, seed, svg) in svgs {
                    run.seed(&format!("cluster_cloud_{}", c + 1), seed);
                    run.put(&format!("{}_cloud_cluster{}.svg", slice.label, c + 1), svg);
                }
            }
            None => run.skip(stage::CLUSTER_CLOUDS, "no cluster model"),
        }
    }

    graph_stages(cfg, slice, countries, &clock, run, topics.as_ref().map(|m| (m, vocab)))
}

fn cluster_stages(
    cfg: &RunConfig,
    slice: &YearSlice,
    vocab: &Vocabulary,
    dtm: &DocumentTermMatrix,
    clock: &StageClock,
    run: &mut SliceRun,
) -> Result<Option<ClusterModel>, PipelineError> {
    let st = cfg.stages;
    let c = &cfg.cluster;
    let opts = KMeansOptions {
        restarts: c.restarts,
        max_iter: c.max_iter,
    };
    let mut weighted: Option<WeightedMatrix> = None;
    let mut elbow: Option<(ElbowCurve, Vec<ClusterModel>)> = None;

    if st.elbow {
        let k_min = c.k_min;
        let found = run.timed(clock, stage::ELBOW, || {
            let w = tfidf(dtm)?;
            let k_max = c.k_max.min(w.nonzero_rows());
            if k_max <= k_min {
                return Ok((w, None));
            }
            let (curve, models) = elbow_curve(&w, k_min, k_max, cfg.seed, opts)?;
            let chart = emit_chart_data(ChartData::Elbow(&curve), &format!("Elbow, {}", slice.label));
            Ok::<_, crate::cluster::ClusterError>((w, Some((curve, models, chart))))
        })?;
        weighted = Some(found.0);
        match found.1 {
            Some((curve, models, chart)) => {
                run.seed("kmeans", cfg.seed);
                run.put("elbow.csv", chart.csv);
                run.put("elbow.svg", chart.svg);
                elbow = Some((curve, models));
            }
            None => run.skip(stage::ELBOW, "fewer non-empty documents than two candidate k"),
        }
    }

    if !st.clusters {
        return Ok(None);
    }
    let k = match (c.k, &elbow) {
        (Some(k), _) => k,
        (None, Some((curve, _))) => curve.selected_k,
        (None, None) => {
            run.skip(stage::CLUSTERS, "no k: the elbow stage did not run");
            return Ok(None);
        }
    };
    let (model, json, trends) = run.timed(clock, stage::CLUSTERS, || {
        let w = match weighted.take() {
            Some(w) => w,
            None => tfidf(dtm)?,
        };
        let k = k.min(w.nonzero_rows());
        let reused = elbow.as_mut().and_then(|(_, models)| {
            let i = models.iter().position(|m| m.k == k)?;
            Some(models.swap_remove(i))
        });
        let model = match reused {
            Some(m) => m,
            None => kmeans(&w, k, cfg.seed, opts)?,
        };
        let json = ClusterReport::new(&model, &w, vocab, c.top_terms).to_json();
        let trends = if st.group_trends {
            let series = group_year_trend(&model.assignment, dtm.years(), slice.range).expect("one assignment per row");
            let series = labelled(series, "cluster");
            Some(emit_chart_data(ChartData::MultiSeries(&series), &format!("Cluster trends, {}", slice.label)))
        } else {
            None
        };
        Ok::<_, crate::cluster::ClusterError>((model, json, trends))
    })?;
    run.seed("kmeans", cfg.seed);
    run.put("clusters.json", json + "\n");
    let mut assignments = String::from("doc_id,year,cluster\n");
    for (d, &a) in model.assignment.iter().enumerate() {
        assignments.push_str(&format!("{d},{},{}\n", dtm.row_year(d), a + 1));
    }
    run.put("cluster_assignments.csv", assignments);
    if let Some(chart) = trends {
        run.put("cluster_trends.csv", chart.csv);
        run.put("cluster_trends.svg", chart.svg);
    }
    run.summary.clusters = Some(model.k);
    run.cluster_words = Some(
        cluster_top_terms(&model, vocab, c.top_terms)
            .into_iter()
            .map(|ws| ws.into_iter().map(|w| w.0).collect())
            .collect(),
    );
    Ok(Some(model))
}

fn topic_stages(
    cfg: &RunConfig,
    slice: &YearSlice,
    vocab: &Vocabulary,
    dtm: &DocumentTermMatrix,
    cluster_k: Option<usize>,
    clock: &StageClock,
    run: &mut SliceRun,
) -> Result<Option<TopicModel>, PipelineError> {
    if !cfg.stages.topics {
        return Ok(None);
    }
    let Some(k) = cfg.topics.k.or(cluster_k) else {
        run.skip(stage::TOPICS, "no topic count: set topics.k or enable clustering");
        return Ok(None);
    };
    if k > vocab.len() {
        run.skip(stage::TOPICS, "more topics than vocabulary terms");
        return Ok(None);
    }
    let lda = cfg.lda_config(k);
    let n = cfg.topics.top_words;
    let (model, json, trends) = run.timed(clock, stage::TOPICS, || {
        let model = lda_fit(dtm, vocab, &lda)?;
        let json = topic_report_json(&model, vocab, n);
        let trends = if cfg.stages.group_trends {
            let dominant = (0..model.n_docs())
                .map(|d| dominant_topic(&model, d))
                .collect::<Result<Vec<_>, _>>()?;
            let series = group_year_trend(&dominant, dtm.years(), slice.range).expect("one topic per row");
            let series = labelled(series, "topic");
            Some(emit_chart_data(ChartData::MultiSeries(&series), &format!("Topic trends, {}", slice.label)))
        } else {
            None
        };
        Ok::<_, crate::topics::TopicError>((model, json, trends))
    })?;
    run.seed("lda", lda.seed);
    run.put("topics.json", json + "\n");
    run.put("theta.csv", model.theta_csv());
    if let Some(chart) = trends {
        run.put("topic_trends.csv", chart.csv);
        run.put("topic_trends.svg", chart.svg);
    }
    run.summary.topics = Some(model.k);
    run.topic_words = Some(
        topic_top_words(&model, vocab, n)
            .into_iter()
            .map(|ws| ws.into_iter().map(|w| w.0).collect())
            .collect(),
    );
    Ok(Some(model))
}

fn graph_stages(
    cfg: &RunConfig,
    slice: &YearSlice,
    countries: &CountryTable,
    clock: &StageClock,
    run: &mut SliceRun,
    topics: Option<(&TopicModel, &Vocabulary)>,
) -> Result<(), PipelineError> {
    let st = cfg.stages;
    let n_docs = slice.records.len();
    let threshold = cfg.graphs.threshold;
    if st.authors {
        let g = run.timed(clock, stage::AUTHORS, || graph_exports(author_graph(slice), threshold, n_docs))?;
        run.put_graph("authors", &g);
    }
    if st.countries {
        let (g, unmatched) = run.timed(clock, stage::COUNTRIES, || {
            let (graph, unmatched) = country_graph(slice, countries);
            Ok::<_, crate::graphs::GraphError>((graph_exports(graph, threshold, n_docs)?, unmatched))
        })?;
        run.put_graph("countries", &g);
        let mut csv = String::from("key,segment\n");
        for (key, seg) in unmatched {
            csv.push_str(&format!("{key},\"{}\"\n", seg.replace('"', "\"\"")));
        }
        run.put("countries_unmatched.csv", csv);
    }
    if let Some((model, vocab)) = topics {
        let g = run.timed(clock, stage::NETWORK, || {
            let lists: Vec<Vec<String>> = topic_top_words(model, vocab, cfg.topics.top_words)
                .into_iter()
                .map(|ws| ws.into_iter().map(|w| w.0).collect())
                .collect();
            Ok::<_, Infallible>(build_from_entities(EntityKind::Term, &lists))
        })?;
        run.put("topic_network.graphml", g.to_graphml());
        run.put("topic_network.dot", g.to_dot());
        run.put("topic_network_nodes.csv", g.nodes_csv());
    }
    Ok(())
}

/// Re-renders the timing table of a finished run.
pub fn report(run_dir: &Path) -> Result<StageTimingReport, PipelineError> {
    let path = run_dir.join(TIMING_CSV);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    Ok(StageTimingReport::from_csv(&text)?)
}
