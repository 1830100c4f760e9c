use std::path::{Path, PathBuf};
use std::process::Command;

use scitrend::pipeline::{self, stage, Manifest, RunConfig, StageTimingReport, ALL_COLUMN};

const SAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample.bib");

/// Attribute names of the reference timing table.
const REFERENCE_ROWS: [&str; 11] = [
    "No. of Documents",
    "Tokenization",
    "Cleaning of Data",
    "Formation Of Overall Trend",
    "Word Cloud Formation",
    "Formation Of Frequency Distribution (top 200 words)",
    "Formation of Author Association",
    "Formation Of Elbow Chart",
    "Topic Formation",
    "Formation of Word Cloud Of All Cluster",
    "Network Of Topics",
];

fn config(out: &Path) -> RunConfig {
    RunConfig {
        inputs: vec![PathBuf::from(SAMPLE)],
        out_dir: out.to_owned(),
        ..RunConfig::default()
    }
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let a = pipeline::run(&cfg).unwrap();
    let b = pipeline::run(&cfg).unwrap();
    assert_ne!(a.run_dir, b.run_dir);
    let (ca, cb) = (a.manifest.deterministic_checksums(), b.manifest.deterministic_checksums());
    assert!(ca.len() >= 10);
    assert_eq!(ca, cb);
    let clocked: Vec<&str> = a.manifest.artifacts.iter().filter(|x| !x.deterministic).map(|x| x.path.as_str()).collect();
    assert_eq!(clocked, ["timing.csv", "timing.txt", "timing_cpu.csv"]);

    let mut par = cfg.clone();
    par.parallel_slices = true;
    let c = pipeline::run(&par).unwrap();
    assert!(c.timing.contended);
    let mut cc = c.manifest.deterministic_checksums();
    cc.remove("config.toml");
    let mut ca = ca;
    ca.remove("config.toml");
    assert_eq!(ca, cc);
}

#[test]
fn timing_rows_cover_the_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline::run(&config(dir.path())).unwrap();
    let names = out.timing.stage_names();
    for row in REFERENCE_ROWS {
        assert_eq!(names.iter().filter(|n| **n == row).count(), 1, "{row}");
    }
    assert_eq!(out.timing.columns, ["1961-1990", "1991-2010", "2011-2017", ALL_COLUMN]);
    assert_eq!(out.timing.get(stage::DOCUMENTS, "1991-2010"), Some(5.0));
    for row in &out.timing.rows {
        assert!(row.cells.iter().flatten().all(|&v| v >= 0.0), "{}", row.name);
    }

    let text = std::fs::read_to_string(out.run_dir.join("timing.csv")).unwrap();
    let back = StageTimingReport::from_csv(&text).unwrap();
    assert_eq!(back.stage_names(), names);

    let mut cfg = config(dir.path());
    cfg.stages.authors = false;
    let without = pipeline::run(&cfg).unwrap();
    let mut expected: Vec<&str> = names.iter().copied().filter(|n| *n != stage::AUTHORS).collect();
    expected.sort();
    let mut got = without.timing.stage_names();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn word_tables_have_rows_by_slot_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline::run(&config(dir.path())).unwrap();
    let csv = std::fs::read_to_string(out.run_dir.join("topic_words.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("Topic No,1961-1990,1991-2010,2011-2017"));
    let rows: Vec<&str> = lines.collect();
    let most = out.manifest.slices.iter().filter_map(|s| s.topics).max().unwrap();
    assert_eq!(rows.len(), most);
    for (i, r) in rows.iter().enumerate() {
        assert!(r.starts_with(&format!("Cluster {},", i + 1)), "{r}");
    }
    let fewest = out.manifest.slices.iter().filter_map(|s| s.topics).min().unwrap();
    if fewest < most {
        assert!(rows[most - 1].contains("--"));
    }
    assert!(out.manifest.artifact("cluster_words.txt").is_some());
}

#[test]
fn slice_flag_limits_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.only_slices = vec!["2011-2017".into()];
    let out = pipeline::run(&cfg).unwrap();
    assert_eq!(out.timing.columns, ["2011-2017", ALL_COLUMN]);
    assert!(out.manifest.artifacts.iter().all(|a| !a.path.starts_with("1961-1990/")));

    cfg.only_slices = vec!["1800-1900".into()];
    assert!(matches!(pipeline::run(&cfg), Err(pipeline::PipelineError::Config(_))));
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(SAMPLE, dir.path().join("in.bib")).unwrap();
    let toml = "inputs = [\"in.bib\"]\nout_dir = \"out\"\nrun_name = \"cfg\"\n[stages]\ntopics = false\n";
    std::fs::write(dir.path().join("run.toml"), toml).unwrap();
    let cfg = RunConfig::load(&dir.path().join("run.toml")).unwrap();
    let out = pipeline::run(&cfg).unwrap();
    assert_eq!(out.run_dir, dir.path().join("out/cfg"));
    assert!(out.manifest.artifact("1991-2010/topics.json").is_none());
    assert!(out.manifest.artifact("1991-2010/clusters.json").is_some());
    assert_eq!(Manifest::load(&out.run_dir).unwrap(), out.manifest);
}

#[test]
fn cli_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_scitrend");
    let out = dir.path().to_str().unwrap();
    let ok = |args: &[&str]| {
        let o = Command::new(bin).args(args).output().unwrap();
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        String::from_utf8(o.stdout).unwrap()
    };
    let stdout = ok(&["ingest", SAMPLE, "--out", out, "--run-name", "ing"]);
    assert!(stdout.contains("No. of Documents"));
    assert!(!stdout.contains("Tokenization"));

    ok(&["graphs", SAMPLE, "--out", out, "--run-name", "g", "--slice", "1991-2010"]);
    let m = Manifest::load(&dir.path().join("g")).unwrap();
    assert!(m.artifact("1991-2010/authors.graphml").is_some());
    assert!(m.artifact("1991-2010/dtm.mtx").is_none());

    ok(&["cluster", SAMPLE, "--out", out, "--run-name", "c", "--seed", "7"]);
    let m = Manifest::load(&dir.path().join("c")).unwrap();
    assert_eq!(m.config.seed, 7);
    assert!(m.artifact("2011-2017/elbow.csv").is_some());
    assert!(m.artifact("2011-2017/topics.json").is_none());

    let report = ok(&["report", dir.path().join("c").to_str().unwrap()]);
    assert!(report.starts_with("TIME TAKEN (in secs)"));
    assert!(report.contains("Cluster Formation"));

    let o = Command::new(bin).args(["run", "/no/such.bib", "--out", out]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));
}
