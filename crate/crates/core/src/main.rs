use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use scitrend::pipeline::{self, RunConfig, Stages};

#[derive(Parser)]
#[command(name = "scitrend", version, about = "Research-trend analysis over BibTeX citation exports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, deduplicate and slice the records; writes diagnostics and counts.
    Ingest(RunArgs),
    /// Tokenize, clean and stem; writes each slot's document-term matrix.
    Prep(RunArgs),
    /// Per-year document counts and the most frequent stems.
    Trends(RunArgs),
    /// Elbow curve and k-means clusters over tf-idf vectors.
    Cluster(RunArgs),
    /// LDA topics; K defaults to the elbow choice.
    Topics(RunArgs),
    /// Author and country co-occurrence networks.
    Graphs(RunArgs),
    /// Word cloud of each slot.
    Cloud(RunArgs),
    /// Every stage.
    Run(RunArgs),
    /// Print the timing table of a finished run.
    Report {
        /// Run directory containing timing.csv.
        run_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// BibTeX shards; replace the config's `inputs` when given.
    inputs: Vec<PathBuf>,
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parent directory of the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict to one year slot, e.g. 1991-2010. Repeatable.
    #[arg(long = "slice")]
    slices: Vec<String>,
    /// Run directory name instead of a timestamp.
    #[arg(long)]
    run_name: Option<String>,
}

impl RunArgs {
    fn config(&self, stages: Stages) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::default(),
        };
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs.clone();
        }
        if cfg.inputs.is_empty() {
            bail!("no input files: pass BibTeX paths or set `inputs` in the config");
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if !self.slices.is_empty() {
            cfg.only_slices = self.slices.clone();
        }
        if self.run_name.is_some() {
            cfg.run_name = self.run_name.clone();
        }
        cfg.stages = intersect(cfg.stages, stages);
        Ok(cfg)
    }
}

fn intersect(a: Stages, b: Stages) -> Stages {
    Stages {
        text: a.text && b.text,
        dtm_export: a.dtm_export && b.dtm_export,
        trends: a.trends && b.trends,
        word_cloud: a.word_cloud && b.word_cloud,
        frequency: a.frequency && b.frequency,
        authors: a.authors && b.authors,
        countries: a.countries && b.countries,
        elbow: a.elbow && b.elbow,
        clusters: a.clusters && b.clusters,
        topics: a.topics && b.topics,
        cluster_clouds: a.cluster_clouds && b.cluster_clouds,
        group_trends: a.group_trends && b.group_trends,
    }
}

fn stages_for(command: &Command) -> Stages {
    let none = Stages::none();
    let text = Stages { text: true, ..none };
    match command {
        Command::Ingest(_) | Command::Report { .. } => none,
        Command::Prep(_) => Stages { dtm_export: true, ..text },
        Command::Trends(_) => Stages {
            trends: true,
            frequency: true,
            ..text
        },
        Command::Cluster(_) => Stages {
            elbow: true,
            clusters: true,
            cluster_clouds: true,
            group_trends: true,
            ..text
        },
        Command::Topics(_) => Stages {
            elbow: true,
            clusters: true,
            topics: true,
            group_trends: true,
            ..text
        },
        Command::Graphs(_) => Stages {
            authors: true,
            countries: true,
            ..none
        },
        Command::Cloud(_) => Stages { word_cloud: true, ..text },
        Command::Run(_) => Stages::all(),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let stages = stages_for(&cli.command);
    let args = match &cli.command {
        Command::Report { run_dir } => {
            let report = pipeline::report(run_dir).with_context(|| format!("reading {}", run_dir.display()))?;
            print!("{}", report.render_text());
            return Ok(());
        }
        Command::Ingest(a)
        | Command::Prep(a)
        | Command::Trends(a)
        | Command::Cluster(a)
        | Command::Topics(a)
        | Command::Graphs(a)
        | Command::Cloud(a)
        | Command::Run(a) => a,
    };
    let cfg = args.config(stages)?;
    let outcome = pipeline::run(&cfg)?;
    for s in &outcome.manifest.skipped {
        eprintln!("skipped {} in {}: {}", s.stage, s.slice, s.reason);
    }
    println!("{}", outcome.run_dir.display());
    println!("{} artifacts", outcome.manifest.artifacts.len());
    print!("{}", outcome.timing.render_text());
    Ok(())
}
