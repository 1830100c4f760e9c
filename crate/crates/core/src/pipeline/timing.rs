use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::time::{Duration, Instant};
use thiserror::Error;

use crate::topics::render_grid;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TimingError {
    #[error("stage '{inner}' started while '{outer}' is still being timed")]
    NestedTiming { outer: String, inner: String },
    #[error("malformed timing CSV at line {line}")]
    Csv { line: usize },
}

/// Table row names, in report order.
pub mod stage {
    pub const DOCUMENTS: &str = "No. of Documents";
    pub const CORPUS: &str = "Corpus Formation";
    pub const TOKENIZATION: &str = "Tokenization";
    pub const CLEANING: &str = "Cleaning of Data";
    pub const OVERALL_TREND: &str = "Formation Of Overall Trend";
    pub const WORD_CLOUD: &str = "Word Cloud Formation";
    pub const FREQUENCY: &str = "Formation Of Frequency Distribution (top 200 words)";
    pub const AUTHORS: &str = "Formation of Author Association";
    pub const COUNTRIES: &str = "Formation of Country Association";
    pub const ELBOW: &str = "Formation Of Elbow Chart";
    pub const CLUSTERS: &str = "Cluster Formation";
    pub const TOPICS: &str = "Topic Formation";
    pub const CLUSTER_CLOUDS: &str = "Formation of Word Cloud Of All Cluster";
    pub const NETWORK: &str = "Network Of Topics";

    pub const ORDER: [&str; 14] = [
        DOCUMENTS,
        CORPUS,
        TOKENIZATION,
        CLEANING,
        OVERALL_TREND,
        WORD_CLOUD,
        FREQUENCY,
        AUTHORS,
        COUNTRIES,
        ELBOW,
        CLUSTERS,
        TOPICS,
        CLUSTER_CLOUDS,
        NETWORK,
    ];
}

/// Wall and process CPU time of one stage, rounded to milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTiming {
    pub wall_s: f64,
    pub cpu_s: f64,
}

fn round_ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

fn process_cpu_time() -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

/// Times stages one at a time. Starting a stage inside another is an error.
#[derive(Debug, Default)]
pub struct StageClock {
    current: Cell<Option<&'static str>>,
}

struct Running<'a>(&'a Cell<Option<&'static str>>);

impl Drop for Running<'_> {
    fn drop(&mut self) {
        self.0.set(None);
    }
}

impl StageClock {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `work` under a monotonic clock.
    pub fn time<T>(&self, name: &'static str, work: impl FnOnce() -> T) -> Result<(T, StageTiming), TimingError> {
        if let Some(outer) = self.current.get() {
            return Err(TimingError::NestedTiming {
                outer: outer.to_owned(),
                inner: name.to_owned(),
            });
        }
        self.current.set(Some(name));
        let _running = Running(&self.current);
        let cpu0 = process_cpu_time();
        let t0 = Instant::now();
        let out = work();
        let wall = t0.elapsed();
        let cpu = process_cpu_time().saturating_sub(cpu0);
        Ok((
            out,
            StageTiming {
                wall_s: round_ms(wall),
                cpu_s: round_ms(cpu),
            },
        ))
    }
}

/// A stage row: document counts for the first row, seconds for the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub name: String,
    /// One cell per column; `None` where the stage did not run.
    pub cells: Vec<Option<f64>>,
}

/// Stage rows by slice columns, with an optional whole-run column for
/// stages that act on the merged corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTimingReport {
    pub columns: Vec<String>,
    pub rows: Vec<TimingRow>,
    /// Set when slices ran concurrently, so durations overlap.
    pub contended: bool,
}

pub const ALL_COLUMN: &str = "all";

impl StageTimingReport {
    pub fn new(slices: &[String]) -> Self {
        let mut columns = slices.to_vec();
        columns.push(ALL_COLUMN.to_owned());
        StageTimingReport {
            columns,
            rows: Vec::new(),
            contended: false,
        }
    }

    fn column(&self, label: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == label)
            .unwrap_or_else(|| panic!("unknown column {label}"))
    }

    pub fn set(&mut self, stage: &str, column: &str, value: f64) {
        let c = self.column(column);
        let n = self.columns.len();
        let row = match self.rows.iter().position(|r| r.name == stage) {
            Some(i) => &mut self.rows[i],
            None => {
                self.rows.push(TimingRow {
                    name: stage.to_owned(),
                    cells: vec![None; n],
                });
                self.rows.last_mut().expect("just pushed")
            }
        };
        row.cells[c] = Some(value);
    }

    pub fn get(&self, stage: &str, column: &str) -> Option<f64> {
        let c = self.column(column);
        self.rows.iter().find(|r| r.name == stage).and_then(|r| r.cells[c])
    }

    pub fn stage_names(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.name.as_str()).collect()
    }

    /// Orders rows by [`stage::ORDER`], unknown names last, and drops the
    /// whole-run column if nothing uses it.
    pub fn finish(&mut self) {
        let rank = |n: &str| stage::ORDER.iter().position(|s| *s == n).unwrap_or(usize::MAX);
        self.rows.sort_by_key(|r| rank(&r.name));
        let all = self.columns.len() - 1;
        if self.columns[all] == ALL_COLUMN && self.rows.iter().all(|r| r.cells[all].is_none()) {
            self.columns.pop();
            for r in &mut self.rows {
                r.cells.pop();
            }
        }
    }

    /// Seconds summed over every timed stage, per column.
    pub fn totals(&self) -> Vec<f64> {
        (0..self.columns.len())
            .map(|c| {
                let sum: f64 = self
                    .rows
                    .iter()
                    .filter(|r| r.name != stage::DOCUMENTS)
                    .filter_map(|r| r.cells[c])
                    .sum();
                (sum * 1000.0).round() / 1000.0
            })
            .collect()
    }

    fn fmt_cell(stage: &str, v: Option<f64>) -> String {
        match v {
            None => String::new(),
            Some(x) if stage == stage::DOCUMENTS => format!("{}", x as u64),
            Some(x) => format!("{x:.3}"),
        }
    }

    /// `stage,<columns...>` followed by a `Total` row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["stage".to_owned()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.name.clone()];
            rec.extend(r.cells.iter().map(|&v| Self::fmt_cell(&r.name, v)));
            w.write_record(&rec).expect("in-memory write");
        }
        let mut total = vec!["Total".to_owned()];
        total.extend(self.totals().iter().map(|v| format!("{v:.3}")));
        w.write_record(&total).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, TimingError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = reader.headers().map_err(|_| TimingError::Csv { line: 1 })?.clone();
        let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|_| TimingError::Csv { line })?;
            let name = rec.get(0).ok_or(TimingError::Csv { line })?.to_owned();
            if name == "Total" {
                continue;
            }
            let cells = rec
                .iter()
                .skip(1)
                .map(|s| if s.is_empty() { Ok(None) } else { s.parse().map(Some) })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| TimingError::Csv { line })?;
            rows.push(TimingRow { name, cells });
        }
        Ok(StageTimingReport {
            columns,
            rows,
            contended: false,
        })
    }

    /// Numbered text table: `S.NO. | ATTRIBUTES | <columns>`.
    pub fn render_text(&self) -> String {
        let mut grid = vec![{
            let mut h = vec!["S.NO.".to_owned(), "ATTRIBUTES".to_owned()];
            h.extend(self.columns.iter().cloned());
            h
        }];
        for (i, r) in self.rows.iter().enumerate() {
            let mut line = vec![format!("{}.", i + 1), r.name.clone()];
            line.extend(r.cells.iter().map(|&v| Self::fmt_cell(&r.name, v)));
            grid.push(line);
        }
        let mut total = vec![String::new(), "Total (s)".to_owned()];
        total.extend(self.totals().iter().map(|v| format!("{v:.3}")));
        grid.push(total);
        let mut out = String::from("TIME TAKEN (in secs)\n");
        out.push_str(&render_grid(&grid));
        if self.contended {
            out.push_str("note: slices ran concurrently; durations overlap\n");
        }
        out
    }
}
