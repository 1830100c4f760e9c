use std::fmt::Write as _;

use crate::cluster::ElbowCurve;
use crate::graphs::xml_escape;
use crate::trends::{series_table_csv, TermFrequencyTable, YearSeries};

/// Anything that can be charted.
#[derive(Debug, Clone, Copy)]
pub enum ChartData<'a> {
    Series(&'a YearSeries),
    /// Several series on one year axis, e.g. per-cluster trends.
    MultiSeries(&'a [YearSeries]),
    Elbow(&'a ElbowCurve),
    Terms(&'a TermFrequencyTable),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartOutput {
    pub csv: String,
    pub svg: String,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// CSV in the producing module's format plus a small SVG chart: lines for
/// year series and the elbow curve (selected k circled), bars for term
/// frequencies.
pub fn emit_chart_data(data: ChartData<'_>, title: &str) -> ChartOutput {
    match data {
        ChartData::Series(s) => ChartOutput {
            csv: s.to_csv(),
            svg: line_chart(title, &[(s.label.clone(), year_points(s))], None),
        },
        ChartData::MultiSeries(all) => ChartOutput {
            csv: series_table_csv(all),
            svg: line_chart(
                title,
                &all.iter().map(|s| (s.label.clone(), year_points(s))).collect::<Vec<_>>(),
                None,
            ),
        },
        ChartData::Elbow(e) => {
            let pts: Vec<(f64, f64)> = e.points.iter().map(|&(k, i)| (k as f64, i)).collect();
            let mark = e.inertia_at(e.selected_k).map(|i| (e.selected_k as f64, i));
            ChartOutput {
                csv: e.to_csv(),
                svg: line_chart(title, &[("inertia".into(), pts)], mark),
            }
        }
        ChartData::Terms(t) => ChartOutput {
            csv: t.to_csv(),
            svg: bar_chart(title, &t.rows),
        },
    }
}

fn year_points(s: &YearSeries) -> Vec<(f64, f64)> {
    s.points.iter().map(|&(y, v)| (y as f64, v)).collect()
}

fn header(out: &mut String, title: &str) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"24.00\" font-family=\"sans-serif\" font-size=\"14.00\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        out,
        "<path d=\"M{MARGIN:.2} {:.2} L{MARGIN:.2} {:.2} L{:.2} {:.2}\" stroke=\"black\" fill=\"none\"/>",
        MARGIN,
        H - MARGIN,
        W - MARGIN,
        H - MARGIN
    );
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn line_chart(title: &str, series: &[(String, Vec<(f64, f64)>)], mark: Option<(f64, f64)>) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (x0, x1) = span(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let (_, y1) = span(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)).chain(std::iter::once(0.0)));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / y1 * (H - 2.0 * MARGIN);
    for (i, (label, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| format!("{}{:.2} {:.2}", if j == 0 { "M" } else { "L" }, sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<path d=\"{}\" stroke=\"{colour}\" fill=\"none\"><title>{}</title></path>",
            d.join(" "),
            xml_escape(label)
        );
    }
    if let Some((x, y)) = mark {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"6.00\" stroke=\"red\" fill=\"none\"/>",
            sx(x),
            sy(y)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN:.2}\" y=\"{:.2}\" font-size=\"10.00\">{x0}</text>",
        H - MARGIN + 14.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10.00\" text-anchor=\"end\">{x1}</text>",
        W - MARGIN,
        H - MARGIN + 14.0
    );
    out.push_str("</svg>\n");
    out
}

fn bar_chart(title: &str, rows: &[(String, u64)]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let max = rows.iter().map(|r| r.1).max().unwrap_or(1).max(1) as f64;
    let slot = (W - 2.0 * MARGIN) / rows.len().max(1) as f64;
    for (i, (stem, count)) in rows.iter().enumerate() {
        let h = *count as f64 / max * (H - 2.0 * MARGIN);
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{}\"><title>{} {count}</title></rect>",
            MARGIN + i as f64 * slot,
            H - MARGIN - h,
            (slot * 0.8).max(0.5),
            PALETTE[0],
            xml_escape(stem)
        );
    }
    out.push_str("</svg>\n");
    out
}
