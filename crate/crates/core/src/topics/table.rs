use std::fmt::Write as _;

/// Prominent words laid out with one row per topic (or cluster) and one
/// column per year slot. Missing cells, where a slot has fewer groups than
/// the table has rows, render as `--`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordTable {
    /// Header of the row-name column.
    pub corner: String,
    /// Row names are this label followed by a 1-based number.
    pub row_label: String,
    pub slots: Vec<String>,
    /// `cells[row][slot]`
    pub cells: Vec<Vec<Option<Vec<String>>>>,
}

impl WordTable {
    /// `columns` pairs a slot label with that slot's ranked words per group.
    pub fn from_columns(corner: &str, row_label: &str, columns: &[(String, Vec<Vec<String>>)]) -> Self {
        let n_rows = columns.iter().map(|c| c.1.len()).max().unwrap_or(0);
        let cells = (0..n_rows)
            .map(|r| columns.iter().map(|(_, groups)| groups.get(r).cloned()).collect())
            .collect();
        WordTable {
            corner: corner.to_owned(),
            row_label: row_label.to_owned(),
            slots: columns.iter().map(|c| c.0.clone()).collect(),
            cells,
        }
    }

    fn cell_text(cell: &Option<Vec<String>>) -> String {
        match cell {
            Some(words) if !words.is_empty() => words.join(", "),
            _ => "--".to_owned(),
        }
    }

    fn row_name(&self, r: usize) -> String {
        format!("{} {}", self.row_label, r + 1)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.corner.clone()];
        header.extend(self.slots.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (r, row) in self.cells.iter().enumerate() {
            let mut rec = vec![self.row_name(r)];
            rec.extend(row.iter().map(Self::cell_text));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Fixed-width text rendering.
    pub fn render_text(&self) -> String {
        let mut grid: Vec<Vec<String>> = vec![std::iter::once(self.corner.clone()).chain(self.slots.iter().cloned()).collect()];
        for (r, row) in self.cells.iter().enumerate() {
            grid.push(std::iter::once(self.row_name(r)).chain(row.iter().map(Self::cell_text)).collect());
        }
        render_grid(&grid)
    }
}

/// Pads every column to its widest cell and rules off the header.
pub(crate) fn render_grid(grid: &[Vec<String>]) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in grid.iter().enumerate() {
        let line: Vec<String> = (0..cols)
            .map(|c| {
                let s = row.get(c).map_or("", String::as_str);
                format!("{s:<w$}", w = widths[c])
            })
            .collect();
        let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            let _ = writeln!(out, "{}", rule.join("-+-"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rows_by_slot_shape() {
        let t = WordTable::from_columns(
            "Topic No",
            "Cluster",
            &[
                ("1961-1990".into(), vec![words(&["group", "product"]), words(&["schedul"])]),
                ("1991-2010".into(), vec![words(&["chain", "supplier"])]),
            ],
        );
        assert_eq!(t.cells.len(), 2);
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "Topic No,1961-1990,1991-2010\nCluster 1,\"group, product\",\"chain, supplier\"\nCluster 2,schedul,--\n"
        );
        let text = t.render_text();
        assert!(text.lines().nth(1).unwrap().starts_with("---"));
        assert!(text.contains("Cluster 2 | schedul"));
    }
}
