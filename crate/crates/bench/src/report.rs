//! Scenario reports and their Markdown, CSV and plain-text renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{BenchError, Result};

pub const CSV_HEADER: [&str; 10] = [
    "scenario",
    "query_id",
    "predicate",
    "index_kind",
    "plan_kind",
    "cost_est",
    "card_est",
    "rows",
    "consistent_gets",
    "physical_reads",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Markdown,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "txt" | "text" => Ok(Format::Text),
            other => Err(BenchError::Usage(format!("unknown format `{other}` (md, csv, txt)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMeta {
    pub name: String,
    pub rows: u64,
    pub blocks: u64,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMeta {
    pub name: String,
    pub table: String,
    pub kind: String,
    pub column: String,
    pub size_bytes: u64,
    pub blocks: u64,
    pub blevel: u32,
    pub clustering_factor: u64,
    pub distinct_keys: u64,
}

/// One cold execution of one query under one index configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub scenario: String,
    pub query_id: String,
    pub predicate: String,
    /// `bitmap`, `btree` or `none` (no index on the queried columns)
    pub index_kind: String,
    pub plan_kind: String,
    pub plan_shape: String,
    pub cost_est: u64,
    pub card_est: u64,
    pub rows: u64,
    pub consistent_gets: u64,
    pub physical_reads: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub scenario: String,
    pub description: String,
    pub scale: u64,
    pub seed: u64,
    pub tables: Vec<TableMeta>,
    pub indexes: Vec<IndexMeta>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Markdown => Ok(self.to_markdown()),
            Format::Csv => to_csv(std::slice::from_ref(self)),
            Format::Text => Ok(self.to_text()),
        }
    }

    /// Rows measuring query `query_id` under `index_kind`.
    pub fn row(&self, query_id: &str, index_kind: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.query_id == query_id && r.index_kind == index_kind)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "## {} (scale {}, seed {})\n", self.scenario, self.scale, self.seed);
        if !self.description.is_empty() {
            let _ = writeln!(out, "{}\n", self.description);
        }
        if !self.tables.is_empty() {
            out.push_str("| table | rows | blocks | size (bytes) |\n|---|---:|---:|---:|\n");
            for t in &self.tables {
                let _ = writeln!(out, "| {} | {} | {} | {} |", t.name, t.rows, t.blocks, t.size_bytes);
            }
            out.push('\n');
        }
        if !self.indexes.is_empty() {
            out.push_str(
                "| index | table | kind | column | size (bytes) | blocks | blevel | clustering factor | distinct keys |\n\
                 |---|---|---|---|---:|---:|---:|---:|---:|\n",
            );
            for i in &self.indexes {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    i.name,
                    i.table,
                    i.kind,
                    i.column,
                    i.size_bytes,
                    i.blocks,
                    i.blevel,
                    i.clustering_factor,
                    i.distinct_keys
                );
            }
            out.push('\n');
        }
        if !self.rows.is_empty() {
            out.push_str(
                "| query | predicate | index | plan | cost | card | rows | consistent gets | physical reads |\n\
                 |---|---|---|---|---:|---:|---:|---:|---:|\n",
            );
            for r in &self.rows {
                let _ = writeln!(
                    out,
                    "| {} | `{}` | {} | {} | {} | {} | {} | {} | {} |",
                    r.query_id,
                    r.predicate,
                    r.index_kind,
                    r.plan_shape,
                    r.cost_est,
                    r.card_est,
                    r.rows,
                    r.consistent_gets,
                    r.physical_reads
                );
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (scale {}, seed {})", self.scenario, self.scale, self.seed);
        if !self.description.is_empty() {
            let _ = writeln!(out, "{}", self.description);
        }
        for t in &self.tables {
            let _ = writeln!(out, "  table {}: {} rows, {} blocks, {} bytes", t.name, t.rows, t.blocks, t.size_bytes);
        }
        for i in &self.indexes {
            let _ = writeln!(
                out,
                "  index {} ({} on {}.{}): {} bytes, {} blocks, blevel {}, clustering factor {}, {} keys",
                i.name,
                i.kind,
                i.table,
                i.column,
                i.size_bytes,
                i.blocks,
                i.blevel,
                i.clustering_factor,
                i.distinct_keys
            );
        }
        if self.rows.is_empty() {
            return out;
        }
        let header = ["query", "predicate", "index", "plan", "cost", "card", "rows", "gets", "phys"];
        let cells: Vec<[String; 9]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.query_id.clone(),
                    r.predicate.clone(),
                    r.index_kind.clone(),
                    r.plan_shape.clone(),
                    r.cost_est.to_string(),
                    r.card_est.to_string(),
                    r.rows.to_string(),
                    r.consistent_gets.to_string(),
                    r.physical_reads.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |out: &mut String, row: &[&str]| {
            for (i, (c, w)) in row.iter().zip(widths).enumerate() {
                // text columns left-aligned, numbers right-aligned
                if i < 4 {
                    let _ = write!(out, "{c:<w$}  ");
                } else {
                    let _ = write!(out, "{c:>w$}  ");
                }
            }
            let trimmed = out.trim_end().len();
            out.truncate(trimmed);
            out.push('\n');
        };
        line(&mut out, &header);
        for row in &cells {
            line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}

/// All rows of `reports` as one CSV document with a single header.
pub fn to_csv(reports: &[Report]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports.iter().flat_map(|r| &r.rows) {
        w.write_record([
            r.scenario.as_str(),
            &r.query_id,
            &r.predicate,
            &r.index_kind,
            &r.plan_kind,
            &r.cost_est.to_string(),
            &r.card_est.to_string(),
            &r.rows.to_string(),
            &r.consistent_gets.to_string(),
            &r.physical_reads.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses CSV produced by [`to_csv`] back into rows; the plan shape is not
/// part of the CSV and comes back equal to the plan kind.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(BenchError::Usage(format!("unexpected CSV header {header:?}")));
    }
    let num = |s: &str| -> Result<u64> { s.parse().map_err(|_| BenchError::Usage(format!("bad number `{s}` in CSV"))) };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(ReportRow {
            scenario: rec[0].to_string(),
            query_id: rec[1].to_string(),
            predicate: rec[2].to_string(),
            index_kind: rec[3].to_string(),
            plan_kind: rec[4].to_string(),
            plan_shape: rec[4].to_string(),
            cost_est: num(&rec[5])?,
            card_est: num(&rec[6])?,
            rows: num(&rec[7])?,
            consistent_gets: num(&rec[8])?,
            physical_reads: num(&rec[9])?,
        });
    }
    Ok(out)
}

pub fn render_all(reports: &[Report], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(reports),
        Format::Markdown => Ok(reports.iter().map(Report::to_markdown).collect::<Vec<_>>().join("\n")),
        Format::Text => Ok(reports.iter().map(Report::to_text).collect::<Vec<_>>().join("\n")),
    }
}
