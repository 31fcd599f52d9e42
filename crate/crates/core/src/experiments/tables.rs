use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{CellRecord, GridResult};
use crate::error::{Error, Result};
use crate::inference::TestKind;
use crate::simgen::{Alternative, ZModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Size,
    Power,
}

impl TableKind {
    pub fn stem(self) -> &'static str {
        match self {
            TableKind::Size => "size_table",
            TableKind::Power => "power_table",
        }
    }
}

const GRID_HEADER: [&str; 13] = [
    "model",
    "k",
    "s",
    "rho",
    "alternative",
    "test",
    "alpha",
    "rejections",
    "replications",
    "degenerate",
    "rejection_rate",
    "std_error",
    "best",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_owned(), |x| x.to_string())
}

/// One row per record, in grid order.
pub fn write_grid_csv(result: &GridResult, kind: TableKind, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(GRID_HEADER).map_err(|e| Error::csv(path, e))?;
    for r in &result.records {
        w.write_record([
            r.model.name().to_owned(),
            r.k.to_string(),
            r.s.to_string(),
            r.rho.to_string(),
            r.alternative.name().to_owned(),
            r.test.name().to_owned(),
            result.alpha.to_string(),
            r.rejections.to_string(),
            r.replications.to_string(),
            r.degenerate.to_string(),
            fmt_opt(r.rejection_rate()),
            fmt_opt(r.std_error()),
            result.is_best(r, kind).to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a grid written by [`write_grid_csv`]. Derived columns are ignored.
pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<GridResult> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::csv(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != GRID_HEADER {
        return Err(Error::InvalidData(format!("{}: not a grid table", path.display())));
    }
    let bad = |row: usize, what: &str| Error::InvalidData(format!("{}: row {row}: bad {what}", path.display()));
    let mut alpha = None;
    let mut records = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let num = |j: usize| rec[j].parse::<f64>().map_err(|_| bad(i + 1, GRID_HEADER[j]));
        let int = |j: usize| rec[j].parse::<u64>().map_err(|_| bad(i + 1, GRID_HEADER[j]));
        let a = num(6)?;
        if *alpha.get_or_insert(a) != a {
            return Err(bad(i + 1, "alpha (differs between rows)"));
        }
        records.push(CellRecord {
            model: ZModel::parse(&rec[0])?,
            k: int(1)? as usize,
            s: int(2)? as usize,
            rho: num(3)?,
            alternative: Alternative::parse(&rec[4])?,
            test: TestKind::parse(&rec[5]).ok_or_else(|| bad(i + 1, "test"))?,
            rejections: int(7)?,
            replications: int(8)?,
            degenerate: int(9)?,
        });
    }
    let alpha = alpha.ok_or_else(|| Error::InvalidData(format!("{}: empty grid", path.display())))?;
    Ok(GridResult { alpha, records })
}

pub fn write_are_csv(result: &GridResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["test", "rho", "are", "cells_used", "cells_total"])
        .map_err(|e| Error::csv(path, e))?;
    for row in result.are_table() {
        w.write_record([
            row.test.name().to_owned(),
            row.rho.to_string(),
            fmt_opt(row.are),
            row.cells_used.to_string(),
            row.cells_total.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn dedup_in_order<T: PartialEq>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

/// Aligned text table in percent: one row per (model, K, S), one column
/// block per rho (size) or alternative (power), tests as columns. The best
/// entry of each block is marked with `*`; degenerate entries read `NaN`.
pub fn render_text(result: &GridResult, kind: TableKind) -> String {
    let rows = dedup_in_order(result.records.iter().map(|r| (r.model, r.k, r.s)));
    let blocks = dedup_in_order(result.records.iter().map(|r| (r.rho.to_bits(), r.alternative)));
    let tests = result.tests();
    let block_label = |&(rho, alt): &(u64, Alternative)| match kind {
        TableKind::Size => format!("rho={}", f64::from_bits(rho)),
        TableKind::Power => format!("{} rho={}", alt, f64::from_bits(rho)),
    };

    let width = 8;
    let mut out = String::new();
    let _ = write!(out, "{:<10}{:>5}{:>5}", "model", "K", "S");
    for b in &blocks {
        let label = block_label(b);
        let span = width * tests.len();
        let _ = write!(out, "  {label:^span$}");
    }
    out.push('\n');
    let _ = write!(out, "{:<10}{:>5}{:>5}", "", "", "");
    for _ in &blocks {
        out.push_str("  ");
        for t in &tests {
            let _ = write!(out, "{:>width$}", t.name());
        }
    }
    out.push('\n');

    for &(model, k, s) in &rows {
        let _ = write!(out, "{:<10}{:>5}{:>5}", model.name(), k, s);
        for &(rho, alt) in &blocks {
            out.push_str("  ");
            for &t in &tests {
                let cell = result.find(model, k, s, f64::from_bits(rho), alt, t);
                let text = match cell.and_then(|c| c.rejection_rate().map(|p| (c, p))) {
                    Some((c, p)) => {
                        let mark = if result.is_best(c, kind) { "*" } else { " " };
                        format!("{:.2}{mark}", 100.0 * p)
                    }
                    None if cell.is_some() => "NaN ".to_owned(),
                    None => "- ".to_owned(),
                };
                let _ = write!(out, "{text:>width$}");
            }
        }
        out.push('\n');
    }

    if kind == TableKind::Size {
        let _ = write!(out, "{:<20}", "ARE");
        for &(rho, _) in &blocks {
            out.push_str("  ");
            for &t in &tests {
                let text = match result.are(t, f64::from_bits(rho)) {
                    Ok(v) => format!("{v:.2} "),
                    Err(_) => "NaN ".to_owned(),
                };
                let _ = write!(out, "{text:>width$}");
            }
        }
        out.push('\n');
    }
    out
}

/// Writes `<stem>.csv` and `<stem>.txt` into `dir`, plus `are.csv` for
/// size tables. Returns the written paths.
pub fn emit_tables(result: &GridResult, kind: TableKind, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{}.csv", kind.stem()));
    write_grid_csv(result, kind, &csv_path)?;
    let txt_path = dir.join(format!("{}.txt", kind.stem()));
    std::fs::write(&txt_path, render_text(result, kind)).map_err(|e| Error::io(&txt_path, e))?;
    let mut written = vec![csv_path, txt_path];
    if kind == TableKind::Size {
        let are_path = dir.join("are.csv");
        write_are_csv(result, &are_path)?;
        written.push(are_path);
    }
    Ok(written)
}
