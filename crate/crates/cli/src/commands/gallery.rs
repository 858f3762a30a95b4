//! `gallery list`.

use std::path::Path;

use ustar_core::gallery::Manifest;

use crate::Failure;

pub struct Row {
    pub id: String,
    pub dim: usize,
    pub charts: String,
    pub domains: String,
}

pub fn rows(m: &Manifest) -> Result<Vec<Row>, Failure> {
    m.entries
        .iter()
        .map(|row| {
            let e = m.load(&row.id).map_err(|e| Failure::Usage(format!("entry {}: {e}", row.id)))?;
            Ok(Row {
                id: row.id.clone(),
                dim: e.dim(),
                charts: row.charts.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", "),
                domains: row.charts.iter().map(|c| c.domain.as_str()).collect::<Vec<_>>().join("; "),
            })
        })
        .collect()
}

pub fn render(rows: &[Row]) -> String {
    let head = ["id", "dim", "charts", "domains"];
    let cells: Vec<[String; 4]> =
        rows.iter().map(|r| [r.id.clone(), r.dim.to_string(), r.charts.clone(), r.domains.clone()]).collect();
    let width = |k: usize| cells.iter().map(|c| c[k].chars().count()).chain([head[k].len()]).max().unwrap_or(0);
    let w = [width(0), width(1), width(2)];
    let line = |c: [&str; 4]| format!("{:<w0$}  {:>w1$}  {:<w2$}  {}\n", c[0], c[1], c[2], c[3], w0 = w[0], w1 = w[1], w2 = w[2]);
    let mut out = line(head);
    for c in &cells {
        out.push_str(&line([&c[0], &c[1], &c[2], &c[3]]));
    }
    out
}

pub fn list(manifest: Option<&Path>, empty: bool) -> Result<bool, Failure> {
    let rows = if empty { Vec::new() } else { rows(&super::manifest(manifest)?)? };
    print!("{}", render(&rows));
    Ok(true)
}
