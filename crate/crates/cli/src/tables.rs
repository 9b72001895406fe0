//! CSV input for the score and stats subcommands.

use crate::exit::{fail, CliResult, INPUT};

/// Numeric table with optional header row.
#[derive(Debug)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

/// Parses CSV text. The first row is a header if any of its cells is not a number.
pub fn parse_table(text: &str) -> CliResult<Table> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| fail(INPUT, format!("csv row {}: {e}", i + 1)))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    let mut header = None;
    if let Some(first) = records.first() {
        if first.iter().any(|c| c.parse::<f64>().is_err()) {
            header = Some(records.remove(0));
        }
    }
    let first_data_line = if header.is_some() { 2 } else { 1 };
    let rows = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|c| {
                    c.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| fail(INPUT, format!("csv row {}: {c:?} is not a number", i + first_data_line)))
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(fail(INPUT, "csv has no data rows"));
    }
    Ok(Table { header, rows })
}
