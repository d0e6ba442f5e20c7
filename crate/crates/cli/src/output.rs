use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// Writes rows in the requested format. CSV and JSON-lines keep full
/// precision; text rounds numbers for reading.
pub fn emit<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Output(e.to_string()))?;
        }
        Format::JsonLines => {
            for row in rows {
                serde_json::to_writer(&mut *out, row).map_err(|e| CliError::Output(e.to_string()))?;
                writeln!(out).map_err(|e| CliError::Output(e.to_string()))?;
            }
        }
        Format::Text => write_text(rows, out).map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(())
}

fn cell(value: &Value) -> String {
    match value {
        Value::Null => "-".into(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.to_string(),
            (None, Some(x)) if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) => format!("{x:.4e}"),
            (None, Some(x)) => format!("{x:.4}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_text<T: Serialize>(rows: &[T], out: &mut dyn Write) -> std::io::Result<()> {
    let records: Vec<serde_json::Map<String, Value>> = rows
        .iter()
        .filter_map(|r| match serde_json::to_value(r) {
            Ok(Value::Object(map)) => Some(map),
            _ => None,
        })
        .collect();
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<&String> = first.keys().collect();
    let table: Vec<Vec<String>> =
        records.iter().map(|r| header.iter().map(|k| cell(&r[k.as_str()])).collect()).collect();
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(i, h)| table.iter().map(|row| row[i].chars().count()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.iter().map(|h| h.as_str()).collect()))?;
    for row in &table {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
