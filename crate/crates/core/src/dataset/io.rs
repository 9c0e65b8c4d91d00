use std::io::{Read, Write};

use super::{AttributeSchema, ClassLabel, Dataset};
use crate::error::{Error, Result};

/// Reads `attr1,...,attrN,class` CSV. The label column is always last.
pub fn load_csv<R: Read>(source: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::MalformedHeader("missing header row".into())),
    };
    if header.len() < 2 {
        return Err(Error::MalformedHeader(
            "need at least one attribute column and a class column".into(),
        ));
    }
    let names: Vec<String> = header
        .iter()
        .take(header.len() - 1)
        .map(|n| n.trim().trim_start_matches('\u{feff}').to_string())
        .collect();
    let schema = AttributeSchema::new(names).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let width = header.len();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::RaggedRow {
                row: line,
                expected: width,
                found: record.len(),
            });
        }
        let mut values = Vec::with_capacity(width - 1);
        for (c, cell) in record.iter().take(width - 1).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumeric {
                row: line,
                column: c + 1,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonNumeric {
                    row: line,
                    column: c + 1,
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        let raw = &record[width - 1];
        let label = ClassLabel::parse(raw).ok_or_else(|| Error::UnknownLabel {
            row: line,
            column: width,
            value: raw.to_string(),
        })?;
        rows.push(values);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(schema, rows, labels)
}

/// Writes the dataset as CSV with canonical label names. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(ds: &Dataset, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let mut header: Vec<&str> = ds.schema().names().iter().map(String::as_str).collect();
    header.push("class");
    writer.write_record(&header)?;
    let mut fields = Vec::with_capacity(header.len());
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        fields.clear();
        fields.extend(row.iter().map(|v| v.to_string()));
        fields.push(label.name().to_string());
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}
