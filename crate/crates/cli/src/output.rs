use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::settings::Format;
use crate::CliError;

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::config(format!("output failed: {e}"))
}

/// Write `rows` as CSV (header from the field names) or a JSON array.
pub fn emit<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for row in rows {
                csv.serialize(row).map_err(io_error)?;
            }
            csv.flush().map_err(io_error)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows).map_err(io_error)?;
            writeln!(w).map_err(io_error)?;
        }
    }
    Ok(())
}

/// A single record: one CSV row, or a JSON object.
pub fn emit_one<T: Serialize>(row: &T, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    match format {
        Format::Csv => emit(std::slice::from_ref(row), format, out),
        Format::Json => {
            let mut w = sink(out)?;
            serde_json::to_writer_pretty(&mut w, row).map_err(io_error)?;
            writeln!(w).map_err(io_error)
        }
    }
}
