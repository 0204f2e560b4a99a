//! Reading samples from files or the bundled data sets.

use std::path::Path;

use glfr_stress::datasets::{self, DataSet};

use crate::args::InputFormat;
use crate::error::CliError;

const BUILTIN: &str = "builtin:";

/// Names accepted after `builtin:`.
pub const BUILTIN_NAMES: [&str; 4] = ["jute_10mm", "jute_20mm", "simulated_x", "simulated_y"];

fn builtin(name: &str) -> Option<DataSet> {
    match name {
        "jute_10mm" => Some(datasets::jute_10mm()),
        "jute_20mm" => Some(datasets::jute_20mm()),
        "simulated_x" => Some(datasets::simulated_x()),
        "simulated_y" => Some(datasets::simulated_y()),
        _ => None,
    }
}

/// Reads one numeric column. Parse errors carry the file name.
pub fn ingest(path: &Path, format: InputFormat, column: Option<&str>) -> Result<DataSet, CliError> {
    let shown = path.display().to_string();
    if let Some(name) = shown.strip_prefix(BUILTIN) {
        return builtin(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown data set `{name}`; choose one of {}",
                BUILTIN_NAMES.join(", ")
            ))
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    let csv = match format {
        InputFormat::Csv => true,
        InputFormat::Whitespace => false,
        InputFormat::Auto => path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    let parsed = if csv {
        datasets::parse_csv(&shown, &text, column)
    } else {
        datasets::parse_whitespace(&shown, &text)
    };
    parsed.map_err(|e| CliError::Input { path: shown, source: e })
}
