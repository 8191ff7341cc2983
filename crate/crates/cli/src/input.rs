use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use walloc::PairedSample;

use crate::CliError;

/// Parses `arg` as inline JSON when it starts with `{`, otherwise as a path
/// to a JSON file.
pub fn json_arg<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_file(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid {what} JSON: {e}")))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

/// A sample read from CSV. `ys` is `None` for a single-column `x` file.
pub struct CsvSample {
    pub xs: Vec<f64>,
    pub ys: Option<Vec<f64>>,
}

impl CsvSample {
    pub fn paired(self) -> Result<PairedSample, CliError> {
        match self.ys {
            Some(ys) => PairedSample::new(self.xs, ys).map_err(CliError::bad_data),
            None => Err(CliError::data(
                "this variant needs an x,y sample; the file has only x",
            )),
        }
    }

    /// Pairs each `x` with itself when there is no `y` column.
    pub fn paired_or_self(self) -> Result<PairedSample, CliError> {
        match self.ys {
            Some(ys) => PairedSample::new(self.xs, ys).map_err(CliError::bad_data),
            None => PairedSample::self_paired(self.xs).map_err(CliError::bad_data),
        }
    }
}

pub fn read_csv(path: &Path) -> Result<CsvSample, CliError> {
    let text = read_file(path)?;
    parse_csv(&text)
}

fn parse_csv(text: &str) -> Result<CsvSample, CliError> {
    if text.trim().is_empty() {
        return Err(walloc::Error::EmptySample.into());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("CSV header: {e}")))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_y = match names.as_slice() {
        ["x", "y"] => true,
        ["x"] => false,
        _ => {
            return Err(CliError::data(format!(
                "CSV header must be `x,y` or `x`, found `{}`",
                names.join(",")
            )))
        }
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CliError::data(format!("CSV line {line}: {e}")))?;
        let field = |k: usize| -> Result<f64, CliError> {
            record[k]
                .parse::<f64>()
                .map_err(|e| CliError::data(format!("CSV line {line}, column {}: {e}", names[k])))
        };
        xs.push(field(0)?);
        if has_y {
            ys.push(field(1)?);
        }
    }
    if xs.is_empty() {
        return Err(walloc::Error::EmptySample.into());
    }
    Ok(CsvSample {
        xs,
        ys: has_y.then_some(ys),
    })
}
