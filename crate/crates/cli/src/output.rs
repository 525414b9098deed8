//! Output envelope shared by every subcommand.
//!
//! JSON keys come out sorted (serde_json's default map is ordered), numbers
//! that are not exact integers are written as strings, so parsing and
//! re-emitting an envelope reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use viswalk::numtheory::{ExactRational, Interval};

/// Directory that receives output files when `--output` is not given.
pub const OUT_DIR_ENV: &str = "VISWALK_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub struct Envelope {
    pub command: &'static str,
    pub parameters: BTreeMap<String, String>,
    pub results: Value,
    pub seed: Option<u64>,
    pub extra_metadata: Map<String, Value>,
    /// CSV header followed by rows.
    pub table: Vec<Vec<String>>,
}

impl Envelope {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            results: Value::Null,
            seed: None,
            extra_metadata: Map::new(),
            table: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn to_json(&self) -> Value {
        let mut metadata = self.extra_metadata.clone();
        metadata.insert("generator".into(), json!("viswalk"));
        metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        metadata.insert("seed".into(), json!(self.seed));
        metadata.insert(
            "timestamp".into(),
            json!(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        );
        json!({
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "metadata": metadata,
        })
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &self.table {
                    w.write_record(row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
        }
    }

    /// Writes to `output`, else into `$VISWALK_OUT_DIR`, else to stdout.
    pub fn emit(&self, format: Format, output: Option<PathBuf>) -> io::Result<()> {
        let text = self.render(format).map_err(io::Error::other)?;
        let target = output.or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|d| !d.is_empty())
                .map(|d| PathBuf::from(d).join(format!("{}.{}", self.command, format.extension())))
        });
        match target {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(&path, text)?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
            None => io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

/// Shortest round-trip decimal.
pub fn decimal(x: f64) -> String {
    format!("{x}")
}

/// An interval as a midpoint with its half-width.
pub fn interval_json(i: &Interval) -> Value {
    json!({
        "value": decimal(i.midpoint()),
        "half_width": decimal(i.half_width()),
        "lower": decimal(i.lower()),
        "upper": decimal(i.upper()),
    })
}

/// An exact rational together with its nearest double.
pub fn rational_json(r: &ExactRational) -> Value {
    json!({
        "exact": r.to_string(),
        "decimal": decimal(r.to_f64()),
    })
}
