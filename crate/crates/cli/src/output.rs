use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use folner_lab::systems::HASH_VERSION;
use serde_json::{json, Map, Value};

use crate::commands::Row;

pub const CSV_COLUMNS: &str = "n,statistic,value,stderr";

pub fn header(command: &str) -> String {
    format!("# folner-lab {} hash={HASH_VERSION} command={command}", env!("CARGO_PKG_VERSION"))
}

/// The versioned header line followed by one line per row.
pub fn csv(command: &str, rows: &[Row]) -> String {
    let mut out = format!("{}\n{CSV_COLUMNS}\n", header(command));
    for r in rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let se = r.stderr.map(|s| s.to_string()).unwrap_or_default();
        writeln!(out, "{n},{},{},{se}", r.statistic, r.value).unwrap();
    }
    out
}

pub struct Summary<'a> {
    pub command: &'a str,
    pub verdict: &'a str,
    pub exit_code: i32,
    pub seed: u64,
    pub classifier_seed: u64,
    pub gaps: Map<String, Value>,
    pub report: Value,
    pub error: Option<String>,
}

impl Summary<'_> {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "gaps": self.gaps,
            "seeds": { "seed": self.seed, "classifier_seed": self.classifier_seed },
            "version": { "crate": env!("CARGO_PKG_VERSION"), "hash": HASH_VERSION },
            "error": self.error,
            "report": self.report,
        })
    }
}

pub fn write(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)
}
