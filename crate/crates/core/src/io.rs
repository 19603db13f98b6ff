//! File formats: events CSV (`t,v`) with a `<stem>.meta.json` horizon
//! sidecar, signal JSON, and atomic writes.
//!
//! Floats are printed with Rust's shortest round-tripping representation,
//! so write-then-read is bit exact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{Event, EventSequence};

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    #[serde(rename = "T")]
    horizon: f64,
}

/// `dir/name.csv` → `dir/name.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().unwrap_or_default().to_string_lossy();
    csv.with_file_name(format!("{stem}.meta.json"))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, to_json_pretty(value)?.as_bytes())
}

/// `fs::read_to_string` with the path in the error message.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn events_to_csv(eta: &EventSequence) -> String {
    let mut out = String::from("t,v\n");
    for e in eta.events() {
        out.push_str(&format!("{},{}\n", e.t, e.v));
    }
    out
}

pub fn events_from_csv(text: &str, horizon: f64) -> Result<EventSequence> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "v" {
        return Err(Error::Parse(format!(
            "expected header 't,v', got '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut events = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        let field = |k: usize, name: &str| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Parse(format!("row {row}: missing field '{name}'")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {row}: field '{name}': {e}")))
        };
        events.push(Event::new(field(0, "t")?, field(1, "v")?));
    }
    EventSequence::new(horizon, events).map_err(|e| match e {
        Error::Domain(msg) => Error::Domain(format!("events CSV: {msg}")),
        other => other,
    })
}

/// Reads an events CSV. The horizon comes from `horizon` if given,
/// otherwise from the sidecar file.
pub fn read_events(path: &Path, horizon: Option<f64>) -> Result<EventSequence> {
    let horizon = match horizon {
        Some(h) => h,
        None => {
            let meta = sidecar_path(path);
            if !meta.exists() {
                return Err(Error::Parse(format!(
                    "no horizon: pass --horizon or provide {}",
                    meta.display()
                )));
            }
            read_json::<Meta>(&meta)?.horizon
        }
    };
    events_from_csv(&read_text(path)?, horizon)
        .map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            Error::Domain(msg) => Error::Domain(format!("{}: {msg}", path.display())),
            other => other,
        })
}

/// Writes the CSV and its horizon sidecar.
pub fn write_events(path: &Path, eta: &EventSequence) -> Result<()> {
    atomic_write(path, events_to_csv(eta).as_bytes())?;
    write_json(&sidecar_path(path), &Meta { horizon: eta.horizon() })
}
