use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

pub const SCHEMA: &str = "nqfa/1";

/// Starts a report object with the schema tag and command name.
pub fn envelope(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    m.insert("command".into(), Value::from(command));
    m
}

pub fn to_json(map: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("reports serialise");
    s.push('\n');
    s
}

/// Writes to a sibling temporary file and renames it into place, so a
/// reader never sees a partial report. Without a path, prints.
pub fn emit(path: Option<&Path>, body: &str) -> io::Result<()> {
    let Some(path) = path else {
        let mut stdout = io::stdout().lock();
        stdout.write_all(body.as_bytes())?;
        return stdout.flush();
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, body)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// `1.234e-15` style, fixed so text reports do not depend on float
/// formatting details.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}
