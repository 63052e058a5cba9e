use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Tabular text with a leading `# config_digest=` line.
pub fn stamped(digest: &str, body: &str) -> String {
    format!("# config_digest={digest}\n{body}")
}

/// One JSON object per line, each carrying `config_digest`.
pub fn jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>, digest: &str) -> Result<String> {
    let mut out = String::new();
    for row in rows {
        let mut v = serde_json::to_value(row)?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("config_digest".into(), digest.into());
        }
        out.push_str(&serde_json::to_string(&v)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
