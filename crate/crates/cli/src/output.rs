use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Files produced by one run. Each is written to a temporary file in the
/// output directory and renamed into place once complete.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write<F>(&mut self, name: &str, fill: F) -> anyhow::Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> anyhow::Result<()>,
    {
        let target = self.dir.join(name);
        let path = write_atomic(&target, fill)?;
        self.written.push((name.to_string(), sha256_file(&path)?));
        Ok(path)
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.written.iter().map(|(n, _)| n.as_str())
    }

    /// Writes `<command>.manifest.json` describing inputs, settings and
    /// outputs. Contains no timestamps, so reruns reproduce it exactly.
    pub fn finish(mut self, command: &str, config: &RunConfig, inputs: &[PathBuf], extra: serde_json::Value) -> anyhow::Result<()> {
        #[derive(Serialize)]
        struct Input {
            path: String,
            sha256: String,
        }
        #[derive(Serialize)]
        struct Output<'a> {
            file: &'a str,
            sha256: &'a str,
        }
        let config_json = serde_json::to_string(&serde_json::json!({
            "config": config,
            "parameters": extra,
        }))?;
        let inputs: Vec<Input> = inputs
            .iter()
            .map(|p| {
                Ok(Input {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<anyhow::Result<_>>()?;
        self.written.sort();
        let manifest = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "core_version": framelens_core::VERSION,
            "command": command,
            "config": config,
            "parameters": extra,
            "config_sha256": hex::encode(Sha256::digest(config_json.as_bytes())),
            "inputs": inputs,
            "outputs": self.written.iter().map(|(f, h)| Output { file: f, sha256: h }).collect::<Vec<_>>(),
        });
        let name = format!("{command}.manifest.json");
        write_atomic(&self.dir.join(name), |w| {
            serde_json::to_writer_pretty(&mut *w, &manifest)?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        Ok(())
    }
}

pub fn write_atomic<F>(target: &Path, fill: F) -> anyhow::Result<PathBuf>
where
    F: FnOnce(&mut dyn Write) -> anyhow::Result<()>,
{
    let dir = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(target)
        .with_context(|| format!("cannot write {}", target.display()))?;
    Ok(target.to_path_buf())
}

pub fn sha256_file(p: &Path) -> anyhow::Result<String> {
    let mut f = BufReader::new(File::open(p).with_context(|| format!("cannot read {}", p.display()))?);
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Lowercase ASCII file-name fragment.
pub fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_write_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("x.csv");
        let r = write_atomic(&target, |w| {
            w.write_all(b"partial")?;
            anyhow::bail!("boom")
        });
        assert!(r.is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
        write_atomic(&target, |w| Ok(w.write_all(b"ok")?)).unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "ok");
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Orlando nightclub shooting"), "orlando_nightclub_shooting");
        assert_eq!(slug("  A/B  "), "a_b");
    }
}
