//! Run manifests: `key=value` lines describing everything an output depends
//! on (tool version, resolved settings, seed, input digests). Keys appear in
//! insertion order; nothing time- or machine-dependent is recorded, so equal
//! manifests mean byte-identical outputs.

use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = RunManifest::default();
        m.set("tool", env!("CARGO_PKG_NAME"));
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    /// Records an input file's path and SHA-256.
    pub fn input(&mut self, name: &str, path: &std::path::Path, contents: &[u8]) -> &mut Self {
        self.set(&format!("input.{name}"), path.display());
        self.set(&format!("input.{name}.sha256"), sha256_hex(contents))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let entries = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect::<Option<Vec<_>>>()?;
        Some(RunManifest { entries })
    }
}
