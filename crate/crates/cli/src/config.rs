//! Run configuration: optional `key = value` file merged under command-line
//! flags, plus the provenance digest stamped into every output.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Result;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

const KNOWN_KEYS: &[&str] = &[
    "corpus",
    "conllu",
    "substitutions",
    "coref",
    "lexicon",
    "model",
    "predictions",
    "gold",
    "seed",
    "cap",
    "train_fraction",
    "min_mentions",
    "window",
    "strict",
    "jobs",
    "top_k",
];

/// Values from a config file. Keys accept `-` or `_`.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            let kind = if e.kind() == std::io::ErrorKind::NotFound {
                "missing_input"
            } else {
                "io"
            };
            Failure::new(kind, format!("{}: {e}", path.display()))
        })?;
        let mut cfg = Self::parse(&text).map_err(|f| f.context(format!("{}", path.display())))?;
        cfg.base = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Failure::new("config", format!("line {}: expected key = value", i + 1))
            })?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Failure::new(
                    "config",
                    format!("line {}: unknown key `{key}`", i + 1),
                ));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values, base: None })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Resolves each setting as flag, then config file, then default, and
/// remembers what it resolved for the digest.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    params: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    pub fn new(command: &str, file: &'a ConfigFile) -> Self {
        let mut params = BTreeMap::new();
        params.insert("command".to_string(), command.to_string());
        Resolver {
            file,
            params,
            inputs: BTreeMap::new(),
        }
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.file.raw(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Failure::new("config", format!("`{key}`: {e}")).into()),
        }
    }

    pub fn opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        if let Some(v) = &value {
            self.params.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn value<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T>
    where
        T::Err: Display,
    {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.params.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool> {
        let v = flag || self.file_value::<bool>(key)?.unwrap_or(false);
        self.params.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// An input path, optional. Config-file paths are relative to the file.
    /// The file's content hash, not its name, enters the digest.
    pub fn input(&mut self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
        let path = match flag {
            Some(p) => Some(p),
            None => self.file.raw(key).map(|raw| match &self.file.base {
                Some(base) if Path::new(raw).is_relative() => base.join(raw),
                _ => PathBuf::from(raw),
            }),
        };
        if let Some(p) = &path {
            let bytes = std::fs::read(p).map_err(|e| {
                let kind = if e.kind() == std::io::ErrorKind::NotFound {
                    "missing_input"
                } else {
                    "io"
                };
                Failure::new(kind, format!("{key}: {}: {e}", p.display()))
            })?;
            self.inputs
                .insert(key.to_string(), hex::encode(Sha256::digest(&bytes)));
        }
        Ok(path)
    }

    pub fn required(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf> {
        self.input(key, flag)?.ok_or_else(|| {
            Failure::new(
                "missing_input",
                format!("--{} is required", key.replace('_', "-")),
            )
            .into()
        })
    }

    /// Hex SHA-256 over the resolved parameters and input hashes.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.params {
            h.update(format!("param {k}={v}\n"));
        }
        for (k, v) in &self.inputs {
            h.update(format!("input {k}={v}\n"));
        }
        hex::encode(h.finalize())
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn inputs(&self) -> &BTreeMap<String, String> {
        &self.inputs
    }
}
