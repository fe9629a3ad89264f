//! Optional TOML run file. Keys are the long flag names; a flag given on the
//! command line wins over the same key in the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub x0: Option<String>,
    pub map: Option<String>,
    pub steps: Option<u64>,
    pub mech: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub precision: Option<usize>,
    pub max_digits: Option<usize>,
    pub p: Option<String>,
    pub n: Option<Vec<u64>>,
    pub eps: Option<String>,
    pub p_c: Option<String>,
    pub p_e_given_c: Option<String>,
    pub p_e_given_not_c: Option<String>,
    pub behavior: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub max_denominator: Option<u64>,
    pub cap: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.message().to_string(),
        })
    }
}

/// Flag value if given, otherwise the file value.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn require<T>(value: Option<T>, name: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::Missing(name))
}

/// Resolved flags in the order they are echoed in the output header.
#[derive(Debug, Default)]
pub struct Resolved {
    subcommand: &'static str,
    flags: Vec<(&'static str, String)>,
}

impl Resolved {
    pub fn new(subcommand: &'static str) -> Self {
        Resolved {
            subcommand,
            flags: Vec::new(),
        }
    }

    pub fn set(&mut self, flag: &'static str, value: impl ToString) {
        self.flags.push((flag, value.to_string()));
    }

    /// `# fiq <version> command: fiq <subcommand> --flag value ...`
    pub fn header(&self) -> String {
        let mut words = vec!["fiq".to_string(), self.subcommand.to_string()];
        for (flag, value) in &self.flags {
            words.push(format!("--{flag}"));
            words.push(value.clone());
        }
        let line = shlex::try_join(words.iter().map(String::as_str))
            .expect("resolved values never contain NUL bytes");
        format!("# fiq {} command: {line}\n", env!("CARGO_PKG_VERSION"))
    }
}
