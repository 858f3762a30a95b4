//! Suite configuration: a flat TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::output::Format;
use crate::Failure;

/// Keys accepted in a configuration file; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub entry: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub check: Option<Vec<String>>,
    pub manifest: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("malformed config {}: {e}", path.display())))
    }
}

/// Resolved settings of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub entry: String,
    pub samples: usize,
    pub seed: u64,
    /// Overrides every tolerance when set.
    pub tol: Option<f64>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub checks: Vec<String>,
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

/// Command-line values; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub entry: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub check: Vec<String>,
    pub manifest: Option<PathBuf>,
}

pub const DEFAULT_SAMPLES: usize = 20;

impl SuiteConfig {
    /// Flags win over the file; the file wins over defaults.
    pub fn resolve(flags: Flags, file: ConfigFile) -> Result<Self, Failure> {
        let entry = flags
            .entry
            .or(file.entry)
            .ok_or_else(|| Failure::Usage("no entry given (use --entry or the config key `entry`)".into()))?;
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(Failure::Usage(format!("tolerance must be positive, got {t}")));
            }
        }
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Failure::Usage("sample count must be positive".into()));
        }
        let checks = if flags.check.is_empty() { file.check.unwrap_or_default() } else { flags.check };
        Ok(Self {
            entry,
            samples,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            tol,
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            out: flags.out.or(file.out),
            checks,
            manifest: flags.manifest.or(file.manifest),
        })
    }
}
