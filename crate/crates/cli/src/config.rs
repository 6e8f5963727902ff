//! `--config` files: defaults for scoring mode and consensus weights.
//!
//! ```toml
//! mode = "gated"
//! weights = "D=1,C=0.5,I=0.25,N=0"
//! ```

use std::path::Path;

use ers_core::{ConsensusWeights, ScoringMode};
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Option<ScoringMode>,
    pub weights: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("config {path}: {message}")]
    Weights { path: String, message: String },
}

/// Effective defaults once a config file (if any) is applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Defaults {
    pub mode: Option<ScoringMode>,
    pub weights: ConsensusWeights,
}

impl Defaults {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        let config: Config = toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: display.clone(),
            source,
        })?;
        let weights = match &config.weights {
            Some(w) => w
                .parse()
                .map_err(|e: ers_core::consensus::ConsensusError| ConfigError::Weights {
                    path: display,
                    message: e.to_string(),
                })?,
            None => ConsensusWeights::default(),
        };
        Ok(Defaults {
            mode: config.mode,
            weights,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), text).unwrap();
        file
    }

    #[test]
    fn reads_mode_and_weights() {
        let f = write("mode = \"gated\"\nweights = \"D=1,C=0.75,I=0.25,N=0\"\n");
        let d = Defaults::load(f.path()).unwrap();
        assert_eq!(d.mode, Some(ScoringMode::Gated));
        assert_eq!(d.weights.conditional.to_string(), "0.75");
    }

    #[test]
    fn empty_file_keeps_defaults() {
        let f = write("");
        assert_eq!(Defaults::load(f.path()).unwrap(), Defaults::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Defaults::load(write("mode = \"fuzzy\"").path()),
            Err(ConfigError::Parse { .. })
        ));
        assert!(matches!(
            Defaults::load(write("colour = 1").path()),
            Err(ConfigError::Parse { .. })
        ));
        assert!(matches!(
            Defaults::load(write("weights = \"D=0\"").path()),
            Err(ConfigError::Weights { .. })
        ));
    }
}
