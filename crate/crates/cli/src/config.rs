//! Scenario files: flat `key = value` TOML using the `ScenarioConfig` field names.

use std::path::{Path, PathBuf};

use multicell_core::ScenarioConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: line {line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}: {source}")]
    Invalid {
        origin: String,
        #[source]
        source: multicell_core::Error,
    },
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses scenario text; `origin` names the source in error messages.
/// Missing keys keep their defaults, unknown keys are rejected.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        origin: origin.to_string(),
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validate().map_err(|source| ConfigError::Invalid {
        origin: origin.to_string(),
        source,
    })?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config_str("", "t").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn integers_accepted_for_densities() {
        let c = parse_config_str("lambda_s = 2000\nM = 3\nN_RB = 4\nrho = 2.5", "t").unwrap();
        assert_eq!((c.lambda_s, c.multicell_size, c.n_rb, c.rho), (2000.0, 3, 4, 2.5));
    }

    #[test]
    fn infinite_backhaul() {
        assert!(parse_config_str("rho = inf", "t").unwrap().rho.is_infinite());
    }

    #[test]
    fn zero_multicell_size_is_rejected_by_name() {
        match parse_config_str("M = 0", "t") {
            Err(ConfigError::Invalid {
                source: multicell_core::Error::InvalidParameter { name, .. },
                ..
            }) => assert_eq!(name, "M"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_config_str("M = 2\n\nbogus = 1\n", "t") {
            Err(ConfigError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_config_str("lambda_s = 1\nlambda_h = \n", "t") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
