use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Decompositions {
    pub one: bool,
    pub two: bool,
}

impl Decompositions {
    pub const BOTH: Self = Self { one: true, two: true };

    pub fn labels(self) -> Vec<String> {
        let mut v = Vec::new();
        if self.one {
            v.push("I".to_owned());
        }
        if self.two {
            v.push("II".to_owned());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    /// Excluded from the regressors and echoed per row.
    pub response_column: Option<String>,
    /// `None` means the conventional `2(p + 1)/n`.
    pub threshold: Option<f64>,
    pub decompositions: Decompositions,
    pub output_format: OutputFormat,
    pub verify: bool,
    /// Rows shown in text mode.
    pub top_k: usize,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            response_column: None,
            threshold: None,
            decompositions: Decompositions::BOTH,
            output_format: OutputFormat::Text,
            verify: false,
            top_k: 10,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("threshold must be positive, got {t}")));
            }
        }
        if self.top_k == 0 {
            return Err(CliError::Config("top-k must be at least 1".into()));
        }
        Ok(())
    }
}
