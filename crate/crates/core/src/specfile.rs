//! JSON spec documents.
//!
//! ```json
//! {"alphabet": ["0", "1"], "forbidden": ["010"],
//!  "repeated": [{"word": "000", "multiplicity": 2}],
//!  "expected": {"f": [1, 2, 4, 8, 17]}}
//! ```
//!
//! `name` and `expected` are optional; `expected` lists known values that
//! the verify suite compares against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::langmodel::{LangError, ShiftSpec};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("malformed spec document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeatedEntry {
    pub word: String,
    pub multiplicity: u64,
}

/// Known values for a spec.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    /// `f(0), f(1), …`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<u64>>,
    /// Perron root, checked to `1e-9`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub forbidden: Vec<String>,
    #[serde(default)]
    pub repeated: Vec<RepeatedEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> Result<ShiftSpec, SpecFileError> {
        let syms: Vec<&str> = self.alphabet.iter().map(String::as_str).collect();
        let f: Vec<&str> = self.forbidden.iter().map(String::as_str).collect();
        let r: Vec<(&str, u64)> = self.repeated.iter().map(|e| (e.word.as_str(), e.multiplicity)).collect();
        Ok(ShiftSpec::parse(&syms, &f, &r)?)
    }

    /// Document for a spec, without name or expectations.
    pub fn from_spec(spec: &ShiftSpec) -> Self {
        SpecFile {
            name: None,
            alphabet: spec.alphabet().symbols().to_vec(),
            forbidden: spec.forbidden().iter().map(|w| spec.render(w.symbols())).collect(),
            repeated: spec
                .repeated()
                .iter()
                .map(|(w, m)| RepeatedEntry { word: spec.render(w.symbols()), multiplicity: *m })
                .collect(),
            expected: None,
        }
    }
}
