//! Itemized pass/fail reports shared by checkers and replays.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub items: Vec<ReportItem>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caveat: Option<String>,
}

impl Report {
    pub fn new(kind: impl Into<String>) -> Self {
        Report {
            kind: kind.into(),
            items: Vec::new(),
            caveat: None,
        }
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveat = Some(caveat.into());
        self
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.items.push(ReportItem {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records `Ok(())` as a pass and `Err(detail)` as a failure.
    pub fn record(&mut self, name: &str, outcome: std::result::Result<(), String>) {
        match outcome {
            Ok(()) => self.push(name, true, "ok"),
            Err(detail) => self.push(name, false, detail),
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn item(&self, name: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|i| !i.passed)
            .map(|i| i.name.as_str())
            .collect()
    }
}
