use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::Format;

pub const FORMAT_VERSION: &str = "1";

/// One command's output. Everything except `timestamp` is a function of
/// the invocation and seed.
#[derive(Debug, Serialize)]
pub struct Report<P: Serialize> {
    pub format_version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub timestamp: u64,
    pub payload: P,
}

impl<P: Serialize> Report<P> {
    pub fn new(command: &str, seed: Option<u64>, payload: P) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            seed,
            timestamp,
            payload,
        }
    }

    /// JSON, or a header plus the given text body.
    pub fn render(&self, format: Format, text: impl FnOnce(&P) -> String) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = format!("# cvtx report v{} :: {}\n", self.format_version, self.command);
                if let Some(seed) = self.seed {
                    s.push_str(&format!("# seed {seed}\n"));
                }
                s.push_str(&text(&self.payload));
                s
            }
        }
    }
}
