//! Plain-text click logs. One event per line, integer fields only, so a
//! write/read cycle reproduces the log byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::source::DetectionEvent;
use crate::{Error, Result};

const COLUMNS: &str = "detector,timestamp_ps";

/// Timestamped clicks plus the provenance needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    /// Hash of the generating config, 16 hex digits in the header.
    pub config_hash: u64,
    pub seed: u64,
    /// Sorted by timestamp, then detector.
    pub events: Vec<DetectionEvent>,
}

impl EventLog {
    pub fn new(config_hash: u64, seed: u64, mut events: Vec<DetectionEvent>) -> Self {
        events.sort_unstable();
        EventLog { config_hash, seed, events }
    }

    /// Renders the log in its canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# config_hash={:016x} seed={}", self.config_hash, self.seed);
        out.push_str(COLUMNS);
        out.push('\n');
        for e in &self.events {
            let _ = writeln!(out, "{},{}", e.detector, e.timestamp_ps);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse("missing header line".into()))?;
        let rest = header
            .strip_prefix("# config_hash=")
            .ok_or_else(|| Error::Parse(format!("bad header: {header:?}")))?;
        let (hash_hex, seed_part) = rest
            .split_once(" seed=")
            .ok_or_else(|| Error::Parse(format!("bad header: {header:?}")))?;
        let config_hash = u64::from_str_radix(hash_hex, 16)
            .map_err(|e| Error::Parse(format!("bad config hash {hash_hex:?}: {e}")))?;
        let seed: u64 = seed_part
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad seed {seed_part:?}: {e}")))?;
        match lines.next() {
            Some(COLUMNS) => {}
            other => return Err(Error::Parse(format!("expected {COLUMNS:?}, got {other:?}"))),
        }
        let mut events = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (det, ts) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: no comma in {line:?}", i + 3)))?;
            let detector: u8 = det
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: detector {det:?}: {e}", i + 3)))?;
            let timestamp_ps: i64 = ts
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: timestamp {ts:?}: {e}", i + 3)))?;
            events.push(DetectionEvent { timestamp_ps, detector });
        }
        if !events.is_sorted() {
            return Err(Error::Parse("events are not sorted by timestamp".into()));
        }
        Ok(EventLog { config_hash, seed, events })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}
