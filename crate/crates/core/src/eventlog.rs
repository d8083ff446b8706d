//! Timestamped scenario events, the single source for all metrics.
//!
//! Records are totally ordered by (t, insertion sequence), so logs built by
//! the same deterministic run serialize identically. Persistence is one JSON
//! record per line.

use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::PalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Send,
    QueueStart,
    ServiceStart,
    ServiceEnd,
    FirstToken,
    Done,
    Kill,
    Reconnect,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    pub agent: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bytes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attempt: Option<u32>,
}

impl EventRecord {
    pub fn new(t: f64, kind: EventKind, agent: impl Into<String>) -> EventRecord {
        EventRecord { t, kind, request_id: None, agent: agent.into(), bytes: None, attempt: None }
    }

    pub fn with_request(mut self, request_id: impl Into<String>) -> EventRecord {
        self.request_id = Some(request_id.into());
        self
    }

    pub fn with_bytes(mut self, bytes: u64) -> EventRecord {
        self.bytes = Some(bytes);
        self
    }

    pub fn with_attempt(mut self, attempt: u32) -> EventRecord {
        self.attempt = Some(attempt);
        self
    }
}

/// Append-friendly event collector. Accepts appends from concurrent tasks;
/// `records()` returns them sorted by (t, insertion sequence), which keeps
/// the sort stable for equal timestamps.
#[derive(Debug, Default, Clone)]
pub struct EventLog {
    inner: Arc<Mutex<Vec<(u64, EventRecord)>>>,
}

impl EventLog {
    pub fn new() -> EventLog {
        EventLog::default()
    }

    pub fn append(&self, rec: EventRecord) {
        let mut inner = self.inner.lock().unwrap();
        let seq = inner.len() as u64;
        inner.push((seq, rec));
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<EventRecord> {
        let mut inner = self.inner.lock().unwrap().clone();
        inner.sort_by(|(sa, a), (sb, b)| {
            a.t.partial_cmp(&b.t).expect("event timestamps are finite").then(sa.cmp(sb))
        });
        inner.into_iter().map(|(_, r)| r).collect()
    }

    pub fn from_records(records: Vec<EventRecord>) -> EventLog {
        let log = EventLog::new();
        for r in records {
            log.append(r);
        }
        log
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), PalError> {
        for rec in self.records() {
            let line = serde_json::to_string(&rec)
                .map_err(|e| PalError::encode(format!("event record: {e}")))?;
            writeln!(w, "{line}").map_err(|e| PalError::encode(format!("event log io: {e}")))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<EventLog, PalError> {
        let log = EventLog::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| PalError::decode(format!("event log io: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: EventRecord = serde_json::from_str(&line)
                .map_err(|e| PalError::decode(format!("event log line {}: {e}", i + 1)))?;
            log.append(rec);
        }
        Ok(log)
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_sort_by_time_then_insertion() {
        let log = EventLog::new();
        log.append(EventRecord::new(2.0, EventKind::Done, "b"));
        log.append(EventRecord::new(1.0, EventKind::Send, "a"));
        log.append(EventRecord::new(1.0, EventKind::QueueStart, "a"));
        let recs = log.records();
        assert_eq!(recs[0].kind, EventKind::Send);
        assert_eq!(recs[1].kind, EventKind::QueueStart);
        assert_eq!(recs[2].kind, EventKind::Done);
    }

    #[test]
    fn jsonl_round_trip_is_identical() {
        let log = EventLog::new();
        log.append(
            EventRecord::new(0.5, EventKind::Send, "driver").with_request("r1").with_bytes(120),
        );
        log.append(EventRecord::new(0.9, EventKind::Kill, "w3"));
        log.append(
            EventRecord::new(1.5, EventKind::Done, "driver").with_request("r1").with_attempt(2),
        );
        let text = log.to_jsonl_string();
        let back = EventLog::read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(back.records(), log.records());
        assert_eq!(back.to_jsonl_string(), text);
    }

    #[test]
    fn kind_names_are_snake_case_on_the_wire() {
        let rec = EventRecord::new(0.0, EventKind::ServiceStart, "w1");
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["kind"], "service_start");
        let rec = EventRecord::new(0.0, EventKind::FirstToken, "w1");
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["kind"], "first_token");
    }

    #[test]
    fn absent_options_are_omitted() {
        let rec = EventRecord::new(0.0, EventKind::Probe, "probe");
        let text = serde_json::to_string(&rec).unwrap();
        assert!(!text.contains("request_id"));
        assert!(!text.contains("bytes"));
        assert!(!text.contains("attempt"));
    }
}
