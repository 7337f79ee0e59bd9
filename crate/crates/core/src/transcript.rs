//! Structured run transcripts. Every protocol run can emit a sequence of
//! events which serialize to JSON Lines; each line carries a format
//! version, a monotone tick, and an event name plus free-form fields.

use serde_json::{json, Map, Value};

pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub tick: u64,
    pub name: String,
    pub fields: Map<String, Value>,
}

/// Event collector. A disabled transcript drops everything, so protocol
/// code can log unconditionally.
#[derive(Debug, Default)]
pub struct Transcript {
    enabled: bool,
    tick: u64,
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript { enabled: true, tick: 0, events: Vec::new() }
    }

    pub fn disabled() -> Self {
        Transcript::default()
    }

    pub fn record(&mut self, name: &str, fields: Value) {
        if !self.enabled {
            return;
        }
        let fields = match fields {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        self.events.push(Event { tick: self.tick, name: name.to_string(), fields });
        self.tick += 1;
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            // Field order is fixed (v, t, ev, then payload keys in
            // insertion order) so equal runs give byte-equal output.
            let mut line = Map::new();
            line.insert("v".into(), json!(TRANSCRIPT_VERSION));
            line.insert("t".into(), json!(ev.tick));
            line.insert("ev".into(), json!(ev.name));
            for (k, v) in &ev.fields {
                line.insert(k.clone(), v.clone());
            }
            out.push_str(&Value::Object(line).to_string());
            out.push('\n');
        }
        out
    }
}
