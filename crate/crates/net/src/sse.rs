//! Minimal server-sent-events framing. Streamed replies are a sequence of
//! data events, one encoded reply document per event, closed by an event
//! named `done`. Documents are compact JSON and never contain newlines, so
//! single-line data fields suffice.

/// Name of the terminal event that closes every stream.
pub const DONE_EVENT: &str = "done";

pub const SSE_CONTENT_TYPE: &str = "text/event-stream";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SseEvent {
    pub name: Option<String>,
    pub data: String,
}

pub fn format_event(name: Option<&str>, data: &str) -> String {
    debug_assert!(!data.contains('\n'), "event data must be single-line");
    match name {
        Some(n) => format!("event: {n}\ndata: {data}\n\n"),
        None => format!("data: {data}\n\n"),
    }
}

/// Terminal marker event.
pub fn format_done() -> String {
    format_event(Some(DONE_EVENT), "{}")
}

/// Parses a complete event-stream body into ordered events. Unknown field
/// lines and comments are ignored, matching the wire grammar.
pub fn parse_stream(body: &str) -> Vec<SseEvent> {
    let mut events = Vec::new();
    let mut name: Option<String> = None;
    let mut data: Option<String> = None;
    for line in body.lines() {
        if line.is_empty() {
            if name.is_some() || data.is_some() {
                events.push(SseEvent { name: name.take(), data: data.take().unwrap_or_default() });
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("event:") {
            name = Some(rest.trim_start().to_string());
        } else if let Some(rest) = line.strip_prefix("data:") {
            data = Some(rest.trim_start().to_string());
        }
    }
    if name.is_some() || data.is_some() {
        events.push(SseEvent { name, data: data.unwrap_or_default() });
    }
    events
}
