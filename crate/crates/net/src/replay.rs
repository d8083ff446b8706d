//! Server-side replay coalescing. A duplicate request inside the window,
//! keyed by its idempotency or correlation id, produces the cached response
//! body and no second application effect.

use std::collections::HashMap;
use std::sync::Mutex;

use serde_json::Value;

pub const DEFAULT_REPLAY_WINDOW_SECS: f64 = 60.0;

pub struct ReplayCache {
    window: f64,
    entries: Mutex<HashMap<String, (f64, Value)>>,
}

impl ReplayCache {
    pub fn new(window: f64) -> Self {
        ReplayCache { window, entries: Mutex::new(HashMap::new()) }
    }

    /// Cached response for `key` if stored within the window. Expired
    /// entries are pruned on the way through. Empty keys never hit.
    pub fn lookup(&self, key: &str, now: f64) -> Option<Value> {
        if key.is_empty() {
            return None;
        }
        let mut entries = self.entries.lock().unwrap();
        entries.retain(|_, (t, _)| now - *t <= self.window);
        entries.get(key).map(|(_, v)| v.clone())
    }

    pub fn store(&self, key: &str, now: f64, response: Value) {
        if key.is_empty() {
            return;
        }
        self.entries.lock().unwrap().insert(key.to_string(), (now, response));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn duplicate_within_window_returns_identical_body() {
        let cache = ReplayCache::new(60.0);
        assert_eq!(cache.lookup("k1", 0.0), None);
        cache.store("k1", 0.0, json!({"n": 1}));
        assert_eq!(cache.lookup("k1", 59.9), Some(json!({"n": 1})));
    }

    #[test]
    fn entry_expires_after_window() {
        let cache = ReplayCache::new(60.0);
        cache.store("k1", 0.0, json!(1));
        assert_eq!(cache.lookup("k1", 60.5), None);
    }

    #[test]
    fn empty_key_is_never_cached() {
        let cache = ReplayCache::new(60.0);
        cache.store("", 0.0, json!(1));
        assert_eq!(cache.lookup("", 0.0), None);
    }

    #[test]
    fn distinct_keys_do_not_collide() {
        let cache = ReplayCache::new(60.0);
        cache.store("a", 0.0, json!(1));
        cache.store("b", 0.0, json!(2));
        assert_eq!(cache.lookup("a", 1.0), Some(json!(1)));
        assert_eq!(cache.lookup("b", 1.0), Some(json!(2)));
    }
}
