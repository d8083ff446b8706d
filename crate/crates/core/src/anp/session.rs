//! Established secure session: directional ChaCha20-Poly1305 keys, strictly
//! increasing sequence numbers per direction, replay rejection, and the
//! heartbeat liveness rule (a peer silent past the timeout is dead).

use chacha20poly1305::aead::{Aead, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, KeyInit, Nonce};

use super::frame::{FrameType, SecureFrame};
use crate::error::PalError;

pub const DEFAULT_HEARTBEAT_INTERVAL_SECS: f64 = 10.0;
pub const DEFAULT_HEARTBEAT_TIMEOUT_SECS: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionRole {
    Client,
    Server,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Liveness {
    Alive,
    /// No frame from the peer for longer than the timeout.
    Dead { silent_for: f64 },
}

impl std::fmt::Debug for SecureSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Key material stays out of debug output.
        f.debug_struct("SecureSession")
            .field("session_id", &self.session_id)
            .field("peer_did", &self.peer_did)
            .field("role", &self.role)
            .field("send_seq", &self.send_seq)
            .field("recv_last", &self.recv_last)
            .finish_non_exhaustive()
    }
}

pub struct SecureSession {
    pub session_id: String,
    pub peer_did: String,
    pub role: SessionRole,
    send: ChaCha20Poly1305,
    recv: ChaCha20Poly1305,
    /// Next sequence number this side will send.
    send_seq: u64,
    /// Highest sequence number accepted from the peer.
    recv_last: Option<u64>,
    heartbeat_interval: f64,
    heartbeat_timeout: f64,
    last_peer_frame_at: f64,
}

fn nonce_for(seq: u64) -> Nonce {
    let mut n = [0u8; 12];
    n[4..].copy_from_slice(&seq.to_be_bytes());
    Nonce::from(n)
}

impl SecureSession {
    pub(super) fn from_keys(
        session_id: String,
        peer_did: String,
        role: SessionRole,
        send_key: [u8; 32],
        recv_key: [u8; 32],
        established_at: f64,
    ) -> Self {
        SecureSession {
            session_id,
            peer_did,
            role,
            send: ChaCha20Poly1305::new(Key::from_slice(&send_key)),
            recv: ChaCha20Poly1305::new(Key::from_slice(&recv_key)),
            send_seq: 1,
            recv_last: None,
            heartbeat_interval: DEFAULT_HEARTBEAT_INTERVAL_SECS,
            heartbeat_timeout: DEFAULT_HEARTBEAT_TIMEOUT_SECS,
            last_peer_frame_at: established_at,
        }
    }

    pub fn set_heartbeat(&mut self, interval: f64, timeout: f64) {
        self.heartbeat_interval = interval;
        self.heartbeat_timeout = timeout;
    }

    pub fn heartbeat_interval(&self) -> f64 {
        self.heartbeat_interval
    }

    /// Seals `plaintext` into the next outbound frame. The header
    /// (type, seq, session id) is authenticated as associated data.
    pub fn seal(&mut self, frame_type: FrameType, plaintext: &[u8]) -> SecureFrame {
        debug_assert!(!frame_type.is_handshake(), "handshake frames are not sealed");
        let seq = self.send_seq;
        self.send_seq += 1;
        let mut frame = SecureFrame::new(frame_type, seq, &self.session_id, Vec::new());
        let aad = frame.header_bytes();
        frame.body = self
            .send
            .encrypt(&nonce_for(seq), Payload { msg: plaintext, aad: &aad })
            .expect("chacha20poly1305 encryption is infallible for in-memory buffers");
        frame
    }

    pub fn heartbeat(&mut self) -> SecureFrame {
        self.seal(FrameType::Heartbeat, b"")
    }

    /// Opens an inbound frame: session id must match, sequence must be
    /// strictly greater than anything seen (replays rejected), and the AEAD
    /// tag must verify against the header.
    pub fn open(&mut self, frame: &SecureFrame, now: f64) -> Result<Vec<u8>, PalError> {
        if frame.session_id != self.session_id {
            return Err(PalError::protocol(format!(
                "frame for session '{}' arrived on session '{}'",
                frame.session_id, self.session_id
            )));
        }
        if frame.frame_type.is_handshake() {
            return Err(PalError::protocol("handshake frame on established session"));
        }
        if let Some(last) = self.recv_last {
            if frame.seq <= last {
                return Err(PalError::protocol(format!(
                    "replay rejected: seq {} not above {}",
                    frame.seq, last
                )));
            }
        }
        let aad = frame.header_bytes();
        let plaintext = self
            .recv
            .decrypt(&nonce_for(frame.seq), Payload { msg: &frame.body, aad: &aad })
            .map_err(|_| PalError::protocol("frame authentication failed"))?;
        self.recv_last = Some(frame.seq);
        self.last_peer_frame_at = now;
        Ok(plaintext)
    }

    /// Any authenticated peer frame counts as liveness, heartbeats included.
    pub fn note_peer_frame(&mut self, now: f64) {
        self.last_peer_frame_at = now;
    }

    pub fn detect_failure(&self, now: f64) -> Liveness {
        let silent_for = now - self.last_peer_frame_at;
        if silent_for > self.heartbeat_timeout {
            Liveness::Dead { silent_for }
        } else {
            Liveness::Alive
        }
    }
}
