//! SecureFrame binary layout:
//!
//! ```text
//! [u8 frame_type][u64 be seq][u8 sid_len][sid bytes][u32 be body_len][body]
//! ```
//!
//! Everything before `body` is the header; for sealed frames the header is
//! fed to the AEAD as associated data, so a frame cannot be re-typed,
//! re-sequenced, or moved to another session without failing
//! authentication. Handshake frames carry plaintext JSON bodies.

use crate::error::PalError;

/// Upper bound on a frame body; a length prefix beyond this is treated as a
/// protocol violation rather than an allocation request.
pub const MAX_FRAME_BODY: usize = 16 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum FrameType {
    ClientHello = 1,
    ServerHello = 2,
    ClientConfirm = 3,
    Data = 4,
    Heartbeat = 5,
    Close = 6,
}

impl FrameType {
    fn from_u8(v: u8) -> Result<FrameType, PalError> {
        Ok(match v {
            1 => FrameType::ClientHello,
            2 => FrameType::ServerHello,
            3 => FrameType::ClientConfirm,
            4 => FrameType::Data,
            5 => FrameType::Heartbeat,
            6 => FrameType::Close,
            other => return Err(PalError::protocol(format!("unknown frame type {other}"))),
        })
    }

    pub fn is_handshake(self) -> bool {
        matches!(self, FrameType::ClientHello | FrameType::ServerHello | FrameType::ClientConfirm)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureFrame {
    pub frame_type: FrameType,
    pub seq: u64,
    /// Empty until the server assigns a session id in server-hello.
    pub session_id: String,
    pub body: Vec<u8>,
}

impl SecureFrame {
    pub fn new(frame_type: FrameType, seq: u64, session_id: &str, body: Vec<u8>) -> Self {
        SecureFrame { frame_type, seq, session_id: session_id.to_string(), body }
    }

    /// Header bytes, also the AEAD associated data for sealed frames.
    pub fn header_bytes(&self) -> Vec<u8> {
        let sid = self.session_id.as_bytes();
        debug_assert!(sid.len() <= u8::MAX as usize);
        let mut out = Vec::with_capacity(1 + 8 + 1 + sid.len());
        out.push(self.frame_type as u8);
        out.extend_from_slice(&self.seq.to_be_bytes());
        out.push(sid.len() as u8);
        out.extend_from_slice(sid);
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header_bytes();
        out.extend_from_slice(&(self.body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<SecureFrame, PalError> {
        let err = || PalError::protocol("truncated frame");
        if buf.len() < 10 {
            return Err(err());
        }
        let frame_type = FrameType::from_u8(buf[0])?;
        let seq = u64::from_be_bytes(buf[1..9].try_into().unwrap());
        let sid_len = buf[9] as usize;
        let body_off = 10 + sid_len + 4;
        if buf.len() < body_off {
            return Err(err());
        }
        let session_id = std::str::from_utf8(&buf[10..10 + sid_len])
            .map_err(|_| PalError::protocol("session id is not utf-8"))?
            .to_string();
        let body_len =
            u32::from_be_bytes(buf[10 + sid_len..body_off].try_into().unwrap()) as usize;
        if body_len > MAX_FRAME_BODY {
            return Err(PalError::protocol(format!("frame body {body_len} exceeds limit")));
        }
        if buf.len() != body_off + body_len {
            return Err(err());
        }
        Ok(SecureFrame { frame_type, seq, session_id, body: buf[body_off..].to_vec() })
    }
}
