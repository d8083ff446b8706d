//! Async frame IO for the ANP socket. The connection starts as an HTTP/1.1
//! upgrade on the socket path, then both directions speak the secure-frame
//! binary layout, which is self-delimiting.

use agentwire_core::anp::{SecureFrame, MAX_FRAME_BODY};
use agentwire_core::PalError;
use tokio::io::{AsyncRead, AsyncReadExt, AsyncWrite, AsyncWriteExt};

/// Socket path the upgrade request must name.
pub const SOCKET_PATH: &str = "/ws";

pub const UPGRADE_PROTOCOL: &str = "anp/1";

pub fn upgrade_request(host: &str) -> String {
    format!(
        "GET {SOCKET_PATH} HTTP/1.1\r\nHost: {host}\r\nUpgrade: {UPGRADE_PROTOCOL}\r\nConnection: Upgrade\r\n\r\n"
    )
}

pub fn upgrade_response() -> String {
    format!(
        "HTTP/1.1 101 Switching Protocols\r\nUpgrade: {UPGRADE_PROTOCOL}\r\nConnection: Upgrade\r\n\r\n"
    )
}

const PREAMBLE_LIMIT: usize = 8 * 1024;

/// Reads an HTTP preamble up to and including the blank line. Byte-at-a-time
/// is fine here: preambles are tiny and happen once per connection.
pub async fn read_preamble<R: AsyncRead + Unpin>(r: &mut R) -> Result<String, PalError> {
    let mut buf = Vec::new();
    let mut byte = [0u8; 1];
    while !buf.ends_with(b"\r\n\r\n") {
        if buf.len() >= PREAMBLE_LIMIT {
            return Err(PalError::protocol("http preamble exceeds limit"));
        }
        let n = r.read(&mut byte).await.map_err(|e| PalError::conn(format!("preamble: {e}")))?;
        if n == 0 {
            return Err(PalError::conn("connection closed during preamble"));
        }
        buf.push(byte[0]);
    }
    String::from_utf8(buf).map_err(|_| PalError::protocol("preamble is not utf-8"))
}

/// Writes one frame; returns the exact bytes that went on the wire.
pub async fn write_frame<W: AsyncWrite + Unpin>(
    w: &mut W,
    frame: &SecureFrame,
) -> Result<Vec<u8>, PalError> {
    let bytes = frame.to_bytes();
    w.write_all(&bytes).await.map_err(|e| PalError::conn(format!("write frame: {e}")))?;
    w.flush().await.map_err(|e| PalError::conn(format!("flush frame: {e}")))?;
    Ok(bytes)
}

/// Reads one complete frame; returns it with the exact wire bytes.
pub async fn read_frame<R: AsyncRead + Unpin>(
    r: &mut R,
) -> Result<(SecureFrame, Vec<u8>), PalError> {
    let io_err = |e: std::io::Error| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            PalError::conn("connection closed")
        } else {
            PalError::conn(format!("read frame: {e}"))
        }
    };
    // Header prefix: type (1) + seq (8) + session id length (1).
    let mut head = [0u8; 10];
    r.read_exact(&mut head).await.map_err(io_err)?;
    let sid_len = head[9] as usize;
    let mut rest = vec![0u8; sid_len + 4];
    r.read_exact(&mut rest).await.map_err(io_err)?;
    let body_len = u32::from_be_bytes(rest[sid_len..].try_into().unwrap()) as usize;
    if body_len > MAX_FRAME_BODY {
        return Err(PalError::protocol(format!("frame body {body_len} exceeds limit")));
    }
    let mut body = vec![0u8; body_len];
    r.read_exact(&mut body).await.map_err(io_err)?;
    let mut raw = Vec::with_capacity(10 + rest.len() + body.len());
    raw.extend_from_slice(&head);
    raw.extend_from_slice(&rest);
    raw.extend_from_slice(&body);
    let frame = SecureFrame::from_bytes(&raw)?;
    Ok((frame, raw))
}
