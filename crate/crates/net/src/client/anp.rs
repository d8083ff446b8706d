//! ANP client adapter: connects the socket, upgrades, runs the key
//! agreement, then exchanges sealed frames. The tap sees ciphertext only;
//! handshake frames are captured but counted by neither byte counter. A
//! plaintext HTTP fallback can be configured per destination and is always
//! marked insecure on the wire.

use std::time::Duration;

use agentwire_core::anp::{
    ClientHandshake, FrameType, Identity, Liveness, SecureFrame, SecureSession,
};
use agentwire_core::codec::{canonical_bytes, AnpCodec, Codec};
use agentwire_core::tap::{Direction, FrameClass};
use agentwire_core::{Envelope, ErrorKind, PalError};
use async_trait::async_trait;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use tokio::io::AsyncWriteExt;
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::TcpStream;

use super::{class_for, error_doc_to_pal, exchange, record_in, SendScope};
use crate::adapter::{AdapterDescriptor, ProtocolAdapter, StreamFragment};
use crate::context::NetContext;
use crate::framing::{read_frame, read_preamble, upgrade_request, write_frame};
use crate::server::anp::{STREAM_DONE_TYPE, STREAM_FLAG};

const DEFAULT_READ_TIMEOUT_SECS: f64 = 5.0;

/// Safety bound on fragments per streamed reply.
const MAX_STREAM_FRAGMENTS: usize = 10_000;

struct Conn {
    rd: OwnedReadHalf,
    wr: OwnedWriteHalf,
    session: SecureSession,
}

pub struct AnpClient {
    desc: AdapterDescriptor,
    ctx: NetContext,
    identity: Identity,
    rng: ChaCha20Rng,
    read_timeout: f64,
    heartbeat: Option<(f64, f64)>,
    conn: Option<Conn>,
    fallback: Option<(String, reqwest::Client)>,
    last_data_frame: Option<SecureFrame>,
}

impl AnpClient {
    /// `desc.endpoint` is the socket host:port; `desc.credentials` pins the
    /// expected server DID, which the handshake verifies.
    pub fn new(
        desc: AdapterDescriptor,
        ctx: NetContext,
        identity: Identity,
        rng: ChaCha20Rng,
    ) -> Self {
        AnpClient {
            desc,
            ctx,
            identity,
            rng,
            read_timeout: DEFAULT_READ_TIMEOUT_SECS,
            heartbeat: None,
            conn: None,
            fallback: None,
            last_data_frame: None,
        }
    }

    /// Enables the plaintext HTTP fallback at `endpoint`.
    pub fn with_fallback(mut self, endpoint: String, timeout_secs: f64) -> Self {
        self.fallback = Some((endpoint, super::http_client(timeout_secs)));
        self
    }

    pub fn set_read_timeout(&mut self, secs: f64) {
        self.read_timeout = secs;
    }

    pub fn set_heartbeat(&mut self, interval: f64, timeout: f64) {
        self.heartbeat = Some((interval, timeout));
        if let Some(conn) = &mut self.conn {
            conn.session.set_heartbeat(interval, timeout);
        }
    }

    pub fn did(&self) -> &str {
        &self.identity.did
    }

    pub fn is_connected(&self) -> bool {
        self.conn.is_some()
    }

    /// Heartbeat-rule verdict for the current session.
    pub fn liveness(&self) -> Option<Liveness> {
        self.conn.as_ref().map(|c| c.session.detect_failure(self.ctx.clock.now()))
    }

    fn record_frame(&self, direction: Direction, class: FrameClass, attempt: u32, bytes: Vec<u8>) {
        self.ctx.record(
            direction,
            class,
            self.desc.protocol,
            &self.desc.src_agent,
            &self.desc.dst_id,
            attempt,
            bytes,
        );
    }

    async fn read_reply(&mut self, attempt: u32, class: FrameClass) -> Result<SecureFrame, PalError> {
        let conn = self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
        let (frame, raw) =
            tokio::time::timeout(Duration::from_secs_f64(self.read_timeout), read_frame(&mut conn.rd))
                .await
                .map_err(|_| PalError::timeout(format!("no frame within {}s", self.read_timeout)))??;
        self.record_frame(Direction::In, class, attempt, raw);
        Ok(frame)
    }

    fn open_reply(&mut self, frame: &SecureFrame) -> Result<Value, PalError> {
        let now = self.ctx.clock.now();
        let conn = self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
        let plain = conn.session.open(frame, now)?;
        let doc: Value = serde_json::from_slice(&plain)
            .map_err(|e| PalError::decode(format!("reply body: {e}")))?;
        if let Some(err) = doc.get("error") {
            return Err(error_doc_to_pal(err));
        }
        Ok(doc)
    }

    /// Drops transport state after a connection-level failure so later
    /// sends fail fast instead of desynchronizing the frame stream.
    fn poison_on_transport_error(&mut self, err: &PalError) {
        if matches!(err.kind, ErrorKind::Conn | ErrorKind::Timeout) {
            self.conn = None;
        }
    }

    /// Captures post-encode, pre-transport, then writes.
    async fn write_recorded(
        &mut self,
        frame: &SecureFrame,
        class: FrameClass,
        attempt: u32,
    ) -> Result<(), PalError> {
        let bytes = frame.to_bytes();
        self.record_frame(Direction::Out, class, attempt, bytes.clone());
        let conn = self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
        conn.wr
            .write_all(&bytes)
            .await
            .map_err(|e| PalError::conn(format!("write frame: {e}")))?;
        conn.wr.flush().await.map_err(|e| PalError::conn(format!("flush frame: {e}")))?;
        Ok(())
    }

    /// Sends a heartbeat and waits for the echo. Control frames are
    /// captured as retry overhead in both directions.
    pub async fn heartbeat_roundtrip(&mut self) -> Result<Liveness, PalError> {
        let frame = {
            let conn =
                self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
            conn.session.heartbeat()
        };
        let result = async {
            self.write_recorded(&frame, FrameClass::RetryOverhead, 0).await?;
            let echo = self.read_reply(0, FrameClass::RetryOverhead).await?;
            let now = self.ctx.clock.now();
            let conn =
                self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
            conn.session.open(&echo, now)?;
            Ok(conn.session.detect_failure(now))
        }
        .await;
        if let Err(e) = &result {
            self.poison_on_transport_error(e);
        }
        result
    }

    /// Probe hook: re-sends the exact bytes of the last data frame and
    /// reports the peer's verdict. Ok(Some(rejection)) is the healthy
    /// outcome; Ok(None) means the peer accepted a replay.
    pub async fn replay_last_frame(&mut self) -> Result<Option<PalError>, PalError> {
        let frame = self
            .last_data_frame
            .clone()
            .ok_or_else(|| PalError::protocol("no data frame sent yet"))?;
        self.write_recorded(&frame, FrameClass::RetryOverhead, 0).await?;
        let reply = self.read_reply(0, FrameClass::RetryOverhead).await?;
        match self.open_reply(&reply) {
            Ok(_) => Ok(None),
            Err(err) if err.kind == ErrorKind::Protocol => Ok(Some(err)),
            Err(err) => Err(err),
        }
    }

    /// Plaintext HTTP fallback send, marked insecure on the wire.
    /// E_UNSUPPORTED when no fallback endpoint is configured.
    pub async fn send_plaintext_fallback(&mut self, e: &Envelope) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let result = async {
            let (endpoint, http) = self
                .fallback
                .as_ref()
                .ok_or_else(|| PalError::unsupported("anp plaintext fallback disabled"))?;
            let mut doc = AnpCodec.encode(e)?;
            doc["secure"] = json!(false);
            let url = format!("{endpoint}/anp/message");
            let body =
                exchange(&self.ctx, http, &self.desc, &url, &doc, e.meta.retry_count, None)
                    .await?;
            record_in(&self.ctx, &self.desc, e.meta.retry_count, body.clone());
            let reply: Value = serde_json::from_slice(&body)
                .map_err(|err| PalError::decode(format!("reply body: {err}")))?;
            AnpCodec.decode_reply(&reply, e)
        }
        .await;
        scope.finish(result)
    }
}

#[async_trait]
impl ProtocolAdapter for AnpClient {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.desc
    }

    /// Connects, upgrades, and runs the three-message key agreement with
    /// the peer DID pinned from the descriptor credentials.
    async fn initialize(&mut self) -> Result<(), PalError> {
        let _ = self.cleanup().await;
        let stream = TcpStream::connect(&self.desc.endpoint)
            .await
            .map_err(|e| PalError::conn(format!("connect: {e}")))?;
        let (mut rd, mut wr) = stream.into_split();
        wr.write_all(upgrade_request(&self.desc.endpoint).as_bytes())
            .await
            .map_err(|e| PalError::conn(format!("upgrade request: {e}")))?;
        let preamble = read_preamble(&mut rd).await?;
        let status_line = preamble.lines().next().unwrap_or_default();
        if !status_line.contains(" 101 ") {
            return Err(PalError::conn(format!("upgrade refused: {status_line}")));
        }

        let (pending, hello) =
            ClientHandshake::start(&self.identity, &self.desc.credentials, &mut self.rng);
        self.record_frame(Direction::Out, FrameClass::Handshake, 0, hello.to_bytes());
        write_frame(&mut wr, &hello).await?;
        let (server_hello, raw) =
            tokio::time::timeout(Duration::from_secs_f64(self.read_timeout), read_frame(&mut rd))
                .await
                .map_err(|_| PalError::timeout("no server hello"))??;
        self.record_frame(Direction::In, FrameClass::Handshake, 0, raw);
        let (mut session, confirm) = pending.finish(&server_hello, self.ctx.clock.now())?;
        self.record_frame(Direction::Out, FrameClass::Handshake, 0, confirm.to_bytes());
        write_frame(&mut wr, &confirm).await?;

        if let Some((interval, timeout)) = self.heartbeat {
            session.set_heartbeat(interval, timeout);
        }
        self.conn = Some(Conn { rd, wr, session });
        Ok(())
    }

    async fn health_check(&mut self) -> bool {
        if self.conn.is_none() {
            return false;
        }
        self.heartbeat_roundtrip().await.is_ok()
    }

    async fn send(&mut self, e: &Envelope) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let attempt = e.meta.retry_count;
        let result = async {
            let doc = AnpCodec.encode(e)?;
            let frame = {
                let conn =
                    self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
                conn.session.seal(FrameType::Data, &canonical_bytes(&doc))
            };
            self.write_recorded(&frame, class_for(attempt), attempt).await?;
            self.last_data_frame = Some(frame);
            let reply = self.read_reply(attempt, class_for(attempt)).await?;
            let reply_doc = self.open_reply(&reply)?;
            AnpCodec.decode_reply(&reply_doc, e)
        }
        .await;
        if let Err(e) = &result {
            self.poison_on_transport_error(e);
        }
        scope.finish(result)
    }

    async fn send_streaming(&mut self, e: &Envelope) -> Result<Vec<StreamFragment>, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let attempt = e.meta.retry_count;
        let result = async {
            let mut doc = AnpCodec.encode(e)?;
            doc[STREAM_FLAG] = json!(true);
            let frame = {
                let conn =
                    self.conn.as_mut().ok_or_else(|| PalError::conn("no established session"))?;
                conn.session.seal(FrameType::Data, &canonical_bytes(&doc))
            };
            self.write_recorded(&frame, class_for(attempt), attempt).await?;
            self.last_data_frame = Some(frame);
            let mut fragments = Vec::new();
            for _ in 0..MAX_STREAM_FRAGMENTS {
                let reply = self.read_reply(attempt, class_for(attempt)).await?;
                let reply_doc = self.open_reply(&reply)?;
                if reply_doc.get("type").and_then(Value::as_str) == Some(STREAM_DONE_TYPE) {
                    fragments.push(StreamFragment::Done);
                    return Ok(fragments);
                }
                fragments.push(StreamFragment::Data(AnpCodec.decode_reply(&reply_doc, e)?));
            }
            Err(PalError::protocol("stream exceeded fragment bound"))
        }
        .await;
        if let Err(e) = &result {
            self.poison_on_transport_error(e);
        }
        scope.finish(result)
    }

    /// Closes the session politely; safe to call repeatedly.
    async fn cleanup(&mut self) -> Result<(), PalError> {
        if let Some(mut conn) = self.conn.take() {
            let close = conn.session.seal(FrameType::Close, b"");
            let _ = tokio::time::timeout(
                Duration::from_secs_f64(1.0),
                write_frame(&mut conn.wr, &close),
            )
            .await;
        }
        self.last_data_frame = None;
        Ok(())
    }
}
