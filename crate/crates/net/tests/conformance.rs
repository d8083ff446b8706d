//! Loopback conformance suite: every edge runs its real server on 127.0.0.1
//! and is exercised through its client adapter, asserting wire behavior,
//! byte accounting, replay coalescing, session guarding, and failure
//! surfaces end to end.

use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};

use agentwire_core::anp::{create_identity, Liveness};
use agentwire_core::clock::{Clock, WallClock};
use agentwire_core::tap::{Direction, FrameClass};
use agentwire_core::{Envelope, EnvelopeFactory, EnvelopeOptions, ErrorKind, PalError, Protocol};
use agentwire_net::{
    routine_hash, send_with_retry, spawn_a2a, spawn_acp, spawn_agora, spawn_anp, A2aClient,
    AcpClient, AdapterDescriptor, AdapterPool, AgentHandler, AgoraBinding, AgoraClient, AnpClient,
    AnpServerConfig, EchoHandler, NetContext, PoolConfig, ProtocolAdapter, RetryPolicy,
    RunningServer, ServerConfig, StreamFragment,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

const WATERMARK: &str = "HIDDEN_MARKER:S2_E2E_WATERMARK_TEST";

fn factory() -> EnvelopeFactory {
    EnvelopeFactory::new(Arc::new(WallClock), 7)
}

fn envelope(factory: &mut EnvelopeFactory, content: Value) -> Envelope {
    factory.new_envelope("client", "server", content, EnvelopeOptions::default())
}

fn descriptor(protocol: Protocol, endpoint: String) -> AdapterDescriptor {
    AdapterDescriptor {
        protocol,
        src_agent: "client".into(),
        dst_id: "server".into(),
        endpoint,
        credentials: String::new(),
    }
}

async fn echo_server(protocol: Protocol) -> RunningServer {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let handler = Arc::new(EchoHandler);
    match protocol {
        Protocol::A2a => spawn_a2a(cfg, handler).await.unwrap(),
        Protocol::Acp => spawn_acp(cfg, handler).await.unwrap(),
        Protocol::Agora => spawn_agora(cfg, handler, Vec::new()).await.unwrap(),
        Protocol::Anp => panic!("anp uses spawn_anp"),
    }
}

/// Handler that fails the first `failures` calls with E_HTTP 503, then echoes.
struct Flaky {
    failures: u32,
    calls: AtomicU32,
}

impl AgentHandler for Flaky {
    fn handle(&self, e: &Envelope) -> Result<Value, PalError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n < self.failures {
            Err(PalError::http(503, "warming up"))
        } else {
            Ok(e.content.clone())
        }
    }
}

struct Counting {
    calls: AtomicU32,
}

impl AgentHandler for Counting {
    fn handle(&self, e: &Envelope) -> Result<Value, PalError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(e.content.clone())
    }
}

struct Chunks(usize);

impl AgentHandler for Chunks {
    fn handle(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(e.content.clone())
    }

    fn stream(&self, _e: &Envelope) -> Result<Vec<Value>, PalError> {
        Ok((0..self.0).map(|i| json!({"chunk": i})).collect())
    }
}

#[tokio::test]
async fn a2a_echo_round_trip_accounts_every_payload_byte() {
    let server = echo_server(Protocol::A2a).await;
    let ctx = NetContext::live();
    let mut client =
        A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx.clone(), 5.0);
    client.initialize().await.unwrap();

    let request = envelope(&mut factory(), json!({"question": "ping"}));
    let reply = client.send(&request).await.unwrap();

    assert_eq!(reply.content, request.content);
    assert_eq!(reply.src, "server");
    assert_eq!(reply.dst, "client");
    assert_eq!(reply.context.trace_id, request.context.trace_id);
    assert_eq!(reply.context.parent_id.as_deref(), Some(request.id.as_str()));

    let records = ctx.tap.records();
    assert_eq!(records.len(), 2, "one request frame out, one reply frame in");
    assert_eq!(records[0].direction, Direction::Out);
    assert_eq!(records[1].direction, Direction::In);
    assert!(records.iter().all(|r| r.class == FrameClass::Payload && r.attempt == 0));

    let wire_bytes: u64 = records.iter().map(|r| r.bytes.len() as u64).sum();
    let counters = ctx.hub.bytes_total();
    assert_eq!(counters.payload, wire_bytes, "meter must agree with the capture");
    assert_eq!(counters.retry_overhead, 0);

    let snapshot = ctx.hub.snapshot();
    assert_eq!(snapshot.requests.values().sum::<u64>(), 1);
    assert_eq!(snapshot.latency.values().map(Vec::len).sum::<usize>(), 1);
    server.stop().await;
}

#[tokio::test]
async fn handler_errors_surface_status_and_count_as_failures() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let handler = Arc::new(Flaky { failures: u32::MAX, calls: AtomicU32::new(0) });
    let server = spawn_a2a(cfg, handler).await.unwrap();
    let ctx = NetContext::live();
    let mut client =
        A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx.clone(), 5.0);

    let err = client.send(&envelope(&mut factory(), json!({"q": 1}))).await.unwrap_err();
    assert_eq!(err.kind, ErrorKind::Http);
    assert_eq!(err.http_status, Some(503));
    assert_eq!(ctx.hub.failures_total(), 1);
    // Error responses are not protocol frames: only the request was captured.
    assert_eq!(ctx.tap.records().len(), 1);
    assert_eq!(ctx.tap.records()[0].direction, Direction::Out);
    server.stop().await;
}

#[tokio::test]
async fn transient_failures_recover_under_retry_with_attempt_stamps() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let handler = Arc::new(Flaky { failures: 2, calls: AtomicU32::new(0) });
    let server = spawn_a2a(cfg, handler).await.unwrap();
    let ctx = NetContext::live();
    let mut client =
        A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx.clone(), 5.0);

    let request = envelope(&mut factory(), json!({"q": "retry"}));
    let policy = RetryPolicy { max_retries: 3, base_delay_secs: 0.01, backoff_factor: 2.0 };
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let reply = send_with_retry(&mut client, &request, policy, &mut rng).await.unwrap();
    assert_eq!(reply.content, request.content);

    let outs: Vec<_> =
        ctx.tap.records().into_iter().filter(|r| r.direction == Direction::Out).collect();
    assert_eq!(outs.iter().map(|r| r.attempt).collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_eq!(outs[0].class, FrameClass::Payload);
    assert!(outs[1..].iter().all(|r| r.class == FrameClass::RetryOverhead));
    assert!(ctx.hub.bytes_total().retry_overhead > 0);
    assert_eq!(ctx.hub.failures_total(), 2, "the two 503s were recorded before recovery");
    server.stop().await;
}

#[tokio::test]
async fn a2a_streaming_delivers_ordered_fragments_then_done() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let server = spawn_a2a(cfg, Arc::new(Chunks(3))).await.unwrap();
    let ctx = NetContext::live();
    let mut client =
        A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx.clone(), 5.0);

    let request = envelope(&mut factory(), json!({"q": "stream"}));
    let fragments = client.send_streaming(&request).await.unwrap();
    assert_eq!(fragments.len(), 4);
    for (i, fragment) in fragments[..3].iter().enumerate() {
        match fragment {
            StreamFragment::Data(e) => {
                assert_eq!(e.content, json!({"chunk": i}));
                assert_eq!(e.context.trace_id, request.context.trace_id);
            }
            StreamFragment::Done => panic!("done arrived early"),
        }
    }
    assert!(fragments[3].is_done());

    let ins =
        ctx.tap.records().into_iter().filter(|r| r.direction == Direction::In).count();
    assert_eq!(ins, 4, "three data events and the done event");
    server.stop().await;
}

#[tokio::test]
async fn zero_chunk_stream_is_done_only() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let server = spawn_a2a(cfg, Arc::new(Chunks(0))).await.unwrap();
    let ctx = NetContext::live();
    let mut client = A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx, 5.0);

    let fragments =
        client.send_streaming(&envelope(&mut factory(), json!({}))).await.unwrap();
    assert_eq!(fragments.len(), 1);
    assert!(fragments[0].is_done());
    server.stop().await;
}

#[tokio::test]
async fn stopped_peer_fails_health_and_sends_e_conn() {
    let server = echo_server(Protocol::A2a).await;
    let endpoint = server.endpoint();
    let ctx = NetContext::live();
    let mut client = A2aClient::new(descriptor(Protocol::A2a, endpoint), ctx, 1.0);
    client.initialize().await.unwrap();
    assert!(client.health_check().await);

    server.stop().await;
    assert!(!client.health_check().await);
    let err = client.send(&envelope(&mut factory(), json!({}))).await.unwrap_err();
    assert!(
        matches!(err.kind, ErrorKind::Conn | ErrorKind::Timeout),
        "dead endpoint should be a transport failure, got {:?}",
        err.kind
    );
}

#[tokio::test]
async fn duplicate_posts_coalesce_to_one_handler_effect() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let handler = Arc::new(Counting { calls: AtomicU32::new(0) });
    let server = spawn_a2a(cfg, handler.clone()).await.unwrap();
    let ctx = NetContext::live();
    let mut client = A2aClient::new(descriptor(Protocol::A2a, server.endpoint()), ctx, 5.0);

    let request = envelope(&mut factory(), json!({"op": "charge", "amount": 5}));
    let first = client.send(&request).await.unwrap();
    let second = client.send(&request).await.unwrap();

    assert_eq!(handler.calls.load(Ordering::SeqCst), 1, "replay cache absorbed the dup");
    assert_eq!(first.id, second.id, "cached reply is byte-identical");
    assert_eq!(first.content, second.content);
    server.stop().await;
}

#[tokio::test]
async fn acp_round_trip_discovery_and_streaming() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let server = spawn_acp(cfg, Arc::new(Chunks(2))).await.unwrap();
    let ctx = NetContext::live();
    let mut client =
        AcpClient::new(descriptor(Protocol::Acp, server.endpoint()), ctx.clone(), 5.0);
    client.initialize().await.unwrap();
    assert!(client.health_check().await);

    let request = envelope(&mut factory(), json!({"order": 42}));
    let reply = client.send(&request).await.unwrap();
    assert_eq!(reply.content, request.content);
    assert_eq!(reply.context.idempotency_key, request.context.idempotency_key);

    let fragments = client.send_streaming(&request).await.unwrap();
    assert_eq!(fragments.len(), 3);
    assert!(fragments[2].is_done());
    server.stop().await;
}

#[tokio::test]
async fn acp_jobs_walk_pending_running_committed_and_aborted() {
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let server = spawn_acp(cfg, Arc::new(EchoHandler)).await.unwrap();
    let ctx = NetContext::live();
    let mut client = AcpClient::new(descriptor(Protocol::Acp, server.endpoint()), ctx, 5.0);
    let mut factory = factory();

    let job = factory.new_envelope(
        "client",
        "server",
        json!({"job_seconds": 0.8}),
        EnvelopeOptions { session_id: Some("job-1".into()), ..EnvelopeOptions::default() },
    );
    client.send(&job).await.unwrap();
    assert_eq!(client.job_status("job-1").await.unwrap(), "pending");
    tokio::time::sleep(Duration::from_millis(300)).await;
    assert_eq!(client.job_status("job-1").await.unwrap(), "running");
    tokio::time::sleep(Duration::from_millis(600)).await;
    assert_eq!(client.job_status("job-1").await.unwrap(), "committed");

    let doomed = factory.new_envelope(
        "client",
        "server",
        json!({"job_seconds": 0.1, "job_fail": true}),
        EnvelopeOptions { session_id: Some("job-2".into()), ..EnvelopeOptions::default() },
    );
    client.send(&doomed).await.unwrap();
    tokio::time::sleep(Duration::from_millis(200)).await;
    assert_eq!(client.job_status("job-2").await.unwrap(), "aborted");

    let err = client.job_status("no-such-job").await.unwrap_err();
    assert_eq!(err.kind, ErrorKind::Http);
    assert_eq!(err.http_status, Some(404));
    server.stop().await;
}

#[tokio::test]
async fn agora_hash_binding_selects_routine_fallback_or_error() {
    let routine_doc = "order lookup routine v1";
    let cfg = ServerConfig { agent_id: "server".into(), ..ServerConfig::default() };
    let routines =
        vec![agentwire_net::Routine { name: "order-lookup".into(), doc: routine_doc.into() }];
    let server = spawn_agora(cfg, Arc::new(EchoHandler), routines).await.unwrap();
    let ctx = NetContext::live();
    let desc = descriptor(Protocol::Agora, server.endpoint());
    let mut factory = factory();

    // Known hash dispatches to the routine.
    let bound = AgoraBinding {
        protocol_hash: Some(routine_hash(routine_doc)),
        fallback_text: None,
    };
    let mut client = AgoraClient::new(desc.clone(), ctx.clone(), 5.0, bound);
    client.initialize().await.unwrap();
    assert_eq!(client.supported_hashes(), [routine_hash(routine_doc)]);
    client.send(&envelope(&mut factory, json!({"sku": 1}))).await.unwrap();
    assert!(ctx.tap.contains_bytes(b"\"served_by\":\"routine\""));

    // Unknown hash with fallback text degrades to natural language.
    ctx.tap.clear();
    client.set_binding(AgoraBinding {
        protocol_hash: Some(routine_hash("an undeclared routine")),
        fallback_text: Some("look up the order".into()),
    });
    client.send(&envelope(&mut factory, json!({"sku": 2}))).await.unwrap();
    assert!(ctx.tap.contains_bytes(b"\"served_by\":\"fallback\""));

    // Unknown hash alone is an in-protocol error.
    client.set_binding(AgoraBinding {
        protocol_hash: Some(routine_hash("an undeclared routine")),
        fallback_text: None,
    });
    let err = client.send(&envelope(&mut factory, json!({"sku": 3}))).await.unwrap_err();
    assert_eq!(err.kind, ErrorKind::Protocol);
    assert!(err.detail.contains("unknown protocol hash"), "got: {}", err.detail);

    // No hash at all is served naturally.
    client.set_binding(AgoraBinding::default());
    client.send(&envelope(&mut factory, json!({"sku": 4}))).await.unwrap();
    assert!(ctx.tap.contains_bytes(b"\"served_by\":\"natural\""));
    server.stop().await;
}

#[tokio::test]
async fn agora_conversations_count_rounds_and_reject_unknown_ids() {
    let server = echo_server(Protocol::Agora).await;
    let ctx = NetContext::live();
    let desc = descriptor(Protocol::Agora, server.endpoint());
    let mut client = AgoraClient::new(desc, ctx.clone(), 5.0, AgoraBinding::default());
    let mut factory = factory();

    client.open_conversation("negotiation-7", &envelope(&mut factory, json!({"r": 1}))).await.unwrap();
    assert!(ctx.tap.contains_bytes(b"\"round\":1"));
    client
        .continue_conversation("negotiation-7", &envelope(&mut factory, json!({"r": 2})))
        .await
        .unwrap();
    assert!(ctx.tap.contains_bytes(b"\"round\":2"));

    let err = client
        .continue_conversation("ghost", &envelope(&mut factory, json!({})))
        .await
        .unwrap_err();
    assert_eq!(err.kind, ErrorKind::Http);
    assert_eq!(err.http_status, Some(404));
    server.stop().await;
}

fn anp_client(ctx: &NetContext, socket: String, did: String) -> AnpClient {
    let desc = AdapterDescriptor {
        protocol: Protocol::Anp,
        src_agent: "client".into(),
        dst_id: "server".into(),
        endpoint: socket,
        credentials: did,
    };
    AnpClient::new(desc, ctx.clone(), create_identity(99), ChaCha20Rng::seed_from_u64(5))
}

#[tokio::test]
async fn anp_secure_channel_hides_payloads_from_the_wire() {
    let cfg = AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() };
    let server = spawn_anp(cfg, Arc::new(EchoHandler)).await.unwrap();
    let ctx = NetContext::live();
    let mut client = anp_client(&ctx, server.socket_endpoint(), server.did().to_string());
    client.initialize().await.unwrap();
    assert!(client.is_connected());

    let request = envelope(&mut factory(), json!({"secret": WATERMARK}));
    let reply = client.send(&request).await.unwrap();
    assert_eq!(reply.content, request.content, "plaintext round-trips inside the channel");

    assert!(
        !ctx.tap.contains_bytes(WATERMARK.as_bytes()),
        "watermark must never appear in the captured frames"
    );
    assert!(ctx.tap.total_bytes(FrameClass::Handshake) > 0, "key agreement was captured");
    let handshakes = ctx
        .tap
        .records()
        .into_iter()
        .filter(|r| r.class == FrameClass::Handshake)
        .count();
    assert_eq!(handshakes, 3, "hello out, server hello in, confirm out");

    client.cleanup().await.unwrap();
    server.stop().await;
}

#[tokio::test]
async fn anp_streaming_rides_the_secure_channel() {
    let cfg = AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() };
    let server = spawn_anp(cfg, Arc::new(Chunks(3))).await.unwrap();
    let ctx = NetContext::live();
    let mut client = anp_client(&ctx, server.socket_endpoint(), server.did().to_string());
    client.initialize().await.unwrap();

    let fragments =
        client.send_streaming(&envelope(&mut factory(), json!({"q": "s"}))).await.unwrap();
    assert_eq!(fragments.len(), 4);
    assert!(fragments[3].is_done());
    match &fragments[1] {
        StreamFragment::Data(e) => assert_eq!(e.content, json!({"chunk": 1})),
        StreamFragment::Done => panic!("done arrived early"),
    }
    client.cleanup().await.unwrap();
    server.stop().await;
}

#[tokio::test]
async fn anp_fallback_rides_plaintext_and_says_so() {
    let cfg = AnpServerConfig {
        agent_id: "server".into(),
        fallback_enabled: true,
        ..AnpServerConfig::default()
    };
    let server = spawn_anp(cfg, Arc::new(EchoHandler)).await.unwrap();
    let fallback = server.fallback_endpoint().unwrap();
    let ctx = NetContext::live();
    let mut client = anp_client(&ctx, server.socket_endpoint(), server.did().to_string())
        .with_fallback(fallback, 5.0);

    let request = envelope(&mut factory(), json!({"secret": WATERMARK}));
    let reply = client.send_plaintext_fallback(&request).await.unwrap();
    assert_eq!(reply.content, request.content);
    assert!(
        ctx.tap.contains_bytes(WATERMARK.as_bytes()),
        "the degraded channel exposes payloads on the wire"
    );
    assert!(ctx.tap.contains_bytes(b"\"secure\":false"));
    server.stop().await;

    let bare_server = spawn_anp(
        AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() },
        Arc::new(EchoHandler),
    )
    .await
    .unwrap();
    let mut bare =
        anp_client(&ctx, bare_server.socket_endpoint(), bare_server.did().to_string());
    let err = bare.send_plaintext_fallback(&request).await.unwrap_err();
    assert_eq!(err.kind, ErrorKind::Unsupported);
    bare_server.stop().await;
}

#[tokio::test]
async fn anp_replayed_frames_are_rejected() {
    let cfg = AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() };
    let server = spawn_anp(cfg, Arc::new(EchoHandler)).await.unwrap();
    let ctx = NetContext::live();
    let mut client = anp_client(&ctx, server.socket_endpoint(), server.did().to_string());
    client.initialize().await.unwrap();
    client.send(&envelope(&mut factory(), json!({"n": 1}))).await.unwrap();

    let verdict = client.replay_last_frame().await.unwrap();
    let rejection = verdict.expect("peer must not accept a replayed frame");
    assert_eq!(rejection.kind, ErrorKind::Protocol);
    assert!(rejection.detail.contains("replay rejected"), "got: {}", rejection.detail);

    // The session stays usable for fresh traffic afterwards.
    client.send(&envelope(&mut factory(), json!({"n": 2}))).await.unwrap();
    client.cleanup().await.unwrap();
    server.stop().await;
}

#[tokio::test]
async fn anp_heartbeats_track_liveness_and_silence_kills_it() {
    let cfg = AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() };
    let server = spawn_anp(cfg, Arc::new(EchoHandler)).await.unwrap();
    let ctx = NetContext::live();
    let mut client = anp_client(&ctx, server.socket_endpoint(), server.did().to_string());
    client.initialize().await.unwrap();
    client.set_heartbeat(0.05, 0.15);

    assert_eq!(client.heartbeat_roundtrip().await.unwrap(), Liveness::Alive);
    tokio::time::sleep(Duration::from_millis(300)).await;
    match client.liveness() {
        Some(Liveness::Dead { silent_for }) => assert!(silent_for > 0.15),
        other => panic!("expected a dead verdict after silence, got {other:?}"),
    }
    // A fresh echo revives the link.
    assert_eq!(client.heartbeat_roundtrip().await.unwrap(), Liveness::Alive);
    // Heartbeats are control traffic, never payload.
    let beats: Vec<_> = ctx
        .tap
        .records()
        .into_iter()
        .filter(|r| r.class == FrameClass::RetryOverhead)
        .collect();
    assert_eq!(beats.len(), 4, "two round trips, each one frame out and one in");
    client.cleanup().await.unwrap();
    server.stop().await;
}

#[tokio::test]
async fn session_hijack_is_denied_on_every_edge() {
    let mut factory = factory();
    let mut hijack = |token: &str| {
        factory.new_envelope(
            "client",
            "server",
            json!({"op": "read"}),
            EnvelopeOptions { session_id: Some(token.into()), ..EnvelopeOptions::default() },
        )
    };
    let forged = hijack("admin_session_999");
    let expired = hijack("expired_session_1");
    let ctx = NetContext::live();

    let a2a = echo_server(Protocol::A2a).await;
    let mut c = A2aClient::new(descriptor(Protocol::A2a, a2a.endpoint()), ctx.clone(), 5.0);
    for request in [&forged, &expired] {
        let err = c.send(request).await.unwrap_err();
        assert_eq!((err.kind, err.http_status), (ErrorKind::Http, Some(403)));
        assert!(err.detail.contains("session denied"), "got: {}", err.detail);
    }
    a2a.stop().await;

    let acp = echo_server(Protocol::Acp).await;
    let mut c = AcpClient::new(descriptor(Protocol::Acp, acp.endpoint()), ctx.clone(), 5.0);
    let err = c.send(&forged).await.unwrap_err();
    assert_eq!((err.kind, err.http_status), (ErrorKind::Http, Some(403)));
    acp.stop().await;

    let agora = echo_server(Protocol::Agora).await;
    let mut c = AgoraClient::new(
        descriptor(Protocol::Agora, agora.endpoint()),
        ctx.clone(),
        5.0,
        AgoraBinding::default(),
    );
    let err = c.send(&forged).await.unwrap_err();
    assert_eq!((err.kind, err.http_status), (ErrorKind::Http, Some(403)));
    agora.stop().await;

    let anp = spawn_anp(
        AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() },
        Arc::new(EchoHandler),
    )
    .await
    .unwrap();
    let mut c = anp_client(&ctx, anp.socket_endpoint(), anp.did().to_string());
    c.initialize().await.unwrap();
    let err = c.send(&forged).await.unwrap_err();
    assert_eq!(err.kind, ErrorKind::Protocol);
    assert!(err.detail.contains("session denied"), "got: {}", err.detail);
    c.cleanup().await.unwrap();
    anp.stop().await;
}

/// Wall clock shifted by a fixed offset, for skew injection.
struct Shifted(f64);

impl Clock for Shifted {
    fn now(&self) -> f64 {
        WallClock.now() + self.0
    }
}

#[tokio::test]
async fn clock_skew_outside_the_accept_window_is_rejected() {
    let server = echo_server(Protocol::Acp).await;
    let ctx = NetContext::live();
    let mut client =
        AcpClient::new(descriptor(Protocol::Acp, server.endpoint()), ctx.clone(), 5.0);

    let send_with_offset = |offset: f64| {
        let mut factory = EnvelopeFactory::new(Arc::new(Shifted(offset)), 7);
        factory.new_envelope("client", "server", json!({"o": offset}), EnvelopeOptions::default())
    };

    for offset in [0.0, 20.0, -20.0] {
        client.send(&send_with_offset(offset)).await.unwrap();
    }
    for offset in [120.0, -120.0, 300.0, 600.0] {
        let err = client.send(&send_with_offset(offset)).await.unwrap_err();
        assert_eq!((err.kind, err.http_status), (ErrorKind::Http, Some(400)));
        assert!(err.detail.contains("clock skew"), "got: {}", err.detail);
    }
    server.stop().await;
}

#[tokio::test]
async fn pool_builds_working_adapters_for_each_protocol() {
    let a2a = echo_server(Protocol::A2a).await;
    let agora = echo_server(Protocol::Agora).await;
    let anp = spawn_anp(
        AnpServerConfig { agent_id: "server".into(), ..AnpServerConfig::default() },
        Arc::new(EchoHandler),
    )
    .await
    .unwrap();

    let ctx = NetContext::live();
    let cfg = PoolConfig { identity_seed: 42, rng_seed: 9, ..PoolConfig::default() };
    let mut pool = AdapterPool::new(ctx, cfg);
    let mut factory = factory();

    let mut anp_desc = descriptor(Protocol::Anp, anp.socket_endpoint());
    anp_desc.credentials = anp.did().to_string();
    let descriptors = [
        descriptor(Protocol::A2a, a2a.endpoint()),
        descriptor(Protocol::Agora, agora.endpoint()),
        anp_desc,
    ];
    for desc in descriptors {
        let request = factory.new_envelope(
            "client",
            &desc.dst_id,
            json!({"via": "pool"}),
            EnvelopeOptions::default(),
        );
        let adapter = pool.adapter(&desc);
        adapter.initialize().await.unwrap();
        assert_eq!(adapter.send(&request).await.unwrap().content, request.content);
    }

    pool.cleanup_all().await;
    a2a.stop().await;
    agora.stop().await;
    anp.stop().await;
}
