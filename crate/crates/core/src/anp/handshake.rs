//! Three-message authenticated key agreement:
//!
//! 1. client-hello: client did, verifying key, ephemeral X25519 key, nonce.
//! 2. server-hello: the server's equivalents plus the session id and an
//!    ed25519 signature over the transcript so far.
//! 3. client-confirm: the client's signature over the full transcript.
//!
//! Both sides derive directional ChaCha20-Poly1305 keys with HKDF-SHA256
//! (salt = both nonces, ikm = the DH shared secret). Identity docs are
//! self-certifying; a presented key that does not hash to the claimed did
//! is rejected before any signature check.

use ed25519_dalek::Signature;
use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use x25519_dalek::{PublicKey, StaticSecret};

use super::frame::{FrameType, SecureFrame};
use super::identity::{verify_signature, Identity, IdentityDoc};
use super::session::{SecureSession, SessionRole};
use crate::error::PalError;

const TRANSCRIPT_LABEL: &[u8] = b"anp-hs-v1";
const CONFIRM_LABEL: &[u8] = b"anp-hs-confirm-v1";

fn canonical(v: &Value) -> Vec<u8> {
    serde_json::to_vec(v).expect("handshake bodies always serialize")
}

fn parse_body(frame: &SecureFrame, what: &str) -> Result<Value, PalError> {
    serde_json::from_slice(&frame.body)
        .map_err(|e| PalError::conn(format!("{what}: unparseable body: {e}")))
}

fn field<'v>(body: &'v Value, key: &str, what: &str) -> Result<&'v str, PalError> {
    body.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| PalError::conn(format!("{what}: missing '{key}'")))
}

fn decode_pub(hex_key: &str, what: &str) -> Result<PublicKey, PalError> {
    let bytes: [u8; 32] = hex::decode(hex_key)
        .ok()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| PalError::conn(format!("{what}: bad ephemeral key")))?;
    Ok(PublicKey::from(bytes))
}

fn decode_sig(hex_sig: &str, what: &str) -> Result<Signature, PalError> {
    let bytes: [u8; 64] = hex::decode(hex_sig)
        .ok()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| PalError::conn(format!("{what}: bad signature encoding")))?;
    Ok(Signature::from_bytes(&bytes))
}

fn peer_doc(body: &Value, what: &str) -> Result<IdentityDoc, PalError> {
    let doc = IdentityDoc {
        did: field(body, "did", what)?.to_string(),
        verifying_key: field(body, "verifying_key", what)?.to_string(),
    };
    if !doc.is_self_consistent() {
        return Err(PalError::conn(format!("{what}: key does not match did fingerprint")));
    }
    Ok(doc)
}

struct KeySchedule {
    c2s: [u8; 32],
    s2c: [u8; 32],
}

fn derive_keys(
    secret: &StaticSecret,
    peer_eph: &PublicKey,
    client_nonce: &[u8],
    server_nonce: &[u8],
) -> KeySchedule {
    let shared = secret.diffie_hellman(peer_eph);
    let mut salt = Vec::with_capacity(client_nonce.len() + server_nonce.len());
    salt.extend_from_slice(client_nonce);
    salt.extend_from_slice(server_nonce);
    let hk = hkdf::Hkdf::<Sha256>::new(Some(&salt), shared.as_bytes());
    let mut keys = KeySchedule { c2s: [0u8; 32], s2c: [0u8; 32] };
    hk.expand(b"anp v1 c2s", &mut keys.c2s).expect("32-byte okm");
    hk.expand(b"anp v1 s2c", &mut keys.s2c).expect("32-byte okm");
    keys
}

fn transcript(hello_body: &[u8], server_body_unsigned: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(TRANSCRIPT_LABEL);
    h.update(hello_body);
    h.update(server_body_unsigned);
    h.finalize().into()
}

fn confirm_digest(transcript: &[u8; 32]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(CONFIRM_LABEL);
    h.update(transcript);
    h.finalize().into()
}

/// Client side between hello and server-hello.
pub struct ClientHandshake {
    identity: Identity,
    expected_server_did: String,
    eph: StaticSecret,
    nonce: [u8; 16],
    hello_body: Vec<u8>,
}

impl ClientHandshake {
    pub fn start(
        identity: &Identity,
        expected_server_did: &str,
        rng: &mut ChaCha20Rng,
    ) -> (ClientHandshake, SecureFrame) {
        let mut eph_bytes = [0u8; 32];
        rng.fill_bytes(&mut eph_bytes);
        let eph = StaticSecret::from(eph_bytes);
        let mut nonce = [0u8; 16];
        rng.fill_bytes(&mut nonce);
        let doc = identity.doc();
        let body = json!({
            "did": doc.did,
            "verifying_key": doc.verifying_key,
            "eph_pub": hex::encode(PublicKey::from(&eph).as_bytes()),
            "nonce": hex::encode(nonce),
        });
        let hello_body = canonical(&body);
        let frame = SecureFrame::new(FrameType::ClientHello, 0, "", hello_body.clone());
        (
            ClientHandshake {
                identity: identity.clone(),
                expected_server_did: expected_server_did.to_string(),
                eph,
                nonce,
                hello_body,
            },
            frame,
        )
    }

    /// Consumes server-hello; yields the established session and the
    /// client-confirm frame to send back.
    pub fn finish(
        self,
        server_hello: &SecureFrame,
        now: f64,
    ) -> Result<(SecureSession, SecureFrame), PalError> {
        if server_hello.frame_type != FrameType::ServerHello {
            return Err(PalError::conn("expected server-hello"));
        }
        let body = parse_body(server_hello, "server-hello")?;
        let server_doc = peer_doc(&body, "server-hello")?;
        if server_doc.did != self.expected_server_did {
            return Err(PalError::conn(format!(
                "server did mismatch: expected {}, got {}",
                self.expected_server_did, server_doc.did
            )));
        }
        let mut unsigned = body.clone();
        let sig = decode_sig(field(&body, "sig", "server-hello")?, "server-hello")?;
        unsigned.as_object_mut().unwrap().remove("sig");
        let t = transcript(&self.hello_body, &canonical(&unsigned));
        verify_signature(&server_doc, &t, &sig)
            .map_err(|_| PalError::conn("server transcript signature invalid"))?;

        let server_eph = decode_pub(field(&body, "eph_pub", "server-hello")?, "server-hello")?;
        let server_nonce = hex::decode(field(&body, "nonce", "server-hello")?)
            .map_err(|_| PalError::conn("server-hello: bad nonce"))?;
        let session_id = field(&body, "session_id", "server-hello")?.to_string();
        let keys = derive_keys(&self.eph, &server_eph, &self.nonce, &server_nonce);

        let confirm_sig = self.identity.sign(&confirm_digest(&t));
        let confirm_body = json!({
            "did": self.identity.did,
            "sig": hex::encode(confirm_sig.to_bytes()),
        });
        let confirm =
            SecureFrame::new(FrameType::ClientConfirm, 0, &session_id, canonical(&confirm_body));
        let session = SecureSession::from_keys(
            session_id,
            server_doc.did,
            SessionRole::Client,
            keys.c2s,
            keys.s2c,
            now,
        );
        Ok((session, confirm))
    }
}

/// Server side. `respond` consumes client-hello; the returned
/// [`ServerPending`] waits for client-confirm.
pub struct ServerHandshake;

pub struct ServerPending {
    client_doc: IdentityDoc,
    session_id: String,
    transcript: [u8; 32],
    keys: KeySchedule,
}

impl ServerHandshake {
    pub fn respond(
        identity: &Identity,
        client_hello: &SecureFrame,
        rng: &mut ChaCha20Rng,
    ) -> Result<(ServerPending, SecureFrame), PalError> {
        if client_hello.frame_type != FrameType::ClientHello {
            return Err(PalError::conn("expected client-hello"));
        }
        let body = parse_body(client_hello, "client-hello")?;
        let client_doc = peer_doc(&body, "client-hello")?;
        let client_eph = decode_pub(field(&body, "eph_pub", "client-hello")?, "client-hello")?;
        let client_nonce = hex::decode(field(&body, "nonce", "client-hello")?)
            .map_err(|_| PalError::conn("client-hello: bad nonce"))?;

        let mut eph_bytes = [0u8; 32];
        rng.fill_bytes(&mut eph_bytes);
        let eph = StaticSecret::from(eph_bytes);
        let mut server_nonce = [0u8; 16];
        rng.fill_bytes(&mut server_nonce);
        let mut sid_bytes = [0u8; 16];
        rng.fill_bytes(&mut sid_bytes);
        let session_id = hex::encode(sid_bytes);

        let doc = identity.doc();
        let mut unsigned = json!({
            "did": doc.did,
            "verifying_key": doc.verifying_key,
            "eph_pub": hex::encode(PublicKey::from(&eph).as_bytes()),
            "nonce": hex::encode(server_nonce),
            "session_id": session_id,
        });
        let t = transcript(&client_hello.body, &canonical(&unsigned));
        let sig = identity.sign(&t);
        unsigned
            .as_object_mut()
            .unwrap()
            .insert("sig".into(), Value::String(hex::encode(sig.to_bytes())));
        let frame = SecureFrame::new(FrameType::ServerHello, 0, &session_id, canonical(&unsigned));

        let keys = derive_keys(&eph, &client_eph, &client_nonce, &server_nonce);
        Ok((ServerPending { client_doc, session_id, transcript: t, keys }, frame))
    }
}

impl ServerPending {
    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn finish(self, confirm: &SecureFrame, now: f64) -> Result<SecureSession, PalError> {
        if confirm.frame_type != FrameType::ClientConfirm {
            return Err(PalError::conn("expected client-confirm"));
        }
        if confirm.session_id != self.session_id {
            return Err(PalError::conn("client-confirm for a different session"));
        }
        let body = parse_body(confirm, "client-confirm")?;
        let sig = decode_sig(field(&body, "sig", "client-confirm")?, "client-confirm")?;
        verify_signature(&self.client_doc, &confirm_digest(&self.transcript), &sig)
            .map_err(|_| PalError::conn("client transcript signature invalid"))?;
        Ok(SecureSession::from_keys(
            self.session_id,
            self.client_doc.did,
            SessionRole::Server,
            self.keys.s2c,
            self.keys.c2s,
            now,
        ))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::super::identity::create_identity;
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    /// Runs the full handshake in memory; used by the session tests too.
    pub(crate) fn established_pair(seed: u64) -> (SecureSession, SecureSession) {
        let client_id = create_identity(seed);
        let server_id = create_identity(seed + 1000);
        let mut client_rng = ChaCha20Rng::seed_from_u64(seed);
        let mut server_rng = ChaCha20Rng::seed_from_u64(seed + 2000);
        let (hs, hello) = ClientHandshake::start(&client_id, &server_id.did, &mut client_rng);
        let (pending, server_hello) =
            ServerHandshake::respond(&server_id, &hello, &mut server_rng).unwrap();
        let (client_session, confirm) = hs.finish(&server_hello, 0.0).unwrap();
        let server_session = pending.finish(&confirm, 0.0).unwrap();
        (client_session, server_session)
    }

    #[test]
    fn happy_path_establishes_matching_sessions() {
        let (client, server) = established_pair(1);
        assert_eq!(client.session_id, server.session_id);
        assert_eq!(client.role, SessionRole::Client);
        assert_eq!(server.role, SessionRole::Server);
    }

    #[test]
    fn forged_server_key_is_rejected_as_e_conn() {
        let client_id = create_identity(1);
        let server_id = create_identity(2);
        let imposter = create_identity(3);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (hs, hello) = ClientHandshake::start(&client_id, &server_id.did, &mut rng);
        // The imposter answers with its own key; fingerprint and did cannot
        // both hold.
        let (_, mut server_hello) = ServerHandshake::respond(&imposter, &hello, &mut rng).unwrap();
        let mut body: Value = serde_json::from_slice(&server_hello.body).unwrap();
        body.as_object_mut()
            .unwrap()
            .insert("did".into(), Value::String(server_id.did.clone()));
        server_hello.body = serde_json::to_vec(&body).unwrap();
        let err = hs.finish(&server_hello, 0.0).unwrap_err();
        assert_eq!(err.kind, crate::error::ErrorKind::Conn);
        assert!(err.detail.contains("fingerprint"), "{err}");
    }

    #[test]
    fn wrong_server_did_is_rejected() {
        let client_id = create_identity(1);
        let server_id = create_identity(2);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (hs, hello) = ClientHandshake::start(&client_id, "did:local:deadbeef", &mut rng);
        let (_, server_hello) = ServerHandshake::respond(&server_id, &hello, &mut rng).unwrap();
        let err = hs.finish(&server_hello, 0.0).unwrap_err();
        assert!(err.detail.contains("did mismatch"), "{err}");
    }

    #[test]
    fn two_sessions_have_distinct_ids_and_keys() {
        let (mut c1, mut s1) = established_pair(5);
        let (mut c2, mut s2) = established_pair(6);
        assert_ne!(c1.session_id, c2.session_id);
        // A frame sealed on session 1 must not open on session 2 even with
        // the session id rewritten.
        let mut frame = c1.seal(FrameType::Data, b"secret");
        frame.session_id = c2.session_id.clone();
        assert!(s2.open(&frame, 0.0).is_err());
        let ok = c2.seal(FrameType::Data, b"fine");
        assert!(s2.open(&ok, 0.0).is_ok());
        let ok1 = c1.seal(FrameType::Data, b"fine");
        assert!(s1.open(&ok1, 0.0).is_ok());
    }

    #[test]
    fn tampered_confirm_is_rejected() {
        let client_id = create_identity(7);
        let server_id = create_identity(8);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (hs, hello) = ClientHandshake::start(&client_id, &server_id.did, &mut rng);
        let (pending, server_hello) =
            ServerHandshake::respond(&server_id, &hello, &mut rng).unwrap();
        let (_, mut confirm) = hs.finish(&server_hello, 0.0).unwrap();
        let other = create_identity(9);
        let mut body: Value = serde_json::from_slice(&confirm.body).unwrap();
        let fake_sig = other.sign(b"whatever");
        body.as_object_mut()
            .unwrap()
            .insert("sig".into(), Value::String(hex::encode(fake_sig.to_bytes())));
        confirm.body = serde_json::to_vec(&body).unwrap();
        assert!(pending.finish(&confirm, 0.0).is_err());
    }
}
