//! Local DID identities. A did is `did:local:` followed by the hex SHA-256
//! of the ed25519 verifying key, which makes identity documents
//! self-certifying: anyone holding a doc can check the key against the did
//! without trusting the resolver.

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::error::PalError;

pub const DID_PREFIX: &str = "did:local:";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityDoc {
    pub did: String,
    /// Hex ed25519 verifying key, 32 bytes.
    pub verifying_key: String,
}

impl IdentityDoc {
    /// Self-certification check: the did must be the fingerprint of the key.
    pub fn is_self_consistent(&self) -> bool {
        match hex::decode(&self.verifying_key) {
            Ok(bytes) => did_for_key(&bytes) == self.did,
            Err(_) => false,
        }
    }

    pub fn verifying_key(&self) -> Result<VerifyingKey, PalError> {
        let bytes = hex::decode(&self.verifying_key)
            .map_err(|_| PalError::conn("identity doc: verifying key is not hex"))?;
        let arr: [u8; 32] =
            bytes.try_into().map_err(|_| PalError::conn("identity doc: key length != 32"))?;
        VerifyingKey::from_bytes(&arr).map_err(|_| PalError::conn("identity doc: invalid key"))
    }
}

pub fn did_for_key(verifying_key_bytes: &[u8]) -> String {
    let digest = Sha256::digest(verifying_key_bytes);
    format!("{DID_PREFIX}{}", hex::encode(digest))
}

/// A local identity: did plus the signing key that backs it.
#[derive(Clone)]
pub struct Identity {
    pub did: String,
    signing: SigningKey,
}

impl Identity {
    pub fn doc(&self) -> IdentityDoc {
        IdentityDoc {
            did: self.did.clone(),
            verifying_key: hex::encode(self.signing.verifying_key().to_bytes()),
        }
    }

    pub fn sign(&self, msg: &[u8]) -> Signature {
        self.signing.sign(msg)
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        self.signing.verifying_key()
    }
}

/// Deterministic identity from a seed. Distinct seeds give distinct keys
/// (up to the collision resistance of the stream).
pub fn create_identity(seed: u64) -> Identity {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xA5A5_5A5A_0000_0001);
    let mut key = [0u8; 32];
    rng.fill_bytes(&mut key);
    let signing = SigningKey::from_bytes(&key);
    Identity { did: did_for_key(&signing.verifying_key().to_bytes()), signing }
}

pub fn verify_signature(doc: &IdentityDoc, msg: &[u8], sig: &Signature) -> Result<(), PalError> {
    doc.verifying_key()?
        .verify(msg, sig)
        .map_err(|_| PalError::conn("signature verification failed"))
}

/// In-process did registry standing in for a resolution network. Resolution
/// re-checks self-consistency so a tampered doc never comes back as valid.
#[derive(Clone, Default)]
pub struct Resolver {
    docs: Arc<Mutex<BTreeMap<String, IdentityDoc>>>,
}

impl Resolver {
    pub fn publish(&self, doc: IdentityDoc) {
        self.docs.lock().unwrap().insert(doc.did.clone(), doc);
    }

    pub fn resolve(&self, did: &str) -> Result<IdentityDoc, PalError> {
        let doc = self
            .docs
            .lock()
            .unwrap()
            .get(did)
            .cloned()
            .ok_or_else(|| PalError::conn(format!("did not resolvable: {did}")))?;
        if !doc.is_self_consistent() {
            return Err(PalError::conn(format!("resolved doc fails fingerprint check: {did}")));
        }
        Ok(doc)
    }
}
