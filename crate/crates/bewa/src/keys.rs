//! Actor key registry: one active Ed25519 key per canonical author id, with
//! revocation. Signatures are made over 32-byte hashes and exchanged hex-
//! encoded.

use crate::error::{BewaError, Result};
use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const SIGNATURE_ALGORITHM_ID: &str = "ed25519";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct KeyRegistry {
    /// caid -> hex-encoded public key.
    keys: BTreeMap<String, String>,
    revoked: BTreeSet<String>,
}

impl KeyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a caller-provided public key. Replaces any previous key for
    /// the caid (one active key at a time).
    pub fn register(&mut self, caid: &str, public_hex: &str) {
        self.revoked.remove(caid);
        self.keys.insert(caid.to_string(), public_hex.to_string());
    }

    /// Generate a fresh keypair, register the public half, return the secret.
    pub fn generate(&mut self, caid: &str) -> (String, SigningKey) {
        let mut seed = [0u8; 32];
        rand::Rng::fill(&mut rand::thread_rng(), &mut seed);
        let signing = SigningKey::from_bytes(&seed);
        self.register(caid, &hex::encode(signing.verifying_key().to_bytes()));
        (caid.to_string(), signing)
    }

    pub fn revoke(&mut self, caid: &str) {
        self.revoked.insert(caid.to_string());
    }

    pub fn public_hex(&self, caid: &str) -> Result<String> {
        if self.revoked.contains(caid) {
            return Err(BewaError::UnknownKey);
        }
        self.keys.get(caid).cloned().ok_or(BewaError::UnknownKey)
    }

    /// Sign a hex-encoded 32-byte hash, returning a hex signature.
    pub fn sign_hex(signing: &SigningKey, hash_hex: &str) -> Result<String> {
        let bytes = hex::decode(hash_hex).map_err(|_| BewaError::SignatureFailure)?;
        Ok(hex::encode(signing.sign(&bytes).to_bytes()))
    }

    pub fn sign_bytes(signing: &SigningKey, message: &[u8]) -> String {
        hex::encode(signing.sign(message).to_bytes())
    }

    /// Verify a hex signature over a hex-encoded hash under a hex public key.
    /// Any malformed input verifies false rather than erroring: a bad
    /// signature is a verdict, not a fault.
    pub fn verify_hex(&self, hash_hex: &str, sig_hex: &str, public_hex: &str) -> bool {
        let Ok(msg) = hex::decode(hash_hex) else {
            return false;
        };
        Self::verify_raw(&msg, sig_hex, public_hex)
    }

    pub fn verify_raw(message: &[u8], sig_hex: &str, public_hex: &str) -> bool {
        let Ok(pk_bytes) = hex::decode(public_hex) else {
            return false;
        };
        let Ok(pk_arr) = <[u8; 32]>::try_from(pk_bytes) else {
            return false;
        };
        let Ok(pk) = VerifyingKey::from_bytes(&pk_arr) else {
            return false;
        };
        let Ok(sig_bytes) = hex::decode(sig_hex) else {
            return false;
        };
        let Ok(sig_arr) = <[u8; 64]>::try_from(sig_bytes) else {
            return false;
        };
        pk.verify(message, &Signature::from_bytes(&sig_arr)).is_ok()
    }

    /// Verify under the registered key for `caid`.
    pub fn verify_for(&self, caid: &str, message: &[u8], sig_hex: &str) -> bool {
        match self.public_hex(caid) {
            Ok(pk) => Self::verify_raw(message, sig_hex, &pk),
            Err(_) => false,
        }
    }
}
