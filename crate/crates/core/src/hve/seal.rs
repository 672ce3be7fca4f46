//! Recognizable payload sealing.
//!
//! The scheme encapsulates a uniform target-group mask; the payload is
//! encrypted under a key derived from that mask with ChaCha20-Poly1305.
//! A query that recovers the wrong mask fails authentication, which is how
//! a non-matching query reports no match.

use ark_serialize::CanonicalSerialize;
use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use hkdf::Hkdf;
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::group::{gt_random, Gt, PairingSuite, RandomSource};

pub const NONCE_LEN: usize = 12;
pub const TAG_LEN: usize = 16;
/// Default payload limit.
pub const MAX_PAYLOAD: usize = 1 << 20;

const SEAL_KDF_INFO: &[u8] = b"hve/sealed-payload/key/v1";
const SEAL_AAD: &[u8] = b"hve/sealed-payload/v1";

/// `nonce ‖ ciphertext ‖ tag`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedPayload {
    blob: Vec<u8>,
}

impl SealedPayload {
    pub fn from_blob(blob: Vec<u8>) -> Result<Self> {
        if blob.len() < NONCE_LEN + TAG_LEN {
            return Err(crate::error::DecodeError::Malformed("sealed payload").into());
        }
        Ok(Self { blob })
    }

    pub fn blob(&self) -> &[u8] {
        &self.blob
    }

    pub fn tag_len(&self) -> usize {
        TAG_LEN
    }

    /// Length of the payload this blob carries.
    pub fn payload_len(&self) -> usize {
        self.blob.len() - NONCE_LEN - TAG_LEN
    }
}

/// Result of a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchResult {
    Matched(Vec<u8>),
    NoMatch,
}

impl MatchResult {
    pub fn is_match(&self) -> bool {
        matches!(self, MatchResult::Matched(_))
    }

    pub fn payload(&self) -> Option<&[u8]> {
        match self {
            MatchResult::Matched(p) => Some(p),
            MatchResult::NoMatch => None,
        }
    }
}

/// HKDF-SHA256 over the canonical encoding of a group element.
pub(crate) fn derive_key<T: CanonicalSerialize>(element: &T, info: &[u8]) -> [u8; 32] {
    let mut ikm = Vec::new();
    element
        .serialize_compressed(&mut ikm)
        .expect("serializing into a Vec cannot fail");
    let mut okm = [0u8; 32];
    Hkdf::<Sha256>::new(None, &ikm)
        .expand(info, &mut okm)
        .expect("32 bytes is a valid HKDF-SHA256 output length");
    okm
}

pub(crate) fn aead_encrypt<R: RandomSource + ?Sized>(
    rng: &mut R,
    key: &[u8; 32],
    aad: &[u8],
    plaintext: &[u8],
) -> Vec<u8> {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let cipher = ChaCha20Poly1305::new(Key::from_slice(key));
    let ct = cipher
        .encrypt(
            Nonce::from_slice(&nonce),
            Payload {
                msg: plaintext,
                aad,
            },
        )
        .expect("ChaCha20-Poly1305 encryption is infallible for in-memory buffers");
    let mut blob = Vec::with_capacity(NONCE_LEN + ct.len());
    blob.extend_from_slice(&nonce);
    blob.extend_from_slice(&ct);
    blob
}

pub(crate) fn aead_decrypt(key: &[u8; 32], aad: &[u8], blob: &[u8]) -> Option<Vec<u8>> {
    if blob.len() < NONCE_LEN + TAG_LEN {
        return None;
    }
    let (nonce, ct) = blob.split_at(NONCE_LEN);
    ChaCha20Poly1305::new(Key::from_slice(key))
        .decrypt(Nonce::from_slice(nonce), Payload { msg: ct, aad })
        .ok()
}

/// Samples a uniform mask and encrypts `payload` under a key derived from it.
pub fn seal<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    payload: &[u8],
) -> Result<(Gt<E>, SealedPayload)> {
    seal_with_limit(rng, payload, MAX_PAYLOAD)
}

pub fn seal_with_limit<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    payload: &[u8],
    max_payload: usize,
) -> Result<(Gt<E>, SealedPayload)> {
    if payload.len() > max_payload {
        return Err(Error::PayloadTooLarge {
            len: payload.len(),
            max: max_payload,
        });
    }
    let mask = gt_random::<E, R>(rng);
    let key = derive_key(&mask, SEAL_KDF_INFO);
    let blob = aead_encrypt(rng, &key, SEAL_AAD, payload);
    Ok((mask, SealedPayload { blob }))
}

/// Opens `sealed` with a candidate mask; authentication failure is `NoMatch`.
pub fn open<E: PairingSuite>(candidate_mask: &Gt<E>, sealed: &SealedPayload) -> MatchResult {
    let key = derive_key(candidate_mask, SEAL_KDF_INFO);
    match aead_decrypt(&key, SEAL_AAD, &sealed.blob) {
        Some(p) => MatchResult::Matched(p),
        None => MatchResult::NoMatch,
    }
}
