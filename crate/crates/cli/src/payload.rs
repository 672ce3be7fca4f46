//! Record payloads. Small payloads travel inside the HVE-sealed plaintext;
//! larger ones are encrypted under a fresh key into a content-addressed blob
//! file and only the key and blob digest are sealed.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use rand::RngCore;
use sha2::{Digest, Sha256};

pub const INLINE_LIMIT: usize = 64 * 1024;

const INLINE: u8 = 0;
const BLOB: u8 = 1;

/// Returns the bytes to seal for `payload`, writing a blob if needed.
pub fn store(rng: &mut impl RngCore, payload: &[u8], blob_dir: &Path) -> Result<Vec<u8>> {
    if payload.len() <= INLINE_LIMIT {
        return Ok([&[INLINE][..], payload].concat());
    }
    let mut key = [0u8; 32];
    rng.fill_bytes(&mut key);
    // Every key encrypts exactly one blob, so a fixed nonce is safe.
    let blob = ChaCha20Poly1305::new(Key::from_slice(&key))
        .encrypt(Nonce::from_slice(&[0; 12]), payload)
        .expect("payload within AEAD limits");
    let digest: [u8; 32] = Sha256::digest(&blob).into();
    fs::create_dir_all(blob_dir).with_context(|| format!("creating {}", blob_dir.display()))?;
    let path = blob_dir.join(hex::encode(digest));
    fs::write(&path, &blob).with_context(|| format!("writing {}", path.display()))?;
    Ok([&[BLOB][..], &key, &digest].concat())
}

/// Inverse of [`store`].
pub fn load(sealed: &[u8], blob_dir: &Path) -> Result<Vec<u8>> {
    match sealed.split_first() {
        Some((&INLINE, rest)) => Ok(rest.to_vec()),
        Some((&BLOB, rest)) if rest.len() == 64 => {
            let (key, digest) = rest.split_at(32);
            let path = blob_dir.join(hex::encode(digest));
            let blob = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            if Sha256::digest(&blob).as_slice() != digest {
                bail!("blob {} does not match its digest", path.display());
            }
            ChaCha20Poly1305::new(Key::from_slice(key))
                .decrypt(Nonce::from_slice(&[0; 12]), blob.as_slice())
                .map_err(|_| anyhow::anyhow!("blob {} failed authentication", path.display()))
        }
        _ => bail!("unrecognized payload reference"),
    }
}
