//! Versioned TLV container shared by every serialized record.
//!
//! ```text
//! magic[4] | version u8 | suite u8 | kind u8 | body_len u32le | body | check[8]
//! ```
//!
//! The body is a sequence of items `tag u8 | len u32le | value`. Nested
//! lists are items whose value is itself a sequence of items. `check` is
//! the first 8 bytes of SHA-256 over everything before it, so a corrupted
//! byte can never decode to a different but valid record.

use ark_ec::CurveGroup;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use sha2::{Digest, Sha256};

use crate::error::{DecodeError, Result};

pub const MAGIC: [u8; 4] = *b"HVE\x01";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 1 + 1 + 4;
const CHECK_LEN: usize = 8;

/// Header fields of a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub version: u8,
    pub suite: u8,
    pub kind: u8,
}

/// Wraps `body` into a container.
pub fn seal_container(suite: u8, kind: u8, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + body.len() + CHECK_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(suite);
    out.push(kind);
    out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    out.extend_from_slice(body);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest[..CHECK_LEN]);
    out
}

/// Reads and validates a container header without touching the body.
pub fn peek_header(bytes: &[u8]) -> Result<Header, DecodeError> {
    if bytes.len() < 5 {
        return Err(DecodeError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::UnsupportedVersion(bytes[4]));
    }
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Truncated);
    }
    Ok(Header {
        version: bytes[4],
        suite: bytes[5],
        kind: bytes[6],
    })
}

/// Total length of the container starting at `bytes[0]`, read from its
/// header. The bytes themselves are not validated beyond the header.
pub fn container_len(bytes: &[u8]) -> Result<usize, DecodeError> {
    peek_header(bytes)?;
    let body_len = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
    HEADER_LEN
        .checked_add(body_len)
        .and_then(|n| n.checked_add(CHECK_LEN))
        .ok_or(DecodeError::Truncated)
}

/// Validates a container and returns its header and body.
pub fn open_container(bytes: &[u8]) -> Result<(Header, &[u8]), DecodeError> {
    let header = peek_header(bytes)?;
    let body_len = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
    let total = HEADER_LEN
        .checked_add(body_len)
        .and_then(|n| n.checked_add(CHECK_LEN))
        .ok_or(DecodeError::Truncated)?;
    if bytes.len() < total {
        return Err(DecodeError::Truncated);
    }
    if bytes.len() > total {
        return Err(DecodeError::TrailingBytes);
    }
    let digest = Sha256::digest(&bytes[..HEADER_LEN + body_len]);
    if digest[..CHECK_LEN] != bytes[HEADER_LEN + body_len..] {
        return Err(DecodeError::Checksum);
    }
    Ok((header, &bytes[HEADER_LEN..HEADER_LEN + body_len]))
}

/// A record that serializes through the container.
pub trait Record: Sized {
    const KIND: u8;

    fn write_body(&self, w: &mut TlvWriter);
    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError>;

    fn to_bytes(&self, suite: u8) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.write_body(&mut w);
        seal_container(suite, Self::KIND, &w.into_bytes())
    }

    fn from_bytes(bytes: &[u8], suite: u8) -> Result<Self, DecodeError> {
        let (header, body) = open_container(bytes)?;
        if header.suite != suite {
            return Err(DecodeError::WrongSuite {
                expected: suite,
                found: header.suite,
            });
        }
        if header.kind != Self::KIND {
            return Err(DecodeError::WrongKind {
                expected: Self::KIND,
                found: header.kind,
            });
        }
        let mut r = TlvReader::new(body);
        let v = Self::read_body(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

#[derive(Debug, Default)]
pub struct TlvWriter {
    buf: Vec<u8>,
}

impl TlvWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn put(&mut self, tag: u8, value: &[u8]) {
        self.buf.push(tag);
        self.buf
            .extend_from_slice(&(value.len() as u32).to_le_bytes());
        self.buf.extend_from_slice(value);
    }

    pub fn put_u32(&mut self, tag: u8, v: u32) {
        self.put(tag, &v.to_le_bytes());
    }

    /// Scalars, target-group elements, or anything canonical-serializable.
    pub fn put_canonical<T: CanonicalSerialize>(&mut self, tag: u8, v: &T) {
        let mut bytes = Vec::with_capacity(v.compressed_size());
        v.serialize_compressed(&mut bytes)
            .expect("serializing into a Vec cannot fail");
        self.put(tag, &bytes);
    }

    /// A projective point, written as its compressed affine form.
    pub fn put_point<G: CurveGroup>(&mut self, tag: u8, p: &G) {
        self.put_canonical(tag, &p.into_affine());
    }

    /// Several points of one group, concatenated in a single item.
    pub fn put_points<G: CurveGroup>(&mut self, tag: u8, ps: &[G]) {
        let mut bytes = Vec::new();
        for a in G::normalize_batch(ps) {
            a.serialize_compressed(&mut bytes)
                .expect("serializing into a Vec cannot fail");
        }
        self.put(tag, &bytes);
    }

    pub fn put_indices(&mut self, tag: u8, idx: &[usize]) {
        let bytes: Vec<u8> = idx.iter().flat_map(|&i| (i as u32).to_le_bytes()).collect();
        self.put(tag, &bytes);
    }

    /// Writes a nested item built by `f`.
    pub fn nested(&mut self, tag: u8, f: impl FnOnce(&mut TlvWriter)) {
        let mut inner = TlvWriter::new();
        f(&mut inner);
        self.put(tag, &inner.buf);
    }
}

#[derive(Debug)]
pub struct TlvReader<'a> {
    data: &'a [u8],
}

impl<'a> TlvReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn finish(&self) -> Result<(), DecodeError> {
        if self.data.is_empty() {
            Ok(())
        } else {
            Err(DecodeError::TrailingBytes)
        }
    }

    pub fn peek_tag(&self) -> Option<u8> {
        self.data.first().copied()
    }

    pub fn take(&mut self, tag: u8) -> Result<&'a [u8], DecodeError> {
        if self.data.len() < 5 {
            return Err(DecodeError::Truncated);
        }
        if self.data[0] != tag {
            return Err(DecodeError::UnexpectedTag {
                expected: tag,
                found: self.data[0],
            });
        }
        let len = u32::from_le_bytes(self.data[1..5].try_into().unwrap()) as usize;
        if self.data.len() - 5 < len {
            return Err(DecodeError::Truncated);
        }
        let value = &self.data[5..5 + len];
        self.data = &self.data[5 + len..];
        Ok(value)
    }

    pub fn u32(&mut self, tag: u8) -> Result<u32, DecodeError> {
        let v = self.take(tag)?;
        let arr: [u8; 4] = v.try_into().map_err(|_| DecodeError::Malformed("u32"))?;
        Ok(u32::from_le_bytes(arr))
    }

    pub fn canonical<T: CanonicalDeserialize>(&mut self, tag: u8) -> Result<T, DecodeError> {
        let mut v = self.take(tag)?;
        let out = T::deserialize_compressed(&mut v).map_err(|_| DecodeError::InvalidElement)?;
        if !v.is_empty() {
            return Err(DecodeError::InvalidElement);
        }
        Ok(out)
    }

    pub fn point<G: CurveGroup>(&mut self, tag: u8) -> Result<G, DecodeError> {
        Ok(self.canonical::<G::Affine>(tag)?.into())
    }

    pub fn points<G: CurveGroup>(&mut self, tag: u8) -> Result<Vec<G>, DecodeError> {
        let mut v = self.take(tag)?;
        let mut out = Vec::new();
        while !v.is_empty() {
            let a = G::Affine::deserialize_compressed(&mut v)
                .map_err(|_| DecodeError::InvalidElement)?;
            out.push(a.into());
        }
        Ok(out)
    }

    pub fn indices(&mut self, tag: u8) -> Result<Vec<usize>, DecodeError> {
        let v = self.take(tag)?;
        if v.len() % 4 != 0 {
            return Err(DecodeError::Malformed("index list"));
        }
        Ok(v.chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect())
    }

    pub fn nested(&mut self, tag: u8) -> Result<TlvReader<'a>, DecodeError> {
        Ok(TlvReader::new(self.take(tag)?))
    }
}

/// Fails unless `idx` is strictly increasing and every entry is `< l`.
pub fn check_index_set(idx: &[usize], l: usize) -> Result<(), DecodeError> {
    if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= l) {
        return Err(DecodeError::Malformed("index set"));
    }
    Ok(())
}
