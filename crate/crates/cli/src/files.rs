//! On-disk formats: key and token files, and the append-only record index.
//!
//! Key, token and index-header files are single containers whose body
//! carries the scheme metadata and, for keys and tokens, the scheme record
//! itself. An index file is its header container followed by records, each
//! `len u32le | record container`.

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hve_core::wire::{container_len, open_container, seal_container, TlvReader, TlvWriter};
use hve_core::{DecodeError, SchemeId};
use sha2::{Digest, Sha256};

use crate::usage;

pub const KIND_PK: u8 = 0x60;
pub const KIND_SK: u8 = 0x61;
pub const KIND_TOKEN: u8 = 0x62;
const KIND_INDEX: u8 = 0x63;
const KIND_RECORD: u8 = 0x64;

const MAX_ID_LEN: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Cmp,
    Range,
    Subset,
}

impl Family {
    fn code(self) -> u8 {
        match self {
            Family::Cmp => 1,
            Family::Range => 2,
            Family::Subset => 3,
        }
    }

    fn from_code(c: u8) -> Result<Self, DecodeError> {
        match c {
            1 => Ok(Family::Cmp),
            2 => Ok(Family::Range),
            3 => Ok(Family::Subset),
            _ => Err(DecodeError::Malformed("encoding family")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cmp => "cmp",
            Family::Range => "range",
            Family::Subset => "subset",
        })
    }
}

/// Predicate encoding a key pair was generated for: `w` fields over `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoding {
    pub family: Family,
    pub n: usize,
    pub w: usize,
}

impl Encoding {
    /// Number of HVE slots the encoding occupies.
    pub fn slots(&self) -> Option<usize> {
        let per = match self.family {
            Family::Range => self.n.checked_mul(2)?,
            _ => self.n,
        };
        per.checked_mul(self.w)
    }
}

/// Metadata shared by every file belonging to one key pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Meta {
    pub suite: u8,
    pub scheme: SchemeId,
    pub l: usize,
    pub encoding: Option<Encoding>,
}

impl Meta {
    fn write(&self, w: &mut TlvWriter) {
        w.put(1, &[self.scheme.code()]);
        w.put_u32(2, self.l as u32);
        if let Some(enc) = &self.encoding {
            w.nested(3, |w| {
                w.put(1, &[enc.family.code()]);
                w.put_u32(2, enc.n as u32);
                w.put_u32(3, enc.w as u32);
            });
        }
    }

    fn read(suite: u8, r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let scheme = match r.take(1)? {
            [c] => SchemeId::from_code(*c)?,
            _ => return Err(DecodeError::Malformed("scheme id")),
        };
        let l = r.u32(2)? as usize;
        let encoding = if r.peek_tag() == Some(3) {
            let mut e = r.nested(3)?;
            let family = match e.take(1)? {
                [c] => Family::from_code(*c)?,
                _ => return Err(DecodeError::Malformed("encoding family")),
            };
            let enc = Encoding {
                family,
                n: e.u32(2)? as usize,
                w: e.u32(3)? as usize,
            };
            e.finish()?;
            if enc.slots() != Some(l) {
                return Err(DecodeError::Malformed("encoding does not match l"));
            }
            Some(enc)
        } else {
            None
        };
        Ok(Meta {
            suite,
            scheme,
            l,
            encoding,
        })
    }

    /// Compares the parts that must agree between files used together.
    pub fn ensure_compatible(&self, other: &Meta, what: &str) -> Result<()> {
        if self != other {
            return Err(usage!(
                "{what} was made for {} (l={}, suite {:#04x}), expected {} (l={}, suite {:#04x})",
                other.scheme,
                other.l,
                other.suite,
                self.scheme,
                self.l,
                self.suite
            ));
        }
        Ok(())
    }
}

fn kind_name(kind: u8) -> &'static str {
    match kind {
        KIND_PK => "public key",
        KIND_SK => "secret key",
        KIND_TOKEN => "token",
        KIND_INDEX => "index",
        _ => "unknown",
    }
}

/// A key or token file: metadata plus the scheme record bytes.
#[derive(Debug, Clone)]
pub struct KeyFile {
    pub meta: Meta,
    pub record: Vec<u8>,
}

impl KeyFile {
    pub fn to_bytes(&self, kind: u8) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.meta.write(&mut w);
        w.put(4, &self.record);
        seal_container(self.meta.suite, kind, &w.into_bytes())
    }

    pub fn from_bytes(bytes: &[u8], kind: u8) -> Result<Self> {
        let (header, body) = open_container(bytes)?;
        if header.kind != kind {
            return Err(usage!(
                "expected a {} file, found a {} file",
                kind_name(kind),
                kind_name(header.kind)
            ));
        }
        let mut r = TlvReader::new(body);
        let meta = Meta::read(header.suite, &mut r)?;
        let record = r.take(4)?.to_vec();
        r.finish()?;
        Ok(Self { meta, record })
    }

    pub fn load(path: &Path, kind: u8) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_bytes(&bytes, kind).with_context(|| format!("decoding {}", path.display()))
    }

    pub fn save(&self, path: &Path, kind: u8) -> Result<()> {
        fs::write(path, self.to_bytes(kind)).with_context(|| format!("writing {}", path.display()))
    }
}

/// First 16 bytes of SHA-256 over a public key record.
pub fn fingerprint(pk_record: &[u8]) -> [u8; 16] {
    Sha256::digest(pk_record)[..16].try_into().unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexHeader {
    pub meta: Meta,
    pub pk_fingerprint: [u8; 16],
}

impl IndexHeader {
    fn to_bytes(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.meta.write(&mut w);
        w.put(5, &self.pk_fingerprint);
        seal_container(self.meta.suite, KIND_INDEX, &w.into_bytes())
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, body) = open_container(bytes)?;
        if header.kind != KIND_INDEX {
            return Err(usage!("not an index file"));
        }
        let mut r = TlvReader::new(body);
        let meta = Meta::read(header.suite, &mut r)?;
        let pk_fingerprint = r
            .take(5)?
            .try_into()
            .map_err(|_| DecodeError::Malformed("key fingerprint"))?;
        r.finish()?;
        Ok(Self {
            meta,
            pk_fingerprint,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRecord {
    pub id: String,
    /// Serialized sealed ciphertext.
    pub ct: Vec<u8>,
}

impl IndexRecord {
    fn to_bytes(&self, suite: u8) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.put(1, self.id.as_bytes());
        w.put(2, &self.ct);
        seal_container(suite, KIND_RECORD, &w.into_bytes())
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (header, body) = open_container(bytes)?;
        if header.kind != KIND_RECORD {
            return Err(DecodeError::WrongKind {
                expected: KIND_RECORD,
                found: header.kind,
            });
        }
        let mut r = TlvReader::new(body);
        let id = String::from_utf8(r.take(1)?.to_vec())
            .map_err(|_| DecodeError::Malformed("record id"))?;
        let ct = r.take(2)?.to_vec();
        r.finish()?;
        Ok(Self { id, ct })
    }
}

/// Record ids double as output file names, so they are kept path-safe.
pub fn check_record_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= MAX_ID_LEN
        && !id.starts_with('.')
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b"._-".contains(&b));
    if !ok {
        return Err(usage!(
            "record id {id:?} must be 1-{MAX_ID_LEN} characters from [A-Za-z0-9._-] and not start with '.'"
        ));
    }
    Ok(())
}

/// A parsed index plus where its last complete record ends.
#[derive(Debug)]
pub struct Index {
    pub header: IndexHeader,
    pub records: Vec<IndexRecord>,
    valid_len: usize,
    truncated: bool,
}

impl Index {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let header_len = container_len(bytes)?;
        if bytes.len() < header_len {
            return Err(DecodeError::Truncated.into());
        }
        let header = IndexHeader::from_bytes(&bytes[..header_len])?;
        let mut records = Vec::new();
        let mut pos = header_len;
        let mut truncated = false;
        while pos < bytes.len() {
            let rest = &bytes[pos..];
            let Some(len) = rest
                .get(..4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
            else {
                truncated = true;
                break;
            };
            if rest.len() - 4 < len {
                truncated = true;
                break;
            }
            let last = rest.len() - 4 == len;
            match IndexRecord::from_bytes(&rest[4..4 + len]) {
                Ok(rec) => records.push(rec),
                // A partially flushed final record can carry a complete length
                // prefix in front of garbage.
                Err(_) if last => {
                    truncated = true;
                    break;
                }
                Err(e) => {
                    return Err(anyhow::Error::new(e)
                        .context(format!("record {} at byte offset {pos}", records.len())))
                }
            }
            pos += 4 + len;
        }
        Ok(Self {
            header,
            records,
            valid_len: pos,
            truncated,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let index = Self::parse(&bytes).with_context(|| format!("decoding {}", path.display()))?;
        index.warn_truncated(path);
        Ok(index)
    }

    fn warn_truncated(&self, path: &Path) {
        if self.truncated {
            log::warn!(
                "{}: incomplete final record after byte {} ignored",
                path.display(),
                self.valid_len
            );
        }
    }
}

/// Appends one record under an exclusive lock, creating the index with
/// `header` if the file is empty or missing. `make` sees the current index
/// and returns the record to append.
pub fn append_record(
    path: &Path,
    header: &IndexHeader,
    make: impl FnOnce(&Index) -> Result<IndexRecord>,
) -> Result<IndexRecord> {
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    file.lock()
        .with_context(|| format!("locking {}", path.display()))?;

    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    if bytes.is_empty() {
        bytes = header.to_bytes();
        file.write_all(&bytes)?;
    }
    let index = Index::parse(&bytes).with_context(|| format!("decoding {}", path.display()))?;
    if index.header != *header {
        return Err(usage!(
            "{} belongs to a different key pair or scheme",
            path.display()
        ));
    }
    if index.truncated {
        index.warn_truncated(path);
        file.set_len(index.valid_len as u64)?;
    }

    let record = make(&index)?;
    check_record_id(&record.id)?;
    if index.records.iter().any(|r| r.id == record.id) {
        return Err(usage!(
            "record id {:?} already exists in the index",
            record.id
        ));
    }
    let body = record.to_bytes(header.meta.suite);
    let mut framed = Vec::with_capacity(4 + body.len());
    framed.extend_from_slice(&(body.len() as u32).to_le_bytes());
    framed.extend_from_slice(&body);
    file.seek(SeekFrom::Start(index.valid_len as u64))?;
    file.write_all(&framed)?;
    file.sync_data()?;
    Ok(record)
}

pub fn new_header(meta: Meta, pk_record: &[u8]) -> IndexHeader {
    IndexHeader {
        meta,
        pk_fingerprint: fingerprint(pk_record),
    }
}

/// Directory holding payloads too large to store inline.
pub fn blob_dir(index: &Path) -> PathBuf {
    with_suffix(index, ".blobs")
}

/// Plaintext sidecar written in test mode.
pub fn plain_sidecar(index: &Path) -> PathBuf {
    with_suffix(index, ".plain.jsonl")
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Refuses to silently overwrite key material.
pub fn create_new(path: &Path, force: bool) -> Result<File> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    match opts.open(path) {
        Ok(f) => Ok(f),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
            bail!(crate::Usage(format!(
                "{} already exists (use --force to overwrite)",
                path.display()
            )))
        }
        Err(e) => Err(anyhow::Error::new(e).context(format!("creating {}", path.display()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> IndexHeader {
        new_header(
            Meta {
                suite: 1,
                scheme: SchemeId::Ll3,
                l: 20,
                encoding: Some(Encoding {
                    family: Family::Cmp,
                    n: 10,
                    w: 2,
                }),
            },
            b"pk",
        )
    }

    fn framed(rec: &IndexRecord) -> Vec<u8> {
        let body = rec.to_bytes(1);
        [&(body.len() as u32).to_le_bytes()[..], &body].concat()
    }

    #[test]
    fn index_round_trip_and_truncated_tail() {
        let a = IndexRecord {
            id: "a".into(),
            ct: vec![1, 2, 3],
        };
        let b = IndexRecord {
            id: "b".into(),
            ct: vec![4; 40],
        };
        let mut bytes = header().to_bytes();
        bytes.extend(framed(&a));
        let complete = bytes.len();
        bytes.extend(framed(&b));

        let index = Index::parse(&bytes).unwrap();
        assert_eq!(index.header, header());
        assert_eq!(index.records, vec![a.clone(), b]);
        assert!(!index.truncated);

        for cut in complete + 1..bytes.len() {
            let index = Index::parse(&bytes[..cut]).unwrap();
            assert_eq!(index.records, vec![a.clone()], "cut at {cut}");
            assert!(index.truncated);
            assert_eq!(index.valid_len, complete);
        }
    }

    #[test]
    fn corrupt_middle_record_is_an_error() {
        let a = IndexRecord {
            id: "a".into(),
            ct: vec![1, 2, 3],
        };
        let mut bytes = header().to_bytes();
        let start = bytes.len();
        bytes.extend(framed(&a));
        bytes.extend(framed(&a));
        bytes[start + 20] ^= 1;
        assert!(Index::parse(&bytes).is_err());
    }

    #[test]
    fn key_file_kind_is_checked() {
        let kf = KeyFile {
            meta: header().meta,
            record: vec![9; 10],
        };
        let bytes = kf.to_bytes(KIND_PK);
        let back = KeyFile::from_bytes(&bytes, KIND_PK).unwrap();
        assert_eq!(back.meta, kf.meta);
        assert_eq!(back.record, kf.record);
        assert!(KeyFile::from_bytes(&bytes, KIND_SK).is_err());
    }

    #[test]
    fn record_ids() {
        for ok in ["r1", "A.b-c_d", "0123456789abcdef"] {
            check_record_id(ok).unwrap();
        }
        for bad in ["", ".hidden", "a/b", "a b", "..", &"x".repeat(129)] {
            assert!(check_record_id(bad).is_err(), "{bad}");
        }
    }
}
