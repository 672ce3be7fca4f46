//! The scheme-independent HVE contract: attribute and pattern vectors, the
//! predicate `f_σ`, payload sealing, and the uniform scheme interface.

mod scheme;
mod seal;
mod vectors;

pub(crate) use scheme::{check_l, check_len};
pub use scheme::{CountElements, ElementCounts, HveScheme, SchemeId, SealedCiphertext};
pub(crate) use seal::{aead_decrypt, aead_encrypt, derive_key};
pub use seal::{
    open, seal, seal_with_limit, MatchResult, SealedPayload, MAX_PAYLOAD, NONCE_LEN, TAG_LEN,
};
pub use vectors::{
    predicate_eval, predicate_eval_delegatable, Attribute, AttributeVector, PatternVector, Slot,
    SlotKind,
};
