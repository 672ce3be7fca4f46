//! Hidden vector encryption over prime-order pairing groups.
//!
//! Four schemes share the [`HveScheme`] interface:
//!
//! * [`Bw`]: two-dimensional product groups, `4s + 2` pairings per query.
//! * [`Ll`]: three-dimensional product groups, constant tokens and 12 pairings.
//! * [`Dhve`]: delegatable tokens over the same groups as `Ll`.
//! * [`Asym`]: plain asymmetric groups, four-element tokens and 4 pairings.
//!
//! Payloads are sealed with an AEAD under a key derived from the encrypted
//! target-group element, so a non-matching query yields
//! [`MatchResult::NoMatch`] rather than garbage.
//!
//! ```
//! use hve_core::{group::seeded_rng, AttributeVector, GroupSuite, HveScheme, Ll, PatternVector, Slot};
//! use ark_bls12_381::Bls12_381;
//!
//! let mut rng = seeded_rng(7);
//! let suite = GroupSuite::<Bls12_381>::asymmetric();
//! let (pk, sk) = Ll::setup(&mut rng, &suite, 3).unwrap();
//! let x = AttributeVector::from_ints(&[1, 2, 3]).unwrap();
//! let ct = Ll::encrypt(&mut rng, &x, b"record", &pk).unwrap();
//! let pattern = PatternVector::new(vec![Slot::value(1u64), Slot::Wildcard, Slot::Wildcard]).unwrap();
//! let tk = Ll::gen_token(&mut rng, &pattern, &sk, &pk).unwrap();
//! assert_eq!(Ll::query(&ct, &tk, &pk).unwrap().payload(), Some(&b"record"[..]));
//! ```

pub mod assumptions;
pub mod error;
pub mod group;
pub mod hve;
pub mod predicates;
pub mod product;
pub mod schemes;
pub mod trivial_pe;
pub mod wire;

pub use error::{DecodeError, Error, Result};
pub use group::{GroupSuite, Mode, PairingSuite};
pub use hve::{
    predicate_eval, predicate_eval_delegatable, Attribute, AttributeVector, CountElements,
    ElementCounts, HveScheme, MatchResult, PatternVector, SchemeId, SealedCiphertext, Slot,
    SlotKind,
};
pub use schemes::{Asym, Bw, Dhve, Ll};
pub use wire::Record;

pub use ark_bls12_381::Bls12_381;
pub use ark_bn254::Bn254;
