use std::collections::BTreeSet;

use hve_core::group::seeded_rng;
use hve_core::predicates::{
    encode_comparison_ciphertext, encode_comparison_token, encode_range_ciphertext,
    encode_range_token, encode_subset_ciphertext, encode_subset_token, eval_comparison, eval_range,
    eval_subset, ComparisonSpec, RangeSpec, SubsetSpec,
};
use hve_core::{
    predicate_eval, Asym, AttributeVector, Bls12_381, Bn254, Bw, DecodeError, Dhve, GroupSuite,
    HveScheme, Ll, MatchResult, PairingSuite, PatternVector, Record, SealedCiphertext, Slot,
};
use proptest::prelude::*;

fn attrs(l: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..3, l)
}

fn pattern_slots(l: usize) -> impl Strategy<Value = Vec<Option<u64>>> {
    prop::collection::vec(prop::option::of(0u64..3), l)
}

fn pattern(slots: &[Option<u64>]) -> PatternVector {
    PatternVector::new(
        slots
            .iter()
            .map(|s| s.map_or(Slot::Wildcard, Slot::value))
            .collect(),
    )
    .unwrap()
}

fn expected(slots: &[Option<u64>], x: &[u64]) -> bool {
    slots
        .iter()
        .zip(x)
        .all(|(s, v)| s.is_none_or(|s| s == *v))
}

fn scheme_agrees<S: HveScheme<E>, E: PairingSuite>(
    seed: u64,
    x: &[u64],
    slots: &[Option<u64>],
    payload: &[u8],
) {
    let mut rng = seeded_rng(seed);
    let suite = GroupSuite::<E>::asymmetric();
    let (pk, sk) = S::setup(&mut rng, &suite, x.len()).unwrap();
    let xv = AttributeVector::from_ints(x).unwrap();
    let ct = S::encrypt(&mut rng, &xv, payload, &pk).unwrap();
    let tk = S::gen_token(&mut rng, &pattern(slots), &sk, &pk).unwrap();
    let got = S::query(&ct, &tk, &pk).unwrap();
    if expected(slots, x) {
        assert_eq!(got, MatchResult::Matched(payload.to_vec()));
    } else {
        assert_eq!(got, MatchResult::NoMatch);
    }
}

proptest! {
    #[test]
    fn predicate_matches_definition((x, slots) in (1usize..6).prop_flat_map(|l| (attrs(l), pattern_slots(l)))) {
        let got = predicate_eval(&pattern(&slots), &AttributeVector::from_ints(&x).unwrap()).unwrap();
        prop_assert_eq!(got, expected(&slots, &x));
    }

    #[test]
    fn comparison_encoding_agrees(n in 1usize..6, w in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        use rand::Rng;
        let bounds: Vec<usize> = (0..w).map(|_| rng.gen_range(1..=n)).collect();
        let values: Vec<usize> = (0..w).map(|_| rng.gen_range(1..=n)).collect();
        let spec = ComparisonSpec::new(n, bounds).unwrap();
        let tk = encode_comparison_token(&spec);
        let ct = encode_comparison_ciphertext(n, &values).unwrap();
        prop_assert_eq!(predicate_eval(&tk, &ct).unwrap(), eval_comparison(&spec, &values));
    }

    #[test]
    fn range_encoding_agrees(n in 1usize..6, lo in 0usize..6, span in 0usize..6, v in 0usize..6) {
        let lo = lo % n + 1;
        let hi = (lo + span).min(n);
        let v = v % n + 1;
        let spec = RangeSpec::new(n, vec![(lo, hi)]).unwrap();
        let tk = encode_range_token(&spec);
        let ct = encode_range_ciphertext(n, &[v]).unwrap();
        prop_assert_eq!(predicate_eval(&tk, &ct).unwrap(), eval_range(&spec, &[v]));
    }

    #[test]
    fn subset_encoding_agrees(n in 1usize..8, mask in any::<u8>(), v in 0usize..8) {
        let v = v % n + 1;
        let set: BTreeSet<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let spec = SubsetSpec::new(n, vec![set]).unwrap();
        let tk = encode_subset_token(&spec);
        let ct = encode_subset_ciphertext(n, &[v]).unwrap();
        prop_assert_eq!(predicate_eval(&tk, &ct).unwrap(), eval_subset(&spec, &[v]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bw_query_agrees((x, slots) in (1usize..4).prop_flat_map(|l| (attrs(l), pattern_slots(l))), seed in any::<u64>()) {
        scheme_agrees::<Bw, Bls12_381>(seed, &x, &slots, b"bw");
    }

    #[test]
    fn ll_query_agrees((x, slots) in (1usize..4).prop_flat_map(|l| (attrs(l), pattern_slots(l))), seed in any::<u64>()) {
        scheme_agrees::<Ll, Bls12_381>(seed, &x, &slots, b"ll");
    }

    #[test]
    fn dhve_query_agrees((x, slots) in (1usize..4).prop_flat_map(|l| (attrs(l), pattern_slots(l))), seed in any::<u64>()) {
        scheme_agrees::<Dhve, Bls12_381>(seed, &x, &slots, b"dhve");
    }

    #[test]
    fn asym_query_agrees_on_bn254((x, slots) in (1usize..5).prop_flat_map(|l| (attrs(l), pattern_slots(l))), seed in any::<u64>(), payload in prop::collection::vec(any::<u8>(), 0..64)) {
        scheme_agrees::<Asym, Bn254>(seed, &x, &slots, &payload);
    }

    #[test]
    fn any_byte_flip_is_rejected(seed in any::<u64>(), pos in any::<prop::sample::Index>(), bit in 0u8..8) {
        let mut rng = seeded_rng(seed);
        let suite = GroupSuite::<Bls12_381>::asymmetric();
        let (pk, sk) = Asym::setup(&mut rng, &suite, 2).unwrap();
        let tk = Asym::gen_token(&mut rng, &pattern(&[Some(1), None]), &sk, &pk).unwrap();
        let mut bytes = tk.to_bytes(suite.id());
        let i = pos.index(bytes.len());
        bytes[i] ^= 1 << bit;
        prop_assert!(<Asym as HveScheme<Bls12_381>>::Token::from_bytes(&bytes, suite.id()).is_err());
    }
}

#[test]
fn records_round_trip_byte_exact() {
    fn check<S: HveScheme<Bls12_381>>(seed: u64) {
        let mut rng = seeded_rng(seed);
        let suite = GroupSuite::<Bls12_381>::asymmetric();
        let id = suite.id();
        let (pk, sk) = S::setup(&mut rng, &suite, 3).unwrap();
        let tk = S::gen_token(&mut rng, &pattern(&[Some(0), None, Some(2)]), &sk, &pk).unwrap();
        let x = AttributeVector::from_ints(&[0, 1, 2]).unwrap();
        let ct = S::encrypt(&mut rng, &x, b"round trip", &pk).unwrap();

        let pk_bytes = pk.to_bytes(id);
        let pk2 = S::PublicKey::from_bytes(&pk_bytes, id).unwrap();
        assert_eq!(pk2.to_bytes(id), pk_bytes);
        let sk_bytes = sk.to_bytes(id);
        assert_eq!(
            S::SecretKey::from_bytes(&sk_bytes, id)
                .unwrap()
                .to_bytes(id),
            sk_bytes
        );
        let tk_bytes = tk.to_bytes(id);
        let tk2 = S::Token::from_bytes(&tk_bytes, id).unwrap();
        assert_eq!(tk2.to_bytes(id), tk_bytes);
        let ct_bytes = ct.to_bytes(id);
        let ct2 = SealedCiphertext::<S::Ciphertext>::from_bytes(&ct_bytes, id).unwrap();
        assert_eq!(ct2.to_bytes(id), ct_bytes);

        assert_eq!(
            S::query(&ct2, &tk2, &pk2).unwrap(),
            MatchResult::Matched(b"round trip".to_vec())
        );
    }
    check::<Bw>(1);
    check::<Ll>(2);
    check::<Dhve>(3);
    check::<Asym>(4);
}

#[test]
fn records_reject_wrong_suite_kind_and_truncation() {
    let mut rng = seeded_rng(9);
    let suite = GroupSuite::<Bls12_381>::asymmetric();
    let id = suite.id();
    let (pk, sk) = Ll::setup(&mut rng, &suite, 2).unwrap();
    let tk = Ll::gen_token(&mut rng, &pattern(&[None, Some(1)]), &sk, &pk).unwrap();
    let bytes = tk.to_bytes(id);

    assert!(matches!(
        <Ll as HveScheme<Bls12_381>>::Token::from_bytes(&bytes, id ^ 0x80),
        Err(DecodeError::WrongSuite { .. })
    ));
    assert!(matches!(
        <Ll as HveScheme<Bls12_381>>::PublicKey::from_bytes(&bytes, id),
        Err(DecodeError::WrongKind { .. })
    ));
    for cut in [0, 3, 10, bytes.len() - 1] {
        assert!(<Ll as HveScheme<Bls12_381>>::Token::from_bytes(&bytes[..cut], id).is_err());
    }
    let mut long = bytes.clone();
    long.push(0);
    assert_eq!(
        <Ll as HveScheme<Bls12_381>>::Token::from_bytes(&long, id).unwrap_err(),
        DecodeError::TrailingBytes
    );
}

#[test]
fn symmetric_suite_runs_product_schemes() {
    fn check<S: HveScheme<Bls12_381>>(seed: u64) {
        let mut rng = seeded_rng(seed);
        let suite = GroupSuite::<Bls12_381>::symmetric();
        let (pk, sk) = S::setup(&mut rng, &suite, 2).unwrap();
        let x = AttributeVector::from_ints(&[4, 5]).unwrap();
        let ct = S::encrypt(&mut rng, &x, b"sym", &pk).unwrap();
        let hit = S::gen_token(&mut rng, &pattern(&[Some(4), None]), &sk, &pk).unwrap();
        let miss = S::gen_token(&mut rng, &pattern(&[Some(4), Some(6)]), &sk, &pk).unwrap();
        assert!(S::query(&ct, &hit, &pk).unwrap().is_match());
        assert!(!S::query(&ct, &miss, &pk).unwrap().is_match());
    }
    check::<Bw>(11);
    check::<Ll>(12);
    check::<Dhve>(13);

    let mut rng = seeded_rng(14);
    assert!(Asym::setup(&mut rng, &GroupSuite::<Bls12_381>::symmetric(), 2).is_err());
}

#[test]
fn query_rejects_length_mismatch() {
    let mut rng = seeded_rng(21);
    let suite = GroupSuite::<Bn254>::asymmetric();
    let (pk2, sk2) = Bw::setup(&mut rng, &suite, 2).unwrap();
    let (pk3, sk3) = Bw::setup(&mut rng, &suite, 3).unwrap();
    let ct = Bw::encrypt(
        &mut rng,
        &AttributeVector::from_ints(&[1, 2]).unwrap(),
        b"",
        &pk2,
    )
    .unwrap();
    let tk = Bw::gen_token(
        &mut rng,
        &PatternVector::all_wildcards(3).unwrap(),
        &sk3,
        &pk3,
    )
    .unwrap();
    assert!(Bw::query(&ct, &tk, &pk2).is_err());
    assert!(Bw::gen_token(
        &mut rng,
        &PatternVector::all_wildcards(3).unwrap(),
        &sk2,
        &pk2
    )
    .is_err());
    assert!(Bw::encrypt(
        &mut rng,
        &AttributeVector::from_ints(&[1]).unwrap(),
        b"",
        &pk2
    )
    .is_err());
}
