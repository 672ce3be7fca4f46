//! Constant-size-token HVE over three-dimensional product groups. All fixed
//! slots share one token exponent, so every token is four product elements
//! and every query is twelve base pairings.

use ark_ff::Field;

use crate::error::{DecodeError, Result};
use crate::group::{
    multi_pair, scalar_nonzero, scalar_random, Fr, GroupSuite, Gt, PairingSuite, RandomSource, G1,
    G2,
};
use crate::hve::{
    check_l, check_len, AttributeVector, CountElements, ElementCounts, HveScheme, PatternVector,
    SchemeId,
};
use crate::product::{
    gen_basis3, pairing_terms, vec_pair, ProductElement, Side1, Side2, Trapdoor3,
};
use crate::schemes::{read_list, write_list};
use crate::wire::{check_index_set, Record, TlvReader, TlvWriter};

const KIND: u8 = SchemeId::kind_base(2);

/// Scheme marker.
#[derive(Debug, Clone, Copy)]
pub struct Ll;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlPublicKey<E: PairingSuite> {
    pub b11: Side1<E>,
    pub b12: Side1<E>,
    pub b2: Side1<E>,
    pub b3: Side1<E>,
    /// `B3` on side 2, for re-blinding tokens.
    pub b3_hat: Side2<E>,
    pub v: Side1<E>,
    pub w1: Side1<E>,
    pub w2: Side1<E>,
    pub u: Vec<Side1<E>>,
    pub h: Vec<Side1<E>>,
    pub omega: Gt<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlSecretKey<E: PairingSuite> {
    pub v2: Side2<E>,
    pub w21: Side2<E>,
    pub w22: Side2<E>,
    pub u2: Vec<Side2<E>>,
    pub h2: Vec<Side2<E>>,
    pub b12_alpha: Side2<E>,
    pub b3_hat: Side2<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlToken<E: PairingSuite> {
    pub l: usize,
    pub fixed: Vec<usize>,
    pub k1: Side2<E>,
    pub k2: Side2<E>,
    pub k3: Side2<E>,
    pub k4: Side2<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlCiphertext<E: PairingSuite> {
    pub c0: Gt<E>,
    pub c1: Side1<E>,
    pub c2: Side1<E>,
    pub c3: Side1<E>,
    pub c4: Vec<Side1<E>>,
}

#[derive(Debug, Clone)]
pub struct LlSetupWitness<F: Field> {
    pub trapdoor: Trapdoor3<F>,
    pub v: F,
    pub w1: F,
    pub w2: F,
    pub u: Vec<F>,
    pub h: Vec<F>,
    pub alpha: F,
}

pub fn setup<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    suite: &GroupSuite<E>,
    l: usize,
) -> Result<(LlPublicKey<E>, LlSecretKey<E>)> {
    setup_with_witness(rng, suite, l).map(|(pk, sk, _)| (pk, sk))
}

#[allow(clippy::type_complexity)]
pub fn setup_with_witness<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    _suite: &GroupSuite<E>,
    l: usize,
) -> Result<(LlPublicKey<E>, LlSecretKey<E>, LlSetupWitness<Fr<E>>)> {
    check_l(l)?;
    let basis = gen_basis3::<E, R>(rng);
    let (b11, b12, b2) = (&basis.b11.side1, &basis.b12, &basis.b2.side1);

    let v: Fr<E> = scalar_nonzero(rng);
    let alpha: Fr<E> = scalar_nonzero(rng);
    let w1: Fr<E> = scalar_random(rng);
    let w2: Fr<E> = scalar_random(rng);
    let u: Vec<Fr<E>> = (0..l).map(|_| scalar_random(&mut *rng)).collect();
    let h: Vec<Fr<E>> = (0..l).map(|_| scalar_random(&mut *rng)).collect();

    let mut blind = |x: Fr<E>| ProductElement::lincomb(&[(b11, x), (b2, scalar_random(&mut *rng))]);
    let pv = blind(v);
    let pw1 = blind(w1);
    let pw2 = blind(w2);
    let pu: Vec<_> = u.iter().map(|x| blind(*x)).collect();
    let ph: Vec<_> = h.iter().map(|x| blind(*x)).collect();

    let omega = vec_pair::<E>(&b11.exp(v), &b12.side2)? * alpha;
    let pk = LlPublicKey {
        b11: b11.clone(),
        b12: b12.side1.clone(),
        b2: b2.clone(),
        b3: basis.b3.side1.clone(),
        b3_hat: basis.b3.side2.clone(),
        v: pv,
        w1: pw1,
        w2: pw2,
        u: pu,
        h: ph,
        omega,
    };
    let hat = |x: &Fr<E>| b12.side2.exp(*x);
    let sk = LlSecretKey {
        v2: hat(&v),
        w21: hat(&w1),
        w22: hat(&w2),
        u2: u.iter().map(hat).collect(),
        h2: h.iter().map(hat).collect(),
        b12_alpha: hat(&alpha),
        b3_hat: basis.b3.side2.clone(),
    };
    let witness = LlSetupWitness {
        trapdoor: *basis.trapdoor(),
        v,
        w1,
        w2,
        u,
        h,
        alpha,
    };
    Ok((pk, sk, witness))
}

/// Token exponents, returned for structural checks.
#[derive(Debug, Clone)]
pub struct LlTokenWitness<F: Field> {
    pub r1: F,
    pub r2: F,
    pub r3: F,
    pub y: [F; 4],
}

pub fn gen_token<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &LlSecretKey<E>,
) -> Result<LlToken<E>> {
    gen_token_with_witness(rng, pattern, sk).map(|(tk, _)| tk)
}

pub fn gen_token_with_witness<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &LlSecretKey<E>,
) -> Result<(LlToken<E>, LlTokenWitness<Fr<E>>)> {
    let l = sk.u2.len();
    check_len(l, pattern.len())?;
    pattern.ensure_no_delegatable()?;
    let fixed = pattern.fixed_scalars::<Fr<E>>();

    let mut s = || scalar_random::<Fr<E>, R>(&mut *rng);
    let (r1, r2, r3) = (s(), s(), s());
    let y = [s(), s(), s(), s()];

    let mut terms = vec![
        (&sk.b12_alpha, Fr::<E>::ONE),
        (&sk.w21, r1),
        (&sk.w22, r2),
        (&sk.b3_hat, y[0]),
    ];
    for &(i, sigma) in &fixed {
        terms.push((&sk.u2[i], sigma * r3));
        terms.push((&sk.h2[i], r3));
    }
    let tail = |r: Fr<E>, y: Fr<E>| ProductElement::lincomb(&[(&sk.v2, -r), (&sk.b3_hat, y)]);
    let tk = LlToken {
        l,
        fixed: fixed.iter().map(|(i, _)| *i).collect(),
        k1: ProductElement::lincomb(&terms),
        k2: tail(r1, y[1]),
        k3: tail(r2, y[2]),
        k4: tail(r3, y[3]),
    };
    Ok((tk, LlTokenWitness { r1, r2, r3, y }))
}

pub fn encrypt_element<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
    m: Gt<E>,
    pk: &LlPublicKey<E>,
) -> Result<LlCiphertext<E>> {
    check_len(pk.u.len(), x.len())?;
    let t: Fr<E> = scalar_random(rng);
    let mut blinded = |terms: &[(&Side1<E>, Fr<E>)]| {
        let mut all = terms.to_vec();
        all.push((&pk.b2, scalar_random(&mut *rng)));
        ProductElement::lincomb(&all)
    };
    let c1 = blinded(&[(&pk.v, t)]);
    let c2 = blinded(&[(&pk.w1, t)]);
    let c3 = blinded(&[(&pk.w2, t)]);
    let c4 = x
        .to_scalars::<Fr<E>>()
        .iter()
        .enumerate()
        .map(|(i, xi)| blinded(&[(&pk.u[i], *xi * t), (&pk.h[i], t)]))
        .collect();
    Ok(LlCiphertext {
        c0: pk.omega * t + m,
        c1,
        c2,
        c3,
        c4,
    })
}

/// `Π_{i∈S} C4_i` in ascending index order; the identity when `S` is empty.
pub(crate) fn aggregate<E: PairingSuite>(c4: &[Side1<E>], s: &[usize]) -> Side1<E> {
    s.iter().fold(Side1::<E>::identity(3), |acc, &i| {
        acc.try_mul(&c4[i])
            .expect("ciphertext components share dimension 3")
    })
}

pub fn decrypt_element<E: PairingSuite>(ct: &LlCiphertext<E>, tk: &LlToken<E>) -> Result<Gt<E>> {
    check_len(tk.l, ct.c4.len())?;
    let agg = aggregate::<E>(&ct.c4, &tk.fixed);
    let mut terms: Vec<(G1<E>, G2<E>)> = pairing_terms::<E>(&ct.c1, &tk.k1);
    terms.extend(pairing_terms::<E>(&ct.c2, &tk.k2));
    terms.extend(pairing_terms::<E>(&ct.c3, &tk.k3));
    terms.extend(pairing_terms::<E>(&agg, &tk.k4));
    Ok(ct.c0 - multi_pair::<E>(&terms))
}

impl<E: PairingSuite> HveScheme<E> for Ll {
    const ID: SchemeId = SchemeId::Ll3;
    type PublicKey = LlPublicKey<E>;
    type SecretKey = LlSecretKey<E>;
    type Token = LlToken<E>;
    type Ciphertext = LlCiphertext<E>;

    fn setup<R: RandomSource + ?Sized>(
        rng: &mut R,
        suite: &GroupSuite<E>,
        l: usize,
    ) -> Result<(Self::PublicKey, Self::SecretKey)> {
        setup(rng, suite, l)
    }

    fn gen_token<R: RandomSource + ?Sized>(
        rng: &mut R,
        pattern: &PatternVector,
        sk: &Self::SecretKey,
        _pk: &Self::PublicKey,
    ) -> Result<Self::Token> {
        gen_token(rng, pattern, sk)
    }

    fn encrypt_element<R: RandomSource + ?Sized>(
        rng: &mut R,
        x: &AttributeVector,
        m: Gt<E>,
        pk: &Self::PublicKey,
    ) -> Result<Self::Ciphertext> {
        encrypt_element(rng, x, m, pk)
    }

    fn decrypt_element(
        ct: &Self::Ciphertext,
        tk: &Self::Token,
        _pk: &Self::PublicKey,
    ) -> Result<Gt<E>> {
        decrypt_element(ct, tk)
    }

    fn attribute_len(pk: &Self::PublicKey) -> usize {
        pk.u.len()
    }
}

impl<E: PairingSuite> CountElements for LlPublicKey<E> {
    fn element_counts(&self) -> ElementCounts {
        let fixed = [
            &self.b11, &self.b12, &self.b2, &self.b3, &self.v, &self.w1, &self.w2,
        ];
        let g1 = fixed.iter().map(|x| x.dim()).sum::<usize>()
            + self.u.iter().chain(&self.h).map(|x| x.dim()).sum::<usize>();
        ElementCounts {
            g1,
            g2: self.b3_hat.dim(),
            gt: 1,
        }
    }
}

impl<E: PairingSuite> CountElements for LlToken<E> {
    fn element_counts(&self) -> ElementCounts {
        let g2 = [&self.k1, &self.k2, &self.k3, &self.k4]
            .iter()
            .map(|k| k.dim())
            .sum();
        ElementCounts { g1: 0, g2, gt: 0 }
    }
}

impl<E: PairingSuite> CountElements for LlCiphertext<E> {
    fn element_counts(&self) -> ElementCounts {
        let g1 = [&self.c1, &self.c2, &self.c3]
            .iter()
            .map(|c| c.dim())
            .sum::<usize>()
            + self.c4.iter().map(|c| c.dim()).sum::<usize>();
        ElementCounts { g1, g2: 0, gt: 1 }
    }
}

impl<E: PairingSuite> Record for LlPublicKey<E> {
    const KIND: u8 = KIND;

    fn write_body(&self, w: &mut TlvWriter) {
        self.b11.write(1, w);
        self.b12.write(2, w);
        self.b2.write(3, w);
        self.b3.write(4, w);
        self.b3_hat.write(5, w);
        self.v.write(6, w);
        self.w1.write(7, w);
        self.w2.write(8, w);
        write_list(9, &self.u, w);
        write_list(10, &self.h, w);
        w.put_canonical(11, &self.omega);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let pk = Self {
            b11: ProductElement::read_dim(1, 3, r)?,
            b12: ProductElement::read_dim(2, 3, r)?,
            b2: ProductElement::read_dim(3, 3, r)?,
            b3: ProductElement::read_dim(4, 3, r)?,
            b3_hat: ProductElement::read_dim(5, 3, r)?,
            v: ProductElement::read_dim(6, 3, r)?,
            w1: ProductElement::read_dim(7, 3, r)?,
            w2: ProductElement::read_dim(8, 3, r)?,
            u: read_list(9, 3, r)?,
            h: read_list(10, 3, r)?,
            omega: r.canonical(11)?,
        };
        if pk.u.is_empty() || pk.h.len() != pk.u.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(pk)
    }
}

impl<E: PairingSuite> Record for LlSecretKey<E> {
    const KIND: u8 = KIND + 2;

    fn write_body(&self, w: &mut TlvWriter) {
        self.v2.write(1, w);
        self.w21.write(2, w);
        self.w22.write(3, w);
        write_list(4, &self.u2, w);
        write_list(5, &self.h2, w);
        self.b12_alpha.write(6, w);
        self.b3_hat.write(7, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let sk = Self {
            v2: ProductElement::read_dim(1, 3, r)?,
            w21: ProductElement::read_dim(2, 3, r)?,
            w22: ProductElement::read_dim(3, 3, r)?,
            u2: read_list(4, 3, r)?,
            h2: read_list(5, 3, r)?,
            b12_alpha: ProductElement::read_dim(6, 3, r)?,
            b3_hat: ProductElement::read_dim(7, 3, r)?,
        };
        if sk.u2.is_empty() || sk.h2.len() != sk.u2.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(sk)
    }
}

impl<E: PairingSuite> Record for LlToken<E> {
    const KIND: u8 = KIND + 4;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_u32(1, self.l as u32);
        w.put_indices(2, &self.fixed);
        self.k1.write(3, w);
        self.k2.write(4, w);
        self.k3.write(5, w);
        self.k4.write(6, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let l = r.u32(1)? as usize;
        let fixed = r.indices(2)?;
        check_index_set(&fixed, l)?;
        Ok(Self {
            l,
            fixed,
            k1: ProductElement::read_dim(3, 3, r)?,
            k2: ProductElement::read_dim(4, 3, r)?,
            k3: ProductElement::read_dim(5, 3, r)?,
            k4: ProductElement::read_dim(6, 3, r)?,
        })
    }
}

impl<E: PairingSuite> Record for LlCiphertext<E> {
    const KIND: u8 = KIND + 6;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_canonical(1, &self.c0);
        self.c1.write(2, w);
        self.c2.write(3, w);
        self.c3.write(4, w);
        write_list(5, &self.c4, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let ct = Self {
            c0: r.canonical(1)?,
            c1: ProductElement::read_dim(2, 3, r)?,
            c2: ProductElement::read_dim(3, 3, r)?,
            c3: ProductElement::read_dim(4, 3, r)?,
            c4: read_list(5, 3, r)?,
        };
        if ct.c4.is_empty() {
            return Err(DecodeError::Malformed("ciphertext component count"));
        }
        Ok(ct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{gt_random, pairing_count, reset_pairing_count, seeded_rng};
    use crate::hve::{MatchResult, Slot};
    use ark_bls12_381::Bls12_381 as E;
    use ark_ff::Zero;

    type F = Fr<E>;

    #[test]
    fn counts() {
        let mut rng = seeded_rng(1);
        let (pk, sk) = setup(&mut rng, &GroupSuite::<E>::asymmetric(), 4).unwrap();
        assert_eq!(
            pk.element_counts(),
            ElementCounts {
                g1: 21 + 24,
                g2: 3,
                gt: 1
            }
        );
        let x = AttributeVector::from_ints(&[1, 2, 3, 4]).unwrap();
        let ct = encrypt_element(&mut rng, &x, Gt::<E>::zero(), &pk).unwrap();
        assert_eq!(
            ct.element_counts(),
            ElementCounts {
                g1: 21,
                g2: 0,
                gt: 1
            }
        );
        for p in [
            PatternVector::all_wildcards(4).unwrap(),
            PatternVector::exact(&x),
        ] {
            let tk = gen_token(&mut rng, &p, &sk).unwrap();
            assert_eq!(tk.element_counts().g2, 12);
            reset_pairing_count();
            let _ = decrypt_element(&ct, &tk).unwrap();
            assert_eq!(pairing_count(), 12);
        }
    }

    #[test]
    fn token_exponent_structure() {
        let mut rng = seeded_rng(2);
        let (_, sk, wit) = setup_with_witness(&mut rng, &GroupSuite::<E>::asymmetric(), 3).unwrap();
        let p =
            PatternVector::new(vec![Slot::value(7u64), Slot::Wildcard, Slot::value(9u64)]).unwrap();
        let (tk, tw) = gen_token_with_witness(&mut rng, &p, &sk).unwrap();
        let [_, b12, _, b3] = wit.trapdoor.vectors();
        let from = |c12: F, c3: F| Side2::<E>::from_exponents(&b12.scale(c12).add(&b3.scale(c3)));
        let agg = (F::from(7u64) * wit.u[0] + wit.h[0]) + (F::from(9u64) * wit.u[2] + wit.h[2]);
        let k1 = wit.alpha + wit.w1 * tw.r1 + wit.w2 * tw.r2 + agg * tw.r3;
        assert_eq!(tk.k1, from(k1, tw.y[0]));
        assert_eq!(tk.k2, from(-wit.v * tw.r1, tw.y[1]));
        assert_eq!(tk.k3, from(-wit.v * tw.r2, tw.y[2]));
        assert_eq!(tk.k4, from(-wit.v * tw.r3, tw.y[3]));
    }

    #[test]
    fn raw_and_sealed_queries() {
        let mut rng = seeded_rng(3);
        let (pk, sk) = setup(&mut rng, &GroupSuite::<E>::asymmetric(), 3).unwrap();
        let x = AttributeVector::from_ints(&[1, 2, 3]).unwrap();
        let m = gt_random::<E, _>(&mut rng);
        let ct = encrypt_element(&mut rng, &x, m, &pk).unwrap();
        let p =
            PatternVector::new(vec![Slot::Wildcard, Slot::value(2u64), Slot::value(3u64)]).unwrap();
        let tk = gen_token(&mut rng, &p, &sk).unwrap();
        assert_eq!(decrypt_element(&ct, &tk).unwrap(), m);
        let wild = gen_token(&mut rng, &PatternVector::all_wildcards(3).unwrap(), &sk).unwrap();
        assert_eq!(decrypt_element(&ct, &wild).unwrap(), m);

        let sealed = Ll::encrypt(&mut rng, &x, b"row 1", &pk).unwrap();
        assert_eq!(
            Ll::query(&sealed, &tk, &pk).unwrap(),
            MatchResult::Matched(b"row 1".to_vec())
        );
        let q =
            PatternVector::new(vec![Slot::value(0u64), Slot::Wildcard, Slot::Wildcard]).unwrap();
        let tk = gen_token(&mut rng, &q, &sk).unwrap();
        assert_eq!(Ll::query(&sealed, &tk, &pk).unwrap(), MatchResult::NoMatch);
    }

    #[test]
    fn records_round_trip() {
        let mut rng = seeded_rng(4);
        let (pk, sk) = setup(&mut rng, &GroupSuite::<E>::asymmetric(), 2).unwrap();
        let x = AttributeVector::from_ints(&[1, 2]).unwrap();
        let ct = Ll::encrypt(&mut rng, &x, b"p", &pk).unwrap();
        let tk = gen_token(&mut rng, &PatternVector::exact(&x), &sk).unwrap();
        assert_eq!(
            LlPublicKey::<E>::from_bytes(&pk.to_bytes(1), 1).unwrap(),
            pk
        );
        assert_eq!(
            LlSecretKey::<E>::from_bytes(&sk.to_bytes(1), 1).unwrap(),
            sk
        );
        assert_eq!(LlToken::<E>::from_bytes(&tk.to_bytes(1), 1).unwrap(), tk);
        let back = crate::hve::SealedCiphertext::<LlCiphertext<E>>::from_bytes(&ct.to_bytes(1), 1)
            .unwrap();
        assert_eq!(back, ct);
        assert!(LlToken::<E>::from_bytes(&pk.to_bytes(1), 1).is_err());
    }
}
