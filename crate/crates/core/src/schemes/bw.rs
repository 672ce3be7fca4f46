//! HVE over two-dimensional bilinear product groups, with per-attribute
//! token randomness. Tokens carry `4s + 2` group elements and a query
//! executes `4s + 2` base pairings, where `s` is the number of fixed slots.

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
    gen_basis2, pairing_terms, vec_pair, ProductElement, Side1, Side2, Trapdoor2,
};
use crate::schemes::{read_list, write_list};
use crate::wire::{check_index_set, Record, TlvReader, TlvWriter};

const KIND: u8 = SchemeId::kind_base(1);

/// Scheme marker.
#[derive(Debug, Clone, Copy)]
pub struct Bw;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwPublicKey<E: PairingSuite> {
    pub b11: Side1<E>,
    pub b12: Side1<E>,
    pub b2: Side1<E>,
    pub v: Side1<E>,
    pub u: Vec<Side1<E>>,
    pub h: Vec<Side1<E>>,
    pub w: Vec<Side1<E>>,
    pub omega: Gt<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwSecretKey<E: PairingSuite> {
    pub v2: Side2<E>,
    pub u2: Vec<Side2<E>>,
    pub h2: Vec<Side2<E>>,
    pub w2: Vec<Side2<E>>,
    /// `(B12)^α` on side 2.
    pub b12_alpha: Side2<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwToken<E: PairingSuite> {
    pub l: usize,
    /// Fixed slot indexes `S`, ascending.
    pub fixed: Vec<usize>,
    pub k1: Side2<E>,
    pub k2: Vec<Side2<E>>,
    pub k3: Vec<Side2<E>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwCiphertext<E: PairingSuite> {
    pub c0: Gt<E>,
    pub c1: Side1<E>,
    pub c2: Vec<Side1<E>>,
    pub c3: Vec<Side1<E>>,
}

/// Every exponent chosen during setup, for trapdoor reconstruction in tests.
#[derive(Debug, Clone)]
pub struct BwSetupWitness<F: Field> {
    pub trapdoor: Trapdoor2<F>,
    pub v: F,
    pub u: Vec<F>,
    pub h: Vec<F>,
    pub w: Vec<F>,
    pub alpha: F,
    pub z_v: F,
}

pub fn setup<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    suite: &GroupSuite<E>,
    l: usize,
) -> Result<(BwPublicKey<E>, BwSecretKey<E>)> {
    setup_with_witness(rng, suite, l).map(|(pk, sk, _)| (pk, sk))
}

#[allow(clippy::type_complexity)]
pub fn setup_with_witness<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    _suite: &GroupSuite<E>,
    l: usize,
) -> Result<(BwPublicKey<E>, BwSecretKey<E>, BwSetupWitness<Fr<E>>)> {
    check_l(l)?;
    let basis = gen_basis2::<E, R>(rng);
    let (b11, b12, b2) = (&basis.b11.side1, &basis.b12, &basis.b2.side1);

    let v: Fr<E> = scalar_nonzero(rng);
    let alpha: Fr<E> = scalar_nonzero(rng);
    let mut draw = |n| -> Vec<Fr<E>> { (0..n).map(|_| scalar_random(&mut *rng)).collect() };
    let (u, h, w) = (draw(l), draw(l), draw(l));
    let z_v: Fr<E> = scalar_random(rng);

    let blind = |x: Fr<E>, z: Fr<E>| ProductElement::lincomb(&[(b11, x), (b2, z)]);
    let mut blinded = |xs: &[Fr<E>]| -> Vec<Side1<E>> {
        xs.iter()
            .map(|x| blind(*x, scalar_random(&mut *rng)))
            .collect()
    };
    let (pu, ph, pw) = (blinded(&u), blinded(&h), blinded(&w));

    let v1 = b11.exp(v);
    let omega = vec_pair::<E>(&v1, &b12.side2)? * alpha;

    let pk = BwPublicKey {
        b11: b11.clone(),
        b12: b12.side1.clone(),
        b2: b2.clone(),
        v: blind(v, z_v),
        u: pu,
        h: ph,
        w: pw,
        omega,
    };
    let side2 = |xs: &[Fr<E>]| xs.iter().map(|x| b12.side2.exp(*x)).collect::<Vec<_>>();
    let sk = BwSecretKey {
        v2: b12.side2.exp(v),
        u2: side2(&u),
        h2: side2(&h),
        w2: side2(&w),
        b12_alpha: b12.side2.exp(alpha),
    };
    let witness = BwSetupWitness {
        trapdoor: *basis.trapdoor(),
        v,
        u,
        h,
        w,
        alpha,
        z_v,
    };
    Ok((pk, sk, witness))
}

pub fn gen_token<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &BwSecretKey<E>,
) -> Result<BwToken<E>> {
    let l = sk.u2.len();
    check_len(l, pattern.len())?;
    pattern.ensure_no_delegatable()?;

    let fixed = pattern.fixed_scalars::<Fr<E>>();
    let mut terms: Vec<(&Side2<E>, Fr<E>)> = vec![(&sk.b12_alpha, Fr::<E>::ONE)];
    let mut k2 = Vec::with_capacity(fixed.len());
    let mut k3 = Vec::with_capacity(fixed.len());
    for &(i, sigma) in &fixed {
        let r1: Fr<E> = scalar_random(rng);
        let r2: Fr<E> = scalar_random(rng);
        terms.push((&sk.u2[i], sigma * r1));
        terms.push((&sk.h2[i], r1));
        terms.push((&sk.w2[i], r2));
        k2.push(sk.v2.exp(-r1));
        k3.push(sk.v2.exp(-r2));
    }
    Ok(BwToken {
        l,
        fixed: fixed.iter().map(|(i, _)| *i).collect(),
        k1: ProductElement::lincomb(&terms),
        k2,
        k3,
    })
}

pub fn encrypt_element<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
    m: Gt<E>,
    pk: &BwPublicKey<E>,
) -> Result<BwCiphertext<E>> {
    check_len(pk.u.len(), x.len())?;
    let t: Fr<E> = scalar_random(rng);
    let xs = x.to_scalars::<Fr<E>>();
    let c1 = ProductElement::lincomb(&[(&pk.v, t), (&pk.b2, scalar_random(rng))]);
    let mut c2 = Vec::with_capacity(xs.len());
    let mut c3 = Vec::with_capacity(xs.len());
    for (i, xi) in xs.iter().enumerate() {
        c2.push(ProductElement::lincomb(&[
            (&pk.u[i], *xi * t),
            (&pk.h[i], t),
            (&pk.b2, scalar_random(rng)),
        ]));
        c3.push(ProductElement::lincomb(&[
            (&pk.w[i], t),
            (&pk.b2, scalar_random(rng)),
        ]));
    }
    Ok(BwCiphertext {
        c0: pk.omega * t + m,
        c1,
        c2,
        c3,
    })
}

/// `C0 · (e(C1, K1) · Π_{i∈S} e(C2_i, K2_i) e(C3_i, K3_i))^{-1}`.
pub fn decrypt_element<E: PairingSuite>(ct: &BwCiphertext<E>, tk: &BwToken<E>) -> Result<Gt<E>> {
    check_len(tk.l, ct.c2.len())?;
    let mut terms: Vec<(G1<E>, G2<E>)> = pairing_terms::<E>(&ct.c1, &tk.k1);
    for (j, &i) in tk.fixed.iter().enumerate() {
        terms.extend(pairing_terms::<E>(&ct.c2[i], &tk.k2[j]));
        terms.extend(pairing_terms::<E>(&ct.c3[i], &tk.k3[j]));
    }
    Ok(ct.c0 - multi_pair::<E>(&terms))
}

impl<E: PairingSuite> HveScheme<E> for Bw {
    const ID: SchemeId = SchemeId::Bw2;
    type PublicKey = BwPublicKey<E>;
    type SecretKey = BwSecretKey<E>;
    type Token = BwToken<E>;
    type Ciphertext = BwCiphertext<E>;

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

fn side1_count<E: PairingSuite>(xs: &[&Side1<E>]) -> usize {
    xs.iter().map(|x| x.dim()).sum()
}

impl<E: PairingSuite> CountElements for BwPublicKey<E> {
    fn element_counts(&self) -> ElementCounts {
        let per_attr: usize = self
            .u
            .iter()
            .chain(&self.h)
            .chain(&self.w)
            .map(|x| x.dim())
            .sum();
        ElementCounts {
            g1: side1_count::<E>(&[&self.b11, &self.b12, &self.b2, &self.v]) + per_attr,
            g2: 0,
            gt: 1,
        }
    }
}

impl<E: PairingSuite> CountElements for BwToken<E> {
    fn element_counts(&self) -> ElementCounts {
        let g2 = self.k1.dim()
            + self
                .k2
                .iter()
                .chain(&self.k3)
                .map(|k| k.dim())
                .sum::<usize>();
        ElementCounts { g1: 0, g2, gt: 0 }
    }
}

impl<E: PairingSuite> CountElements for BwCiphertext<E> {
    fn element_counts(&self) -> ElementCounts {
        let g1 = self.c1.dim()
            + self
                .c2
                .iter()
                .chain(&self.c3)
                .map(|c| c.dim())
                .sum::<usize>();
        ElementCounts { g1, g2: 0, gt: 1 }
    }
}

impl<E: PairingSuite> Record for BwPublicKey<E> {
    const KIND: u8 = KIND;

    fn write_body(&self, w: &mut TlvWriter) {
        self.b11.write(1, w);
        self.b12.write(2, w);
        self.b2.write(3, w);
        self.v.write(4, w);
        write_list(5, &self.u, w);
        write_list(6, &self.h, w);
        write_list(7, &self.w, w);
        w.put_canonical(8, &self.omega);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let pk = Self {
            b11: ProductElement::read_dim(1, 2, r)?,
            b12: ProductElement::read_dim(2, 2, r)?,
            b2: ProductElement::read_dim(3, 2, r)?,
            v: ProductElement::read_dim(4, 2, r)?,
            u: read_list(5, 2, r)?,
            h: read_list(6, 2, r)?,
            w: read_list(7, 2, r)?,
            omega: r.canonical(8)?,
        };
        if pk.u.is_empty() || pk.h.len() != pk.u.len() || pk.w.len() != pk.u.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(pk)
    }
}

impl<E: PairingSuite> Record for BwSecretKey<E> {
    const KIND: u8 = KIND + 2;

    fn write_body(&self, w: &mut TlvWriter) {
        self.v2.write(1, w);
        write_list(2, &self.u2, w);
        write_list(3, &self.h2, w);
        write_list(4, &self.w2, w);
        self.b12_alpha.write(5, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let sk = Self {
            v2: ProductElement::read_dim(1, 2, r)?,
            u2: read_list(2, 2, r)?,
            h2: read_list(3, 2, r)?,
            w2: read_list(4, 2, r)?,
            b12_alpha: ProductElement::read_dim(5, 2, r)?,
        };
        if sk.u2.is_empty() || sk.h2.len() != sk.u2.len() || sk.w2.len() != sk.u2.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(sk)
    }
}

impl<E: PairingSuite> Record for BwToken<E> {
    const KIND: u8 = KIND + 4;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_u32(1, self.l as u32);
        w.put_indices(2, &self.fixed);
        self.k1.write(3, w);
        write_list(4, &self.k2, w);
        write_list(5, &self.k3, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let l = r.u32(1)? as usize;
        let fixed = r.indices(2)?;
        check_index_set(&fixed, l)?;
        let tk = Self {
            l,
            fixed,
            k1: ProductElement::read_dim(3, 2, r)?,
            k2: read_list(4, 2, r)?,
            k3: read_list(5, 2, r)?,
        };
        if tk.k2.len() != tk.fixed.len() || tk.k3.len() != tk.fixed.len() {
            return Err(DecodeError::Malformed("token component count"));
        }
        Ok(tk)
    }
}

impl<E: PairingSuite> Record for BwCiphertext<E> {
    const KIND: u8 = KIND + 6;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_canonical(1, &self.c0);
        self.c1.write(2, w);
        write_list(3, &self.c2, w);
        write_list(4, &self.c3, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let ct = Self {
            c0: r.canonical(1)?,
            c1: ProductElement::read_dim(2, 2, r)?,
            c2: read_list(3, 2, r)?,
            c3: read_list(4, 2, r)?,
        };
        if ct.c2.is_empty() || ct.c3.len() != ct.c2.len() {
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

    fn suite() -> GroupSuite<E> {
        GroupSuite::asymmetric()
    }

    #[test]
    fn setup_counts_and_omega() {
        let mut rng = seeded_rng(1);
        let (pk, _sk, wit) = setup_with_witness(&mut rng, &suite(), 1).unwrap();
        assert_eq!(
            pk.element_counts(),
            ElementCounts {
                g1: 14,
                g2: 0,
                gt: 1
            }
        );
        // Ω = vec_pair::<E>(V · B2^{-z_v}, B12)^α = e(g,ĝ)^{v'·(b11·b12)·α}
        let unblinded = pk.v.try_mul(&pk.b2.exp(-wit.z_v)).unwrap();
        let b12_hat = Side2::<E>::from_exponents(&wit.trapdoor.vectors()[1]);
        assert_eq!(
            vec_pair::<E>(&unblinded, &b12_hat).unwrap() * wit.alpha,
            pk.omega
        );
        assert_eq!(pk.omega, E::gt_generator() * (wit.v * wit.alpha));
        assert!(vec_pair::<E>(&pk.b2, &b12_hat).unwrap().is_zero());
        assert_eq!(
            setup::<E, _>(&mut rng, &suite(), 0).unwrap_err(),
            crate::Error::EmptyVector
        );
    }

    #[test]
    fn token_shapes() {
        let mut rng = seeded_rng(2);
        let (pk, sk) = setup(&mut rng, &suite(), 3).unwrap();
        let all = gen_token(&mut rng, &PatternVector::all_wildcards(3).unwrap(), &sk).unwrap();
        assert_eq!(all.element_counts().g2, 2);
        assert_eq!(all.k1, sk.b12_alpha);

        let p =
            PatternVector::new(vec![Slot::value(1u64), Slot::Wildcard, Slot::value(2u64)]).unwrap();
        let tk = gen_token(&mut rng, &p, &sk).unwrap();
        assert_eq!(tk.element_counts().g2, 10);
        assert_eq!(tk.fixed, vec![0, 2]);
        for k in std::iter::once(&tk.k1).chain(&tk.k2).chain(&tk.k3) {
            assert!(vec_pair::<E>(&pk.b2, k).unwrap().is_zero());
        }

        let d =
            PatternVector::new(vec![Slot::Delegatable, Slot::Wildcard, Slot::Wildcard]).unwrap();
        assert!(gen_token(&mut rng, &d, &sk).is_err());
        let short = PatternVector::all_wildcards(2).unwrap();
        assert!(gen_token(&mut rng, &short, &sk).is_err());
    }

    #[test]
    fn ciphertext_counts_and_randomization() {
        let mut rng = seeded_rng(3);
        let (pk, _) = setup(&mut rng, &suite(), 3).unwrap();
        let x = AttributeVector::from_ints(&[1, 2, 3]).unwrap();
        let ct = encrypt_element(&mut rng, &x, Gt::<E>::zero(), &pk).unwrap();
        assert_eq!(
            ct.element_counts(),
            ElementCounts {
                g1: 14,
                g2: 0,
                gt: 1
            }
        );
        let ct2 = encrypt_element(&mut rng, &x, Gt::<E>::zero(), &pk).unwrap();
        assert_ne!(ct.to_bytes(1), ct2.to_bytes(1));
    }

    #[test]
    fn raw_mode_identity_message() {
        let mut rng = seeded_rng(4);
        let (pk, sk) = setup(&mut rng, &suite(), 2).unwrap();
        let x = AttributeVector::from_ints(&[5, 6]).unwrap();
        let ct = encrypt_element(&mut rng, &x, Gt::<E>::zero(), &pk).unwrap();
        let tk = gen_token(&mut rng, &PatternVector::exact(&x), &sk).unwrap();
        assert!(decrypt_element(&ct, &tk).unwrap().is_zero());
    }

    #[test]
    fn query_pairing_count_and_outcomes() {
        let mut rng = seeded_rng(5);
        let (pk, sk) = setup(&mut rng, &suite(), 3).unwrap();
        let x = AttributeVector::from_ints(&[1, 2, 3]).unwrap();
        let ct = Bw::encrypt(&mut rng, &x, b"hello", &pk).unwrap();
        let p =
            PatternVector::new(vec![Slot::value(1u64), Slot::Wildcard, Slot::value(3u64)]).unwrap();
        let tk = gen_token(&mut rng, &p, &sk).unwrap();
        reset_pairing_count();
        assert_eq!(
            Bw::query(&ct, &tk, &pk).unwrap(),
            MatchResult::Matched(b"hello".to_vec())
        );
        assert_eq!(pairing_count(), 10);
        let q =
            PatternVector::new(vec![Slot::value(1u64), Slot::Wildcard, Slot::value(4u64)]).unwrap();
        let tk = gen_token(&mut rng, &q, &sk).unwrap();
        assert_eq!(Bw::query(&ct, &tk, &pk).unwrap(), MatchResult::NoMatch);
        let m = gt_random::<E, _>(&mut rng);
        let raw = encrypt_element(&mut rng, &x, m, &pk).unwrap();
        assert_ne!(decrypt_element(&raw, &tk).unwrap(), m);
    }
}
