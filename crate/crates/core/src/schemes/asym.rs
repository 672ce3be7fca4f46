//! Short-token HVE in asymmetric prime-order groups. Ciphertexts live in
//! `G1`, tokens are four `G2` elements, and a query is four pairings.

use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::{Field, Zero};

use crate::error::{DecodeError, Error, Result};
use crate::group::{
    multi_pair, scalar_nonzero, scalar_random, Fr, GroupSuite, Gt, Mode, PairingSuite,
    RandomSource, G1, G2,
};
use crate::hve::{
    check_l, check_len, AttributeVector, CountElements, ElementCounts, HveScheme, PatternVector,
    SchemeId,
};
use crate::wire::{check_index_set, Record, TlvReader, TlvWriter};

const KIND: u8 = SchemeId::kind_base(4);

/// Scheme marker.
#[derive(Debug, Clone, Copy)]
pub struct Asym;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymPublicKey<E: PairingSuite> {
    pub v: G1<E>,
    pub w1: G1<E>,
    pub w2: G1<E>,
    pub u: Vec<G1<E>>,
    pub h: Vec<G1<E>>,
    pub omega: Gt<E>,
}

/// The secret key is the setup exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymSecretKey<E: PairingSuite> {
    pub v: Fr<E>,
    pub w1: Fr<E>,
    pub w2: Fr<E>,
    pub u: Vec<Fr<E>>,
    pub h: Vec<Fr<E>>,
    pub alpha: Fr<E>,
    pub beta: Fr<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymToken<E: PairingSuite> {
    pub l: usize,
    pub fixed: Vec<usize>,
    pub k0: G2<E>,
    pub k1: G2<E>,
    pub k2: G2<E>,
    pub k3: G2<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymCiphertext<E: PairingSuite> {
    pub c: Gt<E>,
    pub c0: G1<E>,
    pub c1: G1<E>,
    pub c2: G1<E>,
    pub c3: Vec<G1<E>>,
}

#[derive(Debug, Clone)]
pub struct AsymTokenWitness<F: Field> {
    pub r1: F,
    pub r2: F,
    pub r3: F,
}

pub fn setup<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    suite: &GroupSuite<E>,
    l: usize,
) -> Result<(AsymPublicKey<E>, AsymSecretKey<E>)> {
    if suite.mode() != Mode::Asymmetric {
        return Err(Error::AsymmetricSuiteRequired);
    }
    check_l(l)?;
    let mut s = || scalar_random::<Fr<E>, R>(&mut *rng);
    let (w1, w2) = (s(), s());
    let u: Vec<Fr<E>> = (0..l).map(|_| s()).collect();
    let h: Vec<Fr<E>> = (0..l).map(|_| s()).collect();
    let sk = AsymSecretKey {
        v: scalar_nonzero(rng),
        w1,
        w2,
        u,
        h,
        alpha: scalar_nonzero(rng),
        beta: scalar_nonzero(rng),
    };
    let g = suite.g();
    let pk = AsymPublicKey {
        v: g * sk.v,
        w1: g * sk.w1,
        w2: g * sk.w2,
        u: sk.u.iter().map(|x| g * x).collect(),
        h: sk.h.iter().map(|x| g * x).collect(),
        omega: suite.gt_generator() * (sk.v * sk.alpha * sk.beta),
    };
    Ok((pk, sk))
}

pub fn gen_token<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &AsymSecretKey<E>,
) -> Result<AsymToken<E>> {
    gen_token_with_witness(rng, pattern, sk).map(|(tk, _)| tk)
}

pub fn gen_token_with_witness<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &AsymSecretKey<E>,
) -> Result<(AsymToken<E>, AsymTokenWitness<Fr<E>>)> {
    check_len(sk.u.len(), pattern.len())?;
    pattern.ensure_no_delegatable()?;
    let fixed = pattern.fixed_scalars::<Fr<E>>();
    let r1: Fr<E> = scalar_random(rng);
    let r2: Fr<E> = scalar_random(rng);
    let r3: Fr<E> = scalar_random(rng);
    let agg: Fr<E> = fixed
        .iter()
        .map(|&(i, sigma)| sk.u[i] * sigma + sk.h[i])
        .sum();
    let g_hat = G2::<E>::generator();
    let tk = AsymToken {
        l: sk.u.len(),
        fixed: fixed.iter().map(|(i, _)| *i).collect(),
        k0: g_hat * (sk.alpha * sk.beta + sk.w1 * r1 + sk.w2 * r2 + agg * r3),
        k1: g_hat * (sk.v * r1),
        k2: g_hat * (sk.v * r2),
        k3: g_hat * (sk.v * r3),
    };
    Ok((tk, AsymTokenWitness { r1, r2, r3 }))
}

pub fn encrypt_element<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
    m: Gt<E>,
    pk: &AsymPublicKey<E>,
) -> Result<AsymCiphertext<E>> {
    check_len(pk.u.len(), x.len())?;
    let t: Fr<E> = scalar_random(rng);
    let c3 = x
        .to_scalars::<Fr<E>>()
        .iter()
        .enumerate()
        .map(|(i, xi)| (pk.u[i] * xi + pk.h[i]) * t)
        .collect();
    Ok(AsymCiphertext {
        c: pk.omega * t + m,
        c0: pk.v * t,
        c1: pk.w1 * t,
        c2: pk.w2 * t,
        c3,
    })
}

/// `C · e(C0,K0)^{-1} · e(C1,K1) · e(C2,K2) · e(Π_{i∈S} C3_i, K3)`.
pub fn decrypt_element<E: PairingSuite>(
    ct: &AsymCiphertext<E>,
    tk: &AsymToken<E>,
) -> Result<Gt<E>> {
    check_len(tk.l, ct.c3.len())?;
    let agg = tk
        .fixed
        .iter()
        .fold(G1::<E>::zero(), |acc, &i| acc + ct.c3[i]);
    let terms = [
        (-ct.c0, tk.k0),
        (ct.c1, tk.k1),
        (ct.c2, tk.k2),
        (agg, tk.k3),
    ];
    Ok(ct.c + multi_pair::<E>(&terms))
}

impl<E: PairingSuite> HveScheme<E> for Asym {
    const ID: SchemeId = SchemeId::Asym1;
    type PublicKey = AsymPublicKey<E>;
    type SecretKey = AsymSecretKey<E>;
    type Token = AsymToken<E>;
    type Ciphertext = AsymCiphertext<E>;

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

impl<E: PairingSuite> CountElements for AsymPublicKey<E> {
    fn element_counts(&self) -> ElementCounts {
        ElementCounts {
            g1: 3 + self.u.len() + self.h.len(),
            g2: 0,
            gt: 1,
        }
    }
}

impl<E: PairingSuite> CountElements for AsymToken<E> {
    fn element_counts(&self) -> ElementCounts {
        ElementCounts {
            g1: 0,
            g2: 4,
            gt: 0,
        }
    }
}

impl<E: PairingSuite> CountElements for AsymCiphertext<E> {
    fn element_counts(&self) -> ElementCounts {
        ElementCounts {
            g1: 3 + self.c3.len(),
            g2: 0,
            gt: 1,
        }
    }
}

fn read_nonempty<G: CurveGroup>(tag: u8, r: &mut TlvReader<'_>) -> Result<Vec<G>, DecodeError> {
    let v = r.points::<G>(tag)?;
    if v.is_empty() {
        return Err(DecodeError::Malformed("attribute component count"));
    }
    Ok(v)
}

impl<E: PairingSuite> Record for AsymPublicKey<E> {
    const KIND: u8 = KIND;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_point(1, &self.v);
        w.put_point(2, &self.w1);
        w.put_point(3, &self.w2);
        w.put_points(4, &self.u);
        w.put_points(5, &self.h);
        w.put_canonical(6, &self.omega);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let pk = Self {
            v: r.point(1)?,
            w1: r.point(2)?,
            w2: r.point(3)?,
            u: read_nonempty(4, r)?,
            h: read_nonempty(5, r)?,
            omega: r.canonical(6)?,
        };
        if pk.h.len() != pk.u.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(pk)
    }
}

impl<E: PairingSuite> Record for AsymSecretKey<E> {
    const KIND: u8 = KIND + 2;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_canonical(1, &self.v);
        w.put_canonical(2, &self.w1);
        w.put_canonical(3, &self.w2);
        w.put_canonical(4, &self.u);
        w.put_canonical(5, &self.h);
        w.put_canonical(6, &self.alpha);
        w.put_canonical(7, &self.beta);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let sk = Self {
            v: r.canonical(1)?,
            w1: r.canonical(2)?,
            w2: r.canonical(3)?,
            u: r.canonical(4)?,
            h: r.canonical(5)?,
            alpha: r.canonical(6)?,
            beta: r.canonical(7)?,
        };
        if sk.u.is_empty() || sk.h.len() != sk.u.len() {
            return Err(DecodeError::Malformed("attribute component count"));
        }
        Ok(sk)
    }
}

impl<E: PairingSuite> Record for AsymToken<E> {
    const KIND: u8 = KIND + 4;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_u32(1, self.l as u32);
        w.put_indices(2, &self.fixed);
        w.put_points(3, &[self.k0, self.k1, self.k2, self.k3]);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let l = r.u32(1)? as usize;
        let fixed = r.indices(2)?;
        check_index_set(&fixed, l)?;
        match r.points::<G2<E>>(3)?.as_slice() {
            [k0, k1, k2, k3] => Ok(Self {
                l,
                fixed,
                k0: *k0,
                k1: *k1,
                k2: *k2,
                k3: *k3,
            }),
            _ => Err(DecodeError::Malformed("token component count")),
        }
    }
}

impl<E: PairingSuite> Record for AsymCiphertext<E> {
    const KIND: u8 = KIND + 6;

    fn write_body(&self, w: &mut TlvWriter) {
        w.put_canonical(1, &self.c);
        w.put_points(2, &[self.c0, self.c1, self.c2]);
        w.put_points(3, &self.c3);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let c = r.canonical(1)?;
        let [c0, c1, c2] = <[G1<E>; 3]>::try_from(r.points::<G1<E>>(2)?)
            .map_err(|_| DecodeError::Malformed("ciphertext component count"))?;
        Ok(Self {
            c,
            c0,
            c1,
            c2,
            c3: read_nonempty(3, r)?,
        })
    }
}
