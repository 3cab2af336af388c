//! The zero-bit PRC interface and the repetition amplifier.
//!
//! A zero-bit scheme only ever encodes the message "1"; decoding answers
//! [`Verdict::One`] (looks like a corrupted codeword) or [`Verdict::Bot`].
//! Base schemes only need to decode a codeword with probability `alpha`
//! noticeably above the probability `delta` that a random string decodes.
//! [`Amplified`] concatenates `t` independently encoded base codewords,
//! masks each block with a secret shift, permutes all `t * n` positions with
//! a secret permutation, and decodes by majority-style vote against the
//! threshold `ceil(t * (alpha + delta) / 2)`.

use alloc::vec::Vec;
use core::fmt::Debug;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::bits::BitString;
use crate::channels::ChannelSpec;
use crate::error::{check_len, Error};
use crate::rng::RngStream;
use crate::sampling::sample_uniform;
use crate::stats::Proportion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    One,
    Bot,
}

impl Verdict {
    pub fn from_bool(one: bool) -> Self {
        if one {
            Verdict::One
        } else {
            Verdict::Bot
        }
    }

    pub fn is_one(self) -> bool {
        self == Verdict::One
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::One => "ONE",
            Verdict::Bot => "BOT",
        })
    }
}

pub trait ZeroBitScheme {
    type SecretKey: Clone + Debug;
    type PublicKey: Clone + Debug;

    /// True when the encoding key can be published. Secret-key schemes use a
    /// copy of the secret key as their encoding key.
    const PUBLIC_KEY: bool;

    fn name(&self) -> &'static str;

    fn codeword_len(&self) -> usize;

    fn keygen<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Self::SecretKey, Self::PublicKey), Error>;

    fn encode<R: RngCore + ?Sized>(&self, pk: &Self::PublicKey, rng: &mut R) -> BitString;

    fn decode(&self, sk: &Self::SecretKey, x: &BitString) -> Result<Verdict, Error>;
}

/// Measured decoding rates of a base scheme under a fixed key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Pr[decode(channel(encode)) = ONE].
    pub alpha: Proportion,
    /// Pr[decode(uniform) = ONE].
    pub delta: Proportion,
}

/// Estimates `alpha` and `delta` for one key pair. Trial `i` draws from
/// `stream.child(i)`, so results do not depend on how trials are scheduled.
pub fn calibrate_alpha_delta<S: ZeroBitScheme>(
    scheme: &S,
    sk: &S::SecretKey,
    pk: &S::PublicKey,
    channel: &ChannelSpec,
    trials: u64,
    stream: RngStream,
) -> Result<Calibration, Error> {
    if trials == 0 {
        return Err(Error::Domain("calibration needs at least one trial".into()));
    }
    let robust = stream.named("alpha");
    let sound = stream.named("delta");
    let mut ones = 0;
    let mut false_ones = 0;
    for i in 0..trials {
        let mut rng = robust.child(i).rng();
        let x = scheme.encode(pk, &mut rng);
        let y = channel.apply(&x, &mut rng)?;
        if scheme.decode(sk, &y)?.is_one() {
            ones += 1;
        }
        let mut rng = sound.child(i).rng();
        let r = sample_uniform(scheme.codeword_len(), &mut rng);
        if scheme.decode(sk, &r)?.is_one() {
            false_ones += 1;
        }
    }
    let cal = Calibration {
        alpha: Proportion::new(ones, trials),
        delta: Proportion::new(false_ones, trials),
    };
    if cal.alpha.estimate() <= cal.delta.estimate() {
        return Err(Error::Precondition(alloc::format!(
            "alpha = {} <= delta = {}: no decoding advantage to amplify",
            cal.alpha.estimate(),
            cal.delta.estimate()
        )));
    }
    Ok(cal)
}

/// `ceil(t * (alpha + delta) / 2)`; a value within 1e-9 of an integer counts
/// as that integer, so `t = 1000, alpha = 0.828, delta = 0.5` gives 664.
pub fn vote_threshold(t: usize, alpha: f64, delta: f64) -> usize {
    let raw = t as f64 * (alpha + delta) / 2.0;
    let rounded = libm::round(raw);
    if libm::fabs(raw - rounded) < 1e-9 {
        rounded as usize
    } else {
        libm::ceil(raw) as usize
    }
}

/// Repetition wrapper around a base scheme.
#[derive(Debug, Clone)]
pub struct Amplified<S> {
    pub base: S,
    pub t: usize,
    pub alpha: f64,
    pub delta: f64,
}

impl<S: ZeroBitScheme> Amplified<S> {
    pub fn new(base: S, t: usize, alpha: f64, delta: f64) -> Result<Self, Error> {
        if t == 0 {
            return Err(Error::Domain("repetition count must be positive".into()));
        }
        if alpha <= delta {
            return Err(Error::Precondition(alloc::format!(
                "alpha = {alpha} must exceed delta = {delta}"
            )));
        }
        Ok(Amplified {
            base,
            t,
            alpha,
            delta,
        })
    }

    pub fn threshold(&self) -> usize {
        vote_threshold(self.t, self.alpha, self.delta)
    }
}

/// Full key of the amplified scheme.
pub struct AmplifiedKey<S: ZeroBitScheme> {
    pub base_sk: S::SecretKey,
    pub base_pk: S::PublicKey,
    pub shifts: Vec<BitString>,
    /// Position `j` of the concatenated blocks is sent to `perm[j]`.
    pub perm: Vec<u32>,
    pub theta: usize,
}

/// Encoding half of an [`AmplifiedKey`]. For public-key bases this is safe
/// to publish; otherwise it contains the base secret.
pub struct AmplifiedPublicKey<S: ZeroBitScheme> {
    pub base_pk: S::PublicKey,
    pub shifts: Vec<BitString>,
    pub perm: Vec<u32>,
    pub theta: usize,
}

macro_rules! key_impls {
    ($ty:ident { $($field:ident),* }) => {
        impl<S: ZeroBitScheme> Clone for $ty<S> {
            fn clone(&self) -> Self {
                $ty { $($field: self.$field.clone()),* }
            }
        }

        impl<S: ZeroBitScheme> Debug for $ty<S> {
            fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                f.debug_struct(stringify!($ty))$(.field(stringify!($field), &self.$field))*.finish()
            }
        }

        impl<S: ZeroBitScheme> PartialEq for $ty<S>
        where
            S::SecretKey: PartialEq,
            S::PublicKey: PartialEq,
        {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)*
            }
        }
    };
}

key_impls!(AmplifiedKey {
    base_sk,
    base_pk,
    shifts,
    perm,
    theta
});
key_impls!(AmplifiedPublicKey {
    base_pk,
    shifts,
    perm,
    theta
});

impl<S: ZeroBitScheme> AmplifiedKey<S> {
    pub fn t(&self) -> usize {
        self.shifts.len()
    }

    pub fn public(&self) -> AmplifiedPublicKey<S> {
        AmplifiedPublicKey {
            base_pk: self.base_pk.clone(),
            shifts: self.shifts.clone(),
            perm: self.perm.clone(),
            theta: self.theta,
        }
    }

    /// Checks shift lengths, `0 <= theta <= t` and that `perm` is a bijection.
    pub fn validate(&self, base_len: usize) -> Result<(), Error> {
        let t = self.shifts.len();
        if t == 0 {
            return Err(Error::Domain("amplified key has no blocks".into()));
        }
        for z in &self.shifts {
            check_len(base_len, z.len())?;
        }
        if self.theta > t {
            return Err(Error::Domain(alloc::format!(
                "threshold {} > t = {t}",
                self.theta
            )));
        }
        check_permutation(&self.perm, t * base_len)
    }
}

pub fn check_permutation(perm: &[u32], len: usize) -> Result<(), Error> {
    if perm.len() != len {
        return Err(Error::Length {
            expected: len,
            actual: perm.len(),
        });
    }
    let mut seen = alloc::vec![false; len];
    for &p in perm {
        let p = p as usize;
        if p >= len || seen[p] {
            return Err(Error::Domain("permutation is not a bijection".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Samples base keys, `t` uniform shifts and a uniform permutation of `[t n]`.
pub fn amplify_keygen<S: ZeroBitScheme, R: RngCore + ?Sized>(
    scheme: &S,
    t: usize,
    alpha: f64,
    delta: f64,
    rng: &mut R,
) -> Result<AmplifiedKey<S>, Error> {
    check_amplifier_args(t, alpha, delta)?;
    let (base_sk, base_pk) = scheme.keygen(rng)?;
    amplify_wrap(scheme, base_sk, base_pk, t, alpha, delta, rng)
}

/// Like [`amplify_keygen`] but around an existing base key pair, e.g. the
/// one `alpha` and `delta` were measured on.
pub fn amplify_wrap<S: ZeroBitScheme, R: RngCore + ?Sized>(
    scheme: &S,
    base_sk: S::SecretKey,
    base_pk: S::PublicKey,
    t: usize,
    alpha: f64,
    delta: f64,
    rng: &mut R,
) -> Result<AmplifiedKey<S>, Error> {
    check_amplifier_args(t, alpha, delta)?;
    let n = scheme.codeword_len();
    let total = t
        .checked_mul(n)
        .filter(|&v| v <= u32::MAX as usize)
        .ok_or_else(|| Error::Domain("amplified length exceeds 2^32".into()))?;
    let shifts = (0..t).map(|_| sample_uniform(n, rng)).collect();
    let mut perm: Vec<u32> = (0..total as u32).collect();
    perm.shuffle(rng);
    Ok(AmplifiedKey {
        base_sk,
        base_pk,
        shifts,
        perm,
        theta: vote_threshold(t, alpha, delta),
    })
}

fn check_amplifier_args(t: usize, alpha: f64, delta: f64) -> Result<(), Error> {
    if t == 0 {
        return Err(Error::Domain("repetition count must be positive".into()));
    }
    if alpha <= delta {
        return Err(Error::Precondition(alloc::format!(
            "alpha = {alpha} must exceed delta = {delta}"
        )));
    }
    Ok(())
}

/// `perm((a_1 ^ z_1) || ... || (a_t ^ z_t))` with fresh base codewords `a_i`.
pub fn amplify_encode<S: ZeroBitScheme, R: RngCore + ?Sized>(
    scheme: &S,
    key: &AmplifiedPublicKey<S>,
    rng: &mut R,
) -> BitString {
    let n = scheme.codeword_len();
    let mut blocks = BitString::with_capacity(n * key.shifts.len());
    for z in &key.shifts {
        let mut a = scheme.encode(&key.base_pk, rng);
        a.xor_assign(z);
        blocks.extend(&a);
    }
    scatter(&blocks, &key.perm)
}

/// Number of blocks of `perm^{-1}(x)` that decode to ONE after unmasking.
pub fn amplify_votes<S: ZeroBitScheme>(
    scheme: &S,
    key: &AmplifiedKey<S>,
    x: &BitString,
) -> Result<usize, Error> {
    let n = scheme.codeword_len();
    check_len(n * key.shifts.len(), x.len())?;
    let blocks = gather(x, &key.perm);
    let mut votes = 0;
    for (i, z) in key.shifts.iter().enumerate() {
        let mut a = blocks.slice(i * n, n);
        a.xor_assign(z);
        if scheme.decode(&key.base_sk, &a)?.is_one() {
            votes += 1;
        }
    }
    Ok(votes)
}

/// ONE iff at least `theta` blocks decode to ONE.
pub fn amplify_decode<S: ZeroBitScheme>(
    scheme: &S,
    key: &AmplifiedKey<S>,
    x: &BitString,
) -> Result<Verdict, Error> {
    Ok(Verdict::from_bool(
        amplify_votes(scheme, key, x)? >= key.theta,
    ))
}

/// `out[perm[j]] = x[j]`.
pub fn scatter(x: &BitString, perm: &[u32]) -> BitString {
    let mut out = BitString::zeros(x.len());
    for i in x.support() {
        out.set(perm[i] as usize, true);
    }
    out
}

/// `out[j] = x[perm[j]]`, the inverse of [`scatter`].
pub fn gather(x: &BitString, perm: &[u32]) -> BitString {
    let words = x.words();
    let mut out_words = alloc::vec![0u64; x.len().div_ceil(64)];
    for (j, &p) in perm.iter().enumerate() {
        let p = p as usize;
        out_words[j / 64] |= (words[p / 64] >> (p % 64) & 1) << (j % 64);
    }
    BitString::from_words(out_words, x.len())
}

impl<S: ZeroBitScheme> ZeroBitScheme for Amplified<S> {
    type SecretKey = AmplifiedKey<S>;
    type PublicKey = AmplifiedPublicKey<S>;
    const PUBLIC_KEY: bool = S::PUBLIC_KEY;

    fn name(&self) -> &'static str {
        "amplified"
    }

    fn codeword_len(&self) -> usize {
        self.t * self.base.codeword_len()
    }

    fn keygen<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Self::SecretKey, Self::PublicKey), Error> {
        let key = amplify_keygen(&self.base, self.t, self.alpha, self.delta, rng)?;
        let public = key.public();
        Ok((key, public))
    }

    fn encode<R: RngCore + ?Sized>(&self, pk: &Self::PublicKey, rng: &mut R) -> BitString {
        amplify_encode(&self.base, pk, rng)
    }

    fn decode(&self, sk: &Self::SecretKey, x: &BitString) -> Result<Verdict, Error> {
        amplify_decode(&self.base, sk, x)
    }
}
