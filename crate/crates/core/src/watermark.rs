//! Binary-alphabet toy language models and PRC-seeded generation.
//!
//! A model maps `(prompt, prefix)` to the probability that the next token
//! is a one. Watermarked generation replaces the model's randomness with a codeword
//! `x` so that each output bit agrees with `x_i` more often than not while
//! keeping the marginal `Ber(p_i)` when `x` is uniform.

use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{check_len, Error};
use crate::prc::{Verdict, ZeroBitScheme};
use crate::sampling::bernoulli;

pub trait ToyModel {
    fn name(&self) -> String;

    /// Probability that the token after `prefix` is 1.
    fn next_prob(&self, prompt: &[u8], prefix: &BitString) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModel {
    pub p: f64,
}

impl ToyModel for ConstantModel {
    fn name(&self) -> String {
        alloc::format!("constant({})", self.p)
    }

    fn next_prob(&self, _prompt: &[u8], _prefix: &BitString) -> f64 {
        self.p
    }
}

/// `p_i = center + amplitude * sin(2 pi i / period)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalModel {
    pub center: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl ToyModel for SinusoidalModel {
    fn name(&self) -> String {
        alloc::format!(
            "sinusoidal({}, {}, {})",
            self.center,
            self.amplitude,
            self.period
        )
    }

    fn next_prob(&self, _prompt: &[u8], prefix: &BitString) -> f64 {
        let phase = 2.0 * core::f64::consts::PI * prefix.len() as f64 / self.period;
        self.center + self.amplitude * libm::sin(phase)
    }
}

/// Probability drawn from `[lo, hi]` by hashing the prompt and the last
/// `window` generated bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashModel {
    pub lo: f64,
    pub hi: f64,
    pub window: usize,
}

impl ToyModel for HashModel {
    fn name(&self) -> String {
        alloc::format!("hash({}, {}, {})", self.lo, self.hi, self.window)
    }

    fn next_prob(&self, prompt: &[u8], prefix: &BitString) -> f64 {
        let start = prefix.len().saturating_sub(self.window);
        let mut h = Sha256::new();
        h.update((prompt.len() as u64).to_be_bytes());
        h.update(prompt);
        h.update((prefix.len() as u64).to_be_bytes());
        for i in start..prefix.len() {
            h.update([u8::from(prefix.get(i))]);
        }
        let digest = h.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        let u = (u64::from_be_bytes(word) >> 11) as f64 / (1u64 << 53) as f64;
        self.lo + (self.hi - self.lo) * u
    }
}

fn checked_prob<M: ToyModel + ?Sized>(
    model: &M,
    prompt: &[u8],
    prefix: &BitString,
) -> Result<f64, Error> {
    let p = model.next_prob(prompt, prefix);
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(alloc::format!(
            "model {} produced p = {p} at position {}",
            model.name(),
            prefix.len()
        )));
    }
    Ok(p)
}

/// `z_i ~ Ber(p_i)` sequentially.
pub fn generate_plain<M: ToyModel + ?Sized, R: RngCore + ?Sized>(
    model: &M,
    prompt: &[u8],
    n: usize,
    rng: &mut R,
) -> Result<BitString, Error> {
    if n == 0 {
        return Err(Error::Domain("output length must be positive".into()));
    }
    let mut z = BitString::with_capacity(n);
    for _ in 0..n {
        let p = checked_prob(model, prompt, &z)?;
        z.push(bernoulli(p, rng));
    }
    Ok(z)
}

/// One output bit driven by the seed bit `x`. Below 1/2: `Ber(2p)` if `x`
/// else 0. Above 1/2: 1 if `x` else `Ber(2p - 1)`.
#[inline]
pub fn seeded_bit<R: RngCore + ?Sized>(p: f64, x: bool, rng: &mut R) -> bool {
    if p <= 0.5 {
        x && bernoulli(2.0 * p, rng)
    } else {
        x || bernoulli(2.0 * p - 1.0, rng)
    }
}

pub fn generate_seeded<M: ToyModel + ?Sized, R: RngCore + ?Sized>(
    model: &M,
    prompt: &[u8],
    x: &BitString,
    rng: &mut R,
) -> Result<BitString, Error> {
    if x.is_empty() {
        return Err(Error::Domain("seed must be non-empty".into()));
    }
    let mut z = BitString::with_capacity(x.len());
    for i in 0..x.len() {
        let p = checked_prob(model, prompt, &z)?;
        z.push(seeded_bit(p, x.get(i), rng));
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRecord {
    pub prompt: Vec<u8>,
    pub z: BitString,
    /// Empty for plain generation.
    pub x: BitString,
}

impl GenerationRecord {
    pub fn plain(prompt: &[u8], z: BitString) -> Self {
        GenerationRecord {
            prompt: prompt.to_vec(),
            z,
            x: BitString::zeros(0),
        }
    }

    pub fn is_watermarked(&self) -> bool {
        !self.x.is_empty()
    }
}

/// Seeds generation with a fresh codeword of `scheme`.
pub fn generate_watermarked<S, M, R>(
    model: &M,
    prompt: &[u8],
    scheme: &S,
    pk: &S::PublicKey,
    rng: &mut R,
) -> Result<GenerationRecord, Error>
where
    S: ZeroBitScheme,
    M: ToyModel + ?Sized,
    R: RngCore + ?Sized,
{
    let x = scheme.encode(pk, rng);
    check_len(scheme.codeword_len(), x.len())?;
    let z = generate_seeded(model, prompt, &x, rng)?;
    Ok(GenerationRecord {
        prompt: prompt.to_vec(),
        z,
        x,
    })
}

pub fn detect<S: ZeroBitScheme>(
    scheme: &S,
    sk: &S::SecretKey,
    z: &BitString,
) -> Result<Verdict, Error> {
    check_len(scheme.codeword_len(), z.len())?;
    scheme.decode(sk, z)
}
