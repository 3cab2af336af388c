//! PRF-tagged blocks: `x_1 || f_k(x_1) || ... || x_t || f_k(x_t)`.
//!
//! A block survives only if every header bit does, so this code tolerates
//! error rates that vanish with `n` but not constant ones. It serves as the
//! baseline the other constructions improve on.

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{check_len, Error};
use crate::prc::{Verdict, ZeroBitScheme};
use crate::sampling::sample_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WarmupParams {
    /// Tag length, also the security parameter.
    pub n: usize,
    /// The channel rate the code targets is `1 / tau`.
    pub tau: u32,
    pub block_count: usize,
}

impl WarmupParams {
    pub fn new(n: usize, tau: u32, block_count: usize) -> Result<Self, Error> {
        if tau == 0 {
            return Err(Error::Domain("tau must be at least 1".into()));
        }
        if block_count == 0 {
            return Err(Error::Domain("need at least one block".into()));
        }
        if n < 2 {
            return Err(Error::Domain("tag length must be at least 2".into()));
        }
        Ok(WarmupParams {
            n,
            tau,
            block_count,
        })
    }

    /// `ceil(sqrt(tau) * log2(n))`.
    pub fn input_len(&self) -> usize {
        let raw = libm::sqrt(f64::from(self.tau)) * libm::log2(self.n as f64);
        libm::ceil(raw - 1e-9) as usize
    }

    pub fn block_len(&self) -> usize {
        self.input_len() + self.n
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct WarmupKey {
    pub key: [u8; 16],
    pub tau: u32,
    pub block_count: usize,
    pub input_len: usize,
    pub tag_len: usize,
}

impl core::fmt::Debug for WarmupKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WarmupKey")
            .field("tau", &self.tau)
            .field("block_count", &self.block_count)
            .field("input_len", &self.input_len)
            .field("tag_len", &self.tag_len)
            .finish_non_exhaustive()
    }
}

impl WarmupKey {
    /// `f_k(x)`: SHA-256 over `key || len(x) || x || counter`, counter mode,
    /// truncated to `tag_len` bits (most significant bit of each byte first).
    pub fn prf(&self, x: &BitString) -> BitString {
        let mut out = BitString::zeros(self.tag_len);
        let x_bytes = hex_bytes(x);
        let mut counter = 0u32;
        let mut filled = 0;
        while filled < self.tag_len {
            let mut h = Sha256::new();
            h.update(self.key);
            h.update((x.len() as u64).to_be_bytes());
            h.update(&x_bytes);
            h.update(counter.to_be_bytes());
            for byte in h.finalize() {
                for b in 0..8 {
                    if filled == self.tag_len {
                        break;
                    }
                    if byte & (0x80 >> b) != 0 {
                        out.set(filled, true);
                    }
                    filled += 1;
                }
            }
            counter += 1;
        }
        out
    }
}

fn hex_bytes(x: &BitString) -> alloc::vec::Vec<u8> {
    let mut bytes = alloc::vec![0u8; x.len().div_ceil(8)];
    for i in x.support() {
        bytes[i / 8] |= 0x80 >> (i % 8);
    }
    bytes
}

#[derive(Debug, Clone, Copy)]
pub struct WarmupPrf {
    pub params: WarmupParams,
}

pub fn warmup_keygen<R: RngCore + ?Sized>(params: &WarmupParams, rng: &mut R) -> WarmupKey {
    let mut key = [0u8; 16];
    rng.fill_bytes(&mut key);
    WarmupKey {
        key,
        tau: params.tau,
        block_count: params.block_count,
        input_len: params.input_len(),
        tag_len: params.n,
    }
}

pub fn warmup_encode<R: RngCore + ?Sized>(key: &WarmupKey, rng: &mut R) -> BitString {
    let mut out = BitString::with_capacity(key.block_count * (key.input_len + key.tag_len));
    for _ in 0..key.block_count {
        let x = sample_uniform(key.input_len, rng);
        out.extend(&x);
        out.extend(&key.prf(&x));
    }
    out
}

/// ONE iff some block's tag is within distance `n / 10` of the PRF of its header.
pub fn warmup_decode(key: &WarmupKey, x: &BitString) -> Result<Verdict, Error> {
    let block = key.input_len + key.tag_len;
    check_len(key.block_count * block, x.len())?;
    for i in 0..key.block_count {
        let header = x.slice(i * block, key.input_len);
        let tag = x.slice(i * block + key.input_len, key.tag_len);
        if 10 * key.prf(&header).distance(&tag) <= key.tag_len {
            return Ok(Verdict::One);
        }
    }
    Ok(Verdict::Bot)
}

impl ZeroBitScheme for WarmupPrf {
    type SecretKey = WarmupKey;
    type PublicKey = WarmupKey;
    const PUBLIC_KEY: bool = false;

    fn name(&self) -> &'static str {
        "warmup"
    }

    fn codeword_len(&self) -> usize {
        self.params.block_count * self.params.block_len()
    }

    fn keygen<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(WarmupKey, WarmupKey), Error> {
        let k = warmup_keygen(&self.params, rng);
        Ok((k.clone(), k))
    }

    fn encode<R: RngCore + ?Sized>(&self, pk: &WarmupKey, rng: &mut R) -> BitString {
        warmup_encode(pk, rng)
    }

    fn decode(&self, sk: &WarmupKey, x: &BitString) -> Result<Verdict, Error> {
        warmup_decode(sk, x)
    }
}
