//! Secret-key PRC against space-bounded adversaries.
//!
//! A codeword is a uniform header `a` followed by `k'` noisy sparse-parity
//! tags `<a, s_i> + e_i` with `e_i ~ Ber(1/2 - eps)`. Decoding rejects headers
//! that are too unbalanced and otherwise counts matching tags.

use alloc::vec::Vec;

use rand::RngCore;

use crate::bits::BitString;
use crate::error::{check_len, Error};
use crate::prc::{Verdict, ZeroBitScheme};
use crate::sampling::{bernoulli, bias_delta, sample_positions, sample_uniform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsrParams {
    /// Header length.
    pub n: usize,
    /// Secret weight is `ceil(c * log2 n)`.
    pub c: f64,
    /// Tag advantage: each tag is correct with probability `1/2 + eps`.
    pub eps: f64,
    /// Number of secrets and tags.
    pub kprime: usize,
    /// Threshold exponent.
    pub delta: f64,
}

impl SsrParams {
    pub fn new(n: usize, c: f64, eps: f64, kprime: usize, delta: f64) -> Result<Self, Error> {
        let p = SsrParams {
            n,
            c,
            eps,
            kprime,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Uses `k' = ceil((2 n^{2 delta} / eps)^2)`.
    pub fn with_default_kprime(n: usize, c: f64, eps: f64, delta: f64) -> Result<Self, Error> {
        if n < 2 || !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::Domain("need n >= 2 and eps in (0, 1/2]".into()));
        }
        SsrParams::new(n, c, eps, default_kprime(n, eps, delta), delta)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Domain("header length must be at least 2".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Domain(alloc::format!(
                "c = {} must be positive",
                self.c
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Error::Domain(alloc::format!(
                "eps = {} must lie in (0, 1/2]",
                self.eps
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 0.01) {
            return Err(Error::Domain(alloc::format!(
                "delta = {} must lie in (0, 1/100]",
                self.delta
            )));
        }
        if self.kprime == 0 {
            return Err(Error::Domain("need at least one tag".into()));
        }
        if self.ell() > self.n {
            return Err(Error::Domain(alloc::format!(
                "secret weight {} exceeds header length {}",
                self.ell(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn ell(&self) -> usize {
        libm::ceil(self.c * libm::log2(self.n as f64) - 1e-9).max(1.0) as usize
    }

    pub fn codeword_len(&self) -> usize {
        self.n + self.kprime
    }

    /// Smallest integer `T` with `2 w >= T` accepted: `k' + ceil(2 n^delta sqrt(k'))`.
    pub fn doubled_threshold(&self) -> usize {
        let slack = 2.0 * libm::pow(self.n as f64, self.delta) * libm::sqrt(self.kprime as f64);
        self.kprime + libm::ceil(slack - 1e-9) as usize
    }

    /// Headers whose bias exceeds this are rejected.
    pub fn balance_bound(&self) -> f64 {
        0.5 / libm::pow(self.n as f64, 0.4)
    }
}

pub fn default_kprime(n: usize, eps: f64, delta: f64) -> usize {
    let root = 2.0 * libm::pow(n as f64, 2.0 * delta) / eps;
    libm::ceil(root * root - 1e-9) as usize
}

/// `k'` secrets of weight `ell`, stored as sorted index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsrKey {
    pub n: usize,
    pub ell: usize,
    pub secrets: Vec<Vec<usize>>,
}

impl SsrKey {
    pub fn new(n: usize, ell: usize, mut secrets: Vec<Vec<usize>>) -> Result<Self, Error> {
        for s in &mut secrets {
            s.sort_unstable();
            s.dedup();
            if s.len() != ell || s.last().is_some_and(|&i| i >= n) {
                return Err(Error::Domain(alloc::format!(
                    "each secret needs {ell} distinct indices below {n}"
                )));
            }
        }
        if secrets.is_empty() {
            return Err(Error::Domain("key has no secrets".into()));
        }
        Ok(SsrKey { n, ell, secrets })
    }

    pub fn kprime(&self) -> usize {
        self.secrets.len()
    }

    pub fn secret_bits(&self, i: usize) -> BitString {
        BitString::from_support(self.n, &self.secrets[i]).expect("indices checked on construction")
    }

    /// Bits needed to store every index: `k' * ell * ceil(log2 n)`.
    pub fn index_bits(&self) -> usize {
        let per_index = usize::BITS - (self.n - 1).leading_zeros();
        self.kprime() * self.ell * per_index as usize
    }

    /// Largest number of secrets sharing one header coordinate.
    pub fn max_coordinate_load(&self) -> usize {
        let mut load = alloc::vec![0usize; self.n];
        for s in &self.secrets {
            for &i in s {
                load[i] += 1;
            }
        }
        load.into_iter().max().unwrap_or(0)
    }

    /// `(<a, s_1>, ..., <a, s_k'>)`.
    pub fn tags(&self, a: &BitString) -> BitString {
        let mut out = BitString::zeros(self.kprime());
        for (i, s) in self.secrets.iter().enumerate() {
            if a.parity_at(s) {
                out.set(i, true);
            }
        }
        out
    }
}

pub fn ssr_keygen<R: RngCore + ?Sized>(params: &SsrParams, rng: &mut R) -> Result<SsrKey, Error> {
    params.validate()?;
    let ell = params.ell();
    let secrets = (0..params.kprime)
        .map(|_| sample_positions(params.n, ell, rng))
        .collect::<Result<Vec<_>, _>>()?;
    SsrKey::new(params.n, ell, secrets)
}

pub fn ssr_encode<R: RngCore + ?Sized>(key: &SsrKey, eps: f64, rng: &mut R) -> BitString {
    let a = sample_uniform(key.n, rng);
    ssr_encode_with_header(key, eps, &a, rng).expect("header has the key's length")
}

/// Encoder with a caller-supplied header.
pub fn ssr_encode_with_header<R: RngCore + ?Sized>(
    key: &SsrKey,
    eps: f64,
    a: &BitString,
    rng: &mut R,
) -> Result<BitString, Error> {
    check_len(key.n, a.len())?;
    let noise = 0.5 - eps;
    let mut out = a.clone();
    for s in &key.secrets {
        out.push(a.parity_at(s) ^ bernoulli(noise, rng));
    }
    Ok(out)
}

/// Number of tags consistent with the received header.
pub fn ssr_matches(key: &SsrKey, x: &BitString) -> Result<usize, Error> {
    check_len(key.n + key.kprime(), x.len())?;
    Ok(key
        .secrets
        .iter()
        .enumerate()
        .filter(|(i, s)| x.parity_at(s) == x.get(key.n + i))
        .count())
}

pub fn ssr_decode(key: &SsrKey, params: &SsrParams, x: &BitString) -> Result<Verdict, Error> {
    check_len(params.codeword_len(), x.len())?;
    check_len(params.kprime, key.kprime())?;
    let header = x.slice(0, key.n);
    if bias_delta(&header)? > params.balance_bound() {
        return Ok(Verdict::Bot);
    }
    let w = ssr_matches(key, x)?;
    Ok(Verdict::from_bool(2 * w >= params.doubled_threshold()))
}

/// `E[w_i] = (1 + 2 eps (1 - 2p)^{ell + 1}) / 2` under BSC(`p`).
pub fn ssr_expected_tag_match(eps: f64, p: f64, ell: usize) -> Result<f64, Error> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Domain(alloc::format!(
            "p = {p} must lie in [0, 1/2)"
        )));
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::Domain(alloc::format!(
            "eps = {eps} must lie in [0, 1/2]"
        )));
    }
    Ok(0.5 * (1.0 + 2.0 * eps * libm::pow(1.0 - 2.0 * p, ell as f64 + 1.0)))
}

#[derive(Debug, Clone, Copy)]
pub struct Ssr {
    pub params: SsrParams,
}

impl ZeroBitScheme for Ssr {
    type SecretKey = SsrKey;
    type PublicKey = SsrKey;
    const PUBLIC_KEY: bool = false;

    fn name(&self) -> &'static str {
        "ssr"
    }

    fn codeword_len(&self) -> usize {
        self.params.codeword_len()
    }

    fn keygen<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(SsrKey, SsrKey), Error> {
        let k = ssr_keygen(&self.params, rng)?;
        Ok((k.clone(), k))
    }

    fn encode<R: RngCore + ?Sized>(&self, pk: &SsrKey, rng: &mut R) -> BitString {
        ssr_encode(pk, self.params.eps, rng)
    }

    fn decode(&self, sk: &SsrKey, x: &BitString) -> Result<Verdict, Error> {
        ssr_decode(sk, &self.params, x)
    }
}
