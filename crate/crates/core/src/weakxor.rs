//! Public-key PRC from a weak planted XOR matrix and sparse-secret LPN.
//!
//! The public key is `G in {0,1}^{n x m}` in which the `t` rows marked by the
//! secret `s` XOR to a noise vector `v ~ Ber(m, eps)`. Codewords are
//! `G u + e` with `u ~ Ber(m, eta)` and `e ~ Ber(n, eta)`; the decoder checks
//! `s^T x = 0`, which holds with probability
//! `(1 + (1 - 2 eta)^{|v|} (1 - 2 eta)^t) / 2`.

use alloc::vec::Vec;

use rand::seq::index;
use rand::RngCore;

use crate::bits::BitString;
use crate::error::{check_len, check_prob, Error};
use crate::gf2::BitMatrix;
use crate::prc::{Verdict, ZeroBitScheme};
use crate::sampling::{sample_bernoulli_vector, sample_uniform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakXorParams {
    /// Rows of `G` and codeword length.
    pub n: usize,
    /// Columns of `G` and LPN secret length.
    pub m: usize,
    /// Secret sparsity.
    pub t: usize,
    /// Planted noise rate.
    pub eps: f64,
    /// LPN noise rate.
    pub eta: f64,
}

impl WeakXorParams {
    pub fn new(n: usize, m: usize, t: usize, eps: f64, eta: f64) -> Result<Self, Error> {
        let p = WeakXorParams { n, m, t, eps, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if self.t == 0 || self.t > self.n {
            return Err(Error::Domain(alloc::format!(
                "sparsity {} must lie in [1, n = {}]",
                self.t,
                self.n
            )));
        }
        for (name, v) in [("eps", self.eps), ("eta", self.eta)] {
            if !(0.0..=0.5).contains(&v) {
                return Err(Error::Domain(alloc::format!(
                    "{name} = {v} must lie in [0, 1/2]"
                )));
            }
        }
        Ok(())
    }
}

/// Public matrix, kept in both row and column layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorMatrix {
    rows: BitMatrix,
    cols: BitMatrix,
}

impl XorMatrix {
    pub fn new(rows: BitMatrix) -> Self {
        let cols = rows.transpose();
        XorMatrix { rows, cols }
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn m(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &BitMatrix {
        &self.rows
    }

    /// Column `j` of `G`, a length-`n` vector.
    pub fn column(&self, j: usize) -> &BitString {
        self.cols.row(j)
    }

    /// `G u`.
    pub fn apply(&self, u: &BitString) -> BitString {
        assert_eq!(u.len(), self.m(), "length mismatch");
        let mut out = BitString::zeros(self.n());
        for j in u.support() {
            out.xor_assign(self.cols.row(j));
        }
        out
    }
}

/// Sorted support of a `t`-sparse vector of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorSecret {
    pub n: usize,
    pub support: Vec<usize>,
}

impl XorSecret {
    pub fn new(n: usize, mut support: Vec<usize>) -> Result<Self, Error> {
        support.sort_unstable();
        support.dedup();
        if support.last().is_some_and(|&i| i >= n) {
            return Err(Error::Domain("secret support out of range".into()));
        }
        Ok(XorSecret { n, support })
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_support(self.n, &self.support).expect("support checked on construction")
    }

    /// `s^T x` over F2.
    pub fn parity(&self, x: &BitString) -> bool {
        x.parity_at(&self.support)
    }
}

/// Samples `(G, s)`: uniform `G` with the last of `t` random distinct rows
/// replaced by the XOR of the others plus `v ~ Ber(m, eps)`.
pub fn sample_planted_xor<R: RngCore + ?Sized>(
    params: &WeakXorParams,
    rng: &mut R,
) -> Result<(XorMatrix, XorSecret), Error> {
    params.validate()?;
    let WeakXorParams { n, m, t, eps, .. } = *params;
    let rows: Vec<BitString> = (0..n).map(|_| sample_uniform(m, rng)).collect();
    let mut g = BitMatrix::from_rows(rows, m)?;
    let chosen = index::sample(rng, n, t).into_vec();
    let (last, rest) = chosen.split_last().expect("t >= 1");
    let mut planted = g.sum_rows(rest);
    planted.xor_assign(&sample_bernoulli_vector(m, eps, rng)?);
    *g.row_mut(*last) = planted;
    Ok((XorMatrix::new(g), XorSecret::new(n, chosen)?))
}

pub fn weakxor_keygen<R: RngCore + ?Sized>(
    params: &WeakXorParams,
    rng: &mut R,
) -> Result<(XorSecret, XorMatrix), Error> {
    let (g, s) = sample_planted_xor(params, rng)?;
    Ok((s, g))
}

/// `G u + e` with `u ~ Ber(m, eta)`, `e ~ Ber(n, eta)`.
pub fn weakxor_encode<R: RngCore + ?Sized>(
    pk: &XorMatrix,
    eta: f64,
    rng: &mut R,
) -> Result<BitString, Error> {
    check_prob("eta", eta)?;
    let u = sample_bernoulli_vector(pk.m(), eta, rng)?;
    let e = sample_bernoulli_vector(pk.n(), eta, rng)?;
    weakxor_encode_with(pk, &u, &e)
}

/// Deterministic encoder with caller-supplied `(u, e)`.
pub fn weakxor_encode_with(
    pk: &XorMatrix,
    u: &BitString,
    e: &BitString,
) -> Result<BitString, Error> {
    check_len(pk.m(), u.len())?;
    check_len(pk.n(), e.len())?;
    let mut out = pk.apply(u);
    out.xor_assign(e);
    Ok(out)
}

/// ONE iff `s^T x = 0`.
pub fn weakxor_decode(sk: &XorSecret, x: &BitString) -> Result<Verdict, Error> {
    check_len(sk.n, x.len())?;
    Ok(Verdict::from_bool(!sk.parity(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackVerdict {
    Planted,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankAttackMode {
    /// Full matrix: planted iff the row rank is below `n`. Needs `n <= m`.
    WholeMatrix,
    /// Sample `samples` random sets of `m / 2` rows; planted iff any of them
    /// is linearly dependent.
    Submatrices { samples: usize },
}

/// Gaussian-elimination distinguisher against planted XOR matrices.
pub fn rank_attack<R: RngCore + ?Sized>(
    g: &XorMatrix,
    mode: RankAttackMode,
    rng: &mut R,
) -> Result<AttackVerdict, Error> {
    let (n, m) = (g.n(), g.m());
    let planted = match mode {
        RankAttackMode::WholeMatrix => {
            if n > m {
                return Err(Error::Precondition(alloc::format!(
                    "whole-matrix rank attack needs n <= m, got n = {n}, m = {m}"
                )));
            }
            g.rows().rank() < n
        }
        RankAttackMode::Submatrices { samples } => {
            let k = (m / 2).min(n);
            (0..samples).any(|_| {
                let rows = index::sample(rng, n, k).into_vec();
                g.rows().rank_of(&rows) < k
            })
        }
    };
    Ok(if planted {
        AttackVerdict::Planted
    } else {
        AttackVerdict::Random
    })
}

/// Uniform `G` subject to `s_i^T G = 0^m` for `tau` secrets with pairwise
/// disjoint supports of size `t`.
pub fn multicheck_keygen<R: RngCore + ?Sized>(
    n: usize,
    m: usize,
    tau: usize,
    t: usize,
    rng: &mut R,
) -> Result<(Vec<XorSecret>, XorMatrix), Error> {
    if tau == 0 || t == 0 || m == 0 {
        return Err(Error::Domain("tau, t and m must be positive".into()));
    }
    if tau * t > n {
        return Err(Error::Domain(alloc::format!(
            "{tau} disjoint supports of size {t} do not fit in {n} rows"
        )));
    }
    let rows: Vec<BitString> = (0..n).map(|_| sample_uniform(m, rng)).collect();
    let mut g = BitMatrix::from_rows(rows, m)?;
    let chosen = index::sample(rng, n, tau * t).into_vec();
    let mut secrets = Vec::with_capacity(tau);
    for block in chosen.chunks(t) {
        let (last, rest) = block.split_last().expect("t >= 1");
        *g.row_mut(*last) = g.sum_rows(rest);
        secrets.push(XorSecret::new(n, block.to_vec())?);
    }
    Ok((secrets, XorMatrix::new(g)))
}

/// Number of secrets with `s_i^T x = 0`.
pub fn multicheck_satisfied(sks: &[XorSecret], x: &BitString) -> Result<usize, Error> {
    let mut count = 0;
    for s in sks {
        check_len(s.n, x.len())?;
        if !s.parity(x) {
            count += 1;
        }
    }
    Ok(count)
}

pub fn multicheck_decode(
    sks: &[XorSecret],
    x: &BitString,
    threshold: usize,
) -> Result<Verdict, Error> {
    Ok(Verdict::from_bool(
        multicheck_satisfied(sks, x)? >= threshold,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct WeakXor {
    pub params: WeakXorParams,
}

impl ZeroBitScheme for WeakXor {
    type SecretKey = XorSecret;
    type PublicKey = XorMatrix;
    const PUBLIC_KEY: bool = true;

    fn name(&self) -> &'static str {
        "weakxor"
    }

    fn codeword_len(&self) -> usize {
        self.params.n
    }

    fn keygen<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(XorSecret, XorMatrix), Error> {
        weakxor_keygen(&self.params, rng)
    }

    fn encode<R: RngCore + ?Sized>(&self, pk: &XorMatrix, rng: &mut R) -> BitString {
        weakxor_encode(pk, self.params.eta, rng).expect("eta validated with the parameters")
    }

    fn decode(&self, sk: &XorSecret, x: &BitString) -> Result<Verdict, Error> {
        weakxor_decode(sk, x)
    }
}
