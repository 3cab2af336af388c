//! Public-key PRC from planted hyperloops and Goldreich's PRG.
//!
//! The public key is a 5-hypergraph `H`; encoding evaluates
//! `F_H(u)_i = u_a ^ u_b ^ u_c ^ (u_d & u_e)` for every hyperedge
//! `(a, b, c, d, e)` at a uniform seed `u`. The secret key lists the edge
//! indices of planted hyperloops (3-hypergraphs where every vertex has degree
//! two). Over a planted loop the XOR-parts cancel, so the output parity over
//! `S_1` equals the XOR of `l` independent AND-terms and is 0 with
//! probability `(1 + 2^-l) / 2`.

use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::{Rng, RngCore};

use crate::bits::BitString;
use crate::error::{check_len, Error};
use crate::prc::{Verdict, ZeroBitScheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph3 {
    pub n_vertices: usize,
    pub edges: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph5 {
    pub n_vertices: usize,
    pub edges: Vec<[u32; 5]>,
}

/// Edge indices (into the public hypergraph) of each planted loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperloopSecret {
    pub loops: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperloopParams {
    /// Vertex count, also the seed length.
    pub n: usize,
    pub delta: f64,
    /// Number of random (unplanted) edges.
    pub m: usize,
    /// Loop size (edges per planted copy). Must be even.
    pub ell: usize,
    /// Number of planted copies.
    pub t: usize,
}

impl HyperloopParams {
    pub fn new(n: usize, delta: f64, m: usize, ell: usize, t: usize) -> Result<Self, Error> {
        let p = HyperloopParams {
            n,
            delta,
            m,
            ell,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    /// `m = floor(n^{1.5 - delta})`, `l` = `0.36 log2 n` rounded to an even
    /// number (at least 2), `t = floor(n^{0.75 - delta})` capped so that the
    /// copies fit on `n` vertices.
    pub fn recommended(n: usize, delta: f64) -> Result<Self, Error> {
        let nf = n as f64;
        let m = libm::floor(libm::pow(nf, 1.5 - delta) + 1e-9) as usize;
        let ell = ((libm::round(0.18 * libm::log2(nf)) as usize) * 2).max(2);
        let fit = n / (3 * ell / 2);
        let t = (libm::floor(libm::pow(nf, 0.75 - delta) + 1e-9) as usize).clamp(1, fit.max(1));
        Self::new(n, delta, m, ell, t)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.ell < 2 || !self.ell.is_multiple_of(2) {
            return Err(Error::Domain(alloc::format!(
                "loop size must be even and at least 2, got {}",
                self.ell
            )));
        }
        if self.t == 0 {
            return Err(Error::Domain("need at least one planted loop".into()));
        }
        let loop_vertices = 3 * self.ell / 2;
        if self.t * loop_vertices > self.n {
            return Err(Error::Domain(alloc::format!(
                "{} copies of a {}-vertex loop do not fit on {} vertices",
                self.t,
                loop_vertices,
                self.n
            )));
        }
        if loop_vertices + 2 * self.ell > self.n || self.n < 5 {
            return Err(Error::Domain(alloc::format!(
                "{} vertices cannot give the first loop disjoint padding",
                self.n
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::Domain("too many vertices".into()));
        }
        Ok(())
    }

    /// Edges in the public hypergraph, `m + t * l`.
    pub fn edge_count(&self) -> usize {
        self.m + self.t * self.ell
    }
}

/// The fixed hyperloop used for planting: `l` edges on `3l/2` vertices
/// `w_0..w_{l-1}, c_0..c_{l/2-1}` with edge `i = (w_i, w_{i+1 mod l}, c_{i/2})`.
pub fn canonical_hyperloop(ell: usize) -> Result<Hypergraph3, Error> {
    if ell < 2 || !ell.is_multiple_of(2) {
        return Err(Error::Domain(alloc::format!(
            "hyperloop size must be even and at least 2, got {ell}"
        )));
    }
    let w = |i: usize| (i % ell) as u32;
    let c = |j: usize| (ell + j) as u32;
    Ok(Hypergraph3 {
        n_vertices: 3 * ell / 2,
        edges: (0..ell).map(|i| [w(i), w(i + 1), c(i / 2)]).collect(),
    })
}

/// Vertex degrees of a 3-hypergraph.
pub fn degrees3(h: &Hypergraph3) -> Vec<usize> {
    let mut deg = alloc::vec![0; h.n_vertices];
    for e in &h.edges {
        for &v in e {
            deg[v as usize] += 1;
        }
    }
    deg
}

fn distinct_vertex<R: RngCore + ?Sized>(n: usize, avoid: &[u32], rng: &mut R) -> u32 {
    loop {
        let v = rng.gen_range(0..n as u32);
        if !avoid.contains(&v) {
            return v;
        }
    }
}

/// Samples `(H, S)`: `m` random ordered 3-edges plus `t` vertex-disjoint
/// copies of the canonical loop on random vertices, shuffled, then padded
/// with two trailing vertices per edge. The `2l` padding vertices of the
/// first loop are distinct from each other and from that loop's vertices.
pub fn sample_planted_hypergraph<R: RngCore + ?Sized>(
    params: &HyperloopParams,
    rng: &mut R,
) -> Result<(Hypergraph5, HyperloopSecret), Error> {
    params.validate()?;
    let HyperloopParams { n, m, ell, t, .. } = *params;
    let l0 = canonical_hyperloop(ell)?;
    let copy_size = l0.n_vertices;

    let mut edges3: Vec<[u32; 3]> = Vec::with_capacity(params.edge_count());
    for _ in 0..m {
        let a = rng.gen_range(0..n as u32);
        let b = distinct_vertex(n, &[a], rng);
        let c = distinct_vertex(n, &[a, b], rng);
        edges3.push([a, b, c]);
    }
    let planted = index::sample(rng, n, t * copy_size).into_vec();
    for copy in 0..t {
        let map = &planted[copy * copy_size..(copy + 1) * copy_size];
        for e in &l0.edges {
            edges3.push(e.map(|v| map[v as usize] as u32));
        }
    }

    // order[k] = pre-shuffle edge placed at position k.
    let total = edges3.len();
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(rng);
    let mut position = alloc::vec![0usize; total];
    for (k, &orig) in order.iter().enumerate() {
        position[orig] = k;
    }
    let loops: Vec<Vec<usize>> = (0..t)
        .map(|copy| (0..ell).map(|i| position[m + copy * ell + i]).collect())
        .collect();

    let mut edges: Vec<[u32; 5]> = order
        .iter()
        .map(|&orig| {
            let [a, b, c] = edges3[orig];
            let d = distinct_vertex(n, &[a, b, c], rng);
            let e = distinct_vertex(n, &[a, b, c, d], rng);
            [a, b, c, d, e]
        })
        .collect();

    // Re-pad the first loop from the vertices it does not touch.
    let first_loop_vertices = &planted[..copy_size];
    let pool: Vec<u32> = (0..n as u32)
        .filter(|v| !first_loop_vertices.contains(&(*v as usize)))
        .collect();
    let mut padding: Vec<u32> = index::sample(rng, pool.len(), 2 * ell)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    padding.shuffle(rng);
    for (j, &k) in loops[0].iter().enumerate() {
        edges[k][3] = padding[2 * j];
        edges[k][4] = padding[2 * j + 1];
    }

    Ok((
        Hypergraph5 {
            n_vertices: n,
            edges,
        },
        HyperloopSecret { loops },
    ))
}

/// `F_H(x)`: predicate `x_1 ^ x_2 ^ x_3 ^ x_4 x_5` on every hyperedge.
pub fn goldreich_prg_eval(h: &Hypergraph5, x: &BitString) -> Result<BitString, Error> {
    check_len(h.n_vertices, x.len())?;
    let mut out = BitString::zeros(h.edges.len());
    for (i, e) in h.edges.iter().enumerate() {
        let v = |k: usize| x.get(e[k] as usize);
        if v(0) ^ v(1) ^ v(2) ^ (v(3) & v(4)) {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// Bit-sliced `F_H`: `seeds[v]` holds vertex `v`'s value in 64 independent
/// lanes; output word `i` holds edge `i` for each lane.
pub fn goldreich_prg_eval_lanes(h: &Hypergraph5, seeds: &[u64]) -> Result<Vec<u64>, Error> {
    check_len(h.n_vertices, seeds.len())?;
    Ok(h.edges
        .iter()
        .map(|e| {
            let v = |k: usize| seeds[e[k] as usize];
            v(0) ^ v(1) ^ v(2) ^ (v(3) & v(4))
        })
        .collect())
}

pub fn hyperloop_keygen<R: RngCore + ?Sized>(
    params: &HyperloopParams,
    rng: &mut R,
) -> Result<(HyperloopSecret, Hypergraph5), Error> {
    let (pk, sk) = sample_planted_hypergraph(params, rng)?;
    Ok((sk, pk))
}

/// `F_H(u)` at a fresh uniform seed `u`.
pub fn hyperloop_encode<R: RngCore + ?Sized>(pk: &Hypergraph5, rng: &mut R) -> BitString {
    let u = crate::sampling::sample_uniform(pk.n_vertices, rng);
    goldreich_prg_eval(pk, &u).expect("seed length matches vertex count")
}

/// 64 independent encodings at once, in the lane layout of
/// [`goldreich_prg_eval_lanes`].
pub fn hyperloop_encode_lanes<R: RngCore + ?Sized>(pk: &Hypergraph5, rng: &mut R) -> Vec<u64> {
    let seeds: Vec<u64> = (0..pk.n_vertices).map(|_| rng.next_u64()).collect();
    goldreich_prg_eval_lanes(pk, &seeds).expect("seed length matches vertex count")
}

/// Extracts lane `lane` of a bit-sliced word vector as a bit string.
pub fn lane(words: &[u64], lane: u32) -> BitString {
    let mut out = BitString::zeros(words.len());
    for (i, w) in words.iter().enumerate() {
        if w >> lane & 1 == 1 {
            out.set(i, true);
        }
    }
    out
}

fn check_loop_indices(sk: &HyperloopSecret, len: usize) -> Result<(), Error> {
    for s in &sk.loops {
        if let Some(&bad) = s.iter().find(|&&j| j >= len) {
            return Err(Error::Domain(alloc::format!(
                "loop index {bad} out of range for codeword length {len}"
            )));
        }
    }
    Ok(())
}

/// ONE iff the XOR of `x` over `S_1` is 0.
pub fn hyperloop_decode(sk: &HyperloopSecret, x: &BitString) -> Result<Verdict, Error> {
    check_loop_indices(sk, x.len())?;
    let first = sk
        .loops
        .first()
        .ok_or_else(|| Error::Domain("secret key has no loops".into()))?;
    Ok(Verdict::from_bool(!x.parity_at(first)))
}

/// Bit-sliced decode of `S_1`: bit `l` of the result is set iff lane `l`
/// decodes to ONE.
pub fn hyperloop_decode_lanes(sk: &HyperloopSecret, words: &[u64]) -> Result<u64, Error> {
    let first = sk
        .loops
        .first()
        .ok_or_else(|| Error::Domain("secret key has no loops".into()))?;
    let mut parity = 0u64;
    for &j in first {
        parity ^= *words.get(j).ok_or(Error::Length {
            expected: j + 1,
            actual: words.len(),
        })?;
    }
    Ok(!parity)
}

/// Number of planted loops whose parity over `x` is 0.
pub fn hyperloop_satisfied_loops(sk: &HyperloopSecret, x: &BitString) -> Result<usize, Error> {
    check_loop_indices(sk, x.len())?;
    Ok(sk.loops.iter().filter(|s| !x.parity_at(s)).count())
}

/// Multi-loop variant: ONE iff at least `threshold` loops have parity 0.
pub fn hyperloop_decode_multi(
    sk: &HyperloopSecret,
    x: &BitString,
    threshold: usize,
) -> Result<Verdict, Error> {
    Ok(Verdict::from_bool(
        hyperloop_satisfied_loops(sk, x)? >= threshold,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct Hyperloop {
    pub params: HyperloopParams,
}

impl ZeroBitScheme for Hyperloop {
    type SecretKey = HyperloopSecret;
    type PublicKey = Hypergraph5;
    const PUBLIC_KEY: bool = true;

    fn name(&self) -> &'static str {
        "hyperloop"
    }

    fn codeword_len(&self) -> usize {
        self.params.edge_count()
    }

    fn keygen<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(HyperloopSecret, Hypergraph5), Error> {
        hyperloop_keygen(&self.params, rng)
    }

    fn encode<R: RngCore + ?Sized>(&self, pk: &Hypergraph5, rng: &mut R) -> BitString {
        hyperloop_encode(pk, rng)
    }

    fn decode(&self, sk: &HyperloopSecret, x: &BitString) -> Result<Verdict, Error> {
        check_len(self.codeword_len(), x.len())?;
        hyperloop_decode(sk, x)
    }
}
