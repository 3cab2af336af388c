//! Samplers for the bit distributions used by the constructions, plus the
//! closed-form parity-bias formulas the tests treat as ground truth.

use alloc::vec::Vec;

use rand::distributions::{Bernoulli, Distribution};
use rand::seq::index;
use rand::{Rng, RngCore};

use crate::bits::BitString;
use crate::error::{check_prob, Error};
use crate::stats::ln_choose;

/// `n` uniform bits.
pub fn sample_uniform<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> BitString {
    let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BitString::from_words(words, n)
}

/// `n` i.i.d. Bernoulli(`p`) bits.
pub fn sample_bernoulli_vector<R: RngCore + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<BitString, Error> {
    check_prob("p", p)?;
    if p == 0.5 {
        return Ok(sample_uniform(n, rng));
    }
    let mut out = BitString::zeros(n);
    if p == 0.0 {
        return Ok(out);
    }
    let ber = Bernoulli::new(p).map_err(|_| Error::Domain(alloc::format!("p = {p}")))?;
    for i in 0..n {
        if ber.sample(rng) {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// `d` distinct positions of `[0, n)`, uniformly among all `d`-subsets.
pub fn sample_positions<R: RngCore + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Vec<usize>, Error> {
    if d > n {
        return Err(Error::Domain(alloc::format!(
            "weight {d} exceeds length {n}"
        )));
    }
    Ok(index::sample(rng, n, d).into_vec())
}

/// Uniform element of the Hamming sphere `{x in {0,1}^n : |x| = d}`.
pub fn sample_hamming_sphere<R: RngCore + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<BitString, Error> {
    let positions = sample_positions(n, d, rng)?;
    BitString::from_support(n, &positions)
}

/// Pr[X_1 xor ... xor X_n = 0] for independent X_i ~ Ber(p_i), i.e.
/// `(1 + prod(1 - 2 p_i)) / 2`.
///
/// The product formula holds for any `p_i` in `[0, 1]`, so values above one
/// half are accepted; the result then may fall below one half.
pub fn xor_parity_zero_prob(ps: &[f64]) -> Result<f64, Error> {
    let mut prod = 1.0;
    for &p in ps {
        check_prob("p_i", p)?;
        prod *= 1.0 - 2.0 * p;
    }
    Ok(0.5 * (1.0 + prod))
}

/// Hypergeometric draw: `draws` items without replacement from `population`
/// items of which `special` are marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypSpec {
    pub population: u64,
    pub special: u64,
    pub draws: u64,
}

impl HypSpec {
    pub fn new(population: u64, special: u64, draws: u64) -> Result<Self, Error> {
        if draws > population || special > population {
            return Err(Error::Domain(alloc::format!(
                "Hyp({population}, {special}, {draws}) needs draws, special <= population"
            )));
        }
        Ok(HypSpec {
            population,
            special,
            draws,
        })
    }
}

/// Bounds on Pr[Hyp(N, K, t) is even] of the form `1/2 -+ |1 - 2p|^t / 2`,
/// where `p` is the endpoint of `[(K - t)/N, K/(N - t)]` farthest from one
/// half. Requires `t <= K <= N`. Results are clamped to `[0, 1]`.
pub fn hypergeom_even_parity_bounds(spec: HypSpec) -> Result<(f64, f64), Error> {
    let HypSpec {
        population: n,
        special: m,
        draws: t,
    } = spec;
    if !(t <= m && m <= n) {
        return Err(Error::Domain(alloc::format!(
            "parity bounds need draws <= special <= population, got Hyp({n}, {m}, {t})"
        )));
    }
    if t == 0 {
        // Zero draws: X = 0 with certainty.
        return Ok((1.0, 1.0));
    }
    let lo_p = (m - t) as f64 / n as f64;
    let hi_p = if n == t {
        f64::INFINITY
    } else {
        m as f64 / (n - t) as f64
    };
    let radius = libm::fabs(1.0 - 2.0 * lo_p).max(libm::fabs(1.0 - 2.0 * hi_p));
    let half_bias = 0.5 * libm::pow(radius, t as f64);
    Ok(((0.5 - half_bias).max(0.0), (0.5 + half_bias).min(1.0)))
}

/// Bounds `1/2 + (1/2) min/max prod (1 - 2 p_i)` with every `p_i` in
/// `[(K - t)/N, K/(N - t)]`. The product is multilinear, so the extremes sit
/// at vertices of the box: `w^k u^(t - k)` for the two endpoint factors.
/// When `K/(N - t) <= 1/2` the lower end is `(1 - 2K/(N - t))^t`, the form
/// used for channel analyses. Requires `t <= K <= N`.
pub fn hypergeom_even_parity_product_bounds(spec: HypSpec) -> Result<(f64, f64), Error> {
    let HypSpec {
        population: n,
        special: m,
        draws: t,
    } = spec;
    if !(t <= m && m <= n) {
        return Err(Error::Domain(alloc::format!(
            "parity bounds need draws <= special <= population, got Hyp({n}, {m}, {t})"
        )));
    }
    if t == 0 {
        return Ok((1.0, 1.0));
    }
    if n == t {
        // Every item is drawn, so the count is exactly K.
        let even = if m % 2 == 0 { 1.0 } else { 0.0 };
        return Ok((even, even));
    }
    let u = 1.0 - 2.0 * (m - t) as f64 / n as f64;
    let w = 1.0 - 2.0 * m as f64 / (n - t) as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=t {
        let v = libm::pow(w, k as f64) * libm::pow(u, (t - k) as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((
        (0.5 + 0.5 * lo).clamp(0.0, 1.0),
        (0.5 + 0.5 * hi).clamp(0.0, 1.0),
    ))
}

/// Exact Pr[Hyp(N, K, t) is even], summing the pmf.
pub fn hypergeom_even_parity_exact(spec: HypSpec) -> f64 {
    let HypSpec {
        population: n,
        special: k,
        draws: t,
    } = spec;
    let lo = t.saturating_sub(n - k);
    let hi = t.min(k);
    let ln_total = ln_choose(n, t);
    let mut even = 0.0;
    let mut all = 0.0;
    for j in lo..=hi {
        let pmf = libm::exp(ln_choose(k, j) + ln_choose(n - k, t - j) - ln_total);
        all += pmf;
        if j % 2 == 0 {
            even += pmf;
        }
    }
    // Renormalise away lgamma rounding.
    even / all
}

/// `|#zeros - #ones| / n`: the least `delta` for which `a` is delta-biased.
pub fn bias_delta(a: &BitString) -> Result<f64, Error> {
    if a.is_empty() {
        return Err(Error::Domain("bias of an empty string".into()));
    }
    let ones = a.weight() as i64;
    let zeros = a.len() as i64 - ones;
    Ok((zeros - ones).unsigned_abs() as f64 / a.len() as f64)
}

/// Single Bernoulli draw with probability `p` (clamped to `[0, 1]`).
#[inline]
pub fn bernoulli<R: RngCore + ?Sized>(p: f64, rng: &mut R) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen_bool(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn rng(seed: u64) -> crate::rng::StreamRng {
        RngStream::new(seed, 0).rng()
    }

    #[test]
    fn bernoulli_degenerate() {
        let mut r = rng(1);
        assert_eq!(
            sample_bernoulli_vector(8, 0.0, &mut r).unwrap(),
            BitString::zeros(8)
        );
        assert_eq!(
            sample_bernoulli_vector(8, 1.0, &mut r).unwrap(),
            BitString::ones(8)
        );
        assert!(sample_bernoulli_vector(8, 1.5, &mut r).is_err());
        assert!(sample_bernoulli_vector(8, -0.1, &mut r).is_err());
    }

    #[test]
    fn bernoulli_weight_concentrates() {
        // Bin(1e5, 0.3): sd = 144.9, so +-500 is 3.45 sd; two-sided tail ~ 5.6e-4.
        let mut inside = 0;
        for seed in 0..100 {
            let w = sample_bernoulli_vector(100_000, 0.3, &mut rng(seed))
                .unwrap()
                .weight();
            if (29_500..=30_500).contains(&w) {
                inside += 1;
            }
        }
        assert!(inside >= 99, "{inside}");
    }

    #[test]
    fn sphere_edges() {
        let mut r = rng(2);
        assert_eq!(
            sample_hamming_sphere(5, 0, &mut r).unwrap(),
            BitString::zeros(5)
        );
        assert_eq!(
            sample_hamming_sphere(5, 5, &mut r).unwrap(),
            BitString::ones(5)
        );
        assert!(sample_hamming_sphere(5, 6, &mut r).is_err());
    }

    #[test]
    fn sphere_is_uniform_on_s24() {
        // The 6 weight-2 strings of length 4, each expected at 1/6.
        let mut counts = [0u32; 16];
        let mut r = rng(3);
        let trials = 100_000;
        for _ in 0..trials {
            let s = sample_hamming_sphere(4, 2, &mut r).unwrap();
            assert_eq!(s.weight(), 2);
            counts[s.words()[0] as usize] += 1;
        }
        for (pattern, &c) in counts.iter().enumerate() {
            let f = f64::from(c) / trials as f64;
            if (pattern as u32).count_ones() == 2 {
                assert!((f - 1.0 / 6.0).abs() < 0.01, "{pattern:04b}: {f}");
            } else {
                assert_eq!(c, 0);
            }
        }
    }

    #[test]
    fn parity_examples() {
        assert_eq!(xor_parity_zero_prob(&[]).unwrap(), 1.0);
        assert_eq!(xor_parity_zero_prob(&[0.5]).unwrap(), 0.5);
        assert!((xor_parity_zero_prob(&[0.25, 0.25]).unwrap() - 0.625).abs() < 1e-15);
        assert!(xor_parity_zero_prob(&[1.2]).is_err());
    }

    /// Enumerates all 2^n outcomes.
    fn parity_by_enumeration(ps: &[f64]) -> f64 {
        let n = ps.len();
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() % 2 == 0)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            ps[i]
                        } else {
                            1.0 - ps[i]
                        }
                    })
                    .product::<f64>()
            })
            .sum()
    }

    proptest! {
        #[test]
        fn parity_formula_matches_enumeration(ps in proptest::collection::vec(0.0f64..=1.0, 0..10)) {
            let formula = xor_parity_zero_prob(&ps).unwrap();
            prop_assert!((formula - parity_by_enumeration(&ps)).abs() < 1e-12);
        }

        #[test]
        fn parity_at_least_half_below_half(ps in proptest::collection::vec(0.0f64..=0.5, 0..12)) {
            let v = xor_parity_zero_prob(&ps).unwrap();
            prop_assert!((0.5..=1.0).contains(&v));
        }

        #[test]
        fn sphere_has_exact_weight(n in 0usize..300, frac in 0.0f64..=1.0, seed in any::<u64>()) {
            let d = (n as f64 * frac) as usize;
            let s = sample_hamming_sphere(n, d, &mut rng(seed)).unwrap();
            prop_assert_eq!(s.weight(), d);
            prop_assert_eq!(s.len(), n);
        }
    }

    #[test]
    fn parity_matches_monte_carlo() {
        let ps = [0.1, 0.3, 0.45, 0.2];
        let exact = xor_parity_zero_prob(&ps).unwrap();
        let trials = 1_000_000u32;
        let mut r = rng(4);
        let mut zero = 0u32;
        for _ in 0..trials {
            let x = ps.iter().fold(false, |acc, &p| acc ^ bernoulli(p, &mut r));
            if !x {
                zero += 1;
            }
        }
        let est = f64::from(zero) / f64::from(trials);
        let se = (exact * (1.0 - exact) / f64::from(trials)).sqrt();
        assert!((est - exact).abs() < 3.0 * se, "{est} vs {exact}");
    }

    /// Independent oracle: exact rational pmf via integer binomials.
    fn even_parity_rational(n: u64, k: u64, t: u64) -> f64 {
        fn choose(n: u64, k: u64) -> u128 {
            if k > n {
                return 0;
            }
            let mut acc: u128 = 1;
            for i in 0..k {
                acc = acc * u128::from(n - i) / u128::from(i + 1);
            }
            acc
        }
        let total = choose(n, t);
        let even: u128 = (0..=t)
            .filter(|j| j % 2 == 0)
            .map(|j| choose(k, j) * choose(n - k, t - j))
            .sum();
        even as f64 / total as f64
    }

    #[test]
    fn exact_parity_examples() {
        let p = hypergeom_even_parity_exact(HypSpec::new(4, 2, 2).unwrap());
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        let p = hypergeom_even_parity_exact(HypSpec::new(10, 5, 2).unwrap());
        assert!((p - 20.0 / 45.0).abs() < 1e-12);
        assert_eq!(
            hypergeom_even_parity_exact(HypSpec::new(17, 0, 5).unwrap()),
            1.0
        );
    }

    #[test]
    fn bound_examples() {
        assert_eq!(
            hypergeom_even_parity_bounds(HypSpec::new(10, 5, 0).unwrap()).unwrap(),
            (1.0, 1.0)
        );
        let (lo, hi) = hypergeom_even_parity_bounds(HypSpec::new(10, 5, 2).unwrap()).unwrap();
        assert!((hi - 0.58).abs() < 1e-12 && (lo - 0.42).abs() < 1e-12);
        let exact = hypergeom_even_parity_exact(HypSpec::new(10, 5, 2).unwrap());
        assert!(lo <= exact && exact <= hi);
        let spec = HypSpec::new(20, 10, 3).unwrap();
        let (lo, hi) = hypergeom_even_parity_bounds(spec).unwrap();
        let exact = even_parity_rational(20, 10, 3);
        assert!(lo <= exact && exact <= hi);
        assert!(hypergeom_even_parity_bounds(HypSpec::new(10, 2, 3).unwrap()).is_err());
        assert!(HypSpec::new(5, 6, 1).is_err());
    }

    #[test]
    fn product_bound_examples() {
        // Hyp(124 + 4, 12, 4): lower end (1 - 24/124)^4 / 2 + 1/2.
        let (lo, hi) =
            hypergeom_even_parity_product_bounds(HypSpec::new(128, 12, 4).unwrap()).unwrap();
        assert!((lo - (0.5 + 0.5 * (1.0 - 24.0 / 124.0f64).powi(4))).abs() < 1e-12);
        assert!((hi - (0.5 + 0.5 * (1.0 - 16.0 / 128.0f64).powi(4))).abs() < 1e-12);
        let exact = hypergeom_even_parity_exact(HypSpec::new(128, 12, 4).unwrap());
        assert!(lo <= exact && exact <= hi);
        // Endpoint factors 3/13 and -3/11: the minimum mixes signs.
        let (lo, hi) =
            hypergeom_even_parity_product_bounds(HypSpec::new(13, 7, 2).unwrap()).unwrap();
        assert!((lo - (0.5 - 0.5 * 9.0 / 143.0)).abs() < 1e-12);
        assert!((hi - (0.5 + 0.5 * 9.0 / 121.0)).abs() < 1e-12);
        assert_eq!(
            hypergeom_even_parity_product_bounds(HypSpec::new(5, 5, 0).unwrap()).unwrap(),
            (1.0, 1.0)
        );
        assert_eq!(
            hypergeom_even_parity_product_bounds(HypSpec::new(5, 5, 5).unwrap()).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn exact_matches_rational_oracle() {
        for n in 0..=30u64 {
            for k in 0..=n {
                for t in 0..=n {
                    let a = hypergeom_even_parity_exact(HypSpec::new(n, k, t).unwrap());
                    let b = even_parity_rational(n, k, t);
                    assert!((a - b).abs() < 1e-9, "Hyp({n},{k},{t}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn bias_examples() {
        let b = |s: &str| bias_delta(&BitString::from_bit_str(s).unwrap()).unwrap();
        assert_eq!(b("0101"), 0.0);
        assert_eq!(b("1111"), 1.0);
        assert_eq!(b("11101000"), 0.0);
        assert_eq!(b("1110"), 0.5);
        assert!(bias_delta(&BitString::zeros(0)).is_err());
    }
}
