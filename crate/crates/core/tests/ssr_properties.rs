use prc_core::bits::BitString;
use prc_core::channels::apply_bsc;
use prc_core::rng::RngStream;
use prc_core::sampling::sample_uniform;
use prc_core::ssr::{
    ssr_decode, ssr_encode, ssr_expected_tag_match, ssr_keygen, ssr_matches, SsrParams,
};
use prc_core::stats::{binomial_upper_tail, Proportion};

fn desk() -> SsrParams {
    SsrParams::with_default_kprime(1024, 0.1, 0.25, 0.01).unwrap()
}

#[test]
fn tag_match_rate_under_bsc() {
    // ell = ceil(c * 10).
    for (eps, p, c, seed) in [(0.25, 0.1, 0.5, 1), (0.1, 0.2, 0.5, 2), (0.25, 0.3, 0.3, 3)] {
        let params = SsrParams::new(1024, c, eps, 100, 0.01).unwrap();
        let ell = params.ell();
        let root = RngStream::new(seed, 91);
        let mut matched = 0u64;
        let codewords = 10_000u64;
        // A fresh key for every hundred codewords.
        for k in 0..codewords / 100 {
            let key = ssr_keygen(&params, &mut root.named("key").child(k).rng()).unwrap();
            for i in k * 100..(k + 1) * 100 {
                let mut rng = root.child(i).rng();
                let y = apply_bsc(&ssr_encode(&key, eps, &mut rng), p, &mut rng).unwrap();
                matched += ssr_matches(&key, &y).unwrap() as u64;
            }
        }
        let tags = codewords * 100;
        let expect = ssr_expected_tag_match(eps, p, ell).unwrap();
        let est = matched as f64 / tags as f64;
        let se = (expect * (1.0 - expect) / tags as f64).sqrt();
        assert!(
            (est - expect).abs() < 3.0 * se,
            "({eps}, {p}, {ell}): {est} vs {expect}"
        );
    }
}

#[test]
fn tag_bits_are_fair_coins() {
    let params = SsrParams::new(256, 0.5, 0.25, 64, 0.01).unwrap();
    let root = RngStream::new(4, 92);
    let mut ones = 0u64;
    let codewords = 5_000u64;
    for i in 0..codewords {
        let mut rng = root.child(i).rng();
        let key = ssr_keygen(&params, &mut rng).unwrap();
        let x = ssr_encode(&key, 0.5, &mut rng);
        ones += x.slice(256, 64).weight() as u64;
    }
    let total = (codewords * 64) as f64;
    assert!((ones as f64 / total - 0.5).abs() < 3.0 * (0.25 / total).sqrt());
}

fn bot_rate(x: &BitString, keys: u64, seed: u64) -> Proportion {
    let params = desk();
    let root = RngStream::new(seed, 93);
    let bots = (0..keys)
        .filter(|&i| {
            let key = ssr_keygen(&params, &mut root.child(i).rng()).unwrap();
            !ssr_decode(&key, &params, x).unwrap().is_one()
        })
        .count() as u64;
    Proportion::new(bots, keys)
}

#[test]
fn fixed_strings_follow_binomial_soundness() {
    let params = desk();
    let len = params.codeword_len();
    let mut alternating = BitString::zeros(len);
    for i in (0..len).step_by(2) {
        alternating.set(i, true);
    }
    let mut halves = BitString::zeros(len);
    for i in 512..1024 {
        halves.set(i, true);
    }
    assert_eq!(bot_rate(&BitString::zeros(len), 500, 5).estimate(), 1.0);
    assert_eq!(bot_rate(&BitString::ones(len), 500, 6).estimate(), 1.0);
    // A balanced header makes every tag check a fair coin, so ONE happens
    // with Pr[Bin(85, 1/2) >= 53] = 0.0147 whatever the key size: the
    // threshold sits 2 n^delta = 2.14 standard deviations above k'/2.
    let accept = binomial_upper_tail(85, 0.5, 53);
    assert!((accept - 0.014728).abs() < 1e-5);
    for (x, seed) in [(alternating, 7), (halves, 8)] {
        let r = bot_rate(&x, 20_000, seed);
        let (lo, hi) = r.ci99();
        assert!(lo <= 1.0 - accept && 1.0 - accept <= hi, "{:?}", r);
    }
}

#[test]
fn random_strings_mostly_rejected() {
    let params = desk();
    let root = RngStream::new(9, 94);
    let trials = 20_000;
    let bots = (0..trials)
        .filter(|&i| {
            let mut rng = root.child(i).rng();
            let key = ssr_keygen(&params, &mut rng).unwrap();
            !ssr_decode(
                &key,
                &params,
                &sample_uniform(params.codeword_len(), &mut rng),
            )
            .unwrap()
            .is_one()
        })
        .count();
    assert!(bots as f64 >= 0.98 * trials as f64, "{bots}");
}

#[test]
fn coordinate_load_stays_small() {
    // Per-coordinate load is Bin(k', ell / n); the union bound over n
    // coordinates gives the smallest L with Pr[max load >= L] <= 1%.
    let params = SsrParams::new(1024, 1.0, 0.25, 85, 0.01).unwrap();
    let (n, ell, k) = (1024u64, params.ell() as u64, params.kprime as u64);
    let limit = (1..=k)
        .find(|&l| n as f64 * binomial_upper_tail(k, ell as f64 / n as f64, l) <= 0.01)
        .unwrap();
    let root = RngStream::new(10, 95);
    let keys = 1000;
    let within = (0..keys)
        .filter(|&i| {
            let key = ssr_keygen(&params, &mut root.child(i).rng()).unwrap();
            (key.max_coordinate_load() as u64) < limit
        })
        .count();
    assert!(
        within as f64 >= 0.99 * keys as f64,
        "{within} below {limit}"
    );
}
