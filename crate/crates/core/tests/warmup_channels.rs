use prc_core::channels::apply_bsc;
use prc_core::prc::ZeroBitScheme;
use prc_core::rng::RngStream;
use prc_core::sampling::sample_uniform;
use prc_core::stats::binomial_lower_tail;
use prc_core::warmup::{WarmupParams, WarmupPrf};

fn scheme() -> WarmupPrf {
    WarmupPrf {
        params: WarmupParams::new(256, 25, 64).unwrap(),
    }
}

fn one_rate(p: f64, trials: u64, seed: u64) -> f64 {
    let s = scheme();
    let root = RngStream::new(seed, 31);
    let (sk, pk) = s.keygen(&mut root.named("key").rng()).unwrap();
    let ones = (0..trials)
        .filter(|&i| {
            let mut rng = root.child(i).rng();
            let y = apply_bsc(&s.encode(&pk, &mut rng), p, &mut rng).unwrap();
            s.decode(&sk, &y).unwrap().is_one()
        })
        .count();
    ones as f64 / trials as f64
}

/// A block survives if its header is intact and at most n/10 tag bits flip.
fn success_bound(p: f64) -> f64 {
    let params = scheme().params;
    let header = (1.0 - p).powi(params.input_len() as i32);
    let tag = binomial_lower_tail(256, p, 25);
    1.0 - (1.0 - header * tag).powi(params.block_count as i32)
}

#[test]
fn survives_rate_one_over_tau() {
    // Header 40 bits: 0.96^40 = 0.195; 64 blocks give 1 - 1e-6.
    let bound = success_bound(0.04);
    assert!(bound > 0.999, "{bound}");
    let rate = one_rate(0.04, 1000, 1);
    assert!(rate >= 0.95, "{rate}");
}

#[test]
fn constant_rate_breaks_it() {
    let bound = success_bound(0.2);
    assert!(bound < 1e-6, "{bound}");
    let rate = one_rate(0.2, 300, 2);
    assert!(rate < 0.05, "{rate}");
}

#[test]
fn random_strings_rejected() {
    let s = scheme();
    let root = RngStream::new(3, 32);
    let (sk, _) = s.keygen(&mut root.rng()).unwrap();
    let trials = 5000;
    let bots = (0..trials)
        .filter(|&i| {
            let x = sample_uniform(s.codeword_len(), &mut root.child(i).rng());
            !s.decode(&sk, &x).unwrap().is_one()
        })
        .count();
    assert!(bots as f64 >= 0.999 * trials as f64, "{bots}");
}
