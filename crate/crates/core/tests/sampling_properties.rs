use prc_core::rng::RngStream;
use prc_core::sampling::{
    hypergeom_even_parity_bounds, hypergeom_even_parity_exact, sample_hamming_sphere, HypSpec,
};

/// chi2(0.999) quantile with 19 degrees of freedom.
const CHI2_DF19_999: f64 = 43.820;

#[test]
fn parity_bounds_hold_for_sparse_flips() {
    // Channels flip at most a quarter of the positions in every analysis.
    for n in 1..=120u64 {
        for k in 0..=n / 4 {
            for t in 0..=k {
                let spec = HypSpec::new(n, k, t).unwrap();
                let (lo, hi) = hypergeom_even_parity_bounds(spec).unwrap();
                let exact = hypergeom_even_parity_exact(spec);
                assert!(
                    lo - 1e-12 <= exact && exact <= hi + 1e-12,
                    "Hyp({n}, {k}, {t})"
                );
            }
        }
    }
}

#[test]
fn parity_bounds_fail_near_half() {
    // Hyp(13, 7, 2) is even with probability 36/78 = 6/13, while the bound
    // is 1/2 - (1/2)(3/11)^2 = 0.46281.
    let spec = HypSpec::new(13, 7, 2).unwrap();
    let (lo, _) = hypergeom_even_parity_bounds(spec).unwrap();
    let exact = hypergeom_even_parity_exact(spec);
    assert!((exact - 6.0 / 13.0).abs() < 1e-12);
    assert!((lo - (0.5 - 0.5 * (3.0f64 / 11.0).powi(2))).abs() < 1e-12);
    assert!(exact < lo);
}

#[test]
fn sphere_uniform_over_subsets() {
    let (n, d) = (6, 3);
    let mut counts = [0u32; 64];
    let mut rng = RngStream::new(6, 0).rng();
    let draws = 100_000u32;
    for _ in 0..draws {
        let x = sample_hamming_sphere(n, d, &mut rng).unwrap();
        counts[x.words()[0] as usize] += 1;
    }
    let expected = draws as f64 / 20.0;
    let mut chi = 0.0;
    for (mask, &c) in counts.iter().enumerate() {
        if (mask as u64).count_ones() == 3 {
            chi += (c as f64 - expected).powi(2) / expected;
        } else {
            assert_eq!(c, 0);
        }
    }
    assert!(chi < CHI2_DF19_999, "chi2 = {chi}");
}

#[test]
fn streams_reproduce_independent_of_order() {
    let root = RngStream::new(77, 3);
    let forward: Vec<_> = (0..16)
        .map(|i| sample_hamming_sphere(128, 40, &mut root.child(i).rng()).unwrap())
        .collect();
    let backward: Vec<_> = (0..16)
        .rev()
        .map(|i| sample_hamming_sphere(128, 40, &mut root.child(i).rng()).unwrap())
        .collect();
    for (i, x) in forward.iter().enumerate() {
        assert_eq!(x, &backward[15 - i]);
    }
    assert_ne!(forward[0], forward[1]);
}
