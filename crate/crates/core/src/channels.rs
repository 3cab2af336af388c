//! Substitution channels: binary symmetric, hypergeometric (exactly `d`
//! uniformly placed flips) and hard-budgeted adversaries.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::distributions::{Bernoulli, Distribution};
use rand::RngCore;

use crate::bits::BitString;
use crate::error::{check_prob, Error};
use crate::sampling::sample_positions;

/// Adversary strategies. All of them flip at most `floor(p * n)` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdversaryStrategy {
    /// Flip a uniformly random set of exactly `budget` positions.
    RandomFlip,
    /// Flip the first `budget` positions.
    PrefixBurst,
    /// Flip the guessed positions, in order, until the budget runs out.
    ParityTarget { targets: Vec<usize> },
}

impl AdversaryStrategy {
    pub fn parse(name: &str, aux: Option<Vec<usize>>) -> Result<Self, Error> {
        match name {
            "random-flip" => Ok(AdversaryStrategy::RandomFlip),
            "prefix-burst" => Ok(AdversaryStrategy::PrefixBurst),
            "parity-target" => Ok(AdversaryStrategy::ParityTarget {
                targets: aux.ok_or_else(|| {
                    Error::Config("parity-target needs a list of guessed positions".into())
                })?,
            }),
            other => Err(Error::Config(alloc::format!(
                "unknown adversary strategy {other:?}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AdversaryStrategy::RandomFlip => "random-flip",
            AdversaryStrategy::PrefixBurst => "prefix-burst",
            AdversaryStrategy::ParityTarget { .. } => "parity-target",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Bsc {
        p: f64,
    },
    /// Exactly `d` flips.
    Hypergeometric {
        d: usize,
    },
    /// Exactly `floor(rate * n)` flips, `n` the input length.
    HypergeometricRate {
        rate: f64,
    },
    BoundedAdversary {
        p: f64,
        strategy: AdversaryStrategy,
    },
}

impl ChannelSpec {
    pub const IDENTITY: ChannelSpec = ChannelSpec::Bsc { p: 0.0 };

    pub fn apply<R: RngCore + ?Sized>(
        &self,
        x: &BitString,
        rng: &mut R,
    ) -> Result<BitString, Error> {
        match self {
            ChannelSpec::Bsc { p } => apply_bsc(x, *p, rng),
            ChannelSpec::Hypergeometric { d } => apply_hypergeometric(x, *d, rng),
            ChannelSpec::HypergeometricRate { rate } => {
                check_prob("rate", *rate)?;
                apply_hypergeometric(x, budget(*rate, x.len()), rng)
            }
            ChannelSpec::BoundedAdversary { p, strategy } => {
                apply_bounded_adversary(x, *p, strategy, rng)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChannelSpec::Bsc { .. } => "bsc",
            ChannelSpec::Hypergeometric { .. } | ChannelSpec::HypergeometricRate { .. } => "hyp",
            ChannelSpec::BoundedAdversary { .. } => "adv",
        }
    }

    /// Short human-readable label, e.g. `bsc(p=0.1)`.
    pub fn label(&self) -> alloc::string::String {
        match self {
            ChannelSpec::Bsc { p } => alloc::format!("bsc(p={p})"),
            ChannelSpec::Hypergeometric { d } => alloc::format!("hyp(d={d})"),
            ChannelSpec::HypergeometricRate { rate } => alloc::format!("hyp(rate={rate})"),
            ChannelSpec::BoundedAdversary { p, strategy } => {
                alloc::format!("adv(p={p},{})", strategy.name())
            }
        }
        .to_string()
    }
}

/// `floor(p * n)`, tolerant of representation error in `p`.
pub fn budget(p: f64, n: usize) -> usize {
    libm::floor(p * n as f64 + 1e-9) as usize
}

/// Flip each bit independently with probability `p`.
pub fn apply_bsc<R: RngCore + ?Sized>(
    x: &BitString,
    p: f64,
    rng: &mut R,
) -> Result<BitString, Error> {
    check_prob("p", p)?;
    let mut out = x.clone();
    if p == 0.0 {
        return Ok(out);
    }
    if p == 1.0 {
        return Ok(x.complement());
    }
    let ber = Bernoulli::new(p).map_err(|_| Error::Domain(alloc::format!("p = {p}")))?;
    for i in 0..x.len() {
        if ber.sample(rng) {
            out.flip(i);
        }
    }
    Ok(out)
}

/// Flip exactly `d` positions chosen uniformly among all `d`-subsets.
pub fn apply_hypergeometric<R: RngCore + ?Sized>(
    x: &BitString,
    d: usize,
    rng: &mut R,
) -> Result<BitString, Error> {
    let mut out = x.clone();
    for i in sample_positions(x.len(), d, rng)? {
        out.flip(i);
    }
    Ok(out)
}

pub fn apply_bounded_adversary<R: RngCore + ?Sized>(
    x: &BitString,
    p: f64,
    strategy: &AdversaryStrategy,
    rng: &mut R,
) -> Result<BitString, Error> {
    check_prob("p", p)?;
    let n = x.len();
    let budget = budget(p, n);
    let mut out = x.clone();
    match strategy {
        AdversaryStrategy::RandomFlip => {
            for i in sample_positions(n, budget, rng)? {
                out.flip(i);
            }
        }
        AdversaryStrategy::PrefixBurst => {
            for i in 0..budget {
                out.flip(i);
            }
        }
        AdversaryStrategy::ParityTarget { targets } => {
            let mut flipped = Vec::with_capacity(budget.min(targets.len()));
            for &i in targets {
                if flipped.len() == budget {
                    break;
                }
                if i >= n {
                    return Err(Error::Domain(alloc::format!(
                        "target position {i} out of range for length {n}"
                    )));
                }
                if !flipped.contains(&i) {
                    out.flip(i);
                    flipped.push(i);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sampling::sample_uniform;
    use alloc::vec;
    use proptest::prelude::*;

    fn rng(seed: u64) -> crate::rng::StreamRng {
        RngStream::new(seed, 11).rng()
    }

    #[test]
    fn bsc_degenerate() {
        let x = sample_uniform(100, &mut rng(0));
        assert_eq!(apply_bsc(&x, 0.0, &mut rng(1)).unwrap(), x);
        assert_eq!(apply_bsc(&x, 1.0, &mut rng(1)).unwrap(), x.complement());
        assert!(apply_bsc(&x, 1.1, &mut rng(1)).is_err());
    }

    #[test]
    fn bsc_flip_count_concentrates() {
        // Bin(1e5, 0.1): sd = 94.9, +-300 is 3.16 sd.
        let x = BitString::zeros(100_000);
        let inside = (0..100)
            .filter(|&s| {
                let d = apply_bsc(&x, 0.1, &mut rng(s)).unwrap().weight();
                (9_700..=10_300).contains(&d)
            })
            .count();
        assert!(inside >= 99, "{inside}");
    }

    #[test]
    fn hypergeometric_edges() {
        let x = sample_uniform(40, &mut rng(2));
        assert_eq!(apply_hypergeometric(&x, 0, &mut rng(3)).unwrap(), x);
        assert_eq!(
            apply_hypergeometric(&x, 40, &mut rng(3)).unwrap(),
            x.complement()
        );
        assert!(apply_hypergeometric(&x, 41, &mut rng(3)).is_err());
    }

    #[test]
    fn hypergeometric_uniform_over_patterns() {
        let x = BitString::zeros(4);
        let mut counts = [0u32; 16];
        let mut r = rng(4);
        for _ in 0..100_000 {
            counts[apply_hypergeometric(&x, 2, &mut r).unwrap().words()[0] as usize] += 1;
        }
        for (pat, &c) in counts.iter().enumerate() {
            if (pat as u32).count_ones() == 2 {
                assert!((f64::from(c) / 1e5 - 1.0 / 6.0).abs() < 0.01);
            } else {
                assert_eq!(c, 0);
            }
        }
    }

    #[test]
    fn bsc_conditioned_on_weight_is_hypergeometric() {
        // n = 6, d = 2: 15 equally likely patterns under both channels.
        // Chi-square with 14 df, 0.999 quantile 36.123.
        let n = 6;
        let x = BitString::zeros(n);
        let mut r = rng(5);
        let mut bsc = [0f64; 64];
        let mut hyp = [0f64; 64];
        let mut kept = 0;
        while kept < 60_000 {
            let y = apply_bsc(&x, 0.3, &mut r).unwrap();
            if y.weight() == 2 {
                bsc[y.words()[0] as usize] += 1.0;
                kept += 1;
            }
        }
        for _ in 0..60_000 {
            hyp[apply_hypergeometric(&x, 2, &mut r).unwrap().words()[0] as usize] += 1.0;
        }
        // Two-sample chi-square on the 15 cells.
        let mut stat = 0.0;
        for pat in 0..64usize {
            if (pat as u32).count_ones() != 2 {
                continue;
            }
            let (a, b) = (bsc[pat], hyp[pat]);
            stat += (a - b) * (a - b) / (a + b);
        }
        assert!(stat < 36.123, "chi-square {stat}");
    }

    #[test]
    fn adversary_examples() {
        let x = BitString::from_bit_str("11111111").unwrap();
        let burst = apply_bounded_adversary(&x, 0.25, &AdversaryStrategy::PrefixBurst, &mut rng(0));
        assert_eq!(burst.unwrap(), BitString::from_bit_str("00111111").unwrap());
        for strategy in [
            AdversaryStrategy::RandomFlip,
            AdversaryStrategy::PrefixBurst,
            AdversaryStrategy::ParityTarget {
                targets: vec![1, 2],
            },
        ] {
            assert_eq!(
                apply_bounded_adversary(&x, 0.0, &strategy, &mut rng(0)).unwrap(),
                x
            );
        }
        let target = AdversaryStrategy::ParityTarget {
            targets: vec![3, 7],
        };
        let y = apply_bounded_adversary(&x, 0.25, &target, &mut rng(0)).unwrap();
        assert_eq!(x.xor(&y).support(), vec![3, 7]);
        // Budget of one only reaches the first target.
        let y = apply_bounded_adversary(&x, 0.125, &target, &mut rng(0)).unwrap();
        assert_eq!(x.xor(&y).support(), vec![3]);
        let bad = AdversaryStrategy::ParityTarget { targets: vec![9] };
        assert!(apply_bounded_adversary(&x, 0.25, &bad, &mut rng(0)).is_err());
    }

    #[test]
    fn strategy_names() {
        assert!(AdversaryStrategy::parse("nope", None).is_err());
        assert!(AdversaryStrategy::parse("parity-target", None).is_err());
        for name in ["random-flip", "prefix-burst"] {
            assert_eq!(AdversaryStrategy::parse(name, None).unwrap().name(), name);
        }
    }

    fn arb_channel() -> impl Strategy<Value = ChannelSpec> {
        prop_oneof![
            (0.0f64..=1.0).prop_map(|p| ChannelSpec::Bsc { p }),
            (0.0f64..=1.0).prop_map(|rate| ChannelSpec::HypergeometricRate { rate }),
            (
                0.0f64..0.5,
                0usize..3,
                proptest::collection::vec(0usize..200, 0..50)
            )
                .prop_map(|(p, k, targets)| ChannelSpec::BoundedAdversary {
                    p,
                    strategy: match k {
                        0 => AdversaryStrategy::RandomFlip,
                        1 => AdversaryStrategy::PrefixBurst,
                        _ => AdversaryStrategy::ParityTarget { targets },
                    },
                }),
        ]
    }

    proptest! {
        #[test]
        fn channels_preserve_length_and_budget(ch in arb_channel(), seed in any::<u64>()) {
            let x = sample_uniform(200, &mut rng(seed));
            let y = ch.apply(&x, &mut rng(seed ^ 1)).unwrap();
            prop_assert_eq!(y.len(), x.len());
            match &ch {
                ChannelSpec::HypergeometricRate { rate } => {
                    prop_assert_eq!(x.distance(&y), budget(*rate, 200));
                }
                ChannelSpec::BoundedAdversary { p, .. } => {
                    prop_assert!(x.distance(&y) <= budget(*p, 200));
                }
                _ => {}
            }
        }
    }
}
