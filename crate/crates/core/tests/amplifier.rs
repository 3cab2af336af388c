use prc_core::channels::{apply_bounded_adversary, budget, AdversaryStrategy, ChannelSpec};
use prc_core::prc::{
    amplify_decode, amplify_encode, amplify_keygen, amplify_votes, calibrate_alpha_delta,
    AmplifiedKey, ZeroBitScheme,
};
use prc_core::rng::{RngStream, StreamRng};
use prc_core::sampling::sample_uniform;
use prc_core::stats::{chernoff_repetitions, two_proportion_z, Proportion};
use prc_core::weakxor::{WeakXor, WeakXorParams, XorMatrix, XorSecret};

/// Two-sided 0.001 critical value of the standard normal.
const Z_999: f64 = 3.290_526_731_491_926;

fn base() -> WeakXor {
    WeakXor {
        params: WeakXorParams::new(32, 64, 2, 0.0, 0.02).unwrap(),
    }
}

#[test]
fn chernoff_sized_amplifier_decodes_and_rejects() {
    let scheme = base();
    let root = RngStream::new(2024, 7);
    let (sk, pk) = scheme.keygen(&mut root.named("base").rng()).unwrap();
    let cal = calibrate_alpha_delta(
        &scheme,
        &sk,
        &pk,
        &ChannelSpec::IDENTITY,
        20_000,
        root.named("cal"),
    )
    .unwrap();
    let (alpha, delta) = (cal.alpha.estimate(), cal.delta.estimate());
    // (1 + 0.96^2) / 2 = 0.9608.
    assert!((alpha - 0.9608).abs() < 0.01, "{alpha}");
    let t = chernoff_repetitions(alpha, delta);
    let key = amplify_keygen(&scheme, t, alpha, delta, &mut root.named("amp").rng()).unwrap();
    let public = key.public();
    let trials = 500;
    let mut ones = 0;
    let mut bots = 0;
    for i in 0..trials {
        let mut rng = root.named("trial").child(i).rng();
        let x = amplify_encode(&scheme, &public, &mut rng);
        ones += u32::from(amplify_decode(&scheme, &key, &x).unwrap().is_one());
        let r = sample_uniform(x.len(), &mut rng);
        bots += u32::from(!amplify_decode(&scheme, &key, &r).unwrap().is_one());
    }
    assert!(ones as f64 >= 0.99 * trials as f64, "{ones}");
    assert!(bots as f64 >= 0.99 * trials as f64, "{bots}");
}

struct Outcome {
    success: Proportion,
    votes: Proportion,
}

struct Setup {
    scheme: WeakXor,
    base_sk: XorSecret,
    base_pk: XorMatrix,
    t: usize,
    alpha: f64,
    delta: f64,
}

impl Setup {
    /// Fresh shifts and permutation around the fixed base key.
    fn key(&self, rng: &mut StreamRng, permute: bool) -> AmplifiedKey<WeakXor> {
        let mut key = amplify_keygen(&self.scheme, self.t, self.alpha, self.delta, rng).unwrap();
        key.base_sk = self.base_sk.clone();
        key.base_pk = self.base_pk.clone();
        if !permute {
            key.perm = (0..key.perm.len() as u32).collect();
        }
        key
    }

    fn run(
        &self,
        strategy: &AdversaryStrategy,
        permute: bool,
        trials: u64,
        stream: RngStream,
    ) -> Outcome {
        let (mut ok, mut votes) = (0, 0);
        for i in 0..trials {
            let mut rng = stream.child(i).rng();
            let key = self.key(&mut rng, permute);
            let x = amplify_encode(&self.scheme, &key.public(), &mut rng);
            let y = apply_bounded_adversary(&x, 0.1, strategy, &mut rng).unwrap();
            let v = amplify_votes(&self.scheme, &key, &y).unwrap();
            votes += v as u64;
            ok += u64::from(v >= key.theta);
        }
        Outcome {
            success: Proportion::new(ok, trials),
            votes: Proportion::new(votes, trials * self.t as u64),
        }
    }
}

#[test]
fn secret_permutation_neutralises_targeted_flips() {
    let scheme = base();
    let n = scheme.codeword_len();
    let root = RngStream::new(99, 8);
    let (base_sk, base_pk) = scheme.keygen(&mut root.named("base").rng()).unwrap();
    let cal = calibrate_alpha_delta(
        &scheme,
        &base_sk,
        &base_pk,
        &ChannelSpec::HypergeometricRate { rate: 0.1 },
        20_000,
        root.named("cal"),
    )
    .unwrap();
    let t = 101;
    let budget = budget(0.1, t * n);

    // The adversary knows the secret positions inside each block: it flips
    // one of them per block, then spends the rest of its budget elsewhere.
    let mut targets: Vec<usize> = (0..t).map(|j| j * n + base_sk.support[0]).collect();
    targets.extend(
        (0..t * n)
            .filter(|i| !base_sk.support.contains(&(i % n)))
            .take(budget - t),
    );
    let targeted = AdversaryStrategy::ParityTarget { targets };
    let setup = Setup {
        scheme,
        base_sk,
        base_pk,
        t,
        alpha: cal.alpha.estimate(),
        delta: cal.delta.estimate(),
    };
    let trials = 10_000;
    let a = setup.run(&targeted, true, trials, root.named("targeted"));
    let b = setup.run(
        &AdversaryStrategy::RandomFlip,
        true,
        trials,
        root.named("random"),
    );
    let z_success = two_proportion_z(a.success, b.success);
    let z_votes = two_proportion_z(a.votes, b.votes);
    assert!(z_success.abs() < Z_999, "success z = {z_success}");
    assert!(z_votes.abs() < Z_999, "vote z = {z_votes}");

    // Without the permutation the same guesses flip every block's check.
    let c = setup.run(&targeted, false, 2_000, root.named("exposed"));
    assert!(c.votes.estimate() < 0.2, "{}", c.votes.estimate());
    assert!(two_proportion_z(c.votes, b.votes).abs() > 10.0);
}
