//! Small statistics toolkit: confidence intervals and exact binomial tails.

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A proportion estimate with its Wilson 99% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        Proportion { successes, trials }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn ci99(&self) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, Z99)
    }

    /// Standard error of the estimate at the observed rate.
    pub fn std_error(&self) -> f64 {
        let p = self.estimate();
        libm::sqrt(p * (1.0 - p) / self.trials.max(1) as f64)
    }

    pub fn merge(self, other: Proportion) -> Proportion {
        Proportion::new(self.successes + other.successes, self.trials + other.trials)
    }
}

/// ln C(n, k).
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Pr[Bin(n, p) = k].
pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    libm::exp(ln_choose(n, k) + k as f64 * libm::log(p) + (n - k) as f64 * libm::log1p(-p))
}

/// Pr[Bin(n, p) >= k], summed term by term.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    (k..=n).map(|j| binomial_pmf(n, p, j)).sum::<f64>().min(1.0)
}

/// Pr[Bin(n, p) <= k].
pub fn binomial_lower_tail(n: u64, p: f64, k: u64) -> f64 {
    (0..=k.min(n))
        .map(|j| binomial_pmf(n, p, j))
        .sum::<f64>()
        .min(1.0)
}

/// Two-proportion z statistic with pooled variance.
pub fn two_proportion_z(a: Proportion, b: Proportion) -> f64 {
    let pooled = (a.successes + b.successes) as f64 / (a.trials + b.trials) as f64;
    let se = libm::sqrt(pooled * (1.0 - pooled) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64));
    if se == 0.0 {
        return 0.0;
    }
    (a.estimate() - b.estimate()) / se
}

/// Number of amplifier repetitions for 99% success at advantage `alpha - delta`:
/// `ceil(12 / (alpha - delta)^2 * ln 200)`.
pub fn chernoff_repetitions(alpha: f64, delta: f64) -> usize {
    let gap = alpha - delta;
    libm::ceil(12.0 / (gap * gap) * libm::log(200.0)) as usize
}
