//! Exact Bernoulli factories: averaging, Huber's doubling, and the `p / q`
//! ratio built from them.
//!
//! A [`Coin`] is a black box of independent bits with a fixed, unknown
//! success probability. Factories only ever flip coins; they never look at
//! the probabilities.

use thiserror::Error;

use crate::poisson_gibbs::GibbsError;
use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactoryError {
    #[error("certified gap must be positive, got {0}")]
    BadGap(f64),
    #[error("doubling parameter must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
}

pub trait Coin {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError>;
}

impl<C: Coin + ?Sized> Coin for &mut C {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        (**self).flip(rng)
    }
}

/// Coin with an explicitly known bias, drawn by comparing a uniform.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCoin(pub f64);

impl Coin for ConstantCoin {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        Ok(rng.bernoulli(self.0))
    }
}

/// Wraps a closure as a coin.
pub struct FnCoin<F>(pub F);

impl<F: FnMut(&mut RngStream) -> Result<bool, FactoryError>> Coin for FnCoin<F> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        (self.0)(rng)
    }
}

/// Counts draws of the wrapped coin.
#[derive(Debug, Clone)]
pub struct CoinOracle<C> {
    pub coin: C,
    draws: u64,
}

impl<C> CoinOracle<C> {
    pub fn new(coin: C) -> Self {
        CoinOracle { coin, draws: 0 }
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }
}

impl<C: Coin> Coin for CoinOracle<C> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        self.draws += 1;
        self.coin.flip(rng)
    }
}

/// Conjunction of two independent coins; the second is skipped when the
/// first fails.
pub struct And<A, B>(pub A, pub B);

impl<A: Coin, B: Coin> Coin for And<A, B> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        Ok(self.0.flip(rng)? && self.1.flip(rng)?)
    }
}

pub struct Not<C>(pub C);

impl<C: Coin> Coin for Not<C> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        Ok(!self.0.flip(rng)?)
    }
}

/// `Ber((1 - q + p) / 2)`: a fair bit picks between `1 - Ber(q)` and `Ber(p)`.
pub struct AverageCoin<P, Q> {
    pub p: P,
    pub q: Q,
}

pub fn average_coin<P: Coin, Q: Coin>(p: P, q: Q) -> AverageCoin<P, Q> {
    AverageCoin { p, q }
}

impl<P: Coin, Q: Coin> Coin for AverageCoin<P, Q> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        if rng.fair_bit() {
            Ok(!self.q.flip(rng)?)
        } else {
            self.p.flip(rng)
        }
    }
}

/// `Ber(2 rho)` from `Ber(rho)` when `2 rho <= 1 - eps`.
pub struct DoubleCoin<R> {
    pub rho: R,
    pub eps: f64,
    /// Largest number of inner-loop steps any single flip has taken.
    pub max_inner: u64,
}

pub fn double_coin<R: Coin>(rho: R, eps: f64) -> Result<DoubleCoin<R>, FactoryError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FactoryError::BadEpsilon(eps));
    }
    Ok(DoubleCoin { rho, eps, max_inner: 0 })
}

impl<R: Coin> Coin for DoubleCoin<R> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        let (bit, steps) = huber_double(&mut self.rho, self.eps, rng)?;
        self.max_inner = self.max_inner.max(steps);
        Ok(bit)
    }
}

/// Geometric variate on `{1, 2, ...}` with `P(g = j) = (1/c)^(j-1) (c-1)/c`.
#[inline]
fn geometric_from_one(c: f64, rng: &mut RngStream) -> u64 {
    // P(g > j) = c^-j, so invert a uniform on (0, 1].
    let u = rng.uniform_open0();
    1 + (u.ln() / -c.ln()).floor() as u64
}

/// One output bit of the doubling walk, with its inner step count. All of
/// `eps`, `c` and `k` restart from their initial values on every call.
pub fn huber_double<R: Coin>(rho: &mut R, eps: f64, rng: &mut RngStream) -> Result<(bool, u64), FactoryError> {
    let mut eps = eps.min(0.644);
    let mut k = 23.0 / (5.0 * eps);
    let mut i: u64 = 1;
    let mut c = 2.0f64;
    let mut steps = 0u64;
    while i != 0 {
        while i > 0 && (i as f64) < k {
            let u = rho.flip(rng)?;
            let g = geometric_from_one(c, rng);
            i = i - 1 + if u { 0 } else { g };
            steps += 1;
        }
        if (i as f64) >= k {
            // (1 + eps/2)^-i in log space
            let keep = (-(i as f64) * (eps / 2.0).ln_1p()).exp();
            if !rng.bernoulli(keep) {
                return Ok((false, steps));
            }
            c *= 1.0 + eps / 2.0;
            eps /= 2.0;
            k *= 2.0;
        }
    }
    Ok((true, steps))
}

/// `Ber(p / q)` from `Ber(p)` and a coin of bias exactly `q - p`.
pub struct RatioCoin<P, G> {
    pub p: P,
    pub gap: G,
}

pub fn ratio_from_gap_coin<P: Coin, G: Coin>(p: P, gap: G) -> RatioCoin<P, G> {
    RatioCoin { p, gap }
}

impl<P: Coin, G: Coin> Coin for RatioCoin<P, G> {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        loop {
            if rng.fair_bit() {
                if self.p.flip(rng)? {
                    return Ok(true);
                }
            } else if self.gap.flip(rng)? {
                return Ok(false);
            }
        }
    }
}

/// Draws `Ber(p / q)` given coins for `p` and `q` and a certified lower bound
/// `eps_gap <= q - p`. The gap coin is `1 - Ber(2 rho)` with
/// `rho = (1 - q + p) / 2` from the averaging coin.
pub fn sample_ratio<P: Coin, Q: Coin>(
    p: &mut P,
    q: &mut Q,
    eps_gap: f64,
    rng: &mut RngStream,
) -> Result<bool, FactoryError> {
    if !(eps_gap > 0.0) {
        return Err(FactoryError::BadGap(eps_gap));
    }
    loop {
        if rng.fair_bit() {
            if p.flip(rng)? {
                return Ok(true);
            }
        } else {
            let mut avg = AverageCoin { p: &mut *p, q: &mut *q };
            let (doubled, _) = huber_double(&mut avg, eps_gap, rng)?;
            if !doubled {
                return Ok(false);
            }
        }
    }
}
