//! Heralded photon-number statistics of a lossy, possibly multimode, pair
//! source measured with threshold detectors.
//!
//! The herald arm has one click detector. The signal arm passes a
//! transmission chain (before conversion, conversion, after conversion) and
//! a 50/50 splitter onto two click detectors. Per Schmidt mode the pair
//! number is thermal with mean `μ/M`.

use crate::efficiency::CountStatistics;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use rayon::prelude::*;

pub const DEFAULT_TRUNCATION: usize = 10;
/// Largest neglected probability mass per mode allowed at construction.
pub const TAIL_LIMIT: f64 = 1e-8;
/// Monte Carlo trials per independently seeded chunk.
pub const MC_CHUNK: u64 = 1 << 16;
pub const MIN_HERALDS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    mean_photon_pairs: f64,
    schmidt_modes: usize,
    truncation: usize,
}

impl SourceModel {
    /// Checks that the thermal tail beyond `truncation` is below [`TAIL_LIMIT`].
    pub fn new(mean_photon_pairs: f64, schmidt_modes: usize, truncation: usize) -> Result<Self> {
        if !(mean_photon_pairs >= 0.0 && mean_photon_pairs.is_finite()) {
            return Err(Error::invalid("mean_photon_pairs", format!("{mean_photon_pairs} must be nonnegative")));
        }
        if schmidt_modes == 0 {
            return Err(Error::invalid("schmidt_modes", "must be at least 1"));
        }
        let s = Self {
            mean_photon_pairs,
            schmidt_modes,
            truncation,
        };
        let tail = s.tail_per_mode();
        if tail >= TAIL_LIMIT {
            return Err(Error::TruncationInsufficient {
                truncation,
                tail,
                limit: TAIL_LIMIT,
            });
        }
        Ok(s)
    }

    pub fn with_default_truncation(mean_photon_pairs: f64, schmidt_modes: usize) -> Result<Self> {
        Self::new(mean_photon_pairs, schmidt_modes, DEFAULT_TRUNCATION)
    }

    /// Smallest truncation, at least the default, that passes the tail check.
    pub fn auto(mean_photon_pairs: f64, schmidt_modes: usize) -> Result<Self> {
        let mut n = DEFAULT_TRUNCATION;
        loop {
            match Self::new(mean_photon_pairs, schmidt_modes, n) {
                Err(Error::TruncationInsufficient { .. }) if n < 4096 => n *= 2,
                other => return other,
            }
        }
    }

    pub fn mean_photon_pairs(&self) -> f64 {
        self.mean_photon_pairs
    }

    pub fn schmidt_modes(&self) -> usize {
        self.schmidt_modes
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn thermal_ratio(&self) -> f64 {
        let m = self.mean_photon_pairs / self.schmidt_modes as f64;
        m / (1.0 + m)
    }

    /// `P(n > truncation)` for one mode.
    pub fn tail_per_mode(&self) -> f64 {
        self.thermal_ratio().powi(self.truncation as i32 + 1)
    }

    /// Distribution of the total pair number over all modes, each mode cut at
    /// the truncation and renormalized.
    pub fn pair_distribution(&self) -> Vec<f64> {
        let x = self.thermal_ratio();
        let mut mode: Vec<f64> = (0..=self.truncation).map(|n| x.powi(n as i32)).collect();
        let z: f64 = mode.iter().sum();
        mode.iter_mut().for_each(|p| *p /= z);
        let mut total = vec![1.0];
        for _ in 0..self.schmidt_modes {
            let mut next = vec![0.0; total.len() + self.truncation];
            for (i, a) in total.iter().enumerate() {
                for (j, b) in mode.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            total = next;
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub herald_transmission: f64,
    pub signal_transmission_before: f64,
    pub conversion_efficiency: f64,
    pub signal_transmission_after: f64,
}

impl ChannelModel {
    pub fn new(herald: f64, before: f64, conversion: f64, after: f64) -> Result<Self> {
        let c = Self {
            herald_transmission: herald,
            signal_transmission_before: before,
            conversion_efficiency: conversion,
            signal_transmission_after: after,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("herald_transmission", self.herald_transmission),
            ("signal_transmission_before", self.signal_transmission_before),
            ("conversion_efficiency", self.conversion_efficiency),
            ("signal_transmission_after", self.signal_transmission_after),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} is not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Overall signal-arm transmission up to the splitter.
    pub fn signal_transmission(&self) -> f64 {
        self.signal_transmission_before * self.conversion_efficiency * self.signal_transmission_after
    }

    pub fn with_conversion_efficiency(&self, eta: f64) -> Result<Self> {
        Self::new(
            self.herald_transmission,
            self.signal_transmission_before,
            eta,
            self.signal_transmission_after,
        )
    }

    /// The unconverted output port: the signal survives conversion with
    /// probability `1 − η` and then sees `after_unconverted`.
    pub fn unconverted_port(&self, after_unconverted: f64) -> Result<Self> {
        Self::new(
            self.herald_transmission,
            self.signal_transmission_before,
            1.0 - self.conversion_efficiency,
            after_unconverted,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FockExact,
    MonteCarlo { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// `P(1∧2|h) / (P(1|h)·P(2|h))`.
    #[default]
    Heralded,
    /// `P(1∧2) / (P(1)·P(2))`, herald ignored.
    Unheralded,
}

/// Joint click distribution of (herald, detector 1, detector 2).
/// Index bits: 4 = herald, 2 = detector 1, 1 = detector 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickDistribution {
    pub outcomes: [f64; 8],
    /// Number of trials the distribution was estimated from; `None` when exact.
    pub trials: Option<u64>,
}

impl ClickDistribution {
    fn prob(&self, f: impl Fn(bool, bool, bool) -> bool) -> f64 {
        (0..8)
            .filter(|&k| f(k & 4 != 0, k & 2 != 0, k & 1 != 0))
            .map(|k| self.outcomes[k])
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().sum()
    }

    pub fn to_counts(&self) -> CountStatistics {
        CountStatistics {
            trials: self.trials.unwrap_or(0),
            p_h: self.prob(|h, _, _| h),
            p_cc: self.prob(|h, a, b| h && (a || b)),
            p_1: self.prob(|h, a, _| h && a),
            p_2: self.prob(|h, _, b| h && b),
            p_cc12: self.prob(|h, a, b| h && a && b),
        }
    }

    /// `g²` and the delta-method standard error of its estimate (zero when exact).
    pub fn g2(&self, conditioning: Conditioning) -> Result<G2Estimate> {
        // g = Π p_i^{c_i} over events that are nested or intersect in the
        // tabulated set, so Var(log ĝ) = (1/n)[Σ c_i c_j p_ij/(p_i p_j) − (Σ c_i)²].
        type Ev = fn(bool, bool, bool) -> bool;
        let events: Vec<(Ev, f64)> = match conditioning {
            Conditioning::Heralded => vec![
                (|h, a, b| h && a && b, 1.0),
                (|h, _, _| h, 1.0),
                (|h, a, _| h && a, -1.0),
                (|h, _, b| h && b, -1.0),
            ],
            Conditioning::Unheralded => vec![
                (|_, a, b| a && b, 1.0),
                (|_, a, _| a, -1.0),
                (|_, _, b| b, -1.0),
            ],
        };
        let p: Vec<f64> = events.iter().map(|(e, _)| self.prob(e)).collect();
        if p.iter().any(|&v| v <= 0.0) {
            return Err(Error::DivisionByZero("a click probability in g2 is zero"));
        }
        let value = p.iter().zip(&events).map(|(pi, (_, c))| pi.powf(*c)).product();
        let std_error = match self.trials {
            None => 0.0,
            Some(n) => {
                let mut v = 0.0;
                for (i, (ei, ci)) in events.iter().enumerate() {
                    for (j, (ej, cj)) in events.iter().enumerate() {
                        let pij = self.prob(|h, a, b| ei(h, a, b) && ej(h, a, b));
                        v += ci * cj * pij / (p[i] * p[j]);
                    }
                }
                let sc: f64 = events.iter().map(|(_, c)| c).sum();
                let var_log = ((v - sc * sc) / n as f64).max(0.0);
                value * var_log.sqrt()
            }
        };
        Ok(G2Estimate { value, std_error })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Exact click distribution from the truncated pair-number distribution.
///
/// Given `n` pairs, the herald misses all of them with `(1−η_h)^n`; each
/// signal photon independently reaches detector 1 or 2 with `t/2` each and
/// is lost otherwise. Herald and signal outcomes are independent given `n`,
/// so each outcome is `Σ_n P(n)·P(herald outcome|n)·P(signal outcome|n)`.
/// The conditional probabilities are written with `expm1`/`ln_1p` so that
/// weak sources keep full relative precision.
pub fn fock_exact(source: &SourceModel, channel: &ChannelModel) -> Result<ClickDistribution> {
    channel.validate()?;
    let pn = source.pair_distribution();
    let eh = channel.herald_transmission;
    let t = channel.signal_transmission();
    let (lh, la, lb) = ((-eh).ln_1p(), (-0.5 * t).ln_1p(), (-t).ln_1p());
    let mut outcomes = [0.0; 8];
    for (n, &p) in pn.iter().enumerate() {
        // z^n − 1 from ln z; n = 0 is special-cased since ln z may be −∞.
        let pm1 = |ln: f64| if n == 0 { 0.0 } else { (n as f64 * ln).exp_m1() };
        let h_click = -pm1(lh);
        let h_none = 1.0 + pm1(lh);
        let a = pm1(la);
        let b = pm1(lb);
        let none = 1.0 + b;
        // a^n − b^n and 1 − 2a^n + b^n.
        let single = a - b;
        let both = if n < 2 { 0.0 } else { (b - 2.0 * a).max(0.0) };
        let signal = [none, single, single, both];
        for (s, ps) in signal.iter().enumerate() {
            outcomes[s] += p * h_none * ps;
            outcomes[4 | s] += p * h_click * ps;
        }
    }
    Ok(ClickDistribution { outcomes, trials: None })
}

/// Samples the click chain. Trials are split into fixed chunks of
/// [`MC_CHUNK`] with a ChaCha stream per chunk, so the result does not depend
/// on the number of worker threads.
pub fn monte_carlo(source: &SourceModel, channel: &ChannelModel, seed: u64, trials: u64) -> Result<ClickDistribution> {
    channel.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    let m = source.mean_photon_pairs / source.schmidt_modes as f64;
    let geom = if m > 0.0 {
        Some(Geometric::new(1.0 / (1.0 + m)).map_err(|e| Error::NumericalFailure(e.to_string()))?)
    } else {
        None
    };
    let eh = channel.herald_transmission;
    let t = channel.signal_transmission();
    let chunks = trials.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n_trials = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            let mut counts = [0u64; 8];
            for _ in 0..n_trials {
                let n: u64 = match &geom {
                    Some(g) => (0..source.schmidt_modes).map(|_| g.sample(&mut rng)).sum(),
                    None => 0,
                };
                let (mut h, mut a, mut b) = (false, false, false);
                if n > 0 {
                    h = Binomial::new(n, eh).expect("valid").sample(&mut rng) > 0;
                    let arrived = Binomial::new(n, t).expect("valid").sample(&mut rng);
                    if arrived > 0 {
                        let to_a = Binomial::new(arrived, 0.5).expect("valid").sample(&mut rng);
                        a = to_a > 0;
                        b = to_a < arrived;
                    }
                }
                counts[(h as usize) << 2 | (a as usize) << 1 | b as usize] += 1;
            }
            counts
        })
        .reduce(
            || [0u64; 8],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    let mut outcomes = [0.0; 8];
    for (o, c) in outcomes.iter_mut().zip(counts) {
        *o = c as f64 / trials as f64;
    }
    Ok(ClickDistribution {
        outcomes,
        trials: Some(trials),
    })
}

pub fn click_distribution(source: &SourceModel, channel: &ChannelModel, method: Method) -> Result<ClickDistribution> {
    match method {
        Method::FockExact => fock_exact(source, channel),
        Method::MonteCarlo { seed, trials } => monte_carlo(source, channel, seed, trials),
    }
}

/// Herald-conditioned click record, the input format of the efficiency module.
pub fn click_probabilities(source: &SourceModel, channel: &ChannelModel, method: Method) -> Result<CountStatistics> {
    Ok(click_distribution(source, channel, method)?.to_counts())
}

pub fn heralded_g2(source: &SourceModel, channel: &ChannelModel, method: Method) -> Result<G2Estimate> {
    g2(source, channel, method, Conditioning::Heralded)
}

pub fn g2(source: &SourceModel, channel: &ChannelModel, method: Method, conditioning: Conditioning) -> Result<G2Estimate> {
    let dist = click_distribution(source, channel, method)?;
    if let Some(n) = dist.trials {
        let conditioned = match conditioning {
            Conditioning::Heralded => dist.prob(|h, _, _| h),
            Conditioning::Unheralded => 1.0,
        };
        let heralds = (conditioned * n as f64).round() as u64;
        if heralds < MIN_HERALDS {
            return Err(Error::MonteCarloUnderflow {
                heralds,
                required: MIN_HERALDS,
            });
        }
    }
    dist.g2(conditioning)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub conversion_efficiencies: Vec<f64>,
    pub g2: Vec<G2Estimate>,
}

impl InvarianceReport {
    pub fn max_spread(&self) -> f64 {
        let (lo, hi) = self
            .g2
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| (lo.min(g.value), hi.max(g.value)));
        hi - lo
    }
}

/// Heralded `g²` with the conversion efficiency replaced by each list entry.
pub fn g2_conversion_invariance(
    source: &SourceModel,
    channel: &ChannelModel,
    conversion_efficiencies: &[f64],
    method: Method,
) -> Result<InvarianceReport> {
    let g2 = conversion_efficiencies
        .iter()
        .map(|&eta| {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::invalid("conversion_efficiency", format!("{eta} is not in (0, 1]")));
            }
            heralded_g2(source, &channel.with_conversion_efficiency(eta)?, method)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvarianceReport {
        conversion_efficiencies: conversion_efficiencies.to_vec(),
        g2,
    })
}

/// Mean pair number at which the exact heralded `g²` equals `target`,
/// by bisection on the monotone `g²(μ)`.
pub fn fit_mean_pairs_for_g2(target: f64, schmidt_modes: usize, channel: &ChannelModel) -> Result<SourceModel> {
    let g = |mu: f64| -> Result<f64> {
        Ok(heralded_g2(&SourceModel::auto(mu, schmidt_modes)?, channel, Method::FockExact)?.value)
    };
    let (mut lo, mut hi) = (1e-9, 1.0);
    while g(hi)? < target {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::NoRoot(format!("heralded g2 stays below {target} up to mean pair number {hi}")));
        }
    }
    if g(lo)? > target {
        return Err(Error::NoRoot(format!("heralded g2 exceeds {target} already at vanishing pair number")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    SourceModel::auto(0.5 * (lo + hi), schmidt_modes)
}

#[cfg(test)]
mod tests;
