//! Sampling plays and Monte-Carlo cone estimates.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution as _;
use rand::Rng;
use serde::Serialize;
use ugame_core::{
    Distribution, Error, PrefixG, Rational, Result, StrategyG1, StrategyG2, UncertaintyGame,
};

use crate::random::rng;

/// One sampled play: the true and the observed prefix, the same length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub truth: PrefixG,
    pub observed: PrefixG,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub seed: u64,
    pub true_prefix: Vec<String>,
    pub observed_prefix: Vec<String>,
    /// `[input, output]` per round.
    pub actions: Vec<[String; 2]>,
}

impl Trace {
    pub fn record(&self, g: &UncertaintyGame, seed: u64) -> TraceRecord {
        TraceRecord {
            seed,
            true_prefix: g.prefix_names(&self.truth),
            observed_prefix: g.prefix_names(&self.observed),
            actions: self
                .truth
                .letters()
                .iter()
                .map(|(i, o)| [g.inputs[i.idx()].clone(), g.outputs[o.idx()].clone()])
                .collect(),
        }
    }
}

fn draw<X: Ord + Copy, R: Rng>(rng: &mut R, d: &Distribution<X>) -> X {
    let (xs, ws): (Vec<X>, Vec<f64>) = d.iter().map(|(x, p)| (*x, p.to_f64())).unzip();
    xs[WeightedIndex::new(&ws)
        .expect("positive weights")
        .sample(rng)]
}

/// Plays `steps` rounds from the initial location. Player 1 reads the
/// observed prefix, Player 2 the true one (and the observed one if
/// all-powerful); each new location is observed through `un`.
pub fn sample_play<R: Rng>(
    rng: &mut R,
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    steps: usize,
) -> Result<Trace> {
    let mut truth = PrefixG::start(g.initial);
    let mut observed = PrefixG::start(draw(rng, g.uncertainty(g.initial)?));
    for _ in 0..steps {
        let i = draw(rng, alpha.get(&observed)?);
        let o = draw(rng, beta.choose(&truth, &observed, i)?);
        let l = draw(rng, g.transition_dist(truth.last(), i, o)?);
        let lp = draw(rng, g.uncertainty(l)?);
        truth.push(i, o, l);
        observed.push(i, o, lp);
    }
    Ok(Trace { truth, observed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub hits: u64,
    pub samples: u64,
    pub mean: f64,
    /// Standard error of the mean from the sample itself.
    pub stderr: f64,
}

impl Estimate {
    fn new(hits: u64, samples: u64) -> Self {
        let mean = hits as f64 / samples as f64;
        Estimate {
            hits,
            samples,
            mean,
            stderr: (mean * (1.0 - mean) / samples as f64).sqrt(),
        }
    }

    /// Whether `exact` lies within `k` standard deviations, using the standard
    /// deviation of the exact Bernoulli law (never zero unless `exact` is 0 or 1).
    pub fn within(&self, exact: &Rational, k: f64) -> bool {
        let p = exact.to_f64();
        let sigma = (p * (1.0 - p) / self.samples as f64).sqrt();
        (self.mean - p).abs() <= k * sigma + f64::EPSILON
    }
}

/// The fraction of `samples` plays whose first `steps` rounds satisfy `pred`.
pub fn monte_carlo(
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    steps: usize,
    samples: u64,
    seed: u64,
    pred: impl Fn(&PrefixG) -> bool,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut r = rng(seed);
    let mut hits = 0;
    for _ in 0..samples {
        if pred(&sample_play(&mut r, g, alpha, beta, steps)?.truth) {
            hits += 1;
        }
    }
    Ok(Estimate::new(hits, samples))
}

/// Monte-Carlo estimate of the cone of `rho` (true prefix).
pub fn monte_carlo_cone(
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    rho: &PrefixG,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    monte_carlo(g, alpha, beta, rho.steps(), samples, seed, |t| t == rho)
}
