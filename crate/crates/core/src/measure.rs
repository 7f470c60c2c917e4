//! The probability measure on cones of a game with uncertainty.
//!
//! Two semantics are computed exactly:
//!
//! * [`Semantics::Literal`], the inductive definition: each step multiplies the
//!   cone mass by the `ObsSeq`-weighted average of Player 1's (and, if
//!   all-powerful, Player 2's) move probability. This is what [`cone_prob`]
//!   returns.
//! * [`Semantics::Joint`], the law of the true play when observations are
//!   drawn from `un` at every step and carried along, i.e. what a sampler
//!   produces. [`path_cone_prob`] returns it.
//!
//! The two coincide at one step, for any `un` that is the identity, and
//! whenever Player 1's choice and Player 2's reading of the observed history
//! do not depend on observations before the current one. With longer
//! observation memory they differ, because the literal rule re-weights every
//! step by the unconditioned `ObsSeq` rather than by the posterior on the
//! observed history.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::game::{Loc, PrefixG, UncertaintyGame};
use crate::rational::Rational;
use crate::strategy::{StrategyG1, StrategyG2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Literal,
    Joint,
}

/// `ObsSeq(ρ)(ρ')`: zero unless the two prefixes have equal length and letters.
pub fn obs_seq(g: &UncertaintyGame, rho: &PrefixG, rho_p: &PrefixG) -> Rational {
    if rho.len() != rho_p.len() || !rho.action_matches(rho_p) {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for (l, lp) in rho.locs().iter().zip(rho_p.locs()) {
        let w = match g.un.get(l).and_then(|d| d.prob_ref(lp)) {
            Some(w) => w,
            None => return Rational::zero(),
        };
        acc *= w;
    }
    acc
}

/// Lazy enumeration of `ActMt(ρ)`: every location slot ranges over `L`.
pub fn act_mt<'a>(g: &'a UncertaintyGame, rho: &'a PrefixG) -> ActMt<'a> {
    ActMt {
        rho,
        n_locs: g.n_locs() as u32,
        digits: alloc::vec![0; rho.len()],
        done: g.n_locs() == 0,
    }
}

pub struct ActMt<'a> {
    rho: &'a PrefixG,
    n_locs: u32,
    digits: Vec<u32>,
    done: bool,
}

impl Iterator for ActMt<'_> {
    type Item = PrefixG;

    fn next(&mut self) -> Option<PrefixG> {
        if self.done {
            return None;
        }
        let locs = self.digits.iter().map(|&d| Loc(d)).collect();
        let out = self.rho.with_locs(locs).expect("same length");
        // odometer, last slot fastest
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.n_locs {
                break;
            }
            self.digits[k] = 0;
        }
        Some(out)
    }
}

/// The members of `ActMt(ρ)` with positive `ObsSeq`, paired with that weight.
/// Only the `un`-supports are walked, so this is `∏ |supp un(ℓ_j)|` terms.
pub fn obs_support(g: &UncertaintyGame, rho: &PrefixG) -> Result<Vec<(PrefixG, Rational)>> {
    let mut partial: Vec<(Vec<Loc>, Rational)> = alloc::vec![(Vec::new(), Rational::one())];
    for &l in rho.locs() {
        let row = g.uncertainty(l)?;
        let mut next = Vec::with_capacity(partial.len() * row.len());
        for (locs, w) in &partial {
            for (lp, p) in row.iter() {
                let mut v = locs.clone();
                v.push(*lp);
                next.push((v, w * p));
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(locs, w)| Ok((rho.with_locs(locs)?, w)))
        .collect()
}

/// Cone probabilities for one strategy profile, memoized by prefix.
pub struct ConeMeasure<'a> {
    g: &'a UncertaintyGame,
    alpha: &'a StrategyG1,
    beta: &'a StrategyG2,
    literal: RefCell<BTreeMap<PrefixG, Rational>>,
    joint: RefCell<BTreeMap<PrefixG, BTreeMap<PrefixG, Rational>>>,
}

impl<'a> ConeMeasure<'a> {
    pub fn new(g: &'a UncertaintyGame, alpha: &'a StrategyG1, beta: &'a StrategyG2) -> Self {
        ConeMeasure {
            g,
            alpha,
            beta,
            literal: RefCell::default(),
            joint: RefCell::default(),
        }
    }

    pub fn game(&self) -> &UncertaintyGame {
        self.g
    }

    pub fn cone(&self, rho: &PrefixG, sem: Semantics) -> Result<Rational> {
        match sem {
            Semantics::Literal => self.literal_cone(rho),
            Semantics::Joint => self.joint_cone(rho),
        }
    }

    /// Literal inductive cone mass.
    pub fn literal_cone(&self, rho: &PrefixG) -> Result<Rational> {
        if rho.first() != self.g.initial {
            return Err(Error::WrongStart);
        }
        if let Some(v) = self.literal.borrow().get(rho) {
            return Ok(v.clone());
        }
        let v = self.literal_uncached(rho)?;
        self.literal.borrow_mut().insert(rho.clone(), v.clone());
        Ok(v)
    }

    fn literal_uncached(&self, rho: &PrefixG) -> Result<Rational> {
        let parent = match rho.parent() {
            None => return Ok(Rational::one()),
            Some(p) => p,
        };
        let (i, o) = *rho.letters().last().unwrap();
        let step = self
            .g
            .transition_dist(parent.last(), i, o)?
            .prob(&rho.last());
        if step.is_zero() {
            return Ok(step);
        }
        let base = self.literal_cone(&parent)?;
        if base.is_zero() {
            return Ok(base);
        }
        let mut sum = Rational::zero();
        match self.beta {
            StrategyG2::Ordinary { .. } => {
                for (obs, w) in obs_support(self.g, &parent)? {
                    let a = self.alpha.get(&obs)?.prob(&i);
                    if !a.is_zero() {
                        sum += w * a;
                    }
                }
                if !sum.is_zero() {
                    sum = sum * self.beta.choose(&parent, &parent, i)?.prob(&o);
                }
            }
            StrategyG2::AllPowerful { .. } => {
                for (obs, w) in obs_support(self.g, &parent)? {
                    let a = self.alpha.get(&obs)?.prob(&i);
                    if a.is_zero() {
                        continue;
                    }
                    let b = self.beta.choose(&parent, &obs, i)?.prob(&o);
                    sum += w * a * b;
                }
            }
        }
        Ok(base * sum * step)
    }

    /// Joint law of (true prefix, observed prefix): the mass of every observed
    /// prefix `ρ'` jointly with the true prefix `ρ`. Zero entries are omitted.
    pub fn joint_layer(&self, rho: &PrefixG) -> Result<BTreeMap<PrefixG, Rational>> {
        if rho.first() != self.g.initial {
            return Err(Error::WrongStart);
        }
        if let Some(v) = self.joint.borrow().get(rho) {
            return Ok(v.clone());
        }
        let v = self.joint_uncached(rho)?;
        self.joint.borrow_mut().insert(rho.clone(), v.clone());
        Ok(v)
    }

    fn joint_uncached(&self, rho: &PrefixG) -> Result<BTreeMap<PrefixG, Rational>> {
        let mut out = BTreeMap::new();
        let parent = match rho.parent() {
            None => {
                for (l, w) in self.g.uncertainty(rho.first())?.iter() {
                    out.insert(PrefixG::start(*l), w.clone());
                }
                return Ok(out);
            }
            Some(p) => p,
        };
        let (i, o) = *rho.letters().last().unwrap();
        let last = rho.last();
        let step = self.g.transition_dist(parent.last(), i, o)?.prob(&last);
        if step.is_zero() {
            return Ok(out);
        }
        let un_row = self.g.uncertainty(last)?;
        for (obs, mass) in self.joint_layer(&parent)? {
            let a = self.alpha.get(&obs)?.prob(&i);
            if a.is_zero() {
                continue;
            }
            let b = self.beta.choose(&parent, &obs, i)?.prob(&o);
            if b.is_zero() {
                continue;
            }
            let m = mass * a * b * &step;
            for (lp, w) in un_row.iter() {
                out.insert(obs.extended(i, o, *lp), &m * w);
            }
        }
        Ok(out)
    }

    /// Joint (sampling) cone mass: the marginal of [`ConeMeasure::joint_layer`].
    pub fn joint_cone(&self, rho: &PrefixG) -> Result<Rational> {
        Ok(self.joint_layer(rho)?.values().sum())
    }

    /// Every prefix with `steps + 1` locations and positive mass, with its mass.
    /// Zero-mass branches are pruned, so strategies are only consulted where
    /// the measure reads them.
    pub fn support_at(&self, steps: usize, sem: Semantics) -> Result<Vec<(PrefixG, Rational)>> {
        let start = PrefixG::start(self.g.initial);
        let mut layer = alloc::vec![(start.clone(), self.cone(&start, sem)?)];
        for _ in 0..steps {
            let mut next = Vec::new();
            for (p, _) in &layer {
                for i in self.g.input_letters() {
                    for o in self.g.output_letters() {
                        for l in self.g.locs() {
                            let c = p.extended(i, o, l);
                            let m = self.cone(&c, sem)?;
                            if !m.is_zero() {
                                next.push((c, m));
                            }
                        }
                    }
                }
            }
            layer = next;
        }
        Ok(layer)
    }

    /// Mass of the prefixes with `steps + 1` locations that satisfy `pred`.
    pub fn event_prob(
        &self,
        steps: usize,
        sem: Semantics,
        pred: impl Fn(&PrefixG) -> bool,
    ) -> Result<Rational> {
        Ok(self
            .support_at(steps, sem)?
            .into_iter()
            .filter(|(p, _)| pred(p))
            .map(|(_, m)| m)
            .sum())
    }
}

/// Literal cone probability of `ρ`.
pub fn cone_prob(
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    rho: &PrefixG,
) -> Result<Rational> {
    ConeMeasure::new(g, alpha, beta).literal_cone(rho)
}

/// Joint (sampling) cone probability of `ρ`.
pub fn path_cone_prob(
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    rho: &PrefixG,
) -> Result<Rational> {
    ConeMeasure::new(g, alpha, beta).joint_cone(rho)
}

/// Literal mass of the depth-`steps` prefixes satisfying `pred`.
pub fn event_prob_at_depth(
    g: &UncertaintyGame,
    alpha: &StrategyG1,
    beta: &StrategyG2,
    pred: impl Fn(&PrefixG) -> bool,
    steps: usize,
) -> Result<Rational> {
    ConeMeasure::new(g, alpha, beta).event_prob(steps, Semantics::Literal, pred)
}
