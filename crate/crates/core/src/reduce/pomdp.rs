//! Reduction from a POMDP to a game with uncertainty: locations are states,
//! inputs are actions, Player 2 has the single letter `⊥`, and `un` is uniform
//! over the observation block of the true state.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::game::{Input, Loc, Output, PrefixG, UncertaintyGame};
use crate::measure::obs_support;
use crate::objective::Objective;
use crate::pog::{Action, ObsBasedStrategy, Pomdp, PrefixH, State};
use crate::rational::Rational;
use crate::strategy::{prefixes_up_to, StrategyG1, StrategyG2};

pub const BOTTOM: Output = Output(0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PomdpReduction {
    pub game: UncertaintyGame,
    pub pomdp: Pomdp,
    pub objective: Option<Objective>,
}

pub fn reduce_pomdp(m: &Pomdp, objective: Option<&Objective>) -> Result<PomdpReduction> {
    let report = m.validate();
    if !report.is_ok() {
        return Err(Error::Domain(format!("{report}")));
    }
    let mut g = UncertaintyGame {
        locations: m.states.clone(),
        inputs: m.actions.clone(),
        outputs: alloc::vec![String::from("_")],
        initial: Loc(m.initial.0),
        delta: BTreeMap::new(),
        un: BTreeMap::new(),
    };
    for ((s, a), d) in &m.delta {
        g.delta
            .insert((Loc(s.0), Input(a.0), BOTTOM), d.map(|t| Loc(t.0)));
    }
    for s in m.state_ids() {
        let block = m.obs.block(m.obs.block_of(s));
        g.un.insert(
            Loc(s.0),
            Distribution::uniform(block.iter().map(|t| Loc(t.0))),
        );
    }
    Ok(PomdpReduction {
        game: g,
        pomdp: m.clone(),
        objective: objective.cloned(),
    })
}

impl PomdpReduction {
    /// `h`: inserts `⊥` after every action.
    pub fn prefix_map(&self, rho: &PrefixH) -> PrefixG {
        let mut out = PrefixG::start(Loc(rho.first().0));
        for (k, a) in rho.actions().iter().enumerate() {
            out.push(Input(a.0), BOTTOM, Loc(rho.states()[k + 1].0));
        }
        out
    }

    /// `h⁻¹`: strips `⊥`; any other output letter is an error.
    pub fn prefix_unmap(&self, rho: &PrefixG) -> Result<PrefixH> {
        let mut out = PrefixH::start(State(rho.first().0));
        for (k, &(i, o)) in rho.letters().iter().enumerate() {
            if o != BOTTOM {
                return Err(Error::MalformedPrefix(format!(
                    "output letter {} is not the unique letter",
                    o.0
                )));
            }
            out.push(Action(i.0), State(rho.locs()[k + 1].0));
        }
        Ok(out)
    }

    /// Player 2's only strategy in the reduced game.
    pub fn bottom_strategy(&self, depth: usize) -> StrategyG2 {
        StrategyG2::ordinary_from_fn(&self.game, depth, |_, _| Distribution::dirac(BOTTOM))
    }

    /// `α_G(ρ_G) = α_H(h⁻¹(ρ_G))`. Rows whose observation sequence the POMDP
    /// strategy does not cover are left out.
    pub fn strategy_pomdp_to_g(
        &self,
        alpha: &ObsBasedStrategy,
        depth: usize,
    ) -> Result<StrategyG1> {
        let mut table = BTreeMap::new();
        for p in prefixes_up_to(&self.game, depth, None) {
            let key = self.pomdp.observation_seq(&self.prefix_unmap(&p)?);
            match alpha.get_obs(&key) {
                Ok(d) => {
                    table.insert(p, d.map(|a| Input(a.0)));
                }
                Err(Error::StrategyUndefined(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(StrategyG1 { depth, table })
    }

    /// `α_H(ρ_H)(a) = Σ ObsSeq(h(ρ_H))(ρ') · α_G(ρ')(a)` over the
    /// `ObsSeq`-support, for every history of at most `depth` states from the
    /// initial state. The result is collapsed onto observation sequences, which
    /// fails if two histories with equal observations got different rows.
    pub fn strategy_g_to_pomdp(
        &self,
        alpha: &StrategyG1,
        depth: usize,
    ) -> Result<ObsBasedStrategy> {
        let rows = self.mixture_rows(alpha, depth)?;
        self.pomdp.obs_based(depth, rows)
    }

    /// The rows of [`PomdpReduction::strategy_g_to_pomdp`] before collapsing.
    pub fn mixture_rows(
        &self,
        alpha: &StrategyG1,
        depth: usize,
    ) -> Result<Vec<(PrefixH, Distribution<Action>)>> {
        let mut rows = Vec::new();
        for rho in self.pomdp.all_histories(depth) {
            let g_rho = self.prefix_map(&rho);
            let mut parts: Vec<(Rational, Distribution<Action>)> = Vec::new();
            for (obs, w) in obs_support(&self.game, &g_rho)? {
                parts.push((w, alpha.get(&obs)?.map(|i| Action(i.0))));
            }
            let d = Distribution::mixture(parts.iter().map(|(w, d)| (w.clone(), d)));
            rows.push((rho, d));
        }
        Ok(rows)
    }
}
