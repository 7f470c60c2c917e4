//! Exact checkers for the correspondence between a game with uncertainty, its
//! reduced partial-observation game, and the POMDP reduction.
//!
//! Every check enumerates all relevant prefixes up to a depth and compares
//! rationals for equality. A check reports the first counterexample it meets.
//!
//! Depth is counted in steps: depth `n` covers prefixes with at most `n + 1`
//! locations, which needs strategies defined on prefixes of up to `n`
//! locations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::game::{PrefixG, UncertaintyGame};
use crate::measure::{act_mt, obs_seq, ConeMeasure};
use crate::objective::Objective;
use crate::pog::{
    collapse, cone_prob_pog, fmt_prefix_h, Conflict, ObsBasedStrategy, PartialObsGame, Player,
    Policy, Pomdp,
};
use crate::rational::Rational;
use crate::reduce::forward::{reduce_game_with, Mutation, ReducedGame};
use crate::reduce::pomdp::{reduce_pomdp, PomdpReduction};
use crate::strategy::{StrategyG1, StrategyG2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaKind {
    ObsSeqConditional,
    ConeForwardG2H,
    ConeForwardH2G,
    PomdpObsSeqFormula,
    ConePomdpH2G,
    ConePomdpG2H,
    ObsBasedMapping,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 7] = [
        LemmaKind::ObsSeqConditional,
        LemmaKind::ConeForwardG2H,
        LemmaKind::ConeForwardH2G,
        LemmaKind::PomdpObsSeqFormula,
        LemmaKind::ConePomdpH2G,
        LemmaKind::ConePomdpG2H,
        LemmaKind::ObsBasedMapping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::ObsSeqConditional => "ObsSeqConditional",
            LemmaKind::ConeForwardG2H => "ConeForwardG2H",
            LemmaKind::ConeForwardH2G => "ConeForwardH2G",
            LemmaKind::PomdpObsSeqFormula => "PomdpObsSeqFormula",
            LemmaKind::ConePomdpH2G => "ConePomdpH2G",
            LemmaKind::ConePomdpG2H => "ConePomdpG2H",
            LemmaKind::ObsBasedMapping => "ObsBasedMapping",
        }
    }

    /// Case-insensitive; dashes and underscores are ignored.
    pub fn parse(s: &str) -> Option<Self> {
        let norm = |t: &str| -> String {
            t.chars()
                .filter(|c| *c != '-' && *c != '_')
                .flat_map(char::to_lowercase)
                .collect()
        };
        let want = norm(s);
        Self::ALL.into_iter().find(|k| norm(k.name()) == want)
    }

    /// Whether the lemma is about a POMDP rather than a game with uncertainty.
    pub fn on_pomdp(self) -> bool {
        matches!(
            self,
            LemmaKind::PomdpObsSeqFormula
                | LemmaKind::ConePomdpH2G
                | LemmaKind::ConePomdpG2H
                | LemmaKind::ObsBasedMapping
        )
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Size limits for exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_locs: usize,
    pub max_depth: usize,
    pub max_enum: u128,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_locs: 4,
            max_depth: 3,
            max_enum: enumeration_estimate(4, 2, 2, 3),
        }
    }
}

impl Bounds {
    /// Only the enumeration estimate is limited.
    pub fn enum_only(max_enum: u128) -> Self {
        Bounds {
            max_locs: usize::MAX,
            max_depth: usize::MAX,
            max_enum,
        }
    }

    pub fn check(&self, locs: usize, inputs: usize, outputs: usize, depth: usize) -> Result<()> {
        let estimate = enumeration_estimate(locs, inputs, outputs, depth);
        if locs > self.max_locs || depth > self.max_depth || estimate > self.max_enum {
            let limit = self.max_enum.min(enumeration_estimate(
                self.max_locs.min(locs),
                inputs,
                outputs,
                self.max_depth.min(depth),
            ));
            return Err(Error::BoundsExceeded { estimate, limit });
        }
        Ok(())
    }
}

/// Number of (prefix, action-matching prefix) pairs with at most `depth` steps:
/// `Σₙ L·(L·I·O)ⁿ·Lⁿ⁺¹`.
pub fn enumeration_estimate(locs: usize, inputs: usize, outputs: usize, depth: usize) -> u128 {
    let (l, step) = (locs as u128, (locs * inputs * outputs) as u128);
    (0..=depth as u32)
        .map(|n| {
            l.saturating_mul(step.saturating_pow(n))
                .saturating_mul(l.saturating_pow(n + 1))
        })
        .fold(0u128, u128::saturating_add)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub description: String,
    pub lhs: Rational,
    pub rhs: Rational,
    /// Steps of the witnessing prefix (nodes of the walk for the priority lift).
    pub at_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: LemmaKind,
    pub instance: String,
    pub depth: usize,
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
    /// Extra findings that do not decide the verdict.
    pub diagnostic: Option<String>,
}

impl LemmaReport {
    pub fn verified(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {} (depth {}, {} checked): ",
            self.lemma, self.instance, self.depth, self.checked
        )?;
        match &self.counterexample {
            None => write!(f, "verified"),
            Some(c) => write!(
                f,
                "counterexample: {} ({} vs {})",
                c.description, c.lhs, c.rhs
            ),
        }
    }
}

/// A game with a strategy profile; `h_strategies` feeds the H-to-G direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    pub name: String,
    pub game: UncertaintyGame,
    pub alpha: StrategyG1,
    pub beta: StrategyG2,
    pub h_strategies: Option<(ObsBasedStrategy, ObsBasedStrategy)>,
    pub priorities: Option<Vec<u32>>,
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PomdpInstance {
    pub name: String,
    pub pomdp: Pomdp,
    pub alpha_h: ObsBasedStrategy,
    pub alpha_g: StrategyG1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Game(GameInstance),
    Pomdp(PomdpInstance),
}

impl Instance {
    pub fn name(&self) -> &str {
        match self {
            Instance::Game(g) => &g.name,
            Instance::Pomdp(p) => &p.name,
        }
    }
}

pub fn check_lemma(
    kind: LemmaKind,
    inst: &Instance,
    depth: usize,
    bounds: &Bounds,
) -> Result<LemmaReport> {
    let mut report = LemmaReport {
        lemma: kind,
        instance: inst.name().to_string(),
        depth,
        checked: 0,
        counterexample: None,
        diagnostic: None,
    };
    match (inst, kind.on_pomdp()) {
        (Instance::Game(gi), false) => {
            let g = &gi.game;
            bounds.check(g.n_locs(), g.n_inputs(), g.n_outputs(), depth)?;
            GameCheck::new(gi, depth)?.run(kind, &mut report)?;
        }
        (Instance::Pomdp(pi), true) => {
            let m = &pi.pomdp;
            bounds.check(m.n_states(), m.n_actions(), 1, depth)?;
            PomdpCheck::new(pi, depth)?.run(kind, &mut report)?;
        }
        _ => {
            return Err(Error::Domain(format!(
                "{kind} needs a {} instance",
                if kind.on_pomdp() { "POMDP" } else { "game" }
            )))
        }
    }
    Ok(report)
}

/// Records a comparison; returns `true` on a mismatch. Only the first
/// mismatch is kept.
fn compare(
    report: &mut LemmaReport,
    lhs: Rational,
    rhs: Rational,
    at_depth: usize,
    what: impl FnOnce() -> String,
) -> bool {
    report.checked += 1;
    if lhs != rhs {
        if report.counterexample.is_none() {
            report.counterexample = Some(Counterexample {
                description: what(),
                lhs,
                rhs,
                at_depth,
            });
        }
        return true;
    }
    false
}

fn conflict_counterexample(h: &PartialObsGame, who: &str, c: &Conflict) -> Counterexample {
    let (a, lhs, rhs) = c.witness();
    let owner = h.owner_of(c.first.last());
    let name = h
        .actions_of(owner)
        .get(a.idx())
        .cloned()
        .unwrap_or_else(|| format!("#{}", a.0));
    Counterexample {
        description: format!(
            "{who} strategy is not observation-based: `{}` and `{}` look alike but give `{name}` different probabilities",
            fmt_prefix_h(h, &c.first),
            fmt_prefix_h(h, &c.second)
        ),
        lhs,
        rhs,
        at_depth: (c.first.len().max(c.second.len()) - 1) / 2,
    }
}

/// Prefixes from the initial location with at most `depth` steps, along
/// transitions of positive probability.
fn true_prefixes(g: &UncertaintyGame, depth: usize) -> Result<Vec<PrefixG>> {
    let mut layer = alloc::vec![PrefixG::start(g.initial)];
    let mut out = layer.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &layer {
            for i in g.input_letters() {
                for o in g.output_letters() {
                    for (l, _) in g.transition_dist(p.last(), i, o)?.iter() {
                        next.push(p.extended(i, o, *l));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

struct GameCheck<'a> {
    inst: &'a GameInstance,
    rg: ReducedGame,
    depth: usize,
}

impl<'a> GameCheck<'a> {
    fn new(inst: &'a GameInstance, depth: usize) -> Result<Self> {
        if inst.alpha.depth < depth || inst.beta.depth() < depth {
            return Err(Error::Domain(format!(
                "strategies of depth {} cannot be checked to depth {depth}",
                inst.alpha.depth.min(inst.beta.depth())
            )));
        }
        let obj = inst.priorities.clone().map(Objective::Parity);
        let rg = reduce_game_with(&inst.game, obj.as_ref(), inst.beta.variant(), inst.mutation)?;
        Ok(GameCheck { inst, rg, depth })
    }

    fn g(&self) -> &UncertaintyGame {
        &self.inst.game
    }

    fn run(&self, kind: LemmaKind, report: &mut LemmaReport) -> Result<()> {
        match kind {
            LemmaKind::ObsSeqConditional => self.conditional(report),
            LemmaKind::ConeForwardG2H => self.forward_g2h(report),
            LemmaKind::ConeForwardH2G => self.forward_h2g(report),
            _ => unreachable!("POMDP lemma routed to a game"),
        }
    }

    /// `ĝ(α, β)`, or the counterexample showing it is not observation-based.
    fn g_hat(
        &self,
    ) -> Result<core::result::Result<(ObsBasedStrategy, ObsBasedStrategy), Counterexample>> {
        let h = &self.rg.pog;
        let (a_rows, b_rows) = self.rg.g_hat_rows(&self.inst.alpha, &self.inst.beta)?;
        let max_len = 2 * self.inst.alpha.depth;
        let mut out = Vec::new();
        for (player, who, rows) in [
            (Player::One, "mapped Player-1", a_rows),
            (Player::Two, "mapped Player-2", b_rows),
        ] {
            match collapse(|r| h.observation_seq(player, r), rows) {
                Ok(table) => out.push(ObsBasedStrategy {
                    player,
                    max_len,
                    table,
                }),
                Err(c) => return Ok(Err(conflict_counterexample(h, who, &c))),
            }
        }
        let b = out.pop().unwrap();
        let a = out.pop().unwrap();
        Ok(Ok((a, b)))
    }

    fn h_mass(
        &self,
        a: &dyn Policy,
        b: &dyn Policy,
        r1: &PrefixG,
        r2: &PrefixG,
    ) -> Result<Rational> {
        cone_prob_pog(&self.rg.pog, a, b, &self.rg.pair_prefix(r1, r2)?)
    }

    /// `Pr(𝓔₁,₂)/Pr(𝓔₁)` in H against `ObsSeq` in G.
    fn conditional(&self, report: &mut LemmaReport) -> Result<()> {
        let (a, b) = match self.g_hat()? {
            Ok(s) => s,
            Err(c) => {
                report.counterexample = Some(c);
                return Ok(());
            }
        };
        let g = self.g();
        let cm = ConeMeasure::new(g, &self.inst.alpha, &self.inst.beta);
        let mut joint_miss: Option<String> = None;
        let mut pairs = 0u64;
        for r1 in true_prefixes(g, self.depth)? {
            let masses: Vec<(PrefixG, Rational)> = act_mt(g, &r1)
                .map(|r2| Ok((r2.clone(), self.h_mass(&a, &b, &r1, &r2)?)))
                .collect::<Result<_>>()?;
            let total: Rational = masses.iter().map(|(_, m)| m).sum();
            if total.is_zero() {
                continue;
            }
            let joint = cm.joint_layer(&r1)?;
            let joint_total: Rational = joint.values().sum();
            for (r2, m) in masses {
                let ratio = &m / &total;
                if joint_miss.is_none() && !joint_total.is_zero() {
                    let post = joint
                        .get(&r2)
                        .map(|w| w / &joint_total)
                        .unwrap_or_else(Rational::zero);
                    if post != ratio {
                        joint_miss = Some(format!(
                            "{} | {}: {ratio} vs posterior {post}",
                            g.format_prefix(&r2),
                            g.format_prefix(&r1)
                        ));
                    }
                }
                pairs += 1;
                compare(report, ratio, obs_seq(g, &r1, &r2), r1.steps(), || {
                    format!(
                        "true `{}`, observed `{}`: Pr(E12)/Pr(E1) vs ObsSeq",
                        g.format_prefix(&r1),
                        g.format_prefix(&r2)
                    )
                });
            }
        }
        report.diagnostic = Some(match joint_miss {
            None => format!("joint semantics: H ratios equal the posterior of the observed prefix on all {pairs} pairs"),
            Some(m) => format!("joint semantics: H ratio differs from the posterior at {m}"),
        });
        Ok(())
    }

    /// Cone mass of `ρ¹` in G against the mass of `h₁(ρ¹)` in H.
    fn cone_sweep(
        &self,
        a_g: &StrategyG1,
        b_g: &StrategyG2,
        a_h: &dyn Policy,
        b_h: &dyn Policy,
        report: &mut LemmaReport,
    ) -> Result<()> {
        let g = self.g();
        let cm = ConeMeasure::new(g, a_g, b_g);
        let mut joint_miss: Option<String> = None;
        let mut n = 0u64;
        for r1 in true_prefixes(g, self.depth)? {
            let mut h_total = Rational::zero();
            for r2 in act_mt(g, &r1) {
                h_total += self.h_mass(a_h, b_h, &r1, &r2)?;
            }
            n += 1;
            if joint_miss.is_none() {
                let j = cm.joint_cone(&r1)?;
                if j != h_total {
                    joint_miss = Some(format!("`{}`: {j} vs {h_total}", g.format_prefix(&r1)));
                }
            }
            compare(report, cm.literal_cone(&r1)?, h_total, r1.steps(), || {
                format!("cone of `{}`: Pr_G vs Pr_H(h1)", g.format_prefix(&r1))
            });
        }
        report.diagnostic = Some(match joint_miss {
            None => format!("joint semantics: equal on all {n} cones"),
            Some(m) => format!("joint semantics: differs at {m}"),
        });
        Ok(())
    }

    fn forward_g2h(&self, report: &mut LemmaReport) -> Result<()> {
        if let Some(p) = &self.inst.priorities {
            report.checked += 1;
            if let Some((walk, ph, pg)) = self.rg.priority_lift_violation(p, 2) {
                let names: Vec<&str> = walk
                    .iter()
                    .map(|s| self.rg.pog.states[s.idx()].as_str())
                    .collect();
                report.counterexample = Some(Counterexample {
                    description: format!("priority lift: cycle through {} has min priority {ph} in H, {pg} on its first component", names.join(" -> ")),
                    lhs: Rational::from(ph as i64),
                    rhs: Rational::from(pg as i64),
                    at_depth: walk.len(),
                });
                return Ok(());
            }
        }
        match self.g_hat()? {
            Ok((a, b)) => self.cone_sweep(&self.inst.alpha, &self.inst.beta, &a, &b, report),
            Err(c) => {
                report.counterexample = Some(c);
                Ok(())
            }
        }
    }

    fn forward_h2g(&self, report: &mut LemmaReport) -> Result<()> {
        let (a, b) = match &self.inst.h_strategies {
            Some(s) => s.clone(),
            None => match self.g_hat()? {
                Ok(s) => s,
                Err(c) => {
                    report.counterexample = Some(c);
                    return Ok(());
                }
            },
        };
        if let Some(c) = self.rg.h_hat_conflict(&a, &b, self.depth)? {
            let who = match self.rg.pog.owner_of(c.first.last()) {
                Player::One => "Player-1",
                Player::Two => "Player-2",
            };
            report.checked += 1;
            report.counterexample = Some(conflict_counterexample(&self.rg.pog, who, &c));
            return Ok(());
        }
        let (a_g, b_g) = self.rg.map_h_to_g(&a, &b, self.depth)?;
        self.cone_sweep(&a_g, &b_g, &a, &b, report)
    }
}

struct PomdpCheck<'a> {
    inst: &'a PomdpInstance,
    red: PomdpReduction,
    depth: usize,
}

impl<'a> PomdpCheck<'a> {
    fn new(inst: &'a PomdpInstance, depth: usize) -> Result<Self> {
        Ok(PomdpCheck {
            inst,
            red: reduce_pomdp(&inst.pomdp, None)?,
            depth,
        })
    }

    fn m(&self) -> &Pomdp {
        &self.inst.pomdp
    }

    fn run(&self, kind: LemmaKind, report: &mut LemmaReport) -> Result<()> {
        match kind {
            LemmaKind::PomdpObsSeqFormula => self.formula(report),
            LemmaKind::ConePomdpH2G => self.cone_h2g(report),
            LemmaKind::ConePomdpG2H => self.cone_g2h(report),
            LemmaKind::ObsBasedMapping => self.mapping(report),
            _ => unreachable!("game lemma routed to a POMDP"),
        }
    }

    /// `ObsSeq(ρ)(ρ') = ∏ 1/|oᵢ|` when `ρ'` stays in the observations of `ρ`, else 0.
    fn formula(&self, report: &mut LemmaReport) -> Result<()> {
        let g = &self.red.game;
        let part = &self.m().obs;
        for rho in crate::strategy::prefixes_up_to(g, self.depth + 1, None) {
            for rp in act_mt(g, &rho) {
                let mut expect = Rational::one();
                for (l, lp) in rho.locs().iter().zip(rp.locs()) {
                    let b = part.block_of(crate::pog::State(l.0));
                    if b != part.block_of(crate::pog::State(lp.0)) {
                        expect = Rational::zero();
                        break;
                    }
                    expect *= &Rational::new(1, part.block(b).len() as i64);
                }
                if compare(report, obs_seq(g, &rho, &rp), expect, rho.steps(), || {
                    format!(
                        "ObsSeq(`{}`)(`{}`) vs the uniform-block product",
                        g.format_prefix(&rho),
                        g.format_prefix(&rp)
                    )
                }) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    fn cone_sweep(
        &self,
        a_h: &ObsBasedStrategy,
        a_g: &StrategyG1,
        report: &mut LemmaReport,
    ) -> Result<()> {
        let beta = self.red.bottom_strategy(self.depth);
        let cm = ConeMeasure::new(&self.red.game, a_g, &beta);
        for rho in self.m().all_histories(self.depth + 1) {
            let g_rho = self.red.prefix_map(&rho);
            if compare(
                report,
                self.m().cone_prob(a_h, &rho)?,
                cm.literal_cone(&g_rho)?,
                g_rho.steps(),
                || {
                    format!(
                        "cone of `{}`: Pr_M vs Pr_G",
                        self.red.game.format_prefix(&g_rho)
                    )
                },
            ) {
                break;
            }
        }
        Ok(())
    }

    fn cone_h2g(&self, report: &mut LemmaReport) -> Result<()> {
        let a_g = self
            .red
            .strategy_pomdp_to_g(&self.inst.alpha_h, self.depth)?;
        self.cone_sweep(&self.inst.alpha_h, &a_g, report)
    }

    fn mapped(&self) -> Result<core::result::Result<ObsBasedStrategy, Counterexample>> {
        let rows = self.red.mixture_rows(&self.inst.alpha_g, self.depth)?;
        let m = self.m();
        Ok(match collapse(|r| m.observation_seq(r), rows) {
            Ok(table) => Ok(ObsBasedStrategy {
                player: Player::One,
                max_len: self.depth,
                table,
            }),
            Err(c) => Err(conflict_counterexample(&m.to_pog(), "mapped POMDP", &c)),
        })
    }

    fn cone_g2h(&self, report: &mut LemmaReport) -> Result<()> {
        match self.mapped()? {
            Ok(a_h) => self.cone_sweep(&a_h, &self.inst.alpha_g, report),
            Err(c) => {
                report.counterexample = Some(c);
                Ok(())
            }
        }
    }

    fn mapping(&self, report: &mut LemmaReport) -> Result<()> {
        let rows = self.red.mixture_rows(&self.inst.alpha_g, self.depth)?;
        report.checked = rows.len() as u64;
        let m = self.m();
        if let Err(c) = collapse(|r| m.observation_seq(r), rows) {
            report.counterexample = Some(conflict_counterexample(&m.to_pog(), "mapped POMDP", &c));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::game::{Input, Loc, Output};
    use crate::pog::{Action, Partition, State};
    use crate::strategy::Variant;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Two locations; input 1 tries to move to location 1, output 1 spoils it
    /// half the time. `un` keeps the location with probability `keep`.
    fn noisy(keep: Rational) -> UncertaintyGame {
        let mut g = UncertaintyGame::with_sizes(2, 2, 2);
        for l in 0..2u32 {
            for i in 0..2u32 {
                for o in 0..2u32 {
                    let d = match (i, o) {
                        (0, _) => Distribution::dirac(Loc(l)),
                        (_, 0) => Distribution::dirac(Loc(1)),
                        _ => Distribution::new([(Loc(0), r(1, 2)), (Loc(1), r(1, 2))]).unwrap(),
                    };
                    g.set_delta(Loc(l), Input(i), Output(o), d);
                }
            }
            let flip = Rational::one() - &keep;
            g.set_un(
                Loc(l),
                Distribution::from_weights([(Loc(l), keep.clone()), (Loc(1 - l), flip)]),
            );
        }
        g
    }

    fn blind_alpha(g: &UncertaintyGame, depth: usize) -> StrategyG1 {
        StrategyG1::constant(g, depth, Distribution::uniform([Input(0), Input(1)]))
    }

    /// Plays input 1 exactly when the last observed location is 0.
    fn reactive_alpha(g: &UncertaintyGame, depth: usize) -> StrategyG1 {
        StrategyG1::from_fn(g, depth, |p| {
            if p.last() == Loc(0) {
                Distribution::dirac(Input(1))
            } else {
                Distribution::dirac(Input(0))
            }
        })
    }

    fn beta(g: &UncertaintyGame, depth: usize, v: Variant) -> StrategyG2 {
        let half = Distribution::new([(Output(0), r(1, 3)), (Output(1), r(2, 3))]).unwrap();
        match v {
            Variant::Ordinary => StrategyG2::ordinary_from_fn(g, depth, |_, _| half.clone()),
            Variant::AllPowerful => {
                StrategyG2::all_powerful_from_fn(g, depth, |_, _, _| half.clone())
            }
        }
    }

    fn inst(
        g: UncertaintyGame,
        alpha: StrategyG1,
        v: Variant,
        mutation: Option<Mutation>,
    ) -> Instance {
        let b = beta(&g, alpha.depth, v);
        Instance::Game(GameInstance {
            name: "t".into(),
            game: g,
            alpha,
            beta: b,
            h_strategies: None,
            priorities: Some(vec![1, 0]),
            mutation,
        })
    }

    fn check(kind: LemmaKind, i: &Instance, depth: usize) -> LemmaReport {
        check_lemma(kind, i, depth, &Bounds::default()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for k in LemmaKind::ALL {
            assert_eq!(LemmaKind::parse(k.name()), Some(k));
        }
        assert_eq!(
            LemmaKind::parse("cone-forward-g2h"),
            Some(LemmaKind::ConeForwardG2H)
        );
        assert_eq!(LemmaKind::parse("nope"), None);
    }

    #[test]
    fn estimate_counts_pairs() {
        // depth 0: L starts times L observations
        assert_eq!(enumeration_estimate(3, 2, 2, 0), 9);
        assert_eq!(enumeration_estimate(2, 1, 1, 1), 4 + 2 * 2 * 4);
        let b = Bounds::default();
        assert!(b.check(4, 2, 2, 3).is_ok());
        assert!(matches!(
            b.check(5, 2, 2, 1),
            Err(Error::BoundsExceeded { .. })
        ));
        assert!(matches!(
            b.check(4, 2, 2, 4),
            Err(Error::BoundsExceeded { .. })
        ));
        assert!(Bounds::enum_only(10).check(2, 1, 1, 1).is_err());
    }

    #[test]
    fn identity_un_verifies_all_game_lemmas() {
        for v in [Variant::Ordinary, Variant::AllPowerful] {
            let g = noisy(Rational::one());
            let i = inst(g.clone(), reactive_alpha(&g, 3), v, None);
            for k in [
                LemmaKind::ObsSeqConditional,
                LemmaKind::ConeForwardG2H,
                LemmaKind::ConeForwardH2G,
            ] {
                let rep = check(k, &i, 3);
                assert!(rep.verified(), "{rep}");
                assert!(rep.checked > 0);
            }
        }
    }

    #[test]
    fn blind_player_one_verifies_with_noise() {
        let g = noisy(r(2, 3));
        let i = inst(g.clone(), blind_alpha(&g, 2), Variant::Ordinary, None);
        for k in [
            LemmaKind::ObsSeqConditional,
            LemmaKind::ConeForwardG2H,
            LemmaKind::ConeForwardH2G,
        ] {
            let rep = check(k, &i, 2);
            assert!(rep.verified(), "{rep}");
        }
    }

    #[test]
    fn one_step_cones_agree_for_reactive_player() {
        let g = noisy(r(2, 3));
        let i = inst(g.clone(), reactive_alpha(&g, 2), Variant::AllPowerful, None);
        assert!(check(LemmaKind::ConeForwardG2H, &i, 1).verified());
    }

    #[test]
    fn dropping_un_is_caught() {
        let g = noisy(r(2, 3));
        let i = inst(
            g.clone(),
            blind_alpha(&g, 2),
            Variant::Ordinary,
            Some(Mutation::DropUn),
        );
        let rep = check(LemmaKind::ObsSeqConditional, &i, 1);
        let c = rep.counterexample.expect("ratio 1 against ObsSeq 2/3");
        assert_ne!(c.lhs, c.rhs);
        let i = inst(
            g.clone(),
            reactive_alpha(&g, 2),
            Variant::Ordinary,
            Some(Mutation::DropUn),
        );
        assert!(!check(LemmaKind::ConeForwardG2H, &i, 1).verified());
    }

    #[test]
    fn swapped_observation_is_caught() {
        let g = noisy(r(2, 3));
        let i = inst(
            g.clone(),
            reactive_alpha(&g, 2),
            Variant::AllPowerful,
            Some(Mutation::SwapObs1),
        );
        let rep = check(LemmaKind::ConeForwardG2H, &i, 1);
        let c = rep
            .counterexample
            .expect("mapped strategy reads the hidden component");
        assert!(
            c.description.contains("not observation-based"),
            "{}",
            c.description
        );
        assert_ne!(c.lhs, c.rhs);
    }

    #[test]
    fn broken_priority_is_caught() {
        let g = noisy(r(2, 3));
        let i = inst(
            g.clone(),
            blind_alpha(&g, 1),
            Variant::Ordinary,
            Some(Mutation::BreakPriority),
        );
        let c = check(LemmaKind::ConeForwardG2H, &i, 1)
            .counterexample
            .unwrap();
        assert!(c.description.starts_with("priority lift"));
    }

    #[test]
    fn h_strategy_reading_the_true_component_is_reported() {
        let g = noisy(r(2, 3));
        let depth = 2;
        let Instance::Game(mut gi) = inst(
            g.clone(),
            blind_alpha(&g, depth),
            Variant::Ordinary,
            Some(Mutation::SwapObs1),
        ) else {
            unreachable!()
        };
        let rg = reduce_game_with(&g, None, Variant::Ordinary, Some(Mutation::SwapObs1)).unwrap();
        let (_, b) = rg.map_g_to_h(&gi.alpha, &gi.beta).unwrap();
        let h = &rg.pog;
        let rows = h
            .histories_up_to(2 * depth - 1)
            .into_iter()
            .filter(|rho| h.owner_of(rho.last()) == Player::One)
            .map(|rho| {
                let d = if rg.first(rho.last()) == Loc(0) {
                    Distribution::dirac(Action(1))
                } else {
                    Distribution::dirac(Action(0))
                };
                (rho, d)
            });
        let a = ObsBasedStrategy::from_prefix_table(h, Player::One, 2 * depth, rows).unwrap();
        gi.h_strategies = Some((a, b));
        let c = check(LemmaKind::ConeForwardH2G, &Instance::Game(gi), depth)
            .counterexample
            .unwrap();
        assert!(
            c.description
                .contains("Player-1 strategy is not observation-based"),
            "{}",
            c.description
        );
    }

    fn pomdp() -> Pomdp {
        // s0 and s1 look alike; a moves s0 to goal half the time
        let mut delta = BTreeMap::new();
        for s in 0..3u32 {
            delta.insert(
                (State(s), Action(0)),
                Distribution::new([(State(2), r(1, 2)), (State(s), r(1, 2))]).unwrap(),
            );
            delta.insert(
                (State(s), Action(1)),
                Distribution::new([(State(0), r(1, 3)), (State(1), r(2, 3))]).unwrap(),
            );
        }
        Pomdp {
            states: vec!["s0".into(), "s1".into(), "goal".into()],
            actions: vec!["a".into(), "b".into()],
            delta,
            obs: Partition::from_blocks(3, vec![vec![State(0), State(1)], vec![State(2)]]),
            initial: State(0),
        }
    }

    fn pomdp_instance(m: Pomdp, depth: usize) -> Instance {
        let red = reduce_pomdp(&m, None).unwrap();
        let alpha_g = StrategyG1::from_fn(&red.game, depth, |p| {
            if p.last() == Loc(0) {
                Distribution::dirac(Input(0))
            } else {
                Distribution::new([(Input(0), r(1, 4)), (Input(1), r(3, 4))]).unwrap()
            }
        });
        let rows = m.all_histories(depth).into_iter().map(|rho| {
            let d = if m.observation_seq(&rho).obs.last() == Some(&0) {
                Distribution::uniform([Action(0), Action(1)])
            } else {
                Distribution::dirac(Action(1))
            };
            (rho, d)
        });
        let alpha_h = m.obs_based(depth, rows).unwrap();
        Instance::Pomdp(PomdpInstance {
            name: "m".into(),
            pomdp: m,
            alpha_h,
            alpha_g,
        })
    }

    #[test]
    fn pomdp_lemmas_verify() {
        let i = pomdp_instance(pomdp(), 3);
        for k in LemmaKind::ALL.into_iter().filter(|k| k.on_pomdp()) {
            let rep = check(k, &i, 3);
            assert!(rep.verified(), "{rep}");
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn wrong_instance_kind_is_refused() {
        let i = pomdp_instance(pomdp(), 1);
        assert!(matches!(
            check_lemma(LemmaKind::ConeForwardG2H, &i, 1, &Bounds::default()),
            Err(Error::Domain(_))
        ));
        let g = noisy(Rational::one());
        let gi = inst(g.clone(), blind_alpha(&g, 4), Variant::Ordinary, None);
        assert!(matches!(
            check_lemma(LemmaKind::ConeForwardG2H, &gi, 4, &Bounds::default()),
            Err(Error::BoundsExceeded { .. })
        ));
    }
}
