//! Reduction from a game with uncertainty `G` to an alternating
//! partial-observation game `H` over `L × L` (Player 1) and `L × L × Σ_I`
//! (Player 2), plus the strategy maps between the two.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::game::{Input, Loc, Output, PrefixG, UncertaintyGame};
use crate::objective::Objective;
use crate::pog::{
    Action, Conflict, ObsBasedStrategy, PartialObsGame, Partition, Player, Policy, PrefixH, State,
};
use crate::rational::Rational;
use crate::strategy::{prefixes_up_to, StrategyG1, StrategyG2, Variant};

/// Deliberate defects for mutation testing of the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// `δ₂` forgets `un`: the second component copies the first.
    DropUn,
    /// Player 1 observes the true (first) component.
    SwapObs1,
    /// Priorities are read off the second component.
    BreakPriority,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::DropUn,
        Mutation::SwapObs1,
        Mutation::BreakPriority,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DropUn => "drop-un-factor",
            Mutation::SwapObs1 => "swap-obs1-component",
            Mutation::BreakPriority => "break-priority-lift",
        }
    }
}

/// What a state of `H` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    Pair(Loc, Loc),
    Inter(Loc, Loc, Input),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGame {
    pub pog: PartialObsGame,
    pub mode: Variant,
    /// `p_H`, from the objective's parity compilation (all zero without one).
    pub priorities: Vec<u32>,
    pub objective: Option<Objective>,
    pub source: UncertaintyGame,
    pub mutation: Option<Mutation>,
}

impl ReducedGame {
    fn nl(&self) -> usize {
        self.source.n_locs()
    }

    fn ni(&self) -> usize {
        self.source.n_inputs()
    }

    pub fn pair(&self, l1: Loc, l2: Loc) -> State {
        State((l1.idx() * self.nl() + l2.idx()) as u32)
    }

    pub fn inter(&self, l1: Loc, l2: Loc, i: Input) -> State {
        let n = self.nl();
        State((n * n + (l1.idx() * n + l2.idx()) * self.ni() + i.idx()) as u32)
    }

    pub fn decode(&self, s: State) -> Product {
        decode(self.nl(), self.ni(), s)
    }

    pub fn first(&self, s: State) -> Loc {
        match self.decode(s) {
            Product::Pair(l, _) | Product::Inter(l, _, _) => l,
        }
    }

    pub fn second(&self, s: State) -> Loc {
        match self.decode(s) {
            Product::Pair(_, l) | Product::Inter(_, l, _) => l,
        }
    }

    /// `g₁` / `g₂`: the component prefix of a full history that ends at a
    /// Player-1 state. Intermediate states must agree with their neighbours.
    pub fn project_prefix(&self, rho: &PrefixH, which: Which) -> Result<PrefixG> {
        let st = rho.states();
        if st.len().is_multiple_of(2) {
            return Err(Error::MidTurn);
        }
        let pick = |s: State| -> Result<Loc> {
            match self.decode(s) {
                Product::Pair(a, b) => Ok(if which == Which::First { a } else { b }),
                Product::Inter(..) => Err(Error::MalformedPrefix(
                    "intermediate state in a Player-1 slot".into(),
                )),
            }
        };
        let mut out = PrefixG::start(pick(st[0])?);
        for k in (1..st.len()).step_by(2) {
            let i = Input(rho.actions()[k - 1].0);
            let o = Output(rho.actions()[k].0);
            match self.decode(st[k]) {
                Product::Inter(a, b, j) if self.pair(a, b) == st[k - 1] && j == i => {}
                _ => {
                    return Err(Error::MalformedPrefix(format!(
                        "state {} does not follow its predecessor",
                        st[k].0
                    )))
                }
            }
            out.push(i, o, pick(st[k + 1])?);
        }
        Ok(out)
    }

    /// `h₁₂`: zips two action-matching prefixes into a history of `H`.
    pub fn pair_prefix(&self, r1: &PrefixG, r2: &PrefixG) -> Result<PrefixH> {
        if r1.len() != r2.len() {
            return Err(Error::LengthMismatch);
        }
        if !r1.action_matches(r2) {
            return Err(Error::ActionMismatch);
        }
        let mut out = PrefixH::start(self.pair(r1.first(), r2.first()));
        for k in 0..r1.steps() {
            let (i, o) = r1.letters()[k];
            out.push(Action(i.0), self.inter(r1.locs()[k], r2.locs()[k], i));
            out.push(Action(o.0), self.pair(r1.locs()[k + 1], r2.locs()[k + 1]));
        }
        Ok(out)
    }

    /// The history Player 2 answers in: `h₁₂(ρ¹, ρ²) σ (ℓ¹_n, ℓ²_n, σ)`.
    pub fn p2_history(&self, r1: &PrefixG, r2: &PrefixG, i: Input) -> Result<PrefixH> {
        let base = self.pair_prefix(r1, r2)?;
        Ok(base.extended(Action(i.0), self.inter(r1.last(), r2.last(), i)))
    }

    /// `ĝ`: `α_H(ρ_H) = α_G(g₂(ρ_H))`, `β_H(ρ_H σ) = β_G(g₁(ρ_H) σ)` or
    /// `β_Gᴬ(g₁(ρ_H), g₂(ρ_H), σ)`. Tabulated on every well-shaped history
    /// `h₁₂(ρ¹, ρ²)` (reachable or not), then collapsed onto observation
    /// sequences, so a result that is not observation-based in `H` is an error.
    pub fn map_g_to_h(
        &self,
        alpha: &StrategyG1,
        beta: &StrategyG2,
    ) -> Result<(ObsBasedStrategy, ObsBasedStrategy)> {
        if beta.variant() != self.mode {
            return Err(Error::Domain(format!(
                "a {} Player-2 strategy does not fit the {} reduction",
                beta.variant().name(),
                self.mode.name()
            )));
        }
        if alpha.depth != beta.depth() {
            return Err(Error::Domain(format!(
                "strategy depths differ: {} vs {}",
                alpha.depth,
                beta.depth()
            )));
        }
        let max_len = 2 * alpha.depth;
        let (a_rows, b_rows) = self.g_hat_rows(alpha, beta)?;
        let a = ObsBasedStrategy::from_prefix_table(&self.pog, Player::One, max_len, a_rows)?;
        let b = ObsBasedStrategy::from_prefix_table(&self.pog, Player::Two, max_len, b_rows)?;
        Ok((a, b))
    }

    /// The prefix-keyed rows of `ĝ(α)` and `ĝ(β)`, before collapsing.
    #[allow(clippy::type_complexity)]
    pub fn g_hat_rows(
        &self,
        alpha: &StrategyG1,
        beta: &StrategyG2,
    ) -> Result<(
        Vec<(PrefixH, Distribution<Action>)>,
        Vec<(PrefixH, Distribution<Action>)>,
    )> {
        let depth = alpha.depth;
        let g = &self.source;
        let mut a_rows = Vec::new();
        for r2 in prefixes_up_to(g, depth, None) {
            let d = alpha.get(&r2)?.map(|i| Action(i.0));
            for r1 in crate::measure::act_mt(g, &r2) {
                a_rows.push((self.pair_prefix(&r1, &r2)?, d.clone()));
            }
        }
        let mut b_rows = Vec::new();
        for r1 in prefixes_up_to(g, depth, Some(g.initial)) {
            for r2 in crate::measure::act_mt(g, &r1) {
                for i in g.input_letters() {
                    let d = beta.choose(&r1, &r2, i)?.map(|o| Action(o.0));
                    b_rows.push((self.p2_history(&r1, &r2, i)?, d));
                }
            }
        }
        Ok((a_rows, b_rows))
    }

    /// `ĥ`: reads `α_H` and `β_H` on representatives of `h₂(ρ²)` and `h₁(ρ¹)`.
    /// Two representatives are evaluated, the diagonal and one with the
    /// other component shifted; if they disagree the input is not
    /// observation-based and the pair is reported.
    pub fn map_h_to_g(
        &self,
        alpha: &dyn Policy,
        beta: &dyn Policy,
        depth: usize,
    ) -> Result<(StrategyG1, StrategyG2)> {
        let g = &self.source;
        let shift = |p: &PrefixG| -> PrefixG {
            let locs = p
                .locs()
                .iter()
                .map(|l| Loc(((l.idx() + 1) % g.n_locs()) as u32))
                .collect();
            p.with_locs(locs).unwrap()
        };
        let to_input = |d: &Distribution<Action>| d.map(|a| Input(a.0));
        let to_output = |d: &Distribution<Action>| d.map(|a| Output(a.0));
        let pog = &self.pog;
        let consistent =
            |x: &PrefixH, y: &PrefixH, pol: &dyn Policy| -> Result<Distribution<Action>> {
                let dx = pol.act(pog, x)?.clone();
                match pol.act(pog, y) {
                    Ok(dy) if *dy != dx => Err(Error::NotObservationBased(format!(
                        "{} and {} differ ({:?} vs {:?})",
                        crate::pog::fmt_prefix_h(pog, x),
                        crate::pog::fmt_prefix_h(pog, y),
                        dx,
                        dy
                    ))),
                    _ => Ok(dx),
                }
            };

        let mut a_table = BTreeMap::new();
        for r2 in prefixes_up_to(g, depth, None) {
            let diag = self.pair_prefix(&r2, &r2)?;
            let other = self.pair_prefix(&shift(&r2), &r2)?;
            let d = consistent(&diag, &other, alpha)?;
            a_table.insert(r2, to_input(&d));
        }
        let alpha_g = StrategyG1 {
            depth,
            table: a_table,
        };

        let beta_g = match self.mode {
            Variant::Ordinary => {
                let mut table = BTreeMap::new();
                for r1 in prefixes_up_to(g, depth, Some(g.initial)) {
                    for i in g.input_letters() {
                        let diag = self.p2_history(&r1, &r1, i)?;
                        let other = self.p2_history(&r1, &shift(&r1), i)?;
                        let d = consistent(&diag, &other, beta)?;
                        table.insert((r1.clone(), i), to_output(&d));
                    }
                }
                StrategyG2::Ordinary { depth, table }
            }
            Variant::AllPowerful => {
                let mut table = BTreeMap::new();
                for r1 in prefixes_up_to(g, depth, Some(g.initial)) {
                    for r2 in crate::measure::act_mt(g, &r1) {
                        for i in g.input_letters() {
                            let d = beta.act(pog, &self.p2_history(&r1, &r2, i)?)?;
                            table.insert((r1.clone(), r2.clone(), i), to_output(d));
                        }
                    }
                }
                StrategyG2::AllPowerful { depth, table }
            }
        };
        Ok((alpha_g, beta_g))
    }

    /// The first pair of representatives on which `ĥ` reads different rows:
    /// every member of `h₂(ρ²)` starting at `(ℓ₀, ·)` for the Player-1
    /// strategy, and of `h₁(ρ¹)` for an ordinary Player 2. Histories the
    /// strategy leaves undefined are skipped.
    pub fn h_hat_conflict(
        &self,
        alpha: &dyn Policy,
        beta: &dyn Policy,
        depth: usize,
    ) -> Result<Option<Conflict>> {
        let g = &self.source;
        let pog = &self.pog;
        let scan = |reps: &mut dyn Iterator<Item = Result<PrefixH>>,
                    pol: &dyn Policy|
         -> Result<Option<Conflict>> {
            let mut seen: Option<(PrefixH, Distribution<Action>)> = None;
            for rho in reps {
                let rho = rho?;
                let d = match pol.act(pog, &rho) {
                    Ok(d) => d.clone(),
                    Err(Error::StrategyUndefined(_)) => continue,
                    Err(e) => return Err(e),
                };
                match &seen {
                    Some((first, d0)) if *d0 != d => {
                        return Ok(Some(Conflict {
                            first: first.clone(),
                            second: rho,
                            row_first: d0.clone(),
                            row_second: d,
                        }))
                    }
                    Some(_) => {}
                    None => seen = Some((rho, d)),
                }
            }
            Ok(None)
        };
        for r2 in prefixes_up_to(g, depth, None) {
            let mut reps = crate::measure::act_mt(g, &r2)
                .filter(|r1| r1.first() == g.initial)
                .map(|r1| self.pair_prefix(&r1, &r2));
            if let Some(c) = scan(&mut reps, alpha)? {
                return Ok(Some(c));
            }
        }
        if self.mode == Variant::Ordinary {
            for r1 in prefixes_up_to(g, depth, Some(g.initial)) {
                for i in g.input_letters() {
                    let mut reps =
                        crate::measure::act_mt(g, &r1).map(|r2| self.p2_history(&r1, &r2, i));
                    if let Some(c) = scan(&mut reps, beta)? {
                        return Ok(Some(c));
                    }
                }
            }
        }
        Ok(None)
    }

    /// All histories of `H` whose Player-1 component projections are `ρ¹`:
    /// the members of `h₁(ρ¹)` with positive probability, as `(g₂, history)`.
    pub fn lift_first(&self, r1: &PrefixG) -> Result<Vec<(PrefixG, PrefixH)>> {
        crate::measure::act_mt(&self.source, r1)
            .map(|r2| Ok((r2.clone(), self.pair_prefix(r1, &r2)?)))
            .collect()
    }

    /// Closed walks of at most `max_nodes` Player-1 states in the support graph
    /// whose minimum priority differs from that of their first-component
    /// projection under `p_G`. Returns the first such walk with both minima.
    pub fn priority_lift_violation(
        &self,
        p_g: &[u32],
        max_nodes: usize,
    ) -> Option<(Vec<State>, u32, u32)> {
        let n = self.nl();
        let n_pairs = n * n;
        let mut succ: Vec<Vec<State>> = alloc::vec![Vec::new(); n_pairs];
        for s in 0..n_pairs {
            let s = State(s as u32);
            for a in self.pog.actions_at(s) {
                let Some(d1) = self.pog.delta.get(&(s, a)) else {
                    continue;
                };
                for &m in d1.support() {
                    for b in self.pog.actions_at(m) {
                        if let Some(d2) = self.pog.delta.get(&(m, b)) {
                            for &t in d2.support() {
                                if !succ[s.idx()].contains(&t) {
                                    succ[s.idx()].push(t);
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut walk: Vec<State> = Vec::new();
        fn dfs(
            rg: &ReducedGame,
            succ: &[Vec<State>],
            p_g: &[u32],
            walk: &mut Vec<State>,
            max_nodes: usize,
        ) -> Option<(Vec<State>, u32, u32)> {
            let last = *walk.last().unwrap();
            for &t in &succ[last.idx()] {
                if t == walk[0] {
                    let ph = walk.iter().map(|s| rg.priorities[s.idx()]).min().unwrap();
                    let pg = walk.iter().map(|&s| p_g[rg.first(s).idx()]).min().unwrap();
                    if ph != pg {
                        return Some((walk.clone(), ph, pg));
                    }
                }
                if walk.len() < max_nodes {
                    walk.push(t);
                    let r = dfs(rg, succ, p_g, walk, max_nodes);
                    walk.pop();
                    if r.is_some() {
                        return r;
                    }
                }
            }
            None
        }
        for s in 0..n_pairs {
            walk.clear();
            walk.push(State(s as u32));
            if let Some(v) = dfs(self, &succ, p_g, &mut walk, max_nodes) {
                return Some(v);
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

fn decode(n: usize, ni: usize, s: State) -> Product {
    let k = s.idx();
    if k < n * n {
        Product::Pair(Loc((k / n) as u32), Loc((k % n) as u32))
    } else {
        let k = k - n * n;
        let pair = k / ni;
        Product::Inter(
            Loc((pair / n) as u32),
            Loc((pair % n) as u32),
            Input((k % ni) as u32),
        )
    }
}

/// Builds `H` from a well-formed `G`.
pub fn reduce_game(
    g: &UncertaintyGame,
    objective: Option<&Objective>,
    mode: Variant,
) -> Result<ReducedGame> {
    reduce_game_with(g, objective, mode, None)
}

/// [`reduce_game`] with an optional deliberate defect.
pub fn reduce_game_with(
    g: &UncertaintyGame,
    objective: Option<&Objective>,
    mode: Variant,
    mutation: Option<Mutation>,
) -> Result<ReducedGame> {
    let report = g.validate();
    if !report.is_ok() {
        return Err(Error::Domain(format!("{report}")));
    }
    if let Some(obj) = objective {
        if obj.size() != g.n_locs() {
            return Err(Error::Domain(format!(
                "objective covers {} locations, game has {}",
                obj.size(),
                g.n_locs()
            )));
        }
    }
    let n = g.n_locs();
    let ni = g.n_inputs();
    let total = n * n * (1 + ni);
    let mut states = Vec::with_capacity(total);
    let mut owner = Vec::with_capacity(total);
    for s in 0..total {
        match decode(n, ni, State(s as u32)) {
            Product::Pair(a, b) => {
                states.push(format!(
                    "({},{})",
                    g.locations[a.idx()],
                    g.locations[b.idx()]
                ));
                owner.push(Player::One);
            }
            Product::Inter(a, b, i) => {
                states.push(format!(
                    "({},{},{})",
                    g.locations[a.idx()],
                    g.locations[b.idx()],
                    g.inputs[i.idx()]
                ));
                owner.push(Player::Two);
            }
        }
    }
    let pair = |a: Loc, b: Loc| State((a.idx() * n + b.idx()) as u32);
    let inter =
        |a: Loc, b: Loc, i: Input| State((n * n + (a.idx() * n + b.idx()) * ni + i.idx()) as u32);
    let un = |l: Loc| -> Distribution<Loc> {
        if mutation == Some(Mutation::DropUn) {
            Distribution::dirac(l)
        } else {
            g.un[&l].clone()
        }
    };

    let mut delta = BTreeMap::new();
    for l1 in g.locs() {
        for l2 in g.locs() {
            for i in g.input_letters() {
                delta.insert(
                    (pair(l1, l2), Action(i.0)),
                    Distribution::dirac(inter(l1, l2, i)),
                );
                for o in g.output_letters() {
                    let row = g.transition_dist(l1, i, o)?;
                    let mut w = Vec::new();
                    for (l1p, p) in row.iter() {
                        for (l2p, q) in un(*l1p).iter() {
                            w.push((pair(*l1p, *l2p), p * q));
                        }
                    }
                    delta.insert(
                        (inter(l1, l2, i), Action(o.0)),
                        Distribution::from_weights(w),
                    );
                }
            }
        }
    }

    let second = |s: State| match decode(n, ni, s) {
        Product::Pair(_, b) | Product::Inter(_, b, _) => b,
    };
    let first = |s: State| match decode(n, ni, s) {
        Product::Pair(a, _) | Product::Inter(a, _, _) => a,
    };
    let obs1 = if mutation == Some(Mutation::SwapObs1) {
        Partition::by_key(total, first)
    } else {
        Partition::by_key(total, second)
    };
    let obs2 = match mode {
        Variant::AllPowerful => Partition::complete(total),
        Variant::Ordinary => Partition::by_key(total, first),
    };
    let initial = Distribution::from_weights(
        un(g.initial)
            .iter()
            .map(|(l, w)| (pair(g.initial, *l), w.clone())),
    );

    let lift_by = |s: usize| {
        let st = State(s as u32);
        if mutation == Some(Mutation::BreakPriority) {
            second(st).idx()
        } else {
            first(st).idx()
        }
    };
    let priorities = match objective {
        Some(obj) => {
            let p = obj.priorities();
            (0..total).map(|s| p[lift_by(s)]).collect()
        }
        None => alloc::vec![0; total],
    };
    let lifted = objective.map(|o| o.lift(total, lift_by));

    Ok(ReducedGame {
        pog: PartialObsGame {
            states,
            owner,
            actions1: g.inputs.clone(),
            actions2: g.outputs.clone(),
            delta,
            obs1,
            obs2,
            initial,
        },
        mode,
        priorities,
        objective: lifted,
        source: g.clone(),
        mutation,
    })
}

/// `Pr(𝓔₁(ρ¹))` and `Pr(𝓔₁,₂(ρ¹, ρ²))` in `H`: the mass of the histories whose
/// first component follows `ρ¹`, and of the single history `h₁₂(ρ¹, ρ²)`.
pub fn component_events(
    rg: &ReducedGame,
    alpha: &dyn Policy,
    beta: &dyn Policy,
    r1: &PrefixG,
    r2: &PrefixG,
) -> Result<(Rational, Rational)> {
    let mut e1 = Rational::zero();
    let mut e12 = Rational::zero();
    for (q, rho) in rg.lift_first(r1)? {
        let m = crate::pog::cone_prob_pog(&rg.pog, alpha, beta, &rho)?;
        if q == *r2 {
            e12 = m.clone();
        }
        e1 += m;
    }
    Ok((e1, e12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn noisy(n: usize) -> UncertaintyGame {
        let mut g = UncertaintyGame::with_sizes(n, 2, 2);
        for l in 0..n as u32 {
            let nxt = Loc((l + 1) % n as u32);
            g.set_un(
                Loc(l),
                Distribution::new([(Loc(l), r(2, 3)), (nxt, r(1, 3))]).unwrap(),
            );
            for i in 0..2u32 {
                for o in 0..2u32 {
                    let d = if i == o {
                        Distribution::dirac(Loc(l))
                    } else {
                        Distribution::uniform([Loc(l), nxt])
                    };
                    g.set_delta(Loc(l), Input(i), Output(o), d);
                }
            }
        }
        g
    }

    #[test]
    fn one_location_game_reduces_to_diracs() {
        let mut g = UncertaintyGame::with_sizes(1, 1, 1);
        g.set_identity_un();
        g.set_delta(Loc(0), Input(0), Output(0), Distribution::dirac(Loc(0)));
        let rg = reduce_game(&g, None, Variant::Ordinary).unwrap();
        assert_eq!(rg.pog.n_states(), 2);
        assert!(rg.pog.validate().is_ok());
        assert!(rg.pog.delta.values().all(|d| d.len() == 1));
        assert_eq!(rg.pog.initial, Distribution::dirac(State(0)));
    }

    #[test]
    fn sizes_and_rows() {
        let g = noisy(2);
        for mode in [Variant::Ordinary, Variant::AllPowerful] {
            let rg = reduce_game(&g, None, mode).unwrap();
            let h = &rg.pog;
            assert_eq!(h.owner.iter().filter(|&&p| p == Player::One).count(), 4);
            assert_eq!(h.owner.iter().filter(|&&p| p == Player::Two).count(), 8);
            assert!(h.validate().is_ok(), "{}", h.validate());
            // δ₂((ℓ1,ℓ2,σ),σo)(ℓ1',ℓ2') = Δ(ℓ1,σ,σo)(ℓ1')·un(ℓ1')(ℓ2')
            let d = &h.delta[&(rg.inter(Loc(0), Loc(1), Input(0)), Action(1))];
            assert_eq!(d.prob(&rg.pair(Loc(1), Loc(1))), r(1, 2) * r(2, 3));
            assert_eq!(d.prob(&rg.pair(Loc(1), Loc(0))), r(1, 2) * r(1, 3));
            assert_eq!(h.initial.prob(&rg.pair(Loc(0), Loc(1))), r(1, 3));
        }
    }

    #[test]
    fn observation_partitions() {
        let g = noisy(3);
        let ap = reduce_game(&g, None, Variant::AllPowerful).unwrap();
        let st = reduce_game(&g, None, Variant::Ordinary).unwrap();
        assert!(ap.pog.obs2.is_complete());
        let a = st.pair(Loc(0), Loc(2));
        let b = st.pair(Loc(1), Loc(2));
        assert_eq!(st.pog.obs1.block_of(a), st.pog.obs1.block_of(b));
        assert_ne!(st.pog.obs2.block_of(a), st.pog.obs2.block_of(b));
    }

    #[test]
    fn projections_round_trip() {
        let g = noisy(3);
        let rg = reduce_game(&g, None, Variant::Ordinary).unwrap();
        let r1 = g.parse_prefix("l0 i0 o1 l1 i1 o1 l1").unwrap();
        let r2 = g.parse_prefix("l2 i0 o1 l0 i1 o1 l1").unwrap();
        let h = rg.pair_prefix(&r1, &r2).unwrap();
        assert_eq!(rg.project_prefix(&h, Which::First).unwrap(), r1);
        assert_eq!(rg.project_prefix(&h, Which::Second).unwrap(), r2);
        let bad = g.parse_prefix("l2 i1 o1 l0 i1 o1 l1").unwrap();
        assert_eq!(rg.pair_prefix(&r1, &bad), Err(Error::ActionMismatch));
        assert_eq!(
            rg.pair_prefix(&r1, &PrefixG::start(Loc(0))),
            Err(Error::LengthMismatch)
        );
        let mid = h.upto(3);
        assert_eq!(rg.project_prefix(&mid, Which::First), Err(Error::MidTurn));
        let one = PrefixH::start(rg.pair(Loc(1), Loc(2)));
        assert_eq!(
            rg.project_prefix(&one, Which::First).unwrap(),
            PrefixG::start(Loc(1))
        );
        assert_eq!(
            rg.project_prefix(&one, Which::Second).unwrap(),
            PrefixG::start(Loc(2))
        );
    }

    #[test]
    fn identity_un_stays_on_the_diagonal() {
        let mut g = noisy(3);
        g.set_identity_un();
        let rg = reduce_game(&g, None, Variant::Ordinary).unwrap();
        for rho in rg.pog.histories_up_to(7) {
            for &s in rho.states() {
                assert_eq!(rg.first(s), rg.second(s));
            }
        }
    }

    #[test]
    fn g_hat_then_h_hat_is_identity() {
        let g = noisy(3);
        let alpha = StrategyG1::from_fn(&g, 2, |p| {
            let k = (p.last().0 + p.steps() as u32) % 2;
            Distribution::new([(Input(k), r(3, 4)), (Input(1 - k), r(1, 4))]).unwrap()
        });
        let beta = StrategyG2::ordinary_from_fn(&g, 2, |p, i| {
            Distribution::dirac(Output((p.last().0 + i.0) % 2))
        });
        let rg = reduce_game(&g, None, Variant::Ordinary).unwrap();
        let (ah, bh) = rg.map_g_to_h(&alpha, &beta).unwrap();
        let (ag, bg) = rg.map_h_to_g(&ah, &bh, 2).unwrap();
        assert_eq!(ag, alpha);
        assert_eq!(bg, beta);
        assert!(ah.table.values().all(|d| d.check().is_ok()));
    }

    #[test]
    fn h_hat_rejects_non_observation_based_input() {
        let g = noisy(2);
        let rg = reduce_game(&g, None, Variant::Ordinary).unwrap();
        // reads the hidden first component
        let mut alpha = crate::pog::PogStrategy {
            player: Player::One,
            max_len: 4,
            table: BTreeMap::new(),
        };
        let mut beta = crate::pog::PogStrategy {
            player: Player::Two,
            max_len: 4,
            table: BTreeMap::new(),
        };
        for r2 in prefixes_up_to(&g, 2, None) {
            for r1 in crate::measure::act_mt(&g, &r2) {
                let h = rg.pair_prefix(&r1, &r2).unwrap();
                alpha
                    .table
                    .insert(h.clone(), Distribution::dirac(Action(rg.first(h.last()).0)));
                for i in g.input_letters() {
                    beta.table.insert(
                        rg.p2_history(&r1, &r2, i).unwrap(),
                        Distribution::dirac(Action(0)),
                    );
                }
            }
        }
        let e = rg.map_h_to_g(&alpha, &beta, 2).unwrap_err();
        assert!(matches!(e, Error::NotObservationBased(_)), "{e:?}");
    }

    #[test]
    fn all_powerful_ignoring_observation_acts_ordinary() {
        let g = noisy(2);
        let rg = reduce_game(&g, None, Variant::AllPowerful).unwrap();
        let beta = StrategyG2::ordinary_from_fn(&g, 2, |p, i| {
            Distribution::dirac(Output((p.last().0 + i.0 + 1) % 2))
        });
        let alpha = StrategyG1::constant(&g, 2, Distribution::uniform([Input(0), Input(1)]));
        let ap = beta.lift_to_all_powerful(&g).unwrap();
        let (ah, bh) = rg.map_g_to_h(&alpha, &ap).unwrap();
        let (_, bg) = rg.map_h_to_g(&ah, &bh, 2).unwrap();
        for r1 in prefixes_up_to(&g, 2, Some(g.initial)) {
            for r2 in crate::measure::act_mt(&g, &r1) {
                for i in g.input_letters() {
                    assert_eq!(
                        bg.choose(&r1, &r2, i).unwrap(),
                        beta.choose(&r1, &r1, i).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn priority_lift_holds_and_mutation_breaks_it() {
        let g = noisy(2);
        let obj = Objective::Parity(alloc::vec![1, 2]);
        let rg = reduce_game(&g, Some(&obj), Variant::Ordinary).unwrap();
        assert_eq!(rg.priority_lift_violation(&obj.priorities(), 4), None);
        let bad = reduce_game_with(
            &g,
            Some(&obj),
            Variant::Ordinary,
            Some(Mutation::BreakPriority),
        )
        .unwrap();
        let (walk, ph, pg) = bad.priority_lift_violation(&obj.priorities(), 2).unwrap();
        assert!(walk.len() <= 2);
        assert_ne!(ph, pg);
    }
}
