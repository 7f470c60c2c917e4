//! Alternating partial-observation stochastic games and POMDPs.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::game::{check_names, check_row, ValidationReport, Violation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub u32);

/// Action id; indexes `actions1` at Player-1 states and `actions2` at
/// Player-2 states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(pub u32);

impl State {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Action {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// A partition of `0..n` into observation blocks.
///
/// `block_of` is only meaningful once [`Partition::check`] passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<State>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds from blocks without checking coverage or disjointness.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<State>>) -> Self {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for s in block {
                if let Some(slot) = block_of.get_mut(s.idx()) {
                    if *slot == usize::MAX {
                        *slot = b;
                    }
                }
            }
        }
        Partition { blocks, block_of }
    }

    /// Groups `0..n` by `key`, blocks ordered by first member.
    pub fn by_key<K: Ord>(n: usize, key: impl Fn(State) -> K) -> Self {
        let mut groups: BTreeMap<K, Vec<State>> = BTreeMap::new();
        let mut order: Vec<K> = Vec::new();
        for s in (0..n as u32).map(State) {
            let k = key(s);
            if !groups.contains_key(&k) {
                order.push(key(s));
            }
            groups.entry(k).or_default().push(s);
        }
        let blocks = order
            .into_iter()
            .map(|k| groups.remove(&k).unwrap())
            .collect();
        Self::from_blocks(n, blocks)
    }

    /// Perfect information: singleton blocks.
    pub fn complete(n: usize) -> Self {
        Self::by_key(n, |s| s)
    }

    /// Blindness: one block.
    pub fn blind(n: usize) -> Self {
        Self::by_key(n, |_| ())
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn n_elems(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, s: State) -> usize {
        self.block_of[s.idx()]
    }

    pub fn block(&self, b: usize) -> &[State] {
        &self.blocks[b]
    }

    pub fn is_complete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn check(&self, what: &str, report: &mut ValidationReport) {
        let n = self.block_of.len();
        let mut count = vec![0usize; n];
        for (b, block) in self.blocks.iter().enumerate() {
            if block.is_empty() {
                report.push(Violation::NotAPartition(format!(
                    "{what}: block {b} is empty"
                )));
            }
            for s in block {
                match count.get_mut(s.idx()) {
                    Some(c) => *c += 1,
                    None => report.push(Violation::DanglingLocation {
                        row: format!("{what} block {b}"),
                        target: s.0,
                    }),
                }
            }
        }
        for (s, &c) in count.iter().enumerate() {
            if c == 0 {
                report.push(Violation::NotAPartition(format!(
                    "{what}: state {s} is in no block"
                )));
            } else if c > 1 {
                report.push(Violation::NotAPartition(format!(
                    "{what}: state {s} is in {c} blocks (overlap)"
                )));
            }
        }
    }
}

/// Alternating two-player stochastic game with one observation partition per
/// player. Player-1 states lead to Player-2 states and back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialObsGame {
    pub states: Vec<String>,
    pub owner: Vec<Player>,
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
    pub delta: BTreeMap<(State, Action), Distribution<State>>,
    pub obs1: Partition,
    pub obs2: Partition,
    pub initial: Distribution<State>,
}

/// A history `s0 a0 s1 a1 … sn` in full alternating form (both players'
/// states appear).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixH {
    states: Vec<State>,
    actions: Vec<Action>,
}

impl PrefixH {
    pub fn start(s: State) -> Self {
        PrefixH {
            states: vec![s],
            actions: Vec::new(),
        }
    }

    pub fn from_parts(states: Vec<State>, actions: Vec<Action>) -> Result<Self> {
        if states.is_empty() || actions.len() + 1 != states.len() {
            return Err(Error::MalformedPrefix(format!(
                "{} states with {} actions",
                states.len(),
                actions.len()
            )));
        }
        Ok(PrefixH { states, actions })
    }

    pub fn push(&mut self, a: Action, s: State) {
        self.actions.push(a);
        self.states.push(s);
    }

    pub fn extended(&self, a: Action, s: State) -> Self {
        let mut p = self.clone();
        p.push(a, s);
        p
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> State {
        self.states[0]
    }

    pub fn last(&self) -> State {
        *self.states.last().unwrap()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// The prefix ending at `s_k`.
    pub fn upto(&self, k: usize) -> Self {
        PrefixH {
            states: self.states[..=k].to_vec(),
            actions: self.actions[..k].to_vec(),
        }
    }

    pub fn parent(&self) -> Option<Self> {
        (self.len() > 1).then(|| self.upto(self.len() - 2))
    }

    /// Drops every other state starting from `s1`, as in
    /// `s0 a0 a1 s2 a2 a3 s4 …`. Only meaningful for games whose Player-2
    /// states are intermediate (as in the reduction).
    pub fn destutter(&self) -> (Vec<State>, Vec<(Action, Action)>) {
        let states = self.states.iter().step_by(2).copied().collect();
        let pairs = self
            .actions
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| (c[0], c[1]))
            .collect();
        (states, pairs)
    }
}

/// `o0 a0 o1 a1 …`: observation blocks with every action kept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsSeqH {
    pub obs: Vec<usize>,
    pub actions: Vec<Action>,
}

impl PartialObsGame {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = State> + Clone {
        (0..self.n_states() as u32).map(State)
    }

    pub fn owner_of(&self, s: State) -> Player {
        self.owner[s.idx()]
    }

    pub fn actions_of(&self, p: Player) -> &[String] {
        match p {
            Player::One => &self.actions1,
            Player::Two => &self.actions2,
        }
    }

    pub fn actions_at(&self, s: State) -> impl Iterator<Item = Action> + Clone {
        (0..self.actions_of(self.owner_of(s)).len() as u32).map(Action)
    }

    pub fn partition(&self, p: Player) -> &Partition {
        match p {
            Player::One => &self.obs1,
            Player::Two => &self.obs2,
        }
    }

    pub fn state_by_name(&self, name: &str) -> Result<State> {
        crate::game::find(&self.states, name).map(|i| State(i as u32))
    }

    pub fn step(&self, s: State, a: Action) -> Result<&Distribution<State>> {
        if s.idx() >= self.n_states() {
            return Err(Error::UnknownState(s.0));
        }
        self.delta.get(&(s, a)).ok_or(Error::UnknownAction(a.0))
    }

    /// A POMDP (Player 2 has one action) or a game where Player 2 sees the state.
    pub fn is_one_sided(&self) -> bool {
        self.actions2.len() == 1 || self.obs2.is_complete()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.n_states();
        if n == 0 {
            r.push(Violation::EmptyAlphabet("state set"));
        }
        if self.actions1.is_empty() {
            r.push(Violation::EmptyAlphabet("Player-1 action set"));
        }
        if self.actions2.is_empty() {
            r.push(Violation::EmptyAlphabet("Player-2 action set"));
        }
        check_names(&mut r, &self.states);
        check_names(&mut r, &self.actions1);
        check_names(&mut r, &self.actions2);
        if self.owner.len() != n {
            r.push(Violation::OwnerMismatch(format!(
                "{} owners for {} states",
                self.owner.len(),
                n
            )));
            return r;
        }
        for s in self.state_ids() {
            let me = self.owner_of(s);
            for a in self.actions_at(s) {
                let row = || {
                    format!(
                        "delta({}, {})",
                        self.states[s.idx()],
                        self.actions_of(me)[a.idx()]
                    )
                };
                match self.delta.get(&(s, a)) {
                    None => r.push(Violation::MissingRow(row())),
                    Some(d) => {
                        check_row(&mut r, row, d, |t| (t.idx() >= n).then_some(t.0));
                        for t in d.support().filter(|t| t.idx() < n) {
                            if self.owner_of(*t) == me {
                                r.push(Violation::OwnerMismatch(format!(
                                    "{} leads to {} of the same player (games are alternating)",
                                    row(),
                                    self.states[t.idx()]
                                )));
                            }
                        }
                    }
                }
            }
        }
        for &(s, a) in self.delta.keys() {
            if s.idx() >= n || a.idx() >= self.actions_of(self.owner_of(s)).len() {
                r.push(Violation::DanglingLocation {
                    row: format!("delta key ({}, {})", s.0, a.0),
                    target: s.0,
                });
            }
        }
        check_row(
            &mut r,
            || "initial".into(),
            &self.initial,
            |t| (t.idx() >= n).then_some(t.0),
        );
        for s in self.initial.support().filter(|s| s.idx() < n) {
            if self.owner_of(*s) != Player::One {
                r.push(Violation::OwnerMismatch(format!(
                    "initial state {} is not Player 1's",
                    self.states[s.idx()]
                )));
            }
        }
        for (name, p) in [("obs1", &self.obs1), ("obs2", &self.obs2)] {
            if p.n_elems() != n {
                r.push(Violation::NotAPartition(format!(
                    "{name} covers {} states, game has {n}",
                    p.n_elems()
                )));
            }
            p.check(name, &mut r);
        }
        r
    }

    /// `obs_p(ρ)`: states mapped to `p`'s blocks, actions of both players kept.
    pub fn observation_seq(&self, p: Player, rho: &PrefixH) -> ObsSeqH {
        let part = self.partition(p);
        ObsSeqH {
            obs: rho.states.iter().map(|&s| part.block_of(s)).collect(),
            actions: rho.actions.clone(),
        }
    }

    /// Every history with at most `max_len` states starting in `supp(initial)`
    /// whose transitions all have positive probability.
    pub fn histories_up_to(&self, max_len: usize) -> Vec<PrefixH> {
        let mut layer: Vec<PrefixH> = self.initial.support().map(|&s| PrefixH::start(s)).collect();
        let mut out = Vec::new();
        for len in 1..=max_len {
            if len > 1 {
                let mut next = Vec::new();
                for p in &layer {
                    for a in self.actions_at(p.last()) {
                        if let Some(d) = self.delta.get(&(p.last(), a)) {
                            for &t in d.support() {
                                next.push(p.extended(a, t));
                            }
                        }
                    }
                }
                layer = next;
            }
            out.extend(layer.iter().cloned());
        }
        out
    }
}

/// Something that picks a distribution over actions after a history.
pub trait Policy {
    fn act(&self, h: &PartialObsGame, rho: &PrefixH) -> Result<&Distribution<Action>>;
}

/// Prefix-keyed strategy, used for the complete-observation Player 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PogStrategy {
    pub player: Player,
    pub max_len: usize,
    pub table: BTreeMap<PrefixH, Distribution<Action>>,
}

impl Policy for PogStrategy {
    fn act(&self, _h: &PartialObsGame, rho: &PrefixH) -> Result<&Distribution<Action>> {
        if rho.len() > self.max_len {
            return Err(Error::DepthExceeded {
                len: rho.len(),
                depth: self.max_len,
            });
        }
        self.table
            .get(rho)
            .ok_or_else(|| Error::StrategyUndefined(format!("{rho:?}")))
    }
}

/// Observation-based strategy: keyed by `obs_p(ρ)` only, so it is
/// observation-consistent by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObsBasedStrategy {
    pub player: Player,
    pub max_len: usize,
    pub table: BTreeMap<ObsSeqH, Distribution<Action>>,
}

impl ObsBasedStrategy {
    /// Collapses a prefix-keyed table onto observation sequences. Rejects the
    /// table, naming two prefixes, if equal observations get different rows.
    pub fn from_prefix_table(
        h: &PartialObsGame,
        player: Player,
        max_len: usize,
        table: impl IntoIterator<Item = (PrefixH, Distribution<Action>)>,
    ) -> Result<Self> {
        let table = collapse(|r| h.observation_seq(player, r), table).map_err(|c| c.to_error(h))?;
        Ok(ObsBasedStrategy {
            player,
            max_len,
            table,
        })
    }

    pub fn get_obs(&self, key: &ObsSeqH) -> Result<&Distribution<Action>> {
        if key.obs.len() > self.max_len {
            return Err(Error::DepthExceeded {
                len: key.obs.len(),
                depth: self.max_len,
            });
        }
        self.table
            .get(key)
            .ok_or_else(|| Error::StrategyUndefined(format!("{key:?}")))
    }
}

impl Policy for ObsBasedStrategy {
    fn act(&self, h: &PartialObsGame, rho: &PrefixH) -> Result<&Distribution<Action>> {
        self.get_obs(&h.observation_seq(self.player, rho))
    }
}

/// Two histories with the same observations but different rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub first: PrefixH,
    pub second: PrefixH,
    pub row_first: Distribution<Action>,
    pub row_second: Distribution<Action>,
}

impl Conflict {
    /// The least action on which the rows differ, with both probabilities.
    pub fn witness(&self) -> (Action, Rational, Rational) {
        let mut acts: Vec<Action> = self
            .row_first
            .support()
            .chain(self.row_second.support())
            .copied()
            .collect();
        acts.sort_unstable();
        for a in acts {
            let (x, y) = (self.row_first.prob(&a), self.row_second.prob(&a));
            if x != y {
                return (a, x, y);
            }
        }
        unreachable!("conflicting rows are equal")
    }

    fn to_error(&self, h: &PartialObsGame) -> Error {
        Error::NotObservationBased(format!(
            "{} and {} have the same observations but rows {} and {}",
            fmt_prefix_h(h, &self.first),
            fmt_prefix_h(h, &self.second),
            fmt_dist(&self.row_first),
            fmt_dist(&self.row_second)
        ))
    }
}

/// Groups rows by `key`, failing on the first pair of rows that disagree.
pub fn collapse(
    key: impl Fn(&PrefixH) -> ObsSeqH,
    table: impl IntoIterator<Item = (PrefixH, Distribution<Action>)>,
) -> core::result::Result<BTreeMap<ObsSeqH, Distribution<Action>>, Box<Conflict>> {
    let mut out: BTreeMap<ObsSeqH, (PrefixH, Distribution<Action>)> = BTreeMap::new();
    for (rho, d) in table {
        let k = key(&rho);
        match out.get(&k) {
            Some((other, d0)) if *d0 != d => {
                return Err(Box::new(Conflict {
                    first: other.clone(),
                    second: rho,
                    row_first: d0.clone(),
                    row_second: d,
                }));
            }
            Some(_) => {}
            None => {
                out.insert(k, (rho, d));
            }
        }
    }
    Ok(out.into_iter().map(|(k, (_, d))| (k, d)).collect())
}

pub fn fmt_prefix_h(h: &PartialObsGame, rho: &PrefixH) -> String {
    let mut s = String::new();
    for (k, st) in rho.states.iter().enumerate() {
        if k > 0 {
            let a = rho.actions[k - 1];
            let owner = h.owner_of(rho.states[k - 1]);
            s.push(' ');
            s.push_str(
                h.actions_of(owner)
                    .get(a.idx())
                    .map(String::as_str)
                    .unwrap_or("?"),
            );
            s.push(' ');
        }
        s.push_str(h.states.get(st.idx()).map(String::as_str).unwrap_or("?"));
    }
    s
}

fn fmt_dist<X: Ord + Clone + core::fmt::Debug>(d: &Distribution<X>) -> String {
    let parts: Vec<String> = d.iter().map(|(x, w)| format!("{x:?}:{w}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Classical cone mass `μ(s0) · ∏ policy(ρ_k)(a_k) · δ(s_k, a_k)(s_{k+1})`.
pub fn cone_prob_pog(
    h: &PartialObsGame,
    alpha: &dyn Policy,
    beta: &dyn Policy,
    rho: &PrefixH,
) -> Result<Rational> {
    let mut acc = h.initial.prob(&rho.first());
    for k in 0..rho.actions.len() {
        if acc.is_zero() {
            return Ok(acc);
        }
        let s = rho.states[k];
        let a = rho.actions[k];
        let step = h.step(s, a)?.prob(&rho.states[k + 1]);
        if step.is_zero() {
            return Ok(step);
        }
        let pol = match h.owner_of(s) {
            Player::One => alpha,
            Player::Two => beta,
        };
        acc = acc * pol.act(h, &rho.upto(k))?.prob(&a) * step;
    }
    Ok(acc)
}

/// Positive-mass histories with exactly `len` states and their masses.
pub fn support_pog(
    h: &PartialObsGame,
    alpha: &dyn Policy,
    beta: &dyn Policy,
    len: usize,
) -> Result<Vec<(PrefixH, Rational)>> {
    let mut layer: Vec<(PrefixH, Rational)> = h
        .initial
        .iter()
        .map(|(s, w)| (PrefixH::start(*s), w.clone()))
        .collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for (p, m) in &layer {
            let s = p.last();
            let pol = match h.owner_of(s) {
                Player::One => alpha,
                Player::Two => beta,
            };
            for (a, pa) in pol.act(h, p)?.iter() {
                for (t, pt) in h.step(s, *a)?.iter() {
                    next.push((p.extended(*a, *t), m * pa * pt));
                }
            }
        }
        layer = next;
    }
    Ok(layer)
}

/// POMDP: one player, one observation partition, a single initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pomdp {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub delta: BTreeMap<(State, Action), Distribution<State>>,
    pub obs: Partition,
    pub initial: State,
}

impl Pomdp {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = State> + Clone {
        (0..self.n_states() as u32).map(State)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = Action> + Clone {
        (0..self.n_actions() as u32).map(Action)
    }

    pub fn step(&self, s: State, a: Action) -> Result<&Distribution<State>> {
        if s.idx() >= self.n_states() {
            return Err(Error::UnknownState(s.0));
        }
        self.delta.get(&(s, a)).ok_or(Error::UnknownAction(a.0))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.n_states();
        if n == 0 {
            r.push(Violation::EmptyAlphabet("state set"));
        }
        if self.actions.is_empty() {
            r.push(Violation::EmptyAlphabet("action set"));
        }
        check_names(&mut r, &self.states);
        check_names(&mut r, &self.actions);
        if self.initial.idx() >= n {
            r.push(Violation::InitialOutOfRange);
        }
        for s in self.state_ids() {
            for a in self.action_ids() {
                let row = || format!("delta({}, {})", self.states[s.idx()], self.actions[a.idx()]);
                match self.delta.get(&(s, a)) {
                    None => r.push(Violation::MissingRow(row())),
                    Some(d) => check_row(&mut r, row, d, |t| (t.idx() >= n).then_some(t.0)),
                }
            }
        }
        if self.obs.n_elems() != n {
            r.push(Violation::NotAPartition(format!(
                "obs covers {} states, POMDP has {n}",
                self.obs.n_elems()
            )));
        }
        self.obs.check("obs", &mut r);
        r
    }

    pub fn observation_seq(&self, rho: &PrefixH) -> ObsSeqH {
        ObsSeqH {
            obs: rho.states.iter().map(|&s| self.obs.block_of(s)).collect(),
            actions: rho.actions.clone(),
        }
    }

    /// Every history from the initial state with at most `max_len` states,
    /// whether or not its transitions are possible.
    pub fn all_histories(&self, max_len: usize) -> Vec<PrefixH> {
        let mut layer = vec![PrefixH::start(self.initial)];
        let mut out = Vec::new();
        for len in 1..=max_len {
            if len > 1 {
                let mut next = Vec::new();
                for p in &layer {
                    for a in self.action_ids() {
                        for t in self.state_ids() {
                            next.push(p.extended(a, t));
                        }
                    }
                }
                layer = next;
            }
            out.extend(layer.iter().cloned());
        }
        out
    }

    /// Cone mass of `ρ` under an observation-based strategy, from the initial
    /// state.
    pub fn cone_prob(&self, alpha: &ObsBasedStrategy, rho: &PrefixH) -> Result<Rational> {
        if rho.first() != self.initial {
            return Ok(Rational::zero());
        }
        let mut acc = Rational::one();
        for k in 0..rho.actions.len() {
            let a = rho.actions[k];
            let step = self.step(rho.states[k], a)?.prob(&rho.states[k + 1]);
            if step.is_zero() {
                return Ok(step);
            }
            acc = acc * alpha.get_obs(&self.observation_seq(&rho.upto(k)))?.prob(&a) * step;
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        Ok(acc)
    }

    /// Collapses a prefix-keyed table to an observation-based strategy.
    pub fn obs_based(
        &self,
        max_len: usize,
        table: impl IntoIterator<Item = (PrefixH, Distribution<Action>)>,
    ) -> Result<ObsBasedStrategy> {
        let table =
            collapse(|r| self.observation_seq(r), table).map_err(|c| c.to_error(&self.to_pog()))?;
        Ok(ObsBasedStrategy {
            player: Player::One,
            max_len,
            table,
        })
    }

    /// The POMDP as an alternating game: `S1 = S`, `S2 = S × A` (Dirac into
    /// `(s, a)`, then `δ(s, a)` under Player 2's single action). Player 1 sees
    /// `(obs(s), a)` at intermediate states; Player 2 sees everything.
    pub fn to_pog(&self) -> PartialObsGame {
        let n = self.n_states();
        let na = self.n_actions();
        let inter = |s: usize, a: usize| State((n + s * na + a) as u32);
        let mut states = self.states.clone();
        let mut owner = vec![Player::One; n];
        for s in 0..n {
            for a in 0..na {
                states.push(format!("{}.{}", self.states[s], self.actions[a]));
                owner.push(Player::Two);
            }
        }
        let mut delta = BTreeMap::new();
        for ((s, a), d) in &self.delta {
            delta.insert((*s, *a), Distribution::dirac(inter(s.idx(), a.idx())));
            delta.insert((inter(s.idx(), a.idx()), Action(0)), d.clone());
        }
        let total = n * (1 + na);
        let obs = &self.obs;
        let obs1 = Partition::by_key(total, |t| {
            if t.idx() < n {
                (obs.block_of(t), None)
            } else {
                let k = t.idx() - n;
                (obs.block_of(State((k / na) as u32)), Some(k % na))
            }
        });
        PartialObsGame {
            states,
            owner,
            actions1: self.actions.clone(),
            actions2: vec![String::from("_")],
            delta,
            obs1,
            obs2: Partition::complete(total),
            initial: Distribution::dirac(self.initial),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// s0 --a--> {s1: 1/2, s2: 1/2}, s1/s2 absorbing; s1 and s2 share a block.
    fn split_pomdp() -> Pomdp {
        let mut delta = BTreeMap::new();
        for a in 0..2u32 {
            delta.insert(
                (State(0), Action(a)),
                Distribution::new([(State(1), r(1, 2)), (State(2), r(1, 2))]).unwrap(),
            );
            delta.insert((State(1), Action(a)), Distribution::dirac(State(1)));
            delta.insert((State(2), Action(a)), Distribution::dirac(State(2)));
        }
        Pomdp {
            states: vec!["s0".into(), "s1".into(), "s2".into()],
            actions: vec!["a".into(), "b".into()],
            delta,
            obs: Partition::from_blocks(3, vec![vec![State(0)], vec![State(1), State(2)]]),
            initial: State(0),
        }
    }

    #[test]
    fn embedded_pomdp_is_well_formed() {
        let m = split_pomdp();
        assert!(m.validate().is_ok(), "{}", m.validate());
        let h = m.to_pog();
        assert!(h.validate().is_ok(), "{}", h.validate());
        assert_eq!(h.actions2.len(), 1);
        assert!(h.is_one_sided());
    }

    #[test]
    fn overlapping_blocks_are_not_a_partition() {
        let mut m = split_pomdp();
        m.obs = Partition::from_blocks(3, vec![vec![State(0), State(1)], vec![State(1), State(2)]]);
        let rep = m.validate();
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotAPartition(_))));
        assert!(alloc::string::ToString::to_string(&rep).contains("not a partition"));
    }

    #[test]
    fn blocks_crossing_players_are_accepted() {
        let m = split_pomdp();
        let mut h = m.to_pog();
        h.obs1 = Partition::blind(h.n_states());
        assert!(h.validate().is_ok());
    }

    #[test]
    fn observation_sequences() {
        let m = split_pomdp();
        let h = m.to_pog();
        let p = PrefixH::from_parts(
            vec![State(0), State(3), State(1)],
            vec![Action(0), Action(0)],
        )
        .unwrap();
        let q = PrefixH::from_parts(
            vec![State(0), State(3), State(2)],
            vec![Action(0), Action(0)],
        )
        .unwrap();
        assert_eq!(
            h.observation_seq(Player::One, &p),
            h.observation_seq(Player::One, &q)
        );
        assert_ne!(
            h.observation_seq(Player::Two, &p),
            h.observation_seq(Player::Two, &q)
        );
        let blind = Partition::blind(h.n_states());
        assert!(p.states().iter().all(|&s| blind.block_of(s) == 0));
        assert_eq!(h.observation_seq(Player::Two, &p).actions, p.actions());
    }

    #[test]
    fn inconsistent_table_names_a_witness() {
        let m = split_pomdp();
        let p = PrefixH::from_parts(vec![State(0), State(1)], vec![Action(0)]).unwrap();
        let q = PrefixH::from_parts(vec![State(0), State(2)], vec![Action(0)]).unwrap();
        let e = m
            .obs_based(
                2,
                [
                    (p, Distribution::dirac(Action(0))),
                    (q, Distribution::dirac(Action(1))),
                ],
            )
            .unwrap_err();
        assert!(matches!(e, Error::NotObservationBased(_)));
    }

    #[test]
    fn cones_in_the_embedding_halve_and_conserve() {
        let m = split_pomdp();
        let h = m.to_pog();
        let all = h.histories_up_to(5);
        let alpha = ObsBasedStrategy::from_prefix_table(
            &h,
            Player::One,
            5,
            all.iter()
                .filter(|p| h.owner_of(p.last()) == Player::One)
                .map(|p| (p.clone(), Distribution::dirac(Action(1)))),
        )
        .unwrap();
        let beta = PogStrategy {
            player: Player::Two,
            max_len: 5,
            table: all
                .iter()
                .filter(|p| h.owner_of(p.last()) == Player::Two)
                .map(|p| (p.clone(), Distribution::dirac(Action(0))))
                .collect(),
        };
        let p = PrefixH::from_parts(
            vec![State(0), State(4), State(1)],
            vec![Action(1), Action(0)],
        )
        .unwrap();
        assert_eq!(cone_prob_pog(&h, &alpha, &beta, &p).unwrap(), r(1, 2));
        for len in 1..=5 {
            let total: Rational = support_pog(&h, &alpha, &beta, len)
                .unwrap()
                .into_iter()
                .map(|(_, m)| m)
                .sum();
            assert!(total.is_one());
        }
    }
}
