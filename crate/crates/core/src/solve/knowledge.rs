//! Knowledge (subset) construction and sure winning.
//!
//! The protagonist sees its observation blocks and every action; the other
//! player and the random moves are merged into one perfectly informed
//! adversary. Sure winning only depends on supports, and a uniformly
//! randomizing opponent already produces every outcome, so the opponent's
//! own information does not matter here.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::objective::{Objective, ObjectiveKind};
use crate::pog::{Action, PartialObsGame, Player, State};
use crate::solve::parity::ParityGame;
use crate::solve::Mode;

/// Largest knowledge game built before giving up.
pub const MAX_KNOWLEDGE_NODES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Init,
    /// A set of states of one owner inside one block of the protagonist.
    Set,
    /// The protagonist picked this action at the set; the adversary resolves.
    Act(Action),
    Win,
    Lose,
}

/// `set` is the knowledge; `track` is the objective's bookkeeping subset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KNode {
    pub kind: NodeKind,
    pub set: Vec<State>,
    pub track: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Track {
    None,
    Safe(Vec<bool>),
    /// Members not yet through `T`; empty means every branch got there.
    Reach(Vec<bool>),
    /// Breakpoint: members not through `T` since the last empty track.
    Buchi(Vec<bool>),
    /// Priorities that must be constant on every reachable set.
    Observable(Vec<u32>),
}

impl Track {
    /// The tracking for an objective over the states of the game.
    pub fn for_objective(obj: &Objective) -> Track {
        match obj {
            Objective::Safe(t) => Track::Safe(t.clone()),
            Objective::Reach(t) => Track::Reach(t.clone()),
            Objective::Buchi(t) => Track::Buchi(t.clone()),
            Objective::CoBuchi(_) | Objective::Parity(_) => Track::Observable(obj.priorities()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeGame {
    pub protagonist: Player,
    pub nodes: Vec<KNode>,
    pub game: ParityGame,
    pub init: usize,
}

fn post(h: &PartialObsGame, xs: &[State], a: Action) -> Vec<State> {
    let mut out: Vec<State> = Vec::new();
    for &s in xs {
        if let Some(d) = h.delta.get(&(s, a)) {
            out.extend(d.support().copied());
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Splits `xs` by the protagonist's blocks, in block order.
fn split(h: &PartialObsGame, p: Player, xs: &[State]) -> Vec<Vec<State>> {
    let part = h.partition(p);
    let mut by: BTreeMap<usize, Vec<State>> = BTreeMap::new();
    for &s in xs {
        by.entry(part.block_of(s)).or_default().push(s);
    }
    by.into_values().collect()
}

struct Builder<'a> {
    h: &'a PartialObsGame,
    me: Player,
    track: &'a Track,
    ids: BTreeMap<KNode, usize>,
    nodes: Vec<KNode>,
    succ: Vec<Vec<usize>>,
    todo: Vec<usize>,
}

impl Builder<'_> {
    fn id(&mut self, n: KNode) -> Result<usize> {
        if let Some(&i) = self.ids.get(&n) {
            return Ok(i);
        }
        if self.nodes.len() >= MAX_KNOWLEDGE_NODES {
            return Err(Error::BoundsExceeded {
                estimate: (1u128 << self.h.n_states().min(100)) * self.h.obs1.len().max(1) as u128,
                limit: MAX_KNOWLEDGE_NODES as u128,
            });
        }
        let i = self.nodes.len();
        self.ids.insert(n.clone(), i);
        self.nodes.push(n);
        self.succ.push(Vec::new());
        self.todo.push(i);
        Ok(i)
    }

    /// The set node reached with knowledge `set`, given the predecessor's
    /// track already pushed through the same move (`moved`) and whether that
    /// predecessor's track was empty (breakpoint reset).
    fn enter(&mut self, set: Vec<State>, moved: Vec<State>, reset: bool) -> Result<usize> {
        let kind = NodeKind::Set;
        let node = match self.track {
            Track::None => KNode {
                kind,
                set,
                track: Vec::new(),
            },
            Track::Safe(t) => {
                if set.iter().any(|s| !t[s.idx()]) {
                    KNode {
                        kind: NodeKind::Lose,
                        set: Vec::new(),
                        track: Vec::new(),
                    }
                } else {
                    KNode {
                        kind,
                        set,
                        track: Vec::new(),
                    }
                }
            }
            Track::Reach(t) => {
                let r: Vec<State> = moved.into_iter().filter(|s| !t[s.idx()]).collect();
                if r.is_empty() {
                    KNode {
                        kind: NodeKind::Win,
                        set: Vec::new(),
                        track: Vec::new(),
                    }
                } else {
                    KNode {
                        kind,
                        set,
                        track: r,
                    }
                }
            }
            Track::Buchi(t) => {
                let base = if reset { set.clone() } else { moved };
                let r = base.into_iter().filter(|s| !t[s.idx()]).collect();
                KNode {
                    kind,
                    set,
                    track: r,
                }
            }
            Track::Observable(p) => {
                let first = p[set[0].idx()];
                if let Some(s) = set.iter().find(|s| p[s.idx()] != first) {
                    return Err(Error::Domain(format!(
                        "priorities are not observable: states {} and {} share a knowledge set with priorities {} and {}",
                        self.h.states[set[0].idx()],
                        self.h.states[s.idx()],
                        first,
                        p[s.idx()]
                    )));
                }
                KNode {
                    kind,
                    set,
                    track: Vec::new(),
                }
            }
        };
        self.id(node)
    }

    fn expand(&mut self, v: usize) -> Result<()> {
        let node = self.nodes[v].clone();
        let mut out = Vec::new();
        match node.kind {
            NodeKind::Win | NodeKind::Lose => out.push(v),
            NodeKind::Init => {
                let supp: Vec<State> = self.h.initial.support().copied().collect();
                for block in split(self.h, self.me, &supp) {
                    out.push(self.enter(block.clone(), block, true)?);
                }
            }
            NodeKind::Set => {
                let owner = self.h.owner_of(node.set[0]);
                let reset = node.track.is_empty();
                for a in self.h.actions_at(node.set[0]) {
                    if owner == self.me {
                        out.push(self.id(KNode {
                            kind: NodeKind::Act(a),
                            set: node.set.clone(),
                            track: node.track.clone(),
                        })?);
                    } else {
                        self.resolve(&node, a, reset, &mut out)?;
                    }
                }
            }
            NodeKind::Act(a) => {
                let reset = node.track.is_empty();
                self.resolve(&node, a, reset, &mut out)?;
            }
        }
        out.sort_unstable();
        out.dedup();
        self.succ[v] = out;
        Ok(())
    }

    fn resolve(
        &mut self,
        node: &KNode,
        a: Action,
        reset: bool,
        out: &mut Vec<usize>,
    ) -> Result<()> {
        let moved_all = post(self.h, &node.track, a);
        for block in split(self.h, self.me, &post(self.h, &node.set, a)) {
            let moved: Vec<State> = moved_all
                .iter()
                .copied()
                .filter(|s| block.contains(s))
                .collect();
            out.push(self.enter(block, moved, reset)?);
        }
        Ok(())
    }
}

/// Builds the knowledge game of `protagonist` with objective bookkeeping.
pub fn build_knowledge_game(
    h: &PartialObsGame,
    protagonist: Player,
    track: &Track,
) -> Result<KnowledgeGame> {
    build_from(h, protagonist, track, &[]).map(|(kg, _)| kg)
}

/// Same, plus one extra root per set in `roots` (each a set of states the
/// protagonist cannot tell apart); returns the root nodes.
fn build_from(
    h: &PartialObsGame,
    protagonist: Player,
    track: &Track,
    roots: &[Vec<State>],
) -> Result<(KnowledgeGame, Vec<usize>)> {
    let mut b = Builder {
        h,
        me: protagonist,
        track,
        ids: BTreeMap::new(),
        nodes: Vec::new(),
        succ: Vec::new(),
        todo: Vec::new(),
    };
    let init = b.id(KNode {
        kind: NodeKind::Init,
        set: Vec::new(),
        track: Vec::new(),
    })?;
    let mut root_ids = Vec::with_capacity(roots.len());
    for r in roots {
        root_ids.push(b.enter(r.clone(), r.clone(), true)?);
    }
    while let Some(v) = b.todo.pop() {
        b.expand(v)?;
    }
    let neutral = match track {
        Track::None | Track::Safe(_) => 0,
        Track::Reach(_) | Track::Buchi(_) => 1,
        Track::Observable(p) => p.iter().copied().max().unwrap_or(0),
    };
    let mut owner = Vec::with_capacity(b.nodes.len());
    let mut priority = Vec::with_capacity(b.nodes.len());
    for n in &b.nodes {
        let mine = n.kind == NodeKind::Set && h.owner_of(n.set[0]) == protagonist;
        owner.push(if mine { Player::One } else { Player::Two });
        priority.push(match (&n.kind, track) {
            (NodeKind::Win, _) => 0,
            (NodeKind::Lose, _) => 1,
            (NodeKind::Set, Track::Buchi(_)) => u32::from(!n.track.is_empty()),
            (NodeKind::Set, Track::Observable(p)) => p[n.set[0].idx()],
            _ => neutral,
        });
    }
    Ok((
        KnowledgeGame {
            protagonist,
            nodes: b.nodes,
            game: ParityGame {
                owner,
                priority,
                succ: b.succ,
            },
            init,
        },
        root_ids,
    ))
}

/// Plain knowledge construction (no objective).
pub fn knowledge_construction(h: &PartialObsGame, protagonist: Player) -> Result<KnowledgeGame> {
    build_knowledge_game(h, protagonist, &Track::None)
}

impl KnowledgeGame {
    /// The protagonist's knowledge sets (one entry per distinct set).
    pub fn knowledge_sets(&self) -> Vec<Vec<State>> {
        let mut v: Vec<Vec<State>> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| n.kind == NodeKind::Set && self.game.owner[*i] == Player::One)
            .map(|(_, n)| n.set.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Solution of a qualitative question, from the initial distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegion {
    pub mode: Mode,
    pub objective: ObjectiveKind,
    pub protagonist: Player,
    pub initial_winning: bool,
    /// Knowledge sets (with bookkeeping) from which the protagonist wins.
    pub winning: Vec<(Vec<State>, Vec<State>)>,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    None,
    /// Knowledge-based: (knowledge set, bookkeeping) to a move distribution.
    Knowledge(BTreeMap<(Vec<State>, Vec<State>), Distribution<Action>>),
    /// A fixed action word (POMDP positive reachability).
    Word(Vec<Action>),
    /// Play every action uniformly at random.
    Uniform,
}

/// Sure winning for `protagonist` by knowledge construction plus Zielonka.
/// The opponent must see the state or have a single action. coBüchi and
/// parity objectives need priorities that are constant on every reachable
/// knowledge set; otherwise this returns a domain error.
pub fn sure_winning(
    h: &PartialObsGame,
    objective: &Objective,
    protagonist: Player,
) -> Result<WinningRegion> {
    let opp = protagonist.opponent();
    if !h.partition(opp).is_complete() && h.actions_of(opp).len() > 1 {
        return Err(Error::Domain(String::from(
            "two-sided game: the opponent neither sees the state nor has a single action",
        )));
    }
    sure_winning_any_opponent(h, objective, protagonist)
}

/// [`sure_winning`] without the one-sided check. Sound for any opponent: the
/// opponent playing every action uniformly already produces every outcome,
/// and that strategy is observation-based whatever the opponent observes.
pub fn sure_winning_any_opponent(
    h: &PartialObsGame,
    objective: &Objective,
    protagonist: Player,
) -> Result<WinningRegion> {
    if objective.size() != h.n_states() {
        return Err(Error::Domain(format!(
            "objective covers {} states, game has {}",
            objective.size(),
            h.n_states()
        )));
    }
    let kg = build_knowledge_game(h, protagonist, &Track::for_objective(objective))?;
    let sol = kg.game.solve();
    let mut winning = Vec::new();
    let mut witness = BTreeMap::new();
    for (v, n) in kg.nodes.iter().enumerate() {
        if n.kind != NodeKind::Set
            || kg.game.owner[v] != Player::One
            || sol.winner[v] != Player::One
        {
            continue;
        }
        winning.push((n.set.clone(), n.track.clone()));
        if let Some(t) = sol.strategy[v] {
            if let NodeKind::Act(a) = kg.nodes[t].kind {
                witness.insert((n.set.clone(), n.track.clone()), Distribution::dirac(a));
            }
        }
    }
    Ok(WinningRegion {
        mode: Mode::Sure,
        objective: objective.kind(),
        protagonist,
        initial_winning: sol.winner[kg.init] == Player::One,
        winning,
        witness: Witness::Knowledge(witness),
    })
}

/// For every set in `roots`: does the protagonist win surely when its
/// knowledge starts as that set?
pub fn sure_winning_from(
    h: &PartialObsGame,
    objective: &Objective,
    protagonist: Player,
    roots: &[Vec<State>],
) -> Result<Vec<bool>> {
    let (kg, ids) = build_from(h, protagonist, &Track::for_objective(objective), roots)?;
    let sol = kg.game.solve();
    Ok(ids
        .into_iter()
        .map(|v| sol.winner[v] == Player::One)
        .collect())
}
