//! Almost-sure reachability, Büchi and safety for POMDPs and one-sided games.
//!
//! Player 1 keeps its knowledge set (belief support) and plays uniformly over
//! the actions that keep it among winning sets. On positions `(state,
//! knowledge)` the perfectly informed Player 2 and the random moves then form
//! an MDP. A set is dropped when Player 2 can keep some position of it away
//! from the target forever; once no set is dropped, every position reaches
//! the target within a bounded number of steps with probability bounded
//! away from zero, which gives probability 1.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::objective::{Objective, ObjectiveKind};
use crate::pog::{Action, PartialObsGame, Player, Pomdp, State};
use crate::solve::knowledge::{sure_winning, WinningRegion, Witness};
use crate::solve::scc::bottom_sccs;
use crate::solve::Mode;

/// Belief supports of a POMDP reachable from the initial state, with their
/// action-labelled successors. States flagged in `dropped` are left out of
/// every support (used for targets already reached).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefSupportMdp {
    pub supports: Vec<Vec<State>>,
    pub index: BTreeMap<Vec<State>, usize>,
    /// `None` when the initial state is dropped.
    pub initial: Option<usize>,
    /// `succ[k][a]`: observation block to successor support.
    pub succ: Vec<Vec<BTreeMap<usize, usize>>>,
    pub dropped: Vec<bool>,
}

impl BeliefSupportMdp {
    pub fn build(m: &Pomdp, dropped: &[bool]) -> Self {
        let mut b = BeliefSupportMdp {
            supports: Vec::new(),
            index: BTreeMap::new(),
            initial: None,
            succ: Vec::new(),
            dropped: dropped.to_vec(),
        };
        if !dropped[m.initial.idx()] {
            b.initial = Some(b.intern(vec![m.initial]));
        }
        let mut k = 0;
        while k < b.supports.len() {
            let set = b.supports[k].clone();
            let mut rows = Vec::with_capacity(m.n_actions());
            for a in m.action_ids() {
                let mut by: BTreeMap<usize, Vec<State>> = BTreeMap::new();
                for &s in &set {
                    for &t in m.delta[&(s, a)].support() {
                        if !dropped[t.idx()] {
                            by.entry(m.obs.block_of(t)).or_default().push(t);
                        }
                    }
                }
                let mut row = BTreeMap::new();
                for (blk, mut ts) in by {
                    ts.sort_unstable();
                    ts.dedup();
                    row.insert(blk, b.intern(ts));
                }
                rows.push(row);
            }
            b.succ.push(rows);
            k += 1;
        }
        b
    }

    fn intern(&mut self, set: Vec<State>) -> usize {
        if let Some(&i) = self.index.get(&set) {
            return i;
        }
        self.supports.push(set.clone());
        self.index.insert(set, self.supports.len() - 1);
        self.supports.len() - 1
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    /// The support after `a` from support `k` when the true successor is `t`.
    pub fn successor(&self, m: &Pomdp, k: usize, a: Action, t: State) -> Option<usize> {
        self.succ[k][a.idx()].get(&m.obs.block_of(t)).copied()
    }

    /// Does the knowledge-based strategy `strat` win almost surely? The
    /// Markov chain on `(state, support)` pairs is built explicitly; for
    /// reachability (`dropped` = targets) every reachable bottom SCC must be
    /// the target sink, for Büchi every one must hold a target state.
    pub fn strategy_wins(
        &self,
        m: &Pomdp,
        kind: ObjectiveKind,
        target: &[bool],
        strat: &BTreeMap<Vec<State>, Distribution<Action>>,
    ) -> bool {
        let Some(k0) = self.initial else {
            return true;
        };
        // node 0 is the target sink
        let mut ids: BTreeMap<(State, usize), usize> = BTreeMap::new();
        let mut nodes: Vec<(State, usize)> = vec![(State(u32::MAX), usize::MAX)];
        let mut succ: Vec<Vec<usize>> = vec![vec![0]];
        ids.insert((m.initial, k0), 1);
        nodes.push((m.initial, k0));
        succ.push(Vec::new());
        let mut v = 1;
        while v < nodes.len() {
            let (s, k) = nodes[v];
            let Some(d) = strat.get(&self.supports[k]) else {
                return false;
            };
            let mut out = Vec::new();
            for &a in d.support() {
                for &t in m.delta[&(s, a)].support() {
                    if self.dropped[t.idx()] {
                        out.push(0);
                        continue;
                    }
                    let key = (t, self.successor(m, k, a, t).expect("support successor"));
                    let id = *ids.entry(key).or_insert_with(|| {
                        nodes.push(key);
                        succ.push(Vec::new());
                        nodes.len() - 1
                    });
                    out.push(id);
                }
            }
            out.sort_unstable();
            out.dedup();
            succ[v] = out;
            v += 1;
        }
        bottom_sccs(&succ, &[1]).iter().all(|c| match kind {
            ObjectiveKind::Buchi => c.iter().any(|&u| u != 0 && target[nodes[u].0.idx()]),
            _ => c == &[0],
        })
    }
}

/// Knowledge sets of Player 1 in a one-sided game, with successors per action.
struct Arena {
    sets: Vec<Vec<State>>,
    owner: Vec<Player>,
    /// `moves[k][a]`: Player-1 block to successor set.
    moves: Vec<Vec<BTreeMap<usize, usize>>>,
    init: Vec<usize>,
}

impl Arena {
    fn build(h: &PartialObsGame, dropped: &[bool]) -> Result<Arena> {
        let mut index: BTreeMap<Vec<State>, usize> = BTreeMap::new();
        let mut a = Arena {
            sets: Vec::new(),
            owner: Vec::new(),
            moves: Vec::new(),
            init: Vec::new(),
        };
        let mut intern = |a: &mut Arena, set: Vec<State>| -> Result<usize> {
            if let Some(&i) = index.get(&set) {
                return Ok(i);
            }
            if a.sets.len() >= crate::solve::knowledge::MAX_KNOWLEDGE_NODES {
                return Err(Error::BoundsExceeded {
                    estimate: 1u128 << h.n_states().min(100),
                    limit: crate::solve::knowledge::MAX_KNOWLEDGE_NODES as u128,
                });
            }
            a.owner.push(h.owner_of(set[0]));
            index.insert(set.clone(), a.sets.len());
            a.sets.push(set);
            Ok(a.sets.len() - 1)
        };
        let split = |xs: &mut dyn Iterator<Item = State>| -> BTreeMap<usize, Vec<State>> {
            let mut by: BTreeMap<usize, Vec<State>> = BTreeMap::new();
            for t in xs {
                if !dropped[t.idx()] {
                    by.entry(h.obs1.block_of(t)).or_default().push(t);
                }
            }
            for v in by.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
            by
        };
        for (_, set) in split(&mut h.initial.support().copied()) {
            let k = intern(&mut a, set)?;
            a.init.push(k);
        }
        let mut k = 0;
        while k < a.sets.len() {
            let set = a.sets[k].clone();
            let mut rows = Vec::new();
            for act in h.actions_at(set[0]) {
                let mut it = set
                    .iter()
                    .flat_map(|&s| h.delta[&(s, act)].support().copied());
                let mut row = BTreeMap::new();
                for (blk, ts) in split(&mut it) {
                    row.insert(blk, intern(&mut a, ts)?);
                }
                rows.push(row);
            }
            a.moves.push(rows);
            k += 1;
        }
        Ok(a)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Succ {
    Target,
    Pos(usize),
}

/// The nested fixpoint. `dropped` are absorbing targets (reachability);
/// `recurrent` are the states to visit infinitely often (Büchi).
fn solve_one_sided(
    h: &PartialObsGame,
    dropped: &[bool],
    recurrent: &[bool],
) -> Result<(Vec<bool>, Vec<Vec<Action>>, Arena)> {
    let ar = Arena::build(h, dropped)?;
    let n = ar.sets.len();
    let mut base = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for s in &ar.sets {
        base.push(acc);
        acc += s.len();
    }
    base.push(acc);
    let npos = acc;
    let pos_of = |t: State, k: usize| {
        base[k]
            + ar.sets[k]
                .binary_search(&t)
                .expect("state in its knowledge set")
    };
    let mut set_of = vec![0; npos];
    let mut state_of = vec![State(0); npos];
    for k in 0..n {
        for (j, &s) in ar.sets[k].iter().enumerate() {
            set_of[base[k] + j] = k;
            state_of[base[k] + j] = s;
        }
    }
    // edges[p][a] = successors of position p under the a-th action of its owner
    let mut edges: Vec<Vec<Vec<Succ>>> = Vec::with_capacity(npos);
    for p in 0..npos {
        let (s, k) = (state_of[p], set_of[p]);
        let mut per = Vec::new();
        for a in h.actions_at(s) {
            let mut out = Vec::new();
            for &t in h.delta[&(s, a)].support() {
                if dropped[t.idx()] {
                    out.push(Succ::Target);
                } else {
                    let k2 = ar.moves[k][a.idx()][&h.obs1.block_of(t)];
                    out.push(Succ::Pos(pos_of(t, k2)));
                }
            }
            per.push(out);
        }
        edges.push(per);
    }

    let mut alive = vec![true; n];
    loop {
        let allowed: Vec<Vec<Action>> = (0..n)
            .map(|k| {
                let row = &ar.moves[k];
                (0..row.len())
                    .filter(|&a| row[a].values().all(|&k2| alive[k2]))
                    .map(|a| Action(a as u32))
                    .collect()
            })
            .collect();
        // Player-2 sets survive only if every move stays alive.
        let ok: Vec<bool> = (0..n)
            .map(|k| {
                alive[k] && (ar.owner[k] == Player::One || allowed[k].len() == ar.moves[k].len())
            })
            .collect();
        let live_moves = |p: usize| -> &[Action] { &allowed[set_of[p]] };

        // Z: positions where Player 2 keeps away from the targets forever with
        // probability 1 against the uniform strategy.
        let mut z: Vec<bool> = (0..npos)
            .map(|p| ok[set_of[p]] && !recurrent[state_of[p].idx()])
            .collect();
        let in_z = |z: &[bool], v: &[Succ]| v.iter().all(|s| matches!(s, Succ::Pos(q) if z[*q]));
        loop {
            let mut changed = false;
            for p in 0..npos {
                if !z[p] {
                    continue;
                }
                let moves = live_moves(p);
                let keep = match ar.owner[set_of[p]] {
                    Player::One => moves.iter().all(|a| in_z(&z, &edges[p][a.idx()])),
                    Player::Two => moves.iter().any(|a| in_z(&z, &edges[p][a.idx()])),
                };
                if !keep {
                    z[p] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut removed = false;
        for k in 0..n {
            if !alive[k] {
                continue;
            }
            let dead = !ok[k] || allowed[k].is_empty() || (base[k]..base[k + 1]).any(|p| z[p]);
            if dead {
                alive[k] = false;
                removed = true;
            }
        }
        if !removed {
            return Ok((alive, allowed, ar));
        }
    }
}

fn region(
    kind: ObjectiveKind,
    alive: &[bool],
    allowed: &[Vec<Action>],
    ar: &Arena,
) -> WinningRegion {
    let mut winning = Vec::new();
    let mut witness = BTreeMap::new();
    for k in 0..ar.sets.len() {
        if alive[k] && ar.owner[k] == Player::One {
            winning.push((ar.sets[k].clone(), Vec::new()));
            witness.insert(
                (ar.sets[k].clone(), Vec::new()),
                Distribution::uniform(allowed[k].iter().copied()),
            );
        }
    }
    WinningRegion {
        mode: Mode::AlmostSure,
        objective: kind,
        protagonist: Player::One,
        initial_winning: ar.init.iter().all(|&k| alive[k]),
        winning,
        witness: Witness::Knowledge(witness),
    }
}

fn one_sided(h: &PartialObsGame, target: &[bool]) -> Result<()> {
    if !h.is_one_sided() {
        return Err(Error::Domain(String::from(
            "almost-sure solver needs Player 2 to see the state or to have one action",
        )));
    }
    if target.len() != h.n_states() {
        return Err(Error::Domain(alloc::format!(
            "target covers {} states, game has {}",
            target.len(),
            h.n_states()
        )));
    }
    Ok(())
}

/// Almost-sure reachability of `target` for Player 1 in a one-sided game.
pub fn almost_sure_reach_pog(h: &PartialObsGame, target: &[bool]) -> Result<WinningRegion> {
    one_sided(h, target)?;
    let none = vec![false; h.n_states()];
    let (alive, allowed, ar) = solve_one_sided(h, target, &none)?;
    Ok(region(ObjectiveKind::Reach, &alive, &allowed, &ar))
}

/// Almost-sure Büchi (`target` infinitely often) in a one-sided game.
pub fn almost_sure_buchi_pog(h: &PartialObsGame, target: &[bool]) -> Result<WinningRegion> {
    one_sided(h, target)?;
    let none = vec![false; h.n_states()];
    let (alive, allowed, ar) = solve_one_sided(h, &none, target)?;
    Ok(region(ObjectiveKind::Buchi, &alive, &allowed, &ar))
}

/// Lifts a target on POMDP states to the alternating form of
/// [`Pomdp::to_pog`]: an intermediate state `(s, a)` inherits `s`.
pub fn lift_to_pog(m: &Pomdp, target: &[bool]) -> Vec<bool> {
    let (n, na) = (m.n_states(), m.n_actions());
    (0..n * (1 + na))
        .map(|t| {
            if t < n {
                target[t]
            } else {
                target[(t - n) / na]
            }
        })
        .collect()
}

/// Keeps only the witness rows on POMDP states (Player-1 sets of `to_pog`).
fn on_pomdp(m: &Pomdp, mut w: WinningRegion) -> WinningRegion {
    let n = m.n_states() as u32;
    w.winning.retain(|(k, _)| k.iter().all(|s| s.0 < n));
    w
}

/// Almost-sure reachability in a POMDP. The witness maps belief supports of
/// non-target states to a uniform choice over the allowed actions.
pub fn almost_sure_reach(m: &Pomdp, target: &[bool]) -> Result<WinningRegion> {
    check_len(m, target)?;
    let h = m.to_pog();
    almost_sure_reach_pog(&h, &lift_to_pog(m, target)).map(|w| on_pomdp(m, w))
}

/// Almost-sure Büchi in a POMDP.
pub fn almost_sure_buchi(m: &Pomdp, target: &[bool]) -> Result<WinningRegion> {
    check_len(m, target)?;
    let h = m.to_pog();
    almost_sure_buchi_pog(&h, &lift_to_pog(m, target)).map(|w| on_pomdp(m, w))
}

fn check_len(m: &Pomdp, target: &[bool]) -> Result<()> {
    if target.len() != m.n_states() {
        return Err(Error::Domain(alloc::format!(
            "target covers {} states, POMDP has {}",
            target.len(),
            m.n_states()
        )));
    }
    Ok(())
}

/// Almost-sure safety equals sure safety: a violation is a finite prefix,
/// and a finite prefix that can happen at all has positive probability.
pub fn almost_sure_safety(h: &PartialObsGame, safe: &[bool]) -> Result<WinningRegion> {
    let mut w = sure_winning(h, &Objective::Safe(safe.to_vec()), Player::One)?;
    w.mode = Mode::AlmostSure;
    Ok(w)
}

/// The rows of a knowledge witness keyed by set alone.
pub fn witness_by_set(w: &WinningRegion) -> BTreeMap<Vec<State>, Distribution<Action>> {
    match &w.witness {
        Witness::Knowledge(m) => m.iter().map(|((k, _), d)| (k.clone(), d.clone())).collect(),
        _ => BTreeMap::new(),
    }
}
