//! Positive reachability and positive safety.
//!
//! For positive reachability Player 1 may as well play every action
//! uniformly: that strategy has the largest support, and positive probability
//! only depends on supports. So Player 1 wins iff Player 2 cannot keep every
//! play out of the target against it.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::objective::{Objective, ObjectiveKind};
use crate::pog::{Action, PartialObsGame, Player, Pomdp, State};
use crate::solve::almost::lift_to_pog;
use crate::solve::knowledge::{
    sure_winning_any_opponent, sure_winning_from, WinningRegion, Witness,
};
use crate::solve::Mode;

/// States from which Player 2, seeing the state, keeps every play inside
/// `keep` forever against uniform play by Player 1. `won` states count as
/// kept whatever happens next.
fn p2_trap(h: &PartialObsGame, keep: &[bool], won: &[bool]) -> Vec<bool> {
    let n = h.n_states();
    let mut z: Vec<bool> = (0..n).map(|s| keep[s] || won[s]).collect();
    loop {
        let mut changed = false;
        for s in h.state_ids() {
            if !z[s.idx()] || won[s.idx()] {
                continue;
            }
            let inside = |a: Action| h.delta[&(s, a)].support().all(|t| z[t.idx()]);
            let stay = match h.owner_of(s) {
                Player::One => h.actions_at(s).all(inside),
                Player::Two => h.actions_at(s).any(inside),
            };
            if !stay {
                z[s.idx()] = false;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

fn region(kind: ObjectiveKind, win: bool, witness: Witness) -> WinningRegion {
    WinningRegion {
        mode: Mode::Positive,
        objective: kind,
        protagonist: Player::One,
        initial_winning: win,
        winning: Vec::new(),
        witness: if win { witness } else { Witness::None },
    }
}

/// Positive reachability in a game where Player 2 sees the state (or has one
/// action): a greatest fixpoint on states, no subset construction.
pub fn positive_reach_one_sided(h: &PartialObsGame, target: &[bool]) -> Result<WinningRegion> {
    check(h, target)?;
    if !h.is_one_sided() {
        return Err(Error::Domain(String::from(
            "positive_reach_one_sided needs Player 2 to see the state",
        )));
    }
    let keep: Vec<bool> = target.iter().map(|t| !t).collect();
    let z = p2_trap(h, &keep, &vec![false; h.n_states()]);
    let win = h.initial.support().any(|s| !z[s.idx()]);
    Ok(region(ObjectiveKind::Reach, win, Witness::Uniform))
}

/// Positive reachability in any game. With a partially informed Player 2
/// this is the complement of Player 2 surely keeping out of the target on
/// its own knowledge: against the uniform Player 1 that is the same as
/// against every Player 1 strategy.
pub fn positive_reach_pog(h: &PartialObsGame, target: &[bool]) -> Result<WinningRegion> {
    if h.is_one_sided() {
        return positive_reach_one_sided(h, target);
    }
    check(h, target)?;
    let avoid = Objective::Safe(target.iter().map(|t| !t).collect());
    let p2 = sure_winning_any_opponent(h, &avoid, Player::Two)?;
    Ok(region(
        ObjectiveKind::Reach,
        !p2.initial_winning,
        Witness::Uniform,
    ))
}

/// Positive reachability in a POMDP. The witness is an action word found by
/// breadth-first search on the support graph; played blindly it reaches the
/// target with positive probability.
pub fn positive_reach(m: &Pomdp, target: &[bool]) -> Result<WinningRegion> {
    if target.len() != m.n_states() {
        return Err(Error::Domain(alloc::format!(
            "target covers {} states, POMDP has {}",
            target.len(),
            m.n_states()
        )));
    }
    let w = positive_reach_one_sided(&m.to_pog(), &lift_to_pog(m, target))?;
    if !w.initial_winning {
        return Ok(w);
    }
    let word = shortest_word(m, target)
        .ok_or_else(|| Error::Domain(String::from("fixpoint and search disagree")))?;
    Ok(region(ObjectiveKind::Reach, true, Witness::Word(word)))
}

/// Shortest action word along which some path of the POMDP hits `target`.
pub fn shortest_word(m: &Pomdp, target: &[bool]) -> Option<Vec<Action>> {
    let mut parent: BTreeMap<State, Option<(State, Action)>> = BTreeMap::new();
    parent.insert(m.initial, None);
    let mut queue = VecDeque::from([m.initial]);
    while let Some(s) = queue.pop_front() {
        if target[s.idx()] {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some(Some((p, a))) = parent.get(&cur) {
                word.push(*a);
                cur = *p;
            }
            word.reverse();
            return Some(word);
        }
        for a in m.action_ids() {
            for &t in m.delta[&(s, a)].support() {
                if let alloc::collections::btree_map::Entry::Vacant(e) = parent.entry(t) {
                    e.insert(Some((s, a)));
                    queue.push_back(t);
                }
            }
        }
    }
    None
}

/// Positive safety in a game where Player 2 sees the state. `Some(region)`
/// when decided, `None` when neither test below applies.
///
/// Winning: Player 1 can reach, with positive probability and without
/// leaving `safe`, a state `s` such that knowing `s` it would be surely safe
/// from there on. Player 1 then plays uniformly and at every step, with
/// probability 1/2, bets on a uniformly chosen such state of its knowledge
/// and switches to that sure strategy; the bet is right with positive
/// probability.
///
/// Losing: even seeing the state, Player 2 reaches an unsafe state almost
/// surely (classical turn-based stochastic game).
pub fn positive_safety_pog(h: &PartialObsGame, safe: &[bool]) -> Result<Option<WinningRegion>> {
    check(h, safe)?;
    if !h.is_one_sided() {
        return Err(Error::Domain(String::from(
            "positive safety needs Player 2 to see the state",
        )));
    }
    let n = h.n_states();
    let singles: Vec<Vec<State>> = h.state_ids().map(|s| vec![s]).collect();
    let sure = sure_winning_from(h, &Objective::Safe(safe.to_vec()), Player::One, &singles)?;
    let unsafe_: Vec<bool> = safe.iter().map(|s| !s).collect();
    let keep: Vec<bool> = (0..n).map(|s| !sure[s]).collect();
    let z = p2_trap(h, &keep, &unsafe_);
    if h.initial.support().any(|s| !z[s.idx()]) {
        return Ok(Some(region(ObjectiveKind::Safe, true, Witness::None)));
    }
    let p2 = almost_sure_reach_perfect(h, &unsafe_);
    if h.initial.support().all(|s| p2[s.idx()]) {
        return Ok(Some(region(ObjectiveKind::Safe, false, Witness::None)));
    }
    Ok(None)
}

/// States from which Player 2 reaches `target` with probability 1 when both
/// players see the state.
pub fn almost_sure_reach_perfect(h: &PartialObsGame, target: &[bool]) -> Vec<bool> {
    let n = h.n_states();
    let mut y = vec![true; n];
    loop {
        // x: reach `target` with positive probability, never leaving `y`
        let mut x = target.to_vec();
        loop {
            let mut changed = false;
            for s in h.state_ids() {
                if x[s.idx()] || !y[s.idx()] {
                    continue;
                }
                let good = |a: Action| {
                    let d = &h.delta[&(s, a)];
                    d.support().all(|t| y[t.idx()]) && d.support().any(|t| x[t.idx()])
                };
                let ok = match h.owner_of(s) {
                    Player::One => h.actions_at(s).all(good),
                    Player::Two => h.actions_at(s).any(good),
                };
                if ok {
                    x[s.idx()] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let next: Vec<bool> = (0..n).map(|s| y[s] && x[s]).collect();
        if next == y {
            return y;
        }
        y = next;
    }
}

fn check(h: &PartialObsGame, t: &[bool]) -> Result<()> {
    if t.len() != h.n_states() {
        return Err(Error::Domain(alloc::format!(
            "target covers {} states, game has {}",
            t.len(),
            h.n_states()
        )));
    }
    Ok(())
}
