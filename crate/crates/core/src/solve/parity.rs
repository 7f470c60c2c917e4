//! Perfect-information parity games (min-parity: the least priority seen
//! infinitely often decides, even is Player 1's).

use alloc::vec;
use alloc::vec::Vec;

use crate::pog::Player;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

/// Winning regions and memoryless witnesses: `strategy[v]` is the move of
/// `owner[v]` at `v` when `v` lies in its owner's region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySolution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<usize>>,
}

impl ParitySolution {
    pub fn region(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len())
            .filter(|&v| self.winner[v] == p)
            .collect()
    }
}

fn parity_player(p: u32) -> Player {
    if p.is_multiple_of(2) {
        Player::One
    } else {
        Player::Two
    }
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Every node has a successor and all successors are in range.
    pub fn is_total(&self) -> bool {
        let n = self.len();
        self.priority.len() == n
            && self.succ.len() == n
            && self
                .succ
                .iter()
                .all(|s| !s.is_empty() && s.iter().all(|&t| t < n))
    }

    fn preds(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.len()];
        for (v, ss) in self.succ.iter().enumerate() {
            for &t in ss {
                if !p[t].contains(&v) {
                    p[t].push(v);
                }
            }
        }
        p
    }

    /// Attractor of `target` for `pl` inside `alive`, with the attracting move
    /// for `pl`'s nodes outside `target`.
    fn attractor(
        &self,
        preds: &[Vec<usize>],
        alive: &[bool],
        target: &[usize],
        pl: Player,
        strat: &mut [Option<usize>],
    ) -> Vec<bool> {
        let n = self.len();
        let mut inside = vec![false; n];
        let mut count: Vec<usize> = (0..n)
            .map(|v| {
                if alive[v] {
                    self.succ[v].iter().filter(|&&t| alive[t]).count()
                } else {
                    0
                }
            })
            .collect();
        let mut queue: Vec<usize> = Vec::new();
        for &t in target {
            if alive[t] && !inside[t] {
                inside[t] = true;
                queue.push(t);
            }
        }
        while let Some(t) = queue.pop() {
            for &v in &preds[t] {
                if !alive[v] || inside[v] {
                    continue;
                }
                if self.owner[v] == pl {
                    inside[v] = true;
                    strat[v] = Some(t);
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        inside[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        inside
    }

    fn zielonka(
        &self,
        preds: &[Vec<usize>],
        alive: &[bool],
        winner: &mut [Player],
        strat: &mut [Option<usize>],
    ) {
        let nodes: Vec<usize> = (0..self.len()).filter(|&v| alive[v]).collect();
        let Some(pmin) = nodes.iter().map(|&v| self.priority[v]).min() else {
            return;
        };
        let q = parity_player(pmin);
        let top: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| self.priority[v] == pmin)
            .collect();
        let a = self.attractor(preds, alive, &top, q, strat);
        let rest: Vec<bool> = (0..self.len()).map(|v| alive[v] && !a[v]).collect();
        self.zielonka(preds, &rest, winner, strat);
        let opp_wins: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| rest[v] && winner[v] == q.opponent())
            .collect();
        if opp_wins.is_empty() {
            for &v in &nodes {
                winner[v] = q;
            }
            // top nodes of q stay anywhere in the subgame
            for &v in &top {
                if self.owner[v] == q {
                    strat[v] = self.succ[v].iter().copied().find(|&t| alive[t]);
                }
            }
            return;
        }
        let b = self.attractor(preds, alive, &opp_wins, q.opponent(), strat);
        let rest2: Vec<bool> = (0..self.len()).map(|v| alive[v] && !b[v]).collect();
        for &v in &nodes {
            if b[v] {
                winner[v] = q.opponent();
            }
        }
        self.zielonka(preds, &rest2, winner, strat);
    }

    /// Recursive (Zielonka) solution.
    pub fn solve(&self) -> ParitySolution {
        assert!(self.is_total(), "parity game must be total");
        let n = self.len();
        let preds = self.preds();
        let mut winner = vec![Player::One; n];
        let mut strat = vec![None; n];
        self.zielonka(&preds, &vec![true; n], &mut winner, &mut strat);
        for v in 0..n {
            if winner[v] != self.owner[v] {
                strat[v] = None;
            }
        }
        ParitySolution {
            winner,
            strategy: strat,
        }
    }

    /// Winner of the single play from `v` under memoryless choices `choice`.
    pub fn play_winner(&self, v: usize, choice: &[usize]) -> Player {
        let n = self.len();
        let mut seen = vec![usize::MAX; n];
        let mut path = Vec::new();
        let mut cur = v;
        while seen[cur] == usize::MAX {
            seen[cur] = path.len();
            path.push(cur);
            cur = choice[cur];
        }
        let m = path[seen[cur]..]
            .iter()
            .map(|&u| self.priority[u])
            .min()
            .unwrap();
        parity_player(m)
    }

    /// Every memoryless profile, as the successor chosen at every node.
    fn profiles(&self, fixed: &[Option<usize>], free: Player) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for (v, fx) in fixed.iter().enumerate().take(self.len()) {
            let opts: Vec<usize> = match *fx {
                Some(t) if self.owner[v] != free => vec![t],
                _ => self.succ[v].clone(),
            };
            let mut next = Vec::with_capacity(out.len() * opts.len());
            for p in &out {
                for &t in &opts {
                    let mut q = p.clone();
                    q.push(t);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// Does the memoryless strategy `strat` (for `pl`) win from `v` against
    /// every memoryless counter-strategy?
    pub fn strategy_wins(&self, v: usize, pl: Player, strat: &[Option<usize>]) -> bool {
        let fixed: Vec<Option<usize>> = (0..self.len())
            .map(|u| {
                if self.owner[u] == pl {
                    strat[u].or(Some(self.succ[u][0]))
                } else {
                    None
                }
            })
            .collect();
        self.profiles(&fixed, pl.opponent())
            .iter()
            .all(|c| self.play_winner(v, c) == pl)
    }
}

/// Exhaustive oracle: Player 1 wins from `v` iff some memoryless Player-1
/// strategy wins against every memoryless Player-2 strategy. Exponential.
pub fn brute_force_winners(g: &ParityGame) -> Vec<Player> {
    let n = g.len();
    let none = vec![None; n];
    let mine = g.profiles(&none, Player::Two);
    // profiles() with free = Two and nothing fixed enumerates everything; keep
    // only distinct Player-1 parts
    let mut p1: Vec<Vec<usize>> = mine
        .iter()
        .map(|c| {
            (0..n)
                .map(|u| {
                    if g.owner[u] == Player::One {
                        c[u]
                    } else {
                        usize::MAX
                    }
                })
                .collect()
        })
        .collect();
    p1.sort();
    p1.dedup();
    (0..n)
        .map(|v| {
            let wins = p1.iter().any(|s| {
                let strat: Vec<Option<usize>> =
                    s.iter().map(|&t| (t != usize::MAX).then_some(t)).collect();
                g.strategy_wins(v, Player::One, &strat)
            });
            if wins {
                Player::One
            } else {
                Player::Two
            }
        })
        .collect()
}

/// Parity games on `n` nodes: every owner and priority assignment in
/// `0..=max_p`, with successor sets drawn from `succ_choices(v)`.
pub fn enumerate_games(
    n: usize,
    max_p: u32,
    succ_choices: &dyn Fn(usize) -> Vec<Vec<usize>>,
) -> Vec<ParityGame> {
    let choices: Vec<Vec<Vec<usize>>> = (0..n).map(succ_choices).collect();
    let mut succs: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for c in &choices {
        let mut next = Vec::new();
        for s in &succs {
            for x in c {
                let mut t = s.clone();
                t.push(x.clone());
                next.push(t);
            }
        }
        succs = next;
    }
    let np = (max_p + 1) as usize;
    let mut out = Vec::new();
    for owners in 0..(1usize << n) {
        let owner: Vec<Player> = (0..n)
            .map(|v| {
                if owners >> v & 1 == 0 {
                    Player::One
                } else {
                    Player::Two
                }
            })
            .collect();
        for pc in 0..np.pow(n as u32) {
            let priority: Vec<u32> = (0..n)
                .map(|v| ((pc / np.pow(v as u32)) % np) as u32)
                .collect();
            for s in &succs {
                out.push(ParityGame {
                    owner: owner.clone(),
                    priority: priority.clone(),
                    succ: s.clone(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_loops() {
        for (p, w) in [(0, Player::One), (1, Player::Two), (2, Player::One)] {
            let g = ParityGame {
                owner: vec![Player::Two],
                priority: vec![p],
                succ: vec![vec![0]],
            };
            assert_eq!(g.solve().winner, vec![w]);
        }
    }

    #[test]
    fn choice_matters() {
        // 0 (P1) -> {1, 2}; 1 loops with priority 1, 2 loops with priority 2
        let g = ParityGame {
            owner: vec![Player::One, Player::Two, Player::Two],
            priority: vec![3, 1, 2],
            succ: vec![vec![1, 2], vec![1], vec![2]],
        };
        let s = g.solve();
        assert_eq!(s.winner, vec![Player::One, Player::Two, Player::One]);
        assert_eq!(s.strategy[0], Some(2));
        assert!(g.strategy_wins(0, Player::One, &s.strategy));
    }

    #[test]
    fn agrees_with_brute_force_on_all_three_node_games() {
        let all_subsets = |_v: usize| -> Vec<Vec<usize>> {
            (1u32..8)
                .map(|m| (0..3).filter(|b| m >> b & 1 == 1).collect())
                .collect()
        };
        let games = enumerate_games(3, 2, &all_subsets);
        assert_eq!(games.len(), 8 * 27 * 343);
        for g in games.iter().step_by(7) {
            let s = g.solve();
            assert_eq!(s.winner, brute_force_winners(g), "{g:?}");
            for v in 0..3 {
                assert!(
                    g.strategy_wins(v, s.winner[v], &s.strategy),
                    "{g:?} from {v}"
                );
            }
        }
    }
}
