//! Objectives over locations (or states) and their parity compilation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Winning condition, indexed by location (or state) id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Objective {
    Reach(Vec<bool>),
    Safe(Vec<bool>),
    Buchi(Vec<bool>),
    CoBuchi(Vec<bool>),
    Parity(Vec<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    Reach,
    Safe,
    Buchi,
    CoBuchi,
    Parity,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 5] = [
        ObjectiveKind::Safe,
        ObjectiveKind::Reach,
        ObjectiveKind::Buchi,
        ObjectiveKind::CoBuchi,
        ObjectiveKind::Parity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Reach => "reach",
            ObjectiveKind::Safe => "safety",
            ObjectiveKind::Buchi => "buchi",
            ObjectiveKind::CoBuchi => "cobuchi",
            ObjectiveKind::Parity => "parity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "reach" | "reachability" => ObjectiveKind::Reach,
            "safe" | "safety" => ObjectiveKind::Safe,
            "buchi" | "büchi" => ObjectiveKind::Buchi,
            "cobuchi" | "cobüchi" | "co-buchi" => ObjectiveKind::CoBuchi,
            "parity" => ObjectiveKind::Parity,
            _ => return None,
        })
    }
}

impl Objective {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::Reach(_) => ObjectiveKind::Reach,
            Objective::Safe(_) => ObjectiveKind::Safe,
            Objective::Buchi(_) => ObjectiveKind::Buchi,
            Objective::CoBuchi(_) => ObjectiveKind::CoBuchi,
            Objective::Parity(_) => ObjectiveKind::Parity,
        }
    }

    /// Number of locations the objective is defined over.
    pub fn size(&self) -> usize {
        match self {
            Objective::Reach(t)
            | Objective::Safe(t)
            | Objective::Buchi(t)
            | Objective::CoBuchi(t) => t.len(),
            Objective::Parity(p) => p.len(),
        }
    }

    /// The target set; `None` for parity.
    pub fn target(&self) -> Option<&[bool]> {
        match self {
            Objective::Reach(t)
            | Objective::Safe(t)
            | Objective::Buchi(t)
            | Objective::CoBuchi(t) => Some(t),
            Objective::Parity(_) => None,
        }
    }

    /// Two-priority compilation: Büchi and Reach give 0 on `T`, 1 elsewhere;
    /// coBüchi and Safe give 2 on `T`, 1 elsewhere. Reach and Safe only mean
    /// what they should once `T` (resp. its complement) is made absorbing; see
    /// [`Objective::holds_on_lasso`].
    pub fn priorities(&self) -> Vec<u32> {
        match self {
            Objective::Reach(t) | Objective::Buchi(t) => {
                t.iter().map(|&b| if b { 0 } else { 1 }).collect()
            }
            Objective::Safe(t) | Objective::CoBuchi(t) => {
                t.iter().map(|&b| if b { 2 } else { 1 }).collect()
            }
            Objective::Parity(p) => p.clone(),
        }
    }

    /// Same objective pulled back along `f` (e.g. a product state to its location).
    pub fn lift(&self, n: usize, f: impl Fn(usize) -> usize) -> Objective {
        let pull = |t: &Vec<bool>| (0..n).map(|s| t[f(s)]).collect::<Vec<_>>();
        match self {
            Objective::Reach(t) => Objective::Reach(pull(t)),
            Objective::Safe(t) => Objective::Safe(pull(t)),
            Objective::Buchi(t) => Objective::Buchi(pull(t)),
            Objective::CoBuchi(t) => Objective::CoBuchi(pull(t)),
            Objective::Parity(p) => Objective::Parity((0..n).map(|s| p[f(s)]).collect()),
        }
    }

    /// Evaluates the objective on the play `stem · cycle^ω` via the parity
    /// compilation. Reach and Safe first cut the play at the first target
    /// (resp. non-safe) location and loop there forever.
    pub fn holds_on_lasso(&self, stem: &[usize], cycle: &[usize]) -> Result<bool> {
        if cycle.is_empty() {
            return Err(Error::Domain("empty cycle".into()));
        }
        let p = self.priorities();
        let absorbing = |hit: &dyn Fn(usize) -> bool| -> Vec<usize> {
            match stem.iter().chain(cycle.iter()).find(|&&l| hit(l)) {
                Some(&l) => vec![l],
                None => cycle.to_vec(),
            }
        };
        let cyc = match self {
            Objective::Reach(t) => absorbing(&|l| t[l]),
            Objective::Safe(t) => absorbing(&|l| !t[l]),
            _ => cycle.to_vec(),
        };
        let cyc_p: Vec<u32> = cyc.iter().map(|&l| p[l]).collect();
        eval_parity_on_lasso(&cyc_p)
    }

    /// Direct set-membership semantics on `stem · cycle^ω`, with no parity.
    pub fn holds_directly(&self, stem: &[usize], cycle: &[usize]) -> Result<bool> {
        if cycle.is_empty() {
            return Err(Error::Domain("empty cycle".into()));
        }
        let visited = || stem.iter().chain(cycle.iter());
        Ok(match self {
            Objective::Reach(t) => visited().any(|&l| t[l]),
            Objective::Safe(t) => visited().all(|&l| t[l]),
            Objective::Buchi(t) => cycle.iter().any(|&l| t[l]),
            Objective::CoBuchi(t) => cycle.iter().all(|&l| t[l]),
            Objective::Parity(p) => cycle.iter().map(|&l| p[l]).min().unwrap() % 2 == 0,
        })
    }

    /// Finite-horizon view used by the measure harness: Reach means "hit `T`
    /// somewhere on the prefix", Safe means "never left `T`". Other kinds have
    /// no finite-prefix meaning and return `None`.
    pub fn holds_on_prefix(&self, locs: &[usize]) -> Option<bool> {
        match self {
            Objective::Reach(t) => Some(locs.iter().any(|&l| t[l])),
            Objective::Safe(t) => Some(locs.iter().all(|&l| t[l])),
            _ => None,
        }
    }
}

/// True iff the minimum of the priorities seen infinitely often is even.
///
/// Only the cycle matters; the stem is irrelevant for parity.
pub fn eval_parity_on_lasso(cycle_priorities: &[u32]) -> Result<bool> {
    cycle_priorities
        .iter()
        .min()
        .map(|m| m % 2 == 0)
        .ok_or_else(|| Error::Domain("empty cycle".into()))
}

/// [`eval_parity_on_lasso`] with a priority function and location ids.
pub fn eval_parity_lasso_locs(p: &[u32], _stem: &[usize], cycle: &[usize]) -> Result<bool> {
    let cyc: Vec<u32> = cycle.iter().map(|&l| p[l]).collect();
    eval_parity_on_lasso(&cyc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_priority_parity() {
        assert_eq!(eval_parity_on_lasso(&[0]), Ok(true));
        assert_eq!(eval_parity_on_lasso(&[1, 2]), Ok(false));
        assert_eq!(eval_parity_on_lasso(&[3, 2, 5]), Ok(true));
        assert!(eval_parity_on_lasso(&[]).is_err());
    }

    #[test]
    fn buchi_compiles_to_zero_one() {
        let b = Objective::Buchi(vec![false, true]);
        assert_eq!(b.priorities(), vec![1, 0]);
        assert_eq!(
            eval_parity_lasso_locs(&b.priorities(), &[0], &[0, 1]),
            Ok(true)
        );
        assert_eq!(b.holds_on_lasso(&[1], &[0]), Ok(false));
    }

    #[test]
    fn reach_is_cut_at_first_hit() {
        let r = Objective::Reach(vec![false, true, false]);
        assert_eq!(r.holds_on_lasso(&[0, 1], &[2]), Ok(true));
        assert_eq!(r.holds_on_lasso(&[0], &[2]), Ok(false));
        let s = Objective::Safe(vec![true, false, true]);
        assert_eq!(s.holds_on_lasso(&[0, 1], &[2]), Ok(false));
        assert_eq!(s.holds_on_lasso(&[0], &[2, 0]), Ok(true));
    }

    fn lassos(n: usize, max_len: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut all = Vec::new();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &words {
                for l in 0..n {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            all.extend(next.iter().cloned());
            words = next;
        }
        let mut out = Vec::new();
        for w in &all {
            for split in 0..w.len() {
                out.push((w[..split].to_vec(), w[split..].to_vec()));
            }
        }
        out
    }

    #[test]
    fn compiled_and_direct_semantics_agree_on_small_lassos() {
        let n = 3;
        let ls = lassos(n, 5);
        for mask in 0..(1u32 << n) {
            let t: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            for obj in [
                Objective::Reach(t.clone()),
                Objective::Safe(t.clone()),
                Objective::Buchi(t.clone()),
                Objective::CoBuchi(t.clone()),
            ] {
                for (stem, cyc) in &ls {
                    assert_eq!(
                        obj.holds_on_lasso(stem, cyc).unwrap(),
                        obj.holds_directly(stem, cyc).unwrap(),
                        "{obj:?} on {stem:?} ({cyc:?})^w"
                    );
                }
            }
        }
    }
}
