//! Finite-depth randomized strategy tables for games with uncertainty.
//!
//! A table of depth `D` is keyed by prefixes with at most `D` locations, which
//! is exactly what the cone of a prefix with `D + 1` locations consults.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::game::{Input, Loc, Output, PrefixG, UncertaintyGame};

/// Which Player-2 information model a strategy (or a reduction) assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Player 2 sees the true history only.
    Ordinary,
    /// Player 2 also sees the history observed by Player 1.
    AllPowerful,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Ordinary => "ordinary",
            Variant::AllPowerful => "all-powerful",
        }
    }
}

/// Player 1: observed prefix to a distribution over inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyG1 {
    pub depth: usize,
    pub table: BTreeMap<PrefixG, Distribution<Input>>,
}

/// Player 2, ordinary or all-powerful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyG2 {
    Ordinary {
        depth: usize,
        table: BTreeMap<(PrefixG, Input), Distribution<Output>>,
    },
    AllPowerful {
        depth: usize,
        table: BTreeMap<(PrefixG, PrefixG, Input), Distribution<Output>>,
    },
}

fn check_depth(p: &PrefixG, depth: usize) -> Result<()> {
    if p.len() > depth {
        Err(Error::DepthExceeded {
            len: p.len(),
            depth,
        })
    } else {
        Ok(())
    }
}

/// Every prefix with between 1 and `max_len` locations, starting anywhere
/// (`start = None`) or at the given location. Ordered by length.
pub fn prefixes_up_to(g: &UncertaintyGame, max_len: usize, start: Option<Loc>) -> Vec<PrefixG> {
    let mut layer: Vec<PrefixG> = match start {
        Some(l) => alloc::vec![PrefixG::start(l)],
        None => g.locs().map(PrefixG::start).collect(),
    };
    let mut out = Vec::new();
    for len in 1..=max_len {
        if len > 1 {
            let mut next =
                Vec::with_capacity(layer.len() * g.n_inputs() * g.n_outputs() * g.n_locs());
            for p in &layer {
                for i in g.input_letters() {
                    for o in g.output_letters() {
                        for l in g.locs() {
                            next.push(p.extended(i, o, l));
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

/// Every prefix with exactly `len` locations.
pub fn prefixes_of_len(g: &UncertaintyGame, len: usize, start: Option<Loc>) -> Vec<PrefixG> {
    prefixes_up_to(g, len, start)
        .into_iter()
        .filter(|p| p.len() == len)
        .collect()
}

impl StrategyG1 {
    /// Tabulates `f` on every prefix with at most `depth` locations.
    pub fn from_fn(
        g: &UncertaintyGame,
        depth: usize,
        mut f: impl FnMut(&PrefixG) -> Distribution<Input>,
    ) -> Self {
        let table = prefixes_up_to(g, depth, None).into_iter().map(|p| {
            let d = f(&p);
            (p, d)
        });
        StrategyG1 {
            depth,
            table: table.collect(),
        }
    }

    pub fn constant(g: &UncertaintyGame, depth: usize, d: Distribution<Input>) -> Self {
        Self::from_fn(g, depth, |_| d.clone())
    }

    pub fn get(&self, observed: &PrefixG) -> Result<&Distribution<Input>> {
        check_depth(observed, self.depth)?;
        self.table
            .get(observed)
            .ok_or_else(|| Error::StrategyUndefined(format!("{observed:?}")))
    }

    /// Rows must be distributions over known inputs.
    pub fn check(&self, g: &UncertaintyGame) -> Result<()> {
        for (p, d) in &self.table {
            check_dist(p, d, |i| i.idx() < g.n_inputs())?;
            check_prefix(g, p)?;
        }
        Ok(())
    }
}

impl StrategyG2 {
    pub fn variant(&self) -> Variant {
        match self {
            StrategyG2::Ordinary { .. } => Variant::Ordinary,
            StrategyG2::AllPowerful { .. } => Variant::AllPowerful,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            StrategyG2::Ordinary { depth, .. } | StrategyG2::AllPowerful { depth, .. } => *depth,
        }
    }

    /// Ordinary strategy tabulated over prefixes that start at `ℓ0`.
    pub fn ordinary_from_fn(
        g: &UncertaintyGame,
        depth: usize,
        mut f: impl FnMut(&PrefixG, Input) -> Distribution<Output>,
    ) -> Self {
        let mut table = BTreeMap::new();
        for p in prefixes_up_to(g, depth, Some(g.initial)) {
            for i in g.input_letters() {
                let d = f(&p, i);
                table.insert((p.clone(), i), d);
            }
        }
        StrategyG2::Ordinary { depth, table }
    }

    /// All-powerful strategy tabulated over every action-matching pair whose
    /// true component starts at `ℓ0`.
    pub fn all_powerful_from_fn(
        g: &UncertaintyGame,
        depth: usize,
        mut f: impl FnMut(&PrefixG, &PrefixG, Input) -> Distribution<Output>,
    ) -> Self {
        let mut table = BTreeMap::new();
        for p in prefixes_up_to(g, depth, Some(g.initial)) {
            for q in crate::measure::act_mt(g, &p) {
                for i in g.input_letters() {
                    let d = f(&p, &q, i);
                    table.insert((p.clone(), q.clone(), i), d);
                }
            }
        }
        StrategyG2::AllPowerful { depth, table }
    }

    /// The all-powerful strategy that ignores the observed history.
    pub fn lift_to_all_powerful(&self, g: &UncertaintyGame) -> Result<Self> {
        match self {
            StrategyG2::AllPowerful { .. } => Ok(self.clone()),
            StrategyG2::Ordinary { depth, .. } => {
                let mut err = None;
                let s =
                    Self::all_powerful_from_fn(g, *depth, |p, _q, i| match self.choose(p, p, i) {
                        Ok(d) => d.clone(),
                        Err(e) => {
                            err.get_or_insert(e);
                            Distribution::dirac(Output(0))
                        }
                    });
                match err {
                    Some(e) => Err(e),
                    None => Ok(s),
                }
            }
        }
    }

    /// Player 2's move distribution after input `i`. `observed` is only read by
    /// the all-powerful variant.
    pub fn choose(
        &self,
        truth: &PrefixG,
        observed: &PrefixG,
        i: Input,
    ) -> Result<&Distribution<Output>> {
        match self {
            StrategyG2::Ordinary { depth, table } => {
                check_depth(truth, *depth)?;
                table
                    .get(&(truth.clone(), i))
                    .ok_or_else(|| Error::StrategyUndefined(format!("{truth:?} / {i:?}")))
            }
            StrategyG2::AllPowerful { depth, table } => {
                check_depth(truth, *depth)?;
                if !truth.action_matches(observed) {
                    return Err(Error::ActionMismatch);
                }
                table
                    .get(&(truth.clone(), observed.clone(), i))
                    .ok_or_else(|| {
                        Error::StrategyUndefined(format!("{truth:?} | {observed:?} / {i:?}"))
                    })
            }
        }
    }

    pub fn check(&self, g: &UncertaintyGame) -> Result<()> {
        let ok_out = |o: &Output| o.idx() < g.n_outputs();
        let ok_in = |i: Input| {
            if i.idx() < g.n_inputs() {
                Ok(())
            } else {
                Err(Error::UnknownInput(i.0))
            }
        };
        match self {
            StrategyG2::Ordinary { table, .. } => {
                for ((p, i), d) in table {
                    check_prefix(g, p)?;
                    ok_in(*i)?;
                    check_dist(p, d, ok_out)?;
                }
            }
            StrategyG2::AllPowerful { table, .. } => {
                for ((p, q, i), d) in table {
                    check_prefix(g, p)?;
                    check_prefix(g, q)?;
                    if !p.action_matches(q) {
                        return Err(Error::ActionMismatch);
                    }
                    ok_in(*i)?;
                    check_dist(p, d, ok_out)?;
                }
            }
        }
        Ok(())
    }
}

fn check_prefix(g: &UncertaintyGame, p: &PrefixG) -> Result<()> {
    for &l in p.locs() {
        g.check_loc(l)?;
    }
    for &(i, o) in p.letters() {
        if i.idx() >= g.n_inputs() {
            return Err(Error::UnknownInput(i.0));
        }
        if o.idx() >= g.n_outputs() {
            return Err(Error::UnknownOutput(o.0));
        }
    }
    Ok(())
}

fn check_dist<X: Ord + Clone + core::fmt::Debug>(
    p: &PrefixG,
    d: &Distribution<X>,
    in_range: impl Fn(&X) -> bool,
) -> Result<()> {
    d.check()
        .map_err(|e| Error::Domain(format!("row {p:?}: {e}")))?;
    if let Some(x) = d.support().find(|x| !in_range(x)) {
        return Err(Error::Domain(format!("row {p:?}: unknown letter {x:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_counts() {
        let g = UncertaintyGame::with_sizes(2, 2, 2);
        assert_eq!(prefixes_of_len(&g, 1, None).len(), 2);
        assert_eq!(prefixes_of_len(&g, 3, None).len(), 2 * 8 * 8);
        assert_eq!(prefixes_of_len(&g, 2, Some(Loc(0))).len(), 8);
    }

    #[test]
    fn depth_is_enforced() {
        let g = UncertaintyGame::with_sizes(2, 2, 1);
        let a = StrategyG1::constant(&g, 1, Distribution::dirac(Input(1)));
        assert_eq!(
            a.get(&PrefixG::start(Loc(1))).unwrap(),
            &Distribution::dirac(Input(1))
        );
        let long = PrefixG::start(Loc(0)).extended(Input(0), Output(0), Loc(1));
        assert_eq!(a.get(&long), Err(Error::DepthExceeded { len: 2, depth: 1 }));
    }

    #[test]
    fn all_powerful_rejects_non_matching_pairs() {
        let g = UncertaintyGame::with_sizes(2, 2, 1);
        let b = StrategyG2::ordinary_from_fn(&g, 2, |_, _| Distribution::dirac(Output(0)));
        let ap = b.lift_to_all_powerful(&g).unwrap();
        let p = PrefixG::start(Loc(0)).extended(Input(0), Output(0), Loc(1));
        let q = PrefixG::start(Loc(1)).extended(Input(1), Output(0), Loc(1));
        assert_eq!(ap.choose(&p, &q, Input(0)), Err(Error::ActionMismatch));
        let q = PrefixG::start(Loc(1)).extended(Input(0), Output(0), Loc(0));
        assert_eq!(
            ap.choose(&p, &q, Input(0)).unwrap(),
            &Distribution::dirac(Output(0))
        );
    }
}
