//! Noisy-observation games: locations, letters, the transition
//! function `Δ`, the uncertainty function `un`, and finite prefixes of plays.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dist::{DistError, Distribution};
use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }
    };
}

id_type!(
    /// Interned location of an [`UncertaintyGame`].
    Loc
);
id_type!(
    /// Interned input letter (Player 1's move).
    Input
);
id_type!(
    /// Interned output letter (Player 2's move).
    Output
);

/// A game structure with noisy observation of locations plus its initial location.
///
/// `delta` and `un` are maps so that a malformed file (missing rows) can still
/// be loaded and reported on by [`UncertaintyGame::validate`]. Everything
/// downstream assumes a game whose report is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyGame {
    pub locations: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: Loc,
    pub delta: BTreeMap<(Loc, Input, Output), Distribution<Loc>>,
    pub un: BTreeMap<Loc, Distribution<Loc>>,
}

/// One violated well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyAlphabet(&'static str),
    DuplicateName(String),
    InitialOutOfRange,
    MissingRow(String),
    BadDistribution { row: String, error: DistError },
    DanglingLocation { row: String, target: u32 },
    NotAPartition(String),
    OwnerMismatch(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet(which) => write!(f, "empty {which}"),
            Violation::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            Violation::InitialOutOfRange => write!(f, "initial element out of range"),
            Violation::MissingRow(row) => write!(f, "missing row {row}"),
            Violation::BadDistribution { row, error } => match error {
                DistError::BadSum(s) => write!(f, "distribution sum != 1 in {row} (sum {s})"),
                DistError::OutOfRange(w) => write!(f, "weight {w} outside [0,1] in {row}"),
            },
            Violation::DanglingLocation { row, target } => {
                write!(f, "dangling location id {target} in {row}")
            }
            Violation::NotAPartition(why) => write!(f, "not a partition: {why}"),
            Violation::OwnerMismatch(why) => write!(f, "owner mismatch: {why}"),
        }
    }
}

/// Every violated invariant of a game; empty iff the game is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_names(report: &mut ValidationReport, names: &[String]) {
    let mut seen: Vec<&String> = names.iter().collect();
    seen.sort();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            report.push(Violation::DuplicateName(w[0].clone()));
        }
    }
}

pub(crate) fn check_row<X: Ord + Clone>(
    report: &mut ValidationReport,
    row: impl FnOnce() -> String,
    dist: &Distribution<X>,
    in_range: impl Fn(&X) -> Option<u32>,
) {
    let mut row_name: Option<String> = None;
    let mut row = Some(row);
    let mut name = || -> String {
        if row_name.is_none() {
            row_name = Some((row.take().unwrap())());
        }
        row_name.clone().unwrap()
    };
    if let Err(error) = dist.check() {
        report.push(Violation::BadDistribution { row: name(), error });
    }
    for x in dist.support() {
        if let Some(target) = in_range(x) {
            report.push(Violation::DanglingLocation {
                row: name(),
                target,
            });
        }
    }
}

impl UncertaintyGame {
    /// A game with generated names (`l0.., i0.., o0..`), initial `l0` and no rows.
    pub fn with_sizes(n_locs: usize, n_inputs: usize, n_outputs: usize) -> Self {
        UncertaintyGame {
            locations: (0..n_locs).map(|i| format!("l{i}")).collect(),
            inputs: (0..n_inputs).map(|i| format!("i{i}")).collect(),
            outputs: (0..n_outputs).map(|i| format!("o{i}")).collect(),
            initial: Loc(0),
            delta: BTreeMap::new(),
            un: BTreeMap::new(),
        }
    }

    pub fn n_locs(&self) -> usize {
        self.locations.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn locs(&self) -> impl Iterator<Item = Loc> + Clone {
        (0..self.n_locs() as u32).map(Loc)
    }

    pub fn input_letters(&self) -> impl Iterator<Item = Input> + Clone {
        (0..self.n_inputs() as u32).map(Input)
    }

    pub fn output_letters(&self) -> impl Iterator<Item = Output> + Clone {
        (0..self.n_outputs() as u32).map(Output)
    }

    pub fn set_delta(&mut self, l: Loc, i: Input, o: Output, d: Distribution<Loc>) {
        self.delta.insert((l, i, o), d);
    }

    pub fn set_un(&mut self, l: Loc, d: Distribution<Loc>) {
        self.un.insert(l, d);
    }

    /// Sets `un` to the identity (perfect observation).
    pub fn set_identity_un(&mut self) {
        for l in self.locs().collect::<Vec<_>>() {
            self.un.insert(l, Distribution::dirac(l));
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.locations.is_empty() {
            r.push(Violation::EmptyAlphabet("location set"));
        }
        if self.inputs.is_empty() {
            r.push(Violation::EmptyAlphabet("input alphabet"));
        }
        if self.outputs.is_empty() {
            r.push(Violation::EmptyAlphabet("output alphabet"));
        }
        check_names(&mut r, &self.locations);
        check_names(&mut r, &self.inputs);
        check_names(&mut r, &self.outputs);
        if self.initial.idx() >= self.n_locs() {
            r.push(Violation::InitialOutOfRange);
        }
        let n = self.n_locs() as u32;
        let dangling = |l: &Loc| (l.0 >= n).then_some(l.0);
        for l in self.locs() {
            for i in self.input_letters() {
                for o in self.output_letters() {
                    let row = || {
                        format!(
                            "delta({}, {}, {})",
                            self.locations[l.idx()],
                            self.inputs[i.idx()],
                            self.outputs[o.idx()]
                        )
                    };
                    match self.delta.get(&(l, i, o)) {
                        None => r.push(Violation::MissingRow(row())),
                        Some(d) => check_row(&mut r, row, d, dangling),
                    }
                }
            }
            let row = || format!("un({})", self.locations[l.idx()]);
            match self.un.get(&l) {
                None => r.push(Violation::MissingRow(row())),
                Some(d) => check_row(&mut r, row, d, dangling),
            }
        }
        for &(l, i, o) in self.delta.keys() {
            if l.0 >= n || i.idx() >= self.n_inputs() || o.idx() >= self.n_outputs() {
                r.push(Violation::DanglingLocation {
                    row: format!("delta key ({}, {}, {})", l.0, i.0, o.0),
                    target: l.0,
                });
            }
        }
        for l in self.un.keys() {
            if l.0 >= n {
                r.push(Violation::DanglingLocation {
                    row: format!("un key {}", l.0),
                    target: l.0,
                });
            }
        }
        r
    }

    pub fn check_loc(&self, l: Loc) -> Result<()> {
        if l.idx() < self.n_locs() {
            Ok(())
        } else {
            Err(Error::UnknownLocation(l.0))
        }
    }

    /// `Δ(ℓ, σi, σo)`.
    pub fn transition_dist(&self, l: Loc, i: Input, o: Output) -> Result<&Distribution<Loc>> {
        self.check_loc(l)?;
        if i.idx() >= self.n_inputs() {
            return Err(Error::UnknownInput(i.0));
        }
        if o.idx() >= self.n_outputs() {
            return Err(Error::UnknownOutput(o.0));
        }
        self.delta.get(&(l, i, o)).ok_or_else(|| {
            Error::Domain(format!("missing delta row for ({}, {}, {})", l.0, i.0, o.0))
        })
    }

    /// `un(ℓ)`.
    pub fn uncertainty(&self, l: Loc) -> Result<&Distribution<Loc>> {
        self.check_loc(l)?;
        self.un
            .get(&l)
            .ok_or_else(|| Error::Domain(format!("missing un row for {}", l.0)))
    }

    pub fn loc_by_name(&self, name: &str) -> Result<Loc> {
        find(&self.locations, name).map(Loc::from)
    }

    pub fn input_by_name(&self, name: &str) -> Result<Input> {
        find(&self.inputs, name).map(Input::from)
    }

    pub fn output_by_name(&self, name: &str) -> Result<Output> {
        find(&self.outputs, name).map(Output::from)
    }

    /// Parses an alternating, whitespace-separated `ℓ0 σi σo ℓ1 ...` name list.
    pub fn parse_prefix(&self, text: &str) -> Result<PrefixG> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        self.prefix_from_names(&toks)
    }

    pub fn prefix_from_names<S: AsRef<str>>(&self, toks: &[S]) -> Result<PrefixG> {
        if toks.is_empty() || toks.len() % 3 != 1 {
            return Err(Error::MalformedPrefix(format!(
                "expected 3k+1 alternating names, got {}",
                toks.len()
            )));
        }
        let mut p = PrefixG::start(self.loc_by_name(toks[0].as_ref())?);
        for chunk in toks[1..].chunks(3) {
            p.push(
                self.input_by_name(chunk[0].as_ref())?,
                self.output_by_name(chunk[1].as_ref())?,
                self.loc_by_name(chunk[2].as_ref())?,
            );
        }
        Ok(p)
    }

    pub fn prefix_names(&self, p: &PrefixG) -> Vec<String> {
        let mut out = Vec::with_capacity(3 * p.steps() + 1);
        out.push(self.locations[p.locs[0].idx()].clone());
        for (k, &(i, o)) in p.letters.iter().enumerate() {
            out.push(self.inputs[i.idx()].clone());
            out.push(self.outputs[o.idx()].clone());
            out.push(self.locations[p.locs[k + 1].idx()].clone());
        }
        out
    }

    pub fn format_prefix(&self, p: &PrefixG) -> String {
        self.prefix_names(p).join(" ")
    }
}

pub(crate) fn find(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownName(name.into()))
}

/// A finite prefix `ℓ0 σi0 σo0 ℓ1 … ℓn` of a play.
///
/// Its length is the number of locations, `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixG {
    locs: Vec<Loc>,
    letters: Vec<(Input, Output)>,
}

impl PrefixG {
    pub fn start(l: Loc) -> Self {
        PrefixG {
            locs: alloc::vec![l],
            letters: Vec::new(),
        }
    }

    pub fn from_parts(locs: Vec<Loc>, letters: Vec<(Input, Output)>) -> Result<Self> {
        if locs.is_empty() || letters.len() + 1 != locs.len() {
            return Err(Error::MalformedPrefix(format!(
                "{} locations with {} letter pairs",
                locs.len(),
                letters.len()
            )));
        }
        Ok(PrefixG { locs, letters })
    }

    pub fn push(&mut self, i: Input, o: Output, l: Loc) {
        self.letters.push((i, o));
        self.locs.push(l);
    }

    pub fn extended(&self, i: Input, o: Output, l: Loc) -> Self {
        let mut p = self.clone();
        p.push(i, o, l);
        p
    }

    /// Number of locations, `|ρ|`.
    pub fn len(&self) -> usize {
        self.locs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of rounds played, `|ρ| - 1`.
    pub fn steps(&self) -> usize {
        self.letters.len()
    }

    pub fn first(&self) -> Loc {
        self.locs[0]
    }

    pub fn last(&self) -> Loc {
        *self.locs.last().expect("prefix is never empty")
    }

    pub fn locs(&self) -> &[Loc] {
        &self.locs
    }

    pub fn letters(&self) -> &[(Input, Output)] {
        &self.letters
    }

    /// The prefix up to `ℓ_k`, i.e. with `k + 1` locations.
    pub fn upto(&self, k: usize) -> Self {
        PrefixG {
            locs: self.locs[..=k].to_vec(),
            letters: self.letters[..k].to_vec(),
        }
    }

    /// Drops the last round. `None` for a single-location prefix.
    pub fn parent(&self) -> Option<Self> {
        (self.steps() > 0).then(|| self.upto(self.steps() - 1))
    }

    /// Same length and the same input/output letters.
    pub fn action_matches(&self, other: &PrefixG) -> bool {
        self.letters == other.letters
    }

    /// Same letters, other locations.
    pub fn with_locs(&self, locs: Vec<Loc>) -> Result<Self> {
        if locs.len() != self.locs.len() {
            return Err(Error::LengthMismatch);
        }
        Ok(PrefixG {
            locs,
            letters: self.letters.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use alloc::string::ToString;

    fn one_loc() -> UncertaintyGame {
        let mut g = UncertaintyGame::with_sizes(1, 1, 1);
        g.set_delta(Loc(0), Input(0), Output(0), Distribution::dirac(Loc(0)));
        g.set_un(Loc(0), Distribution::dirac(Loc(0)));
        g
    }

    #[test]
    fn dirac_game_is_well_formed() {
        assert!(one_loc().validate().is_ok());
    }

    #[test]
    fn short_sum_is_reported() {
        let mut g = one_loc();
        g.set_delta(
            Loc(0),
            Input(0),
            Output(0),
            Distribution::from_weights([(Loc(0), Rational::new(3, 4))]),
        );
        let r = g.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(r.to_string().contains("distribution sum != 1"), "{r}");
    }

    #[test]
    fn dangling_un_target_is_reported() {
        let mut g = one_loc();
        g.set_un(Loc(0), Distribution::dirac(Loc(5)));
        let r = g.validate();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DanglingLocation { target: 5, .. })));
        assert!(r.to_string().contains("dangling location"));
    }

    #[test]
    fn missing_rows_and_empty_alphabets() {
        let mut g = UncertaintyGame::with_sizes(2, 1, 0);
        g.set_identity_un();
        let r = g.validate();
        assert!(r
            .violations
            .contains(&Violation::EmptyAlphabet("output alphabet")));
        let mut g = UncertaintyGame::with_sizes(2, 1, 1);
        g.set_identity_un();
        g.set_delta(Loc(0), Input(0), Output(0), Distribution::dirac(Loc(1)));
        let r = g.validate();
        assert_eq!(
            r.violations,
            alloc::vec![Violation::MissingRow("delta(l1, i0, o0)".into())]
        );
    }

    #[test]
    fn transition_dist_echoes_rows_and_rejects_unknown_letters() {
        let mut g = UncertaintyGame::with_sizes(2, 1, 1);
        g.set_identity_un();
        let d = Distribution::new([(Loc(0), Rational::new(1, 3)), (Loc(1), Rational::new(2, 3))])
            .unwrap();
        g.set_delta(Loc(0), Input(0), Output(0), d.clone());
        g.set_delta(Loc(1), Input(0), Output(0), Distribution::dirac(Loc(1)));
        assert_eq!(g.transition_dist(Loc(0), Input(0), Output(0)).unwrap(), &d);
        assert_eq!(
            g.transition_dist(Loc(1), Input(0), Output(0)).unwrap(),
            &Distribution::dirac(Loc(1))
        );
        assert_eq!(
            g.transition_dist(Loc(0), Input(3), Output(0)),
            Err(Error::UnknownInput(3))
        );
        assert_eq!(
            g.transition_dist(Loc(9), Input(0), Output(0)),
            Err(Error::UnknownLocation(9))
        );
    }

    #[test]
    fn prefix_names_round_trip() {
        let g = UncertaintyGame::with_sizes(2, 2, 2);
        let p = g.parse_prefix("l0 i1 o0 l1 i0 o1 l0").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.steps(), 2);
        assert_eq!(p.last(), Loc(0));
        assert_eq!(g.format_prefix(&p), "l0 i1 o0 l1 i0 o1 l0");
        assert!(g.parse_prefix("l0 i1").is_err());
        assert!(matches!(
            g.parse_prefix("l0 i9 o0 l1"),
            Err(Error::UnknownName(_))
        ));
        assert_eq!(p.parent().unwrap(), g.parse_prefix("l0 i1 o0 l1").unwrap());
    }
}
