//! JSON file formats. Probabilities are `"num/den"` strings; every file that
//! is written here parses back to an equal object.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use ugame_core::pog::ObsSeqH;
use ugame_core::{
    Action, Distribution, Input, Loc, Objective, ObjectiveKind, ObsBasedStrategy, Output,
    PartialObsGame, Partition, Player, Pomdp, PrefixG, PrefixH, Rational, ReducedGame, State,
    StrategyG1, StrategyG2, UncertaintyGame,
};

/// Why a file could not be used. `exit_code` follows the sysexits numbering.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed {what} at line {line}, column {column}, field `{field}`: {msg}")]
    Malformed {
        what: &'static str,
        line: usize,
        column: usize,
        field: String,
        msg: String,
    },
    #[error("invalid {what}:\n{report}")]
    Invalid { what: &'static str, report: String },
}

impl LoadError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LoadError::Io { .. } => 66,
            LoadError::Malformed { .. } => 64,
            LoadError::Invalid { .. } => 65,
        }
    }

    fn invalid(what: &'static str, report: impl fmt::Display) -> Self {
        LoadError::Invalid {
            what,
            report: report.to_string(),
        }
    }
}

pub type LoadResult<T> = Result<T, LoadError>;

pub fn read_file(path: &Path) -> LoadResult<String> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses JSON, reporting the line, column and field path of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &'static str) -> LoadResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Malformed {
            what,
            line: inner.line(),
            column: inner.column(),
            field,
            msg: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| LoadError::Malformed {
        what,
        line: e.line(),
        column: e.column(),
        field: ".".into(),
        msg: e.to_string(),
    })?;
    Ok(value)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize")
}

/// A probability written as `"num/den"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prob(pub Rational);

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rational::from_str(&s)
            .map(Prob)
            .map_err(|e| serde::de::Error::custom(format!("bad probability `{s}`: {e}")))
    }
}

/// A name list, written as an array; a space-separated string is also read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Names {
    List(Vec<String>),
    Text(String),
}

impl Names {
    pub fn tokens(&self) -> Vec<String> {
        match self {
            Names::List(v) => v.clone(),
            Names::Text(s) => s.split_whitespace().map(String::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocProb {
    pub loc: String,
    pub prob: Prob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateProb {
    pub state: String,
    pub prob: Prob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionProb {
    pub action: String,
    pub prob: Prob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<BTreeMap<String, u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaRow {
    pub from: String,
    #[serde(rename = "in")]
    pub input: String,
    pub out: String,
    pub to: Vec<LocProb>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnRow {
    pub from: String,
    pub to: Vec<LocProb>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub locations: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: String,
    pub delta: Vec<DeltaRow>,
    pub un: Vec<UnRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveFile>,
}

/// Looks names up, collecting every unknown one instead of stopping.
struct Resolver<'a> {
    what: &'a str,
    names: &'a [String],
}

impl Resolver<'_> {
    fn get(&self, name: &str, errs: &mut Vec<String>) -> u32 {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i as u32,
            None => {
                errs.push(format!("dangling {} `{name}`", self.what));
                u32::MAX
            }
        }
    }
}

fn finish<T>(what: &'static str, errs: Vec<String>, value: T) -> LoadResult<T> {
    if errs.is_empty() {
        Ok(value)
    } else {
        Err(LoadError::invalid(what, errs.join("\n")))
    }
}

fn objective_from_file(
    f: &ObjectiveFile,
    names: &[String],
    what: &'static str,
    kind_override: Option<ObjectiveKind>,
) -> LoadResult<Objective> {
    let kind = match kind_override {
        Some(k) => k,
        None => ObjectiveKind::parse(&f.kind).ok_or_else(|| {
            LoadError::invalid(what, format!("unknown objective kind `{}`", f.kind))
        })?,
    };
    objective_of_kind(
        kind,
        f.target.as_deref(),
        f.priorities.as_ref(),
        names,
        what,
    )
}

pub fn objective_of_kind(
    kind: ObjectiveKind,
    target: Option<&[String]>,
    priorities: Option<&BTreeMap<String, u32>>,
    names: &[String],
    what: &'static str,
) -> LoadResult<Objective> {
    let r = Resolver {
        what: "location",
        names,
    };
    let mut errs = Vec::new();
    if kind == ObjectiveKind::Parity {
        let Some(p) = priorities else {
            return Err(LoadError::invalid(
                what,
                "a parity objective needs `priorities`",
            ));
        };
        let mut out = vec![None; names.len()];
        for (n, &v) in p {
            let i = r.get(n, &mut errs);
            if let Some(slot) = out.get_mut(i as usize) {
                *slot = Some(v);
            }
        }
        for (i, v) in out.iter().enumerate() {
            if v.is_none() {
                errs.push(format!("no priority for `{}`", names[i]));
            }
        }
        return finish(
            what,
            errs,
            Objective::Parity(out.into_iter().map(|v| v.unwrap_or(0)).collect()),
        );
    }
    let Some(t) = target else {
        return Err(LoadError::invalid(
            what,
            format!("a {} objective needs `target`", kind.name()),
        ));
    };
    let mut set = vec![false; names.len()];
    for n in t {
        let i = r.get(n, &mut errs);
        if let Some(slot) = set.get_mut(i as usize) {
            *slot = true;
        }
    }
    let obj = match kind {
        ObjectiveKind::Reach => Objective::Reach(set),
        ObjectiveKind::Safe => Objective::Safe(set),
        ObjectiveKind::Buchi => Objective::Buchi(set),
        ObjectiveKind::CoBuchi => Objective::CoBuchi(set),
        ObjectiveKind::Parity => unreachable!(),
    };
    finish(what, errs, obj)
}

pub fn objective_to_file(obj: &Objective, names: &[String]) -> ObjectiveFile {
    match obj {
        Objective::Parity(p) => ObjectiveFile {
            kind: obj.kind().name().into(),
            target: None,
            priorities: Some(names.iter().cloned().zip(p.iter().copied()).collect()),
        },
        _ => ObjectiveFile {
            kind: obj.kind().name().into(),
            target: Some(
                obj.target()
                    .unwrap()
                    .iter()
                    .zip(names)
                    .filter(|(b, _)| **b)
                    .map(|(_, n)| n.clone())
                    .collect(),
            ),
            priorities: None,
        },
    }
}

impl GameFile {
    /// Resolves names and validates; the objective is returned separately.
    pub fn to_game(&self) -> LoadResult<(UncertaintyGame, Option<Objective>)> {
        const WHAT: &str = "game";
        let mut errs = Vec::new();
        let locs = Resolver {
            what: "location",
            names: &self.locations,
        };
        let ins = Resolver {
            what: "input",
            names: &self.inputs,
        };
        let outs = Resolver {
            what: "output",
            names: &self.outputs,
        };
        let mut g = UncertaintyGame {
            locations: self.locations.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: Loc(locs.get(&self.initial, &mut errs)),
            delta: BTreeMap::new(),
            un: BTreeMap::new(),
        };
        let dist = |to: &[LocProb], errs: &mut Vec<String>| {
            Distribution::from_weights(
                to.iter()
                    .map(|lp| (Loc(locs.get(&lp.loc, errs)), lp.prob.0.clone())),
            )
        };
        for row in &self.delta {
            let key = (
                Loc(locs.get(&row.from, &mut errs)),
                Input(ins.get(&row.input, &mut errs)),
                Output(outs.get(&row.out, &mut errs)),
            );
            let d = dist(&row.to, &mut errs);
            if g.delta.insert(key, d).is_some() {
                errs.push(format!(
                    "duplicate delta row ({}, {}, {})",
                    row.from, row.input, row.out
                ));
            }
        }
        for row in &self.un {
            let key = Loc(locs.get(&row.from, &mut errs));
            let d = dist(&row.to, &mut errs);
            if g.un.insert(key, d).is_some() {
                errs.push(format!("duplicate un row {}", row.from));
            }
        }
        if !errs.is_empty() {
            return finish(WHAT, errs, (g, None));
        }
        let report = g.validate();
        if !report.is_ok() {
            return Err(LoadError::invalid(WHAT, report));
        }
        let obj = self
            .objective
            .as_ref()
            .map(|o| objective_from_file(o, &self.locations, WHAT, None))
            .transpose()?;
        Ok((g, obj))
    }

    pub fn from_game(g: &UncertaintyGame, obj: Option<&Objective>) -> Self {
        let lp = |d: &Distribution<Loc>| {
            d.iter()
                .map(|(l, p)| LocProb {
                    loc: g.locations[l.idx()].clone(),
                    prob: Prob(p.clone()),
                })
                .collect()
        };
        GameFile {
            locations: g.locations.clone(),
            inputs: g.inputs.clone(),
            outputs: g.outputs.clone(),
            initial: g.locations[g.initial.idx()].clone(),
            delta: g
                .delta
                .iter()
                .map(|((l, i, o), d)| DeltaRow {
                    from: g.locations[l.idx()].clone(),
                    input: g.inputs[i.idx()].clone(),
                    out: g.outputs[o.idx()].clone(),
                    to: lp(d),
                })
                .collect(),
            un: g
                .un
                .iter()
                .map(|(l, d)| UnRow {
                    from: g.locations[l.idx()].clone(),
                    to: lp(d),
                })
                .collect(),
            objective: obj.map(|o| objective_to_file(o, &g.locations)),
        }
    }
}

pub fn load_game(path: &Path) -> LoadResult<(UncertaintyGame, Option<Objective>)> {
    parse_json::<GameFile>(&read_file(path)?, "game")?.to_game()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyRow {
    pub prefix: Names,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_prefix: Option<Names>,
    pub dist: Vec<ActionProb>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub depth: usize,
    pub player: u8,
    #[serde(default = "ordinary")]
    pub variant: String,
    pub rows: Vec<StrategyRow>,
}

fn ordinary() -> String {
    "ordinary".into()
}

/// A loaded strategy for one of the two players.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GStrategy {
    One(StrategyG1),
    Two(StrategyG2),
}

fn prefix_of(g: &UncertaintyGame, names: &Names, errs: &mut Vec<String>) -> Option<PrefixG> {
    match g.prefix_from_names(&names.tokens()) {
        Ok(p) => Some(p),
        Err(e) => {
            errs.push(format!("prefix `{}`: {e}", names.tokens().join(" ")));
            None
        }
    }
}

impl StrategyFile {
    pub fn to_strategy(&self, g: &UncertaintyGame) -> LoadResult<GStrategy> {
        const WHAT: &str = "strategy";
        let mut errs = Vec::new();
        let all_powerful = match self.variant.as_str() {
            "ordinary" => false,
            "all-powerful" => true,
            v => {
                return Err(LoadError::invalid(
                    WHAT,
                    format!("unknown variant `{v}` (ordinary|all-powerful)"),
                ))
            }
        };
        let out =
            match self.player {
                1 => {
                    let ins = Resolver {
                        what: "input",
                        names: &g.inputs,
                    };
                    let mut table = BTreeMap::new();
                    for row in &self.rows {
                        let d =
                            Distribution::from_weights(row.dist.iter().map(|ap| {
                                (Input(ins.get(&ap.action, &mut errs)), ap.prob.0.clone())
                            }));
                        if let Some(p) = prefix_of(g, &row.prefix, &mut errs) {
                            table.insert(p, d);
                        }
                    }
                    GStrategy::One(StrategyG1 {
                        depth: self.depth,
                        table,
                    })
                }
                2 => {
                    let ins = Resolver {
                        what: "input",
                        names: &g.inputs,
                    };
                    let outs = Resolver {
                        what: "output",
                        names: &g.outputs,
                    };
                    let mut ord = BTreeMap::new();
                    let mut ap = BTreeMap::new();
                    for row in &self.rows {
                        let d =
                            Distribution::from_weights(row.dist.iter().map(|a| {
                                (Output(outs.get(&a.action, &mut errs)), a.prob.0.clone())
                            }));
                        let Some(i) = row.input.as_ref() else {
                            errs.push("a Player-2 row needs `input`".into());
                            continue;
                        };
                        let i = Input(ins.get(i, &mut errs));
                        let Some(p) = prefix_of(g, &row.prefix, &mut errs) else {
                            continue;
                        };
                        if all_powerful {
                            let Some(q) = row.observed_prefix.as_ref() else {
                                errs.push("an all-powerful row needs `observed_prefix`".into());
                                continue;
                            };
                            if let Some(q) = prefix_of(g, q, &mut errs) {
                                ap.insert((p, q, i), d);
                            }
                        } else {
                            ord.insert((p, i), d);
                        }
                    }
                    GStrategy::Two(if all_powerful {
                        StrategyG2::AllPowerful {
                            depth: self.depth,
                            table: ap,
                        }
                    } else {
                        StrategyG2::Ordinary {
                            depth: self.depth,
                            table: ord,
                        }
                    })
                }
                p => {
                    return Err(LoadError::invalid(
                        WHAT,
                        format!("player must be 1 or 2, got {p}"),
                    ))
                }
            };
        if !errs.is_empty() {
            return finish(WHAT, errs, out);
        }
        let checked = match &out {
            GStrategy::One(s) => s.check(g),
            GStrategy::Two(s) => s.check(g),
        };
        checked.map_err(|e| LoadError::invalid(WHAT, e))?;
        Ok(out)
    }

    pub fn from_g1(g: &UncertaintyGame, s: &StrategyG1) -> Self {
        let rows = s
            .table
            .iter()
            .map(|(p, d)| StrategyRow {
                prefix: Names::List(g.prefix_names(p)),
                input: None,
                observed_prefix: None,
                dist: d
                    .iter()
                    .map(|(i, w)| ActionProb {
                        action: g.inputs[i.idx()].clone(),
                        prob: Prob(w.clone()),
                    })
                    .collect(),
            })
            .collect();
        StrategyFile {
            depth: s.depth,
            player: 1,
            variant: ordinary(),
            rows,
        }
    }

    pub fn from_g2(g: &UncertaintyGame, s: &StrategyG2) -> Self {
        let dist = |d: &Distribution<Output>| -> Vec<ActionProb> {
            d.iter()
                .map(|(o, w)| ActionProb {
                    action: g.outputs[o.idx()].clone(),
                    prob: Prob(w.clone()),
                })
                .collect()
        };
        let (variant, rows) = match s {
            StrategyG2::Ordinary { table, .. } => (
                ordinary(),
                table
                    .iter()
                    .map(|((p, i), d)| StrategyRow {
                        prefix: Names::List(g.prefix_names(p)),
                        input: Some(g.inputs[i.idx()].clone()),
                        observed_prefix: None,
                        dist: dist(d),
                    })
                    .collect(),
            ),
            StrategyG2::AllPowerful { table, .. } => (
                "all-powerful".into(),
                table
                    .iter()
                    .map(|((p, q, i), d)| StrategyRow {
                        prefix: Names::List(g.prefix_names(p)),
                        input: Some(g.inputs[i.idx()].clone()),
                        observed_prefix: Some(Names::List(g.prefix_names(q))),
                        dist: dist(d),
                    })
                    .collect(),
            ),
        };
        StrategyFile {
            depth: s.depth(),
            player: 2,
            variant,
            rows,
        }
    }
}

pub fn load_strategy(path: &Path, g: &UncertaintyGame) -> LoadResult<GStrategy> {
    parse_json::<StrategyFile>(&read_file(path)?, "strategy")?.to_strategy(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PogState {
    pub name: String,
    pub owner: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PogRow {
    pub from: String,
    pub action: String,
    pub to: Vec<StateProb>,
}

/// Which product element a state of a reduced game stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub state: String,
    pub first: String,
    pub second: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PogFile {
    pub states: Vec<PogState>,
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
    pub delta: Vec<PogRow>,
    pub obs1: Vec<Vec<String>>,
    pub obs2: Vec<Vec<String>>,
    pub initial: Vec<StateProb>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<Provenance>>,
}

fn blocks_of(p: &Partition, names: &[String]) -> Vec<Vec<String>> {
    p.blocks
        .iter()
        .map(|b| b.iter().map(|s| names[s.idx()].clone()).collect())
        .collect()
}

fn partition_of(
    blocks: &[Vec<String>],
    r: &Resolver,
    n: usize,
    errs: &mut Vec<String>,
) -> Partition {
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(|s| State(r.get(s, errs))).collect())
        .collect();
    Partition::from_blocks(n, blocks)
}

impl PogFile {
    pub fn to_pog(&self) -> LoadResult<(PartialObsGame, Option<Vec<u32>>)> {
        const WHAT: &str = "partial-observation game";
        let mut errs = Vec::new();
        let names: Vec<String> = self.states.iter().map(|s| s.name.clone()).collect();
        let states = Resolver {
            what: "state",
            names: &names,
        };
        let owner: Vec<Player> = self
            .states
            .iter()
            .map(|s| match s.owner {
                1 => Player::One,
                2 => Player::Two,
                o => {
                    errs.push(format!("state `{}` has owner {o}; expected 1 or 2", s.name));
                    Player::One
                }
            })
            .collect();
        let mut delta = BTreeMap::new();
        for row in &self.delta {
            let from = State(states.get(&row.from, &mut errs));
            let acts = match owner.get(from.idx()) {
                Some(Player::Two) => &self.actions2,
                _ => &self.actions1,
            };
            let a = Action(
                Resolver {
                    what: "action",
                    names: acts,
                }
                .get(&row.action, &mut errs),
            );
            let d = Distribution::from_weights(
                row.to
                    .iter()
                    .map(|sp| (State(states.get(&sp.state, &mut errs)), sp.prob.0.clone())),
            );
            if delta.insert((from, a), d).is_some() {
                errs.push(format!(
                    "duplicate delta row ({}, {})",
                    row.from, row.action
                ));
            }
        }
        let n = names.len();
        let obs1 = partition_of(&self.obs1, &states, n, &mut errs);
        let obs2 = partition_of(&self.obs2, &states, n, &mut errs);
        let initial = Distribution::from_weights(
            self.initial
                .iter()
                .map(|sp| (State(states.get(&sp.state, &mut errs)), sp.prob.0.clone())),
        );
        let priorities = self.priorities.as_ref().map(|p| {
            let mut out = vec![0; n];
            for (s, &v) in p {
                let i = states.get(s, &mut errs) as usize;
                if let Some(slot) = out.get_mut(i) {
                    *slot = v;
                }
            }
            out
        });
        let h = PartialObsGame {
            states: names.clone(),
            owner,
            actions1: self.actions1.clone(),
            actions2: self.actions2.clone(),
            delta,
            obs1,
            obs2,
            initial,
        };
        if !errs.is_empty() {
            return finish(WHAT, errs, (h, priorities));
        }
        let report = h.validate();
        if !report.is_ok() {
            return Err(LoadError::invalid(WHAT, report));
        }
        Ok((h, priorities))
    }

    pub fn from_pog(h: &PartialObsGame, priorities: Option<&[u32]>) -> Self {
        let sp = |d: &Distribution<State>| {
            d.iter()
                .map(|(s, p)| StateProb {
                    state: h.states[s.idx()].clone(),
                    prob: Prob(p.clone()),
                })
                .collect()
        };
        PogFile {
            states: h
                .states
                .iter()
                .zip(&h.owner)
                .map(|(n, o)| PogState {
                    name: n.clone(),
                    owner: if *o == Player::One { 1 } else { 2 },
                })
                .collect(),
            actions1: h.actions1.clone(),
            actions2: h.actions2.clone(),
            delta: h
                .delta
                .iter()
                .map(|((s, a), d)| PogRow {
                    from: h.states[s.idx()].clone(),
                    action: h.actions_of(h.owner_of(*s))[a.idx()].clone(),
                    to: sp(d),
                })
                .collect(),
            obs1: blocks_of(&h.obs1, &h.states),
            obs2: blocks_of(&h.obs2, &h.states),
            initial: sp(&h.initial),
            priorities: priorities
                .map(|p| h.states.iter().cloned().zip(p.iter().copied()).collect()),
            provenance: None,
        }
    }

    /// The reduced game with its priorities and the product provenance.
    pub fn from_reduced(rg: &ReducedGame) -> Self {
        use ugame_core::reduce::forward::Product;
        let g = &rg.source;
        let mut f = Self::from_pog(
            &rg.pog,
            rg.objective.as_ref().map(|_| rg.priorities.as_slice()),
        );
        f.provenance = Some(
            rg.pog
                .state_ids()
                .map(|s| {
                    let (a, b, i) = match rg.decode(s) {
                        Product::Pair(a, b) => (a, b, None),
                        Product::Inter(a, b, i) => (a, b, Some(g.inputs[i.idx()].clone())),
                    };
                    Provenance {
                        state: rg.pog.states[s.idx()].clone(),
                        first: g.locations[a.idx()].clone(),
                        second: g.locations[b.idx()].clone(),
                        input: i,
                    }
                })
                .collect(),
        );
        f
    }
}

pub fn load_pog(path: &Path) -> LoadResult<(PartialObsGame, Option<Vec<u32>>)> {
    parse_json::<PogFile>(&read_file(path)?, "partial-observation game")?.to_pog()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PomdpRow {
    pub from: String,
    pub action: String,
    pub to: Vec<StateProb>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PomdpFile {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub initial: String,
    pub delta: Vec<PomdpRow>,
    pub obs: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveFile>,
}

impl PomdpFile {
    pub fn to_pomdp(&self) -> LoadResult<(Pomdp, Option<Objective>)> {
        const WHAT: &str = "POMDP";
        let mut errs = Vec::new();
        let states = Resolver {
            what: "state",
            names: &self.states,
        };
        let acts = Resolver {
            what: "action",
            names: &self.actions,
        };
        let mut delta = BTreeMap::new();
        for row in &self.delta {
            let key = (
                State(states.get(&row.from, &mut errs)),
                Action(acts.get(&row.action, &mut errs)),
            );
            let d = Distribution::from_weights(
                row.to
                    .iter()
                    .map(|sp| (State(states.get(&sp.state, &mut errs)), sp.prob.0.clone())),
            );
            if delta.insert(key, d).is_some() {
                errs.push(format!(
                    "duplicate delta row ({}, {})",
                    row.from, row.action
                ));
            }
        }
        let m = Pomdp {
            states: self.states.clone(),
            actions: self.actions.clone(),
            delta,
            obs: partition_of(&self.obs, &states, self.states.len(), &mut errs),
            initial: State(states.get(&self.initial, &mut errs)),
        };
        if !errs.is_empty() {
            return finish(WHAT, errs, (m, None));
        }
        let report = m.validate();
        if !report.is_ok() {
            return Err(LoadError::invalid(WHAT, report));
        }
        let obj = self
            .objective
            .as_ref()
            .map(|o| objective_from_file(o, &self.states, WHAT, None))
            .transpose()?;
        Ok((m, obj))
    }

    pub fn from_pomdp(m: &Pomdp, obj: Option<&Objective>) -> Self {
        PomdpFile {
            states: m.states.clone(),
            actions: m.actions.clone(),
            initial: m.states[m.initial.idx()].clone(),
            delta: m
                .delta
                .iter()
                .map(|((s, a), d)| PomdpRow {
                    from: m.states[s.idx()].clone(),
                    action: m.actions[a.idx()].clone(),
                    to: d
                        .iter()
                        .map(|(t, p)| StateProb {
                            state: m.states[t.idx()].clone(),
                            prob: Prob(p.clone()),
                        })
                        .collect(),
                })
                .collect(),
            obs: blocks_of(&m.obs, &m.states),
            objective: obj.map(|o| objective_to_file(o, &m.states)),
        }
    }
}

pub fn load_pomdp(path: &Path) -> LoadResult<(Pomdp, Option<Objective>)> {
    parse_json::<PomdpFile>(&read_file(path)?, "POMDP")?.to_pomdp()
}

/// An observation-based strategy, one row per observation sequence, keyed by
/// a representative history (alternating state and action names).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObsStrategyFile {
    pub player: u8,
    pub max_len: usize,
    pub rows: Vec<ObsStrategyRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObsStrategyRow {
    pub history: Vec<String>,
    pub dist: Vec<ActionProb>,
}

impl ObsStrategyFile {
    /// Representatives take the first member of each observation block.
    pub fn from_strategy(h: &PartialObsGame, s: &ObsBasedStrategy) -> Self {
        let part = h.partition(s.player);
        let rows = s
            .table
            .iter()
            .map(|(key, d)| {
                let mut history = Vec::new();
                let mut owner = Player::One;
                for (k, &b) in key.obs.iter().enumerate() {
                    if k > 0 {
                        history.push(h.actions_of(owner)[key.actions[k - 1].idx()].clone());
                    }
                    let st = part.block(b)[0];
                    owner = h.owner_of(st);
                    history.push(h.states[st.idx()].clone());
                }
                let acts = h.actions_of(s.player);
                ObsStrategyRow {
                    history,
                    dist: d
                        .iter()
                        .map(|(a, w)| ActionProb {
                            action: acts[a.idx()].clone(),
                            prob: Prob(w.clone()),
                        })
                        .collect(),
                }
            })
            .collect();
        ObsStrategyFile {
            player: if s.player == Player::One { 1 } else { 2 },
            max_len: s.max_len,
            rows,
        }
    }

    pub fn to_strategy(&self, h: &PartialObsGame) -> LoadResult<ObsBasedStrategy> {
        const WHAT: &str = "observation-based strategy";
        let player = match self.player {
            1 => Player::One,
            2 => Player::Two,
            p => {
                return Err(LoadError::invalid(
                    WHAT,
                    format!("player must be 1 or 2, got {p}"),
                ))
            }
        };
        let mut errs = Vec::new();
        let states = Resolver {
            what: "state",
            names: &h.states,
        };
        let acts = Resolver {
            what: "action",
            names: h.actions_of(player),
        };
        let mut table: BTreeMap<ObsSeqH, Distribution<Action>> = BTreeMap::new();
        for row in &self.rows {
            if row.history.len() % 2 == 0 {
                errs.push(format!(
                    "history `{}` must alternate states and actions",
                    row.history.join(" ")
                ));
                continue;
            }
            let mut st = vec![State(states.get(&row.history[0], &mut errs))];
            let mut ac = Vec::new();
            for pair in row.history[1..].chunks(2) {
                let owner = st
                    .last()
                    .and_then(|s| h.owner.get(s.idx()))
                    .copied()
                    .unwrap_or(Player::One);
                ac.push(Action(
                    Resolver {
                        what: "action",
                        names: h.actions_of(owner),
                    }
                    .get(&pair[0], &mut errs),
                ));
                st.push(State(states.get(&pair[1], &mut errs)));
            }
            let d = Distribution::from_weights(
                row.dist
                    .iter()
                    .map(|ap| (Action(acts.get(&ap.action, &mut errs)), ap.prob.0.clone())),
            );
            if !errs.is_empty() {
                continue;
            }
            if let Err(e) = d.check() {
                errs.push(format!("row `{}`: {e}", row.history.join(" ")));
            }
            match PrefixH::from_parts(st, ac) {
                Ok(rho) => {
                    let key = h.observation_seq(player, &rho);
                    if table.insert(key, d).is_some() {
                        errs.push(format!(
                            "two rows share the observations of `{}`",
                            row.history.join(" ")
                        ));
                    }
                }
                Err(e) => errs.push(e.to_string()),
            }
        }
        finish(
            WHAT,
            errs,
            ObsBasedStrategy {
                player,
                max_len: self.max_len,
                table,
            },
        )
    }
}

pub fn mode_name(mode: ugame_core::Variant) -> &'static str {
    match mode {
        ugame_core::Variant::Ordinary => "standard",
        ugame_core::Variant::AllPowerful => "all-powerful",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game_json() -> &'static str {
        r#"{
  "locations": ["a", "b"],
  "inputs": ["x"],
  "outputs": ["y"],
  "initial": "a",
  "delta": [
    {"from": "a", "in": "x", "out": "y", "to": [{"loc": "a", "prob": "1/3"}, {"loc": "b", "prob": "2/3"}]},
    {"from": "b", "in": "x", "out": "y", "to": [{"loc": "b", "prob": "1/1"}]}
  ],
  "un": [
    {"from": "a", "to": [{"loc": "a", "prob": "1/2"}, {"loc": "b", "prob": "1/2"}]},
    {"from": "b", "to": [{"loc": "b", "prob": "1"}]}
  ],
  "objective": {"kind": "reach", "target": ["b"]}
}"#
    }

    #[test]
    fn game_round_trip() {
        let f: GameFile = parse_json(game_json(), "game").unwrap();
        let (g, obj) = f.to_game().unwrap();
        assert_eq!(obj, Some(Objective::Reach(vec![false, true])));
        assert_eq!(
            g.transition_dist(Loc(0), Input(0), Output(0))
                .unwrap()
                .prob(&Loc(1)),
            Rational::new(2, 3)
        );
        let back = to_json(&GameFile::from_game(&g, obj.as_ref()));
        let (g2, obj2) = parse_json::<GameFile>(&back, "game")
            .unwrap()
            .to_game()
            .unwrap();
        assert_eq!((g, obj), (g2, obj2));
        assert!(back.contains("\"1/1\""));
    }

    #[test]
    fn malformed_names_line_and_field() {
        let bad = game_json().replace("\"2/3\"", "\"two thirds\"");
        match parse_json::<GameFile>(&bad, "game") {
            Err(e @ LoadError::Malformed { .. }) => {
                let LoadError::Malformed {
                    line, ref field, ..
                } = e
                else {
                    unreachable!()
                };
                assert_eq!(line, 7);
                assert_eq!(field, "delta[0].to[1].prob");
                assert_eq!(e.exit_code(), 64);
            }
            other => panic!("{other:?}"),
        }
        let unknown = game_json().replace("\"initial\"", "\"start\"");
        assert!(matches!(
            parse_json::<GameFile>(&unknown, "game"),
            Err(LoadError::Malformed { .. })
        ));
    }

    #[test]
    fn semantic_errors_are_reported() {
        let sum = game_json().replace("\"2/3\"", "\"1/3\"");
        let e = parse_json::<GameFile>(&sum, "game")
            .unwrap()
            .to_game()
            .unwrap_err();
        assert_eq!(e.exit_code(), 65);
        assert!(e.to_string().contains("sum"), "{e}");
        let dangling = game_json().replace(
            "{\"loc\": \"b\", \"prob\": \"1\"}",
            "{\"loc\": \"c\", \"prob\": \"1\"}",
        );
        let e = parse_json::<GameFile>(&dangling, "game")
            .unwrap()
            .to_game()
            .unwrap_err();
        assert!(e.to_string().contains("dangling location `c`"), "{e}");
    }

    #[test]
    fn strategies_round_trip() {
        let (g, _) = parse_json::<GameFile>(game_json(), "game")
            .unwrap()
            .to_game()
            .unwrap();
        let a = StrategyG1::constant(&g, 2, Distribution::dirac(Input(0)));
        let f = StrategyFile::from_g1(&g, &a);
        let back = parse_json::<StrategyFile>(&to_json(&f), "strategy")
            .unwrap()
            .to_strategy(&g)
            .unwrap();
        assert_eq!(back, GStrategy::One(a));
        let b = StrategyG2::all_powerful_from_fn(&g, 2, |_, _, _| Distribution::dirac(Output(0)));
        let f = StrategyFile::from_g2(&g, &b);
        let back = parse_json::<StrategyFile>(&to_json(&f), "strategy")
            .unwrap()
            .to_strategy(&g)
            .unwrap();
        assert_eq!(back, GStrategy::Two(b));
    }

    #[test]
    fn text_prefixes_are_accepted() {
        let (g, _) = parse_json::<GameFile>(game_json(), "game")
            .unwrap()
            .to_game()
            .unwrap();
        let text = r#"{"depth": 1, "player": 1, "rows": [{"prefix": "a", "dist": [{"action": "x", "prob": "1/1"}]},
            {"prefix": ["b"], "dist": [{"action": "x", "prob": "1/1"}]}]}"#;
        let GStrategy::One(s) = parse_json::<StrategyFile>(text, "strategy")
            .unwrap()
            .to_strategy(&g)
            .unwrap()
        else {
            panic!()
        };
        assert_eq!(s.table.len(), 2);
    }

    #[test]
    fn pog_and_pomdp_round_trip() {
        let (g, obj) = parse_json::<GameFile>(game_json(), "game")
            .unwrap()
            .to_game()
            .unwrap();
        let rg = ugame_core::reduce_game(&g, obj.as_ref(), ugame_core::Variant::Ordinary).unwrap();
        let f = PogFile::from_reduced(&rg);
        assert_eq!(f.provenance.as_ref().unwrap().len(), 4 + 4);
        let (h, p) = parse_json::<PogFile>(&to_json(&f), "pog")
            .unwrap()
            .to_pog()
            .unwrap();
        assert_eq!(h, rg.pog);
        assert_eq!(p.unwrap(), rg.priorities);

        let m = Pomdp {
            states: vec!["s".into(), "t".into()],
            actions: vec!["go".into()],
            delta: [
                (
                    (State(0), Action(0)),
                    Distribution::new([
                        (State(0), Rational::new(1, 2)),
                        (State(1), Rational::new(1, 2)),
                    ])
                    .unwrap(),
                ),
                ((State(1), Action(0)), Distribution::dirac(State(1))),
            ]
            .into_iter()
            .collect(),
            obs: Partition::blind(2),
            initial: State(0),
        };
        let obj = Objective::Reach(vec![false, true]);
        let back =
            parse_json::<PomdpFile>(&to_json(&PomdpFile::from_pomdp(&m, Some(&obj))), "POMDP")
                .unwrap()
                .to_pomdp()
                .unwrap();
        assert_eq!(back, (m.clone(), Some(obj)));

        let s = m
            .obs_based(
                2,
                m.all_histories(2)
                    .into_iter()
                    .map(|r| (r, Distribution::dirac(Action(0)))),
            )
            .unwrap();
        let h = m.to_pog();
        let f = ObsStrategyFile::from_strategy(&h, &s);
        assert_eq!(
            parse_json::<ObsStrategyFile>(&to_json(&f), "s")
                .unwrap()
                .to_strategy(&h)
                .unwrap(),
            s
        );
    }
}
