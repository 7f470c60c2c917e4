//! Runs the lemma checkers over seeded random instances and builds the JSON
//! report.

use std::path::Path;

use serde::Serialize;
use ugame_core::{
    check_lemma, reduce_game, reduce_pomdp, Bounds, Instance, LemmaKind, LemmaReport,
};

use crate::format::{to_json, GameFile, ObsStrategyFile, PogFile, PomdpFile, StrategyFile};
use crate::random;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lemmas: Vec<LemmaKind>,
    pub seed: u64,
    pub instances: usize,
    /// Strategy and check depth for the game lemmas.
    pub game_depth: usize,
    /// Check depth for the POMDP lemmas.
    pub pomdp_depth: usize,
    pub bounds: Bounds,
    pub threads: usize,
}

impl RunConfig {
    pub fn new(lemmas: Vec<LemmaKind>, seed: u64, instances: usize) -> Self {
        RunConfig {
            lemmas,
            seed,
            instances,
            game_depth: 2,
            pomdp_depth: 3,
            bounds: Bounds::default(),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleJson {
    pub description: String,
    pub lhs: String,
    pub rhs: String,
    pub at_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub lemma: String,
    pub instance: String,
    pub depth: usize,
    pub checked: u64,
    pub verified: bool,
    pub counterexample: Option<CounterexampleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl From<&LemmaReport> for Entry {
    fn from(r: &LemmaReport) -> Self {
        Entry {
            lemma: r.lemma.name().into(),
            instance: r.instance.clone(),
            depth: r.depth,
            checked: r.checked,
            verified: r.verified(),
            counterexample: r.counterexample.as_ref().map(|c| CounterexampleJson {
                description: c.description.clone(),
                lhs: c.lhs.to_string(),
                rhs: c.rhs.to_string(),
                at_depth: c.at_depth,
            }),
            diagnostic: r.diagnostic.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaSummary {
    pub lemma: String,
    pub verified: usize,
    pub counterexamples: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub instances: usize,
    pub game_depth: usize,
    pub pomdp_depth: usize,
    pub all_verified: bool,
    pub summary: Vec<LemmaSummary>,
    pub entries: Vec<Entry>,
}

/// Seed of the `k`-th instance of a run; game and POMDP streams differ.
pub fn instance_seed(seed: u64, k: usize, pomdp: bool) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((k as u64) << 1 | pomdp as u64)
}

/// The instances a run checks, in order: games first, then POMDPs, each only
/// if some requested lemma needs it.
pub fn instances(cfg: &RunConfig) -> Vec<Instance> {
    let mut out = Vec::new();
    for pomdp in [false, true] {
        if !cfg.lemmas.iter().any(|k| k.on_pomdp() == pomdp) {
            continue;
        }
        for k in 0..cfg.instances {
            let mut r = random::rng(instance_seed(cfg.seed, k, pomdp));
            let (name, depth) = if pomdp {
                (format!("m{}-{k}", cfg.seed), cfg.pomdp_depth)
            } else {
                (format!("g{}-{k}", cfg.seed), cfg.game_depth)
            };
            out.push(random::instance(&mut r, pomdp, name, depth, true));
        }
    }
    out
}

/// Checks every requested lemma on every instance of its kind. Instances are
/// spread over threads; the report order does not depend on scheduling.
pub fn run(cfg: &RunConfig) -> ugame_core::Result<(Report, Vec<Instance>)> {
    let insts = instances(cfg);
    let jobs: Vec<(LemmaKind, &Instance)> = cfg
        .lemmas
        .iter()
        .flat_map(|&k| {
            insts
                .iter()
                .filter(move |i| matches!(i, Instance::Pomdp(_)) == k.on_pomdp())
                .map(move |i| (k, i))
        })
        .collect();
    let depth = |k: LemmaKind| {
        if k.on_pomdp() {
            cfg.pomdp_depth
        } else {
            cfg.game_depth
        }
    };
    let threads = cfg.threads.clamp(1, jobs.len().max(1));
    let chunk = jobs.len().div_ceil(threads).max(1);
    let results: Vec<ugame_core::Result<LemmaReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&(k, i)| check_lemma(k, i, depth(k), &cfg.bounds))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("checker thread panicked"))
            .collect()
    });
    let reports = results
        .into_iter()
        .collect::<ugame_core::Result<Vec<_>>>()?;
    let summary = cfg
        .lemmas
        .iter()
        .map(|k| {
            let mine = reports.iter().filter(|r| r.lemma == *k);
            let verified = mine.clone().filter(|r| r.verified()).count();
            LemmaSummary {
                lemma: k.name().into(),
                verified,
                counterexamples: mine.count() - verified,
            }
        })
        .collect();
    let entries: Vec<Entry> = reports.iter().map(Entry::from).collect();
    let report = Report {
        seed: cfg.seed,
        instances: cfg.instances,
        game_depth: cfg.game_depth,
        pomdp_depth: cfg.pomdp_depth,
        all_verified: entries.iter().all(|e| e.verified),
        summary,
        entries,
    };
    Ok((report, insts))
}

/// Writes the files of each instance into `dir`, named after the instance.
pub fn emit_instances(dir: &Path, insts: &[Instance]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let write = |name: String, body: String| std::fs::write(dir.join(name), body);
    for inst in insts {
        match inst {
            Instance::Game(gi) => {
                let g = &gi.game;
                let obj = gi.priorities.clone().map(ugame_core::Objective::Parity);
                write(
                    format!("{}.game.json", gi.name),
                    to_json(&GameFile::from_game(g, obj.as_ref())),
                )?;
                write(
                    format!("{}.alpha.json", gi.name),
                    to_json(&StrategyFile::from_g1(g, &gi.alpha)),
                )?;
                write(
                    format!("{}.beta.json", gi.name),
                    to_json(&StrategyFile::from_g2(g, &gi.beta)),
                )?;
                if let Some((a, b)) = &gi.h_strategies {
                    let rg = reduce_game(g, obj.as_ref(), gi.beta.variant())
                        .map_err(std::io::Error::other)?;
                    write(
                        format!("{}.h.json", gi.name),
                        to_json(&PogFile::from_reduced(&rg)),
                    )?;
                    write(
                        format!("{}.h-alpha.json", gi.name),
                        to_json(&ObsStrategyFile::from_strategy(&rg.pog, a)),
                    )?;
                    write(
                        format!("{}.h-beta.json", gi.name),
                        to_json(&ObsStrategyFile::from_strategy(&rg.pog, b)),
                    )?;
                }
            }
            Instance::Pomdp(pi) => {
                let red = reduce_pomdp(&pi.pomdp, None).map_err(std::io::Error::other)?;
                write(
                    format!("{}.pomdp.json", pi.name),
                    to_json(&PomdpFile::from_pomdp(&pi.pomdp, None)),
                )?;
                write(
                    format!("{}.alpha.json", pi.name),
                    to_json(&ObsStrategyFile::from_strategy(
                        &pi.pomdp.to_pog(),
                        &pi.alpha_h,
                    )),
                )?;
                write(
                    format!("{}.game.json", pi.name),
                    to_json(&GameFile::from_game(&red.game, None)),
                )?;
                write(
                    format!("{}.alpha-g.json", pi.name),
                    to_json(&StrategyFile::from_g1(&red.game, &pi.alpha_g)),
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_are_deterministic_and_cover_every_pair() {
        let mut cfg = RunConfig::new(LemmaKind::ALL.to_vec(), 3, 2);
        cfg.threads = 3;
        let (a, _) = run(&cfg).unwrap();
        cfg.threads = 1;
        let (b, _) = run(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries.len(), 7 * 2);
        assert!(a.entries.iter().all(|e| e.checked > 0));
        for e in a.entries.iter().filter(|e| {
            e.lemma.starts_with("Pomdp")
                || e.lemma.starts_with("ConePomdp")
                || e.lemma == "ObsBasedMapping"
        }) {
            assert!(e.verified, "{e:?}");
        }
    }

    #[test]
    fn emitted_files_parse_back() {
        let cfg = RunConfig::new(LemmaKind::ALL.to_vec(), 5, 1);
        let insts = instances(&cfg);
        let dir = tempfile::tempdir().unwrap();
        emit_instances(dir.path(), &insts).unwrap();
        let Instance::Game(gi) = &insts[0] else {
            panic!()
        };
        let (g, _) =
            crate::format::load_game(&dir.path().join(format!("{}.game.json", gi.name))).unwrap();
        assert_eq!(g, gi.game);
        let (h, _) =
            crate::format::load_pog(&dir.path().join(format!("{}.h.json", gi.name))).unwrap();
        let s = crate::format::parse_json::<ObsStrategyFile>(
            &std::fs::read_to_string(dir.path().join(format!("{}.h-alpha.json", gi.name))).unwrap(),
            "s",
        )
        .unwrap()
        .to_strategy(&h)
        .unwrap();
        assert_eq!(&s, &gi.h_strategies.as_ref().unwrap().0);
    }
}
