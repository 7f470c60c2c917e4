//! `ugame`: command-line front end.
//!
//! Exit codes: 0 success (solve: winning), 1 solve losing or verify found a
//! counterexample, 2 solve cell unsupported, 64 usage or malformed input,
//! 65 validation failure or bound refusal, 66 unreadable input file.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use ugame::format::{self, to_json, GStrategy, GameFile, LoadError, PogFile};
use ugame::random;
use ugame::runner::{emit_instances, run, RunConfig};
use ugame::simulate::{monte_carlo_cone, sample_play};
use ugame_core::solve::unsupported_cell;
use ugame_core::{
    reduce_game, reduce_pomdp, solve_uncertainty_game, Bounds, ConeMeasure, LemmaKind, Mode,
    Objective, ObjectiveKind, Outcome, Semantics, StrategyG1, StrategyG2, UncertaintyGame, Variant,
    Witness,
};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "ugame",
    version,
    about = "Noisy-observation games: reductions, exact measures, solvers, lemma checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Reduce a game with uncertainty to a partial-observation game.
    ReduceForward {
        /// Game file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = P2::Standard)]
        player2: P2,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a POMDP to a game with uncertainty.
    ReducePomdp {
        /// POMDP file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact cone probability of a prefix.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        /// Player-1 strategy file.
        #[arg(long)]
        a: PathBuf,
        /// Player-2 strategy file.
        #[arg(long)]
        b: PathBuf,
        /// Alternating names `l0 i o l1 ...`.
        #[arg(long)]
        prefix: String,
        #[arg(long, value_enum, default_value_t = Sem::Literal)]
        semantics: Sem,
    },
    /// Decide whether Player 1 wins from the initial location.
    Solve {
        /// Game file; not needed when the cell is unsupported anyway.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Objective kind; defaults to the one in the game file.
        #[arg(long, value_enum)]
        objective: Option<Obj>,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = P2::Standard)]
        player2: P2,
        /// Target locations, comma-separated (overrides the file).
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<String>>,
        /// Priorities as `loc=p`, comma-separated (overrides the file).
        #[arg(long, value_delimiter = ',')]
        priorities: Option<Vec<String>>,
        /// Write the winning region and witness strategy here as JSON.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check lemmas exactly on seeded random instances; prints a JSON report.
    Verify {
        /// `all` or a lemma name such as `ConeForwardG2H`.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        /// Depth of the game lemmas.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Depth of the POMDP lemmas.
        #[arg(long, default_value_t = 3)]
        pomdp_depth: usize,
        /// Largest number of enumerated prefix pairs per check.
        #[arg(long, env = "UG_MAX_ENUM")]
        max_enum: Option<u128>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every instance's files into this directory.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sample a play, or estimate a cone by Monte Carlo with `--prefix`.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Rounds to play.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        prefix: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum P2 {
    #[value(alias = "ordinary")]
    Standard,
    AllPowerful,
}

impl From<P2> for Variant {
    fn from(p: P2) -> Self {
        match p {
            P2::Standard => Variant::Ordinary,
            P2::AllPowerful => Variant::AllPowerful,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Sem {
    Literal,
    Joint,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Obj {
    #[value(alias = "reachability")]
    Reach,
    #[value(alias = "safety")]
    Safe,
    Buchi,
    Cobuchi,
    Parity,
}

impl From<Obj> for ObjectiveKind {
    fn from(o: Obj) -> Self {
        match o {
            Obj::Reach => ObjectiveKind::Reach,
            Obj::Safe => ObjectiveKind::Safe,
            Obj::Buchi => ObjectiveKind::Buchi,
            Obj::Cobuchi => ObjectiveKind::CoBuchi,
            Obj::Parity => ObjectiveKind::Parity,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Sure,
    #[value(alias = "almost-sure")]
    Almost,
    Positive,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sure => Mode::Sure,
            ModeArg::Almost => Mode::AlmostSure,
            ModeArg::Positive => Mode::Positive,
        }
    }
}

/// An error carrying its exit code.
#[derive(Debug, thiserror::Error)]
#[error("{msg}")]
struct Exit {
    code: u8,
    msg: String,
}

fn exit(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        msg: msg.into(),
    }
    .into()
}

fn code_of(e: &anyhow::Error) -> u8 {
    if let Some(x) = e.downcast_ref::<Exit>() {
        return x.code;
    }
    if let Some(l) = e.downcast_ref::<LoadError>() {
        return l.exit_code() as u8;
    }
    if e.downcast_ref::<ugame_core::Error>().is_some() {
        return EX_DATAERR;
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_of(&e))
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{body}")?;
            Ok(())
        }
    }
}

fn load_pair(g: &UncertaintyGame, a: &Path, b: &Path) -> anyhow::Result<(StrategyG1, StrategyG2)> {
    let GStrategy::One(alpha) = format::load_strategy(a, g)? else {
        return Err(exit(
            EX_DATAERR,
            format!("{}: expected a Player-1 strategy", a.display()),
        ));
    };
    let GStrategy::Two(beta) = format::load_strategy(b, g)? else {
        return Err(exit(
            EX_DATAERR,
            format!("{}: expected a Player-2 strategy", b.display()),
        ));
    };
    Ok((alpha, beta))
}

fn dispatch(cmd: Cmd) -> anyhow::Result<u8> {
    match cmd {
        Cmd::ReduceForward {
            input,
            player2,
            out,
        } => {
            let (g, obj) = format::load_game(&input)?;
            let rg = reduce_game(&g, obj.as_ref(), player2.into())?;
            emit(out.as_deref(), &to_json(&PogFile::from_reduced(&rg)))?;
            Ok(0)
        }
        Cmd::ReducePomdp { input, out } => {
            let (m, obj) = format::load_pomdp(&input)?;
            let red = reduce_pomdp(&m, obj.as_ref())?;
            emit(
                out.as_deref(),
                &to_json(&GameFile::from_game(&red.game, red.objective.as_ref())),
            )?;
            Ok(0)
        }
        Cmd::Measure {
            input,
            a,
            b,
            prefix,
            semantics,
        } => {
            let (g, _) = format::load_game(&input)?;
            let (alpha, beta) = load_pair(&g, &a, &b)?;
            let rho = g
                .parse_prefix(&prefix)
                .map_err(|e| exit(EX_DATAERR, format!("--prefix: {e}")))?;
            let sem = match semantics {
                Sem::Literal => Semantics::Literal,
                Sem::Joint => Semantics::Joint,
            };
            let p = ConeMeasure::new(&g, &alpha, &beta).cone(&rho, sem)?;
            println!("{p} (≈ {:.6})", p.to_f64());
            Ok(0)
        }
        Cmd::Solve {
            input,
            objective,
            mode,
            player2,
            target,
            priorities,
            witness,
        } => solve(
            input,
            objective,
            mode.into(),
            player2.into(),
            target,
            priorities,
            witness,
        ),
        Cmd::Verify {
            lemma,
            seed,
            instances,
            depth,
            pomdp_depth,
            max_enum,
            out,
            emit_dir,
            threads,
        } => {
            let lemmas = if lemma.eq_ignore_ascii_case("all") {
                LemmaKind::ALL.to_vec()
            } else {
                vec![LemmaKind::parse(&lemma).ok_or_else(|| {
                    let names: Vec<&str> = LemmaKind::ALL.iter().map(|k| k.name()).collect();
                    exit(
                        EX_USAGE,
                        format!(
                            "unknown lemma `{lemma}`; expected all or one of {}",
                            names.join(", ")
                        ),
                    )
                })?]
            };
            let mut cfg = RunConfig::new(lemmas, seed, instances);
            cfg.game_depth = depth;
            cfg.pomdp_depth = pomdp_depth;
            if let Some(n) = max_enum {
                cfg.bounds = Bounds::enum_only(n);
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let (report, insts) = run(&cfg)?;
            if let Some(dir) = &emit_dir {
                emit_instances(dir, &insts)
                    .with_context(|| format!("writing instances to {}", dir.display()))?;
            }
            emit(out.as_deref(), &to_json(&report))?;
            for s in &report.summary {
                eprintln!(
                    "{}: {} verified, {} counterexamples",
                    s.lemma, s.verified, s.counterexamples
                );
            }
            Ok(if report.all_verified { 0 } else { 1 })
        }
        Cmd::Sample {
            input,
            a,
            b,
            depth,
            seed,
            prefix,
            samples,
        } => {
            let (g, _) = format::load_game(&input)?;
            let (alpha, beta) = load_pair(&g, &a, &b)?;
            match prefix {
                None => {
                    let t = sample_play(&mut random::rng(seed), &g, &alpha, &beta, depth)?;
                    emit(None, &to_json(&t.record(&g, seed)))?;
                }
                Some(p) => {
                    let rho = g
                        .parse_prefix(&p)
                        .map_err(|e| exit(EX_DATAERR, format!("--prefix: {e}")))?;
                    let est = monte_carlo_cone(&g, &alpha, &beta, &rho, samples, seed)?;
                    let exact = ugame_core::path_cone_prob(&g, &alpha, &beta, &rho)?;
                    #[derive(Serialize)]
                    struct Out<'a> {
                        prefix: &'a str,
                        seed: u64,
                        estimate: &'a ugame::simulate::Estimate,
                        exact: String,
                    }
                    emit(
                        None,
                        &to_json(&Out {
                            prefix: &p,
                            seed,
                            estimate: &est,
                            exact: exact.to_string(),
                        }),
                    )?;
                }
            }
            Ok(0)
        }
    }
}

fn solve(
    input: Option<PathBuf>,
    objective: Option<Obj>,
    mode: Mode,
    variant: Variant,
    target: Option<Vec<String>>,
    priorities: Option<Vec<String>>,
    witness: Option<PathBuf>,
) -> anyhow::Result<u8> {
    let kind: Option<ObjectiveKind> = objective.map(Into::into);
    // an unsupported cell is answered without reading any game
    if let Some(k) = kind {
        if let Some(c) = unsupported_cell(k, mode, variant) {
            println!(
                "{}",
                Outcome::Unsupported {
                    classification: c,
                    cell: ugame_core::solve::table_cell(k, mode, variant)
                }
            );
            return Ok(2);
        }
    }
    let input = input.ok_or_else(|| exit(EX_USAGE, "--in is required for a decidable cell"))?;
    let (g, file_obj) = format::load_game(&input)?;
    let kind = kind
        .or(file_obj.as_ref().map(Objective::kind))
        .ok_or_else(|| exit(EX_USAGE, "no --objective and none in the game file"))?;
    let from_file = file_obj.filter(|o| o.kind() == kind);
    let obj = if target.is_some() || priorities.is_some() {
        let prios = priorities
            .map(|ps| {
                ps.iter()
                    .map(|s| {
                        let (n, v) = s.split_once('=').ok_or_else(|| {
                            exit(EX_USAGE, format!("priority `{s}` is not loc=p"))
                        })?;
                        let v: u32 = v
                            .trim()
                            .parse()
                            .map_err(|_| exit(EX_USAGE, format!("priority `{s}` is not loc=p")))?;
                        Ok((n.trim().to_string(), v))
                    })
                    .collect::<anyhow::Result<BTreeMap<String, u32>>>()
            })
            .transpose()?;
        format::objective_of_kind(
            kind,
            target.as_deref(),
            prios.as_ref(),
            &g.locations,
            "objective",
        )?
    } else {
        from_file.ok_or_else(|| exit(EX_DATAERR, format!("a {} objective needs --target or --priorities, or an objective in the game file", kind.name())))?
    };
    let outcome = solve_uncertainty_game(&g, &obj, mode, variant)?;
    println!("{outcome}");
    if let (Some(path), Some(w)) = (witness, outcome.region()) {
        let rg = reduce_game(&g, Some(&obj), variant)?;
        std::fs::write(&path, to_json(&witness_json(&rg, w)))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match &outcome {
        Outcome::Solved(w) if w.initial_winning => 0,
        Outcome::Solved(_) => 1,
        Outcome::Unsupported { .. } => 2,
    })
}

#[derive(Serialize)]
struct WitnessRow {
    knowledge: Vec<String>,
    bookkeeping: Vec<String>,
    dist: Vec<format::ActionProb>,
}

#[derive(Serialize)]
struct WitnessJson {
    mode: &'static str,
    objective: &'static str,
    initial_winning: bool,
    winning: Vec<[Vec<String>; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<Vec<WitnessRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    word: Option<Vec<String>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    uniform: bool,
}

fn witness_json(rg: &ugame_core::ReducedGame, w: &ugame_core::WinningRegion) -> WitnessJson {
    let h = &rg.pog;
    let names = |v: &[ugame_core::State]| -> Vec<String> {
        v.iter().map(|s| h.states[s.idx()].clone()).collect()
    };
    let acts = h.actions_of(w.protagonist);
    WitnessJson {
        mode: w.mode.name(),
        objective: w.objective.name(),
        initial_winning: w.initial_winning,
        winning: w
            .winning
            .iter()
            .map(|(k, b)| [names(k), names(b)])
            .collect(),
        strategy: match &w.witness {
            Witness::Knowledge(t) => Some(
                t.iter()
                    .map(|((k, b), d)| WitnessRow {
                        knowledge: names(k),
                        bookkeeping: names(b),
                        dist: d
                            .iter()
                            .map(|(a, p)| format::ActionProb {
                                action: acts[a.idx()].clone(),
                                prob: format::Prob(p.clone()),
                            })
                            .collect(),
                    })
                    .collect(),
            ),
            _ => None,
        },
        word: match &w.witness {
            Witness::Word(ws) => Some(ws.iter().map(|a| acts[a.idx()].clone()).collect()),
            _ => None,
        },
        uniform: matches!(w.witness, Witness::Uniform),
    }
}
