//! Seeded random instances. Every probability has a denominator of at most 8,
//! which keeps exact arithmetic cheap.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ugame_core::measure::act_mt;
use ugame_core::strategy::prefixes_up_to;
use ugame_core::{
    reduce_pomdp, Action, Distribution, GameInstance, Input, Instance, Loc, ObsBasedStrategy,
    ObsSeqH, Output, Partition, Player, Pomdp, PomdpInstance, Rational, ReducedGame, State,
    StrategyG1, StrategyG2, UncertaintyGame, Variant,
};

pub const MAX_DEN: u32 = 8;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A distribution on a random nonempty subset of `xs`.
pub fn dist<X: Ord + Clone, R: Rng>(rng: &mut R, xs: &[X]) -> Distribution<X> {
    let mut pool = xs.to_vec();
    pool.shuffle(rng);
    let k = rng.gen_range(1..=pool.len().min(MAX_DEN as usize));
    pool.truncate(k);
    full_support(rng, &pool)
}

/// A distribution giving every element of `xs` positive mass.
pub fn full_support<X: Ord + Clone, R: Rng>(rng: &mut R, xs: &[X]) -> Distribution<X> {
    let k = xs.len() as u32;
    assert!((1..=MAX_DEN).contains(&k));
    let d = rng.gen_range(k..=MAX_DEN);
    // k positive parts summing to d: choose k-1 cut points in 1..d
    let mut cuts: Vec<u32> = (1..d).collect();
    cuts.shuffle(rng);
    cuts.truncate((k - 1) as usize);
    cuts.push(0);
    cuts.push(d);
    cuts.sort_unstable();
    Distribution::from_weights(
        xs.iter()
            .zip(cuts.windows(2))
            .map(|(x, w)| (x.clone(), Rational::new((w[1] - w[0]) as i64, d as i64))),
    )
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// A game with 2 or 3 locations and two letters on each side. `un` keeps the
/// true location in its support half of the time.
pub fn game<R: Rng>(rng: &mut R) -> UncertaintyGame {
    let n = rng.gen_range(2..=3);
    let mut g = UncertaintyGame {
        locations: names("l", n),
        inputs: names("i", 2),
        outputs: names("o", 2),
        initial: Loc(0),
        delta: BTreeMap::new(),
        un: BTreeMap::new(),
    };
    let locs: Vec<Loc> = g.locs().collect();
    for l in g.locs() {
        for i in g.input_letters() {
            for o in g.output_letters() {
                let d = dist(rng, &locs);
                g.set_delta(l, i, o, d);
            }
        }
        let d = if rng.gen_bool(0.5) {
            let mut s: Vec<Loc> = locs
                .iter()
                .copied()
                .filter(|&m| m != l && rng.gen_bool(0.5))
                .collect();
            s.push(l);
            full_support(rng, &s)
        } else {
            dist(rng, &locs)
        };
        g.set_un(l, d);
    }
    g
}

pub fn strategy_g1<R: Rng>(rng: &mut R, g: &UncertaintyGame, depth: usize) -> StrategyG1 {
    let ins: Vec<Input> = g.input_letters().collect();
    StrategyG1::from_fn(g, depth, |_| dist(rng, &ins))
}

pub fn strategy_g2<R: Rng>(
    rng: &mut R,
    g: &UncertaintyGame,
    depth: usize,
    variant: Variant,
) -> StrategyG2 {
    let outs: Vec<Output> = g.output_letters().collect();
    match variant {
        Variant::Ordinary => StrategyG2::ordinary_from_fn(g, depth, |_, _| dist(rng, &outs)),
        Variant::AllPowerful => {
            StrategyG2::all_powerful_from_fn(g, depth, |_, _, _| dist(rng, &outs))
        }
    }
}

pub fn priorities<R: Rng>(rng: &mut R, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..=3)).collect()
}

/// Random observation-based strategies of `H` for both players, defined on
/// every well-shaped history from any start.
pub fn h_strategies<R: Rng>(
    rng: &mut R,
    rg: &ReducedGame,
    depth: usize,
) -> (ObsBasedStrategy, ObsBasedStrategy) {
    let g = &rg.source;
    let h = &rg.pog;
    let acts =
        |p: Player| -> Vec<Action> { (0..h.actions_of(p).len() as u32).map(Action).collect() };
    let (a1, a2) = (acts(Player::One), acts(Player::Two));
    let mut t1: BTreeMap<ObsSeqH, Distribution<Action>> = BTreeMap::new();
    let mut t2: BTreeMap<ObsSeqH, Distribution<Action>> = BTreeMap::new();
    for r2 in prefixes_up_to(g, depth, None) {
        for r1 in act_mt(g, &r2) {
            let rho = rg.pair_prefix(&r1, &r2).expect("action-matching");
            t1.entry(h.observation_seq(Player::One, &rho))
                .or_insert_with(|| dist(rng, &a1));
            for i in g.input_letters() {
                let rho = rg.p2_history(&r1, &r2, i).expect("action-matching");
                t2.entry(h.observation_seq(Player::Two, &rho))
                    .or_insert_with(|| dist(rng, &a2));
            }
        }
    }
    let max_len = 2 * depth;
    (
        ObsBasedStrategy {
            player: Player::One,
            max_len,
            table: t1,
        },
        ObsBasedStrategy {
            player: Player::Two,
            max_len,
            table: t2,
        },
    )
}

/// A random game instance with strategies of the given depth.
pub fn game_instance<R: Rng>(
    rng: &mut R,
    name: String,
    depth: usize,
    with_h: bool,
) -> GameInstance {
    let g = game(rng);
    let variant = if rng.gen_bool(0.5) {
        Variant::Ordinary
    } else {
        Variant::AllPowerful
    };
    let alpha = strategy_g1(rng, &g, depth);
    let beta = strategy_g2(rng, &g, depth, variant);
    let priorities = rng.gen_bool(0.5).then(|| priorities(rng, g.n_locs()));
    let h_strategies = with_h.then(|| {
        let rg = ugame_core::reduce_game(&g, None, variant).expect("valid game");
        h_strategies(rng, &rg, depth)
    });
    GameInstance {
        name,
        game: g,
        alpha,
        beta,
        h_strategies,
        priorities,
        mutation: None,
    }
}

/// A POMDP with 2 to 4 states, two actions and a random observation partition.
pub fn pomdp<R: Rng>(rng: &mut R) -> Pomdp {
    let n = rng.gen_range(2..=4);
    let states: Vec<State> = (0..n as u32).map(State).collect();
    let mut delta = BTreeMap::new();
    for &s in &states {
        for a in 0..2 {
            delta.insert((s, Action(a)), dist(rng, &states));
        }
    }
    let blocks = rng.gen_range(1..=n);
    let key: Vec<usize> = (0..n)
        .map(|k| {
            if k < blocks {
                k
            } else {
                rng.gen_range(0..blocks)
            }
        })
        .collect();
    Pomdp {
        states: names("s", n),
        actions: names("a", 2),
        delta,
        obs: Partition::by_key(n, |s| key[s.idx()]),
        initial: State(0),
    }
}

pub fn pomdp_instance<R: Rng>(rng: &mut R, name: String, depth: usize) -> PomdpInstance {
    let m = pomdp(rng);
    let acts: Vec<Action> = m.action_ids().collect();
    let mut table: BTreeMap<ObsSeqH, Distribution<Action>> = BTreeMap::new();
    for rho in m.all_histories(depth) {
        table
            .entry(m.observation_seq(&rho))
            .or_insert_with(|| dist(rng, &acts));
    }
    let alpha_h = ObsBasedStrategy {
        player: Player::One,
        max_len: depth,
        table,
    };
    let red = reduce_pomdp(&m, None).expect("valid POMDP");
    let alpha_g = strategy_g1(rng, &red.game, depth);
    PomdpInstance {
        name,
        pomdp: m,
        alpha_h,
        alpha_g,
    }
}

pub fn instance<R: Rng>(
    rng: &mut R,
    on_pomdp: bool,
    name: String,
    depth: usize,
    with_h: bool,
) -> Instance {
    if on_pomdp {
        Instance::Pomdp(pomdp_instance(rng, name, depth))
    } else {
        Instance::Game(game_instance(rng, name, depth, with_h))
    }
}
