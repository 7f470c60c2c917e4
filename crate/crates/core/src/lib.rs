//! Noisy-observation games: exact cone measures, the reduction to
//! partial-observation stochastic games, the reduction from POMDPs, qualitative
//! solvers and exact checkers for the correspondence between the models.
//!
//! Everything here is `no_std` + `alloc` and uses exact rationals.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dist;
pub mod error;
pub mod game;
pub mod measure;
pub mod objective;
pub mod pog;
pub mod rational;
pub mod reduce;
pub mod solve;
pub mod strategy;
pub mod verify;

pub use dist::{DistError, Distribution};
pub use error::{Error, Result};
pub use game::{Input, Loc, Output, PrefixG, UncertaintyGame, ValidationReport, Violation};
pub use measure::{
    cone_prob, event_prob_at_depth, obs_seq, path_cone_prob, ConeMeasure, Semantics,
};
pub use objective::{eval_parity_on_lasso, Objective, ObjectiveKind};
pub use pog::{
    cone_prob_pog, Action, ObsBasedStrategy, ObsSeqH, PartialObsGame, Partition, Player,
    PogStrategy, Policy, Pomdp, PrefixH, State,
};
pub use rational::Rational;
pub use reduce::forward::{reduce_game, reduce_game_with, Mutation, ReducedGame};
pub use reduce::pomdp::{reduce_pomdp, PomdpReduction};
pub use solve::{solve_uncertainty_game, Classification, Mode, Outcome, WinningRegion, Witness};
pub use strategy::{StrategyG1, StrategyG2, Variant};
pub use verify::{
    check_lemma, Bounds, Counterexample, GameInstance, Instance, LemmaKind, LemmaReport,
    PomdpInstance,
};
