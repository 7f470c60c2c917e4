//! Qualitative solvers.

pub mod almost;
pub mod dispatch;
pub mod knowledge;
pub mod parity;
pub mod positive;
pub mod scc;

pub use almost::{almost_sure_buchi, almost_sure_reach, almost_sure_safety, BeliefSupportMdp};
pub use dispatch::{solve_uncertainty_game, table_cell, unsupported_cell, Classification, Outcome};
pub use knowledge::{knowledge_construction, sure_winning, KnowledgeGame, WinningRegion, Witness};
pub use parity::{ParityGame, ParitySolution};
pub use positive::{positive_reach, positive_reach_pog, positive_safety_pog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Sure,
    AlmostSure,
    Positive,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Sure, Mode::AlmostSure, Mode::Positive];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sure => "sure",
            Mode::AlmostSure => "almost",
            Mode::Positive => "positive",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}
