//! Solving games with uncertainty: reduce, then pick the solver for the
//! (objective, mode, Player-2 strategy class) cell of the complexity table.

use alloc::string::String;
use core::fmt;

use crate::error::{Error, Result};
use crate::game::UncertaintyGame;
use crate::objective::{Objective, ObjectiveKind};
use crate::pog::Player;
use crate::reduce::forward::reduce_game;
use crate::solve::almost::{almost_sure_buchi_pog, almost_sure_reach_pog};
use crate::solve::knowledge::{sure_winning_any_opponent, WinningRegion};
use crate::solve::positive::{positive_reach_pog, positive_safety_pog};
use crate::solve::Mode;
use crate::strategy::Variant;

/// Why a cell is not solved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Undecidable,
    /// Decidable in 2EXPTIME, EXPTIME-hard; that algorithm is not implemented.
    TwoExp,
    /// Decidable, but no algorithm is implemented for it.
    NotImplemented(&'static str),
    /// The cell has a solver, but it cannot settle this instance.
    Inconclusive(String),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Undecidable => write!(f, "undecidable"),
            Classification::TwoExp => {
                write!(f, "2EXPTIME upper bound, EXPTIME-hard; not implemented")
            }
            Classification::NotImplemented(why) => write!(f, "not implemented: {why}"),
            Classification::Inconclusive(why) => write!(f, "inconclusive: {why}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Solved(WinningRegion),
    Unsupported {
        classification: Classification,
        cell: &'static str,
    },
}

impl Outcome {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Outcome::Unsupported { .. })
    }

    pub fn region(&self) -> Option<&WinningRegion> {
        match self {
            Outcome::Solved(w) => Some(w),
            Outcome::Unsupported { .. } => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Solved(w) => write!(
                f,
                "{}",
                if w.initial_winning {
                    "winning"
                } else {
                    "losing"
                }
            ),
            Outcome::Unsupported {
                classification,
                cell,
            } => {
                write!(f, "Unsupported: {classification} (Table 1)")?;
                if !matches!(classification, Classification::Undecidable) {
                    write!(f, " [cell: {cell}]")?;
                }
                Ok(())
            }
        }
    }
}

/// The complexity table entry for a cell.
pub fn table_cell(kind: ObjectiveKind, mode: Mode, variant: Variant) -> &'static str {
    use ObjectiveKind::*;
    let ap = variant == Variant::AllPowerful;
    match (kind, mode) {
        (_, Mode::Sure) => "EXP-complete",
        (Safe, Mode::AlmostSure) => "EXP-complete",
        (Reach | Buchi, Mode::AlmostSure) => {
            if ap {
                "EXP-complete"
            } else {
                "2EXP, EXP"
            }
        }
        (CoBuchi | Parity, Mode::AlmostSure) => "Undec.",
        (Safe, Mode::Positive) => {
            if ap {
                "EXP-complete"
            } else {
                "2EXP, EXP"
            }
        }
        (Reach, Mode::Positive) => {
            if ap {
                "PTIME-complete"
            } else {
                "EXP, PTIME"
            }
        }
        (Buchi | Parity, Mode::Positive) => "Undec.",
        (CoBuchi, Mode::Positive) => {
            if ap {
                "EXP-complete"
            } else {
                "2EXP, EXP"
            }
        }
    }
}

/// Why a cell is never solved, independent of the instance; `None` when a
/// solver exists.
pub fn unsupported_cell(
    kind: ObjectiveKind,
    mode: Mode,
    variant: Variant,
) -> Option<Classification> {
    use ObjectiveKind::*;
    if table_cell(kind, mode, variant) == "Undec." {
        return Some(Classification::Undecidable);
    }
    match (kind, mode, variant == Variant::AllPowerful) {
        (Reach | Buchi, Mode::AlmostSure, false) | (Safe | CoBuchi, Mode::Positive, false) => {
            Some(Classification::TwoExp)
        }
        (CoBuchi, Mode::Positive, true) => Some(Classification::NotImplemented(
            "positive coBüchi with a perfectly informed Player 2",
        )),
        _ => None,
    }
}

/// Reduces `g` and runs the solver for the cell, or reports why the cell is
/// not solved.
pub fn solve_uncertainty_game(
    g: &UncertaintyGame,
    objective: &Objective,
    mode: Mode,
    variant: Variant,
) -> Result<Outcome> {
    let kind = objective.kind();
    let cell = table_cell(kind, mode, variant);
    let unsupported = |classification| {
        Ok(Outcome::Unsupported {
            classification,
            cell,
        })
    };
    if let Some(c) = unsupported_cell(kind, mode, variant) {
        return unsupported(c);
    }
    let rg = reduce_game(g, Some(objective), variant)?;
    let lifted = rg.objective.clone().expect("reduction keeps the objective");
    let h = &rg.pog;
    let solved = match (&lifted, mode) {
        (_, Mode::Sure) => sure_winning_any_opponent(h, &lifted, Player::One),
        (Objective::Safe(_), Mode::AlmostSure) => sure_winning_any_opponent(h, &lifted, Player::One).map(|mut w| {
            w.mode = Mode::AlmostSure;
            w
        }),
        (Objective::Reach(t), Mode::AlmostSure) => almost_sure_reach_pog(h, t),
        (Objective::Buchi(t), Mode::AlmostSure) => almost_sure_buchi_pog(h, t),
        (Objective::Reach(t), Mode::Positive) => positive_reach_pog(h, t),
        (Objective::Safe(t), Mode::Positive) => match positive_safety_pog(h, t)? {
            Some(w) => Ok(w),
            None => {
                return unsupported(Classification::Inconclusive(String::from(
                    "no safe state to bet on is reachable, yet Player 2 cannot win with full information",
                )))
            }
        },
        _ => unreachable!("cell {cell} for {kind:?} in mode {mode:?} is routed above"),
    };
    match solved {
        Ok(w) => Ok(Outcome::Solved(w)),
        Err(Error::Domain(why)) if why.starts_with("priorities are not observable") => {
            unsupported(Classification::Inconclusive(why))
        }
        Err(e) => Err(e),
    }
}
