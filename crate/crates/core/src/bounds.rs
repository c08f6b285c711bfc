//! Proven worst-case distortion guarantees per mechanism, objective and
//! metric space. Used as regression oracles: no empirical ratio may
//! exceed the corresponding guarantee.

use serde::{Deserialize, Serialize};

use crate::eval::Objective;
use crate::mechanisms::{MechanismId, MechanismKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Line,
    General,
}

impl Space {
    pub fn name(&self) -> &'static str {
        match self {
            Space::Line => "line",
            Space::General => "general",
        }
    }

    pub fn parse(s: &str) -> crate::error::Result<Self> {
        match s {
            "line" => Ok(Space::Line),
            "general" => Ok(Space::General),
            other => Err(crate::error::Error::Parameter(format!(
                "unknown space: {other}"
            ))),
        }
    }
}

/// The proven distortion upper bound, if one exists for this cell.
/// `n_agents` only matters for the dictator's linear bound.
pub fn proven_upper_bound(
    id: &MechanismId,
    objective: Objective,
    space: Space,
    n_agents: usize,
) -> Option<f64> {
    let a = id.alpha;
    match (id.kind, objective, space) {
        // Minisum: max{alpha, 2 + 1/alpha} in general, sharper on a line.
        (MechanismKind::MinisumTas, Objective::SocialCost, Space::General) => {
            Some(f64::max(a, 2.0 + 1.0 / a))
        }
        (MechanismKind::MinisumTas, Objective::SocialCost, Space::Line) => {
            Some(f64::max(a, 1.0 + 2.0 / a))
        }
        (MechanismKind::MostCompactSet, Objective::MaxCost, _) => {
            Some(f64::max(a, 2.0 + 1.0 / a))
        }
        (MechanismKind::AnyApproved, Objective::MaxCost, _) => Some(2.0 + a),
        (
            MechanismKind::MinisumTas
            | MechanismKind::MinimaxTas
            | MechanismKind::MaxTasLeftmost,
            Objective::MaxCost,
            Space::Line,
        ) => Some(f64::max(a, 2.0 + 1.0 / a)),
        (MechanismKind::EliminationWeightedMajority, Objective::SocialCost, Space::Line) => {
            Some(f64::max((3.0 * a - 1.0) / (a + 1.0), 1.0 + 2.0 / a))
        }
        (MechanismKind::TopChoiceDictator, Objective::SocialCost, _) => {
            Some(1.0 + 2.0 * n_agents as f64)
        }
        _ => None,
    }
}
