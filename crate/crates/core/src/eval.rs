//! Objectives, the brute-force optimum, distortion reports, and the
//! checkable sufficient conditions for max-cost guarantees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::mechanisms::{run_mechanism, MechanismId, MechanismKind, WinnerResult};
use crate::views::{
    derive_alt_distances, derive_ordinal, derive_tas, ElicitationBundle, LineProvenance,
    TasProfile, TieBreak,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    SocialCost,
    MaxCost,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::SocialCost => "sc",
            Objective::MaxCost => "mc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sc" => Ok(Objective::SocialCost),
            "mc" => Ok(Objective::MaxCost),
            other => Err(Error::Parameter(format!("unknown objective: {other}"))),
        }
    }
}

/// Sum or max of agent distances to alternative `x`.
pub fn cost(instance: &Instance, x: usize, objective: Objective) -> f64 {
    let dists = (0..instance.n_agents()).map(|i| instance.agent_alt(i, x));
    match objective {
        Objective::SocialCost => dists.sum(),
        Objective::MaxCost => dists.fold(0.0, f64::max),
    }
}

/// Exhaustive argmin over all alternatives; ties go to the lowest index.
pub fn optimal_alternative(instance: &Instance, objective: Objective) -> (usize, f64) {
    let mut best = 0;
    let mut best_cost = cost(instance, 0, objective);
    for x in 1..instance.n_alternatives() {
        let c = cost(instance, x, objective);
        if c < best_cost {
            best = x;
            best_cost = c;
        }
    }
    (best, best_cost)
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    /// `None` for the omniscient baseline.
    pub mechanism: Option<MechanismId>,
    pub objective: Objective,
    pub winner: usize,
    pub winner_cost: f64,
    pub optimal: usize,
    pub optimal_cost: f64,
    /// `winner_cost / optimal_cost`; infinite when degenerate with a
    /// nonzero winner cost, 1 when both costs are zero.
    pub ratio: f64,
    /// True when the optimal cost is zero.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<crate::mechanisms::Trace>,
}

fn ratio_of(winner_cost: f64, optimal_cost: f64) -> (f64, bool) {
    if optimal_cost > 0.0 {
        (winner_cost / optimal_cost, false)
    } else if winner_cost > 0.0 {
        (f64::INFINITY, true)
    } else {
        (1.0, true)
    }
}

/// Builds the bundle a mechanism is entitled to see: nothing more than
/// the views its information class declares.
pub fn bundle_for(
    instance: &Instance,
    id: &MechanismId,
    tau: f64,
    source: impl Into<String>,
) -> Result<ElicitationBundle> {
    let mut bundle = ElicitationBundle::empty(source);
    bundle.tas = Some(derive_tas(instance, id.alpha, tau)?);
    match id.kind {
        MechanismKind::MinisumTas | MechanismKind::MinimaxTas => {
            bundle.alt_distances = Some(derive_alt_distances(instance));
        }
        MechanismKind::MostCompactSet => {
            bundle.alt_distances = Some(derive_alt_distances(instance));
            bundle.ordinal = Some(derive_ordinal(instance, TieBreak::default()));
        }
        MechanismKind::EliminationWeightedMajority => {
            bundle.ordinal = Some(derive_ordinal(instance, TieBreak::default()));
        }
        MechanismKind::MaxTasLeftmost
        | MechanismKind::AnyApproved
        | MechanismKind::TopChoiceDictator => {}
    }
    if id.kind.line_only() {
        let line = instance.as_line().ok_or_else(|| {
            Error::Unsupported(format!("{} is only defined on line instances", id.kind.name()))
        })?;
        bundle.line = Some(LineProvenance {
            agent_positions: line.agent_positions.clone(),
            alternative_positions: line.alternative_positions.clone(),
        });
    }
    Ok(bundle)
}

/// Runs the mechanism on views derived from the instance and compares
/// the winner's cost against the enumerated optimum.
pub fn distortion(
    instance: &Instance,
    id: &MechanismId,
    objective: Objective,
    tau: f64,
) -> Result<DistortionReport> {
    let bundle = bundle_for(instance, id, tau, "distortion")?;
    let result = run_mechanism(id, &bundle)?;
    Ok(report_for(instance, id, objective, result))
}

fn report_for(
    instance: &Instance,
    id: &MechanismId,
    objective: Objective,
    result: WinnerResult,
) -> DistortionReport {
    let winner_cost = cost(instance, result.winner, objective);
    let (optimal, optimal_cost) = optimal_alternative(instance, objective);
    let (ratio, degenerate) = ratio_of(winner_cost, optimal_cost);
    DistortionReport {
        mechanism: Some(*id),
        objective,
        winner: result.winner,
        winner_cost,
        optimal,
        optimal_cost,
        ratio,
        degenerate,
        trace: Some(result.trace),
    }
}

/// Baseline that "chooses" the enumerated optimum itself; its ratio is 1
/// on every non-degenerate instance by construction.
pub fn omniscient_distortion(instance: &Instance, objective: Objective) -> DistortionReport {
    let (optimal, optimal_cost) = optimal_alternative(instance, objective);
    let (ratio, degenerate) = ratio_of(optimal_cost, optimal_cost);
    DistortionReport {
        mechanism: None,
        objective,
        winner: optimal,
        winner_cost: optimal_cost,
        optimal,
        optimal_cost,
        ratio,
        degenerate,
        trace: None,
    }
}

/// The two sufficient conditions under which a winner's max cost is
/// bounded: approved by everyone, or min-distance for an agent that does
/// not approve the max-cost optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McWinnerConditions {
    pub cond1: bool,
    pub cond2: bool,
}

pub fn check_mc_winner_conditions(
    instance: &Instance,
    tas: &TasProfile,
    winner: usize,
    tau: f64,
) -> McWinnerConditions {
    let n = instance.n_agents();
    let m = instance.n_alternatives();
    let cond1 = (0..n).all(|i| tas.approves(i, winner));

    let (opt, _) = optimal_alternative(instance, Objective::MaxCost);
    let cond2 = (0..n).any(|i| {
        let closest = (0..m)
            .map(|x| instance.agent_alt(i, x))
            .fold(f64::INFINITY, f64::min);
        instance.agent_alt(i, winner) <= closest + tau && !tas.approves(i, opt)
    });
    McWinnerConditions { cond1, cond2 }
}

/// True iff the winner lies between the leftmost and rightmost agents.
pub fn interval_winner_check(instance: &Instance, winner: usize) -> Result<bool> {
    let line = instance
        .as_line()
        .ok_or_else(|| Error::Unsupported("interval check needs a line instance".into()))?;
    let lo = line.agent_positions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = line
        .agent_positions
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let w = line.alternative_positions[winner];
    Ok(lo <= w && w <= hi)
}
