//! Winner-selection procedures. Each mechanism declares which views it
//! consumes and reads nothing else from the bundle; all emit a trace
//! from which the winning decision can be reproduced.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::views::{
    line_ordering, AltDistances, ElicitationBundle, LineOrdering, LinePoint, OrdinalProfile,
    TasProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MechanismKind {
    MinisumTas,
    EliminationWeightedMajority,
    MostCompactSet,
    MaxTasLeftmost,
    MinimaxTas,
    AnyApproved,
    TopChoiceDictator,
}

impl MechanismKind {
    pub fn name(&self) -> &'static str {
        match self {
            MechanismKind::MinisumTas => "minisum-tas-distance",
            MechanismKind::EliminationWeightedMajority => "elimination-weighted-majority",
            MechanismKind::MostCompactSet => "most-compact-set",
            MechanismKind::MaxTasLeftmost => "max-tas-leftmost",
            MechanismKind::MinimaxTas => "minimax-tas-distance",
            MechanismKind::AnyApproved => "any-approved",
            MechanismKind::TopChoiceDictator => "top-choice-dictator",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let all = [
            MechanismKind::MinisumTas,
            MechanismKind::EliminationWeightedMajority,
            MechanismKind::MostCompactSet,
            MechanismKind::MaxTasLeftmost,
            MechanismKind::MinimaxTas,
            MechanismKind::AnyApproved,
            MechanismKind::TopChoiceDictator,
        ];
        all.into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Parameter(format!("unknown mechanism: {name}")))
    }

    /// Is the mechanism only defined on line instances?
    pub fn line_only(&self) -> bool {
        matches!(
            self,
            MechanismKind::EliminationWeightedMajority | MechanismKind::MaxTasLeftmost
        )
    }
}

/// A mechanism together with its threshold parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismId {
    pub kind: MechanismKind,
    pub alpha: f64,
}

impl MechanismId {
    pub fn new(kind: MechanismKind, alpha: f64) -> Result<Self> {
        if alpha < 1.0 {
            return Err(Error::Parameter(format!("alpha must be >= 1, got {alpha}")));
        }
        if kind == MechanismKind::EliminationWeightedMajority && alpha <= 1.0 {
            return Err(Error::Parameter(
                "elimination-weighted-majority needs alpha > 1 for finite weights".into(),
            ));
        }
        if kind == MechanismKind::TopChoiceDictator && alpha != 1.0 {
            return Err(Error::Parameter(
                "top-choice-dictator is only defined for alpha = 1".into(),
            ));
        }
        Ok(Self { kind, alpha })
    }
}

impl std::fmt::Display for MechanismId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(alpha={})", self.kind.name(), self.alpha)
    }
}

/// Mechanism-specific record of the decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Trace {
    /// Per-alternative scores; the winner attains the minimum.
    Scores { scores: Vec<f64> },
    /// Elimination plus weighted majority bookkeeping.
    Ewm {
        x: usize,
        l: Option<usize>,
        r: Option<usize>,
        n_l: usize,
        n_r: usize,
        y: Option<usize>,
        weights: Vec<f64>,
        v_x: f64,
        v_y: f64,
    },
    /// Common approved alternative, or per-agent radii when none exists.
    CompactSet {
        common: Option<usize>,
        radii: Option<Vec<f64>>,
    },
    /// Approval counts and the arg-max set.
    TasCounts {
        counts: Vec<usize>,
        s_tas: Vec<usize>,
    },
    /// Fixed selection from one agent's approval set.
    Fixed { agent: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct WinnerResult {
    pub winner: usize,
    pub trace: Trace,
}

fn check_tas(tas: &TasProfile) -> Result<()> {
    if let Some(i) = tas.sets.iter().position(|s| s.is_empty()) {
        return Err(Error::Invariant(format!("agent {i} has an empty approval set")));
    }
    Ok(())
}

fn argmin_scores(scores: &[f64]) -> usize {
    let mut best = 0;
    for (x, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = x;
        }
    }
    best
}

/// Picks the alternative minimizing the total distance from the approval
/// sets, where the distance of `x` from `A_i` is `min_{j in A_i} d(j,x)`.
/// Ties go to the lowest index.
pub fn minisum_tas_distance(alt_dist: &AltDistances, tas: &TasProfile) -> Result<WinnerResult> {
    check_tas(tas)?;
    let m = alt_dist.len();
    let scores: Vec<f64> = (0..m)
        .map(|x| {
            tas.sets
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|&j| alt_dist.get(j, x))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum()
        })
        .collect();
    let winner = argmin_scores(&scores);
    Ok(WinnerResult {
        winner,
        trace: Trace::Scores { scores },
    })
}

/// Same set distances as minisum, aggregated by max over agents.
pub fn minimax_tas_distance(alt_dist: &AltDistances, tas: &TasProfile) -> Result<WinnerResult> {
    check_tas(tas)?;
    let m = alt_dist.len();
    let scores: Vec<f64> = (0..m)
        .map(|x| {
            tas.sets
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|&j| alt_dist.get(j, x))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let winner = argmin_scores(&scores);
    Ok(WinnerResult {
        winner,
        trace: Trace::Scores { scores },
    })
}

/// Elimination step around the median agent's top choice, then a weighted
/// majority between the two survivors. Line instances only.
///
/// With an even number of agents the lower median is used. Agents that
/// approve both survivors weigh 1, all others `(alpha+1)/(alpha-1)`. A
/// tied majority keeps the median's top choice.
pub fn elimination_weighted_majority(
    line_order: &LineOrdering,
    ordinal: &OrdinalProfile,
    tas: &TasProfile,
) -> Result<WinnerResult> {
    check_tas(tas)?;
    let alpha = tas.alpha;
    if alpha <= 1.0 {
        return Err(Error::Parameter(
            "elimination-weighted-majority needs alpha > 1".into(),
        ));
    }
    let n = ordinal.rankings.len();
    // Lower median: position ceil(n/2) in 1-indexed sorted order.
    let median_agent = line_order.agents_by_position[n.div_ceil(2) - 1];
    let x = ordinal.top(median_agent);

    let alts = &line_order.alternatives_by_position;
    let pos = alts.iter().position(|&a| a == x).unwrap();
    let l = (pos > 0).then(|| alts[pos - 1]);
    let r = (pos + 1 < alts.len()).then(|| alts[pos + 1]);

    let count_pref = |c: usize| (0..n).filter(|&i| ordinal.prefers(i, c, x)).count();
    let n_l = l.map_or(0, count_pref);
    let n_r = r.map_or(0, count_pref);

    let y = match (l, r) {
        (None, None) => None,
        (Some(l), None) => Some(l),
        (None, Some(r)) => Some(r),
        (Some(l), Some(r)) => Some(if n_r >= n_l { r } else { l }),
    };

    let Some(y) = y else {
        // Single alternative: nothing to run a majority against.
        return Ok(WinnerResult {
            winner: x,
            trace: Trace::Ewm {
                x,
                l,
                r,
                n_l,
                n_r,
                y: None,
                weights: vec![1.0; n],
                v_x: 0.0,
                v_y: 0.0,
            },
        });
    };

    let heavy = (alpha + 1.0) / (alpha - 1.0);
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            if tas.approves(i, x) && tas.approves(i, y) {
                1.0
            } else {
                heavy
            }
        })
        .collect();
    let mut v_x = 0.0;
    let mut v_y = 0.0;
    for i in 0..n {
        if ordinal.prefers(i, x, y) {
            v_x += weights[i];
        } else if ordinal.prefers(i, y, x) {
            v_y += weights[i];
        }
    }
    let winner = if v_x >= v_y { x } else { y };
    Ok(WinnerResult {
        winner,
        trace: Trace::Ewm {
            x,
            l,
            r,
            n_l,
            n_r,
            y: Some(y),
            weights,
            v_x,
            v_y,
        },
    })
}

/// If some alternative is approved by everyone, picks the lowest-index
/// such alternative. Otherwise picks the top choice of the agent whose
/// approval set has the smallest radius around her top choice.
pub fn most_compact_set(
    top_choices: &[usize],
    alt_dist: &AltDistances,
    tas: &TasProfile,
) -> Result<WinnerResult> {
    check_tas(tas)?;
    let m = alt_dist.len();
    let common = (0..m).find(|&x| (0..tas.sets.len()).all(|i| tas.approves(i, x)));
    if let Some(x) = common {
        return Ok(WinnerResult {
            winner: x,
            trace: Trace::CompactSet {
                common: Some(x),
                radii: None,
            },
        });
    }
    let radii: Vec<f64> = top_choices
        .iter()
        .zip(tas.sets.iter())
        .map(|(&o_i, set)| {
            set.iter()
                .map(|&x| alt_dist.get(x, o_i))
                .fold(0.0, f64::max)
        })
        .collect();
    let mut best = 0;
    for (i, &rho) in radii.iter().enumerate() {
        if rho < radii[best] {
            best = i;
        }
    }
    Ok(WinnerResult {
        winner: top_choices[best],
        trace: Trace::CompactSet {
            common: None,
            radii: Some(radii),
        },
    })
}

/// Counts approvals per alternative and picks, among those with the most
/// approvals, the leftmost alternative that is not strictly left of every
/// agent. A purely direction-based pick is not mirror-symmetric: when the
/// most-approved set contains alternatives strictly left of all agents,
/// taking one of those can exceed the max{alpha, 2+1/alpha} max-cost
/// guarantee. Anchoring the pick at the leftmost agent (and falling back
/// to the rightmost candidate when every candidate is left of all agents)
/// restores the guarantee on both ends of the line.
pub fn max_tas_leftmost(line_order: &LineOrdering, tas: &TasProfile) -> Result<WinnerResult> {
    check_tas(tas)?;
    let m = line_order.alternatives_by_position.len();
    let mut counts = vec![0usize; m];
    for set in &tas.sets {
        for &x in set {
            counts[x] += 1;
        }
    }
    let max = *counts.iter().max().unwrap();
    let s_tas: Vec<usize> = (0..m).filter(|&x| counts[x] == max).collect();

    // Walk the merged order: candidates seen before the first agent are
    // strictly left of every agent (ties place agents first).
    let mut seen_agent = false;
    let mut winner = None;
    let mut rightmost = None;
    for point in &line_order.merged {
        match point {
            LinePoint::Agent(_) => seen_agent = true,
            LinePoint::Alternative(x) if counts[*x] == max => {
                rightmost = Some(*x);
                if seen_agent {
                    winner = Some(*x);
                    break;
                }
            }
            LinePoint::Alternative(_) => {}
        }
    }
    Ok(WinnerResult {
        winner: winner.or(rightmost).unwrap(),
        trace: Trace::TasCounts { counts, s_tas },
    })
}

/// Deterministic stand-in for "any alternative approved by some agent":
/// the lowest-index alternative in agent 0's set.
pub fn any_approved(tas: &TasProfile) -> Result<WinnerResult> {
    check_tas(tas)?;
    Ok(WinnerResult {
        winner: tas.sets[0][0],
        trace: Trace::Fixed { agent: 0 },
    })
}

/// With alpha = 1 the approval sets are exactly the min-distance
/// alternatives; outputs the lowest-index one of agent 0.
pub fn top_choice_dictator(tas: &TasProfile) -> Result<WinnerResult> {
    if tas.alpha != 1.0 {
        return Err(Error::Parameter(format!(
            "top-choice-dictator needs alpha = 1, got {}",
            tas.alpha
        )));
    }
    check_tas(tas)?;
    Ok(WinnerResult {
        winner: tas.sets[0][0],
        trace: Trace::Fixed { agent: 0 },
    })
}

/// Dispatches a mechanism over a bundle, reading only the views its
/// class declares.
pub fn run_mechanism(id: &MechanismId, bundle: &ElicitationBundle) -> Result<WinnerResult> {
    let name = id.kind.name();
    let tas = |view: &'static str| -> Result<&TasProfile> {
        bundle.tas.as_ref().ok_or(Error::MissingView {
            mechanism: id.kind.name(),
            view,
        })
    };
    let alt = || -> Result<&AltDistances> {
        bundle.alt_distances.as_ref().ok_or(Error::MissingView {
            mechanism: name,
            view: "alternative distances",
        })
    };
    let ordinal = || -> Result<&OrdinalProfile> {
        bundle.ordinal.as_ref().ok_or(Error::MissingView {
            mechanism: name,
            view: "ordinal profile",
        })
    };
    match id.kind {
        MechanismKind::MinisumTas => minisum_tas_distance(alt()?, tas("tas")?),
        MechanismKind::MinimaxTas => minimax_tas_distance(alt()?, tas("tas")?),
        MechanismKind::EliminationWeightedMajority => {
            let order = line_ordering(bundle)?;
            elimination_weighted_majority(&order, ordinal()?, tas("tas")?)
        }
        MechanismKind::MostCompactSet => {
            most_compact_set(&ordinal()?.top_choices(), alt()?, tas("tas")?)
        }
        MechanismKind::MaxTasLeftmost => {
            let order = line_ordering(bundle)?;
            max_tas_leftmost(&order, tas("tas")?)
        }
        MechanismKind::AnyApproved => any_approved(tas("tas")?),
        MechanismKind::TopChoiceDictator => top_choice_dictator(tas("tas")?),
    }
}
