//! The three mechanism-visible views of an instance: ordinal rankings,
//! alternative-to-alternative distances, and threshold approval sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Per-agent total order over alternative indices, closest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalProfile {
    pub rankings: Vec<Vec<usize>>,
}

impl OrdinalProfile {
    pub fn top(&self, agent: usize) -> usize {
        self.rankings[agent][0]
    }

    /// Rank of alternative `x` in agent `i`'s order (0 = most preferred).
    pub fn rank(&self, agent: usize, x: usize) -> usize {
        self.rankings[agent]
            .iter()
            .position(|&a| a == x)
            .expect("alternative in ranking")
    }

    pub fn prefers(&self, agent: usize, x: usize, y: usize) -> bool {
        self.rank(agent, x) < self.rank(agent, y)
    }

    pub fn top_choices(&self) -> Vec<usize> {
        (0..self.rankings.len()).map(|i| self.top(i)).collect()
    }
}

/// Threshold approval sets: agent `i` approves every alternative within
/// factor `alpha` of her distance to her closest alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TasProfile {
    pub alpha: f64,
    /// Sorted alternative indices per agent.
    pub sets: Vec<Vec<usize>>,
}

impl TasProfile {
    pub fn approves(&self, agent: usize, x: usize) -> bool {
        self.sets[agent].binary_search(&x).is_ok()
    }
}

/// The alternative block of the instance metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltDistances {
    pub dist: Vec<Vec<f64>>,
}

impl AltDistances {
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.dist[x][y]
    }
}

/// Positions carried along for line instances so that line-only
/// mechanisms can read the left-to-right ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineProvenance {
    pub agent_positions: Vec<f64>,
    pub alternative_positions: Vec<f64>,
}

/// The information a mechanism actually sees. Views not granted to the
/// mechanism are simply absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElicitationBundle {
    /// Names the instance this bundle was derived from.
    pub source: String,
    pub ordinal: Option<OrdinalProfile>,
    pub alt_distances: Option<AltDistances>,
    pub tas: Option<TasProfile>,
    pub line: Option<LineProvenance>,
}

impl ElicitationBundle {
    pub fn empty(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            ordinal: None,
            alt_distances: None,
            tas: None,
            line: None,
        }
    }
}

/// Tie-breaking rule for equidistant alternatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Lower alternative index first (the default everywhere).
    #[default]
    LowestIndex,
}

/// Sorts each agent's alternatives by distance ascending; ties broken by
/// the given rule.
pub fn derive_ordinal(instance: &Instance, tie_break: TieBreak) -> OrdinalProfile {
    let TieBreak::LowestIndex = tie_break;
    let m = instance.n_alternatives();
    let rankings = (0..instance.n_agents())
        .map(|i| {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| {
                instance
                    .agent_alt(i, x)
                    .partial_cmp(&instance.agent_alt(i, y))
                    .unwrap()
                    .then(x.cmp(&y))
            });
            order
        })
        .collect();
    OrdinalProfile { rankings }
}

/// `A_i = { x : d(i,x) <= alpha * min_y d(i,y) + tau }`. The slack keeps
/// alternatives exactly at the threshold inside the set.
pub fn derive_tas(instance: &Instance, alpha: f64, tau: f64) -> Result<TasProfile> {
    if alpha < 1.0 {
        return Err(Error::Parameter(format!("alpha must be >= 1, got {alpha}")));
    }
    let m = instance.n_alternatives();
    let sets = (0..instance.n_agents())
        .map(|i| {
            let closest = (0..m)
                .map(|x| instance.agent_alt(i, x))
                .fold(f64::INFINITY, f64::min);
            (0..m)
                .filter(|&x| instance.agent_alt(i, x) <= alpha * closest + tau)
                .collect()
        })
        .collect();
    Ok(TasProfile { alpha, sets })
}

pub fn derive_alt_distances(instance: &Instance) -> AltDistances {
    let m = instance.n_alternatives();
    let dist = (0..m)
        .map(|x| (0..m).map(|y| instance.alt_alt(x, y)).collect())
        .collect();
    AltDistances { dist }
}

/// Derives every view plus line provenance when the instance is a line.
pub fn derive_bundle(
    instance: &Instance,
    alpha: f64,
    tau: f64,
    source: impl Into<String>,
) -> Result<ElicitationBundle> {
    Ok(ElicitationBundle {
        source: source.into(),
        ordinal: Some(derive_ordinal(instance, TieBreak::default())),
        alt_distances: Some(derive_alt_distances(instance)),
        tas: Some(derive_tas(instance, alpha, tau)?),
        line: instance.as_line().map(|l| LineProvenance {
            agent_positions: l.agent_positions.clone(),
            alternative_positions: l.alternative_positions.clone(),
        }),
    })
}

/// One entity in the left-to-right ordering of a line instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinePoint {
    Agent(usize),
    Alternative(usize),
}

/// Left-to-right ordering of a line instance's agents and alternatives.
#[derive(Debug, Clone, Serialize)]
pub struct LineOrdering {
    /// All entities sorted by position; ties put agents first, then by index.
    pub merged: Vec<LinePoint>,
    /// Agent indices sorted by position (ties by index).
    pub agents_by_position: Vec<usize>,
    /// Alternative indices sorted by position (ties by index).
    pub alternatives_by_position: Vec<usize>,
}

/// Reads the left-to-right ordering from a bundle's line provenance.
/// Recognition from ordinal data alone is out of scope; a bundle without
/// line provenance is unsupported.
pub fn line_ordering(bundle: &ElicitationBundle) -> Result<LineOrdering> {
    let line = bundle.line.as_ref().ok_or_else(|| {
        Error::Unsupported("bundle has no line provenance; ordering undefined".into())
    })?;
    Ok(order_line(line))
}

pub(crate) fn order_line(line: &LineProvenance) -> LineOrdering {
    let mut agents: Vec<usize> = (0..line.agent_positions.len()).collect();
    agents.sort_by(|&a, &b| {
        line.agent_positions[a]
            .partial_cmp(&line.agent_positions[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut alts: Vec<usize> = (0..line.alternative_positions.len()).collect();
    alts.sort_by(|&a, &b| {
        line.alternative_positions[a]
            .partial_cmp(&line.alternative_positions[b])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut merged: Vec<(f64, u8, usize, LinePoint)> = Vec::new();
    for (idx, &p) in line.agent_positions.iter().enumerate() {
        merged.push((p, 0, idx, LinePoint::Agent(idx)));
    }
    for (idx, &p) in line.alternative_positions.iter().enumerate() {
        merged.push((p, 1, idx, LinePoint::Alternative(idx)));
    }
    merged.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    LineOrdering {
        merged: merged.into_iter().map(|(_, _, _, p)| p).collect(),
        agents_by_position: agents,
        alternatives_by_position: alts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{LineInstance, DEFAULT_TAU};

    fn line(agents: &[f64], alts: &[f64]) -> Instance {
        Instance::Line(LineInstance::new(agents.to_vec(), alts.to_vec()).unwrap())
    }

    #[test]
    fn ordinal_sorted_by_distance() {
        let inst = line(&[1.0], &[0.0, 2.5]);
        let ord = derive_ordinal(&inst, TieBreak::default());
        assert_eq!(ord.rankings, vec![vec![0, 1]]);
    }

    #[test]
    fn ordinal_tie_breaks_by_index() {
        let inst = line(&[1.0], &[0.0, 2.0]);
        let ord = derive_ordinal(&inst, TieBreak::default());
        assert_eq!(ord.rankings, vec![vec![0, 1]]);
    }

    #[test]
    fn tas_direct_evaluation() {
        let inst = line(&[1.0], &[0.0, 2.5]);
        let tas = derive_tas(&inst, 2.0, DEFAULT_TAU).unwrap();
        // 1.5 <= 2 * 1
        assert_eq!(tas.sets, vec![vec![0, 1]]);
    }

    #[test]
    fn tas_alpha_one_singleton() {
        let inst = line(&[1.0], &[0.0, 2.5]);
        let tas = derive_tas(&inst, 1.0, DEFAULT_TAU).unwrap();
        assert_eq!(tas.sets, vec![vec![0]]);
    }

    #[test]
    fn tas_rejects_alpha_below_one() {
        let inst = line(&[1.0], &[0.0]);
        assert!(derive_tas(&inst, 0.5, DEFAULT_TAU).is_err());
    }

    #[test]
    fn tas_colocated_agent_keeps_distance_zero_set() {
        // d(i, o_i) = 0: the set is exactly the alternatives at distance 0.
        let inst = line(&[1.0], &[1.0, 1.0, 3.0]);
        let tas = derive_tas(&inst, 5.0, DEFAULT_TAU).unwrap();
        assert_eq!(tas.sets, vec![vec![0, 1]]);
    }

    #[test]
    fn alt_distances_from_line() {
        let inst = line(&[1.0], &[0.0, 3.0]);
        let alt = derive_alt_distances(&inst);
        assert_eq!(alt.get(0, 1), 3.0);
        assert_eq!(alt.get(1, 1), 0.0);
    }

    #[test]
    fn line_ordering_requires_provenance() {
        let bundle = ElicitationBundle::empty("x");
        assert!(line_ordering(&bundle).is_err());
    }

    #[test]
    fn line_ordering_interleaves_by_position() {
        let inst = line(&[0.9, 1.0, 1.1], &[0.0, 1.0, 2.0]);
        let bundle = derive_bundle(&inst, 2.0, DEFAULT_TAU, "t").unwrap();
        let ord = line_ordering(&bundle).unwrap();
        assert_eq!(ord.alternatives_by_position, vec![0, 1, 2]);
        assert_eq!(ord.agents_by_position, vec![0, 1, 2]);
        assert_eq!(
            ord.merged,
            vec![
                LinePoint::Alternative(0),
                LinePoint::Agent(0),
                LinePoint::Agent(1),
                LinePoint::Alternative(1),
                LinePoint::Agent(2),
                LinePoint::Alternative(2),
            ]
        );
    }

    #[test]
    fn line_ordering_reversal() {
        let inst = line(&[0.2, 0.8], &[0.0, 1.0]);
        let rev = line(&[-0.2, -0.8], &[0.0, -1.0]);
        let b = derive_bundle(&inst, 2.0, DEFAULT_TAU, "t").unwrap();
        let br = derive_bundle(&rev, 2.0, DEFAULT_TAU, "t").unwrap();
        let fwd = line_ordering(&b).unwrap().merged;
        let mut bwd = line_ordering(&br).unwrap().merged;
        bwd.reverse();
        assert_eq!(fwd, bwd);
    }

    #[test]
    fn identical_agents_stay_in_index_order() {
        let inst = line(&[0.5, 0.5], &[0.0, 1.0]);
        let b = derive_bundle(&inst, 2.0, DEFAULT_TAU, "t").unwrap();
        let ord = line_ordering(&b).unwrap();
        assert_eq!(
            ord.merged,
            vec![
                LinePoint::Alternative(0),
                LinePoint::Agent(0),
                LinePoint::Agent(1),
                LinePoint::Alternative(1),
            ]
        );
    }
}
