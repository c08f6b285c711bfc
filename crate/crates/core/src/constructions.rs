//! Parameterized generators for the known adversarial lower-bound
//! instances, each packaged with the elicitation bundle the mechanism
//! would see, the adversarially chosen winner, and closed-form cost
//! predictions for both the winner and the best alternative.
//!
//! Where the construction only pins agent-to-alternative distances, the
//! remaining matrix entries are the shortest-path closure over those
//! edges (written in closed form), so every instance is a valid metric
//! by construction and the costs driving the ratios are unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{cost, Objective};
use crate::instance::{GeneralInstance, Instance, LineInstance, DEFAULT_TAU};
use crate::views::{derive_bundle, ElicitationBundle};
use crate::ALPHA_STAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionId {
    CyclicSymmetric,
    ScAllThree,
    ScDistTas,
    ScOrdTas,
    TasOnlyLine,
    LineScOrdinal1,
    LineScOrdinal2,
    LineScDist1,
    LineScDist2,
    McGeneralI1,
    McGeneralI2,
    McTasOnly,
}

impl ConstructionId {
    pub const ALL: [ConstructionId; 12] = [
        ConstructionId::CyclicSymmetric,
        ConstructionId::ScAllThree,
        ConstructionId::ScDistTas,
        ConstructionId::ScOrdTas,
        ConstructionId::TasOnlyLine,
        ConstructionId::LineScOrdinal1,
        ConstructionId::LineScOrdinal2,
        ConstructionId::LineScDist1,
        ConstructionId::LineScDist2,
        ConstructionId::McGeneralI1,
        ConstructionId::McGeneralI2,
        ConstructionId::McTasOnly,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstructionId::CyclicSymmetric => "cyclic-symmetric",
            ConstructionId::ScAllThree => "sc-all-three",
            ConstructionId::ScDistTas => "sc-dist-tas",
            ConstructionId::ScOrdTas => "sc-ord-tas",
            ConstructionId::TasOnlyLine => "tas-only-line",
            ConstructionId::LineScOrdinal1 => "line-sc-ordinal-1",
            ConstructionId::LineScOrdinal2 => "line-sc-ordinal-2",
            ConstructionId::LineScDist1 => "line-sc-dist-1",
            ConstructionId::LineScDist2 => "line-sc-dist-2",
            ConstructionId::McGeneralI1 => "mc-general-i1",
            ConstructionId::McGeneralI2 => "mc-general-i2",
            ConstructionId::McTasOnly => "mc-tas-only",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown construction: {s}")))
    }

    /// The objective whose distortion the construction lower-bounds.
    pub fn objective(&self) -> Objective {
        match self {
            ConstructionId::McGeneralI1
            | ConstructionId::McGeneralI2
            | ConstructionId::McTasOnly => Objective::MaxCost,
            _ => Objective::SocialCost,
        }
    }
}

/// Parameters shared by all constructions; each generator reads the
/// fields it needs and validates its own ranges.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub alpha: f64,
    /// Realizes the "slightly larger than alpha" offsets.
    pub eps: f64,
    /// Realizes the infinitesimal agent-side offsets.
    pub delta: f64,
    /// The winner the adversary is asked to punish, where applicable.
    pub target: usize,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 1.5,
            eps: 1e-6,
            delta: 1e-6,
            target: 0,
        }
    }
}

/// A generated lower-bound instance together with its predictions.
#[derive(Debug, Clone, Serialize)]
pub struct Built {
    pub id: ConstructionId,
    pub params: ConstructionParams,
    pub instance: Instance,
    pub bundle: ElicitationBundle,
    pub objective: Objective,
    /// The alternative the mechanism is assumed to have chosen.
    pub adversarial_winner: usize,
    /// The alternative realizing the predicted best cost.
    pub best: usize,
    pub predicted_winner_cost: f64,
    pub predicted_best_cost: f64,
}

impl Built {
    pub fn predicted_ratio(&self) -> f64 {
        self.predicted_winner_cost / self.predicted_best_cost
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg.into()))
    }
}

/// Fills a symmetric joint matrix from per-block distance functions.
fn general_from(
    n: usize,
    m: usize,
    agent_agent: impl Fn(usize, usize) -> f64,
    agent_alt: impl Fn(usize, usize) -> f64,
    alt_alt: impl Fn(usize, usize) -> f64,
) -> Instance {
    let k = n + m;
    let mut dist = vec![vec![0.0; k]; k];
    for p in 0..k {
        for q in (p + 1)..k {
            let d = if q < n {
                agent_agent(p, q)
            } else if p < n {
                agent_alt(p, q - n)
            } else {
                alt_alt(p - n, q - n)
            };
            dist[p][q] = d;
            dist[q][p] = d;
        }
    }
    Instance::General(GeneralInstance {
        n_agents: n,
        n_alternatives: m,
        dist,
    })
}

/// Offset of `x` from `from` walking forward cyclically over `n` slots.
fn cyc(n: usize, from: usize, x: usize) -> usize {
    (x + n - from) % n
}

pub fn build(id: ConstructionId, params: &ConstructionParams) -> Result<Built> {
    let spec = match id {
        ConstructionId::CyclicSymmetric => cyclic_symmetric(params)?,
        ConstructionId::ScAllThree => sc_all_three(params)?,
        ConstructionId::ScDistTas => sc_dist_tas(params)?,
        ConstructionId::ScOrdTas => sc_ord_tas(params)?,
        ConstructionId::TasOnlyLine => tas_only_line(params)?,
        ConstructionId::LineScOrdinal1 => line_sc_ordinal_1(params)?,
        ConstructionId::LineScOrdinal2 => line_sc_ordinal_2(params)?,
        ConstructionId::LineScDist1 => line_sc_dist_1(params)?,
        ConstructionId::LineScDist2 => line_sc_dist_2(params)?,
        ConstructionId::McGeneralI1 => mc_general_i1(params)?,
        ConstructionId::McGeneralI2 => mc_general_i2(params)?,
        ConstructionId::McTasOnly => mc_tas_only(params)?,
    };
    let (instance, winner, best, pw, pb) = spec;
    let bundle = derive_bundle(&instance, params.alpha, DEFAULT_TAU, id.name())?;
    Ok(Built {
        id,
        params: *params,
        instance,
        bundle,
        objective: id.objective(),
        adversarial_winner: winner,
        best,
        predicted_winner_cost: pw,
        predicted_best_cost: pb,
    })
}

/// The asymptotic ratio the construction approaches as the
/// infinitesimals vanish and (where applicable) `n` grows.
pub fn asymptotic_ratio(id: ConstructionId, params: &ConstructionParams) -> f64 {
    let a = params.alpha;
    let n = params.n as f64;
    match id {
        ConstructionId::CyclicSymmetric => a.min(3.0),
        ConstructionId::ScAllThree => 1.0 + 2.0 / a,
        ConstructionId::ScDistTas => {
            // Chosen chain alternatives give 3 - 2/n; the hub gives 2 + 1/a.
            let m = 2 * params.n;
            if params.target < m {
                3.0 - 2.0 / n
            } else {
                2.0 + 1.0 / a
            }
        }
        ConstructionId::ScOrdTas => 2.0 + 1.0 / a,
        ConstructionId::TasOnlyLine => n - 1.0,
        ConstructionId::LineScOrdinal1 => 1.0 + 2.0 / a,
        ConstructionId::LineScOrdinal2 => (3.0 * a - 1.0) / (a + 1.0),
        ConstructionId::LineScDist1 => a,
        ConstructionId::LineScDist2 => 1.0 + 2.0 / a,
        ConstructionId::McGeneralI1 => 2.0 + 1.0 / a,
        ConstructionId::McGeneralI2 => a,
        ConstructionId::McTasOnly => {
            if params.target == 4 {
                f64::INFINITY
            } else {
                3.0
            }
        }
    }
}

type Spec = (Instance, usize, usize, f64, f64);

/// `n` agents, `n` alternatives, all approvals, cyclic preferences; the
/// chosen alternative costs `1 + (n-1) min{3,a}` while its cyclic
/// predecessor costs `n`.
fn cyclic_symmetric(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, t) = (p.n, p.alpha, p.target);
    require(n >= 2, "cyclic-symmetric needs n >= 2")?;
    require(a >= 1.0, "cyclic-symmetric needs alpha >= 1")?;
    require(t < n, "target must index an alternative")?;
    let beta = a.min(3.0);
    let end = (t + n - 1) % n;
    // Agent j is close to the cyclic block a_j..a_{t-1}; the target agent
    // is close to everything.
    let near = move |j: usize, x: usize| j == t || cyc(n, j, x) <= cyc(n, j, end);
    let instance = general_from(
        n,
        n,
        |_, _| 2.0,
        move |j, x| if near(j, x) { 1.0 } else { beta },
        |x, y| if x == y { 0.0 } else { 2.0 },
    );
    let pw = 1.0 + (n - 1) as f64 * beta;
    Ok((instance, t, end, pw, n as f64))
}

/// Adversarial family for mechanisms seeing all three information types:
/// far distance `2 + a` for non-target agents, `1 + 2(a+d)` for the target
/// agent's other `a`s. Predicted ratio tends to `1+2/a`.
fn sc_all_three(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, d, t) = (p.n, p.alpha, p.delta, p.target);
    require(n >= 2, "sc-all-three needs n >= 2")?;
    require((1.0..2.0).contains(&a), "sc-all-three needs 1 <= alpha < 2")?;
    require(d > DEFAULT_TAU, "delta must exceed the comparison tolerance")?;
    require(t < n, "target must index an a-type alternative")?;
    let end = (t + n - 1) % n;
    let near_b = move |j: usize, b: usize| j == t || cyc(n, j, b) <= cyc(n, j, end);
    let close = a + d;
    let far = 2.0 + a;
    let far_a_t = 1.0 + 2.0 * a + 2.0 * d;
    let agent_alt = move |j: usize, x: usize| {
        if x < n {
            if x == j {
                1.0
            } else if j == t {
                far_a_t
            } else {
                far
            }
        } else if near_b(j, x - n) {
            close
        } else {
            far
        }
    };
    // Shortest-path closure of the agent-alternative edges.
    let alt_alt = move |x: usize, y: usize| {
        if x == y {
            0.0
        } else if x < n && y < n {
            3.0 + a
        } else if x >= n && y >= n {
            2.0 * close
        } else {
            let (aa, bb) = if x < n { (x, y - n) } else { (y, x - n) };
            if aa == t || near_b(aa, bb) {
                1.0 + close
            } else {
                3.0 + a
            }
        }
    };
    let instance = general_from(n, 2 * n, |_, _| 2.0 * close, agent_alt, alt_alt);
    let pw = 1.0 + (n - 1) as f64 * far;
    let pb = n as f64 * close;
    Ok((instance, t, n + end, pw, pb))
}

/// Ordinal preferences plus approval sets, alternative distances free
/// (so they take closure values): far-`b` distance `1 + 2a` and far-`a`
/// distance `1 + 2(a+d)` for every agent. Ratio tends to `2 + 1/a`.
fn sc_ord_tas(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, d, t) = (p.n, p.alpha, p.delta, p.target);
    require(n >= 2, "sc-ord-tas needs n >= 2")?;
    require(a >= 1.0, "sc-ord-tas needs alpha >= 1")?;
    require(d > DEFAULT_TAU, "delta must exceed the comparison tolerance")?;
    require(t < n, "target must index an a-type alternative")?;
    let end = (t + n - 1) % n;
    let near_b = move |j: usize, b: usize| j == t || cyc(n, j, b) <= cyc(n, j, end);
    let close = a + d;
    let far_b = 1.0 + 2.0 * a;
    let far_a = 1.0 + 2.0 * close;
    let agent_alt = move |j: usize, x: usize| {
        if x < n {
            if x == j {
                1.0
            } else {
                far_a
            }
        } else if near_b(j, x - n) {
            close
        } else {
            far_b
        }
    };
    let alt_alt = move |x: usize, y: usize| {
        if x == y {
            0.0
        } else if x < n && y < n {
            2.0 + 2.0 * close
        } else if x >= n && y >= n {
            2.0 * close
        } else {
            let (aa, bb) = if x < n { (x, y - n) } else { (y, x - n) };
            if aa == t || near_b(aa, bb) {
                1.0 + close
            } else {
                2.0 + 2.0 * a
            }
        }
    };
    let instance = general_from(n, 2 * n, |_, _| 2.0 * close, agent_alt, alt_alt);
    let pw = 1.0 + (n - 1) as f64 * far_a;
    let pb = n as f64 * close;
    Ok((instance, t, n + end, pw, pb))
}

/// Star of `n` chains `w - 1 - x_i - (a-1) - z_i - 1 - y` with hub-side
/// spokes of length `a + eps`. Agents sit at the chain end opposite the
/// chosen side, so the chosen alternative costs about `(3n-2)a` (chain
/// pick) or `n(1+2a)` (hub pick) against a best of about `na`.
fn sc_dist_tas(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, e, t) = (p.n, p.alpha, p.eps, p.target);
    require(n >= 2, "sc-dist-tas needs n >= 2")?;
    require(a > 1.0, "sc-dist-tas needs alpha > 1")?;
    require(e > DEFAULT_TAU, "eps must exceed the comparison tolerance")?;
    let m = 2 * n + 2;
    require(t < m, "target must index an alternative")?;
    let len = 3.0 * a + 1.0 + 2.0 * e;
    // Winner on the w side (an x or w itself) puts the agents at the far
    // chain ends next to the z's; a z/y winner mirrors them next to the x's.
    let red = t < n || t == m - 1;
    let agent_coord = if red { 2.0 * a + 1.0 + e } else { a + e };
    // (chain, coordinate from w); the endpoints w and y join every chain.
    let point = move |p_idx: usize, is_agent: bool| -> (Option<usize>, f64) {
        if is_agent {
            (Some(p_idx), agent_coord)
        } else if p_idx < n {
            (Some(p_idx), a + e + 1.0)
        } else if p_idx < 2 * n {
            (Some(p_idx - n), 2.0 * a + e)
        } else if p_idx == 2 * n {
            (None, len)
        } else {
            (None, 0.0)
        }
    };
    let dist = move |u: (Option<usize>, f64), v: (Option<usize>, f64)| -> f64 {
        match (u.0, v.0) {
            (Some(c), Some(d)) if c == d => (u.1 - v.1).abs(),
            // Cross-chain paths run through w (coordinate 0) or y (len).
            _ => (u.1 + v.1).min(2.0 * len - u.1 - v.1),
        }
    };
    let instance = general_from(
        n,
        m,
        move |i, j| dist(point(i, true), point(j, true)),
        move |i, x| dist(point(i, true), point(x, false)),
        move |x, y| dist(point(x, false), point(y, false)),
    );
    let hub = t >= 2 * n;
    let pw = if hub {
        n as f64 * (2.0 * a + 1.0 + e)
    } else {
        (3.0 * n as f64 - 2.0) * a + 2.0 * (n - 1) as f64 * e
    };
    let pb = n as f64 * (a + e);
    let best = if red { 2 * n } else { m - 1 };
    Ok((instance, t, best, pw, pb))
}

/// Approval sets only, on a line: one agent-alternative pair at 1, the
/// rest clustered near 0. Choosing the lone pair costs about `n - 1`.
fn tas_only_line(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, e) = (p.n, p.alpha, p.eps);
    require(n >= 2, "tas-only-line needs n >= 2")?;
    require(a >= 1.0, "tas-only-line needs alpha >= 1")?;
    require(e > 0.0, "eps must be positive")?;
    let mut positions = vec![1.0];
    for k in 1..n {
        positions.push(e * (n - 1 - k) as f64 / (n - 1) as f64);
    }
    let instance = Instance::Line(LineInstance::new(positions.clone(), positions.clone())?);
    // SC of the lone alternative at 1, exactly.
    let pw = (n - 1) as f64 - e * (n - 2) as f64 / 2.0;
    // The best alternative sits at the agents' median point.
    let (best, pb) = (0..n)
        .map(|x| {
            let c: f64 = positions.iter().map(|q| (q - positions[x]).abs()).sum();
            (x, c)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)))
        .unwrap();
    Ok((instance, 0, best, pw, pb))
}

/// Two alternatives at 0 and 1; a singleton-approval agent just left of
/// the indifference point and another on the far alternative. Ratio
/// tends to `1 + 2/a`.
fn line_sc_ordinal_1(p: &ConstructionParams) -> Result<Spec> {
    let (a, e, t) = (p.alpha, p.eps, p.target);
    require(a >= 1.0, "line-sc-ordinal-1 needs alpha >= 1")?;
    require(t < 2, "target must be 0 or 1")?;
    require(
        e > DEFAULT_TAU && e < 1.0 / (a + 1.0),
        "eps must lie in (tau, 1/(alpha+1))",
    )?;
    let near = 1.0 / (a + 1.0) - e;
    let agents = if t == 0 {
        vec![near, 1.0]
    } else {
        vec![1.0 - near, 0.0]
    };
    let instance = Instance::Line(LineInstance::new(agents, vec![0.0, 1.0])?);
    let pw = (2.0 + a) / (1.0 + a) - e;
    let pb = a / (1.0 + a) + e;
    Ok((instance, t, 1 - t, pw, pb))
}

/// Two alternatives at 0 and 1, both approved by both agents; one agent
/// just left of the midpoint, the other at `a/(a-1)` where its distance
/// ratio is exactly `a`. Ratio tends to `(3a-1)/(a+1)`.
fn line_sc_ordinal_2(p: &ConstructionParams) -> Result<Spec> {
    let (a, e, t) = (p.alpha, p.eps, p.target);
    require(a > 1.0, "line-sc-ordinal-2 needs alpha > 1")?;
    require(t < 2, "target must be 0 or 1")?;
    require(
        e > 0.0 && e < (a - 1.0) / (2.0 * (a + 1.0)),
        "eps must lie in (0, (alpha-1)/(2(alpha+1)))",
    )?;
    let agents = if t == 0 {
        vec![0.5 - e, a / (a - 1.0)]
    } else {
        vec![0.5 + e, -1.0 / (a - 1.0)]
    };
    let instance = Instance::Line(LineInstance::new(agents, vec![0.0, 1.0])?);
    let pw = (3.0 * a - 1.0) / (2.0 * (a - 1.0)) - e;
    let pb = (a + 1.0) / (2.0 * (a - 1.0)) + e;
    Ok((instance, t, 1 - t, pw, pb))
}

/// Alternatives at 0 and `1+a` with every agent approving both; the
/// agents sit at distance `a` from the winner and 1 from the other.
fn line_sc_dist_1(p: &ConstructionParams) -> Result<Spec> {
    let (n, a, t) = (p.n, p.alpha, p.target);
    require(n >= 1, "line-sc-dist-1 needs n >= 1")?;
    require(a >= 1.0, "line-sc-dist-1 needs alpha >= 1")?;
    require(t < 2, "target must be 0 or 1")?;
    let pos = if t == 0 { a } else { 1.0 };
    let instance = Instance::Line(LineInstance::new(vec![pos; n], vec![0.0, 1.0 + a])?);
    Ok((instance, t, 1 - t, n as f64 * a, n as f64))
}

/// Alternatives at 0 and `1+a` with singleton approvals; one agent sits
/// on the losing alternative, the other at distance about 1 from the
/// winner. Ratio tends to `1 + 2/a`.
fn line_sc_dist_2(p: &ConstructionParams) -> Result<Spec> {
    let (a, e, t) = (p.alpha, p.eps, p.target);
    require(a >= 1.0, "line-sc-dist-2 needs alpha >= 1")?;
    require(t < 2, "target must be 0 or 1")?;
    require(e > DEFAULT_TAU && e < 1.0, "eps must lie in (tau, 1)")?;
    let agents = if t == 0 {
        vec![1.0 - e, 1.0 + a]
    } else {
        vec![0.0, a + e]
    };
    let instance = Instance::Line(LineInstance::new(agents, vec![0.0, 1.0 + a])?);
    Ok((instance, t, 1 - t, 2.0 + a - e, a + e))
}

/// Max-cost instance with singleton approvals: alternatives `1+a+eps`
/// apart, the far agent at `a` past the losing alternative. Ratio tends
/// to `2 + 1/a`; consistency requires `a <= 1 + sqrt(2)`.
fn mc_general_i1(p: &ConstructionParams) -> Result<Spec> {
    let (a, e, t) = (p.alpha, p.eps, p.target);
    require(
        (1.0..=ALPHA_STAR).contains(&a),
        "mc-general-i1 needs 1 <= alpha <= 1 + sqrt(2)",
    )?;
    require(t < 2, "target must be 0 or 1")?;
    require(e > DEFAULT_TAU, "eps must exceed the comparison tolerance")?;
    let (alts, agents) = if t == 0 {
        (vec![0.0, 1.0 + a + e], vec![1.0, 1.0 + 2.0 * a + e])
    } else {
        (vec![1.0 + a + e, 0.0], vec![1.0 + 2.0 * a + e, 1.0])
    };
    let instance = Instance::Line(LineInstance::new(agents, alts)?);
    Ok((instance, t, 1 - t, 1.0 + 2.0 * a + e, a + e))
}

/// Max-cost instance with both alternatives approved: the far agent at
/// `a(a+1)/(a-1)` makes its distance ratio exactly `a`. The realized
/// ratio is exactly `a`, valid for `1 < alpha <= 1 + sqrt(2)` where the
/// losing alternative's max cost is `(a+1)/(a-1)`.
fn mc_general_i2(p: &ConstructionParams) -> Result<Spec> {
    let (a, t) = (p.alpha, p.target);
    require(
        a > 1.0 && a <= ALPHA_STAR,
        "mc-general-i2 needs 1 < alpha <= 1 + sqrt(2)",
    )?;
    require(t < 2, "target must be 0 or 1")?;
    let far = a * (a + 1.0) / (a - 1.0);
    let (alts, agents) = if t == 0 {
        (vec![0.0, 1.0 + a], vec![1.0, far])
    } else {
        (vec![1.0 + a, 0.0], vec![far, 1.0])
    };
    let instance = Instance::Line(LineInstance::new(agents, alts)?);
    Ok((instance, t, 1 - t, far, (a + 1.0) / (a - 1.0)))
}

/// Max-cost instance for approval sets only: two agents with two
/// approved alternatives each and an unapproved center alternative.
/// Punishing an approved pick yields a ratio tending to 3; punishing the
/// center pick yields an unbounded ratio.
fn mc_tas_only(p: &ConstructionParams) -> Result<Spec> {
    let (a, e, t) = (p.alpha, p.eps, p.target);
    require(a >= 1.0, "mc-tas-only needs alpha >= 1")?;
    require(e > DEFAULT_TAU, "eps must exceed the comparison tolerance")?;
    require(t < 5, "target must index one of the five alternatives")?;
    if t == 4 {
        let agents = vec![0.0, e];
        let alts = vec![0.0, 0.0, e, e, 1.0];
        let instance = Instance::Line(LineInstance::new(agents, alts)?);
        return Ok((instance, 4, 0, 1.0, e));
    }
    // The chosen approved alternative goes to the far slot of its side.
    let (near_r, far_r) = (a + 1.0 + e, 2.0 * a + e);
    let mut alts = vec![near_r, far_r, -near_r, -far_r];
    alts.swap(0, 1);
    if t == 1 || t == 2 {
        // Default slots punish targets 0 and 3; swap within the side.
        if t == 1 {
            alts.swap(0, 1);
        } else {
            alts.swap(2, 3);
        }
    }
    alts.push(0.0);
    let agents = vec![a + e, -(a + e)];
    let instance = Instance::Line(LineInstance::new(agents, alts)?);
    Ok((instance, t, 4, 3.0 * a + 2.0 * e, a + e))
}

/// Re-derivation report for a built construction.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub metric_ok: bool,
    /// All bundle views equal a fresh derivation from the instance.
    pub bundle_ok: bool,
    pub winner_cost_diff: f64,
    pub best_cost_diff: f64,
    pub cost_tolerance: f64,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.metric_ok
            && self.bundle_ok
            && self.winner_cost_diff <= self.cost_tolerance
            && self.best_cost_diff <= self.cost_tolerance
    }
}

/// Re-validates the instance, re-derives the bundle, and recomputes both
/// predicted costs; the cost tolerance is `10 * tau`.
pub fn verify(built: &Built, tau: f64) -> Result<VerifyReport> {
    let metric_ok = built.instance.validate(tau)?.is_ok();
    let fresh = derive_bundle(&built.instance, built.params.alpha, DEFAULT_TAU, "verify")?;
    let bundle_ok = fresh.ordinal == built.bundle.ordinal
        && fresh.alt_distances == built.bundle.alt_distances
        && fresh.tas == built.bundle.tas
        && fresh.line == built.bundle.line;
    let winner_cost_diff =
        (cost(&built.instance, built.adversarial_winner, built.objective)
            - built.predicted_winner_cost)
            .abs();
    let best_cost_diff =
        (cost(&built.instance, built.best, built.objective) - built.predicted_best_cost).abs();
    Ok(VerifyReport {
        metric_ok,
        bundle_ok,
        winner_cost_diff,
        best_cost_diff,
        cost_tolerance: 10.0 * tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::optimal_alternative;

    fn params(n: usize, alpha: f64, target: usize) -> ConstructionParams {
        ConstructionParams {
            n,
            alpha,
            target,
            ..ConstructionParams::default()
        }
    }

    #[test]
    fn cyclic_symmetric_small_example() {
        // n=3, alpha=2: chosen costs 5, predecessor costs 3.
        let b = build(ConstructionId::CyclicSymmetric, &params(3, 2.0, 0)).unwrap();
        assert_eq!(b.predicted_winner_cost, 5.0);
        assert_eq!(b.predicted_best_cost, 3.0);
        assert_eq!(b.best, 2);
        let v = verify(&b, DEFAULT_TAU).unwrap();
        assert!(v.pass(), "{v:?}");
    }

    #[test]
    fn cyclic_symmetric_alt_distances_all_two() {
        let b = build(ConstructionId::CyclicSymmetric, &params(3, 2.0, 1)).unwrap();
        let alt = b.bundle.alt_distances.unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(alt.get(x, y), if x == y { 0.0 } else { 2.0 });
            }
        }
    }

    #[test]
    fn cyclic_symmetric_everyone_approves_everything() {
        let b = build(ConstructionId::CyclicSymmetric, &params(4, 3.0, 2)).unwrap();
        let tas = b.bundle.tas.unwrap();
        assert!(tas.sets.iter().all(|s| s.len() == 4));
    }

    #[test]
    fn sc_dist_tas_spec_example() {
        // n=4, alpha=2: SC(y)=8, SC(w)=20, SC(x_i)=20, up to eps terms.
        let mut p = params(4, 2.0, 9);
        p.eps = 1e-9 + 1e-12;
        // Hub target (w is index 2n+1 = 9).
        let b = build(ConstructionId::ScDistTas, &p).unwrap();
        assert!((b.predicted_winner_cost - 20.0).abs() < 1e-7);
        assert!((b.predicted_best_cost - 8.0).abs() < 1e-7);
        assert_eq!(b.best, 8); // y
        let chain = build(ConstructionId::ScDistTas, &params(4, 2.0, 0)).unwrap();
        assert!((chain.predicted_winner_cost - 20.0).abs() < 1e-4);
    }

    #[test]
    fn sc_dist_tas_approval_sets_are_pairs() {
        let b = build(ConstructionId::ScDistTas, &params(3, 2.0, 0)).unwrap();
        let tas = b.bundle.tas.unwrap();
        for (i, set) in tas.sets.iter().enumerate() {
            assert_eq!(set, &vec![i, 3 + i], "agent {i}");
        }
        // Mirrored placement reports the same approval sets.
        let g = build(ConstructionId::ScDistTas, &params(3, 2.0, 3)).unwrap();
        assert_eq!(g.bundle.tas.unwrap().sets, tas.sets);
    }

    #[test]
    fn ab_constructions_have_singleton_approvals() {
        for id in [ConstructionId::ScAllThree, ConstructionId::ScOrdTas] {
            let b = build(id, &params(4, 1.8, 2)).unwrap();
            let tas = b.bundle.tas.unwrap();
            for (i, set) in tas.sets.iter().enumerate() {
                assert_eq!(set, &vec![i], "{}, agent {i}", id.name());
            }
        }
    }

    #[test]
    fn tas_only_line_spec_example() {
        let mut p = ConstructionParams::default();
        p.n = 50;
        let b = build(ConstructionId::TasOnlyLine, &p).unwrap();
        let ratio = cost(&b.instance, b.adversarial_winner, b.objective)
            / cost(&b.instance, b.best, b.objective);
        assert!((ratio - 49.0).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn mc_general_i1_ratio_near_bound() {
        let mut p = ConstructionParams::default();
        p.alpha = ALPHA_STAR;
        let b = build(ConstructionId::McGeneralI1, &p).unwrap();
        let predicted = b.predicted_ratio();
        assert!((predicted - ALPHA_STAR).abs() < 1e-5, "{predicted}");
    }

    #[test]
    fn mc_general_i2_ratio_exactly_alpha() {
        for alpha in [1.2, 2.0, ALPHA_STAR] {
            let b = build(ConstructionId::McGeneralI2, &params(3, alpha, 1)).unwrap();
            assert!((b.predicted_ratio() - alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn every_construction_verifies_at_defaults() {
        for id in ConstructionId::ALL {
            let b = build(id, &ConstructionParams::default()).unwrap();
            let v = verify(&b, DEFAULT_TAU).unwrap();
            assert!(v.pass(), "{}: {v:?}", id.name());
        }
    }

    #[test]
    fn best_alternative_is_the_true_optimum() {
        for id in ConstructionId::ALL {
            let b = build(id, &ConstructionParams::default()).unwrap();
            let (_, opt_cost) = optimal_alternative(&b.instance, b.objective);
            let best_cost = cost(&b.instance, b.best, b.objective);
            assert!(
                (best_cost - opt_cost).abs() <= 1e-12,
                "{}: best {} vs opt {}",
                id.name(),
                best_cost,
                opt_cost
            );
        }
    }

    #[test]
    fn all_targets_are_punished() {
        // Whatever the mechanism picks, the adversary's metric makes that
        // pick cost at least the predicted winner cost relative to best.
        for t in 0..5 {
            let b = build(ConstructionId::McTasOnly, &params(3, 1.5, t)).unwrap();
            assert_eq!(b.adversarial_winner, t);
            let ratio = cost(&b.instance, t, b.objective) / cost(&b.instance, b.best, b.objective);
            if t == 4 {
                assert!(ratio > 100.0);
            } else {
                assert!((ratio - b.predicted_ratio()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn perturbed_instance_fails_verification() {
        let mut b = build(ConstructionId::CyclicSymmetric, &params(3, 2.0, 0)).unwrap();
        if let Instance::General(g) = &mut b.instance {
            let k = g.n_agents; // first alternative row
            g.dist[k][k + 1] += 1e-3;
            g.dist[k + 1][k] += 1e-3;
        }
        let v = verify(&b, DEFAULT_TAU).unwrap();
        assert!(!v.bundle_ok);
        assert!(!v.pass());
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(build(ConstructionId::ScAllThree, &params(3, 2.0, 0)).is_err());
        assert!(build(ConstructionId::ScAllThree, &params(1, 1.5, 0)).is_err());
        assert!(build(ConstructionId::LineScOrdinal2, &params(2, 1.0, 0)).is_err());
        assert!(build(ConstructionId::McGeneralI2, &params(2, 3.0, 0)).is_err());
        assert!(build(ConstructionId::McGeneralI1, &params(2, 1.5, 2)).is_err());
        assert!(build(ConstructionId::CyclicSymmetric, &params(3, 1.5, 3)).is_err());
        let mut bad_eps = params(3, 1.5, 0);
        bad_eps.eps = 0.0;
        assert!(build(ConstructionId::ScDistTas, &bad_eps).is_err());
    }

    #[test]
    fn id_name_round_trip() {
        for id in ConstructionId::ALL {
            assert_eq!(ConstructionId::parse(id.name()).unwrap(), id);
        }
        assert!(ConstructionId::parse("nope").is_err());
    }

    #[test]
    fn asymptotic_ratios_match_large_instances() {
        // With n = 200 and tiny infinitesimals, each realized ratio is
        // within 1% of its asymptote.
        for id in ConstructionId::ALL {
            let mut p = ConstructionParams::default();
            p.n = 200;
            let b = build(id, &p).unwrap();
            let target_ratio = asymptotic_ratio(id, &p);
            if !target_ratio.is_finite() {
                continue;
            }
            let realized = cost(&b.instance, b.adversarial_winner, b.objective)
                / cost(&b.instance, b.best, b.objective);
            assert!(
                (realized - target_ratio).abs() <= 0.01 * target_ratio,
                "{}: realized {realized}, asymptote {target_ratio}",
                id.name()
            );
        }
    }
}
