//! Instance representation: agents and alternatives in a finite metric,
//! either as an explicit distance matrix or as points on the real line.
//!
//! The joint matrix of a [`GeneralInstance`] is indexed agents first: row
//! `i < n` is agent `i`, row `n + x` is alternative `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute comparison tolerance. Constructions use irrational
/// parameters such as `1 + sqrt(2)`, so all metric checks carry slack.
pub const DEFAULT_TAU: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    General(GeneralInstance),
    Line(LineInstance),
}

/// An instance over an explicit `(n + m) x (n + m)` distance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralInstance {
    pub n_agents: usize,
    pub n_alternatives: usize,
    pub dist: Vec<Vec<f64>>,
}

/// An instance on the real line; distances are absolute differences.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineInstance {
    pub agent_positions: Vec<f64>,
    pub alternative_positions: Vec<f64>,
}

impl GeneralInstance {
    pub fn new(n_agents: usize, n_alternatives: usize, dist: Vec<Vec<f64>>) -> Result<Self> {
        if n_agents == 0 || n_alternatives == 0 {
            return Err(Error::Parameter(
                "need at least one agent and one alternative".into(),
            ));
        }
        let k = n_agents + n_alternatives;
        if dist.len() != k || dist.iter().any(|row| row.len() != k) {
            return Err(Error::Structural(format!(
                "distance matrix must be {k}x{k} for {n_agents} agents and {n_alternatives} alternatives"
            )));
        }
        Ok(Self {
            n_agents,
            n_alternatives,
            dist,
        })
    }
}

impl LineInstance {
    pub fn new(agent_positions: Vec<f64>, alternative_positions: Vec<f64>) -> Result<Self> {
        if agent_positions.is_empty() || alternative_positions.is_empty() {
            return Err(Error::Parameter(
                "need at least one agent and one alternative".into(),
            ));
        }
        if agent_positions
            .iter()
            .chain(alternative_positions.iter())
            .any(|p| !p.is_finite())
        {
            return Err(Error::Structural("positions must be finite".into()));
        }
        Ok(Self {
            agent_positions,
            alternative_positions,
        })
    }

    /// Exact conversion to matrix form.
    pub fn to_general(&self) -> GeneralInstance {
        let pts: Vec<f64> = self
            .agent_positions
            .iter()
            .chain(self.alternative_positions.iter())
            .copied()
            .collect();
        let k = pts.len();
        let mut dist = vec![vec![0.0; k]; k];
        for (a, &p) in pts.iter().enumerate() {
            for (b, &q) in pts.iter().enumerate() {
                dist[a][b] = (p - q).abs();
            }
        }
        GeneralInstance {
            n_agents: self.agent_positions.len(),
            n_alternatives: self.alternative_positions.len(),
            dist,
        }
    }
}

impl Instance {
    pub fn n_agents(&self) -> usize {
        match self {
            Instance::General(g) => g.n_agents,
            Instance::Line(l) => l.agent_positions.len(),
        }
    }

    pub fn n_alternatives(&self) -> usize {
        match self {
            Instance::General(g) => g.n_alternatives,
            Instance::Line(l) => l.alternative_positions.len(),
        }
    }

    /// Distance from agent `i` to alternative `x`.
    pub fn agent_alt(&self, i: usize, x: usize) -> f64 {
        match self {
            Instance::General(g) => g.dist[i][g.n_agents + x],
            Instance::Line(l) => (l.agent_positions[i] - l.alternative_positions[x]).abs(),
        }
    }

    /// Distance between alternatives `x` and `y`.
    pub fn alt_alt(&self, x: usize, y: usize) -> f64 {
        match self {
            Instance::General(g) => g.dist[g.n_agents + x][g.n_agents + y],
            Instance::Line(l) => (l.alternative_positions[x] - l.alternative_positions[y]).abs(),
        }
    }

    pub fn to_general(&self) -> GeneralInstance {
        match self {
            Instance::General(g) => g.clone(),
            Instance::Line(l) => l.to_general(),
        }
    }

    pub fn as_line(&self) -> Option<&LineInstance> {
        match self {
            Instance::Line(l) => Some(l),
            Instance::General(_) => None,
        }
    }

    /// Checks the full joint matrix against the metric axioms.
    pub fn validate(&self, tau: f64) -> Result<Validation> {
        validate_metric(&self.to_general().dist, tau)
    }
}

/// A single failed metric axiom, identifying the offending entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MetricViolation {
    Asymmetry { a: usize, b: usize },
    NonzeroDiagonal { a: usize },
    Negative { a: usize, b: usize },
    /// `d(a,b) > d(a,c) + d(c,b)` beyond tolerance.
    Triangle { a: usize, b: usize, c: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub violations: Vec<MetricViolation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, zero diagonal, nonnegativity and the triangle
/// inequality (within `tau`) for a square matrix. Non-square or
/// non-finite input is a structural error, not a violation.
pub fn validate_metric(matrix: &[Vec<f64>], tau: f64) -> Result<Validation> {
    let k = matrix.len();
    if matrix.iter().any(|row| row.len() != k) {
        return Err(Error::Structural("matrix is not square".into()));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Structural("matrix has non-finite entries".into()));
    }
    let mut violations = Vec::new();
    for a in 0..k {
        if matrix[a][a].abs() > tau {
            violations.push(MetricViolation::NonzeroDiagonal { a });
        }
        for b in 0..k {
            if matrix[a][b] < -tau {
                violations.push(MetricViolation::Negative { a, b });
            }
            if b > a && (matrix[a][b] - matrix[b][a]).abs() > tau {
                violations.push(MetricViolation::Asymmetry { a, b });
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            let d_ab = matrix[a][b];
            for c in 0..k {
                if d_ab > matrix[a][c] + matrix[c][b] + tau {
                    violations.push(MetricViolation::Triangle { a, b, c });
                }
            }
        }
    }
    Ok(Validation { violations })
}

/// Completes a partially specified symmetric matrix by shortest paths
/// over the specified entries. Specified entries are kept as given; the
/// result is a metric provided they admit one.
pub fn metric_closure(partial: &[Vec<Option<f64>>]) -> Result<Vec<Vec<f64>>> {
    let k = partial.len();
    if partial.iter().any(|row| row.len() != k) {
        return Err(Error::Structural("matrix is not square".into()));
    }
    for a in 0..k {
        for b in 0..k {
            match partial[a][b] {
                Some(v) if !v.is_finite() || v < 0.0 => {
                    return Err(Error::Structural(format!(
                        "specified entry ({a},{b}) must be finite and nonnegative"
                    )))
                }
                Some(v) => {
                    if partial[b][a] != Some(v) && a != b {
                        return Err(Error::Structural(format!(
                            "specified entries must be symmetric; ({a},{b}) disagrees with ({b},{a})"
                        )));
                    }
                }
                None => {}
            }
        }
    }

    let mut d = vec![vec![f64::INFINITY; k]; k];
    for a in 0..k {
        d[a][a] = 0.0;
        for b in 0..k {
            if let Some(v) = partial[a][b] {
                d[a][b] = v;
            }
        }
    }
    // Floyd-Warshall over the specified edges.
    for c in 0..k {
        for a in 0..k {
            if d[a][c].is_infinite() {
                continue;
            }
            for b in 0..k {
                let via = d[a][c] + d[c][b];
                if via < d[a][b] {
                    d[a][b] = via;
                }
            }
        }
    }
    if d.iter().flatten().any(|v| v.is_infinite()) {
        return Err(Error::Disconnected(components(partial)));
    }
    // Keep specified entries verbatim; only missing slots take path values.
    for a in 0..k {
        for b in 0..k {
            if let Some(v) = partial[a][b] {
                d[a][b] = v;
            }
        }
    }
    Ok(d)
}

fn components(partial: &[Vec<Option<f64>>]) -> Vec<Vec<usize>> {
    let k = partial.len();
    let mut seen = vec![false; k];
    let mut comps = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(a) = stack.pop() {
            comp.push(a);
            for b in 0..k {
                if !seen[b] && a != b && partial[a][b].is_some() {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_metric_3() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]
    }

    #[test]
    fn path_metric_validates() {
        let v = validate_metric(&path_metric_3(), DEFAULT_TAU).unwrap();
        assert!(v.is_ok());
    }

    #[test]
    fn triangle_violation_identifies_triple() {
        let mut m = path_metric_3();
        m[0][2] = 5.0;
        m[2][0] = 5.0;
        let v = validate_metric(&m, DEFAULT_TAU).unwrap();
        assert!(v
            .violations
            .iter()
            .any(|x| matches!(x, MetricViolation::Triangle { a: 0, b: 2, c: 1 })));
    }

    #[test]
    fn non_square_is_structural() {
        let m = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            validate_metric(&m, DEFAULT_TAU),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn closure_fills_two_hop() {
        let partial = vec![
            vec![Some(0.0), Some(1.0), None],
            vec![Some(1.0), Some(0.0), Some(1.0)],
            vec![None, Some(1.0), Some(0.0)],
        ];
        let d = metric_closure(&partial).unwrap();
        assert_eq!(d[0][2], 2.0);
        assert!(validate_metric(&d, DEFAULT_TAU).unwrap().is_ok());
    }

    #[test]
    fn closure_keeps_complete_matrix() {
        let m = path_metric_3();
        let partial: Vec<Vec<Option<f64>>> = m
            .iter()
            .map(|row| row.iter().map(|&v| Some(v)).collect())
            .collect();
        assert_eq!(metric_closure(&partial).unwrap(), m);
    }

    #[test]
    fn closure_reports_disconnected_components() {
        let partial = vec![
            vec![Some(0.0), Some(1.0), None],
            vec![Some(1.0), Some(0.0), None],
            vec![None, None, Some(0.0)],
        ];
        match metric_closure(&partial) {
            Err(Error::Disconnected(comps)) => {
                assert_eq!(comps, vec![vec![0, 1], vec![2]]);
            }
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }

    #[test]
    fn line_conversion_is_exact() {
        let line = LineInstance::new(vec![1.0], vec![0.0, 2.5]).unwrap();
        let g = line.to_general();
        assert_eq!(g.dist[0][1], 1.0);
        assert_eq!(g.dist[0][2], 1.5);
        assert_eq!(g.dist[1][2], 2.5);
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = Instance::Line(LineInstance::new(vec![0.5], vec![0.0, 1.0]).unwrap());
        let json = serde_json::to_string(&inst).unwrap();
        assert!(json.contains("\"kind\":\"line\""));
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n_alternatives(), 2);
    }
}
