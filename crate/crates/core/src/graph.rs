//! Open metric graphs: vertices joined by edges of positive length, with
//! semi-infinite leads attached to some vertices.
//!
//! Lead order is significant. The lead at position `i` of [`MetricGraph::leads`]
//! is scattering channel `i`, so with two leads channel 0 carries the
//! reflection amplitude and channel 1 the transmission amplitude.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = String;

/// Index into [`MetricGraph::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// Edge ids of the graph built by [`make_star4`].
pub const STAR4_E12: EdgeId = EdgeId(0);
pub const STAR4_E23: EdgeId = EdgeId(1);
pub const STAR4_E24: EdgeId = EdgeId(2);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Neumann-Kirchhoff: continuity plus vanishing sum of outgoing derivatives.
    #[default]
    Standard,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
    /// Extra phase picked up on every traversal, added to `k * length`.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lead {
    pub id: u32,
    pub vertex: VertexId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    leads: Vec<Lead>,
    bc: BTreeMap<VertexId, BoundaryCondition>,
}

impl MetricGraph {
    /// Assembles a graph without checking it; run [`validate`] for diagnostics.
    pub fn new(
        vertices: Vec<VertexId>,
        edges: Vec<Edge>,
        leads: Vec<Lead>,
        bc: BTreeMap<VertexId, BoundaryCondition>,
    ) -> Self {
        MetricGraph {
            vertices,
            edges,
            leads,
            bc,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0)
    }

    /// Boundary condition at `vertex`, defaulting to standard when unset.
    pub fn bc(&self, vertex: &str) -> BoundaryCondition {
        self.bc.get(vertex).copied().unwrap_or_default()
    }

    pub fn bc_map(&self) -> &BTreeMap<VertexId, BoundaryCondition> {
        &self.bc
    }

    pub fn num_channels(&self) -> usize {
        self.leads.len()
    }

    /// Number of edge ends plus leads meeting at `vertex`. A loop counts twice.
    pub fn degree(&self, vertex: &str) -> usize {
        let ends = self
            .edges
            .iter()
            .map(|e| (e.a == vertex) as usize + (e.b == vertex) as usize)
            .sum::<usize>();
        ends + self.leads.iter().filter(|l| l.vertex == vertex).count()
    }

    /// Parses the versioned JSON graph description.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match raw.get("version").and_then(|v| v.as_u64()) {
            Some(GRAPH_FILE_VERSION) => {}
            Some(v) => return Err(Error::UnsupportedVersion(v)),
            None => return Err(Error::Parse("missing integer field `version`".into())),
        }
        let file: GraphFile =
            serde_json::from_value(raw).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(file.into())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from(self)).expect("graph file serializes")
    }
}

pub const GRAPH_FILE_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    version: u64,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeRecord>,
    leads: Vec<LeadRecord>,
    #[serde(default)]
    bc: BTreeMap<VertexId, BoundaryCondition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    a: VertexId,
    b: VertexId,
    length: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeadRecord {
    id: u32,
    vertex: VertexId,
}

impl From<GraphFile> for MetricGraph {
    fn from(f: GraphFile) -> Self {
        MetricGraph {
            vertices: f.vertices,
            edges: f
                .edges
                .into_iter()
                .map(|e| Edge {
                    a: e.a,
                    b: e.b,
                    length: e.length,
                    phase: e.phase,
                })
                .collect(),
            leads: f
                .leads
                .into_iter()
                .map(|l| Lead {
                    id: l.id,
                    vertex: l.vertex,
                })
                .collect(),
            bc: f.bc,
        }
    }
}

impl From<&MetricGraph> for GraphFile {
    fn from(g: &MetricGraph) -> Self {
        GraphFile {
            version: GRAPH_FILE_VERSION,
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    length: e.length,
                    phase: e.phase,
                })
                .collect(),
            leads: g
                .leads
                .iter()
                .map(|l| LeadRecord {
                    id: l.id,
                    vertex: l.vertex.clone(),
                })
                .collect(),
            bc: g.bc.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// The graph cannot be scattered off.
    Error,
    /// Legal but probably not what was intended.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
    pub severity: Severity,
}

impl Violation {
    fn error(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
            severity: Severity::Error,
        }
    }

    fn warning(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
            severity: Severity::Warning,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.rule)
    }
}

/// Checks every structural invariant of `graph`. An empty result means the
/// graph is well formed.
pub fn validate(graph: &MetricGraph) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for (i, v) in graph.vertices.iter().enumerate() {
        if !seen.insert(v.as_str()) {
            out.push(Violation::error(
                format!("vertices[{i}]"),
                format!("duplicate vertex id {v:?}"),
            ));
        }
    }

    for (i, e) in graph.edges.iter().enumerate() {
        for (end, v) in [("a", &e.a), ("b", &e.b)] {
            if !seen.contains(v.as_str()) {
                out.push(Violation::error(
                    format!("edges[{i}].{end}"),
                    format!("unknown vertex {v:?}"),
                ));
            }
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            out.push(Violation::error(
                format!("edges[{i}].length"),
                format!("length must be finite and in (0, inf), got {}", e.length),
            ));
        }
        if !e.phase.is_finite() {
            out.push(Violation::error(
                format!("edges[{i}].phase"),
                "phase must be finite",
            ));
        }
    }

    let mut lead_ids = HashSet::new();
    for (i, l) in graph.leads.iter().enumerate() {
        if !seen.contains(l.vertex.as_str()) {
            out.push(Violation::error(
                format!("leads[{i}].vertex"),
                format!("unknown vertex {:?}", l.vertex),
            ));
        }
        if !lead_ids.insert(l.id) {
            out.push(Violation::error(
                format!("leads[{i}].id"),
                format!("duplicate lead id {}", l.id),
            ));
        } else if i > 0 && l.id <= graph.leads[i - 1].id {
            out.push(Violation::error(
                format!("leads[{i}].id"),
                "lead ids must be strictly increasing in list order",
            ));
        }
    }

    for v in graph.bc.keys() {
        if !seen.contains(v.as_str()) {
            out.push(Violation::error(
                format!("bc.{v}"),
                "boundary condition for unknown vertex",
            ));
        }
    }

    if out.is_empty() {
        let lead_vertices: Vec<&str> = graph.leads.iter().map(|l| l.vertex.as_str()).collect();
        if let Some((&first, rest)) = lead_vertices.split_first() {
            let reach = reachable(graph, first);
            for (i, v) in rest.iter().enumerate() {
                if !reach.contains(v) {
                    out.push(Violation::warning(
                        format!("leads[{}].vertex", i + 1),
                        format!(
                            "no internal path from lead vertex {first:?} to {v:?}; transmission is identically 0"
                        ),
                    ));
                }
            }
        }
    }

    out
}

/// [`validate`] plus the two-channel rule: exactly two leads on distinct vertices.
pub fn validate_two_channel(graph: &MetricGraph) -> Vec<Violation> {
    let mut out = validate(graph);
    match graph.leads.as_slice() {
        [l0, l1] if l0.vertex == l1.vertex => out.push(Violation::error(
            "leads",
            "the two leads must attach to distinct vertices",
        )),
        [_, _] => {}
        leads => out.push(Violation::error(
            "leads",
            format!("a two-channel graph needs exactly 2 leads, found {}", leads.len()),
        )),
    }
    out
}

/// Turns error-severity violations into an [`Error::InvalidGraph`].
pub(crate) fn ensure_no_errors(violations: &[Violation]) -> Result<()> {
    let errors: Vec<String> = violations
        .iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| format!("{}: {}", v.field, v.rule))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(errors.join("; ")))
    }
}

fn reachable<'a>(graph: &'a MetricGraph, start: &'a str) -> HashSet<&'a str> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in &graph.edges {
        adj.entry(e.a.as_str()).or_default().push(e.b.as_str());
        adj.entry(e.b.as_str()).or_default().push(e.a.as_str());
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(v).into_iter().flatten() {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Star graph with a dangling arm: v1 - v2 - v4 carries the leads (on v1 and
/// v4), and v2 - v3 is a stub ending in a degree-one vertex.
pub fn make_star4(l12: f64, l23: f64, l24: f64) -> Result<MetricGraph> {
    for len in [l12, l23, l24] {
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::NonPositiveLength(len));
        }
    }
    let v = |s: &str| s.to_string();
    let edge = |a: &str, b: &str, length: f64| Edge {
        a: v(a),
        b: v(b),
        length,
        phase: 0.0,
    };
    let vertices = vec![v("v1"), v("v2"), v("v3"), v("v4")];
    let bc = vertices
        .iter()
        .map(|id| (id.clone(), BoundaryCondition::Standard))
        .collect();
    Ok(MetricGraph {
        vertices,
        edges: vec![
            edge("v1", "v2", l12),
            edge("v2", "v3", l23),
            edge("v2", "v4", l24),
        ],
        leads: vec![
            Lead {
                id: 0,
                vertex: v("v1"),
            },
            Lead {
                id: 1,
                vertex: v("v4"),
            },
        ],
        bc,
    })
}

/// Copy of `graph` with the phase on `edge` replaced by `phi`.
pub fn with_edge_phase(graph: &MetricGraph, edge: EdgeId, phi: f64) -> Result<MetricGraph> {
    let mut out = graph.clone();
    let e = out.edges.get_mut(edge.0).ok_or(Error::UnknownEdge(edge.0))?;
    e.phase = phi;
    Ok(out)
}

/// Phase-equivalent parameters of the star graph: `x = k*l23 + phi`,
/// `alpha = k*l12`, `beta = k*l24`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarPhaseParams {
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
}
