use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::GraphError;

/// One profiled operation of the dataflow graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpVertex {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Execution time in µs.
    pub cost: f64,
    /// Memory footprint in bytes.
    pub mem: u64,
}

/// Data dependency `src -> dst` carrying `bytes` of payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepEdge {
    pub src: u32,
    pub dst: u32,
    pub bytes: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComputeGraphFile {
    vertices: Vec<OpVertex>,
    edges: Vec<DepEdge>,
}

/// Validated, immutable compute DAG.
///
/// Vertices are stored sorted by id, so the dense index of a vertex (its
/// position in [`ComputeGraph::vertices`]) orders the same way as its id.
/// Edges keep their input order; parallel edges stay distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeGraph {
    vertices: Vec<OpVertex>,
    edges: Vec<DepEdge>,
    index: HashMap<u32, usize>,
    // dense endpoints per edge
    endpoints: Vec<(usize, usize)>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl ComputeGraph {
    pub fn new(mut vertices: Vec<OpVertex>, edges: Vec<DepEdge>) -> Result<Self, GraphError> {
        vertices.sort_by_key(|v| v.id);
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(GraphError::DuplicateId(v.id));
            }
            if !(v.cost.is_finite() && v.cost >= 0.0) {
                return Err(GraphError::InvalidValue(format!(
                    "vertex {} cost {} must be finite and >= 0",
                    v.id, v.cost
                )));
            }
        }

        let n = vertices.len();
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (ei, e) in edges.iter().enumerate() {
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src));
            }
            let lookup = |id: u32| {
                index.get(&id).copied().ok_or(GraphError::DanglingEdge {
                    src: e.src,
                    dst: e.dst,
                    missing: id,
                })
            };
            let (s, d) = (lookup(e.src)?, lookup(e.dst)?);
            endpoints.push((s, d));
            out_edges[s].push(ei);
            in_edges[d].push(ei);
        }

        let mut g = ComputeGraph {
            vertices,
            edges,
            index,
            endpoints,
            in_edges,
            out_edges,
            topo: Vec::new(),
        };
        g.topo = g.kahn()?;
        Ok(g)
    }

    /// Kahn's algorithm with a min-index frontier.
    fn kahn(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let d = self.endpoints[e].1;
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.insert(d);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }

        // Every leftover vertex keeps a leftover predecessor, so walking
        // predecessors from any of them must revisit a vertex.
        let start = (0..n).find(|&v| indeg[v] > 0).expect("leftover vertex");
        let mut seen = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        while seen[v] == usize::MAX {
            seen[v] = walk.len();
            walk.push(v);
            v = self.in_edges[v]
                .iter()
                .map(|&e| self.endpoints[e].0)
                .filter(|&p| indeg[p] > 0)
                .min()
                .expect("leftover predecessor");
        }
        let mut cycle: Vec<usize> = walk[seen[v]..].to_vec();
        cycle.reverse();
        let pivot = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
        cycle.rotate_left(pivot);
        Err(GraphError::Cycle(
            cycle.into_iter().map(|i| self.vertices[i].id).collect(),
        ))
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let file: ComputeGraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
        Self::new(file.vertices, file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = ComputeGraphFile {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[OpVertex] {
        &self.vertices
    }

    pub fn vertex(&self, idx: usize) -> &OpVertex {
        &self.vertices[idx]
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Dense `(src, dst)` indices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.endpoints[e]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn cost(&self, v: usize) -> f64 {
        self.vertices[v].cost
    }

    pub fn total_cost(&self) -> f64 {
        self.vertices.iter().map(|v| v.cost).sum()
    }

    /// Topological order as dense indices, ties broken by ascending id.
    pub fn topo_indices(&self) -> &[usize] {
        &self.topo
    }

    /// Topological order as vertex ids, ties broken by ascending id.
    pub fn topological_order(&self) -> Vec<u32> {
        self.topo.iter().map(|&i| self.vertices[i].id).collect()
    }

    /// Whether some edge links `a` and `b` in either direction.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.out_edges[a].iter().any(|&e| self.endpoints[e].1 == b)
            || self.out_edges[b].iter().any(|&e| self.endpoints[e].1 == a)
    }
}
