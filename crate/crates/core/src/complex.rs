//! Abstract Hölder complexes: finite multigraphs whose edges carry rational exponents
//! `beta >= 1`.
//!
//! Self-loop edges are not representable. A topological circle is a pair of parallel
//! edges between two vertices, each of which is then a loop vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// Default bound on the vertex count accepted by [`complexes_isomorphic`].
pub const DEFAULT_ISOMORPHISM_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{0}` is a self-loop; represent circles by two parallel edges")]
    SelfLoop(String),
    #[error("edge `{edge}` has exponent {beta} < 1")]
    BetaBelowOne { edge: String, beta: Rational },
    #[error("complex has {vertices} vertices, above the isomorphism limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("malformed complex document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    /// Two incident edges leading to two distinct neighbours.
    Artificial,
    /// Two incident edges, both to the same neighbour.
    LoopVertex,
    Regular,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub ends: (String, String),
    pub beta: Rational,
}

impl Edge {
    fn other_end(&self, v: &str) -> &str {
        if self.ends.0 == v {
            &self.ends.1
        } else {
            &self.ends.0
        }
    }

    fn touches(&self, v: &str) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HolderComplex {
    vertices: BTreeSet<String>,
    edges: BTreeMap<String, Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl HolderComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<(), ComplexError> {
        let id = id.into();
        if !self.vertices.insert(id.clone()) {
            return Err(ComplexError::DuplicateVertex(id));
        }
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        a: &str,
        b: &str,
        beta: Rational,
    ) -> Result<(), ComplexError> {
        let id = id.into();
        for v in [a, b] {
            if !self.vertices.contains(v) {
                return Err(ComplexError::UnknownVertex(v.to_string()));
            }
        }
        if a == b {
            return Err(ComplexError::SelfLoop(id));
        }
        if beta < 1 {
            return Err(ComplexError::BetaBelowOne { edge: id, beta });
        }
        if self.edges.contains_key(&id) {
            return Err(ComplexError::DuplicateEdge(id));
        }
        self.edges.insert(
            id,
            Edge {
                ends: (a.to_string(), b.to_string()),
                beta,
            },
        );
        Ok(())
    }

    /// Builds a complex from `(id, a, b, beta)` tuples, creating vertices on demand.
    pub fn from_edges<'a>(
        edges: impl IntoIterator<Item = (&'a str, &'a str, &'a str, Rational)>,
    ) -> Result<Self, ComplexError> {
        let mut c = HolderComplex::new();
        for (id, a, b, beta) in edges {
            c.vertices.insert(a.to_string());
            c.vertices.insert(b.to_string());
            c.add_edge(id, a, b, beta)?;
        }
        Ok(c)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &Edge)> {
        self.edges.iter().map(|(id, e)| (id.as_str(), e))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    /// Sorted multiset of edge exponents.
    pub fn betas(&self) -> Vec<Rational> {
        let mut b: Vec<Rational> = self.edges.values().map(|e| e.beta.clone()).collect();
        b.sort();
        b
    }

    pub fn min_beta(&self) -> Option<Rational> {
        self.edges.values().map(|e| &e.beta).min().cloned()
    }

    fn incident(&self, v: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(_, e)| e.touches(v))
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn classify_vertex(&self, v: &str) -> Result<VertexKind, ComplexError> {
        if !self.vertices.contains(v) {
            return Err(ComplexError::UnknownVertex(v.to_string()));
        }
        let inc = self.incident(v);
        if inc.len() != 2 {
            return Ok(VertexKind::Regular);
        }
        let n0 = self.edges[inc[0]].other_end(v);
        let n1 = self.edges[inc[1]].other_end(v);
        Ok(if n0 == n1 {
            VertexKind::LoopVertex
        } else {
            VertexKind::Artificial
        })
    }

    fn kind(&self, v: &str) -> VertexKind {
        self.classify_vertex(v).expect("vertex of this complex")
    }

    pub fn is_canonical(&self) -> bool {
        self.vertices.iter().all(|v| match self.kind(v) {
            VertexKind::Artificial => false,
            VertexKind::LoopVertex => {
                let inc = self.incident(v);
                self.edges[inc[0]].beta == self.edges[inc[1]].beta
            }
            VertexKind::Regular => true,
        })
    }

    /// Removes artificial vertices (merging their two edges with the minimum exponent),
    /// then equalizes the exponents at every loop vertex to their minimum.
    pub fn canonicalize(&self) -> HolderComplex {
        self.canonicalize_by(|candidates| candidates[0].clone())
    }

    /// Canonicalization with a caller-chosen removal order: `pick` receives the current
    /// artificial vertices (sorted) and returns the one to remove next.
    pub(crate) fn canonicalize_by(&self, mut pick: impl FnMut(&[String]) -> String) -> Self {
        let mut c = self.clone();
        loop {
            let artificial: Vec<String> = c
                .vertices
                .iter()
                .filter(|v| c.kind(v) == VertexKind::Artificial)
                .cloned()
                .collect();
            if artificial.is_empty() {
                break;
            }
            let b = pick(&artificial);
            c.smooth_vertex(&b);
        }
        let loops: Vec<String> = c
            .vertices
            .iter()
            .filter(|v| c.kind(v) == VertexKind::LoopVertex)
            .cloned()
            .collect();
        for v in loops {
            let inc: Vec<String> = c.incident(&v).into_iter().map(str::to_string).collect();
            let m = c.edges[&inc[0]].beta.clone().min(c.edges[&inc[1]].beta.clone());
            for id in inc {
                c.edges.get_mut(&id).unwrap().beta = m.clone();
            }
        }
        c
    }

    fn smooth_vertex(&mut self, b: &str) {
        let inc: Vec<String> = self.incident(b).into_iter().map(str::to_string).collect();
        debug_assert_eq!(inc.len(), 2);
        let g1 = self.edges.remove(&inc[0]).unwrap();
        let g2 = self.edges.remove(&inc[1]).unwrap();
        let a = g1.other_end(b).to_string();
        let c = g2.other_end(b).to_string();
        self.vertices.remove(b);
        // `inc` is sorted, so the merged edge keeps the smaller id.
        self.edges.insert(
            inc[0].clone(),
            Edge {
                ends: (a, c),
                beta: g1.beta.min(g2.beta),
            },
        );
    }

    /// Replaces edge `id` by a path through a fresh vertex `mid`; both halves keep the
    /// original exponent.
    pub fn subdivide_edge(&mut self, id: &str, mid: &str, new_edge: &str) -> Result<(), ComplexError> {
        let edge = self
            .edges
            .get(id)
            .cloned()
            .ok_or_else(|| ComplexError::Malformed(format!("unknown edge `{id}`")))?;
        if self.edges.contains_key(new_edge) {
            return Err(ComplexError::DuplicateEdge(new_edge.to_string()));
        }
        self.add_vertex(mid)?;
        let (a, b) = edge.ends;
        self.edges.get_mut(id).unwrap().ends = (a, mid.to_string());
        self.edges.insert(
            new_edge.to_string(),
            Edge {
                ends: (mid.to_string(), b),
                beta: edge.beta,
            },
        );
        Ok(())
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => self.to_json(),
            ExportFormat::Dot => self.to_dot(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.document()).expect("complex documents always serialize")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph holder {\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  \"{}\";", escape_dot(v));
        }
        for (id, e) in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [id=\"{}\", label=\"{}\"];",
                escape_dot(&e.ends.0),
                escape_dot(&e.ends.1),
                escape_dot(id),
                e.beta
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ComplexError> {
        let doc: ComplexDocument =
            serde_json::from_str(text).map_err(|e| ComplexError::Malformed(e.to_string()))?;
        let mut c = HolderComplex::new();
        for v in doc.vertices {
            c.add_vertex(v.id)?;
        }
        for e in doc.edges {
            c.add_edge(e.id, &e.ends[0], &e.ends[1], e.beta)?;
        }
        Ok(c)
    }

    fn document(&self) -> ComplexDocument {
        ComplexDocument {
            vertices: self
                .vertices
                .iter()
                .map(|id| VertexEntry { id: id.clone() })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| EdgeEntry {
                    id: id.clone(),
                    ends: [e.ends.0.clone(), e.ends.1.clone()],
                    beta: e.beta.clone(),
                })
                .collect(),
        }
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Serialize, Deserialize)]
struct ComplexDocument {
    vertices: Vec<VertexEntry>,
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    id: String,
    ends: [String; 2],
    beta: Rational,
}

pub fn classify_vertex(c: &HolderComplex, v: &str) -> Result<VertexKind, ComplexError> {
    c.classify_vertex(v)
}

pub fn is_canonical(c: &HolderComplex) -> bool {
    c.is_canonical()
}

pub fn canonicalize(c: &HolderComplex) -> HolderComplex {
    c.canonicalize()
}

pub fn export(c: &HolderComplex, format: ExportFormat) -> String {
    c.export(format)
}

/// Indexed view used by the isomorphism search: for each vertex pair, the sorted
/// multiset of exponents on the edges between them.
struct Indexed {
    n: usize,
    between: HashMap<(usize, usize), Vec<Rational>>,
    signature: Vec<Vec<Rational>>,
    neighbours: Vec<BTreeSet<usize>>,
}

impl Indexed {
    fn new(c: &HolderComplex) -> Self {
        let index: HashMap<&str, usize> = c
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let n = index.len();
        let mut between: HashMap<(usize, usize), Vec<Rational>> = HashMap::new();
        let mut signature = vec![Vec::new(); n];
        let mut neighbours = vec![BTreeSet::new(); n];
        for e in c.edges.values() {
            let (a, b) = (index[e.ends.0.as_str()], index[e.ends.1.as_str()]);
            between
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push(e.beta.clone());
            signature[a].push(e.beta.clone());
            signature[b].push(e.beta.clone());
            neighbours[a].insert(b);
            neighbours[b].insert(a);
        }
        between.values_mut().for_each(|v| v.sort());
        signature.iter_mut().for_each(|v| v.sort());
        Indexed {
            n,
            between,
            signature,
            neighbours,
        }
    }

    fn pair(&self, a: usize, b: usize) -> Option<&Vec<Rational>> {
        self.between.get(&(a.min(b), a.max(b)))
    }
}

/// Whether there is a vertex bijection carrying the edge-exponent multiset between
/// every vertex pair of `a` onto that of `b`.
pub fn complexes_isomorphic(a: &HolderComplex, b: &HolderComplex) -> Result<bool, ComplexError> {
    complexes_isomorphic_with_limit(a, b, DEFAULT_ISOMORPHISM_LIMIT)
}

pub fn complexes_isomorphic_with_limit(
    a: &HolderComplex,
    b: &HolderComplex,
    limit: usize,
) -> Result<bool, ComplexError> {
    for c in [a, b] {
        if c.vertex_count() > limit {
            return Err(ComplexError::TooLarge {
                vertices: c.vertex_count(),
                limit,
            });
        }
    }
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.betas() != b.betas()
    {
        return Ok(false);
    }
    let ia = Indexed::new(a);
    let ib = Indexed::new(b);
    let mut sa = ia.signature.clone();
    let mut sb = ib.signature.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(false);
    }

    // Visit vertices of `a` so that each one (after the first of its component) has an
    // already-mapped neighbour; this prunes the search early.
    let mut order = Vec::with_capacity(ia.n);
    let mut seen = vec![false; ia.n];
    let mut by_degree: Vec<usize> = (0..ia.n).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(ia.signature[v].len()));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in ia.neighbours[v].iter().rev() {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }

    let mut mapping = vec![usize::MAX; ia.n];
    let mut used = vec![false; ib.n];
    Ok(extend_mapping(&ia, &ib, &order, 0, &mut mapping, &mut used))
}

fn extend_mapping(
    a: &Indexed,
    b: &Indexed,
    order: &[usize],
    depth: usize,
    mapping: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    for cand in 0..b.n {
        if used[cand] || a.signature[u] != b.signature[cand] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&w| a.pair(u, w) == b.pair(cand, mapping[w]));
        if !consistent {
            continue;
        }
        mapping[u] = cand;
        used[cand] = true;
        if extend_mapping(a, b, order, depth + 1, mapping, used) {
            return true;
        }
        used[cand] = false;
        mapping[u] = usize::MAX;
    }
    false
}
