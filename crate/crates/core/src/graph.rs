//! Bicolored multigraphs and the graph operations the encoders and oracles
//! share: color-filtered subgraphs, vertex deletion and component counting.
//!
//! Vertices are `1..=n`. Colors are `1..=d`; an uncolored graph is the
//! special case `d = 1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coloring::VertexColoring;
use crate::error::{Error, Result};

/// 1-based vertex id.
pub type Vertex = usize;
/// 1-based color.
pub type Color = usize;

pub const RED: Color = 1;
pub const BLUE: Color = 2;

/// An edge `{(u, cu), (v, cv)}`. Stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub cu: Color,
    pub v: Vertex,
    pub cv: Color,
}

impl Edge {
    /// Builds the canonical form, swapping endpoints (with their colors) so
    /// that `u < v`. Self-loops are rejected later by [`BicoloredGraph::new`].
    pub fn new(u: Vertex, cu: Color, v: Vertex, cv: Color) -> Self {
        if u <= v {
            Edge { u, cu, v, cv }
        } else {
            Edge {
                u: v,
                cu: cv,
                v: u,
                cv: cu,
            }
        }
    }

    pub fn is_monochromatic(&self) -> bool {
        self.cu == self.cv
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// Color of the endpoint at `x`, if `x` is an endpoint.
    pub fn color_at(&self, x: Vertex) -> Option<Color> {
        if x == self.u {
            Some(self.cu)
        } else if x == self.v {
            Some(self.cv)
        } else {
            None
        }
    }

    /// Whether both endpoint colors agree with `c`.
    pub fn agrees_with(&self, c: &VertexColoring) -> bool {
        c.color(self.u) == self.cu && c.color(self.v) == self.cv
    }
}

/// A bicolored multigraph `(V, E, d)`.
///
/// Parallel edges are kept as distinct entries; encoders key their variables
/// on the edge index. A graph produced by [`BicoloredGraph::without_vertices`]
/// keeps the original ids and records the removed vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicoloredGraph {
    n: usize,
    d: usize,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    removed: Vec<Vertex>,
}

impl BicoloredGraph {
    pub fn new(n: usize, d: usize, edges: Vec<Edge>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGraph("color count d must be at least 1".into()));
        }
        let edges: Vec<Edge> = edges.into_iter().map(|e| Edge::new(e.u, e.cu, e.v, e.cv)).collect();
        for (idx, e) in edges.iter().enumerate() {
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {idx} is a self-loop on {}", e.u)));
            }
            if e.u == 0 || e.v > n {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} ({}, {}) has an endpoint outside 1..={n}",
                    e.u, e.v
                )));
            }
            if e.cu == 0 || e.cu > d || e.cv == 0 || e.cv > d {
                return Err(Error::InvalidGraph(format!("edge {idx} has a color outside 1..={d}")));
            }
        }
        Ok(BicoloredGraph {
            n,
            d,
            edges,
            removed: Vec::new(),
        })
    }

    /// An uncolored graph, modeled as `d = 1`.
    pub fn uncolored(n: usize, pairs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, 1, v, 1)).collect();
        Self::new(n, 1, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_active(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.n && self.removed.binary_search(&v).is_err()
    }

    /// Vertices not removed by [`Self::without_vertices`].
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (1..=self.n).filter(move |&v| self.is_active(v))
    }

    pub fn active_count(&self) -> usize {
        self.n - self.removed.len()
    }

    pub fn removed(&self) -> &[Vertex] {
        &self.removed
    }

    /// `G_c`: keeps only the edges whose endpoint colors agree with `c`.
    pub fn induced(&self, c: &VertexColoring) -> Self {
        assert_eq!(c.n(), self.n, "coloring length must match the vertex count");
        BicoloredGraph {
            n: self.n,
            d: self.d,
            edges: self.edges.iter().copied().filter(|e| e.agrees_with(c)).collect(),
            removed: self.removed.clone(),
        }
    }

    /// `G[V \ S]`: drops every edge with an endpoint in `s`. Ids are preserved.
    pub fn without_vertices(&self, s: &[Vertex]) -> Self {
        let mut removed: BTreeSet<Vertex> = self.removed.iter().copied().collect();
        removed.extend(s.iter().copied().filter(|&v| v >= 1 && v <= self.n));
        BicoloredGraph {
            n: self.n,
            d: self.d,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|e| !removed.contains(&e.u) && !removed.contains(&e.v))
                .collect(),
            removed: removed.into_iter().collect(),
        }
    }

    /// Simple adjacency lists (parallel edges collapsed), indexed by vertex id.
    /// Index 0 is unused.
    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Component index for every active vertex (`None` for removed ones), in
    /// order of the smallest vertex of each component. Edge colors are ignored.
    pub fn components(&self) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut comp = vec![None; self.n + 1];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in self.vertices() {
            if comp[start].is_some() {
                continue;
            }
            comp[start] = Some(next);
            stack.push(start);
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if comp[y].is_none() {
                        comp[y] = Some(next);
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for c in self.components().into_iter().flatten() {
            if c >= sizes.len() {
                sizes.resize(c + 1, 0);
            }
            sizes[c] += 1;
        }
        sizes
    }

    /// `#odd(G)`: components with an odd number of vertices. Isolated
    /// vertices count.
    pub fn count_odd_components(&self) -> usize {
        self.component_sizes().iter().filter(|&&s| s % 2 == 1).count()
    }

    pub fn count_even_components(&self) -> usize {
        self.component_sizes().iter().filter(|&&s| s % 2 == 0).count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_sizes().len() <= 1
    }

    /// Sorted edge tuples; two graphs on the same vertex set are equal as
    /// multigraphs iff these agree.
    pub fn canonical_edges(&self) -> Vec<Edge> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    /// Relabels vertices through `perm` (`perm[v]` is the new id of `v`;
    /// index 0 ignored).
    pub fn relabeled(&self, perm: &[Vertex]) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(perm[e.u], e.cu, perm[e.v], e.cv))
            .collect();
        let mut removed: Vec<Vertex> = self.removed.iter().map(|&v| perm[v]).collect();
        removed.sort_unstable();
        BicoloredGraph {
            n: self.n,
            d: self.d,
            edges,
            removed,
        }
    }

    /// Whether every permutation of `set` is an automorphism of the colored
    /// multigraph. Adjacent transpositions generate the symmetric group, so
    /// checking those suffices.
    pub fn is_symmetric_set(&self, set: &[Vertex]) -> bool {
        let reference = self.canonical_edges();
        set.windows(2).all(|w| {
            let mut perm: Vec<Vertex> = (0..=self.n).collect();
            perm.swap(w[0], w[1]);
            self.relabeled(&perm).canonical_edges() == reference
        })
    }

    /// Deletes the edge at `idx`, shifting later indices down.
    pub fn without_edge(&self, idx: usize) -> Self {
        let mut g = self.clone();
        g.edges.remove(idx);
        g
    }

    pub fn without_edges(&self, indices: &[usize]) -> Self {
        let drop: BTreeSet<usize> = indices.iter().copied().collect();
        let mut g = self.clone();
        g.edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, e)| *e)
            .collect();
        g
    }

    /// Line-oriented text form: a `n d` header, then `u cu v cv` per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.d);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {} {}", e.u, e.cu, e.v, e.cv);
        }
        out
    }

    /// Parses [`Self::to_text`] output. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|f| f.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(lineno + 1, format!("{e}: {line:?}")))?;
            match (header, fields.as_slice()) {
                (None, &[n, d]) => header = Some((n, d)),
                (None, _) => return Err(Error::parse(lineno + 1, "expected header `n d`")),
                (Some(_), &[u, cu, v, cv]) => edges.push(Edge::new(u, cu, v, cv)),
                (Some(_), _) => return Err(Error::parse(lineno + 1, "expected edge `u cu v cv`")),
            }
        }
        let (n, d) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
        Self::new(n, d, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BicoloredGraph = serde_json::from_str(text)?;
        let mut g = Self::new(raw.n, raw.d, raw.edges)?;
        if !raw.removed.is_empty() {
            g = g.without_vertices(&raw.removed);
        }
        Ok(g)
    }

    /// Stable 64-bit FNV-1a fingerprint of the text form, for metadata.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_text().bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }
}
