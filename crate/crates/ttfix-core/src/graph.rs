//! Finite graphs with an edge involution, and edge paths.
//!
//! Oriented edges are numbered so that the pair `k` consists of the edges
//! `2k` (the chosen, "positive" orientation) and `2k + 1` (its inverse); the
//! inverse of an edge is therefore `e ^ 1`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::poly::Rational;

/// Oriented edge identifier.
pub type EdgeId = u32;

/// Inverse of an oriented edge.
#[inline]
pub fn inv(e: EdgeId) -> EdgeId {
    e ^ 1
}

/// Index of the edge pair containing `e`.
#[inline]
pub fn pair(e: EdgeId) -> usize {
    (e >> 1) as usize
}

/// True for the chosen orientation of a pair.
#[inline]
pub fn is_positive(e: EdgeId) -> bool {
    e & 1 == 0
}

/// A finite graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    vertex_count: usize,
    /// `(α, ω)` of the positive edge of each pair.
    ends: Vec<(usize, usize)>,
    /// Display names of positive edges.
    names: Vec<String>,
}

impl Graph {
    /// Builds a graph from the endpoints of the positive edges.
    pub fn new(vertex_count: usize, ends: Vec<(usize, usize)>, names: Vec<String>) -> Result<Self> {
        if names.len() != ends.len() {
            return Err(Error::Invalid("edge name count differs from edge count".into()));
        }
        for &(a, b) in &ends {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            }
        }
        let g = Graph { vertex_count, ends, names };
        if !g.is_connected() {
            return Err(Error::Invalid("graph is not connected".into()));
        }
        Ok(g)
    }

    /// The rose with `n` petals, named `a, b, c, …`.
    pub fn rose(n: usize) -> Self {
        let names = (0..n).map(default_edge_name).collect();
        Graph { vertex_count: 1, ends: alloc::vec![(0, 0); n], names }
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of edge pairs.
    pub fn pair_count(&self) -> usize {
        self.ends.len()
    }

    /// Number of oriented edges.
    pub fn edge_count(&self) -> usize {
        2 * self.ends.len()
    }

    /// All oriented edges.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        0..self.edge_count() as EdgeId
    }

    /// Initial vertex `α(e)`.
    pub fn alpha(&self, e: EdgeId) -> usize {
        let (a, b) = self.ends[pair(e)];
        if is_positive(e) {
            a
        } else {
            b
        }
    }

    /// Terminal vertex `ω(e)`.
    pub fn omega(&self, e: EdgeId) -> usize {
        self.alpha(inv(e))
    }

    /// Name of an oriented edge (inverse names are the positive name in
    /// uppercase, or suffixed by `'` when that is ambiguous).
    pub fn edge_name(&self, e: EdgeId) -> String {
        let n = &self.names[pair(e)];
        if is_positive(e) {
            n.clone()
        } else {
            inverse_name(n)
        }
    }

    /// Names of positive edges.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Looks up an oriented edge by name.
    pub fn edge_by_name(&self, s: &str) -> Option<EdgeId> {
        for (k, n) in self.names.iter().enumerate() {
            if n == s {
                return Some(2 * k as EdgeId);
            }
            if inverse_name(n) == s {
                return Some(2 * k as EdgeId + 1);
            }
        }
        None
    }

    /// Oriented edges leaving `v`.
    pub fn star(&self, v: usize) -> Vec<EdgeId> {
        self.edges().filter(|&e| self.alpha(e) == v).collect()
    }

    /// Euler characteristic rank `E − V + 1` of the fundamental group.
    pub fn rank(&self) -> usize {
        self.pair_count() + 1 - self.vertex_count
    }

    fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut seen = alloc::vec![false; self.vertex_count];
        seen[0] = true;
        let mut stack = alloc::vec![0usize];
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.ends {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    /// Adds an edge pair; returns the positive edge id.
    pub fn add_edge(&mut self, a: usize, b: usize, name: String) -> EdgeId {
        self.ends.push((a, b));
        self.names.push(name);
        2 * (self.ends.len() as EdgeId - 1)
    }

    /// Parses a path written as a sequence of edge names separated by spaces
    /// (or as adjacent single characters when all names are single letters).
    pub fn parse_path(&self, start: usize, s: &str) -> Result<EdgePath> {
        let s = s.trim();
        let mut edges = Vec::new();
        if !(s.is_empty() || s == "1") {
            let tokens: Vec<String> = if s.contains(' ') {
                s.split_whitespace().map(String::from).collect()
            } else if self.names.iter().all(|n| n.chars().count() == 1) {
                s.chars().map(|c| alloc::format!("{}", c)).collect()
            } else {
                alloc::vec![String::from(s)]
            };
            for t in tokens {
                match self.edge_by_name(&t) {
                    Some(e) => edges.push(e),
                    None => return Err(Error::Invalid(alloc::format!("unknown edge name `{}`", t))),
                }
            }
        }
        let p = EdgePath { start: if let Some(&e) = edges.first() { self.alpha(e) } else { start }, edges };
        if !p.edges.is_empty() && p.start != start {
            return Err(Error::Invalid("path does not start at the requested vertex".into()));
        }
        p.validate(self)?;
        Ok(p)
    }
}

fn default_edge_name(i: usize) -> String {
    if i < 26 {
        let mut s = String::new();
        s.push((b'a' + i as u8) as char);
        s
    } else {
        alloc::format!("x{}", i + 1)
    }
}

fn inverse_name(n: &str) -> String {
    let mut chars = n.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => c.to_ascii_uppercase().into(),
        (Some(c), None) if c.is_ascii_uppercase() => c.to_ascii_lowercase().into(),
        _ => {
            if let Some(stripped) = n.strip_suffix('\'') {
                String::from(stripped)
            } else {
                alloc::format!("{}'", n)
            }
        }
    }
}

/// An edge path; the trivial path `𝟏_u` carries only its vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgePath {
    /// Initial vertex.
    pub start: usize,
    /// Oriented edges in order.
    pub edges: Vec<EdgeId>,
}

impl EdgePath {
    /// The trivial path at `v`.
    pub fn trivial(v: usize) -> Self {
        EdgePath { start: v, edges: Vec::new() }
    }

    /// A single-edge path.
    pub fn edge(g: &Graph, e: EdgeId) -> Self {
        EdgePath { start: g.alpha(e), edges: alloc::vec![e] }
    }

    /// Number of edges `l(p)`.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// True for trivial paths.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Terminal vertex.
    pub fn end(&self, g: &Graph) -> usize {
        match self.edges.last() {
            Some(&e) => g.omega(e),
            None => self.start,
        }
    }

    /// First edge, if any.
    pub fn first(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    /// Last edge, if any.
    pub fn last(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    /// Checks adjacency of consecutive edges.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.start >= g.vertex_count() {
            return Err(Error::Invalid("path start out of range".into()));
        }
        let mut v = self.start;
        for &e in &self.edges {
            if e as usize >= g.edge_count() || g.alpha(e) != v {
                return Err(Error::Invalid("path edges do not compose".into()));
            }
            v = g.omega(e);
        }
        Ok(())
    }

    /// The reverse path `p̄`.
    pub fn inverse(&self, g: &Graph) -> EdgePath {
        EdgePath { start: self.end(g), edges: self.edges.iter().rev().map(|&e| inv(e)).collect() }
    }

    /// Concatenation (no tightening). Panics if the endpoints do not match.
    pub fn concat(&self, g: &Graph, o: &EdgePath) -> EdgePath {
        assert_eq!(self.end(g), o.start, "concatenating non-adjacent paths");
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&o.edges);
        EdgePath { start: self.start, edges }
    }

    /// True iff no edge is followed by its inverse.
    pub fn is_reduced(&self) -> bool {
        self.edges.windows(2).all(|w| w[1] != inv(w[0]))
    }

    /// Subpath of edges `[i, j)`.
    pub fn sub(&self, g: &Graph, i: usize, j: usize) -> EdgePath {
        let start = if i == 0 { self.start } else { g.omega(self.edges[i - 1]) };
        EdgePath { start, edges: self.edges[i..j].to_vec() }
    }

    /// Text form using edge names.
    pub fn display(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            return alloc::format!("1_{}", self.start);
        }
        let single = g.names().iter().all(|n| n.chars().count() == 1);
        let parts: Vec<String> = self.edges.iter().map(|&e| g.edge_name(e)).collect();
        if single {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

/// Tightening `[p]`: cancels adjacent inverse pairs.
pub fn tighten(p: &EdgePath) -> EdgePath {
    let mut out: Vec<EdgeId> = Vec::with_capacity(p.edges.len());
    for &e in &p.edges {
        if out.last() == Some(&inv(e)) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    EdgePath { start: p.start, edges: out }
}

/// Tightens a sequence of edges starting at `start`.
pub fn tighten_edges(start: usize, edges: impl IntoIterator<Item = EdgeId>) -> EdgePath {
    let mut out: Vec<EdgeId> = Vec::new();
    for e in edges {
        if out.last() == Some(&inv(e)) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    EdgePath { start, edges: out }
}

/// A point of an edge at rational `l`-offset from its initial vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointOnEdge {
    /// Oriented edge.
    pub edge: EdgeId,
    /// Offset in `[0, 1]` measured from `α(edge)`.
    pub offset: Rational,
}

impl PointOnEdge {
    /// Normalises to the positive orientation of the edge pair.
    pub fn normalized(&self) -> PointOnEdge {
        if is_positive(self.edge) {
            self.clone()
        } else {
            PointOnEdge { edge: inv(self.edge), offset: Rational::from_integer(1.into()) - &self.offset }
        }
    }

    /// True at either endpoint of the edge.
    pub fn is_vertex(&self) -> bool {
        use num_traits::{One, Zero};
        self.offset.is_zero() || self.offset.is_one()
    }
}

impl fmt::Debug for PointOnEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}@{})", self.edge, self.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tighten_examples() {
        let g = Graph::rose(3);
        let a = 0;
        let b = 2;
        assert_eq!(tighten(&EdgePath { start: 0, edges: alloc::vec![a, inv(a)] }), EdgePath::trivial(0));
        let p = EdgePath { start: 0, edges: alloc::vec![a, b, inv(b), inv(a), a] };
        assert_eq!(tighten(&p).edges, alloc::vec![a]);
        let r = g.parse_path(0, "abC").unwrap();
        assert_eq!(tighten(&r), r);
    }

    #[test]
    fn names_and_parsing() {
        let g = Graph::rose(2);
        assert_eq!(g.edge_name(1), "A");
        assert_eq!(g.edge_by_name("B"), Some(3));
        let p = g.parse_path(0, "aB").unwrap();
        assert_eq!(p.display(&g), "aB");
        assert_eq!(p.inverse(&g).display(&g), "bA");
    }

    #[test]
    fn rejects_disconnected_graphs() {
        let r = Graph::new(2, alloc::vec![(0, 0)], alloc::vec!["a".into()]);
        assert!(r.is_err());
    }
}
