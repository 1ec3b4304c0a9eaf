//! The graph `D_f`.
//!
//! Vertices are reduced `f`-paths: paths `μ` with `ω(μ) = f(α(μ))`.  For every
//! edge `E` leaving `α(μ)` there is an edge `μ → [Ē·μ·f(E)]` labelled `E`.
//! The trivial path at a fixed vertex is a *dead* vertex.  Following the
//! first edge of `μ` (the preferred direction) defines `f̂`; the sequence
//! `μ, f̂(μ), f̂²(μ), …` is the `μ`-subgraph.
//!
//! `Φ(μ) = [p_u·g(μ̄)]` identifies `D_f` with `D_g`, preserving labels; its
//! first edge is the inverse-preferred direction at `μ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{inv, tighten, tighten_edges, EdgeId, EdgePath, Graph};
use crate::map::GraphMap;
use crate::track::TrainTrack;

/// True iff `p` is a reduced `f`-path.
pub fn is_f_path(f: &GraphMap, p: &EdgePath) -> bool {
    p.is_reduced() && p.end(f.graph()) == f.vertex(p.start)
}

/// True iff `μ` is a dead vertex (a trivial path at a fixed vertex).
pub fn is_dead(mu: &EdgePath) -> bool {
    mu.edges.is_empty()
}

/// Endpoint of the `D_f`-edge with label `e` leaving `μ`: `[ē·μ·f(e)]`.
pub fn step_along(f: &GraphMap, mu: &EdgePath, e: EdgeId) -> EdgePath {
    let g = f.graph();
    debug_assert_eq!(g.alpha(e), mu.start);
    tighten_edges(g.omega(e), core::iter::once(inv(e)).chain(mu.edges.iter().copied()).chain(f.image(e)))
}

/// `f̂(μ)`: the neighbour in the preferred direction; `None` at dead
/// vertices.
pub fn hat_f(f: &GraphMap, mu: &EdgePath) -> Option<EdgePath> {
    mu.first().map(|e| step_along(f, mu, e))
}

/// Class of a `D_f` edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    /// Preferred at exactly one end.
    Ordinary,
    /// Preferred at neither end.
    Repelling,
    /// Preferred at both ends.
    Attracting,
}

/// An edge of `D_f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DfEdge {
    /// Source vertex.
    pub source: EdgePath,
    /// Label.
    pub label: EdgeId,
    /// Target vertex `[ē·source·f(e)]`.
    pub target: EdgePath,
    /// Classification.
    pub class: EdgeClass,
}

/// Classifies the edge `source → target` with the given label.
pub fn classify(source: &EdgePath, label: EdgeId, target: &EdgePath) -> EdgeClass {
    let at_source = source.first() == Some(label);
    let at_target = target.first() == Some(inv(label));
    match (at_source, at_target) {
        (true, true) => EdgeClass::Attracting,
        (false, false) => EdgeClass::Repelling,
        _ => EdgeClass::Ordinary,
    }
}

/// All edges leaving `μ`, classified.
pub fn neighbors(f: &GraphMap, mu: &EdgePath) -> Vec<DfEdge> {
    f.graph()
        .star(mu.start)
        .into_iter()
        .map(|e| {
            let target = step_along(f, mu, e);
            let class = classify(mu, e, &target);
            DfEdge { source: mu.clone(), label: e, target, class }
        })
        .collect()
}

/// All repelling and attracting edges of `D_f`, one for every occurrence of
/// `E` or `Ē` in an image `f(E)` (`E` running over one orientation per
/// edge pair).
pub fn enumerate_exceptional_edges(f: &GraphMap) -> Vec<DfEdge> {
    let g = f.graph();
    let mut out = Vec::new();
    for e in g.edges().filter(|e| e & 1 == 0) {
        let img = f.image(e);
        let start = f.vertex(g.alpha(e));
        for (i, &x) in img.iter().enumerate() {
            let w1 = EdgePath { start, edges: img[..i].to_vec() };
            let w2 = EdgePath { start: g.omega(x), edges: img[i + 1..].to_vec() };
            if x == e {
                // f(E) = w1·E·w2: the edge w̄1 —E→ w2.
                let source = w1.inverse(g);
                let target = w2;
                out.push(DfEdge { class: classify(&source, e, &target), source, label: e, target });
            } else if x == inv(e) {
                // f(E) = w1·Ē·w2: the edge E·w̄1 —E→ Ē·w2.
                let source = EdgePath::edge(g, e).concat(g, &w1.inverse(g));
                let target = EdgePath::edge(g, inv(e)).concat(g, &w2);
                out.push(DfEdge { class: classify(&source, e, &target), source, label: e, target });
            }
        }
    }
    out
}

/// Independent count of occurrences of `E` and of `Ē` in the images `f(E)`.
pub fn occurrence_counts(f: &GraphMap) -> (usize, usize) {
    let g = f.graph();
    let mut same = 0;
    let mut flipped = 0;
    for e in g.edges().filter(|e| e & 1 == 0) {
        for x in f.image(e) {
            if x == e {
                same += 1;
            } else if x == inv(e) {
                flipped += 1;
            }
        }
    }
    (same, flipped)
}

/// `Φ(μ) = [p_u·g(μ̄)]` with `u = α(μ)`: a `g`-path at `u`.
pub fn phi(tt: &TrainTrack, mu: &EdgePath) -> EdgePath {
    let g = tt.graph();
    let h = &tt.homotopy;
    let gm = h.g.map_path(&mu.inverse(g));
    tighten(&h.p[mu.start].concat(g, &gm))
}

/// Inverse of [`phi`]: `μ = [q_u·f([τ̄·p_u])·q̄_{f(u)}]` with `u = α(τ)`.
///
/// Writing `τ = [p_u·g(μ̄)]` gives `[τ̄·p_u] = [g(μ)]`, and `f∘g ≃ id` via the
/// tracks `q` turns `[f(g(μ))]` back into `μ`.
pub fn phi_inverse(tt: &TrainTrack, tau: &EdgePath) -> Result<EdgePath> {
    let g = tt.graph();
    let h = &tt.homotopy;
    let u = tau.start;
    let gm = tighten(&tau.inverse(g).concat(g, &h.p[u]));
    let fgm = tt.f.map_path(&gm);
    let fu = tt.f.vertex(u);
    let mu = tighten(&h.q[u].concat(g, &fgm).concat(g, &h.q[fu].inverse(g)));
    if phi(tt, &mu) != tighten(tau) {
        return Err(Error::Internal("Φ round trip failed".into()));
    }
    Ok(mu)
}

/// First edge of `Φ(μ)`, if `Φ(μ)` is nontrivial.
pub fn inverse_preferred_label(tt: &TrainTrack, mu: &EdgePath) -> Option<EdgeId> {
    phi(tt, mu).first()
}

/// True iff both directions exist and differ.
pub fn is_normal(tt: &TrainTrack, mu: &EdgePath) -> bool {
    match (mu.first(), inverse_preferred_label(tt, mu)) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    }
}

/// Inverse-exceptional structure of `D_f`, pulled back from `D_g`.
#[derive(Clone, Debug, Default)]
pub struct InvExceptional {
    /// Preimages of repelling edges of `D_g`.
    pub repelling_edges: Vec<DfEdge>,
    /// Their endpoints.
    pub repelling_vertices: Vec<EdgePath>,
    /// Preimages of dead vertices of `D_g`.
    pub dead_vertices: Vec<EdgePath>,
}

impl InvExceptional {
    /// Membership test for inv-repelling vertices.
    pub fn is_repelling_vertex(&self, mu: &EdgePath) -> bool {
        self.repelling_vertices.iter().any(|v| v == mu)
    }
}

/// Inv-repelling edges and vertices and inv-dead vertices of `D_f`.
pub fn enumerate_inv_exceptional(tt: &TrainTrack) -> Result<InvExceptional> {
    let gmap = &tt.homotopy.g;
    let mut out = InvExceptional::default();
    for e in enumerate_exceptional_edges(gmap) {
        if e.class != EdgeClass::Repelling {
            continue;
        }
        let s = phi_inverse(tt, &e.source)?;
        let t = phi_inverse(tt, &e.target)?;
        let target_f = step_along(&tt.f, &s, e.label);
        if target_f != t {
            return Err(Error::Internal("Φ does not preserve an inv-repelling edge".into()));
        }
        for v in [&s, &t] {
            if !out.repelling_vertices.contains(v) {
                out.repelling_vertices.push(v.clone());
            }
        }
        let class = classify(&s, e.label, &t);
        out.repelling_edges.push(DfEdge { source: s, label: e.label, target: t, class });
    }
    for u in 0..tt.graph().vertex_count() {
        if gmap.vertex(u) == u {
            out.dead_vertices.push(phi_inverse(tt, &EdgePath::trivial(u))?);
        }
    }
    Ok(out)
}

/// How a walk along preferred directions ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkEnd {
    /// Reached a dead vertex at this index.
    Dead(usize),
    /// `μ_{start+period} = μ_start`.
    Cycle {
        /// First index on the cycle.
        start: usize,
        /// Cycle length.
        period: usize,
    },
}

/// Default number of vertices remembered exactly by a [`MuCursor`].
pub const DEFAULT_MEMORY: usize = 1_000_000;

/// Walks a `μ`-subgraph.  Vertices are remembered in a hash map up to a
/// memory bound; beyond it Brent's algorithm detects cycles.
pub struct MuCursor<'a> {
    f: &'a GraphMap,
    current: EdgePath,
    index: usize,
    seen: HashMap<EdgePath, usize>,
    memory: usize,
    brent_mark: Option<(EdgePath, usize)>,
    brent_power: usize,
    ended: Option<WalkEnd>,
}

impl<'a> MuCursor<'a> {
    /// Starts at `μ`.
    pub fn new(f: &'a GraphMap, mu: EdgePath) -> Self {
        Self::with_memory(f, mu, DEFAULT_MEMORY)
    }

    /// Starts at `μ` with an explicit memory bound.
    pub fn with_memory(f: &'a GraphMap, mu: EdgePath, memory: usize) -> Self {
        let mut seen = HashMap::new();
        seen.insert(mu.clone(), 0);
        let ended = if is_dead(&mu) { Some(WalkEnd::Dead(0)) } else { None };
        MuCursor { f, current: mu, index: 0, seen, memory, brent_mark: None, brent_power: 1, ended }
    }

    /// Current vertex.
    pub fn current(&self) -> &EdgePath {
        &self.current
    }

    /// Index of the current vertex.
    pub fn index(&self) -> usize {
        self.index
    }

    /// How the walk ended, if it did.
    pub fn ended(&self) -> Option<&WalkEnd> {
        self.ended.as_ref()
    }

    /// Applies `f̂` once.  Returns `false` when the walk has ended (dead
    /// vertex or detected cycle); the position is then unchanged.
    pub fn advance(&mut self) -> bool {
        if self.ended.is_some() {
            return false;
        }
        let next = match hat_f(self.f, &self.current) {
            Some(n) => n,
            None => {
                self.ended = Some(WalkEnd::Dead(self.index));
                return false;
            }
        };
        self.index += 1;
        self.current = next;
        if is_dead(&self.current) {
            self.ended = Some(WalkEnd::Dead(self.index));
            return true;
        }
        if self.seen.len() < self.memory {
            if let Some(&k) = self.seen.get(&self.current) {
                self.ended = Some(WalkEnd::Cycle { start: k, period: self.index - k });
                return true;
            }
            self.seen.insert(self.current.clone(), self.index);
        } else {
            // Brent: compare with a checkpoint refreshed at powers of two.
            match &self.brent_mark {
                Some((m, k)) if *m == self.current => {
                    let period = self.index - k;
                    self.ended = Some(WalkEnd::Cycle { start: self.index - period, period });
                    return true;
                }
                _ => {}
            }
            let since = self.brent_mark.as_ref().map_or(usize::MAX, |(_, k)| self.index - k);
            if self.brent_mark.is_none() || since >= self.brent_power {
                self.brent_power = self.brent_power.saturating_mul(2);
                self.brent_mark = Some((self.current.clone(), self.index));
            }
        }
        true
    }
}

/// Outcome of [`walk`].
#[derive(Clone, Debug)]
pub struct Walk {
    /// Vertices visited, starting with `μ`.
    pub vertices: Vec<EdgePath>,
    /// How the walk ended (`None` if the horizon was reached first).
    pub end: Option<WalkEnd>,
}

/// Follows `f̂` from `μ` for at most `horizon` steps, storing the vertices.
pub fn walk(f: &GraphMap, mu: &EdgePath, horizon: usize) -> Walk {
    let mut c = MuCursor::new(f, mu.clone());
    let mut vertices = alloc::vec![mu.clone()];
    while vertices.len() <= horizon && c.advance() {
        if matches!(c.ended(), Some(WalkEnd::Cycle { .. })) {
            break;
        }
        vertices.push(c.current().clone());
    }
    Walk { vertices, end: c.ended().cloned() }
}

/// Result of [`find_normal_or_finite`].
#[derive(Clone, Debug)]
pub enum NormalSearch {
    /// The `μ`-subgraph is finite; all of its vertices are listed.
    Finite(Walk),
    /// A normal vertex and its index along the walk.
    Normal(EdgePath, usize),
}

/// Length bound beyond which the walk reaches normal vertices.
pub fn normal_threshold(tt: &TrainTrack) -> usize {
    let c = &tt.constants;
    c.c_star * (c.norm_g + 1) + c.k_star
}

/// Either proves the `μ`-subgraph finite or finds a normal vertex in it.
pub fn find_normal_or_finite(tt: &TrainTrack, mu: &EdgePath, horizon: usize) -> Result<NormalSearch> {
    let threshold = normal_threshold(tt);
    let f = &tt.f;
    let mut c = MuCursor::new(f, mu.clone());
    let mut vertices = alloc::vec![mu.clone()];
    let mut labels: Vec<EdgeId> = Vec::new();
    let l0 = mu.len();
    let mut candidate: Option<usize> = None;
    loop {
        let j = vertices.len() - 1;
        if candidate.is_none() && j > l0 && vertices[j].len() > threshold {
            // k(j): longest prefix of μ_j spelled by the next labels, which
            // are the successive first edges along the walk.
            candidate = Some(j);
        }
        if let Some(j) = candidate {
            let k = common_label_prefix(&vertices, &labels, j);
            if let Some(k) = k {
                if vertices.len() >= j + k + 2 {
                    let v = &vertices[j + k];
                    if is_normal(tt, v) {
                        return Ok(NormalSearch::Normal(v.clone(), j + k));
                    }
                    // Normality is expected here; fall back to scanning.
                    for (i, v) in vertices.iter().enumerate().skip(j + k) {
                        if is_normal(tt, v) {
                            return Ok(NormalSearch::Normal(v.clone(), i));
                        }
                    }
                }
            }
        }
        if vertices.len() > horizon {
            return Err(Error::BoundExhausted("no normal vertex found within the horizon".into()));
        }
        let prev_first = c.current().first();
        if !c.advance() || matches!(c.ended(), Some(WalkEnd::Cycle { .. })) {
            if matches!(c.ended(), Some(WalkEnd::Dead(_))) && vertices.last() != Some(c.current()) {
                vertices.push(c.current().clone());
            }
            return Ok(NormalSearch::Finite(Walk { vertices, end: c.ended().cloned() }));
        }
        labels.push(prev_first.unwrap());
        vertices.push(c.current().clone());
        if matches!(c.ended(), Some(WalkEnd::Dead(_))) {
            return Ok(NormalSearch::Finite(Walk { vertices, end: c.ended().cloned() }));
        }
    }
}

/// `k(j)` when enough labels are known: the largest `k` with
/// `μ_j = E_{j+1}…E_{j+k}·Z`.
fn common_label_prefix(vertices: &[EdgePath], labels: &[EdgeId], j: usize) -> Option<usize> {
    let mu = &vertices[j];
    let mut k = 0;
    while k < mu.len() {
        match labels.get(j + k) {
            Some(&e) if e == mu.edges[k] => k += 1,
            Some(_) => return Some(k),
            None => return None,
        }
    }
    Some(k)
}

/// A finite fragment of `D_f` for display.
#[derive(Clone, Debug, Default)]
pub struct Fragment {
    /// Vertices.
    pub vertices: Vec<EdgePath>,
    /// Edges among them.
    pub edges: Vec<DfEdge>,
}

/// Breadth-first exploration of `D_f` around `μ` to the given depth.
pub fn explore(f: &GraphMap, mu: &EdgePath, depth: usize) -> Fragment {
    let mut index: HashMap<EdgePath, usize> = HashMap::new();
    let mut frag = Fragment::default();
    index.insert(mu.clone(), 0);
    frag.vertices.push(mu.clone());
    let mut frontier = alloc::vec![0usize];
    let mut seen_edges: HashSet<(usize, EdgeId)> = HashSet::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &i in &frontier {
            let v = frag.vertices[i].clone();
            for e in neighbors(f, &v) {
                let j = match index.get(&e.target) {
                    Some(&j) => j,
                    None => {
                        let j = frag.vertices.len();
                        index.insert(e.target.clone(), j);
                        frag.vertices.push(e.target.clone());
                        next.push(j);
                        j
                    }
                };
                // Each geometric edge once: skip the reverse of a known edge.
                if seen_edges.contains(&(j, inv(e.label))) {
                    continue;
                }
                seen_edges.insert((i, e.label));
                frag.edges.push(e);
            }
        }
        frontier = next;
    }
    frag
}

/// Display name of a vertex.
pub fn vertex_label(g: &Graph, mu: &EdgePath) -> String {
    if mu.edges.is_empty() {
        format!("1_{}", mu.start)
    } else {
        mu.display(g)
    }
}

/// Graphviz rendering of a fragment.  Labels longer than 40 characters are
/// shortened and made unique with a hash suffix.
pub fn to_dot(g: &Graph, frag: &Fragment) -> String {
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = String::from("digraph Df {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, v) in frag.vertices.iter().enumerate() {
        let label = shorten(&vertex_label(g, v));
        ids.insert(vertex_label(g, v), i);
        out.push_str(&format!("  v{} [label=\"{}\"];\n", i, escape(&label)));
    }
    for e in &frag.edges {
        let (Some(&s), Some(&t)) = (ids.get(&vertex_label(g, &e.source)), ids.get(&vertex_label(g, &e.target))) else {
            continue;
        };
        let style = match e.class {
            EdgeClass::Ordinary => "",
            EdgeClass::Repelling => ", color=red, style=bold",
            EdgeClass::Attracting => ", color=blue, style=bold",
        };
        out.push_str(&format!("  v{} -> v{} [label=\"{}\"{}];\n", s, t, escape(&g.edge_name(e.label)), style));
    }
    out.push_str("}\n");
    out
}

/// Shortens long labels to 40 characters with a stable hash suffix.
pub fn shorten(s: &str) -> String {
    if s.chars().count() <= 40 {
        return String::from(s);
    }
    // FNV-1a.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    let head: String = s.chars().take(29).collect();
    format!("{head}…#{:08x}", h as u32)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::TrackOptions;
    use crate::word::{parse_word, Automorphism};

    fn track(imgs: &[&str], inv: &[&str]) -> TrainTrack {
        let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
        let phi = Automorphism::new(imgs.len(), w(imgs)).unwrap().with_inverse(w(inv)).unwrap();
        TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap()
    }

    #[test]
    fn hat_f_on_the_rose() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let g = tt.graph();
        let a = g.parse_path(0, "a").unwrap();
        assert_eq!(hat_f(&tt.f, &a).unwrap(), a);
        let b = g.parse_path(0, "b").unwrap();
        assert_eq!(hat_f(&tt.f, &b).unwrap(), g.parse_path(0, "ba").unwrap());
    }

    #[test]
    fn exceptional_edges_of_the_twist() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let ex = enumerate_exceptional_edges(&tt.f);
        let rep = ex.iter().filter(|e| e.class == EdgeClass::Repelling).count();
        let att = ex.iter().filter(|e| e.class == EdgeClass::Attracting).count();
        assert_eq!((rep, att), (2, 0));
        for e in &ex {
            assert_eq!(step_along(&tt.f, &e.source, e.label), e.target);
        }
        let g = tt.graph();
        let b = g.edge_by_name("b").unwrap();
        let e = ex.iter().find(|e| e.label == b).unwrap();
        assert!(e.source.edges.is_empty());
        assert_eq!(e.target, g.parse_path(0, "a").unwrap());
    }

    #[test]
    fn phi_round_trip_and_normality() {
        let tt = track(&["ab", "a"], &["b", "Ba"]);
        let frag = explore(&tt.f, &EdgePath::trivial(0), 3);
        for v in &frag.vertices {
            let tau = phi(&tt, v);
            assert_eq!(phi_inverse(&tt, &tau).unwrap(), *v);
        }
        let inv = enumerate_inv_exceptional(&tt).unwrap();
        assert_eq!(inv.dead_vertices.len(), 1);
    }

    #[test]
    fn walk_of_the_twist() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let g = tt.graph();
        let b = g.parse_path(0, "b").unwrap();
        let w = walk(&tt.f, &b, 5);
        let names: Vec<String> = w.vertices.iter().map(|v| v.display(g)).collect();
        assert_eq!(names[..4], ["b", "ba", "aba", "baa"]);
        let a = g.parse_path(0, "a").unwrap();
        assert_eq!(walk(&tt.f, &a, 5).end, Some(WalkEnd::Cycle { start: 0, period: 1 }));
    }

    #[test]
    fn brent_detects_long_cycles() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let a = tt.graph().parse_path(0, "a").unwrap();
        let mut c = MuCursor::with_memory(&tt.f, a, 0);
        let mut n = 0;
        while c.advance() && c.ended().is_none() {
            n += 1;
            assert!(n < 100);
        }
        assert!(matches!(c.ended(), Some(WalkEnd::Cycle { period: 1, .. })));
    }

    #[test]
    fn long_labels_are_shortened() {
        let s: String = core::iter::repeat('a').take(100).collect();
        let t = shorten(&s);
        assert!(t.chars().count() <= 40);
        assert_ne!(shorten(&s), shorten(&s[1..]));
    }
}
