//! The finite core of `D_f` and the fixed subgroup read off from it.
//!
//! Every vertex of `D_f` except the dead ones has exactly one preferred
//! outgoing edge, so the preferred edges form a functional graph; the only
//! edges outside it are the finitely many repelling edges.  The fundamental
//! group of a component is therefore carried by its repelling edges together
//! with the walks joining their endpoints:
//!
//! 1. enumerate the repelling edges;
//! 2. decide for each endpoint whether its walk is finite;
//! 3. keep finite walks completely (including a closing cycle);
//! 4. for infinite walks, pass all inv-repelling vertices on the ray, find a
//!    normal vertex beyond them, and group rays by mutual membership of
//!    these normal vertices (two such rays are either disjoint or one
//!    contains the origin of the other);
//! 5. within a group of merging rays, keep the initial segments up to the
//!    first intersection with a fixed trunk ray, and the trunk up to the
//!    furthest such intersection.
//!
//! The union is pruned of dangling trees.  The component of the dead vertex
//! `𝟏_{v*}` at the base vertex carries `π₁(D_f, 𝟏_{v*}) ≅ Fix(φ)`: a loop
//! at `𝟏_{v*}` with edge labels `ℓ` corresponds to the fixed word of `ℓ`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::df::{
    classify, enumerate_exceptional_edges, enumerate_inv_exceptional, find_normal_or_finite, hat_f, is_dead,
    step_along, DfEdge, EdgeClass, MuCursor, NormalSearch, WalkEnd,
};
use crate::error::{Error, Result};
use crate::graph::{inv, tighten_edges, EdgeId, EdgePath};
use crate::solver::{Finiteness, Solver};
use crate::stallings::stallings_graph;
use crate::track::{subdivide_at_exceptional, TrackOptions, TrainTrack};
use crate::word::{apply, Automorphism, Word};

/// A finite subgraph of `D_f` carrying the fundamental group of every
/// component that contains a repelling edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreGraphDf {
    /// Vertices, sorted.
    pub vertices: Vec<EdgePath>,
    /// Edges in canonical orientation, sorted.
    pub edges: Vec<DfEdge>,
    /// The repelling edges, in canonical orientation, sorted.
    pub repelling: Vec<DfEdge>,
}

/// Where the base vertex `𝟏_{v*}` sits relative to the core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseLocation {
    /// `𝟏_{v*}` is not in the core: its component is a tree.
    Contractible,
    /// `𝟏_{v*}` is a vertex of the core.
    InCore,
}

/// A basis of the fixed subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixBasis {
    /// Basis words in the generators of the input automorphism.
    pub words: Vec<Word>,
    /// Number of vertices of the core.
    pub core_vertices: usize,
    /// Number of edges of the core.
    pub core_edges: usize,
}

/// Canonical orientation of a `D_f` edge: the smaller of `(μ, E)` and
/// `(ν, Ē)`.
pub fn canonical(e: &DfEdge) -> DfEdge {
    if (&e.target, inv(e.label)) < (&e.source, e.label) {
        DfEdge { source: e.target.clone(), label: inv(e.label), target: e.source.clone(), class: e.class }
    } else {
        e.clone()
    }
}

/// The preferred edge leaving a non-dead vertex.
fn preferred_edge(tt: &TrainTrack, mu: &EdgePath) -> Option<DfEdge> {
    let e = mu.first()?;
    let target = hat_f(&tt.f, mu)?;
    Some(DfEdge { class: classify(mu, e, &target), source: mu.clone(), label: e, target })
}

struct Builder<'s, 'a> {
    tt: &'a TrainTrack,
    solver: &'s Solver<'a>,
    edges: BTreeSet<DfEdge>,
}

/// An infinite ray from a repelling endpoint.
struct Ray {
    origin: EdgePath,
    /// A normal vertex on the ray past every inv-repelling vertex.
    normal: EdgePath,
    /// Its index along the ray.
    normal_index: usize,
}

impl<'s, 'a> Builder<'s, 'a> {
    fn add_walk_edges(&mut self, vertices: &[EdgePath]) {
        for v in vertices {
            if let Some(e) = preferred_edge(self.tt, v) {
                self.edges.insert(canonical(&e));
            }
        }
    }

    /// The first `n + 1` vertices of the walk from `μ`.
    fn walk_prefix(&self, mu: &EdgePath, n: usize) -> Result<Vec<EdgePath>> {
        let mut c = MuCursor::new(&self.tt.f, mu.clone());
        let mut out = alloc::vec![mu.clone()];
        while out.len() <= n {
            if !c.advance() || matches!(c.ended(), Some(WalkEnd::Cycle { .. })) {
                return Err(Error::Internal("an infinite walk ended".into()));
            }
            out.push(c.current().clone());
        }
        Ok(out)
    }

    /// Index of `target` on the walk from `μ`, known to be a member.
    fn index_on_walk(&self, mu: &EdgePath, target: &EdgePath) -> Result<Vec<EdgePath>> {
        let mut c = MuCursor::new(&self.tt.f, mu.clone());
        let mut out = alloc::vec![mu.clone()];
        for _ in 0..self.solver.walk_cap {
            if c.current() == target {
                return Ok(out);
            }
            if !c.advance() {
                break;
            }
            out.push(c.current().clone());
        }
        Err(Error::BoundExhausted(format!(
            "walk to {} exceeds the walk cap",
            target.display(self.tt.graph())
        )))
    }

    /// Normal vertex and skip count of an infinite ray.
    fn ray(&self, origin: &EdgePath, inv_rep: &[EdgePath]) -> Result<Ray> {
        // Pass every inv-repelling vertex lying on the ray.
        let mut skip = 0usize;
        for q in inv_rep {
            if self.solver.membership(origin, q)? {
                skip = skip.max(self.index_on_walk(origin, q)?.len() - 1);
            }
        }
        let after = self.walk_prefix(origin, skip + 1)?.pop().expect("nonempty walk");
        match find_normal_or_finite(self.tt, &after, self.solver.walk_cap)? {
            NormalSearch::Normal(normal, i) => Ok(Ray { origin: origin.clone(), normal, normal_index: skip + 1 + i }),
            NormalSearch::Finite(_) => Err(Error::Internal("finite walk on an infinite ray".into())),
        }
    }

    /// Whether the rays from two normal vertices meet.
    fn rays_meet(&self, a: &Ray, b: &Ray) -> Result<bool> {
        Ok(self.solver.membership(&a.normal, &b.normal)? || self.solver.membership(&b.normal, &a.normal)?)
    }

    /// First vertex of the walk from `ray` lying in the walk from `trunk`,
    /// and the prefix of `ray`'s walk up to it.
    fn first_intersection(&self, trunk: &Ray, ray: &Ray) -> Result<Vec<EdgePath>> {
        let prefix = if self.solver.membership(&trunk.origin, &ray.normal)? {
            self.walk_prefix(&ray.origin, ray.normal_index)?
        } else {
            // The trunk's normal vertex lies on this ray.
            self.index_on_walk(&ray.origin, &trunk.normal)?
        };
        // Membership in the trunk's walk is monotone along the ray.
        let (mut lo, mut hi) = (0usize, prefix.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.solver.membership(&trunk.origin, &prefix[mid])? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(prefix[..=lo].to_vec())
    }
}

/// Builds the core of `D_f`.  The seed only shuffles the processing order;
/// the result does not depend on it.
pub fn build_core(tt: &TrainTrack, solver: &Solver<'_>, seed: u64) -> Result<CoreGraphDf> {
    let mut b = Builder { tt, solver, edges: BTreeSet::new() };
    let repelling: BTreeSet<DfEdge> = enumerate_exceptional_edges(&tt.f)
        .into_iter()
        .filter(|e| e.class == EdgeClass::Repelling)
        .map(|e| canonical(&e))
        .collect();
    for e in &repelling {
        debug_assert_eq!(step_along(&tt.f, &e.source, e.label), e.target);
        b.edges.insert(e.clone());
    }
    let endpoints: BTreeSet<EdgePath> = repelling.iter().flat_map(|e| [e.source.clone(), e.target.clone()]).collect();
    let mut order: Vec<EdgePath> = endpoints.iter().filter(|v| !is_dead(v)).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut infinite: Vec<EdgePath> = Vec::new();
    for v in &order {
        match solver.finiteness(v)? {
            Finiteness::Finite(vertices) => b.add_walk_edges(&vertices),
            Finiteness::Infinite(_) => infinite.push(v.clone()),
        }
    }

    if !infinite.is_empty() {
        let inv_rep = enumerate_inv_exceptional(tt)?.repelling_vertices;
        let rays: Vec<Ray> = infinite.iter().map(|v| b.ray(v, &inv_rep)).collect::<Result<_>>()?;
        // Group merging rays (union–find).
        let mut parent: Vec<usize> = (0..rays.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..rays.len() {
            for j in (i + 1)..rays.len() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj && b.rays_meet(&rays[i], &rays[j])? {
                    parent[rj] = ri;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..rays.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        for members in groups.values() {
            let trunk = &rays[members[0]];
            let mut trunk_len = 0usize;
            let mut stops: Vec<EdgePath> = Vec::new();
            for &m in &members[1..] {
                let seg = b.first_intersection(trunk, &rays[m])?;
                b.add_walk_edges(&seg[..seg.len() - 1]);
                stops.push(seg.last().expect("nonempty segment").clone());
            }
            for s in &stops {
                trunk_len = trunk_len.max(b.index_on_walk(&trunk.origin, s)?.len());
            }
            if trunk_len > 1 {
                let seg = b.walk_prefix(&trunk.origin, trunk_len - 1)?;
                b.add_walk_edges(&seg[..seg.len() - 1]);
            }
        }
    }

    let base = EdgePath::trivial(tt.base);
    let keep: BTreeSet<EdgePath> = endpoints.iter().cloned().chain(core::iter::once(base)).collect();
    let edges = prune(b.edges, &keep);
    let vertices: BTreeSet<EdgePath> = edges.iter().flat_map(|e| [e.source.clone(), e.target.clone()]).collect();
    let repelling: Vec<DfEdge> = repelling.into_iter().collect();
    Ok(CoreGraphDf { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect(), repelling })
}

/// Removes degree-one vertices outside `keep`, repeatedly.
fn prune(mut edges: BTreeSet<DfEdge>, keep: &BTreeSet<EdgePath>) -> BTreeSet<DfEdge> {
    loop {
        let mut degree: BTreeMap<&EdgePath, usize> = BTreeMap::new();
        for e in &edges {
            *degree.entry(&e.source).or_default() += 1;
            *degree.entry(&e.target).or_default() += 1;
        }
        let leaves: BTreeSet<EdgePath> =
            degree.into_iter().filter(|(v, d)| *d == 1 && !keep.contains(*v)).map(|(v, _)| v.clone()).collect();
        if leaves.is_empty() {
            return edges;
        }
        edges.retain(|e| !leaves.contains(&e.source) && !leaves.contains(&e.target));
    }
}

/// Whether `𝟏_{v*}` is a vertex of the core.
pub fn locate_base(tt: &TrainTrack, core: &CoreGraphDf) -> BaseLocation {
    let base = EdgePath::trivial(tt.base);
    if core.vertices.binary_search(&base).is_ok() {
        BaseLocation::InCore
    } else {
        BaseLocation::Contractible
    }
}

/// Reads a basis of `Fix(φ)` off the component of `𝟏_{v*}` in the core and
/// verifies it.
pub fn extract_basis(tt: &TrainTrack, core: &CoreGraphDf) -> Result<FixBasis> {
    let mut words = Vec::new();
    if locate_base(tt, core) == BaseLocation::InCore {
        let root = EdgePath::trivial(tt.base);
        // Adjacency in both directions; BFS spanning tree from the root.
        let mut adj: BTreeMap<&EdgePath, Vec<(usize, bool)>> = BTreeMap::new();
        for (i, e) in core.edges.iter().enumerate() {
            adj.entry(&e.source).or_default().push((i, true));
            adj.entry(&e.target).or_default().push((i, false));
        }
        let mut to_root: BTreeMap<&EdgePath, Vec<EdgeId>> = BTreeMap::new();
        let mut tree_edge = alloc::vec![false; core.edges.len()];
        to_root.insert(&root, Vec::new());
        let mut queue = VecDeque::from([&root]);
        let mut component_edges = BTreeSet::new();
        while let Some(u) = queue.pop_front() {
            for &(i, forward) in adj.get(u).map(Vec::as_slice).unwrap_or(&[]) {
                component_edges.insert(i);
                let e = &core.edges[i];
                let (v, label) = if forward { (&e.target, e.label) } else { (&e.source, inv(e.label)) };
                if !to_root.contains_key(v) {
                    let mut p = to_root[u].clone();
                    p.push(label);
                    to_root.insert(v, p);
                    tree_edge[i] = true;
                    queue.push_back(v);
                }
            }
        }
        for i in component_edges {
            if tree_edge[i] {
                continue;
            }
            let e = &core.edges[i];
            let g = tt.graph();
            let back: Vec<EdgeId> = to_root[&e.target].iter().rev().map(|&x| inv(x)).collect();
            let lp = tighten_edges(
                tt.base,
                to_root[&e.source].iter().copied().chain(core::iter::once(e.label)).chain(back),
            );
            debug_assert!(lp.validate(g).is_ok());
            words.push(tt.marking.unmark(&lp.edges));
        }
    }
    for w in &words {
        if apply(&tt.phi, w) != *w {
            return Err(Error::Internal(format!("basis word {w} is not fixed")));
        }
    }
    if stallings_graph(&words).rank() != words.len() {
        return Err(Error::Internal("basis words do not generate freely".into()));
    }
    Ok(FixBasis { words, core_vertices: core.vertices.len(), core_edges: core.edges.len() })
}

/// Basis of `Fix(φ)` for a train track: subdivides at exceptional points,
/// builds the core and extracts the basis.
pub fn fix_basis(tt: &TrainTrack, horizon: usize, seed: u64) -> Result<FixBasis> {
    let sub = subdivide_at_exceptional(tt)?;
    let solver = Solver::new(&sub)?.with_horizon(horizon);
    let core = build_core(&sub, &solver, seed)?;
    extract_basis(&sub, &core)
}

/// Basis of `Fix(φ)` for an automorphism whose rose map is a relative train
/// track.
pub fn fix_basis_pipeline(phi: &Automorphism, options: TrackOptions, horizon: usize, seed: u64) -> Result<FixBasis> {
    let tt = TrainTrack::from_automorphism(phi, options)?;
    fix_basis(&tt, horizon, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::DEFAULT_HORIZON;
    use crate::stallings::same_subgroup;
    use crate::word::{brute_force_fixed_words, parse_word};

    fn auto(images: &[&str], inverse: &[&str]) -> Automorphism {
        let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
        Automorphism::new(images.len(), w(images)).unwrap().with_inverse(w(inverse)).unwrap()
    }

    fn basis(phi: &Automorphism) -> Vec<Word> {
        fix_basis_pipeline(phi, TrackOptions::default(), DEFAULT_HORIZON, 7).unwrap().words
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|x| parse_word(x).unwrap()).collect()
    }

    #[test]
    fn twist_fixes_a_and_conjugate() {
        let phi = auto(&["a", "ba"], &["a", "bA"]);
        let b = basis(&phi);
        assert_eq!(b.len(), 2);
        assert!(same_subgroup(&stallings_graph(&b), &stallings_graph(&words(&["a", "baB"]))));
    }

    #[test]
    fn identity_fixes_everything() {
        for n in 1..=3 {
            let id = Automorphism::identity(n).with_inverse((1..=n as i32).map(Word::letter).collect()).unwrap();
            let b = basis(&id);
            assert_eq!(b.len(), n);
            let all: Vec<Word> = (1..=n as i32).map(Word::letter).collect();
            assert!(same_subgroup(&stallings_graph(&b), &stallings_graph(&all)));
        }
    }

    #[test]
    fn fibonacci_fixes_nothing() {
        let phi = auto(&["ab", "a"], &["b", "Ba"]);
        assert!(basis(&phi).is_empty());
    }

    #[test]
    fn basis_contains_short_fixed_words() {
        for (img, inv_img) in [
            (&["a", "ba"][..], &["a", "bA"][..]),
            (&["b", "a"][..], &["b", "a"][..]),
            (&["A", "b"][..], &["A", "b"][..]),
            (&["a", "aba"][..], &["a", "AbA"][..]),
        ] {
            let phi = auto(img, inv_img);
            let b = basis(&phi);
            let sg = stallings_graph(&b);
            for w in brute_force_fixed_words(&phi, 6) {
                assert!(sg.contains(&w), "{phi}: {w} missing from {b:?}");
            }
        }
    }

    #[test]
    fn core_is_independent_of_the_seed() {
        let phi = auto(&["a", "ba"], &["a", "bA"]);
        let tt = TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap();
        let s = Solver::new(&tt).unwrap();
        let c1 = build_core(&tt, &s, 1).unwrap();
        let c2 = build_core(&tt, &s, 99).unwrap();
        assert_eq!(c1, c2);
    }
}
