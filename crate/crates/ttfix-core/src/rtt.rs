//! Relative train tracks: validation, markings, basepoint fixing, and
//! homotopy-inverse data.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filtration::{Filtration, StratumClass};
use crate::graph::{inv, pair, tighten, tighten_edges, EdgeId, EdgePath, Graph};
use crate::map::{turn, GraphMap, Turn};
use crate::word::{apply, reduce, Automorphism, Word};

/// Identification of `π₁(Γ, v)` with `F_n`.
///
/// `loops[i]` is a reduced loop at the base vertex representing the
/// generator `x_{i+1}`; `edge_words[k]` is the word assigned to the positive
/// edge of pair `k`, defining a map `Γ → R_n` that is inverse to the marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    /// Generator loops at the base vertex.
    pub loops: Vec<EdgePath>,
    /// Word of each positive edge.
    pub edge_words: Vec<Word>,
}

impl Marking {
    /// The identity marking of a rose.
    pub fn rose(n: usize) -> Self {
        Marking {
            loops: (0..n).map(|k| EdgePath { start: 0, edges: alloc::vec![2 * k as EdgeId] }).collect(),
            edge_words: (1..=n as i32).map(Word::letter).collect(),
        }
    }

    /// Word of an edge path.
    pub fn unmark(&self, p: &[EdgeId]) -> Word {
        reduce(p.iter().flat_map(|&e| {
            let w = &self.edge_words[pair(e)];
            let w = if e & 1 == 0 { w.clone() } else { w.inverse() };
            w.letters().to_vec()
        }))
    }

    /// Loop at the base vertex representing a word.
    pub fn mark(&self, g: &Graph, w: &Word) -> EdgePath {
        let start = self.loops.first().map(|l| l.start).unwrap_or(0);
        let mut edges = Vec::new();
        for &l in w.letters() {
            let lp = &self.loops[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                edges.extend_from_slice(&lp.edges);
            } else {
                edges.extend(lp.inverse(g).edges);
            }
        }
        tighten_edges(start, edges)
    }

    /// Checks that the loops are based at `base`, that unmarking them gives
    /// the generators, and that the graph has the right rank.  Together these
    /// imply that marking and unmarking are mutually inverse isomorphisms.
    pub fn validate(&self, g: &Graph, base: usize, rank: usize) -> Result<()> {
        if self.loops.len() != rank {
            return Err(Error::Invalid("marking must have one loop per generator".into()));
        }
        if self.edge_words.len() != g.pair_count() {
            return Err(Error::Invalid("marking must assign a word to every edge".into()));
        }
        if g.rank() != rank {
            return Err(Error::Invalid(alloc::format!(
                "graph has rank {} but the free group has rank {}",
                g.rank(),
                rank
            )));
        }
        for (i, lp) in self.loops.iter().enumerate() {
            lp.validate(g)?;
            if lp.start != base || lp.end(g) != base {
                return Err(Error::Invalid("marking loops must be based at the base vertex".into()));
            }
            if self.unmark(&lp.edges) != Word::letter(i as i32 + 1) {
                return Err(Error::Invalid(alloc::format!("marking loop {} does not unmark to its generator", i + 1)));
            }
        }
        Ok(())
    }
}

/// Finds `u` with `u⁻¹·x_i·u = c_i` for every generator `x_i`.
pub fn solve_generator_conjugator(c: &[Word]) -> Option<Word> {
    if c.is_empty() {
        return Some(Word::empty());
    }
    // c_1 = s·x_1·s⁻¹ with s the maximal conjugating prefix.
    let c1 = c[0].letters();
    let n = c1.len();
    if n % 2 == 0 {
        return None;
    }
    let h = n / 2;
    for i in 0..h {
        if c1[i] != -c1[n - 1 - i] {
            return None;
        }
    }
    if c1[h] != 1 {
        return None;
    }
    let s = Word::from_letters(c1[..h].iter().copied());
    let s_inv = s.inverse();
    let bound = c.iter().map(Word::len).max().unwrap_or(0) + 2 * s.len() + 1;
    let x1 = Word::letter(1);
    let check = |u: &Word| {
        let ui = u.inverse();
        c.iter().enumerate().all(|(i, ci)| ui.mul(&Word::letter(i as i32 + 1)).mul(u) == *ci)
    };
    if check(&s_inv) {
        return Some(s_inv);
    }
    let mut pk = Word::empty();
    let mut nk = Word::empty();
    for _ in 0..bound {
        pk = pk.mul(&x1);
        nk = nk.mul(&x1.inverse());
        for cand in [pk.mul(&s_inv), nk.mul(&s_inv)] {
            if check(&cand) {
                return Some(cand);
            }
        }
    }
    None
}

/// Shortest path between two vertices (breadth first, deterministic).
pub fn shortest_path(g: &Graph, from: usize, to: usize) -> EdgePath {
    let mut prev: Vec<Option<EdgeId>> = alloc::vec![None; g.vertex_count()];
    let mut seen = alloc::vec![false; g.vertex_count()];
    seen[from] = true;
    let mut queue = alloc::vec![from];
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        for e in g.star(v) {
            let w = g.omega(e);
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some(e);
                queue.push(w);
            }
        }
    }
    let mut edges = Vec::new();
    let mut v = to;
    while v != from {
        let e = prev[v].expect("graph is connected");
        edges.push(e);
        v = g.alpha(e);
    }
    edges.reverse();
    EdgePath { start: from, edges }
}

/// A path `p` from `base` to `f(base)` such that `γ ↦ [p·f(γ)·p̄]` induces
/// `phi` through the marking.
pub fn conjugator_path(f: &GraphMap, marking: &Marking, base: usize, phi: &Automorphism) -> Result<EdgePath> {
    let g = f.graph();
    let psi = phi
        .declared_inverse()
        .ok_or_else(|| Error::Invalid("the automorphism needs a declared inverse".into()))?;
    let q = shortest_path(g, base, f.vertex(base));
    let qi = q.inverse(g);
    let mut c = Vec::new();
    for lp in &marking.loops {
        let img = q.concat(g, &f.map_path(lp)).concat(g, &qi);
        let b = marking.unmark(&tighten(&img).edges);
        c.push(apply(&psi, &b));
    }
    let u = solve_generator_conjugator(&c).ok_or_else(|| {
        Error::Invalid("the graph map does not represent the outer class of the automorphism".into())
    })?;
    let w = apply(phi, &u);
    let p = tighten(&marking.mark(g, &w).concat(g, &q));
    // Verify.
    let pi = p.inverse(g);
    for (i, lp) in marking.loops.iter().enumerate() {
        let img = tighten(&p.concat(g, &f.map_path(lp)).concat(g, &pi));
        if marking.unmark(&img.edges) != phi.images()[i] {
            return Err(Error::Internal("conjugator path verification failed".into()));
        }
    }
    Ok(p)
}

/// Tracks of a homotopy `h ≃ id` for a self map `h` of `Γ`: paths
/// `t_u: u → h(u)` with `[h(E)] = [t̄_{α(E)}·E·t_{ω(E)}]` for every edge.
fn homotopy_tracks(h: &GraphMap, marking: &Marking, base: usize) -> Result<Vec<EdgePath>> {
    let g = h.graph();
    let q = shortest_path(g, base, h.vertex(base));
    let qi = q.inverse(g);
    let mut c = Vec::new();
    for lp in &marking.loops {
        let img = q.concat(g, &h.map_path(lp)).concat(g, &qi);
        c.push(marking.unmark(&tighten(&img).edges));
    }
    let w = solve_generator_conjugator(&c)
        .ok_or_else(|| Error::Invalid("the supplied inverse map is not a homotopy inverse".into()))?;
    let mut tracks: Vec<Option<EdgePath>> = alloc::vec![None; g.vertex_count()];
    tracks[base] = Some(tighten(&marking.mark(g, &w).concat(g, &q)));
    let mut queue = alloc::vec![base];
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        for e in g.star(v) {
            let wv = g.omega(e);
            if tracks[wv].is_none() {
                let tv = tracks[v].as_ref().unwrap();
                let path = EdgePath { start: wv, edges: alloc::vec![inv(e)] }
                    .concat(g, tv)
                    .concat(g, &EdgePath { start: h.vertex(v), edges: h.image(e) });
                tracks[wv] = Some(tighten(&path));
                queue.push(wv);
            }
        }
    }
    let tracks: Vec<EdgePath> = tracks.into_iter().map(|t| t.unwrap()).collect();
    for e in g.edges() {
        let lhs = tighten(&EdgePath { start: h.vertex(g.alpha(e)), edges: h.image(e) });
        let rhs = tighten(
            &tracks[g.alpha(e)].inverse(g).concat(g, &EdgePath::edge(g, e)).concat(g, &tracks[g.omega(e)]),
        );
        if lhs != rhs {
            return Err(Error::Invalid(alloc::format!(
                "homotopy identity fails on edge {}: the supplied inverse map is not a homotopy inverse",
                g.edge_name(e)
            )));
        }
    }
    Ok(tracks)
}

/// Homotopy inverse `g` with the tracks of `g∘f ≃ id` and `f∘g ≃ id`.
#[derive(Clone, Debug)]
pub struct HomotopyData {
    /// Homotopy inverse.
    pub g: GraphMap,
    /// `p_u: u → g(f(u))`.
    pub p: Vec<EdgePath>,
    /// `q_u: u → f(g(u))`.
    pub q: Vec<EdgePath>,
}

/// Builds and validates homotopy data for `f` with inverse `g`.
pub fn homotopy_inverse(f: &GraphMap, g: GraphMap, marking: &Marking, base: usize) -> Result<HomotopyData> {
    let gf = g.compose(f);
    let fg = f.compose(&g);
    let p = homotopy_tracks(&gf, marking, base)?;
    let q = homotopy_tracks(&fg, marking, base)?;
    Ok(HomotopyData { g, p, q })
}

/// Outcome of train-track validation.
#[derive(Clone, Debug, Default)]
pub struct RttReport {
    /// Human-readable failures with witnesses; empty when valid.
    pub failures: Vec<String>,
}

impl RttReport {
    /// True when every condition holds.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Legality table for all turns of a graph map.
#[derive(Clone, Debug)]
pub struct TurnTable {
    legal: BTreeMap<Turn, bool>,
}

impl TurnTable {
    /// Computes legality of every turn.
    pub fn new(f: &GraphMap) -> Self {
        let g = f.graph();
        let mut legal = BTreeMap::new();
        for a in g.edges() {
            for b in g.edges() {
                if a <= b && g.alpha(a) == g.alpha(b) {
                    legal.insert((a, b), f.is_legal_turn((a, b)));
                }
            }
        }
        TurnTable { legal }
    }

    /// Legality of the turn `{a, b}`.
    pub fn is_legal(&self, a: EdgeId, b: EdgeId) -> bool {
        *self.legal.get(&turn(a, b)).unwrap_or(&false)
    }
}

/// True iff every turn of `p` with both edges in `H_r` is legal.  The turn
/// between consecutive edges `e, e'` is `{ē, e'}`.
pub fn is_r_legal(turns: &TurnTable, filt: &Filtration, r: usize, p: &[EdgeId]) -> bool {
    p.windows(2).all(|w| {
        filt.stratum_of(w[0]) != r || filt.stratum_of(w[1]) != r || turns.is_legal(inv(w[0]), w[1])
    })
}

/// Checks tightness, nondegeneracy and conditions (RTT-i)–(RTT-iii) for every
/// exponential stratum.  (RTT-ii) is verified exhaustively on paths of length
/// at most `rtt2_bound`.
pub fn validate_rtt(f: &GraphMap, filt: &Filtration, rtt2_bound: usize) -> RttReport {
    let g = f.graph();
    let mut rep = RttReport::default();
    for e in g.edges().filter(|e| e & 1 == 0) {
        let img = f.image(e);
        if img.is_empty() {
            rep.failures.push(alloc::format!("degenerate: f({}) is trivial", g.edge_name(e)));
        }
        if img.windows(2).any(|w| w[1] == inv(w[0])) {
            rep.failures.push(alloc::format!("not tight: f({}) is not reduced", g.edge_name(e)));
        }
    }
    if !rep.failures.is_empty() {
        return rep;
    }
    let turns = TurnTable::new(f);
    for (r, s) in filt.strata().iter().enumerate() {
        if s.class != StratumClass::Exponential {
            continue;
        }
        let in_r = |e: EdgeId| filt.stratum_of(e) == r;
        // (RTT-i)
        for &k in &s.pairs {
            for e in [2 * k as EdgeId, 2 * k as EdgeId + 1] {
                let d = f.derivative(e).unwrap();
                if !in_r(d) {
                    rep.failures.push(alloc::format!(
                        "RTT-i fails in stratum {}: Df({}) = {} leaves the stratum",
                        r + 1,
                        g.edge_name(e),
                        g.edge_name(d)
                    ));
                }
            }
        }
        // (RTT-iii)
        for &k in &s.pairs {
            let img = f.image(2 * k as EdgeId);
            if !is_r_legal(&turns, filt, r, &img) {
                rep.failures.push(alloc::format!(
                    "RTT-iii fails in stratum {}: f({}) contains an illegal turn",
                    r + 1,
                    g.edge_name(2 * k as EdgeId)
                ));
            }
        }
        // (RTT-ii): connecting paths in G_{r-1} with endpoints on H_r.
        let touches: Vec<bool> = (0..g.vertex_count())
            .map(|v| g.star(v).into_iter().any(|e| in_r(e)))
            .collect();
        let lower = |e: EdgeId| filt.stratum_of(e) < r;
        let mut stack: Vec<EdgePath> = Vec::new();
        for v in 0..g.vertex_count() {
            if touches[v] {
                stack.push(EdgePath::trivial(v));
            }
        }
        let mut failed = false;
        while let Some(p) = stack.pop() {
            if failed {
                break;
            }
            let end = p.end(g);
            if !p.is_empty() && touches[end] && f.map_tight(&p).is_empty() {
                rep.failures.push(alloc::format!(
                    "RTT-ii fails in stratum {}: connecting path {} maps to a trivial path",
                    r + 1,
                    p.display(g)
                ));
                failed = true;
            }
            if p.len() < rtt2_bound {
                for e in g.star(end) {
                    if lower(e) && p.last() != Some(inv(e)) {
                        let mut q = p.clone();
                        q.edges.push(e);
                        stack.push(q);
                    }
                }
            }
        }
    }
    rep
}

/// Result of [`fix_basepoint`].
#[derive(Clone, Debug)]
pub struct FixedBase {
    /// New map `f₁`.
    pub f: GraphMap,
    /// New homotopy inverse `g₁`.
    pub g: GraphMap,
    /// New base vertex `v₁`.
    pub base: usize,
    /// New marking (loops `E·γ·Ē`).
    pub marking: Marking,
    /// New strata (old strata plus the new top stratum `{E}`).
    pub strata: Vec<Vec<usize>>,
    /// The added positive edge `E: v₁ → v`.
    pub new_edge: EdgeId,
}

/// Adds a vertex `v₁` and an edge `E: v₁ → v` with `f₁(v₁) = v₁`,
/// `f₁(E) = E·p`, so that `f₁` fixes `v₁` and induces `f_{v,p}` there.
///
/// The homotopy inverse is extended by `g₁(E) = [E·p_v·g(p̄)]`, where `p_v`
/// is the track of `g∘f ≃ id` at `v`.
pub fn fix_basepoint(
    f: &GraphMap,
    g: &GraphMap,
    p_v: &EdgePath,
    strata: &[Vec<usize>],
    marking: &Marking,
    base: usize,
    p: &EdgePath,
) -> Result<FixedBase> {
    let graph = f.graph();
    if p.start != base || p.end(graph) != f.vertex(base) {
        return Err(Error::Invalid("conjugator path must run from v to f(v)".into()));
    }
    let mut g1 = graph.clone();
    let v1 = g1.add_vertex();
    let name = fresh_name(graph);
    let e = g1.add_edge(v1, base, name);
    let mut vmap = f.vertex_map().to_vec();
    vmap.push(v1);
    let mut images = f.images().to_vec();
    let mut fe = alloc::vec![e];
    fe.extend_from_slice(&p.edges);
    images.push(fe);
    let f1 = GraphMap::new(g1.clone(), vmap, images, None)?;
    let mut gvmap = g.vertex_map().to_vec();
    gvmap.push(v1);
    let mut gimages = g.images().to_vec();
    let gp_bar = g.map_path(&p.inverse(graph));
    let ge = tighten_edges(v1, core::iter::once(e).chain(p_v.edges.iter().copied()).chain(gp_bar.edges));
    gimages.push(ge.edges);
    let g1map = GraphMap::new(g1.clone(), gvmap, gimages, None)?;
    let loops = marking
        .loops
        .iter()
        .map(|lp| {
            let mut edges = alloc::vec![e];
            edges.extend_from_slice(&lp.edges);
            edges.push(inv(e));
            EdgePath { start: v1, edges }
        })
        .collect();
    let mut edge_words = marking.edge_words.clone();
    edge_words.push(Word::empty());
    let mut new_strata = strata.to_vec();
    new_strata.push(alloc::vec![pair(e)]);
    Ok(FixedBase { f: f1, g: g1map, base: v1, marking: Marking { loops, edge_words }, strata: new_strata, new_edge: e })
}

fn fresh_name(g: &Graph) -> String {
    for c in "efghijklmnopqrstuvwxyz".chars() {
        let s: String = c.into();
        if g.edge_by_name(&s).is_none() {
            return s;
        }
    }
    let mut i = g.pair_count();
    loop {
        let s = alloc::format!("e{}", i);
        if g.edge_by_name(&s).is_none() {
            return s;
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::maximal_filtration;
    use crate::word::parse_word;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn rose(imgs: &[&str]) -> GraphMap {
        let ws: Vec<_> = imgs.iter().map(|s| w(s)).collect();
        GraphMap::rose(&ws)
    }

    #[test]
    fn conjugator_solver() {
        // u = ab: u⁻¹ a u = BAaab = Bab, u⁻¹ b u = BAbab
        let u = w("ab");
        let c: Vec<Word> = [w("a"), w("b")].iter().map(|x| u.inverse().mul(x).mul(&u)).collect();
        assert_eq!(solve_generator_conjugator(&c), Some(u));
        assert_eq!(solve_generator_conjugator(&[w("b"), w("a")]), None);
    }

    #[test]
    fn validate_examples() {
        let f1 = rose(&["a", "ba"]);
        assert!(validate_rtt(&f1, &maximal_filtration(&f1).unwrap(), 4).passed());
        let f2 = rose(&["ab", "a"]);
        assert!(validate_rtt(&f2, &maximal_filtration(&f2).unwrap(), 4).passed());
        let bad = GraphMap::new(Graph::rose(1), alloc::vec![0], alloc::vec![alloc::vec![0, 1, 0]], None).unwrap();
        let rep = validate_rtt(&bad, &Filtration::from_strata(&bad, alloc::vec![alloc::vec![0]]).unwrap(), 4);
        assert!(!rep.passed());
    }

    #[test]
    fn homotopy_data_for_phi1() {
        let f = rose(&["a", "ba"]);
        let g = rose(&["a", "bA"]);
        let m = Marking::rose(2);
        let h = homotopy_inverse(&f, g, &m, 0).unwrap();
        assert!(h.p[0].is_empty());
        assert!(h.q[0].is_empty());
        let wrong = rose(&["a", "b"]);
        assert!(homotopy_inverse(&f, wrong, &m, 0).is_err());
    }

    #[test]
    fn conjugator_for_inner_twist() {
        // f = conjugation of φ1 by a: f(x) = a φ1(x) A.
        let phi = Automorphism::new(2, alloc::vec![w("a"), w("ba")]).unwrap().with_inverse(alloc::vec![w("a"), w("bA")]).unwrap();
        let f = rose(&["a", "ab"]);
        let p = conjugator_path(&f, &Marking::rose(2), 0, &phi).unwrap();
        assert_eq!(p.display(f.graph()), "A");
        let p0 = conjugator_path(&rose(&["a", "ba"]), &Marking::rose(2), 0, &phi).unwrap();
        assert!(p0.is_empty());
    }

    #[test]
    fn fix_basepoint_represents_phi() {
        let phi = Automorphism::new(2, alloc::vec![w("a"), w("ba")]).unwrap().with_inverse(alloc::vec![w("a"), w("bA")]).unwrap();
        let f = rose(&["a", "ab"]); // f(b) = a·b = a (ba) A
        let m = Marking::rose(2);
        let p = conjugator_path(&f, &m, 0, &phi).unwrap();
        assert_eq!(p.display(f.graph()), "A");
        let g = rose(&["a", "Ab"]);
        let h = homotopy_inverse(&f, g.clone(), &m, 0).unwrap();
        let fb = fix_basepoint(&f, &g, &h.p[0], &[alloc::vec![0], alloc::vec![1]], &m, 0, &p).unwrap();
        assert_eq!(fb.f.vertex(fb.base), fb.base);
        fb.marking.validate(fb.f.graph(), fb.base, 2).unwrap();
        for x in ["a", "b", "abAB", "bbA"] {
            let word = w(x);
            let lp = fb.marking.mark(fb.f.graph(), &word);
            let img = fb.f.map_tight(&lp);
            assert_eq!(fb.marking.unmark(&img.edges), apply(&phi, &word));
        }
        homotopy_inverse(&fb.f, fb.g.clone(), &fb.marking, fb.base).unwrap();
    }
}
