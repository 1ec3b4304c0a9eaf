//! Relative train tracks bundled with everything the later stages need:
//! filtration, turn table, marking, homotopy inverse, the cancellation areas
//! of every exponential stratum, and the table of computable constants.
//! Also subdivision at exceptional points.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::algebraic::AlgebraicScalar;
use crate::bcc::bcc_constant;
use crate::cancel::{AreaCatalog, StratumView};
use crate::error::{Error, Result};
use crate::filtration::{maximal_filtration, Filtration};
use crate::graph::{inv, is_positive, pair, tighten, EdgeId, EdgePath, Graph};
use crate::map::GraphMap;
use crate::rtt::{conjugator_path, fix_basepoint, homotopy_inverse, validate_rtt, HomotopyData, Marking, TurnTable};
use crate::word::{Automorphism, Word};

/// Tunable bounds for building a train track.
#[derive(Clone, Debug)]
pub struct TrackOptions {
    /// Override for `n_critical` (the derived value is used when absent).
    pub n_critical: Option<usize>,
    /// Length bound for the exhaustive (RTT-ii) check.
    pub rtt2_bound: usize,
    /// Bound on the number of window pairs examined per stratum.
    pub pair_budget: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { n_critical: None, rtt2_bound: 6, pair_budget: 2_000_000 }
    }
}

/// Constants of one exponential stratum.
#[derive(Clone, Debug)]
pub struct StratumConstants {
    /// Stratum index.
    pub r: usize,
    /// Perron–Frobenius eigenvalue.
    pub lambda: AlgebraicScalar,
    /// `n_critical` in use.
    pub n_critical: usize,
    /// `n_critical` implied by the cancellation constant.
    pub n_critical_derived: usize,
    /// `L_critical`.
    pub l_critical: AlgebraicScalar,
    /// Number of oriented edges in the stratum.
    pub m_r: usize,
    /// Number of sequences of `r`-legal paths of total `L_r` at most
    /// `L_critical` (saturated at `u64::MAX`).
    pub n_r: u64,
    /// `M_r = m_r²·n_r²` (saturated).
    pub big_m_r: u64,
    /// Number of cancellation areas found.
    pub area_count: usize,
    /// Number of distinct area endpoints.
    pub endpoint_count: usize,
    /// Whether the area enumeration is certified complete.
    pub complete: bool,
}

/// The constants table.
#[derive(Clone, Debug)]
pub struct Constants {
    /// Bounded cancellation constant.
    pub c_star: usize,
    /// Longest homotopy track `l(p_u)`.
    pub k_star: usize,
    /// Longest side of a cancellation area.
    pub r_star: usize,
    /// Exponent after which all area images are edge paths.
    pub p: usize,
    /// `‖f‖`.
    pub norm_f: usize,
    /// `‖g‖`.
    pub norm_g: usize,
    /// Per exponential stratum.
    pub strata: Vec<StratumConstants>,
}

/// A relative train track representing an automorphism at a fixed base
/// vertex.
#[derive(Clone)]
pub struct TrainTrack {
    /// The map.
    pub f: GraphMap,
    /// Maximal filtration.
    pub filt: Filtration,
    /// Turn legality.
    pub turns: TurnTable,
    /// Base vertex, fixed by `f`.
    pub base: usize,
    /// Marking at the base vertex.
    pub marking: Marking,
    /// Homotopy inverse and its tracks.
    pub homotopy: HomotopyData,
    /// The automorphism induced at the base vertex.
    pub phi: Automorphism,
    /// Constants.
    pub constants: Constants,
    /// Cancellation areas, indexed by stratum (`None` for non-exponential).
    pub areas: Vec<Option<AreaCatalog>>,
    /// Options used.
    pub options: TrackOptions,
}

/// Number of sequences of `r`-legal paths in `H_r` of total length at most
/// `L_critical`, saturating at `cap`.
fn count_legal_sequences(view: &StratumView, cap: u64) -> u64 {
    // Lengths of all nontrivial r-legal paths inside H_r with L_r ≤ L_critical.
    let g = view.f.graph();
    let limit = view.l_critical.approx() + 1e-9;
    let mut lengths: Vec<f64> = Vec::new();
    let mut stack: Vec<(EdgeId, f64)> = Vec::new();
    for e in g.edges().filter(|&e| view.is_r_edge(e)) {
        let l = view.lr_edge(e).approx();
        if l <= limit {
            stack.push((e, l));
        }
    }
    while let Some((last, len)) = stack.pop() {
        lengths.push(len);
        if lengths.len() as u64 > cap {
            return cap;
        }
        for e in g.star(g.omega(last)) {
            if e == inv(last) || !view.is_r_edge(e) || view.illegal_r_turn(inv(last), e) {
                continue;
            }
            let l = len + view.lr_edge(e).approx();
            if l <= limit {
                stack.push((e, l));
            }
        }
    }
    lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // count(b) = 1 + Σ_{ℓ ≤ b} count(b − ℓ); memoised on a coarse grid is
    // unsound, so recurse directly with saturation.
    fn count(b: f64, lengths: &[f64], cap: u64, calls: &mut u64) -> u64 {
        *calls += 1;
        if *calls > 2_000_000 {
            return cap;
        }
        let mut total: u64 = 1;
        for &l in lengths {
            if l > b {
                break;
            }
            total = total.saturating_add(count(b - l, lengths, cap, calls));
            if total >= cap {
                return cap;
            }
        }
        total
    }
    let mut calls = 0;
    count(limit, &lengths, cap, &mut calls)
}

impl TrainTrack {
    /// Validates the data and computes areas and constants.
    pub fn build(
        f: GraphMap,
        filt: Filtration,
        base: usize,
        marking: Marking,
        g: GraphMap,
        phi: Option<Automorphism>,
        options: TrackOptions,
    ) -> Result<Self> {
        if base >= f.graph().vertex_count() || f.vertex(base) != base {
            return Err(Error::Invalid("the base vertex must be fixed by the map".into()));
        }
        if !f.is_tight() || !f.is_nondegenerate() {
            let rep = validate_rtt(&f, &filt, 0);
            return Err(Error::NotATrainTrack(rep.failures.join("; ")));
        }
        let rep = validate_rtt(&f, &filt, options.rtt2_bound);
        if !rep.passed() {
            return Err(Error::NotATrainTrack(rep.failures.join("; ")));
        }
        let rank = marking.loops.len();
        marking.validate(f.graph(), base, rank)?;
        let homotopy = homotopy_inverse(&f, g, &marking, base)?;
        let induced = induced_automorphism(&f, &marking, base)?;
        let phi = match phi {
            Some(p) => {
                if p.images() != induced.images() {
                    return Err(Error::Invalid("the map does not induce the given automorphism at the base".into()));
                }
                p
            }
            None => induced,
        };
        let turns = TurnTable::new(&f);
        let c_star = bcc_constant(&f);
        let mut areas: Vec<Option<AreaCatalog>> = alloc::vec![None; filt.strata().len()];
        let mut strata_consts = Vec::new();
        for r in filt.exponential_strata() {
            let view = StratumView::new(&f, &filt, &turns, r, c_star, options.n_critical)?;
            let cat = view.find_all_areas(options.pair_budget)?;
            let n_r = count_legal_sequences(&view, u64::MAX / 4);
            let m_r = 2 * filt.strata()[r].pairs.len() as u64;
            let big_m_r = m_r.saturating_mul(m_r).saturating_mul(n_r.saturating_mul(n_r));
            strata_consts.push(StratumConstants {
                r,
                lambda: view.lambda.clone(),
                n_critical: view.n_critical,
                n_critical_derived: view.n_critical_derived,
                l_critical: view.l_critical.clone(),
                m_r: m_r as usize,
                n_r,
                big_m_r,
                area_count: cat.areas.len(),
                endpoint_count: cat.endpoint_count(),
                complete: cat.complete,
            });
            areas[r] = Some(cat);
        }
        let k_star = homotopy.p.iter().map(EdgePath::len).max().unwrap_or(0);
        let r_star = areas.iter().flatten().map(AreaCatalog::max_side_len).max().unwrap_or(0);
        let p = strata_consts.iter().map(|s| s.endpoint_count).max().unwrap_or(0);
        let norm_f = f.norm();
        let norm_g = homotopy.g.norm();
        let constants = Constants { c_star, k_star, r_star, p, norm_f, norm_g, strata: strata_consts };
        Ok(TrainTrack { f, filt, turns, base, marking, homotopy, phi, constants, areas, options })
    }

    /// The train track on the rose given by an automorphism with a declared
    /// inverse; fails with `NotATrainTrack` when the rose map is not one.
    pub fn from_automorphism(phi: &Automorphism, options: TrackOptions) -> Result<Self> {
        let psi = phi
            .declared_inverse()
            .ok_or_else(|| Error::Invalid("the automorphism needs a declared inverse".into()))?;
        let f = GraphMap::rose(phi.images());
        let g = GraphMap::rose(psi.images());
        let filt = maximal_filtration(&f)?;
        let marking = Marking::rose(phi.rank());
        Self::build(f, filt, 0, marking, g, Some(phi.clone()), options)
    }

    /// General constructor: if `f` does not fix `base` or does not induce
    /// `phi` there, a new fixed base vertex is attached first.
    pub fn from_parts(
        f: GraphMap,
        strata: Option<Vec<Vec<usize>>>,
        base: usize,
        marking: Marking,
        g: GraphMap,
        phi: Option<Automorphism>,
        options: TrackOptions,
    ) -> Result<Self> {
        let filt = match &strata {
            Some(s) => Filtration::from_strata(&f, s.clone())?,
            None => maximal_filtration(&f)?,
        };
        let needs_fix = f.vertex(base) != base
            || match &phi {
                Some(p) => induced_automorphism(&f, &marking, base).map(|a| a.images() != p.images()).unwrap_or(true),
                None => false,
            };
        if !needs_fix {
            return Self::build(f, filt, base, marking, g, phi, options);
        }
        let phi = phi.ok_or_else(|| {
            Error::Invalid("the base vertex is not fixed; the automorphism is needed to fix it".into())
        })?;
        let p = conjugator_path(&f, &marking, base, &phi)?;
        let h = homotopy_inverse(&f, g.clone(), &marking, base)?;
        let strata_pairs: Vec<Vec<usize>> = filt.strata().iter().map(|s| s.pairs.clone()).collect();
        let fixed = fix_basepoint(&f, &g, &h.p[base], &strata_pairs, &marking, base, &p)?;
        let filt = Filtration::from_strata(&fixed.f, fixed.strata.clone())?;
        Self::build(fixed.f, filt, fixed.base, fixed.marking, fixed.g, Some(phi), options)
    }

    /// The graph.
    pub fn graph(&self) -> &Graph {
        self.f.graph()
    }

    /// View of exponential stratum `r`.
    pub fn view(&self, r: usize) -> Result<StratumView<'_>> {
        StratumView::new(&self.f, &self.filt, &self.turns, r, self.constants.c_star, self.options.n_critical)
    }

    /// Area catalog of stratum `r`.
    pub fn catalog(&self, r: usize) -> Option<&AreaCatalog> {
        self.areas.get(r).and_then(Option::as_ref)
    }

    /// True when some area enumeration ran with an insufficient bound or was
    /// truncated.
    pub fn areas_incomplete(&self) -> bool {
        self.constants.strata.iter().any(|s| !s.complete)
    }
}

/// The automorphism `γ ↦ [f(γ)]` induced at a fixed base vertex.
pub fn induced_automorphism(f: &GraphMap, marking: &Marking, base: usize) -> Result<Automorphism> {
    if f.vertex(base) != base {
        return Err(Error::Invalid("the base vertex is not fixed".into()));
    }
    let images: Vec<Word> = marking.loops.iter().map(|lp| marking.unmark(&f.map_tight(lp).edges)).collect();
    Automorphism::new(marking.loops.len(), images)
}

/// An exceptional point: a position (in `L_r`, measured from the start of
/// the positive edge) on the positive edge of `pair`.
#[derive(Clone, Debug)]
pub struct ExceptionalPoint {
    /// Stratum.
    pub r: usize,
    /// Edge pair.
    pub pair: usize,
    /// `L_r` offset from the start of the positive edge.
    pub offset: AlgebraicScalar,
}

/// Endpoints of cancellation areas of stratum `r` whose forward orbit never
/// reaches a vertex.
pub fn exceptional_points(tt: &TrainTrack, r: usize) -> Result<Vec<ExceptionalPoint>> {
    let cat = match tt.catalog(r) {
        Some(c) => c,
        None => return Ok(Vec::new()),
    };
    let view = tt.view(r)?;
    let mut out: Vec<ExceptionalPoint> = Vec::new();
    for (i, a) in cat.areas.iter().enumerate() {
        for side_q in [false, true] {
            if !cat.is_exceptional_endpoint(i, side_q) {
                continue;
            }
            let side = if side_q { &a.q } else { &a.p };
            let e = *side.edges.last().unwrap();
            let offset = if is_positive(e) { side.last_offset.clone() } else { view.lr_edge(e) - &side.last_offset };
            let k = pair(e);
            if !out.iter().any(|x| x.pair == k && x.offset == offset) {
                out.push(ExceptionalPoint { r, pair: k, offset });
            }
        }
    }
    out.sort_by(|a, b| a.pair.cmp(&b.pair).then_with(|| a.offset.cmp_exact(&b.offset)));
    Ok(out)
}

/// True iff for every exponential stratum and every area `A`, the area
/// `[f^P(A)]` is an edge path.
pub fn rtt_iv_holds(tt: &TrainTrack) -> bool {
    let p = tt.constants.p;
    tt.areas.iter().flatten().all(|cat| {
        (0..cat.areas.len()).all(|i| cat.areas[cat.follow(i, false, p).0].is_edge_path())
    })
}

/// One oriented piece of an expanded old edge: the new edge and its `L_r`
/// length (zero outside subdivided strata).
struct Piece {
    edge: EdgeId,
    len: AlgebraicScalar,
}

/// Subdivides at all exceptional points of all exponential strata.  Returns
/// the input unchanged (cloned) when there are none.
pub fn subdivide_at_exceptional(tt: &TrainTrack) -> Result<TrainTrack> {
    let mut points: Vec<ExceptionalPoint> = Vec::new();
    for r in tt.filt.exponential_strata() {
        points.extend(exceptional_points(tt, r)?);
    }
    if points.is_empty() {
        return Ok(tt.clone());
    }
    let old = tt.graph();
    let np = old.pair_count();
    // Cut positions per old pair.
    let mut cuts: Vec<Vec<AlgebraicScalar>> = alloc::vec![Vec::new(); np];
    let mut stratum_of_pair: Vec<Option<usize>> = alloc::vec![None; np];
    for p in &points {
        cuts[p.pair].push(p.offset.clone());
        stratum_of_pair[p.pair] = Some(p.r);
    }
    // New graph: old vertices, then one vertex per cut; old pair k becomes
    // pairs first_new[k] .. first_new[k] + cuts[k].len().
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut first_new: Vec<usize> = Vec::with_capacity(np);
    let mut cut_vertex: Vec<Vec<usize>> = Vec::with_capacity(np);
    let mut vcount = old.vertex_count();
    for k in 0..np {
        let e = 2 * k as EdgeId;
        first_new.push(ends.len());
        let m = cuts[k].len();
        let verts: Vec<usize> = (0..m).map(|i| vcount + i).collect();
        vcount += m;
        let mut chain = alloc::vec![old.alpha(e)];
        chain.extend_from_slice(&verts);
        chain.push(old.omega(e));
        for i in 0..=m {
            ends.push((chain[i], chain[i + 1]));
            names.push(if m == 0 { old.names()[k].clone() } else { sub_name(old, &names, &old.names()[k], i + 1) });
        }
        cut_vertex.push(verts);
    }
    let graph = Graph::new(vcount, ends, names)?;
    // L_r lengths of new positive edges.
    let lr_of_old = |k: usize| -> Option<AlgebraicScalar> {
        stratum_of_pair[k].map(|r| tt.filt.lr_edge(r, 2 * k as EdgeId))
    };
    let mut sub_lengths: Vec<Vec<AlgebraicScalar>> = Vec::with_capacity(np);
    for k in 0..np {
        match lr_of_old(k) {
            None => sub_lengths.push(Vec::new()),
            Some(total) => {
                let mut v = Vec::new();
                let mut prev = AlgebraicScalar::zero(total.field());
                for c in &cuts[k] {
                    v.push(c - &prev);
                    prev = c.clone();
                }
                v.push(&total - &prev);
                sub_lengths.push(v);
            }
        }
    }
    // Expansion of an old oriented edge into new oriented edges.
    let expand = |e: EdgeId, r: Option<usize>| -> Vec<Piece> {
        let k = pair(e);
        let m = cuts[k].len();
        let mut out: Vec<Piece> = (0..=m)
            .map(|i| {
                let len = match (r, stratum_of_pair[k]) {
                    (Some(r), Some(rk)) if r == rk => sub_lengths[k][i].clone(),
                    (Some(r), _) => {
                        // Unsubdivided edge: its full L_r length.
                        let field = tt.filt.strata()[r].pf.as_ref().unwrap().field.clone();
                        if tt.filt.stratum_of(e) == r {
                            tt.filt.lr_edge(r, e)
                        } else {
                            AlgebraicScalar::zero(&field)
                        }
                    }
                    (None, _) => unreachable!(),
                };
                Piece { edge: 2 * (first_new[k] + i) as EdgeId, len }
            })
            .collect();
        if !is_positive(e) {
            out.reverse();
            for p in &mut out {
                p.edge = inv(p.edge);
            }
        }
        out
    };
    let expand_plain = |edges: &[EdgeId]| -> Vec<EdgeId> {
        let mut out = Vec::new();
        for &e in edges {
            let k = pair(e);
            let m = cuts[k].len();
            let mut seq: Vec<EdgeId> = (0..=m).map(|i| 2 * (first_new[k] + i) as EdgeId).collect();
            if !is_positive(e) {
                seq.reverse();
                for x in &mut seq {
                    *x = inv(*x);
                }
            }
            out.extend(seq);
        }
        out
    };
    // Vertex map and images of f′.
    let f = &tt.f;
    let mut vmap: Vec<usize> = (0..vcount).map(|v| if v < old.vertex_count() { f.vertex(v) } else { usize::MAX }).collect();
    let mut images: Vec<Vec<EdgeId>> = alloc::vec![Vec::new(); graph.pair_count()];
    for k in 0..np {
        let e = 2 * k as EdgeId;
        let m = cuts[k].len();
        if m == 0 {
            images[first_new[k]] = expand_plain(&f.image(e));
            continue;
        }
        let r = stratum_of_pair[k].unwrap();
        let lambda = &tt.filt.strata()[r].pf.as_ref().unwrap().lambda;
        let mut pieces: Vec<Piece> = Vec::new();
        for x in f.image(e) {
            pieces.extend(expand(x, Some(r)));
        }
        // Boundary positions of the image pieces.
        let mut bounds: Vec<AlgebraicScalar> = alloc::vec![AlgebraicScalar::zero(lambda.field())];
        for p in &pieces {
            let next = bounds.last().unwrap() + &p.len;
            bounds.push(next);
        }
        let mut idx = alloc::vec![0usize];
        for c in &cuts[k] {
            let target = lambda * c;
            let pos = bounds
                .iter()
                .position(|b| {
                    (b.approx() - target.approx()).abs() < 1e-6 * (1.0 + target.approx()) && *b == target
                })
                .ok_or_else(|| Error::Internal("exceptional points are not mapped to exceptional points".into()))?;
            idx.push(pos);
        }
        idx.push(pieces.len());
        let mut start_vertex = f.vertex(old.alpha(e));
        for i in 0..=m {
            let seq: Vec<EdgeId> = pieces[idx[i]..idx[i + 1]].iter().map(|p| p.edge).collect();
            if seq.is_empty() {
                return Err(Error::Internal("a subdivided edge would have a trivial image".into()));
            }
            images[first_new[k] + i] = seq.clone();
            let end = EdgePath { start: start_vertex, edges: seq }.end(&graph);
            if i < m {
                vmap[cut_vertex[k][i]] = end;
            }
            start_vertex = end;
        }
    }
    // Subdivision images may start at vertices not yet known; they were all
    // set while processing their own edge.
    if vmap.iter().any(|&v| v == usize::MAX) {
        return Err(Error::Internal("vertex map of the subdivision is incomplete".into()));
    }
    let f1 = GraphMap::new(graph.clone(), vmap, images, None)?;
    // Homotopy inverse: first piece ↦ g(E), the others ↦ trivial.
    let g = &tt.homotopy.g;
    let mut gvmap: Vec<usize> = (0..vcount).map(|v| if v < old.vertex_count() { g.vertex(v) } else { 0 }).collect();
    let mut gimages: Vec<Vec<EdgeId>> = alloc::vec![Vec::new(); graph.pair_count()];
    for k in 0..np {
        let e = 2 * k as EdgeId;
        gimages[first_new[k]] = expand_plain(&g.image(e));
        for &v in &cut_vertex[k] {
            gvmap[v] = g.vertex(old.omega(e));
        }
    }
    let g1 = GraphMap::new(graph.clone(), gvmap, gimages, None)?;
    let loops = tt
        .marking
        .loops
        .iter()
        .map(|lp| EdgePath { start: lp.start, edges: expand_plain(&lp.edges) })
        .collect();
    let mut edge_words = alloc::vec![Word::empty(); graph.pair_count()];
    for k in 0..np {
        edge_words[first_new[k]] = tt.marking.edge_words[k].clone();
    }
    let marking = Marking { loops, edge_words };
    let filt = maximal_filtration(&f1)?;
    TrainTrack::build(f1, filt, tt.base, marking, g1, Some(tt.phi.clone()), tt.options.clone())
}

fn sub_name(old: &Graph, taken: &[String], base: &str, i: usize) -> String {
    let mut s = alloc::format!("{}{}", base, i);
    while old.names().iter().any(|n| *n == s) || taken.iter().any(|n| *n == s) {
        s.push('_');
    }
    s
}

/// Tightened image `[f^k(p)]`.
pub fn iterate(tt: &TrainTrack, p: &EdgePath, k: usize) -> EdgePath {
    tt.f.iterate_tight(&tighten(p), k)
}

/// Orders two scalars exactly.
pub fn cmp(a: &AlgebraicScalar, b: &AlgebraicScalar) -> Ordering {
    a.cmp_exact(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{parse_word, Automorphism};

    fn auto(imgs: &[&str], inv: &[&str]) -> Automorphism {
        let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
        Automorphism::new(imgs.len(), w(imgs)).unwrap().with_inverse(w(inv)).unwrap()
    }

    #[test]
    fn fibonacci_track() {
        let phi = auto(&["ab", "a"], &["b", "Ba"]);
        let tt = TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap();
        assert_eq!(tt.constants.strata.len(), 1);
        assert_eq!(tt.constants.k_star, 0);
        let s = &tt.constants.strata[0];
        assert!(s.complete);
        assert!(s.area_count as u64 <= s.big_m_r);
        assert!(exceptional_points(&tt, 0).unwrap().is_empty());
    }

    #[test]
    fn polynomial_track() {
        let phi = auto(&["a", "ba"], &["a", "bA"]);
        let tt = TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap();
        assert!(tt.constants.strata.is_empty());
        assert_eq!(tt.filt.strata().len(), 2);
    }

    #[test]
    fn non_train_track_rose_is_rejected() {
        // a ↦ aba⁻¹ ... the rose map of an inner-ish automorphism with cancellation.
        let phi = auto(&["b", "ab"], &["bA", "a"]);
        match TrainTrack::from_automorphism(&phi, TrackOptions::default()) {
            Ok(_) | Err(Error::NotATrainTrack(_)) => {}
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }
}
