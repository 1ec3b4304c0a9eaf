//! Finiteness and membership for `μ`-subgraphs.
//!
//! Walking `f̂` from `μ` either ends (a dead vertex or a cycle) or reaches a
//! *perfect* vertex `v` of the top stratum `H_r` of the current vertex:
//!
//! * **r-perfect** (`H_r` exponential): `v` is an `r`-legal path in `G_r`
//!   starting with an edge of `H_r`, and `v·[f(v)]` is reduced with a legal
//!   junction turn.  The walk from `v` passes through every `[f^i(v)]` and
//!   `L_r` never decreases along it, so the subgraph is infinite and
//!   membership is decided by an `L_r` cutoff.
//! * **A-perfect** (`H_r` exponential): every cancellation point of `v` is
//!   non-deletable with an edge-path area, the A-decomposition
//!   `A_1 b_1 … A_k b_k` starts with an area, and the junction condition
//!   holds.  The walk passes through the family
//!   `τ_{i,j} = [f^i(τ_{0,j})]`, `τ_{0,j} = [A_j b_j … A_k b_k · f(A_1 b_1 … A_{j−1} b_{j−1})]`,
//!   and these are its only A-perfect vertices.
//! * **E-perfect** (`H_r` polynomial): `v` starts with an edge of `H_r` and
//!   `f̂` preserves the number of `H_r` edges.  The walk passes through
//!   `μ_{t,j} = [c̄_{t,E_j} f^t(μ_{0,j}) f(c_{t,E_j})]`, where `E_j` is the
//!   `j`-th `H_r` edge of `v`, `μ_{0,j}` rotates `v` to start at `E_j`, and
//!   `c_{t,E}` is the prefix of `[f^t(E)]` before its unique `H_r` edge.
//!
//! Vertices whose top stratum is a zero stratum drop to a lower stratum
//! within `l(μ)` steps, so the walk simply continues.  Every perfect vertex
//! is checked by replaying the walk until it reaches the next family point;
//! vertices failing the replay are skipped.
//!
//! Once a perfect vertex is known, finiteness is the question whether the
//! family's generating orbit is eventually periodic, and membership of `τ`
//! walks `τ` forward to the first family point `w` (within `l(τ)` steps),
//! locates `w` in the family with orbit queries and finally replays the
//! walk segment between the preceding family point and `w`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::algebraic::AlgebraicScalar;
use crate::cancel::{Piece, StratumView};
use crate::df::{is_dead, is_f_path, MuCursor, Walk, WalkEnd};
use crate::error::{Error, Result};
use crate::filtration::StratumClass;
use crate::graph::{inv, tighten, tighten_edges, EdgeId, EdgePath};
use crate::orbit::{Certificate, OrbitAnswer, OrbitFate, OrbitSolver, TwistedMap, DEFAULT_HORIZON};
use crate::track::TrainTrack;

/// Kind of a perfect vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerfectKind {
    /// r-perfect vertex of an exponential stratum.
    RPerfect,
    /// A-perfect vertex of an exponential stratum.
    APerfect,
    /// E-perfect vertex of a polynomial stratum.
    EPerfect,
}

/// A perfect vertex found on a walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectWitness {
    /// The vertex.
    pub vertex: EdgePath,
    /// Its kind.
    pub kind: PerfectKind,
    /// Number of `f̂` steps from the query vertex.
    pub step: usize,
    /// Its top stratum.
    pub stratum: usize,
}

/// Result of scanning a walk for a perfect vertex.
#[derive(Clone, Debug)]
pub enum Scan {
    /// The walk ended; all of its vertices are listed.
    Finite(Walk),
    /// A perfect vertex, together with the vertices visited before it.
    Perfect {
        /// Vertices strictly before the witness.
        prefix: Vec<EdgePath>,
        /// The witness.
        witness: PerfectWitness,
    },
}

/// Why a `μ`-subgraph is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteReason {
    /// The walk reaches an r-perfect vertex.
    RPerfect(PerfectWitness),
    /// The walk reaches a perfect vertex whose family orbit is unbounded.
    Family(PerfectWitness, Certificate),
}

/// Answer of [`Solver::finiteness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finiteness {
    /// All vertices of the subgraph, in walk order.
    Finite(Vec<EdgePath>),
    /// The subgraph is infinite.
    Infinite(InfiniteReason),
}

impl Finiteness {
    /// True for [`Finiteness::Finite`].
    pub fn is_finite(&self) -> bool {
        matches!(self, Finiteness::Finite(_))
    }
}

/// Default cap on the number of `f̂` steps of a single walk.
pub const DEFAULT_WALK_CAP: usize = 2_000_000;

/// Finiteness and membership decisions for a train track.
pub struct Solver<'a> {
    tt: &'a TrainTrack,
    orbit: OrbitSolver<'a>,
    views: Vec<Option<StratumView<'a>>>,
    /// Bound on scanning steps and orbit iterations.
    pub horizon: usize,
    /// Bound on the length of replayed walks.
    pub walk_cap: usize,
}

/// The family of distinguished vertices of an A- or E-perfect vertex.
#[derive(Clone, Debug)]
pub struct Family {
    kind: PerfectKind,
    stratum: usize,
    /// `τ_{0,j}` resp. `μ_{0,j}`.
    starts: Vec<EdgePath>,
    /// For E-families: the `H_r` edge `E_j` starting each `μ_{0,j}` and the
    /// length of its orbit under the stratum permutation.
    heads: Vec<(EdgeId, usize)>,
}

impl Family {
    /// Number of family points per generation.
    pub fn width(&self) -> usize {
        self.starts.len()
    }

    /// `τ_{0,j}` resp. `μ_{0,j}`.
    pub fn starts(&self) -> &[EdgePath] {
        &self.starts
    }
}

impl<'a> Solver<'a> {
    /// Solver for a train track with the default horizon.
    pub fn new(tt: &'a TrainTrack) -> Result<Self> {
        let mut views: Vec<Option<StratumView<'a>>> = (0..tt.filt.strata().len()).map(|_| None).collect();
        for r in tt.filt.exponential_strata() {
            views[r] = Some(tt.view(r)?);
        }
        Ok(Solver { tt, orbit: OrbitSolver::new(tt), views, horizon: DEFAULT_HORIZON, walk_cap: DEFAULT_WALK_CAP })
    }

    /// Sets the horizon.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    /// The orbit backend.
    pub fn orbit(&self) -> &OrbitSolver<'a> {
        &self.orbit
    }

    fn unknown(&self, what: String) -> Error {
        Error::OrbitUnknown { query: what, horizon: self.horizon }
    }

    fn label(&self, p: &EdgePath) -> String {
        p.display(self.tt.graph())
    }

    fn class(&self, r: usize) -> StratumClass {
        self.tt.filt.strata()[r].class
    }

    fn is_r_edge(&self, e: EdgeId, r: usize) -> bool {
        self.tt.filt.stratum_of(e) == r
    }

    /// `v·[f(v)]` is reduced and its junction turn is legal (or mixed).
    fn junction_ok(&self, v: &EdgePath, r: usize) -> bool {
        let Some(last) = v.last() else { return false };
        let fv = self.tt.f.map_tight(v);
        let Some(first) = fv.first() else { return false };
        if first == inv(last) {
            return false;
        }
        !(self.is_r_edge(last, r) && self.is_r_edge(first, r)) || self.tt.turns.is_legal(inv(last), first)
    }

    /// Whether `v` is r-perfect for its top stratum `r`.
    pub fn is_r_perfect(&self, v: &EdgePath, r: usize) -> bool {
        self.class(r) == StratumClass::Exponential
            && self.tt.filt.height(&v.edges) == Some(r)
            && self.is_r_edge(v.edges[0], r)
            && crate::rtt::is_r_legal(&self.tt.turns, &self.tt.filt, r, &v.edges)
            && self.junction_ok(v, r)
    }

    /// Start indices of the areas of an A-decomposition that begins with an
    /// area, when `v` is A-perfect for stratum `r`.
    fn a_splits(&self, v: &EdgePath, r: usize) -> Option<Vec<usize>> {
        if self.class(r) != StratumClass::Exponential || self.tt.filt.height(&v.edges) != Some(r) {
            return None;
        }
        if !self.junction_ok(v, r) {
            return None;
        }
        let view = self.views[r].as_ref()?;
        if !view.stable_with_edge_areas(v).ok()? {
            return None;
        }
        let pieces = view.a_decomposition(v).ok()?;
        let starts: Vec<usize> = pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Area(range) => Some(range.start),
                Piece::Legal(_) => None,
            })
            .collect();
        match pieces.first() {
            Some(Piece::Area(range)) if range.start == 0 => Some(starts),
            _ => None,
        }
    }

    /// Whether `v` is A-perfect for stratum `r`.
    pub fn is_a_perfect(&self, v: &EdgePath, r: usize) -> bool {
        self.a_splits(v, r).is_some()
    }

    /// Number of `H_r` edges of a path.
    fn count_r(&self, v: &EdgePath, r: usize) -> usize {
        v.edges.iter().filter(|&&e| self.is_r_edge(e, r)).count()
    }

    /// Whether `v` is E-perfect for stratum `r`.
    pub fn is_e_perfect(&self, v: &EdgePath, r: usize) -> bool {
        if self.class(r) != StratumClass::Polynomial || self.tt.filt.height(&v.edges) != Some(r) {
            return false;
        }
        if !self.is_r_edge(v.edges[0], r) {
            return false;
        }
        match crate::df::hat_f(&self.tt.f, v) {
            Some(w) => self.count_r(&w, r) == self.count_r(v, r),
            None => false,
        }
    }

    /// Starts of the family of a perfect vertex, given the split indices.
    fn family_starts(&self, v: &EdgePath, splits: &[usize]) -> Vec<EdgePath> {
        let g = self.tt.graph();
        splits
            .iter()
            .map(|&s| {
                let head = v.sub(g, 0, s);
                let fh = self.tt.f.map_path(&head);
                tighten_edges(
                    if s < v.len() { g.alpha(v.edges[s]) } else { v.end(g) },
                    v.edges[s..].iter().copied().chain(fh.edges.iter().copied()),
                )
            })
            .collect()
    }

    /// Unique `H_r` edge of `[f(E)]` for `E` in a polynomial stratum.
    fn sigma(&self, e: EdgeId, r: usize) -> EdgeId {
        let img = self.tt.f.map_tight(&EdgePath::edge(self.tt.graph(), e));
        img.edges.iter().copied().find(|&x| self.is_r_edge(x, r)).expect("polynomial strata permute their edges")
    }

    /// `c_{t,E}`: the prefix of `[f^t(E)]` before its `H_r` edge, and that edge.
    pub fn c_path(&self, e: EdgeId, t: usize, r: usize) -> (EdgePath, EdgeId) {
        let g = self.tt.graph();
        let img = self.tt.f.iterate_tight(&EdgePath::edge(g, e), t);
        let i = img.edges.iter().position(|&x| self.is_r_edge(x, r)).expect("polynomial strata permute their edges");
        (img.sub(g, 0, i), img.edges[i])
    }

    /// The family of an A- or E-perfect vertex, or `None` if `v` is neither
    /// or fails the replay check.
    pub fn family(&self, v: &EdgePath, kind: PerfectKind, r: usize) -> Option<Family> {
        let (splits, heads) = match kind {
            PerfectKind::APerfect => (self.a_splits(v, r)?, Vec::new()),
            PerfectKind::EPerfect => {
                if !self.is_e_perfect(v, r) {
                    return None;
                }
                let splits: Vec<usize> = (0..v.len()).filter(|&i| self.is_r_edge(v.edges[i], r)).collect();
                let heads = splits
                    .iter()
                    .map(|&i| {
                        let e = v.edges[i];
                        let mut p = 1;
                        let mut x = self.sigma(e, r);
                        while x != e {
                            x = self.sigma(x, r);
                            p += 1;
                        }
                        (e, p)
                    })
                    .collect();
                (splits, heads)
            }
            PerfectKind::RPerfect => return None,
        };
        let fam = Family { kind, stratum: r, starts: self.family_starts(v, &splits), heads };
        // Replay: the walk visits τ_{0,2}, …, τ_{0,k}, then the first point
        // of the next generation.
        let mut targets: Vec<EdgePath> = fam.starts[1..].to_vec();
        targets.push(self.point(&fam, 1, 0));
        let budget = 4 * (v.len() + targets.last().map_or(0, EdgePath::len)) + 16;
        let mut c = MuCursor::new(&self.tt.f, v.clone());
        let mut next = 0;
        for _ in 0..budget {
            if !c.advance() {
                return None;
            }
            if *c.current() == targets[next] {
                next += 1;
                if next == targets.len() {
                    return Some(fam);
                }
            }
        }
        None
    }

    /// The family point with indices `(t, j)` (`j` zero-based).
    pub fn point(&self, fam: &Family, t: usize, j: usize) -> EdgePath {
        let f = &self.tt.f;
        let g = self.tt.graph();
        match fam.kind {
            PerfectKind::EPerfect => {
                let (e, _) = fam.heads[j];
                let mut x = tighten(&fam.starts[j]);
                let mut c = EdgePath::trivial(g.alpha(e));
                let mut cur = e;
                for _ in 0..t {
                    x = f.map_tight(&x);
                    let (c1, next) = self.c_path(cur, 1, fam.stratum);
                    c = tighten(&f.map_path(&c).concat(g, &c1));
                    cur = next;
                }
                let fc = f.map_path(&c);
                let ci = c.inverse(g);
                tighten_edges(ci.start, ci.edges.iter().chain(x.edges.iter()).chain(fc.edges.iter()).copied())
            }
            _ => f.iterate_tight(&fam.starts[j], t),
        }
    }

    /// Twisted map advancing `μ_{i,j}` to `μ_{i+p,j}` for E-families (plain
    /// `f` for A-families), with its step `p`.
    fn family_map(&self, fam: &Family, i: usize, j: usize) -> (TwistedMap, usize) {
        match fam.kind {
            PerfectKind::EPerfect => {
                let g = self.tt.graph();
                let (e, p) = fam.heads[j];
                let (_, ei) = self.c_path(e, i, fam.stratum);
                let (c, _) = self.c_path(ei, p, fam.stratum);
                let pre = c.inverse(g);
                let post = self.tt.f.map_tight(&c);
                (TwistedMap::new(p, pre, post), p)
            }
            _ => (TwistedMap::plain(), 1),
        }
    }

    /// Whether the family repeats: `Periodic` exactly when the subgraph is
    /// finite.
    fn family_fate(&self, fam: &Family) -> OrbitFate {
        let (t, _) = self.family_map(fam, 0, 0);
        self.orbit.fate(&t, &fam.starts[0], self.horizon)
    }

    /// Whether `w` is a family point (the cheap structural test).
    fn looks_like_point(&self, fam: &Family, w: &EdgePath) -> bool {
        match fam.kind {
            PerfectKind::APerfect => self.is_a_perfect(w, fam.stratum),
            PerfectKind::EPerfect => w.first().is_some_and(|e| self.is_r_edge(e, fam.stratum)),
            PerfectKind::RPerfect => false,
        }
    }

    /// Indices `(t, j)` of `w` in an infinite family.
    fn locate(&self, fam: &Family, w: &EdgePath) -> Result<Option<(usize, usize)>> {
        let mut unknown = None;
        for j in 0..fam.width() {
            let p = match fam.kind {
                PerfectKind::EPerfect => fam.heads[j].1,
                _ => 1,
            };
            for i in 0..p {
                let (map, step) = self.family_map(fam, i, j);
                let x = self.point(fam, i, j);
                match self.orbit.backend_decide(&map, &x, w, self.horizon) {
                    OrbitAnswer::Yes(n) => return Ok(Some((i + n * step, j))),
                    OrbitAnswer::Unknown(_) => unknown = Some(x),
                    _ => {}
                }
            }
        }
        match unknown {
            Some(x) => {
                Err(self.unknown(format!("is {} in the family orbit of {}?", self.label(w), self.label(&x))))
            }
            None => Ok(None),
        }
    }

    /// Scans the walk from `μ` for a perfect vertex.
    pub fn find_perfect(&self, mu: &EdgePath) -> Result<Scan> {
        let mu = tighten(mu);
        let mut c = MuCursor::new(&self.tt.f, mu.clone());
        let mut prefix: Vec<EdgePath> = Vec::new();
        loop {
            let v = c.current().clone();
            if let Some(r) = self.tt.filt.height(&v.edges) {
                let kind = match self.class(r) {
                    StratumClass::Exponential => {
                        if self.is_r_perfect(&v, r) && self.replays_to_image(&v) {
                            Some(PerfectKind::RPerfect)
                        } else if self.family(&v, PerfectKind::APerfect, r).is_some() {
                            Some(PerfectKind::APerfect)
                        } else {
                            None
                        }
                    }
                    StratumClass::Polynomial => {
                        self.family(&v, PerfectKind::EPerfect, r).map(|_| PerfectKind::EPerfect)
                    }
                    StratumClass::Zero => None,
                };
                if let Some(kind) = kind {
                    let step = c.index();
                    return Ok(Scan::Perfect { prefix, witness: PerfectWitness { vertex: v, kind, step, stratum: r } });
                }
            }
            if c.index() >= self.horizon {
                return Err(Error::BoundExhausted(format!(
                    "no perfect vertex within {} steps of {}",
                    self.horizon,
                    self.label(&mu)
                )));
            }
            let advanced = c.advance();
            prefix.push(v);
            match c.ended() {
                None => {}
                Some(WalkEnd::Dead(_)) if advanced => {
                    prefix.push(c.current().clone());
                    return Ok(Scan::Finite(Walk { vertices: prefix, end: c.ended().cloned() }));
                }
                Some(_) => return Ok(Scan::Finite(Walk { vertices: prefix, end: c.ended().cloned() })),
            }
        }
    }

    /// The walk from an r-perfect `v` reaches `[f(v)]`.
    fn replays_to_image(&self, v: &EdgePath) -> bool {
        let fv = self.tt.f.map_tight(v);
        let budget = 4 * (v.len() + fv.len()) + 16;
        let mut c = MuCursor::new(&self.tt.f, v.clone());
        for _ in 0..budget {
            if !c.advance() {
                return false;
            }
            if *c.current() == fv {
                return true;
            }
        }
        false
    }

    /// All vertices of a walk known to be finite.
    fn enumerate(&self, v: &EdgePath) -> Result<Vec<EdgePath>> {
        let mut c = MuCursor::new(&self.tt.f, v.clone());
        let mut out = alloc::vec![v.clone()];
        while c.advance() {
            if matches!(c.ended(), Some(WalkEnd::Cycle { .. })) {
                break;
            }
            out.push(c.current().clone());
            if out.len() > self.walk_cap {
                return Err(Error::BoundExhausted(format!("walk from {} exceeds the walk cap", self.label(v))));
            }
        }
        Ok(out)
    }

    /// Decides whether the `μ`-subgraph is finite; finite answers list all
    /// vertices in walk order.
    pub fn finiteness(&self, mu: &EdgePath) -> Result<Finiteness> {
        self.check_f_path(mu)?;
        match self.find_perfect(mu)? {
            Scan::Finite(w) => Ok(Finiteness::Finite(w.vertices)),
            Scan::Perfect { mut prefix, witness } => match witness.kind {
                PerfectKind::RPerfect => Ok(Finiteness::Infinite(InfiniteReason::RPerfect(witness))),
                kind => {
                    let fam = self
                        .family(&witness.vertex, kind, witness.stratum)
                        .ok_or_else(|| Error::Internal("perfect vertex lost its family".into()))?;
                    match self.family_fate(&fam) {
                        OrbitFate::Periodic { .. } => {
                            prefix.extend(self.enumerate(&witness.vertex)?);
                            Ok(Finiteness::Finite(prefix))
                        }
                        OrbitFate::Unbounded(cert) => Ok(Finiteness::Infinite(InfiniteReason::Family(witness, cert))),
                        OrbitFate::Unknown(_) => Err(self.unknown(format!(
                            "is the family orbit of {} finite?",
                            self.label(&witness.vertex)
                        ))),
                    }
                }
            },
        }
    }

    fn check_f_path(&self, mu: &EdgePath) -> Result<()> {
        if mu.validate(self.tt.graph()).is_err() || !is_f_path(&self.tt.f, &tighten(mu)) {
            return Err(Error::Invalid(format!("{} is not an f-path", self.label(mu))));
        }
        Ok(())
    }

    /// Decides whether `τ` lies in the `μ`-subgraph.
    pub fn membership(&self, mu: &EdgePath, tau: &EdgePath) -> Result<bool> {
        self.check_f_path(mu)?;
        let tau = tighten(tau);
        if tau.validate(self.tt.graph()).is_err() || !is_f_path(&self.tt.f, &tau) {
            return Ok(false);
        }
        match self.find_perfect(mu)? {
            Scan::Finite(w) => Ok(w.vertices.contains(&tau)),
            Scan::Perfect { prefix, witness } => {
                if prefix.contains(&tau) || witness.vertex == tau {
                    return Ok(true);
                }
                self.member_beyond(&witness, &tau)
            }
        }
    }

    /// Membership in the subgraph of a perfect vertex `v ≠ τ`.
    fn member_beyond(&self, witness: &PerfectWitness, tau: &EdgePath) -> Result<bool> {
        let v = &witness.vertex;
        let r = witness.stratum;
        if witness.kind == PerfectKind::RPerfect {
            return self.member_by_cutoff(v, r, tau);
        }
        let fam = self
            .family(v, witness.kind, r)
            .ok_or_else(|| Error::Internal("perfect vertex lost its family".into()))?;
        match self.family_fate(&fam) {
            OrbitFate::Periodic { .. } => return Ok(self.enumerate(v)?.contains(tau)),
            OrbitFate::Unknown(_) => {
                return Err(self.unknown(format!("is the family orbit of {} finite?", self.label(v))));
            }
            OrbitFate::Unbounded(_) => {}
        }
        if self.tt.filt.height(&tau.edges).map_or(true, |h| h > r) {
            // The walk from v stays in G_r and never dies.
            return Ok(false);
        }
        // Walk τ to the first family point.
        let mut c = MuCursor::new(&self.tt.f, tau.clone());
        let mut w = None;
        for _ in 0..=tau.len() {
            if self.looks_like_point(&fam, c.current()) {
                w = Some(c.current().clone());
                break;
            }
            if !c.advance() || matches!(c.ended(), Some(WalkEnd::Cycle { .. }) | Some(WalkEnd::Dead(_))) {
                // A finite walk is not the tail of an infinite one.
                return Ok(false);
            }
        }
        let Some(w) = w else { return Ok(false) };
        let Some((t, j)) = self.locate(&fam, &w)? else { return Ok(false) };
        let prev = match (t, j) {
            (0, 0) => return Ok(false),
            (t, 0) => self.point(&fam, t - 1, fam.width() - 1),
            (t, j) => self.point(&fam, t, j - 1),
        };
        let mut c = MuCursor::new(&self.tt.f, prev);
        for _ in 0..self.walk_cap {
            if *c.current() == *tau {
                return Ok(true);
            }
            if *c.current() == w || !c.advance() {
                return Ok(false);
            }
        }
        Err(Error::BoundExhausted("walk between family points exceeds the walk cap".into()))
    }

    /// Membership beyond an r-perfect vertex: `L_r` never decreases along
    /// the walk and grows without bound.
    fn member_by_cutoff(&self, v: &EdgePath, r: usize, tau: &EdgePath) -> Result<bool> {
        let filt = &self.tt.filt;
        if is_dead(tau) || filt.height(&tau.edges).map_or(true, |h| h > r) {
            return Ok(false);
        }
        let lr = |p: &EdgePath| -> AlgebraicScalar {
            filt.lr_edges(r, &p.edges).expect("the walk stays in G_r")
        };
        let target = lr(tau);
        let mut c = MuCursor::new(&self.tt.f, v.clone());
        let mut last = lr(v);
        for _ in 0..self.walk_cap {
            let cur = c.current();
            if cur == tau {
                return Ok(true);
            }
            let l = lr(cur);
            if l.cmp_exact(&last) == Ordering::Less {
                return Err(Error::Internal(format!("L_r decreased after the r-perfect vertex {}", self.label(v))));
            }
            if l.cmp_exact(&target) == Ordering::Greater {
                return Ok(false);
            }
            last = l;
            if !c.advance() {
                return Err(Error::Internal("the walk from an r-perfect vertex ended".into()));
            }
        }
        Err(Error::BoundExhausted("L_r cutoff not reached within the walk cap".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::TrackOptions;
    use crate::word::{parse_word, Automorphism};

    fn track(images: &[&str], inverse: &[&str]) -> TrainTrack {
        let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
        let phi = Automorphism::new(images.len(), w(images)).unwrap().with_inverse(w(inverse)).unwrap();
        TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap()
    }

    fn path(tt: &TrainTrack, s: &str) -> EdgePath {
        tt.graph().parse_path(0, s).unwrap()
    }

    /// Direct walk, as an oracle.
    fn walk_contains(tt: &TrainTrack, mu: &EdgePath, tau: &EdgePath, steps: usize) -> Option<bool> {
        let w = crate::df::walk(&tt.f, mu, steps);
        if w.vertices.contains(tau) {
            Some(true)
        } else if w.end.is_some() {
            Some(false)
        } else {
            None
        }
    }

    #[test]
    fn e_perfect_on_the_twist() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let s = Solver::new(&tt).unwrap();
        let b = path(&tt, "b");
        assert!(s.is_e_perfect(&b, tt.filt.stratum_of(b.edges[0])));
        assert!(!s.finiteness(&b).unwrap().is_finite());
        assert!(s.membership(&b, &path(&tt, "baa")).unwrap());
        assert!(!s.membership(&b, &path(&tt, "ab")).unwrap());
        assert!(!s.membership(&b, &path(&tt, "bab")).unwrap());
        let a = path(&tt, "a");
        assert_eq!(s.finiteness(&a).unwrap(), Finiteness::Finite(alloc::vec![a.clone()]));
        assert!(!s.membership(&a, &b).unwrap());
    }

    #[test]
    fn exponential_walks_agree_with_direct_walking() {
        let tt = track(&["ab", "a"], &["b", "Ba"]);
        let s = Solver::new(&tt).unwrap();
        for m in ["a", "b", "ab", "aB", "bA"] {
            let mu = path(&tt, m);
            if !is_f_path(&tt.f, &mu) {
                continue;
            }
            let fin = s.finiteness(&mu).unwrap();
            let w = crate::df::walk(&tt.f, &mu, 2000);
            assert_eq!(fin.is_finite(), w.end.is_some(), "{m}");
            for k in [0usize, 1, 3, 7] {
                if let Some(tau) = w.vertices.get(k) {
                    assert!(s.membership(&mu, tau).unwrap());
                }
            }
            for t in ["b", "ba", "aab", "abab"] {
                let tau = path(&tt, t);
                if let Some(expected) = walk_contains(&tt, &mu, &tau, 5000) {
                    assert_eq!(s.membership(&mu, &tau).unwrap(), expected, "{m} ∋ {t}");
                }
            }
        }
    }

    #[test]
    fn e_family_points_match_the_walk() {
        let tt = track(&["a", "ba"], &["a", "bA"]);
        let s = Solver::new(&tt).unwrap();
        let v = path(&tt, "bA");
        let r = tt.filt.stratum_of(v.edges[0]);
        if let Some(fam) = s.family(&v, PerfectKind::EPerfect, r) {
            let w = crate::df::walk(&tt.f, &v, 200);
            for t in 0..5 {
                assert!(w.vertices.contains(&s.point(&fam, t, 0)));
            }
        }
    }
}
