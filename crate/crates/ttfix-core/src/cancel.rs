//! Cancellation points and cancellation areas of an exponential stratum.
//!
//! A cancellation point of a reduced path `τ ⊂ G_r` is a vertex of `τ` at
//! which the two adjacent edges form an illegal turn in `H_r`.  Writing
//! `τ = p̄·q` around the point, the point is followed through the iterates
//! `[f^k(τ)] = p̄_k·q_k` by peeling the common prefix of `[f(p_k)]` and
//! `[f(q_k)]`.  Only a bounded window of each side matters: everything past
//! the first `r`-edge at which the `L_r`-length of the window exceeds
//! `L_critical` can never be reached by cancellation.  The window pairs form
//! a deterministic finite system, so either the point disappears (it is
//! *deletable*) or the pair repeats and the point survives forever.  In the
//! latter case the cancellation radius `a` (the `L_r`-length that is
//! eventually cancelled on each side) is the exact solution of the linear
//! recurrence along the cycle, and the *area* is the part of `τ` within
//! `L_r`-distance `a` of the point.

use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::algebraic::AlgebraicScalar;
use crate::error::{Error, Result};
use crate::filtration::{Filtration, StratumClass};
use crate::graph::{inv, tighten_edges, EdgeId, EdgePath, Graph};
use crate::map::GraphMap;
use crate::rtt::TurnTable;

/// Relative margin below which floating-point length comparisons are
/// re-done exactly.
const FLOAT_MARGIN: f64 = 1e-6;

/// Default bound on the number of steps of the window dynamics.
pub const DEFAULT_STEP_BUDGET: usize = 20_000;

/// Read-only view of one exponential stratum with its length function and
/// critical constants.
#[derive(Clone)]
pub struct StratumView<'a> {
    /// The map.
    pub f: &'a GraphMap,
    /// Its filtration.
    pub filt: &'a Filtration,
    /// Turn legality.
    pub turns: &'a TurnTable,
    /// Stratum index.
    pub r: usize,
    /// Perron–Frobenius eigenvalue.
    pub lambda: AlgebraicScalar,
    /// Bounded cancellation constant used.
    pub c_star: usize,
    /// `n_critical` in use.
    pub n_critical: usize,
    /// `n_critical` implied by the cancellation constant.
    pub n_critical_derived: usize,
    /// `L_critical = max L_r(E) · n_critical`.
    pub l_critical: AlgebraicScalar,
    /// Largest `L_r` of an edge.
    pub max_lr: AlgebraicScalar,
    lr: Vec<AlgebraicScalar>,
    lr_f: Vec<f64>,
    l_critical_f: f64,
    /// Step budget for the window dynamics.
    pub step_budget: usize,
    /// Bound on consecutive lower-stratum edges in enumerated windows.
    pub lower_run_bound: usize,
}

/// Smallest `n ≥ 1` with `n·(λ − 1) ≥ c`.
fn derived_n_critical(lambda: &AlgebraicScalar, c: usize) -> usize {
    let one = AlgebraicScalar::from_int(lambda.field(), 1);
    let gap = lambda - &one;
    let q = AlgebraicScalar::from_int(lambda.field(), c as i64).div(&gap);
    q.ceil().max(1) as usize
}

impl<'a> StratumView<'a> {
    /// Builds the view of exponential stratum `r`.  `n_critical` overrides
    /// the derived bound when given.
    pub fn new(
        f: &'a GraphMap,
        filt: &'a Filtration,
        turns: &'a TurnTable,
        r: usize,
        c_star: usize,
        n_critical: Option<usize>,
    ) -> Result<Self> {
        let s = filt.strata().get(r).ok_or_else(|| Error::Invalid("no such stratum".into()))?;
        if s.class != StratumClass::Exponential {
            return Err(Error::Invalid("cancellation is only defined for exponential strata".into()));
        }
        let pf = s.pf.as_ref().expect("exponential strata carry PF data");
        let lambda = pf.lambda.clone();
        let g = f.graph();
        let lr: Vec<AlgebraicScalar> = g.edges().map(|e| filt.lr_edge(r, e)).collect();
        let mut max_lr = AlgebraicScalar::zero(&pf.field);
        for x in &lr {
            if x.cmp_exact(&max_lr) == Ordering::Greater {
                max_lr = x.clone();
            }
        }
        let derived = derived_n_critical(&lambda, c_star);
        let n = n_critical.unwrap_or(derived).max(1);
        let l_critical = &max_lr * &AlgebraicScalar::from_int(&pf.field, n as i64);
        let lr_f = lr.iter().map(AlgebraicScalar::approx).collect();
        let l_critical_f = l_critical.approx();
        Ok(StratumView {
            f,
            filt,
            turns,
            r,
            lambda,
            c_star,
            n_critical: n,
            n_critical_derived: derived,
            l_critical,
            max_lr,
            lr,
            lr_f,
            l_critical_f,
            step_budget: DEFAULT_STEP_BUDGET,
            lower_run_bound: 4,
        })
    }

    /// True when the configured `n_critical` is below the derived bound, so
    /// that completeness of area enumeration is not guaranteed.
    pub fn insufficient_bound(&self) -> bool {
        self.n_critical < self.n_critical_derived
    }

    /// `L_r` of an edge.
    pub fn lr_edge(&self, e: EdgeId) -> &AlgebraicScalar {
        &self.lr[e as usize]
    }

    /// `L_r` of an edge sequence (edges above `H_r` count as zero).
    pub fn lr(&self, p: &[EdgeId]) -> AlgebraicScalar {
        let mut acc = AlgebraicScalar::zero(self.lambda.field());
        for &e in p {
            if self.is_r_edge(e) {
                acc = &acc + &self.lr[e as usize];
            }
        }
        acc
    }

    /// The zero of `ℚ(λ)`.
    pub fn zero(&self) -> AlgebraicScalar {
        AlgebraicScalar::zero(self.lambda.field())
    }

    /// Edge of `H_r`.
    pub fn is_r_edge(&self, e: EdgeId) -> bool {
        self.filt.stratum_of(e) == self.r
    }

    /// Edge of `G_r`.
    pub fn in_gr(&self, e: EdgeId) -> bool {
        self.filt.stratum_of(e) <= self.r
    }

    /// The turn `{a, b}` is an illegal turn in `H_r`.
    pub fn illegal_r_turn(&self, a: EdgeId, b: EdgeId) -> bool {
        a != b && self.is_r_edge(a) && self.is_r_edge(b) && !self.turns.is_legal(a, b)
    }

    /// The path is `r`-legal.
    pub fn is_r_legal(&self, p: &[EdgeId]) -> bool {
        p.windows(2).all(|w| !self.illegal_r_turn(inv(w[0]), w[1]))
    }

    /// Positions `i` (between `τ[i−1]` and `τ[i]`) of cancellation points.
    pub fn find_points(&self, tau: &[EdgeId]) -> Vec<usize> {
        (1..tau.len()).filter(|&i| self.illegal_r_turn(inv(tau[i - 1]), tau[i])).collect()
    }

    /// `L_r` of a path compared with `L_critical`, given a floating
    /// approximation of it.  Floating point decides unless the two values
    /// are too close, in which case the comparison is exact.
    fn exceeds_critical(&self, p: &[EdgeId], approx: f64) -> bool {
        let margin = FLOAT_MARGIN * (1.0 + self.l_critical_f);
        if approx > self.l_critical_f + margin {
            true
        } else if approx < self.l_critical_f - margin {
            false
        } else {
            self.lr(p).cmp_exact(&self.l_critical) == Ordering::Greater
        }
    }

    /// Minimal prefix of `p` that ends with an `r`-edge and has `L_r`
    /// greater than `L_critical`; the flag is true when no such prefix
    /// exists and the whole path is returned.
    pub fn window(&self, p: &[EdgeId]) -> (Vec<EdgeId>, bool) {
        let mut acc = 0.0;
        for (i, &e) in p.iter().enumerate() {
            if self.is_r_edge(e) {
                acc += self.lr_f[e as usize];
                if self.exceeds_critical(&p[..=i], acc) {
                    return (p[..=i].to_vec(), false);
                }
            }
        }
        (p.to_vec(), true)
    }

    fn graph(&self) -> &Graph {
        self.f.graph()
    }
}

/// Largest common initial subpath: `(I, p′, q′)` with `p = I·p′`,
/// `q = I·q′`.
pub fn lambda_split(p: &[EdgeId], q: &[EdgeId]) -> (Vec<EdgeId>, Vec<EdgeId>, Vec<EdgeId>) {
    let n = p.iter().zip(q.iter()).take_while(|(a, b)| a == b).count();
    (p[..n].to_vec(), p[n..].to_vec(), q[n..].to_vec())
}

/// State of the window dynamics: the point sits at `vertex`, with windows
/// `p` and `q` of the two sides (both read away from the point).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowState {
    /// Vertex carrying the point.
    pub vertex: usize,
    /// Window of the left side, read away from the point.
    pub p: Vec<EdgeId>,
    /// Window of the right side.
    pub q: Vec<EdgeId>,
    /// The left window is the whole side.
    pub p_whole: bool,
    /// The right window is the whole side.
    pub q_whole: bool,
}

/// One side of an area: the minimal prefix of the side with `L_r ≥ a`,
/// together with the position of the endpoint inside its last edge.
#[derive(Clone, Debug)]
pub struct AreaSide {
    /// The `e`-max path: full edges covering the side.
    pub edges: Vec<EdgeId>,
    /// `L_r` from the start of the last edge to the endpoint.
    pub last_offset: AlgebraicScalar,
    /// The endpoint is the terminal vertex of the last edge.
    pub exact: bool,
}

/// A cancellation area `A = p̄·q` around the point at `vertex`.
#[derive(Clone, Debug)]
pub struct Area {
    /// Vertex carrying the cancellation point.
    pub vertex: usize,
    /// Left side (read away from the point).
    pub p: AreaSide,
    /// Right side.
    pub q: AreaSide,
    /// Cancellation radius `a = L_r(p) = L_r(q)`.
    pub radius: AlgebraicScalar,
}

impl Area {
    /// Both endpoints are vertices.
    pub fn is_edge_path(&self) -> bool {
        self.p.exact && self.q.exact
    }

    /// The edge path `p̄·q` covering the area (equal to the area when it is
    /// an edge path).
    pub fn path(&self, g: &Graph) -> EdgePath {
        let start = EdgePath { start: self.vertex, edges: self.p.edges.clone() }.end(g);
        let mut edges: Vec<EdgeId> = self.p.edges.iter().rev().map(|&e| inv(e)).collect();
        edges.extend_from_slice(&self.q.edges);
        EdgePath { start, edges }
    }

    /// Same area up to reversal.
    pub fn same_as(&self, o: &Area) -> bool {
        let direct = self.vertex == o.vertex
            && self.p.edges == o.p.edges
            && self.q.edges == o.q.edges
            && self.p.last_offset == o.p.last_offset
            && self.q.last_offset == o.q.last_offset;
        let swapped = self.vertex == o.vertex
            && self.p.edges == o.q.edges
            && self.q.edges == o.p.edges
            && self.p.last_offset == o.q.last_offset
            && self.q.last_offset == o.p.last_offset;
        direct || swapped
    }
}

/// Outcome of following a single cancellation point.
#[derive(Clone, Debug)]
pub enum Deletability {
    /// The point disappears after `step` applications of `f`.
    Deletable {
        /// Number of steps.
        step: usize,
    },
    /// The point survives forever.
    NonDeletable(AreaOrbit),
}

/// The eventually periodic orbit of a non-deletable point.
#[derive(Clone, Debug)]
pub struct AreaOrbit {
    /// Window states `0, 1, …`; state `k` describes `[f^k(τ)]`.
    pub states: Vec<WindowState>,
    /// Index where the cycle starts; the cycle is `states[cycle_start..]`.
    pub cycle_start: usize,
    /// `L_r` of the common prefix cancelled between state `k` and `k+1`.
    pub cancelled: Vec<AlgebraicScalar>,
    /// Cancellation radius of every state.
    pub radii: Vec<AlgebraicScalar>,
    /// Area of every state.
    pub areas: Vec<Area>,
}

impl AreaOrbit {
    /// Period of the cycle.
    pub fn period(&self) -> usize {
        self.states.len() - self.cycle_start
    }

    /// Index of the state following `k`.
    pub fn next(&self, k: usize) -> usize {
        if k + 1 < self.states.len() {
            k + 1
        } else {
            self.cycle_start
        }
    }
}

enum StepResult {
    Gone,
    Next(WindowState, Vec<EdgeId>),
}

impl<'a> StratumView<'a> {
    fn step(&self, s: &WindowState) -> Result<StepResult> {
        let g = self.graph();
        let fp = self.f.map_tight(&EdgePath { start: s.vertex, edges: s.p.clone() });
        let fq = self.f.map_tight(&EdgePath { start: s.vertex, edges: s.q.clone() });
        let (common, p1, q1) = lambda_split(&fp.edges, &fq.edges);
        if p1.is_empty() || q1.is_empty() {
            let exhausted = (p1.is_empty() && !s.p_whole) || (q1.is_empty() && !s.q_whole);
            if exhausted {
                return Err(Error::BoundExhausted(
                    "cancellation reached the end of a window; n_critical is too small".into(),
                ));
            }
            return Ok(StepResult::Gone);
        }
        if !self.illegal_r_turn(p1[0], q1[0]) {
            return Ok(StepResult::Gone);
        }
        let vertex = EdgePath { start: fp.start, edges: common.clone() }.end(g);
        let (wp, wp_whole) = self.window(&p1);
        let (wq, wq_whole) = self.window(&q1);
        if (wp_whole && !s.p_whole) || (wq_whole && !s.q_whole) {
            return Err(Error::BoundExhausted("image window too short; n_critical is too small".into()));
        }
        Ok(StepResult::Next(WindowState { vertex, p: wp, q: wq, p_whole: wp_whole, q_whole: wq_whole }, common))
    }

    /// Initial window state for the point between `p̄` and `q` at `vertex`.
    pub fn initial_state(&self, vertex: usize, p: &[EdgeId], q: &[EdgeId]) -> WindowState {
        let (wp, p_whole) = self.window(p);
        let (wq, q_whole) = self.window(q);
        WindowState { vertex, p: wp, q: wq, p_whole, q_whole }
    }

    /// Follows the point between `p̄` and `q` (both read away from the point,
    /// both `r`-legal, first edges forming an illegal `r`-turn).
    pub fn is_deletable(&self, vertex: usize, p: &[EdgeId], q: &[EdgeId]) -> Result<Deletability> {
        let s0 = self.initial_state(vertex, p, q);
        self.run(s0)
    }

    /// Runs the window dynamics from a state.
    pub fn run(&self, s0: WindowState) -> Result<Deletability> {
        let mut seen: HashMap<WindowState, usize> = HashMap::new();
        let mut states = alloc::vec![s0];
        let mut cancelled = Vec::new();
        seen.insert(states[0].clone(), 0);
        loop {
            if states.len() > self.step_budget {
                return Err(Error::BoundExhausted("window dynamics exceeded its step budget".into()));
            }
            let cur = states.last().unwrap();
            match self.step(cur)? {
                StepResult::Gone => return Ok(Deletability::Deletable { step: states.len() }),
                StepResult::Next(next, c) => {
                    cancelled.push(self.lr(&c));
                    if let Some(&k) = seen.get(&next) {
                        return Ok(Deletability::NonDeletable(self.finish_orbit(states, k, cancelled)?));
                    }
                    seen.insert(next.clone(), states.len());
                    states.push(next);
                }
            }
        }
    }

    fn finish_orbit(
        &self,
        states: Vec<WindowState>,
        cycle_start: usize,
        cancelled: Vec<AlgebraicScalar>,
    ) -> Result<AreaOrbit> {
        let n = states.len();
        let period = n - cycle_start;
        let lambda = &self.lambda;
        let one = AlgebraicScalar::from_int(lambda.field(), 1);
        // a_s (λ^π − 1) = Σ_j c_{s+j} λ^{π−1−j}.
        let mut num = self.zero();
        for j in 0..period {
            num = &num + &(&cancelled[cycle_start + j] * &lambda.pow((period - 1 - j) as u32));
        }
        let den = &lambda.pow(period as u32) - &one;
        let a_s = num.div(&den);
        let mut radii = alloc::vec![self.zero(); n];
        radii[cycle_start] = a_s.clone();
        // Backwards through the cycle, then through the transient part.
        let mut next = a_s;
        for k in (0..n).rev() {
            if k == cycle_start {
                next = radii[cycle_start].clone();
                continue;
            }
            let a = (&cancelled[k] + &next).div(lambda);
            radii[k] = a.clone();
            next = a;
        }
        let mut areas = Vec::with_capacity(n);
        for (k, s) in states.iter().enumerate() {
            let p = self.side(&s.p, &radii[k])?;
            let q = self.side(&s.q, &radii[k])?;
            areas.push(Area { vertex: s.vertex, p, q, radius: radii[k].clone() });
        }
        Ok(AreaOrbit { states, cycle_start, cancelled, radii, areas })
    }

    fn side(&self, p: &[EdgeId], a: &AlgebraicScalar) -> Result<AreaSide> {
        let a_f = a.approx();
        let margin = FLOAT_MARGIN * (1.0 + a_f.abs());
        let mut acc_f = 0.0;
        let mut start = 0;
        // Skip whole edges that certainly end before the radius.
        for (i, &e) in p.iter().enumerate() {
            let next = acc_f + self.lr_f[e as usize];
            if next < a_f - margin {
                acc_f = next;
                start = i + 1;
            } else {
                break;
            }
        }
        let mut acc = self.lr(&p[..start]);
        for (i, &e) in p.iter().enumerate().skip(start) {
            if !self.is_r_edge(e) {
                continue;
            }
            let next = &acc + &self.lr[e as usize];
            match next.cmp_exact(a) {
                Ordering::Less => acc = next,
                ord => {
                    return Ok(AreaSide {
                        edges: p[..=i].to_vec(),
                        last_offset: a - &acc,
                        exact: ord == Ordering::Equal,
                    })
                }
            }
        }
        Err(Error::Internal("cancellation radius exceeds the window".into()))
    }
}

/// Summary of the points of a path.
#[derive(Clone, Debug)]
pub struct PointReport {
    /// Positions of the points.
    pub positions: Vec<usize>,
    /// Outcome of each point within its two neighbouring segments.
    pub outcomes: Vec<Deletability>,
}

/// One piece of an A-decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// An `r`-legal (or trivial) segment `b_j`, as a range of edge indices.
    Legal(core::ops::Range<usize>),
    /// A cancellation area `A_j` that is an edge path.
    Area(core::ops::Range<usize>),
}

impl<'a> StratumView<'a> {
    /// The two segments around every point, and the outcome of each point.
    pub fn point_report(&self, tau: &EdgePath) -> Result<PointReport> {
        let g = self.graph();
        let positions = self.find_points(&tau.edges);
        let mut bounds = alloc::vec![0];
        bounds.extend_from_slice(&positions);
        bounds.push(tau.len());
        let mut outcomes = Vec::new();
        for (i, &y) in positions.iter().enumerate() {
            let left = &tau.edges[bounds[i]..y];
            let right = &tau.edges[y..bounds[i + 2]];
            let p: Vec<EdgeId> = left.iter().rev().map(|&e| inv(e)).collect();
            let vertex = EdgePath { start: tau.start, edges: tau.edges[..y].to_vec() }.end(g);
            outcomes.push(self.is_deletable(vertex, &p, right)?);
        }
        Ok(PointReport { positions, outcomes })
    }

    /// Stability criterion: every point is non-deletable within its two
    /// segments and every inner segment is long enough to hold both
    /// neighbouring areas.
    pub fn is_stable(&self, tau: &EdgePath) -> Result<bool> {
        Ok(self.stability(tau)?.is_none())
    }

    /// `None` when stable; otherwise the number of iterations after which the
    /// point count is guaranteed to drop.
    fn stability(&self, tau: &EdgePath) -> Result<Option<usize>> {
        let rep = self.point_report(tau)?;
        let mut radii = Vec::new();
        for o in &rep.outcomes {
            match o {
                Deletability::Deletable { step } => return Ok(Some(*step)),
                Deletability::NonDeletable(orbit) => radii.push(orbit.radii[0].clone()),
            }
        }
        for i in 1..rep.positions.len() {
            let seg = &tau.edges[rep.positions[i - 1]..rep.positions[i]];
            let need = &radii[i - 1] + &radii[i];
            let have = self.lr(seg);
            if have.cmp_exact(&need) == Ordering::Less {
                // Iterate until the overlap half-width grows past L_critical.
                let two = AlgebraicScalar::from_int(self.lambda.field(), 2);
                let a = (&need - &have).div(&two);
                let mut m = 1usize;
                let mut x = &a * &self.lambda;
                while x.cmp_exact(&self.l_critical) != Ordering::Greater {
                    x = &x * &self.lambda;
                    m += 1;
                }
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Computes `i₀` with `[f^{i₀}(τ)]` stable, following the points and the
    /// gap conditions; returns `i₀` and the stable path.
    pub fn stabilize(&self, tau: &EdgePath) -> Result<(usize, EdgePath)> {
        let mut cur = crate::graph::tighten(tau);
        let mut i = 0usize;
        loop {
            match self.stability(&cur)? {
                None => return Ok((i, cur)),
                Some(d) => {
                    if i > self.step_budget {
                        return Err(Error::BoundExhausted("stabilization exceeded its step budget".into()));
                    }
                    cur = self.f.iterate_tight(&cur, d);
                    i += d;
                }
            }
        }
    }

    /// Number of points of the stabilized path.
    pub fn n_r(&self, tau: &EdgePath) -> Result<usize> {
        let (_, s) = self.stabilize(tau)?;
        Ok(self.find_points(&s.edges).len())
    }

    /// A-decomposition of a stable path whose areas are edge paths.
    pub fn a_decomposition(&self, tau: &EdgePath) -> Result<Vec<Piece>> {
        if !self.is_stable(tau)? {
            return Err(Error::Invalid("A-decomposition requires a stable path".into()));
        }
        let rep = self.point_report(tau)?;
        let mut pieces = Vec::new();
        let mut cursor = 0usize;
        for (i, o) in rep.outcomes.iter().enumerate() {
            let Deletability::NonDeletable(orbit) = o else { unreachable!() };
            let area = &orbit.areas[0];
            if !area.is_edge_path() {
                return Err(Error::Invalid("cancellation area is not an edge path".into()));
            }
            let y = rep.positions[i];
            let lo = y - area.p.edges.len();
            let hi = y + area.q.edges.len();
            if lo > cursor {
                pieces.push(Piece::Legal(cursor..lo));
            }
            pieces.push(Piece::Area(lo..hi));
            cursor = hi;
        }
        if cursor < tau.len() || pieces.is_empty() {
            pieces.push(Piece::Legal(cursor..tau.len()));
        }
        Ok(pieces)
    }

    /// All points of `τ` are non-deletable and all their areas are edge
    /// paths.
    pub fn stable_with_edge_areas(&self, tau: &EdgePath) -> Result<bool> {
        if !self.is_stable(tau)? {
            return Ok(false);
        }
        let rep = self.point_report(tau)?;
        Ok(rep.outcomes.iter().all(|o| match o {
            Deletability::NonDeletable(orbit) => orbit.areas[0].is_edge_path(),
            Deletability::Deletable { .. } => false,
        }))
    }

    /// Superstability of an `f`-path `τ`: `τ` and `[τ·f(τ)]` are stable with
    /// edge-path areas.
    pub fn is_superstable(&self, tau: &EdgePath) -> Result<bool> {
        if !self.stable_with_edge_areas(tau)? {
            return Ok(false);
        }
        let g = self.graph();
        let ft = self.f.map_tight(tau);
        let joined = tighten_edges(tau.start, tau.edges.iter().chain(ft.edges.iter()).copied());
        debug_assert!(joined.validate(g).is_ok());
        self.stable_with_edge_areas(&joined)
    }

    /// Smallest `S` (within the step budget) with `[f^S(τ)]` superstable.
    pub fn superstabilize(&self, tau: &EdgePath) -> Result<usize> {
        let mut cur = crate::graph::tighten(tau);
        for s in 0..=self.step_budget {
            if self.is_superstable(&cur)? {
                return Ok(s);
            }
            cur = self.f.map_tight(&cur);
        }
        Err(Error::BoundExhausted("superstabilization exceeded its step budget".into()))
    }
}

/// Outcome of the splitting lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitOutcome {
    /// `[f^S(τ)]` contains an `r`-legal segment of `L_r` greater than `L`.
    LegalSegment(usize),
    /// `[f^S(τ)]` has fewer illegal `r`-turns than `τ`.
    FewerTurns(usize),
    /// `[f^S(τ)]` is a concatenation of periodic Nielsen paths and edge
    /// paths in `G_{r−1}`.
    NielsenConcatenation(usize),
}

impl<'a> StratumView<'a> {
    /// The splitting lemma for `τ` and the bound `L`.
    pub fn split(&self, tau: &EdgePath, l: &AlgebraicScalar, m_r: usize) -> Result<SplitOutcome> {
        let (i0, _) = self.stabilize(tau)?;
        if i0 > 0 {
            return Ok(SplitOutcome::FewerTurns(i0));
        }
        let rep = self.point_report(tau)?;
        let mut bounds = alloc::vec![0usize];
        let mut ends = Vec::new();
        for (i, o) in rep.outcomes.iter().enumerate() {
            let Deletability::NonDeletable(orbit) = o else { unreachable!() };
            let y = rep.positions[i];
            let a = &orbit.areas[0];
            // Segment boundaries in L_r: legal pieces between areas.
            bounds.push(y);
            ends.push((self.lr(&a.p.edges[..a.p.edges.len() - 1]) + a.p.last_offset.clone(), a.radius.clone()));
        }
        // L_r of the legal pieces b_j.
        let mut legal_lengths = Vec::new();
        let k = rep.positions.len();
        let radius = |i: usize| match &rep.outcomes[i] {
            Deletability::NonDeletable(o) => o.radii[0].clone(),
            _ => unreachable!(),
        };
        for j in 0..=k {
            let lo = if j == 0 { 0 } else { rep.positions[j - 1] };
            let hi = if j == k { tau.len() } else { rep.positions[j] };
            let mut len = self.lr(&tau.edges[lo..hi]);
            if j > 0 {
                len = &len - &radius(j - 1);
            }
            if j < k {
                len = &len - &radius(j);
            }
            legal_lengths.push(len);
        }
        for len in &legal_lengths {
            if len.is_positive() {
                let mut s = 0usize;
                let mut x = len.clone();
                while x.cmp_exact(l) != Ordering::Greater {
                    x = &x * &self.lambda;
                    s += 1;
                }
                return Ok(SplitOutcome::LegalSegment(s.max(1)));
            }
        }
        Ok(SplitOutcome::NielsenConcatenation(m_r.max(1)))
    }
}

/// All cancellation areas of a stratum with the action of `f` on them.
#[derive(Clone, Debug)]
pub struct AreaCatalog {
    /// Distinct areas (up to reversal).
    pub areas: Vec<Area>,
    /// Index in `areas` of `[f(A)]` for each area.
    pub image: Vec<usize>,
    /// Whether the side `p` of an area corresponds to the side `q` of its
    /// image (the stored orientations differ).
    pub image_swapped: Vec<bool>,
    /// Whether the enumeration is known to be complete.
    pub complete: bool,
    /// Number of window pairs examined.
    pub pairs_examined: usize,
}

impl AreaCatalog {
    /// Number of distinct area endpoints.
    pub fn endpoint_count(&self) -> usize {
        let mut buckets: HashMap<EdgeId, Vec<AlgebraicScalar>> = HashMap::new();
        let mut count = 0;
        for a in &self.areas {
            for s in [&a.p, &a.q] {
                let e = *s.edges.last().unwrap();
                let list = buckets.entry(e).or_default();
                if !list.iter().any(|x| *x == s.last_offset) {
                    list.push(s.last_offset.clone());
                    count += 1;
                }
            }
        }
        count
    }

    /// Largest number of edges on one side of an area.
    pub fn max_side_len(&self) -> usize {
        self.areas.iter().map(|a| a.p.edges.len().max(a.q.edges.len())).max().unwrap_or(0)
    }

    /// The side (`false` = `p`, `true` = `q`) of area `i` followed forward
    /// `k` times.
    pub fn follow(&self, mut i: usize, mut side_q: bool, k: usize) -> (usize, bool) {
        for _ in 0..k {
            side_q ^= self.image_swapped[i];
            i = self.image[i];
        }
        (i, side_q)
    }

    /// True iff the endpoint on the given side of area `i` never reaches a
    /// vertex under iteration.
    pub fn is_exceptional_endpoint(&self, i: usize, side_q: bool) -> bool {
        let (j, sq) = self.follow(i, side_q, self.areas.len());
        let a = &self.areas[j];
        !(if sq { a.q.exact } else { a.p.exact })
    }

    /// Areas on periodic orbits.
    pub fn periodic(&self) -> Vec<usize> {
        let n = self.areas.len();
        let mut out: Vec<usize> = (0..n).map(|i| self.follow(i, false, n).0).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One state of the window dynamics during enumeration.
struct Node {
    state: WindowState,
    radius: AlgebraicScalar,
    next: usize,
    /// The successor's stored state has its sides swapped relative to the
    /// output of the step.
    next_swapped: bool,
}

fn canonical(s: WindowState) -> (WindowState, bool) {
    if (&s.p, s.p_whole) <= (&s.q, s.q_whole) {
        (s, false)
    } else {
        (WindowState { vertex: s.vertex, p: s.q, q: s.p, p_whole: s.q_whole, q_whole: s.p_whole }, true)
    }
}

impl<'a> StratumView<'a> {
    /// All windows starting with `first`, each with its "whole path" flag;
    /// the second component reports truncation of zero-length runs.  Fails
    /// when more than `limit` windows exist.
    pub fn windows_from(&self, first: EdgeId, limit: usize) -> Result<(Vec<(Vec<EdgeId>, bool)>, bool)> {
        let mut out = Vec::new();
        let mut truncated = false;
        let mut path = alloc::vec![first];
        let acc = self.lr_f[first as usize];
        self.extend_windows(&mut path, acc, 0, &mut out, &mut truncated, limit)?;
        Ok((out, truncated))
    }

    fn extend_windows(
        &self,
        path: &mut Vec<EdgeId>,
        acc: f64,
        lower_run: usize,
        out: &mut Vec<(Vec<EdgeId>, bool)>,
        truncated: &mut bool,
        limit: usize,
    ) -> Result<()> {
        let g = self.graph();
        let last = *path.last().unwrap();
        if self.is_r_edge(last) && self.exceeds_critical(path, acc) {
            out.push((path.clone(), false));
            return self.check_window_limit(out.len(), limit);
        }
        let mut extended = false;
        for e in g.star(g.omega(last)) {
            if e == inv(last) || !self.in_gr(e) || self.illegal_r_turn(inv(last), e) {
                continue;
            }
            let r_edge = self.is_r_edge(e);
            let run = if r_edge { 0 } else { lower_run + 1 };
            if run > self.lower_run_bound {
                *truncated = true;
                continue;
            }
            extended = true;
            path.push(e);
            let next = if r_edge { acc + self.lr_f[e as usize] } else { acc };
            let res = self.extend_windows(path, next, run, out, truncated, limit);
            path.pop();
            res?;
        }
        if !extended {
            out.push((path.clone(), true));
            return self.check_window_limit(out.len(), limit);
        }
        Ok(())
    }

    fn check_window_limit(&self, n: usize, limit: usize) -> Result<()> {
        if n > limit {
            Err(Error::BoundExhausted("too many windows for area enumeration".into()))
        } else {
            Ok(())
        }
    }

    /// Finds all cancellation areas by following every pair of windows at
    /// every illegal turn of `H_r`.
    pub fn find_all_areas(&self, pair_budget: usize) -> Result<AreaCatalog> {
        let g = self.graph();
        let mut memo: HashMap<WindowState, Option<usize>> = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut complete = !self.insufficient_bound();
        let mut pairs_examined = 0usize;
        let mut window_cache: HashMap<EdgeId, Vec<(Vec<EdgeId>, bool)>> = HashMap::new();
        let lambda_inv = self.lambda.inverse().expect("λ > 1");
        for v in 0..g.vertex_count() {
            let star = g.star(v);
            for (i, &a) in star.iter().enumerate() {
                for &b in &star[i + 1..] {
                    if !self.illegal_r_turn(a, b) {
                        continue;
                    }
                    for e in [a, b] {
                        if !window_cache.contains_key(&e) {
                            let (w, truncated) = self.windows_from(e, pair_budget)?;
                            if truncated {
                                complete = false;
                            }
                            window_cache.insert(e, w);
                        }
                    }
                    let wa = &window_cache[&a];
                    let wb = &window_cache[&b];
                    if pairs_examined.saturating_add(wa.len().saturating_mul(wb.len())) > pair_budget {
                        return Err(Error::BoundExhausted("area enumeration exceeded its pair budget".into()));
                    }
                    for (p, pw) in wa {
                        for (q, qw) in wb {
                            pairs_examined += 1;
                            let s0 = WindowState { vertex: v, p: p.clone(), q: q.clone(), p_whole: *pw, q_whole: *qw };
                            self.explore(s0, &mut memo, &mut nodes, &lambda_inv)?;
                        }
                    }
                }
            }
        }
        // Distinct areas, bucketed by their combinatorial shape.
        let mut areas: Vec<Area> = Vec::new();
        let mut area_swapped: Vec<bool> = Vec::with_capacity(nodes.len());
        let mut node_area: Vec<usize> = Vec::with_capacity(nodes.len());
        let mut buckets: HashMap<(usize, Vec<EdgeId>, Vec<EdgeId>), Vec<usize>> = HashMap::new();
        for node in &nodes {
            let s = &node.state;
            let p = self.side(&s.p, &node.radius)?;
            let q = self.side(&s.q, &node.radius)?;
            let area = Area { vertex: s.vertex, p, q, radius: node.radius.clone() };
            let swapped = area.p.edges > area.q.edges;
            let key = if swapped {
                (s.vertex, area.q.edges.clone(), area.p.edges.clone())
            } else {
                (s.vertex, area.p.edges.clone(), area.q.edges.clone())
            };
            let list = buckets.entry(key).or_default();
            let found = list.iter().copied().find(|&j| areas[j].same_as(&area));
            match found {
                Some(j) => {
                    node_area.push(j);
                    // Relative orientation of this node and the stored area.
                    let same = areas[j].p.edges == area.p.edges && areas[j].p.last_offset == area.p.last_offset;
                    area_swapped.push(!same);
                }
                None => {
                    list.push(areas.len());
                    node_area.push(areas.len());
                    area_swapped.push(false);
                    areas.push(area);
                }
            }
        }
        let mut image = alloc::vec![usize::MAX; areas.len()];
        let mut image_swapped = alloc::vec![false; areas.len()];
        for (k, node) in nodes.iter().enumerate() {
            let a = node_area[k];
            let b = node_area[node.next];
            // Orientation: stored(a) →(swap a) node k →(step) node next
            // →(swap next) stored(b).
            let sw = area_swapped[k] ^ node.next_swapped ^ area_swapped[node.next];
            if image[a] == usize::MAX {
                image[a] = b;
                image_swapped[a] = sw;
            } else if image[a] != b {
                return Err(Error::Internal("area has two different images".into()));
            }
        }
        Ok(AreaCatalog { areas, image, image_swapped, complete, pairs_examined })
    }

    /// Follows one state, reusing earlier results.  Every non-deletable state
    /// becomes a node with its cancellation radius.
    fn explore(
        &self,
        s0: WindowState,
        memo: &mut HashMap<WindowState, Option<usize>>,
        nodes: &mut Vec<Node>,
        lambda_inv: &AlgebraicScalar,
    ) -> Result<()> {
        let (s0, _) = canonical(s0);
        if memo.contains_key(&s0) {
            return Ok(());
        }
        // path[k] = (canonical state, cancelled L_r, successor swapped)
        let mut path: Vec<(WindowState, AlgebraicScalar, bool)> = Vec::new();
        let mut local: HashMap<WindowState, usize> = HashMap::new();
        let mut cur = s0;
        enum End {
            Deleted,
            Known(usize),
            Cycle(usize),
        }
        let end = loop {
            if path.len() > self.step_budget {
                return Err(Error::BoundExhausted("window dynamics exceeded its step budget".into()));
            }
            match self.step(&cur)? {
                StepResult::Gone => {
                    path.push((cur, self.zero(), false));
                    break End::Deleted;
                }
                StepResult::Next(next, common) => {
                    let (next, swapped) = canonical(next);
                    local.insert(cur.clone(), path.len());
                    path.push((cur, self.lr(&common), swapped));
                    if let Some(known) = memo.get(&next) {
                        break match known {
                            None => End::Deleted,
                            Some(id) => End::Known(*id),
                        };
                    }
                    if let Some(&k) = local.get(&next) {
                        break End::Cycle(k);
                    }
                    cur = next;
                }
            }
        };
        let base = nodes.len();
        let n = path.len();
        let (mut next_radius, next_index, stop) = match end {
            End::Deleted => {
                for (s, _, _) in path {
                    memo.insert(s, None);
                }
                return Ok(());
            }
            End::Known(id) => (nodes[id].radius.clone(), id, 0),
            End::Cycle(k) => {
                // a_k (λ^π − 1) = Σ_j c_{k+j} λ^{π−1−j}
                let period = n - k;
                let mut num = self.zero();
                for j in 0..period {
                    num = &num + &(&path[k + j].1 * &self.lambda.pow((period - 1 - j) as u32));
                }
                let den = &self.lambda.pow(period as u32) - &AlgebraicScalar::from_int(self.lambda.field(), 1);
                (num.div(&den), base + k, k)
            }
        };
        let mut radii = alloc::vec![self.zero(); n];
        let mut nexts = alloc::vec![0usize; n];
        if let End::Cycle(k) = end {
            radii[k] = next_radius.clone();
            // Going backwards from the end of the cycle.
            for idx in (k + 1..n).rev() {
                let succ = if idx + 1 == n { k } else { idx + 1 };
                nexts[idx] = base + succ;
                let r = if idx + 1 == n { radii[k].clone() } else { radii[idx + 1].clone() };
                radii[idx] = &(&path[idx].1 + &r) * lambda_inv;
            }
            nexts[k] = base + if k + 1 == n { k } else { k + 1 };
            next_radius = radii[k].clone();
            for idx in (0..stop).rev() {
                nexts[idx] = base + idx + 1;
                radii[idx] = &(&path[idx].1 + &next_radius) * lambda_inv;
                next_radius = radii[idx].clone();
            }
        } else {
            for idx in (0..n).rev() {
                nexts[idx] = if idx + 1 == n { next_index } else { base + idx + 1 };
                radii[idx] = &(&path[idx].1 + &next_radius) * lambda_inv;
                next_radius = radii[idx].clone();
            }
        }
        for (idx, (s, _, sw)) in path.into_iter().enumerate() {
            memo.insert(s.clone(), Some(base + idx));
            nodes.push(Node { state: s, radius: radii[idx].clone(), next: nexts[idx], next_swapped: sw });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::maximal_filtration;
    use crate::word::parse_word;

    fn rose(ws: &[&str]) -> GraphMap {
        let words: Vec<_> = ws.iter().map(|s| parse_word(s).unwrap()).collect();
        GraphMap::rose(&words)
    }

    #[test]
    fn split_of_common_prefix() {
        assert_eq!(lambda_split(&[0, 2], &[0, 4]), (alloc::vec![0], alloc::vec![2], alloc::vec![4]));
        assert_eq!(lambda_split(&[0, 2], &[0, 2]), (alloc::vec![0, 2], alloc::vec![], alloc::vec![]));
        assert_eq!(lambda_split(&[0], &[2]), (alloc::vec![], alloc::vec![0], alloc::vec![2]));
    }

    #[test]
    fn fibonacci_points() {
        let f = rose(&["ab", "a"]);
        let filt = maximal_filtration(&f).unwrap();
        let turns = TurnTable::new(&f);
        let v = StratumView::new(&f, &filt, &turns, 0, 1, None).unwrap();
        assert_eq!(v.n_critical_derived, 2);
        let g = f.graph();
        // a·b̄: turn {ā, b̄}; Tf(ā, b̄) = (b̄, ā) and back: legal.
        let p = g.parse_path(0, "aB").unwrap();
        assert!(v.find_points(&p.edges).is_empty());
        // a·b: turn {ā, b}: legal per the turn orbit.
        let p = g.parse_path(0, "ab").unwrap();
        assert!(v.find_points(&p.edges).is_empty());
        // b̄·a: turn {b, a}: Tf(b, a) = (a, a) is degenerate.
        let p = g.parse_path(0, "Ba").unwrap();
        assert_eq!(v.find_points(&p.edges), alloc::vec![1]);
    }

    #[test]
    fn fibonacci_areas_are_closed() {
        let f = rose(&["ab", "a"]);
        let filt = maximal_filtration(&f).unwrap();
        let turns = TurnTable::new(&f);
        let v = StratumView::new(&f, &filt, &turns, 0, 1, None).unwrap();
        let cat = v.find_all_areas(1_000_000).unwrap();
        for (i, a) in cat.areas.iter().enumerate() {
            assert!(a.p.exact == a.q.exact || !a.is_edge_path());
            assert!(cat.image[i] < cat.areas.len());
            if a.is_edge_path() && cat.areas[cat.image[i]].is_edge_path() {
                let img = f.map_tight(&a.path(f.graph()));
                let b = cat.areas[cat.image[i]].path(f.graph());
                assert!(img == b || img == b.inverse(f.graph()));
            }
        }
    }
}
