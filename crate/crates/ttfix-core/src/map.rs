//! Piecewise-linear graph self-maps sending vertices to vertices and edges to
//! edge paths.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{inv, is_positive, pair, tighten, tighten_edges, EdgeId, EdgePath, Graph};
use crate::poly::{rat, Rational};

/// A graph map `f: Γ → Γ` with per-edge linear structure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphMap {
    graph: Graph,
    vmap: Vec<usize>,
    /// Image of the positive edge of each pair.
    images: Vec<Vec<EdgeId>>,
    /// `l`-lengths of the pieces of each positive edge (sum 1, one per image
    /// edge).
    pieces: Vec<Vec<Rational>>,
}

/// A turn: an unordered pair of oriented edges with a common initial vertex,
/// stored with the smaller id first.
pub type Turn = (EdgeId, EdgeId);

/// Canonical form of a turn.
pub fn turn(a: EdgeId, b: EdgeId) -> Turn {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl GraphMap {
    /// Builds and validates a graph map.  `pieces` defaults to uniform
    /// subdivision `1/k` when absent.
    pub fn new(
        graph: Graph,
        vmap: Vec<usize>,
        images: Vec<Vec<EdgeId>>,
        pieces: Option<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        if vmap.len() != graph.vertex_count() || vmap.iter().any(|&v| v >= graph.vertex_count()) {
            return Err(Error::Invalid("vertex map has the wrong size or range".into()));
        }
        if images.len() != graph.pair_count() {
            return Err(Error::Invalid("one image per edge pair is required".into()));
        }
        for (k, img) in images.iter().enumerate() {
            let e = 2 * k as EdgeId;
            let p = EdgePath { start: vmap[graph.alpha(e)], edges: img.clone() };
            p.validate(&graph).map_err(|_| {
                Error::Invalid(alloc::format!("image of edge {} is not a path from f(α)", graph.edge_name(e)))
            })?;
            if p.end(&graph) != vmap[graph.omega(e)] {
                return Err(Error::Invalid(alloc::format!(
                    "image of edge {} does not end at f(ω)",
                    graph.edge_name(e)
                )));
            }
        }
        let pieces = match pieces {
            Some(p) => {
                if p.len() != images.len() {
                    return Err(Error::Invalid("subdivision data has the wrong size".into()));
                }
                for (k, lens) in p.iter().enumerate() {
                    let total: Rational = lens.iter().cloned().fold(Rational::zero(), |a, b| a + b);
                    if lens.len() != images[k].len()
                        || lens.iter().any(|l| *l <= Rational::zero())
                        || (!lens.is_empty() && !total.is_one())
                    {
                        return Err(Error::Invalid("subdivision lengths must be positive, one per image edge, sum 1".into()));
                    }
                }
                p
            }
            None => images
                .iter()
                .map(|img| {
                    let k = img.len() as i64;
                    (0..k).map(|_| Rational::new(1.into(), k.into())).collect()
                })
                .collect(),
        };
        Ok(GraphMap { graph, vmap, images, pieces })
    }

    /// The map on the rose given by letter images (`+i` ↦ edge `2(i−1)`).
    pub fn rose(images: &[crate::word::Word]) -> Self {
        let n = images.len();
        let graph = Graph::rose(n);
        let imgs = images.iter().map(|w| w.letters().iter().map(|&l| letter_to_edge(l)).collect()).collect();
        GraphMap::new(graph, alloc::vec![0], imgs, None).expect("rose maps are always well formed")
    }

    /// Domain (= codomain) graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Vertex map.
    pub fn vertex(&self, v: usize) -> usize {
        self.vmap[v]
    }

    /// The whole vertex map.
    pub fn vertex_map(&self) -> &[usize] {
        &self.vmap
    }

    /// Images of positive edges.
    pub fn images(&self) -> &[Vec<EdgeId>] {
        &self.images
    }

    /// Subdivision lengths of positive edges.
    pub fn all_pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    /// Image `f(e)` of an oriented edge.
    pub fn image(&self, e: EdgeId) -> Vec<EdgeId> {
        let img = &self.images[pair(e)];
        if is_positive(e) {
            img.clone()
        } else {
            img.iter().rev().map(|&x| inv(x)).collect()
        }
    }

    /// Length of `f(e)`.
    pub fn image_len(&self, e: EdgeId) -> usize {
        self.images[pair(e)].len()
    }

    /// Subdivision lengths along `e` in its own direction.
    pub fn pieces(&self, e: EdgeId) -> Vec<Rational> {
        let p = &self.pieces[pair(e)];
        if is_positive(e) {
            p.clone()
        } else {
            p.iter().rev().cloned().collect()
        }
    }

    /// `f(p)` without tightening.
    pub fn map_path(&self, p: &EdgePath) -> EdgePath {
        let mut edges = Vec::new();
        for &e in &p.edges {
            edges.extend(self.image(e));
        }
        EdgePath { start: self.vmap[p.start], edges }
    }

    /// `[f(p)]`.
    pub fn map_tight(&self, p: &EdgePath) -> EdgePath {
        let start = self.vmap[p.start];
        tighten_edges(start, p.edges.iter().flat_map(|&e| self.image(e)))
    }

    /// `[f^k(p)]`.
    pub fn iterate_tight(&self, p: &EdgePath, k: usize) -> EdgePath {
        let mut q = tighten(p);
        for _ in 0..k {
            q = self.map_tight(&q);
        }
        q
    }

    /// Maximal image length `||f||`.
    pub fn norm(&self) -> usize {
        self.images.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every edge image is reduced.
    pub fn is_tight(&self) -> bool {
        self.images.iter().all(|img| img.windows(2).all(|w| w[1] != inv(w[0])))
    }

    /// Every edge image is nontrivial.
    pub fn is_nondegenerate(&self) -> bool {
        self.images.iter().all(|img| !img.is_empty())
    }

    /// `Df(e)`: the first edge of `f(e)`.
    pub fn derivative(&self, e: EdgeId) -> Option<EdgeId> {
        self.image(e).first().copied()
    }

    /// `Tf` on turns.
    pub fn turn_image(&self, t: Turn) -> Option<Turn> {
        Some(turn(self.derivative(t.0)?, self.derivative(t.1)?))
    }

    /// A turn is legal iff no iterate of `Tf` is degenerate.
    pub fn is_legal_turn(&self, t: Turn) -> bool {
        let mut seen = BTreeSet::new();
        let mut cur = t;
        loop {
            if cur.0 == cur.1 {
                return false;
            }
            if !seen.insert(cur) {
                return true;
            }
            match self.turn_image(cur) {
                Some(n) => cur = n,
                None => return false,
            }
        }
    }

    /// Transition matrix for the given ordered list of edge pairs: entry
    /// `(i, j)` counts occurrences of `E_i` and `Ē_i` in `f(E_j)`.
    pub fn transition_matrix(&self, order: &[usize]) -> Vec<Vec<i64>> {
        let n = order.len();
        let mut m = alloc::vec![alloc::vec![0i64; n]; n];
        for (j, &pj) in order.iter().enumerate() {
            for &e in &self.images[pj] {
                if let Some(i) = order.iter().position(|&pi| pi == pair(e)) {
                    m[i][j] += 1;
                }
            }
        }
        m
    }

    /// Composition `self ∘ other`, with composed linear structure.
    pub fn compose(&self, other: &GraphMap) -> GraphMap {
        assert_eq!(self.graph, other.graph);
        let vmap = other.vmap.iter().map(|&v| self.vmap[v]).collect();
        let mut images = Vec::new();
        let mut pieces = Vec::new();
        for k in 0..self.graph.pair_count() {
            let mut img = Vec::new();
            let mut lens = Vec::new();
            for (&e, l) in other.images[k].iter().zip(other.pieces[k].iter()) {
                for (x, sl) in self.image(e).into_iter().zip(self.pieces(e)) {
                    img.push(x);
                    lens.push(l * &sl);
                }
            }
            images.push(img);
            pieces.push(lens);
        }
        GraphMap { graph: self.graph.clone(), vmap, images, pieces }
    }

    /// `f^m` as a graph map (untightened images, composed linear structure).
    pub fn power(&self, m: usize) -> GraphMap {
        let mut acc = self.identity_map();
        for _ in 0..m {
            acc = self.compose(&acc);
        }
        acc
    }

    /// The identity map of the same graph.
    pub fn identity_map(&self) -> GraphMap {
        let images = (0..self.graph.pair_count()).map(|k| alloc::vec![2 * k as EdgeId]).collect();
        let pieces = (0..self.graph.pair_count()).map(|_| alloc::vec![rat(1)]).collect();
        GraphMap { graph: self.graph.clone(), vmap: (0..self.graph.vertex_count()).collect(), images, pieces }
    }

    /// Image of a point: returns the image edge and offset.
    pub fn map_point(&self, e: EdgeId, offset: &Rational) -> (EdgeId, Rational) {
        let img = self.image(e);
        let lens = self.pieces(e);
        let mut acc = Rational::zero();
        for (i, (&x, l)) in img.iter().zip(lens.iter()).enumerate() {
            let next = &acc + l;
            if *offset < next || i + 1 == img.len() {
                let u = (offset - &acc) / l;
                return (x, u);
            }
            acc = next;
        }
        unreachable!("degenerate edge image")
    }
}

/// Edge id of a rose letter.
pub fn letter_to_edge(l: i32) -> EdgeId {
    let k = (l.unsigned_abs() - 1) as EdgeId;
    if l > 0 {
        2 * k
    } else {
        2 * k + 1
    }
}

/// Rose letter of an edge id.
pub fn edge_to_letter(e: EdgeId) -> i32 {
    let k = pair(e) as i32 + 1;
    if is_positive(e) {
        k
    } else {
        -k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;

    fn rose(imgs: &[&str]) -> GraphMap {
        let ws: Vec<_> = imgs.iter().map(|s| parse_word(s).unwrap()).collect();
        GraphMap::rose(&ws)
    }

    #[test]
    fn map_tight_examples() {
        let f = rose(&["a", "ba"]);
        let g = f.graph().clone();
        assert_eq!(f.map_tight(&g.parse_path(0, "ba").unwrap()).display(&g), "baa");
        assert_eq!(f.map_tight(&EdgePath::trivial(0)), EdgePath::trivial(0));
        let f2 = rose(&["ab", "a"]);
        assert_eq!(f2.map_tight(&g.parse_path(0, "aB").unwrap()).display(&g), "abA");
    }

    #[test]
    fn derivative_and_turns() {
        let f = rose(&["ab", "a"]);
        assert_eq!(f.derivative(0), Some(0));
        assert_eq!(f.derivative(3), Some(1));
        assert_eq!(f.turn_image(turn(1, 2)), Some(turn(3, 0)));
        assert!(!f.is_legal_turn((0, 0)));
        assert!(f.is_legal_turn(turn(1, 2)));
        assert!(!f.is_legal_turn(turn(0, 2)));
    }

    #[test]
    fn transition_matrices() {
        assert_eq!(rose(&["a", "ba"]).transition_matrix(&[0, 1]), alloc::vec![alloc::vec![1, 1], alloc::vec![0, 1]]);
        assert_eq!(rose(&["ab", "a"]).transition_matrix(&[0, 1]), alloc::vec![alloc::vec![1, 1], alloc::vec![1, 0]]);
        assert_eq!(rose(&["a", "b"]).transition_matrix(&[0, 1]), alloc::vec![alloc::vec![1, 0], alloc::vec![0, 1]]);
    }

    #[test]
    fn power_pieces_multiply() {
        let f = rose(&["ab", "a"]);
        let f2 = f.power(2);
        assert_eq!(f2.image(0), alloc::vec![0, 2, 0]);
        assert_eq!(f2.pieces(0), alloc::vec![crate::poly::ratio(1, 4), crate::poly::ratio(1, 4), crate::poly::ratio(1, 2)]);
    }
}
