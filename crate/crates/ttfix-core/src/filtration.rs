//! Filtrations by invariant subgraphs, stratum classification,
//! Perron–Frobenius data and the stratum length functions `L_r`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::algebraic::{AlgebraicScalar, NumberField};
use crate::error::{Error, Result};
use crate::graph::{pair, EdgeId, EdgePath};
use crate::map::GraphMap;
use crate::poly::{char_poly, Poly};

/// Growth class of a stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StratumClass {
    /// Irreducible transition matrix with Perron–Frobenius eigenvalue `> 1`.
    Exponential,
    /// Transition matrix is a permutation matrix.
    Polynomial,
    /// Transition matrix is zero.
    Zero,
}

/// Perron–Frobenius data of an exponential stratum.
#[derive(Clone, Debug)]
pub struct PfData {
    /// Field generated by `λ`.
    pub field: Arc<NumberField>,
    /// The eigenvalue `λ`.
    pub lambda: AlgebraicScalar,
    /// Positive left eigenvector, aligned with the stratum's pair order.
    pub eigenvector: Vec<AlgebraicScalar>,
    /// Characteristic polynomial of the stratum matrix.
    pub char_poly: Poly,
}

/// One stratum `H_i`.
#[derive(Clone, Debug)]
pub struct Stratum {
    /// Edge pairs of the stratum.
    pub pairs: Vec<usize>,
    /// Class tag.
    pub class: StratumClass,
    /// Eigen data for exponential strata.
    pub pf: Option<PfData>,
}

/// A filtration `∅ = G_0 ⊂ G_1 ⊂ … ⊂ G_N = Γ`.
#[derive(Clone, Debug)]
pub struct Filtration {
    strata: Vec<Stratum>,
    stratum_of: Vec<usize>,
}

/// Perron–Frobenius eigenvalue and positive left eigenvector of an
/// irreducible nonnegative integer matrix.
pub fn pf_eigen(m: &[Vec<i64>]) -> Result<(Arc<NumberField>, Vec<AlgebraicScalar>)> {
    let n = m.len();
    if n == 0 || m.iter().all(|r| r.iter().all(|&x| x == 0)) {
        return Err(Error::Invalid("zero matrix has no Perron–Frobenius data".into()));
    }
    if !is_irreducible(m) {
        return Err(Error::Invalid("matrix is reducible".into()));
    }
    let cp = char_poly(m);
    let field = NumberField::largest_real_root(&cp).ok_or_else(|| Error::Internal("no real root".into()))?;
    let lambda = AlgebraicScalar::lambda(&field);
    // Solve (Mᵀ − λI) x = 0.
    let mut a: Vec<Vec<AlgebraicScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = AlgebraicScalar::from_int(&field, m[j][i]);
                    if i == j {
                        &v - &lambda
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].inverse().expect("nonzero pivot");
        for j in 0..n {
            a[row][j] = &a[row][j] * &inv;
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[row][j];
                    a[r][j] = &a[r][j] - &t;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    if pivots.len() != n - 1 {
        return Err(Error::Internal("Perron–Frobenius eigenspace is not one-dimensional".into()));
    }
    let free = (0..n).find(|c| pivots.iter().all(|&(_, pc)| pc != *c)).unwrap();
    let mut v = alloc::vec![AlgebraicScalar::zero(&field); n];
    v[free] = AlgebraicScalar::from_int(&field, 1);
    for &(r, c) in &pivots {
        v[c] = -&a[r][free];
    }
    // Normalise so that the last coordinate is 1.
    let last = v[n - 1].inverse().ok_or_else(|| Error::Internal("eigenvector has a zero entry".into()))?;
    for x in v.iter_mut() {
        *x = &*x * &last;
    }
    if !v.iter().all(AlgebraicScalar::is_positive) {
        return Err(Error::Internal("eigenvector is not positive".into()));
    }
    Ok((field, v))
}

fn is_irreducible(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    for s in 0..n {
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![s];
        seen[s] = true;
        while let Some(j) = stack.pop() {
            for i in 0..n {
                if m[i][j] > 0 && !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        if !seen.iter().all(|&x| x) {
            return false;
        }
    }
    true
}

fn is_permutation(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].iter().sum::<i64>() == 1 && m[i].iter().all(|&x| x == 0 || x == 1))
        && (0..n).all(|j| (0..n).map(|i| m[i][j]).sum::<i64>() == 1)
}

fn classify(f: &GraphMap, pairs: &[usize]) -> Result<Stratum> {
    let m = f.transition_matrix(pairs);
    if m.iter().all(|r| r.iter().all(|&x| x == 0)) {
        if pairs.len() != 1 {
            return Err(Error::Invalid("zero stratum with more than one edge pair is not maximal".into()));
        }
        return Ok(Stratum { pairs: pairs.to_vec(), class: StratumClass::Zero, pf: None });
    }
    if !is_irreducible(&m) {
        return Err(Error::Invalid("stratum transition matrix is reducible".into()));
    }
    if is_permutation(&m) {
        return Ok(Stratum { pairs: pairs.to_vec(), class: StratumClass::Polynomial, pf: None });
    }
    let (field, eigenvector) = pf_eigen(&m)?;
    let lambda = AlgebraicScalar::lambda(&field);
    let char_poly = char_poly(&m);
    Ok(Stratum {
        pairs: pairs.to_vec(),
        class: StratumClass::Exponential,
        pf: Some(PfData { field, lambda, eigenvector, char_poly }),
    })
}

/// The maximal filtration: strongly connected components of the edge
/// occurrence digraph, ordered so that every `G_i` is invariant.
pub fn maximal_filtration(f: &GraphMap) -> Result<Filtration> {
    let n = f.graph().pair_count();
    // succ[j] = pairs occurring in f(E_j)
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let mut s: Vec<usize> = f.images()[j].iter().map(|&e| pair(e)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let comps = tarjan(&succ);
    // Tarjan emits components in reverse topological order: a component is
    // emitted only after everything it reaches.
    let mut strata = Vec::new();
    for mut c in comps {
        c.sort_unstable();
        strata.push(c);
    }
    Filtration::from_strata(f, strata)
}

fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut St, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on[v] = true;
        for k in 0..s.succ[v].len() {
            let w = s.succ[v][k];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(comp);
        }
    }
    let n = succ.len();
    let mut s = St {
        succ,
        index: alloc::vec![None; n],
        low: alloc::vec![0; n],
        on: alloc::vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

impl Filtration {
    /// Validates a proposed filtration (list of strata, bottom first).
    pub fn from_strata(f: &GraphMap, strata_pairs: Vec<Vec<usize>>) -> Result<Filtration> {
        let n = f.graph().pair_count();
        let mut stratum_of = alloc::vec![usize::MAX; n];
        for (i, s) in strata_pairs.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Invalid("empty stratum".into()));
            }
            for &p in s {
                if p >= n || stratum_of[p] != usize::MAX {
                    return Err(Error::Invalid("strata must partition the edge pairs".into()));
                }
                stratum_of[p] = i;
            }
        }
        if stratum_of.iter().any(|&s| s == usize::MAX) {
            return Err(Error::Invalid("strata must cover every edge pair".into()));
        }
        for k in 0..n {
            for &e in &f.images()[k] {
                if stratum_of[pair(e)] > stratum_of[k] {
                    return Err(Error::Invalid(alloc::format!(
                        "filtration is not invariant: f({}) leaves G_{}",
                        f.graph().edge_name(2 * k as EdgeId),
                        stratum_of[k] + 1
                    )));
                }
            }
        }
        let strata = strata_pairs.iter().map(|s| classify(f, s)).collect::<Result<Vec<_>>>()?;
        Ok(Filtration { strata, stratum_of })
    }

    /// Strata, bottom first.
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Stratum index (0-based) of an edge.
    pub fn stratum_of(&self, e: EdgeId) -> usize {
        self.stratum_of[pair(e)]
    }

    /// Height of a path: the smallest `r` with the path in `G_r`
    /// (`None` for trivial paths).
    pub fn height(&self, p: &[EdgeId]) -> Option<usize> {
        p.iter().map(|&e| self.stratum_of(e)).max()
    }

    /// Indices of exponential strata.
    pub fn exponential_strata(&self) -> Vec<usize> {
        (0..self.strata.len()).filter(|&i| self.strata[i].class == StratumClass::Exponential).collect()
    }

    /// `L_r` of a single edge (zero below `H_r`).
    pub fn lr_edge(&self, r: usize, e: EdgeId) -> AlgebraicScalar {
        let s = &self.strata[r];
        let pf = s.pf.as_ref().expect("L_r is only defined for exponential strata");
        match s.pairs.iter().position(|&p| p == pair(e)) {
            Some(i) => pf.eigenvector[i].clone(),
            None => AlgebraicScalar::zero(&pf.field),
        }
    }

    /// `L_r(p)`; errors if `p` leaves `G_r`.
    pub fn lr(&self, r: usize, p: &EdgePath) -> Result<AlgebraicScalar> {
        self.lr_edges(r, &p.edges)
    }

    /// `L_r` of an edge sequence.
    pub fn lr_edges(&self, r: usize, p: &[EdgeId]) -> Result<AlgebraicScalar> {
        let s = &self.strata[r];
        let pf = s.pf.as_ref().ok_or_else(|| Error::Invalid("stratum is not exponential".into()))?;
        let mut acc = Poly::zero();
        for &e in p {
            let h = self.stratum_of(e);
            if h > r {
                return Err(Error::Invalid("path leaves G_r".into()));
            }
            if h == r {
                let i = s.pairs.iter().position(|&q| q == pair(e)).unwrap();
                acc = acc.add(pf.eigenvector[i].poly());
            }
        }
        Ok(AlgebraicScalar::from_poly(&pf.field, acc))
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
    fn filtrations_of_examples() {
        let f1 = maximal_filtration(&rose(&["a", "ba"])).unwrap();
        assert_eq!(f1.strata().len(), 2);
        assert_eq!(f1.strata()[0].pairs, alloc::vec![0]);
        assert!(f1.strata().iter().all(|s| s.class == StratumClass::Polynomial));
        let f2 = maximal_filtration(&rose(&["ab", "a"])).unwrap();
        assert_eq!(f2.strata().len(), 1);
        assert_eq!(f2.strata()[0].class, StratumClass::Exponential);
        let id = maximal_filtration(&rose(&["a", "b", "c"])).unwrap();
        assert_eq!(id.strata().len(), 3);
    }

    #[test]
    fn pf_of_fibonacci() {
        let (k, v) = pf_eigen(&[alloc::vec![1, 1], alloc::vec![1, 0]]).unwrap();
        let l = AlgebraicScalar::lambda(&k);
        assert!(v[0] == l);
        assert!(v[1] == AlgebraicScalar::from_int(&k, 1));
        let (k, v) = pf_eigen(&[alloc::vec![2]]).unwrap();
        assert_eq!(k.exact_value(), Some(&crate::poly::rat(2)));
        assert!(v[0] == AlgebraicScalar::from_int(&k, 1));
    }

    #[test]
    fn lr_of_fibonacci_paths() {
        let f = rose(&["ab", "a"]);
        let filt = maximal_filtration(&f).unwrap();
        let g = f.graph();
        let ab = g.parse_path(0, "ab").unwrap();
        let pf = filt.strata()[0].pf.as_ref().unwrap();
        let l = &pf.lambda;
        assert!(filt.lr(0, &ab).unwrap() == l.pow(2));
    }
}
