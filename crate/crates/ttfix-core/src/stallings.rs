//! Stallings graphs of finitely generated subgroups of free groups.
//!
//! Used as an independent oracle: rank computation, membership, and
//! equality of subgroups.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::word::{Letter, Word};

/// A folded, labelled, based core graph representing a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupGraph {
    base: usize,
    /// `out[u][l] = v` for every labelled edge (both orientations stored).
    out: Vec<BTreeMap<Letter, usize>>,
}

struct Folder {
    parent: Vec<usize>,
    adj: Vec<BTreeMap<Letter, usize>>,
    pending: Vec<(usize, Letter, usize)>,
}

impl Folder {
    fn new() -> Self {
        Folder { parent: Vec::new(), adj: Vec::new(), pending: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn edge(&mut self, u: usize, l: Letter, v: usize) {
        self.pending.push((u, l, v));
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((u, l, v)) = self.pending.pop() {
            let u = self.find(u);
            let v = self.find(v);
            match self.adj[u].get(&l).copied() {
                Some(t) => {
                    let t = self.find(t);
                    if t != v {
                        self.merge(t, v);
                    }
                }
                None => match self.adj[v].get(&-l).copied() {
                    Some(s) if self.find(s) != u => {
                        let s = self.find(s);
                        self.merge(s, u);
                    }
                    _ => {
                        self.adj[u].insert(l, v);
                        self.adj[v].insert(-l, u);
                    }
                },
            }
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.parent[b] = a;
        let moved = core::mem::take(&mut self.adj[b]);
        for (l, t) in moved {
            self.pending.push((a, l, t));
        }
    }
}

/// Folds the labelled graph with `vertex_count` vertices and the given
/// edges `(u, label, v)` completely, and returns the number of edges that
/// were identified along the way.
pub fn fold_count(vertex_count: usize, edges: &[(usize, Letter, usize)]) -> usize {
    let mut f = Folder::new();
    for _ in 0..vertex_count {
        f.vertex();
    }
    for &(u, l, v) in edges {
        f.edge(u, l, v);
    }
    let mut remaining = 0;
    for u in 0..vertex_count {
        if f.find(u) == u {
            remaining += f.adj[u].len();
        }
    }
    edges.len() - remaining / 2
}

/// Builds the folded core graph of the subgroup generated by `words`.
pub fn stallings_graph(words: &[Word]) -> SubgroupGraph {
    let mut f = Folder::new();
    let base = f.vertex();
    for w in words {
        let n = w.len();
        if n == 0 {
            continue;
        }
        let mut prev = base;
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == n { base } else { f.vertex() };
            f.edge(prev, l, next);
            prev = next;
        }
    }
    // Collect representatives reachable from the base.
    let root = f.find(base);
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order = alloc::vec![root];
    index.insert(root, 0);
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        let targets: Vec<usize> = f.adj[u].values().copied().collect();
        for t in targets {
            let t = f.find(t);
            if !index.contains_key(&t) {
                index.insert(t, order.len());
                order.push(t);
            }
        }
        i += 1;
    }
    let mut out: Vec<BTreeMap<Letter, usize>> = alloc::vec![BTreeMap::new(); order.len()];
    for (k, &u) in order.iter().enumerate() {
        let entries: Vec<(Letter, usize)> = f.adj[u].iter().map(|(&l, &t)| (l, t)).collect();
        for (l, t) in entries {
            let t = f.find(t);
            out[k].insert(l, index[&t]);
        }
    }
    let mut g = SubgroupGraph { base: 0, out };
    g.prune();
    g
}

impl SubgroupGraph {
    fn prune(&mut self) {
        let n = self.out.len();
        let mut alive = alloc::vec![true; n];
        loop {
            let mut changed = false;
            for u in 0..n {
                if !alive[u] || u == self.base {
                    continue;
                }
                let deg = self.out[u].len();
                if deg <= 1 {
                    alive[u] = false;
                    changed = true;
                    let entries: Vec<(Letter, usize)> = self.out[u].iter().map(|(&l, &t)| (l, t)).collect();
                    for (l, t) in entries {
                        self.out[t].remove(&-l);
                    }
                    self.out[u].clear();
                }
            }
            if !changed {
                break;
            }
        }
        let mut index = alloc::vec![usize::MAX; n];
        let mut k = 0;
        for u in 0..n {
            if alive[u] {
                index[u] = k;
                k += 1;
            }
        }
        let mut out = Vec::with_capacity(k);
        for u in 0..n {
            if alive[u] {
                out.push(self.out[u].iter().map(|(&l, &t)| (l, index[t])).collect());
            }
        }
        self.base = index[self.base];
        self.out = out;
    }

    /// Number of vertices of the core.
    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    /// Number of (unoriented) edges of the core.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Rank of the subgroup: `E − V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// True iff `w` lies in the subgroup.
    pub fn contains(&self, w: &Word) -> bool {
        let mut v = self.base;
        for l in w.letters() {
            match self.out[v].get(l) {
                Some(&t) => v = t,
                None => return false,
            }
        }
        v == self.base
    }

    /// A free basis read off a breadth-first spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let n = self.out.len();
        let mut path: Vec<Option<Word>> = alloc::vec![None; n];
        path[self.base] = Some(Word::empty());
        let mut queue = alloc::vec![self.base];
        let mut tree: Vec<(usize, Letter)> = Vec::new();
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i];
            for (&l, &t) in &self.out[u] {
                if path[t].is_none() {
                    path[t] = Some(path[u].as_ref().unwrap().mul(&Word::letter(l)));
                    tree.push((u, l));
                    tree.push((t, -l));
                    queue.push(t);
                }
            }
            i += 1;
        }
        let mut basis = Vec::new();
        for u in 0..n {
            for (&l, &t) in &self.out[u] {
                if l < 0 || tree.contains(&(u, l)) {
                    continue;
                }
                let pu = path[u].as_ref().unwrap();
                let pt = path[t].as_ref().unwrap();
                basis.push(pu.mul(&Word::letter(l)).mul(&pt.inverse()));
            }
        }
        basis
    }
}

/// True iff the two graphs represent the same subgroup.
pub fn same_subgroup(g1: &SubgroupGraph, g2: &SubgroupGraph) -> bool {
    g1.basis().iter().all(|w| g2.contains(w)) && g2.basis().iter().all(|w| g1.contains(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;
    use alloc::vec;

    fn g(ws: &[&str]) -> SubgroupGraph {
        let words: Vec<Word> = ws.iter().map(|s| parse_word(s).unwrap()).collect();
        stallings_graph(&words)
    }

    #[test]
    fn ranks() {
        assert_eq!(g(&["a", "baB"]).rank(), 2);
        assert_eq!(g(&[]).rank(), 0);
        assert_eq!(g(&[]).vertex_count(), 1);
        assert_eq!(g(&["aa"]).rank(), 1);
        assert_eq!(g(&["a", "aa", "A"]).rank(), 1);
    }

    #[test]
    fn equality() {
        assert!(same_subgroup(&g(&["a", "baB"]), &g(&["A", "baB"])));
        assert!(!same_subgroup(&g(&["a"]), &g(&["aa"])));
        assert!(same_subgroup(&g(&["a", "b"]), &g(&["ab", "b"])));
    }

    #[test]
    fn membership() {
        let h = g(&["a", "baB"]);
        assert!(h.contains(&parse_word("baaBa").unwrap()));
        assert!(!h.contains(&parse_word("b").unwrap()));
        assert!(h.contains(&Word::empty()));
        let basis = h.basis();
        assert_eq!(basis.len(), 2);
        assert!(same_subgroup(&stallings_graph(&basis), &h));
        let _ = vec![0];
    }
}
