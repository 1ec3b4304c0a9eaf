//! Property tests for the word, path, subgroup and orbit layers.

use proptest::prelude::*;

use ttfix_core::bcc::{bcc_constant, bcc_holds};
use ttfix_core::corpus::corpus;
use ttfix_core::graph::{inv, tighten, EdgeId, EdgePath, Graph};
use ttfix_core::map::GraphMap;
use ttfix_core::orbit::{OrbitAnswer, OrbitSolver};
use ttfix_core::stallings::stallings_graph;
use ttfix_core::track::{TrackOptions, TrainTrack};
use ttfix_core::word::{apply, parse_word, reduce, Automorphism, Letter, Word};

fn letters(rank: i32, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }), 0..max_len)
}

/// A reduced edge path in a rose, built from arbitrary edge choices.
fn rose_path(g: &Graph, choices: &[usize]) -> EdgePath {
    let mut p = EdgePath::trivial(0);
    for &c in choices {
        let next: Vec<EdgeId> = g.edges().filter(|&e| Some(e) != p.last().map(inv)).collect();
        p.edges.push(next[c % next.len()]);
    }
    p
}

fn track(images: &[&str], inverse: &[&str]) -> TrainTrack {
    let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
    let phi = Automorphism::new(images.len(), w(images)).unwrap().with_inverse(w(inverse)).unwrap();
    TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap()
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_inverse_cancels(ls in letters(3, 24)) {
        let w = reduce(ls.clone());
        prop_assert_eq!(reduce(w.letters().to_vec()), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn products_invert_in_reverse_order(a in letters(3, 12), b in letters(3, 12)) {
        let (a, b) = (reduce(a), reduce(b));
        prop_assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
    }

    #[test]
    fn automorphisms_are_homomorphisms_with_declared_inverses(seed in 0u64..500, a in letters(3, 10), b in letters(3, 10)) {
        let phi = corpus(seed, 2, 5).pop().unwrap();
        let psi = phi.declared_inverse().unwrap();
        let bound = |w: Vec<Letter>| Word::from_letters(w.into_iter().filter(|l| l.unsigned_abs() as usize <= phi.rank()));
        let (a, b) = (bound(a), bound(b));
        prop_assert_eq!(apply(&phi, &a.mul(&b)), apply(&phi, &a).mul(&apply(&phi, &b)));
        prop_assert_eq!(apply(&psi, &apply(&phi, &a)), a);
    }

    #[test]
    fn subgroup_graphs_contain_products_of_generators(
        gens in prop::collection::vec(letters(2, 6), 1..4),
        picks in prop::collection::vec((0usize..4, any::<bool>()), 0..6),
    ) {
        let gens: Vec<Word> = gens.into_iter().map(reduce).filter(|w| !w.is_empty()).collect();
        prop_assume!(!gens.is_empty());
        let sg = stallings_graph(&gens);
        prop_assert!(sg.rank() <= gens.len());
        let mut w = Word::empty();
        for (i, inverse) in picks {
            let g = &gens[i % gens.len()];
            w = w.mul(&if inverse { g.inverse() } else { g.clone() });
        }
        prop_assert!(sg.contains(&w));
    }

    #[test]
    fn tightening_commutes_with_the_map(choices in prop::collection::vec(0usize..8, 0..10)) {
        let f = GraphMap::rose(&[parse_word("ab").unwrap(), parse_word("a").unwrap()]);
        let g = f.graph();
        let p = rose_path(g, &choices);
        let back = rose_path(g, &choices[..choices.len() / 2]).inverse(g);
        let loose = EdgePath { start: 0, edges: p.edges.iter().chain(&back.edges).copied().collect() };
        let t = tighten(&loose);
        prop_assert_eq!(tighten(&t), t.clone());
        prop_assert!(t.is_reduced());
        prop_assert_eq!(f.map_tight(&loose), f.map_tight(&t));
    }

    #[test]
    fn bounded_cancellation_on_the_fibonacci_rose(a in prop::collection::vec(0usize..8, 1..10), b in prop::collection::vec(0usize..8, 1..10)) {
        let f = GraphMap::rose(&[parse_word("ab").unwrap(), parse_word("a").unwrap()]);
        let g = f.graph();
        let (p, mut q) = (rose_path(g, &a), rose_path(g, &b));
        while !q.is_empty() && q.first() == p.last().map(inv) {
            q.edges.remove(0);
        }
        prop_assert!(bcc_holds(&f, bcc_constant(&f), &p, &q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbit_reach_agrees_with_iteration(which in 0usize..2, start in prop::collection::vec(0usize..8, 1..5), k in 0usize..6, other in prop::collection::vec(0usize..8, 1..7)) {
        let tt = if which == 0 { track(&["a", "ba"], &["a", "bA"]) } else { track(&["ab", "a"], &["b", "Ba"]) };
        let g = tt.graph();
        let solver = OrbitSolver::new(&tt);
        let rho = rose_path(g, &start);
        let orbit: Vec<EdgePath> = (0..12).map(|i| tt.f.iterate_tight(&rho, i)).collect();
        match solver.reach(&rho, &orbit[k], 1000) {
            OrbitAnswer::Yes(j) => prop_assert_eq!(&orbit[j], &orbit[k]),
            other => prop_assert!(false, "expected a hit, got {:?}", other),
        }
        let tau = rose_path(g, &other);
        match solver.reach(&rho, &tau, 1000) {
            OrbitAnswer::Yes(j) => prop_assert!(j < orbit.len() && orbit[j] == tau),
            OrbitAnswer::No => prop_assert!(!orbit.contains(&tau)),
            _ => {}
        }
    }
}
