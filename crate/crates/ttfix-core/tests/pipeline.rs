//! End-to-end checks of the fixed-subgroup pipeline against brute force.

use ttfix_core::core_builder::{fix_basis, fix_basis_pipeline};
use ttfix_core::corpus::corpus;
use ttfix_core::error::Error;
use ttfix_core::orbit::DEFAULT_HORIZON;
use ttfix_core::stallings::{same_subgroup, stallings_graph};
use ttfix_core::track::{TrackOptions, TrainTrack};
use ttfix_core::word::{apply, brute_force_fixed_words, parse_word, Automorphism, Word};

fn auto(images: &[&str], inverse: &[&str]) -> Automorphism {
    let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
    Automorphism::new(images.len(), w(images)).unwrap().with_inverse(w(inverse)).unwrap()
}

#[test]
fn known_fixed_subgroups() {
    let cases: [(&[&str], &[&str], &[&str]); 4] = [
        (&["a", "ba"], &["a", "bA"], &["a", "baB"]),
        (&["ab", "a"], &["b", "Ba"], &[]),
        (&["A", "b"], &["A", "b"], &["b"]),
        (&["a", "b", "cab"], &["a", "b", "cBA"], &["a", "b", "cBAC"]),
    ];
    for (images, inverse, expected) in cases {
        let phi = auto(images, inverse);
        let basis = fix_basis_pipeline(&phi, TrackOptions::default(), DEFAULT_HORIZON, 0).unwrap();
        let expected: Vec<Word> = expected.iter().map(|w| parse_word(w).unwrap()).collect();
        assert!(
            same_subgroup(&stallings_graph(&basis.words), &stallings_graph(&expected)),
            "{images:?}: {:?}",
            basis.words
        );
    }
}

#[test]
fn corpus_bases_are_fixed_free_and_complete() {
    let mut solved = 0;
    for phi in corpus(99, 24, 4) {
        let tt = match TrainTrack::from_automorphism(&phi, TrackOptions::default()) {
            Ok(tt) => tt,
            Err(Error::NotATrainTrack(_)) | Err(Error::BoundExhausted(_)) => continue,
            Err(e) => panic!("{:?}: {e}", phi.images()),
        };
        let basis = fix_basis(&tt, DEFAULT_HORIZON, 5).unwrap();
        let sg = stallings_graph(&basis.words);
        assert!(basis.words.len() <= phi.rank());
        assert_eq!(sg.rank(), basis.words.len());
        for w in &basis.words {
            assert_eq!(&apply(&phi, w), w);
        }
        for w in brute_force_fixed_words(&phi, 6) {
            assert!(sg.contains(&w), "{:?}: {w} missing from {:?}", phi.images(), basis.words);
        }
        solved += 1;
    }
    assert!(solved >= 12, "only {solved} corpus inputs had a rose train track");
}
