//! Reduced words in a free group, automorphisms, and brute-force oracles.
//!
//! A letter is a nonzero `i32`: `+i` is the generator `x_i` (1-based) and
//! `-i` its inverse.  Words are always kept freely reduced.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A signed generator index (`+i` = x_i, `-i` = x_i⁻¹).
pub type Letter = i32;

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// The word consisting of a single generator (or inverse).
    pub fn letter(l: Letter) -> Self {
        assert!(l != 0, "letter 0 is not a generator");
        Word(alloc::vec![l])
    }

    /// Builds a word from arbitrary letters, reducing freely.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        reduce(letters)
    }

    /// Letters of the word.
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Length `|w|`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the identity element.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The inverse word.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// The reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// Letters print as `a..z` (inverses uppercase) for ranks up to 26,
/// and as `x12`/`X12` otherwise.  The empty word prints as `1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            write_letter(f, l)?;
        }
        Ok(())
    }
}

/// Writes a single letter in the text notation.
pub fn write_letter(f: &mut impl fmt::Write, l: Letter) -> fmt::Result {
    let i = l.unsigned_abs();
    if (1..=26).contains(&i) {
        let base = if l > 0 { b'a' } else { b'A' };
        f.write_char((base + (i - 1) as u8) as char)
    } else if l > 0 {
        write!(f, "x{}", i)
    } else {
        write!(f, "X{}", i)
    }
}

/// Parses the compact notation (`a`..`z`, uppercase inverses, `1` or empty
/// for the identity).
pub fn parse_word(s: &str) -> Result<Word, Error> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for (i, c) in s.chars().enumerate() {
        if c.is_whitespace() || c == '.' || c == '*' {
            continue;
        }
        let l = if c.is_ascii_lowercase() {
            (c as u8 - b'a' + 1) as i32
        } else if c.is_ascii_uppercase() {
            -((c as u8 - b'A' + 1) as i32)
        } else {
            return Err(Error::Parse { line: 1, column: i + 1, message: "unexpected character in word".into() });
        };
        letters.push(l);
    }
    Ok(reduce(letters))
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        debug_assert!(l != 0);
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// An automorphism of `F_n` given by generator images, optionally with a
/// declared inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse: Option<Vec<Word>>,
}

impl Automorphism {
    /// Creates an endomorphism of `F_rank` from the images of `x_1..x_rank`.
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, Error> {
        if images.len() != rank {
            return Err(Error::Invalid("number of images differs from the rank".into()));
        }
        for w in &images {
            if w.max_generator() as usize > rank {
                return Err(Error::Invalid("image uses a generator beyond the rank".into()));
            }
        }
        Ok(Automorphism { rank, images, inverse: None })
    }

    /// Identity automorphism of `F_rank`.
    pub fn identity(rank: usize) -> Self {
        let images: Vec<Word> = (1..=rank as i32).map(Word::letter).collect();
        Automorphism { rank, images: images.clone(), inverse: Some(images) }
    }

    /// Attaches a declared inverse after checking both compositions.
    pub fn with_inverse(mut self, inverse: Vec<Word>) -> Result<Self, Error> {
        let psi = Automorphism::new(self.rank, inverse.clone())?;
        if !verify_inverse_pair(&self, &psi) {
            return Err(Error::Invalid("declared inverse does not invert the map".into()));
        }
        self.inverse = Some(inverse);
        Ok(self)
    }

    /// Rank of the free group.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Images of the generators.
    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of the letter `l`.
    pub fn image_of_letter(&self, l: Letter) -> Word {
        let w = &self.images[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            w.clone()
        } else {
            w.inverse()
        }
    }

    /// The declared inverse, if any.
    pub fn declared_inverse(&self) -> Option<Automorphism> {
        self.inverse.as_ref().map(|inv| Automorphism {
            rank: self.rank,
            images: inv.clone(),
            inverse: Some(self.images.clone()),
        })
    }

    /// Composition `self ∘ other` (first `other`, then `self`).
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        assert_eq!(self.rank, other.rank);
        let images = other.images.iter().map(|w| apply(self, w)).collect();
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => {
                let ia = Automorphism { rank: self.rank, images: a.clone(), inverse: None };
                let ib = Automorphism { rank: self.rank, images: b.clone(), inverse: None };
                Some(ia.images.iter().map(|w| apply(&ib, w)).collect())
            }
            _ => None,
        };
        Automorphism { rank: self.rank, images, inverse }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_letter(f, i as i32 + 1)?;
            write!(f, "↦{}", w)?;
        }
        Ok(())
    }
}

/// Applies `phi` to a word.  Panics if the word uses generators beyond the
/// rank; use [`try_apply`] for a checked version.
pub fn apply(phi: &Automorphism, w: &Word) -> Word {
    reduce(w.letters().iter().flat_map(|&l| phi.image_of_letter(l).0))
}

/// Checked application.
pub fn try_apply(phi: &Automorphism, w: &Word) -> Result<Word, Error> {
    if w.max_generator() as usize > phi.rank {
        return Err(Error::Invalid("generator index out of range".into()));
    }
    Ok(apply(phi, w))
}

/// `max_i |φ(x_i)|`.
pub fn norm(phi: &Automorphism) -> usize {
    phi.images.iter().map(Word::len).max().unwrap_or(0)
}

/// True iff `psi∘phi` and `phi∘psi` are the identity on every generator.
pub fn verify_inverse_pair(phi: &Automorphism, psi: &Automorphism) -> bool {
    if phi.rank != psi.rank {
        return false;
    }
    (1..=phi.rank as i32).all(|i| {
        let x = Word::letter(i);
        apply(psi, &apply(phi, &x)) == x && apply(phi, &apply(psi, &x)) == x
    })
}

/// Visits every reduced word of length `≤ max_len` over `rank` generators.
pub fn for_each_reduced_word(rank: usize, max_len: usize, mut visit: impl FnMut(&Word)) {
    let mut cur: Vec<Letter> = Vec::new();
    fn rec(rank: usize, max_len: usize, cur: &mut Vec<Letter>, visit: &mut dyn FnMut(&Word)) {
        visit(&Word(cur.clone()));
        if cur.len() == max_len {
            return;
        }
        for g in 1..=rank as i32 {
            for l in [g, -g] {
                if cur.last() == Some(&-l) {
                    continue;
                }
                cur.push(l);
                rec(rank, max_len, cur, visit);
                cur.pop();
            }
        }
    }
    rec(rank, max_len, &mut cur, &mut visit);
}

/// All reduced words of length `≤ max_len` fixed by `phi`, by enumeration.
pub fn brute_force_fixed_words(phi: &Automorphism, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for_each_reduced_word(phi.rank, max_len, |w| {
        if apply(phi, w) == *w {
            out.insert(w.clone());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn phi1() -> Automorphism {
        Automorphism::new(2, vec![w("a"), w("ba")]).unwrap()
    }

    fn phi2() -> Automorphism {
        Automorphism::new(2, vec![w("ab"), w("a")]).unwrap()
    }

    #[test]
    fn reduce_cancels_inverse_pairs() {
        assert_eq!(reduce([1, -1]), Word::empty());
        assert_eq!(reduce([1, 2, -2, 1]), w("aa"));
        let r = w("abAB");
        assert_eq!(reduce(r.letters().iter().copied()), r);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&phi1(), &w("baB")), w("baB"));
        assert_eq!(apply(&Automorphism::identity(3), &w("abC")), w("abC"));
        assert_eq!(apply(&phi2(), &w("a")), w("ab"));
        assert!(try_apply(&phi2(), &w("c")).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&Automorphism::identity(3)), 1);
        assert_eq!(norm(&phi1()), 2);
        assert_eq!(norm(&phi2()), 2);
    }

    #[test]
    fn inverse_pairs() {
        let psi = Automorphism::new(2, vec![w("a"), w("bA")]).unwrap();
        assert!(verify_inverse_pair(&phi1(), &psi));
        assert!(!verify_inverse_pair(&phi1(), &phi1()));
        let id = Automorphism::identity(2);
        assert!(verify_inverse_pair(&id, &id));
        assert!(phi1().with_inverse(vec![w("a"), w("ba")]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let got = brute_force_fixed_words(&phi1(), 3);
        let want: BTreeSet<Word> =
            ["1", "a", "A", "aa", "AA", "aaa", "AAA", "baB", "bAB"].iter().map(|s| w(s)).collect();
        assert_eq!(got, want);
        let got = brute_force_fixed_words(&Automorphism::identity(1), 2);
        assert_eq!(got.len(), 5);
        let got = brute_force_fixed_words(&phi2(), 10);
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![Word::empty()]);
    }

    #[test]
    fn display_round_trip() {
        for s in ["1", "abAB", "cbA"] {
            assert_eq!(alloc::format!("{}", w(s)), s);
        }
    }
}
