//! Plain-text automorphisms.
//!
//! ```text
//! # comments start with '#'
//! a -> a
//! b -> b a
//! inverse:
//! a -> a
//! b -> b A
//! ```
//!
//! Generators are the lowercase letters `a, b, c, …`; uppercase letters are
//! their inverses and `1` (or nothing) is the empty word.  Every generator
//! of the rank must have exactly one image, and the inverse block, when
//! present, must really describe the inverse automorphism.

use ttfix_core::error::{Error, Result};
use ttfix_core::word::{verify_inverse_pair, Automorphism, Letter, Word};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// One block of `gen -> word` lines.
struct Block {
    images: Vec<Option<Word>>,
    first_line: usize,
}

impl Block {
    fn new(first_line: usize) -> Self {
        Block { images: Vec::new(), first_line }
    }

    fn add(&mut self, line_no: usize, line: &str) -> Result<()> {
        let Some(arrow) = line.find("->") else {
            return Err(parse_error(line_no, 1, "expected `generator -> word`"));
        };
        let lhs = line[..arrow].trim();
        let lhs_col = line.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let mut chars = lhs.chars();
        let g = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => (c as u8 - b'a') as usize,
            _ => return Err(parse_error(line_no, lhs_col, format!("`{lhs}` is not a generator (a–z)"))),
        };
        if self.images.len() <= g {
            self.images.resize(g + 1, None);
        }
        if self.images[g].is_some() {
            return Err(parse_error(line_no, lhs_col, format!("generator `{lhs}` defined twice")));
        }
        let rhs_start = arrow + 2;
        let mut letters: Vec<Letter> = Vec::new();
        let rhs = &line[rhs_start..];
        if rhs.trim() != "1" {
            for (i, c) in rhs.char_indices() {
                let col = rhs_start + i + 1;
                if c.is_whitespace() || c == '.' || c == '*' {
                    continue;
                }
                let l = if c.is_ascii_lowercase() {
                    (c as u8 - b'a' + 1) as Letter
                } else if c.is_ascii_uppercase() {
                    -((c as u8 - b'A' + 1) as Letter)
                } else {
                    return Err(parse_error(line_no, col, format!("unexpected character `{c}`")));
                };
                letters.push(l);
            }
        }
        self.images[g] = Some(Word::from_letters(letters));
        Ok(())
    }

    /// Checks completeness and that every letter is a known generator.
    fn finish(self, source: &str) -> Result<Vec<Word>> {
        let rank = self.images.len();
        if rank == 0 {
            return Err(parse_error(self.first_line, 1, "no generator images"));
        }
        let mut out = Vec::with_capacity(rank);
        for (g, img) in self.images.into_iter().enumerate() {
            let name = (b'a' + g as u8) as char;
            let w = img.ok_or_else(|| parse_error(self.first_line, 1, format!("missing image of `{name}`")))?;
            if let Some(&bad) = w.letters().iter().find(|l| l.unsigned_abs() as usize > rank) {
                let c = if bad > 0 { (b'a' + bad as u8 - 1) as char } else { (b'A' + (-bad) as u8 - 1) as char };
                let (line, column) = locate(source, name, c).unwrap_or((self.first_line, 1));
                return Err(parse_error(line, column, format!("unknown generator `{c}` (rank is {rank})")));
            }
            out.push(w);
        }
        Ok(out)
    }
}

/// Line and column of the first `c` on the right-hand side of `name`'s line.
fn locate(source: &str, name: char, c: char) -> Option<(usize, usize)> {
    for (i, line) in source.lines().enumerate() {
        let t = line.trim_start();
        if t.starts_with(name) && t.contains("->") {
            let arrow = line.find("->")?;
            if let Some(p) = line[arrow..].find(c) {
                return Some((i + 1, arrow + p + 1));
            }
        }
    }
    None
}

/// Parsed automorphism text.
#[derive(Clone, Debug)]
pub struct ParsedAutomorphism {
    /// The automorphism, with its inverse attached when one was given.
    pub phi: Automorphism,
    /// Whether an `inverse:` block was present.
    pub has_inverse: bool,
}

/// Parses the text format.  A given inverse block is verified.
pub fn parse_automorphism(text: &str) -> Result<ParsedAutomorphism> {
    let mut forward = Block::new(1);
    let mut inverse: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if line.trim().eq_ignore_ascii_case("inverse:") {
            if inverse.is_some() {
                return Err(parse_error(line_no, 1, "second `inverse:` block"));
            }
            inverse = Some(Block::new(line_no));
            continue;
        }
        match inverse.as_mut() {
            Some(b) => b.add(line_no, line)?,
            None => forward.add(line_no, line)?,
        }
    }
    let images = forward.finish(text)?;
    let rank = images.len();
    let phi = Automorphism::new(rank, images)?;
    match inverse {
        None => Ok(ParsedAutomorphism { phi, has_inverse: false }),
        Some(b) => {
            let line = b.first_line;
            let inv_images = b.finish(text)?;
            if inv_images.len() != rank {
                return Err(parse_error(line, 1, "the inverse block has a different rank"));
            }
            let psi = Automorphism::new(rank, inv_images.clone())?;
            if !verify_inverse_pair(&phi, &psi) {
                return Err(parse_error(line, 1, "the inverse block is not the inverse automorphism"));
            }
            Ok(ParsedAutomorphism { phi: phi.with_inverse(inv_images)?, has_inverse: true })
        }
    }
}

/// Writes an automorphism (and its declared inverse) in the text format.
pub fn format_automorphism(phi: &Automorphism) -> String {
    let mut out = String::new();
    let block = |out: &mut String, a: &Automorphism| {
        for (i, w) in a.images().iter().enumerate() {
            out.push_str(&format!("{} -> {}\n", (b'a' + i as u8) as char, w));
        }
    };
    block(&mut out, phi);
    if let Some(psi) = phi.declared_inverse() {
        out.push_str("inverse:\n");
        block(&mut out, &psi);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_twist_with_inverse() {
        let p = parse_automorphism("a -> a\nb -> b a\ninverse:\na -> a\nb -> b A\n").unwrap();
        assert!(p.has_inverse);
        assert_eq!(p.phi.rank(), 2);
        assert_eq!(format_automorphism(&p.phi), "a -> a\nb -> ba\ninverse:\na -> a\nb -> bA\n");
    }

    #[test]
    fn reports_unknown_generators_with_location() {
        match parse_automorphism("a -> a\nb -> b c\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_a_wrong_inverse() {
        assert!(matches!(
            parse_automorphism("a -> a\nb -> ba\ninverse:\na -> a\nb -> ba\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse_automorphism("a = b\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_automorphism("a -> b\nb -> a\nb -> a\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_automorphism("a -> a\nc -> c\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_automorphism("a -> a%\n"), Err(Error::Parse { line: 1, column: 7, .. })));
    }
}
