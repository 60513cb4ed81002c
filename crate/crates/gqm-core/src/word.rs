//! Words over an indexed generating set.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// A single generator occurrence: generator index plus exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }
}

/// A word in the generators of some group spec. Only meaningful relative
/// to a spec that declares the generator count and names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Formal inverse: reversed letters with flipped signs.
    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Shortlex comparison: length first, then letters.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }

    /// Render over the given generator names; inverses are uppercased names.
    pub fn display(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return String::new();
        }
        let mut out = String::new();
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let name = &names[l.gen];
            if l.inv {
                let _ = write!(out, "{}", name.to_uppercase());
            } else {
                let _ = write!(out, "{}", name);
            }
        }
        out
    }
}

/// Parser for element literals: whitespace-separated generator names,
/// uppercase for inverse, `^n` for powers, `[g,h]` sugar for commutators.
pub fn parse_word(input: &str, names: &[String]) -> Result<Word> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let letters = parse_seq(&tokens, &mut pos, names, 0)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!("unexpected token at position {pos}")));
    }
    Ok(Word::from_letters(letters))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    LBracket,
    RBracket,
    Comma,
    Caret,
    Int(i64),
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '[' => {
                chars.next();
                toks.push(Tok::LBracket);
            }
            ']' => {
                chars.next();
                toks.push(Tok::RBracket);
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '^' => {
                chars.next();
                toks.push(Tok::Caret);
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                if c == '-' {
                    s.push(c);
                    chars.next();
                }
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: i64 = s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))?;
                toks.push(Tok::Int(n));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Name(s));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

fn lookup_name(name: &str, names: &[String]) -> Result<Letter> {
    if let Some(i) = names.iter().position(|n| n == name) {
        return Ok(Letter::new(i, false));
    }
    let lowered = name.to_lowercase();
    if lowered != name {
        if let Some(i) = names.iter().position(|n| *n == lowered) {
            return Ok(Letter::new(i, true));
        }
    }
    Err(Error::Parse(format!("unknown generator {name:?}")))
}

fn parse_seq(toks: &[Tok], pos: &mut usize, names: &[String], depth: usize) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    loop {
        match toks.get(*pos) {
            None => break,
            Some(Tok::RBracket) | Some(Tok::Comma) if depth > 0 => break,
            Some(Tok::Name(n)) => {
                *pos += 1;
                let base = vec![lookup_name(n, names)?];
                out.extend(apply_power(toks, pos, base)?);
            }
            Some(Tok::LBracket) => {
                *pos += 1;
                let g = parse_seq(toks, pos, names, depth + 1)?;
                expect(toks, pos, &Tok::Comma)?;
                let h = parse_seq(toks, pos, names, depth + 1)?;
                expect(toks, pos, &Tok::RBracket)?;
                // [g,h] = g h g^-1 h^-1
                let mut base = g.clone();
                base.extend(h.iter().copied());
                base.extend(g.iter().rev().map(|l| l.inverse()));
                base.extend(h.iter().rev().map(|l| l.inverse()));
                out.extend(apply_power(toks, pos, base)?);
            }
            Some(t) => return Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
    Ok(out)
}

fn apply_power(toks: &[Tok], pos: &mut usize, base: Vec<Letter>) -> Result<Vec<Letter>> {
    if toks.get(*pos) != Some(&Tok::Caret) {
        return Ok(base);
    }
    *pos += 1;
    let n = match toks.get(*pos) {
        Some(Tok::Int(n)) => *n,
        other => return Err(Error::Parse(format!("expected integer exponent, got {other:?}"))),
    };
    *pos += 1;
    let mut out = Vec::new();
    if n >= 0 {
        for _ in 0..n {
            out.extend(base.iter().copied());
        }
    } else {
        let inv: Vec<Letter> = base.iter().rev().map(|l| l.inverse()).collect();
        for _ in 0..(-n) {
            out.extend(inv.iter().copied());
        }
    }
    Ok(out)
}

fn expect(toks: &[Tok], pos: &mut usize, want: &Tok) -> Result<()> {
    if toks.get(*pos) == Some(want) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::Parse(format!("expected {want:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn roundtrip() {
        let w = parse_word("a b A", &names()).unwrap();
        assert_eq!(w.letters.len(), 3);
        assert_eq!(w.display(&names()), "a b A");
        let back = parse_word(&w.display(&names()), &names()).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn commutator_sugar() {
        let w = parse_word("[a,b]", &names()).unwrap();
        let expl = parse_word("a b A B", &names()).unwrap();
        assert_eq!(w, expl);
    }

    #[test]
    fn powers() {
        let w = parse_word("a^3 b^-2", &names()).unwrap();
        let expl = parse_word("a a a B B", &names()).unwrap();
        assert_eq!(w, expl);
        let sq = parse_word("[a,b]^2", &names()).unwrap();
        let expl2 = parse_word("a b A B a b A B", &names()).unwrap();
        assert_eq!(sq, expl2);
    }

    #[test]
    fn rejects_unknown() {
        assert!(parse_word("c", &names()).is_err());
    }
}
