//! Textual letters, words and points relative to a presentation.
//!
//! Words are letters separated by spaces or dots; `ω` or the empty string is
//! the empty word. Over an alphabet of single-character names, unseparated
//! runs such as `011` are split into letters. A point is written
//! `pre (per)`, e.g. `a_3 (c)` or `(0 1)`. Family members are `name_n`,
//! members of the unnamed family are bare numbers, and `j` (or `name_j`)
//! stands for the symbolic index.

use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::symbolic::{Letter, PointTemplate, Word};

pub fn parse_letter(p: &Presentation, tok: &str) -> Result<Letter> {
    match p {
        Presentation::Sofic(s) => s
            .alphabet()
            .iter()
            .find(|a| a.to_string() == tok)
            .cloned()
            .ok_or_else(|| Error::UnknownLetter(tok.to_string())),
        Presentation::Flat(f) => {
            if f.concrete_letters().iter().any(|c| c == tok) {
                return Ok(Letter::concrete(tok));
            }
            let has_family = |name: &str| f.letter_families().iter().any(|lf| lf.name == name);
            let (family, idx) = match tok.rsplit_once('_') {
                Some((name, idx)) if has_family(name) => (name, idx),
                _ if has_family("") => ("", tok),
                _ => return Err(Error::UnknownLetter(tok.to_string())),
            };
            let letter = if idx == "j" {
                Letter::param(family)
            } else {
                let n: u64 = idx.parse().map_err(|_| Error::UnknownLetter(tok.to_string()))?;
                Letter::member(family, n)
            };
            if f.letter_known(&letter) {
                Ok(letter)
            } else {
                Err(Error::UnknownLetter(tok.to_string()))
            }
        }
    }
}

fn single_char_alphabet(p: &Presentation) -> bool {
    match p {
        Presentation::Sofic(s) => s.alphabet().iter().all(|a| a.to_string().chars().count() == 1),
        Presentation::Flat(f) => {
            f.letter_families().is_empty() && f.concrete_letters().iter().all(|c| c.chars().count() == 1)
        }
    }
}

pub fn parse_word(p: &Presentation, s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s == "ω" {
        return Ok(Word::empty());
    }
    let mut out = Vec::new();
    for tok in s.split(|c: char| c.is_whitespace() || c == '.').filter(|t| !t.is_empty()) {
        match parse_letter(p, tok) {
            Ok(a) => out.push(a),
            Err(e) if single_char_alphabet(p) && tok.chars().count() > 1 => {
                for ch in tok.chars() {
                    out.push(parse_letter(p, &ch.to_string()).map_err(|_| e.clone())?);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Word(out))
}

pub fn parse_point(p: &Presentation, s: &str) -> Result<PointTemplate> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| Error::Invalid(format!("point `{s}` lacks a `(period)`")))?;
    let close = s.rfind(')').filter(|&c| c > open && s[c + 1..].trim().is_empty());
    let close = close.ok_or_else(|| Error::Invalid(format!("point `{s}` has an unclosed period")))?;
    let pre = parse_word(p, &s[..open])?;
    let per = parse_word(p, &s[open + 1..close])?;
    PointTemplate::new(pre, per).ok_or_else(|| Error::Invalid(format!("point `{s}` has an empty period")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn parses_family_members_and_points() {
        let p = corpus::chuva();
        let w = parse_word(&p, "a_5 c").unwrap();
        assert_eq!(w.to_string(), "a_5 c");
        let x = parse_point(&p, "a_3 (c c)").unwrap();
        assert_eq!(x.to_string(), "a_3 (c)");
        assert!(parse_word(&p, "d").is_err());
    }

    #[test]
    fn splits_single_character_runs() {
        let p = corpus::golden_mean();
        assert_eq!(parse_word(&p, "010").unwrap().len(), 3);
        assert_eq!(parse_word(&p, "ω").unwrap(), Word::empty());
    }

    #[test]
    fn bare_numbers_are_unnamed_family_members() {
        let p = corpus::tripla();
        let x = parse_point(&p, "(0 2)").unwrap();
        assert!(p.member(&x));
        assert_eq!(parse_letter(&p, "j").unwrap(), Letter::param(""));
        assert!(parse_letter(&p, "0").unwrap() == Letter::concrete("0"));
    }
}
