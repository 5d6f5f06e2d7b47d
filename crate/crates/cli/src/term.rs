//! Boolean terms over cylinder generators.
//!
//! ```text
//! expr  := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | atom
//! atom  := 'X' | '0' | '∅' | 'empty' | 'Z(' w ')' | 'F(' w ')' | 'C(' w ',' w ')' | '(' expr ')'
//! ```
//!
//! Words inside generators use the presentation's letter syntax; an empty
//! argument or `ω` is the empty word.

use anyhow::{anyhow, bail, Result};
use subshift_core::syntax::parse_word;
use subshift_core::{Presentation, Term, Word};

struct Parser<'a> {
    p: &'a Presentation,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, msg: impl std::fmt::Display) -> Result<T> {
        bail!("term parse error at column {}: {msg}", self.pos + 1)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => self.fail(format!("expected `{c}`, found `{d}`")),
            None => self.fail(format!("expected `{c}`, found end of input")),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.chars().count();
        if end > self.chars.len() || self.chars[self.pos..end].iter().copied().ne(kw.chars()) {
            return false;
        }
        // A keyword may not run into a following identifier character.
        if kw.chars().all(char::is_alphanumeric) && self.chars.get(end).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
            return false;
        }
        self.pos = end;
        true
    }

    fn expr(&mut self) -> Result<Term> {
        let mut t = self.and()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            t = Term::or(t, self.and()?);
        }
        Ok(t)
    }

    fn and(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            t = Term::and(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term> {
        if self.peek() == Some('!') {
            self.pos += 1;
            return Ok(Term::not(self.unary()?));
        }
        self.atom()
    }

    fn word_arg(&mut self, terminators: &[char]) -> Result<Word> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| !terminators.contains(c)) {
            self.pos += 1;
        }
        if self.pos == self.chars.len() {
            return self.fail("unterminated generator argument");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        parse_word(self.p, &text).map_err(|e| anyhow!("term parse error at column {}: {e}", start + 1))
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek() {
            None => return self.fail("expected a term, found end of input"),
            Some('(') => {
                self.pos += 1;
                let t = self.expr()?;
                self.expect(')')?;
                return Ok(t);
            }
            Some('0' | '∅') => {
                self.pos += 1;
                return Ok(Term::Empty);
            }
            _ => {}
        }
        if self.keyword("empty") {
            return Ok(Term::Empty);
        }
        for (kw, arity) in [("Z(", 1), ("F(", 1), ("C(", 2)] {
            if self.keyword(kw) {
                if arity == 2 {
                    let a = self.word_arg(&[',', ')'])?;
                    self.expect(',')?;
                    let b = self.word_arg(&[')'])?;
                    self.expect(')')?;
                    return Ok(Term::c(a, b));
                }
                let w = self.word_arg(&[')'])?;
                self.expect(')')?;
                return Ok(if kw == "Z(" { Term::cylinder(w) } else { Term::follower(w) });
            }
        }
        if self.keyword("X") {
            return Ok(Term::Full);
        }
        let found = self.chars[self.pos];
        self.fail(format!("unexpected `{found}`"))
    }
}

pub fn parse_term(p: &Presentation, s: &str) -> Result<Term> {
    let mut parser = Parser { p, chars: s.chars().collect(), pos: 0 };
    let t = parser.expr()?;
    if let Some(c) = parser.peek() {
        return parser.fail(format!("unexpected `{c}` after the term"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use subshift_core::corpus;

    #[test]
    fn precedence_and_display() {
        let p = corpus::golden_mean();
        let t = parse_term(&p, "F(1) & Z(0) | !X").unwrap();
        assert_eq!(t.to_string(), "((F(1) & Z(0)) | !X)");
        assert_eq!(parse_term(&p, "C(,)").unwrap(), Term::c(Word::empty(), Word::empty()));
        assert_eq!(parse_term(&p, "∅").unwrap(), Term::Empty);
        assert_eq!(parse_term(&p, "empty").unwrap(), Term::Empty);
    }

    #[test]
    fn family_letters() {
        let p = corpus::chuva();
        let t = parse_term(&p, "C(a_5, b_3)").unwrap();
        assert_eq!(t.to_string(), "C(a_5,b_3)");
    }

    #[test]
    fn errors_carry_columns() {
        let p = corpus::golden_mean();
        let e = parse_term(&p, "Z(0) & Y").unwrap_err().to_string();
        assert!(e.contains("column 8"), "{e}");
        let e = parse_term(&p, "Z(2)").unwrap_err().to_string();
        assert!(e.contains("column 3"), "{e}");
        let e = parse_term(&p, "(X").unwrap_err().to_string();
        assert!(e.contains("end of input"), "{e}");
    }
}
