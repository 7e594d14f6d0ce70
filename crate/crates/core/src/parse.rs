//! Text parsers for formulas and terms.
//!
//! Formula grammar: `letter | "I" | "O" | "(" formula "*" formula ")" |
//! "(" formula "+" formula ")"`, with one unparenthesized binary connective
//! tolerated per nesting level so that forms like `(p*q)+(I*p)` and the
//! brace contents of `1{p*q}` read naturally. Whitespace between tokens is
//! ignored. Letters match `[a-z][a-z0-9]*`.

use crate::formula::Formula;
use crate::term::{Index, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {at}: expected {expected}, found {found}")]
    Unexpected { at: usize, expected: String, found: String },
    #[error("syntax error at byte {at}: unknown token")]
    UnknownToken { at: usize },
    #[error("syntax error at byte {at}: trailing input")]
    TrailingInput { at: usize },
}

struct Cursor<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Cursor { input: input.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    /// Peeks past the current byte without consuming anything.
    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.input.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            found => Err(self.unexpected(&format!("'{}'", byte as char), found)),
        }
    }

    fn unexpected(&self, expected: &str, found: Option<u8>) -> ParseError {
        ParseError::Unexpected {
            at: self.pos,
            expected: expected.to_string(),
            found: found.map_or("end of input".to_string(), |b| format!("'{}'", b as char)),
        }
    }

    fn letter(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(b) if b.is_ascii_lowercase() => {
                let start = self.pos;
                self.pos += 1;
                while self
                    .input
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
                {
                    self.pos += 1;
                }
                Ok(std::str::from_utf8(&self.input[start..self.pos]).unwrap().to_string())
            }
            found => Err(self.unexpected("letter", found)),
        }
    }

    fn formula_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'I') => {
                self.pos += 1;
                Ok(Formula::Terminal)
            }
            Some(b'O') => {
                self.pos += 1;
                Ok(Formula::Initial)
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.formula_expr()?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(b) if b.is_ascii_lowercase() => Ok(Formula::Letter(self.letter()?)),
            found => Err(self.unexpected("formula", found)),
        }
    }

    fn formula_expr(&mut self) -> Result<Formula, ParseError> {
        let left = self.formula_atom()?;
        match self.peek() {
            Some(b'*') => {
                self.pos += 1;
                let right = self.formula_atom()?;
                Ok(Formula::prod(left, right))
            }
            Some(b'+') => {
                self.pos += 1;
                let right = self.formula_atom()?;
                Ok(Formula::sum(left, right))
            }
            _ => Ok(left),
        }
    }

    fn braced_formula(&mut self) -> Result<Formula, ParseError> {
        self.expect(b'{')?;
        let f = self.formula_expr()?;
        self.expect(b'}')?;
        Ok(f)
    }

    fn braced_formula_pair(&mut self) -> Result<(Formula, Formula), ParseError> {
        self.expect(b'{')?;
        let a = self.formula_expr()?;
        self.expect(b',')?;
        let b = self.formula_expr()?;
        self.expect(b'}')?;
        Ok((a, b))
    }

    fn index_after(&mut self) -> Result<Index, ParseError> {
        match self.bump() {
            Some(b'1') => Ok(Index::One),
            Some(b'2') => Ok(Index::Two),
            found => Err(self.unexpected("index 1 or 2", found)),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::Id(self.braced_formula()?))
            }
            Some(b'k') => {
                self.pos += 1;
                match self.peek_at(0) {
                    Some(b'1') | Some(b'2') => {
                        let index = self.index_after()?;
                        let (a, b) = self.braced_formula_pair()?;
                        Ok(Term::proj(index, a, b))
                    }
                    _ => Ok(Term::Kappa(self.braced_formula()?)),
                }
            }
            Some(b'l') => {
                self.pos += 1;
                match self.peek_at(0) {
                    Some(b'1') | Some(b'2') => {
                        let index = self.index_after()?;
                        let (a, b) = self.braced_formula_pair()?;
                        Ok(Term::inj(index, a, b))
                    }
                    _ => Ok(Term::Lambda(self.braced_formula()?)),
                }
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Term::Diag(self.braced_formula()?))
            }
            Some(b'm') => {
                self.pos += 1;
                Ok(Term::Codiag(self.braced_formula()?))
            }
            Some(b'K') => {
                self.pos += 1;
                let index = self.index_after()?;
                let side = self.braced_formula()?;
                self.expect(b'(')?;
                let inner = self.term()?;
                self.expect(b')')?;
                Ok(Term::proj_arg(index, side, inner))
            }
            Some(b'L') => {
                self.pos += 1;
                let index = self.index_after()?;
                let side = self.braced_formula()?;
                self.expect(b'(')?;
                let inner = self.term()?;
                self.expect(b')')?;
                Ok(Term::inj_arg(index, side, inner))
            }
            Some(b'<') => {
                self.pos += 1;
                let f = self.term()?;
                self.expect(b',')?;
                let g = self.term()?;
                self.expect(b'>')?;
                Ok(Term::pair(f, g))
            }
            Some(b'[') => {
                self.pos += 1;
                let f = self.term()?;
                self.expect(b',')?;
                let g = self.term()?;
                self.expect(b']')?;
                Ok(Term::copair(f, g))
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.term()?;
                let op = self.peek();
                let t = match op {
                    Some(b';') => {
                        self.pos += 1;
                        let g = self.term()?;
                        Term::seq(f, g)
                    }
                    Some(b'*') => {
                        self.pos += 1;
                        let g = self.term()?;
                        Term::tensor_prod(f, g)
                    }
                    Some(b'+') => {
                        self.pos += 1;
                        let g = self.term()?;
                        Term::tensor_sum(f, g)
                    }
                    found => return Err(self.unexpected("';', '*' or '+'", found)),
                };
                self.expect(b')')?;
                Ok(t)
            }
            found => Err(self.unexpected("term", found)),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos < self.input.len() {
            return Err(ParseError::TrailingInput { at: self.pos });
        }
        Ok(())
    }
}

/// Parses a formula; `pretty-print . parse` is a fixpoint on its own output.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cursor = Cursor::new(text);
    let f = cursor.formula_expr()?;
    cursor.finish()?;
    Ok(f)
}

/// Parses a term in either calculus.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cursor = Cursor::new(text);
    let t = cursor.term()?;
    cursor.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    fn p() -> Formula {
        Formula::letter("p")
    }
    fn q() -> Formula {
        Formula::letter("q")
    }

    #[test]
    fn single_letter() {
        assert_eq!(parse_formula("p").unwrap(), p());
    }

    #[test]
    fn nested_formula_with_spaces() {
        let f = parse_formula("(p * (q + p)) + (I * p)").unwrap();
        assert_eq!(
            f,
            Formula::sum(
                Formula::prod(p(), Formula::sum(q(), p())),
                Formula::prod(Formula::Terminal, p()),
            )
        );
    }

    #[test]
    fn malformed_formula_is_rejected() {
        assert!(parse_formula("p * * q").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("(p*q").is_err());
        // chained binaries need explicit parentheses
        assert!(parse_formula("p*q*r").is_err());
    }

    #[test]
    fn letters_can_shadow_generator_names() {
        // k, l, m, w, k1 are all valid letter names in formula position
        assert_eq!(parse_formula("k1").unwrap(), Formula::letter("k1"));
        assert_eq!(
            parse_formula("(k*w)+m").unwrap(),
            Formula::sum(
                Formula::prod(Formula::letter("k"), Formula::letter("w")),
                Formula::letter("m"),
            )
        );
    }

    #[test]
    fn terms_parse() {
        assert_eq!(parse_term("1{p}").unwrap(), Term::Id(p()));
        assert_eq!(parse_term("k{p}").unwrap(), Term::Kappa(p()));
        assert_eq!(parse_term("k1{p,q}").unwrap(), Term::proj(crate::term::Index::One, p(), q()));
        assert_eq!(
            parse_term("K1{q}(<1{p},1{p}>)").unwrap(),
            Term::proj_arg(
                crate::term::Index::One,
                q(),
                Term::pair(Term::Id(p()), Term::Id(p()))
            )
        );
        // diagrammatic order: (f;g) is g after f
        assert_eq!(
            parse_term("(l{p};k{p})").unwrap(),
            Term::comp(Term::Kappa(p()), Term::Lambda(p()))
        );
        assert_eq!(
            parse_term("(1{p}+w{q})").unwrap(),
            Term::tensor_sum(Term::Id(p()), Term::Diag(q()))
        );
        assert_eq!(parse_term("1{p*q}").unwrap(), Term::Id(Formula::prod(p(), q())));
    }

    #[test]
    fn term_errors_carry_position() {
        match parse_term("<1{p},>").unwrap_err() {
            ParseError::Unexpected { at, .. } => assert_eq!(at, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_term("1{p} 1{p}").is_err());
    }

    #[test]
    fn print_parse_fixpoint() {
        for text in [
            "(p*(q+p))+(I*p)",
            "((p*q)*r)+O",
            "K1{q}(<1{p},1{p}>)",
            "((w{p}*1{q});m{p*q})",
            "[L1{q}(1{p}),L2{p}(1{q})]",
        ] {
            if let Ok(f) = parse_formula(text) {
                let printed = f.to_string();
                assert_eq!(parse_formula(&printed).unwrap(), f);
                assert_eq!(parse_formula(&printed).unwrap().to_string(), printed);
            } else {
                let t = parse_term(text).unwrap();
                let printed = t.to_string();
                assert_eq!(parse_term(&printed).unwrap(), t);
                assert_eq!(parse_term(&printed).unwrap().to_string(), printed);
            }
        }
    }
}
