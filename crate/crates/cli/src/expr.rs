//! Linear combinations of translated projections, e.g. `2q[a] - ab.p[B] + 1`.
//!
//! ```text
//! expr := term (('+' | '-') term)*
//! term := [integer] ['*'] atom | integer
//! atom := 'p[' word ']' | 'q[' word ']' | '1' | word '.' atom
//! ```
//!
//! Whitespace is ignored. Error positions are character offsets into the
//! original text.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use boundaryk::{DepthFunction, Error, GroupSpec, ReducedWord, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    P(ReducedWord),
    Q(ReducedWord),
    One,
}

/// `coefficient · action · atom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: BigInt,
    pub action: ReducedWord,
    pub atom: Atom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    rank: usize,
    terms: Vec<Term>,
}

impl Expression {
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Like terms merged in order of first appearance; zero terms dropped.
    /// The action on `1` is trivial and is removed.
    pub fn normalized(&self) -> Expression {
        let mut terms: Vec<Term> = Vec::new();
        for t in &self.terms {
            let action = if t.atom == Atom::One { ReducedWord::identity(self.rank) } else { t.action.clone() };
            match terms.iter_mut().find(|u| u.atom == t.atom && u.action == action) {
                Some(u) => u.coefficient += &t.coefficient,
                None => terms.push(Term { coefficient: t.coefficient.clone(), action, atom: t.atom.clone() }),
            }
        }
        terms.retain(|t| !t.coefficient.is_zero());
        Expression { rank: self.rank, terms }
    }

    pub fn evaluate(&self, spec: &GroupSpec) -> Result<DepthFunction> {
        spec.check_rank(self.rank)?;
        let mut total = DepthFunction::zero(spec, 0);
        for t in &self.terms {
            let base = match &t.atom {
                Atom::P(w) => DepthFunction::indicator_p(spec, w)?,
                Atom::Q(w) => DepthFunction::indicator_q(spec, w)?,
                Atom::One => DepthFunction::one(spec),
            };
            total = total.add(&base.act(&t.action)?.scale(&t.coefficient))?;
        }
        Ok(total)
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, rank: usize, atom: &Atom) -> fmt::Result {
    let word = |w: &ReducedWord| if w.is_empty() && rank >= 5 { String::new() } else { w.to_string() };
    match atom {
        Atom::P(w) => write!(f, "p[{}]", word(w)),
        Atom::Q(w) => write!(f, "q[{}]", word(w)),
        Atom::One => write!(f, "1"),
    }
}

impl fmt::Display for Expression {
    /// Canonical form: `2q[a] - ab.p[B] + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coefficient.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = t.coefficient.abs();
            if t.atom == Atom::One && t.action.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            if !t.action.is_empty() {
                write!(f, "{}.", t.action)?;
            }
            write_atom(f, self.rank, &t.atom)?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    spec: &'a GroupSpec,
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(p, _)| p)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.offset(), message: message.into() }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {c:?}")))
        }
    }

    fn expression(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let mut t = self.term()?;
            if sign < 0 {
                t.coefficient = -t.coefficient;
            }
            terms.push(t);
            sign = match self.peek() {
                None => return Ok(terms),
                Some('+') => 1,
                Some('-') => -1,
                Some(c) => return Err(self.error(format!("unexpected character {c:?}"))),
            };
            self.pos += 1;
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Some(digits.parse().expect("ascii digits"))
    }

    fn term(&mut self) -> Result<Term> {
        let coefficient = self.integer();
        let starred = self.peek() == Some('*');
        if starred {
            if coefficient.is_none() {
                return Err(self.error("'*' must follow a coefficient"));
            }
            self.pos += 1;
        }
        let atom_follows = self.peek().is_some_and(|c| c.is_ascii_alphabetic() || (starred && c == '1'));
        match coefficient {
            Some(c) if !atom_follows && !starred => Ok(Term {
                coefficient: c,
                action: self.spec.identity(),
                atom: Atom::One,
            }),
            c => {
                let (action, atom) = self.atom()?;
                Ok(Term { coefficient: c.unwrap_or_else(BigInt::one), action, atom })
            }
        }
    }

    /// Text up to (not including) `stop`, parsed as a reduced word.
    fn word_until(&mut self, stop: char) -> Result<ReducedWord> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c != stop && c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        ReducedWord::parse(self.spec, &text).map_err(|e| match e {
            Error::Parse { position, message } => Error::Parse { position: self.chars[start + position].0, message },
            Error::NotReduced { position } => Error::Parse {
                position: self.chars[start + position].0,
                message: format!("word {text:?} is not freely reduced"),
            },
            other => other,
        })
    }

    fn atom(&mut self) -> Result<(ReducedWord, Atom)> {
        match (self.peek(), self.peek_at(1)) {
            (Some(c @ ('p' | 'q')), Some('[')) => {
                self.pos += 2;
                let w = self.word_until(']')?;
                self.expect(']')?;
                let atom = if c == 'p' { Atom::P(w) } else { Atom::Q(w) };
                Ok((self.spec.identity(), atom))
            }
            (Some('1'), _) => {
                self.pos += 1;
                Ok((self.spec.identity(), Atom::One))
            }
            (Some(c), _) if c.is_ascii_alphabetic() => {
                let g = self.word_until('.')?;
                self.expect('.')?;
                let (h, atom) = self.atom()?;
                Ok((g.multiply(&h)?, atom))
            }
            (Some(c), _) => Err(self.error(format!("unexpected character {c:?}; expected p[..], q[..] or 1"))),
            (None, _) => Err(self.error("unexpected end of expression")),
        }
    }
}

pub fn parse_expression(spec: &GroupSpec, text: &str) -> Result<Expression> {
    let chars: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse { position: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { spec, chars, pos: 0, len: text.chars().count() };
    let terms = parser.expression()?;
    Ok(Expression { rank: spec.rank(), terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize) -> GroupSpec {
        GroupSpec::new(d).unwrap()
    }

    fn parse(d: usize, s: &str) -> Expression {
        parse_expression(&spec(d), s).unwrap()
    }

    fn coefficients(e: &Expression) -> Vec<i64> {
        e.terms().iter().map(|t| i64::try_from(&t.coefficient).unwrap()).collect()
    }

    #[test]
    fn examples() {
        let e = parse(2, "q[a]+q[b]-1");
        assert_eq!(e.terms().len(), 3);
        let e = parse(2, "2*q[a] - q[b] + 1");
        assert_eq!(coefficients(&e), [2, -1, 1]);
        assert_eq!(e.terms()[2].atom, Atom::One);
    }

    #[test]
    fn action_term_matches_act() {
        let s = spec(2);
        let e = parse(2, "a.q[b]");
        let qb = DepthFunction::indicator_q(&s, &s.generator(1).unwrap()).unwrap();
        assert_eq!(e.evaluate(&s).unwrap(), qb.act(&s.generator(0).unwrap()).unwrap());
        let nested = parse(2, "a.b.p[A]");
        assert_eq!(nested.terms()[0].action.to_string(), "ab");
        assert_eq!(parse(2, "a.A.q[b]").terms()[0].action.to_string(), "e");
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(parse(2, " 2 * q[a]-q[ b ]+1 ").to_string(), "2q[a] - q[b] + 1");
        assert_eq!(parse(2, "-3ab.p[B]").to_string(), "-3ab.p[B]");
        assert_eq!(parse(2, "q[a] - q[a]").normalized().to_string(), "0");
        assert_eq!(parse(2, "1 + q[a] + 2").normalized().to_string(), "3 + q[a]");
        assert_eq!(parse(2, "2*1").to_string(), "2");
        assert_eq!(parse(2, "a.1").normalized().to_string(), "1");
    }

    #[test]
    fn errors_carry_positions() {
        let s = spec(2);
        assert!(matches!(parse_expression(&s, "q[aA]"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expression(&s, "q[a] + "), Err(Error::Parse { position: 7, .. })));
        assert!(matches!(parse_expression(&s, "q[c]"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expression(&s, "q[a"), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse_expression(&s, "*q[a]"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_expression(&s, "a q[b]"), Err(Error::Parse { .. })));
        assert!(parse_expression(&s, "").is_err());
    }
}
