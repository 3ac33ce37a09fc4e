//! Text grammar for polynomial Laurent series.
//!
//! ```text
//! series := term (('+' | '-') term)*
//! term   := coeff ['*' 'x' ['^' int]] | 'x' ['^' int]
//! coeff  := int ['/' posint]
//! ```
//!
//! Whitespace between tokens is ignored and a leading sign is accepted on
//! the first term. Canonical printing (`Display`) produces text this parser
//! reads back to the same series.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{LaurentSeries, PrecisionBudget, SeriesError};
use crate::rational::Rational;

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.char_indices().collect(),
            pos: 0,
            text,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.text.len(), |&(i, _)| i)
    }

    fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> SeriesError {
        SeriesError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Result<BigInt, SeriesError> {
        self.skip_ws();
        let begin = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if begin == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[begin..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect();
        Ok(s.parse().expect("ascii digits parse"))
    }

    fn signed_int(&mut self) -> Result<i64, SeriesError> {
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let start = self.offset();
        let magnitude = self.digits()?;
        let value = if negative { -magnitude } else { magnitude };
        i64::try_from(value).map_err(|_| SeriesError::Syntax {
            position: start,
            message: "exponent out of range".into(),
        })
    }

    fn exponent(&mut self) -> Result<i64, SeriesError> {
        if self.eat('^') {
            self.signed_int()
        } else {
            Ok(1)
        }
    }

    fn coeff(&mut self) -> Result<Rational, SeriesError> {
        let negative = self.eat('-');
        let numer = self.digits()?;
        let numer = if negative { -numer } else { numer };
        if self.eat('/') {
            let at = self.offset();
            let denom = self.digits()?;
            if denom.is_zero() {
                return Err(SeriesError::ZeroDenominator { position: at });
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    fn term(&mut self) -> Result<(i64, Rational), SeriesError> {
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok((self.exponent()?, Rational::one()))
            }
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let c = self.coeff()?;
                if self.eat('*') {
                    if !self.eat('x') {
                        return Err(self.error("expected 'x' after '*'"));
                    }
                    Ok((self.exponent()?, c))
                } else {
                    Ok((0, c))
                }
            }
            Some(_) => Err(self.error("expected a term")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl Cursor<'_> {
    fn sum(&mut self, budget: &PrecisionBudget) -> Result<LaurentSeries, SeriesError> {
        let mut acc = self.product(budget)?;
        loop {
            if self.eat('+') {
                acc = acc + self.product(budget)?;
            } else if self.eat('-') {
                acc = acc - self.product(budget)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self, budget: &PrecisionBudget) -> Result<LaurentSeries, SeriesError> {
        let mut acc = self.unary(budget)?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary(budget)?;
            } else if self.peek() == Some('/') {
                let at = self.offset();
                self.pos += 1;
                let divisor = self.unary(budget)?;
                if divisor.is_provably_zero() {
                    return Err(SeriesError::ZeroDenominator { position: at });
                }
                acc = acc.div(&divisor, budget)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, budget: &PrecisionBudget) -> Result<LaurentSeries, SeriesError> {
        if self.eat('-') {
            return Ok(-self.unary(budget)?);
        }
        let base = self.atom(budget)?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.signed_int()?;
        let magnitude =
            u32::try_from(e.unsigned_abs()).map_err(|_| self.error("exponent out of range"))?;
        if e >= 0 {
            Ok(base.pow(magnitude))
        } else {
            Ok(base.invert(budget)?.pow(magnitude))
        }
    }

    fn atom(&mut self, budget: &PrecisionBudget) -> Result<LaurentSeries, SeriesError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum(budget)?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some('x') => {
                self.pos += 1;
                Ok(LaurentSeries::x())
            }
            Some('i') => {
                for expected in "inv".chars() {
                    if !self.eat(expected) {
                        return Err(self.error("expected 'inv'"));
                    }
                }
                if !self.eat('(') {
                    return Err(self.error("expected '(' after 'inv'"));
                }
                let inner = self.sum(budget)?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                inner.invert(budget)
            }
            Some(c) if c.is_ascii_digit() => Ok(LaurentSeries::constant(Rational::from_integer(
                self.digits()?,
            ))),
            Some(_) => Err(self.error("expected a number, 'x', 'inv' or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Evaluates an arithmetic expression over series:
///
/// ```text
/// expr  := prod (('+' | '-') prod)*
/// prod  := unary (('*' | '/') unary)*
/// unary := '-' unary | atom ['^' int]
/// atom  := int | 'x' | 'inv' '(' expr ')' | '(' expr ')'
/// ```
///
/// Every string of the series grammar evaluates to the series it denotes.
pub fn eval_expression(text: &str, budget: &PrecisionBudget) -> Result<LaurentSeries, SeriesError> {
    let mut cur = Cursor::new(text);
    let value = cur.sum(budget)?;
    if cur.peek().is_some() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(value)
}

/// Parses the series grammar into a normalized polynomial series.
pub fn parse_series(text: &str) -> Result<LaurentSeries, SeriesError> {
    let mut cur = Cursor::new(text);
    let mut terms = Vec::new();
    let mut sign = Rational::one();
    if cur.eat('-') {
        sign = -sign;
    } else {
        cur.eat('+');
    }
    loop {
        let (e, c) = cur.term()?;
        terms.push((e, c * &sign));
        match cur.peek() {
            None => break,
            Some('+') => {
                cur.pos += 1;
                sign = Rational::one();
            }
            Some('-') => {
                cur.pos += 1;
                sign = -Rational::one();
            }
            Some(_) => return Err(cur.error("expected '+' or '-'")),
        }
    }
    Ok(LaurentSeries::from_terms(terms))
}

impl std::str::FromStr for LaurentSeries {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_series(s)
    }
}
