//! Text form of products.
//!
//! ```text
//! product  := term { "*" term } ;
//! term     := named | raw ;
//! named    := ("Gsharp"|"Gstar"|"F"|"G"|"H") "(" integer ")" ;
//! raw      := "factor" "(" "p=" integer "," "alpha=" rational "," "a=[" integer "," integer "]" ")" ;
//! rational := integer [ "/" positive-integer ] ;
//! ```
//!
//! Whitespace is insignificant. Positions in errors are byte offsets.

use std::collections::BTreeMap;

use num_rational::Rational64;

use crate::error::{EulerError, Result};
use crate::euler::{Factor, Family, Product};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        Err(EulerError::Syntax { position: self.pos, expected: expected.to_string() })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("`{}`", c as char))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.src[start..self.pos]).ok()
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.ident() {
            Some(w) if w == word => Ok(()),
            _ => {
                self.pos = start;
                self.error(&format!("`{word}`"))
            }
        }
    }

    fn unsigned(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        digits.parse().map_err(|_| EulerError::Syntax {
            position: start,
            expected: "integer that fits in 64 bits".into(),
        })
    }

    fn signed(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        let v = self.unsigned()?;
        let v = i64::try_from(v).map_err(|_| EulerError::Syntax {
            position: start,
            expected: "integer that fits in 64 bits".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn rational(&mut self) -> Result<Rational64> {
        let num = self.signed()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let den = self.unsigned()?;
            if den == 0 {
                self.pos = at;
                return self.error("positive integer");
            }
            let den = i64::try_from(den).map_err(|_| EulerError::Syntax {
                position: at,
                expected: "integer that fits in 64 bits".into(),
            })?;
            Ok(Rational64::new(num, den))
        } else {
            Ok(Rational64::from_integer(num))
        }
    }

    fn direction_component(&mut self) -> Result<u32> {
        self.skip_ws();
        let at = self.pos;
        let v = self.unsigned()?;
        u32::try_from(v).map_err(|_| EulerError::Syntax {
            position: at,
            expected: "direction component below 2^32".into(),
        })
    }

    fn term(&mut self) -> Result<Vec<Factor>> {
        self.skip_ws();
        let start = self.pos;
        let Some(name) = self.ident() else {
            return self.error("term");
        };
        if name == "factor" {
            self.expect(b'(')?;
            self.keyword("p")?;
            self.expect(b'=')?;
            let p = self.unsigned()?;
            self.expect(b',')?;
            self.keyword("alpha")?;
            self.expect(b'=')?;
            let alpha = self.rational()?;
            self.expect(b',')?;
            self.keyword("a")?;
            self.expect(b'=')?;
            self.expect(b'[')?;
            let a1 = self.direction_component()?;
            self.expect(b',')?;
            let a2 = self.direction_component()?;
            self.expect(b']')?;
            self.expect(b')')?;
            return Ok(vec![Factor::new(p, alpha, [a1, a2])?]);
        }
        let Ok(family) = name.parse::<Family>() else {
            self.pos = start;
            return self.error("term");
        };
        self.expect(b'(')?;
        let p = self.unsigned()?;
        self.expect(b')')?;
        family.factors(p)
    }

    fn product(&mut self) -> Result<Product> {
        let mut factors = self.term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            factors.extend(self.term()?);
        }
        if self.peek().is_some() {
            return self.error("`*` or end of input");
        }
        Ok(Product::new(factors))
    }
}

pub fn parse(text: &str) -> Result<Product> {
    Parser::new(text).product()
}

// Larger families are extracted first so G and H are not split into smaller named pieces.
const EXTRACTION_ORDER: [Family; 5] = [Family::G, Family::H, Family::Gsharp, Family::Gstar, Family::F];

fn format_raw(f: &Factor) -> String {
    let a = f.direction();
    format!("factor(p={},alpha={},a=[{},{}])", f.p(), f.alpha(), a[0], a[1])
}

/// Canonical text: ordered by prime, named families first (G, H, Gsharp, Gstar, F),
/// then the remaining factors sorted by direction and alpha. The empty product is `1`.
pub fn format(product: &Product) -> String {
    let mut by_prime: BTreeMap<u64, Vec<Factor>> = BTreeMap::new();
    for f in product.sorted_factors() {
        by_prime.entry(f.p()).or_default().push(f);
    }
    let mut terms = Vec::new();
    for (p, mut rest) in by_prime {
        for family in EXTRACTION_ORDER {
            let shape = family.factors(p).expect("prime key");
            loop {
                let mut remaining = rest.clone();
                let complete = shape.iter().all(|want| {
                    match remaining.iter().position(|f| f == want) {
                        Some(i) => {
                            remaining.remove(i);
                            true
                        }
                        None => false,
                    }
                });
                if !complete {
                    break;
                }
                terms.push(format!("{family}({p})"));
                rest = remaining;
            }
        }
        terms.extend(rest.iter().map(format_raw));
    }
    if terms.is_empty() {
        "1".to_string()
    } else {
        terms.join("*")
    }
}
