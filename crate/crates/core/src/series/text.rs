//! Text form of series: `c*T^i*pi^j` terms joined by `+`/`-`, with an optional
//! trailing `O(pi^k)` marking the first unknown pi-exponent.
//!
//! Coefficients are integers, `a/b` with `b` a power of p times a unit, or `a/p^e`.
//! For `f > 1` the generator of the coefficient ring is written `x`.

use super::{Series, Sr};
use crate::coeff::{signed_lane, CoeffElem};
use crate::error::{Error, Result};

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let b = w.as_bytes();
        if self.s[self.pos..].starts_with(b) {
            let next = self.s.get(self.pos + b.len());
            if next.is_none_or(|c| !c.is_ascii_alphanumeric()) {
                self.pos += b.len();
                return true;
            }
        }
        false
    }
    fn err(&self, expected: &str) -> Error {
        Error::Parse { pos: self.pos, expected: expected.to_string() }
    }
    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("digits"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, expected: "integer that fits in 64 bits".into() })
    }
    fn sint(&mut self) -> Result<i64> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let open = self.eat(b'(');
        let neg2 = open && self.eat(b'-');
        let v = self.uint()? as i64;
        if open && !self.eat(b')') {
            return Err(self.err("')'"));
        }
        Ok(if neg ^ neg2 { -v } else { v })
    }
    fn exponent(&mut self) -> Result<i64> {
        if self.eat(b'^') {
            self.sint()
        } else {
            Ok(1)
        }
    }
}

/// Parse the text form of a series.
pub fn parse_series(sr: &Sr, text: &str) -> Result<Series> {
    let ring = sr.coeffs();
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut terms: Vec<(i32, i32, CoeffElem)> = Vec::new();
    let mut y_hi: Option<i32> = None;
    let mut first = true;
    loop {
        let sign = if lx.eat(b'-') {
            -1
        } else if lx.eat(b'+') || first {
            1
        } else if lx.peek().is_none() {
            break;
        } else {
            return Err(lx.err("'+' or '-'"));
        };
        first = false;
        if lx.eat_word("O") {
            if !lx.eat(b'(') || !(lx.eat_word("pi") || lx.eat_word("Y")) {
                return Err(lx.err("O(pi^k)"));
            }
            let k = lx.exponent()?;
            if !lx.eat(b')') {
                return Err(lx.err("')'"));
            }
            y_hi = Some(k as i32 - 1);
            continue;
        }
        let mut coeff = ring.from_int(sign);
        let (mut i, mut j) = (0i64, 0i64);
        let mut factors = 0;
        loop {
            match lx.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = lx.uint()?;
                    let mut c = ring.from_int(num as i64);
                    if lx.eat(b'/') {
                        if lx.eat_word("p") {
                            let e = lx.exponent()?;
                            if e < 0 {
                                return Err(lx.err("nonnegative power of p"));
                            }
                            c = ring.div_p(&c, e as u32)?;
                        } else {
                            let d = lx.uint()?;
                            if d == 0 {
                                return Err(lx.err("nonzero denominator"));
                            }
                            c = ring.mul(&c, &ring.inv(&ring.from_int(d as i64))?)?;
                        }
                    }
                    coeff = ring.mul(&coeff, &c)?;
                }
                Some(b'T') => {
                    lx.pos += 1;
                    i += lx.exponent()?;
                }
                Some(b'Y') => {
                    lx.pos += 1;
                    j += lx.exponent()?;
                }
                Some(b'p') if lx.eat_word("pi") => {
                    j += lx.exponent()?;
                }
                Some(b'p') if lx.eat_word("p") => {
                    let e = lx.exponent()?;
                    if e < 0 {
                        coeff = ring.div_p(&coeff, (-e) as u32)?;
                    } else {
                        coeff = ring.mul(&coeff, &ring.from_int((ring.p() as i64).pow(e as u32)))?;
                    }
                }
                Some(b'x') => {
                    lx.pos += 1;
                    let e = lx.exponent()?;
                    if e < 0 {
                        return Err(lx.err("nonnegative power of x"));
                    }
                    coeff = ring.mul(&coeff, &ring.pow(&ring.generator(), e as u64)?)?;
                }
                _ => return Err(lx.err("coefficient, T, pi, p or x")),
            }
            factors += 1;
            if !lx.eat(b'*') {
                break;
            }
        }
        if factors == 0 {
            return Err(lx.err("term"));
        }
        let (Ok(i), Ok(j)) = (i32::try_from(i), i32::try_from(j)) else {
            return Err(lx.err("exponent in range"));
        };
        terms.push((i, j, coeff));
    }
    let mut s = Series::from_terms(sr, &terms)?;
    if let Some(h) = y_hi {
        s = s.truncate_y(h)?;
    }
    Ok(s)
}

fn monomial_suffix(i: i32, j: i32) -> String {
    let mut s = String::new();
    let pw = |v: &str, e: i32| if e == 1 { v.to_string() } else { format!("{v}^{e}") };
    if i != 0 {
        s.push('*');
        s.push_str(&pw("T", i));
    }
    if j != 0 {
        s.push('*');
        s.push_str(&pw("pi", j));
    }
    s
}

/// Canonical text form; reparses to the same series (window included).
pub fn print_series(s: &Series) -> String {
    let ring = s.ring();
    let mut out = String::new();
    for (i, j, c) in s.terms() {
        let digits = (c.prec + c.denom as i32).max(1) as u32;
        for (l, lane) in c.lanes.iter().enumerate() {
            let v = signed_lane(ring, *lane, digits);
            if v == 0 {
                continue;
            }
            let mut text = v.unsigned_abs().to_string();
            if c.denom > 0 {
                text.push_str(&format!("/p^{}", c.denom));
            }
            match l {
                0 => {}
                1 => text.push_str("*x"),
                _ => text.push_str(&format!("*x^{l}")),
            }
            text.push_str(&monomial_suffix(i, j));
            if out.is_empty() {
                if v < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if v < 0 { " - " } else { " + " });
            }
            out.push_str(&text);
        }
    }
    if let Some(h) = s.y_hi() {
        if out.is_empty() {
            out.push_str(&format!("O(pi^{})", h + 1));
        } else {
            out.push_str(&format!(" + O(pi^{})", h + 1));
        }
    } else if out.is_empty() {
        out.push('0');
    }
    out
}
