//! Expression front end: rational constants `a` or `a/b`, the variable
//! `x`, operators `+ - * / ^` (integer exponents >= 0), unary minus,
//! parentheses; whitespace insignificant. Everything evaluates exactly
//! to a rational function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use dynpow_core::qpoly::{poly_gcd, UniPoly};
use dynpow_core::ratmap::{ProjectivePoint, RationalMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "syntax error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A rational function num/den, den != 0, not necessarily reduced.
#[derive(Debug, Clone)]
pub struct RatFunc {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl RatFunc {
    fn constant(c: BigRational) -> Self {
        RatFunc {
            num: UniPoly::constant(c),
            den: UniPoly::one(),
        }
    }

    fn x() -> Self {
        RatFunc {
            num: UniPoly::x(),
            den: UniPoly::one(),
        }
    }

    fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    fn sub(&self, o: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        if o.num.is_zero() {
            return None;
        }
        Some(RatFunc {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        })
    }

    fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn pow(&self, e: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Reduce to coprime form.
    pub fn reduced(&self) -> (UniPoly, UniPoly) {
        let g = poly_gcd(&self.num, &self.den);
        (self.num.div_exact(&g), self.den.div_exact(&g))
    }

    /// As a self-map of P^1 (degree >= 1 required).
    pub fn into_map(self) -> Result<RationalMap, dynpow_core::Error> {
        RationalMap::new(&self.num, &self.den)
    }

    /// As a polynomial (constant denominator required).
    pub fn into_polynomial(self) -> Option<UniPoly> {
        let (n, d) = self.reduced();
        d.is_constant()
            .then(|| n.scale(&d.coeff(0).recip()))
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = match acc.div(&f) {
                        Some(v) => v,
                        None => return self.err("division by zero"),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a non-negative integer exponent");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| ParseError {
                position: start,
                message: "exponent out of range".into(),
            })
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.bump() != Some(b')') {
                    self.pos -= usize::from(self.pos > 0);
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(RatFunc::x())
            }
            Some(b) if b.is_ascii_digit() => {
                let start = self.pos;
                while self.bytes.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().unwrap();
                Ok(RatFunc::constant(BigRational::from(n)))
            }
            Some(other) => self.err(format!("unexpected character '{}'", other as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse an expression into a rational function.
pub fn parse_function(text: &str) -> Result<RatFunc, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let f = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    if f.den.is_zero() {
        return p.err("denominator is identically zero");
    }
    Ok(f)
}

/// Parse an expression into a canonical self-map of P^1 (degree >= 1).
pub fn parse_map(text: &str) -> Result<RationalMap, ParseError> {
    let f = parse_function(text)?;
    f.into_map().map_err(|e| ParseError {
        position: 0,
        message: e.to_string(),
    })
}

/// Parse a point: `p/q`, an integer, or `inf`.
pub fn parse_point(text: &str) -> Result<ProjectivePoint, ParseError> {
    let t = text.trim();
    if t == "inf" || t == "oo" {
        return Ok(ProjectivePoint::infinity());
    }
    let parse_int = |s: &str| -> Option<BigInt> { s.trim().parse().ok() };
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (parse_int(a), parse_int(b)),
        None => (parse_int(t), Some(BigInt::one())),
    };
    match (num, den) {
        (Some(a), Some(b)) if !b.is_zero() => {
            Ok(ProjectivePoint::from_rational(&BigRational::new(a, b)))
        }
        _ => Err(ParseError {
            position: 0,
            message: format!("expected a point (p/q, integer, or inf), got '{text}'"),
        }),
    }
}

/// Parse a rational constant `a` or `a/b`.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    match parse_point(text)?.to_rational() {
        Some(q) => Ok(q),
        None => Err(ParseError {
            position: 0,
            message: "expected a finite rational".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_phi1() {
        let m = parse_map("-(x+3)^2/(4*x)").unwrap();
        assert_eq!(m.num(), &UniPoly::from_ints(&[-9, -6, -1]));
        assert_eq!(m.den(), &UniPoly::from_ints(&[0, 4]));
    }

    #[test]
    fn parses_identity_and_type76() {
        assert_eq!(parse_map("x").unwrap(), RationalMap::identity());
        let m = parse_map("144*x*(x+3)/(x-9)^2").unwrap();
        assert_eq!(m.num(), &UniPoly::from_ints(&[0, 432, 144]));
        assert_eq!(m.den(), &UniPoly::from_ints(&[81, -18, 1]));
    }

    #[test]
    fn rational_constants_and_precedence() {
        let m = parse_map("1/2*x^2 + 3").unwrap();
        // (x^2 + 6)/2
        assert_eq!(m.num(), &UniPoly::from_ints(&[6, 0, 1]));
        assert_eq!(m.den(), &UniPoly::from_ints(&[2]));
        // unary minus binds tighter than binary operators around it
        let m = parse_map("-x^2").unwrap();
        assert_eq!(m.num(), &UniPoly::from_ints(&[0, 0, -1]));
        let f = parse_function("2 - -3").unwrap();
        assert_eq!(f.reduced().0, UniPoly::from_ints(&[5]));
    }

    #[test]
    fn error_positions() {
        let e = parse_map("x + ").unwrap_err();
        assert!(e.position >= 3);
        assert!(parse_map("x^-2").is_err());
        assert!(parse_map("(x+1").is_err());
        assert!(parse_map("x/(x-x)").is_err());
        // degree 0 rejected for maps
        assert!(parse_map("3/4").is_err());
        assert!(parse_function("3/4").is_ok());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("inf").unwrap(), ProjectivePoint::infinity());
        assert_eq!(parse_point("-7").unwrap(), ProjectivePoint::from_int(-7));
        assert_eq!(
            parse_point("3/6").unwrap(),
            ProjectivePoint::from_rational(&BigRational::new(1.into(), 2.into()))
        );
        assert!(parse_point("1/0").is_err());
        assert!(parse_point("x").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "-(x+3)^2/(4*x)",
            "144*x*(x+3)/(x-9)^2",
            "(x^3-2*x+1/7)/(5*x^2-1)",
            "x^2+1",
        ] {
            let m = parse_map(text).unwrap();
            let printed = m.to_string();
            assert_eq!(parse_map(&printed).unwrap(), m, "round trip of {printed}");
        }
    }
}
