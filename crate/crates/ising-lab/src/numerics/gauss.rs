use rug::{Float, Integer, Rational};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::cplx::Cplx;
use super::precision::PrecisionContext;
use crate::error::{Error, Result};

/// Gaussian rational: exact complex number with rational components.
/// rug keeps denominators canonical (reduced, positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        GaussRat { re: Rational::from(v), im: Rational::new() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat { re: Rational::from((num, den)), im: Rational::new() }
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussRat {
            re: Rational::from((re_num, re_den)),
            im: Rational::from((im_num, im_den)),
        }
    }

    pub fn from_integer(v: &Integer) -> Self {
        GaussRat { re: Rational::from(v), im: Rational::new() }
    }

    pub fn zero() -> Self {
        GaussRat { re: Rational::new(), im: Rational::new() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat { re: Rational::new(), im: Rational::from(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0() == std::cmp::Ordering::Equal && self.im.cmp0() == std::cmp::Ordering::Equal
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0() == std::cmp::Ordering::Equal
    }

    pub fn conj(&self) -> GaussRat {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    pub fn recip(&self) -> Result<GaussRat> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let n = self.norm_sqr();
        Ok(GaussRat {
            re: Rational::from(&self.re / &n),
            im: -Rational::from(&self.im / &n),
        })
    }

    pub fn to_cplx(&self, ctx: &PrecisionContext) -> Cplx {
        let p = ctx.bits();
        Cplx::new(Float::with_val(p, &self.re), Float::with_val(p, &self.im))
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat {
            re: Rational::from(&self.re + &rhs.re),
            im: Rational::from(&self.im + &rhs.im),
        }
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat {
            re: Rational::from(&self.re - &rhs.re),
            im: Rational::from(&self.im - &rhs.im),
        }
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        let re = Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im);
        let im = Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re);
        GaussRat { re, im }
    }
}

impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        let r = rhs.recip().expect("division by zero GaussRat");
        self * &r
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            return write!(f, "{}", self.re);
        }
        if self.im.cmp0() == std::cmp::Ordering::Less {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parses the `Display` form back: "re", "re+imi" or "re-imi" with rational parts.
pub fn parse_gauss_rat(s: &str) -> Result<GaussRat> {
    let bad = |m: &str| Error::Parse { line: 0, msg: format!("bad exact coefficient '{s}': {m}") };
    let body = s.trim();
    if let Some(stripped) = body.strip_suffix('i') {
        // split at the sign separating re and im (not the leading sign, not inside "/")
        let chars: Vec<char> = stripped.chars().collect();
        let mut split = None;
        for k in (1..chars.len()).rev() {
            if (chars[k] == '+' || chars[k] == '-') && chars[k - 1] != '/' && chars[k - 1] != 'e' {
                split = Some(k);
                break;
            }
        }
        let k = split.ok_or_else(|| bad("missing separator"))?;
        let re: Rational = chars[..k]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| bad("re part"))?;
        let im_str: String = chars[k..].iter().collect();
        let im_str = im_str.strip_prefix('+').unwrap_or(&im_str).to_string();
        let im: Rational = im_str.parse().map_err(|_| bad("im part"))?;
        Ok(GaussRat { re, im })
    } else {
        let re: Rational = body.parse().map_err(|_| bad("re part"))?;
        Ok(GaussRat { re, im: Rational::new() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = GaussRat::from_parts(1, 2, -3, 4);
        let b = GaussRat::from_parts(2, 3, 1, 5);
        let p = &a * &b;
        let back = &p / &b;
        assert_eq!(back, a);
        let r = a.recip().unwrap();
        assert_eq!(&a * &r, GaussRat::one());
    }

    #[test]
    fn display_roundtrip() {
        for g in [
            GaussRat::from_parts(1, 2, -3, 4),
            GaussRat::from_int(-7),
            GaussRat::i(),
            GaussRat::from_parts(0, 1, 22, 7),
        ] {
            let s = format!("{g}");
            assert_eq!(parse_gauss_rat(&s).unwrap(), g, "{s}");
        }
    }
}
