use rug::float::Special;
use rug::Float;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::precision::PrecisionContext;

/// Complex scalar at working precision. Both components are MPFR floats;
/// results of binary operations carry the larger operand precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

fn prec2(a: &Cplx, b: &Cplx) -> u32 {
    a.re.prec().max(b.re.prec())
}

impl Cplx {
    pub fn new(re: Float, im: Float) -> Self {
        Cplx { re, im }
    }

    pub fn from_f64(ctx: &PrecisionContext, re: f64, im: f64) -> Self {
        Cplx { re: ctx.float(re), im: ctx.float(im) }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_f64(ctx, 0.0, 0.0)
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_f64(ctx, 1.0, 0.0)
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        Self::from_f64(ctx, 0.0, 1.0)
    }

    pub fn real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Cplx { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn norm(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Cplx {
        Cplx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, f: &Float) -> Cplx {
        let p = self.prec().max(f.prec());
        Cplx {
            re: Float::with_val(p, &self.re * f),
            im: Float::with_val(p, &self.im * f),
        }
    }

    pub fn recip(&self) -> Cplx {
        let n = self.norm_sqr();
        let p = self.prec();
        Cplx {
            re: Float::with_val(p, &self.re / &n),
            im: -Float::with_val(p, &self.im / &n),
        }
    }

    pub fn ln(&self) -> Cplx {
        Cplx { re: self.norm().ln(), im: self.arg() }
    }

    pub fn exp(&self) -> Cplx {
        let r = self.re.clone().exp();
        let p = self.prec();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Cplx { re: Float::with_val(p, &r * &c), im: Float::with_val(p, &r * &s) }
    }

    pub fn sqrt(&self) -> Cplx {
        let r = self.norm().sqrt();
        let half = Float::with_val(self.prec(), self.arg() / 2);
        let p = self.prec();
        let (s, c) = half.sin_cos(Float::new(p));
        Cplx { re: Float::with_val(p, &r * &c), im: Float::with_val(p, &r * &s) }
    }

    pub fn powi(&self, mut e: u32) -> Cplx {
        let p = self.prec();
        let mut acc = Cplx { re: Float::with_val(p, 1), im: Float::new(p) };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn dist(&self, other: &Cplx) -> Float {
        (self - other).norm()
    }

    /// Tolerance-relative equality: |a-b| <= tol * max(1, |a|, |b|).
    pub fn approx_eq(&self, other: &Cplx, tol: &Float) -> bool {
        let d = self.dist(other);
        let mut scale = Float::with_val(self.prec(), 1);
        let na = self.norm();
        let nb = other.norm();
        if na > scale {
            scale = na;
        }
        if nb > scale {
            scale = nb;
        }
        d <= scale * tol.clone()
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn nan(prec: u32) -> Cplx {
        Cplx {
            re: Float::with_val(prec, Special::Nan),
            im: Float::with_val(prec, Special::Nan),
        }
    }
}

impl Add for &Cplx {
    type Output = Cplx;
    fn add(self, rhs: &Cplx) -> Cplx {
        let p = prec2(self, rhs);
        Cplx {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl Sub for &Cplx {
    type Output = Cplx;
    fn sub(self, rhs: &Cplx) -> Cplx {
        let p = prec2(self, rhs);
        Cplx {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl Mul for &Cplx {
    type Output = Cplx;
    fn mul(self, rhs: &Cplx) -> Cplx {
        let p = prec2(self, rhs);
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re -= Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.re * &rhs.im);
        im += Float::with_val(p, &self.im * &rhs.re);
        Cplx { re, im }
    }
}

impl Div for &Cplx {
    type Output = Cplx;
    fn div(self, rhs: &Cplx) -> Cplx {
        let p = prec2(self, rhs);
        let n = rhs.norm_sqr();
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re += Float::with_val(p, &self.im * &rhs.im);
        re /= &n;
        let mut im = Float::with_val(p, &self.im * &rhs.re);
        im -= Float::with_val(p, &self.re * &rhs.im);
        im /= &n;
        Cplx { re, im }
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec() as f64 / std::f64::consts::LOG2_10) as usize;
        let re = float_decimal(&self.re, digits);
        if self.im.is_zero() {
            return write!(f, "{re}");
        }
        let im = float_decimal(&self.im, digits);
        if im.starts_with('-') {
            write!(f, "{re}{im}i")
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

/// Decimal rendering with at most `digits` significant digits, no exponent
/// for moderate magnitudes.
pub fn float_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (sign, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let s = if sign { "-" } else { "" };
    let mantissa = mantissa.trim_end_matches('0');
    let mantissa = if mantissa.is_empty() { "0" } else { mantissa };
    let exp = exp.unwrap_or(0);
    if exp >= -4 && exp <= digits as i32 + 4 {
        // place the decimal point directly
        if exp <= 0 {
            format!("{s}0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if (exp as usize) >= mantissa.len() {
            format!("{s}{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
        } else {
            format!("{s}{}.{}", &mantissa[..exp as usize], &mantissa[exp as usize..])
        }
    } else {
        format!("{s}0.{mantissa}e{exp}")
    }
}

/// Riemann-sphere value: a finite complex number or the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum InfCplx {
    Finite(Cplx),
    Inf,
}

impl InfCplx {
    pub fn finite(c: Cplx) -> Self {
        InfCplx::Finite(c)
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, InfCplx::Inf)
    }

    pub fn as_finite(&self) -> Option<&Cplx> {
        match self {
            InfCplx::Finite(c) => Some(c),
            InfCplx::Inf => None,
        }
    }
}

impl fmt::Display for InfCplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfCplx::Finite(c) => write!(f, "{c}"),
            InfCplx::Inf => write!(f, "inf"),
        }
    }
}
