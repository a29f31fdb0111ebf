use rug::{Float, Integer};

use super::cplx::Cplx;
use super::gauss::{parse_gauss_rat, GaussRat};
use super::precision::PrecisionContext;
use crate::error::{Error, Result};

/// Dense polynomial over Gaussian rationals, lowest degree first.
/// The coefficient vector never ends in a zero (empty = zero polynomial).
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    pub coeffs: Vec<GaussRat>,
}

/// Dense polynomial over working-precision complex scalars.
#[derive(Debug, Clone)]
pub struct CPoly {
    pub coeffs: Vec<Cplx>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&c| GaussRat::from_int(c)).collect())
    }

    pub fn from_integers(v: &[Integer]) -> Self {
        Self::new(v.iter().map(GaussRat::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = GaussRat::zero();
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        RatPoly::new(out)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        RatPoly::new(out)
    }

    /// Exact quotient, or `NotDivisible` when the remainder is nonzero.
    pub fn divide_exact(&self, den: &RatPoly) -> Result<RatPoly> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(RatPoly::zero());
        }
        if self.coeffs.len() < den.coeffs.len() {
            return Err(Error::NotDivisible);
        }
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - den.coeffs.len() + 1;
        let mut q = vec![GaussRat::zero(); qlen];
        let lead = den.coeffs.last().unwrap();
        for i in (0..qlen).rev() {
            let c = &rem[i + den.coeffs.len() - 1] / lead;
            for (j, d) in den.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * d);
            }
            q[i] = c;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return Err(Error::NotDivisible);
        }
        Ok(RatPoly::new(q))
    }

    /// Coefficients of p(z0 + u) as a polynomial in u; exact.
    pub fn taylor_shift(&self, z0: &GaussRat) -> RatPoly {
        let mut c = self.coeffs.clone();
        shift_in_place(&mut c, |acc, hi| {
            let t = hi * z0;
            *acc = &*acc + &t;
        });
        RatPoly::new(c)
    }

    /// First m+1 Taylor coefficients of log(p(z)/p(0)) at 0; exact rationals.
    pub fn log_truncate(&self, m: usize) -> Result<Vec<GaussRat>> {
        if self.coeffs.first().is_none_or(|c| c.is_zero()) {
            return Err(Error::ConstantTermZero);
        }
        let p0 = &self.coeffs[0];
        let zero = GaussRat::zero();
        let mut a = vec![GaussRat::zero(); m + 1];
        for k in 1..=m {
            let pk = self.coeffs.get(k).unwrap_or(&zero);
            let mut s = &GaussRat::from_int(k as i64) * pk;
            for j in 1..k {
                let pkj = self.coeffs.get(k - j).unwrap_or(&zero);
                if pkj.is_zero() {
                    continue;
                }
                s = &s - &(&(&GaussRat::from_int(j as i64) * &a[j]) * pkj);
            }
            a[k] = &s / &(&GaussRat::from_int(k as i64) * p0);
        }
        Ok(a)
    }

    pub fn to_cpoly(&self, ctx: &PrecisionContext) -> CPoly {
        CPoly { coeffs: self.coeffs.iter().map(|c| c.to_cplx(ctx)).collect() }
    }
}

impl CPoly {
    pub fn new(coeffs: Vec<Cplx>) -> Self {
        CPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len();
        while d > 0 && self.coeffs[d - 1].is_zero() {
            d -= 1;
        }
        d.saturating_sub(1)
    }

    pub fn eval(&self, x: &Cplx) -> Cplx {
        let p = x.prec().max(self.coeffs.first().map_or(53, |c| c.prec()));
        let mut acc = Cplx::new(Float::new(p), Float::new(p));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly { coeffs: vec![] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let f = Float::with_val(c.prec(), k as u32);
                c.scale(&f)
            })
            .collect();
        CPoly { coeffs }
    }

    pub fn taylor_shift(&self, z0: &Cplx) -> CPoly {
        let mut c = self.coeffs.clone();
        shift_in_place(&mut c, |acc, hi| {
            let t = hi * z0;
            *acc = &*acc + &t;
        });
        CPoly::new(c)
    }

    pub fn log_truncate(&self, m: usize, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
        let p0 = self.coeffs.first().cloned().unwrap_or(Cplx::zero(ctx));
        if p0.norm() <= ctx.tolerance() {
            return Err(Error::ConstantTermZero);
        }
        let zero = Cplx::zero(ctx);
        let mut a = vec![Cplx::zero(ctx); m + 1];
        for k in 1..=m {
            let pk = self.coeffs.get(k).unwrap_or(&zero);
            let kf = ctx.float(k as f64);
            let mut s = pk.scale(&kf);
            for j in 1..k {
                let pkj = self.coeffs.get(k - j).unwrap_or(&zero);
                if pkj.is_zero() {
                    continue;
                }
                let jf = ctx.float(j as f64);
                s = &s - &(&a[j].scale(&jf) * pkj);
            }
            a[k] = &s / &p0.scale(&kf);
        }
        Ok(a)
    }
}

/// Repeated synthetic division by (x - z0), in place:
/// after the passes, c[j] is the u^j coefficient of p(z0 + u).
/// `fma(acc, hi)` performs `*acc += hi * z0` with z0 captured by the caller.
fn shift_in_place<T>(c: &mut [T], fma: impl Fn(&mut T, &T)) {
    let n = c.len();
    for j in 0..n {
        for i in (j..n.saturating_sub(1)).rev() {
            let (lo, hi) = c.split_at_mut(i + 1);
            fma(&mut lo[i], &hi[0]);
        }
    }
}

/// Public polynomial with an exactness marker, the form the interfaces speak.
#[derive(Debug, Clone)]
pub enum Poly {
    Exact(RatPoly),
    Numeric(CPoly),
}

impl Poly {
    pub fn eval(&self, x: &Cplx, ctx: &PrecisionContext) -> Cplx {
        match self {
            Poly::Exact(p) => p.to_cpoly(ctx).eval(x),
            Poly::Numeric(p) => p.eval(x),
        }
    }

    /// JSON array of coefficient strings, lowest degree first. Exact
    /// coefficients render in lowest terms, numeric ones as decimals.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Poly::Exact(p) => serde_json::Value::Array(
                p.coeffs.iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
            ),
            Poly::Numeric(p) => serde_json::Value::Array(
                p.coeffs.iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
            ),
        }
    }

    pub fn from_json(v: &serde_json::Value, ctx: &PrecisionContext) -> Result<Poly> {
        let arr = v.as_array().ok_or_else(|| Error::Parse {
            line: 0,
            msg: "polynomial JSON must be an array of strings".into(),
        })?;
        let strings: Vec<&str> = arr
            .iter()
            .map(|s| {
                s.as_str().ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: "polynomial coefficients must be strings".into(),
                })
            })
            .collect::<Result<_>>()?;
        let exact = strings.iter().all(|s| !s.contains('.') && !s.contains('e'));
        if exact {
            let coeffs = strings.iter().map(|s| parse_gauss_rat(s)).collect::<Result<_>>()?;
            Ok(Poly::Exact(RatPoly::new(coeffs)))
        } else {
            let coeffs = strings
                .iter()
                .map(|s| parse_cplx_literal(s, ctx))
                .collect::<Result<_>>()?;
            Ok(Poly::Numeric(CPoly::new(coeffs)))
        }
    }
}

/// Parses "a", "a+bi" or "a-bi" with decimal parts at working precision.
pub fn parse_cplx_literal(s: &str, ctx: &PrecisionContext) -> Result<Cplx> {
    let bad = |m: &str| Error::Parse { line: 0, msg: format!("bad complex literal '{s}': {m}") };
    let body = s.trim();
    let parse_f = |t: &str| -> Result<Float> {
        let v = Float::parse(t).map_err(|_| bad("number"))?;
        Ok(Float::with_val(ctx.bits(), v))
    };
    if let Some(stripped) = body.strip_suffix('i') {
        let chars: Vec<char> = stripped.chars().collect();
        let mut split = None;
        for k in (1..chars.len()).rev() {
            if (chars[k] == '+' || chars[k] == '-') && chars[k - 1] != 'e' && chars[k - 1] != 'E' {
                split = Some(k);
                break;
            }
        }
        let k = split.ok_or_else(|| bad("missing separator"))?;
        let re = parse_f(&chars[..k].iter().collect::<String>())?;
        let im_str: String = chars[k..].iter().collect();
        let im_str = im_str.strip_prefix('+').unwrap_or(&im_str);
        let im = parse_f(im_str)?;
        Ok(Cplx::new(re, im))
    } else {
        let re = parse_f(body)?;
        Ok(Cplx::new(re, ctx.float(0.0)))
    }
}
