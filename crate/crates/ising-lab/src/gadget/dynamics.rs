//! The Möbius maps driving the gadget recursions and their fixed-point data.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Cplx, InfCplx, PrecisionContext};
use crate::region::phi_ratio;

/// h_beta(z) = (beta z + 1)/(beta + z), Riemann-sphere correct:
/// h(inf) = beta, h(-beta) = inf.
pub fn h_map(beta: &Cplx, z: &InfCplx, ctx: &PrecisionContext) -> Result<InfCplx> {
    match z {
        InfCplx::Inf => Ok(InfCplx::Finite(beta.clone())),
        InfCplx::Finite(z) => {
            let num = &(beta * z) + &Cplx::one(ctx);
            let den = beta + z;
            if den.norm() <= ctx.tolerance() {
                if num.norm() <= ctx.tolerance() {
                    return Err(Error::Indeterminate(0));
                }
                return Ok(InfCplx::Inf);
            }
            Ok(InfCplx::Finite(&num / &den))
        }
    }
}

/// g_beta = h_beta composed with itself.
pub fn g_map(beta: &Cplx, z: &InfCplx, ctx: &PrecisionContext) -> Result<InfCplx> {
    let h1 = h_map(beta, z, ctx)?;
    h_map(beta, &h1, ctx)
}

fn inf_pow(z: &InfCplx, d: u32) -> InfCplx {
    match z {
        InfCplx::Inf => InfCplx::Inf,
        InfCplx::Finite(v) => InfCplx::Finite(v.powi(d)),
    }
}

/// f_beta(z) = g_beta(z^d): the degree-d dynamics behind the escape stage.
pub fn f_map(beta: &Cplx, z: &InfCplx, d: u32, ctx: &PrecisionContext) -> Result<InfCplx> {
    g_map(beta, &inf_pow(z, d), ctx)
}

/// Derivative f'(z) = g'(z^d) d z^{d-1} with
/// g'(w) = h'(h(w)) h'(w), h'(w) = (beta^2 - 1)/(beta + w)^2.
pub fn f_prime(beta: &Cplx, z: &Cplx, d: u32, ctx: &PrecisionContext) -> Result<Cplx> {
    let one = Cplx::one(ctx);
    let b2m1 = &(beta * beta) - &one;
    let zd = z.powi(d);
    let hz = match h_map(beta, &InfCplx::Finite(zd.clone()), ctx)? {
        InfCplx::Finite(v) => v,
        InfCplx::Inf => return Err(Error::Indeterminate(0)),
    };
    let d1 = beta + &zd;
    let d2 = beta + &hz;
    let gp = &(&b2m1 / &(&d2 * &d2)) * &(&b2m1 / &(&d1 * &d1));
    let df = Float::with_val(ctx.bits(), d);
    Ok((&gp * &z.powi(d - 1)).scale(&df))
}

/// Inverse of g_beta: h^{-1}(y) = (y beta - 1)/(beta - y), applied twice.
pub fn g_inverse(beta: &Cplx, w: &InfCplx, ctx: &PrecisionContext) -> Result<InfCplx> {
    let hinv = |y: &InfCplx| -> Result<InfCplx> {
        match y {
            // h(inf) = beta, so h^{-1}(beta) = inf; and h^{-1}(inf) = -beta... wait
            InfCplx::Inf => {
                // h(z) = inf at z = -beta
                Ok(InfCplx::Finite(-beta))
            }
            InfCplx::Finite(y) => {
                let den = beta - y;
                if den.norm() <= ctx.tolerance() {
                    return Ok(InfCplx::Inf);
                }
                let num = &(y * beta) - &Cplx::one(ctx);
                Ok(InfCplx::Finite(&num / &den))
            }
        }
    };
    let y1 = hinv(w)?;
    hinv(&y1)
}

/// phi(x) = (x-1)/(x+1), the coordinate in which series composition
/// multiplies.
pub fn phi(x: &Cplx, ctx: &PrecisionContext) -> Cplx {
    let one = Cplx::one(ctx);
    &(x - &one) / &(x + &one)
}

pub fn phi_inv(u: &Cplx, ctx: &PrecisionContext) -> Cplx {
    let one = Cplx::one(ctx);
    &(&one + u) / &(&one - u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterMap {
    H,
    G,
}

/// h^n or g^n at x through the closed form
/// h^n(x) = 1 + 2 / ( ((beta+1)/(beta-1))^n ((x+1)/(x-1)) - 1 );
/// g doubles the exponent. x = 1 and x = -1 are fixed.
pub fn closed_form_iterate(
    beta: &Cplx,
    x: &Cplx,
    n: u32,
    which: IterMap,
    ctx: &PrecisionContext,
) -> Result<InfCplx> {
    let one = Cplx::one(ctx);
    if n == 0 {
        return Ok(InfCplx::Finite(x.clone()));
    }
    if x.dist(&one) <= ctx.tolerance() {
        return Ok(InfCplx::Finite(Cplx::one(ctx)));
    }
    if x.dist(&(-&one)) <= ctx.tolerance() {
        return Ok(InfCplx::Finite(-&one));
    }
    let e = match which {
        IterMap::H => n,
        IterMap::G => 2 * n,
    };
    let rho_inv = &(beta + &one) / &(beta - &one);
    let lhs = &rho_inv.powi(e) * &(&(x + &one) / &(x - &one));
    let den = &lhs - &one;
    if den.norm() <= ctx.tolerance() {
        return Ok(InfCplx::Inf);
    }
    let two = Cplx::from_f64(ctx, 2.0, 0.0);
    Ok(InfCplx::Finite(&one + &(&two / &den)))
}

/// Fixed-point data of f_beta at omega = 1 plus the side conditions the
/// covering construction needs.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicsInfo {
    #[serde(skip)]
    pub beta: Cplx,
    pub d: u32,
    #[serde(skip)]
    pub multiplier: Cplx,
    pub multiplier_norm: f64,
    pub repelling: bool,
    pub ratio: f64,
    /// z = g'(1) = ((beta-1)/(beta+1))^2
    #[serde(skip)]
    pub z: Cplx,
    pub z_norm: f64,
    pub z_nonreal: bool,
    pub on_unit_circle: bool,
    /// g'(1) not in {0, inf} and g''(1) finite and 0 < |z| < 1 and z nonreal
    pub covering_conditions: bool,
}

pub fn dynamics_info(beta: &Cplx, delta: u32, ctx: &PrecisionContext) -> Result<DynamicsInfo> {
    let one = Cplx::one(ctx);
    let tol = ctx.tolerance();
    if beta.dist(&one) <= tol || beta.dist(&(-&one)) <= tol {
        return Err(Error::Degenerate(beta.to_string()));
    }
    let d = delta - 1;
    let rho = phi(beta, ctx);
    let z = &rho * &rho;
    let df = ctx.float(d as f64);
    let multiplier = z.scale(&df);
    let ratio = phi_ratio(beta, ctx).to_f64();
    let z_norm = z.norm().to_f64();
    let on_unit_circle = (beta.norm().to_f64() - 1.0).abs() <= 1e-12;
    let z_nonreal = z.im.to_f64().abs() > 1e-12 * z_norm.max(1e-300);
    let covering_conditions = z_norm > 0.0 && z_norm < 1.0 && z_nonreal;
    Ok(DynamicsInfo {
        beta: beta.clone(),
        d,
        multiplier_norm: multiplier.norm().to_f64(),
        multiplier,
        repelling: d as f64 * z_norm > 1.0,
        ratio,
        z,
        z_norm,
        z_nonreal,
        on_unit_circle,
        covering_conditions,
    })
}

/// Report that f_beta has no exceptional points: the only critical point
/// with multiplier 0 is z = 0, and f(0) = 2 beta/(1 + beta^2) != 0.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalReport {
    pub f_at_zero_re: f64,
    pub f_at_zero_im: f64,
    pub no_exceptional_points: bool,
}

pub fn no_exceptional_points_check(
    beta: &Cplx,
    ctx: &PrecisionContext,
) -> Result<ExceptionalReport> {
    let one = Cplx::one(ctx);
    let tol = ctx.tolerance();
    if beta.norm() <= tol || beta.dist(&one) <= tol || beta.dist(&(-&one)) <= tol {
        return Err(Error::Precondition("beta in {0, 1, -1}".into()));
    }
    let i = Cplx::i(ctx);
    if beta.dist(&i) <= tol || beta.dist(&(-&i)) <= tol {
        return Err(Error::SpecialPoint(beta.to_string()));
    }
    // f(0) = 2 beta / (1 + beta^2); the denominator is nonzero away from +-i
    let denom = &one + &(beta * beta);
    let f0 = &beta.scale(&ctx.float(2.0)) / &denom;
    let nonzero = f0.norm() > tol;
    Ok(ExceptionalReport {
        f_at_zero_re: f0.re.to_f64(),
        f_at_zero_im: f0.im.to_f64(),
        no_exceptional_points: nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn fin(v: InfCplx) -> Cplx {
        match v {
            InfCplx::Finite(c) => c,
            InfCplx::Inf => panic!("unexpected infinity"),
        }
    }

    #[test]
    fn h_fixed_points_and_pole() {
        let c = ctx();
        let beta = Cplx::from_f64(&c, 0.3, 1.4);
        let one = InfCplx::Finite(Cplx::one(&c));
        assert!(fin(h_map(&beta, &one, &c).unwrap()).approx_eq(&Cplx::one(&c), &c.tolerance()));
        assert!(fin(g_map(&beta, &one, &c).unwrap()).approx_eq(&Cplx::one(&c), &c.tolerance()));
        // pole: h(-beta) = inf
        let pole = InfCplx::Finite(-&beta);
        assert!(h_map(&beta, &pole, &c).unwrap().is_inf());
        // h(inf) = beta
        assert!(fin(h_map(&beta, &InfCplx::Inf, &c).unwrap()).approx_eq(&beta, &c.tolerance()));
        // series identity check at beta=2, z=3: h = 7/5, (h-1)/(h+1) = 1/6
        let b2 = Cplx::from_f64(&c, 2.0, 0.0);
        let h = fin(h_map(&b2, &InfCplx::Finite(Cplx::from_f64(&c, 3.0, 0.0)), &c).unwrap());
        let seven_fifths = Cplx::real(Float::with_val(c.bits(), 7) / 5);
        assert!(h.approx_eq(&seven_fifths, &c.tolerance()));
        let lhs = phi(&h, &c);
        let sixth = Cplx::real(Float::with_val(c.bits(), 1) / 6);
        assert!(lhs.approx_eq(&sixth, &c.tolerance()));
    }

    #[test]
    fn h_identity_random() {
        // (h(z)-1)/(h(z)+1) = (beta-1)(z-1)/((beta+1)(z+1)) at 1000 points
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let tol = c.float(1e-12);
        for _ in 0..1000 {
            let beta = Cplx::from_f64(&c, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let z = Cplx::from_f64(&c, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let h = match h_map(&beta, &InfCplx::Finite(z.clone()), &c) {
                Ok(InfCplx::Finite(v)) => v,
                _ => continue,
            };
            let lhs = phi(&h, &c);
            let rhs = &phi(&beta, &c) * &phi(&z, &c);
            assert!(lhs.approx_eq(&rhs, &tol));
        }
    }

    #[test]
    fn closed_form_matches_iteration() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let tol = c.float(1e-10);
        for _ in 0..200 {
            let beta = Cplx::from_f64(&c, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let x = Cplx::from_f64(&c, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let n = rng.gen_range(0..=10u32);
            let which = if rng.gen_bool(0.5) { IterMap::H } else { IterMap::G };
            let closed = match closed_form_iterate(&beta, &x, n, which, &c) {
                Ok(InfCplx::Finite(v)) => v,
                _ => continue,
            };
            let mut direct = InfCplx::Finite(x.clone());
            let mut ok = true;
            for _ in 0..n {
                direct = match match which {
                    IterMap::H => h_map(&beta, &direct, &c),
                    IterMap::G => g_map(&beta, &direct, &c),
                } {
                    Ok(v) => v,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                };
            }
            if !ok {
                continue;
            }
            match direct {
                InfCplx::Finite(v) => assert!(closed.approx_eq(&v, &tol)),
                InfCplx::Inf => {}
            }
        }
        // n = 0 returns x; x = 1 returns 1
        let beta = Cplx::from_f64(&c, 0.5, 0.5);
        let x = Cplx::from_f64(&c, 2.0, -1.0);
        assert!(fin(closed_form_iterate(&beta, &x, 0, IterMap::H, &c).unwrap())
            .approx_eq(&x, &c.tolerance()));
        assert!(fin(closed_form_iterate(&beta, &Cplx::one(&c), 7, IterMap::G, &c).unwrap())
            .approx_eq(&Cplx::one(&c), &c.tolerance()));
    }

    #[test]
    fn dynamics_examples() {
        let c = ctx();
        // beta = 3i, Delta = 3: ratio 1, multiplier norm 2, repelling
        let info = dynamics_info(&Cplx::from_f64(&c, 0.0, 3.0), 3, &c).unwrap();
        assert!((info.ratio - 1.0).abs() < 1e-14);
        assert!((info.multiplier_norm - 2.0).abs() < 1e-12);
        assert!(info.repelling);
        assert!(!info.covering_conditions); // |z| = 1
        // beta = 1.1, Delta = 3: not repelling
        let info = dynamics_info(&Cplx::from_f64(&c, 1.1, 0.0), 3, &c).unwrap();
        assert!((info.multiplier_norm - 2.0 * (0.1f64 / 2.1).powi(2)).abs() < 1e-12);
        assert!(!info.repelling);
        assert!(!info.z_nonreal);
        // exactly on the threshold: |multiplier| = 1, not repelling
        let info = dynamics_info(&Cplx::from_f64(&c, 1.0, 2.0), 3, &c).unwrap();
        assert!((info.multiplier_norm - 1.0).abs() < 1e-14);
        assert!(!info.repelling);
        // degenerate at +-1
        assert!(dynamics_info(&Cplx::one(&c), 3, &c).is_err());
    }

    #[test]
    fn repelling_threshold_identity() {
        // |multiplier| > 1 iff ratio > 1/sqrt(Delta-1), over random samples
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let beta = Cplx::from_f64(&c, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if beta.dist(&Cplx::one(&c)).to_f64() < 1e-6
                || beta.dist(&(-&Cplx::one(&c))).to_f64() < 1e-6
            {
                continue;
            }
            let delta = rng.gen_range(3..=6u32);
            let info = dynamics_info(&beta, delta, &c).unwrap();
            let thresh = 1.0 / ((delta - 1) as f64).sqrt();
            // skip the knife edge where f64 rounding decides
            if (info.ratio - thresh).abs() < 1e-12 {
                continue;
            }
            assert_eq!(info.repelling, info.ratio > thresh);
        }
    }

    #[test]
    fn exceptional_points() {
        let c = ctx();
        let rep = no_exceptional_points_check(&Cplx::from_f64(&c, 2.0, 0.0), &c).unwrap();
        assert!((rep.f_at_zero_re - 0.8).abs() < 1e-14);
        assert!(rep.no_exceptional_points);
        assert!(matches!(
            no_exceptional_points_check(&Cplx::i(&c), &c),
            Err(Error::SpecialPoint(_))
        ));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let beta = Cplx::from_f64(&c, rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            assert!(no_exceptional_points_check(&beta, &c).unwrap().no_exceptional_points);
        }
    }

    #[test]
    fn f_prime_matches_difference_quotient() {
        let c = ctx();
        let beta = Cplx::from_f64(&c, 0.4, 0.9);
        let z = Cplx::from_f64(&c, 1.05, -0.1);
        let d = 3;
        let h = 1e-20;
        let fz = fin(f_map(&beta, &InfCplx::Finite(z.clone()), d, &c).unwrap());
        let zh = &z + &Cplx::from_f64(&c, h, 0.0);
        let fzh = fin(f_map(&beta, &InfCplx::Finite(zh), d, &c).unwrap());
        let dq = (&fzh - &fz).scale(&c.float(1.0 / h));
        let an = f_prime(&beta, &z, d, &c).unwrap();
        assert!(dq.dist(&an).to_f64() < 1e-8);
    }

    #[test]
    fn g_inverse_roundtrip() {
        let c = ctx();
        let beta = Cplx::from_f64(&c, 0.2, -1.3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let z = Cplx::from_f64(&c, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let w = match g_map(&beta, &InfCplx::Finite(z.clone()), &c) {
                Ok(InfCplx::Finite(v)) => v,
                _ => continue,
            };
            let back = match g_inverse(&beta, &InfCplx::Finite(w), &c).unwrap() {
                InfCplx::Finite(v) => v,
                InfCplx::Inf => continue,
            };
            assert!(back.approx_eq(&z, &c.float(1e-30)));
        }
    }
}
