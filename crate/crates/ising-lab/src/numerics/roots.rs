use rug::Float;

use super::cplx::Cplx;
use super::poly::CPoly;
use super::precision::PrecisionContext;
use crate::error::{Error, Result};

const MAX_ROUNDS: usize = 600;

/// All complex roots with multiplicity: Aberth simultaneous iteration from a
/// perturbed circle, then a Newton polish per root, then clustering of
/// near-coincident roots onto their mean.
pub fn poly_roots(p: &CPoly, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
    let mut coeffs = p.coeffs.clone();
    while coeffs.last().is_some_and(|c| c.norm() <= ctx.tolerance()) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::Domain("poly_roots needs degree >= 1".into()));
    }
    // strip zero roots at the origin
    let mut zeros_at_origin = 0usize;
    while coeffs.first().is_some_and(|c| c.is_zero()) {
        coeffs.remove(0);
        zeros_at_origin += 1;
    }
    let deg = coeffs.len() - 1;
    let poly = CPoly::new(coeffs.clone());
    let deriv = poly.derivative();

    let mut roots: Vec<Cplx> = Vec::with_capacity(deg + zeros_at_origin);
    for _ in 0..zeros_at_origin {
        roots.push(Cplx::zero(ctx));
    }
    if deg > 0 {
        let mut zs = initial_guesses(&coeffs, deg, ctx);
        let scale = coeff_scale(&coeffs);
        let target = Float::with_val(ctx.bits(), &scale * &ctx.tolerance());
        let mut converged = false;
        for _round in 0..MAX_ROUNDS {
            let mut max_step = ctx.float(0.0);
            for k in 0..deg {
                let pv = poly.eval(&zs[k]);
                if pv.norm() <= target {
                    continue;
                }
                let dv = deriv.eval(&zs[k]);
                if dv.is_zero() {
                    // nudge off a critical point
                    zs[k] = &zs[k] + &Cplx::from_f64(ctx, 1e-8, 1e-8);
                    continue;
                }
                let w = &pv / &dv;
                // Aberth correction: w / (1 - w * sum_{j != k} 1/(z_k - z_j))
                let mut s = Cplx::zero(ctx);
                for j in 0..deg {
                    if j == k {
                        continue;
                    }
                    let d = &zs[k] - &zs[j];
                    if d.is_zero() {
                        continue;
                    }
                    s = &s + &d.recip();
                }
                let denom = &Cplx::one(ctx) - &(&w * &s);
                let step = if denom.norm() <= ctx.tolerance() { w } else { &w / &denom };
                let sn = step.norm();
                if sn > max_step {
                    max_step = sn;
                }
                zs[k] = &zs[k] - &step;
            }
            let worst = zs.iter().map(|z| poly.eval(z).norm()).fold(ctx.float(0.0), |a, b| if b > a { b } else { a });
            if worst <= target {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(MAX_ROUNDS));
        }
        // Newton polish
        for z in zs.iter_mut() {
            for _ in 0..6 {
                let pv = poly.eval(z);
                let dv = deriv.eval(z);
                if dv.is_zero() {
                    break;
                }
                let step = &pv / &dv;
                let next = &*z - &step;
                // accept only improving polish steps (multiple roots stall)
                if poly.eval(&next).norm() < pv.norm() {
                    *z = next;
                } else {
                    break;
                }
            }
        }
        cluster(&mut zs, ctx);
        roots.extend(zs);
    }
    Ok(roots)
}

fn coeff_scale(coeffs: &[Cplx]) -> Float {
    coeffs
        .iter()
        .map(|c| c.norm())
        .fold(Float::with_val(coeffs[0].prec(), 0), |a, b| if b > a { b } else { a })
}

fn initial_guesses(coeffs: &[Cplx], deg: usize, ctx: &PrecisionContext) -> Vec<Cplx> {
    // Cauchy-style bound: 1 + max |a_i| / |a_n|
    let lead = coeffs[deg].norm();
    let mut r = ctx.float(0.0);
    for c in &coeffs[..deg] {
        let v = Float::with_val(ctx.bits(), c.norm() / &lead);
        if v > r {
            r = v;
        }
    }
    r += 1;
    (0..deg)
        .map(|k| {
            // perturbed circle: irrational-ish angle offset breaks symmetry
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / deg as f64 + 0.41;
            let dir = Cplx::from_f64(ctx, theta.cos(), theta.sin());
            dir.scale(&r)
        })
        .collect()
}

/// Collapses clusters of roots closer than 1e3 * tolerance onto their mean,
/// preserving multiplicity.
fn cluster(zs: &mut [Cplx], ctx: &PrecisionContext) {
    let gap = Float::with_val(ctx.bits(), 1e3 * &ctx.tolerance());
    let n = zs.len();
    let mut assigned = vec![usize::MAX; n];
    let mut next = 0usize;
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        assigned[i] = next;
        for j in i + 1..n {
            if assigned[j] == usize::MAX && zs[i].dist(&zs[j]) < gap {
                assigned[j] = next;
            }
        }
        next += 1;
    }
    for c in 0..next {
        let members: Vec<usize> = (0..n).filter(|&i| assigned[i] == c).collect();
        if members.len() < 2 {
            continue;
        }
        let mut mean = Cplx::zero(ctx);
        for &i in &members {
            mean = &mean + &zs[i];
        }
        let f = ctx.float(1.0 / members.len() as f64);
        mean = mean.scale(&f);
        for &i in &members {
            zs[i] = mean.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::poly::RatPoly;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn sorted_f64(roots: &[Cplx]) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = roots.iter().map(|r| r.to_f64s()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn quadratics() {
        let c = ctx();
        // x^2 + 1 -> {i, -i}
        let r = poly_roots(&RatPoly::from_ints(&[1, 0, 1]).to_cpoly(&c), &c).unwrap();
        let v = sorted_f64(&r);
        assert!((v[0].0).abs() < 1e-20 && (v[0].1 + 1.0).abs() < 1e-20);
        assert!((v[1].0).abs() < 1e-20 && (v[1].1 - 1.0).abs() < 1e-20);
        // x^2 - 3x + 2 -> {1, 2}
        let r = poly_roots(&RatPoly::from_ints(&[2, -3, 1]).to_cpoly(&c), &c).unwrap();
        let v = sorted_f64(&r);
        assert!((v[0].0 - 1.0).abs() < 1e-20 && (v[1].0 - 2.0).abs() < 1e-20);
    }

    #[test]
    fn figure8_zero_recovered() {
        let c = ctx();
        let p = RatPoly::from_ints(&[1, 0, 6, 8, 2, 8, 6, 0, 1]).to_cpoly(&c);
        let roots = poly_roots(&p, &c).unwrap();
        assert_eq!(roots.len(), 8);
        let target = Cplx::from_f64(&c, 0.396608, 0.917988);
        let hit = roots.iter().any(|r| r.dist(&target).to_f64() < 1e-5);
        assert!(hit, "expected root near 0.396608+0.917988i");
    }

    #[test]
    fn residuals_meet_invariant() {
        // degree <= 16, |p(root)| <= 1e-20 * max|coeff| at 50 digits
        let c = PrecisionContext::new(50);
        let polys = [
            vec![3, -4, 0, 0, 2, 9, -1, 7, 5],
            vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            vec![-5, 0, 0, 3, 0, 0, 0, 11],
        ];
        for ints in polys {
            let p = RatPoly::from_ints(&ints).to_cpoly(&c);
            let roots = poly_roots(&p, &c).unwrap();
            let scale = ints.iter().map(|v| v.abs()).max().unwrap() as f64;
            for r in roots {
                assert!(p.eval(&r).norm().to_f64() <= 1e-20 * scale);
            }
        }
    }

    #[test]
    fn multiple_roots_clustered() {
        let c = ctx();
        // (x-1)^3 (x+2)
        let p = RatPoly::from_ints(&[-2, 5, -3, -1, 1]);
        let roots = poly_roots(&p.to_cpoly(&c), &c).unwrap();
        assert_eq!(roots.len(), 4);
        let near_one = roots.iter().filter(|r| r.dist(&Cplx::one(&c)).to_f64() < 1e-6).count();
        assert_eq!(near_one, 3);
    }

    #[test]
    fn rejects_constants() {
        let c = ctx();
        assert!(poly_roots(&RatPoly::from_ints(&[5]).to_cpoly(&c), &c).is_err());
    }
}
