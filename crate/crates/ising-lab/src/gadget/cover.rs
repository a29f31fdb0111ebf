//! Contraction covers around the fixed point 1 and the greedy navigation
//! that drives program values onto arbitrary targets inside the covered ball.

use rug::Float;

use super::approach::ProgBuilder;
use super::dynamics::{g_inverse, h_map};
use super::program::IsingProgram;
use crate::error::{Error, Result};
use crate::numerics::{Cplx, InfCplx, PrecisionContext};

/// One contracting map Phi(x) = g(x * lambda * lambda0^{d-2}) together with
/// its exact image disk of the covered ball.
#[derive(Debug, Clone)]
pub struct CoverMap {
    pub value_idx: usize,
    pub factor: Cplx,
    pub image_center: Cplx,
    pub image_radius: Float,
}

/// Family of contracting maps whose images cover B(center, 2r); the program
/// prefix generating every lambda is carried along so navigation can extend it.
#[derive(Debug, Clone)]
pub struct CoverFamily {
    pub base: Cplx,
    pub d: u32,
    pub steps: Vec<Vec<usize>>,
    pub values: Vec<Cplx>,
    pub lambda0: usize,
    pub maps: Vec<CoverMap>,
    pub center: Cplx,
    pub r: Float,
    /// measured max |Phi'| over the chosen maps on the ball boundary
    pub contraction: f64,
    /// near-1 values usable as navigation start points
    pub pool: Vec<usize>,
}

/// Circle through three points; None when they are nearly collinear.
fn circle3(z1: &Cplx, z2: &Cplx, z3: &Cplx, ctx: &PrecisionContext) -> Option<(Cplx, Float)> {
    let d21 = z2 - z1;
    if d21.norm() <= ctx.tolerance() {
        return None;
    }
    let w = &(z3 - z1) / &d21;
    let im = w.im.to_f64();
    if im.abs() < 1e-14 {
        return None;
    }
    let wn = w.norm_sqr();
    let num = Cplx::new(
        Float::with_val(ctx.bits(), &w.re - &wn),
        w.im.clone(),
    );
    let denom = Cplx::new(ctx.float(0.0), Float::with_val(ctx.bits(), 2 * &w.im));
    let c = z1 + &(&(&d21 * &num) / &denom);
    let r = z1.dist(&c);
    Some((c, r))
}

fn g_eval(base: &Cplx, x: &Cplx, ctx: &PrecisionContext) -> Option<Cplx> {
    match super::dynamics::g_map(base, &InfCplx::Finite(x.clone()), ctx) {
        Ok(InfCplx::Finite(v)) => Some(v),
        _ => None,
    }
}

/// |d/dx g(x * fac)| = |g'(x fac)| |fac|.
fn phi_map_deriv_norm(base: &Cplx, fac: &Cplx, x: &Cplx, ctx: &PrecisionContext) -> Option<f64> {
    let w = x * fac;
    let one = Cplx::one(ctx);
    let b2m1 = &(base * base) - &one;
    let hw = match h_map(base, &InfCplx::Finite(w.clone()), ctx) {
        Ok(InfCplx::Finite(v)) => v,
        _ => return None,
    };
    let d1 = base + &w;
    let d2 = base + &hw;
    if d1.norm() <= ctx.tolerance() || d2.norm() <= ctx.tolerance() {
        return None;
    }
    let gp = &(&b2m1 / &(&d2 * &d2)) * &(&b2m1 / &(&d1 * &d1));
    Some((&gp * fac).norm().to_f64())
}

const BOUNDARY_SAMPLES: usize = 24;
const CONTRACTION_LIMIT: f64 = 0.95;

struct Candidate {
    value_idx: usize,
    factor: Cplx,
    image_center: Cplx,
    image_radius: Float,
    deriv_max: f64,
}

fn assess_candidate(
    base: &Cplx,
    fac: &Cplx,
    idx: usize,
    two_r: f64,
    ctx: &PrecisionContext,
) -> Option<Candidate> {
    let one = Cplx::one(ctx);
    // the map's pole must stay away from the ball
    // pole of g at w_p = h^{-1}(-base); Phi's pole at x = w_p / fac
    let wp = {
        let num = &(&(-base) * base) - &one;
        let den = base + base;
        if den.norm() <= ctx.tolerance() {
            return None;
        }
        &num / &den
    };
    let xp = &wp / fac;
    if xp.dist(&one).to_f64() < 3.0 * two_r {
        return None;
    }
    let mut deriv_max = 0.0f64;
    let mut pts = Vec::with_capacity(3);
    for k in 0..BOUNDARY_SAMPLES {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / BOUNDARY_SAMPLES as f64;
        let x = &one + &Cplx::from_f64(ctx, two_r * ang.cos(), two_r * ang.sin());
        let dv = phi_map_deriv_norm(base, fac, &x, ctx)?;
        if dv > deriv_max {
            deriv_max = dv;
        }
        if k % (BOUNDARY_SAMPLES / 3) == 0 {
            pts.push(g_eval(base, &(&x * fac), ctx)?);
        }
    }
    if deriv_max >= CONTRACTION_LIMIT {
        return None;
    }
    let (c, r) = circle3(&pts[0], &pts[1], &pts[2], ctx)?;
    Some(Candidate {
        value_idx: idx,
        factor: fac.clone(),
        image_center: c,
        image_radius: r,
        deriv_max,
    })
}

/// f64 mirror arithmetic used by the synthesis planners.
#[derive(Clone, Copy)]
struct F2(f64, f64);

impl F2 {
    fn sub(self, o: F2) -> F2 {
        F2(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: F2) -> F2 {
        F2(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn abs2(self) -> f64 {
        self.0 * self.0 + self.1 * self.1
    }
    fn div(self, o: F2) -> F2 {
        let n = o.abs2();
        F2((self.0 * o.0 + self.1 * o.1) / n, (self.1 * o.0 - self.0 * o.1) / n)
    }
}

fn mirror(b: &ProgBuilder, i: usize) -> F2 {
    let u = super::dynamics::phi(&b.values[i], b.ctx).to_f64s();
    F2(u.0, u.1)
}

/// z (u (+) w) on mirrors: the phi-coordinate action of one pair step.
fn combine_f2(zf: F2, u: F2, w: F2) -> F2 {
    let num = F2(u.0 + w.0, u.1 + w.1);
    let den = F2(1.0 + u.0 * w.0 - u.1 * w.1, u.0 * w.1 + u.1 * w.0);
    zf.mul(num.div(den))
}

/// The value cloud backing targeted synthesis: program values whose phi
/// coordinates spread over an annulus of scales around the fixed point.
struct Cloud {
    idxs: Vec<usize>,
    mirrors: Vec<F2>,
}

impl Cloud {
    fn push(&mut self, b: &ProgBuilder, i: usize) {
        self.idxs.push(i);
        self.mirrors.push(mirror(b, i));
    }
}

/// Deterministically seeded random pair products; values with phi magnitude
/// in (1e-5, 0.6) stay eligible for further products.
fn build_cloud(b: &mut ProgBuilder, size: usize) -> Result<Cloud> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x15C0_C0DE);
    let mut cloud = Cloud { idxs: Vec::new(), mirrors: Vec::new() };
    let mut eligible: Vec<usize> = Vec::new();
    let mut cur = 0usize;
    for _ in 0..60 {
        cur = match b.push(vec![cur]) {
            Ok(i) => i,
            Err(_) => break,
        };
        let m = mirror(b, cur);
        let a = m.abs2().sqrt();
        cloud.push(b, cur);
        if (1e-5..0.6).contains(&a) {
            eligible.push(cur);
        }
    }
    if eligible.len() < 3 {
        return Err(Error::CoverFailed);
    }
    let mut misses = 0usize;
    while cloud.idxs.len() < size && misses < 4 * size {
        let i = eligible[rng.gen_range(0..eligible.len())];
        let j = eligible[rng.gen_range(0..eligible.len())];
        match b.push(vec![i, j]) {
            Ok(k) => {
                let m = mirror(b, k);
                let a = m.abs2().sqrt();
                cloud.push(b, k);
                if (1e-5..0.6).contains(&a) {
                    eligible.push(k);
                } else {
                    misses += 1;
                }
            }
            Err(_) => {
                misses += 1;
            }
        }
    }
    Ok(cloud)
}

/// Synthesizes a program value v with |phi(v) - u_target| <= tol. Each step
/// multiplies an accumulator by a cloud value and applies g, acting as
/// u -> z (u_acc (+) u_w) in the phi coordinate. Planning runs greedily on
/// f64 mirrors from several starts; the best path is committed exactly.
fn gen_target(
    b: &mut ProgBuilder,
    cloud: &mut Cloud,
    z: &Cplx,
    u_target: &Cplx,
    tol: f64,
) -> Option<usize> {
    let zft = z.to_f64s();
    let zf = F2(zft.0, zft.1);
    let utt = u_target.to_f64s();
    let ut = F2(utt.0, utt.1);
    // several nearest starts
    let mut order: Vec<usize> = (0..cloud.idxs.len()).collect();
    order.sort_by(|&a, &c| {
        cloud.mirrors[a]
            .sub(ut)
            .abs2()
            .partial_cmp(&cloud.mirrors[c].sub(ut).abs2())
            .unwrap()
    });
    for &start in order.iter().take(6) {
        let mut path: Vec<usize> = Vec::new();
        let mut acc = cloud.mirrors[start];
        let mut best = acc.sub(ut).abs2();
        for _ in 0..48 {
            if best.sqrt() <= tol * 0.5 {
                break;
            }
            let mut cand: Option<(f64, usize)> = None;
            for (k, &w) in cloud.mirrors.iter().enumerate() {
                let d2 = combine_f2(zf, acc, w).sub(ut).abs2();
                if cand.is_none_or(|(cd, _)| d2 < cd) {
                    cand = Some((d2, k));
                }
            }
            let (cd, k) = cand?;
            if cd >= best {
                break;
            }
            best = cd;
            acc = combine_f2(zf, acc, cloud.mirrors[k]);
            path.push(k);
        }
        if best.sqrt() > tol * 0.75 {
            continue;
        }
        // commit the path exactly and verify
        let mut idx = cloud.idxs[start];
        let mut ok = true;
        for k in &path {
            match b.push(vec![idx, cloud.idxs[*k]]) {
                Ok(n) => idx = n,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let u_final = super::dynamics::phi(&b.values[idx], b.ctx);
        if u_final.dist(u_target).to_f64() <= tol {
            cloud.push(b, idx);
            return Some(idx);
        }
    }
    None
}

/// Builds the cover at `base`: a deterministic random cloud of generated
/// values feeds a targeted synthesis that places one contracting map per
/// polar grid cell; the radius search stops at the first scale where the
/// sampled contraction and inverse-map covering checks both pass.
///
/// `eps_cov` controls how close to 1 the anchor lambda0 must sit.
pub fn build_cover(
    base: &Cplx,
    delta: u32,
    eps_cov: f64,
    ctx: &PrecisionContext,
) -> Result<CoverFamily> {
    let d = delta - 1;
    let info = super::dynamics::dynamics_info(base, delta, ctx)?;
    if !info.covering_conditions {
        return Err(Error::Precondition(format!(
            "covering conditions fail at base {base}: |z| = {}, nonreal = {}",
            info.z_norm, info.z_nonreal
        )));
    }
    let z = info.z.clone();
    let one = Cplx::one(ctx);
    let mut b = ProgBuilder::new(base.clone(), ctx);
    let mut cloud = build_cloud(&mut b, 6000)?;
    // navigation anchors: values close to the fixed point
    let mut pool: Vec<usize> = cloud
        .idxs
        .iter()
        .copied()
        .filter(|&i| b.values[i].dist(&one).to_f64() < 0.25)
        .collect();
    if pool.is_empty() {
        return Err(Error::CoverFailed);
    }
    // make sure the anchor is within eps_cov of the fixed point
    let mut lambda0 = *pool
        .iter()
        .min_by(|&&x, &&y| {
            b.values[x]
                .dist(&one)
                .partial_cmp(&b.values[y].dist(&one))
                .unwrap()
        })
        .unwrap();
    let mut guard = 0;
    while b.values[lambda0].dist(&one).to_f64() > eps_cov && guard < 200 {
        lambda0 = b.push(vec![lambda0])?;
        cloud.push(&b, lambda0);
        pool.push(lambda0);
        guard += 1;
    }
    let lam0_pow = b.values[lambda0].powi(d - 2);

    for &r in &[0.08f64, 0.05, 0.03, 0.02, 0.0125, 0.008, 0.005] {
        let two_r = 2.0 * r;
        // target image centers on a polar grid of the ball
        let mut targets = vec![Cplx::one(ctx)];
        for ring in 1..=5 {
            let rad = two_r * ring as f64 / 5.0;
            let nang = 4 * ring + 8;
            for t in 0..nang {
                let ang = 2.0 * std::f64::consts::PI * (t as f64 + 0.3 * ring as f64) / nang as f64;
                targets.push(&one + &Cplx::from_f64(ctx, rad * ang.cos(), rad * ang.sin()));
            }
        }
        let mut maps: Vec<CoverMap> = Vec::new();
        let mut contraction = 0.0f64;
        for tgt in &targets {
            // invert Phi(1) = g(lambda lam0^{d-2}) = tgt exactly
            let w = match g_inverse(base, &InfCplx::Finite(tgt.clone()), ctx) {
                Ok(InfCplx::Finite(v)) => v,
                _ => continue,
            };
            let lam_ideal = &w / &lam0_pow;
            let u_t = super::dynamics::phi(&lam_ideal, ctx);
            if u_t.norm().to_f64() > 0.9 {
                continue;
            }
            let Some(li) = gen_target(&mut b, &mut cloud, &z, &u_t, 0.05 * two_r) else {
                continue;
            };
            let fac = &b.values[li] * &lam0_pow;
            if let Some(c) = assess_candidate(base, &fac, li, two_r, ctx) {
                if c.deriv_max > contraction {
                    contraction = c.deriv_max;
                }
                maps.push(CoverMap {
                    value_idx: c.value_idx,
                    factor: c.factor,
                    image_center: c.image_center,
                    image_radius: c.image_radius,
                });
            }
        }
        if maps.len() < (targets.len() * 3) / 4 {
            continue;
        }
        // verification on a fine grid through the exact inverse maps
        let mut fine_ok = true;
        'outer: for a in 0..=10 {
            let rad = two_r * a as f64 / 10.0;
            for t in 0..36 {
                let ang = 2.0 * std::f64::consts::PI * t as f64 / 36.0;
                let y = &one + &Cplx::from_f64(ctx, rad * ang.cos(), rad * ang.sin());
                let gi = match g_inverse(base, &InfCplx::Finite(y.clone()), ctx) {
                    Ok(InfCplx::Finite(v)) => v,
                    _ => {
                        fine_ok = false;
                        break 'outer;
                    }
                };
                let hit = maps.iter().any(|m| {
                    (&gi / &m.factor).dist(&one).to_f64() <= 0.98 * two_r
                });
                if !hit {
                    fine_ok = false;
                    break 'outer;
                }
            }
        }
        if !fine_ok {
            continue;
        }
        return Ok(CoverFamily {
            base: base.clone(),
            d,
            steps: b.steps,
            values: b.values,
            lambda0,
            maps,
            center: one,
            r: ctx.float(r),
            contraction,
            pool,
        });
    }
    Err(Error::CoverFailed)
}

fn push_family_step(
    fam: &mut CoverFamily,
    idxs: Vec<usize>,
    ctx: &PrecisionContext,
) -> Result<usize> {
    let mut prod = Cplx::one(ctx);
    for &i in &idxs {
        prod = &prod * &fam.values[i];
    }
    match super::dynamics::g_map(&fam.base, &InfCplx::Finite(prod), ctx) {
        Ok(InfCplx::Finite(v)) => {
            fam.steps.push(idxs);
            fam.values.push(v);
            Ok(fam.values.len() - 1)
        }
        _ => Err(Error::NavigationStuck),
    }
}

/// Greedy contraction walk: pull the target back through inverse maps while
/// staying in the ball, then replay the walk forward from a nearby generated
/// value. Extends the family's program; returns it with the reached value.
pub fn navigate_to(
    fam: &mut CoverFamily,
    target: &Cplx,
    eps: f64,
    ctx: &PrecisionContext,
) -> Result<(IsingProgram, usize, Cplx)> {
    let two_r = 2.0 * fam.r.to_f64();
    if target.dist(&fam.center).to_f64() > two_r {
        return Err(Error::Precondition("navigation target outside the covered ball".into()));
    }
    let c_star = fam.contraction.min(CONTRACTION_LIMIT);
    let walk_len = ((eps / (2.0 * two_r)).ln() / c_star.ln()).ceil().max(1.0) as usize;
    if walk_len > 100_000 {
        return Err(Error::NavigationStuck);
    }
    let mut seq: Vec<usize> = Vec::with_capacity(walk_len);
    let mut t = target.clone();
    for _ in 0..walk_len {
        let mut best: Option<(f64, usize, Cplx)> = None;
        let gi = match g_inverse(&fam.base, &InfCplx::Finite(t.clone()), ctx)? {
            InfCplx::Finite(v) => v,
            InfCplx::Inf => return Err(Error::NavigationStuck),
        };
        for (mi, m) in fam.maps.iter().enumerate() {
            let x = &gi / &m.factor;
            let dist = x.dist(&fam.center).to_f64();
            if dist <= two_r && best.as_ref().is_none_or(|(bd, _, _)| dist < *bd) {
                best = Some((dist, mi, x));
            }
        }
        let (_, mi, x) = best.ok_or(Error::NavigationStuck)?;
        seq.push(mi);
        t = x;
    }
    // start from the generated value closest to the walk's end
    let x0 = *fam
        .pool
        .iter()
        .min_by(|&&a, &&c| {
            fam.values[a]
                .dist(&t)
                .partial_cmp(&fam.values[c].dist(&t))
                .unwrap()
        })
        .unwrap();
    let mut idx = x0;
    let lam0 = fam.lambda0;
    let d = fam.d as usize;
    for &mi in seq.iter().rev() {
        let vi = fam.maps[mi].value_idx;
        let mut step = vec![idx, vi];
        step.extend(std::iter::repeat(lam0).take(d - 2));
        idx = push_family_step(fam, step, ctx)?;
    }
    let value = fam.values[idx].clone();
    if value.dist(target).to_f64() > eps {
        return Err(Error::NavigationStuck);
    }
    Ok((IsingProgram::new(fam.steps.clone()), idx, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::program::program_eval;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn cover_contracts_and_covers() {
        let c = ctx();
        // base with |z| in the rich band at Delta = 4
        let base = Cplx::from_f64(&c, 0.4804, 2.0528);
        let fam = build_cover(&base, 4, 1e-4, &c).unwrap();
        assert!(fam.contraction < 0.95);
        assert!(!fam.maps.is_empty());
        // every map is contracting on sampled interior points too
        let two_r = 2.0 * fam.r.to_f64();
        for m in &fam.maps {
            for k in 0..8 {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
                let x = &fam.center
                    + &Cplx::from_f64(&c, 0.5 * two_r * ang.cos(), 0.5 * two_r * ang.sin());
                let dv = phi_map_deriv_norm(&base, &m.factor, &x, &c).unwrap();
                assert!(dv < 0.95);
            }
        }
    }

    #[test]
    fn navigation_reaches_targets() {
        let c = ctx();
        let base = Cplx::from_f64(&c, 0.4804, 2.0528);
        let mut fam = build_cover(&base, 4, 1e-4, &c).unwrap();
        let two_r = 2.0 * fam.r.to_f64();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..12 {
            let ang = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let rad = rng.gen_range(0.0..two_r);
            let target = &fam.center + &Cplx::from_f64(&c, rad * ang.cos(), rad * ang.sin());
            let (prog, idx, value) = navigate_to(&mut fam, &target, 1e-6, &c).unwrap();
            assert!(value.dist(&target).to_f64() <= 1e-6);
            // the returned program really evaluates to the value
            let tr = program_eval(&prog, &base, &c).unwrap();
            let got = tr.values[idx].as_finite().unwrap();
            assert!(got.approx_eq(&value, &c.float(1e-20)));
        }
        // trivial navigation: the anchor itself
        let lam0_val = fam.values[fam.lambda0].clone();
        let (_, _, v) = navigate_to(&mut fam, &lam0_val, 1e-6, &c).unwrap();
        assert!(v.dist(&lam0_val).to_f64() <= 1e-6);
    }

    #[test]
    fn target_outside_ball_rejected() {
        let c = ctx();
        let base = Cplx::from_f64(&c, 0.4804, 2.0528);
        let mut fam = build_cover(&base, 4, 1e-4, &c).unwrap();
        let far = Cplx::from_f64(&c, 5.0, 5.0);
        assert!(matches!(
            navigate_to(&mut fam, &far, 1e-6, &c),
            Err(Error::Precondition(_))
        ));
    }
}


