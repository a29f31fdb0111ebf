//! Parameter-plane geometry: the R(delta) disks, the zero-free parameter
//! eps_Delta, competitor regions, hardness threshold, and classification.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Cplx, PrecisionContext};

/// Closed disk in the beta plane.
#[derive(Debug, Clone, Serialize)]
pub struct DiskRegion {
    #[serde(serialize_with = "ser_cplx")]
    pub center: Cplx,
    #[serde(serialize_with = "ser_float")]
    pub radius: Float,
}

fn ser_cplx<S: serde::Serializer>(c: &Cplx, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

fn ser_float<S: serde::Serializer>(f: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::numerics::float_decimal(f, 30))
}

/// tan(pi / (4 (Delta - 1))): the zero-free disk parameter.
pub fn epsilon_delta(delta: u32, ctx: &PrecisionContext) -> Result<Float> {
    if delta < 3 {
        return Err(Error::Domain(format!("epsilon_Delta needs Delta >= 3, got {delta}")));
    }
    let p = ctx.bits();
    let pi = Float::with_val(p, rug::float::Constant::Pi);
    Ok((pi / (4 * (delta - 1))).tan())
}

/// The disk form of R(delta): center (1+d^2)/(1-d^2), radius 2d/(1-d^2).
pub fn r_region(delta: &Float, ctx: &PrecisionContext) -> Result<DiskRegion> {
    let p = ctx.bits();
    if delta.cmp0() != Some(std::cmp::Ordering::Greater) || *delta >= 1 {
        return Err(Error::Domain("r_region needs 0 < delta < 1".into()));
    }
    let d2 = Float::with_val(p, delta.square_ref());
    let denom = Float::with_val(p, 1 - &d2);
    let center = Float::with_val(p, 1 + &d2) / &denom;
    let radius = Float::with_val(p, 2 * delta.clone()) / &denom;
    Ok(DiskRegion { center: Cplx::new(center, Float::new(p)), radius })
}

/// The defining ratio |beta - 1| / |beta + 1|.
pub fn phi_ratio(beta: &Cplx, ctx: &PrecisionContext) -> Float {
    let one = Cplx::one(ctx);
    let num = (beta - &one).norm();
    let den = (beta + &one).norm();
    num / den
}

/// Membership in R(delta) = { |beta-1|/|beta+1| <= delta }, tolerance-aware.
/// beta = -1 is never a member.
pub fn in_r(beta: &Cplx, delta: &Float, ctx: &PrecisionContext) -> bool {
    let one = Cplx::one(ctx);
    let den = (beta + &one).norm();
    if den <= ctx.tolerance() {
        return false;
    }
    let num = (beta - &one).norm();
    num <= Float::with_val(ctx.bits(), delta * &den) * (Float::with_val(ctx.bits(), 1) + ctx.tolerance())
}

/// Strict interior test with a caller-chosen margin: ratio <= delta * (1 - margin).
pub fn in_r_strict(beta: &Cplx, delta: &Float, margin: f64, ctx: &PrecisionContext) -> bool {
    let r = phi_ratio(beta, ctx);
    r < Float::with_val(ctx.bits(), delta * &ctx.float(1.0 - margin))
}

/// Barvinok's delta_Delta: max of sin(a/2) cos(Delta a/2) over (0, 2pi/(3 Delta)),
/// located by golden-section search refined to 1e-12.
pub fn barvinok_delta(delta: u32, ctx: &PrecisionContext) -> Result<Float> {
    if delta < 1 {
        return Err(Error::Domain("barvinok_delta needs Delta >= 1".into()));
    }
    let p = ctx.bits();
    let pi = Float::with_val(p, rug::float::Constant::Pi);
    let hi = Float::with_val(p, 2 * pi.clone()) / (3 * delta);
    let f = |a: &Float| -> Float {
        let half = Float::with_val(p, a / 2);
        let s = half.clone().sin();
        let c = (half * delta).cos();
        s * c
    };
    let gr = (Float::with_val(p, 5).sqrt() - 1) / 2;
    let mut a = Float::with_val(p, 1e-30);
    let mut b = hi;
    let tol = Float::with_val(p, 1e-14);
    while Float::with_val(p, &b - &a) > tol {
        let span = Float::with_val(p, &b - &a);
        let c1 = Float::with_val(p, &b - &(span.clone() * &gr));
        let d1 = Float::with_val(p, &a + &(span * &gr));
        if f(&c1) > f(&d1) {
            b = d1;
        } else {
            a = c1;
        }
    }
    let mid = Float::with_val(p, &a + &b) / 2;
    Ok(f(&mid))
}

/// Hardness-threshold membership: beta nonreal, beta not in {i, -i}, and
/// |beta-1|/|beta+1| > 1/sqrt(Delta-1).
pub fn hardness_member(beta: &Cplx, delta: u32, ctx: &PrecisionContext) -> bool {
    let tol = ctx.tolerance();
    if beta.im.clone().abs() <= tol {
        return false;
    }
    let i = Cplx::i(ctx);
    if beta.dist(&i) <= tol || beta.dist(&(-&i)) <= tol {
        return false;
    }
    let thresh = Float::with_val(ctx.bits(), delta - 1).sqrt().recip();
    phi_ratio(beta, ctx) > thresh
}

/// Membership in the Barvinok-Barvinok region via the principal branch:
/// with a = log(beta)/2, feasible iff Delta |Re a| < 1 and
/// 10 Delta |Im a| < (1 - Delta |Re a|)^2.
pub fn barvinok_barvinok_member(beta: &Cplx, delta: u32, ctx: &PrecisionContext) -> Result<bool> {
    if beta.norm() <= ctx.tolerance() {
        return Err(Error::Domain("beta = 0 has no logarithm".into()));
    }
    let p = ctx.bits();
    let a = beta.ln().scale(&ctx.float(0.5));
    let re = a.re.clone().abs();
    let im = a.im.clone().abs();
    let slack = Float::with_val(p, 1 - Float::with_val(p, &re * &Float::with_val(p, delta)));
    if slack <= ctx.tolerance() {
        return Ok(false);
    }
    let lhs = Float::with_val(p, &im * &Float::with_val(p, 10 * delta));
    Ok(lhs < Float::with_val(p, slack.square_ref()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    SpecialEasyPoint,
    FptasZeroFree,
    Hard,
    Unresolved,
}

/// Classification of a parameter point, with the per-region membership
/// witnesses that justify the label.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: Label,
    pub witnesses: Vec<(String, bool)>,
    /// Set when the label is Unresolved and beta is real inside the interval
    /// covered by the non-explicit tree-uniqueness zero-free result.
    pub real_uniqueness_interval: bool,
}

/// Decision order: special point > zero-free FPTAS > hard > unresolved.
/// `zero_registry` lists known partition-function zeros with degree-Delta
/// witnesses; matching one is a hardness witness in itself.
pub fn classify(
    beta: &Cplx,
    delta: u32,
    zero_registry: &[Cplx],
    ctx: &PrecisionContext,
) -> Result<Classification> {
    if delta < 3 {
        return Err(Error::Domain("classify needs Delta >= 3".into()));
    }
    let tol = ctx.tolerance();
    let mut witnesses = Vec::new();
    let special = [
        Cplx::zero(ctx),
        Cplx::one(ctx),
        -&Cplx::one(ctx),
        Cplx::i(ctx),
        -&Cplx::i(ctx),
    ];
    let is_special = special.iter().any(|s| beta.dist(s) <= tol);
    witnesses.push(("special-easy-point".to_string(), is_special));

    let eps = epsilon_delta(delta, ctx)?;
    let ratio = phi_ratio(beta, ctx);
    // boundary band around the threshold stays unresolved
    let boundary = Float::with_val(ctx.bits(), &ratio - &eps).abs() <= tol;
    let zero_free = !boundary && in_r_strict(beta, &eps, 0.0, ctx);
    witnesses.push(("zero-free-disk".to_string(), zero_free));

    let hard = hardness_member(beta, delta, ctx);
    let hard_boundary = {
        let thresh = Float::with_val(ctx.bits(), delta - 1).sqrt().recip();
        Float::with_val(ctx.bits(), &ratio - &thresh).abs() <= tol
    };
    witnesses.push(("hardness-threshold".to_string(), hard && !hard_boundary));

    let by_zero = zero_registry.iter().any(|z| {
        beta.dist(z) <= Float::with_val(ctx.bits(), 1e-6 * &ctx.float(1.0))
    }) && beta.im.clone().abs() > tol;
    witnesses.push(("zero-registry".to_string(), by_zero));

    let bb = barvinok_barvinok_member(beta, delta, ctx).unwrap_or(false);
    witnesses.push(("barvinok-barvinok".to_string(), bb));

    let label = if is_special {
        Label::SpecialEasyPoint
    } else if zero_free {
        Label::FptasZeroFree
    } else if (hard && !hard_boundary) || by_zero {
        Label::Hard
    } else {
        Label::Unresolved
    };

    // annotation for real beta in ((Delta-2)/Delta, Delta/(Delta-2))
    let real_uniqueness_interval = label == Label::Unresolved
        && beta.im.clone().abs() <= tol
        && {
            let lo = (delta as f64 - 2.0) / delta as f64;
            let hi = delta as f64 / (delta as f64 - 2.0);
            let r = beta.re.to_f64();
            r > lo && r < hi
        };

    Ok(Classification { label, witnesses, real_uniqueness_interval })
}

/// Numeric replacement for the symbolic bound behind the competitor-region
/// containment: max over the rational parameterization
/// cos = 2t/(1+t^2), sin = (1-t^2)/(1+t^2), t1, t2 in [-1, 1] of
/// |(e^{i tau} - e^{i theta}) / (2 + delta (e^{i tau} + e^{i theta}))| <= 1,
/// plus sampled witnesses for the inclusion chain
/// [ (1-d)/(1+d), (1+d)/(1-d) ] in U_a B(1,d)/a in R(d) on the same domain.
///
/// The t-parameterization matters: both unit vectors range over the closed
/// upper semicircle. Mixed semicircle pairs violate the bound (e.g. at
/// delta = 1/2, tau = 2pi/3, theta = 4pi/3 the ratio is 2/sqrt(3)), so the
/// containment only holds with this restriction.
pub fn competitor_containment_check(delta: f64, grid: usize, ctx: &PrecisionContext) -> Result<f64> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Domain("competitor_containment_check needs delta in (0,1)".into()));
    }
    let unit = |t: f64| -> (f64, f64) {
        let d = 1.0 + t * t;
        (2.0 * t / d, (1.0 - t * t) / d)
    };
    let mut max = 0.0f64;
    let mut arg_max = (0.0f64, 0.0f64);
    for a in 0..=grid {
        let t1 = -1.0 + 2.0 * a as f64 / grid as f64;
        let (ctau, st) = unit(t1);
        for b in 0..=grid {
            let t2 = -1.0 + 2.0 * b as f64 / grid as f64;
            let (cth, sth) = unit(t2);
            let num = ((ctau - cth).powi(2) + (st - sth).powi(2)).sqrt();
            let den_re = 2.0 + delta * (ctau + cth);
            let den_im = delta * (st + sth);
            let den = (den_re * den_re + den_im * den_im).sqrt();
            let v = num / den;
            if v > max {
                max = v;
                arg_max = (t1, t2);
            }
        }
    }
    if max > 1.0 + 1e-12 {
        return Err(Error::CheckFailed(format!(
            "ratio {max} > 1 at (t1, t2) = {arg_max:?}"
        )));
    }
    // inclusion-chain samples: interval endpoints, then upper-semicircle
    // boundary quotients z/a which the grid bound puts inside R(delta)
    // sampled coordinates are f64, so membership gets a 1e-12 slack
    let dd = ctx.float(delta);
    let slack = Float::with_val(ctx.bits(), &dd * &ctx.float(1.0 + 1e-12));
    let p = ctx.bits();
    let lo = Float::with_val(p, 1 - &dd) / Float::with_val(p, 1 + &dd);
    let hi_pt = lo.clone().recip();
    for b in [Cplx::real(lo), Cplx::real(hi_pt)] {
        if phi_ratio(&b, ctx) > slack {
            return Err(Error::CheckFailed(format!("interval endpoint {b} escaped R(delta)")));
        }
    }
    for a_step in 0..=24 {
        let (ca, sa) = unit(-1.0 + a_step as f64 / 12.0);
        let a = Cplx::from_f64(ctx, 1.0 + delta * ca, delta * sa);
        for t_step in 0..=24 {
            let (ct, st) = unit(-1.0 + t_step as f64 / 12.0);
            let z = Cplx::from_f64(ctx, 1.0 + delta * ct, delta * st);
            let b = &z / &a;
            if phi_ratio(&b, ctx) > slack {
                return Err(Error::CheckFailed(format!(
                    "B(1,d)/a sample escaped R(delta) at t = ({t_step}, {a_step})"
                )));
            }
        }
    }
    Ok(max)
}

/// One row of the comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub delta: u32,
    pub eps: f64,
    pub barvinok: f64,
    pub eps_scaled: f64,
    pub barvinok_scaled: f64,
}

/// Rows (Delta, eps_Delta, delta_Delta, eps*(Delta-1), delta*(Delta-1)).
/// eps > delta is asserted per row.
pub fn comparison_table(from: u32, to: u32, ctx: &PrecisionContext) -> Result<Vec<ComparisonRow>> {
    if from < 3 || from > to {
        return Err(Error::Domain("comparison_table needs 3 <= from <= to".into()));
    }
    let mut rows = Vec::new();
    for d in from..=to {
        let eps = epsilon_delta(d, ctx)?;
        let bar = barvinok_delta(d, ctx)?;
        if eps <= bar {
            return Err(Error::CheckFailed(format!("eps_Delta <= delta_Delta at Delta = {d}")));
        }
        let scale = (d - 1) as f64;
        rows.push(ComparisonRow {
            delta: d,
            eps: eps.to_f64(),
            barvinok: bar.to_f64(),
            eps_scaled: eps.to_f64() * scale,
            barvinok_scaled: bar.to_f64() * scale,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn epsilon_values() {
        let c = ctx();
        let e3 = epsilon_delta(3, &c).unwrap();
        assert!((e3.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-14);
        let e5 = epsilon_delta(5, &c).unwrap();
        assert!((e5.to_f64() - 0.19891236737965800691).abs() < 1e-14);
        assert!(epsilon_delta(2, &c).is_err());
        // eps_Delta (Delta-1) -> pi/4
        let e2000 = epsilon_delta(2000, &c).unwrap();
        assert!((e2000.to_f64() * 1999.0 - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
    }

    #[test]
    fn r_region_disk() {
        let c = ctx();
        let d = c.float(1.0 / 3.0);
        let disk = r_region(&d, &c).unwrap();
        assert!((disk.center.re.to_f64() - 1.25).abs() < 1e-14);
        assert!((disk.radius.to_f64() - 0.75).abs() < 1e-14);
        // farthest point norm = (1+d)/(1-d) = 2
        let far = disk.center.re.to_f64() + disk.radius.to_f64();
        assert!((far - 2.0).abs() < 1e-14);
        assert!(r_region(&c.float(1.5), &c).is_err());
    }

    #[test]
    fn disk_ratio_duality_and_inversion() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let d = c.float(rng.gen_range(0.05..0.95));
            let beta = Cplx::from_f64(&c, rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let disk = r_region(&d, &c).unwrap();
            let by_ratio = in_r(&beta, &d, &c);
            let by_disk = beta.dist(&disk.center) <= Float::with_val(c.bits(), &disk.radius * &(Float::with_val(c.bits(), 1) + c.tolerance()));
            assert_eq!(by_ratio, by_disk);
            // inversion symmetry
            if beta.norm() > c.tolerance() {
                assert_eq!(by_ratio, in_r(&beta.recip(), &d, &c));
            }
        }
    }

    #[test]
    fn in_r_specials() {
        let c = ctx();
        let half = c.float(0.5);
        assert!(in_r(&Cplx::one(&c), &half, &c));
        assert!(!in_r(&(-&Cplx::one(&c)), &half, &c));
        // delta = 1 equals the closed right half-plane
        let one = c.float(1.0);
        assert!(in_r(&Cplx::from_f64(&c, 0.0, 3.7), &one, &c));
        assert!(in_r(&Cplx::from_f64(&c, 2.0, -1.0), &one, &c));
        assert!(!in_r(&Cplx::from_f64(&c, -0.01, 5.0), &one, &c));
    }

    #[test]
    fn mobius_circle_image() {
        // |w| = d maps onto |z - c_d| = r_d under w -> -(1+w)/(w-1)
        let c = ctx();
        let d = 0.37;
        let disk = r_region(&c.float(d), &c).unwrap();
        for k in 0..360 {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 360.0;
            let w = Cplx::from_f64(&c, d * ang.cos(), d * ang.sin());
            let z = -&(&(&Cplx::one(&c) + &w) / &(&w - &Cplx::one(&c)));
            let err = (z.dist(&disk.center) - disk.radius.clone()).abs();
            assert!(err.to_f64() < 1e-12);
        }
    }

    #[test]
    fn barvinok_delta_values() {
        let c = ctx();
        let d3 = barvinok_delta(3, &c).unwrap();
        assert!((d3.to_f64() * 2.0 - 0.369009).abs() < 1e-6);
        let d10 = barvinok_delta(10, &c).unwrap();
        assert!((d10.to_f64() * 9.0 - 0.504365).abs() < 1e-5);
        let d2000 = barvinok_delta(2000, &c).unwrap();
        assert!((d2000.to_f64() * 1999.0 - 0.561).abs() < 1e-3);
    }

    #[test]
    fn unimodality_grid_prepass() {
        // the golden-section objective is unimodal on (0, 2pi/(3 Delta))
        for delta in [3u32, 7, 20] {
            let hi = 2.0 * std::f64::consts::PI / (3.0 * delta as f64);
            let f = |a: f64| (a / 2.0).sin() * (delta as f64 * a / 2.0).cos();
            let n = 10_000;
            let mut rises = 0;
            let mut direction_changes = 0;
            let mut last = f(hi / n as f64);
            let mut going_up = true;
            for k in 2..=n {
                let v = f(hi * k as f64 / n as f64);
                let up = v >= last;
                if up {
                    rises += 1;
                }
                if up != going_up {
                    direction_changes += 1;
                    going_up = up;
                }
                last = v;
            }
            assert!(rises > 0);
            assert!(direction_changes <= 1, "objective not unimodal for Delta = {delta}");
        }
    }

    #[test]
    fn hardness_examples() {
        let c = ctx();
        assert!(hardness_member(&Cplx::from_f64(&c, 0.0, 3.0), 3, &c));
        assert!(!hardness_member(&Cplx::from_f64(&c, 1.0, 0.1), 3, &c));
        assert!(!hardness_member(&Cplx::i(&c), 3, &c));
        assert!(!hardness_member(&Cplx::from_f64(&c, 0.7, 0.0), 3, &c));
    }

    #[test]
    fn barvinok_barvinok_examples() {
        let c = ctx();
        for d in [3u32, 5, 9] {
            assert!(barvinok_barvinok_member(&Cplx::one(&c), d, &c).unwrap());
            // a = 1/Delta sits on the closure of the Re constraint: excluded
            let e = (Float::with_val(c.bits(), 2) / d).exp();
            let boundary = Cplx::new(e, c.float(0.0));
            assert!(!barvinok_barvinok_member(&boundary, d, &c).unwrap());
        }
        assert!(barvinok_barvinok_member(&Cplx::zero(&c), 3, &c).is_err());
        // interior real point is a member
        let b = Cplx::from_f64(&c, (0.8 / 3.0f64).exp(), 0.0);
        assert!(barvinok_barvinok_member(&b, 3, &c).unwrap());
    }

    #[test]
    fn barvinok_barvinok_diamond_boundary() {
        // boundary points of the region for Delta = 3: a = (1-t)/3 + i t^2/30
        // are excluded by the strict Re constraint; points pulled slightly
        // inward on both coordinates are members
        let c = ctx();
        for k in 1..10 {
            let t = k as f64 / 10.0;
            let a_re = (1.0 - t) / 3.0;
            let a_im = t * t / 30.0;
            // the boundary satisfies 10 Delta Im = (1 - Delta Re)^2 exactly,
            // so test exclusion just outside it
            let outside = Cplx::from_f64(&c, 2.0 * a_re, 2.0 * a_im * 1.02).exp();
            assert!(!barvinok_barvinok_member(&outside, 3, &c).unwrap(), "t = {t}");
            let inside = Cplx::from_f64(&c, 2.0 * a_re * 0.98, 2.0 * a_im * 0.9).exp();
            assert!(barvinok_barvinok_member(&inside, 3, &c).unwrap(), "t = {t}");
        }
    }

    #[test]
    fn classify_examples() {
        let c = ctx();
        let cl = classify(&Cplx::from_f64(&c, 1.2, 0.0), 3, &[], &c).unwrap();
        assert_eq!(cl.label, Label::FptasZeroFree);
        let cl = classify(&Cplx::from_f64(&c, 0.0, 10.0), 3, &[], &c).unwrap();
        assert_eq!(cl.label, Label::Hard);
        for sp in [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let cl = classify(&Cplx::from_f64(&c, sp.0, sp.1), 3, &[], &c).unwrap();
            assert_eq!(cl.label, Label::SpecialEasyPoint);
        }
        // the known zero is unresolved by the two main predicates but
        // becomes hard through the registry
        let b0 = Cplx::from_f64(&c, 0.396608, 0.917988);
        let cl = classify(&b0, 3, &[], &c).unwrap();
        assert_eq!(cl.label, Label::Unresolved);
        let cl = classify(&b0, 3, &[b0.clone()], &c).unwrap();
        assert_eq!(cl.label, Label::Hard);
        assert!(cl.witnesses.iter().any(|(n, v)| n == "zero-registry" && *v));
        assert!(cl.witnesses.iter().any(|(n, v)| n == "hardness-threshold" && !*v));
    }

    #[test]
    fn competitor_containment_grid() {
        let c = ctx();
        // tau = theta gives 0; full grid stays <= 1
        let max = competitor_containment_check(0.5, 180, &c).unwrap();
        assert!(max <= 1.0 + 1e-12);
        assert!(max > 0.9, "grid max should approach 1, got {max}");
    }

    #[test]
    fn comparison_rows() {
        let c = ctx();
        let rows = comparison_table(3, 8, &c).unwrap();
        assert_eq!(rows.len(), 6);
        let r3 = &rows[0];
        assert!((r3.eps - 0.414214).abs() < 1e-6);
        assert!((r3.barvinok - 0.184505).abs() < 1e-5);
        assert!((r3.eps_scaled - 0.828427).abs() < 1e-5);
        assert!((r3.barvinok_scaled - 0.369009).abs() < 1e-5);
        for r in &rows {
            assert!(r.eps > r.barvinok);
        }
    }

    #[test]
    fn monotonicity() {
        let c = ctx();
        let mut last_e = f64::INFINITY;
        let mut last_b = f64::INFINITY;
        for d in 3..=60u32 {
            let e = epsilon_delta(d, &c).unwrap().to_f64();
            let b = barvinok_delta(d, &c).unwrap().to_f64();
            assert!(e < last_e && b < last_b, "not strictly decreasing at {d}");
            assert!(e > b);
            last_e = e;
            last_b = b;
        }
    }

    #[test]
    fn tan_double_angle() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let d: f64 = rng.gen_range(0.01..0.99);
            let lhs = (2.0 * d.atan()).tan();
            let rhs = 2.0 * d / (1.0 - d * d);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
        }
        let _ = c;
    }
}
