//! The escape construction: implementing arbitrary complex edge interactions
//! from a hardness-region base, plus the zeros-to-minus-one gadget and the
//! explicit degree-3 graph whose partition function vanishes inside the
//! undecided band.

use rug::Float;
use serde::Serialize;

use super::approach::ProgBuilder;
use super::cover::{build_cover, navigate_to, CoverFamily};
use super::dynamics::{dynamics_info, f_prime, g_inverse, h_map, phi};
use super::program::{program_compile_with_base, IsingProgram};
use crate::error::{Error, Result};
use crate::exact::{implemented_weight, interaction_matrix, ising_poly};
use crate::graph::{MultiGraph, Terminals};
use crate::numerics::{Cplx, InfCplx, PrecisionContext};
use crate::region::phi_ratio;

/// The working band for rebasing: |z| of the working base must land here so
/// the fixed point is repelling (d |z| > 1.1) and the value cloud is rich.
const Z_BAND_LO: f64 = 0.55;
const Z_BAND_HI: f64 = 0.85;
const Z_IM_FRACTION: f64 = 0.05;
pub const ESCAPE_CAP: usize = 60;

#[derive(Debug, Clone, Serialize)]
pub enum StageKind {
    /// A straight-line program over the stage's base interaction.
    Program(IsingProgram),
    /// The unit-circle pre-transform gadget: for |beta| = 1 the composition
    /// gamma = g_{beta'}(beta beta') with beta' = h_beta(beta) = Re(beta).
    UnitCircleGadget,
}

/// One link of the implementation chain: a construction over `base` whose
/// implemented interaction is `value`; the next stage uses `value` as base.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub kind: StageKind,
    #[serde(skip)]
    pub base: Cplx,
    #[serde(skip)]
    pub value: Cplx,
    pub base_text: String,
    pub value_text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplementOutcome {
    pub stages: Vec<Stage>,
    #[serde(skip)]
    pub value: Cplx,
    pub value_text: String,
    pub target_error: f64,
    pub escape_steps: usize,
    #[serde(skip)]
    pub graph: Option<(MultiGraph, Terminals)>,
    pub graph_vertices: Option<usize>,
    pub graph_verified: Option<bool>,
}

fn in_z_band(z_norm: f64, z_im: f64, z_re: f64) -> bool {
    let znorm = z_norm;
    (Z_BAND_LO..=Z_BAND_HI).contains(&znorm)
        && z_im.abs() > Z_IM_FRACTION * (z_re.hypot(z_im)).max(1e-300)
}

/// Searches beta-program values whose squared phi coordinate falls in the
/// working band. The pool mixes plain orbits, the gamma value and its orbit,
/// and a near-1 seed when needed; a frontier walk expands by self-powers
/// (which scale |phi| by roughly k |z| per step) and pairs with pool values.
fn rebase_to_band(beta: &Cplx, delta: u32, ctx: &PrecisionContext) -> Result<(IsingProgram, Cplx)> {
    let d = (delta - 1) as usize;
    let mut b = ProgBuilder::new(beta.clone(), ctx);
    let mut pool: Vec<usize> = vec![0];
    let mut cur = 0usize;
    for _ in 0..40 {
        match b.push(vec![cur]) {
            Ok(i) => {
                cur = i;
                pool.push(i);
            }
            Err(_) => break,
        }
    }
    if let Ok(gi) = b.push(vec![0, 0]) {
        pool.push(gi);
        let mut cur = gi;
        for _ in 0..60 {
            match b.push(vec![cur]) {
                Ok(i) => {
                    cur = i;
                    pool.push(i);
                }
                Err(_) => break,
            }
        }
    }
    let u_of = |b: &ProgBuilder, i: usize| -> Option<Cplx> {
        let v = &b.values[i];
        let one = Cplx::one(ctx);
        if (v + &one).norm() <= ctx.tolerance() {
            return None;
        }
        Some(phi(v, ctx))
    };
    let band_hit = |v: &Cplx| -> bool {
        let one = Cplx::one(ctx);
        if (v + &one).norm() <= ctx.tolerance() {
            return false;
        }
        let u = phi(v, ctx);
        let z = &u * &u;
        let (zr, zi) = z.to_f64s();
        let zn = z.norm().to_f64();
        (0.57..0.83).contains(&zn)
            && zi.abs() > Z_IM_FRACTION * zr.hypot(zi)
            && (v.norm().to_f64() - 1.0).abs() > 1e-9
    };
    // seeds: small nonreal values; synthesize one when the orbits stay big
    let mut seeds: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&i| {
            u_of(&b, i).is_some_and(|u| {
                let n = u.norm().to_f64();
                (1e-9..0.4).contains(&n) && u.im.to_f64().abs() > 1e-12
            })
        })
        .collect();
    if seeds.is_empty() {
        let s = super::approach::approach_into(&mut b, 0.3, 0)?;
        pool.push(s);
        seeds.push(s);
    }
    let mut frontier: Vec<usize> = seeds;
    frontier.extend(pool.iter().copied().take(10));
    const LN_TARGET: f64 = -0.1779; // ln(sqrt(0.7))
    for _round in 0..40 {
        let mut cands: Vec<(f64, Vec<usize>)> = Vec::new();
        for &cu in frontier.iter().take(12) {
            let try_step = |step: Vec<usize>, cands: &mut Vec<(f64, Vec<usize>)>| -> Option<usize> {
                let v = b.preview(&step)?;
                if band_hit(&v) {
                    return Some(1);
                }
                let one = Cplx::one(ctx);
                if (&v + &one).norm() <= ctx.tolerance() {
                    return None;
                }
                let u = phi(&v, ctx);
                let n = u.norm().to_f64();
                if (1e-9..5.0).contains(&n) {
                    cands.push(((n.ln() - LN_TARGET).abs(), step));
                }
                None
            };
            for k in 2..=d {
                let step = vec![cu; k];
                if try_step(step.clone(), &mut cands).is_some() {
                    let idx = b.push(step)?;
                    return Ok((b.program(), b.values[idx].clone()));
                }
            }
            for &i in pool.iter().take(46) {
                let step = vec![cu, i];
                if try_step(step.clone(), &mut cands).is_some() {
                    let idx = b.push(step)?;
                    return Ok((b.program(), b.values[idx].clone()));
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        cands.sort_by(|a, c| a.0.partial_cmp(&c.0).unwrap());
        let mut newf = Vec::new();
        for (_, step) in cands.into_iter().take(12) {
            if let Ok(k) = b.push(step) {
                newf.push(k);
            }
        }
        if newf.is_empty() {
            break;
        }
        frontier = newf;
    }
    Err(Error::NonConvergence(40))
}

/// Pullback escape: peel the target back through f^{-1} (the d-th roots of
/// g^{-1}), steering the beam toward the fixed point, until a preimage lands
/// well inside the covered ball. Returns (N, x) with f^N(x) = target.
fn pullback_escape(
    base: &Cplx,
    d: u32,
    lambda: &Cplx,
    r_inner: f64,
    ctx: &PrecisionContext,
) -> Result<(usize, Cplx)> {
    let one = Cplx::one(ctx);
    let mut beam: Vec<Cplx> = vec![lambda.clone()];
    for n in 1..=ESCAPE_CAP {
        let mut next: Vec<(Float, Cplx)> = Vec::new();
        for w in &beam {
            let gi = match g_inverse(base, &InfCplx::Finite(w.clone()), ctx) {
                Ok(InfCplx::Finite(v)) => v,
                _ => continue,
            };
            if gi.norm() <= ctx.tolerance() {
                // all d-th roots collapse at the origin
                next.push(((&Cplx::zero(ctx) - &one).norm(), Cplx::zero(ctx)));
                continue;
            }
            let root_norm = {
                let mut nn = gi.norm();
                nn.root_mut(d);
                nn
            };
            let base_arg = Float::with_val(ctx.bits(), gi.arg() / d);
            for k in 0..d {
                let ang = Float::with_val(
                    ctx.bits(),
                    &base_arg
                        + &(Float::with_val(ctx.bits(), rug::float::Constant::Pi)
                            * Float::with_val(ctx.bits(), 2 * k)
                            / d),
                );
                let (s, c) = ang.sin_cos(Float::new(ctx.bits()));
                let z = Cplx::new(
                    Float::with_val(ctx.bits(), &root_norm * &c),
                    Float::with_val(ctx.bits(), &root_norm * &s),
                );
                next.push((z.dist(&one), z));
            }
        }
        if next.is_empty() {
            return Err(Error::EscapeCap(n));
        }
        next.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        next.truncate(6);
        if next[0].0.to_f64() < r_inner {
            return Ok((n, next[0].1.clone()));
        }
        beam = next.into_iter().map(|(_, z)| z).collect();
    }
    Err(Error::EscapeCap(ESCAPE_CAP))
}

/// Runs the navigation-plus-escape core at a working base whose dynamics
/// conditions hold. Returns the program (over the working base), the final
/// value, and the escape step count.
fn implement_core(
    base: &Cplx,
    delta: u32,
    lambda: &Cplx,
    eps: f64,
    ctx: &PrecisionContext,
) -> Result<(IsingProgram, Cplx, usize)> {
    let d = delta - 1;
    let mut fam: CoverFamily = build_cover(base, delta, 1e-6, ctx)?;
    let two_r = 2.0 * fam.r.to_f64();
    let one = Cplx::one(ctx);
    // near targets navigate directly; far ones escape first
    if lambda.dist(&one).to_f64() <= 0.9 * two_r {
        let (prog, _, value) = navigate_to(&mut fam, lambda, eps, ctx)?;
        return Ok((prog, value, 0));
    }
    let (n_escape, x) = pullback_escape(base, d, lambda, 0.8 * two_r, ctx)?;
    // error amplification along the forward orbit
    let mut lip = 1.0f64;
    {
        let mut v = InfCplx::Finite(x.clone());
        for _ in 0..n_escape {
            if let InfCplx::Finite(fv) = &v {
                if let Ok(fp) = f_prime(base, fv, d, ctx) {
                    lip *= fp.norm().to_f64().max(1e-12);
                }
            }
            v = super::dynamics::f_map(base, &v, d, ctx)?;
        }
    }
    let mut eps_nav = (eps / (4.0 * lip.max(1.0))).min(0.1 * two_r);
    for _attempt in 0..3 {
        if eps_nav < 1e4 * ctx.tolerance_f64() {
            return Err(Error::PrecisionExhausted);
        }
        let (_, mut idx, _) = navigate_to(&mut fam, &x, eps_nav, ctx)?;
        // push the escape: each f step is g applied to the d-th power
        for _ in 0..n_escape {
            let step = vec![idx; d as usize];
            let mut prod = Cplx::one(ctx);
            for _ in 0..d {
                prod = &prod * &fam.values[idx];
            }
            match super::dynamics::g_map(base, &InfCplx::Finite(prod), ctx) {
                Ok(InfCplx::Finite(v)) => {
                    fam.steps.push(step);
                    fam.values.push(v);
                    idx = fam.values.len() - 1;
                }
                _ => return Err(Error::NewtonFail),
            }
        }
        let value = fam.values[idx].clone();
        if value.dist(lambda).to_f64() <= eps {
            return Ok((IsingProgram::new(fam.steps.clone()), value, n_escape));
        }
        eps_nav *= 0.01;
    }
    Err(Error::PrecisionExhausted)
}

/// The unit-circle pre-transform graph: two-edge paths on both sides of a
/// parallel block of a two-edge path and a single edge. Implements
/// g_{beta'}(beta beta') with beta' = h_beta(beta), which is Re(beta) on the
/// unit circle.
pub fn unit_circle_gadget() -> (MultiGraph, Terminals) {
    let g = MultiGraph::new(
        7,
        vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5), (5, 6)],
    );
    (g, Terminals::new(0, 6))
}

/// Implements the edge interaction `lambda` within `eps` for the pair
/// (Delta, beta): chains an optional unit-circle pre-transform, an optional
/// rebase program into the working band, and the cover/navigate/escape core.
pub fn implement_target(
    beta: &Cplx,
    delta: u32,
    lambda: &Cplx,
    eps: f64,
    ctx: &PrecisionContext,
) -> Result<ImplementOutcome> {
    if delta < 3 {
        return Err(Error::Domain("implement_target needs Delta >= 3".into()));
    }
    let tol = ctx.tolerance();
    if beta.im.clone().abs() <= tol {
        return Err(Error::Precondition("beta must be nonreal".into()));
    }
    let i_unit = Cplx::i(ctx);
    if beta.dist(&i_unit) <= tol || beta.dist(&(-&i_unit)) <= tol {
        return Err(Error::Precondition("beta = +-i excluded".into()));
    }
    let d = delta - 1;
    let ratio = phi_ratio(beta, ctx).to_f64();
    let threshold = 1.0 / (d as f64).sqrt();
    if ratio < threshold - 1e-9 {
        return Err(Error::Precondition(format!(
            "|beta-1|/|beta+1| = {ratio} below the threshold {threshold}"
        )));
    }
    if eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }

    let mut stages: Vec<Stage> = Vec::new();
    let mut working = beta.clone();

    // unit circle: formal programs cannot leave |x| = 1, so use the gadget
    if (working.norm().to_f64() - 1.0).abs() <= 1e-9 {
        if !(working.re.to_f64() > 0.0 && working.re.to_f64() < 1.0) {
            return Err(Error::Precondition(
                "unit-circle pre-transform needs Re(beta) in (0,1)".into(),
            ));
        }
        // beta' = h_beta(beta), which is Re(beta) on the unit circle
        let bp = match h_map(&working, &InfCplx::Finite(working.clone()), ctx)? {
            InfCplx::Finite(v) => v,
            InfCplx::Inf => return Err(Error::Degenerate("h_beta(beta) infinite".into())),
        };
        let prod = &working * &bp;
        let gamma = match super::dynamics::g_map(&bp, &InfCplx::Finite(prod), ctx)? {
            InfCplx::Finite(v) => v,
            InfCplx::Inf => return Err(Error::Degenerate("unit-circle gadget blew up".into())),
        };
        stages.push(Stage {
            kind: StageKind::UnitCircleGadget,
            base_text: working.to_string(),
            value_text: gamma.to_string(),
            base: working.clone(),
            value: gamma.clone(),
        });
        working = gamma;
    }

    // rebase unless the working value's z already sits in the band
    let info = dynamics_info(&working, delta, ctx)?;
    let (zr, zi) = info.z.to_f64s();
    if !in_z_band(info.z_norm, zi, zr) {
        let (prog, value) = rebase_to_band(&working, delta, ctx)?;
        stages.push(Stage {
            kind: StageKind::Program(prog),
            base_text: working.to_string(),
            value_text: value.to_string(),
            base: working.clone(),
            value: value.clone(),
        });
        working = value;
    }

    // trivial target: the working base itself
    let (core_prog, value, escape_steps) = if lambda.dist(&working).to_f64() <= eps * 0.5 {
        (IsingProgram::new(vec![]), working.clone(), 0)
    } else {
        implement_core(&working, delta, lambda, eps, ctx)?
    };
    let err = value.dist(lambda).to_f64();
    stages.push(Stage {
        kind: StageKind::Program(core_prog),
        base_text: working.to_string(),
        value_text: value.to_string(),
        base: working.clone(),
        value: value.clone(),
    });

    // transitive compilation when the construction stays desk sized
    let (graph, graph_vertices, graph_verified) = compile_stages(beta, &stages, delta, ctx);

    Ok(ImplementOutcome {
        stages,
        value_text: value.to_string(),
        value,
        target_error: err,
        escape_steps,
        graph,
        graph_vertices,
        graph_verified,
    })
}

/// Compiles the stage chain into one gadget graph when small enough, and
/// verifies the implemented weight against the exact engine when the result
/// fits the enumeration cap.
fn compile_stages(
    beta: &Cplx,
    stages: &[Stage],
    delta: u32,
    ctx: &PrecisionContext,
) -> (Option<(MultiGraph, Terminals)>, Option<usize>, Option<bool>) {
    let mut base_gadget = MultiGraph::single_edge();
    for stage in stages {
        let compiled = match &stage.kind {
            StageKind::UnitCircleGadget => {
                // substitute every edge of the fixed gadget with the current base
                let (shape, t) = unit_circle_gadget();
                let mut g = shape;
                // edges are plain base edges already when base is the edge;
                // otherwise substitute one by one
                if base_gadget.0 != MultiGraph::single_edge().0 {
                    let mut cur = g.clone();
                    for e in (0..g.num_edges()).rev() {
                        cur = crate::graph::substitute_edge(&cur, e, &base_gadget.0, base_gadget.1);
                    }
                    g = cur;
                }
                Some((g, t))
            }
            StageKind::Program(p) => {
                program_compile_with_base(p, &base_gadget.0, base_gadget.1, delta).ok()
            }
        };
        match compiled {
            Some(gt) => base_gadget = gt,
            None => return (None, None, None),
        }
        if base_gadget.0.n > 100_000 {
            return (None, None, None);
        }
    }
    let n = base_gadget.0.n;
    let verified = if n <= crate::exact::DEFAULT_VERTEX_CAP {
        let expect = &stages.last().unwrap().value;
        match implemented_weight(&base_gadget.0, base_gadget.1, beta, ctx) {
            Ok(w) => Some(w.approx_eq(expect, &ctx.float(1e-9))),
            Err(_) => Some(false),
        }
    } else {
        None
    };
    (Some(base_gadget), Some(n), verified)
}

/// The degree-3 graph from the hardness-inside-the-band construction:
/// 6 vertices, 8 edges, terminals of degree 2 at both ends of two doubled
/// paths.
pub fn figure8_graph() -> (MultiGraph, Terminals) {
    let g = MultiGraph::new(
        6,
        vec![(0, 2), (0, 3), (2, 4), (2, 4), (3, 5), (3, 5), (1, 4), (1, 5)],
    );
    (g, Terminals::new(0, 1))
}

/// Turns a partition-function zero into a gadget implementing -1: checks the
/// preconditions of the zeros-imply-hardness construction, then hangs pendant
/// edges on the terminals so they reach degree 1.
pub fn minus_one_from_zero(
    g: &MultiGraph,
    t: Terminals,
    beta0: &Cplx,
    delta: u32,
    ctx: &PrecisionContext,
) -> Result<(MultiGraph, Terminals)> {
    if g.max_degree() > delta as usize {
        return Err(Error::Precondition(format!(
            "max degree {} exceeds Delta = {delta}",
            g.max_degree()
        )));
    }
    if g.degree(t.s) > delta as usize - 1 || g.degree(t.t) > delta as usize - 1 {
        return Err(Error::Precondition("terminals must have degree <= Delta - 1".into()));
    }
    let zp = ising_poly(g)?;
    // scale for the zero test: sum of |c_k| |beta0|^k
    let scale = {
        let mut acc = ctx.float(0.0);
        let mut pw = ctx.float(1.0);
        let bn = beta0.norm();
        for c in &zp.coeffs {
            let cf = Float::with_val(ctx.bits(), c);
            acc += Float::with_val(ctx.bits(), &cf * &pw);
            pw = Float::with_val(ctx.bits(), &pw * &bn);
        }
        acc
    };
    let z_at = zp.eval(beta0, ctx);
    let loose = Float::with_val(ctx.bits(), 1e6 * &ctx.tolerance());
    if z_at.norm() > Float::with_val(ctx.bits(), &scale * &loose) {
        return Err(Error::Precondition(format!(
            "Z(G; beta0) = {z_at} is not numerically zero"
        )));
    }
    let im = interaction_matrix(g, t)?;
    let entries = [
        im.eval(0, 0, beta0, ctx),
        im.eval(0, 1, beta0, ctx),
        im.eval(1, 0, beta0, ctx),
        im.eval(1, 1, beta0, ctx),
    ];
    let maxnorm = entries.iter().map(|e| e.norm().to_f64()).fold(0.0, f64::max);
    if maxnorm <= 1e3 * ctx.tolerance_f64() {
        return Err(Error::Precondition("all pinned sums vanish at beta0".into()));
    }
    // the vanishing row sums forced by spin-flip symmetry
    for i in 0..2u8 {
        let s = &entries[(2 * i) as usize] + &entries[(2 * i + 1) as usize];
        if s.norm().to_f64() > 1e-6 * maxnorm.max(1.0) {
            return Err(Error::CheckFailed(format!("Z^{i}0 + Z^{i}1 != 0 at beta0")));
        }
    }
    // pendant edges give degree-1 terminals; series with h o h fixes -1
    let mut edges = g.edges.clone();
    let sp = g.n as u32;
    let tp = g.n as u32 + 1;
    edges.push((t.s, sp));
    edges.push((t.t, tp));
    let extended = MultiGraph::new(g.n + 2, edges);
    Ok((extended, Terminals::new(sp, tp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::poly_roots;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn figure8_package() {
        let c = ctx();
        let (g, t) = figure8_graph();
        assert_eq!(g.max_degree(), 3);
        let zp = ising_poly(&g).unwrap();
        let expect: Vec<i64> = vec![2, 0, 12, 16, 4, 16, 12, 0, 2];
        for (a, b) in zp.coeffs.iter().zip(expect.iter()) {
            assert_eq!(a.to_i64().unwrap(), *b);
        }
        // the zero near 0.396608 + 0.917988i
        let roots = poly_roots(&zp.to_rat_poly().to_cpoly(&c), &c).unwrap();
        let target = Cplx::from_f64(&c, 0.396608, 0.917988);
        let beta0 = roots
            .iter()
            .min_by(|a, b| a.dist(&target).partial_cmp(&b.dist(&target)).unwrap())
            .unwrap()
            .clone();
        assert!(beta0.dist(&target).to_f64() < 1e-5);
        // ratio at the zero
        let r = phi_ratio(&beta0, &c).to_f64();
        assert!((r - 0.6572981).abs() < 1e-5);
        // |Z01| > 2 assures the nonvanishing precondition
        let im = interaction_matrix(&g, t).unwrap();
        assert!(im.eval(0, 1, &beta0, &c).norm().to_f64() > 2.0);
        // the extended gadget implements -1
        let (h, th) = minus_one_from_zero(&g, t, &beta0, 3, &c).unwrap();
        assert_eq!(h.degree(th.s), 1);
        assert_eq!(h.degree(th.t), 1);
        assert!(h.max_degree() <= 3);
        let w = implemented_weight(&h, th, &beta0, &c).unwrap();
        let minus_one = -&Cplx::one(&c);
        assert!(w.dist(&minus_one).to_f64() <= 1e-6, "weight {w}");
    }

    #[test]
    fn minus_one_fixed_by_h_squared() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let minus_one = -&Cplx::one(&c);
        for _ in 0..100 {
            let beta = Cplx::from_f64(&c, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if beta.dist(&Cplx::one(&c)).to_f64() < 1e-3
                || beta.dist(&minus_one).to_f64() < 1e-3
            {
                continue;
            }
            let h1 = h_map(&beta, &InfCplx::Finite(minus_one.clone()), &c).unwrap();
            let h2 = h_map(&beta, &h1, &c).unwrap();
            match h2 {
                InfCplx::Finite(v) => {
                    assert!(v.dist(&minus_one).to_f64() < 1e-20)
                }
                InfCplx::Inf => panic!("unexpected infinity"),
            }
        }
    }

    #[test]
    fn unit_circle_gadget_weight() {
        let c = ctx();
        // beta = (3+4i)/5 on the unit circle
        let beta = Cplx::from_f64(&c, 0.6, 0.8);
        let (g, t) = unit_circle_gadget();
        let w = implemented_weight(&g, t, &beta, &c).unwrap();
        let bp = match h_map(&beta, &InfCplx::Finite(beta.clone()), &c).unwrap() {
            InfCplx::Finite(v) => v,
            _ => panic!(),
        };
        let prod = &beta * &bp;
        let gamma = match super::super::dynamics::g_map(&bp, &InfCplx::Finite(prod), &c).unwrap() {
            InfCplx::Finite(v) => v,
            _ => panic!(),
        };
        assert!(w.approx_eq(&gamma, &c.float(1e-20)), "w = {w}, gamma = {gamma}");
    }

    #[test]
    fn rebase_reaches_band() {
        let c = ctx();
        for (re, im, delta) in [(0.0, 3.0, 3), (1.0, 2.0, 3), (2.0, 2.0, 4), (-1.5, 1.0, 3)] {
            let beta = Cplx::from_f64(&c, re, im);
            let (prog, v) = rebase_to_band(&beta, delta, &c).unwrap();
            // re-evaluate and confirm z lands inside the band
            let tr = crate::gadget::program::program_eval(&prog, &beta, &c).unwrap();
            let got = tr.last().as_finite().unwrap();
            assert!(got.approx_eq(&v, &c.float(1e-20)));
            let u = phi(&v, &c);
            let z = &u * &u;
            let zn = z.norm().to_f64();
            assert!((Z_BAND_LO..=Z_BAND_HI).contains(&zn), "zn = {zn} at {beta}");
            assert!(z.im.to_f64().abs() > 0.0);
        }
    }

    #[test]
    fn implement_small_targets() {
        let c = ctx();
        let beta = Cplx::from_f64(&c, 2.0, 2.0);
        // the base itself is an immediate target
        let out = implement_target(&beta, 4, &beta, 1e-4, &c).unwrap();
        assert!(out.target_error <= 1e-4);
        // a hard target through the full pipeline
        let lam = Cplx::from_f64(&c, -1.0, 0.0);
        let out = implement_target(&beta, 4, &lam, 1e-3, &c).unwrap();
        assert!(out.target_error <= 1e-3, "err = {}", out.target_error);
        // every stage value re-evaluates from its own base
        for st in &out.stages {
            if let StageKind::Program(p) = &st.kind {
                let tr = crate::gadget::program::program_eval(p, &st.base, &c).unwrap();
                let got = tr.last().as_finite().unwrap();
                assert!(got.approx_eq(&st.value, &c.float(1e-15)));
            }
        }
    }

    #[test]
    fn implement_rejects_below_threshold() {
        let c = ctx();
        // ratio(1.2 + 0.1i) is far below 1/sqrt(2)
        let beta = Cplx::from_f64(&c, 1.2, 0.1);
        assert!(matches!(
            implement_target(&beta, 3, &Cplx::from_f64(&c, 5.0, 0.0), 1e-3, &c),
            Err(Error::Precondition(_))
        ));
    }
}

