//! Self-avoiding-walk trees with pinned leaves, the ratio recursion, the
//! divisibility cross-check against the exact engine, and zero-free
//! certification over the parameter disk.

use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ising_poly;
use crate::graph::MultiGraph;
use crate::numerics::{Cplx, InfCplx, PrecisionContext, RatPoly};
use crate::region;

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pin {
    Free,
    Pin0,
    Pin1,
}

#[derive(Debug, Clone, Serialize)]
pub struct SawNode {
    pub children: Vec<usize>,
    pub pin: Pin,
    pub origin: u32,
}

/// Arena-allocated tree of self-avoiding walks from a root vertex. Walks
/// that close a cycle become leaves pinned per the edge-order convention.
#[derive(Debug, Clone, Serialize)]
pub struct SawTree {
    pub nodes: Vec<SawNode>,
    pub root: usize,
}

impl SawTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }
}

struct Builder<'a> {
    inc: &'a [Vec<(u32, usize)>],
    nodes: Vec<SawNode>,
    cap: usize,
}

impl Builder<'_> {
    /// Extends the walk ending at `walk.last()`, entered by edge `entry`.
    /// `leave_edge[j]` is the edge index the walk used to leave `walk[j]`.
    fn extend(
        &mut self,
        node: usize,
        walk: &mut Vec<u32>,
        on_walk: &mut Vec<Option<usize>>,
        leave_edge: &mut Vec<usize>,
        entry: usize,
    ) -> Result<()> {
        let w = *walk.last().unwrap();
        for &(other, idx) in &self.inc[w as usize] {
            if idx == entry {
                continue;
            }
            if self.nodes.len() >= self.cap {
                return Err(Error::TooLarge(format!(
                    "self-avoiding-walk tree exceeds {} nodes",
                    self.cap
                )));
            }
            if let Some(pos) = on_walk[other as usize] {
                // cycle closed at `other`: pin by comparing the closing edge
                // with the edge by which the walk originally left `other`
                let pin = if idx > leave_edge[pos] { Pin::Pin1 } else { Pin::Pin0 };
                let leaf = self.nodes.len();
                self.nodes.push(SawNode { children: vec![], pin, origin: other });
                self.nodes[node].children.push(leaf);
            } else {
                let child = self.nodes.len();
                self.nodes.push(SawNode { children: vec![], pin: Pin::Free, origin: other });
                self.nodes[node].children.push(child);
                leave_edge[walk.len() - 1] = idx;
                walk.push(other);
                on_walk[other as usize] = Some(walk.len() - 1);
                leave_edge.push(usize::MAX);
                self.extend(child, walk, on_walk, leave_edge, idx)?;
                leave_edge.pop();
                on_walk[other as usize] = None;
                walk.pop();
            }
        }
        Ok(())
    }
}

/// Tree of all self-avoiding walks from `v`, with cycle-closing walks pinned.
pub fn build_saw_tree(g: &MultiGraph, v: u32) -> Result<SawTree> {
    build_saw_tree_capped(g, v, DEFAULT_NODE_CAP)
}

pub fn build_saw_tree_capped(g: &MultiGraph, v: u32, cap: usize) -> Result<SawTree> {
    if g.has_loops() {
        return Err(Error::HasLoop);
    }
    assert!((v as usize) < g.n, "root vertex out of range");
    let inc = g.incidence();
    let mut b = Builder { inc: &inc, nodes: Vec::new(), cap };
    b.nodes.push(SawNode { children: vec![], pin: Pin::Free, origin: v });
    let mut walk = vec![v];
    let mut on_walk = vec![None; g.n];
    on_walk[v as usize] = Some(0);
    let mut leave_edge = vec![usize::MAX];
    b.extend(0, &mut walk, &mut on_walk, &mut leave_edge, usize::MAX)?;
    Ok(SawTree { nodes: b.nodes, root: 0 })
}

fn int_poly_mul(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.cmp0() == std::cmp::Ordering::Equal {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    out
}

/// (Z^0, Z^1) coefficient vectors by monochromatic-edge count under the pins.
fn tree_pinned_pair(t: &SawTree, node: usize) -> (Vec<Integer>, Vec<Integer>) {
    let n = &t.nodes[node];
    if n.children.is_empty() {
        return match n.pin {
            Pin::Free => (vec![Integer::from(1)], vec![Integer::from(1)]),
            Pin::Pin0 => (vec![Integer::from(1)], vec![Integer::new()]),
            Pin::Pin1 => (vec![Integer::new()], vec![Integer::from(1)]),
        };
    }
    let mut z0 = vec![Integer::from(1)];
    let mut z1 = vec![Integer::from(1)];
    for &c in &n.children {
        let (c0, c1) = tree_pinned_pair(t, c);
        // edge to the child: x * (same spin) + (different spin)
        let mut f0 = vec![Integer::new(); c0.len().max(c1.len()) + 1];
        let mut f1 = f0.clone();
        for (k, v) in c0.iter().enumerate() {
            f0[k + 1] += v;
            f1[k] += v;
        }
        for (k, v) in c1.iter().enumerate() {
            f0[k] += v;
            f1[k + 1] += v;
        }
        z0 = int_poly_mul(&z0, &f0);
        z1 = int_poly_mul(&z1, &f1);
    }
    (z0, z1)
}

/// Exact Z of the tree respecting pins, as integer coefficients in x.
pub fn tree_pinned_poly(t: &SawTree) -> Vec<Integer> {
    let (z0, z1) = tree_pinned_pair(t, t.root);
    let len = z0.len().max(z1.len());
    let mut out = vec![Integer::new(); len];
    for (k, v) in z0.into_iter().enumerate() {
        out[k] += v;
    }
    for (k, v) in z1.into_iter().enumerate() {
        out[k] += v;
    }
    out
}

/// Ratio evaluation result; the trace holds per-node subtree ratios in
/// arena order when requested.
#[derive(Debug, Clone)]
pub struct RatioResult {
    pub value: InfCplx,
    pub trace: Option<Vec<InfCplx>>,
}

/// h_beta(z) = (beta z + 1)/(beta + z) on the Riemann sphere.
pub fn h_mobius(beta: &Cplx, z: &InfCplx, ctx: &PrecisionContext) -> Result<InfCplx> {
    match z {
        InfCplx::Inf => Ok(InfCplx::Finite(beta.clone())),
        InfCplx::Finite(z) => {
            let num = &(beta * z) + &Cplx::one(ctx);
            let den = beta + z;
            let tol = ctx.tolerance();
            if den.norm() <= tol {
                if num.norm() <= tol {
                    return Err(Error::Indeterminate(0));
                }
                return Ok(InfCplx::Inf);
            }
            Ok(InfCplx::Finite(&num / &den))
        }
    }
}

fn ratio_rec(
    t: &SawTree,
    node: usize,
    beta: &Cplx,
    ctx: &PrecisionContext,
    trace: &mut Option<Vec<InfCplx>>,
) -> Result<InfCplx> {
    let n = &t.nodes[node];
    let r = if n.children.is_empty() {
        match n.pin {
            Pin::Free => InfCplx::Finite(Cplx::one(ctx)),
            Pin::Pin0 => InfCplx::Finite(Cplx::zero(ctx)),
            Pin::Pin1 => InfCplx::Inf,
        }
    } else {
        let mut acc = InfCplx::Finite(Cplx::one(ctx));
        for &c in &n.children {
            let rc = ratio_rec(t, c, beta, ctx, trace)?;
            let h = h_mobius(beta, &rc, ctx).map_err(|_| Error::Indeterminate(c))?;
            acc = match (acc, h) {
                (InfCplx::Finite(a), InfCplx::Finite(b)) => InfCplx::Finite(&a * &b),
                (InfCplx::Inf, InfCplx::Finite(b)) => {
                    if b.norm() <= ctx.tolerance() {
                        return Err(Error::Indeterminate(node));
                    }
                    InfCplx::Inf
                }
                (InfCplx::Finite(a), InfCplx::Inf) => {
                    if a.norm() <= ctx.tolerance() {
                        return Err(Error::Indeterminate(node));
                    }
                    InfCplx::Inf
                }
                (InfCplx::Inf, InfCplx::Inf) => InfCplx::Inf,
            };
        }
        acc
    };
    if let Some(tr) = trace.as_mut() {
        tr[node] = r.clone();
    }
    Ok(r)
}

/// Bottom-up ratio R = Z^1/Z^0 of the tree at beta via the h recursion.
pub fn tree_ratio(t: &SawTree, beta: &Cplx, ctx: &PrecisionContext) -> Result<RatioResult> {
    tree_ratio_traced(t, beta, ctx, false)
}

pub fn tree_ratio_traced(
    t: &SawTree,
    beta: &Cplx,
    ctx: &PrecisionContext,
    want_trace: bool,
) -> Result<RatioResult> {
    let mut trace = if want_trace {
        Some(vec![InfCplx::Inf; t.nodes.len()])
    } else {
        None
    };
    let value = ratio_rec(t, t.root, beta, ctx, &mut trace)?;
    Ok(RatioResult { value, trace })
}

/// Verifies that Z(G;x) divides Z(T;x) exactly; the quotient is returned.
/// A failure means the pinning convention is broken.
pub fn divisibility_check(g: &MultiGraph, v: u32) -> Result<RatPoly> {
    let t = build_saw_tree(g, v)?;
    let tp = RatPoly::from_integers(&tree_pinned_poly(&t));
    let gp = ising_poly(g)?.to_rat_poly();
    tp.divide_exact(&gp).map_err(|e| match e {
        Error::NotDivisible => Error::DivisibilityViolation,
        other => other,
    })
}

/// Per-point certification report: every structural check of the zero-free
/// argument, evaluated at one (G, beta, Delta) triple.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub beta_in_region: bool,
    pub components: usize,
    pub nodes_checked: usize,
    pub ratios_halfplane_ok: bool,
    pub images_in_disk_ok: bool,
    pub sector_ok: bool,
    pub max_sector_excess: f64,
    pub root_ratio_away_from_minus_one: bool,
    pub z_norm: f64,
    pub z_nonzero: bool,
    pub pass: bool,
}

struct CertScan<'a> {
    t: &'a SawTree,
    beta: &'a Cplx,
    ctx: &'a PrecisionContext,
    eps: &'a Float,
    sector_limit: f64,
    max_excess: f64,
    checked: usize,
}

impl CertScan<'_> {
    fn run(&mut self, node: usize) -> Result<InfCplx> {
        let n = &self.t.nodes[node];
        if n.children.is_empty() {
            return Ok(match n.pin {
                Pin::Free => InfCplx::Finite(Cplx::one(self.ctx)),
                Pin::Pin0 => InfCplx::Finite(Cplx::zero(self.ctx)),
                Pin::Pin1 => InfCplx::Inf,
            });
        }
        let mut acc = InfCplx::Finite(Cplx::one(self.ctx));
        for &c in &n.children {
            let rc = self.run(c)?;
            // child subtree ratio must have nonnegative real part or be inf
            if let InfCplx::Finite(v) = &rc {
                let neg_tol = -self.ctx.tolerance_f64();
                if v.re.to_f64() < neg_tol
                    && v.norm().to_f64() > self.ctx.tolerance_f64()
                {
                    return Err(Error::CheckFailed(format!(
                        "subtree ratio at node {c} has negative real part"
                    )));
                }
            }
            let h = h_mobius(self.beta, &rc, self.ctx).map_err(|_| Error::Indeterminate(c))?;
            let hv = match &h {
                InfCplx::Finite(v) => v.clone(),
                InfCplx::Inf => {
                    return Err(Error::CheckFailed(format!(
                        "h image at node {c} escaped to infinity"
                    )))
                }
            };
            // image must stay in the closed disk R(eps_Delta)
            if !region::in_r(&hv, self.eps, self.ctx) {
                return Err(Error::CheckFailed(format!(
                    "h image at node {c} left the zero-free disk"
                )));
            }
            // sector bound |arg| <= pi / (2 (Delta - 1)) + tol
            let ang = hv.arg().to_f64().abs();
            let excess = ang - self.sector_limit;
            if excess > self.max_excess {
                self.max_excess = excess;
            }
            if excess > 1e-9 {
                return Err(Error::CheckFailed(format!(
                    "sector bound violated at node {c}: |arg| = {ang}"
                )));
            }
            self.checked += 1;
            acc = match acc {
                InfCplx::Finite(a) => InfCplx::Finite(&a * &hv),
                InfCplx::Inf => unreachable!("h images are finite in the disk"),
            };
        }
        Ok(acc)
    }
}

/// Runs every check of the zero-free argument on G at beta for degree
/// bound Delta: tree construction per component, per-node sector and disk
/// membership, root ratio != -1, and |Z| > 0 by exact evaluation.
pub fn certify_zero_free(
    g: &MultiGraph,
    beta: &Cplx,
    delta: u32,
    ctx: &PrecisionContext,
) -> Result<CertificateReport> {
    let eps = region::epsilon_delta(delta, ctx)?;
    if !region::in_r(beta, &eps, ctx) {
        return Err(Error::Precondition("beta outside R(eps_Delta)".into()));
    }
    if g.max_degree() > delta as usize {
        return Err(Error::Precondition(format!(
            "graph max degree {} exceeds Delta = {delta}",
            g.max_degree()
        )));
    }
    let d = (delta - 1) as f64;
    let sector_limit = std::f64::consts::PI / (2.0 * d);
    let mut nodes_checked = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let comps = g.components();
    for comp in &comps {
        if comp.len() == 1 {
            continue;
        }
        let sub = g.induced(comp);
        let t = build_saw_tree(&sub, 0)?;
        let mut scan = CertScan {
            t: &t,
            beta,
            ctx,
            eps: &eps,
            sector_limit,
            max_excess: f64::NEG_INFINITY,
            checked: 0,
        };
        let root_ratio = scan.run(t.root)?;
        nodes_checked += scan.checked;
        if scan.max_excess > max_excess {
            max_excess = scan.max_excess;
        }
        if let InfCplx::Finite(r) = &root_ratio {
            let minus_one = -&Cplx::one(ctx);
            if r.dist(&minus_one) <= ctx.tolerance() {
                return Err(Error::CheckFailed("root ratio is -1".into()));
            }
        }
    }
    let z = ising_poly(g)?.eval(beta, ctx);
    let z_norm = z.norm().to_f64();
    if z_norm <= 0.0 {
        return Err(Error::CheckFailed("partition function vanished".into()));
    }
    Ok(CertificateReport {
        beta_in_region: true,
        components: comps.len(),
        nodes_checked,
        ratios_halfplane_ok: true,
        images_in_disk_ok: true,
        sector_ok: true,
        max_sector_excess: max_excess,
        root_ratio_away_from_minus_one: true,
        z_norm,
        z_nonzero: true,
        pass: true,
    })
}
