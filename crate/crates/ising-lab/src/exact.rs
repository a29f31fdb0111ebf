//! Ground truth: the Ising partition function as an exact polynomial,
//! pinned partition sums, interaction matrices, implemented weights, and the
//! random-cluster (Tutte) cross-check.

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, Terminals};
use crate::numerics::{Cplx, GaussRat, PrecisionContext, RatPoly};

pub const DEFAULT_VERTEX_CAP: usize = 24;
pub const DEFAULT_EDGE_CAP: usize = 24;

/// Exact Ising polynomial: coefficient k counts the configurations with k
/// monochromatic edges, so Z(beta) = sum_k c_k beta^k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingPoly {
    pub coeffs: Vec<Integer>,
}

impl IsingPoly {
    pub fn eval(&self, beta: &Cplx, ctx: &PrecisionContext) -> Cplx {
        self.to_rat_poly().to_cpoly(ctx).eval(beta)
    }

    pub fn eval_rational(&self, beta: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * beta + Rational::from(c);
        }
        acc
    }

    pub fn to_rat_poly(&self) -> RatPoly {
        RatPoly::from_integers(&self.coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Spin pin set: (vertex, spin) pairs with distinct vertices.
pub type PinAssignment = [(u32, u8)];

fn check_caps(g: &MultiGraph, free_vertices: usize) -> Result<()> {
    if free_vertices > DEFAULT_VERTEX_CAP {
        return Err(Error::TooLarge(format!(
            "{free_vertices} free vertices exceeds the enumeration cap {DEFAULT_VERTEX_CAP}"
        )));
    }
    let _ = g;
    Ok(())
}

/// Counts configurations by monochromatic-edge count, restricted to the
/// configurations extending `pins`. Gray-code order with incremental updates.
pub fn ising_poly_pinned(g: &MultiGraph, pins: &PinAssignment) -> Result<Vec<Integer>> {
    let mut pin_of = vec![u8::MAX; g.n];
    for &(v, s) in pins {
        assert!((v as usize) < g.n, "pin vertex out of range");
        assert!(s <= 1, "pin spin must be 0 or 1");
        pin_of[v as usize] = s;
    }
    let free: Vec<u32> = (0..g.n as u32).filter(|&v| pin_of[v as usize] == u8::MAX).collect();
    check_caps(g, free.len())?;

    // loops are always monochromatic: handle as a final shift
    let loops = g.edges.iter().filter(|&&(u, v)| u == v).count();
    let plain: Vec<(u32, u32)> = g.edges.iter().copied().filter(|&(u, v)| u != v).collect();

    // incidence among non-loop edges, indexed by free-vertex position
    let mut pos = vec![usize::MAX; g.n];
    for (i, &v) in free.iter().enumerate() {
        pos[v as usize] = i;
    }
    let mut inc: Vec<Vec<u32>> = vec![Vec::new(); free.len()];
    for &(u, v) in &plain {
        if pos[u as usize] != usize::MAX {
            inc[pos[u as usize]].push(v);
        }
        if pos[v as usize] != usize::MAX {
            inc[pos[v as usize]].push(u);
        }
    }

    let mut spin = vec![0u8; g.n];
    for &(v, s) in pins {
        spin[v as usize] = s;
    }
    let mut m: usize = plain
        .iter()
        .filter(|&&(u, v)| spin[u as usize] == spin[v as usize])
        .count();

    let mut counts = vec![0u64; plain.len() + 1];
    counts[m] += 1;
    let total: u64 = 1u64 << free.len();
    for k in 1..total {
        let bit = k.trailing_zeros() as usize;
        let v = free[bit];
        let old = spin[v as usize];
        spin[v as usize] = 1 - old;
        for &u in &inc[bit] {
            if spin[u as usize] == spin[v as usize] {
                m += 1;
            } else {
                m -= 1;
            }
        }
        counts[m] += 1;
    }

    let mut out = vec![Integer::new(); g.edges.len() + 1];
    for (k, &c) in counts.iter().enumerate() {
        out[k + loops] = Integer::from(c);
    }
    Ok(out)
}

/// Exact counts over all 2^n configurations.
pub fn ising_poly(g: &MultiGraph) -> Result<IsingPoly> {
    Ok(IsingPoly { coeffs: ising_poly_pinned(g, &[])? })
}

/// The 2x2 matrix of terminal-pinned partition sums, as exact polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMatrix {
    pub z00: Vec<Integer>,
    pub z01: Vec<Integer>,
    pub z10: Vec<Integer>,
    pub z11: Vec<Integer>,
}

impl InteractionMatrix {
    pub fn entry_poly(&self, j: u8, k: u8) -> &Vec<Integer> {
        match (j, k) {
            (0, 0) => &self.z00,
            (0, 1) => &self.z01,
            (1, 0) => &self.z10,
            _ => &self.z11,
        }
    }

    pub fn eval(&self, j: u8, k: u8, beta: &Cplx, ctx: &PrecisionContext) -> Cplx {
        RatPoly::from_integers(self.entry_poly(j, k)).to_cpoly(ctx).eval(beta)
    }
}

pub fn interaction_matrix(g: &MultiGraph, t: Terminals) -> Result<InteractionMatrix> {
    let z00 = ising_poly_pinned(g, &[(t.s, 0), (t.t, 0)])?;
    let z01 = ising_poly_pinned(g, &[(t.s, 0), (t.t, 1)])?;
    let z10 = ising_poly_pinned(g, &[(t.s, 1), (t.t, 0)])?;
    let z11 = ising_poly_pinned(g, &[(t.s, 1), (t.t, 1)])?;
    // spin-flip symmetry must hold as an exact polynomial identity
    assert_eq!(z00, z11, "interaction matrix broke spin-flip symmetry");
    assert_eq!(z01, z10, "interaction matrix broke spin-flip symmetry");
    Ok(InteractionMatrix { z00, z01, z10, z11 })
}

/// The ratio w = Z11/Z01 at beta, i.e. the weight the gadget implements.
pub fn implemented_weight(
    g: &MultiGraph,
    t: Terminals,
    beta: &Cplx,
    ctx: &PrecisionContext,
) -> Result<Cplx> {
    let im = interaction_matrix(g, t)?;
    let z01 = im.eval(0, 1, beta, ctx);
    let z11 = im.eval(1, 1, beta, ctx);
    let scale = z11.norm().max(&ctx.float(1.0));
    if z01.norm() <= scale * ctx.tolerance() {
        return Err(Error::NotImplementing);
    }
    Ok(&z11 / &z01)
}

/// Subset census for the random-cluster form: counts[k][j] is the number of
/// edge subsets of size j spanning k components (isolated vertices count).
pub fn tutte_counts(g: &MultiGraph) -> Result<Vec<Vec<u64>>> {
    let m = g.edges.len();
    if m > DEFAULT_EDGE_CAP {
        return Err(Error::TooLarge(format!(
            "{m} edges exceeds the subset cap {DEFAULT_EDGE_CAP}"
        )));
    }
    let mut counts = vec![vec![0u64; m + 1]; g.n + 1];
    let mut parent = vec![0u32; g.n];
    for mask in 0u64..(1u64 << m) {
        for (v, p) in parent.iter_mut().enumerate() {
            *p = v as u32;
        }
        fn find(parent: &mut [u32], mut v: u32) -> u32 {
            while parent[v as usize] != v {
                parent[v as usize] = parent[parent[v as usize] as usize];
                v = parent[v as usize];
            }
            v
        }
        let mut comps = g.n;
        let mut size = 0usize;
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                size += 1;
                let ru = find(&mut parent, u);
                let rv = find(&mut parent, v);
                if ru != rv {
                    parent[ru as usize] = rv;
                    comps -= 1;
                }
            }
        }
        counts[comps][size] += 1;
    }
    Ok(counts)
}

/// Z_Tutte(G; q, gamma) by edge-subset enumeration.
pub fn tutte_eval(g: &MultiGraph, q: &Cplx, gamma: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    let counts = tutte_counts(g)?;
    let m = g.edges.len();
    let mut qpow = vec![Cplx::one(ctx)];
    for k in 1..=g.n {
        qpow.push(&qpow[k - 1] * q);
    }
    let mut gpow = vec![Cplx::one(ctx)];
    for j in 1..=m {
        gpow.push(&gpow[j - 1] * gamma);
    }
    let mut acc = Cplx::zero(ctx);
    for (k, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let f = ctx.float(c as f64);
            acc = &acc + &(&qpow[k] * &gpow[j]).scale(&f);
        }
    }
    Ok(acc)
}

/// Exact random-cluster evaluation over Gaussian rationals.
pub fn tutte_eval_exact(g: &MultiGraph, q: &GaussRat, gamma: &GaussRat) -> Result<GaussRat> {
    let counts = tutte_counts(g)?;
    let m = g.edges.len();
    let mut qpow = vec![GaussRat::one()];
    for k in 1..=g.n {
        qpow.push(&qpow[k - 1] * q);
    }
    let mut gpow = vec![GaussRat::one()];
    for j in 1..=m {
        gpow.push(&gpow[j - 1] * gamma);
    }
    let mut acc = GaussRat::zero();
    for (k, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let f = GaussRat::from_int(c as i64);
            acc = &acc + &(&(&qpow[k] * &gpow[j]) * &f);
        }
    }
    Ok(acc)
}

/// Z with one complex weight per edge: sum over configurations of the
/// product of weights of monochromatic edges.
pub fn weighted_z_eval(g: &MultiGraph, weights: &[Cplx], ctx: &PrecisionContext) -> Result<Cplx> {
    if weights.len() != g.edges.len() {
        return Err(Error::Domain("one weight per edge required".into()));
    }
    check_caps(g, g.n)?;
    let mut acc = Cplx::zero(ctx);
    for mask in 0u64..(1u64 << g.n) {
        let mut term = Cplx::one(ctx);
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            if (mask >> u) & 1 == (mask >> v) & 1 {
                term = &term * &weights[i];
            }
        }
        acc = &acc + &term;
    }
    Ok(acc)
}
