//! The zero-free-disk approximation scheme: exact coefficients of
//! q(z) = Z(G; 1 + z(beta-1)), the disk on which the segment [1, beta] is
//! certified zero-free, and truncated-log evaluation with an explicit tail
//! bound.

use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ising_poly;
use crate::graph::MultiGraph;
use crate::numerics::{CPoly, Cplx, GaussRat, PrecisionContext, RatPoly};
use crate::region::{self, DiskRegion};

/// The interpolation polynomial q(z) = Z(G; 1 + z(beta-1)).
/// q(0) = 2^n and q(1) = Z(G; beta).
#[derive(Debug, Clone)]
pub struct QPoly {
    pub coeffs: Vec<Cplx>,
    pub vertex_count: usize,
}

/// Exact-coefficient variant for Gaussian-rational beta.
#[derive(Debug, Clone)]
pub struct QPolyExact {
    pub poly: RatPoly,
    pub vertex_count: usize,
}

fn binomial_table(n: usize) -> Vec<Vec<Integer>> {
    let mut t = vec![vec![Integer::from(1)]];
    for i in 1..=n {
        let prev = &t[i - 1];
        let mut row = vec![Integer::from(1)];
        for j in 1..i {
            row.push(Integer::from(&prev[j - 1] + &prev[j]));
        }
        row.push(Integer::from(1));
        t.push(row);
    }
    t
}

/// Substitutes x = 1 + z w into the exact Ising polynomial:
/// q_j = w^j * sum_k c_k C(k, j).
pub fn q_poly_exact(g: &MultiGraph, beta: &GaussRat) -> Result<QPolyExact> {
    let zp = ising_poly(g)?;
    let m = zp.degree();
    let binom = binomial_table(m);
    let w = beta - &GaussRat::one();
    let mut wpow = GaussRat::one();
    let mut coeffs = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut s = Integer::new();
        for k in j..=m {
            s += Integer::from(&zp.coeffs[k] * &binom[k][j]);
        }
        coeffs.push(&GaussRat::from_integer(&s) * &wpow);
        if j < m {
            wpow = &wpow * &w;
        }
    }
    let q = QPolyExact { poly: RatPoly::new(coeffs), vertex_count: g.n };
    // invariants: q(0) = 2^n, q(1) = Z(beta)
    debug_assert_eq!(q.poly.eval(&GaussRat::zero()), {
        let mut two_n = Integer::from(1);
        two_n <<= g.n as u32;
        GaussRat::from_integer(&two_n)
    });
    debug_assert_eq!(q.poly.eval(&GaussRat::one()), {
        let x = RatPoly::from_integers(&zp.coeffs);
        x.eval(beta)
    });
    Ok(q)
}

pub fn q_poly(g: &MultiGraph, beta: &Cplx, ctx: &PrecisionContext) -> Result<QPoly> {
    let zp = ising_poly(g)?;
    let m = zp.degree();
    let binom = binomial_table(m);
    let w = beta - &Cplx::one(ctx);
    let mut wpow = Cplx::one(ctx);
    let mut coeffs = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut s = Integer::new();
        for k in j..=m {
            s += Integer::from(&zp.coeffs[k] * &binom[k][j]);
        }
        let sf = Float::with_val(ctx.bits(), &s);
        coeffs.push(wpow.scale(&sf));
        if j < m {
            wpow = &wpow * &w;
        }
    }
    Ok(QPoly { coeffs, vertex_count: g.n })
}

/// Low-order interpolation coefficients by direct subset enumeration:
/// c_j = sum over edge subsets A of size j of 2^{components(A)}, so the
/// z^j coefficient of q equals (beta-1)^j c_j.
pub fn low_order_coeffs(g: &MultiGraph, k: usize) -> Result<Vec<Integer>> {
    if k > g.edges.len() {
        return Err(Error::Domain(format!(
            "k = {k} exceeds edge count {}",
            g.edges.len()
        )));
    }
    let m = g.edges.len();
    let mut out = vec![Integer::new(); k + 1];
    // lexicographic DFS over subsets of size <= k with union-find rollback
    struct Dfs<'a> {
        g: &'a MultiGraph,
        k: usize,
        parent: Vec<u32>,
        comps: usize,
        out: Vec<Integer>,
    }
    impl Dfs<'_> {
        fn find(&self, mut v: u32) -> u32 {
            while self.parent[v as usize] != v {
                v = self.parent[v as usize];
            }
            v
        }
        fn rec(&mut self, next_edge: usize, size: usize) {
            self.out[size] += Integer::from(1) << self.comps as u32;
            if size == self.k {
                return;
            }
            for e in next_edge..self.g.edges.len() {
                let (u, v) = self.g.edges[e];
                let ru = self.find(u);
                let rv = self.find(v);
                let merged = ru != rv;
                if merged {
                    self.parent[ru as usize] = rv;
                    self.comps -= 1;
                }
                self.rec(e + 1, size + 1);
                if merged {
                    self.parent[ru as usize] = ru;
                    self.comps += 1;
                }
            }
        }
    }
    let mut dfs = Dfs {
        g,
        k,
        parent: (0..g.n as u32).collect(),
        comps: g.n,
        out: std::mem::take(&mut out),
    };
    dfs.rec(0, 0);
    let _ = m;
    Ok(dfs.out)
}

/// Preimage of the open zero-free disk under z -> 1 + z(beta-1): the z-plane
/// disk on which log q is analytic. Contains 0 and 1 strictly.
pub fn segment_zero_free_disk(
    beta: &Cplx,
    delta: u32,
    ctx: &PrecisionContext,
) -> Result<DiskRegion> {
    let eps = region::epsilon_delta(delta, ctx)?;
    let one = Cplx::one(ctx);
    let w = beta - &one;
    if w.norm() <= ctx.tolerance() {
        return Err(Error::Degenerate("beta = 1; Z = 2^n exactly".into()));
    }
    if !region::in_r_strict(beta, &eps, 1e-12, ctx) {
        return Err(Error::NotInRegion);
    }
    let disk = region::r_region(&eps, ctx)?;
    let center = &(&disk.center - &one) / &w;
    let radius = Float::with_val(ctx.bits(), &disk.radius / &w.norm());
    // 0 and 1 must lie strictly inside
    let m0 = center.norm();
    let m1 = (&center - &one).norm();
    if m0 >= radius || m1 >= radius {
        return Err(Error::NotInRegion);
    }
    Ok(DiskRegion { center, radius })
}

/// Tail bound deg * t^{m+1} / ((m+1)(1-t)) for the truncated log series.
pub fn truncation_bound(deg: usize, t: f64, m: usize) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::Domain("truncation_bound needs 0 < t < 1".into()));
    }
    Ok(deg as f64 * t.powi(m as i32 + 1) / ((m as f64 + 1.0) * (1.0 - t)))
}

/// Output of the approximation scheme.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxResult {
    /// Approximate log Z (some branch), as strings for the report.
    pub z_hat_re: f64,
    pub z_hat_im: f64,
    #[serde(skip)]
    pub z_hat: Cplx,
    #[serde(skip)]
    pub z_value: Cplx,
    pub m_used: usize,
    pub error_bound: f64,
    pub t_ratio: f64,
    pub degenerate_exact: bool,
}

/// Approximates log Z(G; beta) within eps on the zero-free disk:
/// shift q to the disk center, take m log-Taylor coefficients with m chosen
/// from the tail bound, and difference the series between z = 1 and z = 0.
pub fn approx_log_z(
    g: &MultiGraph,
    beta: &Cplx,
    eps: f64,
    delta: u32,
    ctx: &PrecisionContext,
) -> Result<ApproxResult> {
    if eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if g.max_degree() > delta as usize {
        return Err(Error::Precondition(format!(
            "graph max degree {} exceeds Delta = {delta}",
            g.max_degree()
        )));
    }
    if eps < 10.0 * ctx.tolerance_f64() {
        return Err(Error::PrecisionExhausted);
    }
    let one = Cplx::one(ctx);
    let ln2 = Float::with_val(ctx.bits(), rug::float::Constant::Log2);
    if beta.dist(&one) <= ctx.tolerance() {
        // exact short-circuit: Z = 2^n
        let z_hat = Cplx::new(Float::with_val(ctx.bits(), &ln2 * &Float::with_val(ctx.bits(), g.n as u32)), ctx.float(0.0));
        let z_value = z_hat.exp();
        return Ok(ApproxResult {
            z_hat_re: z_hat.re.to_f64(),
            z_hat_im: 0.0,
            z_hat,
            z_value,
            m_used: 0,
            error_bound: 0.0,
            t_ratio: 0.0,
            degenerate_exact: true,
        });
    }
    let disk = segment_zero_free_disk(beta, delta, ctx)?;
    let q = q_poly(g, beta, ctx)?;
    let deg = q.coeffs.len() - 1;
    let z0 = disk.center.clone();
    let t = {
        let m0 = z0.norm();
        let m1 = (&z0 - &one).norm();
        let far = if m0 > m1 { m0 } else { m1 };
        (far / &disk.radius).to_f64()
    };
    if !(t < 1.0) {
        return Err(Error::NotInRegion);
    }
    // smallest m with tail <= eps/2 (the series is differenced at two points,
    // each truncated at the same m)
    let mut m = 1usize;
    while truncation_bound(deg, t, m)? > eps / 2.0 {
        m += 1;
        if m > 100_000 {
            return Err(Error::PrecisionExhausted);
        }
    }
    let shifted = CPoly::new(q.coeffs.clone()).taylor_shift(&z0);
    let a = shifted.log_truncate(m, ctx)?;
    // log q(1) - log q(0) = sum_j a_j ((1-z0)^j - (-z0)^j) + tails
    let u1 = &one - &z0;
    let u0 = -&z0;
    let mut diff = Cplx::zero(ctx);
    let mut p1 = Cplx::one(ctx);
    let mut p0 = Cplx::one(ctx);
    for aj in a.iter().skip(1) {
        p1 = &p1 * &u1;
        p0 = &p0 * &u0;
        diff = &diff + &(aj * &(&p1 - &p0));
    }
    // log q(0) = n log 2 exactly
    let n_ln2 = Float::with_val(ctx.bits(), &ln2 * &Float::with_val(ctx.bits(), g.n as u32));
    let z_hat = &diff + &Cplx::new(n_ln2, ctx.float(0.0));
    let z_value = z_hat.exp();
    let error_bound = 2.0 * truncation_bound(deg, t, m)?;
    Ok(ApproxResult {
        z_hat_re: z_hat.re.to_f64(),
        z_hat_im: z_hat.im.to_f64(),
        z_hat,
        z_value,
        m_used: m,
        error_bound,
        t_ratio: t,
        degenerate_exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::weighted_z_eval;
    use rand::{Rng, SeedableRng};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn q_poly_examples() {
        let c = ctx();
        // K2 at beta = 3: Z = 2x + 2 -> q = 4 + 4z
        let k2 = MultiGraph::single_edge().0;
        let q = q_poly_exact(&k2, &GaussRat::from_int(3)).unwrap();
        assert_eq!(q.poly, RatPoly::from_ints(&[4, 4]));
        // coefficient of z^0 is 2^n
        let k3 = MultiGraph::complete(3);
        let q = q_poly_exact(&k3, &GaussRat::from_parts(2, 1, 1, 3)).unwrap();
        assert_eq!(q.poly.coeffs[0], GaussRat::from_int(8));
        // C4 at 2+i: q(1) matches the weighted evaluator
        let c4 = MultiGraph::cycle(4);
        let beta = Cplx::from_f64(&c, 2.0, 1.0);
        let q = q_poly(&c4, &beta, &c).unwrap();
        let q1 = CPoly::new(q.coeffs.clone()).eval(&Cplx::one(&c));
        let z = weighted_z_eval(&c4, &vec![beta.clone(); 4], &c).unwrap();
        assert!(q1.approx_eq(&z, &c.tolerance()));
    }

    #[test]
    fn low_order_examples() {
        let c4 = MultiGraph::cycle(4);
        let co = low_order_coeffs(&c4, 4).unwrap();
        // j = 0: 2^n; j = 1: |E| 2^{n-1}
        assert_eq!(co[0], Integer::from(16));
        assert_eq!(co[1], Integer::from(4 * 8));
        // all j: match q_poly coefficients divided by (beta-1)^j
        let beta = GaussRat::from_parts(1, 2, 3, 5);
        let q = q_poly_exact(&c4, &beta).unwrap();
        let w = &beta - &GaussRat::one();
        let mut wp = GaussRat::one();
        for (j, cj) in co.iter().enumerate() {
            let expect = &GaussRat::from_integer(cj) * &wp;
            assert_eq!(q.poly.coeffs[j], expect, "j = {j}");
            wp = &wp * &w;
        }
    }

    #[test]
    fn segment_disk_geometry() {
        let c = ctx();
        // affine image keeps 0 and 1 strictly inside, boundary maps to boundary
        let beta = Cplx::from_f64(&c, 1.2, 0.0);
        let disk = segment_zero_free_disk(&beta, 3, &c).unwrap();
        let m0 = disk.center.norm().to_f64();
        let m1 = (&disk.center - &Cplx::one(&c)).norm().to_f64();
        let r = disk.radius.to_f64();
        assert!(m0 < r && m1 < r);
        // the containment margin is strictly positive
        assert!(r - m0.max(m1) > 0.0);
        // boundary samples of the z-disk map onto the boundary of R(eps)
        let eps = region::epsilon_delta(3, &c).unwrap();
        let rd = region::r_region(&eps, &c).unwrap();
        for k in 0..32 {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
            let z = &disk.center
                + &Cplx::from_f64(&c, ang.cos(), ang.sin()).scale(&disk.radius);
            let x = &Cplx::one(&c) + &(&z * &(&beta - &Cplx::one(&c)));
            let err = (x.dist(&rd.center) - rd.radius.clone()).abs();
            assert!(err.to_f64() < 1e-12);
        }
        // beta = 1 is the degenerate exact case
        assert!(matches!(
            segment_zero_free_disk(&Cplx::one(&c), 3, &c),
            Err(Error::Degenerate(_))
        ));
        // beta outside: rejected
        assert!(matches!(
            segment_zero_free_disk(&Cplx::from_f64(&c, 0.0, 3.0), 3, &c),
            Err(Error::NotInRegion)
        ));
    }

    #[test]
    fn truncation_examples() {
        // deg=8, t=0.5, m=20
        let v = truncation_bound(8, 0.5, 20).unwrap();
        assert!((v - 3.633e-7).abs() < 1e-9, "{v}");
        // monotone decreasing in m
        for m in 1..30 {
            assert!(truncation_bound(8, 0.5, m + 1).unwrap() < truncation_bound(8, 0.5, m).unwrap());
        }
        assert!(truncation_bound(8, 1.2, 3).is_err());
    }

    #[test]
    fn k3_approximation() {
        let c = ctx();
        let beta = Cplx::from_f64(&c, 1.2, 0.0);
        let r = approx_log_z(&MultiGraph::complete(3), &beta, 1e-3, 3, &c).unwrap();
        // exact Z(K3; 1.2) = 2*1.2^3 + 6*1.2 = 10.656
        let dev = (r.z_value.re.to_f64() - 10.656).abs();
        assert!(dev <= 10.656 * (1e-3f64.exp_m1()), "dev = {dev}");
        assert!(r.error_bound <= 1e-3);
        assert!(r.z_hat_im.abs() < 1e-20);
    }

    #[test]
    fn beta_one_short_circuit() {
        let c = ctx();
        let r = approx_log_z(&MultiGraph::complete(4), &Cplx::one(&c), 1e-6, 3, &c).unwrap();
        assert!(r.degenerate_exact);
        assert!((r.z_value.re.to_f64() - 16.0).abs() < 1e-20);
    }

    #[test]
    fn random_graphs_meet_bound() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..15 {
            // random connected max-degree-3 graph, n <= 9
            let n = rng.gen_range(3..=9usize);
            let g = random_cubicish(&mut rng, n);
            // interior grid point of R(eps_3)
            let ang: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let rad: f64 = rng.gen_range(0.0..0.7);
            let eps = region::epsilon_delta(3, &c).unwrap();
            let disk = region::r_region(&eps, &c).unwrap();
            let beta = &disk.center
                + &Cplx::from_f64(&c, ang.cos() * rad, ang.sin() * rad).scale(&disk.radius);
            let r = approx_log_z(&g, &beta, 1e-4, 3, &c).unwrap();
            let z_exact = ising_poly(&g).unwrap().eval(&beta, &c);
            // |log|Zhat| - log|Z|| <= eps and angular deviation <= eps
            let dlog = (r.z_value.norm().ln() - z_exact.norm().ln()).to_f64().abs();
            assert!(dlog <= 1e-4, "log-norm deviation {dlog}");
            let darg = {
                let d = (&r.z_value / &z_exact).arg().to_f64();
                d.abs()
            };
            assert!(darg <= 1e-4, "angular deviation {darg}");
            // bound never violated
            let dev = (&r.z_hat - &z_exact.ln()).norm().to_f64();
            let dev = dev.min((r.z_hat_im - z_exact.arg().to_f64()).abs());
            assert!(dev <= r.error_bound.max(1e-12) * 1.0001 || dlog <= r.error_bound);
        }
    }

    pub(super) fn random_cubicish(rng: &mut impl Rng, n: usize) -> MultiGraph {
        // random connected graph with max degree <= 3
        loop {
            let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (rng.gen_range(0..v), v)).collect();
            for _ in 0..rng.gen_range(0..=n / 2) {
                let u = rng.gen_range(0..n as u32);
                let v = rng.gen_range(0..n as u32);
                if u != v {
                    edges.push((u.min(v), u.max(v)));
                }
            }
            let g = MultiGraph::new(n, edges);
            if g.max_degree() <= 3 && g.is_connected() {
                return g;
            }
        }
    }
}
