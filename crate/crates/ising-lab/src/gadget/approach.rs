//! Programs that generate nonreal values arbitrarily close to the fixed
//! point 1, split by the position of beta relative to the unit ratio circle.

use super::dynamics::phi;
use super::program::IsingProgram;
use crate::error::{Error, Result};
use crate::numerics::{Cplx, InfCplx, PrecisionContext};
use crate::region::phi_ratio;

/// Incrementally built program with its evaluated trace. Values are kept
/// finite; a step that would produce infinity or an indeterminate form is
/// rejected before commitment.
pub(crate) struct ProgBuilder<'a> {
    pub base: Cplx,
    pub ctx: &'a PrecisionContext,
    pub steps: Vec<Vec<usize>>,
    pub values: Vec<Cplx>,
}

impl<'a> ProgBuilder<'a> {
    pub fn new(base: Cplx, ctx: &'a PrecisionContext) -> Self {
        ProgBuilder { values: vec![base.clone()], base, ctx, steps: Vec::new() }
    }

    /// Evaluates g(product of values at idxs) without committing the step.
    pub fn preview(&self, idxs: &[usize]) -> Option<Cplx> {
        let mut prod = Cplx::one(self.ctx);
        for &i in idxs {
            prod = &prod * self.values.get(i)?;
        }
        match super::dynamics::g_map(&self.base, &InfCplx::Finite(prod), self.ctx) {
            Ok(InfCplx::Finite(v)) => Some(v),
            _ => None,
        }
    }

    pub fn push(&mut self, idxs: Vec<usize>) -> Result<usize> {
        let v = self
            .preview(&idxs)
            .ok_or_else(|| Error::Indeterminate(self.steps.len() + 1))?;
        self.steps.push(idxs);
        self.values.push(v);
        Ok(self.values.len() - 1)
    }

    pub fn program(&self) -> IsingProgram {
        IsingProgram::new(self.steps.clone())
    }
}

fn clearly_nonreal(v: &Cplx) -> bool {
    let n = v.norm().to_f64().max(1.0);
    v.im.to_f64().abs() > 1e-9 * n
}

const ORBIT_LEN: usize = 160;
const MAX_PASSES: usize = 18;
const CASE_BAND: f64 = 0.02;

/// One cancellation pass: extend an orbit of plain g-steps from `seed`,
/// preview all pairs over the fresh window, and push the pair whose u-value
/// is smallest while staying clearly off the real axis.
fn cancellation_pass(b: &mut ProgBuilder, seed: usize) -> Result<usize> {
    let mut window = vec![seed];
    let mut cur = seed;
    for _ in 0..ORBIT_LEN {
        cur = b.push(vec![cur])?;
        window.push(cur);
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for (a, &i) in window.iter().enumerate() {
        for &j in &window[a..] {
            let Some(v) = b.preview(&[i, j]) else { continue };
            if !clearly_nonreal(&v) {
                continue;
            }
            let un = phi(&v, b.ctx).norm().to_f64();
            if un <= 0.0 {
                continue;
            }
            if best.is_none() || un < best.unwrap().0 {
                best = Some((un, i, j));
            }
        }
    }
    let (_, i, j) = best.ok_or(Error::NonConvergence(MAX_PASSES))?;
    b.push(vec![i, j])
}

/// Core of approach_one running on an existing builder whose base is the
/// interaction to iterate. Returns the index of the accepted value.
pub(crate) fn approach_into(b: &mut ProgBuilder, eps: f64, start: usize) -> Result<usize> {
    let ctx = b.ctx;
    let one = Cplx::one(ctx);
    let ratio = phi_ratio(&b.values[start], ctx).to_f64();
    let accept = |v: &Cplx| -> bool {
        let dist = v.dist(&one).to_f64();
        dist > 0.0 && dist <= eps && clearly_nonreal(v)
    };

    if ratio < 1.0 - CASE_BAND {
        // plain iteration contracts toward 1 at rate ratio^2
        let cap = (2.0 * (eps / 4.0).ln() / ratio.ln()).ceil() as usize + 64;
        let mut cur = start;
        for _ in 0..cap.min(200_000) {
            cur = b.push(vec![cur])?;
            if accept(&b.values[cur]) {
                return Ok(cur);
            }
        }
        return Err(Error::NonConvergence(cap));
    }

    if ratio > 1.0 + CASE_BAND {
        // iterate toward -1, interleaving squared steps that land near 1
        let cap = (2.0 * (4.0 / eps).ln() / ratio.ln()).ceil() as usize + 64;
        let mut cur = start;
        for _ in 0..cap.min(200_000) {
            cur = b.push(vec![cur])?;
            if let Some(v) = b.preview(&[cur, cur]) {
                if accept(&v) {
                    return b.push(vec![cur, cur]);
                }
            }
        }
        return Err(Error::NonConvergence(cap));
    }

    // near the unit ratio circle: the gamma step leaves the circle, then
    // rotation orbits and pair cancellations contract toward 1
    let gamma = b.push(vec![start, start])?;
    let mut seed = gamma;
    for _ in 0..MAX_PASSES {
        if accept(&b.values[seed]) {
            return Ok(seed);
        }
        seed = cancellation_pass(b, seed)?;
    }
    if accept(&b.values[seed]) {
        return Ok(seed);
    }
    Err(Error::NonConvergence(MAX_PASSES))
}

/// Builds a program whose final value a satisfies 0 < |1 - a| <= eps with
/// a off the real axis. Requires beta nonreal and away from +-i.
pub fn approach_one(
    beta: &Cplx,
    eps: f64,
    d: u32,
    ctx: &PrecisionContext,
) -> Result<(IsingProgram, Cplx)> {
    let tol = ctx.tolerance();
    if beta.im.clone().abs() <= tol {
        return Err(Error::Precondition("approach_one needs nonreal beta".into()));
    }
    let i_unit = Cplx::i(ctx);
    if beta.dist(&i_unit) <= tol || beta.dist(&(-&i_unit)) <= tol {
        return Err(Error::Precondition("beta = +-i excluded".into()));
    }
    if d < 2 {
        return Err(Error::Domain("approach_one needs d >= 2".into()));
    }
    if eps < 1e6 * ctx.tolerance_f64() {
        return Err(Error::NonConvergence(0));
    }
    let mut b = ProgBuilder::new(beta.clone(), ctx);
    let idx = approach_into(&mut b, eps, 0)?;
    Ok((b.program(), b.values[idx].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn check_outcome(beta: &Cplx, eps: f64, c: &PrecisionContext) {
        let (p, v) = approach_one(beta, eps, 2, c).unwrap();
        // re-evaluate the program from scratch
        let tr = crate::gadget::program::program_eval(&p, beta, c).unwrap();
        let last = tr.last().as_finite().expect("finite");
        assert!(last.approx_eq(&v, &c.float(1e-20)));
        let dist = v.dist(&Cplx::one(c)).to_f64();
        assert!(dist > 0.0 && dist <= eps, "dist = {dist}");
        assert!(v.im.to_f64().abs() > 0.0);
    }

    #[test]
    fn case1_contracting() {
        let c = ctx();
        check_outcome(&Cplx::from_f64(&c, 2.0, 1.0), 1e-3, &c);
        check_outcome(&Cplx::from_f64(&c, 0.2, 0.9), 1e-4, &c);
    }

    #[test]
    fn case2_expanding() {
        let c = ctx();
        check_outcome(&Cplx::from_f64(&c, -1.5, 1.0), 1e-3, &c);
    }

    #[test]
    fn case3_imaginary() {
        let c = ctx();
        // gamma = g(beta^2) leaves the unit ratio circle: |phi(gamma)| = 1.25 at 3i
        let beta = Cplx::from_f64(&c, 0.0, 3.0);
        let mut b = ProgBuilder::new(beta.clone(), &c);
        let g = b.push(vec![0, 0]).unwrap();
        let r = phi(&b.values[g], &c).norm().to_f64();
        assert!((r - 1.25).abs() < 1e-12);
        check_outcome(&beta, 1e-3, &c);
    }

    #[test]
    fn preconditions() {
        let c = ctx();
        assert!(matches!(
            approach_one(&Cplx::from_f64(&c, 1.7, 0.0), 1e-3, 2, &c),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            approach_one(&Cplx::i(&c), 1e-3, 2, &c),
            Err(Error::Precondition(_))
        ));
    }
}
