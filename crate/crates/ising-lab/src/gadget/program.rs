//! Straight-line gadget programs: a_0 is the base edge interaction and each
//! step applies g to a product of earlier values. Programs compile to
//! bounded-degree graphs by the series/parallel recursion.

use serde::{Deserialize, Serialize};

use super::dynamics::g_map;
use crate::error::{Error, Result};
use crate::exact::implemented_weight;
use crate::graph::{parallel_compose, series_compose, MultiGraph, Terminals};
use crate::numerics::{Cplx, InfCplx, PrecisionContext};

/// Step k holds the indices (all < k) whose values are multiplied before g
/// is applied; arities range over 1..=d with d = Delta - 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsingProgram {
    pub steps: Vec<Vec<usize>>,
}

impl IsingProgram {
    pub fn new(steps: Vec<Vec<usize>>) -> Self {
        IsingProgram { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.steps.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    fn validate(&self, d: usize) -> Result<()> {
        for (k, step) in self.steps.iter().enumerate() {
            if step.is_empty() || step.len() > d {
                return Err(Error::Arity {
                    step: k + 1,
                    msg: format!("arity {} outside 1..={d}", step.len()),
                });
            }
            if step.iter().any(|&i| i > k) {
                return Err(Error::Arity {
                    step: k + 1,
                    msg: "step references a later value".into(),
                });
            }
        }
        Ok(())
    }
}

/// Values a_0..a_K with infinity propagated through products and g.
#[derive(Debug, Clone)]
pub struct ProgramTrace {
    pub values: Vec<InfCplx>,
}

impl ProgramTrace {
    pub fn last(&self) -> &InfCplx {
        self.values.last().unwrap()
    }
}

/// Evaluates the program over the Riemann sphere. An indeterminate 0 * inf
/// product or 0/0 Möbius value aborts with the step index.
pub fn program_eval(
    p: &IsingProgram,
    base: &Cplx,
    ctx: &PrecisionContext,
) -> Result<ProgramTrace> {
    let mut values: Vec<InfCplx> = vec![InfCplx::Finite(base.clone())];
    for (k, step) in p.steps.iter().enumerate() {
        if step.is_empty() || step.iter().any(|&i| i >= values.len()) {
            return Err(Error::Arity { step: k + 1, msg: "bad index".into() });
        }
        let mut prod = InfCplx::Finite(Cplx::one(ctx));
        for &i in step {
            prod = match (&prod, &values[i]) {
                (InfCplx::Finite(a), InfCplx::Finite(b)) => InfCplx::Finite(a * b),
                (InfCplx::Inf, InfCplx::Finite(b)) | (InfCplx::Finite(b), InfCplx::Inf) => {
                    if b.norm() <= ctx.tolerance() {
                        return Err(Error::Indeterminate(k + 1));
                    }
                    InfCplx::Inf
                }
                (InfCplx::Inf, InfCplx::Inf) => InfCplx::Inf,
            };
        }
        let next = g_map(base, &prod, ctx).map_err(|_| Error::Indeterminate(k + 1))?;
        values.push(next);
    }
    Ok(ProgramTrace { values })
}

/// Compiled sizes grow with every reuse; this cap keeps the construction at
/// desk scale.
pub const COMPILE_VERTEX_CAP: usize = 200_000;

/// Compiles the program to a gadget graph: H_0 is the base gadget (a single
/// edge by default) and H_k is series(base, parallel(H_{i_1}, ..., H_{i_m}), base).
/// Terminals keep degree 1 and the maximum degree stays <= Delta.
pub fn program_compile(p: &IsingProgram, delta: u32) -> Result<(MultiGraph, Terminals)> {
    let (edge, te) = MultiGraph::single_edge();
    program_compile_with_base(p, &edge, te, delta)
}

pub fn program_compile_with_base(
    p: &IsingProgram,
    base: &MultiGraph,
    base_t: Terminals,
    delta: u32,
) -> Result<(MultiGraph, Terminals)> {
    let d = (delta - 1) as usize;
    p.validate(d)?;
    let mut gadgets: Vec<(MultiGraph, Terminals)> = vec![(base.clone(), base_t)];
    for step in &p.steps {
        // parallel block of the referenced gadgets
        let (mut block, mut tb) = gadgets[step[0]].clone();
        for &i in &step[1..] {
            let (g, t) = &gadgets[i];
            let r = parallel_compose(&block, tb, g, *t);
            block = r.0;
            tb = r.1;
        }
        let (left, tl) = series_compose(base, base_t, &block, tb);
        let (whole, tw) = series_compose(&left, tl, base, base_t);
        if whole.n > COMPILE_VERTEX_CAP {
            return Err(Error::TooLarge(format!(
                "compiled gadget exceeds {COMPILE_VERTEX_CAP} vertices"
            )));
        }
        gadgets.push((whole, tw));
    }
    Ok(gadgets.pop().unwrap())
}

/// Compiles and, when the result fits the enumeration cap, checks that the
/// exact implemented weight equals the trace's final value.
pub fn program_compile_verified(
    p: &IsingProgram,
    beta: &Cplx,
    delta: u32,
    ctx: &PrecisionContext,
) -> Result<(MultiGraph, Terminals)> {
    let (g, t) = program_compile(p, delta)?;
    if g.n <= crate::exact::DEFAULT_VERTEX_CAP {
        let trace = program_eval(p, beta, ctx)?;
        let got = implemented_weight(&g, t, beta, ctx)?;
        match trace.last() {
            InfCplx::Finite(v) => {
                let tol = ctx.float(1e-9);
                if !got.approx_eq(v, &tol) {
                    return Err(Error::VerificationFailed(format!(
                        "compiled weight {got} != program value {v}"
                    )));
                }
            }
            InfCplx::Inf => {
                return Err(Error::VerificationFailed(
                    "program value is infinite; gadget weight cannot match".into(),
                ))
            }
        }
    }
    Ok((g, t))
}
