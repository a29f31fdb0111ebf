use thiserror::Error;

/// Errors surfaced by the engines. Variants mirror the failure modes of the
/// individual operations; the CLI maps them onto stable exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial division left a nonzero remainder")]
    NotDivisible,
    #[error("constant term is zero; log series undefined at 0")]
    ConstantTermZero,
    #[error("root iteration did not converge within {0} rounds (raise precision)")]
    NonConvergence(usize),
    #[error("argument outside the operation's domain: {0}")]
    Domain(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("graph has a loop; self-avoiding-walk construction requires loop-free input")]
    HasLoop,
    #[error("tree polynomial does not divide the graph polynomial (pinning convention broken)")]
    DivisibilityViolation,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("0/0 encountered in a Möbius evaluation at step {0}")]
    Indeterminate(usize),
    #[error("gadget is degenerate at this edge interaction: Z01 vanishes")]
    NotImplementing,
    #[error("beta = {0} is a special point for this map")]
    SpecialPoint(String),
    #[error("map is degenerate at beta = {0}")]
    Degenerate(String),
    #[error("program step {step}: {msg}")]
    Arity { step: usize, msg: String },
    #[error("compiled gadget failed exact verification: {0}")]
    VerificationFailed(String),
    #[error("no contracting-and-covering radius found above the precision floor")]
    CoverFailed,
    #[error("navigation left the covered ball (cover invariant violated)")]
    NavigationStuck,
    #[error("escape exceeded the iteration cap of {0}")]
    EscapeCap(usize),
    #[error("root solve for the escape equation failed")]
    NewtonFail,
    #[error("target beta outside the zero-free region")]
    NotInRegion,
    #[error("requested accuracy is below the working-precision floor")]
    PrecisionExhausted,
}

pub type Result<T> = std::result::Result<T, Error>;
