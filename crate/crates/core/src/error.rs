use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("arity error: {0}")]
    Arity(String),

    #[error("point ({u}, {v}) outside the parameter domain")]
    Domain { u: f64, v: f64 },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("degenerate point: EG - F^2 = {det:e}")]
    DegeneratePoint { det: f64 },

    #[error("irregular curve: speed {speed:e} at t = {t}")]
    IrregularCurve { t: f64, speed: f64 },

    #[error("Frenet frame undefined: curvature {kappa:e} at or below threshold")]
    FrameUndefined { kappa: f64 },

    #[error("no tangent-position locus reachable from seed")]
    NoSeed,

    #[error("singular locus near ({u:.6e}, {v:.6e}): gradient of the tangency function vanishes")]
    SingularLocus { u: f64, v: f64 },

    #[error("surface is identically tangent near ({u:.6e}, {v:.6e}): every curve there is tangent-position")]
    IdenticallyTangent { u: f64, v: f64 },

    #[error("corrector failed to return to the locus at step {step}")]
    CorrectorFailed { step: usize },

    #[error("isometry pair rejected: {0}")]
    PairRejected(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
