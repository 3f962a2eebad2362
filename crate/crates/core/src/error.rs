use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("state {0:?} lies outside the admissible box")]
    OutOfBox(Vec<f64>),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-hyperbolic point: {0}")]
    Degenerate(String),
    #[error("model `{0}` has no conservative flux")]
    NonConservative(String),
    #[error("root finding did not converge: {0}")]
    NoConvergence(String),
    #[error("front count exceeded the cap of {0}")]
    FrontCap(usize),
    #[error("horizon too short: {0}")]
    HorizonTooShort(String),
    #[error("washout incomplete: {0}")]
    WashoutIncomplete(String),
    #[error("two rarefaction fronts of family {family} collided at t = {time}")]
    RarefactionCrossing { family: usize, time: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Numerical aborts (front cap, leaving the box, failed root finding).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OutOfBox(_)
                | Error::FrontCap(_)
                | Error::NoConvergence(_)
                | Error::HorizonTooShort(_)
                | Error::WashoutIncomplete(_)
                | Error::RarefactionCrossing { .. }
        )
    }
}
