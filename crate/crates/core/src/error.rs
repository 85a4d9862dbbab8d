use thiserror::Error;

use crate::grading::Bidegree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} and {1}")]
    RingMismatch(String, String),
    #[error("{0} is a module, not a ring")]
    NotARing(String),
    #[error("monomial {monomial} does not lie in {ring}")]
    NotInRing { monomial: String, ring: String },
    #[error("algebroid mismatch: {0} and {1}")]
    AlgebroidMismatch(String, String),
    #[error("right unit and antipode are not defined on the kappa-bearing scalar {0}")]
    UnsupportedScalar(String),
    #[error("window too small at {at}: {detail}")]
    WindowTooSmall { at: Bidegree, detail: String },
    #[error("invalid window `{0}`")]
    InvalidWindow(String),
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("kappa-bearing coefficient in the coaction of {symbol} at {at}")]
    KappaObstruction { symbol: String, at: Bidegree },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
