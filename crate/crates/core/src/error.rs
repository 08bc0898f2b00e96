use thiserror::Error;

use crate::adder::AdderError;
use crate::comm::CommError;
use crate::dse::DseError;
use crate::pos::PosError;
use crate::viterbi::ViterbiError;

/// Umbrella error for callers that drive several subsystems at once.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error(transparent)]
    Viterbi(#[from] ViterbiError),
    #[error(transparent)]
    Comm(#[from] CommError),
    #[error(transparent)]
    Pos(#[from] PosError),
    #[error(transparent)]
    Dse(#[from] DseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
