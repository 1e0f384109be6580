use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient points: requested {requested} nearest of {available}")]
    InsufficientPoints { requested: usize, available: usize },

    #[error("no serving infrastructure: zero active cells")]
    NoServingInfrastructure,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown sweep axis `{0}` (expected one of M, rho, lambda_s, lambda_h, lambda_m_active, N_RB)")]
    UnknownAxis(String),

    #[error("mean rate is unbounded: infinite backhaul with zero interferer density")]
    UnboundedRate,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
