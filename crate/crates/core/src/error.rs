use alloc::string::String;

/// Failures reported by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("atomic-limit filling hit the search bound n_max = {n_max}; raise n_max")]
    FillingTruncated { n_max: u32 },

    #[error("hole sector is empty: no site has a nonzero background filling")]
    EmptyHoleSector,

    #[error("assembled matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge ({context}); residual {residual:e}")]
    NoConvergence { context: String, residual: f64 },

    #[error("Mott lobe is closed: mu_upper {mu_upper} < mu_lower {mu_lower}")]
    LobeClosed { mu_lower: f64, mu_upper: f64 },

    #[error("lobe has no lower boundary, so it has no tip")]
    UnboundedLobe,

    #[error("could not bracket the root; last bracket [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("lobe width is not monotone in kappa near kappa = {kappa}")]
    NonMonotoneWidth { kappa: f64 },

    #[error("photon truncation too small: occupancy {occupancy:e} at n_max = {n_max}")]
    Truncation { occupancy: f64, n_max: u32 },

    #[error("order-parameter minimum not bracketed below psi_max = {psi_max}")]
    MinimumNotBracketed { psi_max: f64 },

    #[error("no Mott-superfluid transition at mu = {mu}: superfluid already at vanishing hopping")]
    NoTransition { mu: f64 },

    #[error("sector too large: {nonzeros} nonzeros exceeds the cap of {cap}")]
    DimensionOverflow { nonzeros: usize, cap: usize },

    #[error("Hamiltonian leaked out of the excitation sector (N = {excitations})")]
    SectorLeak { excitations: u32 },

    #[error("phase grids do not share axes")]
    AxisMismatch,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
