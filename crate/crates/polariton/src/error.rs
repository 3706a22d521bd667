use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("distribution fwhm must be positive and finite, got {0}")]
    InvalidFwhm(f64),

    #[error("{name} must be finite and non-negative, got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("frequency must be finite, got {0}")]
    InvalidFrequency(f64),

    #[error("non-finite argument: {0}")]
    NonFiniteArgument(&'static str),

    #[error("moment of order {order} is undefined for a Lorentzian distribution")]
    MomentUndefined { order: u32 },

    #[error("quadrature route requires homogeneous width > 0; use the principal-value form at zero width")]
    ZeroWidthQuadrature,

    #[error("discrete sampling needs at least 2 emitters, got {0}")]
    TooFewEmitters(usize),

    #[error("at most two ensembles are supported, got {0}")]
    TooManyEnsembles(usize),

    #[error("pole search did not converge from seed {seed_re}{seed_im:+}i after {iterations} iterations")]
    PoleNonConvergence {
        seed_re: f64,
        seed_im: f64,
        iterations: usize,
    },

    #[error("seed {seed_re}{seed_im:+}i lies inside the rectangular support band, where the zero-width susceptibility has a branch cut")]
    SeedInBranchCut { seed_re: f64, seed_im: f64 },

    #[error("pole search needs at least one seed")]
    NoSeeds,

    #[error("frequency window too small: relative tail magnitude {tail:.2e} exceeds {limit:.2e}; enlarge the span")]
    WindowTooSmall { tail: f64, limit: f64 },

    #[error("requested time {requested:.3} exceeds the resolvable window {max:.3}")]
    TimeBeyondWindow { requested: f64, max: f64 },

    #[error("integrator step size underflowed at t = {time}")]
    StepSizeUnderflow { time: f64 },

    #[error("spectral measure normalization check failed: total weight {total} (expected 1 within {tolerance})")]
    CompletenessCheck { total: f64, tolerance: f64 },

    #[error("dressed state requires a positive collective coupling")]
    ZeroCoupling,

    #[error("dark state is undefined for detuning = coupling = 0")]
    DarkStateUndefined,

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
