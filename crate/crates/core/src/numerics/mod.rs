//! Scalar special functions, entropy primitives, root finding, quadrature and
//! overflow-safe Hermite polynomials.

mod entropy;
mod hermite;
mod policy;
mod quadrature;
mod roots;
mod sum;

pub use entropy::{
    kl_divergence, log_block_dimension, log_block_dimensions, shannon_entropy, thermal_entropy_g,
    xlogx, xlogx_one_minus,
};
pub use hermite::{hermite_signed_log, scaled_hermite_log_abs, SignedLogValue};
pub(crate) use hermite::modified_hermite_signed_log;
pub(crate) use entropy::{entropy_unchecked, h};
pub use policy::TruncationPolicy;
pub use quadrature::{quadrature_semiinfinite, try_quadrature_semiinfinite, QUADRATURE_EVAL_BUDGET};
pub use roots::{brent_root, BRENT_MAX_ITER};
pub use sum::{log_sum_exp, NeumaierSum};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Round-off window for probability-domain checks.
pub const PROB_SLACK: f64 = 1e-12;
