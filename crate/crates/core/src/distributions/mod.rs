//! Total-photon-number laws for every signal family and their transformation
//! under loss.

mod dist;
mod gaussian;
mod signal;

pub use dist::{
    convolve, poisson, poisson_entropy, thermal_total, truncated_thermal, truncated_thermal_beta,
    PhotonDist,
};
pub use dist::first_moment;
pub use gaussian::{
    gaussian_single_mode, squeezed_coherent, GaussianModeParams, SqueezedCoherentParams,
    SQUEEZE_FALLBACK,
};
pub use signal::{apply_loss, signal_energy, thin_fock_weights, FockOccupation, Signal};
