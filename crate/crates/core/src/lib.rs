//! Upper bounds on Barron norms and spectral Barron norms of two-layer
//! ReLU^s networks, built from an explicit smooth-cutoff extension of each
//! neuron, plus numerical suites that probe the embedding between the two
//! kinds of Barron space.
//!
//! Layout:
//!
//! | module | contents |
//! |--------|----------|
//! | [`domain`] | symmetric compact domains, support-function norm |
//! | [`network`] | finite networks, neuron normalisation, path cost |
//! | [`cutoff`] | the cutoff χ and extended neuron profiles |
//! | [`fourier`] | 1D transforms of profiles and of the triangular hat |
//! | [`norms`] | spectral moments and spectral Barron upper bounds |
//! | [`experiments`] | verification suites and the path-norm fitter |
//! | [`cli`] | command-line dispatch |

pub mod cli;
pub mod cutoff;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod fourier;
mod jet;
pub mod network;
pub mod norms;
pub mod quadrature;

pub use cutoff::{chi_eval, profile_eval, NeuronProfile, ProfilePower};
pub use domain::{ActivationPower, DomainSpec};
pub use error::{Error, Result};
pub use fourier::{ft_profile, ft_triangular, SpectrumSample};
pub use network::{
    barron_cost_upper, normalize_neuron, Atom, NetworkDocument, NeuronForm, NormalizedNeuron,
    TwoLayerNetwork,
};
pub use norms::{moment_integral, spectral_upper, truncated_triangular_moment, MomentEstimate};
