//! Two-particle coincidence interference behind a double slit.
//!
//! Two distinguishable particles are prepared in `N(a ψ(x)φ(y) + b ϕ(x)χ(y))`, pass a
//! double slit modelled with Gaussian apertures, and are detected in
//! coincidence at `(x, y)`. The crate provides the closed-form post-slit
//! amplitudes, the normalized superposition, mixture and product densities,
//! pattern analytics (peaks, visibility, separations, fixed-detector sweeps)
//! and the Schmidt number of the prepared state, together with brute-force
//! oracles for all closed forms.

pub mod entanglement;
pub mod error;
pub mod joint;
pub mod oracle;
pub mod packets;
pub mod params;
pub mod patterns;
pub mod quadrature;
pub mod slits;
pub mod verify;

pub use error::{Error, Result};
pub use joint::{normalize, JointState, StateKind};
pub use params::{
    load_config, paper_defaults, ArrangementConfig, PacketSpec, ParticleTimes, SlitGeometry,
    SuperpositionCoeffs,
};
pub use patterns::{Pattern, PeakSet, VisibilityWindow};
pub use quadrature::GridSpec;
pub use slits::{Slit, SlitCoefficients};
