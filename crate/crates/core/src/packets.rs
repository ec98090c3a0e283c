//! Initial one-particle Gaussian packets and their free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::params::PacketSpec;

/// Momentum-space mode distribution `f(k) = (4π)^{1/4} σ^{-1/2} exp(−k²/2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDistribution {
    pub width: f64,
}

impl ModeDistribution {
    pub fn amplitude(&self, k: f64) -> f64 {
        (4.0 * PI).powf(0.25) / self.width.sqrt() * (-k * k / (2.0 * self.width * self.width)).exp()
    }
}

/// `ψ(x, 0) = σ^{1/2} π^{-1/4} exp(−σ²x²/2)`.
pub fn initial_position_amplitude(spec: &PacketSpec, x: f64) -> Complex64 {
    let s = spec.width;
    Complex64::new(
        s.sqrt() * PI.powf(-0.25) * (-s * s * x * x / 2.0).exp(),
        0.0,
    )
}

/// Free evolution of the packet for reduced time `tau` (μm²):
/// `σ^{1/2} π^{-1/4} (1 + iσ²τ)^{-1/2} exp(−σ²x² / 2(1 + iσ²τ))`.
///
/// The square root takes the principal branch; `1 + iσ²τ` stays in the right
/// half plane for `τ ≥ 0`, so the result is continuous in `τ`.
pub fn free_propagated_amplitude(spec: &PacketSpec, x: f64, tau: f64) -> Complex64 {
    free_gaussian(spec.width, x, tau)
}

pub(crate) fn free_gaussian(width: f64, x: f64, tau: f64) -> Complex64 {
    let s2 = width * width;
    let z = Complex64::new(1.0, s2 * tau);
    let pre = width.sqrt() * PI.powf(-0.25);
    z.powf(-0.5) * pre * (-(s2 * x * x) / (z * 2.0)).exp()
}

/// Position standard deviation of the freely evolved packet,
/// `√((1 + σ⁴τ²)/2) / σ`.
pub fn position_spread(spec: &PacketSpec, tau: f64) -> f64 {
    let s = spec.width;
    ((1.0 + s.powi(4) * tau * tau) / 2.0).sqrt() / s
}
