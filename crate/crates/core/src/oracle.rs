//! Brute-force propagation through an aperture, used to validate the
//! closed-form slit amplitudes and to size the Gaussian-slit approximation.
//!
//! `ψ(x) = ∫dx' K(x, τ_f; x') w(x') ψ_free(x', τ_s)` with the free kernel
//! `K = (2πiτ_f)^{-1/2} exp(i(x − x')²/2τ_f)`, evaluated by Simpson over the
//! support of the aperture weight.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::packets::{free_propagated_amplitude, position_spread};
use crate::params::{PacketSpec, SlitGeometry};
use crate::quadrature::{integrate_1d, GridSpec};
use crate::slits::{MuTime, Slit, SlitCoefficients};

/// Largest accepted phase advance of the integrand per grid step, rad.
pub const MAX_PHASE_PER_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApertureKind {
    /// Weight `exp(−(x' ∓ x_0)²/2b_s²)` on the whole line.
    GaussianWeighted,
    /// Indicator of `|x' ∓ x_0| ≤ b_s`.
    HardEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureModel {
    pub kind: ApertureKind,
    pub geometry: SlitGeometry,
}

/// Resolution of the `x'` integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResolution {
    pub points: usize,
    /// Gaussian apertures are integrated over `x_0 ± support_widths · b_s`.
    pub support_widths: f64,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            points: 2001,
            support_widths: 8.0,
        }
    }
}

fn kernel(x: f64, xp: f64, tau_f: f64) -> Complex64 {
    let pre = Complex64::new(0.0, 2.0 * PI * tau_f).sqrt().inv();
    pre * Complex64::from_polar(1.0, (x - xp).powi(2) / (2.0 * tau_f))
}

// Largest |d phase / dx'| of kernel × propagated packet over [lo, hi].
fn phase_gradient_bound(spec: &PacketSpec, x: f64, lo: f64, hi: f64) -> f64 {
    let s4 = spec.width.powi(4);
    let ts = spec.times.tau_s;
    let chirp = s4 * ts / (1.0 + s4 * ts * ts);
    let grad = |xp: f64| ((xp - x) / spec.times.tau_f + chirp * xp).abs();
    grad(lo).max(grad(hi))
}

fn integrate_support<W>(spec: &PacketSpec, x: f64, grid: &GridSpec, weight: W) -> Result<Complex64>
where
    W: Fn(f64) -> f64,
{
    if phase_gradient_bound(spec, x, grid.lo, grid.hi) * grid.step() > MAX_PHASE_PER_STEP {
        return Err(Error::Oracle("oscillatory integrand unresolved".into()));
    }
    let tau_s = spec.times.tau_s;
    let tau_f = spec.times.tau_f;
    Ok(integrate_1d(
        |xp| kernel(x, xp, tau_f) * weight(xp) * free_propagated_amplitude(spec, xp, tau_s),
        grid,
    ))
}

/// Amplitude at screen position `x` behind one slit, by direct quadrature.
/// Slit A is centred at `+x_0`, slit B at `−x_0`.
pub fn propagate_numeric(
    spec: &PacketSpec,
    aperture: &ApertureModel,
    slit: Slit,
    x: f64,
    res: &OracleResolution,
) -> Result<Complex64> {
    let g = &aperture.geometry;
    let centre = slit.center_sign() * g.center_offset;
    let b = g.half_width;
    match aperture.kind {
        ApertureKind::GaussianWeighted => {
            let half = res.support_widths * b;
            let grid = GridSpec::new(centre - half, centre + half, res.points)?;
            integrate_support(spec, x, &grid, |xp| {
                (-(xp - centre).powi(2) / (2.0 * b * b)).exp()
            })
        }
        ApertureKind::HardEdge => {
            let grid = GridSpec::new(centre - b, centre + b, res.points)?;
            integrate_support(spec, x, &grid, |_| 1.0)
        }
    }
}

/// Free propagation through no aperture at all (`w ≡ 1`), integrated over
/// `±half_widths` position spreads of the packet at the slit plane.
pub fn propagate_open(
    spec: &PacketSpec,
    x: f64,
    half_widths: f64,
    points: usize,
) -> Result<Complex64> {
    let half = half_widths * position_spread(spec, spec.times.tau_s);
    let grid = GridSpec::symmetric(half, points)?;
    integrate_support(spec, x, &grid, |_| 1.0)
}

/// `ψ_A + ψ_B` by direct quadrature.
pub fn two_slit_numeric(
    spec: &PacketSpec,
    aperture: &ApertureModel,
    x: f64,
    res: &OracleResolution,
) -> Result<Complex64> {
    Ok(propagate_numeric(spec, aperture, Slit::A, x, res)?
        + propagate_numeric(spec, aperture, Slit::B, x, res)?)
}

/// `min_φ ‖a − e^{iφ} b‖₂ / ‖a‖₂`.
pub fn relative_l2_mod_phase(reference: &[Complex64], other: &[Complex64]) -> f64 {
    let overlap: Complex64 = other.iter().zip(reference).map(|(o, r)| o.conj() * r).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    relative_l2(
        reference,
        &other.iter().map(|o| o * phase).collect::<Vec<_>>(),
    )
}

/// `‖a − b‖₂ / ‖a‖₂`, phases included.
pub fn relative_l2(reference: &[Complex64], other: &[Complex64]) -> f64 {
    let num: f64 = reference
        .iter()
        .zip(other)
        .map(|(r, o)| (r - o).norm_sqr())
        .sum();
    let den: f64 = reference.iter().map(|r| r.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Closed-form `ψ_A + ψ_B` against the numeric Gaussian-aperture integral on
/// `xs`, as relative L² error modulo one global phase.
pub fn slit_oracle_discrepancy(
    spec: &PacketSpec,
    geom: &SlitGeometry,
    mu_time: MuTime,
    xs: &[f64],
    res: &OracleResolution,
) -> Result<f64> {
    let coeffs = SlitCoefficients::new(spec, geom, mu_time);
    let aperture = ApertureModel {
        kind: ApertureKind::GaussianWeighted,
        geometry: *geom,
    };
    let closed: Vec<Complex64> = xs.iter().map(|&x| coeffs.two_slit(x)).collect();
    let numeric = xs
        .iter()
        .map(|&x| two_slit_numeric(spec, &aperture, x, res))
        .collect::<Result<Vec<_>>>()?;
    Ok(relative_l2_mod_phase(&closed, &numeric))
}

/// Relative L² gap between hard-edge and Gaussian-weighted two-slit
/// amplitudes on `xs`, modulo a global phase and after scaling both to unit
/// norm. Diagnostic only.
pub fn hard_edge_discrepancy(
    spec: &PacketSpec,
    geom: &SlitGeometry,
    xs: &[f64],
    res: &OracleResolution,
) -> Result<f64> {
    let eval = |kind| -> Result<Vec<Complex64>> {
        let ap = ApertureModel {
            kind,
            geometry: *geom,
        };
        let v = xs
            .iter()
            .map(|&x| two_slit_numeric(spec, &ap, x, res))
            .collect::<Result<Vec<_>>>()?;
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(v.into_iter().map(|z| z / n).collect())
    };
    Ok(relative_l2_mod_phase(
        &eval(ApertureKind::GaussianWeighted)?,
        &eval(ApertureKind::HardEdge)?,
    ))
}
