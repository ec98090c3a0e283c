//! Closed-form post-slit amplitudes in the Gaussian slit approximation.
//!
//! A packet freely evolved to the slit plane is weighted by
//! `exp(−(x' ∓ x_0)²/2b_s²)` and propagated to the screen with the free
//! kernel. The Gaussian integral over `x'` gives
//!
//! ```text
//! ψ_{A,B}(x) = C · e^{i x²/2τ_f} · e^{−(α − iβ)x²} · e^{∓(δ + iγ)x}
//! ```
//!
//! Slit A is the aperture centred at `+x_0` (upper sign), slit B the one at
//! `−x_0`. Since `δ < 0`, each amplitude leans towards its own slit.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::params::{PacketSpec, SlitGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slit {
    A,
    B,
}

impl Slit {
    /// Sign multiplying `(δ + iγ)x` in the exponent.
    pub fn sign(self) -> f64 {
        match self {
            Slit::A => -1.0,
            Slit::B => 1.0,
        }
    }

    /// Position of the aperture centre in units of `x_0`.
    pub fn center_sign(self) -> f64 {
        -self.sign()
    }
}

/// Which reduced time enters the spreading factor μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuTime {
    /// ħt_s/m, the time of arrival at the slits.
    #[default]
    SlitArrival,
    /// ħt/m for the whole flight.
    Total,
}

impl MuTime {
    pub fn from_flag(total: bool) -> Self {
        if total {
            MuTime::Total
        } else {
            MuTime::SlitArrival
        }
    }
}

/// Coefficient bundle of one post-slit amplitude. Reduced units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitCoefficients {
    pub c: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub mu: f64,
    /// `1/(2τ_f)`, curvature of the common quadratic phase.
    pub phase_curvature: f64,
}

impl SlitCoefficients {
    pub fn new(spec: &PacketSpec, geom: &SlitGeometry, mu_time: MuTime) -> Self {
        let s = spec.width;
        let s2 = s * s;
        let s4 = s2 * s2;
        let tau_s = spec.times.tau_s;
        let tau_f = spec.times.tau_f;
        let b2 = geom.half_width * geom.half_width;
        let x0 = geom.center_offset;

        let t_mu = match mu_time {
            MuTime::SlitArrival => tau_s,
            MuTime::Total => spec.times.total(),
        };
        let mu = 2.0 * (1.0 + s4 * t_mu * t_mu);
        let d = 1.0 / (2.0 * b2) + s2 / mu;
        let f = -s4 * tau_s / mu - 1.0 / (2.0 * tau_f);
        let g = x0 / b2;
        let h = 1.0 / tau_f;
        let e = d * d + f * f;

        let i = Complex64::i();
        let first = Complex64::new(1.0 / s, s * tau_s).powf(-0.5);
        let second = (1.0 / (2.0 * i * tau_f * Complex64::new(d, f))).sqrt();
        let gauss = (-x0 * x0 / (2.0 * b2)).exp();
        let shift = (g * g * Complex64::new(d, -f) / (4.0 * e)).exp();
        let c = PI.powf(-0.25) * first * second * gauss * shift;

        Self {
            c,
            alpha: d * h * h / (4.0 * e),
            beta: f * h * h / (4.0 * e),
            gamma: d * g * h / (2.0 * e),
            delta: g * h * f / (2.0 * e),
            d,
            f,
            g,
            h,
            mu,
            phase_curvature: 1.0 / (2.0 * tau_f),
        }
    }

    /// Amplitude behind one slit at screen position `x`.
    pub fn amplitude(&self, slit: Slit, x: f64) -> Complex64 {
        let lin = Complex64::new(self.delta, self.gamma) * (slit.sign() * x);
        self.c * (self.quadratic_exponent(x) + lin).exp()
    }

    /// `ψ_A(x) + ψ_B(x)`.
    pub fn two_slit(&self, x: f64) -> Complex64 {
        let common = self.c * self.quadratic_exponent(x).exp();
        let z = Complex64::new(self.delta, self.gamma) * x;
        common * (z.exp() + (-z).exp())
    }

    fn quadratic_exponent(&self, x: f64) -> Complex64 {
        let x2 = x * x;
        Complex64::new(-self.alpha * x2, (self.phase_curvature + self.beta) * x2)
    }

    /// Triangle-inequality bound `2|C| exp(−αx² + |δ||x|)` on `|ψ_A + ψ_B|`.
    pub fn envelope_bound(&self, x: f64) -> f64 {
        2.0 * self.c.norm() * (-self.alpha * x * x + self.delta.abs() * x.abs()).exp()
    }
}

pub fn slit_coefficients(spec: &PacketSpec, geom: &SlitGeometry) -> SlitCoefficients {
    SlitCoefficients::new(spec, geom, MuTime::SlitArrival)
}

pub fn slit_amplitude(coeffs: &SlitCoefficients, slit: Slit, x: f64) -> Complex64 {
    coeffs.amplitude(slit, x)
}

pub fn two_slit_amplitude(coeffs: &SlitCoefficients, x: f64) -> Complex64 {
    coeffs.two_slit(x)
}
