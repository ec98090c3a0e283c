//! Entanglement of the prepared (t = 0) two-particle state: one-particle
//! overlap θ, source normalization N and the Schmidt number.

use crate::error::{Error, Result};
use crate::packets::initial_position_amplitude;
use crate::params::{ArrangementConfig, SuperpositionCoeffs};
use crate::quadrature::{
    integrate_2d, integrate_4d_separable, FourDMode, GridSpec, SeparableState, SeparableTerm,
};

/// `⟨ψ|φ⟩` at t = 0 for two normalized real Gaussians of widths σ and σ̄:
/// `(2σσ̄/(σ² + σ̄²))^{1/2}`.
pub fn overlap_theta(sigma: f64, sigma_bar: f64) -> f64 {
    (2.0 * sigma * sigma_bar / (sigma * sigma + sigma_bar * sigma_bar)).sqrt()
}

/// `N = (1 + 2θ² Re(a*b))^{-1/2}`, both one-particle overlaps equal to θ.
pub fn source_normalization(coeffs: &SuperpositionCoeffs, theta: f64) -> Result<f64> {
    source_normalization_pair(coeffs, theta, theta)
}

/// General form `N = (1 + 2 Re(a*b ⟨ψ|φ̄⟩⟨φ|χ⟩))^{-1/2}` with real overlaps.
pub fn source_normalization_pair(
    coeffs: &SuperpositionCoeffs,
    theta_x: f64,
    theta_y: f64,
) -> Result<f64> {
    let radicand = 1.0 + 2.0 * (coeffs.a.conj() * coeffs.b).re * theta_x * theta_y;
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(Error::Entanglement("degenerate normalization".into()));
    }
    Ok(radicand.powf(-0.5))
}

/// Closed-form Schmidt number for real `a`, `b` with `a² + b² = 1`:
/// `S = (1 + 2abθ²)² / (a⁴ + b⁴ + 4abθ² + 2a²b²θ²(2 + θ²))`.
pub fn schmidt_closed_form(a: f64, b: f64, theta: f64) -> Result<f64> {
    if ((a * a + b * b) - 1.0).abs() > 1e-12 {
        return Err(Error::Entanglement(format!(
            "coefficients must satisfy a² + b² = 1 (got {})",
            a * a + b * b
        )));
    }
    let t2 = theta * theta;
    let num = (1.0 + 2.0 * a * b * t2).powi(2);
    let den = a.powi(4) + b.powi(4) + 4.0 * a * b * t2 + 2.0 * a * a * b * b * t2 * (2.0 + t2);
    Ok(num / den)
}

/// [`schmidt_closed_form`] for a coefficient pair; complex values are rejected.
pub fn schmidt_closed_form_coeffs(coeffs: &SuperpositionCoeffs, theta: f64) -> Result<f64> {
    if !coeffs.is_real() {
        return Err(Error::Entanglement(
            "closed-form Schmidt number needs real coefficients".into(),
        ));
    }
    schmidt_closed_form(coeffs.a.re, coeffs.b.re, theta)
}

/// Integration grid wide enough for the narrowest t = 0 packet of `cfg`.
pub fn default_schmidt_grid(cfg: &ArrangementConfig) -> GridSpec {
    let narrowest = [
        cfg.psi.width,
        cfg.varphi.width,
        cfg.phi.width,
        cfg.chi.width,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    GridSpec::symmetric(12.0 / narrowest, 2001).expect("valid grid")
}

/// The prepared state `N(a ψ(x)φ(y) + b φ̄(x)χ(y))` at t = 0.
pub fn initial_state(cfg: &ArrangementConfig) -> Result<SeparableState<'static>> {
    let theta_x = overlap_theta(cfg.psi.width, cfg.varphi.width);
    let theta_y = overlap_theta(cfg.phi.width, cfg.chi.width);
    let n = source_normalization_pair(&cfg.coeffs, theta_x, theta_y)?;
    let (psi, varphi, phi, chi) = (cfg.psi, cfg.varphi, cfg.phi, cfg.chi);
    Ok(SeparableState {
        terms: vec![
            SeparableTerm {
                coeff: cfg.coeffs.a * n,
                x_factor: Box::new(move |x| initial_position_amplitude(&psi, x)),
                y_factor: Box::new(move |y| initial_position_amplitude(&phi, y)),
            },
            SeparableTerm {
                coeff: cfg.coeffs.b * n,
                x_factor: Box::new(move |x| initial_position_amplitude(&varphi, x)),
                y_factor: Box::new(move |y| initial_position_amplitude(&chi, y)),
            },
        ],
    })
}

/// Schmidt number of the prepared state from the quadruple overlap integral.
///
/// Works for complex coefficients and for `ξ ≠ σ`. The result is divided by
/// `(∫∫|Ψ|²)²` evaluated along the same route, so quadrature error in the
/// norm does not leak into S.
pub fn schmidt_integral(cfg: &ArrangementConfig, grid: &GridSpec, mode: FourDMode) -> Result<f64> {
    let state = initial_state(cfg)?;
    let inv = integrate_4d_separable(&state, grid, mode)?;
    let norm = match mode {
        FourDMode::Factorized => state.norm_sqr(grid),
        FourDMode::Direct => integrate_2d(|x, y| state.eval(x, y).norm_sqr(), grid, grid),
    };
    Ok(norm * norm / inv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// Overlap of the particle-x modes.
    pub theta: f64,
    /// Overlap of the particle-y modes; equals `theta` when ξ = σ, ξ̄ = σ̄.
    pub theta_y: f64,
    pub source_norm: f64,
    pub schmidt: f64,
    pub purity: f64,
}

pub fn report(cfg: &ArrangementConfig) -> Result<EntanglementReport> {
    let theta = overlap_theta(cfg.psi.width, cfg.varphi.width);
    let theta_y = overlap_theta(cfg.phi.width, cfg.chi.width);
    let source_norm = source_normalization_pair(&cfg.coeffs, theta, theta_y)?;
    let schmidt = if cfg.coeffs.is_real() && theta == theta_y {
        schmidt_closed_form_coeffs(&cfg.coeffs, theta)?
    } else {
        schmidt_integral(cfg, &default_schmidt_grid(cfg), FourDMode::Factorized)?
    };
    Ok(EntanglementReport {
        theta,
        theta_y,
        source_norm,
        schmidt,
        purity: crate::joint::purity(cfg),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary `a` (with `b = √(1 − a²)`) at fixed θ.
    A,
    /// Vary θ at fixed `a`.
    Theta,
}

/// Samples the closed-form Schmidt number along one axis. Values on either
/// axis are restricted to `[0, 1]`.
pub fn schmidt_sweep(axis: SweepAxis, fixed: f64, values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let in_unit = |v: f64| (0.0..=1.0).contains(&v);
    if !in_unit(fixed) {
        return Err(Error::Entanglement(format!(
            "sweep value {fixed} outside [0, 1]"
        )));
    }
    values
        .iter()
        .map(|&v| {
            if !in_unit(v) {
                return Err(Error::Entanglement(format!(
                    "sweep value {v} outside [0, 1]"
                )));
            }
            let (a, theta) = match axis {
                SweepAxis::A => (v, fixed),
                SweepAxis::Theta => (fixed, v),
            };
            let b = (1.0 - a * a).max(0.0).sqrt();
            Ok((v, schmidt_closed_form(a, b, theta)?))
        })
        .collect()
}

/// `n` evenly spaced values on `[lo, hi]`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::paper_defaults;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    // Purity of the reduced state computed in the non-orthogonal {ψ, φ̄}
    // basis from the Gram matrix, independent of the closed form.
    fn gram_oracle(a: f64, theta: f64) -> f64 {
        let b = (1.0 - a * a).sqrt();
        let n2 = 1.0 / (1.0 + 2.0 * a * b * theta * theta);
        let g = [[1.0, theta], [theta, 1.0]];
        let m = [[a, 0.0], [0.0, b]];
        let mul = |p: [[f64; 2]; 2], q: [[f64; 2]; 2]| {
            let mut r = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
                }
            }
            r
        };
        let mut r = mul(mul(m, g), m);
        for row in r.iter_mut() {
            for v in row.iter_mut() {
                *v *= n2;
            }
        }
        let p = mul(mul(mul(r, g), r), g);
        1.0 / (p[0][0] + p[1][1])
    }

    #[test]
    fn theta_values() {
        assert_eq!(overlap_theta(2.5, 2.5), 1.0);
        let t = overlap_theta(1.0, 6.0);
        assert!((t - (12.0f64 / 37.0).sqrt()).abs() < 1e-15);
        assert!((t - 0.5695).abs() < 1e-4);
        assert_eq!(overlap_theta(1.0, 6.0), overlap_theta(6.0, 1.0));
        assert!(overlap_theta(1.0, 1e12) < 1e-5);
    }

    #[test]
    fn source_norm_values() {
        let t = overlap_theta(1.0, 6.0);
        let one = SuperpositionCoeffs::from_real_a(1.0).unwrap();
        assert_eq!(source_normalization(&one, t).unwrap(), 1.0);
        let c = SuperpositionCoeffs::from_real_a(0.3).unwrap();
        let n = source_normalization(&c, t).unwrap();
        assert!((n - 0.9184).abs() < 1e-4, "{n}");
        assert_eq!(source_normalization(&c, 0.0).unwrap(), 1.0);
        // 4σσ̄/(σ² + σ̄²) = 2θ²
        let direct = (1.0 + 4.0 * 6.0 / 37.0 * 0.3 * 0.91f64.sqrt()).powf(-0.5);
        assert!((n - direct).abs() < 1e-15);
        let bad = SuperpositionCoeffs {
            a: Complex64::new(FRAC_1_SQRT_2, 0.0),
            b: Complex64::new(-FRAC_1_SQRT_2, 0.0),
        };
        assert_eq!(
            source_normalization(&bad, 1.0).unwrap_err().to_string(),
            "entanglement: degenerate normalization"
        );
    }

    #[test]
    fn source_norm_normalizes_prepared_state() {
        let cfg = paper_defaults();
        let st = initial_state(&cfg).unwrap();
        let g = GridSpec::symmetric(12.0, 801).unwrap();
        let n = integrate_2d(|x, y| st.eval(x, y).norm_sqr(), &g, &g);
        assert!((n - 1.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn schmidt_special_values() {
        for t in [0.0, 0.3, 0.6, 1.0] {
            assert_eq!(schmidt_closed_form(0.0, 1.0, t).unwrap(), 1.0);
            assert_eq!(schmidt_closed_form(1.0, 0.0, t).unwrap(), 1.0);
        }
        let s = schmidt_closed_form(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
        let t = overlap_theta(1.0, 6.0);
        let s3 = schmidt_closed_form(0.3, 0.91f64.sqrt(), t).unwrap();
        let s7 = schmidt_closed_form(0.7, 0.51f64.sqrt(), t).unwrap();
        assert!((s3 - 1.056).abs() < 5e-4, "{s3}");
        assert!((s7 - 1.150).abs() < 5e-4, "{s7}");
        assert!(schmidt_closed_form(0.5, 0.5, 0.2).is_err());
    }

    #[test]
    fn closed_form_matches_gram_oracle() {
        for i in 0..=20 {
            let a = i as f64 / 20.0;
            for j in 0..=10 {
                let t = j as f64 / 10.0;
                let b = (1.0 - a * a).sqrt();
                let s = schmidt_closed_form(a, b, t).unwrap();
                assert!((s - gram_oracle(a, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_coefficients_rejected_by_closed_form() {
        let c = SuperpositionCoeffs {
            a: Complex64::new(0.0, 0.6),
            b: Complex64::new(0.8, 0.0),
        };
        assert!(schmidt_closed_form_coeffs(&c, 0.5).is_err());
        let cfg = paper_defaults().with_coeffs(c).unwrap();
        let s = schmidt_integral(&cfg, &default_schmidt_grid(&cfg), FourDMode::Factorized).unwrap();
        assert!(s >= 1.0);
    }

    #[test]
    fn integral_limits() {
        let cfg = paper_defaults().with_real_a(1.0).unwrap();
        let g = default_schmidt_grid(&cfg);
        let s = schmidt_integral(&cfg, &g, FourDMode::Factorized).unwrap();
        assert!((s - 1.0).abs() < 1e-8);

        let mut cfg = paper_defaults().with_real_a(FRAC_1_SQRT_2).unwrap();
        cfg.varphi.width = cfg.psi.width;
        cfg.chi.width = cfg.phi.width;
        let s = schmidt_integral(&cfg, &default_schmidt_grid(&cfg), FourDMode::Factorized).unwrap();
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn report_at_defaults() {
        let r = report(&paper_defaults()).unwrap();
        assert_eq!(r.theta, r.theta_y);
        assert!((r.purity - 0.85).abs() < 0.005);
        assert!(r.schmidt > 1.0);
    }

    #[test]
    fn sweep_axes() {
        let grid = linspace(0.0, 1.0, 1001);
        let curve = schmidt_sweep(SweepAxis::A, 0.0, &grid).unwrap();
        let (amax, smax) = curve
            .iter()
            .cloned()
            .fold((0.0, 0.0), |m, p| if p.1 > m.1 { p } else { m });
        assert!((amax - FRAC_1_SQRT_2).abs() < 1e-3);
        assert!((smax - 2.0).abs() < 1e-5);
        assert!(schmidt_sweep(SweepAxis::Theta, 1.2, &grid).is_err());
        assert!(schmidt_sweep(SweepAxis::A, 0.5, &[1.5]).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 3.0, 31);
        assert_eq!(v.len(), 31);
        assert_eq!(v[30], 3.0);
        assert!((v[9] - 0.9).abs() < 1e-15);
    }
}
