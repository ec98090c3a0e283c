//! Two-particle post-slit states and their coincidence densities.
//!
//! The post-slit wave function is `N(a Φ_a + b Φ_b)` with
//! `Φ_a = (ψ_A + ψ_B)(φ_A + φ_B)` and `Φ_b = (φ̄_A + φ̄_B)(χ_A + χ_B)`. Slit
//! passage is not unitary, so each state is renormalized numerically on a
//! truncated square domain.

use num_complex::Complex64;

use crate::entanglement::{overlap_theta, source_normalization_pair};
use crate::error::{Error, Result};
use crate::params::ArrangementConfig;
use crate::quadrature::{integrate_2d_indexed, GridSpec};
use crate::slits::{MuTime, SlitCoefficients};

/// Half width of the default normalization domain, μm.
pub const DEFAULT_DOMAIN_HALF_WIDTH: f64 = 12.0;
/// Default Simpson points per axis for the normalization integral.
pub const DEFAULT_DOMAIN_POINTS: usize = 1201;
/// Largest admissible boundary density relative to the domain peak.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Superposition,
    Mixture,
    ProductA,
    ProductB,
}

impl StateKind {
    pub const ALL: [StateKind; 4] = [
        StateKind::Superposition,
        StateKind::Mixture,
        StateKind::ProductA,
        StateKind::ProductB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Superposition => "superposition",
            StateKind::Mixture => "mixture",
            StateKind::ProductA => "product_a",
            StateKind::ProductB => "product_b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The two product components of the superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// `Φ_a`, built from ψ and φ.
    A,
    /// `Φ_b`, built from φ̄ and χ.
    B,
}

/// Slit coefficients of the four one-particle modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangementAmplitudes {
    pub psi: SlitCoefficients,
    pub varphi: SlitCoefficients,
    pub phi: SlitCoefficients,
    pub chi: SlitCoefficients,
}

impl ArrangementAmplitudes {
    pub fn new(cfg: &ArrangementConfig) -> Self {
        let mt = MuTime::from_flag(cfg.mu_uses_total_time);
        let g = &cfg.geometry;
        Self {
            psi: SlitCoefficients::new(&cfg.psi, g, mt),
            varphi: SlitCoefficients::new(&cfg.varphi, g, mt),
            phi: SlitCoefficients::new(&cfg.phi, g, mt),
            chi: SlitCoefficients::new(&cfg.chi, g, mt),
        }
    }

    pub fn x_factor(&self, which: Component, x: f64) -> Complex64 {
        match which {
            Component::A => self.psi.two_slit(x),
            Component::B => self.varphi.two_slit(x),
        }
    }

    pub fn y_factor(&self, which: Component, y: f64) -> Complex64 {
        match which {
            Component::A => self.phi.two_slit(y),
            Component::B => self.chi.two_slit(y),
        }
    }

    pub fn component(&self, which: Component, x: f64, y: f64) -> Complex64 {
        self.x_factor(which, x) * self.y_factor(which, y)
    }
}

/// `Φ_a(x, y)` or `Φ_b(x, y)` (not normalized).
pub fn component_amplitude(cfg: &ArrangementConfig, which: Component, x: f64, y: f64) -> Complex64 {
    ArrangementAmplitudes::new(cfg).component(which, x, y)
}

/// Normalized post-slit state of a given kind. Carries all three
/// normalization constants so that switching kinds is free.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub kind: StateKind,
    pub config: ArrangementConfig,
    /// 𝒩 of the superposition.
    pub norm_sup: f64,
    /// 𝒩_a = 𝒩(a = 1).
    pub norm_a: f64,
    /// 𝒩_b = 𝒩(b = 1).
    pub norm_b: f64,
    /// N of the prepared state.
    pub source_norm: f64,
    pub amplitudes: ArrangementAmplitudes,
}

/// Default normalization grid, `[-12, 12]` μm with 1201 points.
pub fn default_domain() -> GridSpec {
    GridSpec::symmetric(DEFAULT_DOMAIN_HALF_WIDTH, DEFAULT_DOMAIN_POINTS).expect("valid grid")
}

/// Builds the superposition state on the default domain.
pub fn normalize(cfg: &ArrangementConfig) -> Result<JointState> {
    normalize_on(cfg, &default_domain())
}

/// Builds the superposition state, integrating `∫∫|Φ|²` on `grid × grid`.
pub fn normalize_on(cfg: &ArrangementConfig, grid: &GridSpec) -> Result<JointState> {
    cfg.validate()?;
    let amps = ArrangementAmplitudes::new(cfg);
    let tables = AxisTables::new(&amps, grid);
    let theta_x = overlap_theta(cfg.psi.width, cfg.varphi.width);
    let theta_y = overlap_theta(cfg.phi.width, cfg.chi.width);
    let source_norm = source_normalization_pair(&cfg.coeffs, theta_x, theta_y)?;

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let norm_sup = tables.normalization(cfg.coeffs.a, cfg.coeffs.b, source_norm, grid)?;
    let norm_a = tables.normalization(one, zero, 1.0, grid)?;
    let norm_b = tables.normalization(zero, one, 1.0, grid)?;

    Ok(JointState {
        kind: StateKind::Superposition,
        config: *cfg,
        norm_sup,
        norm_a,
        norm_b,
        source_norm,
        amplitudes: amps,
    })
}

struct AxisTables {
    xa: Vec<Complex64>,
    xb: Vec<Complex64>,
    ya: Vec<Complex64>,
    yb: Vec<Complex64>,
}

impl AxisTables {
    fn new(amps: &ArrangementAmplitudes, grid: &GridSpec) -> Self {
        let pts = grid.points();
        let tab = |f: &dyn Fn(f64) -> Complex64| pts.iter().map(|&p| f(p)).collect::<Vec<_>>();
        Self {
            xa: tab(&|x| amps.x_factor(Component::A, x)),
            xb: tab(&|x| amps.x_factor(Component::B, x)),
            ya: tab(&|y| amps.y_factor(Component::A, y)),
            yb: tab(&|y| amps.y_factor(Component::B, y)),
        }
    }

    /// `N / (∫∫|N(aΦ_a + bΦ_b)|²)^{1/2}` with a truncation check.
    fn normalization(&self, a: Complex64, b: Complex64, n: f64, grid: &GridSpec) -> Result<f64> {
        let density = |i: usize, j: usize| {
            (a * self.xa[i] * self.ya[j] + b * self.xb[i] * self.yb[j]).norm_sqr() * n * n
        };
        let last = grid.n - 1;
        let mut peak = 0.0f64;
        let mut edge = 0.0f64;
        for i in 0..grid.n {
            for j in 0..grid.n {
                let d = density(i, j);
                peak = peak.max(d);
                if i == 0 || j == 0 || i == last || j == last {
                    edge = edge.max(d);
                }
            }
        }
        if peak.is_nan() || peak <= 0.0 {
            return Err(Error::Quadrature("state vanishes on the domain".into()));
        }
        if edge > BOUNDARY_TOLERANCE * peak {
            return Err(Error::Quadrature(
                "domain truncation above tolerance".into(),
            ));
        }
        let total = integrate_2d_indexed(density, grid, grid);
        Ok(n / total.sqrt())
    }
}

impl JointState {
    /// Same normalized arrangement viewed as another state kind.
    pub fn with_kind(&self, kind: StateKind) -> JointState {
        JointState {
            kind,
            ..self.clone()
        }
    }

    pub fn coeffs(&self) -> (Complex64, Complex64) {
        (self.config.coeffs.a, self.config.coeffs.b)
    }

    pub fn component(&self, which: Component, x: f64, y: f64) -> Complex64 {
        self.amplitudes.component(which, x, y)
    }

    /// Coincidence density at `(x, y)` for this state's kind.
    pub fn probability_density(&self, x: f64, y: f64) -> f64 {
        let fa = self.component(Component::A, x, y);
        let fb = self.component(Component::B, x, y);
        self.density_from(fa, fb)
    }

    fn density_from(&self, fa: Complex64, fb: Complex64) -> f64 {
        let (a, b) = self.coeffs();
        match self.kind {
            StateKind::Superposition => (a * fa + b * fb).norm_sqr() * self.norm_sup.powi(2),
            StateKind::Mixture => {
                a.norm_sqr() * self.norm_a.powi(2) * fa.norm_sqr()
                    + b.norm_sqr() * self.norm_b.powi(2) * fb.norm_sqr()
            }
            StateKind::ProductA => self.norm_a.powi(2) * fa.norm_sqr(),
            StateKind::ProductB => self.norm_b.powi(2) * fb.norm_sqr(),
        }
    }

    /// Densities along `xs` at fixed `y`, reusing the y-dependent factors.
    pub fn density_slice(&self, xs: &[f64], y: f64) -> Vec<f64> {
        let ya = self.amplitudes.y_factor(Component::A, y);
        let yb = self.amplitudes.y_factor(Component::B, y);
        xs.iter()
            .map(|&x| {
                let fa = self.amplitudes.x_factor(Component::A, x) * ya;
                let fb = self.amplitudes.x_factor(Component::B, x) * yb;
                self.density_from(fa, fb)
            })
            .collect()
    }

    /// Cross term `2𝒩² Re(a* b Φ_a* Φ_b)` of the superposition density.
    pub fn interference_term(&self, x: f64, y: f64) -> f64 {
        let (a, b) = self.coeffs();
        let fa = self.component(Component::A, x, y);
        let fb = self.component(Component::B, x, y);
        2.0 * self.norm_sup.powi(2) * (a.conj() * b * fa.conj() * fb).re
    }

    /// Direct terms `𝒩²(|a|²|Φ_a|² + |b|²|Φ_b|²)` of the superposition density.
    pub fn direct_terms(&self, x: f64, y: f64) -> f64 {
        let (a, b) = self.coeffs();
        let fa = self.component(Component::A, x, y);
        let fb = self.component(Component::B, x, y);
        self.norm_sup.powi(2) * (a.norm_sqr() * fa.norm_sqr() + b.norm_sqr() * fb.norm_sqr())
    }
}

/// Purity `|a|⁴ + |b|⁴ + 2|a|²|b|² |⟨ψ|φ̄⟩|² |⟨φ|χ⟩|²` of the mixture,
/// overlaps taken at preparation time.
pub fn purity(cfg: &ArrangementConfig) -> f64 {
    let a2 = cfg.coeffs.a.norm_sqr();
    let b2 = cfg.coeffs.b.norm_sqr();
    let tx = overlap_theta(cfg.psi.width, cfg.varphi.width);
    let ty = overlap_theta(cfg.phi.width, cfg.chi.width);
    a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * (tx * tx) * (ty * ty)
}
