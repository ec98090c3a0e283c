//! Physical parameter model.
//!
//! Everything is expressed in reduced units: lengths in μm, packet widths in
//! μm⁻¹ and times as the combination ħ·t/m in μm². Time and mass never enter
//! the Gaussian evolution formulas in any other form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|a|² + |b|² = 1` for a constructed [`SuperpositionCoeffs`].
pub const COEFF_NORM_TOL: f64 = 1e-12;
/// Config documents within this distance of unit norm are renormalized on load.
pub const COEFF_RENORM_TOL: f64 = 1e-6;

/// Reduced flight times of one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleTimes {
    /// ħ·t_s/m: source to slit plane, μm².
    pub tau_s: f64,
    /// ħ·(t − t_s)/m: slit plane to detection screen, μm².
    pub tau_f: f64,
}

impl ParticleTimes {
    pub fn new(tau_s: f64, tau_f: f64) -> Result<Self> {
        let t = Self { tau_s, tau_f };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_s > 0.0 && self.tau_s.is_finite()) {
            return Err(Error::Invariant(format!("tau_s > 0 (got {})", self.tau_s)));
        }
        if !(self.tau_f > 0.0 && self.tau_f.is_finite()) {
            return Err(Error::Invariant(format!("tau_f > 0 (got {})", self.tau_f)));
        }
        Ok(())
    }

    /// ħ·t/m for the whole flight.
    pub fn total(&self) -> f64 {
        self.tau_s + self.tau_f
    }
}

/// One single-particle Gaussian mode together with its particle's flight times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    /// Momentum-space width σ, μm⁻¹.
    pub width: f64,
    pub times: ParticleTimes,
}

impl PacketSpec {
    pub fn new(width: f64, times: ParticleTimes) -> Result<Self> {
        let p = Self { width, times };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Invariant(format!("width > 0 (got {})", self.width)));
        }
        self.times.validate()
    }
}

/// Two slits of width `2·half_width` centred at `±center_offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitGeometry {
    /// b_s, μm.
    pub half_width: f64,
    /// x_0, μm.
    pub center_offset: f64,
}

impl SlitGeometry {
    pub fn new(half_width: f64, center_offset: f64) -> Result<Self> {
        let g = Self {
            half_width,
            center_offset,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::Invariant(format!(
                "slit half width > 0 (got {})",
                self.half_width
            )));
        }
        if !(self.center_offset > self.half_width && self.center_offset.is_finite()) {
            return Err(Error::Invariant(format!(
                "slit centre offset > half width (got x0={}, b_s={})",
                self.center_offset, self.half_width
            )));
        }
        Ok(())
    }
}

/// Coefficients `a`, `b` of the two-term superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionCoeffs {
    pub a: Complex64,
    pub b: Complex64,
}

impl SuperpositionCoeffs {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let c = Self { a, b };
        c.validate()?;
        Ok(c)
    }

    /// Real `a` with `b = +√(1 − a²)`.
    pub fn from_real_a(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Invariant(format!(
                "coefficient a in [0, 1] (got {a})"
            )));
        }
        Ok(Self {
            a: Complex64::new(a, 0.0),
            b: Complex64::new((1.0 - a * a).max(0.0).sqrt(), 0.0),
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::Invariant("coefficient finiteness".into()));
        }
        if (self.norm_sqr() - 1.0).abs() > COEFF_NORM_TOL {
            return Err(Error::Invariant("coefficient normalization".into()));
        }
        Ok(())
    }

    /// Both coefficients are real (imaginary parts exactly zero).
    pub fn is_real(&self) -> bool {
        self.a.im == 0.0 && self.b.im == 0.0
    }
}

/// Full arrangement: slits, the four one-particle modes and the superposition.
///
/// `psi` and `varphi` belong to particle x (terms `a` and `b`), `phi` and
/// `chi` to particle y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangementConfig {
    pub geometry: SlitGeometry,
    pub psi: PacketSpec,
    pub varphi: PacketSpec,
    pub phi: PacketSpec,
    pub chi: PacketSpec,
    pub coeffs: SuperpositionCoeffs,
    /// Use the total flight time instead of the slit arrival time in the
    /// spreading factor μ of the post-slit coefficients.
    pub mu_uses_total_time: bool,
}

impl ArrangementConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        for p in [&self.psi, &self.varphi, &self.phi, &self.chi] {
            p.validate()?;
        }
        self.coeffs.validate()?;
        if self.psi.times != self.varphi.times {
            return Err(Error::Invariant(
                "particle x modes share flight times".into(),
            ));
        }
        if self.phi.times != self.chi.times {
            return Err(Error::Invariant(
                "particle y modes share flight times".into(),
            ));
        }
        Ok(())
    }

    /// Copy with real `a` and `b = +√(1 − a²)`.
    pub fn with_real_a(&self, a: f64) -> Result<Self> {
        Ok(Self {
            coeffs: SuperpositionCoeffs::from_real_a(a)?,
            ..*self
        })
    }

    pub fn with_coeffs(&self, coeffs: SuperpositionCoeffs) -> Result<Self> {
        coeffs.validate()?;
        Ok(Self { coeffs, ..*self })
    }

    /// Serializes to the `key = value` document accepted by [`load_config`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("b_s", fmt_f64(self.geometry.half_width));
        kv("x0", fmt_f64(self.geometry.center_offset));
        kv("tau_s_1", fmt_f64(self.psi.times.tau_s));
        kv("tau_f_1", fmt_f64(self.psi.times.tau_f));
        kv("tau_s_2", fmt_f64(self.phi.times.tau_s));
        kv("tau_f_2", fmt_f64(self.phi.times.tau_f));
        kv("sigma", fmt_f64(self.psi.width));
        kv("sigma_bar", fmt_f64(self.varphi.width));
        kv("xi", fmt_f64(self.phi.width));
        kv("xi_bar", fmt_f64(self.chi.width));
        kv("a", fmt_complex(self.coeffs.a));
        kv("b", fmt_complex(self.coeffs.b));
        kv("mu_uses_total_time", self.mu_uses_total_time.to_string());
        s
    }
}

// Shortest representation that parses back to the same f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        format!("{:?},{:?}", z.re, z.im)
    }
}

/// Parameter set used for every figure: b_s = 0.1 μm, x_0 = 0.4 μm,
/// particle 1 with ħt_s/m₁ = 0.33 μm² and ħ(t−t_s)/m₁ = 0.2 μm², particle 2
/// 0.9 times lighter in reduced units, σ = ξ = 1 μm⁻¹, σ̄ = ξ̄ = 6 μm⁻¹, a = 0.3.
pub fn paper_defaults() -> ArrangementConfig {
    let p1 = ParticleTimes {
        tau_s: 0.33,
        tau_f: 0.2,
    };
    let p2 = ParticleTimes {
        tau_s: 0.33 / 0.9,
        tau_f: 0.2 / 0.9,
    };
    let (sigma, sigma_bar) = (1.0, 6.0);
    ArrangementConfig {
        geometry: SlitGeometry {
            half_width: 0.1,
            center_offset: 0.4,
        },
        psi: PacketSpec {
            width: sigma,
            times: p1,
        },
        varphi: PacketSpec {
            width: sigma_bar,
            times: p1,
        },
        phi: PacketSpec {
            width: sigma,
            times: p2,
        },
        chi: PacketSpec {
            width: sigma_bar,
            times: p2,
        },
        coeffs: SuperpositionCoeffs::from_real_a(0.3).expect("0.3 is in range"),
        mu_uses_total_time: false,
    }
}

pub const REQUIRED_KEYS: [&str; 12] = [
    "b_s",
    "x0",
    "tau_s_1",
    "tau_f_1",
    "tau_s_2",
    "tau_f_2",
    "sigma",
    "sigma_bar",
    "xi",
    "xi_bar",
    "a",
    "b",
];

/// Parses a flat `key = value` document (`#` starts a comment).
///
/// `a` and `b` are reals, or `re,im` pairs for complex values; `b` may be the
/// literal `auto`, meaning `+√(1 − |a|²)`. Coefficients off unit norm by less
/// than [`COEFF_RENORM_TOL`] are rescaled; beyond that loading fails.
pub fn load_config(source: &str) -> Result<ArrangementConfig> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key {k}")));
        }
    }
    for key in REQUIRED_KEYS {
        if !map.contains_key(key) {
            return Err(Error::MissingKey(key.to_string()));
        }
    }
    let real = |k: &str| -> Result<f64> {
        let v = &map[k];
        v.parse::<f64>()
            .map_err(|_| Error::Parse(format!("{k}: not a number: {v}")))
    };

    let geometry = SlitGeometry::new(real("b_s")?, real("x0")?)?;
    let p1 = ParticleTimes::new(real("tau_s_1")?, real("tau_f_1")?)?;
    let p2 = ParticleTimes::new(real("tau_s_2")?, real("tau_f_2")?)?;
    let psi = PacketSpec::new(real("sigma")?, p1)?;
    let varphi = PacketSpec::new(real("sigma_bar")?, p1)?;
    let phi = PacketSpec::new(real("xi")?, p2)?;
    let chi = PacketSpec::new(real("xi_bar")?, p2)?;

    let a = parse_complex("a", &map["a"])?;
    let b = if map["b"].eq_ignore_ascii_case("auto") {
        let rest = 1.0 - a.norm_sqr();
        if rest < -COEFF_RENORM_TOL {
            return Err(Error::Invariant("coefficient normalization".into()));
        }
        Complex64::new(rest.max(0.0).sqrt(), 0.0)
    } else {
        parse_complex("b", &map["b"])?
    };
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if !norm.is_finite() || (norm * norm - 1.0).abs() > COEFF_RENORM_TOL {
        return Err(Error::Invariant("coefficient normalization".into()));
    }
    let coeffs = if (norm * norm - 1.0).abs() <= COEFF_NORM_TOL {
        SuperpositionCoeffs::new(a, b)?
    } else {
        SuperpositionCoeffs::new(a / norm, b / norm)?
    };

    let mu_uses_total_time = match map.get("mu_uses_total_time").map(String::as_str) {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => {
            return Err(Error::Parse(format!(
                "mu_uses_total_time: expected true or false, got {other}"
            )))
        }
    };

    let cfg = ArrangementConfig {
        geometry,
        psi,
        varphi,
        phi,
        chi,
        coeffs,
        mu_uses_total_time,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_complex(key: &str, v: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("{key}: not a number: {v}"));
    match v.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(v.parse().map_err(|_| bad())?, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DEFAULT_DOC: &str = "\
# figure parameter set
b_s = 0.1
x0 = 0.4
tau_s_1 = 0.33
tau_f_1 = 0.2
tau_s_2 = 0.3666666666666667
tau_f_2 = 0.22222222222222224
sigma = 1
sigma_bar = 6
xi = 1
xi_bar = 6
a = 0.3
b = auto
";

    #[test]
    fn loads_default_document() {
        let cfg = load_config(DEFAULT_DOC).unwrap();
        assert_eq!(cfg.geometry.half_width, 0.1);
        assert_eq!(cfg.geometry.center_offset, 0.4);
        assert_eq!(cfg.psi.times.tau_s, 0.33);
        assert_eq!(cfg.psi.times.tau_f, 0.2);
        assert!((cfg.phi.times.tau_s - 0.33 / 0.9).abs() < 1e-15);
        assert!((cfg.phi.times.tau_f - 0.2 / 0.9).abs() < 1e-15);
        assert_eq!((cfg.psi.width, cfg.varphi.width), (1.0, 6.0));
        assert_eq!((cfg.phi.width, cfg.chi.width), (1.0, 6.0));
        assert_eq!(cfg.coeffs.a.re, 0.3);
        assert!((cfg.coeffs.b.re - 0.91f64.sqrt()).abs() < 1e-15);
        assert_eq!(cfg, paper_defaults());
    }

    #[test]
    fn product_state_document() {
        let doc = DEFAULT_DOC
            .replace("a = 0.3", "a = 1")
            .replace("b = auto", "b = 0");
        let cfg = load_config(&doc).unwrap();
        assert_eq!(cfg.coeffs.a.re, 1.0);
        assert_eq!(cfg.coeffs.b.norm(), 0.0);
    }

    #[test]
    fn rejects_unnormalized_coefficients() {
        // |a|² + |b|² = 0.2 + 1.0 = 1.2
        let doc = DEFAULT_DOC
            .replace("a = 0.3", &format!("a = {}", 0.2f64.sqrt()))
            .replace("b = auto", "b = 1");
        let err = load_config(&doc).unwrap_err();
        assert_eq!(
            err.to_string(),
            "config: invariant coefficient normalization"
        );
    }

    #[test]
    fn renormalizes_small_drift() {
        let doc = DEFAULT_DOC.replace("b = auto", "b = 0.9539392");
        let cfg = load_config(&doc).unwrap();
        assert!((cfg.coeffs.norm_sqr() - 1.0).abs() < COEFF_NORM_TOL);
    }

    #[test]
    fn missing_key_is_named() {
        let doc = DEFAULT_DOC.replace("xi_bar = 6\n", "");
        assert_eq!(
            load_config(&doc).unwrap_err().to_string(),
            "config: missing xi_bar"
        );
    }

    #[test]
    fn geometry_invariant() {
        let doc = DEFAULT_DOC.replace("x0 = 0.4", "x0 = 0.05");
        assert!(matches!(load_config(&doc), Err(Error::Invariant(_))));
        let doc = DEFAULT_DOC.replace("sigma = 1", "sigma = -1");
        assert!(matches!(load_config(&doc), Err(Error::Invariant(_))));
    }

    #[test]
    fn complex_coefficients_parse() {
        let doc = DEFAULT_DOC
            .replace("a = 0.3", "a = 0,0.6")
            .replace("b = auto", "b = 0.8");
        let cfg = load_config(&doc).unwrap();
        assert_eq!(cfg.coeffs.a, Complex64::new(0.0, 0.6));
        assert!(!cfg.coeffs.is_real());
    }

    #[test]
    fn defaults_satisfy_invariants() {
        let cfg = paper_defaults();
        cfg.validate().unwrap();
        assert_eq!(cfg.varphi.width, cfg.chi.width);
        assert_eq!(cfg.psi.width, cfg.phi.width);
        assert!((cfg.phi.times.tau_s - 0.366_666_666_666_666_6).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn config_round_trips(
            b_s in 0.01f64..1.0,
            gap in 0.01f64..2.0,
            ts1 in 0.01f64..2.0, tf1 in 0.01f64..2.0,
            ts2 in 0.01f64..2.0, tf2 in 0.01f64..2.0,
            w in proptest::array::uniform4(0.1f64..10.0),
            a in 0.0f64..=1.0,
            phase in 0.0f64..std::f64::consts::TAU,
            total in any::<bool>(),
        ) {
            let mut cfg = paper_defaults();
            cfg.geometry = SlitGeometry::new(b_s, b_s + gap).unwrap();
            let p1 = ParticleTimes::new(ts1, tf1).unwrap();
            let p2 = ParticleTimes::new(ts2, tf2).unwrap();
            cfg.psi = PacketSpec::new(w[0], p1).unwrap();
            cfg.varphi = PacketSpec::new(w[1], p1).unwrap();
            cfg.phi = PacketSpec::new(w[2], p2).unwrap();
            cfg.chi = PacketSpec::new(w[3], p2).unwrap();
            let b = (1.0 - a * a).sqrt();
            cfg.coeffs = SuperpositionCoeffs {
                a: Complex64::new(a, 0.0),
                b: Complex64::from_polar(b, phase),
            };
            cfg.mu_uses_total_time = total;
            let back = load_config(&cfg.to_config_string()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
