//! Coincidence patterns `P(x)` at a fixed second detector and their analytics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::joint::{JointState, StateKind};
use crate::params::ArrangementConfig;
use crate::quadrature::GridSpec;

/// Default pattern grid, `[-4, 4]` μm with 1601 points.
pub fn default_pattern_grid() -> GridSpec {
    GridSpec::symmetric(4.0, 1601).expect("valid grid")
}

/// Extrema with heights below this fraction of the pattern maximum are noise.
pub const EXTREMUM_FLOOR: f64 = 1e-12;

/// Half width of the region compared by [`SeparationMetric::SupWindow`], μm.
pub const SUP_WINDOW_HALF_WIDTH: f64 = 1.0;

/// Sampled `P(x)` at fixed `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub y_fixed: f64,
    pub kind: StateKind,
    pub grid: GridSpec,
    pub config: ArrangementConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Sub-grid position from the parabola through the extremal triple.
    pub x: f64,
    pub height: f64,
    /// Index of the discrete extremum.
    pub index: usize,
}

/// Interior extrema of a sampled curve, sorted by position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

impl PeakSet {
    /// Maximum closest to `x = 0`.
    pub fn central_maximum(&self) -> Option<Extremum> {
        self.maxima
            .iter()
            .copied()
            .min_by(|p, q| p.x.abs().total_cmp(&q.x.abs()))
    }
}

pub fn pattern(state: &JointState, y_fixed: f64, grid: &GridSpec) -> Pattern {
    let xs = grid.points();
    let values: Vec<f64> = xs
        .par_chunks(256)
        .flat_map_iter(|chunk| state.density_slice(chunk, y_fixed))
        .collect();
    Pattern {
        xs,
        values,
        y_fixed,
        kind: state.kind,
        grid: *grid,
        config: state.config,
    }
}

pub fn find_peaks(p: &Pattern) -> Result<PeakSet> {
    find_extrema(&p.xs, &p.values)
}

/// Interior local extrema by three-point comparison, refined by the vertex of
/// the parabola through each extremal triple.
pub fn find_extrema(xs: &[f64], values: &[f64]) -> Result<PeakSet> {
    if xs.len() != values.len() {
        return Err(Error::Pattern(
            "positions and values differ in length".into(),
        ));
    }
    if values.len() < 5 {
        return Err(Error::Pattern("need at least 5 samples".into()));
    }
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = EXTREMUM_FLOOR * top.abs();

    // (is_max, extremum) in position order
    let mut found: Vec<(bool, Extremum)> = Vec::new();
    for i in 1..values.len() - 1 {
        let (l, c, r) = (values[i - 1], values[i], values[i + 1]);
        let is_max = c > l && c >= r;
        let is_min = c < l && c <= r;
        if !(is_max || is_min) {
            continue;
        }
        if is_max && c < floor {
            continue;
        }
        let e = refine(xs, values, i);
        match found.last_mut() {
            // two of a kind in a row after a dropped extremum: keep the extreme one
            Some((last_max, last)) if *last_max == is_max => {
                if (is_max && e.height > last.height) || (!is_max && e.height < last.height) {
                    *last = e;
                }
            }
            _ => found.push((is_max, e)),
        }
    }
    if found.is_empty() {
        return Err(Error::Pattern("no interior extrema".into()));
    }
    let mut set = PeakSet::default();
    for (is_max, e) in found {
        if is_max {
            set.maxima.push(e);
        } else {
            set.minima.push(e);
        }
    }
    Ok(set)
}

fn refine(xs: &[f64], ys: &[f64], i: usize) -> Extremum {
    let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a == 0.0 || !a.is_finite() {
        return Extremum {
            x: x1,
            height: y1,
            index: i,
        };
    }
    let xv = -b / (2.0 * a);
    // evaluate through the Lagrange form to avoid cancellation in c − b²/4a
    let yv = y0 * (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    Extremum {
        x: xv.clamp(x0, x2),
        height: yv,
        index: i,
    }
}

/// Which fringes enter a visibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisibilityWindow {
    /// The given (odd) number of maxima closest to the centre, with the
    /// minima between and immediately around them.
    Central(usize),
    /// The whole sampled pattern: global maximum against global minimum.
    All,
}

impl std::str::FromStr for VisibilityWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(VisibilityWindow::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k % 2 == 1 => Ok(VisibilityWindow::Central(k)),
            _ => Err(Error::Pattern(format!("bad visibility window {s}"))),
        }
    }
}

/// Fringe visibility `(P_max − P_min)/(P_max + P_min)`.
///
/// For a central window of `k` peaks, `P_max` is the mean height of those `k`
/// maxima and `P_min` the mean depth of the `k + 1` minima bracketing them.
pub fn visibility(p: &Pattern, window: VisibilityWindow) -> Result<f64> {
    let (pmax, pmin) = match window {
        VisibilityWindow::All => {
            find_peaks(p)?;
            let hi = p.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = p.values.iter().copied().fold(f64::INFINITY, f64::min);
            (hi, lo)
        }
        VisibilityWindow::Central(k) => {
            if k % 2 == 0 || k == 0 {
                return Err(Error::Pattern(format!(
                    "central window must be odd, got {k}"
                )));
            }
            let peaks = find_peaks(p)?;
            let mut by_centre = peaks.maxima.clone();
            by_centre.sort_by(|a, b| a.x.abs().total_cmp(&b.x.abs()));
            if by_centre.len() < k {
                return Err(Error::Pattern(format!(
                    "window of {k} peaks but only {} maxima",
                    by_centre.len()
                )));
            }
            let chosen = &by_centre[..k];
            let lo = chosen.iter().map(|e| e.x).fold(f64::INFINITY, f64::min);
            let hi = chosen.iter().map(|e| e.x).fold(f64::NEG_INFINITY, f64::max);
            let inner = peaks.minima.iter().filter(|m| m.x > lo && m.x < hi);
            let left = peaks.minima.iter().rfind(|m| m.x < lo);
            let right = peaks.minima.iter().find(|m| m.x > hi);
            let (Some(left), Some(right)) = (left, right) else {
                return Err(Error::Pattern("window is not bracketed by minima".into()));
            };
            let mins: Vec<f64> = inner.chain([left, right]).map(|m| m.height).collect();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let maxs: Vec<f64> = chosen.iter().map(|e| e.height).collect();
            (mean(&maxs), mean(&mins))
        }
    };
    Ok((pmax - pmin) / (pmax + pmin))
}

/// A signed curve sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

/// `D(x) = |b|² (P_pro^a − P_pro^b)` at fixed `y`.
pub fn difference_function(state: &JointState, y_fixed: f64, grid: &GridSpec) -> Curve {
    let b2 = state.config.coeffs.b.norm_sqr();
    let pa = pattern(&state.with_kind(StateKind::ProductA), y_fixed, grid);
    let pb = pattern(&state.with_kind(StateKind::ProductB), y_fixed, grid);
    Curve {
        values: pa
            .values
            .iter()
            .zip(&pb.values)
            .map(|(a, b)| b2 * (a - b))
            .collect(),
        xs: pa.xs,
    }
}

/// `(P − P_mix) − (P − P_pro^a)` built from the three patterns.
pub fn difference_from_patterns(state: &JointState, y_fixed: f64, grid: &GridSpec) -> Curve {
    let p = pattern(&state.with_kind(StateKind::Superposition), y_fixed, grid);
    let mix = pattern(&state.with_kind(StateKind::Mixture), y_fixed, grid);
    let pa = pattern(&state.with_kind(StateKind::ProductA), y_fixed, grid);
    let values = p
        .values
        .iter()
        .zip(mix.values.iter().zip(&pa.values))
        .map(|(p, (m, a))| (p - m) - (p - a))
        .collect();
    Curve { xs: p.xs, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparationMetric {
    /// Height difference of the central maxima.
    #[default]
    CentralPeakDelta,
    /// Largest pointwise gap within `|x| ≤ 1 μm`.
    SupWindow,
}

pub fn separation(p1: &Pattern, p2: &Pattern, metric: SeparationMetric) -> Result<f64> {
    if p1.xs != p2.xs || p1.y_fixed != p2.y_fixed {
        return Err(Error::Pattern("grids differ".into()));
    }
    match metric {
        SeparationMetric::CentralPeakDelta => {
            let h1 = central_height(p1)?;
            let h2 = central_height(p2)?;
            Ok((h1 - h2).abs())
        }
        SeparationMetric::SupWindow => Ok(p1
            .xs
            .iter()
            .zip(p1.values.iter().zip(&p2.values))
            .filter(|(x, _)| x.abs() <= SUP_WINDOW_HALF_WIDTH)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)),
    }
}

/// Refined height of the maximum closest to `x = 0`.
pub fn central_height(p: &Pattern) -> Result<f64> {
    find_peaks(p)?
        .central_maximum()
        .map(|e| e.height)
        .ok_or_else(|| Error::Pattern("no central maximum".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub y: f64,
    pub central_height: f64,
    pub central_x: f64,
    pub pattern: Pattern,
}

/// Superposition pattern for each fixed detector position in `ys`.
pub fn fixed_detector_sweep(
    state: &JointState,
    ys: &[f64],
    grid: &GridSpec,
) -> Result<Vec<SweepPoint>> {
    let sup = state.with_kind(StateKind::Superposition);
    ys.par_iter()
        .map(|&y| {
            let p = pattern(&sup, y, grid);
            let c = find_peaks(&p)?
                .central_maximum()
                .ok_or_else(|| Error::Pattern("no central maximum".into()))?;
            Ok(SweepPoint {
                y,
                central_height: c.height,
                central_x: c.x,
                pattern: p,
            })
        })
        .collect()
}

/// `max |2𝒩² Re(a* b Φ_a* Φ_b)|` over the grid relative to the central peak
/// of the superposition pattern.
pub fn interference_fraction(state: &JointState, y_fixed: f64, grid: &GridSpec) -> Result<f64> {
    let sup = state.with_kind(StateKind::Superposition);
    let peak = central_height(&pattern(&sup, y_fixed, grid))?;
    let worst = grid
        .points()
        .iter()
        .map(|&x| sup.interference_term(x, y_fixed).abs())
        .fold(0.0, f64::max);
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::normalize;
    use crate::params::paper_defaults;
    use std::sync::OnceLock;

    fn state() -> &'static JointState {
        static S: OnceLock<JointState> = OnceLock::new();
        S.get_or_init(|| normalize(&paper_defaults()).unwrap())
    }

    fn synthetic(values: Vec<f64>) -> Pattern {
        let grid = GridSpec::new(0.0, (values.len() - 1) as f64, values.len()).unwrap();
        Pattern {
            xs: grid.points(),
            values,
            y_fixed: 0.0,
            kind: StateKind::ProductA,
            grid,
            config: paper_defaults(),
        }
    }

    #[test]
    fn single_gaussian_peak() {
        let grid = GridSpec::symmetric(3.0, 61).unwrap();
        let centre = 0.237;
        let values: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| (-(x - centre).powi(2)).exp())
            .collect();
        let p = Pattern {
            xs: grid.points(),
            values,
            ..synthetic(vec![0.0; 5])
        };
        let peaks = find_peaks(&p).unwrap();
        assert_eq!(peaks.maxima.len(), 1);
        assert!(peaks.minima.is_empty());
        assert!((peaks.maxima[0].x - centre).abs() < grid.step());
    }

    #[test]
    fn monotone_is_an_error() {
        let p = synthetic((0..21).map(|i| i as f64).collect());
        assert_eq!(
            find_peaks(&p).unwrap_err().to_string(),
            "pattern: no interior extrema"
        );
        assert!(find_peaks(&synthetic(vec![1.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn parabola_vertex_is_exact() {
        let vals: Vec<f64> = (0..9).map(|i| 5.0 - (i as f64 - 4.3).powi(2)).collect();
        let e = find_peaks(&synthetic(vals)).unwrap().maxima[0];
        assert!((e.x - 4.3).abs() < 1e-12);
        assert!((e.height - 5.0).abs() < 1e-12);
    }

    #[test]
    fn defaults_pattern_structure() {
        let st = state();
        let grid = default_pattern_grid();
        let p = pattern(st, 0.0, &grid);
        let top = p.values.iter().copied().fold(0.0, f64::max);
        for i in 0..p.values.len() {
            let j = p.values.len() - 1 - i;
            assert!((p.values[i] - p.values[j]).abs() <= 1e-10 * top);
        }
        let peaks = find_peaks(&p).unwrap();
        assert_eq!(peaks.maxima.len() % 2, 1);
        let c = peaks.central_maximum().unwrap();
        assert!(c.x.abs() < grid.step());
        assert!((c.height - top).abs() < 1e-6 * top);
        for (l, r) in peaks.maxima.iter().zip(peaks.maxima.iter().rev()) {
            assert!((l.x + r.x).abs() < 1e-9);
        }
        // maxima and minima alternate
        let mut all: Vec<(f64, bool)> = peaks.maxima.iter().map(|e| (e.x, true)).collect();
        all.extend(peaks.minima.iter().map(|e| (e.x, false)));
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(all.windows(2).all(|w| w[0].1 != w[1].1));
    }

    #[test]
    fn visibility_windows() {
        let st = state();
        let grid = default_pattern_grid();
        let p = pattern(&st.with_kind(StateKind::ProductA), 0.0, &grid);
        let v1 = visibility(&p, VisibilityWindow::Central(1)).unwrap();
        let v3 = visibility(&p, VisibilityWindow::Central(3)).unwrap();
        assert!(v1 > 0.9 && v1 <= 1.0);
        assert!(v3 > 0.9 && v3 <= v1);
        assert!(visibility(&p, VisibilityWindow::Central(2)).is_err());
        assert!(visibility(&p, VisibilityWindow::Central(99)).is_err());
        assert_eq!(
            "3".parse::<VisibilityWindow>().unwrap(),
            VisibilityWindow::Central(3)
        );
        assert_eq!(
            "all".parse::<VisibilityWindow>().unwrap(),
            VisibilityWindow::All
        );
    }

    #[test]
    fn three_peak_visibility_ordering() {
        let st = state();
        let grid = default_pattern_grid();
        let v = |k| {
            visibility(
                &pattern(&st.with_kind(k), 0.0, &grid),
                VisibilityWindow::Central(3),
            )
            .unwrap()
        };
        let (sup, mix, pro) = (
            v(StateKind::Superposition),
            v(StateKind::Mixture),
            v(StateKind::ProductA),
        );
        assert!(pro > sup && sup > mix, "{pro} {sup} {mix}");
        assert!(
            (sup - 0.949).abs() < 1e-3 && (mix - 0.937).abs() < 1e-3 && (pro - 0.971).abs() < 1e-3
        );
    }

    #[test]
    fn difference_function_identity() {
        let st = state();
        let grid = default_pattern_grid();
        let d = difference_function(st, 0.0, &grid);
        let e = difference_from_patterns(st, 0.0, &grid);
        let pa = pattern(&st.with_kind(StateKind::ProductA), 0.0, &grid);
        for i in 0..d.values.len() {
            assert!((d.values[i] - e.values[i]).abs() <= 1e-10 * pa.values[i].max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn difference_vanishes_without_b() {
        let st = normalize(&paper_defaults().with_real_a(1.0).unwrap()).unwrap();
        let d = difference_function(&st, 0.0, &default_pattern_grid());
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn difference_is_parabolic_in_b() {
        // D(x; |b|) = |b|² (P_pro^a − P_pro^b); the product densities do not depend on b.
        let grid = GridSpec::symmetric(2.0, 41).unwrap();
        let full = difference_function(
            &normalize(&paper_defaults().with_real_a(0.0).unwrap()).unwrap(),
            0.0,
            &grid,
        );
        for a in [0.2, 0.5, 0.9] {
            let st = normalize(&paper_defaults().with_real_a(a).unwrap()).unwrap();
            let b2 = 1.0 - a * a;
            let d = difference_function(&st, 0.0, &grid);
            for (v, f) in d.values.iter().zip(&full.values) {
                assert!((v - b2 * f).abs() <= 1e-12 * f.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn separation_basics() {
        let st = state();
        let grid = default_pattern_grid();
        let p = pattern(st, 0.0, &grid);
        assert_eq!(
            separation(&p, &p, SeparationMetric::CentralPeakDelta).unwrap(),
            0.0
        );
        assert_eq!(
            separation(&p, &p, SeparationMetric::SupWindow).unwrap(),
            0.0
        );
        let q = pattern(st, 0.1, &grid);
        assert_eq!(
            separation(&p, &q, SeparationMetric::SupWindow)
                .unwrap_err()
                .to_string(),
            "pattern: grids differ"
        );
    }

    #[test]
    fn central_gaps_at_defaults() {
        // Measured ordering: at the central peak the superposition sits closer
        // to the mixture than to the product state.
        let st = state();
        let grid = default_pattern_grid();
        let sup = pattern(st, 0.0, &grid);
        let mix = pattern(&st.with_kind(StateKind::Mixture), 0.0, &grid);
        let pro = pattern(&st.with_kind(StateKind::ProductA), 0.0, &grid);
        let to_mix = separation(&sup, &mix, SeparationMetric::CentralPeakDelta).unwrap();
        let to_pro = separation(&sup, &pro, SeparationMetric::CentralPeakDelta).unwrap();
        assert!((to_mix - 0.0085).abs() < 5e-4, "{to_mix}");
        assert!((to_pro - 0.0143).abs() < 5e-4, "{to_pro}");
        assert!(to_pro > to_mix);
    }

    #[test]
    fn interference_fraction_regression() {
        let f = interference_fraction(state(), 0.0, &default_pattern_grid()).unwrap();
        assert!((f - 0.397).abs() < 5e-3, "{f}");
    }

    #[test]
    fn sweep_oscillates_with_decaying_envelope() {
        let st = state();
        let grid = GridSpec::symmetric(4.0, 401).unwrap();
        let ys = crate::entanglement::linspace(0.0, 3.0, 31);
        let sweep = fixed_detector_sweep(st, &ys, &grid).unwrap();
        let h: Vec<f64> = sweep.iter().map(|s| s.central_height).collect();
        let signs: Vec<bool> = h.windows(2).map(|w| w[1] > w[0]).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(changes >= 2, "{changes}");
        let ext = find_extrema(&ys, &h).unwrap();
        let heights: Vec<f64> = std::iter::once(h[0])
            .chain(ext.maxima.iter().map(|e| e.height))
            .collect();
        assert!(heights.windows(2).all(|w| w[1] < w[0]), "{heights:?}");
        assert!(h[0] > h[7]);
    }
}
