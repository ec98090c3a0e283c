//! Composite Simpson quadrature on fixed uniform grids.
//!
//! Fixed grids keep every run bit-reproducible. Parallel evaluation collects
//! per-row partial sums and adds them sequentially in row order, so results
//! do not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest per-axis point count accepted by the direct 4D evaluation.
pub const DIRECT_4D_MAX_POINTS: usize = 61;

/// Uniform grid of `n` points on `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::Quadrature(format!(
                "grid needs an odd point count >= 3 (got {n})"
            )));
        }
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::Quadrature(format!(
                "grid needs hi > lo (got [{lo}, {hi}])"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    /// `[-half, half]` with `n` points.
    pub fn symmetric(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, n)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Composite Simpson weights `h/3 · (1, 4, 2, 4, ..., 4, 1)`.
    pub fn weights(&self) -> Vec<f64> {
        let h3 = self.step() / 3.0;
        (0..self.n)
            .map(|i| {
                if i == 0 || i == self.n - 1 {
                    h3
                } else if i % 2 == 1 {
                    4.0 * h3
                } else {
                    2.0 * h3
                }
            })
            .collect()
    }

    /// Same span with `2n − 1` points (every interval halved).
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

pub fn integrate_1d<F>(f: F, grid: &GridSpec) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| f(grid.point(i)) * *w)
        .sum()
}

pub fn integrate_1d_real<F>(f: F, grid: &GridSpec) -> f64
where
    F: Fn(f64) -> f64,
{
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| f(grid.point(i)) * w)
        .sum()
}

/// Tensor-product Simpson over `gx × gy`.
pub fn integrate_2d<F>(f: F, gx: &GridSpec, gy: &GridSpec) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let xs = gx.points();
    let ys = gy.points();
    integrate_2d_indexed(|i, j| f(xs[i], ys[j]), gx, gy)
}

/// Like [`integrate_2d`], but the integrand is addressed by grid indices,
/// which lets callers evaluate from precomputed axis tables.
pub fn integrate_2d_indexed<F>(f: F, gx: &GridSpec, gy: &GridSpec) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let wx = gx.weights();
    let wy = gy.weights();
    let rows: Vec<f64> = (0..gx.n)
        .into_par_iter()
        .map(|i| {
            let inner: f64 = wy.iter().enumerate().map(|(j, w)| w * f(i, j)).sum();
            wx[i] * inner
        })
        .collect();
    rows.iter().sum()
}

/// One product term `coeff · u(x) · v(y)`.
pub struct SeparableTerm<'a> {
    pub coeff: Complex64,
    pub x_factor: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    pub y_factor: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
}

/// Two-variable state written as a finite sum of product terms.
pub struct SeparableState<'a> {
    pub terms: Vec<SeparableTerm<'a>>,
}

impl<'a> SeparableState<'a> {
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * (t.x_factor)(x) * (t.y_factor)(y))
            .sum()
    }

    /// Gram matrices `U_ij = ⟨u_i|u_j⟩` and `V_ij = ⟨v_i|v_j⟩`.
    fn gram(&self, grid: &GridSpec) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let xs = grid.points();
        let w = grid.weights();
        let tab = |f: &(dyn Fn(f64) -> Complex64 + Sync)| -> Vec<Complex64> {
            xs.iter().map(|&x| f(x)).collect()
        };
        let us: Vec<_> = self.terms.iter().map(|t| tab(&*t.x_factor)).collect();
        let vs: Vec<_> = self.terms.iter().map(|t| tab(&*t.y_factor)).collect();
        let overlap = |p: &[Complex64], q: &[Complex64]| -> Complex64 {
            p.iter()
                .zip(q)
                .zip(&w)
                .map(|((a, b), w)| a.conj() * b * *w)
                .sum()
        };
        let m = self.terms.len();
        let u = (0..m)
            .map(|i| (0..m).map(|j| overlap(&us[i], &us[j])).collect())
            .collect();
        let v = (0..m)
            .map(|i| (0..m).map(|j| overlap(&vs[i], &vs[j])).collect())
            .collect();
        (u, v)
    }

    /// `∫∫|Ψ|²` through the term overlaps.
    pub fn norm_sqr(&self, grid: &GridSpec) -> f64 {
        let (u, v) = self.gram(grid);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ti) in self.terms.iter().enumerate() {
            for (j, tj) in self.terms.iter().enumerate() {
                acc += ti.coeff.conj() * tj.coeff * u[i][j] * v[i][j];
            }
        }
        acc.re
    }
}

/// How [`integrate_4d_separable`] evaluates the quadruple integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourDMode {
    /// Exact reduction to sums of products of 1D overlaps.
    Factorized,
    /// Brute-force tensor-product Simpson over all four axes.
    Direct,
}

/// `∫dx∫dy∫dX∫dY Ψ*(x,y) Ψ(X,y) Ψ*(X,Y) Ψ(x,Y)` on `grid` in every axis.
///
/// For a normalized state this is the purity of either reduced density matrix.
/// With `Ψ = Σ c_i u_i(x) v_i(y)` the factorized mode evaluates
/// `Σ c_i* c_j c_k* c_l U_il V_ij U_kj V_kl`.
pub fn integrate_4d_separable(
    state: &SeparableState<'_>,
    grid: &GridSpec,
    mode: FourDMode,
) -> Result<f64> {
    match mode {
        FourDMode::Factorized => {
            let (u, v) = state.gram(grid);
            let c: Vec<Complex64> = state.terms.iter().map(|t| t.coeff).collect();
            let m = c.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            acc += c[i].conj()
                                * c[j]
                                * c[k].conj()
                                * c[l]
                                * u[i][l]
                                * v[i][j]
                                * u[k][j]
                                * v[k][l];
                        }
                    }
                }
            }
            Ok(acc.re)
        }
        FourDMode::Direct => {
            if grid.n > DIRECT_4D_MAX_POINTS {
                return Err(Error::Quadrature("4D direct mode over budget".into()));
            }
            let n = grid.n;
            let pts = grid.points();
            let w = grid.weights();
            let psi: Vec<Complex64> = (0..n * n)
                .map(|idx| state.eval(pts[idx / n], pts[idx % n]))
                .collect();
            let at = |i: usize, j: usize| psi[i * n + j];
            let rows: Vec<Complex64> = (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for y in 0..n {
                        for big_x in 0..n {
                            let left = at(x, y).conj() * at(big_x, y) * (w[y] * w[big_x]);
                            for (big_y, &wy) in w.iter().enumerate() {
                                acc += left * at(big_x, big_y).conj() * at(x, big_y) * wy;
                            }
                        }
                    }
                    acc * w[x]
                })
                .collect();
            Ok(rows.iter().sum::<Complex64>().re)
        }
    }
}
