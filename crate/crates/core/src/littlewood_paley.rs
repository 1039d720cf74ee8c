//! Littlewood–Paley projections, the Besov norm `B⁰_{∞,∞}` and a dyadic
//! BMO estimator.
//!
//! Bands are indexed by the physical wavenumber `|ξ|` (including the `2π/L`
//! factor). The low-pass profile is the smooth step
//! `m(r) = s(2 - r) / (s(2 - r) + s(r - 1))` with `s(x) = exp(-1/x)` for
//! `x > 0`, which is 1 on `r ≤ 1`, 0 on `r ≥ 2` and non-increasing.

use num_complex::Complex64;

use crate::error::{usage, Result};
use crate::spectral::norms::sup_of_spectra;
use crate::spectral::{Components, Grid, Pointwise, Sampling};

/// Identifier recorded in output metadata so reports from different
/// profiles are never mixed.
pub const PROFILE_ID: &str = "smoothstep-exp(-1/x)-v1";

/// Radial low-pass multiplier `m_{<0}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LowPassMultiplier;

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl LowPassMultiplier {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 1.0 {
            return 1.0;
        }
        if r >= 2.0 {
            return 0.0;
        }
        let a = bump(2.0 - r);
        a / (a + bump(r - 1.0))
    }

    /// Weight of `P_{<k}` at wavenumber magnitude `r`.
    pub fn below(&self, k: i32, r: f64) -> f64 {
        self.eval(r * 2f64.powi(-k))
    }

    /// Weight of `P_k = P_{<k+1} - P_{<k}` at wavenumber magnitude `r`.
    pub fn band(&self, k: i32, r: f64) -> f64 {
        self.below(k + 1, r) - self.below(k, r)
    }

    pub fn profile_id(&self) -> &'static str {
        PROFILE_ID
    }
}

/// Index of the last band: `⌈log₂ max|ξ|⌉ + 1`, so `P_{<k_max+1}` is the
/// identity on every grid mode.
pub fn k_max(grid: &Grid) -> i32 {
    let top = grid.max_wavenumber();
    if top <= 1.0 {
        return 0;
    }
    top.log2().ceil() as i32 + 1
}

/// A radial weight tabulated per shell; radial multipliers only ever see
/// `3(n/2)² + 1` distinct radii.
fn shell_table(g: &Grid, weight: impl Fn(f64) -> f64) -> Vec<f64> {
    let half = g.n() / 2;
    (0..=3 * half * half).map(|s| weight((s as f64).sqrt() * g.scale())).collect()
}

fn weighted(coeffs: &[Complex64], shells: &[usize], table: &[f64]) -> Vec<Complex64> {
    coeffs.iter().zip(shells).map(|(z, &s)| if *z == Complex64::default() { *z } else { z * table[s] }).collect()
}

/// Nonzero coefficients of one component as `(index, value)`.
fn support(coeffs: &[Complex64]) -> Vec<(usize, Complex64)> {
    coeffs.iter().enumerate().filter(|(_, z)| **z != Complex64::default()).map(|(i, z)| (i, *z)).collect()
}

fn apply_weights<F: Components>(field: &F, weight: impl Fn(f64) -> f64) -> F {
    let g = field.grid().clone();
    let table = shell_table(&g, weight);
    let spectra = field.component_list().iter().map(|c| weighted(&c.coeffs(), g.shells(), &table)).collect();
    field.with_spectra(spectra)
}

/// `P_{<k} f`: spectral multiplication by `m(2^{-k} |ξ|)`.
pub fn project_below<F: Components>(field: &F, k: i32) -> Result<F> {
    if k < 0 {
        return Err(usage(format!("projection index must be >= 0, got {k}")));
    }
    let m = LowPassMultiplier;
    Ok(apply_weights(field, |r| m.below(k, r)))
}

/// `P_k f = P_{<k+1} f - P_{<k} f`.
pub fn project_band<F: Components>(field: &F, k: i32) -> Result<F> {
    if k < 0 {
        return Err(usage(format!("band index must be >= 0, got {k}")));
    }
    let m = LowPassMultiplier;
    Ok(apply_weights(field, |r| m.band(k, r)))
}

/// The low-pass block plus every band up to [`k_max`].
#[derive(Debug, Clone)]
pub struct BandDecomposition<F> {
    pub base: F,
    pub bands: Vec<F>,
}

pub fn decompose<F: Components>(field: &F) -> BandDecomposition<F> {
    let m = LowPassMultiplier;
    let base = apply_weights(field, |r| m.below(0, r));
    let bands = (0..=k_max(field.grid())).map(|k| apply_weights(field, |r| m.band(k, r))).collect();
    BandDecomposition { base, bands }
}

/// Band-wise suprema of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovProfile {
    /// `‖P_{<0} f‖_{L∞}`.
    pub low: f64,
    /// `‖P_k f‖_{L∞}` for `k = 0..=k_max`.
    pub bands: Vec<f64>,
}

impl BesovProfile {
    /// `sup_k ‖P_k f‖_{L∞}`, the homogeneous part on the torus.
    pub fn band_sup(&self) -> f64 {
        self.bands.iter().copied().fold(0.0, f64::max)
    }

    /// `sup_k ‖P_k f‖_{L∞} + ‖P_{<0} f‖_{L∞}`.
    pub fn norm(&self) -> f64 {
        self.band_sup() + self.low
    }
}

/// Band-wise suprema. Projections whose spectrum vanishes identically are
/// skipped without a transform.
pub fn besov_profile<F: Components>(field: &F, sampling: Sampling) -> BesovProfile {
    let g = field.grid();
    let m = LowPassMultiplier;
    let shells = g.shells();
    let supports: Vec<Vec<(usize, Complex64)>> = field.component_list().iter().map(|c| support(&c.coeffs())).collect();
    let pointwise = field.pointwise();
    let mut occupied = vec![false; shell_table(g, |_| 0.0).len()];
    for &(i, _) in supports.iter().flatten() {
        occupied[shells[i]] = true;
    }

    let block_sup = |weight: &dyn Fn(f64) -> f64| -> f64 {
        let table = shell_table(g, weight);
        if table.iter().zip(&occupied).all(|(w, &o)| !o || *w == 0.0) {
            return 0.0;
        }
        let spectra: Vec<Vec<Complex64>> = supports
            .iter()
            .map(|sup| {
                let mut c = g.zero_spectrum();
                for &(i, z) in sup {
                    c[i] = z * table[shells[i]];
                }
                c
            })
            .collect();
        let refs: Vec<&[Complex64]> = spectra.iter().map(Vec::as_slice).collect();
        sup_of_spectra(g, &refs, pointwise, sampling)
    };

    let low = block_sup(&|r| m.below(0, r));
    let bands = (0..=k_max(g)).map(|k| block_sup(&|r| m.band(k, r))).collect();
    BesovProfile { low, bands }
}

/// `‖f‖_{B⁰_{∞,∞}} = sup_k ‖P_k f‖_{L∞} + ‖P_{<0} f‖_{L∞}`.
pub fn besov_norm<F: Components>(field: &F, sampling: Sampling) -> f64 {
    besov_profile(field, sampling).norm()
}

/// Largest mean oscillation `|Q|⁻¹ Σ_{x∈Q} |f(x) - f_Q|` over grid-aligned
/// dyadic cubes of side `L / 2^j`, `j = 0..=log₂(n) - 2`.
///
/// Vector fields use the Euclidean magnitude of the deviation; tensors are
/// reduced by the largest entrywise estimate.
pub fn bmo_norm_estimate<F: Components>(field: &F) -> f64 {
    let g = field.grid();
    let values: Vec<Vec<f64>> = field.component_list().iter().map(|c| c.values().into_owned()).collect();
    match field.pointwise() {
        Pointwise::Euclidean => bmo_of_values(g.n(), &values),
        Pointwise::MaxEntry => values
            .iter()
            .map(|v| bmo_of_values(g.n(), std::slice::from_ref(v)))
            .fold(0.0, f64::max),
    }
}

fn bmo_of_values(n: usize, comps: &[Vec<f64>]) -> f64 {
    let levels = (n.trailing_zeros() as usize).saturating_sub(2);
    let mut best = 0.0f64;
    for j in 0..=levels {
        let side = n >> j;
        let count = n / side;
        let vol = (side * side * side) as f64;
        for cz in 0..count {
            for cy in 0..count {
                for cx in 0..count {
                    let cube = |f: &mut dyn FnMut(usize)| {
                        for z in cz * side..(cz + 1) * side {
                            for y in cy * side..(cy + 1) * side {
                                let row = n * (y + n * z);
                                for x in cx * side..(cx + 1) * side {
                                    f(row + x);
                                }
                            }
                        }
                    };
                    let mut mean = vec![0.0; comps.len()];
                    cube(&mut |idx| {
                        for (m, c) in mean.iter_mut().zip(comps) {
                            *m += c[idx];
                        }
                    });
                    mean.iter_mut().for_each(|m| *m /= vol);
                    let mut osc = 0.0;
                    cube(&mut |idx| {
                        let d2: f64 = mean.iter().zip(comps).map(|(m, c)| (c[idx] - m).powi(2)).sum();
                        osc += d2.sqrt();
                    });
                    best = best.max(osc / vol);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{sup_norm, ScalarField, VectorField3};

    #[test]
    fn multiplier_shape() {
        let m = LowPassMultiplier;
        assert_eq!(m.eval(0.0), 1.0);
        assert_eq!(m.eval(1.0), 1.0);
        assert_eq!(m.eval(2.0), 0.0);
        assert_eq!(m.eval(7.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let r = 1.0 + i as f64 / 1000.0;
            let v = m.eval(r);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
        assert!((m.eval(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn k_max_covers_the_grid() {
        let g = Grid::new(32).unwrap();
        assert_eq!(k_max(&g), 6);
        let m = LowPassMultiplier;
        assert_eq!(m.below(k_max(&g) + 1, g.max_wavenumber()), 1.0);
    }

    fn diff(a: &ScalarField, b: &ScalarField) -> f64 {
        let (x, y) = (a.to_physical(), b.to_physical());
        x.physical().unwrap().iter().zip(y.physical().unwrap()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn projection_examples() {
        let g = Grid::new(32).unwrap();
        let f = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos()).to_spectral();
        assert!(sup_norm(&project_below(&f, 0).unwrap(), Sampling::Grid) < 1e-14);
        assert!(diff(&project_below(&f, 3).unwrap(), &f) < 1e-14);
        assert!(diff(&project_band(&f, 1).unwrap(), &f) < 1e-14);
        assert!(sup_norm(&project_band(&f, 2).unwrap(), Sampling::Grid) < 1e-14);

        let one = ScalarField::from_fn(&g, |_, _, _| 1.0).to_spectral();
        assert!(diff(&project_below(&one, 0).unwrap(), &one) < 1e-15);
        assert!(sup_norm(&project_band(&one, 0).unwrap(), Sampling::Grid) == 0.0);

        assert!(project_below(&f, -1).is_err());
        assert!(project_band(&f, -2).is_err());
    }

    #[test]
    fn besov_examples() {
        let g = Grid::new(32).unwrap();
        assert_eq!(besov_norm(&ScalarField::zeros_spectral(&g), Sampling::Oversampled), 0.0);
        let one = ScalarField::from_fn(&g, |_, _, _| 1.0).to_spectral();
        assert_eq!(besov_norm(&one, Sampling::Oversampled), 1.0);
        let f = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos()).to_spectral();
        assert!((besov_norm(&f, Sampling::Oversampled) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bmo_simple_cases() {
        let g = Grid::new(16).unwrap();
        let c = VectorField3::from_fn(&g, |_, _, _| [1.0, 2.0, 3.0]);
        assert!(bmo_norm_estimate(&c) < 1e-14);
        let f = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos());
        let b = bmo_norm_estimate(&f);
        assert!(b > 0.0 && b <= 1.0);
    }
}
