use std::borrow::Cow;

use num_complex::Complex64;

use super::field::{ScalarField, VectorField3};
use super::fft;
use super::grid::Grid;
use super::ops::{derivative, TensorField3};
use crate::error::{usage, Result};

/// How a supremum is approximated on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Maximum over the `n³` grid points.
    Grid,
    /// Maximum over a `(2n)³` grid after spectral zero padding.
    Oversampled,
}

impl Sampling {
    pub fn from_flag(oversample: bool) -> Self {
        if oversample {
            Sampling::Oversampled
        } else {
            Sampling::Grid
        }
    }
}

/// How the components of a field combine into a pointwise magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pointwise {
    /// `|f|` for scalars, `|v|` (Euclidean) for vectors.
    Euclidean,
    /// `max_ij |a_ij|`, used for gradient tensors.
    MaxEntry,
}

/// A real field made of scalar components sharing a grid.
pub trait Components {
    fn grid(&self) -> &Grid;
    fn pointwise(&self) -> Pointwise;
    fn component_list(&self) -> Vec<&ScalarField>;
    /// Rebuild a field of the same kind from transformed component spectra.
    fn with_spectra(&self, spectra: Vec<Vec<Complex64>>) -> Self
    where
        Self: Sized;
}

impl Components for ScalarField {
    fn grid(&self) -> &Grid {
        ScalarField::grid(self)
    }
    fn pointwise(&self) -> Pointwise {
        Pointwise::Euclidean
    }
    fn component_list(&self) -> Vec<&ScalarField> {
        vec![self]
    }
    fn with_spectra(&self, mut spectra: Vec<Vec<Complex64>>) -> Self {
        ScalarField::spectral_unchecked(self.grid(), spectra.remove(0))
    }
}

impl Components for VectorField3 {
    fn grid(&self) -> &Grid {
        VectorField3::grid(self)
    }
    fn pointwise(&self) -> Pointwise {
        Pointwise::Euclidean
    }
    fn component_list(&self) -> Vec<&ScalarField> {
        self.components().iter().collect()
    }
    fn with_spectra(&self, spectra: Vec<Vec<Complex64>>) -> Self {
        let [a, b, c]: [Vec<Complex64>; 3] = spectra.try_into().expect("three components");
        VectorField3::from_spectra(self.grid(), [a, b, c])
    }
}

impl Components for TensorField3 {
    fn grid(&self) -> &Grid {
        TensorField3::grid(self)
    }
    fn pointwise(&self) -> Pointwise {
        Pointwise::MaxEntry
    }
    fn component_list(&self) -> Vec<&ScalarField> {
        self.entries().collect()
    }
    fn with_spectra(&self, spectra: Vec<Vec<Complex64>>) -> Self {
        let g = self.grid().clone();
        let mut it = spectra.into_iter();
        let rows = [0, 1, 2].map(|_| {
            let a = it.next().expect("nine entries");
            let b = it.next().expect("nine entries");
            let c = it.next().expect("nine entries");
            VectorField3::from_spectra(&g, [a, b, c])
        });
        TensorField3 { rows }
    }
}

/// Physical values of a spectrum at the requested sampling.
pub(crate) fn synthesize(grid: &Grid, coeffs: &[Complex64], sampling: Sampling) -> Vec<f64> {
    match sampling {
        Sampling::Grid => fft::inverse(grid, coeffs),
        Sampling::Oversampled => {
            let fine = grid.refined();
            fft::inverse_owned(fine, fft::zero_pad(grid, fine, coeffs))
        }
    }
}

fn sampled(field: &ScalarField, sampling: Sampling) -> Cow<'_, [f64]> {
    match (field.data(), sampling) {
        (super::field::FieldData::Physical(v), Sampling::Grid) => Cow::Borrowed(v.as_slice()),
        _ => Cow::Owned(synthesize(field.grid(), &field.coeffs(), sampling)),
    }
}

/// Supremum of a collection of spectra combined with `pointwise`.
pub(crate) fn sup_of_spectra(
    grid: &Grid,
    spectra: &[&[Complex64]],
    pointwise: Pointwise,
    sampling: Sampling,
) -> f64 {
    match pointwise {
        Pointwise::MaxEntry => spectra
            .iter()
            .map(|c| {
                if c.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    0.0
                } else {
                    max_abs(&synthesize(grid, c, sampling))
                }
            })
            .fold(0.0, f64::max),
        Pointwise::Euclidean => {
            let mut acc: Option<Vec<f64>> = None;
            for c in spectra {
                if c.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                let v = synthesize(grid, c, sampling);
                match acc.as_mut() {
                    None => acc = Some(v.iter().map(|x| x * x).collect()),
                    Some(a) => a.iter_mut().zip(&v).for_each(|(s, x)| *s += x * x),
                }
            }
            acc.map_or(0.0, |a| a.into_iter().fold(0.0, f64::max).sqrt())
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `‖f‖_{L∞}` for any field: pointwise Euclidean magnitude for scalars and
/// vectors, largest entry for tensors.
pub fn sup_norm<F: Components>(field: &F, sampling: Sampling) -> f64 {
    let comps = field.component_list();
    match field.pointwise() {
        Pointwise::MaxEntry => comps.iter().map(|c| max_abs(&sampled(c, sampling))).fold(0.0, f64::max),
        Pointwise::Euclidean => {
            let mut acc: Vec<f64> = Vec::new();
            for c in comps {
                let v = sampled(c, sampling);
                if acc.is_empty() {
                    acc = v.iter().map(|x| x * x).collect();
                } else {
                    acc.iter_mut().zip(v.iter()).for_each(|(s, x)| *s += x * x);
                }
            }
            acc.into_iter().fold(0.0, f64::max).sqrt()
        }
    }
}

pub fn sup_norm_scalar(f: &ScalarField, sampling: Sampling) -> f64 {
    sup_norm(f, sampling)
}

pub fn sup_norm_vector(v: &VectorField3, sampling: Sampling) -> f64 {
    sup_norm(v, sampling)
}

/// `max_{x,i,j} |∂_i v_j|`.
pub fn grad_sup_norm(v: &VectorField3, sampling: Sampling) -> f64 {
    let g = v.grid();
    let mut best = 0.0f64;
    for comp in v.components() {
        let c = comp.coeffs();
        for axis in 0..3 {
            let d = derivative(g, &c, axis);
            best = best.max(sup_of_spectra(g, &[&d], Pointwise::MaxEntry, sampling));
        }
    }
    best
}

/// `max_{x,i,j,k} |∂_i ∂_j v_k|`.
pub fn hessian_sup_norm(v: &VectorField3, sampling: Sampling) -> f64 {
    let g = v.grid();
    let mut best = 0.0f64;
    for comp in v.components() {
        let c = comp.coeffs();
        for i in 0..3 {
            let di = derivative(g, &c, i);
            for j in i..3 {
                let dij = derivative(g, &di, j);
                best = best.max(sup_of_spectra(g, &[&dij], Pointwise::MaxEntry, sampling));
            }
        }
    }
    best
}

/// `(L³ Σ_ξ |ξ|^{2m} |v̂(ξ)|²)^{1/2}`, i.e. `‖∇^m v‖_{L²}` with `‖v‖² = ∫|v|²`.
pub fn sobolev_seminorm<F: Components>(field: &F, m: u32) -> Result<f64> {
    if m > 5 {
        return Err(usage(format!("Sobolev order must be in 0..=5, got {m}")));
    }
    let g = field.grid();
    let mut total = 0.0;
    for comp in field.component_list() {
        let c = comp.coeffs();
        total += c
            .iter()
            .enumerate()
            .map(|(idx, z)| g.mode_weight(idx) * g.k2(idx).powi(m as i32) * z.norm_sqr())
            .sum::<f64>();
    }
    Ok((g.volume() * total).sqrt())
}

pub fn l2_norm<F: Components>(field: &F) -> f64 {
    sobolev_seminorm(field, 0).expect("order 0 is valid")
}

/// `∫ a·b dx` over the box, evaluated spectrally.
pub fn inner_product(a: &VectorField3, b: &VectorField3) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(usage("inner product of fields on different grids"));
    }
    let g = a.grid();
    let mut total = 0.0;
    for (x, y) in a.components().iter().zip(b.components()) {
        let (cx, cy) = (x.coeffs(), y.coeffs());
        total += cx
            .iter()
            .zip(cy.iter())
            .enumerate()
            .map(|(idx, (p, q))| g.mode_weight(idx) * (p * q.conj()).re)
            .sum::<f64>();
    }
    Ok(g.volume() * total)
}

/// `‖f‖_{L^p}` by grid quadrature of the pointwise magnitude; `p = ∞`
/// falls back to [`sup_norm`].
pub fn lp_norm<F: Components>(field: &F, p: f64, sampling: Sampling) -> Result<f64> {
    if p.is_infinite() {
        return Ok(sup_norm(field, sampling));
    }
    if !(p >= 1.0) {
        return Err(usage(format!("L^p exponent must be >= 1, got {p}")));
    }
    let g = field.grid();
    let comps = field.component_list();
    let values: Vec<Cow<'_, [f64]>> = comps.iter().map(|c| sampled(c, Sampling::Grid)).collect();
    let npts = g.physical_len();
    let mut sum = 0.0;
    for idx in 0..npts {
        let mag = match field.pointwise() {
            Pointwise::Euclidean => values.iter().map(|v| v[idx] * v[idx]).sum::<f64>().sqrt(),
            Pointwise::MaxEntry => values.iter().map(|v| v[idx].abs()).fold(0.0, f64::max),
        };
        sum += mag.powf(p);
    }
    Ok((sum * g.volume() / npts as f64).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sup_norm_examples() {
        let g = Grid::new(32).unwrap();
        assert_eq!(sup_norm(&VectorField3::zeros_spectral(&g), Sampling::Oversampled), 0.0);
        let f = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos());
        assert!((sup_norm(&f, Sampling::Grid) - 1.0).abs() < 1e-14);
        assert!((sup_norm(&f.to_spectral(), Sampling::Oversampled) - 1.0).abs() < 1e-13);
        let v = VectorField3::from_fn(&g, |_, _, z| [z.sin(), z.cos(), 0.0]);
        assert!((sup_norm(&v, Sampling::Grid) - 1.0).abs() < 1e-14);
        assert!((sup_norm(&v.to_spectral(), Sampling::Oversampled) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn oversampling_tightens_the_supremum() {
        // Shifted sin(3x) peaks between the n = 8 grid points but on the 2n grid.
        let g = Grid::new(8).unwrap();
        let f = ScalarField::from_fn(&g, |x, _, _| (3.0 * (x - PI / 8.0)).sin()).to_spectral();
        let coarse = sup_norm(&f, Sampling::Grid);
        let fine = sup_norm(&f, Sampling::Oversampled);
        assert!((coarse - (3.0 * PI / 8.0).sin()).abs() < 1e-12, "{coarse}");
        assert!((fine - 1.0).abs() < 1e-12, "{fine}");
    }

    #[test]
    fn grad_sup_examples() {
        let g = Grid::new(32).unwrap();
        let c = VectorField3::from_fn(&g, |_, _, _| [1.0, 2.0, 3.0]).to_spectral();
        assert!(grad_sup_norm(&c, Sampling::Oversampled) < 1e-13);
        let v = VectorField3::from_fn(&g, |_, _, z| [z.sin(), z.cos(), 0.0]).to_spectral();
        assert!((grad_sup_norm(&v, Sampling::Oversampled) - 1.0).abs() < 1e-12);
        let v = VectorField3::from_fn(&g, |x, _, _| [0.0, 0.0, (2.0 * x).sin()]).to_spectral();
        assert!((grad_sup_norm(&v, Sampling::Oversampled) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l2_examples() {
        let g = Grid::new(16).unwrap();
        assert_eq!(l2_norm(&ScalarField::zeros_spectral(&g)), 0.0);
        let f = ScalarField::from_fn(&g, |x, _, _| x.sin());
        let want = (4.0 * PI.powi(3)).sqrt();
        assert!((l2_norm(&f) - want).abs() < 1e-12 * want);
        assert!((sobolev_seminorm(&f, 1).unwrap() - want).abs() < 1e-12 * want);
        assert!(sobolev_seminorm(&f, 6).is_err());
    }

    #[test]
    fn lp_norm_of_constant() {
        let g = Grid::new(8).unwrap();
        let f = ScalarField::from_fn(&g, |_, _, _| 2.0);
        let vol = g.volume();
        let got = lp_norm(&f, 4.0, Sampling::Grid).unwrap();
        assert!((got - 2.0 * vol.powf(0.25)).abs() < 1e-12 * got);
        assert!((lp_norm(&f, f64::INFINITY, Sampling::Grid).unwrap() - 2.0).abs() < 1e-15);
    }
}
