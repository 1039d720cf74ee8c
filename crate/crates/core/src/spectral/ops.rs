//! Spectral differential operators.
//!
//! Odd-order derivatives use a zero wavenumber at the Nyquist index so their
//! output stays real; even-order operators (Laplacian, norms) use the full
//! wavenumber. Fields that are dealiased never populate Nyquist modes, so the
//! two conventions coincide on them.

use num_complex::Complex64;

use super::field::{ScalarField, VectorField3};
use super::grid::Grid;
use crate::error::Result;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `∂_axis` of one spectrum.
pub(crate) fn derivative(grid: &Grid, c: &[Complex64], axis: usize) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .map(|(idx, &v)| {
            let k = grid.deriv_vector(idx)[axis];
            I * k * v
        })
        .collect()
}

pub(crate) fn curl_spectra(grid: &Grid, v: [&[Complex64]; 3]) -> [Vec<Complex64>; 3] {
    let len = grid.spectral_len();
    let mut out = [vec![Complex64::default(); len], vec![Complex64::default(); len], vec![Complex64::default(); len]];
    for idx in 0..len {
        let [kx, ky, kz] = grid.deriv_vector(idx);
        let (a, b, c) = (v[0][idx], v[1][idx], v[2][idx]);
        out[0][idx] = I * (ky * c - kz * b);
        out[1][idx] = I * (kz * a - kx * c);
        out[2][idx] = I * (kx * b - ky * a);
    }
    out
}

pub(crate) fn divergence_spectrum(grid: &Grid, v: [&[Complex64]; 3]) -> Vec<Complex64> {
    (0..grid.spectral_len())
        .map(|idx| {
            let [kx, ky, kz] = grid.deriv_vector(idx);
            I * (kx * v[0][idx] + ky * v[1][idx] + kz * v[2][idx])
        })
        .collect()
}

pub(crate) fn laplacian_in_place(grid: &Grid, c: &mut [Complex64], coeff: f64) {
    for (idx, v) in c.iter_mut().enumerate() {
        *v *= -coeff * grid.k2(idx);
    }
}

pub(crate) fn leray_in_place(grid: &Grid, v: [&mut Vec<Complex64>; 3]) {
    let [a, b, c] = v;
    for idx in 0..grid.spectral_len() {
        let k = grid.deriv_vector(idx);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk == 0.0 {
            continue;
        }
        let proj = (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2]) / kk;
        a[idx] -= proj * k[0];
        b[idx] -= proj * k[1];
        c[idx] -= proj * k[2];
    }
}

/// True when the mode survives the 2/3 rule.
#[inline]
pub(crate) fn resolved(grid: &Grid, idx: usize) -> bool {
    let cut = grid.dealias_cutoff();
    let (ix, iy, iz) = grid.spectral_coords(idx);
    grid.freq(ix).abs() <= cut && grid.freq(iy).abs() <= cut && grid.freq(iz).abs() <= cut
}

pub(crate) fn dealias_in_place(grid: &Grid, c: &mut [Complex64]) {
    for (idx, v) in c.iter_mut().enumerate() {
        if !resolved(grid, idx) {
            *v = Complex64::default();
        }
    }
}

/// Gradient of a vector field: `rows[i]` holds `∂_i v`, so entry `(i, j)`
/// of the tensor is `∂_i v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField3 {
    pub(crate) rows: [VectorField3; 3],
}

impl TensorField3 {
    pub fn rows(&self) -> &[VectorField3; 3] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        self.rows[i].component(j)
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScalarField> {
        self.rows.iter().flat_map(|r| r.components().iter())
    }

    pub fn grid(&self) -> &Grid {
        self.rows[0].grid()
    }
}

/// `∇f`: component `j` is `i ξ_j f̂`.
pub fn gradient(f: &ScalarField) -> Result<VectorField3> {
    let c = f.spectral()?;
    let g = f.grid();
    Ok(VectorField3::from_spectra(g, [0, 1, 2].map(|a| derivative(g, c, a))))
}

/// `∇v` as a 3×3 tensor of spectral fields.
pub fn vector_gradient(v: &VectorField3) -> Result<TensorField3> {
    let comps = v.spectra()?;
    let g = v.grid();
    let rows = [0, 1, 2].map(|i| VectorField3::from_spectra(g, [0, 1, 2].map(|j| derivative(g, comps[j], i))));
    Ok(TensorField3 { rows })
}

pub fn curl(v: &VectorField3) -> Result<VectorField3> {
    let g = v.grid();
    Ok(VectorField3::from_spectra(g, curl_spectra(g, v.spectra()?)))
}

pub fn divergence(v: &VectorField3) -> Result<ScalarField> {
    let g = v.grid();
    Ok(ScalarField::spectral_unchecked(g, divergence_spectrum(g, v.spectra()?)))
}

/// Componentwise multiplication by `-|ξ|²`.
pub fn laplacian(v: &VectorField3) -> Result<VectorField3> {
    let mut out = v.clone();
    let g = v.grid().clone();
    for c in out.spectra_mut()? {
        laplacian_in_place(&g, c, 1.0);
    }
    Ok(out)
}

/// Remove the gradient part: `v̂ - ξ (ξ·v̂) / |ξ|²`, zero mode untouched.
pub fn leray_project(v: &VectorField3) -> Result<VectorField3> {
    let mut out = v.clone();
    let g = v.grid().clone();
    leray_in_place(&g, out.spectra_mut()?);
    Ok(out)
}

/// 2/3 rule: zero every mode with some `|k_i| > n/3`.
pub fn dealias(v: &VectorField3) -> Result<VectorField3> {
    let mut out = v.clone();
    let g = v.grid().clone();
    for c in out.spectra_mut()? {
        dealias_in_place(&g, c);
    }
    Ok(out)
}

pub fn dealias_scalar(f: &ScalarField) -> Result<ScalarField> {
    let mut out = f.clone();
    let g = f.grid().clone();
    dealias_in_place(&g, out.spectral_mut()?);
    Ok(out)
}
