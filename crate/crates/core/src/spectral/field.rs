use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{usage, validation, Result};

/// Which representation a field currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// Real scalar field on a periodic grid, in either representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: FieldData,
}

/// Relative tolerance for the Hermitian-symmetry check on synthesis input.
const HERMITIAN_TOL: f64 = 1e-10;

impl ScalarField {
    pub fn zeros_physical(grid: &Grid) -> Self {
        Self { grid: grid.clone(), data: FieldData::Physical(vec![0.0; grid.physical_len()]) }
    }

    pub fn zeros_spectral(grid: &Grid) -> Self {
        Self { grid: grid.clone(), data: FieldData::Spectral(grid.zero_spectrum()) }
    }

    pub fn from_physical(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.physical_len() {
            return Err(usage(format!(
                "expected {} physical values, got {}",
                grid.physical_len(),
                values.len()
            )));
        }
        Ok(Self { grid: grid.clone(), data: FieldData::Physical(values) })
    }

    pub fn from_spectral(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(usage(format!(
                "expected {} spectral coefficients, got {}",
                grid.spectral_len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid: grid.clone(), data: FieldData::Spectral(coeffs) })
    }

    /// Sample `f(x, y, z)` at the grid points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let mut values = Vec::with_capacity(grid.physical_len());
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    values.push(f(x as f64 * h, y as f64 * h, z as f64 * h));
                }
            }
        }
        Self { grid: grid.clone(), data: FieldData::Physical(values) }
    }

    pub(crate) fn spectral_unchecked(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.spectral_len());
        Self { grid: grid.clone(), data: FieldData::Spectral(coeffs) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Physical(_) => Representation::Physical,
            FieldData::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn data(&self) -> &FieldData {
        &self.data
    }

    pub fn physical(&self) -> Result<&[f64]> {
        match &self.data {
            FieldData::Physical(v) => Ok(v),
            FieldData::Spectral(_) => Err(usage("expected a physical-space field")),
        }
    }

    pub fn spectral(&self) -> Result<&[Complex64]> {
        match &self.data {
            FieldData::Spectral(v) => Ok(v),
            FieldData::Physical(_) => Err(usage("expected a spectral-space field")),
        }
    }

    pub(crate) fn spectral_mut(&mut self) -> Result<&mut Vec<Complex64>> {
        match &mut self.data {
            FieldData::Spectral(v) => Ok(v),
            FieldData::Physical(_) => Err(usage("expected a spectral-space field")),
        }
    }

    /// Forward transform; the zero mode of the result equals the grid mean.
    pub fn forward_transform(&self) -> Result<ScalarField> {
        let values = self.physical()?;
        Ok(Self::spectral_unchecked(&self.grid, fft::forward(&self.grid, values)))
    }

    /// Inverse transform. Rejects coefficients that are not the spectrum
    /// of a real field.
    pub fn inverse_transform(&self) -> Result<ScalarField> {
        let coeffs = self.spectral()?;
        check_hermitian(&self.grid, coeffs)?;
        Ok(Self { grid: self.grid.clone(), data: FieldData::Physical(fft::inverse(&self.grid, coeffs)) })
    }

    /// Spectral copy of the field, transforming if needed.
    pub fn to_spectral(&self) -> ScalarField {
        match &self.data {
            FieldData::Spectral(_) => self.clone(),
            FieldData::Physical(v) => Self::spectral_unchecked(&self.grid, fft::forward(&self.grid, v)),
        }
    }

    /// Physical copy of the field, transforming without a symmetry check.
    pub fn to_physical(&self) -> ScalarField {
        match &self.data {
            FieldData::Physical(_) => self.clone(),
            FieldData::Spectral(c) => {
                Self { grid: self.grid.clone(), data: FieldData::Physical(fft::inverse(&self.grid, c)) }
            }
        }
    }

    /// Spectral coefficients, transforming a physical field on the fly.
    pub(crate) fn coeffs(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match &self.data {
            FieldData::Spectral(c) => std::borrow::Cow::Borrowed(c.as_slice()),
            FieldData::Physical(v) => std::borrow::Cow::Owned(fft::forward(&self.grid, v)),
        }
    }

    /// Physical values, transforming a spectral field on the fly.
    pub(crate) fn values(&self) -> std::borrow::Cow<'_, [f64]> {
        match &self.data {
            FieldData::Physical(v) => std::borrow::Cow::Borrowed(v.as_slice()),
            FieldData::Spectral(c) => std::borrow::Cow::Owned(fft::inverse(&self.grid, c)),
        }
    }

    /// Same coefficients interpreted on a different box with the same `n`.
    pub fn rebox(&self, grid: &Grid) -> Result<ScalarField> {
        if !self.grid.same_n(grid) {
            return Err(usage("rebox requires grids with equal n"));
        }
        Ok(Self { grid: grid.clone(), data: self.data.clone() })
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            FieldData::Physical(v) => v.iter().all(|x| x.is_finite()),
            FieldData::Spectral(c) => c.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }
}

/// Check `c(0, k) = conj(c(0, -k))` on the self-conjugate planes `kx = 0`
/// and `kx = n/2`.
pub(crate) fn check_hermitian(grid: &Grid, coeffs: &[Complex64]) -> Result<()> {
    let n = grid.n();
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if scale == 0.0 {
        return Ok(());
    }
    let tol = HERMITIAN_TOL * scale;
    for ix in [0, n / 2] {
        for iz in 0..n {
            for iy in 0..n {
                let a = coeffs[grid.spectral_index(ix, iy, iz)];
                let b = coeffs[grid.spectral_index(ix, (n - iy) % n, (n - iz) % n)];
                if (a - b.conj()).norm() > tol {
                    return Err(validation(format!(
                        "coefficients are not Hermitian-symmetric at ({ix}, {}, {})",
                        grid.freq(iy),
                        grid.freq(iz)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Three scalar components sharing one grid and representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    components: [ScalarField; 3],
}

impl VectorField3 {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        let [a, b, c] = &components;
        if a.grid != b.grid || a.grid != c.grid {
            return Err(usage("vector components live on different grids"));
        }
        if a.representation() != b.representation() || a.representation() != c.representation() {
            return Err(usage("vector components have mixed representations"));
        }
        Ok(Self { components })
    }

    pub(crate) fn from_spectra(grid: &Grid, [a, b, c]: [Vec<Complex64>; 3]) -> Self {
        Self {
            components: [
                ScalarField::spectral_unchecked(grid, a),
                ScalarField::spectral_unchecked(grid, b),
                ScalarField::spectral_unchecked(grid, c),
            ],
        }
    }

    pub fn zeros_spectral(grid: &Grid) -> Self {
        Self::from_spectra(grid, [grid.zero_spectrum(), grid.zero_spectrum(), grid.zero_spectrum()])
    }

    /// Sample a vector function at the grid points (physical representation).
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        Self {
            components: [
                ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[0]),
                ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[1]),
                ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[2]),
            ],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn representation(&self) -> Representation {
        self.components[0].representation()
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn spectra(&self) -> Result<[&[Complex64]; 3]> {
        Ok([
            self.components[0].spectral()?,
            self.components[1].spectral()?,
            self.components[2].spectral()?,
        ])
    }

    pub(crate) fn spectra_mut(&mut self) -> Result<[&mut Vec<Complex64>; 3]> {
        let [a, b, c] = &mut self.components;
        Ok([a.spectral_mut()?, b.spectral_mut()?, c.spectral_mut()?])
    }

    pub fn forward_transform(&self) -> Result<VectorField3> {
        Ok(Self {
            components: [
                self.components[0].forward_transform()?,
                self.components[1].forward_transform()?,
                self.components[2].forward_transform()?,
            ],
        })
    }

    pub fn inverse_transform(&self) -> Result<VectorField3> {
        Ok(Self {
            components: [
                self.components[0].inverse_transform()?,
                self.components[1].inverse_transform()?,
                self.components[2].inverse_transform()?,
            ],
        })
    }

    pub fn to_spectral(&self) -> VectorField3 {
        Self { components: self.components.clone().map(|c| c.to_spectral()) }
    }

    pub fn to_physical(&self) -> VectorField3 {
        Self { components: self.components.clone().map(|c| c.to_physical()) }
    }

    pub fn rebox(&self, grid: &Grid) -> Result<VectorField3> {
        Ok(Self {
            components: [
                self.components[0].rebox(grid)?,
                self.components[1].rebox(grid)?,
                self.components[2].rebox(grid)?,
            ],
        })
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    /// `a·self + b·other`, both spectral on the same grid.
    pub fn lincomb(&self, a: f64, other: &VectorField3, b: f64) -> Result<VectorField3> {
        if self.grid() != other.grid() {
            return Err(usage("lincomb of fields on different grids"));
        }
        let lhs = self.spectra()?;
        let rhs = other.spectra()?;
        let out = [0, 1, 2].map(|i| {
            lhs[i].iter().zip(rhs[i]).map(|(x, y)| x * a + y * b).collect::<Vec<_>>()
        });
        Ok(Self::from_spectra(self.grid(), out))
    }

    pub fn scaled(&self, a: f64) -> Result<VectorField3> {
        let s = self.spectra()?;
        let out = [0, 1, 2].map(|i| s[i].iter().map(|x| x * a).collect::<Vec<_>>());
        Ok(Self::from_spectra(self.grid(), out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_constant_fields() {
        let g = Grid::new(8).unwrap();
        let z = ScalarField::zeros_physical(&g).forward_transform().unwrap();
        assert!(z.spectral().unwrap().iter().all(|c| c.norm() == 0.0));

        let one = ScalarField::from_fn(&g, |_, _, _| 1.0).forward_transform().unwrap();
        let c = one.spectral().unwrap();
        assert!((c[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(c[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_has_two_modes_of_half_modulus() {
        let g = Grid::new(32).unwrap();
        let f = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos()).forward_transform().unwrap();
        let c = f.spectral().unwrap();
        // Reduced layout stores +4 only; -4 is its implicit conjugate.
        let at4 = c[g.spectral_index(4, 0, 0)];
        assert!((at4 - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let others = c
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != g.spectral_index(4, 0, 0))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(others < 1e-14);
    }

    #[test]
    fn inverse_of_known_modes() {
        let g = Grid::new(32).unwrap();
        let mut coeffs = g.zero_spectrum();
        coeffs[g.spectral_index(4, 0, 0)] = Complex64::new(0.5, 0.0);
        let f = ScalarField::from_spectral(&g, coeffs).unwrap().inverse_transform().unwrap();
        let expect = ScalarField::from_fn(&g, |x, _, _| (4.0 * x).cos());
        let err = f
            .physical()
            .unwrap()
            .iter()
            .zip(expect.physical().unwrap())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12);

        let mut unit = g.zero_spectrum();
        unit[0] = Complex64::new(1.0, 0.0);
        let f = ScalarField::from_spectral(&g, unit).unwrap().inverse_transform().unwrap();
        assert!(f.physical().unwrap().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn wrong_representation_is_usage_error() {
        let g = Grid::new(8).unwrap();
        let s = ScalarField::zeros_spectral(&g);
        assert!(matches!(s.forward_transform(), Err(crate::Error::Usage(_))));
        let p = ScalarField::zeros_physical(&g);
        assert!(matches!(p.inverse_transform(), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let g = Grid::new(8).unwrap();
        let mut coeffs = g.zero_spectrum();
        coeffs[g.spectral_index(0, 1, 0)] = Complex64::new(1.0, 0.0);
        let f = ScalarField::from_spectral(&g, coeffs).unwrap();
        assert!(matches!(f.inverse_transform(), Err(crate::Error::Validation(_))));
        // Imaginary zero mode is not the spectrum of a real field either.
        let mut coeffs = g.zero_spectrum();
        coeffs[0] = Complex64::new(0.0, 1.0);
        let f = ScalarField::from_spectral(&g, coeffs).unwrap();
        assert!(f.inverse_transform().is_err());
    }

    #[test]
    fn mixed_vector_components_rejected() {
        let g = Grid::new(8).unwrap();
        let h = Grid::with_length(8, PI).unwrap();
        let r = VectorField3::new([
            ScalarField::zeros_spectral(&g),
            ScalarField::zeros_spectral(&h),
            ScalarField::zeros_spectral(&g),
        ]);
        assert!(r.is_err());
        let r = VectorField3::new([
            ScalarField::zeros_spectral(&g),
            ScalarField::zeros_physical(&g),
            ScalarField::zeros_spectral(&g),
        ]);
        assert!(r.is_err());
    }
}
