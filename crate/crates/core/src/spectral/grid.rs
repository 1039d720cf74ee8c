use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::error::{usage, Result};

/// Uniform periodic cube with `n` points per axis and period `length`.
///
/// Physical data is stored x-fastest: `x + n * (y + n * z)`. Spectral data
/// uses the Hermitian-reduced layout `kx + (n/2 + 1) * (ky + n * kz)` with
/// `kx` in `0..=n/2` and `ky, kz` in FFT order.
///
/// Cloning is cheap; FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    length: f64,
    scale: f64,
    /// Signed integer frequency per FFT index.
    freq: Vec<i64>,
    /// Scaled wavenumber for odd-order derivatives (Nyquist mapped to 0).
    k_deriv: Vec<f64>,
    /// Scaled wavenumber including the Nyquist index at +n/2.
    k_full: Vec<f64>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    refined: OnceLock<Grid>,
    shells: OnceLock<Vec<usize>>,
}

impl Grid {
    /// Grid on the default box `[0, 2π)³`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_length(n, 2.0 * PI)
    }

    pub fn with_length(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(usage(format!("grid size must be even and >= 8, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(usage(format!("box length must be positive, got {length}")));
        }
        let scale = 2.0 * PI / length;
        let half = n as i64 / 2;
        let freq: Vec<i64> = (0..n as i64)
            .map(|j| if j <= half { j } else { j - n as i64 })
            .collect();
        let k_full = freq.iter().map(|&f| f as f64 * scale).collect();
        let k_deriv = freq
            .iter()
            .map(|&f| if f == half { 0.0 } else { f as f64 * scale })
            .collect();

        let mut real_planner = RealFftPlanner::<f64>::new();
        let mut planner = FftPlanner::<f64>::new();
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                length,
                scale,
                freq,
                k_deriv,
                k_full,
                r2c: real_planner.plan_fft_forward(n),
                c2r: real_planner.plan_fft_inverse(n),
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
                refined: OnceLock::new(),
                shells: OnceLock::new(),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Wavenumber scale factor `2π / L`.
    pub fn scale(&self) -> f64 {
        self.inner.scale
    }

    /// Number of complex modes along x in the reduced layout.
    pub fn nx_spec(&self) -> usize {
        self.inner.n / 2 + 1
    }

    pub fn physical_len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn spectral_len(&self) -> usize {
        self.nx_spec() * self.inner.n * self.inner.n
    }

    /// Box volume `L³`.
    pub fn volume(&self) -> f64 {
        self.inner.length.powi(3)
    }

    /// Grid spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Signed integer frequency of FFT index `j` (the x axis only uses `0..=n/2`).
    pub fn freq(&self, j: usize) -> i64 {
        self.inner.freq[j]
    }

    pub(crate) fn k_deriv(&self, j: usize) -> f64 {
        self.inner.k_deriv[j]
    }

    pub(crate) fn k_full(&self, j: usize) -> f64 {
        self.inner.k_full[j]
    }

    /// Largest per-axis integer frequency kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        self.inner.n as i64 / 3
    }

    /// Maximum resolved physical wavenumber per axis after dealiasing.
    pub fn k_max_dealiased(&self) -> f64 {
        self.dealias_cutoff() as f64 * self.inner.scale
    }

    /// Largest physical wavenumber magnitude on the grid, `√3 · (n/2) · 2π/L`.
    pub fn max_wavenumber(&self) -> f64 {
        3f64.sqrt() * (self.inner.n / 2) as f64 * self.inner.scale
    }

    /// Decompose a reduced-layout spectral index into `(ix, iy, iz)`.
    #[inline]
    pub fn spectral_coords(&self, idx: usize) -> (usize, usize, usize) {
        let nx = self.nx_spec();
        let n = self.inner.n;
        (idx % nx, (idx / nx) % n, idx / (nx * n))
    }

    #[inline]
    pub fn spectral_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.nx_spec() * (iy + self.inner.n * iz)
    }

    /// Scaled derivative wavevector of a spectral index.
    #[inline]
    pub(crate) fn deriv_vector(&self, idx: usize) -> [f64; 3] {
        let (ix, iy, iz) = self.spectral_coords(idx);
        [self.k_deriv(ix), self.k_deriv(iy), self.k_deriv(iz)]
    }

    /// Squared physical wavenumber magnitude `|ξ|²` of a spectral index.
    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let (ix, iy, iz) = self.spectral_coords(idx);
        let (a, b, c) = (self.k_full(ix), self.k_full(iy), self.k_full(iz));
        a * a + b * b + c * c
    }

    /// Multiplicity of a reduced-layout mode in the full spectrum (1 or 2).
    #[inline]
    pub(crate) fn mode_weight(&self, idx: usize) -> f64 {
        let ix = idx % self.nx_spec();
        if ix == 0 || ix == self.inner.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// The grid with twice the resolution on the same box, built once.
    pub fn refined(&self) -> &Grid {
        self.inner
            .refined
            .get_or_init(|| Grid::with_length(2 * self.inner.n, self.inner.length).expect("valid refined grid"))
    }

    /// Integer `|k|²` of every reduced-layout mode, built once.
    pub(crate) fn shells(&self) -> &[usize] {
        self.inner.shells.get_or_init(|| {
            (0..self.spectral_len())
                .map(|idx| {
                    let (ix, iy, iz) = self.spectral_coords(idx);
                    [ix, iy, iz].iter().map(|&j| (self.freq(j) * self.freq(j)) as usize).sum()
                })
                .collect()
        })
    }

    /// Same shape as `self`, different period.
    pub fn same_n(&self, other: &Grid) -> bool {
        self.inner.n == other.inner.n
    }

    pub(crate) fn r2c(&self) -> &Arc<dyn RealToComplex<f64>> {
        &self.inner.r2c
    }

    pub(crate) fn c2r(&self) -> &Arc<dyn ComplexToReal<f64>> {
        &self.inner.c2r
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.fwd
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inv
    }

    pub(crate) fn zero_spectrum(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.spectral_len()]
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.length == other.inner.length)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(6).is_err());
        assert!(Grid::new(33).is_err());
        assert!(Grid::with_length(16, -1.0).is_err());
        assert!(Grid::new(8).is_ok());
    }

    #[test]
    fn wavenumbers_bounded_by_nyquist() {
        let g = Grid::with_length(16, 3.0).unwrap();
        let bound = PI * 16.0 / 3.0;
        for j in 0..16 {
            assert!(g.k_full(j).abs() <= bound + 1e-12);
        }
        assert_eq!(g.freq(8), 8);
        assert_eq!(g.freq(9), -7);
        assert_eq!(g.k_deriv(8), 0.0);
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(8).unwrap();
        for idx in 0..g.spectral_len() {
            let (a, b, c) = g.spectral_coords(idx);
            assert_eq!(g.spectral_index(a, b, c), idx);
        }
    }
}
