//! Divergence-free test and initial fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{usage, validation, Result};
use crate::spectral::ops::leray_in_place;
use crate::spectral::{curl, sup_norm, Grid, Sampling, VectorField3};

/// `amplitude · (sin z, cos z, 0)`: a curl eigenfield with eigenvalue 1.
pub fn beltrami(grid: &Grid, amplitude: f64) -> VectorField3 {
    let s = grid.scale();
    VectorField3::from_fn(grid, |_, _, z| [amplitude * (s * z).sin(), amplitude * (s * z).cos(), 0.0]).to_spectral()
}

/// Arnold–Beltrami–Childress field
/// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
///
/// The sampled field is checked to satisfy `∇×v = (2π/L) v` to `1e-12`.
pub fn abc(grid: &Grid, a: f64, b: f64, c: f64) -> Result<VectorField3> {
    let s = grid.scale();
    let v = VectorField3::from_fn(grid, |x, y, z| {
        let (x, y, z) = (s * x, s * y, s * z);
        [a * z.sin() + c * y.cos(), b * x.sin() + a * z.cos(), c * y.sin() + b * x.cos()]
    })
    .to_spectral();
    let residual = sup_norm(&curl(&v)?.lincomb(1.0, &v, -s)?, Sampling::Grid);
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
    if residual > 1e-12 * scale {
        return Err(validation(format!("ABC field is not Beltrami on this grid (residual {residual:e})")));
    }
    Ok(v)
}

/// Canonical half of the integer frequencies with `0 < |k| ≤ band`, in a
/// fixed order that does not depend on the grid size.
fn half_ball(band: i64) -> impl Iterator<Item = [i64; 3]> {
    let r2 = band * band;
    (-band..=band).flat_map(move |kz| {
        (-band..=band).flat_map(move |ky| {
            (0..=band).filter_map(move |kx| {
                let k = [kx, ky, kz];
                let canonical = kx > 0 || (kx == 0 && (ky > 0 || (ky == 0 && kz > 0)));
                (canonical && kx * kx + ky * ky + kz * kz <= r2).then_some(k)
            })
        })
    })
}

fn place(grid: &Grid, spectra: &mut [Vec<Complex64>; 3], k: [i64; 3], value: [Complex64; 3]) {
    let n = grid.n() as i64;
    let wrap = |f: i64| f.rem_euclid(n) as usize;
    let idx = grid.spectral_index(k[0] as usize, wrap(k[1]), wrap(k[2]));
    for d in 0..3 {
        spectra[d][idx] = value[d];
    }
    if k[0] == 0 {
        let mirror = grid.spectral_index(0, wrap(-k[1]), wrap(-k[2]));
        for d in 0..3 {
            spectra[d][mirror] = value[d].conj();
        }
    }
}

/// Band-limited random divergence-free field with `‖v‖_{L∞} = 1`.
///
/// Unit-normal complex coefficients are drawn for every integer frequency
/// `0 < |k| ≤ band` (same draws on any grid that resolves the band), then
/// Hermitian-symmetrized, Leray-projected and normalized.
pub fn random_band(grid: &Grid, band: u32, seed: u64) -> Result<VectorField3> {
    let band = band as i64;
    if band < 1 || band > grid.dealias_cutoff() {
        return Err(usage(format!(
            "band must be in 1..={} for n = {}, got {band}",
            grid.dealias_cutoff(),
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectra = [grid.zero_spectrum(), grid.zero_spectrum(), grid.zero_spectrum()];
    for k in half_ball(band) {
        let value = [0, 1, 2].map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        place(grid, &mut spectra, k, value);
    }
    let [a, b, c] = &mut spectra;
    leray_in_place(grid, [a, b, c]);
    let v = VectorField3::from_spectra(grid, spectra);
    let sup = sup_norm(&v, Sampling::Oversampled);
    v.scaled(1.0 / sup)
}

/// `a cos(k·x) + b sin(k·x)` with random `a, b ⊥ k`, normalized to unit
/// supremum.
pub fn single_mode(grid: &Grid, k: [i64; 3], seed: u64) -> Result<VectorField3> {
    let cut = grid.dealias_cutoff();
    if k == [0, 0, 0] || k.iter().any(|c| c.abs() > cut) {
        return Err(usage(format!("mode {k:?} is zero or not resolved on n = {}", grid.n())));
    }
    // Use the canonical representative so the mode lands in the reduced layout.
    let k = if k[0] < 0 || (k[0] == 0 && (k[1] < 0 || (k[1] == 0 && k[2] < 0))) { k.map(|c| -c) } else { k };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = [0, 1, 2].map(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let mut spectra = [grid.zero_spectrum(), grid.zero_spectrum(), grid.zero_spectrum()];
    place(grid, &mut spectra, k, value);
    let [a, b, c] = &mut spectra;
    leray_in_place(grid, [a, b, c]);
    let v = VectorField3::from_spectra(grid, spectra);
    let sup = sup_norm(&v, Sampling::Oversampled);
    if sup == 0.0 {
        return Err(validation("single-mode draw projected to zero"));
    }
    v.scaled(1.0 / sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::check_divergence_free;

    #[test]
    fn random_band_is_reproducible_and_solenoidal() {
        let g = Grid::new(16).unwrap();
        let a = random_band(&g, 4, 7).unwrap();
        let b = random_band(&g, 4, 7).unwrap();
        assert_eq!(a, b);
        check_divergence_free(&a, "v").unwrap();
        assert!((sup_norm(&a, Sampling::Oversampled) - 1.0).abs() < 1e-12);
        assert_ne!(a, random_band(&g, 4, 8).unwrap());
        assert!(random_band(&g, 6, 1).is_err());
        // Physical values are real: inverse transform passes the symmetry check.
        a.inverse_transform().unwrap();
    }

    #[test]
    fn random_band_is_grid_independent() {
        let coarse = Grid::new(16).unwrap();
        let fine = Grid::new(32).unwrap();
        let a = random_band(&coarse, 3, 5).unwrap().to_physical();
        let b = random_band(&fine, 3, 5).unwrap().to_physical();
        let pa = a.component(1).physical().unwrap();
        let pb = b.component(1).physical().unwrap();
        // Coarse point (x, y, z) sits at fine point (2x, 2y, 2z). The two
        // normalizations differ only through the sampled supremum.
        let ratio = pb[0] / pa[0];
        for (x, y, z) in [(1usize, 2usize, 3usize), (5, 0, 9), (15, 15, 15)] {
            let va = pa[x + 16 * (y + 16 * z)];
            let vb = pb[2 * x + 32 * (2 * y + 32 * 2 * z)];
            assert!((vb - ratio * va).abs() < 1e-12);
        }
        assert!((ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn abc_is_beltrami() {
        let g = Grid::new(16).unwrap();
        let v = abc(&g, 1.0, 1.0, 1.0).unwrap();
        check_divergence_free(&v, "abc").unwrap();
        let v = abc(&g, 0.5, 2.0, -1.0).unwrap();
        check_divergence_free(&v, "abc").unwrap();
    }

    #[test]
    fn single_mode_basic() {
        let g = Grid::new(16).unwrap();
        let v = single_mode(&g, [0, -2, 1], 3).unwrap();
        check_divergence_free(&v, "mode").unwrap();
        assert!((sup_norm(&v, Sampling::Oversampled) - 1.0).abs() < 1e-12);
        assert!(single_mode(&g, [0, 0, 0], 3).is_err());
        assert!(single_mode(&g, [9, 0, 0], 3).is_err());
    }
}
