//! 3-D real-to-complex transforms on the reduced layout.
//!
//! The forward transform divides by `n³`, so the zero mode is the grid mean
//! and the inverse is a plain (unnormalized) synthesis.

use num_complex::Complex64;

use super::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn forward(grid: &Grid, phys: &[f64]) -> Vec<Complex64> {
    let n = grid.n();
    let nx = grid.nx_spec();
    debug_assert_eq!(phys.len(), grid.physical_len());
    let mut spec = grid.zero_spectrum();

    let r2c = grid.r2c();
    let mut row = r2c.make_input_vec();
    let mut row_out = r2c.make_output_vec();
    let mut scratch = r2c.make_scratch_vec();
    for line in 0..n * n {
        row.copy_from_slice(&phys[line * n..(line + 1) * n]);
        r2c.process_with_scratch(&mut row, &mut row_out, &mut scratch)
            .expect("r2c buffer sizes");
        spec[line * nx..(line + 1) * nx].copy_from_slice(&row_out);
    }

    transform_yz(grid, &mut spec, true);

    let norm = 1.0 / (n * n * n) as f64;
    for c in spec.iter_mut() {
        *c *= norm;
    }
    spec
}

/// Synthesis without any Hermitian check. Imaginary parts of the `kx = 0`
/// and `kx = n/2` lines are discarded after the y/z passes.
pub(crate) fn inverse(grid: &Grid, spec: &[Complex64]) -> Vec<f64> {
    inverse_owned(grid, spec.to_vec())
}

/// [`inverse`] reusing the caller's buffer as workspace.
pub(crate) fn inverse_owned(grid: &Grid, mut work: Vec<Complex64>) -> Vec<f64> {
    let n = grid.n();
    let nx = grid.nx_spec();
    debug_assert_eq!(work.len(), grid.spectral_len());
    transform_yz(grid, &mut work, false);

    let c2r = grid.c2r();
    let mut row = c2r.make_input_vec();
    let mut row_out = c2r.make_output_vec();
    let mut scratch = c2r.make_scratch_vec();
    let mut phys = vec![0.0; grid.physical_len()];
    for line in 0..n * n {
        row.copy_from_slice(&work[line * nx..(line + 1) * nx]);
        row[0].im = 0.0;
        row[nx - 1].im = 0.0;
        c2r.process_with_scratch(&mut row, &mut row_out, &mut scratch)
            .expect("c2r input is real at DC and Nyquist");
        phys[line * n..(line + 1) * n].copy_from_slice(&row_out);
    }
    phys
}

/// In the inverse direction, `kx` columns beyond the last nonzero one and
/// empty `kz` planes are skipped; band-limited and zero-padded spectra are
/// mostly empty.
fn transform_yz(grid: &Grid, spec: &mut [Complex64], forward: bool) {
    let n = grid.n();
    let nx = grid.nx_spec();
    let fft = if forward { grid.fft_forward() } else { grid.fft_inverse() };
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    let mut live = vec![true; n];
    let mut active = nx;
    if !forward {
        active = 0;
        for (iz, plane) in spec.chunks(nx * n).enumerate() {
            let width = plane.chunks(nx).map(|row| row.iter().rposition(|c| *c != ZERO).map_or(0, |i| i + 1)).max();
            let width = width.unwrap_or(0);
            live[iz] = width > 0;
            active = active.max(width);
        }
    }
    if active == 0 {
        return;
    }
    let mut lines = vec![ZERO; active * n];

    // y axis: for each z-plane, gather the active lines of length n.
    for iz in 0..n {
        if !live[iz] {
            continue;
        }
        let plane = &mut spec[iz * nx * n..(iz + 1) * nx * n];
        for iy in 0..n {
            for ix in 0..active {
                lines[ix * n + iy] = plane[ix + nx * iy];
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for iy in 0..n {
            for ix in 0..active {
                plane[ix + nx * iy] = lines[ix * n + iy];
            }
        }
    }

    // z axis: for each y, gather lines of stride nx * n.
    for iy in 0..n {
        for iz in 0..n {
            let base = nx * (iy + n * iz);
            for ix in 0..active {
                lines[ix * n + iz] = spec[base + ix];
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for iz in 0..n {
            let base = nx * (iy + n * iz);
            for ix in 0..active {
                spec[base + ix] = lines[ix * n + iz];
            }
        }
    }
}

/// Embed a spectrum into the grid of size `2n` on the same box.
///
/// Nyquist coefficients are split evenly between `±n/2` on each axis so
/// the padded synthesis interpolates the original grid values.
pub(crate) fn zero_pad(grid: &Grid, fine: &Grid, spec: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let half = n / 2;
    let big = fine.n();
    let mut out = fine.zero_spectrum();
    for (idx, &c) in spec.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let (ix, iy, iz) = grid.spectral_coords(idx);
        let mut value = c;
        if ix == half {
            value *= 0.5;
        }
        let ys = targets(iy, half, n, big);
        let zs = targets(iz, half, n, big);
        let ny = if ys.1.is_some() { 0.5 } else { 1.0 };
        let nz = if zs.1.is_some() { 0.5 } else { 1.0 };
        let value = value * ny * nz;
        for jy in [Some(ys.0), ys.1].into_iter().flatten() {
            for jz in [Some(zs.0), zs.1].into_iter().flatten() {
                out[fine.spectral_index(ix, jy, jz)] += value;
            }
        }
    }
    out
}

fn targets(j: usize, half: usize, n: usize, big: usize) -> (usize, Option<usize>) {
    if j < half {
        (j, None)
    } else if j == half {
        (half, Some(big - half))
    } else {
        (j + big - n, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_phys(grid: &Grid, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..grid.physical_len()).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn padded_synthesis_matches_original_points() {
        // Includes Nyquist content: white noise excites every mode.
        let grid = Grid::new(8).unwrap();
        let fine = grid.refined().clone();
        let phys = random_phys(&grid, 3);
        let spec = forward(&grid, &phys);
        let padded = zero_pad(&grid, &fine, &spec);
        let fine_phys = inverse(&fine, &padded);
        let n = grid.n();
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    let a = phys[x + n * (y + n * z)];
                    let b = fine_phys[2 * x + 2 * n * (2 * y + 2 * n * 2 * z)];
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn direct_summation_oracle() {
        // Brute-force DFT of one mode against the fast path.
        let grid = Grid::new(8).unwrap();
        let phys = random_phys(&grid, 11);
        let spec = forward(&grid, &phys);
        let n = grid.n();
        let (kx, ky, kz) = (2i64, -3i64, 1i64);
        let mut acc = Complex64::new(0.0, 0.0);
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    let phase = -2.0 * std::f64::consts::PI
                        * (kx * x as i64 + ky * y as i64 + kz * z as i64) as f64
                        / n as f64;
                    acc += phys[x + n * (y + n * z)] * Complex64::from_polar(1.0, phase);
                }
            }
        }
        acc /= (n * n * n) as f64;
        let got = spec[grid.spectral_index(2, n - 3, 1)];
        assert!((acc - got).norm() < 1e-14);
    }

    #[test]
    fn pruned_synthesis_matches_direct_sum() {
        // Sparse spectrum: only kx <= 2 and two kz planes carry data.
        let grid = Grid::new(8).unwrap();
        let n = grid.n();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut spec = grid.zero_spectrum();
        for (kx, ky, kz) in [(1usize, 3usize, 2usize), (2, 6, 2), (1, 0, 7), (2, 1, 7)] {
            spec[grid.spectral_index(kx, ky, kz)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let phys = inverse(&grid, &spec);
        for (x, y, z) in [(0usize, 0usize, 0usize), (3, 5, 1), (7, 2, 6)] {
            let mut want = 0.0;
            for (idx, c) in spec.iter().enumerate() {
                if *c == ZERO {
                    continue;
                }
                let (ix, iy, iz) = grid.spectral_coords(idx);
                let k = [grid.freq(ix), grid.freq(iy), grid.freq(iz)];
                let phase = 2.0 * std::f64::consts::PI * (k[0] * x as i64 + k[1] * y as i64 + k[2] * z as i64) as f64 / n as f64;
                // kx > 0 modes stand for themselves and their conjugates.
                want += 2.0 * (c * Complex64::from_polar(1.0, phase)).re;
            }
            let got = phys[x + n * (y + n * z)];
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }
}
