//! Right-hand sides of resistive E-MHD and Hall-MHD in spectral form.
//!
//! Quadratic products are formed pointwise on the grid, transformed back and
//! truncated by the 2/3 rule. On dealiased inputs this reproduces the
//! Galerkin-projected product exactly, so the curl form and the advective
//! form of the Hall term agree to roundoff.

use num_complex::Complex64;

use crate::error::{usage, validation, Result};
use crate::spectral::ops::{curl_spectra, dealias_in_place, derivative, divergence_spectrum, laplacian_in_place, leray_in_place};
use crate::spectral::{forward, inner_product, inverse, sobolev_seminorm, Grid, Representation, VectorField3};

/// Divergence tolerance, relative to `max(1, Σ|ξ||v̂|)`.
pub const DIVERGENCE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Electron MHD: magnetic field only.
    Emhd,
    /// Hall-MHD: velocity and magnetic field.
    HallMhd,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Emhd => "emhd",
            Model::HallMhd => "hallmhd",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "emhd" => Some(Model::Emhd),
            "hallmhd" => Some(Model::HallMhd),
            _ => None,
        }
    }
}

/// Solver state. Resistivity is fixed to 1; `nu` is the Hall-MHD viscosity.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub b: VectorField3,
    pub u: Option<VectorField3>,
    pub model: Model,
    pub nu: f64,
}

impl SimState {
    pub fn emhd(b: VectorField3) -> Result<Self> {
        let s = Self { t: 0.0, b: b.to_spectral(), u: None, model: Model::Emhd, nu: 0.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn hall_mhd(u: VectorField3, b: VectorField3, nu: f64) -> Result<Self> {
        let s = Self { t: 0.0, b: b.to_spectral(), u: Some(u.to_spectral()), model: Model::HallMhd, nu };
        s.validate()?;
        Ok(s)
    }

    pub fn grid(&self) -> &Grid {
        self.b.grid()
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.representation() != Representation::Spectral {
            return Err(usage("state fields must be spectral"));
        }
        match (self.model, &self.u) {
            (Model::Emhd, Some(_)) => return Err(usage("E-MHD state carries no velocity")),
            (Model::HallMhd, None) => return Err(usage("Hall-MHD state requires a velocity")),
            _ => {}
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(usage(format!("viscosity must be >= 0, got {}", self.nu)));
        }
        check_divergence_free(&self.b, "B")?;
        if let Some(u) = &self.u {
            if u.grid() != self.b.grid() || u.representation() != Representation::Spectral {
                return Err(usage("u and B must share a grid and be spectral"));
            }
            check_divergence_free(u, "u")?;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.u.as_ref().is_none_or(VectorField3::is_finite)
    }
}

/// Reject fields whose divergence exceeds [`DIVERGENCE_TOL`] in max norm.
pub fn check_divergence_free(v: &VectorField3, name: &str) -> Result<()> {
    let g = v.grid();
    let s = v.spectra()?;
    let div = divergence_spectrum(g, s);
    let div_max = inverse(g, &div).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale: f64 = (0..g.spectral_len())
        .map(|idx| {
            let k = g.deriv_vector(idx);
            let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            g.mode_weight(idx) * kn * (s[0][idx].norm() + s[1][idx].norm() + s[2][idx].norm())
        })
        .sum();
    if div_max > DIVERGENCE_TOL * scale.max(1.0) || div_max.is_nan() {
        return Err(validation(format!("{name} is not divergence-free (max |div| = {div_max:e})")));
    }
    Ok(())
}

type Spectra = [Vec<Complex64>; 3];
type Values = [Vec<f64>; 3];

fn to_values(g: &Grid, s: [&[Complex64]; 3]) -> Values {
    s.map(|c| inverse(g, c))
}

/// Transform a pointwise product back and apply the 2/3 rule.
fn dealiased(g: &Grid, v: &Values) -> Spectra {
    [0, 1, 2].map(|i| {
        let mut c = forward(g, &v[i]);
        dealias_in_place(g, &mut c);
        c
    })
}

fn cross(a: &Values, b: &Values) -> Values {
    let n = a[0].len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
        out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
        out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
    }
    out
}

/// Physical values of `∂_i w_j`, indexed `[i][j]`.
fn gradient_values(g: &Grid, w: [&[Complex64]; 3]) -> [Values; 3] {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| inverse(g, &derivative(g, w[j], i))))
}

/// Accumulate `sign · (a·∇) w` into `out`, given `grad_w[i][j] = ∂_i w_j`.
fn add_advection(out: &mut Values, sign: f64, a: &Values, grad_w: &[Values; 3]) {
    let n = a[0].len();
    for j in 0..3 {
        for p in 0..n {
            out[j][p] += sign * (a[0][p] * grad_w[0][j][p] + a[1][p] * grad_w[1][j][p] + a[2][p] * grad_w[2][j][p]);
        }
    }
}

fn hall_term_spectra(g: &Grid, b: [&[Complex64]; 3]) -> Spectra {
    let j = curl_spectra(g, b);
    let jv = to_values(g, [&j[0], &j[1], &j[2]]);
    let bv = to_values(g, b);
    let jxb = dealiased(g, &cross(&jv, &bv));
    curl_spectra(g, [&jxb[0], &jxb[1], &jxb[2]])
}

fn zeros(n: usize) -> Values {
    [vec![0.0; n], vec![0.0; n], vec![0.0; n]]
}

fn refs(s: &Spectra) -> [&[Complex64]; 3] {
    [&s[0], &s[1], &s[2]]
}

/// `∇×((∇×B)×B)` with the cross product dealiased.
pub fn hall_term(b: &VectorField3) -> Result<VectorField3> {
    check_divergence_free(b, "B")?;
    let g = b.grid();
    Ok(VectorField3::from_spectra(g, hall_term_spectra(g, b.spectra()?)))
}

/// Nonlinear part of the E-MHD right-hand side, `-P[∇×(J×B)]`.
pub(crate) fn emhd_nonlinear(b: &VectorField3) -> Result<VectorField3> {
    let g = b.grid();
    let mut h = hall_term_spectra(g, b.spectra()?);
    h.iter_mut().for_each(|c| c.iter_mut().for_each(|z| *z = -*z));
    let [a, bb, c] = &mut h;
    leray_in_place(g, [a, bb, c]);
    Ok(VectorField3::from_spectra(g, h))
}

fn add_laplacian(g: &Grid, out: &mut Spectra, field: [&[Complex64]; 3], coeff: f64) {
    for i in 0..3 {
        let mut lap = field[i].to_vec();
        laplacian_in_place(g, &mut lap, coeff);
        out[i].iter_mut().zip(lap).for_each(|(o, l)| *o += l);
    }
}

fn project(g: &Grid, mut s: Spectra) -> Spectra {
    let [a, b, c] = &mut s;
    leray_in_place(g, [a, b, c]);
    s
}

/// `∂_t B = -∇×((∇×B)×B) + ΔB`, Leray-projected.
pub fn emhd_rhs(b: &VectorField3) -> Result<VectorField3> {
    check_divergence_free(b, "B")?;
    let g = b.grid();
    let bs = b.spectra()?;
    let mut out = hall_term_spectra(g, bs);
    out.iter_mut().for_each(|c| c.iter_mut().for_each(|z| *z = -*z));
    add_laplacian(g, &mut out, bs, 1.0);
    Ok(VectorField3::from_spectra(g, project(g, out)))
}

/// Advective form `-(B·∇)J + (J·∇)B + ΔB` of the E-MHD right-hand side.
pub fn emhd_rhs_advective(b: &VectorField3) -> Result<VectorField3> {
    check_divergence_free(b, "B")?;
    let g = b.grid();
    let bs = b.spectra()?;
    let j = curl_spectra(g, bs);
    let bv = to_values(g, bs);
    let jv = to_values(g, refs(&j));
    let grad_j = gradient_values(g, refs(&j));
    let grad_b = gradient_values(g, bs);
    let mut prod = zeros(g.physical_len());
    add_advection(&mut prod, -1.0, &bv, &grad_j);
    add_advection(&mut prod, 1.0, &jv, &grad_b);
    let mut out = dealiased(g, &prod);
    add_laplacian(g, &mut out, bs, 1.0);
    Ok(VectorField3::from_spectra(g, project(g, out)))
}

/// Nonlinear parts `(N_u, N_B)` of Hall-MHD, both Leray-projected:
/// `N_u = P[-(u·∇)u + (B·∇)B]`, `N_B = P[-(u·∇)B + (B·∇)u - ∇×(J×B)]`.
///
/// Evaluated in rotational form, `N_u = P[u×ω + J×B]` and
/// `N_B = ∇×((u - J)×B)`: the gradient terms drop under the projection and
/// `∇×(u×B) = (B·∇)u - (u·∇)B` for divergence-free fields. For dealiased
/// inputs this equals the advective form to rounding and needs 18 transforms
/// instead of 39.
pub(crate) fn hallmhd_nonlinear(u: &VectorField3, b: &VectorField3) -> Result<(VectorField3, VectorField3)> {
    let g = b.grid();
    let us = u.spectra()?;
    let bs = b.spectra()?;
    let omega = curl_spectra(g, us);
    let j = curl_spectra(g, bs);
    let uv = to_values(g, us);
    let bv = to_values(g, bs);
    let wv = to_values(g, refs(&omega));
    let jv = to_values(g, refs(&j));

    let mut pu = cross(&uv, &wv);
    let jxb = cross(&jv, &bv);
    for i in 0..3 {
        pu[i].iter_mut().zip(&jxb[i]).for_each(|(p, q)| *p += q);
    }
    let du = project(g, dealiased(g, &pu));

    let mut u_minus_j = uv;
    for i in 0..3 {
        u_minus_j[i].iter_mut().zip(&jv[i]).for_each(|(a, c)| *a -= c);
    }
    let e = dealiased(g, &cross(&u_minus_j, &bv));
    let db = project(g, curl_spectra(g, refs(&e)));
    Ok((VectorField3::from_spectra(g, du), VectorField3::from_spectra(g, db)))
}

/// `(∂_t u, ∂_t B)` for Hall-MHD; pressure is eliminated by the projection.
pub fn hallmhd_rhs(state: &SimState) -> Result<(VectorField3, VectorField3)> {
    let u = state.u.as_ref().ok_or_else(|| usage("Hall-MHD right-hand side needs a velocity"))?;
    check_divergence_free(u, "u")?;
    check_divergence_free(&state.b, "B")?;
    let g = state.grid();
    let (nu_term, nb_term) = hallmhd_nonlinear(u, &state.b)?;
    let mut du: Spectra = nu_term.spectra()?.map(<[Complex64]>::to_vec);
    let mut db: Spectra = nb_term.spectra()?.map(<[Complex64]>::to_vec);
    add_laplacian(g, &mut du, u.spectra()?, state.nu);
    add_laplacian(g, &mut db, state.b.spectra()?, 1.0);
    Ok((VectorField3::from_spectra(g, project(g, du)), VectorField3::from_spectra(g, project(g, db))))
}

/// `(½(‖u‖² + ‖B‖²), ν‖∇u‖² + ‖∇B‖²)` with `L²` norms over the box.
pub fn energy_flux(state: &SimState) -> Result<(f64, f64)> {
    let b0 = sobolev_seminorm(&state.b, 0)?;
    let b1 = sobolev_seminorm(&state.b, 1)?;
    let (u0, u1) = match &state.u {
        Some(u) => (sobolev_seminorm(u, 0)?, sobolev_seminorm(u, 1)?),
        None => (0.0, 0.0),
    };
    Ok((0.5 * (u0 * u0 + b0 * b0), state.nu * u1 * u1 + b1 * b1))
}

/// `⟨(B·∇)B, u⟩ + ⟨(B·∇)u, B⟩` with dealiased products; vanishes for
/// divergence-free `B`.
pub fn hall_cross_terms(u: &VectorField3, b: &VectorField3) -> Result<f64> {
    let g = b.grid();
    let us = u.spectra()?;
    let bs = b.spectra()?;
    let bv = to_values(g, bs);
    let mut p1 = zeros(g.physical_len());
    add_advection(&mut p1, 1.0, &bv, &gradient_values(g, bs));
    let mut p2 = zeros(g.physical_len());
    add_advection(&mut p2, 1.0, &bv, &gradient_values(g, us));
    let t1 = VectorField3::from_spectra(g, dealiased(g, &p1));
    let t2 = VectorField3::from_spectra(g, dealiased(g, &p2));
    Ok(inner_product(&t1, u)? + inner_product(&t2, b)?)
}
