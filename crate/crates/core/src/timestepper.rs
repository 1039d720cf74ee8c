//! Integrating-factor RK4.
//!
//! The diffusion `e^{-|ξ|² dt}` (and `e^{-ν|ξ|² dt}` for `u`) is applied
//! exactly; the dealiased nonlinearity goes through classical RK4 stages on
//! the transformed variable.

use num_complex::Complex64;

use crate::dynamics::{emhd_nonlinear, hallmhd_nonlinear, Model, SimState};
use crate::error::{usage, Error, Result};
use crate::spectral::{sup_norm, Grid, Sampling, VectorField3};

/// Guards the CFL division for a quiescent state.
pub const CFL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Fixed,
    Cfl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub mode: StepMode,
    /// Step used in fixed mode.
    pub dt: f64,
    /// CFL safety factor in `(0, 1]`.
    pub safety: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { mode: StepMode::Cfl, dt: 1e-3, safety: 0.3, dt_min: 1e-10, dt_max: 1e-2 }
    }
}

impl StepControl {
    pub fn fixed(dt: f64) -> Self {
        Self { mode: StepMode::Fixed, dt, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(usage(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(usage(format!("safety must be in (0, 1], got {}", self.safety)));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max && self.dt_max.is_finite()) {
            return Err(usage(format!(
                "need 0 < dt_min <= dt_max, got dt_min = {}, dt_max = {}",
                self.dt_min, self.dt_max
            )));
        }
        Ok(())
    }
}

/// Whistler-type step: `safety / (‖B‖∞ k² + ‖u‖∞ k + ε)` clamped to
/// `[dt_min, dt_max]`, with `k` the largest per-axis wavenumber kept by
/// dealiasing.
pub fn cfl_dt(state: &SimState, control: &StepControl) -> Result<f64> {
    if control.mode != StepMode::Cfl {
        return Err(usage("cfl_dt requires a CFL step control"));
    }
    let k = state.grid().k_max_dealiased();
    let b = sup_norm(&state.b, Sampling::Grid);
    let u = state.u.as_ref().map_or(0.0, |u| sup_norm(u, Sampling::Grid));
    Ok(cfl_formula(b, u, k, control))
}

pub(crate) fn cfl_formula(b_sup: f64, u_sup: f64, k: f64, control: &StepControl) -> f64 {
    let dt = control.safety / (b_sup * k * k + u_sup * k + CFL_EPSILON);
    dt.clamp(control.dt_min, control.dt_max)
}

fn decay_factors(grid: &Grid, coeff: f64, dt: f64) -> Vec<f64> {
    (0..grid.spectral_len()).map(|idx| (-coeff * grid.k2(idx) * dt).exp()).collect()
}

fn scale_by(v: &VectorField3, factors: &[f64]) -> VectorField3 {
    let s = v.spectra().expect("state fields are spectral");
    let out = s.map(|c| c.iter().zip(factors).map(|(z, f)| z * f).collect::<Vec<Complex64>>());
    VectorField3::from_spectra(v.grid(), out)
}

/// `Σ wᵢ vᵢ` over spectral fields on one grid.
fn combine(terms: &[(f64, &VectorField3)]) -> VectorField3 {
    let g = terms[0].1.grid();
    let len = g.spectral_len();
    let mut out = [vec![Complex64::default(); len], vec![Complex64::default(); len], vec![Complex64::default(); len]];
    for (w, v) in terms {
        let s = v.spectra().expect("state fields are spectral");
        for d in 0..3 {
            out[d].iter_mut().zip(s[d]).for_each(|(o, z)| *o += z * *w);
        }
    }
    VectorField3::from_spectra(g, out)
}

/// The evolved fields: `B` and, for Hall-MHD, `u`.
#[derive(Clone)]
struct Fields {
    b: VectorField3,
    u: Option<VectorField3>,
}

struct Factors {
    b_half: Vec<f64>,
    b_full: Vec<f64>,
    u_half: Vec<f64>,
    u_full: Vec<f64>,
}

impl Fields {
    fn nonlinear(&self, model: Model) -> Result<Fields> {
        match model {
            Model::Emhd => Ok(Fields { b: emhd_nonlinear(&self.b)?, u: None }),
            Model::HallMhd => {
                let u = self.u.as_ref().ok_or_else(|| usage("Hall-MHD state without velocity"))?;
                let (nu, nb) = hallmhd_nonlinear(u, &self.b)?;
                Ok(Fields { b: nb, u: Some(nu) })
            }
        }
    }

    fn map2(&self, other: &Fields, f: impl Fn(&VectorField3, &VectorField3, bool) -> VectorField3) -> Fields {
        Fields {
            b: f(&self.b, &other.b, false),
            u: self.u.as_ref().zip(other.u.as_ref()).map(|(a, b)| f(a, b, true)),
        }
    }
}

/// Advance one integrating-factor RK4 step of size `dt`.
///
/// Returns [`Error::BlowUp`] if the result contains NaN or infinity.
pub fn step(state: &SimState, dt: f64) -> Result<SimState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(usage(format!("dt must be positive, got {dt}")));
    }
    let g = state.grid();
    let fac = Factors {
        b_half: decay_factors(g, 1.0, 0.5 * dt),
        b_full: decay_factors(g, 1.0, dt),
        u_half: decay_factors(g, state.nu, 0.5 * dt),
        u_full: decay_factors(g, state.nu, dt),
    };
    let half = |v: &VectorField3, is_u: bool| scale_by(v, if is_u { &fac.u_half } else { &fac.b_half });
    let full = |v: &VectorField3, is_u: bool| scale_by(v, if is_u { &fac.u_full } else { &fac.b_full });

    let y = Fields { b: state.b.clone(), u: state.u.clone() };
    let model = state.model;

    let k1 = y.nonlinear(model)?;
    let y2 = y.map2(&k1, |a, k, is_u| half(&combine(&[(1.0, a), (0.5 * dt, k)]), is_u));
    let k2 = y2.nonlinear(model)?;
    let y3 = y.map2(&k2, |a, k, is_u| combine(&[(1.0, &half(a, is_u)), (0.5 * dt, k)]));
    let k3 = y3.nonlinear(model)?;
    let y4 = y.map2(&k3, |a, k, is_u| combine(&[(1.0, &full(a, is_u)), (dt, &half(k, is_u))]));
    let k4 = y4.nonlinear(model)?;

    let k23 = k2.map2(&k3, |a, b, _| combine(&[(1.0, a), (1.0, b)]));
    let k14 = k1.map2(&k4, |a, b, is_u| combine(&[(1.0, &full(a, is_u)), (1.0, b)]));
    let incr = k14.map2(&k23, |a, b, is_u| combine(&[(1.0, a), (2.0, &half(b, is_u))]));
    let next = y.map2(&incr, |a, k, is_u| combine(&[(1.0, &full(a, is_u)), (dt / 6.0, k)]));

    let out = SimState { t: state.t + dt, b: next.b, u: next.u, model, nu: state.nu };
    if !out.is_finite() {
        return Err(Error::BlowUp { t: out.t, reason: "non-finite field values after step".into() });
    }
    Ok(out)
}

/// Result of [`advance_to`].
#[derive(Debug, Clone)]
pub struct Advance {
    /// Final state, or the last finite state if the run blew up.
    pub state: SimState,
    pub steps: usize,
    /// Set when a step produced non-finite values.
    pub blow_up: Option<String>,
}

/// Step from `state.t` to exactly `t_target`, shortening the final step.
pub fn advance_to(state: SimState, t_target: f64, control: &StepControl) -> Result<Advance> {
    control.validate()?;
    let mut state = state;
    let mut steps = 0;
    let eps = 1e-12 * t_target.abs().max(1.0);
    while t_target - state.t > eps {
        let remaining = t_target - state.t;
        let dt = match control.mode {
            StepMode::Fixed => control.dt,
            StepMode::Cfl => cfl_dt(&state, control)?,
        };
        let last = dt >= remaining;
        let dt = dt.min(remaining);
        match step(&state, dt) {
            Ok(mut next) => {
                if last {
                    next.t = t_target;
                }
                state = next;
                steps += 1;
            }
            Err(Error::BlowUp { t, reason }) => {
                return Ok(Advance { state, steps, blow_up: Some(format!("{reason} (t = {t})")) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Advance { state, steps, blow_up: None })
}
