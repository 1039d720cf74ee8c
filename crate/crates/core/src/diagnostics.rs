//! Continuation-criterion integrands, their running time integrals, the
//! maximum-principle monitor `U = exp(-K I(t)) |B|²` and the `H⁴` energy
//! inequality residual.

use crate::dynamics::{energy_flux, Model, SimState};
use crate::error::{usage, Result};
use crate::littlewood_paley::{besov_profile, bmo_norm_estimate};
use crate::spectral::{curl, grad_sup_norm, lp_norm, sobolev_seminorm, sup_norm, vector_gradient, Sampling, VectorField3};

pub fn current(b: &VectorField3) -> Result<VectorField3> {
    curl(b)
}

pub fn vorticity(u: &VectorField3) -> Result<VectorField3> {
    curl(u)
}

/// `‖∇J‖_{L∞}`.
pub fn emhd_criterion_integrand(b: &VectorField3, sampling: Sampling) -> Result<f64> {
    Ok(grad_sup_norm(&current(b)?, sampling))
}

/// `‖ω‖_{L∞} + ‖∇(u - J)‖_{L∞}`.
pub fn hall_criterion_integrand(u: &VectorField3, b: &VectorField3, sampling: Sampling) -> Result<f64> {
    let omega = sup_norm(&vorticity(u)?, sampling);
    let diff = u.lincomb(1.0, &current(b)?, -1.0)?;
    Ok(omega + grad_sup_norm(&diff, sampling))
}

fn cdl_formula(omega_besov: f64, sup_u: f64, sup_b: f64, grad_b: f64) -> f64 {
    let a = sup_u * sup_u + sup_b * sup_b + grad_b * grad_b;
    omega_besov + (1.0 + a) / (1.0 + a.ln_1p())
}

/// `‖ω‖_{B⁰∞∞} + (1 + a) / (1 + log(1 + a))` with
/// `a = ‖u‖²_∞ + ‖B‖²_∞ + ‖∇B‖²_∞`. A missing velocity counts as zero.
pub fn cdl_integrand(u: Option<&VectorField3>, b: &VectorField3, sampling: Sampling) -> Result<f64> {
    let (besov, sup_u) = match u {
        Some(u) => (besov_profile(&vorticity(u)?, sampling).norm(), sup_norm(u, sampling)),
        None => (0.0, 0.0),
    };
    Ok(cdl_formula(besov, sup_u, sup_norm(b, sampling), grad_sup_norm(b, sampling)))
}

/// `‖u‖²_{BMO} + ‖∇B‖²_{BMO}`, the gradient taken entrywise.
pub fn bmo_integrand(u: Option<&VectorField3>, b: &VectorField3) -> Result<f64> {
    let ub = u.map_or(0.0, bmo_norm_estimate);
    let gb = bmo_norm_estimate(&vector_gradient(b)?);
    Ok(ub * ub + gb * gb)
}

/// `‖∇×J‖_{L∞}`.
pub fn selfsim_integrand(b: &VectorField3, sampling: Sampling) -> Result<f64> {
    Ok(sup_norm(&curl(&current(b)?)?, sampling))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPrincipleConfig {
    pub k: f64,
}

impl Default for MaxPrincipleConfig {
    fn default() -> Self {
        Self { k: 6.0 }
    }
}

impl MaxPrincipleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(usage(format!("K must be positive, got {}", self.k)));
        }
        Ok(())
    }
}

/// `exp(-K I) sup_x |B|²`.
pub fn max_principle_u(state: &SimState, i_accum: f64, cfg: &MaxPrincipleConfig, sampling: Sampling) -> f64 {
    let s = sup_norm(&state.b, sampling);
    (-cfg.k * i_accum).exp() * s * s
}

/// Exponents of the `u ∈ L^q_t L^p_x`, `∇B ∈ L^γ_t L^β_x` criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpsExponents {
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for LpsExponents {
    fn default() -> Self {
        Self { p: f64::INFINITY, q: 2.0, beta: f64::INFINITY, gamma: 2.0 }
    }
}

impl LpsExponents {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= 1.0) {
                return Err(usage(format!("lps exponent {name} must be >= 1, got {v}")));
            }
        }
        Ok(())
    }

    /// Violations of `p, β > 3` and `3/p + 2/q ≤ 1`; these are reported,
    /// not rejected.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (sp, tq, a, b) in [("p", "q", self.p, self.q), ("beta", "gamma", self.beta, self.gamma)] {
            if a <= 3.0 {
                out.push(format!("lps exponent {sp} = {a} is not above 3"));
            }
            if 3.0 / a + 2.0 / b > 1.0 {
                out.push(format!("lps exponents violate 3/{sp} + 2/{tq} <= 1 ({sp} = {a}, {tq} = {b})"));
            }
        }
        out
    }
}

/// Trapezoid rule over `(t, f)` samples sorted by `t`.
pub fn trapezoid(samples: &[(f64, f64)]) -> f64 {
    samples.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// `(∫‖u‖_p^q dt, ∫‖∇B‖_β^γ dt)` from `(t, ‖u‖_p, ‖∇B‖_β)` samples.
pub fn lps_accumulate(samples: &[(f64, f64, f64)], q: f64, gamma: f64) -> (f64, f64) {
    let u: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.1.powf(q))).collect();
    let g: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.2.powf(gamma))).collect();
    (trapezoid(&u), trapezoid(&g))
}

/// Quantities entering the `H⁴` inequality at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H4Sample {
    pub t: f64,
    /// `‖∇⁴B‖²` (plus `‖∇⁴u‖²` for Hall-MHD).
    pub energy: f64,
    /// `2‖∇⁵B‖²` for E-MHD, `ν‖∇⁵u‖² + ‖∇⁵B‖²` for Hall-MHD.
    pub dissipation: f64,
    /// Right-hand side without the unknown constant.
    pub bound: f64,
}

struct H4Inputs {
    h4_b: f64,
    h5_b: f64,
    h4_u: f64,
    h5_u: f64,
    sup_b: f64,
    grad_j: f64,
    omega: f64,
    grad_u_minus_j: f64,
    l2_u: f64,
}

fn h4_from(t: f64, model: Model, nu: f64, q: &H4Inputs) -> H4Sample {
    match model {
        Model::Emhd => {
            let e = q.h4_b * q.h4_b;
            let coeff = ((2.0 + q.h4_b).ln() + q.sup_b) * q.grad_j + q.sup_b;
            H4Sample { t, energy: e, dissipation: 2.0 * q.h5_b * q.h5_b, bound: coeff * e }
        }
        Model::HallMhd => {
            let e = q.h4_u * q.h4_u + q.h4_b * q.h4_b;
            let coeff = ((2.0 + q.h4_u + q.h4_b).ln() + q.sup_b + q.l2_u + 1.0) * (q.omega + q.grad_u_minus_j + q.sup_b);
            H4Sample { t, energy: e, dissipation: nu * q.h5_u * q.h5_u + q.h5_b * q.h5_b, bound: coeff * e }
        }
    }
}

pub fn h4_sample(state: &SimState, sampling: Sampling) -> Result<H4Sample> {
    let b = &state.b;
    let j = current(b)?;
    let mut q = H4Inputs {
        h4_b: sobolev_seminorm(b, 4)?,
        h5_b: sobolev_seminorm(b, 5)?,
        h4_u: 0.0,
        h5_u: 0.0,
        sup_b: sup_norm(b, sampling),
        grad_j: grad_sup_norm(&j, sampling),
        omega: 0.0,
        grad_u_minus_j: 0.0,
        l2_u: 0.0,
    };
    if let Some(u) = &state.u {
        q.h4_u = sobolev_seminorm(u, 4)?;
        q.h5_u = sobolev_seminorm(u, 5)?;
        q.omega = sup_norm(&vorticity(u)?, sampling);
        q.grad_u_minus_j = grad_sup_norm(&u.lincomb(1.0, &j, -1.0)?, sampling);
        q.l2_u = sobolev_seminorm(u, 0)?;
    }
    Ok(h4_from(state.t, state.model, state.nu, &q))
}

fn geometric_mean(a: f64, b: f64) -> f64 {
    (a * b).sqrt()
}

/// Ratio of the `H⁴` inequality's left side to its bracket, evaluated at the
/// midpoint of two samples.
///
/// The time derivative uses `√(E₀E₁)·log(E₁/E₀)/dt`, which is exact for
/// exponential decay; it falls back to a plain difference when either energy
/// vanishes. Negative left sides count as 0, as does `0/0`.
pub fn h4_inequality_residual(prev: &H4Sample, next: &H4Sample) -> Result<f64> {
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(usage(format!("H4 residual needs increasing times, got dt = {dt}")));
    }
    let (e0, e1) = (prev.energy, next.energy);
    let deriv = if e0 > 0.0 && e1 > 0.0 { geometric_mean(e0, e1) * (e1 / e0).ln() / dt } else { (e1 - e0) / dt };
    let dissipation = if prev.dissipation > 0.0 && next.dissipation > 0.0 {
        geometric_mean(prev.dissipation, next.dissipation)
    } else {
        0.5 * (prev.dissipation + next.dissipation)
    };
    let lhs = (deriv + dissipation).max(0.0);
    let rhs = 0.5 * (prev.bound + next.bound);
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// Accumulated time integrals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Integrals {
    pub emhd: f64,
    pub hall: f64,
    pub cdl: f64,
    pub bmo: f64,
    pub lps_u: f64,
    pub lps_grad_b: f64,
    pub selfsim: f64,
    /// `I(t)` of the maximum principle: `∫‖∇J‖_∞` for E-MHD,
    /// `∫‖∇(u - J)‖_∞` for Hall-MHD.
    pub max_principle: f64,
}

impl Integrals {
    pub const COUNT: usize = 8;

    pub fn to_array(&self) -> [f64; Self::COUNT] {
        [self.emhd, self.hall, self.cdl, self.bmo, self.lps_u, self.lps_grad_b, self.selfsim, self.max_principle]
    }

    pub fn from_array(a: [f64; Self::COUNT]) -> Self {
        let [emhd, hall, cdl, bmo, lps_u, lps_grad_b, selfsim, max_principle] = a;
        Self { emhd, hall, cdl, bmo, lps_u, lps_grad_b, selfsim, max_principle }
    }
}

/// One diagnostics row. `None` marks velocity quantities of an E-MHD run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub sup_b: f64,
    pub sup_u: Option<f64>,
    pub grad_j_sup: f64,
    pub omega_sup: Option<f64>,
    pub grad_u_minus_j_sup: Option<f64>,
    pub curl_j_sup: f64,
    pub omega_besov: Option<f64>,
    /// `sup_k ‖P_k ω‖_∞` without the low-frequency block.
    pub omega_besov_bands: Option<f64>,
    pub cdl_integrand: f64,
    pub u_bmo: Option<f64>,
    pub grad_b_bmo: f64,
    pub lps_u: Option<f64>,
    pub lps_grad_b: f64,
    pub h4_u: Option<f64>,
    pub h4_b: f64,
    pub u_max: f64,
    /// `H⁴` residual ratio against the previous sample.
    pub h4_ratio: Option<f64>,
    pub integrals: Integrals,
    pub model: Model,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagConfig {
    pub max_principle: MaxPrincipleConfig,
    pub lps: LpsExponents,
    pub sampling: Sampling,
}

impl Default for DiagConfig {
    fn default() -> Self {
        Self { max_principle: MaxPrincipleConfig::default(), lps: LpsExponents::default(), sampling: Sampling::Oversampled }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    values: [f64; Integrals::COUNT],
}

/// Sequential accumulator turning states into [`DiagnosticRecord`]s.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    cfg: DiagConfig,
    integrals: Integrals,
    last: Option<Sample>,
    last_h4: Option<H4Sample>,
    h4_ratio_max: f64,
}

impl Diagnostics {
    pub fn new(cfg: DiagConfig) -> Result<Self> {
        Self::resume(cfg, Integrals::default())
    }

    /// Continue from integrals stored with a checkpoint.
    pub fn resume(cfg: DiagConfig, integrals: Integrals) -> Result<Self> {
        cfg.max_principle.validate()?;
        cfg.lps.validate()?;
        Ok(Self { cfg, integrals, last: None, last_h4: None, h4_ratio_max: 0.0 })
    }

    pub fn integrals(&self) -> Integrals {
        self.integrals
    }

    pub fn config(&self) -> &DiagConfig {
        &self.cfg
    }

    /// Largest `H⁴` residual ratio seen so far.
    pub fn h4_ratio_max(&self) -> f64 {
        self.h4_ratio_max
    }

    pub fn record(&mut self, state: &SimState) -> Result<DiagnosticRecord> {
        let s = self.cfg.sampling;
        let lps = self.cfg.lps;
        let b = &state.b;
        let j = current(b)?;
        let (energy, dissipation) = energy_flux(state)?;
        let sup_b = sup_norm(b, s);
        let grad_j_sup = grad_sup_norm(&j, s);
        let grad_b_sup = grad_sup_norm(b, s);
        let curl_j_sup = sup_norm(&curl(&j)?, s);
        let grad_b = vector_gradient(b)?;
        let grad_b_bmo = bmo_norm_estimate(&grad_b);
        let lps_grad_b = if lps.beta.is_infinite() { grad_b_sup } else { lp_norm(&grad_b, lps.beta, s)? };
        let h4_b = sobolev_seminorm(b, 4)?;

        let mut h4 = H4Inputs {
            h4_b,
            h5_b: sobolev_seminorm(b, 5)?,
            h4_u: 0.0,
            h5_u: 0.0,
            sup_b,
            grad_j: grad_j_sup,
            omega: 0.0,
            grad_u_minus_j: 0.0,
            l2_u: 0.0,
        };

        let mut vel = None;
        if let Some(u) = &state.u {
            let omega = vorticity(u)?;
            let profile = besov_profile(&omega, s);
            let sup_u = sup_norm(u, s);
            let omega_sup = sup_norm(&omega, s);
            let gumj = grad_sup_norm(&u.lincomb(1.0, &j, -1.0)?, s);
            let lps_u = if lps.p.is_infinite() { sup_u } else { lp_norm(u, lps.p, s)? };
            h4.h4_u = sobolev_seminorm(u, 4)?;
            h4.h5_u = sobolev_seminorm(u, 5)?;
            h4.omega = omega_sup;
            h4.grad_u_minus_j = gumj;
            h4.l2_u = sobolev_seminorm(u, 0)?;
            vel = Some((sup_u, omega_sup, gumj, profile, bmo_norm_estimate(u), lps_u));
        }

        let (sup_u, omega_besov) = vel.as_ref().map_or((0.0, 0.0), |v| (v.0, v.3.norm()));
        let cdl = cdl_formula(omega_besov, sup_u, sup_b, grad_b_sup);
        let u_bmo = vel.as_ref().map_or(0.0, |v| v.4);
        let bmo = u_bmo * u_bmo + grad_b_bmo * grad_b_bmo;
        let hall = vel.as_ref().map_or(0.0, |v| v.1 + v.2);
        let mp = match state.model {
            Model::Emhd => grad_j_sup,
            Model::HallMhd => vel.as_ref().map_or(0.0, |v| v.2),
        };
        let lps_u_q = vel.as_ref().map_or(0.0, |v| v.5.powf(lps.q));
        let values = [grad_j_sup, hall, cdl, bmo, lps_u_q, lps_grad_b.powf(lps.gamma), curl_j_sup, mp];

        let sample = Sample { t: state.t, values };
        if let Some(last) = self.last {
            let dt = sample.t - last.t;
            if dt < 0.0 {
                return Err(usage(format!("diagnostics out of order: t = {} after {}", sample.t, last.t)));
            }
            let mut acc = self.integrals.to_array();
            for (a, (x, y)) in acc.iter_mut().zip(last.values.iter().zip(&sample.values)) {
                *a += 0.5 * dt * (x + y);
            }
            self.integrals = Integrals::from_array(acc);
        }
        self.last = Some(sample);

        let h4_now = h4_from(state.t, state.model, state.nu, &h4);
        let h4_ratio = match self.last_h4 {
            Some(prev) if h4_now.t > prev.t => Some(h4_inequality_residual(&prev, &h4_now)?),
            _ => None,
        };
        if let Some(r) = h4_ratio {
            self.h4_ratio_max = self.h4_ratio_max.max(r);
        }
        self.last_h4 = Some(h4_now);

        let u_max = (-self.cfg.max_principle.k * self.integrals.max_principle).exp() * sup_b * sup_b;
        Ok(DiagnosticRecord {
            t: state.t,
            energy,
            dissipation,
            sup_b,
            sup_u: vel.as_ref().map(|v| v.0),
            grad_j_sup,
            omega_sup: vel.as_ref().map(|v| v.1),
            grad_u_minus_j_sup: vel.as_ref().map(|v| v.2),
            curl_j_sup,
            omega_besov: vel.as_ref().map(|v| v.3.norm()),
            omega_besov_bands: vel.as_ref().map(|v| v.3.band_sup()),
            cdl_integrand: cdl,
            u_bmo: vel.as_ref().map(|v| v.4),
            grad_b_bmo,
            lps_u: vel.as_ref().map(|v| v.5),
            lps_grad_b,
            h4_u: state.u.as_ref().map(|_| h4.h4_u),
            h4_b,
            u_max,
            h4_ratio,
            integrals: self.integrals,
            model: state.model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::beltrami;
    use crate::spectral::Grid;

    fn field(g: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> VectorField3 {
        VectorField3::from_fn(g, f).to_spectral()
    }

    fn dist(a: &VectorField3, b: &VectorField3) -> f64 {
        sup_norm(&a.lincomb(1.0, b, -1.0).unwrap(), Sampling::Grid)
    }

    #[test]
    fn current_examples() {
        let g = Grid::new(16).unwrap();
        let b = beltrami(&g, 1.0);
        assert!(dist(&current(&b).unwrap(), &b) < 1e-13);
        let c = field(&g, |_, _, _| [1.0, -2.0, 0.5]);
        assert!(sup_norm(&current(&c).unwrap(), Sampling::Grid) < 1e-14);
        let s = field(&g, |x, _, _| [0.0, 0.0, x.sin()]);
        let want = field(&g, |x, _, _| [0.0, -x.cos(), 0.0]);
        assert!(dist(&vorticity(&s).unwrap(), &want) < 1e-13);
    }

    #[test]
    fn criterion_integrands() {
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let z = VectorField3::zeros_spectral(&g);
        assert_eq!(emhd_criterion_integrand(&z, o).unwrap(), 0.0);
        let t = 0.3f64;
        let b = beltrami(&g, (-t).exp());
        assert!((emhd_criterion_integrand(&b, o).unwrap() - (-t).exp()).abs() < 1e-13);
        let s = field(&g, |x, _, _| [0.0, 0.0, x.sin()]);
        assert!((emhd_criterion_integrand(&s, o).unwrap() - 1.0).abs() < 1e-13);

        assert!((hall_criterion_integrand(&z, &b, o).unwrap() - (-t).exp()).abs() < 1e-13);
        let u = beltrami(&g, 1.0);
        assert!((hall_criterion_integrand(&u, &u, o).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(hall_criterion_integrand(&z, &z, o).unwrap(), 0.0);

        let bt = beltrami(&g, 1.0);
        assert!((selfsim_integrand(&bt, o).unwrap() - 1.0).abs() < 1e-13);
        assert!(selfsim_integrand(&field(&g, |_, _, _| [1.0, 1.0, 1.0]), o).unwrap() < 1e-14);
        assert!((selfsim_integrand(&s, o).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cdl_examples() {
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let z = VectorField3::zeros_spectral(&g);
        assert_eq!(cdl_integrand(Some(&z), &z, o).unwrap(), 1.0);
        let s = field(&g, |x, _, _| [0.0, 0.0, x.sin()]);
        let want = 3.0 / (1.0 + 3f64.ln());
        assert!((cdl_integrand(None, &s, o).unwrap() - want).abs() < 1e-12);
        // Beltrami velocity: ω = u, so the Besov part equals besov(u).
        let u = beltrami(&g, 1.0);
        let besov = besov_profile(&u, o).norm();
        let want = besov + 2.0 / (1.0 + 2f64.ln());
        assert!((cdl_integrand(Some(&u), &z, o).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn bmo_examples() {
        let g = Grid::new(16).unwrap();
        let z = VectorField3::zeros_spectral(&g);
        assert_eq!(bmo_integrand(Some(&z), &z).unwrap(), 0.0);
        let c = field(&g, |_, _, _| [1.0, 2.0, 3.0]);
        assert!(bmo_integrand(Some(&c), &c).unwrap() < 1e-28);
    }

    #[test]
    fn bmo_matches_brute_force() {
        // B = (0, 0, sin x): the only nonzero gradient entry is cos x.
        let n = 64;
        let g = Grid::new(n).unwrap();
        let b = field(&g, |x, _, _| [0.0, 0.0, x.sin()]);
        let h = g.spacing();
        let mut best = 0.0f64;
        let mut side = n;
        while side >= 4 {
            for start in (0..n).step_by(side) {
                let vals: Vec<f64> = (start..start + side).map(|i| (i as f64 * h).cos()).collect();
                let mean = vals.iter().sum::<f64>() / side as f64;
                let osc = vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / side as f64;
                best = best.max(osc);
            }
            side /= 2;
        }
        let got = bmo_integrand(None, &b).unwrap();
        assert!((got - best * best).abs() < 1e-11, "{got} vs {}", best * best);
    }

    #[test]
    fn max_principle_examples() {
        let g = Grid::new(16).unwrap();
        let cfg = MaxPrincipleConfig::default();
        let b = SimState::emhd(beltrami(&g, 2.0)).unwrap();
        assert!((max_principle_u(&b, 0.0, &cfg, Sampling::Oversampled) - 4.0).abs() < 1e-12);
        let t = 0.5f64;
        let bt = SimState::emhd(beltrami(&g, (-t).exp())).unwrap();
        let i = 1.0 - (-t).exp();
        let want = (-6.0 * i).exp() * (-2.0 * t).exp();
        assert!((max_principle_u(&bt, i, &cfg, Sampling::Oversampled) - want).abs() < 1e-14);
        let z = SimState::emhd(VectorField3::zeros_spectral(&g)).unwrap();
        assert_eq!(max_principle_u(&z, 3.0, &cfg, Sampling::Grid), 0.0);
        assert!(MaxPrincipleConfig { k: 0.0 }.validate().is_err());
    }

    #[test]
    fn lps_examples() {
        assert_eq!(lps_accumulate(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)], 2.0, 2.0), (0.0, 0.0));
        let (a, _) = lps_accumulate(&[(0.0, 1.0, 0.0), (0.5, 1.0, 0.0), (1.0, 1.0, 0.0)], 2.0, 2.0);
        assert!((a - 1.0).abs() < 1e-15);
        let tt = 1.0f64;
        let samples: Vec<(f64, f64, f64)> = (0..=2000).map(|i| {
            let t = tt * i as f64 / 2000.0;
            (t, (-t).exp(), 0.0)
        }).collect();
        let (a, _) = lps_accumulate(&samples, 2.0, 2.0);
        let want = (1.0 - (-2.0 * tt).exp()) / 2.0;
        assert!((a - want).abs() < 1e-7);

        assert!(LpsExponents::default().warnings().is_empty());
        assert!(!LpsExponents { p: 3.0, ..LpsExponents::default() }.warnings().is_empty());
        assert!(!LpsExponents { p: 6.0, q: 2.0, ..LpsExponents::default() }.warnings().is_empty());
        assert!(LpsExponents { p: 6.0, q: 4.0, ..LpsExponents::default() }.warnings().is_empty());
        assert!(LpsExponents { q: 0.5, ..LpsExponents::default() }.validate().is_err());
    }

    #[test]
    fn h4_residual_examples() {
        let g = Grid::new(16).unwrap();
        let s = Sampling::Oversampled;
        let mut a = SimState::emhd(beltrami(&g, 1.0)).unwrap();
        let mut b = SimState::emhd(beltrami(&g, (-0.1f64).exp())).unwrap();
        b.t = 0.1;
        let (pa, pb) = (h4_sample(&a, s).unwrap(), h4_sample(&b, s).unwrap());
        assert!(h4_inequality_residual(&pa, &pb).unwrap() < 1e-12);
        assert!(h4_inequality_residual(&pb, &pa).is_err());

        let z = VectorField3::zeros_spectral(&g);
        a = SimState::emhd(z.clone()).unwrap();
        b = SimState::emhd(z).unwrap();
        b.t = 0.1;
        let (pa, pb) = (h4_sample(&a, s).unwrap(), h4_sample(&b, s).unwrap());
        assert_eq!(h4_inequality_residual(&pa, &pb).unwrap(), 0.0);
    }

    #[test]
    fn accumulator_on_decaying_beltrami() {
        let g = Grid::new(16).unwrap();
        let mut d = Diagnostics::new(DiagConfig::default()).unwrap();
        let mut prev_u = f64::INFINITY;
        let mut prev_i = 0.0;
        for i in 0..=10 {
            let t = 0.1 * i as f64;
            let mut st = SimState::emhd(beltrami(&g, (-t).exp())).unwrap();
            st.t = t;
            let r = d.record(&st).unwrap();
            assert!(r.u_max < prev_u);
            assert!(r.integrals.emhd >= prev_i);
            assert!(r.sup_u.is_none() && r.omega_besov.is_none());
            prev_u = r.u_max;
            prev_i = r.integrals.emhd;
        }
        let i = d.integrals();
        assert!((i.emhd - (1.0 - (-1.0f64).exp())).abs() < 1e-3);
        assert_eq!(i.emhd, i.max_principle);
        assert!((i.selfsim - i.emhd).abs() < 1e-12);
        assert!(d.h4_ratio_max() < 1e-12);
    }

    #[test]
    fn triangle_consistency() {
        let g = Grid::new(16).unwrap();
        let u = crate::fields::random_band(&g, 3, 1).unwrap();
        let b = crate::fields::random_band(&g, 3, 2).unwrap();
        let st = SimState::hall_mhd(u.clone(), b.clone(), 0.1).unwrap();
        let mut d = Diagnostics::new(DiagConfig::default()).unwrap();
        let r = d.record(&st).unwrap();
        let bound = grad_sup_norm(&u, Sampling::Oversampled) + grad_sup_norm(&current(&b).unwrap(), Sampling::Oversampled);
        assert!(r.grad_u_minus_j_sup.unwrap() <= bound + 1e-12);
    }
}
