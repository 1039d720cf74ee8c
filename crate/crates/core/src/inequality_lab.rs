//! Empirical checks of the Besov, interpolation and logarithmic gradient
//! bounds over corpora of divergence-free fields, plus the resistive scaling
//! check for `‖∇J‖_∞`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::current;
use crate::dynamics::check_divergence_free;
use crate::error::{usage, validation, Result};
use crate::fields::{abc, beltrami, random_band, single_mode};
use crate::littlewood_paley::besov_norm;
use crate::spectral::{
    curl, grad_sup_norm, hessian_sup_norm, l2_norm, sobolev_seminorm, sup_norm, vector_gradient, Grid, Sampling,
    VectorField3,
};

/// `‖∇v‖_∞ ≲ ‖v‖_∞^{1/2} ‖∇(∇×v)‖_{B⁰∞∞}^{1/2}`.
pub const GRAD_INTERPOLATION: &str = "grad_interpolation";
/// `‖∇v‖_∞ ≲ ‖∇×v‖_{B⁰∞∞} log(2 + ‖∇⁴v‖₂) + ‖v‖_p`, `p = 2`.
pub const BKM_GRAD_L2: &str = "bkm_grad_p2";
pub const BKM_GRAD_LINF: &str = "bkm_grad_pinf";
/// `‖∇²v‖_∞ ≲ ‖∇(∇×v)‖_{B⁰∞∞} log(2 + ‖∇⁴v‖₂) + ‖v‖_p`, `p = 2`.
pub const BKM_HESS_L2: &str = "bkm_hess_p2";
pub const BKM_HESS_LINF: &str = "bkm_hess_pinf";
/// `‖f‖_{B⁰∞∞} ≲ ‖f‖_∞`.
pub const BESOV_SUP: &str = "besov_sup";
/// `‖∇v‖_{B⁰∞∞} ≲ ‖∇×v‖_{B⁰∞∞}` for divergence-free `v`.
pub const BESOV_GRAD_CURL: &str = "besov_grad_curl";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    RandomBand,
    Beltrami,
    Abc,
    SingleMode,
}

impl Generator {
    pub fn tag(self) -> &'static str {
        match self {
            Generator::RandomBand => "random_band",
            Generator::Beltrami => "beltrami",
            Generator::Abc => "abc",
            Generator::SingleMode => "single_mode",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [Generator::RandomBand, Generator::Beltrami, Generator::Abc, Generator::SingleMode]
            .into_iter()
            .find(|g| g.tag() == tag)
    }
}

/// A reproducible family of fields. Field `i` is drawn from seed `seed + i`,
/// so the same corpus on a finer grid holds the same functions.
#[derive(Debug, Clone)]
pub struct FieldCorpus {
    pub seed: u64,
    pub count: usize,
    pub generator: Generator,
    pub band: u32,
    pub grid: Grid,
}

impl FieldCorpus {
    pub fn generate(&self) -> Result<Vec<VectorField3>> {
        (0..self.count).map(|i| self.field(i)).collect()
    }

    pub fn field(&self, i: usize) -> Result<VectorField3> {
        let seed = self.seed.wrapping_add(i as u64);
        let g = &self.grid;
        let v = match self.generator {
            Generator::RandomBand => random_band(g, self.band, seed)?,
            Generator::Beltrami => beltrami(g, 1.0),
            Generator::Abc => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let [a, b, c] = [0; 3].map(|_| rng.random_range(-1.0..=1.0));
                abc(g, a, b, c)?
            }
            Generator::SingleMode => {
                let band = self.band as i64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut k = [0i64; 3];
                while k == [0, 0, 0] {
                    k = [0; 3].map(|_| rng.random_range(-band..=band));
                }
                single_mode(g, k, seed)?
            }
        };
        check_divergence_free(&v, "corpus field")?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityResult {
    pub inequality_id: &'static str,
    pub n: usize,
    pub field_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, with `0/0 = 0`.
    pub ratio: f64,
}

impl InequalityResult {
    fn new(id: &'static str, n: usize, field_id: usize, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self { inequality_id: id, n, field_id, lhs, rhs, ratio }
    }
}

/// Every norm the checks need, computed once per field.
struct Measures {
    n: usize,
    sup: f64,
    l2: f64,
    grad_sup: f64,
    hess_sup: f64,
    log_h4: f64,
    besov: f64,
    besov_curl: f64,
    besov_grad: f64,
    besov_grad_curl: f64,
}

impl Measures {
    fn of(v: &VectorField3, sampling: Sampling) -> Result<Self> {
        let w = curl(v)?;
        Ok(Self {
            n: v.grid().n(),
            sup: sup_norm(v, sampling),
            l2: l2_norm(v),
            grad_sup: grad_sup_norm(v, sampling),
            hess_sup: hessian_sup_norm(v, sampling),
            log_h4: (2.0 + sobolev_seminorm(v, 4)?).ln(),
            besov: besov_norm(v, sampling),
            besov_curl: besov_norm(&w, sampling),
            besov_grad: besov_norm(&vector_gradient(v)?, sampling),
            besov_grad_curl: besov_norm(&vector_gradient(&w)?, sampling),
        })
    }

    fn interpolation(&self, i: usize) -> InequalityResult {
        let rhs = (self.sup * self.besov_grad_curl).sqrt();
        InequalityResult::new(GRAD_INTERPOLATION, self.n, i, self.grad_sup, rhs)
    }

    fn bkm(&self, i: usize, p: f64) -> Result<[InequalityResult; 2]> {
        let (first, second, low) = if p == 2.0 {
            (BKM_GRAD_L2, BKM_HESS_L2, self.l2)
        } else if p.is_infinite() {
            (BKM_GRAD_LINF, BKM_HESS_LINF, self.sup)
        } else {
            return Err(usage(format!("p must be 2 or inf, got {p}")));
        };
        Ok([
            InequalityResult::new(first, self.n, i, self.grad_sup, self.besov_curl * self.log_h4 + low),
            InequalityResult::new(second, self.n, i, self.hess_sup, self.besov_grad_curl * self.log_h4 + low),
        ])
    }

    fn besov(&self, i: usize) -> [InequalityResult; 2] {
        [
            InequalityResult::new(BESOV_SUP, self.n, i, self.besov, self.sup),
            InequalityResult::new(BESOV_GRAD_CURL, self.n, i, self.besov_grad, self.besov_curl),
        ]
    }
}

fn require_solenoidal(fields: &[VectorField3]) -> Result<()> {
    for (i, v) in fields.iter().enumerate() {
        if check_divergence_free(v, "field").is_err() {
            return Err(validation(format!("field {i} is not divergence-free")));
        }
    }
    Ok(())
}

/// Gradient interpolation bound for every field.
pub fn check_interpolation(fields: &[VectorField3], sampling: Sampling) -> Result<Vec<InequalityResult>> {
    fields.iter().enumerate().map(|(i, v)| Ok(Measures::of(v, sampling)?.interpolation(i))).collect()
}

/// First- and second-order logarithmic bounds with `‖v‖_p`, `p ∈ {2, ∞}`.
pub fn check_bkm_bounds(fields: &[VectorField3], p: f64, sampling: Sampling) -> Result<Vec<InequalityResult>> {
    let mut out = Vec::with_capacity(2 * fields.len());
    for (i, v) in fields.iter().enumerate() {
        out.extend(Measures::of(v, sampling)?.bkm(i, p)?);
    }
    Ok(out)
}

/// Besov-by-sup bound and the gradient-by-curl Besov bound. The latter
/// rejects fields that are not divergence-free.
pub fn check_besov_bounds(fields: &[VectorField3], sampling: Sampling) -> Result<Vec<InequalityResult>> {
    require_solenoidal(fields)?;
    let mut out = Vec::with_capacity(2 * fields.len());
    for (i, v) in fields.iter().enumerate() {
        out.extend(Measures::of(v, sampling)?.besov(i));
    }
    Ok(out)
}

/// Every check on one set of fields, each field measured once.
pub fn check_all(fields: &[VectorField3], sampling: Sampling) -> Result<Vec<InequalityResult>> {
    require_solenoidal(fields)?;
    let mut out = Vec::with_capacity(7 * fields.len());
    for (i, v) in fields.iter().enumerate() {
        let m = Measures::of(v, sampling)?;
        out.push(m.interpolation(i));
        out.extend(m.bkm(i, 2.0)?);
        out.extend(m.bkm(i, f64::INFINITY)?);
        out.extend(m.besov(i));
    }
    Ok(out)
}

/// `(‖∇J‖_∞, μ‖∇J'‖_∞)` for `B'(x) = (λ²/μ) B(x/λ)` on the box `λL`,
/// `μ = λ²`. The rescaled field has the same Fourier coefficients.
pub fn scaling_invariance_check(b: &VectorField3, lambda: u32, sampling: Sampling) -> Result<(f64, f64)> {
    if lambda < 2 {
        return Err(usage(format!("lambda must be an integer >= 2, got {lambda}")));
    }
    let l = lambda as f64;
    let mu = l * l;
    let g = b.grid();
    let big = Grid::with_length(g.n(), l * g.length())?;
    let scaled = b.rebox(&big)?.scaled(l * l / mu)?;
    let original = grad_sup_norm(&current(b)?, sampling);
    let rescaled = grad_sup_norm(&current(&scaled)?, sampling);
    Ok((original, mu * rescaled))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport {
    pub inequality_id: &'static str,
    pub n: usize,
    pub count: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// `max_ratio` divided by the maximum at the next coarser `n`.
    pub trend: Option<f64>,
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// Maximum and median ratio per inequality and grid size, sorted by id
/// then `n`.
pub fn estimate_constant(results: &[InequalityResult]) -> Result<Vec<ConstantReport>> {
    if results.is_empty() {
        return Err(usage("no inequality results to summarize"));
    }
    let mut groups: BTreeMap<(&'static str, usize), Vec<f64>> = BTreeMap::new();
    for r in results {
        groups.entry((r.inequality_id, r.n)).or_default().push(r.ratio);
    }
    let mut out: Vec<ConstantReport> = Vec::with_capacity(groups.len());
    for ((id, n), mut ratios) in groups {
        ratios.sort_by(f64::total_cmp);
        let max_ratio = *ratios.last().expect("nonempty group");
        let trend = out.last().filter(|prev| prev.inequality_id == id).map(|prev| max_ratio / prev.max_ratio);
        out.push(ConstantReport { inequality_id: id, n, count: ratios.len(), max_ratio, median_ratio: median(&ratios), trend });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ScalarField;

    fn field(g: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> VectorField3 {
        VectorField3::from_fn(g, f).to_spectral()
    }

    #[test]
    fn zero_and_constant_fields_are_vacuous() {
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let z = VectorField3::zeros_spectral(&g);
        assert_eq!(check_interpolation(std::slice::from_ref(&z), o).unwrap()[0].ratio, 0.0);
        let c = field(&g, |_, _, _| [1.0, 0.5, 0.0]);
        for r in check_bkm_bounds(&[c], f64::INFINITY, o).unwrap() {
            assert!(r.lhs < 1e-14);
            assert_eq!(r.ratio, 0.0);
        }
    }

    #[test]
    fn interpolation_single_mode_composition() {
        // v = (0, 0, sin x): ∇v has max entry 1 and ∇(∇×v) is the Hessian-like
        // tensor with the single entry sin x.
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let v = field(&g, |x, _, _| [0.0, 0.0, x.sin()]);
        let r = &check_interpolation(std::slice::from_ref(&v), o).unwrap()[0];
        assert!((r.lhs - 1.0).abs() < 1e-13);
        let s = ScalarField::from_fn(&g, |x, _, _| x.sin()).to_spectral();
        let want = besov_norm(&s, o).sqrt();
        assert!((r.rhs - want).abs() < 1e-13);
    }

    #[test]
    fn bkm_beltrami() {
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let b = beltrami(&g, 1.0);
        let r = check_bkm_bounds(std::slice::from_ref(&b), f64::INFINITY, o).unwrap();
        assert!((r[0].lhs - 1.0).abs() < 1e-13);
        let want = besov_norm(&b, o) * (2.0 + sobolev_seminorm(&b, 4).unwrap()).ln() + 1.0;
        assert!((r[0].rhs - want).abs() < 1e-12);
        assert!(check_bkm_bounds(&[b], 3.0, o).is_err());
    }

    #[test]
    fn besov_bound_examples() {
        let g = Grid::new(32).unwrap();
        let o = Sampling::Oversampled;
        let one = field(&g, |_, _, _| [1.0, 0.0, 0.0]);
        let r = check_besov_bounds(&[one], o).unwrap();
        assert_eq!(r[0].ratio, 1.0);
        let c4 = field(&g, |_, y, _| [(4.0 * y).cos(), 0.0, 0.0]);
        let r = check_besov_bounds(&[c4], o).unwrap();
        assert!((r[0].ratio - 1.0).abs() < 1e-12);
        let bad = field(&g, |x, _, _| [x.sin(), 0.0, 0.0]);
        assert!(check_besov_bounds(&[bad], o).is_err());
    }

    #[test]
    fn scaling_examples() {
        let g = Grid::new(16).unwrap();
        let o = Sampling::Oversampled;
        let (a, b) = scaling_invariance_check(&beltrami(&g, 1.0), 2, o).unwrap();
        assert!((a - 1.0).abs() < 1e-13 && (b - a).abs() <= 1e-10 * a);
        let z = VectorField3::zeros_spectral(&g);
        assert_eq!(scaling_invariance_check(&z, 2, o).unwrap(), (0.0, 0.0));
        let v = random_band(&g, 4, 3).unwrap();
        let (a, b) = scaling_invariance_check(&v, 2, o).unwrap();
        assert!((b - a).abs() <= 1e-10 * a);
        assert!(scaling_invariance_check(&v, 1, o).is_err());
    }

    #[test]
    fn constant_estimates() {
        let r = |ratio: f64, n: usize| InequalityResult { inequality_id: BESOV_SUP, n, field_id: 0, lhs: ratio, rhs: 1.0, ratio };
        let rep = estimate_constant(&[r(1.0, 16)]).unwrap();
        assert_eq!((rep[0].max_ratio, rep[0].median_ratio), (1.0, 1.0));
        let rep = estimate_constant(&[r(0.0, 16), r(1.0, 16), r(2.0, 32)]).unwrap();
        assert_eq!((rep[0].max_ratio, rep[0].median_ratio), (1.0, 0.5));
        assert_eq!(rep[0].trend, None);
        assert_eq!(rep[1].trend, Some(2.0));
        assert!(estimate_constant(&[]).is_err());
    }

    #[test]
    fn corpus_is_reproducible() {
        let g = Grid::new(16).unwrap();
        for generator in [Generator::RandomBand, Generator::Beltrami, Generator::Abc, Generator::SingleMode] {
            let c = FieldCorpus { seed: 9, count: 3, generator, band: 3, grid: g.clone() };
            assert_eq!(c.generate().unwrap(), c.generate().unwrap());
            assert_eq!(Generator::from_tag(generator.tag()), Some(generator));
        }
    }
}
