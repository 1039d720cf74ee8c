//! `key = value` configuration files with `#` comments.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use bkmhd_core::diagnostics::{DiagConfig, LpsExponents, MaxPrincipleConfig};
use bkmhd_core::dynamics::Model;
use bkmhd_core::inequality_lab::Generator;
use bkmhd_core::spectral::{Grid, Sampling};
use bkmhd_core::timestepper::{StepControl, StepMode};
use sha2::{Digest, Sha256};

use crate::error::{config_err, Result};

/// Raw entries: key -> (line number, value).
struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str, known: &[&str]) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(Some(line), format!("expected key = value, got {content:?}")))?;
            let key = key.trim().to_string();
            if !known.contains(&key.as_str()) {
                return Err(config_err(Some(line), format!("unknown key {key:?}")));
            }
            if let Some((first, _)) = map.get(&key) {
                return Err(config_err(Some(line), format!("duplicate key {key:?} (first set on line {first})")));
            }
            map.insert(key, (line, value.trim().to_string()));
        }
        Ok(Self { map })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.raw(key).ok_or_else(|| config_err(None, format!("missing required key {key:?}")))
    }

    fn get<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => parse(v).ok_or_else(|| config_err(Some(line), format!("{key} must be {what}, got {v:?}"))),
        }
    }

    fn real(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key, default, parse_real, "a number")
    }

    fn uint(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key, default, |v| v.parse().ok(), "a non-negative integer")
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        self.get(key, default, parse_bool, "true or false")
    }

    fn range(&self, key: &str, ok: bool, what: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            let v = self.raw(key).map_or("", |(_, v)| v);
            Err(config_err(self.line(key), format!("{key} out of range: must be {what}, got {v:?}")))
        }
    }
}

fn parse_real(v: &str) -> Option<f64> {
    match v {
        "inf" | "infinity" => Some(f64::INFINITY),
        _ => v.parse().ok().filter(|x: &f64| !x.is_nan()),
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Initial field for `B` or `u`.
#[derive(Debug, Clone, PartialEq)]
pub enum IcSpec {
    Zero,
    Beltrami { amplitude: f64 },
    Abc { a: f64, b: f64, c: f64 },
    RandomBand { band: u32, amplitude: f64, seed: u64 },
    /// Fields read from a checkpoint file.
    File(PathBuf),
}

impl IcSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let text = text.trim();
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| format!("missing ')' in {text:?}"))?;
                (name.trim(), Some(inner))
            }
            None => (text, None),
        };
        let parts: Vec<&str> = args.map_or(Vec::new(), |a| a.split(',').map(str::trim).filter(|s| !s.is_empty()).collect());
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?} in {text:?}"));
        match name {
            "zero" if parts.is_empty() => Ok(IcSpec::Zero),
            "beltrami" => match parts.as_slice() {
                [] => Ok(IcSpec::Beltrami { amplitude: 1.0 }),
                [a] => Ok(IcSpec::Beltrami { amplitude: num(a.strip_prefix("amplitude=").unwrap_or(a))? }),
                _ => Err(format!("beltrami takes at most one argument, got {text:?}")),
            },
            "abc" => match parts.as_slice() {
                [] => Ok(IcSpec::Abc { a: 1.0, b: 1.0, c: 1.0 }),
                [a, b, c] => Ok(IcSpec::Abc { a: num(a)?, b: num(b)?, c: num(c)? }),
                _ => Err(format!("abc takes three coefficients, got {text:?}")),
            },
            "random_band" => {
                let (mut band, mut amplitude, mut seed) = (4u32, 1.0, 0u64);
                for p in parts {
                    let (k, v) = p.split_once('=').ok_or_else(|| format!("random_band arguments are key=value, got {p:?}"))?;
                    let v = v.trim();
                    match k.trim() {
                        "band" => band = v.parse().map_err(|_| format!("bad band {v:?}"))?,
                        "amplitude" => amplitude = num(v)?,
                        "seed" => seed = v.parse().map_err(|_| format!("bad seed {v:?}"))?,
                        other => return Err(format!("unknown random_band argument {other:?}")),
                    }
                }
                Ok(IcSpec::RandomBand { band, amplitude, seed })
            }
            "file" => match parts.as_slice() {
                [p] => Ok(IcSpec::File(PathBuf::from(p))),
                _ => Err(format!("file takes one path, got {text:?}")),
            },
            _ => Err(format!("unknown initial condition {text:?}")),
        }
    }

    pub fn with_seed(&self, new_seed: u64) -> Self {
        match self {
            IcSpec::RandomBand { band, amplitude, .. } => IcSpec::RandomBand { band: *band, amplitude: *amplitude, seed: new_seed },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: Model,
    pub n: usize,
    pub box_length: f64,
    pub nu: f64,
    pub t_end: f64,
    pub step: StepControl,
    pub ic: IcSpec,
    /// Hall-MHD velocity; `None` means zero.
    pub u_ic: Option<IcSpec>,
    pub diag_every: f64,
    pub max_principle: MaxPrincipleConfig,
    pub lps: LpsExponents,
    pub oversample: bool,
    pub out_dir: PathBuf,
    /// Interval between checkpoints; 0 writes only the final one.
    pub checkpoint_every: f64,
}

const SIM_KEYS: &[&str] = &[
    "model",
    "n",
    "box_length",
    "nu",
    "t_end",
    "dt_mode",
    "dt",
    "safety",
    "dt_min",
    "dt_max",
    "ic",
    "u_ic",
    "diag_every",
    "K",
    "lps_p",
    "lps_q",
    "lps_beta",
    "lps_gamma",
    "oversample",
    "out_dir",
    "checkpoint_every",
];

fn check_ic(e: &Entries, key: &str, ic: &IcSpec, n: usize) -> Result<()> {
    if let IcSpec::RandomBand { band, amplitude, .. } = ic {
        let cut = (n / 3) as u32;
        e.range(key, (1..=cut).contains(band), &format!("a band in 1..={cut} for n = {n}"))?;
        e.range(key, amplitude.is_finite(), "a finite amplitude")?;
    }
    Ok(())
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text, SIM_KEYS)?;
        let (line, model) = e.required("model")?;
        let model = Model::from_tag(model)
            .ok_or_else(|| config_err(Some(line), format!("model must be emhd or hallmhd, got {model:?}")))?;
        let n = e.uint("n", 32)?;
        e.range("n", n >= 8 && n % 2 == 0, "an even integer >= 8")?;
        let box_length = e.real("box_length", 2.0 * PI)?;
        e.range("box_length", box_length > 0.0 && box_length.is_finite(), "positive")?;
        Grid::with_length(n, box_length).map_err(|err| config_err(e.line("n"), err.to_string()))?;

        if model == Model::Emhd {
            for key in ["nu", "u_ic"] {
                if e.has(key) {
                    return Err(config_err(e.line(key), format!("{key} is not allowed for model emhd (E-MHD has no velocity equation)")));
                }
            }
        }
        let nu = e.real("nu", if model == Model::Emhd { 0.0 } else { 1.0 })?;
        e.range("nu", nu >= 0.0 && nu.is_finite(), ">= 0")?;

        e.required("t_end")?;
        let t_end = e.real("t_end", 0.0)?;
        e.range("t_end", t_end >= 0.0 && t_end.is_finite(), ">= 0")?;

        let defaults = StepControl::default();
        let mode = e.get("dt_mode", defaults.mode, |v| match v {
            "fixed" => Some(StepMode::Fixed),
            "cfl" => Some(StepMode::Cfl),
            _ => None,
        }, "fixed or cfl")?;
        let step = StepControl {
            mode,
            dt: e.real("dt", defaults.dt)?,
            safety: e.real("safety", defaults.safety)?,
            dt_min: e.real("dt_min", defaults.dt_min)?,
            dt_max: e.real("dt_max", defaults.dt_max)?,
        };
        e.range("dt", step.dt > 0.0 && step.dt.is_finite(), "positive")?;
        e.range("safety", step.safety > 0.0 && step.safety <= 1.0, "in (0, 1]")?;
        e.range("dt_min", step.dt_min > 0.0, "positive")?;
        e.range("dt_max", step.dt_max >= step.dt_min && step.dt_max.is_finite(), ">= dt_min")?;

        let (line, ic) = e.required("ic")?;
        let ic = IcSpec::parse(ic).map_err(|m| config_err(Some(line), m))?;
        check_ic(&e, "ic", &ic, n)?;
        let u_ic = match e.raw("u_ic") {
            Some((line, v)) => Some(IcSpec::parse(v).map_err(|m| config_err(Some(line), m))?),
            None => None,
        };
        if let Some(u) = &u_ic {
            check_ic(&e, "u_ic", u, n)?;
        }

        let diag_every = e.real("diag_every", 0.1)?;
        e.range("diag_every", diag_every > 0.0 && diag_every.is_finite(), "positive")?;
        let k = e.real("K", MaxPrincipleConfig::default().k)?;
        e.range("K", k > 0.0 && k.is_finite(), "positive")?;
        let d = LpsExponents::default();
        let lps = LpsExponents {
            p: e.real("lps_p", d.p)?,
            q: e.real("lps_q", d.q)?,
            beta: e.real("lps_beta", d.beta)?,
            gamma: e.real("lps_gamma", d.gamma)?,
        };
        for (key, v) in [("lps_p", lps.p), ("lps_q", lps.q), ("lps_beta", lps.beta), ("lps_gamma", lps.gamma)] {
            e.range(key, v >= 1.0, ">= 1")?;
        }
        let checkpoint_every = e.real("checkpoint_every", 0.0)?;
        e.range("checkpoint_every", checkpoint_every >= 0.0 && checkpoint_every.is_finite(), ">= 0")?;

        Ok(Self {
            model,
            n,
            box_length,
            nu,
            t_end,
            step,
            ic,
            u_ic,
            diag_every,
            max_principle: MaxPrincipleConfig { k },
            lps,
            oversample: e.flag("oversample", true)?,
            out_dir: PathBuf::from(e.raw("out_dir").map_or("out", |(_, v)| v)),
            checkpoint_every,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::with_length(self.n, self.box_length)?)
    }

    pub fn sampling(&self) -> Sampling {
        Sampling::from_flag(self.oversample)
    }

    pub fn diag_config(&self) -> DiagConfig {
        DiagConfig { max_principle: self.max_principle, lps: self.lps, sampling: self.sampling() }
    }

    /// Replace the seed of every random initial condition.
    pub fn override_seed(&mut self, seed: u64) {
        self.ic = self.ic.with_seed(seed);
        self.u_ic = self.u_ic.as_ref().map(|u| u.with_seed(seed.wrapping_add(1)));
    }

    /// SHA-256 of the parsed configuration, for provenance lines.
    pub fn hash(&self) -> String {
        hex_digest(format!("{self:?}").as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Inequality-lab sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub n_values: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub generator: Generator,
    pub band: u32,
    pub box_length: f64,
    pub oversample: bool,
    /// Scaling factor for the invariance check; 0 skips it.
    pub scaling_lambda: u32,
    pub out_dir: PathBuf,
}

const LAB_KEYS: &[&str] = &["n", "count", "seed", "generator", "band", "box_length", "oversample", "scaling_lambda", "out_dir"];

impl LabConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text, LAB_KEYS)?;
        let n_values = e.get(
            "n",
            vec![32, 64],
            |v| v.split(',').map(|s| s.trim().parse::<usize>().ok()).collect::<Option<Vec<_>>>(),
            "a comma-separated list of grid sizes",
        )?;
        e.range("n", !n_values.is_empty() && n_values.iter().all(|&n| n >= 8 && n % 2 == 0), "even integers >= 8")?;
        let count = e.uint("count", 100)?;
        e.range("count", count > 0, "positive")?;
        let generator = e.get("generator", Generator::RandomBand, Generator::from_tag, "random_band, beltrami, abc or single_mode")?;
        let band = e.get("band", 8u32, |v| v.parse().ok(), "a positive integer")?;
        let smallest = *n_values.iter().min().expect("nonempty");
        e.range("band", band >= 1 && band as usize <= smallest / 3, &format!("in 1..={} for the smallest n", smallest / 3))?;
        let box_length = e.real("box_length", 2.0 * PI)?;
        e.range("box_length", box_length > 0.0 && box_length.is_finite(), "positive")?;
        let scaling_lambda = e.get("scaling_lambda", 2u32, |v| v.parse().ok(), "a non-negative integer")?;
        e.range("scaling_lambda", scaling_lambda == 0 || scaling_lambda >= 2, "0 or an integer >= 2")?;
        Ok(Self {
            n_values,
            count,
            seed: e.get("seed", 1u64, |v| v.parse().ok(), "a non-negative integer")?,
            generator,
            band,
            box_length,
            oversample: e.flag("oversample", true)?,
            scaling_lambda,
            out_dir: PathBuf::from(e.raw("out_dir").map_or("out", |(_, v)| v)),
        })
    }

    /// Oversampling is skipped from `n = 64` up; those grids already resolve
    /// band-limited corpora finely and padding would dominate the cost.
    pub fn sampling(&self, n: usize) -> Sampling {
        Sampling::from_flag(self.oversample && n < 64)
    }

    pub fn hash(&self) -> String {
        hex_digest(format!("{self:?}").as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: crate::error::CliError) -> Option<usize> {
        match err {
            crate::error::CliError::Config { line, .. } => line,
            other => panic!("expected a configuration error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = SimConfig::parse("model=emhd\nn=32\nt_end=1.0\nic=beltrami").unwrap();
        assert_eq!(c.model, Model::Emhd);
        assert_eq!(c.n, 32);
        assert_eq!(c.t_end, 1.0);
        assert_eq!(c.ic, IcSpec::Beltrami { amplitude: 1.0 });
        assert_eq!(c.step, StepControl::default());
        assert_eq!(c.diag_every, 0.1);
        assert_eq!(c.max_principle.k, 6.0);
        assert_eq!(c.lps, LpsExponents::default());
        assert!(c.oversample);
        assert!((c.box_length - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn range_and_consistency_errors() {
        let err = SimConfig::parse("model=hallmhd\nt_end=1\nic=beltrami\nnu=-1").unwrap_err();
        assert!(err.to_string().contains("nu"), "{err}");
        assert_eq!(line_of(err), Some(4));
        let err = SimConfig::parse("model=emhd\nnu=0.5\nt_end=1\nic=beltrami").unwrap_err();
        assert!(err.to_string().contains("E-MHD"), "{err}");
        assert_eq!(line_of(err), Some(2));
        let err = SimConfig::parse("model=emhd\nt_end=1\nic=beltrami\nbogus=3").unwrap_err();
        assert_eq!(line_of(err), Some(4));
        let err = SimConfig::parse("model=emhd\nt_end=x\nic=beltrami").unwrap_err();
        assert_eq!(line_of(err), Some(2));
        let err = SimConfig::parse("model=emhd\nt_end=1\nic=random_band(band=20)").unwrap_err();
        assert_eq!(line_of(err), Some(3));
        assert!(SimConfig::parse("model=emhd\nt_end=1").is_err());
        assert!(SimConfig::parse("model=emhd\nn=7\nt_end=1\nic=beltrami").is_err());
        assert!(SimConfig::parse("model=emhd\nt_end=1\nt_end=2\nic=beltrami").is_err());
        assert!(SimConfig::parse("model=emhd\nt_end=1\nic=beltrami\nu_ic=zero").is_err());
    }

    #[test]
    fn comments_and_ic_grammar() {
        let text = "# run\nmodel = hallmhd   # Hall\nt_end = 0.5\nic = random_band(band=4, amplitude=0.5, seed=7)\nu_ic = abc(1, 0.5, 2)\nlps_p = inf\ndt_mode = fixed\ndt = 0.001\n";
        let c = SimConfig::parse(text).unwrap();
        assert_eq!(c.ic, IcSpec::RandomBand { band: 4, amplitude: 0.5, seed: 7 });
        assert_eq!(c.u_ic, Some(IcSpec::Abc { a: 1.0, b: 0.5, c: 2.0 }));
        assert_eq!(c.step.mode, StepMode::Fixed);
        assert_eq!(c.nu, 1.0);
        assert_eq!(IcSpec::parse("beltrami(0.5)").unwrap(), IcSpec::Beltrami { amplitude: 0.5 });
        assert_eq!(IcSpec::parse("file(a/b.bkmd)").unwrap(), IcSpec::File(PathBuf::from("a/b.bkmd")));
        assert!(IcSpec::parse("abc(1,2)").is_err());
        assert!(IcSpec::parse("vortex").is_err());
        let mut c2 = c.clone();
        c2.override_seed(99);
        assert_eq!(c2.ic, IcSpec::RandomBand { band: 4, amplitude: 0.5, seed: 99 });
        assert_ne!(c.hash(), c2.hash());
        assert_eq!(c.hash(), SimConfig::parse(text).unwrap().hash());
    }

    #[test]
    fn lab_config() {
        let c = LabConfig::parse("n = 32, 64\ncount = 10\nband = 8").unwrap();
        assert_eq!(c.n_values, vec![32, 64]);
        assert_eq!(c.generator, Generator::RandomBand);
        assert_eq!(c.sampling(32), Sampling::Oversampled);
        assert_eq!(c.sampling(64), Sampling::Grid);
        assert!(LabConfig::parse("n = 16\nband = 8").is_err());
        assert!(LabConfig::parse("scaling_lambda = 1").is_err());
    }
}
